from __future__ import annotations

from pydantic import BaseModel, Field

from src.config import Scheme, settings


class IntegrateOptions(BaseModel):
    step: float = Field(gt=0)
    scheme: Scheme = Scheme.RK4
    # None disables the monitor
    positivity_floor: float | None = 0.0
    max_steps: int = Field(default=5_000_000, ge=1)
    track_breakpoints: bool = True
    gauss_nodes: int = Field(default=2, ge=1, le=16)

    @classmethod
    def from_settings(cls, **overrides) -> IntegrateOptions:
        cfg = settings.integrator
        values = {
            "step": cfg.step,
            "scheme": cfg.scheme,
            "positivity_floor": cfg.positivity_floor,
            "max_steps": cfg.max_steps,
            "track_breakpoints": cfg.track_breakpoints,
            "gauss_nodes": cfg.gauss_nodes,
        }
        # None means "keep the default", except for the floor where it disables the monitor
        values.update({k: v for k, v in overrides.items() if v is not None})
        if "positivity_floor" in overrides:
            values["positivity_floor"] = overrides["positivity_floor"]
        return cls(**values)

    def halved(self) -> IntegrateOptions:
        return self.model_copy(update={"step": self.step / 2.0, "max_steps": 2 * self.max_steps})
