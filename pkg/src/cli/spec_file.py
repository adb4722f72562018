"""Loading and writing spec files."""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from pydantic import ValidationError

from src.cli.schema import (
    ClampedPowerShape,
    DensityKernel,
    DistributedBirthModel,
    HarvestPowerShape,
    InstantKernel,
    IntegratorHint,
    KernelBirthModel,
    LagKernel,
    MackeyGlassShape,
    NicholsonShape,
    PointwiseMinShape,
    SolutionModel,
    SpecFile,
    UniformKernel,
    WindowClampShape,
    WindowMinBirthModel,
)
from src.config import settings
from src.errors import SpecFileError
from src.experiments.exact import ExactSolution
from src.logger import logger as log
from src.models.examples import ModelFixture
from src.system.kernels import Density, InstantPoint, LagPoint, UniformDensity
from src.system.nonlinearity import (
    BirthTerm,
    CustomEnvelope,
    DistributedBirth,
    DistributedTerm,
    KernelBirth,
    WindowMinBirth,
)
from src.system.shapes import ClampedPower, HarvestHill, HarvestPower, MackeyGlass, Nicholson, PointwiseMin, WindowClamp
from src.system.spec import HarvestTerm, LinearTerm, SystemSpec, make_system
from src.timefn import CoefficientFn, const, fn_from_json, fn_to_json
from src.timefn.codec import fn_from_model


@dataclass(frozen=True)
class LoadedSpec:
    spec: SystemSpec
    initial: tuple[CoefficientFn, ...] | None = None
    solution: ExactSolution | None = None
    hint: IntegratorHint | None = None


def _path(loc) -> str:
    out = "$"
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


@contextmanager
def _at(path: str):
    try:
        yield
    except ValueError as exc:
        if isinstance(exc, SpecFileError):
            raise
        raise SpecFileError(str(exc), path) from exc


def _fn(expr) -> CoefficientFn:
    return fn_from_model(expr)


def _kernel(model):
    match model:
        case InstantKernel():
            return InstantPoint()
        case LagKernel():
            return LagPoint(_fn(model.lag))
        case DensityKernel():
            return Density(_fn(model.density), _fn(model.support))
        case UniformKernel():
            return UniformDensity(_fn(model.width))
    raise TypeError(f"unknown kernel model {type(model).__name__}")


def _shape(model):
    match model:
        case NicholsonShape():
            return Nicholson(_fn(model.c))
        case MackeyGlassShape():
            return MackeyGlass(_fn(model.c), model.alpha)
        case ClampedPowerShape():
            return ClampedPower(model.p, model.cap, model.scale)
        case WindowClampShape():
            return WindowClamp(_shape(model.inner), model.m)
        case PointwiseMinShape():
            return PointwiseMin(tuple(_shape(part) for part in model.parts))
    raise TypeError(f"unknown shape model {type(model).__name__}")


def _birth(model):
    match model:
        case None:
            return None
        case KernelBirthModel():
            return KernelBirth(
                tuple(BirthTerm(_fn(term.coef), _shape(term.shape), _kernel(term.kernel)) for term in model.terms)
            )
        case DistributedBirthModel():
            return DistributedBirth(
                tuple(
                    DistributedTerm(_fn(term.b), _fn(term.lam), _fn(term.lag), _shape(term.shape))
                    for term in model.terms
                ),
                model.evaluation_time,
            )
        case WindowMinBirthModel():
            return WindowMinBirth(_fn(model.beta), _shape(model.shape), model.window)
    raise TypeError(f"unknown birth model {type(model).__name__}")


def _harvest(model) -> HarvestTerm | None:
    if model is None:
        return None
    if isinstance(model.shape, HarvestPowerShape):
        shape = HarvestPower(model.shape.p)
    else:
        shape = HarvestHill(model.shape.p, model.shape.k)
    return HarvestTerm(_fn(model.kappa), shape)


def spec_from_model(doc: SpecFile) -> LoadedSpec:
    n = doc.n
    decay = []
    for i, expr in enumerate(doc.d):
        with _at(f"$.d[{i}]"):
            decay.append(_fn(expr))
    for key, (lo, hi) in doc.declared_bounds.items():
        with _at(f"$.declared_bounds.{key}"):
            if not (key.startswith("d") and key[1:].isdigit() and 1 <= int(key[1:]) <= n):
                raise ValueError(f"unknown bounded coefficient {key!r}, expected d1..d{n}")
            decay[int(key[1:]) - 1] = decay[int(key[1:]) - 1].with_bounds(lo, hi)

    linear = None
    if doc.L is not None:
        linear = []
        for i, row in enumerate(doc.L):
            out_row = []
            for j, entry in enumerate(row):
                with _at(f"$.L[{i}][{j}]"):
                    if entry is None:
                        out_row.append(None)
                    elif isinstance(entry, list):
                        out_row.append([LinearTerm(_fn(e.a), _kernel(e.kernel)) for e in entry])
                    else:
                        out_row.append(LinearTerm(_fn(entry.a), _kernel(entry.kernel)))
            linear.append(out_row)

    births = None
    if doc.f is not None:
        births = []
        for i, model in enumerate(doc.f):
            with _at(f"$.f[{i}]"):
                births.append(_birth(model))

    harvest = None
    if doc.K is not None:
        harvest = []
        for i, model in enumerate(doc.K):
            with _at(f"$.K[{i}]"):
                harvest.append(_harvest(model))

    with _at("$"):
        spec = make_system(decay, linear, births, harvest, doc.tau, doc.domain_start, doc.name)

    initial = None
    if doc.initial is not None:
        with _at("$.initial"):
            initial = tuple(_fn(expr) for expr in doc.initial)
    solution = None
    if doc.solution is not None:
        with _at("$.solution"):
            solution = ExactSolution(tuple(_fn(expr) for expr in doc.solution.components), doc.solution.valid_from)
    return LoadedSpec(spec, initial, solution, doc.integrator)


def parse_spec(data: dict) -> LoadedSpec:
    try:
        doc = SpecFile.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SpecFileError(first["msg"], _path(first["loc"])) from exc
    return spec_from_model(doc)


def load_spec(path: str | Path) -> LoadedSpec:
    """
    Read and validate a spec file.

    :raises SpecFileError: unreadable file, invalid JSON or schema/model violation;
        the message names the offending location
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise SpecFileError(f"cannot read spec file: {exc.strerror}", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc
    try:
        loaded = parse_spec(data)
    except SpecFileError as exc:
        raise SpecFileError(str(exc), str(path)) from exc
    log.info("Spec file loaded", extra={"path": str(path), "system": loaded.spec.name, "n": loaded.spec.n})
    return loaded


def _kernel_json(kernel) -> dict:
    match kernel:
        case InstantPoint():
            return {"kind": "instant"}
        case LagPoint():
            return {"kind": "lag", "lag": fn_to_json(kernel.lag)}
        case Density():
            return {"kind": "density", "density": fn_to_json(kernel.density), "support": fn_to_json(kernel.support)}
        case UniformDensity():
            return {"kind": "uniform", "width": fn_to_json(kernel.width)}
    raise SpecFileError(f"kernel {type(kernel).__name__} has no spec-file form")


def _shape_json(shape) -> dict:
    match shape:
        case Nicholson():
            return {"kind": "nicholson", "c": fn_to_json(shape.c)}
        case MackeyGlass():
            return {"kind": "mackey_glass", "c": fn_to_json(shape.c), "alpha": shape.alpha}
        case ClampedPower():
            return {"kind": "clamped_power", "p": shape.p, "cap": shape.cap, "scale": shape.scale}
        case WindowClamp():
            return {"kind": "window_clamp", "inner": _shape_json(shape.inner), "m": shape.m}
        case PointwiseMin():
            return {"kind": "pointwise_min", "parts": [_shape_json(part) for part in shape.parts]}
    raise SpecFileError(f"shape {type(shape).__name__} has no spec-file form")


def _birth_json(f) -> dict | None:
    match f:
        case None:
            return None
        case KernelBirth():
            return {
                "kind": "kernel_birth",
                "terms": [
                    {"coef": fn_to_json(t.coef), "shape": _shape_json(t.shape), "kernel": _kernel_json(t.kernel)}
                    for t in f.terms
                ],
            }
        case DistributedBirth():
            return {
                "kind": "distributed_birth",
                "evaluation_time": f.evaluation_time,
                "terms": [
                    {
                        "b": fn_to_json(t.b),
                        "lam": fn_to_json(t.lam),
                        "lag": fn_to_json(t.lag),
                        "shape": _shape_json(t.shape),
                    }
                    for t in f.terms
                ],
            }
        case WindowMinBirth():
            return {
                "kind": "window_min_birth",
                "beta": fn_to_json(f.beta_fn),
                "shape": _shape_json(f.shape),
                "window": f.window,
            }
        case CustomEnvelope():
            raise SpecFileError("custom birth terms are library-only and cannot be exported")
    raise SpecFileError(f"birth term {type(f).__name__} has no spec-file form")


def _harvest_json(k: HarvestTerm | None) -> dict | None:
    if k is None:
        return None
    if isinstance(k.shape, HarvestPower):
        shape = {"kind": "power", "p": k.shape.p}
    else:
        shape = {"kind": "hill", "p": k.shape.p, "k": k.shape.k}
    return {"kappa": fn_to_json(k.kappa), "shape": shape}


def _linear_json(terms: tuple[LinearTerm, ...]):
    items = [{"a": fn_to_json(term.a), "kernel": _kernel_json(term.kernel)} for term in terms]
    if not items:
        return None
    return items[0] if len(items) == 1 else items


def spec_to_dict(
    sys: SystemSpec,
    initial=None,
    solution: ExactSolution | None = None,
    hint: IntegratorHint | None = None,
) -> dict:
    out = {
        "version": 1,
        "name": sys.name,
        "n": sys.n,
        "tau": sys.tau,
        "domain_start": sys.domain_start,
        "d": [fn_to_json(d) for d in sys.decay],
        "L": [[_linear_json(terms) for terms in row] for row in sys.linear],
        "f": [_birth_json(f) for f in sys.birth],
    }
    if any(k is not None for k in sys.harvest):
        out["K"] = [_harvest_json(k) for k in sys.harvest]
    if initial is not None:
        out["initial"] = [fn_to_json(fn) for fn in initial]
    if solution is not None:
        out["solution"] = {
            "components": [fn_to_json(fn) for fn in solution.components],
            "valid_from": solution.valid_from,
        }
    if hint is not None:
        out["integrator"] = {"scheme": hint.scheme.value, "step": hint.step}
    return out


def fixture_to_dict(fixture: ModelFixture) -> dict:
    """Spec-file form of a fixture, carrying its initial segment, exact solution and step."""
    initial = fixture.initial or None
    hint = IntegratorHint(scheme=fixture.scheme, step=fixture.step)
    return spec_to_dict(fixture.spec, initial, fixture.exact, hint)


def dump_json(data, path: str | Path | None = None) -> str:
    text = json.dumps(data, sort_keys=True, indent=settings.output.json_indent) + "\n"
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def write_spec(path: str | Path, data: dict) -> Path:
    path = Path(path)
    dump_json(data, path)
    log.info("Spec file written", extra={"path": str(path), "system": data.get("name", "")})
    return path


def load_solution(path: str | Path) -> ExactSolution:
    """Solution file: {"components": [expr, ...], "valid_from": t}."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        doc = SolutionModel.model_validate(data)
    except OSError as exc:
        raise SpecFileError(f"cannot read solution file: {exc.strerror}", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SpecFileError(first["msg"], f"{path} {_path(first['loc'])}") from exc
    return ExactSolution(tuple(_fn(expr) for expr in doc.components), doc.valid_from)


def parse_initial(text: str, n: int) -> tuple[CoefficientFn, ...]:
    """
    Initial segment from the command line: a JSON file with one expression per
    component, or comma-separated constants (a single value is used for every component).
    """
    path = Path(text)
    if path.suffix == ".json" or path.is_file():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise SpecFileError(f"cannot read initial segment: {exc.strerror}", str(path)) from exc
        except json.JSONDecodeError as exc:
            raise SpecFileError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc
        if not isinstance(data, list) or len(data) != n:
            raise SpecFileError(f"expected a list of {n} expressions", str(path))
        out = []
        for i, item in enumerate(data):
            with _at(f"{path} $[{i}]"):
                out.append(fn_from_json(item))
        return tuple(out)
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise SpecFileError(f"initial segment {text!r} is neither a file nor a list of numbers") from exc
    if len(values) == 1:
        values = values * n
    if len(values) != n:
        raise SpecFileError(f"initial segment needs {n} values, got {len(values)}")
    return tuple(const(v) for v in values)
