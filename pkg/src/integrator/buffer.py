from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from src.errors import ExplicitnessError, HistoryGapError
from src.integrator.hermite import cubic_hermite, gauss_rule, segment_extrema
from src.system.history import History, Integrand
from src.timefn import CoefficientFn, evaluate, slope_or_difference


class HistoryBuffer(History):
    """
    Dense output on a uniform knot grid t_k = t0 + (k - lead) h.

    Segment k spans [t_k, t_k+1]; its end slopes are stored separately
    (d_start, d_end) since the derivative may jump at t0.
    """

    def __init__(self, n: int, t0: float, h: float, lead: int, capacity: int, gauss_nodes: int = 2):
        self.n = n
        self.t0 = float(t0)
        self.h = float(h)
        self.lead = int(lead)
        self.capacity = int(capacity)
        self.gauss_nodes = gauss_nodes
        self.times = self.t0 + (np.arange(self.capacity) - self.lead) * self.h
        self.y = np.zeros((self.capacity, n))
        self.d_start = np.zeros((self.capacity, n))
        self.d_end = np.zeros((self.capacity, n))
        self.seg_min = np.zeros((self.capacity, n))
        self.seg_max = np.zeros((self.capacity, n))
        self.last = -1

    @property
    def t_first(self) -> float:
        return float(self.times[0])

    @property
    def t_last(self) -> float:
        return float(self.times[self.last])

    def fill_initial(self, phi0: Sequence[CoefficientFn]) -> None:
        """Knots t_0..t_lead from the initial functions, slopes exact when available."""
        if len(phi0) != self.n:
            raise ValueError(f"initial segment needs {self.n} components, got {len(phi0)}")
        knots = self.times[: self.lead + 1]
        slopes = np.zeros((self.lead + 1, self.n))
        for i, fn in enumerate(phi0):
            self.y[: self.lead + 1, i] = evaluate(fn, knots, check_domain=False)
            slopes[:, i] = [slope_or_difference(fn.with_domain(-math.inf), float(t)) for t in knots]
        self.last = self.lead
        if self.lead > 0:
            self.d_start[: self.lead] = slopes[:-1]
            self.d_end[: self.lead] = slopes[1:]
            self._refresh_extrema(slice(0, self.lead))

    def _refresh_extrema(self, segments: slice) -> None:
        y0 = self.y[segments]
        y1 = self.y[segments.start + 1 : segments.stop + 1]
        lo, hi = segment_extrema(self.h, y0, y1, self.d_start[segments], self.d_end[segments])
        self.seg_min[segments] = lo
        self.seg_max[segments] = hi

    def commit(self, y_new: np.ndarray, slope_start: np.ndarray, slope_end: np.ndarray) -> None:
        """Append knot last+1 and close the segment behind it."""
        k = self.last
        if k + 1 >= self.capacity:
            raise HistoryGapError("history buffer is full")
        self.y[k + 1] = y_new
        self.d_start[k] = slope_start
        self.d_end[k] = slope_end
        self.last = k + 1
        self._refresh_extrema(slice(k, k + 1))

    def _tol(self, t: float) -> float:
        return 1e-9 * self.h + 1e-13 * abs(t)

    def _check(self, t: float) -> None:
        if t < self.t_first - self._tol(t):
            raise HistoryGapError(f"t={t:.6g} precedes the stored history (starts at {self.t_first:.6g})")
        if t > self.t_last + self._tol(t):
            raise ExplicitnessError(f"history requested at t={t:.6g} beyond the last knot {self.t_last:.6g}")

    def _locate(self, t):
        """Segment index and local coordinate, clipped to the committed span."""
        u = (np.asarray(t, dtype=float) - self.t0) / self.h + self.lead
        k = np.clip(np.floor(u).astype(int), 0, max(self.last - 1, 0))
        theta = np.clip(u - k, 0.0, 1.0)
        return k, theta

    def interpolate(self, component: int, t) -> np.ndarray:
        if self.last == 0:
            return np.full(np.shape(t), self.y[0, component])
        k, theta = self._locate(t)
        return cubic_hermite(
            theta,
            self.h,
            self.y[k, component],
            self.y[k + 1, component],
            self.d_start[k, component],
            self.d_end[k, component],
        )

    def value(self, component: int, t: float) -> float:
        self._check(t)
        return float(self.interpolate(component, t))

    def state(self, t: float) -> np.ndarray:
        self._check(t)
        return np.array([float(self.interpolate(i, t)) for i in range(self.n)])

    def integral(self, component: int, start: float, end: float, integrand: Integrand) -> float:
        if end <= start:
            return 0.0
        self._check(start)
        self._check(end)
        k_a, _ = self._locate(start)
        k_b, _ = self._locate(end)
        inner = self.times[int(k_a) + 1 : int(k_b) + 1]
        edges = np.concatenate([[start], inner[(inner > start) & (inner < end)], [end]])
        nodes, weights = gauss_rule(self.gauss_nodes)
        widths = np.diff(edges)
        s = edges[:-1, None] + widths[:, None] * nodes[None, :]
        x = self.interpolate(component, s)
        values = integrand(s.reshape(-1), x.reshape(-1)).reshape(s.shape)
        return float(np.sum(widths[:, None] * weights[None, :] * values))

    def _window(self, component: int, start: float, end: float) -> tuple[float, float]:
        self._check(start)
        self._check(end)
        if self.last == 0 or end <= start:
            v = float(self.interpolate(component, start))
            return v, v
        k_a, th_a = self._locate(start)
        k_b, th_b = self._locate(end)
        k_a, k_b = int(k_a), int(k_b)
        if th_b == 0.0 and k_b > k_a:
            k_b, th_b = k_b - 1, 1.0
        c = component
        if k_a == k_b:
            lo, hi = segment_extrema(
                self.h, self.y[k_a, c], self.y[k_a + 1, c], self.d_start[k_a, c], self.d_end[k_a, c],
                th_a, th_b,
            )
            return float(lo), float(hi)
        lo_a, hi_a = segment_extrema(
            self.h, self.y[k_a, c], self.y[k_a + 1, c], self.d_start[k_a, c], self.d_end[k_a, c], th_a, 1.0
        )
        lo_b, hi_b = segment_extrema(
            self.h, self.y[k_b, c], self.y[k_b + 1, c], self.d_start[k_b, c], self.d_end[k_b, c], 0.0, th_b
        )
        lows = [float(lo_a), float(lo_b)]
        highs = [float(hi_a), float(hi_b)]
        if k_b > k_a + 1:
            lows.append(float(np.min(self.seg_min[k_a + 1 : k_b, c])))
            highs.append(float(np.max(self.seg_max[k_a + 1 : k_b, c])))
        return min(lows), max(highs)

    def window_min(self, component: int, start: float, end: float) -> float:
        return self._window(component, start, end)[0]

    def window_max(self, component: int, start: float, end: float) -> float:
        return self._window(component, start, end)[1]


class HistoryView(History):
    """
    Committed buffer plus a linear stage tail on (t_n, t_stage].

    The buffer itself is never read past its last knot.
    """

    def __init__(self, buffer: HistoryBuffer, stage_time: float, stage_value: np.ndarray):
        self.buffer = buffer
        self.n = buffer.n
        self.t_n = buffer.t_last
        self.y_n = buffer.y[buffer.last]
        self.stage_time = float(stage_time)
        self.stage_value = np.asarray(stage_value, dtype=float)
        self.span = self.stage_time - self.t_n

    def _tail(self, component: int, t):
        if self.span <= 0:
            return np.full(np.shape(t), self.stage_value[component])
        w = (np.asarray(t, dtype=float) - self.t_n) / self.span
        return (1.0 - w) * self.y_n[component] + w * self.stage_value[component]

    def _past(self, t: float) -> bool:
        return t <= self.t_n + self.buffer._tol(t)

    def value(self, component: int, t: float) -> float:
        if self._past(t):
            return self.buffer.value(component, t)
        if t > self.stage_time + self.buffer._tol(t):
            raise ExplicitnessError(f"stage at t={self.stage_time:.6g} requested history at t={t:.6g}")
        return float(self._tail(component, t))

    def integral(self, component: int, start: float, end: float, integrand: Integrand) -> float:
        if end > self.stage_time + self.buffer._tol(end):
            raise ExplicitnessError(f"stage at t={self.stage_time:.6g} integrates up to t={end:.6g}")
        split = min(end, self.t_n)
        total = self.buffer.integral(component, start, split, integrand) if split > start else 0.0
        lo = max(start, self.t_n)
        if end > lo:
            nodes, weights = gauss_rule(max(self.buffer.gauss_nodes, 2))
            s = lo + (end - lo) * nodes
            total += float((end - lo) * np.sum(weights * integrand(s, self._tail(component, s))))
        return total

    def _window(self, component: int, start: float, end: float, pick) -> float:
        parts = []
        split = min(end, self.t_n)
        if split >= start:
            parts.append(
                self.buffer.window_min(component, start, split)
                if pick is min
                else self.buffer.window_max(component, start, split)
            )
        lo = max(start, self.t_n)
        if end > lo:
            parts.extend(float(v) for v in self._tail(component, np.array([lo, min(end, self.stage_time)])))
        return pick(parts)

    def window_min(self, component: int, start: float, end: float) -> float:
        return self._window(component, start, end, min)

    def window_max(self, component: int, start: float, end: float) -> float:
        return self._window(component, start, end, max)
