"""Confidence horizons in demands and in calendar time.

Given mishap-free operation ``T(t_now)`` and an extension coefficient ``k``,
the horizon in demands is ``k * T(t_now)``.  Its calendar length ``t_hor``
solves ``T(t_now + t_hor) = (k + 1) T(t_now)`` on the deployment schedule.
``T`` is piecewise quadratic, so the solver locates the piece holding the
root and solves that quadratic exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConfbootError, DegenerateEvidenceError, ValidationError
from .inference import UNBOUNDED
from .schedule import DeploymentSchedule


class Anticipation(str, enum.Enum):
    AWARE = "aware"
    UNAWARE = "unaware"


@dataclass(frozen=True)
class HorizonResult:
    k: float
    T_past: float
    T_hor: float
    t_hor: float
    anticipation: Anticipation


def k_linear(k):
    """Calendar-time extension coefficient under constant-rate fleet growth."""
    if not k >= 0.0:
        raise ValidationError(f"k must be >= 0, got {k!r}")
    return math.sqrt(k + 1.0) - 1.0


def _quadratic_step(d, slope, curv):
    """Smallest ``u`` on the rising branch of ``slope*u + curv*u**2/2 = d``."""
    if curv == 0.0:
        if slope == 0.0:
            if d == 0.0:
                return 0.0
            raise ArithmeticError("flat piece cannot reach the target")
        return d / slope
    disc = slope * slope + 2.0 * curv * d
    if disc < 0.0:
        raise ArithmeticError("negative discriminant: target unreachable on this piece")
    root = math.sqrt(disc)
    if slope + root == 0.0:
        return 0.0
    return 2.0 * d / (slope + root)


def _solve_on_piece(schedule, a, b, target):
    """Root of ``T(t) = target`` for ``t`` in ``[a, b]`` where ``T`` is one quadratic."""
    m = 0.5 * (a + b)
    o = schedule.op_rate
    u = _quadratic_step(
        target - schedule.cumulative_operation(m),
        o * schedule.fleet_size(m),
        o * schedule.fleet_slope(m),
    )
    return min(max(m + u, a), b)


def reach_time(schedule: DeploymentSchedule, t_start, target, h0=None):
    """Earliest ``t >= t_start`` with ``cumulative_operation(t) >= target``.

    Brackets by doubling a step from ``h0``, narrows the bracket by bisection
    over the schedule breakpoints inside it, then solves the remaining single
    quadratic piece in closed form.  Returns ``inf`` if the fleet dies out
    before the target is reached.
    """
    T = schedule.cumulative_operation
    if T(t_start) >= target:
        return t_start
    bps = schedule.breakpoints()
    if schedule.eventually_empty() and T(max(bps[-1], t_start)) < target:
        return math.inf

    h = h0 if h0 is not None else max(t_start * 1e-6, 1e-6)
    lo, hi = t_start, t_start + h
    while T(hi) < target:
        lo, h = hi, 2.0 * h
        hi = t_start + h

    inner = [p for p in bps if lo < p < hi]
    while inner:
        mid = inner[len(inner) // 2]
        if T(mid) >= target:
            hi = mid
            inner = [p for p in inner if p < mid]
        else:
            lo = mid
            inner = [p for p in inner if p > mid]
    return _solve_on_piece(schedule, lo, hi, target)


def horizon_time(
    schedule: DeploymentSchedule,
    t_now,
    k,
    anticipation=Anticipation.AWARE,
) -> HorizonResult:
    """Calendar time covered by the confidence horizon at ``t_now``.

    ``UNAWARE`` evaluates the future on ``schedule.frozen_at(t_now)``: an
    observer who keeps extrapolating the production rate in force just
    before ``t_now``.
    """
    anticipation = Anticipation(anticipation)
    if not t_now > 0.0:
        raise ValidationError(f"t_now must be > 0, got {t_now!r}")
    if not k >= 0.0:
        raise ValidationError(f"k must be >= 0, got {k!r}")
    t_past = schedule.cumulative_operation(t_now)
    if t_past <= 0.0:
        raise DegenerateEvidenceError(f"no operation accumulated by t = {t_now:g}")
    if math.isinf(k):
        return HorizonResult(k, t_past, UNBOUNDED, UNBOUNDED, anticipation)

    future = schedule if anticipation is Anticipation.AWARE else schedule.frozen_at(t_now)
    t_end = reach_time(future, t_now, (k + 1.0) * t_past)
    t_hor = max(t_end - t_now, 0.0)
    return HorizonResult(k, t_past, k * t_past, t_hor, anticipation)


def horizon_closed_form_double_rate(t, step_time=5.0, k=5.0, factor=2.0):
    """Closed-form horizon after a single production step.

    Production starts at rate ``r`` at time 0 and becomes ``factor * r`` at
    ``step_time``; the answer does not depend on ``r`` or the usage rate.
    With ``u = t + t_hor`` and ``m = factor``, the balance
    ``u^2 + (m-1)(u-s)^2 = (k+1)(t^2 + (m-1)(t-s)^2)`` is a quadratic in ``u``.
    The defaults give ``-t + 5/2 + sqrt(24 t^2 - 120 t + 275) / 2``.
    """
    if t < step_time:
        raise ValidationError("closed form holds only for t >= step_time")
    m, s = float(factor), float(step_time)
    rhs = (k + 1.0) * (t * t + (m - 1.0) * (t - s) ** 2)
    disc = ((m - 1.0) * s) ** 2 - m * ((m - 1.0) * s * s - rhs)
    if disc < 0.0:
        raise ArithmeticError("negative discriminant in step-increase horizon")
    u = ((m - 1.0) * s + math.sqrt(disc)) / m
    return u - t


@dataclass(frozen=True)
class TraceRow:
    t: float
    fleet: float
    T_past: float
    t_hor: float
    ratio: float
    error: str | None = None

    @property
    def valid(self):
        return self.error is None


@dataclass(frozen=True)
class ScenarioTrace:
    rows: tuple

    columns = ("t", "fleet", "T_past", "t_hor", "ratio")

    def column(self, name):
        return [getattr(r, name) for r in self.rows]


def scenario_trace(schedule, k, t_grid, anticipation=Anticipation.AWARE) -> ScenarioTrace:
    """Evaluate fleet size, operation and horizon at each grid time.

    ``k`` is either a number or a callable mapping accumulated operation to
    a coefficient (for constraints whose ``k`` depends on ``T_past``).
    Rows whose horizon cannot be computed carry NaNs and an error message.
    """
    t_grid = [float(t) for t in t_grid]
    if any(t <= 0.0 for t in t_grid) or any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValidationError("grid times must be positive and strictly increasing")
    rows = []
    for t in t_grid:
        fleet = schedule.fleet_size(t)
        t_past = schedule.cumulative_operation(t)
        try:
            k_t = k(t_past) if callable(k) else k
            res = horizon_time(schedule, t, k_t, anticipation)
        except (ConfbootError, ArithmeticError) as exc:
            rows.append(TraceRow(t, fleet, t_past, math.nan, math.nan, str(exc)))
            continue
        rows.append(TraceRow(t, fleet, t_past, res.t_hor, res.t_hor / t))
    return ScenarioTrace(tuple(rows))
