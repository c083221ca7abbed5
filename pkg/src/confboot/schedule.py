"""Fleet deployment schedules and the operation they accumulate.

Vehicles are a fluid: production is a piecewise-constant rate, every vehicle
operates at the same rate ``op_rate`` from the moment it is produced, and
(optionally) retires exactly ``retirement_age`` later.  The initial fleet is
treated as produced at ``t = 0``.

With ``P(t)`` the cumulative production and ``C(t)`` its integral,

    fleet(t) = n0 [t < L] + P(t) - P(t - L)
    T(t)     = op_rate * (n0 min(t, L) + C(t) - C(t - L))

where terms in ``t - L`` vanish for ``t < L`` and ``L = inf`` without
retirement.  ``C`` is piecewise quadratic and evaluated in closed form.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field, replace

from .errors import ScheduleFormatError, ValidationError


@dataclass(frozen=True)
class Segment:
    start: float
    rate: float


def _finite(value, name, *, positive=False):
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a number, got {value!r}") from exc
    if not math.isfinite(value) or value < 0.0 or (positive and value == 0.0):
        kind = "positive" if positive else "non-negative"
        raise ValidationError(f"{name} must be a finite {kind} number, got {value!r}")
    return value


@dataclass(frozen=True)
class DeploymentSchedule:
    """Piecewise-constant production with uniform per-vehicle usage.

    ``segments`` holds ``(start, rate)`` pairs; the first must start at 0 and
    starts must increase strictly.  Each rate applies until the next start.
    """

    op_rate: float
    segments: tuple = ((0.0, 0.0),)
    initial_fleet: float = 0.0
    retirement_age: float | None = None
    _starts: tuple = field(init=False, repr=False, compare=False)
    _rates: tuple = field(init=False, repr=False, compare=False)
    _prod: tuple = field(init=False, repr=False, compare=False)
    _prod_int: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("op_rate", _finite(self.op_rate, "op_rate", positive=True))
        set_("initial_fleet", _finite(self.initial_fleet, "initial_fleet"))
        if self.retirement_age is not None:
            set_("retirement_age", _finite(self.retirement_age, "retirement_age", positive=True))

        segs = []
        for i, seg in enumerate(self.segments):
            start, rate = (seg.start, seg.rate) if isinstance(seg, Segment) else seg
            segs.append(
                Segment(_finite(start, f"segments[{i}].start"), _finite(rate, f"segments[{i}].rate"))
            )
        if not segs:
            raise ValidationError("a schedule needs at least one segment")
        if segs[0].start != 0.0:
            raise ValidationError("the first segment must start at t = 0")
        for a, b in zip(segs, segs[1:]):
            if not b.start > a.start:
                raise ValidationError("segment start times must increase strictly")
        set_("segments", tuple(segs))

        starts = [s.start for s in segs]
        rates = [s.rate for s in segs]
        prod, prod_int = [0.0], [0.0]
        for i in range(1, len(segs)):
            dt = starts[i] - starts[i - 1]
            prod_int.append(prod_int[-1] + prod[-1] * dt + 0.5 * rates[i - 1] * dt * dt)
            prod.append(prod[-1] + rates[i - 1] * dt)
        set_("_starts", tuple(starts))
        set_("_rates", tuple(rates))
        set_("_prod", tuple(prod))
        set_("_prod_int", tuple(prod_int))

    @classmethod
    def constant_rate(cls, rate, op_rate, **kw):
        return cls(op_rate=op_rate, segments=((0.0, rate),), **kw)

    @classmethod
    def constant_fleet(cls, n, op_rate):
        return cls(op_rate=op_rate, segments=((0.0, 0.0),), initial_fleet=n)

    @property
    def _life(self):
        return math.inf if self.retirement_age is None else self.retirement_age

    def _seg(self, t):
        return bisect.bisect_right(self._starts, t) - 1

    def production_rate(self, t):
        """Production rate in force at ``t`` (right-continuous; 0 before t = 0)."""
        if t < 0.0:
            return 0.0
        return self._rates[self._seg(t)]

    def produced(self, t):
        """Vehicles produced on ``[0, t]`` (excluding the initial fleet)."""
        if t <= 0.0:
            return 0.0
        i = self._seg(t)
        return self._prod[i] + self._rates[i] * (t - self._starts[i])

    def _produced_integral(self, t):
        if t <= 0.0:
            return 0.0
        i = self._seg(t)
        dt = t - self._starts[i]
        return self._prod_int[i] + self._prod[i] * dt + 0.5 * self._rates[i] * dt * dt

    def fleet_size(self, t):
        """Vehicles in service at time ``t``."""
        if t < 0.0:
            raise ValidationError(f"t must be >= 0, got {t!r}")
        life = self._life
        initial = self.initial_fleet if t < life else 0.0
        return initial + self.produced(t) - self.produced(t - life)

    def fleet_slope(self, t):
        """Right derivative of ``fleet_size`` at ``t``."""
        return self.production_rate(t) - self.production_rate(t - self._life)

    def cumulative_operation(self, t):
        """Total demands served on ``[0, t]``: the integral of ``op_rate * fleet_size``."""
        if t < 0.0:
            raise ValidationError(f"t must be >= 0, got {t!r}")
        life = self._life
        vehicle_time = (
            self.initial_fleet * min(t, life)
            + self._produced_integral(t)
            - self._produced_integral(t - life)
        )
        return self.op_rate * vehicle_time

    def breakpoints(self):
        """Times at which the fleet growth rate may change, sorted."""
        pts = set(self._starts)
        if self.retirement_age is not None:
            pts.update(s + self.retirement_age for s in self._starts)
        return sorted(pts)

    def eventually_empty(self):
        """True when the fleet is zero from the last breakpoint onwards."""
        return self.retirement_age is not None and self._rates[-1] == 0.0

    def frozen_at(self, t):
        """Schedule as seen by an observer at ``t`` who ignores future rate changes.

        Segments starting at or after ``t`` are dropped, so the rate in force
        just before ``t`` continues indefinitely.
        """
        keep = [s for s in self.segments if s.start < t] or [self.segments[0]]
        return replace(self, segments=tuple(keep))

    def scaled(self, factor):
        """Schedule with every production rate and the initial fleet multiplied by ``factor``."""
        return replace(
            self,
            initial_fleet=self.initial_fleet * factor,
            segments=tuple(Segment(s.start, s.rate * factor) for s in self.segments),
        )

    def to_dict(self):
        return {
            "initial_fleet": self.initial_fleet,
            "op_rate": self.op_rate,
            "retirement_age": self.retirement_age,
            "segments": [{"start": s.start, "rate": s.rate} for s in self.segments],
        }

    def to_json(self):
        """JSON text with every real written to 17 significant digits."""
        num = lambda v: "null" if v is None else format(v, ".17g")  # noqa: E731
        segs = ",\n".join(
            f'    {{"start": {num(s.start)}, "rate": {num(s.rate)}}}' for s in self.segments
        )
        return (
            "{\n"
            f'  "initial_fleet": {num(self.initial_fleet)},\n'
            f'  "op_rate": {num(self.op_rate)},\n'
            f'  "retirement_age": {num(self.retirement_age)},\n'
            f'  "segments": [\n{segs}\n  ]\n'
            "}\n"
        )

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ScheduleFormatError("top level must be an object", "$")
        unknown = set(doc) - {"initial_fleet", "op_rate", "retirement_age", "segments"}
        if unknown:
            raise ScheduleFormatError(f"unknown field(s) {sorted(unknown)}", "$")
        if "op_rate" not in doc:
            raise ScheduleFormatError("missing required field", "op_rate")
        if "segments" not in doc or not isinstance(doc["segments"], list):
            raise ScheduleFormatError("required list of {start, rate} objects", "segments")
        segs = []
        for i, seg in enumerate(doc["segments"]):
            if not isinstance(seg, dict) or set(seg) != {"start", "rate"}:
                raise ScheduleFormatError("expected an object with exactly start and rate", f"segments[{i}]")
            for key in ("start", "rate"):
                _number(seg[key], f"segments[{i}].{key}")
            segs.append((seg["start"], seg["rate"]))
        for key in ("op_rate", "initial_fleet", "retirement_age"):
            if key in doc and not (key == "retirement_age" and doc[key] is None):
                _number(doc[key], key)
        try:
            return cls(
                op_rate=doc["op_rate"],
                segments=tuple(segs),
                initial_fleet=doc.get("initial_fleet", 0.0),
                retirement_age=doc.get("retirement_age"),
            )
        except ScheduleFormatError:
            raise
        except ValidationError as exc:
            raise ScheduleFormatError(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScheduleFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
        return cls.from_dict(doc)


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScheduleFormatError(f"expected a number, got {value!r}", where)
    if not math.isfinite(value):
        raise ScheduleFormatError("must be finite", where)


def load_schedule(path):
    with open(path, encoding="utf-8") as fh:
        return DeploymentSchedule.from_json(fh.read())
