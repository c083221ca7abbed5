"""Independent checks on the conservative bounds.

Two oracles, neither of which shares code with the minimiser in
``inference``:

* brute-force grids over explicit two-atom priors, evaluating the Bayes
  posterior directly in pfd space;
* a Monte Carlo simulation of systems drawn from a prior, run through past
  and future demands.

Random streams
--------------
The simulation is split into fixed-size chunks.  Chunk ``i`` draws from
``numpy.random.Generator(PCG64(SeedSequence(seed).spawn(n_chunks)[i]))``.
Because the chunking depends only on ``n_samples`` and ``chunk_size``, the
result for a given seed is identical however many workers run the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientConditioningError, ValidationError
from .inference import PfdBounded, PfdPrior, PfdZero, check_count, survival_probability

MIN_SURVIVORS = 100
DEFAULT_CHUNK = 1 << 18


def _pow(q, t):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(t * np.log1p(-q))
    if t == 0:
        out = np.ones_like(out)
    return out


def _q_from_x(x, t_past):
    """Invert ``x = (1 - q) ** t_past``."""
    t = t_past if t_past > 0 else 1.0
    with np.errstate(divide="ignore"):
        return -np.expm1(np.log(x) / t)


def _posterior(weights, qs, t_past, t_fut):
    """Bayes posterior reliability for priors given as parallel weight/pfd arrays.

    ``weights`` and ``qs`` are sequences of equally shaped arrays, one entry
    per atom; the result has that shape.
    """
    num = sum(w * _pow(q, t_past + t_fut) for w, q in zip(weights, qs))
    den = sum(w * _pow(q, t_past) for w, q in zip(weights, qs))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / den
    return np.where(den > 0, out, np.inf)


def atom_grid_worst_case(constraint, t_past, t_fut, grid_size, *, good_grid_size=None,
                         fix_good_atom=False):
    """Grid minimum of the posterior over two-atom priors compatible with ``constraint``.

    ``PfdZero``: atoms ``(0, p_p)`` and ``(q, 1 - p_p)`` with ``q`` on
    ``grid_size`` points uniform in ``x = (1 - q) ** t_past`` over ``(0, 1]``
    in ``q``.  ``PfdBounded``: atoms ``(q1, p_l)``, ``q1 <= q_l``, and
    ``(q2, 1 - p_l)``, ``q2 > q_l``, both gridded uniformly in ``x``
    (``good_grid_size`` points for ``q1``, default ``grid_size``), unless
    ``fix_good_atom`` pins ``q1 = q_l``.

    The grid minimum is attained by a valid prior, so it is an upper bound on
    the true infimum.
    """
    grid_size = int(grid_size)
    if grid_size < 3:
        raise ValidationError("grid_size must be >= 3")
    t_past = check_count(t_past, "t_past")
    t_fut = check_count(t_fut, "t_fut")

    if isinstance(constraint, PfdZero):
        p = constraint.p_p
        x = np.linspace(0.0, 1.0, grid_size + 1)[:-1]
        q = _q_from_x(x, t_past)
        post = _posterior((p, 1.0 - p), (0.0, q), t_past, t_fut)
        return float(post.min())

    if isinstance(constraint, PfdBounded):
        p, q_l = constraint.p_l, constraint.q_l
        c = float(_pow(np.float64(q_l), t_past if t_past > 0 else 1.0))
        q2 = _q_from_x(np.linspace(0.0, c, grid_size, endpoint=False), t_past)
        if fix_good_atom:
            q1s = np.array([q_l])
        else:
            n1 = int(good_grid_size or grid_size)
            q1s = _q_from_x(np.linspace(c, 1.0, n1), t_past)
            q1s[0] = q_l
        best = math.inf
        for q1 in q1s:
            post = _posterior((p, 1.0 - p), (q1, q2), t_past, t_fut)
            best = min(best, float(post.min()))
        return best

    raise ValidationError(f"unknown knowledge constraint {constraint!r}")


@dataclass(frozen=True)
class SufficiencyReport:
    """Outcome of comparing the pinned-good-atom minimum with the free one."""

    pinned: float
    free: float
    tolerance: float

    @property
    def gap(self):
        return self.pinned - self.free

    @property
    def holds(self):
        return self.gap <= self.tolerance


def two_atom_sufficiency(p_l, q_l, t_past, t_fut, grid_size=2000, tolerance=1e-9):
    """Check that moving the constrained atom off ``q_l`` never lowers the posterior."""
    constraint = PfdBounded(p_l, q_l)
    pinned = atom_grid_worst_case(constraint, t_past, t_fut, grid_size, fix_good_atom=True)
    free = atom_grid_worst_case(constraint, t_past, t_fut, grid_size, good_grid_size=grid_size)
    return SufficiencyReport(pinned, free, tolerance)


@dataclass(frozen=True)
class SimulationConfig:
    n_samples: int
    seed: int
    t_past: int
    t_fut: int
    prior: PfdPrior

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValidationError("n_samples must be a positive integer")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an integer in [0, 2**64)")
        for name in ("t_past", "t_fut"):
            value = check_count(getattr(self, name), name)
            if value != math.floor(value):
                raise ValidationError(f"{name} must be integer-valued for simulation, got {value!r}")
            object.__setattr__(self, name, int(value))
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "seed", int(self.seed))


def _run_chunk(seed_seq, size, q, w, surv_past, surv_fut):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    idx = rng.choice(len(q), size=size, p=w)
    past_ok = rng.random(size) < surv_past[idx]
    fut_ok = rng.random(size) < surv_fut[idx]
    return int(past_ok.sum()), int((past_ok & fut_ok).sum())


def monte_carlo_conditional_survival(config: SimulationConfig, *, chunk_size=DEFAULT_CHUNK,
                                     workers=1):
    """Simulated ``P(no mishap in t_fut | no mishap in t_past)`` with its standard error.

    Each simulated system survives ``t`` demands with probability
    ``(1 - q) ** t`` (the aggregate of ``t`` Bernoulli trials).
    """
    prior = config.prior
    expected = config.n_samples * survival_probability(prior, config.t_past)
    if expected < MIN_SURVIVORS:
        raise InsufficientConditioningError(
            f"only {expected:.3g} expected survivors of the past period (need {MIN_SURVIVORS})"
        )
    q, w = prior.q, prior.w
    w = w / w.sum()
    surv_past = _pow(q, config.t_past)
    surv_fut = _pow(q, config.t_fut)

    n_chunks = -(-config.n_samples // chunk_size)
    sizes = [chunk_size] * (n_chunks - 1) + [config.n_samples - chunk_size * (n_chunks - 1)]
    seeds = np.random.SeedSequence(config.seed).spawn(n_chunks)
    args = [(s, n, q, w, surv_past, surv_fut) for s, n in zip(seeds, sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda a: _run_chunk(*a), args))
    else:
        counts = [_run_chunk(*a) for a in args]

    survivors = sum(c[0] for c in counts)
    if survivors == 0:
        raise InsufficientConditioningError("no simulated system survived the past period")
    p_hat = sum(c[1] for c in counts) / survivors
    return p_hat, math.sqrt(p_hat * (1.0 - p_hat) / survivors)
