"""Bernoulli-trials reliability under discrete pfd priors and conservative bounds.

A system facing a stream of independent demands fails each one with an
unknown probability ``q`` (the pfd).  Uncertainty about ``q`` is a discrete
mixture of atoms.  Besides plain Bayesian survival/posterior evaluation this
module computes the *worst-case* posterior probability of mishap-free future
operation over every prior that agrees with a partial statement of prior
knowledge:

* ``PfdZero(p_p)``: the prior puts mass ``p_p`` on ``q == 0``;
* ``PfdBounded(p_l, q_l)``: the prior puts mass ``p_l`` on ``q <= q_l``.

The posterior is linear-fractional in the prior, so its infimum over such a
constraint set is reached at an extreme point: one atom per constrained
region.  That reduces each bound to a one-dimensional minimisation over the
free atom, done in the variable ``x = (1 - q) ** t_past``.  In that variable
the pfd=0 objective depends on the operation counts only through
``rho = t_fut / t_past``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateEvidenceError, ImpossibleEvidenceError, ValidationError
from .optimize import grid_then_golden

UNBOUNDED = math.inf

WEIGHT_SUM_TOL = 1e-12


def check_probability(value, name, *, open_low=False, open_high=False):
    value = float(value)
    lo_ok = value > 0.0 if open_low else value >= 0.0
    hi_ok = value < 1.0 if open_high else value <= 1.0
    if not (lo_ok and hi_ok):
        lo = "(" if open_low else "["
        hi = ")" if open_high else "]"
        raise ValidationError(f"{name} must lie in {lo}0, 1{hi}, got {value!r}")
    return value


def check_count(value, name):
    """Validate an operation count (demands): finite and non-negative."""
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ValidationError(f"{name} must be a finite non-negative count, got {value!r}")
    return value


def log_survival(q, t):
    """``t * log(1 - q)`` elementwise, with ``0 * log(0)`` taken as 0."""
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore"):
        log1mq = np.log1p(-q)
    if t == 0:
        return np.zeros_like(log1mq)
    return t * log1mq


def survival_power(q, t):
    """``(1 - q) ** t`` for real ``t >= 0``; ``q == 1`` gives 0 unless ``t == 0``."""
    return np.exp(log_survival(q, t))


@dataclass(frozen=True)
class PfdPrior:
    """Discrete prior over the pfd: a tuple of ``(q, weight)`` atoms.

    Construction canonicalises the atoms (sorted by ``q``, duplicate ``q``
    merged) and checks that the weights form a probability distribution.
    """

    atoms: tuple

    def __post_init__(self):
        merged = {}
        for atom in self.atoms:
            try:
                q, w = (float(v) for v in atom)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"atom {atom!r} is not a (q, weight) pair") from exc
            check_probability(q, "atom pfd")
            if not (w >= 0.0 and math.isfinite(w)):
                raise ValidationError(f"atom weight must be a finite non-negative number, got {w!r}")
            merged[q] = merged.get(q, 0.0) + w
        if not merged:
            raise ValidationError("a prior needs at least one atom")
        total = math.fsum(merged.values())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"prior weights sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))

    @classmethod
    def point(cls, q):
        return cls(((q, 1.0),))

    @classmethod
    def with_zero_mass(cls, p_p, atoms=()):
        """Prior with mass ``p_p`` at ``q == 0`` and ``atoms`` (scaled to ``1 - p_p``) elsewhere.

        ``atoms`` weights are relative; they are normalised to sum to one
        before scaling.
        """
        p_p = check_probability(p_p, "p_p")
        atoms = [(float(q), float(w)) for q, w in atoms]
        if any(q <= 0.0 for q, _ in atoms):
            raise ValidationError("atoms of the non-zero part must have q > 0")
        total = math.fsum(w for _, w in atoms)
        if p_p < 1.0 and total <= 0.0:
            raise ValidationError("p_p < 1 needs at least one positive-weight atom with q > 0")
        rest = [(q, (1.0 - p_p) * w / total) for q, w in atoms] if total > 0.0 else []
        return cls(((0.0, p_p), *rest))

    @property
    def q(self):
        return np.array([a[0] for a in self.atoms])

    @property
    def w(self):
        return np.array([a[1] for a in self.atoms])

    @property
    def zero_mass(self):
        """Weight of the ``q == 0`` atom (``P_p``)."""
        first_q, first_w = self.atoms[0]
        return first_w if first_q == 0.0 else 0.0

    def mass_at_or_below(self, q_l):
        return math.fsum(w for q, w in self.atoms if q <= q_l)


def _posterior_weights(prior, t_past):
    """Posterior atom weights after ``t_past`` mishap-free demands, or None if impossible."""
    with np.errstate(divide="ignore"):
        log_w = np.log(prior.w) + log_survival(prior.q, t_past)
    peak = log_w.max()
    if peak == -math.inf:
        return None
    w = np.exp(log_w - peak)
    return w / math.fsum(w)


def survival_probability(prior: PfdPrior, t_fut) -> float:
    """Prior probability of ``t_fut`` consecutive mishap-free demands."""
    t_fut = check_count(t_fut, "t_fut")
    terms = prior.w * survival_power(prior.q, t_fut)
    return min(1.0, max(0.0, math.fsum(terms)))


def posterior_reliability(prior: PfdPrior, t_past, t_fut) -> float:
    """Probability of ``t_fut`` further mishap-free demands after ``t_past`` of them.

    The prior is first updated to posterior atom weights (shifted in log space
    so very long past runs cannot underflow), then mixed over ``t_fut``.
    """
    t_past = check_count(t_past, "t_past")
    t_fut = check_count(t_fut, "t_fut")
    post = _posterior_weights(prior, t_past)
    if post is None:
        raise ImpossibleEvidenceError(
            f"the prior assigns zero probability to {t_past:g} mishap-free demands"
        )
    if t_fut == 0.0:
        return 1.0
    return min(1.0, math.fsum(post * survival_power(prior.q, t_fut)))


@dataclass(frozen=True)
class PfdZero:
    """Prior knowledge ``P(pfd == 0) = p_p``."""

    p_p: float

    def __post_init__(self):
        object.__setattr__(self, "p_p", check_probability(self.p_p, "p_p"))


@dataclass(frozen=True)
class PfdBounded:
    """Prior knowledge ``P(pfd <= q_l) = p_l``."""

    p_l: float
    q_l: float

    def __post_init__(self):
        object.__setattr__(self, "p_l", check_probability(self.p_l, "p_l"))
        object.__setattr__(
            self, "q_l", check_probability(self.q_l, "q_l", open_low=True, open_high=True)
        )


KnowledgeConstraint = Union[PfdZero, PfdBounded]


@dataclass(frozen=True)
class WorstCaseResult:
    """Most pessimistic posterior reliability and the free atom that attains it.

    ``minimizer_x`` is ``(1 - minimizer_q) ** t_past``.
    """

    bound: float
    minimizer_x: float
    minimizer_q: float

    @property
    def mishap_probability(self):
        return 1.0 - self.bound


def _ratio_objective(p, rho):
    """Posterior with mass ``p`` at a sure atom and ``1 - p`` at ``x = 1 - s``.

    Written in ``s = 1 - x`` so that points close to ``x = 1`` (large
    ``rho``) keep full relative precision.
    """

    def h(s):
        with np.errstate(divide="ignore"):
            log_x = np.log1p(-np.asarray(s, dtype=float))
        x = np.exp(log_x)
        return (p + (1.0 - p) * np.exp((1.0 + rho) * log_x)) / (p + (1.0 - p) * x)

    return h


def _minimise_ratio(p, rho):
    """Return ``(s_star, h_min)`` for the pfd=0 objective; ``s = 1 - x``."""
    if rho == 0.0 or p == 1.0:
        return 1.0, 1.0
    if p == 0.0:
        # h(x) = x ** rho, infimum 0 approached as x -> 0 (q -> 1)
        return 1.0, 0.0
    # ties go to the largest s, i.e. the smallest x and the worst pfd
    s_star, h_min = grid_then_golden(_ratio_objective(p, rho), 0.0, 1.0, prefer_high=True)
    return s_star, min(1.0, h_min)


def _check_evidence(t_past, t_fut):
    t_past = check_count(t_past, "t_past")
    t_fut = check_count(t_fut, "t_fut")
    if t_past == 0.0:
        raise DegenerateEvidenceError(
            "t_past = 0: no past operation to condition on; use survival_probability"
        )
    return t_past, t_fut


def worst_case_posterior_pfd_zero(p_p, t_past, t_fut) -> WorstCaseResult:
    """Infimum of the posterior reliability over priors with ``P(q == 0) = p_p``."""
    p_p = check_probability(p_p, "p_p")
    t_past, t_fut = _check_evidence(t_past, t_fut)
    s_star, bound = _minimise_ratio(p_p, t_fut / t_past)
    log_x = math.log1p(-s_star) if s_star < 1.0 else -math.inf
    x_star = math.exp(log_x)
    q_star = -math.expm1(log_x / t_past)
    return WorstCaseResult(bound=bound, minimizer_x=x_star, minimizer_q=q_star)


def worst_case_posterior_bounded(p_l, q_l, t_past, t_fut) -> WorstCaseResult:
    """Infimum of the posterior reliability over priors with ``P(q <= q_l) = p_l``.

    The constrained mass sits at ``q_l`` and the rest at one free atom
    ``q* >= q_l``.  With ``c = (1 - q_l) ** t_past`` and ``x = c * y`` the
    two-atom posterior factors as ``(1 - q_l) ** t_fut * h(y)``, where ``h`` is
    the pfd=0 objective with ``p_p = p_l``, so the same minimiser serves both.
    """
    constraint = PfdBounded(p_l, q_l)
    p_l, q_l = constraint.p_l, constraint.q_l
    t_past, t_fut = _check_evidence(t_past, t_fut)
    s_star, h_min = _minimise_ratio(p_l, t_fut / t_past)
    log1m_ql = math.log1p(-q_l)
    bound = math.exp(t_fut * log1m_ql) * h_min
    log_y = math.log1p(-s_star) if s_star < 1.0 else -math.inf
    log_x = t_past * log1m_ql + log_y
    return WorstCaseResult(
        bound=bound,
        minimizer_x=math.exp(log_x),
        minimizer_q=-math.expm1(log1m_ql + log_y / t_past),
    )


def worst_case_posterior(constraint: KnowledgeConstraint, t_past, t_fut) -> WorstCaseResult:
    if isinstance(constraint, PfdZero):
        return worst_case_posterior_pfd_zero(constraint.p_p, t_past, t_fut)
    if isinstance(constraint, PfdBounded):
        return worst_case_posterior_bounded(constraint.p_l, constraint.q_l, t_past, t_fut)
    raise ValidationError(f"unknown knowledge constraint {constraint!r}")


def worst_case_prior(constraint: KnowledgeConstraint, t_past, t_fut) -> PfdPrior:
    """The two-atom prior at which the worst-case posterior is attained."""
    res = worst_case_posterior(constraint, t_past, t_fut)
    if isinstance(constraint, PfdZero):
        return PfdPrior(((0.0, constraint.p_p), (res.minimizer_q, 1.0 - constraint.p_p)))
    return PfdPrior(((constraint.q_l, constraint.p_l), (res.minimizer_q, 1.0 - constraint.p_l)))


def check_negligibility(q_l, t_fut, epsilon) -> bool:
    """True when ``q_l`` contributes at most ``epsilon`` mishap probability over ``t_fut``."""
    q_l = check_probability(q_l, "q_l")
    t_fut = check_count(t_fut, "t_fut")
    if t_fut == 0.0:
        return True
    return -math.expm1(float(log_survival(q_l, t_fut))) <= epsilon


def extension_coefficient(constraint: KnowledgeConstraint, confidence, t_past, *, rtol=1e-12):
    """Largest ``k`` with worst-case posterior over ``k * t_past`` demands >= ``confidence``.

    Returns ``UNBOUNDED`` (``math.inf``) when the required confidence never
    drops out of reach, which for ``PfdZero`` means ``confidence <= p_p``.
    Bisection on ``k`` keeps the lower end, so the returned ``k`` always
    satisfies the confidence requirement.
    """
    confidence = check_probability(confidence, "confidence", open_low=True, open_high=True)
    t_past = check_count(t_past, "t_past")
    if t_past == 0.0:
        raise DegenerateEvidenceError("t_past = 0: no evidence to extend")
    if isinstance(constraint, PfdZero) and confidence <= constraint.p_p:
        return UNBOUNDED

    def meets(k):
        return worst_case_posterior(constraint, t_past, k * t_past).bound >= confidence

    lo, hi = 0.0, 1.0
    while meets(hi):
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            return UNBOUNDED
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if meets(mid):
            lo = mid
        else:
            hi = mid
    return lo
