"""Bounded scalar minimisation: uniform grid scan followed by golden-section polish."""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

GRID_POINTS = 1025
TIE_TOL = 1e-14


def golden_section(f, a, b, rtol=1e-10, atol=1e-15, max_iter=300):
    """Minimise a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x))`` for the best point seen, not the bracket midpoint,
    so the reported value is always an attained objective value.
    """
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    for _ in range(max_iter):
        if b - a <= rtol * 0.5 * (abs(a) + abs(b)) + atol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    if f1 <= f2:
        return x1, f1
    return x2, f2


def grid_then_golden(f, lo, hi, n=GRID_POINTS, rtol=1e-10, prefer_high=False):
    """Global-ish minimum of ``f`` over ``[lo, hi]``.

    ``f`` must accept numpy arrays.  The grid minimum is kept whenever the
    golden-section refinement fails to improve on it, so the result is never
    worse than the best grid point.  Ties within ``TIE_TOL`` resolve to the
    smallest abscissa, or the largest one with ``prefer_high``.
    """
    grid = np.linspace(lo, hi, n)
    values = np.asarray(f(grid), dtype=float)
    best = values.min()
    ties = np.flatnonzero(values <= best + TIE_TOL)
    i = int(ties[-1] if prefer_high else ties[0])
    x_best, f_best = float(grid[i]), float(values[i])

    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, n - 1)])
    x_ref, f_ref = golden_section(lambda x: float(f(x)), a, b, rtol=rtol)
    if f_ref < f_best:
        return x_ref, f_ref
    return x_best, f_best
