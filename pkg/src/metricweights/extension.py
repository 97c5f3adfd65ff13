"""Extending a weight from a subset to the whole space.

Given w on E whose slightly raised power stays in the subset-induced class,
the pipeline produces a weight W on all of X that agrees with w on E and
belongs to the global class with the same exponent:

1. raise: v = w^{1 + eps/2} on E;
2. factorize v = v1 * v2^{1-p} with both factors satisfying a pointwise
   maximal bound on E;
3. extend each factor by the damped maximal function
   V_i = (m_E v_i)^delta on X, with delta = 1/(1 + eps/2);
4. correct on E so the product collapses back to w there:
   g = (v1/m_E v1)^delta * (v2/m_E v2)^{delta (1-p)} on E and g = 1 off E;
5. W = g * V1 * V2^{1-p} (for p = 1 there is no second factor: W = g * V1).

On E the chain cancels algebraically, W = (v1 v2^{1-p})^delta = v^delta = w,
so the agreement error is pure floating-point noise. g and 1/g are bounded,
with g_i = v_i / m_E v_i pinched between 1/K_i and 1 on E.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExponentRange, NonpositiveWeight
from .maximal import as_subset, maximal_fn
from .factorization import FactorizationResult, jones_factorize
from .space import MetricMeasureSpace
from .weights import CharacteristicReport, ap_tilde_characteristic


@dataclass
class ExtensionReport:
    """W together with the diagnostics the pipeline guarantees."""

    W: np.ndarray
    agreement_error: float
    ap_constant_W: float
    delta: float
    p: float
    eps: float
    factorization: FactorizationResult
    g: np.ndarray
    g_lower_bound_v1: float
    g_lower_bound_v2: float

    def to_dict(self) -> dict:
        return {
            "agreement_error": self.agreement_error,
            "ap_constant_W": self.ap_constant_W,
            "delta": self.delta,
            "p": self.p,
            "eps": self.eps,
            "g_lower_bound_v1": self.g_lower_bound_v1,
            "g_lower_bound_v2": self.g_lower_bound_v2,
        }


def wolff_extend(
    space: MetricMeasureSpace,
    E,
    w: np.ndarray,
    p: float,
    eps: float,
    tol: float = 1e-12,
    workers: int = 1,
) -> ExtensionReport:
    """Extend w (on E, exponent p >= 1, margin eps > 0) to a global weight."""
    if p < 1:
        raise ExponentRange("p must be >= 1")
    if eps <= 0:
        raise ExponentRange("eps must be positive")
    ids, _ = as_subset(space, E)
    w = np.asarray(w, dtype=float)
    if w.shape != ids.shape:
        raise ValueError("w must be aligned with E")
    if np.any(w <= 0):
        raise NonpositiveWeight("w must be strictly positive")

    v = w ** (1.0 + eps / 2.0)
    fact = jones_factorize(space, E, v, p, tol=tol, workers=workers)
    delta = 1.0 / (1.0 + eps / 2.0)

    m1 = maximal_fn(space, fact.v1, E, workers=workers)
    g1 = fact.v1 / m1[ids]
    g = np.ones(space.n)
    if p > 1:
        m2 = maximal_fn(space, fact.v2, E, workers=workers)
        g2 = fact.v2 / m2[ids]
        g[ids] = g1**delta * g2 ** (delta * (1.0 - p))
        W = g * m1**delta * m2 ** (delta * (1.0 - p))
    else:
        g[ids] = g1**delta
        W = g * m1**delta

    agreement = float(np.max(np.abs(W[ids] / w - 1.0)))
    ap_w = ap_tilde_characteristic(space, None, W, p, workers=workers).value
    return ExtensionReport(
        W=W,
        agreement_error=agreement,
        ap_constant_W=ap_w,
        delta=delta,
        p=float(p),
        eps=float(eps),
        factorization=fact,
        g=g,
        g_lower_bound_v1=1.0 / fact.a1_char_v1,
        g_lower_bound_v2=1.0 / fact.a1_char_v2,
    )


@dataclass(frozen=True)
class ConditionReport:
    """Largest grid eps whose raised weight stays within budget, with table."""

    best_eps: float | None
    budget: float
    p: float
    table: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "best_eps": self.best_eps,
            "budget": self.budget,
            "p": self.p,
            "table": [{"eps": e, "char": c} for e, c in self.table],
        }


def check_extension_condition(
    space: MetricMeasureSpace,
    E,
    w: np.ndarray,
    p: float,
    eps_grid,
    budget: float,
    workers: int = 1,
) -> ConditionReport:
    """Tabulate the subset-induced characteristic of w^{1+eps} over the grid."""
    if p < 1:
        raise ExponentRange("p must be >= 1")
    grid = sorted(float(e) for e in eps_grid)
    if not grid or grid[0] < 0:
        raise ValueError("eps grid must be nonempty and nonnegative")
    ids, _ = as_subset(space, E)
    w = np.asarray(w, dtype=float)
    if w.shape != ids.shape:
        raise ValueError("w must be aligned with E")
    if np.any(w <= 0):
        raise NonpositiveWeight("w must be strictly positive")
    table = []
    best: float | None = None
    for eps in grid:
        char = ap_tilde_characteristic(space, E, w ** (1.0 + eps), p, workers).value
        table.append((eps, char))
        if char <= budget:
            best = eps
    return ConditionReport(best, float(budget), float(p), tuple(table))


@dataclass(frozen=True)
class RestrictionReport:
    """Ball-by-ball domination of the restricted functional by the global one."""

    max_ratio: float
    restricted: CharacteristicReport
    global_: CharacteristicReport
    p: float
    eps: float

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "restricted": self.restricted.to_dict(),
            "global": self.global_.to_dict(),
            "p": self.p,
            "eps": self.eps,
        }


def restrict_weight_report(
    space: MetricMeasureSpace,
    E,
    W: np.ndarray,
    p: float,
    eps: float = 0.0,
    workers: int = 1,
) -> RestrictionReport:
    """Verify that restricting W^{1+eps} to E can only shrink ball functionals.

    For every canonical ball, the subset-induced functional of (W^{1+eps})|_E
    is compared against the global functional of W^{1+eps}; the report carries
    the worst ratio (at most 1 up to roundoff) and both characteristics.
    """
    if p < 1:
        raise ExponentRange("p must be >= 1")
    if eps < 0:
        raise ExponentRange("eps must be >= 0")
    ids, mask = as_subset(space, E)
    W = np.asarray(W, dtype=float)
    if W.shape != (space.n,):
        raise ValueError("W must be defined on all of X")
    if np.any(W <= 0):
        raise NonpositiveWeight("W must be strictly positive")

    u = W ** (1.0 + eps)
    u_mu = u * space.mu
    ue_mu = np.where(mask, u_mu, 0.0)
    if p > 1:
        sig = u ** (-1.0 / (p - 1.0))
        sig_mu = sig * space.mu
        sige_mu = np.where(mask, sig_mu, 0.0)
    else:
        u_inf = u.copy()
        ue_inf = np.where(mask, u, np.inf)
    in_e = mask.astype(float)

    cb = space.canonical
    cb.ensure_all()

    worst = 0.0
    for c in range(space.n):
        data = cb.center(c)
        if p > 1:
            restr = (data.prefix_sums(ue_mu) / data.mu_prefix) * (
                data.prefix_sums(sige_mu) / data.mu_prefix
            ) ** (p - 1.0)
            glob = (data.prefix_sums(u_mu) / data.mu_prefix) * (
                data.prefix_sums(sig_mu) / data.mu_prefix
            ) ** (p - 1.0)
            ratios = restr / glob
        else:
            count = data.prefix_sums(in_e)
            restr = (data.prefix_sums(ue_mu) / data.mu_prefix) / data.prefix_mins(ue_inf)
            glob = (data.prefix_sums(u_mu) / data.mu_prefix) / data.prefix_mins(u_inf)
            ratios = np.where(count > 0, restr / glob, 0.0)
        worst = max(worst, float(np.max(ratios)))

    restricted = ap_tilde_characteristic(space, E, u[ids], p, workers=workers)
    global_ = ap_tilde_characteristic(space, None, u, p, workers=workers)
    return RestrictionReport(worst, restricted, global_, float(p), float(eps))
