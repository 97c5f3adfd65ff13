"""Muckenhoupt-type characteristics of weights on finite spaces.

Two scopes matter here and differ only in which balls participate and where
the integrals live:

* subset-induced (tilde) classes: all balls of X participate, integrals run
  over B intersect E, and the normalization keeps mu of the full ball;
* domain classes: only balls entirely contained in the domain participate,
  and integrals run over the full ball.

With E = X the tilde functional is the ordinary global characteristic. The
essential infimum in the p = 1 functionals is the minimum, since spaces are
finite and every point has positive mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededAtZero, ExponentRange, NonpositiveWeight
from .maximal import as_subset, scatter
from .parallel import combine_scan_results, run_chunks
from .space import MetricMeasureSpace


def conjugate_exponent(p: float) -> float:
    """Holder conjugate p' = p/(p-1); infinity when p = 1."""
    if p < 1:
        raise ExponentRange("p must be >= 1")
    if p == 1:
        return np.inf
    return p / (p - 1.0)


@dataclass(frozen=True)
class ApParams:
    """Exponent bookkeeping for one extension run: p, its conjugate, eps, delta."""

    p: float
    eps: float = 0.0

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ExponentRange("p must be >= 1")
        if self.eps < 0:
            raise ExponentRange("eps must be >= 0")

    @property
    def p_prime(self) -> float:
        return conjugate_exponent(self.p)

    @property
    def delta(self) -> float:
        return 1.0 / (1.0 + self.eps / 2.0)


@dataclass(frozen=True)
class CharacteristicReport:
    """Supremum of a ball functional with the ball realizing it."""

    value: float
    witness_center: int
    witness_prefix: int
    p: float
    kind: str

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": {"center": self.witness_center, "prefix": self.witness_prefix},
            "p": self.p,
            "kind": self.kind,
        }


def _check_weight(w: np.ndarray, size: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (size,):
        raise ValueError("weight length does not match its domain")
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise NonpositiveWeight("weights must be strictly positive and finite")
    return w


def ap_tilde_characteristic(
    space: MetricMeasureSpace,
    E,
    w: np.ndarray,
    p: float,
    workers: int = 1,
) -> CharacteristicReport:
    """Characteristic of w in the subset-induced class of exponent p.

    For p > 1 the ball functional is
    (1/mu(B)) int_{B cap E} w dmu * ((1/mu(B)) int_{B cap E} w^{-1/(p-1)} dmu)^{p-1},
    with empty intersections contributing 0. For p = 1 it is the restricted
    average divided by min over B cap E of w, skipping empty intersections.
    w is given on E (sorted-id alignment); E = None means all of X.
    """
    if p < 1:
        raise ExponentRange("p must be >= 1")
    ids, mask = as_subset(space, E)
    w = _check_weight(w, ids.size)

    w_mu = scatter(space, ids, w) * space.mu
    if p > 1:
        sig_mu = scatter(space, ids, w ** (-1.0 / (p - 1.0))) * space.mu
        w_inf = None
    else:
        sig_mu = None
        w_inf = np.full(space.n, np.inf)
        w_inf[ids] = w

    in_e = mask.astype(float)
    cb = space.canonical
    cb.ensure_all()

    def scan(start: int, stop: int) -> tuple[float, tuple[int, int]]:
        best = -np.inf
        witness = (-1, -1)
        for c in range(start, stop):
            data = cb.center(c)
            sw = data.prefix_sums(w_mu)
            if p > 1:
                vals = (sw / data.mu_prefix) * (
                    data.prefix_sums(sig_mu) / data.mu_prefix
                ) ** (p - 1.0)
            else:
                count = data.prefix_sums(in_e)
                mins = data.prefix_mins(w_inf)
                vals = np.where(count > 0, (sw / data.mu_prefix) / mins, -np.inf)
            k = int(np.argmax(vals))
            if vals[k] > best:
                best, witness = float(vals[k]), (c, k)
        return best, witness

    value, witness = combine_scan_results(run_chunks(space.n, workers, scan))
    kind = "Ap_tilde" if p > 1 else "A1_tilde"
    return CharacteristicReport(value, witness[0], witness[1], p, kind)


def ap_domain_characteristic(
    space: MetricMeasureSpace,
    D,
    w: np.ndarray,
    p: float,
    workers: int = 1,
) -> CharacteristicReport:
    """Characteristic of w over balls entirely contained in the domain D.

    Integrals run over the full ball and the normalization is mu(B).
    Singleton balls always qualify, so the supremum is over a nonempty
    family whenever D is nonempty. w is given on D (sorted-id alignment).
    """
    if p < 1:
        raise ExponentRange("p must be >= 1")
    ids, mask = as_subset(space, D)
    w = _check_weight(w, ids.size)

    w_mu = scatter(space, ids, w) * space.mu
    if p > 1:
        sig_mu = scatter(space, ids, w ** (-1.0 / (p - 1.0))) * space.mu
        w_inf = None
    else:
        sig_mu = None
        w_inf = np.full(space.n, np.inf)
        w_inf[ids] = w

    outside = (~mask).astype(float)
    cb = space.canonical
    cb.ensure_all()
    centers = ids

    def scan(start: int, stop: int) -> tuple[float, tuple[int, int]]:
        best = -np.inf
        witness = (-1, -1)
        for c in centers[start:stop]:
            data = cb.center(int(c))
            eligible = data.prefix_sums(outside) == 0
            if not eligible.any():
                continue
            sw = data.prefix_sums(w_mu)
            if p > 1:
                vals = (sw / data.mu_prefix) * (
                    data.prefix_sums(sig_mu) / data.mu_prefix
                ) ** (p - 1.0)
            else:
                vals = (sw / data.mu_prefix) / data.prefix_mins(w_inf)
            vals = np.where(eligible, vals, -np.inf)
            k = int(np.argmax(vals))
            if vals[k] > best:
                best, witness = float(vals[k]), (int(c), k)
        return best, witness

    value, witness = combine_scan_results(run_chunks(centers.size, workers, scan))
    kind = "Ap_domain" if p > 1 else "A1_domain"
    return CharacteristicReport(value, witness[0], witness[1], p, kind)


def reverse_holder_constant(
    space: MetricMeasureSpace,
    w: np.ndarray,
    delta: float,
    domain=None,
    workers: int = 1,
) -> float:
    """sup over scoped balls of (avg_B w^{1+delta})^{1/(1+delta)} / avg_B w.

    Scope is every canonical ball when domain is None (w on X), otherwise
    only balls entirely contained in the domain (w on the domain ids).
    Always >= 1 by the power mean inequality.
    """
    if delta <= 0:
        raise ExponentRange("delta must be positive")
    if domain is None:
        ids = np.arange(space.n, dtype=np.intp)
        outside = None
        centers = ids
    else:
        ids, mask = as_subset(space, domain)
        outside = (~mask).astype(float)
        centers = ids
    w = _check_weight(w, ids.size)
    w_mu = scatter(space, ids, w) * space.mu
    whi_mu = scatter(space, ids, w ** (1.0 + delta)) * space.mu

    cb = space.canonical
    cb.ensure_all()
    inv = 1.0 / (1.0 + delta)

    def scan(start: int, stop: int) -> tuple[float, tuple[int, int]]:
        best = -np.inf
        witness = (-1, -1)
        for c in centers[start:stop]:
            data = cb.center(int(c))
            vals = (data.prefix_sums(whi_mu) / data.mu_prefix) ** inv / (
                data.prefix_sums(w_mu) / data.mu_prefix
            )
            if outside is not None:
                vals = np.where(data.prefix_sums(outside) == 0, vals, -np.inf)
            k = int(np.argmax(vals))
            if vals[k] > best:
                best, witness = float(vals[k]), (int(c), k)
        return best, witness

    value, _ = combine_scan_results(run_chunks(centers.size, workers, scan))
    return value


@dataclass(frozen=True)
class SelfImprovementReport:
    best_eps: float
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


def self_improve_epsilon(
    space: MetricMeasureSpace,
    w: np.ndarray,
    p: float,
    eps_grid,
    budget: float,
    workers: int = 1,
) -> SelfImprovementReport:
    """Largest grid eps whose raised weight w^{1+eps} keeps its global
    characteristic within budget, plus the full (eps, characteristic) table."""
    eps_grid = sorted(float(e) for e in eps_grid)
    if not eps_grid or eps_grid[0] < 0:
        raise ValueError("eps grid must be nonempty and nonnegative")
    w = _check_weight(w, space.n)
    table = []
    best = None
    for eps in eps_grid:
        char = ap_tilde_characteristic(space, None, w ** (1.0 + eps), p, workers).value
        table.append((eps, char))
        if char <= budget:
            best = eps
    if best is None:
        raise BudgetExceededAtZero(
            f"characteristic exceeds budget {budget} on the whole grid"
        )
    return SelfImprovementReport(best, budget, p, tuple(table))


def power_weight(
    space: MetricMeasureSpace,
    exponent: float,
    ids: np.ndarray | None = None,
) -> np.ndarray:
    """|x|^exponent on a coordinate-backed space, with the origin clamped.

    Points whose coordinate norm is exactly zero get (h/2)^exponent where h
    is the resolution, keeping the weight finite and positive for negative
    exponents and zero-free for positive ones.
    """
    if space.coords is None:
        raise ValueError("power weights need a coordinate-backed space")
    coords = space.coords if ids is None else space.coords[ids]
    r = np.sqrt(np.einsum("ij,ij->i", coords, coords))
    half = 0.5 * space.min_positive_distance()
    r = np.where(r == 0.0, half, r)
    return r**exponent


@dataclass(frozen=True)
class AInfinityFit:
    c_w: float
    delta: float
    n_samples: int
    violations: int


def a_infinity_fit(
    space: MetricMeasureSpace,
    w: np.ndarray,
    domain=None,
    n_samples: int = 400,
    seed: int = 0,
) -> AInfinityFit:
    """Fit (C_w, delta) with w(S)/w(B) <= C_w (mu(S)/mu(B))^delta on samples.

    Samples canonical balls in scope and random nonempty subsets S of each.
    The slope comes from a least-squares fit through the origin of
    log-mass-ratio against log-weight-ratio (clamped positive), and C_w is
    then the smallest constant with zero violations on the sample.
    """
    if domain is None:
        ids = np.arange(space.n, dtype=np.intp)
        mask = np.ones(space.n, dtype=bool)
    else:
        ids, mask = as_subset(space, domain)
    w = _check_weight(w, ids.size)
    w_mu_full = scatter(space, ids, w) * space.mu

    rng = np.random.default_rng(seed)
    cb = space.canonical
    xs: list[float] = []
    ys: list[float] = []
    attempts = 0
    while len(xs) < n_samples and attempts < 20 * n_samples:
        attempts += 1
        c = int(rng.choice(ids))
        data = cb.center(c)
        if domain is not None:
            eligible = np.flatnonzero(data.prefix_sums((~mask).astype(float)) == 0)
            if eligible.size == 0:
                continue
            k = int(rng.choice(eligible))
        else:
            k = int(rng.integers(0, data.counts.shape[0]))
        members = data.order[: data.counts[k]]
        if members.size < 2:
            continue
        take = int(rng.integers(1, members.size))
        sub = rng.choice(members, size=take, replace=False)
        mu_b = float(data.mu_prefix[k])
        mu_s = float(np.sum(space.mu[sub]))
        w_b = float(np.sum(w_mu_full[members]))
        w_s = float(np.sum(w_mu_full[sub]))
        if mu_s >= mu_b or w_s <= 0:
            continue
        xs.append(np.log(mu_s / mu_b))
        ys.append(np.log(w_s / w_b))
    x = np.array(xs)
    y = np.array(ys)
    if x.size == 0:
        return AInfinityFit(1.0, 1.0, 0, 0)
    denom = float(np.dot(x, x))
    slope = float(np.dot(x, y)) / denom if denom > 0 else 1.0
    delta = max(slope, 1e-6)
    c_w = float(np.exp(np.max(y - delta * x)))
    c_w = max(c_w, 1.0)
    violations = int(np.sum(y > np.log(c_w) + delta * x + 1e-12))
    return AInfinityFit(c_w, delta, int(x.size), violations)


def holder_average_bound_margin(
    space: MetricMeasureSpace,
    E,
    v: np.ndarray,
    q: float,
    g: np.ndarray,
) -> float:
    """Worst ratio, over all canonical balls, of
    v(B cap E) * ((1/mu(B)) int_{B cap E} |g| dmu)^q
    against int_{B cap E} |g|^q v dmu.

    The subset-induced characteristic of v at exponent q is an upper bound
    for this ratio; callers assert margin <= characteristic. Balls where the
    right side vanishes have a vanishing left side and are skipped.
    """
    if q < 1:
        raise ExponentRange("q must be >= 1")
    ids, _ = as_subset(space, E)
    v = _check_weight(v, ids.size)
    g = np.abs(np.asarray(g, dtype=float))
    if g.shape != ids.shape:
        raise ValueError("g length does not match subset size")

    v_mu = scatter(space, ids, v) * space.mu
    g_mu = scatter(space, ids, g) * space.mu
    gqv_mu = scatter(space, ids, g**q * v) * space.mu

    worst = 0.0
    cb = space.canonical
    for c in range(space.n):
        data = cb.center(c)
        lhs = data.prefix_sums(v_mu) * (data.prefix_sums(g_mu) / data.mu_prefix) ** q
        rhs = data.prefix_sums(gqv_mu)
        ok = rhs > 0
        if ok.any():
            worst = max(worst, float(np.max(lhs[ok] / rhs[ok])))
    return worst
