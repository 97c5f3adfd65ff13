"""Hardy-Littlewood maximal operators, plain and subset-relative.

The subset-relative operator at x takes the supremum, over every ball B
containing x (any center), of the average (1/mu(B)) * integral of |f| over
B intersect E. Normalization always uses the mass of the full ball, which is
what makes the operator useful for extending weights off E.

Enumeration is exact: every real radius produces one of the canonical
distance-sorted prefixes, so per center a cumulative-sum plus suffix-maximum
sweep covers all balls in O(n log n).
"""

from __future__ import annotations

import numpy as np

from .errors import EmptySubset, ExponentRange, NonpositiveG, ZeroFunction
from .parallel import run_chunks
from .space import MetricMeasureSpace


def as_subset(space: MetricMeasureSpace, E) -> tuple[np.ndarray, np.ndarray]:
    """Normalize a subset given as bool mask or id array to (sorted ids, mask)."""
    if E is None:
        ids = np.arange(space.n, dtype=np.intp)
        mask = np.ones(space.n, dtype=bool)
        return ids, mask
    E = np.asarray(E)
    if E.dtype == bool:
        if E.shape != (space.n,):
            raise ValueError("subset mask length does not match the space")
        mask = E.copy()
    else:
        ids = np.unique(E.astype(np.intp))
        if ids.size and (ids[0] < 0 or ids[-1] >= space.n):
            raise ValueError("subset ids out of range")
        mask = np.zeros(space.n, dtype=bool)
        mask[ids] = True
    ids = np.flatnonzero(mask)
    if ids.size == 0:
        raise EmptySubset("subset must have positive measure")
    return ids, mask


def scatter(space: MetricMeasureSpace, ids: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Extend values given on sorted subset ids to all of X by zero."""
    values = np.asarray(values, dtype=float)
    if values.shape != ids.shape:
        raise ValueError("values length does not match subset size")
    full = np.zeros(space.n)
    full[ids] = values
    return full


def maximal_fn(
    space: MetricMeasureSpace,
    f: np.ndarray,
    E=None,
    radius_cap: float | None = None,
    workers: int = 1,
) -> np.ndarray:
    """Subset-relative maximal function of f, evaluated at every point of X.

    Parameters
    ----------
    f : values of f on E (aligned with the sorted ids of E), or on all of X
        when E is None.
    E : optional subset (bool mask or id array); None means all of X.
    radius_cap : optional R > 0; only balls whose representative radius is
        <= R participate. Points contained in no such ball get 0.
    """
    ids, _ = as_subset(space, E)
    fx_mu = scatter(space, ids, np.abs(np.asarray(f, dtype=float))) * space.mu
    if radius_cap is not None and radius_cap <= 0:
        raise ValueError("radius_cap must be positive")

    cb = space.canonical
    cb.ensure_all()

    def scan(start: int, stop: int) -> np.ndarray:
        out = np.zeros(space.n)
        for c in range(start, stop):
            data = cb.center(c)
            avg = data.prefix_sums(fx_mu) / data.mu_prefix
            if radius_cap is not None:
                kmax = int(np.searchsorted(data.reps, radius_cap, side="right")) - 1
                if kmax < 0:
                    continue
                avg = avg[: kmax + 1]
            suffix = np.maximum.accumulate(avg[::-1])[::-1]
            k0 = data.point_prefix
            inside = k0 < suffix.shape[0]
            cand = np.zeros(space.n)
            cand[inside] = suffix[k0[inside]]
            np.maximum(out, cand, out=out)
        return out

    chunks = run_chunks(space.n, workers, scan)
    result = chunks[0]
    for extra in chunks[1:]:
        np.maximum(result, extra, out=result)
    return result


def coifman_rochberg_weight(
    space: MetricMeasureSpace,
    f: np.ndarray,
    eps: float,
    g: np.ndarray | None = None,
    workers: int = 1,
) -> tuple[np.ndarray, float]:
    """Build the A1-class weight g * (Mf)^eps and report its A1 constant.

    Requires 0 < eps < 1, f >= 0 on X and not identically zero, and g
    strictly positive with 1/g bounded (finite spaces give that for free).
    Returns (weight on X, A1 characteristic of the weight).
    """
    from .weights import ap_tilde_characteristic

    f = np.asarray(f, dtype=float)
    if f.shape != (space.n,):
        raise ValueError("f must be defined on all of X")
    if np.any(f < 0):
        raise ValueError("f must be nonnegative")
    if not np.any(f > 0):
        raise ZeroFunction("f must not be identically zero")
    if not 0 < eps < 1:
        raise ExponentRange("eps must lie in (0, 1)")
    if g is None:
        g = np.ones(space.n)
    else:
        g = np.asarray(g, dtype=float)
        if g.shape != (space.n,):
            raise ValueError("g must be defined on all of X")
        if np.any(g <= 0):
            raise NonpositiveG("g must be strictly positive")

    mf = maximal_fn(space, f, E=None, workers=workers)
    w = g * mf**eps
    a1 = ap_tilde_characteristic(space, None, w, 1.0, workers=workers).value
    return w, a1
