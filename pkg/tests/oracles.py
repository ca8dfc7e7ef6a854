"""Independent brute-force oracles used by the tests.

These deliberately avoid the library's enumeration/search code paths: counts
come from filtering every permutation of 1..n into the grid, and minima from
evaluating every arrangement. Entropies are recomputed locally.
"""

from itertools import islice, permutations

import numpy as np

from qaeopt import BipartiteDims, YoungTableau, is_regular

_CHUNK = 200_000


def _regular_mask(batch: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    grids = batch.reshape(-1, d_a, d_b)
    ok = np.ones(len(grids), dtype=bool)
    if d_b > 1:
        ok &= np.all(np.diff(grids, axis=2) > 0, axis=(1, 2))
    if d_a > 1:
        ok &= np.all(np.diff(grids, axis=1) > 0, axis=(1, 2))
    return ok


def brute_force_count(d_a: int, d_b: int) -> int:
    """Count regular fillings by testing all (d_a*d_b)! permutations."""
    n = d_a * d_b
    perms = permutations(range(1, n + 1))
    total = 0
    while True:
        chunk = list(islice(perms, _CHUNK))
        if not chunk:
            return total
        batch = np.array(chunk, dtype=np.int8)
        total += int(_regular_mask(batch, d_a, d_b).sum())


def brute_force_regular_set(d_a: int, d_b: int) -> set:
    """All regular fillings as cell tuples, via full filtering with is_regular."""
    dims = BipartiteDims(d_a, d_b)
    n = d_a * d_b
    found = set()
    for perm in permutations(range(1, n + 1)):
        cells = tuple(perm[i * d_b : (i + 1) * d_b] for i in range(d_a))
        if is_regular(YoungTableau(dims, cells)):
            found.add(cells)
    return found


def _entropy(v: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def grid_mutual_information(grid: np.ndarray) -> float:
    """Shannon mutual information of a joint probability grid (nats)."""
    g = np.asarray(grid, dtype=float)
    return float(_entropy(g.sum(axis=1)) + _entropy(g.sum(axis=0)) - _entropy(g.ravel()))


def brute_force_min_mi(probs, d_a: int, d_b: int) -> float:
    """Minimum mutual information over all (d_a*d_b)! grid arrangements."""
    p = np.asarray(probs, dtype=float)
    n = p.size
    order = np.array(list(permutations(range(n))), dtype=np.intp)
    grids = p[order].reshape(-1, d_a, d_b)
    mis = (
        _entropy(grids.sum(axis=2))
        + _entropy(grids.sum(axis=1))
        - _entropy(grids.reshape(len(grids), -1))
    )
    return float(mis.min())
