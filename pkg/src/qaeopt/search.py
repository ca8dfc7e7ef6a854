"""Minimize the arranged mutual information over regular Young tableaux.

Two routes: exact exhaustive traversal of the (streamed) tableau space when
its size is under a threshold, and a two-phase heuristic otherwise. The
heuristic first samples many random regular tableaux and keeps the best few
(breadth phase), then repeatedly moves each survivor to its best value-swap
neighbour while tracking the best tableau ever seen (depth phase).

Everything is deterministic given the config seed: per-draw RNG streams are
derived as ``SeedSequence((seed, draw_index))``, so parallel and sequential
execution produce bitwise-identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import SearchSpaceTooLargeError, ValidationError
from .qstate import BipartiteDims, shannon_entropy
from .tableau import (
    ProbabilityTableau,
    YoungTableau,
    arrange,
    candidate_swaps,
    canonicalize_decreasing,
    count_regular,
    enumerate_regular,
    is_regular,
    _random_regular_grid,
    _swap_keeps_regular,
)

DEFAULT_EXHAUSTIVE_THRESHOLD = 10**7


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the two-phase search and the exhaustive/heuristic routing.

    n1: breadth-phase sample count; n2: seeds retained for the depth phase;
    n_d: descent iterations per seed. The exhaustive threshold bounds the
    tableau count up to which full traversal is used. ``parallelism`` workers
    evaluate breadth-phase samples; results do not depend on it.
    """

    n1: int = 20000
    n2: int = 12
    n_d: int = 200
    seed: int = 0
    exhaustive_threshold: int = DEFAULT_EXHAUSTIVE_THRESHOLD
    parallelism: int = 1

    def __post_init__(self) -> None:
        if min(self.n1, self.n2, self.n_d, self.parallelism) < 1:
            raise ValidationError("n1, n2, n_d and parallelism must be positive")
        if self.n2 > self.n1:
            raise ValidationError(f"n2 ({self.n2}) must not exceed n1 ({self.n1})")
        if self.exhaustive_threshold < 1:
            raise ValidationError("exhaustive_threshold must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a search run.

    ``trajectory`` is the best-seen mutual information over time (always
    non-increasing); ``seed_provenance`` is the index of the depth-phase seed
    that produced the winner, or None when the winner came from exhaustive
    traversal or the starting arrangement. ``evaluations`` counts mutual
    information evaluations.
    """

    best_tableau: YoungTableau
    best_mi: float
    method: str
    evaluations: int
    trajectory: tuple[float, ...]
    seed_provenance: int | None

    def __post_init__(self) -> None:
        if self.method not in ("exhaustive", "heuristic"):
            raise ValidationError(f"unknown method {self.method!r}")
        if self.best_mi < -1e-9:
            raise ValidationError(f"negative mutual information: {self.best_mi}")
        if any(b > a for a, b in zip(self.trajectory, self.trajectory[1:])):
            raise ValidationError("best-seen trajectory must be non-increasing")

    @property
    def initial_mi(self) -> float:
        return self.trajectory[0]

    def to_dict(self) -> dict:
        return {
            "best_tableau": [list(row) for row in self.best_tableau.cells],
            "best_mi": self.best_mi,
            "method": self.method,
            "evaluations": self.evaluations,
            "trajectory": list(self.trajectory),
            "seed_provenance": self.seed_provenance,
        }


def _validated_probs(probs, dims: BipartiteDims) -> np.ndarray:
    p = np.array(probs, dtype=float)
    if p.ndim != 1 or p.size != dims.total:
        raise ValidationError(f"expected {dims.total} probabilities, got shape {p.shape}")
    if p.min() < -ProbabilityTableau.ENTRY_TOL:
        raise ValidationError(f"negative probability: {p.min():.3e}")
    if abs(p.sum() - 1.0) > ProbabilityTableau.SUM_TOL:
        raise ValidationError(f"probabilities must sum to 1, got {p.sum()}")
    if np.any(np.diff(p) > 1e-12):
        raise ValidationError("probabilities must be sorted non-increasing")
    p.setflags(write=False)
    return p


class _MIEvaluator:
    """Caches the entry entropy, which is shared by every arrangement of the
    same probabilities."""

    def __init__(self, probs: np.ndarray) -> None:
        self.probs = probs
        self.h_flat = shannon_entropy(probs)

    def mi(self, t: YoungTableau) -> float:
        grid = self.probs[t.index_array]
        return (
            shannon_entropy(grid.sum(axis=1))
            + shannon_entropy(grid.sum(axis=0))
            - self.h_flat
        )


def exhaustive_search(
    probs,
    dims: BipartiteDims,
    exhaustive_threshold: int = DEFAULT_EXHAUSTIVE_THRESHOLD,
) -> OptimizationResult:
    """Globally minimal tableau by streaming traversal; ties go to the first
    tableau in enumeration order.

    For square grids only one representative per transpose pair is evaluated
    (transposition swaps the two marginals and leaves the mutual information
    unchanged), so ``evaluations`` is half the total count there.
    """
    p = _validated_probs(probs, dims)
    total = count_regular(dims)
    if total > exhaustive_threshold:
        raise SearchSpaceTooLargeError(
            f"{total} regular tableaux exceed the exhaustive threshold "
            f"{exhaustive_threshold}; use the two-phase heuristic search"
        )
    ev = _MIEvaluator(p)
    best_t: YoungTableau | None = None
    best_mi = math.inf
    trajectory: list[float] = []
    evaluations = 0
    for t in enumerate_regular(dims, exploit_symmetry=(dims.d_a == dims.d_b)):
        m = ev.mi(t)
        evaluations += 1
        if m < best_mi:
            best_t, best_mi = t, m
            trajectory.append(m)
    assert best_t is not None
    return OptimizationResult(
        best_tableau=best_t,
        best_mi=best_mi,
        method="exhaustive",
        evaluations=evaluations,
        trajectory=tuple(trajectory),
        seed_provenance=None,
    )


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0.0 else 0.0


def _grid_mi(pr: list[float], grid: list[list[int]], d_b: int, h_flat: float) -> float:
    """Mutual information of a value grid over descending probabilities pr."""
    cols = [0.0] * d_b
    h_rows = 0.0
    for row in grid:
        row_sum = 0.0
        for j, v in enumerate(row):
            q = pr[v - 1]
            row_sum += q
            cols[j] += q
        h_rows -= _xlogx(row_sum)
    h_cols = -sum(map(_xlogx, cols))
    return h_rows + h_cols - h_flat


def _breadth_chunk(
    probs: np.ndarray, d_a: int, d_b: int, seed: int, lo: int, hi: int, keep: int
) -> list[tuple[float, int, tuple[tuple[int, ...], ...]]]:
    """Evaluate draws lo..hi-1 and pre-reduce to the chunk's best ``keep``
    distinct tableaux, keyed by (mi, draw index)."""
    pr = [float(x) for x in probs]
    h_flat = shannon_entropy(probs)
    entries = []
    for i in range(lo, hi):
        rng = np.random.default_rng(np.random.SeedSequence((seed, i)))
        grid = _random_regular_grid(d_a, d_b, rng)
        mi = _grid_mi(pr, grid, d_b, h_flat)
        entries.append((mi, i, tuple(tuple(row) for row in grid)))
    entries.sort(key=lambda e: (e[0], e[1]))
    out: list[tuple[float, int, tuple[tuple[int, ...], ...]]] = []
    seen: set[tuple[tuple[int, ...], ...]] = set()
    for e in entries:
        if e[2] in seen:
            continue
        seen.add(e[2])
        out.append(e)
        if len(out) == keep:
            break
    return out


def breadth_first(
    probs, dims: BipartiteDims, config: SearchConfig
) -> tuple[tuple[YoungTableau, float], ...]:
    """Sample n1 random regular tableaux and return the n2 distinct ones with
    the smallest mutual information, ascending.

    Draw i uses the RNG stream ``SeedSequence((config.seed, i))``, so the
    result is independent of how draws are split across workers.
    """
    p = _validated_probs(probs, dims)
    jobs = min(config.parallelism, config.n1)
    if jobs == 1:
        parts = [_breadth_chunk(p, dims.d_a, dims.d_b, config.seed, 0, config.n1, config.n2)]
    else:
        bounds = np.linspace(0, config.n1, jobs + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(
                pool.map(
                    _breadth_chunk,
                    [p] * jobs,
                    [dims.d_a] * jobs,
                    [dims.d_b] * jobs,
                    [config.seed] * jobs,
                    bounds[:-1],
                    bounds[1:],
                    [config.n2] * jobs,
                )
            )
    merged = sorted((e for part in parts for e in part), key=lambda e: (e[0], e[1]))
    out: list[tuple[YoungTableau, float]] = []
    seen: set[tuple[tuple[int, ...], ...]] = set()
    for mi, _idx, cells in merged:
        if cells in seen:
            continue
        seen.add(cells)
        out.append((YoungTableau(dims, cells), mi))
        if len(out) == config.n2:
            break
    return tuple(out)


def depth_first(
    probs,
    dims: BipartiteDims,
    seeds: Sequence[YoungTableau],
    config: SearchConfig,
) -> OptimizationResult:
    """Iterated best-neighbour descent from each seed.

    Each iteration moves to the neighbour with minimal mutual information,
    even when that is worse than the current tableau (the move set never
    contains the current tableau), and the globally best tableau seen across
    all trajectories is returned. A trajectory halts early when a tableau has
    no regular neighbour.
    """
    p = _validated_probs(probs, dims)
    if len(seeds) == 0:
        raise ValidationError("depth-first search requires at least one seed tableau")
    for s in seeds:
        if s.dims != dims:
            raise ValidationError(f"seed dims {s.dims} do not match {dims}")
        if not is_regular(s):
            raise ValidationError("depth-first seeds must be regular tableaux")

    ev = _MIEvaluator(p)
    d_a, d_b = dims.d_a, dims.d_b
    n = dims.total
    pr = [float(x) for x in p]
    h_flat = ev.h_flat
    swaps = tuple(candidate_swaps(n))

    best_mi = math.inf
    best_cells: tuple[tuple[int, ...], ...] | None = None
    best_seed = 0
    trajectory: list[float] = []
    evaluations = 0

    for si, seed_t in enumerate(seeds):
        cells = [list(row) for row in seed_t.cells]
        pos: list[tuple[int, int]] = list(seed_t.positions)
        current_mi = ev.mi(seed_t)
        evaluations += 1
        if current_mi < best_mi:
            best_mi, best_cells, best_seed = current_mi, seed_t.cells, si

        for _ in range(config.n_d):
            # Fresh sums each iteration keep float drift out of the deltas.
            rows = [0.0] * d_a
            cols = [0.0] * d_b
            for i, row in enumerate(cells):
                for j, v in enumerate(row):
                    q = pr[v - 1]
                    rows[i] += q
                    cols[j] += q
            h_rows = -sum(_xlogx(x) for x in rows)
            h_cols = -sum(_xlogx(x) for x in cols)

            chosen_mi = math.inf
            chosen: tuple[tuple[int, int], tuple[int, int]] | None = None
            for u, w in swaps:
                a, b = pos[u - 1], pos[w - 1]
                if not _swap_keeps_regular(cells, a, b, u, w, d_a, d_b):
                    continue
                delta = pr[w - 1] - pr[u - 1]
                r1, c1 = a
                r2, c2 = b
                nh_rows = (
                    h_rows
                    + _xlogx(rows[r1])
                    + _xlogx(rows[r2])
                    - _xlogx(rows[r1] + delta)
                    - _xlogx(rows[r2] - delta)
                )
                nh_cols = (
                    h_cols
                    + _xlogx(cols[c1])
                    + _xlogx(cols[c2])
                    - _xlogx(cols[c1] + delta)
                    - _xlogx(cols[c2] - delta)
                )
                cand = nh_rows + nh_cols - h_flat
                evaluations += 1
                if cand < chosen_mi:
                    chosen_mi = cand
                    chosen = (a, b)
            if chosen is None:
                break
            (r1, c1), (r2, c2) = chosen
            u, w = cells[r1][c1], cells[r2][c2]
            cells[r1][c1], cells[r2][c2] = w, u
            pos[u - 1], pos[w - 1] = (r2, c2), (r1, c1)
            if chosen_mi < best_mi:
                best_mi = chosen_mi
                best_cells = tuple(tuple(row) for row in cells)
                best_seed = si
            trajectory.append(best_mi)

    assert best_cells is not None
    return OptimizationResult(
        best_tableau=YoungTableau(dims, best_cells),
        best_mi=best_mi,
        method="heuristic",
        evaluations=evaluations,
        trajectory=tuple(trajectory),
        seed_provenance=best_seed,
    )


def optimize(probs, dims: BipartiteDims, config: SearchConfig | None = None) -> OptimizationResult:
    """Route to exhaustive traversal or the two-phase heuristic by space size.

    The canonicalized starting arrangement (row-major layout of the descending
    probabilities, which is already a decreasing matrix) always participates
    as a candidate, so the result is never worse than not encoding at all.
    """
    if config is None:
        config = SearchConfig()
    p = _validated_probs(probs, dims)
    ev = _MIEvaluator(p)
    start = YoungTableau.row_major(dims)
    canon = canonicalize_decreasing(arrange(p, start))
    assert canon.row_perm.is_identity() and canon.col_perm.is_identity()
    initial_mi = ev.mi(start)

    if count_regular(dims) <= config.exhaustive_threshold:
        inner = exhaustive_search(p, dims, config.exhaustive_threshold)
    else:
        seeds = breadth_first(p, dims, config)
        inner = depth_first(p, dims, [t for t, _ in seeds], config)

    if inner.best_mi <= initial_mi:
        best_tableau, best_mi, provenance = (
            inner.best_tableau,
            inner.best_mi,
            inner.seed_provenance,
        )
    else:
        best_tableau, best_mi, provenance = start, initial_mi, None
    trajectory = (initial_mi,) + tuple(min(x, initial_mi) for x in inner.trajectory)
    return OptimizationResult(
        best_tableau=best_tableau,
        best_mi=best_mi,
        method=inner.method,
        evaluations=inner.evaluations + 1,
        trajectory=trajectory,
        seed_provenance=provenance,
    )
