"""Rectangular Young tableaux over a d_a x d_b grid and probability arrangements.

A tableau filling is "regular" when every row increases left to right and
every column increases top to bottom. With eigenvalues sorted descending and
value 1 marking the largest one, regular fillings correspond exactly to
decreasing probability matrices, which is the reduced search space for the
encoder permutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import chain
from typing import Iterator, NamedTuple

import numpy as np

from .exceptions import CanonicalizationError, ValidationError
from .qstate import BipartiteDims, shannon_entropy

MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class Permutation:
    """Bijection on 0..n-1; ``mapping[k]`` is the destination index of source k."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapping", tuple(int(m) for m in self.mapping))
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValidationError("mapping is not a bijection on 0..n-1")

    @property
    def size(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    def is_identity(self) -> bool:
        return all(m == k for k, m in enumerate(self.mapping))

    def compose_after(self, first: "Permutation") -> "Permutation":
        """Permutation equivalent to applying ``first`` and then ``self``."""
        if first.size != self.size:
            raise ValidationError("cannot compose permutations of different sizes")
        return Permutation(tuple(self.mapping[m] for m in first.mapping))

    def apply_to_grid(self, grid: np.ndarray) -> np.ndarray:
        """Move the entry at flat (row-major) cell k to flat cell mapping[k]."""
        flat = np.asarray(grid).ravel()
        if flat.size != self.size:
            raise ValidationError("grid size does not match permutation size")
        out = np.empty_like(flat)
        out[np.asarray(self.mapping)] = flat
        return out.reshape(np.asarray(grid).shape)


@dataclass(frozen=True)
class YoungTableau:
    """A d_a x d_b grid filled with each of 1..d_a*d_b exactly once."""

    dims: BipartiteDims
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        cells = tuple(tuple(int(v) for v in row) for row in self.cells)
        object.__setattr__(self, "cells", cells)
        if len(cells) != self.dims.d_a or any(len(r) != self.dims.d_b for r in cells):
            raise ValidationError(
                f"cells must form a {self.dims.d_a} x {self.dims.d_b} grid"
            )
        n = self.dims.total
        if sorted(chain.from_iterable(cells)) != list(range(1, n + 1)):
            raise ValidationError(f"cells must contain each of 1..{n} exactly once")

    @classmethod
    def row_major(cls, dims: BipartiteDims) -> "YoungTableau":
        """The identity filling: 1..n laid out row by row."""
        it = iter(range(1, dims.total + 1))
        return cls(dims, tuple(tuple(next(it) for _ in range(dims.d_b)) for _ in range(dims.d_a)))

    @cached_property
    def index_array(self) -> np.ndarray:
        """cells - 1 as an integer array; arranges a descending spectrum into the grid."""
        arr = np.array(self.cells, dtype=np.intp) - 1
        arr.setflags(write=False)
        return arr

    @cached_property
    def positions(self) -> tuple[tuple[int, int], ...]:
        """positions[v-1] is the (row, col) holding value v."""
        pos: list[tuple[int, int]] = [(-1, -1)] * self.dims.total
        for i, row in enumerate(self.cells):
            for j, v in enumerate(row):
                pos[v - 1] = (i, j)
        return tuple(pos)

    def transpose(self) -> "YoungTableau":
        """Swap the roles of the two subsystems; regularity is preserved."""
        return YoungTableau(
            BipartiteDims(self.dims.d_b, self.dims.d_a),
            tuple(zip(*self.cells)),
        )

    def cell_permutation(self) -> Permutation:
        """Permutation sending flat source index v-1 to the flat cell holding value v."""
        d_b = self.dims.d_b
        return Permutation(tuple(i * d_b + j for i, j in self.positions))

    def __str__(self) -> str:
        width = len(str(self.dims.total))
        return "\n".join(" ".join(f"{v:>{width}}" for v in row) for row in self.cells)


def is_regular(t: YoungTableau) -> bool:
    """True iff every row and every column of the filling strictly increases."""
    cells = t.cells
    for row in cells:
        for a, b in zip(row, row[1:]):
            if a >= b:
                return False
    for col in zip(*cells):
        for a, b in zip(col, col[1:]):
            if a >= b:
                return False
    return True


def enumerate_regular(
    dims: BipartiteDims, exploit_symmetry: bool = False
) -> Iterator[YoungTableau]:
    """Stream every regular filling exactly once, in a fixed depth-first order.

    Values 1..n are placed in increasing order; a cell can receive the next
    value only when its upper and left neighbours are already filled, so only
    regular fillings are ever produced. With ``exploit_symmetry`` and a square
    grid, cell (0, 1) is pinned to value 2, which yields exactly one
    representative per transpose pair (half of all regular fillings).
    """
    d_a, d_b = dims.d_a, dims.d_b
    n = dims.total
    grid = [[0] * d_b for _ in range(d_a)]
    row_len = [0] * d_a
    start = 1
    if exploit_symmetry and d_a == d_b and n > 1:
        grid[0][0], grid[0][1] = 1, 2
        row_len[0] = 2
        start = 3

    def fill(v: int) -> Iterator[YoungTableau]:
        if v > n:
            yield YoungTableau(dims, tuple(tuple(r) for r in grid))
            return
        for i in range(d_a):
            length = row_len[i]
            if length < d_b and (i == 0 or row_len[i - 1] > length):
                grid[i][length] = v
                row_len[i] = length + 1
                yield from fill(v + 1)
                row_len[i] = length
                grid[i][length] = 0

    yield from fill(start)


def count_regular(dims: BipartiteDims) -> int:
    """Number of regular fillings of the d_a x d_b rectangle (hook length formula).

    Exact integer arithmetic; the counts overflow doubles already for modest
    grids.
    """
    hooks = math.prod(
        (dims.d_a - i) + (dims.d_b - j) - 1
        for i in range(dims.d_a)
        for j in range(dims.d_b)
    )
    return math.factorial(dims.total) // hooks


def _random_regular_grid(d_a: int, d_b: int, rng: np.random.Generator) -> list[list[int]]:
    """Grid-level sampler behind random_regular; consumes one block of n draws."""
    n = d_a * d_b
    grid = [[0] * d_b for _ in range(d_a)]
    row_len = [0] * d_a
    draws = rng.random(n)
    for v in range(1, n + 1):
        candidates = [
            i
            for i in range(d_a)
            if row_len[i] < d_b and (i == 0 or row_len[i - 1] > row_len[i])
        ]
        i = candidates[min(int(draws[v - 1] * len(candidates)), len(candidates) - 1)]
        grid[i][row_len[i]] = v
        row_len[i] += 1
    return grid


def random_regular(dims: BipartiteDims, seed) -> YoungTableau:
    """Sample a regular filling by placing 1..n in order, choosing uniformly at
    each step among the currently admissible cells.

    Per-step uniformity does not make the distribution uniform over fillings;
    that bias is intentional (the sampler mirrors the breadth-phase generator).
    ``seed`` may be an int, a ``numpy.random.SeedSequence`` or a ``Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    grid = _random_regular_grid(dims.d_a, dims.d_b, rng)
    return YoungTableau(dims, tuple(tuple(r) for r in grid))


def _swap_keeps_regular(
    cells: tuple[tuple[int, ...], ...],
    a: tuple[int, int],
    b: tuple[int, int],
    u: int,
    w: int,
    d_a: int,
    d_b: int,
) -> bool:
    # Swapping values u < w at cells a and b of a regular filling. Same-row or
    # same-column swaps always break monotonicity; otherwise only the four
    # order constraints that involve the new values can fail.
    r1, c1 = a
    r2, c2 = b
    if r1 == r2 or c1 == c2:
        return False
    if c1 + 1 < d_b and cells[r1][c1 + 1] < w:
        return False
    if r1 + 1 < d_a and cells[r1 + 1][c1] < w:
        return False
    if c2 > 0 and cells[r2][c2 - 1] > u:
        return False
    if r2 > 0 and cells[r2 - 1][c2] > u:
        return False
    return True


def candidate_swaps(n: int) -> Iterator[tuple[int, int]]:
    """Move set for the neighbourhood: (i, i+1) for i in 2..n-1, then (i, i+2)
    for i in 2..n-2, in that order."""
    yield from ((i, i + 1) for i in range(2, n))
    yield from ((i, i + 2) for i in range(2, n - 1))


def neighbors(t: YoungTableau) -> tuple[YoungTableau, ...]:
    """Regular fillings reachable by one value swap, in deterministic move order."""
    d_a, d_b = t.dims.d_a, t.dims.d_b
    pos = t.positions
    out: list[YoungTableau] = []
    seen: set[tuple[tuple[int, ...], ...]] = set()
    for u, w in candidate_swaps(t.dims.total):
        a, b = pos[u - 1], pos[w - 1]
        if not _swap_keeps_regular(t.cells, a, b, u, w, d_a, d_b):
            continue
        grid = [list(row) for row in t.cells]
        grid[a[0]][a[1]], grid[b[0]][b[1]] = grid[b[0]][b[1]], grid[a[0]][a[1]]
        cells = tuple(tuple(row) for row in grid)
        if cells in seen:
            continue
        seen.add(cells)
        out.append(YoungTableau(t.dims, cells))
    return tuple(out)


class ProbabilityTableau:
    """Nonnegative d_a x d_b grid summing to 1; marginals define the mutual information."""

    ENTRY_TOL = 1e-12
    SUM_TOL = 1e-10

    def __init__(self, dims: BipartiteDims, p) -> None:
        grid = np.array(p, dtype=float)
        if grid.shape != (dims.d_a, dims.d_b):
            raise ValidationError(
                f"expected shape {(dims.d_a, dims.d_b)}, got {grid.shape}"
            )
        if grid.min() < -self.ENTRY_TOL:
            raise ValidationError(f"negative entry beyond tolerance: {grid.min():.3e}")
        total = grid.sum()
        if abs(total - 1.0) > self.SUM_TOL:
            raise ValidationError(f"entries must sum to 1 within {self.SUM_TOL}, got {total}")
        grid.setflags(write=False)
        self.dims = dims
        self.p = grid

    def __repr__(self) -> str:
        return f"ProbabilityTableau(dims={self.dims}, p=\n{self.p})"


def arrange(probs, t: YoungTableau) -> ProbabilityTableau:
    """Lay a descending probability sequence into the grid of a tableau.

    The cell holding value k receives the k-th largest probability, so a
    regular tableau yields a decreasing matrix whenever the probabilities are
    strictly decreasing.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size != t.dims.total:
        raise ValidationError(
            f"expected {t.dims.total} probabilities, got shape {p.shape}"
        )
    if np.any(np.diff(p) > MONOTONE_SLACK):
        raise ValidationError("probabilities must be sorted non-increasing")
    return ProbabilityTableau(t.dims, p[t.index_array])


def tableau_mutual_information(pt: ProbabilityTableau) -> float:
    """H(row sums) + H(column sums) - H(entries), Shannon entropies in nats."""
    return (
        shannon_entropy(pt.p.sum(axis=1))
        + shannon_entropy(pt.p.sum(axis=0))
        - shannon_entropy(pt.p)
    )


def is_decreasing(pt: ProbabilityTableau) -> bool:
    """True iff every row and every column is non-increasing."""
    return bool(
        np.all(np.diff(pt.p, axis=1) <= 0.0) and np.all(np.diff(pt.p, axis=0) <= 0.0)
    )


def sort_within_columns(pt: ProbabilityTableau) -> tuple[Permutation, ProbabilityTableau]:
    """One tau_A pass: stable-sort each column into non-increasing order.

    Column sums are untouched and the row-sum vector afterwards majorizes the
    one before, so the mutual information cannot increase.
    """
    d_a, d_b = pt.dims.d_a, pt.dims.d_b
    mapping = [0] * (d_a * d_b)
    out = np.empty_like(pt.p)
    for j in range(d_b):
        order = np.argsort(-pt.p[:, j], kind="stable")
        for rank, src in enumerate(order):
            out[rank, j] = pt.p[src, j]
            mapping[int(src) * d_b + j] = rank * d_b + j
    return Permutation(tuple(mapping)), ProbabilityTableau(pt.dims, out)


def sort_within_rows(pt: ProbabilityTableau) -> tuple[Permutation, ProbabilityTableau]:
    """One tau_B pass: stable-sort each row into non-increasing order."""
    d_a, d_b = pt.dims.d_a, pt.dims.d_b
    mapping = [0] * (d_a * d_b)
    out = np.empty_like(pt.p)
    for i in range(d_a):
        order = np.argsort(-pt.p[i, :], kind="stable")
        for rank, src in enumerate(order):
            out[i, rank] = pt.p[i, src]
            mapping[i * d_b + int(src)] = i * d_b + rank
    return Permutation(tuple(mapping)), ProbabilityTableau(pt.dims, out)


class CanonicalizationResult(NamedTuple):
    row_perm: Permutation
    col_perm: Permutation
    tableau: ProbabilityTableau
    passes: int


def canonicalize_decreasing(pt: ProbabilityTableau) -> CanonicalizationResult:
    """Alternate tau_A / tau_B passes until the grid is a decreasing matrix.

    Returns the composed within-column permutation, the composed within-row
    permutation, the fixed point, and the pass count: matrix-changing sorting
    passes plus the final verification pass (an already-decreasing input
    reports 1). Sorting columns and then rows always lands on a decreasing
    matrix, so the output equals ``col_perm`` applied after ``row_perm``; the
    loop still guards against non-termination with a hard cap.
    """
    n = pt.dims.total
    cap = 10 * n
    row_perm = Permutation.identity(n)
    col_perm = Permutation.identity(n)
    current = pt
    passes = 0
    attempts = 0
    sort_columns_next = True
    while not is_decreasing(current):
        attempts += 1
        if attempts > cap:
            raise CanonicalizationError(
                f"no decreasing matrix after {cap} passes for dims {pt.dims}"
            )
        if sort_columns_next:
            perm, current = sort_within_columns(current)
            row_perm = perm.compose_after(row_perm)
        else:
            perm, current = sort_within_rows(current)
            col_perm = perm.compose_after(col_perm)
        if not perm.is_identity():
            passes += 1
        sort_columns_next = not sort_columns_next
    return CanonicalizationResult(row_perm, col_perm, current, passes + 1)
