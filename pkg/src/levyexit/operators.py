"""Discretized generator and quasi-potential on multi-interval domains.

The truncated generator acts on functions supported on a finite union of
closed intervals and killed outside it.  It is discretized in the exact
first-derivative sandwich form

    L = D_out S D_in,

where ``D_in`` takes node values to forward differences at midpoints (with
exterior-zero boundary values), ``S`` is the Nystrom matrix of the
convolution operator at midpoints (diffusion on the diagonal, exact kernel
cell averages elsewhere), and ``D_out = -D_in^T`` takes midpoint values to
backward differences at the interior nodes.  The quasi-potential matrix
``B = (-L)^{-1}`` then carries exit-problem quantities: row sums give mean
exit times and cumulative row sums discretize the exit-position measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from .kernels import KernelTable, TableCoverageError

__all__ = [
    "Domain",
    "Grid",
    "OperatorSet",
    "build_grid",
    "assemble_S",
    "assemble_generator",
    "quasipotential",
    "build_operator_set",
]


@dataclass(frozen=True)
class Domain:
    """Ordered finite union of disjoint open intervals (a_k, b_k)."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.intervals) == 0:
            raise ValueError("domain needs at least one interval")
        flat: list[float] = []
        for pair in self.intervals:
            if len(pair) != 2:
                raise ValueError(f"interval must be a pair, got {pair!r}")
            flat.extend(pair)
        if any(not math.isfinite(v) for v in flat):
            raise ValueError(f"interval endpoints must be finite, got {self.intervals!r}")
        if any(flat[i] >= flat[i + 1] for i in range(len(flat) - 1)):
            raise ValueError(
                f"intervals must be disjoint and strictly increasing, got {self.intervals!r}"
            )

    @property
    def diameter(self) -> float:
        return self.intervals[-1][1] - self.intervals[0][0]

    def contains(self, x: float) -> bool:
        """Closed-hull membership; endpoints count (``locate`` flags them)."""
        return any(a <= x <= b for a, b in self.intervals)


@dataclass(frozen=True)
class Grid:
    """Staggered grid: uniform nodes per interval with interleaved midpoints.

    ``nodes`` concatenates the per-interval nodes including endpoints;
    endpoints are flagged in ``is_boundary`` and carry the zero-Dirichlet
    (exterior-zero) condition.  Unknown vectors live on the interior nodes
    only.  ``weights`` holds the quadrature weight of each interior node
    (the interval step), realizing sum(w*f*g) as the grid inner product.
    """

    domain: Domain
    nodes: np.ndarray
    is_boundary: np.ndarray
    midpoints: np.ndarray
    steps: tuple[float, ...]
    node_slices: tuple[slice, ...]  # interior-node block per interval
    mid_slices: tuple[slice, ...]  # midpoint block per interval

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[~self.is_boundary]

    @property
    def n_interior(self) -> int:
        return int(np.sum(~self.is_boundary))

    @property
    def weights(self) -> np.ndarray:
        w = np.empty(self.n_interior)
        for sl, h in zip(self.node_slices, self.steps):
            w[sl] = h
        return w

    def locate(self, x: float) -> tuple[str, int]:
        """Classify a point: ('interior', nearest interior index) or ('boundary', -1).

        Points not inside the closed domain raise ValueError.  A point
        closer to an interval endpoint than half a step counts as boundary.
        """
        for (a, b), sl, h in zip(self.domain.intervals, self.node_slices, self.steps):
            if a <= x <= b:
                if x - a < 0.5 * h or b - x < 0.5 * h:
                    return ("boundary", -1)
                inner = self.interior_nodes[sl]
                return ("interior", sl.start + int(np.argmin(np.abs(inner - x))))
        raise ValueError(f"point {x!r} lies outside the domain {self.domain.intervals!r}")


def build_grid(domain: Domain, resolution: float) -> Grid:
    """Uniform staggered grid with ``resolution`` nodes per unit length.

    Each interval of length ell gets round(ell*resolution)+1 nodes
    (endpoints included, flagged as boundary).  Fails if the resolution is
    below 16 or any interval would keep fewer than 4 interior nodes.
    """
    if resolution < 16:
        raise ValueError(f"resolution must be at least 16 nodes per unit length, got {resolution}")
    nodes_parts: list[np.ndarray] = []
    boundary_parts: list[np.ndarray] = []
    mid_parts: list[np.ndarray] = []
    steps: list[float] = []
    node_slices: list[slice] = []
    mid_slices: list[slice] = []
    int_pos = 0
    mid_pos = 0
    for a, b in domain.intervals:
        n_nodes = int(round((b - a) * resolution)) + 1
        if n_nodes - 2 < 4:
            raise ValueError(
                f"interval ({a}, {b}) gets only {max(n_nodes - 2, 0)} interior nodes "
                f"at resolution {resolution}; need at least 4"
            )
        pts = np.linspace(a, b, n_nodes)
        flags = np.zeros(n_nodes, dtype=bool)
        flags[0] = flags[-1] = True
        nodes_parts.append(pts)
        boundary_parts.append(flags)
        mid_parts.append(0.5 * (pts[:-1] + pts[1:]))
        steps.append((b - a) / (n_nodes - 1))
        node_slices.append(slice(int_pos, int_pos + n_nodes - 2))
        mid_slices.append(slice(mid_pos, mid_pos + n_nodes - 1))
        int_pos += n_nodes - 2
        mid_pos += n_nodes - 1
    return Grid(
        domain=domain,
        nodes=np.concatenate(nodes_parts),
        is_boundary=np.concatenate(boundary_parts),
        midpoints=np.concatenate(mid_parts),
        steps=tuple(steps),
        node_slices=tuple(node_slices),
        mid_slices=tuple(mid_slices),
    )


def _cell_averages(table: KernelTable, offsets: np.ndarray, width: float) -> np.ndarray:
    """Average of K_tot over width-``width`` cells at the given centers."""
    if abs(width - table.step) <= 1e-12 * table.step:
        return table.average_over(offsets)
    if table.integral is None:
        raise TableCoverageError(
            f"kernel table step {table.step} does not match grid step {width} "
            "and the table has no exact evaluator (loaded from CSV?)"
        )
    offsets = np.asarray(offsets, float)
    return np.asarray(table.integral(offsets - 0.5 * width, offsets + 0.5 * width)) / width


def assemble_S(grid: Grid, kernel_table: KernelTable, A: float) -> np.ndarray:
    """Nystrom matrix of the convolution operator at the grid midpoints.

    ``S[i, j] = (A/2) delta_ij + h_j * avg(K_tot over the width-h_j cell
    centered at m_j - m_i)`` (source minus target, the orientation pinned
    by the drift and single-atom operator identities), including the blocks
    coupling different intervals.  Within an interval the block is Toeplitz
    and each distinct lag is evaluated once; cross-interval blocks with
    matching steps are evaluated once per diagonal.
    """
    n_mid = len(grid.midpoints)
    S = np.zeros((n_mid, n_mid))
    n_iv = len(grid.steps)
    for q in range(n_iv):
        hq = grid.steps[q]
        mq = grid.mid_slices[q]
        nq = mq.stop - mq.start
        for p in range(n_iv):
            hp = grid.steps[p]
            mp = grid.mid_slices[p]
            np_ = mp.stop - mp.start
            if p == q:
                lags = np.arange(-(nq - 1), nq) * hq
                vals = _cell_averages(kernel_table, lags, hq)
                idx = (np.arange(nq)[None, :] - np.arange(nq)[:, None]) + (nq - 1)
                S[mp, mq] = hq * vals[idx]
            elif abs(hp - hq) <= 1e-12 * hq:
                base = grid.midpoints[mq.start] - grid.midpoints[mp.start]
                lags = base + np.arange(-(np_ - 1), nq) * hq
                vals = _cell_averages(kernel_table, lags, hq)
                idx = (np.arange(nq)[None, :] - np.arange(np_)[:, None]) + (np_ - 1)
                S[mp, mq] = hq * vals[idx]
            else:
                offs = grid.midpoints[mq][None, :] - grid.midpoints[mp][:, None]
                vals = _cell_averages(kernel_table, offs.ravel(), hq).reshape(offs.shape)
                S[mp, mq] = hq * vals
    S[np.diag_indices_from(S)] += 0.5 * A
    return S


def assemble_generator(grid: Grid, S: np.ndarray) -> np.ndarray:
    """Truncated generator L = D_out S D_in on the interior nodes.

    ``D_in`` is the forward difference from node values (exterior-zero) to
    midpoints; ``D_out = -D_in^T`` is the backward difference back to the
    interior nodes.  Both are applied by slicing, never materialized.
    """
    n_int = grid.n_interior
    sd = np.empty((len(grid.midpoints), n_int))
    for ns, ms, h in zip(grid.node_slices, grid.mid_slices, grid.steps):
        # (S D_in)[:, node j] = (S[:, mid j] - S[:, mid j+1]) / h
        sd[:, ns] = (S[:, ms][:, :-1] - S[:, ms][:, 1:]) / h
    L = np.empty((n_int, n_int))
    for ns, ms, h in zip(grid.node_slices, grid.mid_slices, grid.steps):
        # (D_out M)[node j, :] = -(M[mid j, :] - M[mid j+1, :]) / h
        L[ns, :] = -(sd[ms, :][:-1, :] - sd[ms, :][1:, :]) / h
    return L


@dataclass(frozen=True)
class OperatorSet:
    """Assembled matrices of one discretized exit problem."""

    grid: Grid
    S_mid: np.ndarray
    L: np.ndarray
    B: np.ndarray
    phi_rows: np.ndarray
    residual: float
    rcond: float


def quasipotential(
    L: np.ndarray,
    *,
    residual_tol: float = 1e-10,
    positivity_tol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Invert -L by dense LU with partial pivoting and verify the result.

    Returns ``(B, phi_rows, residual, rcond)`` where ``phi_rows`` holds the
    cumulative row sums of B (the discrete exit-position distribution along
    each row) and ``residual = max|(-L)B - I|``.  One multiplicative Newton
    refinement pass is applied if the direct solve misses ``residual_tol``.

    Raises
    ------
    RuntimeError
        "generator not invertible on grid" when the reciprocal condition
        estimate falls below 1e-14, or when the residual / entrywise
        nonnegativity post-checks fail.
    """
    neg_l = -np.asarray(L, float)
    n = neg_l.shape[0]
    anorm = np.linalg.norm(neg_l, 1)
    lu, piv = lu_factor(neg_l)
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond < 1e-14:
        raise RuntimeError(
            f"generator not invertible on grid (reciprocal condition {rcond:.3e})"
        )
    eye = np.eye(n)
    B = lu_solve((lu, piv), eye)
    residual = float(np.max(np.abs(neg_l @ B - eye)))
    if residual > residual_tol:
        B = B + B @ (eye - neg_l @ B)
        residual = float(np.max(np.abs(neg_l @ B - eye)))
    if residual > residual_tol:
        raise RuntimeError(
            f"quasi-potential residual {residual:.3e} exceeds {residual_tol:.1e} "
            "after refinement"
        )
    max_entry = float(np.max(B))
    min_entry = float(np.min(B))
    if min_entry < -positivity_tol * max(max_entry, 1e-300):
        raise RuntimeError(
            f"quasi-potential has negative entries (min {min_entry:.3e}, "
            f"max {max_entry:.3e})"
        )
    phi_rows = np.cumsum(B, axis=1)
    return B, phi_rows, residual, rcond


def build_operator_set(
    grid: Grid,
    kernel_table: KernelTable,
    A: float,
) -> OperatorSet:
    """Assemble S, L and the quasi-potential for one grid/kernel pairing."""
    S = assemble_S(grid, kernel_table, A)
    L = assemble_generator(grid, S)
    B, phi_rows, residual, rcond = quasipotential(L)
    return OperatorSet(
        grid=grid, S_mid=S, L=L, B=B, phi_rows=phi_rows, residual=residual, rcond=rcond
    )
