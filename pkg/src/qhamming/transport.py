"""Exact discrete optimal transport.

``solve_ot`` is a transportation simplex (north-west corner start, Bland's
rule for both entering and leaving cells).  ``brute_force_ot`` enumerates the
basic feasible solutions of small instances, one per spanning tree of the
bipartite graph, and shares no code with the simplex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    CertificationError,
    DegenerateCycle,
    InfeasibleMarginals,
    SizeMismatch,
    TooLarge,
)

MARGINAL_TOL = 1e-10
PLAN_TOL = 1e-8
REDUCED_COST_EPS = 1e-12
CERT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TransportPlan:
    plan: np.ndarray
    row_potentials: np.ndarray
    col_potentials: np.ndarray
    cs_residual: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.plan.shape

    def cost(self, c: np.ndarray) -> float:
        return float(np.sum(self.plan * c))

    def marginal_residual(self, mu, nu) -> float:
        return float(
            max(
                np.max(np.abs(self.plan.sum(axis=1) - mu)),
                np.max(np.abs(self.plan.sum(axis=0) - nu)),
            )
        )


def _prepare(mu, nu, c):
    mu = np.asarray(mu, dtype=float).ravel()
    nu = np.asarray(nu, dtype=float).ravel()
    c = np.asarray(c, dtype=float)
    if c.shape != (mu.size, nu.size):
        raise SizeMismatch(f"cost shape {c.shape} vs marginals {mu.size}x{nu.size}")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost entries must be finite")
    if np.any(mu < -MARGINAL_TOL) or np.any(nu < -MARGINAL_TOL):
        raise InfeasibleMarginals("negative marginal weight")
    if abs(mu.sum() - 1.0) > MARGINAL_TOL or abs(nu.sum() - 1.0) > MARGINAL_TOL:
        raise InfeasibleMarginals(
            f"marginals must each sum to 1 (got {mu.sum():.12g} and {nu.sum():.12g})"
        )
    mu = np.clip(mu, 0.0, None)
    nu = np.clip(nu, 0.0, None)
    return mu / mu.sum(), nu / nu.sum(), c


def _northwest_corner(mu, nu):
    m, k = mu.size, nu.size
    x = np.zeros((m, k))
    basis = []
    s, d = mu.copy(), nu.copy()
    i = j = 0
    while True:
        amt = min(s[i], d[j])
        x[i, j] = amt
        basis.append((i, j))
        s[i] -= amt
        d[j] -= amt
        if i == m - 1 and j == k - 1:
            break
        if j == k - 1 or (i < m - 1 and s[i] <= d[j]):
            i += 1
        else:
            j += 1
    return x, basis


def _potentials(c, basis, m, k):
    u = np.full(m, np.nan)
    v = np.full(k, np.nan)
    adj_r = [[] for _ in range(m)]
    adj_c = [[] for _ in range(k)]
    for i, j in basis:
        adj_r[i].append(j)
        adj_c[j].append(i)
    u[0] = 0.0
    stack = [("r", 0)]
    while stack:
        kind, idx = stack.pop()
        if kind == "r":
            for j in adj_r[idx]:
                if np.isnan(v[j]):
                    v[j] = c[idx, j] - u[idx]
                    stack.append(("c", j))
        else:
            for i in adj_c[idx]:
                if np.isnan(u[i]):
                    u[i] = c[i, idx] - v[idx]
                    stack.append(("r", i))
    return u, v


def _cycle(basis, m, k, enter):
    """Cells of the pivot cycle, starting with the entering cell (sign +)."""
    i0, j0 = enter
    # tree nodes: rows 0..m-1, columns m..m+k-1
    adj = [[] for _ in range(m + k)]
    for i, j in basis:
        adj[i].append(m + j)
        adj[m + j].append(i)
    parent = {i0: None}
    stack = [i0]
    target = m + j0
    while stack:
        node = stack.pop()
        if node == target:
            break
        for nb in adj[node]:
            if nb not in parent:
                parent[nb] = node
                stack.append(nb)
    path = [target]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()  # row i0 ... col j0
    cells = [(i0, j0)]
    for a, b in zip(path[:-1], path[1:]):
        cells.append((a, b - m) if a < m else (b, a - m))
    return cells


def solve_ot(mu, nu, c, max_iter: int | None = None) -> tuple[TransportPlan, float]:
    """Optimal plan and cost of ``min <plan, c>`` over couplings of ``mu`` and ``nu``."""
    mu, nu, c = _prepare(mu, nu, c)
    m, k = mu.size, nu.size
    x, basis = _northwest_corner(mu, nu)
    basic = np.zeros((m, k), dtype=bool)
    for cell in basis:
        basic[cell] = True
    if max_iter is None:
        max_iter = 50 * (m * k + 10)
    for _ in range(max_iter):
        u, v = _potentials(c, basis, m, k)
        r = c - u[:, None] - v[None, :]
        candidates = np.flatnonzero(((r < -REDUCED_COST_EPS) & ~basic).ravel())
        if candidates.size == 0:
            break
        enter = divmod(int(candidates[0]), k)
        cells = _cycle(basis, m, k, enter)
        minus = cells[1::2]
        theta = min(x[cell] for cell in minus)
        leave = min(cell for cell in minus if x[cell] == theta)
        for t, cell in enumerate(cells):
            x[cell] += theta if t % 2 == 0 else -theta
        x[leave] = 0.0
        basis[basis.index(leave)] = enter
        basic[leave] = False
        basic[enter] = True
    else:
        raise DegenerateCycle(f"no optimum after {max_iter} pivots")

    x = np.clip(x, 0.0, None)
    cost = float(np.sum(x * c))
    dual = float(u @ mu + v @ nu)
    r = c - u[:, None] - v[None, :]
    residual = max(
        max(0.0, -float(r.min())),
        float(np.sum(x * np.abs(r))),
        abs(cost - dual),
    )
    plan = TransportPlan(x, u, v, residual)
    if residual > CERT_TOL or plan.marginal_residual(mu, nu) > PLAN_TOL:
        raise CertificationError(f"optimality certificate failed: residual {residual:.3e}")
    return plan, cost


@lru_cache(maxsize=None)
def _tree_solvers(m: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Edge lists and solve matrices for every spanning tree of K_{m,k}."""
    edges = [(i, j) for i in range(m) for j in range(k)]
    trees, solvers = [], []
    for combo in itertools.combinations(range(len(edges)), m + k - 1):
        root = list(range(m + k))

        def find(a):
            while root[a] != a:
                root[a] = root[root[a]]
                a = root[a]
            return a

        ok = True
        for e in combo:
            i, j = edges[e]
            ra, rb = find(i), find(m + j)
            if ra == rb:
                ok = False
                break
            root[ra] = rb
        if not ok:
            continue
        a = np.zeros((m + k, m + k - 1))
        for col, e in enumerate(combo):
            i, j = edges[e]
            a[i, col] = 1.0
            a[m + j, col] = 1.0
        trees.append(combo)
        solvers.append(np.linalg.pinv(a))
    return np.array(trees, dtype=int), np.array(solvers)


def brute_force_ot(mu, nu, c) -> float:
    """Minimum cost over all vertices of the transportation polytope (m, k <= 4)."""
    mu = np.asarray(mu, dtype=float).ravel()
    nu = np.asarray(nu, dtype=float).ravel()
    c = np.asarray(c, dtype=float)
    m, k = mu.size, nu.size
    if m > 4 or k > 4:
        raise TooLarge(f"brute force limited to 4x4, got {m}x{k}")
    if c.shape != (m, k):
        raise SizeMismatch(f"cost shape {c.shape} vs marginals {m}x{k}")
    if abs(mu.sum() - nu.sum()) > MARGINAL_TOL:
        raise InfeasibleMarginals("marginal masses differ")
    trees, solvers = _tree_solvers(m, k)
    b = np.concatenate([mu, nu])
    vals = solvers @ b  # (ntrees, m+k-1)
    feasible = np.all(vals >= -1e-12, axis=1)
    costs = np.sum(vals * c.ravel()[trees], axis=1)
    return float(costs[feasible].min())


def hamming(sigma: Sequence[int], sigma2: Sequence[int]) -> float:
    """Normalized Hamming distance ``|{i : sigma(i) != sigma2(i)}| / n``."""
    if len(sigma) != len(sigma2):
        raise SizeMismatch(f"n={len(sigma)} vs n={len(sigma2)}")
    n = len(sigma)
    return sum(1 for a, b in zip(sigma, sigma2) if a != b) / n


def classical_w1(
    mu1: Sequence[tuple[float, Sequence[int]]],
    mu2: Sequence[tuple[float, Sequence[int]]],
) -> float:
    """W1 between measures on S_n given as ``(weight, permutation)`` lists, cost ``hamming``."""
    w1 = np.array([w for w, _ in mu1], dtype=float)
    w2 = np.array([w for w, _ in mu2], dtype=float)
    cost = np.array([[hamming(s, t) for _, t in mu2] for _, s in mu1])
    _, value = solve_ot(w1 / w1.sum(), w2 / w2.sum(), cost)
    return value


def wasserstein(mu, nu, xs, ys, metric, power: int = 1) -> float:
    """``W_p^p`` between discrete measures on points ``xs`` and ``ys``.

    With ``power=2`` the return value is the squared distance, no root taken.
    """
    cost = np.array([[metric(x, y) ** power for y in ys] for x in xs])
    _, value = solve_ot(mu, nu, cost)
    return value
