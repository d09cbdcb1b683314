"""Magic unitaries: finite-dimensional representations of C(S_n^+).

A :class:`MagicUnitary` stores its grid as one ``(n, n, d, d)`` complex array;
``grid[i, j]`` is the projection representing the generator ``u_ij``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    DimensionOverflow,
    InvalidPermutation,
    ParseError,
    SizeMismatch,
    ValidationFailure,
)

MAGIC_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MagicUnitary:
    grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=complex)
        if g.ndim != 4 or g.shape[0] != g.shape[1] or g.shape[2] != g.shape[3]:
            raise ValueError(f"grid must have shape (n, n, d, d), got {g.shape}")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def n(self) -> int:
        return self.grid.shape[0]

    @property
    def d(self) -> int:
        return self.grid.shape[2]

    def omega(self) -> np.ndarray:
        """Table of normalized traces ``tr_d(grid[i, j])``."""
        return np.trace(self.grid, axis1=2, axis2=3).real / self.d

    def is_scalar(self, tol: float = 1e-8) -> bool:
        """True when every cell is a scalar multiple of the identity."""
        diag = np.einsum("ijkk->ijk", self.grid)
        off = self.grid - diag[..., None] * np.eye(self.d)
        return bool(
            np.max(np.abs(off), initial=0.0) <= tol
            and np.max(np.abs(diag - diag[..., :1]), initial=0.0) <= tol
        )

    def same_as(self, other: "MagicUnitary", tol: float = 1e-10) -> bool:
        return self.grid.shape == other.grid.shape and bool(
            np.max(np.abs(self.grid - other.grid)) <= tol
        )

    def __repr__(self) -> str:
        return f"MagicUnitary(n={self.n}, d={self.d})"


@dataclass
class ValidationReport:
    n: int
    d: int
    projection_residuals: np.ndarray
    row_residuals: np.ndarray
    col_residuals: np.ndarray
    tol: float = MAGIC_TOL
    messages: list[str] = field(default_factory=list)

    @property
    def worst_projection(self) -> float:
        return float(np.max(self.projection_residuals, initial=0.0))

    @property
    def worst_row(self) -> float:
        return float(np.max(self.row_residuals, initial=0.0))

    @property
    def worst_col(self) -> float:
        return float(np.max(self.col_residuals, initial=0.0))

    @property
    def worst(self) -> float:
        return max(self.worst_projection, self.worst_row, self.worst_col)

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [
            f"{status} n={self.n} d={self.d}",
            f"  worst projection residual: {self.worst_projection:.3e}",
            f"  worst row-sum residual:    {self.worst_row:.3e}",
            f"  worst column-sum residual: {self.worst_col:.3e}",
        ]
        if not self.passed:
            bad = np.argwhere(self.projection_residuals > self.tol)
            for i, j in bad:
                lines.append(
                    f"  cell ({i},{j}) not a projection: {self.projection_residuals[i, j]:.3e}"
                )
            for i in np.flatnonzero(self.row_residuals > self.tol):
                lines.append(f"  row {i} sum residual {self.row_residuals[i]:.3e}")
            for j in np.flatnonzero(self.col_residuals > self.tol):
                lines.append(f"  column {j} sum residual {self.col_residuals[j]:.3e}")
        lines.extend(f"  {m}" for m in self.messages)
        return "\n".join(lines)


def validate(m: MagicUnitary, tol: float = MAGIC_TOL) -> ValidationReport:
    n, d = m.n, m.d
    g = m.grid
    proj = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            proj[i, j] = linalg.projection_residual(g[i, j])
    one = np.eye(d)
    rows = np.array([np.max(np.abs(g[i].sum(axis=0) - one)) for i in range(n)])
    cols = np.array([np.max(np.abs(g[:, j].sum(axis=0) - one)) for j in range(n)])
    return ValidationReport(n, d, proj, rows, cols, tol=tol)


def _check_dim(d: int, cap: int):
    if d > cap:
        raise DimensionOverflow(f"representation dimension {d} exceeds cap {cap}")


def check_permutation(sigma: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    s = tuple(int(x) for x in sigma)
    if n is not None and len(s) != n:
        raise InvalidPermutation(f"expected {n} images, got {len(s)}")
    if sorted(s) != list(range(len(s))):
        raise InvalidPermutation(f"{list(sigma)} is not a bijection of 0..{len(s) - 1}")
    return s


def from_permutation(n: int, sigma: Sequence[int]) -> MagicUnitary:
    """The d=1 representation ``u_ij -> [sigma(i) == j]`` (0-based images)."""
    s = check_permutation(sigma, n)
    g = np.zeros((n, n, 1, 1), dtype=complex)
    for i, j in enumerate(s):
        g[i, j, 0, 0] = 1.0
    return MagicUnitary(g)


def two_block(p: np.ndarray, q: np.ndarray) -> MagicUnitary:
    """The n=4 magic unitary [[p, 1-p, 0, 0], [1-p, p, 0, 0], [0, 0, q, 1-q], [0, 0, 1-q, q]]."""
    p = linalg.as_projection(p)
    q = linalg.as_projection(q)
    if p.shape != q.shape:
        raise DimensionMismatch(f"p has shape {p.shape}, q has {q.shape}")
    d = p.shape[0]
    one = np.eye(d)
    g = np.zeros((4, 4, d, d), dtype=complex)
    g[0, 0] = g[1, 1] = p
    g[0, 1] = g[1, 0] = one - p
    g[2, 2] = g[3, 3] = q
    g[2, 3] = g[3, 2] = one - q
    return MagicUnitary(g)


def conjugate(m: MagicUnitary, u: np.ndarray) -> MagicUnitary:
    u = linalg.check_unitary(u)
    if u.shape[0] != m.d:
        raise DimensionMismatch(f"unitary of dim {u.shape[0]} for representation of dim {m.d}")
    g = u @ m.grid @ u.conj().T
    return MagicUnitary(g)


def direct_sum(a: MagicUnitary, b: MagicUnitary, cap: int = linalg.DIM_CAP) -> MagicUnitary:
    if a.n != b.n:
        raise SizeMismatch(f"n={a.n} vs n={b.n}")
    _check_dim(a.d + b.d, cap)
    n, da = a.n, a.d
    g = np.zeros((n, n, da + b.d, da + b.d), dtype=complex)
    g[:, :, :da, :da] = a.grid
    g[:, :, da:, da:] = b.grid
    return MagicUnitary(g)


def convolve(a: MagicUnitary, b: MagicUnitary, cap: int = linalg.DIM_CAP) -> MagicUnitary:
    """Representation ``(rep_a (x) rep_b) o Delta``: cell ij is sum_k a[i,k] (x) b[k,j]."""
    if a.n != b.n:
        raise SizeMismatch(f"n={a.n} vs n={b.n}")
    d = a.d * b.d
    _check_dim(d, cap)
    # einsum over k: (i k p q) (k j r s) -> (i j p r q s)
    g = np.einsum("ikpq,kjrs->ijprqs", a.grid, b.grid).reshape(a.n, a.n, d, d)
    return MagicUnitary(g)


def tensor_identity(m: MagicUnitary, d_right: int, cap: int = linalg.DIM_CAP) -> MagicUnitary:
    """Cells ``grid[i, j] (x) 1_{d_right}``."""
    _check_dim(m.d * d_right, cap)
    g = np.einsum("ijpq,rs->ijprqs", m.grid, np.eye(d_right))
    return MagicUnitary(g.reshape(m.n, m.n, m.d * d_right, m.d * d_right))


def identity_tensor(d_left: int, m: MagicUnitary, cap: int = linalg.DIM_CAP) -> MagicUnitary:
    """Cells ``1_{d_left} (x) grid[i, j]``."""
    _check_dim(d_left * m.d, cap)
    g = np.einsum("pq,ijrs->ijprqs", np.eye(d_left), m.grid)
    return MagicUnitary(g.reshape(m.n, m.n, d_left * m.d, d_left * m.d))


def relabel(m: MagicUnitary, rows: Sequence[int], cols: Sequence[int]) -> MagicUnitary:
    """Permute rows and columns: new ``grid[i, j] = grid[rows[i], cols[j]]``."""
    r = check_permutation(rows, m.n)
    c = check_permutation(cols, m.n)
    return MagicUnitary(m.grid[np.ix_(r, c)])


def extend(m: MagicUnitary, n_new: int) -> MagicUnitary:
    """Embed into a larger n by appending fixed points ``u_kk = 1`` for k >= m.n."""
    if n_new < m.n:
        raise SizeMismatch(f"cannot shrink n={m.n} to {n_new}")
    g = np.zeros((n_new, n_new, m.d, m.d), dtype=complex)
    g[: m.n, : m.n] = m.grid
    for k in range(m.n, n_new):
        g[k, k] = np.eye(m.d)
    return MagicUnitary(g)


def classical_permutation(m: MagicUnitary, tol: float = 1e-8) -> tuple[int, ...] | None:
    """The permutation a scalar 0/1 representation factors through, else None."""
    if not m.is_scalar(tol):
        return None
    om = m.omega()
    if np.max(np.minimum(np.abs(om), np.abs(om - 1.0))) > tol:
        return None
    sigma = tuple(int(j) for j in np.argmax(om, axis=1))
    if sorted(sigma) != list(range(m.n)):
        return None
    return sigma


# -- serialization ---------------------------------------------------------


def to_json_obj(m: MagicUnitary) -> dict:
    grid = [
        [
            [[[float(z.real), float(z.imag)] for z in row] for row in m.grid[i, j]]
            for j in range(m.n)
        ]
        for i in range(m.n)
    ]
    return {"n": m.n, "d": m.d, "grid": grid}


def from_json_obj(obj: dict, check: bool = True) -> MagicUnitary:
    try:
        n, d = int(obj["n"]), int(obj["d"])
        arr = np.asarray(obj["grid"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed magic unitary: {exc}") from exc
    if arr.shape != (n, n, d, d, 2):
        raise ParseError(f"grid shape {arr.shape} does not match n={n}, d={d}")
    m = MagicUnitary(arr[..., 0] + 1j * arr[..., 1])
    if check:
        report = validate(m)
        if not report.passed:
            raise ValidationFailure(report.summary())
    return m


def dumps(m: MagicUnitary) -> str:
    return json.dumps(to_json_obj(m))


def loads(text: str, check: bool = True) -> MagicUnitary:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    return from_json_obj(obj, check=check)
