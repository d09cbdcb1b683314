"""Dense Hermitian linear algebra and the projection lattice.

Matrices are plain complex ``numpy`` arrays.  ``as_hermitian`` and
``as_projection`` are the validating entry points; everything else assumes
its inputs already passed them.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionOverflow,
    EigenFailure,
    NotHermitian,
    NotProjection,
    NotUnitary,
)

DIM_CAP = 4096

HERMITIAN_TOL = 1e-10
PROJECTION_TOL = 1e-8
UNITARY_TOL = 1e-10
# eigenvalues of a projection sit near 0 or 1; cut halfway
RANK_CUT = 0.5
# singular values of Up^H Uq at least this close to 1 count as shared directions
MEET_SV_CUT = 1.0 - 1e-9


def as_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise NotHermitian(f"hermiticity deviation {dev:.3e} exceeds {tol:.1e}")
    return a


def projection_residual(m: np.ndarray) -> float:
    """Worst of the idempotence and hermiticity residuals (max-entry norm)."""
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(max(np.max(np.abs(a @ a - a)), np.max(np.abs(a - a.conj().T))))


def as_projection(m, tol: float = PROJECTION_TOL) -> np.ndarray:
    a = as_hermitian(m, tol=max(tol, HERMITIAN_TOL))
    res = projection_residual(a)
    if res > tol:
        raise NotProjection(f"projection residual {res:.3e} exceeds {tol:.1e}")
    return a


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    a = np.asarray(u, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))
    if dev > tol:
        raise NotUnitary(f"unitarity deviation {dev:.3e} exceeds {tol:.1e}")
    return a


def _eigh(m: np.ndarray):
    try:
        return np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def _eigvalsh(m: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def normalized_trace(m) -> float:
    a = np.asarray(m)
    return float(np.trace(a).real / a.shape[0])


def trace_norm(m) -> float:
    """Normalized trace of ``|m|``, i.e. the L1 norm for the normalized trace."""
    a = np.asarray(m, dtype=complex)
    return float(np.sum(np.abs(_eigvalsh(a))) / a.shape[0])


def hs_norm_sq(m) -> float:
    """Normalized squared Hilbert-Schmidt norm ``tr(m^* m) / dim``."""
    a = np.asarray(m)
    return float(np.sum(np.abs(a) ** 2) / a.shape[0])


def min_eigenvalue(m) -> float:
    a = np.asarray(m, dtype=complex)
    return float(_eigvalsh(a)[0])


def range_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the range of the projection ``p``."""
    w, v = _eigh(p)
    return v[:, w > RANK_CUT]


def rank(p: np.ndarray) -> int:
    return int(np.sum(_eigvalsh(p) > RANK_CUT))


def principal_cosines(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Cosines of the principal angles between the ranges of ``p`` and ``q``."""
    up, uq = range_basis(p), range_basis(q)
    if up.shape[1] == 0 or uq.shape[1] == 0:
        return np.zeros(0)
    return np.linalg.svd(up.conj().T @ uq, compute_uv=False)


def meet(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Projection onto ``Ran(p) & Ran(q)``."""
    if p.shape != q.shape:
        raise DimensionMismatch(f"{p.shape} vs {q.shape}")
    d = p.shape[0]
    up, uq = range_basis(p), range_basis(q)
    if up.shape[1] == 0 or uq.shape[1] == 0:
        return np.zeros((d, d), dtype=complex)
    try:
        a, s, _ = np.linalg.svd(up.conj().T @ uq)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    keep = s >= MEET_SV_CUT
    v = up @ a[:, : len(s)][:, keep]
    return v @ v.conj().T


def join(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    one = np.eye(p.shape[0])
    return one - meet(one - p, one - q)


def pqp_power(p: np.ndarray, q: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(p @ q @ p, k)


def meet_by_iteration(
    p: np.ndarray,
    q: np.ndarray,
    k0: int = 256,
    tol: float = 1e-10,
    max_doublings: int = 32,
) -> tuple[np.ndarray, int]:
    """Approximate ``p & q`` as a high power of ``pqp``.

    Starts at ``(pqp)^k0`` and keeps squaring until two consecutive iterates
    agree to ``tol`` entrywise, or to the rounding floor reached at that
    exponent when it is larger.  Returns the iterate and the exponent reached.
    Independent of :func:`meet`; used only as a cross-check.
    """
    x = pqp_power(p, q, k0)
    k = k0
    eps = np.finfo(float).eps * max(1, p.shape[0])
    for _ in range(max_doublings):
        y = x @ x
        y = 0.5 * (y + y.conj().T)
        k *= 2
        # rounding on the unit eigenvalues grows about linearly in k
        if np.max(np.abs(y - x)) <= max(tol, 64 * k * eps):
            return y, k
        x = y
    return x, k


def kron(a: np.ndarray, b: np.ndarray, cap: int = DIM_CAP) -> np.ndarray:
    dim = a.shape[0] * b.shape[0]
    if dim > cap:
        raise DimensionOverflow(f"product dimension {dim} exceeds cap {cap}")
    return np.kron(a, b)


def block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    da, db = a.shape[0], b.shape[0]
    out = np.zeros((da + db, da + db), dtype=complex)
    out[:da, :da] = a
    out[da:, da:] = b
    return out


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    qm, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return qm * ph


def random_projection(rng: np.random.Generator, d: int, r: int | None = None) -> np.ndarray:
    """Haar-random projection of rank ``r`` (uniform in ``0..d`` when omitted)."""
    if r is None:
        r = int(rng.integers(0, d + 1))
    u = haar_unitary(rng, d)[:, :r]
    return u @ u.conj().T


def projection_onto(vectors: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the column span of ``vectors``."""
    v = np.asarray(vectors, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    qm, s, _ = np.linalg.svd(v, full_matrices=False)
    qm = qm[:, s > 1e-12 * max(1.0, s.max(initial=0.0))]
    return qm @ qm.conj().T
