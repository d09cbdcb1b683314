import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhamming import corpus, linalg
from qhamming.errors import DimensionOverflow, NotHermitian, NotProjection, NotUnitary


def test_normalized_trace_examples():
    assert linalg.normalized_trace(np.eye(3)) == 1.0
    assert linalg.normalized_trace(np.zeros((5, 5))) == 0.0
    assert linalg.normalized_trace(np.diag([1, 1, 0])) == pytest.approx(2 / 3)


def test_trace_norm_examples(rng):
    assert linalg.trace_norm(np.diag([1.0, -1.0])) == pytest.approx(1.0)
    assert linalg.trace_norm(np.diag([0.6, -0.2, 0.0])) == pytest.approx(0.8 / 3)
    p = linalg.random_projection(rng, 5, 2)
    assert linalg.trace_norm(p) == pytest.approx(linalg.normalized_trace(p))


def test_min_eigenvalue_examples(rng):
    assert linalg.min_eigenvalue(np.eye(4)) == pytest.approx(1.0)
    assert linalg.min_eigenvalue(np.diag([2.0, -3.0])) == pytest.approx(-3.0)
    assert linalg.min_eigenvalue(linalg.random_projection(rng, 4, 3)) == pytest.approx(0.0, abs=1e-12)


def test_validators_reject():
    with pytest.raises(NotHermitian):
        linalg.as_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotProjection):
        linalg.as_projection(0.5 * np.eye(2))
    with pytest.raises(NotUnitary):
        linalg.check_unitary(2 * np.eye(2))


def test_meet_examples(rng):
    p = linalg.random_projection(rng, 4, 2)
    assert np.allclose(linalg.meet(p, p), p, atol=1e-10)
    assert np.allclose(linalg.meet(p, np.eye(4)), p, atol=1e-10)
    p3 = np.diag([1.0, 1.0, 0.0])
    q3 = linalg.projection_onto(np.array([[1, 0], [0, 1], [0, 1]]) / np.array([1, np.sqrt(2)]))
    assert np.allclose(linalg.meet(p3, q3), np.diag([1.0, 0.0, 0.0]), atol=1e-10)
    assert np.allclose(linalg.join(p3, q3), np.eye(3), atol=1e-10)
    assert linalg.rank(linalg.join(p3, q3)) == linalg.rank(p3) + linalg.rank(q3) - 1


def test_join_examples(rng):
    p = linalg.random_projection(rng, 3, 1)
    assert np.allclose(linalg.join(p, np.zeros((3, 3))), p, atol=1e-10)
    assert np.allclose(linalg.join(p, np.eye(3)), np.eye(3), atol=1e-10)


def test_meet_against_nullspace_oracle(rng):
    # Ran(p) & Ran(q) is the kernel of (1-p) + (1-q)
    for d in range(1, 9):
        p, q = corpus.projection_pair(rng, d)
        w, v = np.linalg.eigh(2 * np.eye(d) - p - q)
        basis = v[:, w < 1e-8]
        assert np.allclose(linalg.meet(p, q), basis @ basis.conj().T, atol=1e-8)


def test_meet_iteration_agrees(rng):
    for d in range(1, 9):
        p, q = corpus.projection_pair(rng, d)
        approx, k = linalg.meet_by_iteration(p, q)
        assert k >= 256
        assert np.max(np.abs(approx - linalg.meet(p, q))) <= 1e-4


def test_kron_examples(rng):
    assert np.allclose(linalg.kron(np.eye(2), np.eye(3)), np.eye(6))
    e = np.diag([1.0, 0.0])
    assert np.allclose(linalg.kron(e, e), np.diag([1.0, 0, 0, 0]))
    a = rng.standard_normal((3, 3))
    b = rng.standard_normal((2, 2))
    a, b = a + a.T, b + b.T
    assert linalg.normalized_trace(linalg.kron(a, b)) == pytest.approx(
        linalg.normalized_trace(a) * linalg.normalized_trace(b)
    )
    with pytest.raises(DimensionOverflow):
        linalg.kron(np.eye(3), np.eye(3), cap=8)


def test_haar_unitary_is_unitary(rng):
    for d in (1, 2, 5):
        u = linalg.haar_unitary(rng, d)
        assert np.allclose(u @ u.conj().T, np.eye(d), atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_trace_identity(seed, d):
    p, q = corpus.projection_pair(np.random.default_rng(seed), d)
    lhs = linalg.normalized_trace(linalg.join(p, q)) + linalg.normalized_trace(linalg.meet(p, q))
    assert abs(lhs - linalg.normalized_trace(p) - linalg.normalized_trace(q)) <= 1e-8


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_meet_is_dominated(seed, d):
    p, q = corpus.projection_pair(np.random.default_rng(seed), d)
    r = linalg.meet(p, q)
    assert linalg.projection_residual(r) <= 1e-8
    assert linalg.min_eigenvalue(p - r) >= -1e-8
    assert linalg.min_eigenvalue(q - r) >= -1e-8


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_powers_stormer(seed, d):
    p, q = corpus.projection_pair(np.random.default_rng(seed), d)
    assert linalg.hs_norm_sq(p - q) <= linalg.trace_norm(p - q) + 1e-9


@given(st.integers(0, 2**32 - 1))
def test_tensor_versus_min(seed):
    rng = np.random.default_rng(seed)
    p1, p2 = corpus.projection_pair(rng, 3)
    q1, q2 = corpus.projection_pair(rng, 2)
    lhs = linalg.meet(np.kron(p1, q1), np.kron(p2, q2))
    assert np.allclose(lhs, np.kron(linalg.meet(p1, p2), linalg.meet(q1, q2)), atol=1e-7)
