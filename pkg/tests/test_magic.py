import itertools

import numpy as np
import pytest

from qhamming import corpus, linalg, magic
from qhamming.errors import (
    DimensionMismatch,
    DimensionOverflow,
    InvalidPermutation,
    ParseError,
    SizeMismatch,
    ValidationFailure,
)


def test_from_permutation_examples():
    ident = magic.from_permutation(3, [0, 1, 2])
    assert np.array_equal(ident.omega(), np.eye(3))
    swap = magic.from_permutation(3, [1, 0, 2])
    assert np.array_equal(swap.omega(), [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    for s in itertools.permutations(range(4)):
        om = magic.from_permutation(4, s).omega()
        assert np.all(om.sum(0) == 1) and np.all(om.sum(1) == 1)


@pytest.mark.parametrize("bad", [[0, 0, 1], [0, 1], [1, 2, 3]])
def test_from_permutation_rejects(bad):
    with pytest.raises(InvalidPermutation):
        magic.from_permutation(3, bad)


def test_two_block_examples(two_block_atom):
    one = np.eye(1)
    assert magic.classical_permutation(magic.two_block(one, one)) == (0, 1, 2, 3)
    e = np.diag([1.0, 0.0])
    m = magic.two_block(e, e)
    assert magic.validate(m).passed
    assert set(np.unique(m.omega())) <= {0.0, 0.5}
    assert magic.validate(two_block_atom).passed
    with pytest.raises(DimensionMismatch):
        magic.two_block(np.eye(1), np.eye(2))


def test_conjugate_examples(rng, two_block_atom):
    assert magic.conjugate(two_block_atom, np.eye(2)).same_as(two_block_atom)
    u = linalg.haar_unitary(rng, 2)
    c = magic.conjugate(two_block_atom, u)
    assert np.allclose(c.omega(), two_block_atom.omega(), atol=1e-12)
    assert magic.validate(c).worst <= 1e-10
    lifted = magic.tensor_identity(magic.from_permutation(3, [2, 0, 1]), 2)
    assert magic.validate(magic.conjugate(lifted, u)).passed


def test_direct_sum_examples(rng):
    s = magic.from_permutation(3, [1, 2, 0])
    assert np.allclose(magic.direct_sum(s, s).omega(), s.omega())
    e, t = magic.from_permutation(2, [0, 1]), magic.from_permutation(2, [1, 0])
    assert np.allclose(magic.direct_sum(e, t).omega(), 0.5)
    for _ in range(10):
        a, b = corpus.random_rep(rng, 4, 3), corpus.random_rep(rng, 4, 3)
        ds = magic.direct_sum(a, b)
        assert magic.validate(ds).passed
        assert np.allclose(ds.omega(), (a.d * a.omega() + b.d * b.omega()) / (a.d + b.d))
    with pytest.raises(SizeMismatch):
        magic.direct_sum(e, s)


def test_convolve_classical_is_composition():
    for s, t in itertools.product(itertools.permutations(range(3)), repeat=2):
        conv = magic.convolve(magic.from_permutation(3, s), magic.from_permutation(3, t))
        assert magic.classical_permutation(conv) == tuple(t[s[i]] for i in range(3))


def test_convolve_examples(rng, two_block_atom):
    ident = magic.from_permutation(4, range(4))
    assert np.allclose(magic.convolve(ident, two_block_atom).omega(), two_block_atom.omega())
    mixed = magic.convolve(two_block_atom, magic.from_permutation(4, [3, 1, 0, 2]))
    assert magic.validate(mixed).passed
    with pytest.raises(DimensionOverflow):
        magic.convolve(two_block_atom, two_block_atom, cap=3)


def test_convolve_coassociative_on_traces(rng):
    for n in (2, 3, 4, 5):
        a, b, c = (corpus.random_rep(rng, n) for _ in range(3))
        left = magic.convolve(magic.convolve(a, b), c).omega()
        right = magic.convolve(a, magic.convolve(b, c)).omega()
        assert np.max(np.abs(left - right)) <= 1e-10


def test_validate_examples(rng, two_block_atom):
    rep = magic.validate(magic.from_permutation(4, [1, 0, 3, 2]))
    assert rep.passed and rep.worst == 0.0
    grid = np.array(two_block_atom.grid)
    grid[0, 0] = 0.5 * np.eye(2)
    report = magic.validate(magic.MagicUnitary(grid))
    assert not report.passed
    assert report.projection_residuals[0, 0] > 1e-8
    assert "cell (0,0)" in report.summary()
    u = linalg.haar_unitary(rng, 2)
    assert magic.validate(magic.conjugate(two_block_atom, u)).worst <= 1e-10


def test_row_orthogonality(rng):
    for _ in range(20):
        m = corpus.random_rep(rng, 5, 3)
        for i in range(m.n):
            for j, k in itertools.permutations(range(m.n), 2):
                assert np.max(np.abs(m.grid[i, j] @ m.grid[i, k])) <= 1e-7


def test_relabel_and_extend(two_block_atom):
    r = magic.relabel(two_block_atom, [1, 0, 3, 2], [0, 1, 2, 3])
    assert magic.validate(r).passed
    assert np.allclose(r.grid[0, 0], two_block_atom.grid[1, 0])
    big = magic.extend(two_block_atom, 6)
    assert magic.validate(big).passed and big.n == 6
    assert np.allclose(big.grid[5, 5], np.eye(2))


def test_scalar_detection(two_block_atom):
    assert magic.tensor_identity(magic.from_permutation(3, [1, 2, 0]), 2).is_scalar()
    assert not two_block_atom.is_scalar()
    assert magic.classical_permutation(two_block_atom) is None


def test_json_roundtrip(rng, two_block_atom):
    m = magic.conjugate(two_block_atom, linalg.haar_unitary(rng, 2))
    back = magic.loads(magic.dumps(m))
    assert back.same_as(m, 0.0)


def test_json_errors(two_block_atom):
    with pytest.raises(ParseError):
        magic.loads("{not json")
    with pytest.raises(ParseError):
        magic.from_json_obj({"n": 2, "d": 1, "grid": [[1, 0], [0, 1]]})
    obj = magic.to_json_obj(two_block_atom)
    obj["grid"][0][0] = obj["grid"][0][1]
    with pytest.raises(ValidationFailure):
        magic.from_json_obj(obj)
