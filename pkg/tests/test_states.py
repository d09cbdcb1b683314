import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhamming import corpus, linalg, magic, states
from qhamming.errors import (
    AllZeroWeights,
    IndexOutOfRange,
    NotClassical,
    ParseError,
    SizeMismatch,
    ValidationFailure,
)


def test_evaluate_word_examples(rng, two_block_atom):
    phi = corpus.random_mixture(rng, 4)
    assert states.evaluate_word(phi, ()) == pytest.approx(1.0)
    expected = sum(w * a.omega[1, 2] for w, a in zip(phi.weights, phi.atoms))
    assert states.evaluate_word(phi, ((1, 2),)) == pytest.approx(expected)
    atom = states.point_mass(two_block_atom)
    assert states.evaluate_word(atom, ((0, 0), (0, 1))) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(IndexOutOfRange):
        states.evaluate_word(atom, ((0, 4),))


def test_word_value_matches_direct_trace():
    rng = np.random.default_rng(3)
    p, q = linalg.random_projection(rng, 2, 1), linalg.random_projection(rng, 2, 1)
    m = magic.conjugate(magic.two_block(p, q), linalg.haar_unitary(rng, 2))
    g = m.grid
    words = [((0, 0), (2, 2), (0, 1)), ((0, 0), (2, 2), (1, 1))]
    vals = [states.word_value(states.point_mass(m), w) for w in words]
    direct = [np.trace(g[w[0]] @ g[w[1]] @ g[w[2]]) / 2 for w in words]
    assert np.allclose(vals, direct)
    assert all(abs(v.imag) <= 1e-9 for v in vals)


def test_birkhoff_examples(two_block_atom):
    s = (2, 0, 1)
    assert np.array_equal(states.birkhoff(states.classical(3, [s])), magic.from_permutation(3, s).omega())
    assert np.allclose(states.birkhoff(states.classical(2, [[0, 1], [1, 0]])), 0.5)
    om = states.birkhoff(states.point_mass(two_block_atom))
    assert np.allclose(om[:2, :2], 0.5) and np.allclose(om[2:, 2:], 0.5)
    assert np.allclose(om[:2, 2:], 0.0) and np.allclose(om[2:, :2], 0.0)


def test_convolve_states_examples(rng):
    a, b = states.classical(3, [[1, 2, 0]]), states.classical(3, [[1, 0, 2]])
    conv = states.convolve_states(a, b)
    assert states.classical_support(conv) == [(1.0, (0, 2, 1))]
    phi = corpus.random_mixture(rng, 4)
    e = states.classical(4, [[0, 1, 2, 3]])
    assert np.allclose(states.birkhoff(states.convolve_states(e, phi)), states.birkhoff(phi))
    half = states.classical(2, [[0, 1], [1, 0]], [0.5, 0.5])
    out = states.convolve_states(half, states.classical(2, [[1, 0]]))
    assert sorted(states.classical_support(out)) == [(0.5, (0, 1)), (0.5, (1, 0))]
    with pytest.raises(SizeMismatch):
        states.convolve_states(a, half)


def test_birkhoff_intertwines_convolution(rng):
    for n in (2, 3, 4, 5):
        phi, psi = corpus.random_mixture(rng, n), corpus.random_mixture(rng, n)
        lhs = states.birkhoff(states.convolve_states(phi, psi))
        assert np.max(np.abs(lhs - states.birkhoff(phi) @ states.birkhoff(psi))) <= 1e-9


def test_is_classical_examples(two_block_atom):
    assert states.is_classical(states.classical(4, [[0, 1, 2, 3], [1, 0, 3, 2]]))
    assert not states.is_classical(states.point_mass(two_block_atom))
    e, t = magic.from_permutation(2, [0, 1]), magic.from_permutation(2, [1, 0])
    assert not states.is_classical(states.point_mass(magic.direct_sum(e, t)))
    with pytest.raises(NotClassical):
        states.classical_support(states.point_mass(two_block_atom))


def test_normalize_examples():
    e = magic.from_permutation(2, [0, 1])
    t = magic.from_permutation(2, [1, 0])
    assert np.allclose(states.normalize([2, 2], [e, t]).weights, [0.5, 0.5])
    one = states.normalize([1, 0], [e, t])
    assert len(one) == 1 and one.weights[0] == 1.0
    assert len(states.normalize([1e-15, 1], [e, t])) == 1
    with pytest.raises(AllZeroWeights):
        states.normalize([0, 0], [e, t])


def test_mixture_invariants():
    e = magic.from_permutation(2, [0, 1])
    with pytest.raises(ValueError):
        states.StateMixture(np.array([0.5, 0.4]), (e, e))
    with pytest.raises(SizeMismatch):
        states.StateMixture(np.array([0.5, 0.5]), (e, magic.from_permutation(3, [0, 1, 2])))


def test_dedupe_merges_identical_atoms(two_block_atom):
    phi = states.mixture([(0.2, two_block_atom), (0.3, two_block_atom), (0.5, magic.from_permutation(4, range(4)))])
    d = states.dedupe(phi)
    assert len(d) == 2 and np.allclose(sorted(d.weights), [0.5, 0.5])


def test_word_corpus_shape():
    assert len(states.word_corpus(3)) == 9 + 81
    assert len(states.word_corpus(4)) == 16 + 256 + 200
    assert states.word_corpus(4, seed=1) == states.word_corpus(4, seed=1)


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4, 5]))
def test_words_invariant_under_conjugation(seed, n):
    rng = np.random.default_rng(seed)
    m = corpus.random_rep(rng, n)
    c = magic.conjugate(m, linalg.haar_unitary(rng, m.d))
    a, b = states.point_mass(m), states.point_mass(c)
    for w in states.word_corpus(n, 2, 30, 3, seed % 1000):
        assert abs(states.word_value(a, w) - states.word_value(b, w)) <= 1e-10


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 4]))
def test_classical_words_match_measure(seed, n):
    phi = corpus.random_classical_measure(np.random.default_rng(seed), n)
    supp = states.classical_support(phi)
    for w in states.word_corpus(n, 2, 30, 3, 0):
        direct = sum(wt for wt, s in supp if all(s[i] == j for i, j in w))
        assert states.evaluate_word(phi, w) == pytest.approx(direct, abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4, 5]))
def test_atoms_bistochastic(seed, n):
    phi = corpus.random_mixture(np.random.default_rng(seed), n, max_d=3)
    for a in phi.atoms:
        assert a.bistochastic_residual() <= 1e-8


def test_json_roundtrip(rng):
    phi = corpus.random_mixture(rng, 4, max_atoms=4)
    back = states.loads(states.dumps(phi))
    assert np.allclose(back.weights, phi.weights)
    for a, b in zip(back.atoms, phi.atoms):
        assert a.rep.same_as(b.rep, 0.0)


def test_json_perm_shorthand_and_errors():
    phi = states.loads('{"n": 3, "atoms": [{"weight": 1.0, "perm": [2, 0, 1]}]}')
    assert states.classical_support(phi) == [(1.0, (2, 0, 1))]
    with pytest.raises(ValidationFailure):
        states.loads('{"n": 3, "atoms": [{"weight": 1.0, "perm": [0, 0, 1]}]}')
    with pytest.raises(ValidationFailure):
        states.loads('{"n": 3, "atoms": [{"weight": 0.5, "perm": [0, 1, 2]}]}')
    with pytest.raises(ParseError):
        states.loads('{"n": 3}')
