"""Seeded generators of representations and mixtures for tests and the suite."""

from __future__ import annotations

import itertools

import numpy as np

from . import linalg, magic, states
from .magic import MagicUnitary
from .states import StateMixture


def random_permutation(rng: np.random.Generator, n: int) -> tuple[int, ...]:
    return tuple(int(x) for x in rng.permutation(n))


def random_classical(rng: np.random.Generator, n: int) -> MagicUnitary:
    return magic.from_permutation(n, random_permutation(rng, n))


def random_two_block(rng: np.random.Generator, d: int = 2, relabel: bool = True) -> MagicUnitary:
    """Two-block n=4 representation with Haar-random rank-1 cells, optionally relabelled."""
    p = linalg.random_projection(rng, d, 1)
    q = linalg.random_projection(rng, d, 1)
    m = magic.two_block(p, q)
    if relabel:
        m = magic.relabel(m, random_permutation(rng, 4), random_permutation(rng, 4))
    return m


def random_commutative(rng: np.random.Generator, n: int, d: int = 2) -> MagicUnitary:
    """Unitarily rotated direct sum of ``d`` classical representations."""
    m = random_classical(rng, n)
    for _ in range(d - 1):
        m = magic.direct_sum(m, random_classical(rng, n))
    return magic.conjugate(m, linalg.haar_unitary(rng, d))


def random_rep(rng: np.random.Generator, n: int, max_d: int = 2) -> MagicUnitary:
    """One representation, classical or built from two-block pieces."""
    if n < 4:
        kind = int(rng.integers(0, 2))
        if kind == 0 or max_d < 2:
            return random_classical(rng, n)
        return random_commutative(rng, n, 2)
    kind = int(rng.integers(0, 4 if max_d >= 3 else 3))
    if kind == 0:
        return random_classical(rng, n)
    if kind == 3:
        base = magic.extend(random_two_block(rng), n) if n > 4 else random_two_block(rng)
        return magic.conjugate(
            magic.direct_sum(base, random_classical(rng, n)), linalg.haar_unitary(rng, 3)
        )
    base = random_two_block(rng)
    if n > 4:
        base = magic.extend(base, n)
        base = magic.relabel(base, random_permutation(rng, n), random_permutation(rng, n))
    if kind == 2:
        base = magic.conjugate(base, linalg.haar_unitary(rng, 2))
    return base


def random_mixture(
    rng: np.random.Generator,
    n: int,
    max_atoms: int = 3,
    max_d: int = 2,
    classical: bool = False,
) -> StateMixture:
    k = int(rng.integers(1, max_atoms + 1))
    w = rng.dirichlet(np.ones(k))
    if classical:
        reps = [random_classical(rng, n) for _ in range(k)]
    else:
        reps = [random_rep(rng, n, max_d) for _ in range(k)]
    return states.normalize(w, reps)


def random_classical_measure(rng: np.random.Generator, n: int, max_support: int = 6) -> StateMixture:
    k = int(rng.integers(1, max_support + 1))
    perms = [random_permutation(rng, n) for _ in range(k)]
    return states.classical(n, perms, rng.dirichlet(np.ones(k)))


def disjoint_pair(rng: np.random.Generator, n: int) -> tuple[StateMixture, StateMixture]:
    """Two classical mixtures whose Birkhoff matrices have disjoint supports.

    Supports are cosets ``{s o c^a}`` and ``{s o c^b}`` of a cyclic shift ``c``
    with disjoint exponent sets, so no permutation pair agrees anywhere.
    """
    shift = np.roll(np.arange(n), 1)
    base = np.asarray(random_permutation(rng, n))
    powers = [base]
    for _ in range(n - 1):
        powers.append(powers[-1][shift])
    split = int(rng.integers(1, n))
    order = rng.permutation(n)
    left = [tuple(int(x) for x in powers[k]) for k in order[:split]]
    right = [tuple(int(x) for x in powers[k]) for k in order[split:]]
    return (
        states.classical(n, left, rng.dirichlet(np.ones(len(left)))),
        states.classical(n, right, rng.dirichlet(np.ones(len(right)))),
    )


def operator_tuples(seed: int, count: int = 60, size: int = 4) -> list[tuple[MagicUnitary, ...]]:
    """Tuples of ``size`` representations sharing n, cycling n through 2..5."""
    rng = np.random.default_rng(seed)
    out = []
    for t in range(count):
        n = (2, 3, 4, 5)[t % 4]
        reps = [random_rep(rng, n, 3) for _ in range(size)]
        if t % 5 == 4:
            # a convolution product pushes the operator dimension into the hundreds
            reps[0] = magic.convolve(reps[0], random_rep(rng, n, 3))
        out.append(tuple(reps))
    return out


def all_permutations(n: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(n)))


def projection_pair(rng: np.random.Generator, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Random projections in dim ``d`` whose ranges share a random subspace."""
    shared = int(rng.integers(0, d // 2 + 1))
    extra_p = int(rng.integers(0, d - shared + 1))
    extra_q = int(rng.integers(0, d - shared + 1))
    u = linalg.haar_unitary(rng, d)
    common = u[:, :shared]
    vp = rng.standard_normal((d, extra_p)) + 1j * rng.standard_normal((d, extra_p))
    vq = rng.standard_normal((d, extra_q)) + 1j * rng.standard_normal((d, extra_q))
    p = linalg.projection_onto(np.hstack([common, vp])) if shared + extra_p else np.zeros((d, d), complex)
    q = linalg.projection_onto(np.hstack([common, vq])) if shared + extra_q else np.zeros((d, d), complex)
    return p, q


def orthogonal_families(rng: np.random.Generator, d: int, k: int) -> tuple[list, list]:
    """Two families of ``k`` mutually orthogonal projections with overlapping ranges.

    Both are carved from bases that agree on a random leading block of
    columns, so some meets of family members are nonzero.
    """
    u = linalg.haar_unitary(rng, d)
    keep = int(rng.integers(0, d + 1))
    v = u.copy()
    if keep < d:
        v[:, keep:] = u[:, keep:] @ linalg.haar_unitary(rng, d - keep)

    def carve(basis):
        cuts = np.sort(rng.integers(0, d + 1, size=k - 1))
        edges = [0, *cuts.tolist(), d]
        return [basis[:, a:b] @ basis[:, a:b].conj().T for a, b in zip(edges[:-1], edges[1:])]

    return carve(u), carve(v)
