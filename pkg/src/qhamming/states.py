"""Tracial states as finite mixtures of atomic traces.

An atom is a magic unitary with the normalized matrix trace; a
:class:`StateMixture` is a convex combination of atoms.  Words are tuples of
``(i, j)`` index pairs standing for monomials ``u_{i1 j1} ... u_{il jl}``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import magic
from .errors import (
    AllZeroWeights,
    IndexOutOfRange,
    InvalidPermutation,
    NotClassical,
    ParseError,
    SizeMismatch,
    ValidationFailure,
)
from .magic import MagicUnitary

WEIGHT_TOL = 1e-10
DROP_WEIGHT = 1e-12
IMAG_TOL = 1e-9

Word = tuple[tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class AtomicTrace:
    rep: MagicUnitary
    omega: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        om = self.rep.omega()
        om.setflags(write=False)
        object.__setattr__(self, "omega", om)

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def d(self) -> int:
        return self.rep.d

    def bistochastic_residual(self) -> float:
        om = self.omega
        return float(
            max(
                np.max(np.abs(om.sum(axis=0) - 1.0)),
                np.max(np.abs(om.sum(axis=1) - 1.0)),
                max(0.0, -om.min()),
                max(0.0, om.max() - 1.0),
            )
        )


@dataclass(frozen=True, eq=False)
class StateMixture:
    weights: np.ndarray
    atoms: tuple[AtomicTrace, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        atoms = tuple(
            a if isinstance(a, AtomicTrace) else AtomicTrace(a) for a in self.atoms
        )
        if len(atoms) == 0 or w.shape != (len(atoms),):
            raise ValueError("need one weight per atom and at least one atom")
        if len({a.n for a in atoms}) != 1:
            raise SizeMismatch("all atoms must share n")
        if np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must be nonnegative and sum to 1, got {w.tolist()}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "atoms", atoms)

    @property
    def n(self) -> int:
        return self.atoms[0].n

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        dims = [a.d for a in self.atoms]
        return f"StateMixture(n={self.n}, weights={self.weights.round(4).tolist()}, dims={dims})"


def mixture(pairs: Iterable[tuple[float, MagicUnitary | AtomicTrace]]) -> StateMixture:
    """Build a mixture from ``(weight, rep)`` pairs, renormalizing the weights."""
    pairs = list(pairs)
    return normalize([w for w, _ in pairs], [a for _, a in pairs])


def point_mass(rep: MagicUnitary) -> StateMixture:
    return StateMixture(np.ones(1), (AtomicTrace(rep),))


def classical(n: int, perms: Sequence[Sequence[int]], weights: Sequence[float] | None = None) -> StateMixture:
    """Mixture of point masses at permutations (0-based image tuples)."""
    if weights is None:
        weights = [1.0] * len(perms)
    return normalize(weights, [magic.from_permutation(n, s) for s in perms])


def normalize(weights, atoms) -> StateMixture:
    """Rescale weights to sum 1 and drop atoms lighter than 1e-12."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = w.sum()
    if not total > 0:
        raise AllZeroWeights("weights sum to zero")
    w = w / total
    keep = [k for k in range(len(w)) if w[k] >= DROP_WEIGHT]
    if not keep:
        raise AllZeroWeights("every weight is below the drop threshold")
    w = w[keep]
    kept = [atoms[k] for k in keep]
    return StateMixture(w / w.sum(), tuple(kept))


def dedupe(phi: StateMixture, tol: float = 1e-10) -> StateMixture:
    """Merge atoms whose grids agree entrywise within ``tol``."""
    reps: list[AtomicTrace] = []
    ws: list[float] = []
    for w, a in zip(phi.weights, phi.atoms):
        for k, b in enumerate(reps):
            if a.rep.same_as(b.rep, tol):
                ws[k] += w
                break
        else:
            reps.append(a)
            ws.append(float(w))
    if len(reps) == len(phi.atoms):
        return phi
    return StateMixture(np.array(ws) / sum(ws), tuple(reps))


def _check_word(w: Word, n: int) -> Word:
    w = tuple((int(i), int(j)) for i, j in w)
    for i, j in w:
        if not (0 <= i < n and 0 <= j < n):
            raise IndexOutOfRange(f"letter ({i},{j}) outside [0,{n})")
    return w


def word_value(phi: StateMixture, w: Word) -> complex:
    """Mixture value on the monomial ``w`` as a complex number."""
    w = _check_word(w, phi.n)
    total = 0j
    for wt, a in zip(phi.weights, phi.atoms):
        g = a.rep.grid
        if not w:
            total += wt
            continue
        prod = g[w[0]]
        for letter in w[1:]:
            prod = prod @ g[letter]
        total += wt * np.trace(prod) / a.d
    return complex(total)


def evaluate_word(phi: StateMixture, w: Word) -> float:
    val = word_value(phi, w)
    if abs(val.imag) > IMAG_TOL:
        raise ValueError(f"word {w} has non-real value {val}")
    return float(val.real)


def birkhoff(phi: StateMixture) -> np.ndarray:
    """The bistochastic matrix ``[phi(u_ij)]``."""
    return np.einsum("a,aij->ij", phi.weights, np.stack([a.omega for a in phi.atoms]))


def convolve_states(phi: StateMixture, psi: StateMixture, cap: int | None = None) -> StateMixture:
    if phi.n != psi.n:
        raise SizeMismatch(f"n={phi.n} vs n={psi.n}")
    kw = {} if cap is None else {"cap": cap}
    ws, atoms = [], []
    for wa, a in zip(phi.weights, phi.atoms):
        for wb, b in zip(psi.weights, psi.atoms):
            ws.append(wa * wb)
            atoms.append(AtomicTrace(magic.convolve(a.rep, b.rep, **kw)))
    w = np.array(ws)
    return StateMixture(w / w.sum(), tuple(atoms))


def is_classical(phi: StateMixture, tol: float = 1e-8) -> bool:
    return all(magic.classical_permutation(a.rep, tol) is not None for a in phi.atoms)


def classical_support(phi: StateMixture) -> list[tuple[float, tuple[int, ...]]]:
    """``(weight, permutation)`` pairs for a classical mixture (raises otherwise)."""
    out = []
    for w, a in zip(phi.weights, phi.atoms):
        s = magic.classical_permutation(a.rep)
        if s is None:
            raise NotClassical("atom does not factor through a point of S_n")
        out.append((float(w), s))
    return out


def word_corpus(n: int, max_len: int = 2, sample: int = 200, sample_len: int = 3, seed: int = 0) -> list[Word]:
    """All words of length 1..max_len, plus a seeded sample of longer words when n >= 4."""
    letters = [(i, j) for i in range(n) for j in range(n)]
    words: list[Word] = []
    for ell in range(1, max_len + 1):
        words.extend(itertools.product(letters, repeat=ell))
    if n >= 4 and sample > 0 and sample_len > max_len:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, len(letters), size=(sample, sample_len))
        words.extend(tuple(letters[k] for k in row) for row in idx)
    return words


# -- serialization ---------------------------------------------------------


def to_json_obj(phi: StateMixture) -> dict:
    atoms = []
    for w, a in zip(phi.weights, phi.atoms):
        s = magic.classical_permutation(a.rep) if a.d == 1 else None
        if s is not None:
            atoms.append({"weight": float(w), "perm": list(s)})
        else:
            atoms.append({"weight": float(w), "rep": magic.to_json_obj(a.rep)})
    return {"n": phi.n, "atoms": atoms}


def from_json_obj(obj: dict, check: bool = True) -> StateMixture:
    try:
        n = int(obj["n"])
        raw = obj["atoms"]
        ws, reps = [], []
        for item in raw:
            ws.append(float(item["weight"]))
            if "perm" in item:
                reps.append(magic.from_permutation(n, item["perm"]))
            else:
                reps.append(magic.from_json_obj(item["rep"], check=check))
    except InvalidPermutation as exc:
        raise ValidationFailure(str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed state mixture: {exc}") from exc
    if any(r.n != n for r in reps):
        raise ParseError("atom n does not match mixture n")
    if not reps:
        raise ParseError("mixture has no atoms")
    w = np.asarray(ws)
    if check and (np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_TOL):
        raise ValidationFailure(f"weights {ws} are not a probability vector")
    return normalize(w, reps)


def dumps(phi: StateMixture) -> str:
    return json.dumps(to_json_obj(phi))


def loads(text: str, check: bool = True) -> StateMixture:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    return from_json_obj(obj, check=check)
