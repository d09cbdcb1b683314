"""Quantum Hamming distances between finite mixtures of atomic traces.

Three distances are estimated:

``tensor``
    optimal transport between the presented atoms with the Hamming cost
    ``1 - <omega_a, omega_b> / n``; exact relative to the presented atoms.
``free`` / ``l1``
    infima over tracial couplings, reported as ``[lower, upper]``.  Every
    upper bound is the cost of an explicit coupling glued along the transport
    plan.  Lower bounds come from word evaluations and the distance-one
    criterion; on mixtures of permutations the classical value closes the gap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import linalg, magic, states, transport
from .config import RunConfig
from .errors import CertificationError, DimensionMismatch, DimensionOverflow, NotClassical, SizeMismatch
from .magic import MagicUnitary
from .states import AtomicTrace, StateMixture

log = logging.getLogger(__name__)

METRICS = ("tensor", "free", "l1")
BOUND_TOL = 1e-9
DISTANCE_ONE_TOL = 1e-10


@dataclass
class DistanceReport:
    metric: str
    upper: float
    lower: float
    exact_for_presented_atoms: bool
    plan: np.ndarray | None = None
    witnesses: dict = field(default_factory=dict)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_json_obj(self) -> dict:
        return {
            "metric": self.metric,
            "upper": float(self.upper),
            "lower": float(self.lower),
            "exact_for_presented_atoms": bool(self.exact_for_presented_atoms),
            "plan": None if self.plan is None else np.asarray(self.plan).tolist(),
            "witnesses": dict(sorted(self.witnesses.items())),
        }


# -- couplings of two atoms -------------------------------------------------


@dataclass(frozen=True, eq=False)
class Coupling:
    """Two representations ``alpha_1``, ``alpha_2`` of one atom pair in a common matrix algebra."""

    a: MagicUnitary
    b: MagicUnitary
    kind: str  # "diagonal" | "tensor" | "unitary"
    u: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.a.d * self.b.d if self.kind == "tensor" else self.a.d

    def legs(self, cap: int = linalg.DIM_CAP) -> tuple[MagicUnitary, MagicUnitary]:
        if self.kind == "diagonal":
            return self.a, self.a
        if self.kind == "tensor":
            return (
                magic.tensor_identity(self.a, self.b.d, cap),
                magic.identity_tensor(self.a.d, self.b, cap),
            )
        return self.a, magic.conjugate(self.b, self.u)


def diagonal_coupling(a: MagicUnitary) -> Coupling:
    return Coupling(a, a, "diagonal")


def tensor_coupling(a: MagicUnitary, b: MagicUnitary) -> Coupling:
    return Coupling(a, b, "tensor")


def unitary_coupling(a: MagicUnitary, b: MagicUnitary, u: np.ndarray | None = None) -> Coupling:
    if a.d != b.d:
        raise DimensionMismatch(f"d={a.d} vs d={b.d}")
    if u is None:
        u = np.eye(a.d, dtype=complex)
    return Coupling(a, b, "unitary", linalg.check_unitary(u))


def legs_cost_free(left: MagicUnitary, right: MagicUnitary) -> float:
    n = left.n
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += linalg.normalized_trace(linalg.meet(left.grid[i, j], right.grid[i, j]))
    return 1.0 - total / n


def legs_cost_l1(left: MagicUnitary, right: MagicUnitary) -> float:
    n = left.n
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += linalg.trace_norm(left.grid[i, j] - right.grid[i, j])
    return total / (2 * n)


def coupling_cost(c: Coupling, metric: str, cap: int = linalg.DIM_CAP) -> float:
    if metric == "free":
        return legs_cost_free(*c.legs(cap))
    if metric == "l1":
        return legs_cost_l1(*c.legs(cap))
    raise ValueError(f"no coupling cost for metric {metric!r}")


# -- atom costs -------------------------------------------------------------


def _same_n(a: AtomicTrace, b: AtomicTrace):
    if a.n != b.n:
        raise SizeMismatch(f"n={a.n} vs n={b.n}")


def atom_cost_hamming(a: AtomicTrace, b: AtomicTrace) -> float:
    """``(tau_a (x) tau_b)(C_H) = 1 - (1/n) sum_ij omega_a[i,j] omega_b[i,j]``."""
    _same_n(a, b)
    return float(1.0 - np.sum(a.omega * b.omega) / a.n)


def atom_cost_l1(a: AtomicTrace, b: AtomicTrace, cap: int = linalg.DIM_CAP) -> float:
    _same_n(a, b)
    return coupling_cost(tensor_coupling(a.rep, b.rep), "l1", cap)


def atom_cost_meet_same_dim(a: AtomicTrace, b: AtomicTrace, u: np.ndarray | None = None) -> float:
    _same_n(a, b)
    return legs_cost_free(*unitary_coupling(a.rep, b.rep, u).legs())


def _alignment(p: np.ndarray, q: np.ndarray, u: np.ndarray) -> float:
    # sum_ij tr(P_ij u Q_ij u^*), real for Hermitian cells
    rotated = u @ q @ u.conj().T
    return float(np.einsum("xpq,xqp->", p, rotated).real)


def _alignment_gradient(p: np.ndarray, q: np.ndarray, u: np.ndarray) -> np.ndarray:
    # derivative of the alignment along u exp(i t H) is tr(H G) with G = i sum [Q, u^* P u]
    pulled = u.conj().T @ p @ u
    comm = q @ pulled - pulled @ q
    g = 1j * comm.sum(axis=0)
    return 0.5 * (g + g.conj().T)


def _ascend(p, q, u, steps: int) -> np.ndarray:
    val = _alignment(p, q, u)
    t = 1.0
    for _ in range(steps):
        g = _alignment_gradient(p, q, u)
        gnorm = np.linalg.norm(g)
        if gnorm < 1e-13:
            break
        while t > 1e-14:
            cand = u @ expm(1j * t * g / gnorm)
            cval = _alignment(p, q, cand)
            if cval > val:
                u, val = cand, cval
                t *= 2.0
                break
            t *= 0.5
        else:
            break
    return _polish(p, q, u)


def _polish(p, q, u, iters: int = 60) -> np.ndarray:
    # value comparisons stall near the optimum, so finish on the gradient norm
    g = _alignment_gradient(p, q, u)
    gnorm = np.linalg.norm(g)
    t = 0.25
    for _ in range(iters):
        if gnorm < 1e-14 or t < 1e-10:
            break
        cand = u @ expm(1j * t * g)
        cg = _alignment_gradient(p, q, cand)
        cn = np.linalg.norm(cg)
        if cn < gnorm:
            u, g, gnorm = cand, cg, cn
        else:
            t *= 0.5
    return u


def optimize_unitary(
    a: AtomicTrace,
    b: AtomicTrace,
    restarts: int = 8,
    seed: int = 0,
    steps: int = 200,
) -> tuple[np.ndarray, float]:
    """Search same-dimension couplings ``(P, u Q u^*)`` for a small meet cost.

    The meet cost is piecewise constant in ``u``, so each restart climbs the
    smooth alignment ``sum tr(P u Q u^*)`` by geodesic steps on the unitary
    group (step doubling on success, halving on failure) from the identity
    and from Haar-random starting points.  The returned cost never exceeds
    the cost at the identity.
    """
    _same_n(a, b)
    if a.d != b.d:
        raise DimensionMismatch(f"d={a.d} vs d={b.d}")
    d = a.d
    flat_a = a.rep.grid.reshape(-1, d, d)
    flat_b = b.rep.grid.reshape(-1, d, d)
    best_u = np.eye(d, dtype=complex)
    best = atom_cost_meet_same_dim(a, b, best_u)
    if best <= 0.0 or a.rep.is_scalar() or b.rep.is_scalar():
        return best_u, best
    rng = np.random.default_rng(seed)
    starts = [np.eye(d, dtype=complex)] + [linalg.haar_unitary(rng, d) for _ in range(restarts)]
    for start in starts:
        u = _ascend(flat_a, flat_b, start, steps)
        # re-unitarize against drift from repeated products
        w, _, vh = np.linalg.svd(u)
        u = w @ vh
        cost = atom_cost_meet_same_dim(a, b, u)
        if cost < best - 1e-12:
            log.debug("unitary search improved meet cost %.6f -> %.6f", best, cost)
            best, best_u = cost, u
    return best_u, best


# -- pairwise cost tables ---------------------------------------------------


@dataclass
class PairChoice:
    cost: float
    coupling: Coupling
    label: str


def _identical(a: AtomicTrace, b: AtomicTrace) -> bool:
    return a.rep.same_as(b.rep, 1e-10)


def _pair_choices(a: AtomicTrace, b: AtomicTrace, config: RunConfig, seed: int) -> dict[str, PairChoice]:
    """Best available coupling of one atom pair for each of the free and l1 costs."""
    ham = atom_cost_hamming(a, b)
    tens = tensor_coupling(a.rep, b.rep)
    try:
        l1_tens = atom_cost_l1(a, b, config.dim_cap)
    except DimensionOverflow:
        # tensor legs commute, so the trace norm has this closed form
        l1_tens = ham
    free = PairChoice(ham, tens, "tensor")
    l1 = PairChoice(l1_tens, tens, "tensor")
    if _identical(a, b):
        diag = diagonal_coupling(a.rep)
        return {"free": PairChoice(0.0, diag, "diagonal"), "l1": PairChoice(0.0, diag, "diagonal")}
    if a.d == b.d and config.restarts >= 0:
        u, cost = optimize_unitary(a, b, config.restarts, seed, config.steps)
        cpl = unitary_coupling(a.rep, b.rep, u)
        if cost < free.cost:
            free = PairChoice(cost, cpl, "unitary")
        l1_u = coupling_cost(cpl, "l1", config.dim_cap)
        if l1_u < l1.cost:
            l1 = PairChoice(l1_u, cpl, "unitary")
    return {"free": free, "l1": l1}


def _pair_seed(seed: int, i: int, j: int) -> int:
    return int(np.random.SeedSequence([seed, i, j]).generate_state(1)[0])


def _choice_tables(phi: StateMixture, psi: StateMixture, config: RunConfig):
    tables = {"free": [], "l1": []}
    for i, a in enumerate(phi.atoms):
        rows = {"free": [], "l1": []}
        for j, b in enumerate(psi.atoms):
            ch = _pair_choices(a, b, config, _pair_seed(config.seed, i, j))
            for key in rows:
                rows[key].append(ch[key])
        for key in tables:
            tables[key].append(rows[key])
    return tables


def hamming_cost_table(phi: StateMixture, psi: StateMixture) -> np.ndarray:
    a = np.stack([t.omega for t in phi.atoms])
    b = np.stack([t.omega for t in psi.atoms])
    return 1.0 - np.einsum("aij,bij->ab", a, b) / phi.n


# -- lower bounds -----------------------------------------------------------


def _word_values(phi: StateMixture, words: list) -> np.ndarray:
    n = phi.n
    out = np.zeros(len(words), dtype=complex)
    by_len: dict[int, list[int]] = {}
    for k, w in enumerate(words):
        by_len.setdefault(len(w), []).append(k)
    for wt, atom in zip(phi.weights, phi.atoms):
        g = atom.rep.grid.reshape(n * n, atom.d, atom.d)
        for ell, pos in by_len.items():
            flat = np.array([[i * n + j for i, j in words[k]] for k in pos]).reshape(len(pos), ell)
            if ell == 0:
                out[pos] += wt
                continue
            prod = g[flat[:, 0]]
            for t in range(1, ell):
                prod = prod @ g[flat[:, t]]
            out[pos] += wt * np.trace(prod, axis1=1, axis2=2) / atom.d
    return out


def lower_bound_words(phi: StateMixture, psi: StateMixture, config: RunConfig | None = None) -> float:
    """Largest ``|phi(w) - psi(w)| / (2 n len(w))`` over the word corpus."""
    if phi.n != psi.n:
        raise SizeMismatch(f"n={phi.n} vs n={psi.n}")
    config = config or RunConfig()
    words = states.word_corpus(
        phi.n, config.corpus_len, config.corpus_sample, config.corpus_sample_len, config.seed
    )
    if not words:
        return 0.0
    diff = np.abs(_word_values(phi, words) - _word_values(psi, words))
    lengths = np.array([len(w) for w in words], dtype=float)
    return float(np.max(diff / (2 * phi.n * lengths)))


def check_distance_one(phi: StateMixture, psi: StateMixture) -> bool:
    if phi.n != psi.n:
        raise SizeMismatch(f"n={phi.n} vs n={psi.n}")
    return float(np.sum(states.birkhoff(phi) * states.birkhoff(psi))) <= DISTANCE_ONE_TOL


def _lower_bounds(phi: StateMixture, psi: StateMixture, config: RunConfig, cached=None) -> tuple[float, str]:
    if cached is not None:
        return cached
    cands = [(lower_bound_words(phi, psi, config), "lipschitz-words")]
    if check_distance_one(phi, psi):
        cands.append((1.0, "distance-one"))
    if states.is_classical(phi) and states.is_classical(psi):
        w1 = transport.classical_w1(states.classical_support(phi), states.classical_support(psi))
        cands.append((w1, "classical-w1"))
    value, label = max(cands, key=lambda t: t[0])
    return value, label


def _finish(metric, upper, lower, lower_label, upper_label, exact, plan) -> DistanceReport:
    if lower > upper + BOUND_TOL:
        raise CertificationError(
            f"{metric}: lower bound {lower:.12g} exceeds upper bound {upper:.12g}"
        )
    upper = min(max(upper, 0.0), 1.0)
    lower = min(max(lower, 0.0), upper)
    return DistanceReport(
        metric, upper, lower, exact, plan, {"upper": upper_label, "lower": lower_label}
    )


def _upper_label(choices, plan) -> str:
    kinds = sorted({choices[i][j].label for i, j in zip(*np.nonzero(plan > 0))})
    return "plan over " + "+".join(kinds) + " couplings"


# -- the three distances ----------------------------------------------------


def distance_tensor(
    phi: StateMixture, psi: StateMixture, config: RunConfig | None = None, _lower=None
) -> DistanceReport:
    if phi.n != psi.n:
        raise SizeMismatch(f"n={phi.n} vs n={psi.n}")
    config = config or RunConfig()
    phi, psi = states.dedupe(phi), states.dedupe(psi)
    plan, upper = transport.solve_ot(phi.weights, psi.weights, hamming_cost_table(phi, psi))
    lower, label = _lower_bounds(phi, psi, config, _lower)
    return _finish("tensor", upper, lower, label, "tensor-coupling transport", True, plan.plan)


def _distance_coupled(metric, phi, psi, config, tables=None, lower=None):
    if phi.n != psi.n:
        raise SizeMismatch(f"n={phi.n} vs n={psi.n}")
    config = config or RunConfig()
    phi, psi = states.dedupe(phi), states.dedupe(psi)
    if tables is None:
        tables = _choice_tables(phi, psi, config)
    choices = tables[metric]
    cost = np.array([[c.cost for c in row] for row in choices])
    plan, upper = transport.solve_ot(phi.weights, psi.weights, cost)
    lower, label = _lower_bounds(phi, psi, config, lower)
    report = _finish(metric, upper, lower, label, _upper_label(choices, plan.plan), False, plan.plan)
    return report, choices


def distance_free(phi: StateMixture, psi: StateMixture, config: RunConfig | None = None) -> DistanceReport:
    return _distance_coupled("free", phi, psi, config)[0]


def distance_l1(phi: StateMixture, psi: StateMixture, config: RunConfig | None = None) -> DistanceReport:
    return _distance_coupled("l1", phi, psi, config)[0]


def distance(phi, psi, metric: str, config: RunConfig | None = None) -> DistanceReport:
    if metric == "tensor":
        return distance_tensor(phi, psi, config)
    if metric == "free":
        return distance_free(phi, psi, config)
    if metric == "l1":
        return distance_l1(phi, psi, config)
    raise ValueError(f"unknown metric {metric!r}")


def all_distances(phi, psi, config: RunConfig | None = None) -> dict[str, DistanceReport]:
    """All three reports, sharing the per-pair coupling search."""
    if phi.n != psi.n:
        raise SizeMismatch(f"n={phi.n} vs n={psi.n}")
    config = config or RunConfig()
    phi, psi = states.dedupe(phi), states.dedupe(psi)
    tables = _choice_tables(phi, psi, config)
    lower = _lower_bounds(phi, psi, config)
    return {
        "tensor": distance_tensor(phi, psi, config, lower),
        "free": _distance_coupled("free", phi, psi, config, tables, lower)[0],
        "l1": _distance_coupled("l1", phi, psi, config, tables, lower)[0],
    }


# -- identities specific to the tensor distance -----------------------------


def self_distance_tensor(phi: StateMixture) -> float:
    """``1 - (1/n) sum_a w_a sum_ij omega_a[i,j]^2``."""
    sq = np.array([np.sum(a.omega**2) for a in phi.atoms])
    return float(1.0 - phi.weights @ sq / phi.n)


def birkhoff_gap_identity(phi: StateMixture, psi: StateMixture, config: RunConfig | None = None) -> tuple[float, float]:
    """Both sides of ``d_t(f,g) - d_t(f,f)/2 - d_t(g,g)/2 = W_2(omega_* f, omega_* g)^2 / 2``."""
    lhs = (
        distance_tensor(phi, psi, config).upper
        - 0.5 * self_distance_tensor(phi)
        - 0.5 * self_distance_tensor(psi)
    )
    phi, psi = states.dedupe(phi), states.dedupe(psi)
    w2sq = transport.wasserstein(
        phi.weights,
        psi.weights,
        [a.omega for a in phi.atoms],
        [b.omega for b in psi.atoms],
        lambda x, y: np.sqrt(np.sum((x - y) ** 2) / phi.n),
        power=2,
    )
    return float(lhs), float(0.5 * w2sq)


def tv_upper_bound_classical(phi: StateMixture, psi: StateMixture) -> float:
    """Half the total-variation norm of the underlying measures on S_n."""
    if not (states.is_classical(phi) and states.is_classical(psi)):
        raise NotClassical("total-variation bound is implemented for classical mixtures only")
    mass: dict[tuple[int, ...], float] = {}
    for w, s in states.classical_support(phi):
        mass[s] = mass.get(s, 0.0) + w
    for w, s in states.classical_support(psi):
        mass[s] = mass.get(s, 0.0) - w
    return 0.5 * sum(abs(v) for v in mass.values())


# -- operator-level certificates ---------------------------------------------


@dataclass
class CostOperatorRep:
    reps: tuple[MagicUnitary, ...]
    matrix: np.ndarray
    min_eigenvalue: float


def _kron_all(mats, cap):
    out = mats[0]
    for m in mats[1:]:
        out = linalg.kron(out, m, cap)
    return out


def _check_cap(dims, cap):
    total = int(np.prod(dims))
    if total > cap:
        raise DimensionOverflow(f"product dimension {total} exceeds cap {cap}")


def build_cost_operator(a: MagicUnitary, b: MagicUnitary, cap: int = linalg.DIM_CAP) -> CostOperatorRep:
    """``1 - (1/n) sum_ij a[i,j] (x) b[i,j]`` on the product representation."""
    if a.n != b.n:
        raise SizeMismatch(f"n={a.n} vs n={b.n}")
    _check_cap([a.d, b.d], cap)
    n, dim = a.n, a.d * b.d
    s = np.einsum("ijpq,ijrs->prqs", a.grid, b.grid).reshape(dim, dim)
    mat = np.eye(dim) - s / n
    return CostOperatorRep((a, b), mat, linalg.min_eigenvalue(mat))


def check_triangle_operator(a: MagicUnitary, b: MagicUnitary, c: MagicUnitary, cap: int = linalg.DIM_CAP) -> float:
    """Smallest eigenvalue over rows i of ``(1 - p12) + (1 - p23) - (1 - p13)``."""
    if not a.n == b.n == c.n:
        raise SizeMismatch("all representations must share n")
    _check_cap([a.d, b.d, c.d], cap)
    ia, ib, ic = np.eye(a.d), np.eye(b.d), np.eye(c.d)
    dim = a.d * b.d * c.d
    worst = np.inf
    for i in range(a.n):
        p12 = sum(_kron_all([a.grid[i, j], b.grid[i, j], ic], cap) for j in range(a.n))
        p23 = sum(_kron_all([ia, b.grid[i, j], c.grid[i, j]], cap) for j in range(a.n))
        p13 = sum(_kron_all([a.grid[i, j], ib, c.grid[i, j]], cap) for j in range(a.n))
        gap = np.eye(dim) - p12 - p23 + p13
        worst = min(worst, linalg.min_eigenvalue(gap))
    return float(worst)


def check_comult_inequality(
    a: MagicUnitary, b: MagicUnitary, c: MagicUnitary, e: MagicUnitary, cap: int = linalg.DIM_CAP
) -> float:
    """Smallest eigenvalue of ``i12(C_H) + i34(C_H) - comult(C_H)`` on ``a (x) b (x) c (x) e``."""
    if not a.n == b.n == c.n == e.n:
        raise SizeMismatch("all representations must share n")
    _check_cap([a.d, b.d, c.d, e.d], cap)
    n = a.n
    dab, dce = a.d * b.d, c.d * e.d
    dim = dab * dce
    mixed = np.einsum(
        "ikAa,ilBb,kjCc,ljDd->ABCDabcd", a.grid, b.grid, c.grid, e.grid, optimize=True
    ).reshape(dim, dim)
    comult = np.eye(dim) - mixed / n
    c12 = build_cost_operator(a, b, cap).matrix
    c34 = build_cost_operator(c, e, cap).matrix
    gap = np.kron(c12, np.eye(dce)) + np.kron(np.eye(dab), c34) - comult
    return linalg.min_eigenvalue(gap)


# -- convolution ------------------------------------------------------------


def _convolved_coupling_cost(alpha: Coupling, beta: Coupling, metric: str, cap: int) -> float:
    a1, a2 = alpha.legs(cap)
    b1, b2 = beta.legs(cap)
    g1 = magic.convolve(a1, b1, cap)
    g2 = magic.convolve(a2, b2, cap)
    if metric == "free":
        return legs_cost_free(g1, g2)
    return legs_cost_l1(g1, g2)


def check_convolution_subadditivity(
    phi1: StateMixture,
    phi2: StateMixture,
    psi1: StateMixture,
    psi2: StateMixture,
    metric: str,
    config: RunConfig | None = None,
) -> tuple[float, float]:
    """``(lhs, rhs)`` for ``d(phi1*psi1, phi2*psi2) <= d(phi1, phi2) + d(psi1, psi2)``.

    ``lhs`` is the smaller of the estimator on the convolved mixtures and the
    cost of the coupling obtained by convolving the two optimal pairwise
    couplings, weighted by the product of the two plans.
    """
    config = config or RunConfig()
    cap = config.dim_cap
    conv1 = states.convolve_states(phi1, psi1, cap)
    conv2 = states.convolve_states(phi2, psi2, cap)
    p1, p2 = states.dedupe(phi1), states.dedupe(phi2)
    q1, q2 = states.dedupe(psi1), states.dedupe(psi2)

    if metric == "tensor":
        r_phi = distance_tensor(p1, p2, config)
        r_psi = distance_tensor(q1, q2, config)
        induced = 0.0
        for (i, j), w in np.ndenumerate(r_phi.plan):
            if w <= 0:
                continue
            for (k, l), v in np.ndenumerate(r_psi.plan):
                if v <= 0:
                    continue
                left = AtomicTrace(magic.convolve(p1.atoms[i].rep, q1.atoms[k].rep, cap))
                right = AtomicTrace(magic.convolve(p2.atoms[j].rep, q2.atoms[l].rep, cap))
                induced += w * v * atom_cost_hamming(left, right)
        direct = distance_tensor(conv1, conv2, config).upper
    else:
        r_phi, ch_phi = _distance_coupled(metric, p1, p2, config)
        r_psi, ch_psi = _distance_coupled(metric, q1, q2, config)
        induced = 0.0
        for (i, j), w in np.ndenumerate(r_phi.plan):
            if w <= 0:
                continue
            for (k, l), v in np.ndenumerate(r_psi.plan):
                if v <= 0:
                    continue
                induced += w * v * _convolved_coupling_cost(
                    ch_phi[i][j].coupling, ch_psi[k][l].coupling, metric, cap
                )
        direct = _distance_coupled(metric, conv1, conv2, config)[0].upper
    lhs = min(direct, induced)
    rhs = r_phi.upper + r_psi.upper
    return float(lhs), float(rhs)
