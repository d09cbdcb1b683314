"""Seeded property suite.

Every property draws its own corpus from ``RunConfig.seed`` and reports the
worst violation found, which passes when it is at most the tolerance.  Items
that would exceed the dimension cap are counted as skipped.  Tolerances can be
overridden per property name or per group (``eigen`` covers the spectral and
projection-lattice checks).
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import asdict, dataclass
from typing import Callable, Iterable

import numpy as np

from . import corpus, distances as dist, linalg, magic, states, transport
from .config import RunConfig
from .errors import DimensionOverflow


@dataclass
class PropertyResult:
    name: str
    status: str  # pass | fail | skipped
    worst: float
    tol: float
    checked: int
    skipped: int

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass(frozen=True)
class Property:
    name: str
    tol: float
    group: str | None
    items: Callable[[RunConfig], Iterable[Callable[[], float]]]


def _run(prop: Property, config: RunConfig) -> PropertyResult:
    tol = config.tol(prop.name, prop.tol, prop.group)
    worst, checked, skipped = 0.0, 0, 0
    for item in prop.items(config):
        try:
            r = float(item())
        except DimensionOverflow:
            skipped += 1
            continue
        checked += 1
        worst = max(worst, r) if np.isfinite(r) else np.inf
    if checked == 0:
        status = "skipped"
    else:
        status = "pass" if worst <= tol else "fail"
    return PropertyResult(prop.name, status, worst, tol, checked, skipped)


def _rng(config: RunConfig, tag: str) -> np.random.Generator:
    # independent stream per property so adding one does not shift the others
    key = [config.seed] + [ord(c) for c in tag]
    return np.random.default_rng(np.random.SeedSequence(key))


def _mixture_pairs(config: RunConfig, tag: str, count: int, ns=(2, 3, 4, 5)):
    rng = _rng(config, tag)
    for t in range(count):
        n = ns[t % len(ns)]
        yield corpus.random_mixture(rng, n), corpus.random_mixture(rng, n)


# -- transport -------------------------------------------------------------


def _ot_oracle(config):
    rng = _rng(config, "ot")
    for _ in range(500):
        m, k = (int(x) for x in rng.integers(1, 5, size=2))
        mu, nu = rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(k))
        if m > 1 and rng.random() < 0.3:
            mu[rng.integers(m)] = 0.0
            mu /= mu.sum()
        c = rng.random((m, k))
        if rng.random() < 0.3:
            c = np.round(c * 3) / 3  # ties
        yield lambda mu=mu, nu=nu, c=c: abs(
            transport.solve_ot(mu, nu, c)[1] - transport.brute_force_ot(mu, nu, c)
        )


def _hamming_metric(config):
    for n in (3, 4):
        perms = corpus.all_permutations(n)

        def item(perms=perms):
            h = {(s, t): transport.hamming(s, t) for s in perms for t in perms}
            bad = 0.0
            for s, t in h:
                bad = max(bad, abs(h[s, t] - h[t, s]), float((h[s, t] == 0) != (s == t)))
            for s, t, u in itertools.product(perms, repeat=3):
                bad = max(bad, h[s, u] - h[s, t] - h[t, u])
            return bad

        yield item


def _no_single_move(config):
    perms = corpus.all_permutations(4)
    yield lambda: float(
        any(abs(transport.hamming(s, t) - 0.25) < 1e-15 for s in perms for t in perms)
    )


def _ot_triangle(config):
    rng = _rng(config, "ot-triangle")
    for _ in range(50):
        pts = rng.random((6, 2))
        cost = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        ws = [rng.dirichlet(np.ones(6)) for _ in range(3)]

        def item(cost=cost, ws=ws):
            d = lambda a, b: transport.solve_ot(a, b, cost)[1]
            return d(ws[0], ws[2]) - d(ws[0], ws[1]) - d(ws[1], ws[2])

        yield item


# -- projection lattice ----------------------------------------------------


def _pairs(config, tag, count=200):
    rng = _rng(config, tag)
    for t in range(count):
        yield corpus.projection_pair(rng, 1 + t % 8)


def _trace_identity(config):
    for p, q in _pairs(config, "lattice-trace"):
        yield lambda p=p, q=q: abs(
            linalg.normalized_trace(linalg.join(p, q))
            + linalg.normalized_trace(linalg.meet(p, q))
            - linalg.normalized_trace(p)
            - linalg.normalized_trace(q)
        )


def _meet_axioms(config):
    rng = _rng(config, "lattice-axioms")
    for t in range(100):
        d = 1 + t % 8
        p, q = corpus.projection_pair(rng, d)
        r = linalg.random_projection(rng, d) if t % 2 else p.copy()

        def item(p=p, q=q, r=r):
            m = linalg.meet
            return max(
                np.max(np.abs(m(p, q) - m(q, p))),
                np.max(np.abs(m(p, p) - p)),
                np.max(np.abs(m(m(p, q), r) - m(p, m(q, r)))),
            )

        yield item


def _near_tangent(p, q) -> bool:
    cos2 = linalg.principal_cosines(p, q) ** 2
    return bool(np.any((cos2 > 1 - 1e-6) & (cos2 < linalg.MEET_SV_CUT**2)))


def _iteration_items(config, which):
    for p, q in _pairs(config, "lattice-iteration"):
        if _near_tangent(p, q):
            continue

        def item(p=p, q=q):
            exact = linalg.meet(p, q)
            approx, _ = linalg.meet_by_iteration(p, q)
            if which == "entries":
                return np.max(np.abs(exact - approx), initial=0.0)
            return abs(linalg.normalized_trace(exact) - linalg.normalized_trace(approx))

        yield item


def _tensor_vs_min(config):
    rng = _rng(config, "lattice-tensor")
    for t in range(200):
        d1, d2 = 1 + t % 3, 1 + (t // 3) % 3
        p1, p2 = corpus.projection_pair(rng, d1)
        q1, q2 = corpus.projection_pair(rng, d2)
        yield lambda p1=p1, p2=p2, q1=q1, q2=q2: np.max(
            np.abs(
                linalg.meet(np.kron(p1, q1), np.kron(p2, q2))
                - np.kron(linalg.meet(p1, p2), linalg.meet(q1, q2))
            )
        )


def _min_vs_sum(config):
    rng = _rng(config, "lattice-sum")
    for t in range(200):
        d = 1 + t % 8
        ps, qs = corpus.orthogonal_families(rng, d, 1 + t % 3)

        def item(ps=ps, qs=qs):
            whole = linalg.meet(sum(ps), sum(qs))
            parts = sum(linalg.meet(p, q) for p, q in zip(ps, qs))
            return max(0.0, -linalg.min_eigenvalue(whole - parts))

        yield item


def _powers_stormer(config):
    for p, q in _pairs(config, "lattice-ps"):
        yield lambda p=p, q=q: linalg.hs_norm_sq(p - q) - linalg.trace_norm(p - q)


# -- magic / states --------------------------------------------------------


def _row_orthogonality(config):
    rng = _rng(config, "magic-rows")
    for t in range(50):
        m = corpus.random_rep(rng, (2, 3, 4, 5)[t % 4], 3)

        def item(m=m):
            worst = 0.0
            for i in range(m.n):
                for j, k in itertools.permutations(range(m.n), 2):
                    worst = max(worst, np.max(np.abs(m.grid[i, j] @ m.grid[i, k])))
                    worst = max(worst, np.max(np.abs(m.grid[j, i] @ m.grid[k, i])))
            return worst

        yield item


def _group_law(config):
    perms = corpus.all_permutations(3)
    for s, t in itertools.product(perms, repeat=2):

        def item(s=s, t=t):
            conv = magic.convolve(magic.from_permutation(3, s), magic.from_permutation(3, t))
            expected = tuple(t[s[i]] for i in range(3))
            return float(magic.classical_permutation(conv) != expected)

        yield item


def _coassociativity(config):
    rng = _rng(config, "magic-coassoc")
    cap = config.dim_cap
    for t in range(20):
        n = (2, 3, 4, 5)[t % 4]
        a, b, c = (corpus.random_rep(rng, n) for _ in range(3))
        yield lambda a=a, b=b, c=c: np.max(
            np.abs(
                magic.convolve(magic.convolve(a, b, cap), c, cap).omega()
                - magic.convolve(a, magic.convolve(b, c, cap), cap).omega()
            )
        )


def _birkhoff_product(config):
    for phi, psi in _mixture_pairs(config, "states-birkhoff", 30):
        yield lambda phi=phi, psi=psi: np.max(
            np.abs(
                states.birkhoff(states.convolve_states(phi, psi, config.dim_cap))
                - states.birkhoff(phi) @ states.birkhoff(psi)
            )
        )


def _word_conjugation(config):
    rng = _rng(config, "states-conj")
    for t in range(30):
        n = (2, 3, 4, 5)[t % 4]
        m = corpus.random_rep(rng, n)
        u = linalg.haar_unitary(rng, m.d)
        words = states.word_corpus(n, 2, 50, 3, config.seed)

        def item(m=m, u=u, words=words):
            a, b = states.point_mass(m), states.point_mass(magic.conjugate(m, u))
            return max(abs(states.word_value(a, w) - states.word_value(b, w)) for w in words)

        yield item


def _classical_words(config):
    rng = _rng(config, "states-classical")
    for t in range(20):
        n = (3, 4)[t % 2]
        phi = corpus.random_classical_measure(rng, n)
        words = states.word_corpus(n, 2, 50, 3, config.seed)

        def item(phi=phi, words=words):
            supp = states.classical_support(phi)
            worst = 0.0
            for w in words:
                direct = sum(wt for wt, s in supp if all(s[i] == j for i, j in w))
                worst = max(worst, abs(states.evaluate_word(phi, w) - direct))
            return worst

        yield item


# -- distances -------------------------------------------------------------


def _classical_recovery(config):
    rng = _rng(config, "recovery")
    for t in range(100):
        n = (3, 4)[t % 2]
        phi = corpus.random_classical_measure(rng, n)
        psi = corpus.random_classical_measure(rng, n)

        def item(phi=phi, psi=psi):
            w1 = transport.classical_w1(states.classical_support(phi), states.classical_support(psi))
            reps = dist.all_distances(phi, psi, config)
            return max(max(abs(r.upper - w1), abs(r.lower - w1)) for r in reps.values())

        yield item


def _hand_instances():
    rng = np.random.default_rng(7)
    tb = corpus.random_two_block(rng, relabel=False)
    e4 = magic.from_permutation(4, range(4))
    return tb, e4


def _self_distance(config):
    tb, e4 = _hand_instances()
    single = states.point_mass(tb)
    half = states.mixture([(0.5, tb), (0.5, e4)])
    yield lambda: abs(dist.self_distance_tensor(single) - 0.5)
    yield lambda: abs(dist.self_distance_tensor(half) - 0.25)
    for phi, _ in _mixture_pairs(config, "tensor-self", 40):
        yield lambda phi=phi: abs(
            dist.distance_tensor(phi, phi, config).upper - dist.self_distance_tensor(phi)
        )


def _self_bound(config):
    for phi, psi in _mixture_pairs(config, "tensor-selfbound", 40):
        yield lambda phi=phi, psi=psi: (
            0.5 * dist.self_distance_tensor(phi)
            + 0.5 * dist.self_distance_tensor(psi)
            - dist.distance_tensor(phi, psi, config).upper
        )


def _triples(config, tag, count):
    rng = _rng(config, tag)
    for t in range(count):
        n = (2, 3, 4, 5)[t % 4]
        yield tuple(corpus.random_mixture(rng, n) for _ in range(3))


def _tensor_symmetry(config):
    for a, b, _ in _triples(config, "tensor-metric", 100):
        yield lambda a=a, b=b: abs(
            dist.distance_tensor(a, b, config).upper - dist.distance_tensor(b, a, config).upper
        )


def _tensor_triangle(config):
    for a, b, c in _triples(config, "tensor-metric", 100):

        def item(a=a, b=b, c=c):
            d = lambda x, y: dist.distance_tensor(x, y, config).upper
            pointwise = max(
                dist.atom_cost_hamming(x, z) - dist.atom_cost_hamming(x, y) - dist.atom_cost_hamming(y, z)
                for x in a.atoms
                for y in b.atoms
                for z in c.atoms
            )
            return max(pointwise, d(a, c) - d(a, b) - d(b, c))

        yield item


def _gap_identity(config):
    tb, e4 = _hand_instances()
    e, atom = states.point_mass(e4), states.point_mass(tb)
    yield lambda: max(abs(x - 0.25) for x in dist.birkhoff_gap_identity(e, atom, config))
    for phi, psi in _mixture_pairs(config, "tensor-gap", 50):
        yield lambda phi=phi, psi=psi: abs(np.subtract(*dist.birkhoff_gap_identity(phi, psi, config)))


def _chain_corpus(config):
    return list(_mixture_pairs(config, "chain", 40))


def _pointwise_chain(config):
    for phi, psi in _chain_corpus(config):
        for a in phi.atoms:
            for b in psi.atoms:
                yield lambda a=a, b=b: (
                    dist.atom_cost_l1(a, b, config.dim_cap) - dist.atom_cost_hamming(a, b)
                )


def _report_chain(config):
    for phi, psi in _chain_corpus(config):

        def item(phi=phi, psi=psi):
            r = dist.all_distances(phi, psi, config)
            return max(
                r["l1"].lower - r["l1"].upper,
                r["l1"].upper - r["free"].upper,
                r["free"].upper - r["tensor"].upper,
                r["tensor"].upper - 1.0,
                -r["l1"].lower,
            )

        yield item


def _distance_one_forward(config):
    rng = _rng(config, "distance-one")
    cases = [
        (states.classical(2, [[0, 1]]), states.classical(2, [[1, 0]])),
    ]
    cases += [corpus.disjoint_pair(rng, (2, 3, 4, 5)[t % 4]) for t in range(20)]
    for phi, psi in cases:

        def item(phi=phi, psi=psi):
            if not dist.check_distance_one(phi, psi):
                return np.inf
            r = dist.all_distances(phi, psi, config)
            return max(max(abs(x.upper - 1), abs(x.lower - 1)) for x in r.values())

        yield item


def _distance_one_converse(config):
    for phi, psi in _mixture_pairs(config, "distance-one-random", 100):

        def item(phi=phi, psi=psi):
            inner = float(np.sum(states.birkhoff(phi) * states.birkhoff(psi)))
            upper = dist.distance_tensor(phi, psi, config).upper
            flagged = dist.check_distance_one(phi, psi)
            if flagged and upper < 1 - 1e-9:
                return np.inf
            return inner if upper >= 1 - 1e-12 else 0.0

        yield item


def _subadditivity(metric):
    def items(config):
        rng = _rng(config, "convolution-" + metric)
        for t in range(25):
            n = (2, 3, 4)[t % 3]
            quad = [corpus.random_mixture(rng, n, max_atoms=2) for _ in range(4)]
            yield lambda quad=quad: np.subtract(
                *dist.check_convolution_subadditivity(*quad, metric, config)
            )

    return items


def _words_lipschitz(config):
    yield lambda: abs(
        dist.lower_bound_words(states.classical(2, [[0, 1]]), states.classical(2, [[1, 0]]), config)
        - 0.25
    )
    for phi, psi in _chain_corpus(config):
        yield lambda phi=phi, psi=psi: (
            dist.lower_bound_words(phi, psi, config) - dist.distance_l1(phi, psi, config).upper
        )


def _tv_bound(config):
    rng = _rng(config, "tv")
    for t in range(30):
        n = (3, 4)[t % 2]
        phi, psi = corpus.random_classical_measure(rng, n), corpus.random_classical_measure(rng, n)
        yield lambda phi=phi, psi=psi: (
            dist.distance_free(phi, psi, config).upper - dist.tv_upper_bound_classical(phi, psi)
        )


# -- operator certificates ---------------------------------------------------


def _operator(kind):
    def items(config):
        for tup in corpus.operator_tuples(config.seed, 60):
            if kind == "psd":
                yield lambda t=tup: max(
                    0.0, -dist.build_cost_operator(t[0], t[1], config.dim_cap).min_eigenvalue
                )
            elif kind == "triangle":
                yield lambda t=tup: max(
                    0.0, -dist.check_triangle_operator(t[0], t[1], t[2], config.dim_cap)
                )
            else:
                yield lambda t=tup: max(0.0, -dist.check_comult_inequality(*t, config.dim_cap))

    return items


PROPERTIES: tuple[Property, ...] = (
    Property("chain.pointwise_cost", 1e-9, None, _pointwise_chain),
    Property("chain.reports", 1e-9, None, _report_chain),
    Property("convolution.group_law", 0.0, None, _group_law),
    Property("convolution.subadditivity_free", 1e-8, None, _subadditivity("free")),
    Property("convolution.subadditivity_l1", 1e-8, None, _subadditivity("l1")),
    Property("convolution.subadditivity_tensor", 1e-8, None, _subadditivity("tensor")),
    Property("distance_one.converse", 1e-8, None, _distance_one_converse),
    Property("distance_one.forward", 1e-9, None, _distance_one_forward),
    Property("distances.classical_recovery", 1e-8, None, _classical_recovery),
    Property("distances.tv_bound", 1e-8, None, _tv_bound),
    Property("lattice.meet_axioms", 1e-7, "eigen", _meet_axioms),
    Property("lattice.meet_iteration_entries", 1e-4, "eigen", lambda c: _iteration_items(c, "entries")),
    Property("lattice.meet_iteration_trace", 1e-6, "eigen", lambda c: _iteration_items(c, "trace")),
    Property("lattice.min_vs_sum", 1e-8, "eigen", _min_vs_sum),
    Property("lattice.powers_stormer", 1e-9, "eigen", _powers_stormer),
    Property("lattice.tensor_vs_min", 1e-7, "eigen", _tensor_vs_min),
    Property("lattice.trace_identity", 1e-8, "eigen", _trace_identity),
    Property("magic.coassociativity", 1e-10, None, _coassociativity),
    Property("magic.row_orthogonality", 1e-7, None, _row_orthogonality),
    Property("operator.comult", 1e-9, "eigen", _operator("comult")),
    Property("operator.cost_psd", 1e-9, "eigen", _operator("psd")),
    Property("operator.triangle", 1e-9, "eigen", _operator("triangle")),
    Property("states.birkhoff_product", 1e-9, None, _birkhoff_product),
    Property("states.classical_words", 1e-12, None, _classical_words),
    Property("states.word_conjugation", 1e-10, None, _word_conjugation),
    Property("tensor.gap_identity", 1e-8, None, _gap_identity),
    Property("tensor.self_distance", 1e-9, None, _self_distance),
    Property("tensor.self_lower_bound", 1e-8, None, _self_bound),
    Property("tensor.symmetry", 1e-10, None, _tensor_symmetry),
    Property("tensor.triangle", 1e-8, None, _tensor_triangle),
    Property("transport.hamming_metric", 0.0, None, _hamming_metric),
    Property("transport.no_single_move", 0.0, None, _no_single_move),
    Property("transport.ot_oracle", 1e-9, None, _ot_oracle),
    Property("transport.triangle", 1e-8, None, _ot_triangle),
    Property("words.lipschitz", 1e-8, None, _words_lipschitz),
)

PROPERTY_NAMES = tuple(p.name for p in PROPERTIES)


def run_property(name: str, config: RunConfig | None = None) -> PropertyResult:
    config = config or RunConfig()
    for p in PROPERTIES:
        if p.name == name:
            return _run(p, config)
    raise KeyError(name)


def run_suite(config: RunConfig | None = None, only: Iterable[str] | None = None) -> list[PropertyResult]:
    config = config or RunConfig()
    wanted = None if only is None else set(only)
    chosen = [p for p in PROPERTIES if wanted is None or p.name in wanted]
    return sorted((_run(p, config) for p in chosen), key=lambda r: r.name)


def report_json(results: list[PropertyResult], config: RunConfig) -> str:
    obj = {
        "seed": config.seed,
        "dim_cap": config.dim_cap,
        "passed": all(r.ok for r in results),
        "properties": [
            {**asdict(r), "worst": _fmt(r.worst), "tol": _fmt(r.tol)} for r in results
        ],
    }
    return json.dumps(obj, indent=2, sort_keys=True)


def report_csv(results: list[PropertyResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "status", "worst", "tol", "checked", "skipped"])
    for r in results:
        w.writerow([r.name, r.status, _fmt(r.worst), _fmt(r.tol), r.checked, r.skipped])
    return buf.getvalue()


def report_table(results: list[PropertyResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        extra = f"  ({r.skipped} skipped)" if r.skipped else ""
        lines.append(
            f"{r.status.upper():7s} {r.name:<{width}}  worst={_fmt(r.worst)}  tol={_fmt(r.tol)}{extra}"
        )
    return "\n".join(lines)


def _fmt(x: float) -> str:
    return "inf" if not np.isfinite(x) else f"{x:.3e}"
