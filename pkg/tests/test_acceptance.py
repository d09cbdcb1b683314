"""Acceptance criteria, one test each, with pinned tolerances and runtime budgets.

Each test prints one ``PASS``/``FAIL`` line.  Run directly for a compact table:
``python3 tests/test_acceptance.py``.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from qhamming import distances as dist, magic, states, suite
from qhamming.config import RunConfig

CONFIG = RunConfig(seed=0)


_reporter = None


@pytest.fixture(autouse=True)
def _terminal(request):
    global _reporter
    _reporter = request.config.pluginmanager.getplugin("terminalreporter")
    yield


def _emit(line: str):
    # written through the terminal reporter so the line survives output capture
    if _reporter is not None:
        _reporter.write_line(line)
    else:
        print(line)


def _criterion(label, props, budget, extra=()):
    """Run suite properties plus explicit checks; returns (ok, message)."""
    start = time.perf_counter()
    results = [suite.run_property(p, CONFIG) for p in props]
    checks = [fn() for fn in extra]
    elapsed = time.perf_counter() - start
    ok = all(r.status == "pass" for r in results) and all(c[0] for c in checks) and elapsed < budget
    parts = [f"{r.name} worst={r.worst:.2e} tol={r.tol:.0e} n={r.checked}" for r in results]
    parts += [c[1] for c in checks]
    _emit(f"{'PASS' if ok else 'FAIL'} {label}: {'; '.join(parts)}; runtime {elapsed:.1f}s < {budget}s")
    return ok, results


def _hand_two_block():
    rng = np.random.default_rng(2024)
    p = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    q = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    proj = lambda v: np.outer(v, v.conj()) / np.vdot(v, v)
    return magic.two_block(proj(p), proj(q)), magic.from_permutation(4, range(4))


def _self_hand():
    tb, e = _hand_two_block()
    single = dist.self_distance_tensor(states.point_mass(tb))
    half_state = states.mixture([(0.5, tb), (0.5, e)])
    half = dist.self_distance_tensor(half_state)
    via_ot = dist.distance_tensor(half_state, half_state, CONFIG).upper
    ok = abs(single - 0.5) <= 1e-9 and abs(half - 0.25) <= 1e-9 and abs(via_ot - 0.25) <= 1e-9
    return ok, f"hand self-distances {single:.12f}, {half:.12f} (expect 0.5, 0.25)"


def _gap_hand():
    tb, e = _hand_two_block()
    lhs, rhs = dist.birkhoff_gap_identity(states.point_mass(e), states.point_mass(tb), CONFIG)
    ok = abs(lhs - 0.25) <= 1e-8 and abs(rhs - 0.25) <= 1e-8
    return ok, f"hand gap lhs={lhs:.12f} rhs={rhs:.12f} (expect 0.25)"


def _words_hand():
    e, t = states.classical(2, [[0, 1]]), states.classical(2, [[1, 0]])
    bound = dist.lower_bound_words(e, t, CONFIG)
    upper = dist.distance_l1(e, t, CONFIG).upper
    ok = abs(bound - 0.25) <= 1e-12 and bound <= upper + 1e-8 and abs(upper - 1.0) <= 1e-9
    return ok, f"S_2 bound {bound:.3f} <= l1 upper {upper:.3f}"


def test_a01_classical_recovery():
    ok, _ = _criterion("A1 classical recovery", ["distances.classical_recovery"], 5)
    assert ok


def test_a02_ot_oracle():
    ok, _ = _criterion("A2 OT oracle equivalence", ["transport.ot_oracle"], 5)
    assert ok


def test_a03_operator_certificates():
    ok, results = _criterion(
        "A3 operator certificates",
        ["operator.cost_psd", "operator.triangle", "operator.comult"],
        60,
    )
    assert all(r.checked >= 50 for r in results)
    assert ok


def test_a04_projection_lattice():
    ok, _ = _criterion(
        "A4 projection lattice",
        ["lattice.trace_identity", "lattice.tensor_vs_min", "lattice.min_vs_sum", "lattice.powers_stormer"],
        10,
    )
    assert ok


def test_a05_tensor_metric_axioms():
    ok, _ = _criterion(
        "A5 tensor metric axioms",
        ["tensor.symmetry", "tensor.triangle", "tensor.self_distance"],
        30,
        extra=[_self_hand],
    )
    assert ok


def test_a06_birkhoff_gap_identity():
    ok, _ = _criterion("A6 Birkhoff gap identity", ["tensor.gap_identity"], 30, extra=[_gap_hand])
    assert ok


def test_a07_comparison_chain():
    ok, _ = _criterion(
        "A7 comparison chain",
        ["chain.pointwise_cost", "chain.reports", "distance_one.forward", "distance_one.converse"],
        30,
    )
    assert ok


def test_a08_convolution():
    ok, _ = _criterion(
        "A8 convolution",
        [
            "convolution.group_law",
            "convolution.subadditivity_free",
            "convolution.subadditivity_l1",
            "convolution.subadditivity_tensor",
        ],
        60,
    )
    assert ok


def test_a09_lipschitz_word_bound():
    ok, _ = _criterion("A9 Lipschitz word bound", ["words.lipschitz"], 10, extra=[_words_hand])
    assert ok


def _suite_run():
    env = dict(os.environ)
    env.pop("QHAMMING_SEED", None)
    out = subprocess.run(
        [sys.executable, "-m", "qhamming", "suite", "--json", "--seed", "0"],
        capture_output=True,
        env=env,
    )
    return out.returncode, out.stdout


@pytest.mark.slow
def test_a10_determinism():
    start = time.perf_counter()
    code1, first = _suite_run()
    code2, second = _suite_run()
    elapsed = time.perf_counter() - start
    ok = first == second and code1 == 0 and code2 == 0 and len(first) > 0
    _emit(
        f"{'PASS' if ok else 'FAIL'} A10 determinism: two suite runs, {len(first)} bytes, "
        f"identical={first == second}, exit codes {code1},{code2}; runtime {elapsed:.1f}s"
    )
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
