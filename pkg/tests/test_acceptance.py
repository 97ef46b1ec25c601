"""Acceptance criteria, one test and one printed pass/fail line each.

Caches are cleared before every criterion so the reported runtimes are cold.
"""

import importlib
import time

from bergman_model import model, oracle
from bergman_model.checks import CHECKS, NUM_SEEDS, PROPERTY_CASES, run_check
from bergman_model.rules import RULES

from conftest import ACCEPTANCE_LINES

SEED = 42
# the package namespace re-exports the tensor() constructor under the module's name
tensor = importlib.import_module("bergman_model.tensor")


def _cold():
    model.kernel_of.cache_clear()
    oracle.fock_basis.cache_clear()
    tensor._canonical.cache_clear()
    tensor._canonical_connected.cache_clear()


def _run(plan):
    """Run (check, n, D) triples; return verdicts and wall time."""
    _cold()
    t0 = time.perf_counter()
    verdicts = [run_check(name, n, SEED, D=D) for name, n, D in plan]
    return verdicts, time.perf_counter() - t0


def _report(tag, title, verdicts, seconds, budget, extra=""):
    failed = [f"{v.check}@n={v.n}" + (f" ({v.detail})" if v.detail else "") for v in verdicts if not v.passed]
    worst = max((v.residual for v in verdicts), default=0.0)
    ok = not failed and (budget is None or seconds < budget)
    limit = f"budget {budget:g} s" if budget else "no time budget"
    line = (f"{'PASS' if ok else 'FAIL'}  {tag} {title}: {len(verdicts)} checks, worst residual "
            f"{worst:.2e}, {seconds:.1f} s ({limit}){extra}")
    if failed:
        line += "; failing: " + ", ".join(failed)
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, failed


def _assert(ok, failed, seconds, budget):
    assert not failed, failed
    if budget is not None:
        assert seconds < budget, f"{seconds:.1f} s exceeds {budget} s"


def test_c1_spectral_facts():
    plan = [("laplacian-spectrum", 1, 10), ("laplacian-spectrum", 2, 8),
            ("basis-orthonormality", 1, None), ("basis-orthonormality", 2, None)]
    vs, sec = _run(plan)
    assert [v.tol for v in vs] == [1e-8, 1e-8, 1e-10, 1e-10]
    ok, failed = _report("C1", "spectral facts", vs, sec, 5)
    _assert(ok, failed, sec, 5)


def test_c2_reduction_rules():
    plan = [(r.name, n, None) for r in RULES for n in (1, 2)]
    vs, sec = _run(plan)
    ok, failed = _report("C2", "reduction-rule regression (exact)", vs, sec, 10)
    _assert(ok, failed, sec, 10)


def test_c3_first_order_derivatives_vanish():
    vs, sec = _run([("f1-first-order", n, None) for n in (1, 2, 3)])
    assert NUM_SEEDS >= 5 and all(v.tol == 1e-10 for v in vs)
    ok, failed = _report("C3", "first-order coefficient has zero first derivatives", vs, sec, 10,
                         f", {NUM_SEEDS} seeds each")
    _assert(ok, failed, sec, 10)


TERM_TABLES = ["two-form-i1", "two-form-i3", "two-form-i5", "two-form-i6", "two-form-i2-unsubstituted",
               "two-form-i2", "two-form-i4"] + [f"two-form-i2{j}" for j in range(1, 7)]


def test_c4_second_order_two_form():
    plan = [("f2-two-form", n, None) for n in (1, 2, 3)]
    plan += [(name, n, None) for name in TERM_TABLES for n in (1, 2, 3)]
    vs, sec = _run(plan)
    assert all(v.tol <= 1e-9 for v in vs)
    ok, failed = _report("C4", "second-order two-form equals b1 omega, per-term tables", vs, sec, 60)
    _assert(ok, failed, sec, 60)


def test_c5_diagonal_consistency():
    plan = [("f2-origin-value", n, None) for n in (1, 2, 3)] + [("f1-origin-zero", n, None) for n in (1, 2, 3)]
    vs, sec = _run(plan)
    ok, failed = _report("C5", "diagonal values (second order is b1, first order is zero)", vs, sec, None)
    _assert(ok, failed, sec, None)


ORACLE_TERMS = ["oracle-f1"] + [f"oracle-i{k}" for k in range(1, 7)] + [f"oracle-i2{j}" for j in range(1, 8)]


def test_c6_oracle_equivalence():
    vs, sec = _run([(name, n, None) for name in ORACLE_TERMS for n in (1, 2)])
    assert all(v.tol <= 1e-9 for v in vs)
    ok, failed = _report("C6", "oracle equivalence of defining expressions and kernels", vs, sec, 120)
    _assert(ok, failed, sec, 120)


PROPERTIES = [
    "adjoint-involution", "adjoint-antihomomorphism", "projection-idempotent", "compose-associative",
    "f1-f2-parity", "phi-independence", "ddj-independence", "normal-form-confluence",
    "normal-form-roundtrip", "projection-kills-inverse", "inverse-laplacian-identity", "compose-with-projector",
]


def test_c7_structural_properties():
    assert set(PROPERTIES) <= set(CHECKS) and PROPERTY_CASES >= 100
    vs, sec = _run([(name, n, None) for name in PROPERTIES for n in (1, 2)])
    ok, failed = _report("C7", "structural property suite", vs, sec, None,
                         f", {PROPERTY_CASES} random cases per property")
    _assert(ok, failed, sec, None)
