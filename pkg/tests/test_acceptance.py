"""Acceptance criteria, each at its stated parameters and tolerance.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""

from __future__ import annotations

import time

import pytest

from toda_whittaker.verification import (
    suite_confluence,
    suite_counts,
    suite_dde,
    suite_pde,
    suite_residues,
    suite_univariate,
)


def timed(fn, **kw):
    t0 = time.perf_counter()
    records = fn(**kw)
    return records, time.perf_counter() - t0


@pytest.fixture(scope="module")
def univariate():
    return timed(suite_univariate)


@pytest.fixture(scope="module")
def pde():
    return timed(suite_pde, ns=(2, 3), draws=10, M=30, tol=1e-8, growth_M=35)


@pytest.fixture(scope="module")
def dde():
    return timed(suite_dde, cases=((2, (1, 2)), (3, (1, 2, 3))), draws=5, M=30, tol=1e-8, sum_rule_draws=50, tol_sum_rule=1e-12)


@pytest.fixture(scope="module")
def confluence():
    return timed(suite_confluence, ns=(1, 2), c_grid=(4.0, 6.0, 8.0), scaling_c=(6.0, 10.0), ratio=10.0)


def select(records, *needles):
    return [r for r in records if all(s in r.check for s in needles)]


def worst(records):
    vals = [abs(complex(r.value)) for r in records]
    return max(vals) if vals else float("nan")


def conclude(log, key, records, *, runtime=None, limit=None, detail=""):
    assert records, f"{key}: no checks were produced"
    failed = [r for r in records if not r.passed]
    slow = limit is not None and runtime is not None and runtime >= limit
    ok = not failed and not slow
    text = f"{len(records) - len(failed)}/{len(records)} checks"
    if runtime is not None:
        text += f", {runtime:.2f} s" + (f" (limit {limit:g} s)" if limit is not None else "")
    if detail:
        text += f", {detail}"
    if failed:
        text += "; first failure: " + f"{failed[0].check} value {abs(complex(failed[0].value)):.4g} vs {failed[0].threshold:g}"
    log[key] = (ok, text)
    print(f"{'PASS' if ok else 'FAIL'} {key}: {text}")
    if failed or slow:
        pytest.fail(f"{key}: {text}", pytrace=False)


def test_c1_univariate_equivalence(univariate, acceptance_log):
    records, _ = univariate
    rows = select(records, "Kummer form")
    assert len(rows) == 20
    ms = sum(r.millis for r in rows) / 1e3
    conclude(acceptance_log, "C1", rows, runtime=ms, limit=1.0, detail=f"max rel {worst(rows):.2e} (tol 1e-10)")


def test_c2_bessel_reduction(univariate, acceptance_log):
    records, _ = univariate
    rows = select(records, "Macdonald")
    assert len(rows) == 20
    conclude(acceptance_log, "C2", rows, detail=f"max rel {worst(rows):.2e} (tol 1e-8)")


def test_c3_pde_residual(pde, acceptance_log):
    records, _ = pde
    rows = select(records, "eigenvalue equation of the series")
    assert {r.params["n"] for r in rows} == {2, 3} and len(rows) == 20
    ms = sum(r.millis for r in rows) / 1e3
    conclude(acceptance_log, "C3", rows, runtime=ms, limit=30.0, detail=f"max residual {worst(rows):.2e} (tol 1e-8)")


def test_c4_dual_difference_equations(dde, acceptance_log):
    records, _ = dde
    rows = select(records, "difference equation D_")
    assert len(rows) == 5 * 2 + 5 * 3
    n3 = sum(r.millis for r in rows if r.params["n"] == 3) / 1e3
    conclude(acceptance_log, "C4", rows, runtime=n3, limit=300.0, detail=f"max residual {worst(rows):.2e} (tol 1e-8)")


def test_c5_sum_rule(dde, acceptance_log):
    records, _ = dde
    rows = select(records, "sum rule")
    assert len(rows) == 50
    conclude(acceptance_log, "C5", rows, detail=f"max defect {worst(rows):.2e} (tol 1e-12)")


def test_c6_residue_vanishing(acceptance_log):
    rows, runtime = timed(suite_residues, ms=(1, 2, 3), prec=128, tol=1e-6, slope_tol=0.2)
    kinds = {(r.params["kind"], r.params["m"]) for r in rows}
    assert kinds == {(k, m) for k in ("single", "pair") for m in (1, 2, 3)}
    conclude(acceptance_log, "C6", rows, runtime=runtime, limit=120.0)


def test_c7_cone_counts(acceptance_log):
    rows = suite_counts(ns=(1, 2, 3, 4), M=20)
    assert len(rows) == 4 * 21
    conclude(acceptance_log, "C7", rows, detail="exact")


def test_c8_coefficient_growth(pde, acceptance_log):
    records, _ = pde
    rows = select(records, "coefficient growth")
    assert {r.params["n"] for r in rows} == {1, 2, 3}
    conclude(acceptance_log, "C8", rows, detail=f"max |a_nu| m!/A^m {worst(rows):.3g} (<= 1)")


def test_c9_confluence(confluence, acceptance_log):
    records, _ = confluence
    rows = select(records, "decreases")
    assert len(rows) == 3 * 2
    ms = sum(r.millis for r in rows) / 1e3
    conclude(acceptance_log, "C9", rows, runtime=ms, limit=300.0)


@pytest.mark.parametrize("n", [1, 2])
def test_c10_coefficient_scaling_limits(confluence, acceptance_log, n):
    records, _ = confluence
    rows = [r for r in select(records, "limit", f"(n={n})") if not r.check.startswith("c-function")]
    assert {r.check.split()[0] for r in rows} == {"V", "U", "E"}
    low = min(abs(complex(r.value)) for r in rows)
    conclude(acceptance_log, f"C10[n={n}]", rows, detail=f"smallest error ratio {low:.3g} (need >= 10)")


def test_c11_invariance_and_plane_waves(pde, acceptance_log):
    records, _ = pde
    rows = select(records, "invariance") + select(records, "plane-wave")
    assert select(records, "invariance") and select(records, "plane-wave")
    conclude(acceptance_log, "C11", rows)
