"""Acceptance gate: every stated quantitative and property criterion.

Each test runs one criterion at its stated tolerance and prints a single
pass/fail line, so a bare ``pytest -s tests/test_acceptance.py`` doubles
as the sign-off report.
"""
import numpy as np

from curved3body import verification as ver


def _report(name, result, extra_ok=True, extra_note=""):
    ok = result.passed and extra_ok
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {result.detail}"
    if extra_note:
        line += f" ({extra_note})"
    print(line)
    assert ok, line


def test_criterion_1_fixed_point_locations():
    """Two known fixed points to 1e-6, classified center/saddle, under 1 s."""
    res = ver.run_checks(["fixed-points"])[0]
    _report("fixed-point locations", res, extra_ok=res.elapsed < 1.0,
            extra_note=f"{res.elapsed:.3f}s < 1s")


def test_criterion_2_resultant_identity():
    """Sylvester resultant matches the closed form to 1e-9, under 1 s."""
    res = ver.run_checks(["resultant"], trials=100)[0]
    _report("resultant identity", res, extra_ok=res.elapsed < 1.0,
            extra_note=f"{res.elapsed:.3f}s < 1s")


def test_criterion_3_fixed_point_counts():
    """Count laws over 500 random triples per regime, Sturm-certified."""
    res = ver.run_checks(["counts"], trials=500)[0]
    _report("fixed-point counts", res)


def test_criterion_4_conservation():
    """20 random states, 10 time units: drifts < 1e-8, residuals < 1e-10,
    under 30 s."""
    res = ver.run_checks(["conservation"])[0]
    _report("conservation", res, extra_ok=res.elapsed < 30.0,
            extra_note=f"{res.elapsed:.1f}s < 30s")


def test_criterion_5_reduced_vs_full():
    """r(t) agreement within 1e-6 over 5 units, 20 embeddings per family."""
    res = ver.run_checks(["reduced-vs-full"])[0]
    _report("reduced vs full", res)


def test_criterion_6_equilibrium_and_taxonomy():
    """Equator equilateral equilibrium plus the six portrait facts."""
    res = ver.run_checks(["taxonomy"])[0]
    _report("equilibrium and taxonomy", res)


def test_criterion_7_mass_equality_obstruction():
    """Distinct masses leave residuals above the gap bound; equal vanish."""
    res = ver.run_checks(["unequal-mass"], trials=100)[0]
    _report("mass-equality obstruction", res)


def test_criterion_8_hyperbolic_relative_equilibrium():
    """Rate formula balances the geodesic to 1e-9; perturbations break it."""
    res = ver.run_checks(["hyperbolic"], trials=20)[0]
    _report("hyperbolic relative equilibrium", res)


def test_criterion_9_linearized_periods():
    """detect_period within 5% of 2*pi/|Im lambda| for 1e-3 offsets."""
    res = ver.run_checks(["period"])[0]
    _report("linearized periods", res)
