"""Verification harness plumbing (the checks themselves run in acceptance)."""
import pytest

from curved3body import verification as ver


def test_registry_names_are_stable():
    assert set(ver.ALL_CHECKS) == {
        "fixed-points", "resultant", "counts", "conservation",
        "reduced-vs-full", "taxonomy", "unequal-mass", "hyperbolic", "period",
    }


def test_unknown_check_name_raises():
    with pytest.raises(KeyError):
        ver.run_checks(["no-such-check"])


def test_trials_and_seed_forwarding():
    r1 = ver.run_checks(["resultant"], trials=10, seed=9)[0]
    r2 = ver.run_checks(["resultant"], trials=10, seed=9)[0]
    assert r1.passed and r2.passed
    assert r1.detail == r2.detail  # same seed, same draws
    assert "10 triples" in r1.detail


def test_presets_cover_all_figures():
    assert set(ver.FIGURE_PRESETS) == set(ver.PORTRAIT_WINDOWS)
    for kind, kappa, c, m in ver.FIGURE_PRESETS.values():
        assert kind in ("LAGRANGIAN", "EULERIAN")
        assert kappa != 0 and m > 0 and c > 0
