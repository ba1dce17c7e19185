"""Randomized predicate suites and slack calibration, both models."""

import numpy as np
import pytest

from hypwalk.models import get_model
from hypwalk.suites import (
    calibrate_constants,
    conjugacy_suite,
    product_bound_suite,
    quasigeodesic_suite,
    run_all_suites,
    shadow_member,
)

free = get_model("free")
farey = get_model("farey")


def test_calibration_deterministic_and_exact_for_tree():
    c1 = calibrate_constants(free, seed=33, instances=300)
    c2 = calibrate_constants(free, seed=33, instances=300)
    assert c1 == c2
    assert c1["nested_separation"] == 0.0
    assert c1["shadow_complement"] == 0.5  # closed shadows tie at integers
    assert c1["four_point_defect"] == 0.0
    assert c1["conjugator_slack"] <= 2.0


def test_full_battery_free():
    constants = calibrate_constants(free, seed=35, instances=300)
    results = run_all_suites(free, instances=1500, seed=36, constants=constants)
    assert {r.name for r in results} >= {
        "gromov_product", "shadow_monotonicity", "product_bound", "metric_nest",
        "shadow_composition", "nested_separation", "basepoint_change",
        "shadow_complement", "quasigeodesic_conjugator",
        "conjugacy_shadow_conditions",
    }
    for r in results:
        assert r.failures == 0, r


def test_full_battery_farey():
    constants = calibrate_constants(farey, seed=37, instances=300)
    results = run_all_suites(farey, instances=1500, seed=38, constants=constants)
    for r in results:
        assert r.failures == 0, r


def test_product_bound_ten_thousand_instances_farey():
    rng = np.random.default_rng(39)
    result = product_bound_suite(farey, 10_000, rng)
    assert result.instances == 10_000
    assert result.failures == 0


def test_shadow_member_helper_is_actually_a_member():
    from hypwalk.hypgeom import Shadow, in_shadow

    rng = np.random.default_rng(40)
    for model, radius in ((free, 15), (farey, 6)):
        for _ in range(100):
            z = model.sample_element(rng, 4)
            x = model.sample_element(rng, radius)
            d = model.distance(z, x)
            if d < 1:
                continue
            r = float(rng.integers(0, min(int(d), 4) + 1))
            y = shadow_member(model, rng, z, x, r)
            assert in_shadow(model, Shadow(z, x, r), y)


def test_quasigeodesic_suite_rejects_farey():
    from hypwalk.errors import UnsatisfiableConfigError

    with pytest.raises(UnsatisfiableConfigError):
        quasigeodesic_suite(farey, 10, np.random.default_rng(0))


def test_conjugacy_suite_reports_smallest_slack():
    res = conjugacy_suite(free, 2000, np.random.default_rng(41), slack=2.0)
    assert res.failures == 0
    # |s| <= 3 forces slack at least |s|/2 = 1.5 on some instance
    assert res.fitted["smallest_sufficient"] == 1.5
