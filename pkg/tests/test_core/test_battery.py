import numpy as np
import pytest

from blaschke_cyclicity.core.battery import (
    TOLERANCES,
    default_products,
    random_b2_spec,
    random_function,
    run_invariant_suite,
)
from blaschke_cyclicity.core.lacunary import build, is_b2_set
from blaschke_cyclicity.core.policy import NumericPolicy


def test_vacuous_suite():
    suite = run_invariant_suite(seed=7, battery_size=0)
    assert suite.vacuous
    assert suite.results == []
    assert suite.all_passed
    assert suite.frame().empty
    assert suite.to_dict()["invariants"] == []


def test_small_battery_passes():
    suite = run_invariant_suite(seed=42, battery_size=3)
    assert [r.invariant for r in suite.results] == list(TOLERANCES)
    for result in suite.results:
        assert result.passed, result.to_dict()
        assert result.checks > 0
    assert suite.all_passed
    assert list(suite.frame().columns) == ["invariant", "passed", "worst_residual", "tolerance", "checks"]


def test_battery_is_deterministic(z2, policy):
    first = run_invariant_suite(seed=5, battery_size=2, products=[z2])
    second = run_invariant_suite(seed=5, battery_size=2, products=[z2])
    assert first.to_dict() == second.to_dict()


def test_aliased_grid_fails_the_integral_projection():
    policy = NumericPolicy(truncation_degree=256, grid_size=512, allow_undersampled=True)
    suite = run_invariant_suite(seed=1, battery_size=2, policy=policy)
    results = {r.invariant: r for r in suite.results}
    assert not results["pk_integral"].passed
    assert any("QuadratureError" in e for e in results["pk_integral"].errors)
    assert not suite.all_passed


def test_suite_validation():
    with pytest.raises(ValueError):
        run_invariant_suite(seed=-1)
    with pytest.raises(ValueError):
        run_invariant_suite(battery_size=-3)


def test_default_products(policy):
    assert [b.degree for b in default_products(policy)] == [1, 1, 2, 3, 4]


def test_random_functions_know_their_derivatives(policy, rng):
    for _ in range(6):
        sample = random_function(rng, policy)
        for order in range(3):
            assert sample.derivative(0.3j, order) == pytest.approx(
                sample.function.derivative_at(0.3j, order), rel=1e-9, abs=1e-9
            )


def test_random_b2_specs_build(two_zeros, policy, rng):
    for _ in range(5):
        spec = random_b2_spec(rng, two_zeros, policy)
        exponents = np.array(spec.exponents)
        assert spec.count >= 1
        assert np.all(exponents[1:] > 2 * exponents[:-1])
        assert is_b2_set(spec.exponents)[0]
        assert build(spec).norm(2) > 0
