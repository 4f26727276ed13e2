import numpy as np
import pytest

from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.cyclicity import (
    compute_kstar,
    decide,
    determinant_witness,
    iterate_span_defect,
    krylov_oracle,
    monomial_targets,
    orthogonal_components_demo,
    reducing_subspace_defect,
)
from blaschke_cyclicity.core.enums import Verdict
from blaschke_cyclicity.core.fixtures import (
    AVAILABLE_FIXTURES,
    alternating_z2,
    alternating_z2_dyadic,
    collinear_z2,
    finite_z2,
    geometric_z,
    get_fixture,
)
from blaschke_cyclicity.core.hardy import HardyFunction
from blaschke_cyclicity.core.lacunary import LacunarySpec
from blaschke_cyclicity.core.policy import NumericPolicy


def test_kstar_of_finite_decomposition(policy):
    kstar = compute_kstar(finite_z2(policy))
    assert kstar.ranks == [2, 1, 0, 0, 0]
    assert kstar.rank == 0
    assert kstar.stabilization_index == 2
    assert kstar.trailing_window == 3
    assert kstar.basis.shape == (0, 2)
    assert not kstar.all_zero


def test_kstar_of_collinear_components(policy):
    kstar = compute_kstar(collinear_z2(policy))
    assert kstar.rank == 1
    np.testing.assert_allclose(np.abs(kstar.basis), [[2**-0.5, 2**-0.5]])
    np.testing.assert_allclose(kstar.project([1, -1]), [0, 0], atol=1e-12)


def test_kstar_discards_the_head(z2):
    components = np.array([[1, 0]] * 5 + [[0, 1]] * 3, dtype=complex)
    kstar = compute_kstar(LacunarySpec(z2, tuple(range(1, 9)), components))
    assert kstar.ranks == [2, 2, 2, 2, 2, 1, 1, 1]
    assert kstar.rank == 1
    assert kstar.stabilization_index == 5
    np.testing.assert_allclose(np.abs(kstar.basis), [[0, 1]], atol=1e-12)


def test_kstar_needs_components(z2):
    with pytest.raises(ValueError):
        compute_kstar(LacunarySpec(z2, (), np.zeros((0, 2))))


@pytest.mark.parametrize("name", sorted(AVAILABLE_FIXTURES))
def test_fixture_verdicts(name):
    fixture = AVAILABLE_FIXTURES[name]
    report = decide(fixture.spec(), 2.0)
    assert report.verdict == fixture.expected
    assert report.krylov is None
    assert report.to_dict()["verdict"] == str(fixture.expected)


@pytest.mark.parametrize(
    "name",
    sorted(
        n
        for n, f in AVAILABLE_FIXTURES.items()
        if f.expected == Verdict.CYCLIC and f.oracle_reaches_targets
    ),
)
def test_cyclic_fixtures_reach_every_target(name):
    report = decide(AVAILABLE_FIXTURES[name].spec(), 2.0, oracle_iterations=512)
    distances = report.krylov.final_distances()
    assert len(distances) == 4 * report.degree
    assert max(distances.values()) < 1e-3


@pytest.mark.parametrize(
    "name", sorted(n for n, f in AVAILABLE_FIXTURES.items() if f.expected == Verdict.NON_CYCLIC)
)
def test_non_cyclic_fixtures_plateau(name):
    report = decide(AVAILABLE_FIXTURES[name].spec(), 2.0, oracle_iterations=2048)
    assert max(report.krylov.final_distances().values()) > 0.1


def test_collinear_distance_to_z(policy):
    report = decide(collinear_z2(policy), 2.0, oracle_iterations=64)
    assert report.krylov.final_distances()["z^1"] == pytest.approx(2**-0.5, rel=1e-9)
    assert report.structure.finite_part_degree is None


def test_hypotheses_gate_the_verdict_above_two(z2):
    # n_{k+1} / n_k = 4 / 3 is below the default lacunarity threshold
    components = np.array([[1, 1], [0.1, -0.1], [0.01, 0.01], [0.001, -0.001]])
    spec = LacunarySpec(z2, (1, 2, 3, 4), components)
    assert decide(spec, 2.0).verdict == Verdict.CYCLIC

    report = decide(spec, 4.0)
    assert report.verdict == Verdict.INCONCLUSIVE
    assert report.hypotheses_gating


def test_decide_validation(policy, z2):
    with pytest.raises(ValueError):
        decide(alternating_z2(policy), 1.0)
    with pytest.raises(ValueError):
        decide(LacunarySpec(z2, (), np.zeros((0, 2))), 2.0)


def test_structure_of_finite_decomposition(policy):
    report = decide(finite_z2(policy), 2.0)
    assert report.structure.finite_part_degree == 2
    assert report.structure.finite_part_krylov_rank == 3


def test_greedy_witness(policy):
    spec = alternating_z2(policy)
    witness = determinant_witness(spec, 0)
    assert witness.indices == (0, 1)
    assert abs(witness.determinant) == pytest.approx(0.2)
    assert witness.normalized_volume == pytest.approx(1.0)
    assert witness.to_dict()["mode"] == "greedy"


def test_dyadic_witness_pattern(policy):
    spec = alternating_z2_dyadic(policy)
    for m, expected in enumerate([-1.0, 0.25, -0.0625]):
        witness = determinant_witness(spec, m)
        assert witness.indices == (m, m + 1)
        assert witness.determinant == pytest.approx(expected, abs=1e-12)
    assert determinant_witness(spec, 3) is None


def test_dyadic_truncation_stays_away_from_the_targets(policy):
    report = decide(alternating_z2_dyadic(policy), 2.0, oracle_iterations=512)
    assert report.verdict == Verdict.CYCLIC
    # Four terms: span(T^n f) is finite-dimensional and misses every monomial
    assert min(report.krylov.final_distances().values()) > 0.1
    assert not AVAILABLE_FIXTURES["alternating_z2_dyadic"].oracle_reaches_targets


def test_witness_for_b_equal_to_z(policy):
    witness = determinant_witness(geometric_z(policy), 7)
    assert witness.indices == (7,)
    assert witness.determinant == pytest.approx(2**-7, abs=1e-14)


def test_witness_edge_cases(policy):
    spec = alternating_z2(policy)
    # A single component is left
    assert determinant_witness(spec, 3) is None
    with pytest.raises(ValueError):
        determinant_witness(spec, 4)
    # Collinear components never span K_b
    assert determinant_witness(collinear_z2(policy), 0) is None


def test_exhaustive_witness(policy):
    witness = determinant_witness(alternating_z2(policy), 1, "exhaustive")
    assert len(witness.indices) == 2
    assert min(witness.indices) >= 1
    assert witness.normalized_volume == pytest.approx(1.0)

    product = BlaschkeProduct.monomial(5, policy)
    spec = LacunarySpec(product, (1, 2, 3, 4, 5), np.eye(5))
    with pytest.raises(ValueError):
        determinant_witness(spec, 0, "exhaustive")
    with pytest.raises(ValueError):
        determinant_witness(spec, 0, "random")


def test_krylov_collapses_on_invariant_span(policy):
    product = BlaschkeProduct.monomial(1, policy)
    # T f = f / 2 for f = 1 / (1 - z / 2)
    f = HardyFunction.rational([2.0], [1.0], 0.0, policy)
    targets, names = monomial_targets(2, policy)
    result = krylov_oracle(product, f, targets, 16, names)
    assert result.stopped_at == 1
    assert result.rank == 1
    assert result.checkpoints == [8, 16]
    distances = result.final_distances()
    assert distances["z^0"] == pytest.approx(0.5, rel=1e-9)
    assert distances["z^1"] == pytest.approx(np.sqrt(0.8125), rel=1e-9)
    assert len(result.checkpoint_frame()) == 4


def test_krylov_on_a_finite_decomposition(policy):
    product = BlaschkeProduct.monomial(1, policy)
    targets = [HardyFunction.monomial(0, policy=policy), HardyFunction.monomial(6, policy=policy)]
    result = krylov_oracle(product, HardyFunction.monomial(5, policy=policy), targets, 8, ["1", "z^6"])
    # T^6 z^5 = 0
    assert result.stopped_at == 6
    assert result.rank == 6
    assert result.distances_at(4)["1"] == pytest.approx(1.0)
    assert result.distances_at(5)["1"] == pytest.approx(0.0, abs=1e-12)
    assert result.final_distances()["z^6"] == pytest.approx(1.0)


def test_krylov_of_zero_function(z2, policy):
    targets, names = monomial_targets(1, policy)
    result = krylov_oracle(z2, HardyFunction.zero(policy), targets, 4, names)
    assert result.stopped_at == 0
    assert result.rank == 0
    assert result.final_distances() == {"z^0": 1.0}


def test_krylov_validation(z2, cubic, small_policy):
    with pytest.raises(ValueError):
        krylov_oracle(z2, cubic, [], 2049)
    with pytest.raises(ValueError):
        krylov_oracle(z2, cubic, [HardyFunction.zero(small_policy)], 4)
    with pytest.raises(ValueError):
        krylov_oracle(z2, cubic, [cubic], 4, ["a", "b"])


def test_orthogonal_components_demo(policy):
    spec = finite_z2(policy)
    report = orthogonal_components_demo(spec.product, spec)
    assert report.nonzero_components == 2
    assert report.dimension == 2
    assert report.plateau["z^4"] == pytest.approx(1.0)
    assert "b^7" in report.plateau
    assert report.non_cyclic


def test_orthogonal_components_demo_validation(policy):
    spec = alternating_z2(policy)
    # Rows 0 and 2 are parallel
    with pytest.raises(ValueError):
        orthogonal_components_demo(spec.product, spec)
    with pytest.raises(ValueError):
        orthogonal_components_demo(BlaschkeProduct.monomial(3, policy), finite_z2(policy))


@pytest.mark.parametrize("build_spec", [alternating_z2, collinear_z2])
def test_iterates_stay_in_the_component_span(policy, build_spec):
    frame = iterate_span_defect(build_spec(policy))
    assert list(frame["n"]) == [1, 2, 4, 8]
    assert (frame["defect"] < 1e-10).all()


def test_reducing_subspace(policy):
    report = reducing_subspace_defect(collinear_z2(policy), seed=3)
    assert report.rank == 1
    assert report.passed

    full = reducing_subspace_defect(alternating_z2(policy), subspace=np.eye(2))
    assert full.rank == 2
    assert full.passed

    empty = reducing_subspace_defect(finite_z2(policy))
    assert empty.rank == 0
    assert empty.passed


def test_fixture_policies():
    fixture = AVAILABLE_FIXTURES["degree3_cyclic"]
    policy = fixture.default_policy()
    assert policy.truncation_degree == 512
    assert fixture.spec().policy == policy
    assert AVAILABLE_FIXTURES["alternating_z2"].default_policy() == NumericPolicy()


def test_unknown_fixture():
    with pytest.raises(ValueError, match="not a valid fixture"):
        get_fixture("spiral_z3")
