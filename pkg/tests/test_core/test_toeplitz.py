import numpy as np
import pytest

from blaschke_cyclicity.core import toeplitz
from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.exceptions import NumericalInconsistencyError, QuadratureError
from blaschke_cyclicity.core.hardy import HardyFunction
from blaschke_cyclicity.core.model_space import build_model_space
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.toeplitz import (
    adjoint_defect,
    apply_R,
    apply_T,
    decompose,
    default_depth,
    h1_kernel_growth_witness,
    iterate_T,
    project_Pk,
    project_Pk_integral,
    projection_norm_profile,
    remainder,
    remainder_consistency,
    wold_checks,
)


def test_T_is_a_block_shift_for_z2(z2, cubic):
    np.testing.assert_allclose(apply_T(z2, cubic).coeffs[:3], [1, 4, 0])
    np.testing.assert_allclose(apply_R(z2, cubic).coeffs[:6], [0, 0, 3, 2, 1, 4])


@pytest.mark.parametrize("product_name", ["two_zeros", "degree3"])
def test_T_is_a_left_inverse_of_R(request, product_name, rational):
    product = request.getfixturevalue(product_name)
    assert apply_T(product, apply_R(product, rational)).distance(rational) < 1e-10
    assert adjoint_defect(product, rational, HardyFunction.polynomial([1, 2, 3], rational.policy)) < 1e-10


def test_T_kills_the_model_space(degree3, policy):
    f = HardyFunction.polynomial([1, -1, 2], policy)
    for q in build_model_space(degree3, policy).orthonormal:
        assert np.linalg.norm(apply_T(degree3, q).coeffs) < 1e-10
    assert np.linalg.norm(apply_T(degree3, f).coeffs) > 0.1


def test_iterates(z2, cubic):
    iterates = iterate_T(z2, cubic, 3)
    assert len(iterates) == 4
    assert iterates[0] is cubic
    assert np.linalg.norm(iterates[2].coeffs) == 0


def test_projections_are_complementary(two_zeros, rational):
    pieces = [project_Pk(two_zeros, rational, k) for k in range(4)]
    for k in range(4):
        for l, piece in enumerate(pieces):
            expected = piece if k == l else HardyFunction.zero(rational.policy)
            assert project_Pk(two_zeros, piece, k).distance(expected) < 1e-9


def test_projection_onto_a_single_zero(policy):
    # P_0 1 = (1 - |0.5|^2) e_0.5 = 0.75 / (1 - 0.5z)
    product = BlaschkeProduct((0.5,), policy=policy)
    piece = project_Pk(product, HardyFunction.polynomial([1], policy), 0)
    np.testing.assert_allclose(piece.coeffs[:40], 0.75 * 0.5 ** np.arange(40), atol=1e-12)


def test_integral_projection_agrees_with_operators(two_zeros, rational):
    for k in range(4):
        gap = project_Pk(two_zeros, rational, k).distance(project_Pk_integral(two_zeros, rational, k))
        assert gap < 1e-8 * rational.norm(2)


def test_integral_projection_rejects_aliased_grid():
    policy = NumericPolicy(truncation_degree=256, grid_size=512, allow_undersampled=True)
    f = HardyFunction.polynomial([1, 2], policy)
    with pytest.raises(QuadratureError):
        project_Pk_integral(BlaschkeProduct.monomial(2, policy), f, 0)


def test_remainder(z2, cubic):
    # r_0 = f - f_0 = z^2 + 4 z^3
    np.testing.assert_allclose(remainder(z2, cubic, 0).coeffs[:5], [0, 0, 1, 4, 0], atol=1e-10)
    assert np.linalg.norm(remainder(z2, cubic, 1).coeffs) < 1e-10
    with pytest.raises(ValueError):
        remainder(z2, cubic, -1)


def test_remainder_closed_form(policy):
    product = BlaschkeProduct.monomial(1, policy)
    f = HardyFunction.rational([1 / 0.3], [1.0], 0.0, policy)
    # r_2 = 0.3^3 z / (1 - 0.3z)
    expected = np.r_[0.0, 0.3 ** (np.arange(1, 30) + 2)]
    np.testing.assert_allclose(remainder(product, f, 2).coeffs[:30], expected, atol=1e-12)

    report = remainder_consistency(product, f, 2)
    assert report.operator_vs_integral < 1e-8
    assert report.operator_vs_tail < 1e-10


def test_remainder_paths_that_disagree_raise(monkeypatch, two_zeros, rational):
    monkeypatch.setattr(
        toeplitz, "_remainder_integral", lambda product, f, m, **kwargs: HardyFunction.zero(f.policy)
    )
    with pytest.raises(NumericalInconsistencyError):
        remainder(two_zeros, rational, 0)
    with pytest.raises(NumericalInconsistencyError):
        remainder_consistency(two_zeros, rational, 0)


@pytest.mark.parametrize("m", [0, 1, 4, 8])
def test_remainder_paths_agree(two_zeros, rational, m):
    report = remainder_consistency(two_zeros, rational, m)
    assert report.worst < 1e-8
    assert report.statement_form_matches
    assert report.to_dict()["m"] == m


def test_decompose_example(z2, cubic):
    decomposition = decompose(z2, cubic)
    assert decomposition.truncation_index == 1
    np.testing.assert_allclose(decomposition.components, [[3, 2], [1, 4]])
    assert decomposition.residual_norm == 0
    assert decomposition.parseval_defect() < 1e-15

    data = decomposition.to_dict()
    assert data["components"] == [[[3.0, 0.0], [2.0, 0.0]], [[1.0, 0.0], [4.0, 0.0]]]
    assert data["truncation_index"] == 1

    frame = decomposition.norms_frame()
    np.testing.assert_allclose(frame["norm"], [np.sqrt(13), np.sqrt(17)])


@pytest.mark.parametrize("product_name", ["z2", "two_zeros", "degree3"])
def test_decompose_parseval_and_reassembly(request, product_name, rational):
    product = request.getfixturevalue(product_name)
    decomposition = decompose(product, rational)
    assert decomposition.parseval_defect() < 1e-10
    assert decomposition.reassemble().distance(rational) < 1e-9 * rational.norm(2)


def test_decompose_with_explicit_depth(z2, cubic):
    decomposition = decompose(z2, cubic, K=3)
    np.testing.assert_allclose(decomposition.components[2:], 0)
    with pytest.raises(ValueError):
        decompose(z2, cubic, K=-1)


def test_default_depth(z2, cubic, policy):
    assert default_depth(z2, cubic) == 1
    assert default_depth(z2, HardyFunction.zero(policy)) == 0


def test_wold_checks(degree3, rational):
    report = wold_checks(degree3, [rational], depth=200)
    assert report.passed()
    assert report.iterate_norm < 1e-6
    assert report.monotone_shift_norms
    with pytest.raises(ValueError):
        wold_checks(degree3, [])


def test_kernel_growth_witness():
    radii = 1 - 2.0 ** -np.arange(3, 11)
    table = h1_kernel_growth_witness(radii)
    assert list(table.columns) == ["r", "h1_norm", "reference", "ratio", "ratio_natural", "grid"]
    assert table["ratio"].between(0.2, 0.5).all()
    assert (np.diff(table["h1_norm"]) > 0).all()
    np.testing.assert_allclose(table["h1_norm"], table["reference"], rtol=1e-4)
    # The natural-log ratio tends to 1 / pi from above
    assert (table["ratio_natural"] > 1 / np.pi).all()


def test_kernel_growth_validation():
    with pytest.raises(ValueError):
        h1_kernel_growth_witness([0.9, 0.5])
    with pytest.raises(ValueError):
        h1_kernel_growth_witness([])
    with pytest.raises(ValueError):
        h1_kernel_growth_witness([1.0])


def test_projection_norm_profile(two_zeros, rational):
    profile = projection_norm_profile(two_zeros, rational, 5, p=2)
    assert list(profile["k"]) == list(range(6))
    # In H^2 the pieces are orthogonal, so the squared ratios sum to at most one
    assert (profile["projection_ratio"] ** 2).sum() <= 1 + 1e-12
    with pytest.raises(ValueError):
        projection_norm_profile(two_zeros, HardyFunction.zero(rational.policy), 3)
