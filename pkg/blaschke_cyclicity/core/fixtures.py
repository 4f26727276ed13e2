"""Curated lacunary decompositions with known cyclicity."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.enums import Verdict
from blaschke_cyclicity.core.lacunary import LacunarySpec
from blaschke_cyclicity.core.policy import NumericPolicy


@dataclass(frozen=True)
class LacunaryFixture:
    """A named spec, its expected verdict and the policy it is meant to run with."""

    name: str
    expected: Verdict
    description: str
    build_spec: Callable[[NumericPolicy], LacunarySpec]
    policy_overrides: tuple[tuple[str, object], ...] = ()
    # False when the truncated sum leaves E_f too far from the monomials for the
    # Krylov oracle to confirm a cyclic verdict
    oracle_reaches_targets: bool = True

    def default_policy(self, base: NumericPolicy | None = None) -> NumericPolicy:
        base = base or NumericPolicy()
        return base.with_overrides(**dict(self.policy_overrides)) if self.policy_overrides else base

    def spec(self, policy: NumericPolicy | None = None) -> LacunarySpec:
        return self.build_spec(policy or self.default_policy())


def _degree3_product(policy: NumericPolicy) -> BlaschkeProduct:
    return BlaschkeProduct((0j, 0.5), (2, 1), policy=policy)


def alternating_z2(policy: NumericPolicy) -> LacunarySpec:
    # 1 + z and 1 - z in the basis (1, z) of K_{z^2}; the decay is fast enough
    # for the four-term sum to bring every monomial target within 1e-3
    directions = np.array([[1, 1], [1, -1], [1, 1], [1, -1]], dtype=complex)
    amplitudes = np.array([1, 1e-1, 1e-3, 1e-7])
    return LacunarySpec(
        BlaschkeProduct.monomial(2, policy),
        (1, 4, 16, 64),
        amplitudes[:, None] * directions,
        policy=policy,
    )


def alternating_z2_dyadic(policy: NumericPolicy) -> LacunarySpec:
    """
    The alternating components with amplitudes 2^-k, so det = (-1)^(m+1) 4^-m at m.

    Four terms keep span(T^n f) finite-dimensional: 1 + z is only reached
    together with a tail of relative size 1/2, and the Krylov distances level
    off near 0.17 and 0.32 instead of going to zero.
    """
    directions = np.array([[1, 1], [1, -1], [1, 1], [1, -1]], dtype=complex)
    return LacunarySpec(
        BlaschkeProduct.monomial(2, policy),
        (1, 4, 16, 64),
        (0.5 ** np.arange(4))[:, None] * directions,
        policy=policy,
    )


def geometric_z(policy: NumericPolicy) -> LacunarySpec:
    k = np.arange(8)
    return LacunarySpec(
        BlaschkeProduct.monomial(1, policy),
        tuple(int(n) for n in 2**k),
        (2.0**-k)[:, None].astype(complex),
        policy=policy,
    )


def degree3_cyclic(policy: NumericPolicy) -> LacunarySpec:
    identity = np.eye(3, dtype=complex)
    directions = identity[[0, 1, 2, 0, 1]]
    amplitudes = np.array([1, 0.3, 0.1, 3e-5, 1e-8])
    return LacunarySpec(
        _degree3_product(policy),
        (1, 3, 7, 15, 35),
        amplitudes[:, None] * directions,
        policy=policy,
    )


def collinear_z2(policy: NumericPolicy) -> LacunarySpec:
    amplitudes = 0.5 ** np.arange(4)
    return LacunarySpec(
        BlaschkeProduct.monomial(2, policy),
        (1, 3, 9, 27),
        amplitudes[:, None] * np.array([[1, 1]], dtype=complex),
        policy=policy,
    )


def finite_z2(policy: NumericPolicy) -> LacunarySpec:
    components = np.zeros((6, 2), dtype=complex)
    components[0, 0] = 1
    components[1, 1] = 1
    return LacunarySpec(
        BlaschkeProduct.monomial(2, policy),
        (1, 2, 3, 4, 5, 6),
        components,
        allow_zero_components=True,
        policy=policy,
    )


def degree3_rank2(policy: NumericPolicy) -> LacunarySpec:
    directions = np.array(
        [[1, 0, 0], [0, 1, 0], [1, 0, 0], [0, 1, 0], [2**-0.5, 2**-0.5, 0]], dtype=complex
    )
    amplitudes = np.array([1, 0.3, 0.1, 3e-5, 1e-8])
    return LacunarySpec(
        _degree3_product(policy),
        (1, 3, 7, 15, 35),
        amplitudes[:, None] * directions,
        policy=policy,
    )


def two_component(policy: NumericPolicy) -> LacunarySpec:
    return LacunarySpec(
        BlaschkeProduct.monomial(2, policy),
        (1, 3),
        np.array([[1, 1], [1, -1]], dtype=complex),
        policy=policy,
    )


_DEGREE3_POLICY = (("truncation_degree", 512), ("grid_size", 2048))

AVAILABLE_FIXTURES: dict[str, LacunaryFixture] = {
    fixture.name: fixture
    for fixture in (
        LacunaryFixture(
            "alternating_z2",
            Verdict.CYCLIC,
            "b = z^2, components alternating 1 + z and 1 - z with fast decay",
            alternating_z2,
        ),
        LacunaryFixture(
            "alternating_z2_dyadic",
            Verdict.CYCLIC,
            "b = z^2, components alternating 1 + z and 1 - z with amplitudes 2^-k",
            alternating_z2_dyadic,
            oracle_reaches_targets=False,
        ),
        LacunaryFixture(
            "geometric_z",
            Verdict.CYCLIC,
            "b = z, f = sum_k 2^-k z^(2^k)",
            geometric_z,
        ),
        LacunaryFixture(
            "degree3_cyclic",
            Verdict.CYCLIC,
            "zeros {0 (double), 0.5}, components cycling through the orthonormal basis",
            degree3_cyclic,
            _DEGREE3_POLICY,
        ),
        LacunaryFixture(
            "collinear_z2",
            Verdict.NON_CYCLIC,
            "b = z^2, every component proportional to 1 + z",
            collinear_z2,
        ),
        LacunaryFixture(
            "finite_z2",
            Verdict.NON_CYCLIC,
            "b = z^2, two non-zero components followed by zeros",
            finite_z2,
        ),
        LacunaryFixture(
            "degree3_rank2",
            Verdict.NON_CYCLIC,
            "zeros {0 (double), 0.5}, components confined to a plane of K_b",
            degree3_rank2,
            _DEGREE3_POLICY,
        ),
        LacunaryFixture(
            "two_component",
            Verdict.INCONCLUSIVE,
            "b = z^2, two components: the tail rank cannot be stable on d indices",
            two_component,
        ),
    )
}


def get_fixture(name: str) -> LacunaryFixture:
    fixture = AVAILABLE_FIXTURES.get(name)
    if fixture is None:
        raise ValueError(
            f"'{name}' is not a valid fixture.\nPlease choose from: {sorted(AVAILABLE_FIXTURES)}"
        )
    return fixture
