"""Lacunary decompositions f = sum_k b^{n_k} f_k and their hypotheses."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pandas as pd

from blaschke_cyclicity.common.schema import ReportSchema
from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.exceptions import BandwidthError
from blaschke_cyclicity.core.hardy import HardyFunction, multiply, norm_p, riesz_project
from blaschke_cyclicity.core.model_space import (
    ModelSpaceBasis,
    build_model_space,
    cached_norm_constant,
)
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.toeplitz import apply_T, decompose
from blaschke_cyclicity.core.tools import complex_to_pairs, pairs_to_complex
from blaschke_cyclicity.core.validation import validate_exponent_p, validate_exponents

# Tails below this are treated as underflow in series diagnostics
TAIL_UNDERFLOW = 1e-300

# Slack allowed on the L4 inequalities
INEQUALITY_SLACK = 1e-8

# A fitted log-slope must be below -GEOMETRIC_MARGIN to count as geometric decay
GEOMETRIC_MARGIN = 1e-6


@dataclass(frozen=True, eq=False)
class LacunarySpec:
    """A lacunary decomposition f = sum_k b^{n_k} f_k.

    Args:
        product (BlaschkeProduct): The product b.
        exponents (tuple[int, ...]): Strictly increasing positive powers n_k.
        components (np.ndarray): Row k holds the orthonormal K_b coordinates of f_k.
        allow_zero_components (bool): Accept zero rows. By default zero components
            are rejected.
        policy (NumericPolicy): Grid and tolerances. Defaults to the product's policy.
    """

    product: BlaschkeProduct
    exponents: tuple[int, ...]
    components: np.ndarray
    allow_zero_components: bool = False
    policy: NumericPolicy | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "policy", self.policy or self.product.policy)
        exponents = validate_exponents(self.exponents)
        components = np.asarray(self.components, dtype=complex)
        if components.size == 0:
            components = components.reshape(0, self.product.degree)
        if components.ndim != 2 or components.shape != (len(exponents), self.product.degree):
            raise ValueError(
                f"Expected components of shape ({len(exponents)}, {self.product.degree}), "
                f"got {components.shape}"
            )
        if not np.all(np.isfinite(components)):
            raise ValueError("Components must be finite")
        if not self.allow_zero_components and np.any(~components.any(axis=1)):
            raise ValueError(
                "Zero components are only accepted with allow_zero_components=True"
            )
        components.setflags(write=False)
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "components", components)

    @property
    def count(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return self.product.degree

    @cached_property
    def basis(self) -> ModelSpaceBasis:
        return build_model_space(self.product, self.policy)

    @property
    def lacunarity_ratio(self) -> float:
        """min n_{k+1} / n_k, infinite for fewer than two terms."""
        if self.count < 2:
            return float("inf")
        exponents = np.asarray(self.exponents, dtype=float)
        return float(np.min(exponents[1:] / exponents[:-1]))

    def component_functions(self) -> list[HardyFunction]:
        return [self.basis.from_coordinates(c) for c in self.components]

    def subsequence(self, indices) -> "LacunarySpec":
        indices = sorted(indices)
        return LacunarySpec(
            self.product,
            tuple(self.exponents[i] for i in indices),
            self.components[indices],
            self.allow_zero_components,
            self.policy,
        )

    def to_dict(self) -> dict:
        return {
            ReportSchema.EXPONENTS: list(self.exponents),
            ReportSchema.COMPONENTS: [complex_to_pairs(c) for c in self.components],
        }

    @classmethod
    def from_dict(
        cls,
        data: dict,
        product: BlaschkeProduct,
        policy: NumericPolicy | None = None,
    ) -> "LacunarySpec":
        """Read {"exponents": [...], "components": [[coords...]], "allow_zero_components": bool}."""
        allowed = {ReportSchema.EXPONENTS, ReportSchema.COMPONENTS, "allow_zero_components"}
        if not isinstance(data, dict) or set(data) - allowed:
            raise ValueError(f"A lacunary spec holds only the keys {sorted(allowed)}")
        components = [pairs_to_complex(row) for row in data.get(ReportSchema.COMPONENTS, [])]
        return cls(
            product,
            tuple(data.get(ReportSchema.EXPONENTS, [])),
            np.array(components, dtype=complex),
            bool(data.get("allow_zero_components", False)),
            policy,
        )

    def __repr__(self):
        return (
            f"LacunarySpec(degree={self.degree}, count={self.count}, "
            f"exponents={self.exponents})"
        )


def max_feasible_terms(spec: LacunarySpec) -> int:
    """Largest K such that the first K terms satisfy n_K d + bandwidth < N."""
    limit = spec.policy.truncation_degree - spec.basis.bandwidth
    return sum(1 for n in spec.exponents if n * spec.degree < limit)


def build(spec: LacunarySpec) -> HardyFunction:
    """
    Assemble sum_k b^{n_k} f_k on the grid.

    Raises:
        BandwidthError: If the highest term does not fit the truncation degree.
    """
    policy = spec.policy
    if spec.count == 0:
        return HardyFunction.zero(policy)

    feasible = max_feasible_terms(spec)
    if feasible < spec.count:
        raise BandwidthError(
            f"Term n={spec.exponents[-1]} of degree {spec.exponents[-1] * spec.degree} "
            f"does not fit truncation degree {policy.truncation_degree}; "
            f"at most {feasible} terms are feasible"
        )

    boundary = spec.product.boundary_samples(policy.grid_size)
    samples = np.zeros(policy.grid_size, dtype=complex)
    for n, component in zip(spec.exponents, spec.component_functions()):
        samples += boundary**n * component.boundary_samples()

    f = riesz_project(samples, policy)
    if f.truncation_warning:
        raise BandwidthError(
            f"The lacunary sum leaks {f.tail_energy:.2e} energy beyond degree "
            f"{policy.truncation_degree}; at most {max(feasible - 1, 0)} terms are feasible"
        )
    return f


@dataclass
class HypothesisReport:
    """Finite evidence for the lacunarity, summability, domination and B2 hypotheses."""

    p: float
    q: float
    lacunarity_ratio: float
    min_ratio: float
    norms: np.ndarray
    partial_sums: np.ndarray
    geometric_tail: bool
    domination_rho: float
    domination_c: float
    b2: bool
    b2_collision: tuple[int, int, int, int] | None

    @property
    def lacunary(self) -> bool:
        return self.lacunarity_ratio >= self.min_ratio

    @property
    def summable(self) -> bool:
        return self.geometric_tail

    @property
    def dominated(self) -> bool:
        return self.domination_rho < np.exp(-GEOMETRIC_MARGIN)

    @property
    def cyclicity_hypotheses(self) -> bool:
        return self.lacunary and self.summable and self.dominated

    @property
    def all_passed(self) -> bool:
        return self.cyclicity_hypotheses and self.b2

    def frame(self, exponents) -> pd.DataFrame:
        return pd.DataFrame(
            {
                ReportSchema.K: np.arange(len(self.norms)),
                ReportSchema.EXPONENT: list(exponents),
                ReportSchema.NORM: self.norms,
                ReportSchema.PARTIAL_SUM: self.partial_sums,
            }
        )

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "lacunarity_ratio": self.lacunarity_ratio,
            "min_ratio": self.min_ratio,
            "lacunary": self.lacunary,
            "partial_sums": self.partial_sums.tolist(),
            "summable": self.summable,
            "geometric_tail": self.geometric_tail,
            "domination": {
                "rho": self.domination_rho,
                "c": self.domination_c,
                "dominated": self.dominated,
            },
            "b2": self.b2,
            "b2_collision": list(self.b2_collision) if self.b2_collision else None,
            "finite_horizon": True,
        }


def is_b2_set(exponents) -> tuple[bool, tuple[int, int, int, int] | None]:
    """
    Check that all sums n_j + n_k (j <= k) are distinct, in exact integer arithmetic.

    Returns:
        tuple: (True, None) or (False, (a, b, c, d)) with a + b = c + d.
    """
    seen: dict[int, tuple[int, int]] = {}
    values = [int(n) for n in exponents]
    for j, a in enumerate(values):
        for b in values[j:]:
            total = a + b
            if total in seen:
                return False, (*seen[total], a, b)
            seen[total] = (a, b)
    return True, None


def _log_fit(values: np.ndarray) -> tuple[float, float] | None:
    """Least squares fit log(values[k]) ~ intercept + slope k over the non-zero entries."""
    index = np.flatnonzero(values > 0)
    if index.size < 2:
        return None
    slope, intercept = np.polyfit(index.astype(float), np.log(values[index]), 1)
    return float(slope), float(intercept)


def check_hypotheses(spec: LacunarySpec, p: float, min_ratio: float = 1.5) -> HypothesisReport:
    """
    Evaluate the hypotheses of the cyclicity criterion on a finite spec.

    Args:
        spec (LacunarySpec): The decomposition.
        p (float): Exponent, at least 2. The conjugate q = p / (p - 1) is derived.
        min_ratio (float): Lacunarity threshold d > 1.

    Returns:
        HypothesisReport: Verdicts for lacunarity, summability of ||f_k||_p^q,
        geometric domination of ||f_k||_p and the B2 property of the exponents.
    """
    p = validate_exponent_p(p, minimum=2.0)
    if min_ratio <= 1:
        raise ValueError("The lacunarity threshold must be > 1")
    q = p / (p - 1)

    norms = np.array([norm_p(f, p) for f in spec.component_functions()])
    partial_sums = np.cumsum(norms**q)

    # Fit the tail only: the second half of the non-zero terms when there are enough
    terms = norms**q
    nonzero = np.flatnonzero(terms > 0)
    tail = nonzero[len(nonzero) // 2 :] if len(nonzero) >= 6 else nonzero
    tail_fit = _log_fit(np.where(np.isin(np.arange(len(terms)), tail), terms, 0.0))
    geometric_tail = tail_fit is None or tail_fit[0] < -GEOMETRIC_MARGIN

    domination = _log_fit(norms)
    if domination is None:
        rho, c = 0.0, float(norms.max(initial=0.0))
    else:
        rho = float(np.exp(domination[0]))
        k = np.arange(len(norms))
        c = float(np.max(norms / rho**k)) if rho > 0 else float(norms.max())

    b2, collision = is_b2_set(spec.exponents)
    report = HypothesisReport(
        p=p,
        q=q,
        lacunarity_ratio=spec.lacunarity_ratio,
        min_ratio=min_ratio,
        norms=norms,
        partial_sums=partial_sums,
        geometric_tail=geometric_tail,
        domination_rho=rho,
        domination_c=c,
        b2=b2,
        b2_collision=collision,
    )
    logger.debug(f"Hypotheses for {spec!r}: {report.to_dict()}")
    return report


@dataclass
class SeriesDiagnostics:
    """Partial sums of sum_k a_k / r_k^gamma, r_k = sum_{l>k} a_l."""

    gamma: float
    partial_sums: np.ndarray
    tails: np.ndarray
    truncated_at: int | None
    trend: list[tuple[int, float]]
    liminf_ratio: float

    @property
    def diverging(self) -> bool:
        """S_n increases across the decades and the increments do not die out."""
        values = [s for _, s in self.trend]
        if len(values) < 3:
            return bool(len(values) == 2 and values[1] > values[0])
        increments = np.diff(values)
        return bool(np.all(increments > 0) and increments[-1] >= 0.5 * increments[0])

    @property
    def liminf_above_one(self) -> bool:
        return self.liminf_ratio > 1

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "terms": int(self.partial_sums.size),
            "truncated_at": self.truncated_at,
            "trend": [[n, s] for n, s in self.trend],
            "diverging": self.diverging,
            "liminf_ratio": self.liminf_ratio,
            "liminf_above_one": self.liminf_above_one,
            "finite_horizon": True,
        }


def series_diagnostics(a, gamma: float = 1.0) -> SeriesDiagnostics:
    """
    Divergence trend of sum_k a_k / (sum_{l>k} a_l)^gamma and liminf r_{k-1} / r_k.

    The terms stop at the first k whose tail drops below 1e-300. The trend
    reports S_n at n = 10, 100, 1000, ... and at the last usable n.

    Raises:
        ValueError: If a holds non-positive values or gamma < 1.
    """
    a = np.asarray(list(a), dtype=float)
    if a.size < 2 or np.any(~np.isfinite(a)) or np.any(a <= 0):
        raise ValueError("series_diagnostics needs at least two positive reals")
    if gamma < 1:
        raise ValueError("gamma must be >= 1")

    # tails[k] = sum_{l > k} a_l, summed from the smallest terms up
    tails = np.concatenate((np.cumsum(a[::-1])[::-1][1:], [0.0]))
    valid = tails >= TAIL_UNDERFLOW
    end = int(np.argmin(valid))
    # The last tail of a finite list is always zero; only earlier underflow counts
    truncated_at = end if end < a.size - 1 else None
    usable = tails[: max(end, 1)]
    terms = a[: usable.size] / usable**gamma
    partial_sums = np.cumsum(terms)

    trend = []
    n = 10
    while n < partial_sums.size:
        trend.append((n, float(partial_sums[n - 1])))
        n *= 10
    trend.append((int(partial_sums.size), float(partial_sums[-1])))

    ratios = usable[:-1] / usable[1:] if usable.size > 1 else np.array([np.inf])
    liminf = float(np.min(ratios[ratios.size // 2 :]))

    return SeriesDiagnostics(
        gamma=float(gamma),
        partial_sums=partial_sums,
        tails=usable,
        truncated_at=truncated_at,
        trend=trend,
        liminf_ratio=liminf,
    )


def phi_q_ratio(
    product: BlaschkeProduct, f: HardyFunction, p: float, K: int | None = None
) -> float:
    """
    (sum_k ||f_k||_q^p)^(1/p) / ||f||_q with q = p / (p - 1), over the decomposition of f.

    Raises:
        ValueError: If p < 2 or ||f||_q < 1e-12.
    """
    p = validate_exponent_p(p, minimum=2.0)
    q = p / (p - 1)
    size = norm_p(f, q)
    if size < 1e-12:
        raise ValueError("phi_q_ratio needs ||f||_q >= 1e-12")
    decomposition = decompose(product, f, K)
    norms = np.array([norm_p(g, q) for g in decomposition.component_functions()])
    return float(np.sum(norms**p) ** (1 / p) / size)


@dataclass
class InequalityReport:
    """The L4 bounds for lacunary sums with a B2 set of exponents."""

    hypothesis_met: bool
    norm_4: float
    norm_2: float
    norm_1: float
    constant: float
    bound_l1: float
    bound_l2: float

    @property
    def holds_l1(self) -> bool | None:
        if not self.hypothesis_met:
            return None
        return self.norm_4 <= self.bound_l1 + INEQUALITY_SLACK * max(1.0, self.norm_4)

    @property
    def holds_l2(self) -> bool | None:
        if not self.hypothesis_met:
            return None
        return self.norm_4 <= self.bound_l2 + INEQUALITY_SLACK * max(1.0, self.norm_4)

    def to_dict(self) -> dict:
        return {
            "hypothesis": "met" if self.hypothesis_met else "hypothesis unmet",
            "norm_4": self.norm_4,
            "norm_2": self.norm_2,
            "norm_1": self.norm_1,
            "constant": self.constant,
            "bound_l1": self.bound_l1,
            "bound_l2": self.bound_l2,
            "holds_l1": self.holds_l1,
            "holds_l2": self.holds_l2,
        }


def l4_l1_equivalence_check(spec: LacunarySpec, constant: float | None = None) -> InequalityReport:
    """
    Check ||f||_4 <= 2^(3/4) c^(3/2) ||f||_1 and ||f||_4 <= 2^(1/2) c ||f||_2,
    where c is the K_b constant between the L4 and L2 norms.

    The inequalities are only claimed when the exponents form a B2 set.
    """
    f = build(spec)
    constant = constant or cached_norm_constant(spec.product, spec.policy, 4, 2)
    norm_4, norm_2, norm_1 = norm_p(f, 4), norm_p(f, 2), norm_p(f, 1)
    b2, _ = is_b2_set(spec.exponents)
    return InequalityReport(
        hypothesis_met=b2,
        norm_4=norm_4,
        norm_2=norm_2,
        norm_1=norm_1,
        constant=constant,
        bound_l1=2 ** (3 / 4) * constant ** (3 / 2) * norm_1,
        bound_l2=2 ** (1 / 2) * constant * norm_2,
    )


@dataclass
class ProductLemmaReport:
    """How far f g is from K_b^2 + b K_b^2."""

    projection_norm: float
    max_inner_product: float
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.projection_norm < self.tolerance

    def to_dict(self) -> dict:
        return {
            "projection_norm": self.projection_norm,
            "max_inner_product": self.max_inner_product,
            "passed": self.passed,
        }


def product_lemma_check(
    product: BlaschkeProduct, f: HardyFunction, g: HardyFunction
) -> ProductLemmaReport:
    """
    Verify that f g is orthogonal to b^2 H^2 for f, g in K_b.

    The projection of f g on b^2 H^2 is R^2 T^2 (f g), whose norm is ||T^2 (f g)||.
    The inner products <f g, b^2 z^j>, j < N - 2d, are reported as well.

    Raises:
        ValueError: If f or g is not in K_b.
    """
    basis = build_model_space(product, f.policy)
    tolerance = f.policy.residual_tolerance
    for name, h in (("f", f), ("g", g)):
        if basis.distance(h) > tolerance * max(h.norm(2), 1.0):
            raise ValueError(f"{name} is not in the model space K_b")

    h = multiply(f, g)
    projection = float(np.linalg.norm(apply_T(product, apply_T(product, h)).coeffs))

    size = f.truncation_degree
    count = max(size - 2 * product.degree, 1)
    square = product.power(2).taylor_coefficients(size, f.grid_size)
    inner = [
        abs(np.vdot(np.concatenate((np.zeros(j), square[: size - j])), h.coeffs))
        for j in range(count)
    ]
    return ProductLemmaReport(projection_norm=projection, max_inner_product=float(max(inner)))
