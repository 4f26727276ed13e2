"""The Toeplitz operator T = T_conj(b), its right inverse R = b*, the projections P_k and the decomposition f = sum_k b^k f_k."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd
import scipy.special

from blaschke_cyclicity.common.schema import ReportSchema
from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.exceptions import NumericalInconsistencyError, QuadratureError
from blaschke_cyclicity.core.hardy import HardyFunction, inner_product, multiply, norm_p
from blaschke_cyclicity.core.model_space import ModelSpaceBasis, build_model_space
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.tools import complex_to_pairs, spectral_extent, unit_circle
from blaschke_cyclicity.core.validation import validate_non_negative_int

# Interior reconstruction: values on the circle of radius rho with rho^M equal
# to this floor, so that wrapped frequencies are suppressed to rounding level.
INTERIOR_FLOOR = 1e-16

# Largest accepted growth rho^-(N-1) when reading coefficients off the interior circle.
MAX_RECONSTRUCTION_GAIN = 1e4

REMAINDER_INCONSISTENCY = 1e-6


# --------------------------------------------------------------------- operators


@lru_cache(maxsize=64)
def _symbol(product: BlaschkeProduct, grid_size: int, conjugate: bool):
    samples = product.boundary_samples(grid_size)
    if conjugate:
        samples = np.conj(samples)
        samples.setflags(write=False)
    return samples, spectral_extent(samples)


def _check_policy(product: BlaschkeProduct, f: HardyFunction) -> None:
    if product.degree >= f.truncation_degree:
        raise ValueError("The degree of b must be smaller than the truncation degree")


def apply_T(product: BlaschkeProduct, f: HardyFunction) -> HardyFunction:
    """
    T f = P_+(conj(b) f). For b = sigma z^d this is a block shift of the coefficients.

    Raises:
        BandwidthError: If conj(b) f does not fit the grid.
    """
    _check_policy(product, f)
    if product.is_monomial:
        degree = product.degree
        shifted = np.zeros(f.truncation_degree, dtype=complex)
        shifted[: f.truncation_degree - degree] = f.coeffs[degree:]
        return HardyFunction(np.conj(product.monomial_sign) * shifted, f.policy)

    samples, extent = _symbol(product, f.grid_size, True)
    return multiply(f, samples, extent)


def apply_R(product: BlaschkeProduct, f: HardyFunction) -> HardyFunction:
    """
    R f = b f, truncated to N. The truncation is flagged when it drops energy.

    Raises:
        BandwidthError: If b f does not fit the grid.
    """
    _check_policy(product, f)
    if product.is_monomial:
        degree = product.degree
        size = f.truncation_degree
        shifted = np.zeros(size, dtype=complex)
        shifted[degree:] = f.coeffs[: size - degree]
        tail = float(np.sum(np.abs(f.coeffs[size - degree :]) ** 2))
        total = float(np.sum(np.abs(f.coeffs) ** 2))
        return HardyFunction(
            product.monomial_sign * shifted,
            f.policy,
            truncation_warning=total > 0 and tail > f.policy.residual_tolerance * total,
            tail_energy=tail,
        )

    samples, extent = _symbol(product, f.grid_size, False)
    return multiply(f, samples, extent)


def iterate_T(product: BlaschkeProduct, f: HardyFunction, n: int) -> list[HardyFunction]:
    """The iterates [f, T f, ..., T^n f]."""
    n = validate_non_negative_int(n, "n")
    iterates = [f]
    for _ in range(n):
        iterates.append(apply_T(product, iterates[-1]))
    return iterates


def apply_T_power(product: BlaschkeProduct, f: HardyFunction, k: int) -> HardyFunction:
    return iterate_T(product, f, k)[-1]


def apply_R_power(product: BlaschkeProduct, f: HardyFunction, k: int) -> HardyFunction:
    k = validate_non_negative_int(k, "k")
    for _ in range(k):
        f = apply_R(product, f)
    return f


def project_Pk(product: BlaschkeProduct, f: HardyFunction, k: int) -> HardyFunction:
    """P_k f = R^k T^k f - R^(k+1) T^(k+1) f, an element of b^k K_b."""
    k = validate_non_negative_int(k, "k")
    iterates = iterate_T(product, f, k + 1)
    head = apply_R_power(product, iterates[k], k)
    tail = apply_R_power(product, iterates[k + 1], k + 1)
    return head - tail


# ------------------------------------------------------- boundary-integral path


def _interior_radius(policy: NumericPolicy) -> float:
    """
    Radius of the interior reconstruction circle.

    Raises:
        QuadratureError: If reading N coefficients off that circle would
        amplify rounding errors by more than MAX_RECONSTRUCTION_GAIN.
    """
    radius = INTERIOR_FLOOR ** (1 / policy.grid_size)
    gain = radius ** (-(policy.truncation_degree - 1))
    if gain > MAX_RECONSTRUCTION_GAIN or radius > 1 - 1e-6:
        raise QuadratureError(
            f"Interior reconstruction grid too coarse: M={policy.grid_size} points give a "
            f"coefficient gain of {gain:.1e} at N={policy.truncation_degree}. "
            f"Use a grid size of at least {4 * policy.truncation_degree}"
        )
    return radius


def _cauchy_values(samples: np.ndarray, radius: float) -> np.ndarray:
    """
    Trapezoid rule for the Cauchy integral of boundary samples g,
    int g(t) / (1 - z e^{-it}) dm(t), at the points z_j = radius * e^{2 pi i j / M}.
    """
    grid_size = samples.size
    weights = radius ** np.arange(grid_size)
    return np.fft.ifft(np.fft.fft(samples) * weights) / (1 - radius**grid_size)


def _coefficients_from_interior(values: np.ndarray, radius: float, policy: NumericPolicy):
    size = policy.truncation_degree
    spectrum = np.fft.fft(values)[:size] / values.size
    return HardyFunction(spectrum / radius ** np.arange(size), policy)


def project_Pk_integral(product: BlaschkeProduct, f: HardyFunction, k: int) -> HardyFunction:
    """
    b^k f_k from the boundary integral
    f_k(z) = int conj(b)^k f (1 - b(z) conj(b)) / (1 - z e^{-it}) dm(t).

    The integral is evaluated by the trapezoid rule on an interior circle and
    the Taylor coefficients are read off by FFT there.

    Raises:
        QuadratureError: If the grid is too coarse for the interior reconstruction.
    """
    k = validate_non_negative_int(k, "k")
    policy = f.policy
    radius = _interior_radius(policy)
    grid = f.grid_size

    boundary = product.boundary_samples(grid)
    weighted = np.conj(boundary) ** k * f.boundary_samples()
    interior = product.evaluate(radius * unit_circle(grid))

    component = _cauchy_values(weighted, radius) - interior * _cauchy_values(
        np.conj(boundary) * weighted, radius
    )
    return _coefficients_from_interior(interior**k * component, radius, policy)


def _remainder_integral(
    product: BlaschkeProduct, f: HardyFunction, m: int, statement_form: bool = False
) -> HardyFunction:
    """
    r_m(z) = b(z) int f conj(b)^(m+1) / (1 - z e^{-it}) dm(t).

    With statement_form the kernel e^{it} / (b^(m+1)(e^{it}) (e^{it} - z)) is used
    instead. Both agree on the circle where conj(b) = 1/b.
    """
    policy = f.policy
    radius = _interior_radius(policy)
    grid = f.grid_size
    boundary = product.boundary_samples(grid)
    if statement_form:
        weighted = f.boundary_samples() / boundary ** (m + 1)
    else:
        weighted = f.boundary_samples() * np.conj(boundary) ** (m + 1)
    interior = product.evaluate(radius * unit_circle(grid))
    return _coefficients_from_interior(interior * _cauchy_values(weighted, radius), radius, policy)


def remainder(product: BlaschkeProduct, f: HardyFunction, m: int) -> HardyFunction:
    """
    The remainder r_m = T^m f - f_m = R T^(m+1) f.

    Raises:
        NumericalInconsistencyError: If the operator and boundary-integral paths
        disagree by more than 1e-6 relative to ||f||, which signals aliasing.
    """
    m = validate_non_negative_int(m, "m")
    operator_path, _ = _remainder_paths(product, f, m)
    return operator_path


def _remainder_paths(
    product: BlaschkeProduct, f: HardyFunction, m: int
) -> tuple[HardyFunction, HardyFunction]:
    """r_m from R T^(m+1) f and from the boundary integral, checked against each other."""
    operator_path = apply_R(product, apply_T_power(product, f, m + 1))
    integral_path = _remainder_integral(product, f, m)
    gap = operator_path.distance(integral_path)
    scale = max(f.norm(2), np.finfo(float).tiny)
    if gap > REMAINDER_INCONSISTENCY * scale:
        raise NumericalInconsistencyError(
            f"Remainder r_{m}: operator and integral paths differ by {gap:.3e}"
        )
    return operator_path, integral_path


@dataclass
class RemainderReport:
    """Three-way agreement of the remainder r_m."""

    m: int
    operator_vs_integral: float
    operator_vs_tail: float
    integral_vs_tail: float
    statement_form_gap: float
    depth: int

    @property
    def worst(self) -> float:
        return max(self.operator_vs_integral, self.operator_vs_tail, self.integral_vs_tail)

    @property
    def statement_form_matches(self) -> bool:
        return self.statement_form_gap < 1e-8

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "operator_vs_integral": self.operator_vs_integral,
            "operator_vs_tail": self.operator_vs_tail,
            "integral_vs_tail": self.integral_vs_tail,
            "statement_form_gap": self.statement_form_gap,
            "statement_form_matches": self.statement_form_matches,
            "depth": self.depth,
        }


def remainder_consistency(
    product: BlaschkeProduct,
    f: HardyFunction,
    m: int,
    decomposition: "Decomposition | None" = None,
) -> RemainderReport:
    """
    Compare r_m from the operator path, the boundary integral in both printed
    kernel forms and the tail sum sum_{k>m} b^(k-m) f_k.

    Raises:
        NumericalInconsistencyError: Under the same condition as `remainder`.
    """
    m = validate_non_negative_int(m, "m")
    decomposition = decomposition or decompose(product, f)
    operator_path, integral_path = _remainder_paths(product, f, m)
    statement_path = _remainder_integral(product, f, m, statement_form=True)

    tail = HardyFunction.zero(f.policy)
    functions = decomposition.component_functions()
    for k in range(decomposition.truncation_index, m, -1):
        tail = apply_R(product, tail) + functions[k]
    tail = apply_R(product, tail) if decomposition.truncation_index > m else tail

    return RemainderReport(
        m=m,
        operator_vs_integral=operator_path.distance(integral_path),
        operator_vs_tail=operator_path.distance(tail),
        integral_vs_tail=integral_path.distance(tail),
        statement_form_gap=statement_path.distance(integral_path),
        depth=decomposition.truncation_index,
    )


# ----------------------------------------------------------------- decomposition


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Components f_k of f = sum_{k<=K} b^k f_k + b^(K+1) T^(K+1) f.

    Args:
        product (BlaschkeProduct): The product b.
        components (np.ndarray): Row k holds the orthonormal K_b coordinates of f_k.
        truncation_index (int): The depth K.
        residual_norm (float): ||T^(K+1) f||_2.
        norm (float): ||f||_2.
        basis (ModelSpaceBasis): The basis the coordinates refer to.
    """

    product: BlaschkeProduct
    components: np.ndarray
    truncation_index: int
    residual_norm: float
    norm: float
    basis: ModelSpaceBasis

    def component_functions(self) -> list[HardyFunction]:
        return [self.basis.from_coordinates(c) for c in self.components]

    def component_norms(self) -> np.ndarray:
        return np.linalg.norm(self.components, axis=1)

    def parseval_defect(self) -> float:
        """| ||f||^2 - sum ||f_k||^2 - residual^2 | / ||f||^2."""
        if self.norm == 0:
            return float(np.sum(self.component_norms() ** 2) + self.residual_norm**2)
        energy = np.sum(self.component_norms() ** 2) + self.residual_norm**2
        return float(abs(self.norm**2 - energy) / self.norm**2)

    def reassemble(self) -> HardyFunction:
        """sum_{k<=K} b^k f_k, evaluated by Horner's rule in R."""
        functions = self.component_functions()
        total = HardyFunction.zero(self.basis.policy)
        for k in range(self.truncation_index, -1, -1):
            total = apply_R(self.product, total) if k < self.truncation_index else total
            total = total + functions[k]
        return total

    def norms_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                ReportSchema.K: np.arange(self.truncation_index + 1),
                ReportSchema.NORM: self.component_norms(),
            }
        )

    def to_dict(self) -> dict:
        return {
            ReportSchema.COMPONENTS: [complex_to_pairs(c) for c in self.components],
            ReportSchema.RESIDUAL: self.residual_norm,
            ReportSchema.TRUNCATION_INDEX: self.truncation_index,
            "parseval_defect": self.parseval_defect(),
        }


def default_depth(product: BlaschkeProduct, f: HardyFunction) -> int:
    """Smallest K with ||T^(K+1) f|| < residual_tolerance ||f||, capped at N / degree."""
    size = f.norm(2)
    cap = f.truncation_degree // product.degree
    if size == 0:
        return 0
    current = apply_T(product, f)
    for K in range(cap):
        if np.linalg.norm(current.coeffs) < f.policy.residual_tolerance * size:
            return K
        current = apply_T(product, current)
    return cap


def decompose(
    product: BlaschkeProduct,
    f: HardyFunction,
    K: int | None = None,
    basis: ModelSpaceBasis | None = None,
) -> Decomposition:
    """
    Components f_k = P_{K_b}(T^k f - R T^(k+1) f), k = 0..K, as orthonormal coordinates.

    Args:
        product (BlaschkeProduct): The product b.
        f (HardyFunction): The function to decompose.
        K (int | None): Depth. By default the smallest K with
            ||T^(K+1) f|| < residual_tolerance ||f||, capped at N / degree.
        basis (ModelSpaceBasis | None): Basis of K_b. Built from the product when omitted.
    """
    basis = basis or build_model_space(product, f.policy)
    K = default_depth(product, f) if K is None else validate_non_negative_int(K, "K")

    iterates = iterate_T(product, f, K + 1)
    components = np.array(
        [
            basis.coordinates(iterates[k] - apply_R(product, iterates[k + 1]))
            for k in range(K + 1)
        ]
    )
    decomposition = Decomposition(
        product=product,
        components=components,
        truncation_index=K,
        residual_norm=float(np.linalg.norm(iterates[K + 1].coeffs)),
        norm=float(np.linalg.norm(f.coeffs)),
        basis=basis,
    )
    logger.debug(
        f"Decomposed f to depth {K}; Parseval defect {decomposition.parseval_defect():.2e}"
    )
    return decomposition


# ------------------------------------------------------------------- Wold checks


@dataclass
class WoldReport:
    """Worst-case residuals of the Wold identities over a sample of functions.

    Attributes:
        right_inverse: max ||T R f - f|| / ||f||.
        idempotence: max ||P P f - P f|| / ||f|| for P = I - R T.
        range_orthogonality: max |<P f, b z^j>| / ||f||.
        monotone_shift_norms: whether ||R^n T^n f|| is non-increasing for every f.
        final_shift_norm: max ||R^n T^n f|| / ||f|| at n = depth.
        partial_sum_gap: max ||sum_{j<=J} R^j P T^j f - f|| / ||f|| at J = depth.
        iterate_norm: max ||T^n f|| / ||f|| at n = depth.
    """

    depth: int
    right_inverse: float
    idempotence: float
    range_orthogonality: float
    monotone_shift_norms: bool
    final_shift_norm: float
    partial_sum_gap: float
    iterate_norm: float

    def passed(self, identity_tolerance: float = 1e-10, limit_tolerance: float = 1e-6) -> bool:
        return (
            self.right_inverse < identity_tolerance
            and self.idempotence < identity_tolerance
            and self.range_orthogonality < identity_tolerance
            and self.monotone_shift_norms
            and self.partial_sum_gap < limit_tolerance
            and self.iterate_norm < limit_tolerance
        )

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def wold_checks(
    product: BlaschkeProduct, sample_f: list[HardyFunction], depth: int = 200
) -> WoldReport:
    """
    Operator identities behind the Wold decomposition for V = R, V* = T.

    Raises:
        ValueError: If the sample is empty.
    """
    if not sample_f:
        raise ValueError("wold_checks needs at least one function")
    depth = validate_non_negative_int(depth, "depth")

    right_inverse = idempotence = orthogonality = 0.0
    final_shift = partial_gap = iterate_norm = 0.0
    monotone = True
    for f in sample_f:
        size = f.norm(2)
        if size == 0:
            continue
        basis = build_model_space(product, f.policy)

        right_inverse = max(right_inverse, apply_T(product, apply_R(product, f)).distance(f) / size)

        projected = f - apply_R(product, apply_T(product, f))
        twice = projected - apply_R(product, apply_T(product, projected))
        idempotence = max(idempotence, twice.distance(projected) / size)
        orthogonality = max(orthogonality, basis.membership_defect(projected) / size)

        iterates = iterate_T(product, f, depth + 1)
        previous = np.inf
        partial = HardyFunction.zero(f.policy)
        for j in range(depth, -1, -1):
            piece = iterates[j] - apply_R(product, iterates[j + 1])
            partial = piece + apply_R(product, partial) if j < depth else piece
        # ||R^n T^n f|| = ||T^n f|| since R is an isometry
        for n in range(depth + 1):
            current = float(np.linalg.norm(iterates[n].coeffs))
            if current > previous * (1 + 1e-12) + 1e-15:
                monotone = False
            previous = current
        final_shift = max(final_shift, float(np.linalg.norm(iterates[depth].coeffs)) / size)
        partial_gap = max(partial_gap, partial.distance(f) / size)
        iterate_norm = max(iterate_norm, float(np.linalg.norm(iterates[depth].coeffs)) / size)

    return WoldReport(
        depth=depth,
        right_inverse=right_inverse,
        idempotence=idempotence,
        range_orthogonality=orthogonality,
        monotone_shift_norms=monotone,
        final_shift_norm=final_shift,
        partial_sum_gap=partial_gap,
        iterate_norm=iterate_norm,
    )


# ------------------------------------------------------------------ H^1 witnesses

KERNEL_GROWTH_AGREEMENT = 1e-4
MAX_KERNEL_GRID = 2**24


def _kernel_h1_norm(r: float, grid_size: int) -> tuple[float, int]:
    """Trapezoid estimate of int dm / |1 - r e^{it}|, doubling the grid until stable."""
    previous = None
    grid = grid_size
    while grid <= MAX_KERNEL_GRID:
        theta = 2 * np.pi * np.arange(grid) / grid
        value = float(np.mean(1 / np.sqrt(1 - 2 * r * np.cos(theta) + r * r)))
        if previous is not None and abs(value - previous) <= KERNEL_GROWTH_AGREEMENT * value:
            return value, grid
        previous = value
        grid *= 2
    raise QuadratureError(
        f"H^1 norm of the kernel at r={r} did not stabilise on grids up to {MAX_KERNEL_GRID}"
    )


def h1_kernel_growth_witness(r_values, policy: NumericPolicy | None = None) -> pd.DataFrame:
    """
    Tabulate ||e_r||_1 = int dm / |1 - r e^{it}| against log(1 / (1 - r)).

    The H^1 norm is a trapezoid estimate with grid doubling. The reference
    column is the closed form 2 K(k) / (pi (1 + r)) with k = 2 sqrt(r) / (1 + r).
    The ratio column divides by log2(1 / (1 - r)) and ratio_natural by the
    natural logarithm.

    Raises:
        ValueError: If the radii are not increasing in [0, 1 - 1e-6].
        QuadratureError: If the trapezoid estimate does not stabilise.
        NumericalInconsistencyError: If trapezoid and closed form disagree by more than 1e-4.
    """
    policy = policy or NumericPolicy()
    radii = np.asarray(list(r_values), dtype=float)
    if radii.size == 0:
        raise ValueError("At least one radius is needed")
    if np.any(radii < 0) or np.any(radii > 1 - 1e-6):
        raise ValueError("Radii must lie in [0, 1 - 1e-6]")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("Radii must be strictly increasing")

    rows = []
    for r in radii:
        value, grid = _kernel_h1_norm(float(r), policy.grid_size)
        modulus = 2 * np.sqrt(r) / (1 + r)
        reference = float(2 * scipy.special.ellipk(modulus**2) / (np.pi * (1 + r)))
        if abs(value - reference) > KERNEL_GROWTH_AGREEMENT * reference:
            raise NumericalInconsistencyError(
                f"H^1 kernel norm at r={r}: quadrature {value} vs closed form {reference}"
            )
        growth = np.log(1 / (1 - r))
        rows.append(
            {
                ReportSchema.RADIUS: float(r),
                ReportSchema.H1_NORM: value,
                ReportSchema.REFERENCE: reference,
                ReportSchema.RATIO: value / (growth / np.log(2)) if growth > 0 else np.nan,
                ReportSchema.RATIO_NATURAL: value / growth if growth > 0 else np.nan,
                ReportSchema.GRID: grid,
            }
        )
    return pd.DataFrame(rows)


def projection_norm_profile(
    product: BlaschkeProduct, f: HardyFunction, k_max: int, p: float = 1.0
) -> pd.DataFrame:
    """Ratios ||P_k f||_p / ||f||_p for k <= k_max."""
    k_max = validate_non_negative_int(k_max, "k_max")
    size = norm_p(f, p)
    if size == 0:
        raise ValueError("The profile needs a non-zero function")
    iterates = iterate_T(product, f, k_max + 1)
    rows = []
    shifted = [apply_R_power(product, g, k) for k, g in enumerate(iterates)]
    for k in range(k_max + 1):
        piece = shifted[k] - shifted[k + 1]
        rows.append({ReportSchema.K: k, ReportSchema.PROJECTION_RATIO: norm_p(piece, p) / size})
    return pd.DataFrame(rows)


def adjoint_defect(product: BlaschkeProduct, f: HardyFunction, g: HardyFunction) -> float:
    """|<T f, g> - <f, b g>|, which vanishes since T is the adjoint of R."""
    return abs(inner_product(apply_T(product, f), g) - inner_product(f, apply_R(product, g)))
