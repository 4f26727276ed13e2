"""The model space K_b = H^2 minus b H^2, spanned by the reproducing kernels at the zeros of b."""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special

from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.enums import ValidNorms
from blaschke_cyclicity.core.exceptions import DomainError
from blaschke_cyclicity.core.hardy import HardyFunction, multiply, riesz_project
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.tools import complex_to_pairs, geometric_powers, unit_circle

# Last-coefficient size, relative to the peak, above which a kernel is
# considered cut off by the truncation degree.
KERNEL_TAIL_WARNING = 1e-12


def kernel_coefficients(lam: complex, order: int, size: int) -> np.ndarray:
    """Taylor coefficients of l! z^l / (1 - conj(lam) z)^(l+1): n!/(n-l)! conj(lam)^(n-l)."""
    coeffs = np.zeros(size, dtype=complex)
    if order >= size:
        return coeffs
    n = np.arange(order, size)
    coeffs[order:] = scipy.special.poch(n - order + 1, order) * geometric_powers(
        np.conj(lam), size - order
    )
    return coeffs


def kernel(lam: complex, order: int, policy: NumericPolicy | None = None) -> HardyFunction:
    """
    The reproducing kernel e_{lam,l}, with <f, e_{lam,l}> = f^(l)(lam).

    Raises:
        DomainError: If |lam| >= 1.
        ValueError: If the order is negative.
    """
    policy = policy or NumericPolicy()
    if abs(lam) >= 1:
        raise DomainError(f"Kernels need a point inside the disk, got {lam}")
    if order < 0:
        raise ValueError("The kernel order must be non-negative")
    coeffs = kernel_coefficients(complex(lam), order, policy.truncation_degree)
    peak = np.abs(coeffs).max()
    if peak > 0 and abs(coeffs[-1]) > KERNEL_TAIL_WARNING * peak:
        logger.warning(
            f"Kernel e_({lam}, {order}) is truncated at degree {policy.truncation_degree}; "
            "consider a larger truncation degree"
        )
    return HardyFunction(coeffs, policy)


@dataclass(frozen=True, eq=False)
class ModelSpaceBasis:
    """Kernels, Gram matrix and an orthonormal basis of K_b.

    The orthonormal basis is q = C e where C = L^{-1} and G = L L^H is the
    Cholesky factorisation of the Gram matrix of the kernels.
    """

    product: BlaschkeProduct
    kernels: tuple[tuple[complex, int, HardyFunction], ...]
    gram: np.ndarray
    orthonormal_change_of_basis: np.ndarray
    policy: NumericPolicy = field(default_factory=NumericPolicy)

    @classmethod
    def build(
        cls, product: BlaschkeProduct, policy: NumericPolicy | None = None
    ) -> "ModelSpaceBasis":
        """
        Raises:
            ValueError: If the Gram matrix is numerically singular.
        """
        policy = policy or product.policy
        kernels = tuple(
            (lam, order, kernel(lam, order, policy))
            for lam, order in product.zero_derivative_pairs()
        )
        matrix = np.array([k[2].coeffs for k in kernels])
        gram = matrix @ matrix.conj().T
        gram = (gram + gram.conj().T) / 2

        smallest = float(scipy.linalg.eigvalsh(gram).min())
        if smallest <= policy.rank_tolerance:
            raise ValueError(
                f"The kernel Gram matrix is numerically singular (min eigenvalue "
                f"{smallest:.3e} <= {policy.rank_tolerance:.1e}); zeros may be too close"
            )

        lower = scipy.linalg.cholesky(gram, lower=True)
        change = scipy.linalg.solve_triangular(lower, np.eye(len(kernels)), lower=True)
        logger.debug(f"Built K_b of dimension {len(kernels)}, min Gram eigenvalue {smallest:.3e}")
        return cls(product, kernels, gram, change, policy)

    @property
    def dimension(self) -> int:
        return len(self.kernels)

    @cached_property
    def kernel_matrix(self) -> np.ndarray:
        """Kernel coefficients, one row per kernel."""
        return np.array([k[2].coeffs for k in self.kernels])

    @cached_property
    def orthonormal_matrix(self) -> np.ndarray:
        """Coefficients of the orthonormal basis q_i, one row per vector."""
        return self.orthonormal_change_of_basis @ self.kernel_matrix

    @property
    def orthonormal(self) -> tuple[HardyFunction, ...]:
        return tuple(HardyFunction(row, self.policy) for row in self.orthonormal_matrix)

    @cached_property
    def min_gram_eigenvalue(self) -> float:
        return float(scipy.linalg.eigvalsh(self.gram).min())

    @cached_property
    def bandwidth(self) -> int:
        """Largest effective degree among the orthonormal basis vectors."""
        return max(q.effective_degree(1e-16) for q in self.orthonormal)

    @cached_property
    def evaluation_matrix(self) -> np.ndarray:
        """D with D[j, i] = q_i^(l_j)(lambda_j), rows in canonical (lambda, l) order."""
        return (self.orthonormal_matrix @ self.kernel_matrix.conj().T).T

    def coordinates(self, f: HardyFunction) -> np.ndarray:
        """Coordinates <f, q_i> of the orthogonal projection of f on K_b."""
        return self.orthonormal_matrix.conj() @ f.coeffs

    def from_coordinates(self, coordinates) -> HardyFunction:
        coordinates = np.asarray(coordinates, dtype=complex)
        if coordinates.shape != (self.dimension,):
            raise ValueError(
                f"Expected {self.dimension} coordinates, got shape {coordinates.shape}"
            )
        return HardyFunction(coordinates @ self.orthonormal_matrix, self.policy)

    def project(self, f: HardyFunction) -> HardyFunction:
        return self.from_coordinates(self.coordinates(f))

    def distance(self, f: HardyFunction) -> float:
        """H^2 distance from f to K_b."""
        return f.distance(self.project(f))

    def membership_defect(self, f: HardyFunction | None = None, count: int | None = None) -> float:
        """
        Largest |<g, b z^j>| for j < count, over g = f or over every kernel.

        Uses the Toeplitz matrix of the Taylor coefficients of b.
        """
        size = self.policy.truncation_degree
        count = count or size - self.product.degree
        b_coeffs = self.product.taylor_coefficients(size, self.policy.grid_size)
        first_column = np.zeros(count, dtype=complex)
        first_column[0] = b_coeffs[0]
        shifts = scipy.linalg.toeplitz(first_column, b_coeffs)
        vectors = self.kernel_matrix if f is None else f.coeffs[None, :]
        return float(np.abs(vectors @ shifts.conj().T).max())

    def to_dict(self) -> dict:
        return {
            "product": self.product.to_dict(),
            "kernels": [
                {"lambda": [lam.real, lam.imag], "l": order, "coeffs": complex_to_pairs(k.coeffs)}
                for lam, order, k in self.kernels
            ],
            "gram": [complex_to_pairs(row) for row in self.gram],
            "min_gram_eigenvalue": self.min_gram_eigenvalue,
        }


def build_model_space(
    product: BlaschkeProduct, policy: NumericPolicy | None = None
) -> ModelSpaceBasis:
    return _cached_basis(product, policy or product.policy)


@lru_cache(maxsize=32)
def _cached_basis(product: BlaschkeProduct, policy: NumericPolicy) -> ModelSpaceBasis:
    return ModelSpaceBasis.build(product, policy)


def dual_kernel(basis: ModelSpaceBasis, zero_index: int) -> HardyFunction:
    """
    The dual kernel (b_i(z) / b_i(lambda_i)) (1 - |lambda_i|^2) e_{lambda_i},
    where b_i is b with the factor at lambda_i removed.

    Raises:
        ValueError: If the zero is not simple.
    """
    product = basis.product
    if not 0 <= zero_index < len(product.zeros):
        raise ValueError(f"Zero index {zero_index} is out of range")
    if product.multiplicities[zero_index] != 1:
        raise ValueError("Dual kernels are only defined for simple zeros")

    lam = product.zeros[zero_index]
    scale = 1 - abs(lam) ** 2
    e_lam = kernel(lam, 0, basis.policy)
    rest = product.without_zero(zero_index)
    if rest is None:
        return scale * e_lam

    # The unimodular phase of b cancels in the quotient
    rest = BlaschkeProduct(rest.zeros, rest.multiplicities, 1.0, rest.policy)
    shifted = multiply(e_lam, rest.boundary_samples(basis.policy.grid_size))
    return (scale / rest.evaluate(lam)) * shifted


def conjugation(basis: ModelSpaceBasis, f: HardyFunction) -> HardyFunction:
    """
    The map f -> P_+(b e^{-i theta} conj(f)), an antilinear isometry of K_b.

    Raises:
        ValueError: If f is not in K_b up to residual_tolerance.
    """
    size = f.norm(2)
    if size == 0:
        return HardyFunction.zero(f.policy)
    if basis.distance(f) > basis.policy.residual_tolerance * size:
        raise ValueError("Conjugation is only defined on the model space K_b")

    grid = f.grid_size
    samples = (
        basis.product.boundary_samples(grid)
        * np.conj(unit_circle(grid))
        * np.conj(f.boundary_samples())
    )
    return riesz_project(samples, f.policy)


@dataclass
class NormEquivalence:
    """Lower bound estimate of sup ||g||_p / ||g||_q over K_b."""

    p: int
    q: int
    constant: float
    maximizer_coordinates: np.ndarray
    restarts: int
    lower_bound: bool = True

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "constant": self.constant,
            "maximizer": complex_to_pairs(self.maximizer_coordinates),
            "restarts": self.restarts,
            "lower_bound_estimate": self.lower_bound,
        }


def norm_equivalence_constant(
    basis: ModelSpaceBasis, p: int, q: int, restarts: int = 64, seed: int = 0
) -> NormEquivalence:
    """
    Maximise ||g||_p / ||g||_q over the unit sphere of K_b coordinates.

    Random restarts are followed by L-BFGS-B local ascent on the 2d real
    coordinates. The result is only a lower bound of the supremum.

    Args:
        basis (ModelSpaceBasis): The model space.
        p (int): Numerator exponent, one of 1, 2, 4.
        q (int): Denominator exponent, one of 1, 2, 4.
        restarts (int): Number of random starting points.
        seed (int): Seed of the starting points.
    """
    p, q = ValidNorms(p).value, ValidNorms(q).value
    samples = np.array([g.boundary_samples() for g in basis.orthonormal])
    dimension = basis.dimension

    def ratio(x: np.ndarray) -> float:
        values = np.abs((x[:dimension] + 1j * x[dimension:]) @ samples)
        denominator = np.mean(values**q) ** (1 / q)
        if denominator == 0:
            return 0.0
        return float(np.mean(values**p) ** (1 / p) / denominator)

    if dimension == 1:
        start = np.array([1.0, 0.0])
        return NormEquivalence(p, q, ratio(start), np.array([1.0 + 0j]), 0)

    rng = np.random.default_rng(seed)
    best_value, best_x = -np.inf, None
    for _ in range(restarts):
        start = rng.standard_normal(2 * dimension)
        result = scipy.optimize.minimize(lambda x: -ratio(x), start, method="L-BFGS-B")
        candidate = result.x if ratio(result.x) >= ratio(start) else start
        value = ratio(candidate)
        if value > best_value:
            best_value, best_x = value, candidate

    coordinates = best_x[:dimension] + 1j * best_x[dimension:]
    coordinates = coordinates / np.linalg.norm(coordinates)
    return NormEquivalence(p, q, best_value, coordinates, restarts)


@lru_cache(maxsize=32)
def cached_norm_constant(product: BlaschkeProduct, policy: NumericPolicy, p: int, q: int) -> float:
    """norm_equivalence_constant for a product, computed once per session."""
    return norm_equivalence_constant(build_model_space(product, policy), p, q).constant
