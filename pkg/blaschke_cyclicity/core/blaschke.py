"""Finite Blaschke products b(z) = phase * prod_k ((lambda_k - z)/(1 - conj(lambda_k) z))^d_k."""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from blaschke_cyclicity.common.schema import ReportSchema
from blaschke_cyclicity.core.exceptions import DomainError
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.tools import parse_complex, unit_circle
from blaschke_cyclicity.core.validation import validate_grid_size


@dataclass(frozen=True)
class BlaschkeProduct:
    """A finite Blaschke product with canonical (merged) zeros.

    Args:
        zeros (tuple[complex, ...]): Distinct zeros inside the open unit disk.
        multiplicities (tuple[int, ...]): Multiplicity of each zero. Defaults to 1 each.
        phase (complex): Unimodular constant factor. With the default phase 1, a
            single zero at 0 gives b(z) = -z. Use `monomial` for z^d.
        policy (NumericPolicy): Tolerances used for construction and evaluation.
    """

    zeros: tuple[complex, ...]
    multiplicities: tuple[int, ...] = ()
    phase: complex = 1.0
    policy: NumericPolicy = field(default_factory=NumericPolicy, compare=False, repr=False)

    def __post_init__(self):
        zeros = [complex(z) for z in self.zeros]
        multiplicities = list(self.multiplicities) or [1] * len(zeros)
        if len(multiplicities) != len(zeros):
            raise ValueError("zeros and multiplicities must have the same length")
        if not zeros:
            raise ValueError("A Blaschke product needs at least one zero")

        merged_zeros: list[complex] = []
        merged_mults: list[int] = []
        for zero, mult in zip(zeros, multiplicities):
            if isinstance(mult, bool) or not isinstance(mult, (int, np.integer)) or mult < 1:
                raise ValueError(f"Multiplicities must be positive integers, got {mult!r}")
            if not np.isfinite(zero):
                raise DomainError(f"Zero {zero} is not finite")
            if abs(zero) >= 1 - self.policy.disk_margin:
                raise DomainError(
                    f"Zero {zero} is too close to the unit circle "
                    f"(|lambda| must be < 1 - {self.policy.disk_margin})"
                )
            # Zeros within the merge tolerance collapse onto the first occurrence
            for i, existing in enumerate(merged_zeros):
                if abs(existing - zero) < self.policy.zero_merge_tolerance:
                    merged_mults[i] += int(mult)
                    break
            else:
                merged_zeros.append(zero)
                merged_mults.append(int(mult))

        phase = complex(self.phase)
        if abs(abs(phase) - 1) > self.policy.unimodularity_tolerance:
            raise ValueError(f"The phase must be unimodular, got |phase| = {abs(phase)}")

        object.__setattr__(self, "zeros", tuple(merged_zeros))
        object.__setattr__(self, "multiplicities", tuple(merged_mults))
        object.__setattr__(self, "phase", phase)

    @classmethod
    def monomial(cls, degree: int, policy: NumericPolicy | None = None) -> "BlaschkeProduct":
        """The product b(z) = z^degree."""
        if degree < 1:
            raise ValueError("The degree of z^d must be at least 1")
        return cls(
            zeros=(0j,),
            multiplicities=(degree,),
            phase=(-1.0) ** degree,
            policy=policy or NumericPolicy(),
        )

    @property
    def degree(self) -> int:
        return sum(self.multiplicities)

    @property
    def is_monomial(self) -> bool:
        """True when b is a unimodular constant times z^d."""
        return len(self.zeros) == 1 and self.zeros[0] == 0

    @property
    def monomial_sign(self) -> complex:
        """The constant sigma with b(z) = sigma * z^d when `is_monomial`."""
        return self.phase * (-1.0) ** self.degree

    def zero_derivative_pairs(self) -> list[tuple[complex, int]]:
        """The (lambda_k, l) pairs, 0 <= l < d_k, in canonical order."""
        return [
            (zero, order)
            for zero, mult in zip(self.zeros, self.multiplicities)
            for order in range(mult)
        ]

    def factors(self) -> list["BlaschkeProduct"]:
        """The degree one factors, repeated according to multiplicity."""
        return [
            BlaschkeProduct((zero,), policy=self.policy)
            for zero, mult in zip(self.zeros, self.multiplicities)
            for _ in range(mult)
        ]

    def power(self, n: int) -> "BlaschkeProduct":
        """The product b^n."""
        if n < 1:
            raise ValueError("Powers of a Blaschke product must be positive")
        return BlaschkeProduct(
            self.zeros,
            tuple(m * n for m in self.multiplicities),
            self.phase**n,
            self.policy,
        )

    def without_zero(self, index: int) -> "BlaschkeProduct | None":
        """b with one copy of zero `index` removed. None if nothing is left."""
        mults = list(self.multiplicities)
        mults[index] -= 1
        kept = [(z, m) for z, m in zip(self.zeros, mults) if m > 0]
        if not kept:
            return None
        zeros, mults = zip(*kept)
        return BlaschkeProduct(zeros, mults, self.phase, self.policy)

    def evaluate(self, w):
        return evaluate(self, w)

    def evaluate_derivative(self, w: complex, order: int) -> complex:
        return evaluate_derivative(self, w, order)

    def boundary_samples(self, grid_size: int) -> np.ndarray:
        return boundary_samples(self, grid_size)

    def taylor_coefficients(self, count: int, grid_size: int | None = None) -> np.ndarray:
        """First `count` Taylor coefficients, read off the boundary samples by FFT."""
        grid_size = grid_size or self.policy.grid_size
        spectrum = np.fft.fft(boundary_samples(self, grid_size)) / grid_size
        coeffs = np.zeros(count, dtype=complex)
        kept = min(count, grid_size // 2)
        coeffs[:kept] = spectrum[:kept]
        return coeffs

    def to_dict(self) -> dict:
        data = {
            ReportSchema.ZEROS: [
                {
                    ReportSchema.RE: zero.real,
                    ReportSchema.IM: zero.imag,
                    ReportSchema.MULT: mult,
                }
                for zero, mult in zip(self.zeros, self.multiplicities)
            ]
        }
        if self.phase != 1:
            data[ReportSchema.PHASE] = {
                ReportSchema.RE: self.phase.real,
                ReportSchema.IM: self.phase.imag,
            }
        return data

    @classmethod
    def from_dict(cls, data: dict, policy: NumericPolicy | None = None) -> "BlaschkeProduct":
        """Read {"zeros": [{"re", "im", "mult"}], "phase": {"re", "im"}}."""
        if not isinstance(data, dict) or ReportSchema.ZEROS not in data:
            raise ValueError("A Blaschke product needs a 'zeros' list")
        unknown = set(data) - {ReportSchema.ZEROS, ReportSchema.PHASE}
        if unknown:
            raise ValueError(f"Unknown keys in Blaschke product: {sorted(unknown)}")
        zeros, mults = [], []
        for entry in data[ReportSchema.ZEROS]:
            if not isinstance(entry, dict) or set(entry) - {"re", "im", "mult"}:
                raise ValueError(f"Invalid zero entry {entry!r}")
            zeros.append(parse_complex(entry))
            mults.append(entry.get(ReportSchema.MULT, 1))
        phase = parse_complex(data.get(ReportSchema.PHASE, 1.0))
        return cls(tuple(zeros), tuple(mults), phase, policy or NumericPolicy())


def evaluate(b: BlaschkeProduct, w):
    """
    Evaluate b at a point or an array of points of the closed disk.

    Args:
        b (BlaschkeProduct): The product.
        w (complex | np.ndarray): Points with |w| <= 1 (+ unimodularity tolerance).

    Raises:
        DomainError: If a point lies outside the closed disk or next to a pole.
    """
    points = np.asarray(w, dtype=complex)
    if np.any(np.abs(points) > 1 + b.policy.unimodularity_tolerance):
        raise DomainError("Blaschke products are only evaluated on the closed unit disk")

    value = np.full(points.shape, b.phase, dtype=complex)
    for zero, mult in zip(b.zeros, b.multiplicities):
        denominator = 1 - np.conj(zero) * points
        if np.any(np.abs(denominator) < b.policy.pole_guard):
            raise DomainError(f"Evaluation point too close to the pole 1/conj({zero})")
        value *= ((zero - points) / denominator) ** mult

    return complex(value) if np.ndim(w) == 0 else value


def _factor_series(zero: complex, w: complex, order: int) -> np.ndarray:
    """Taylor coefficients of (zero - z)/(1 - conj(zero) z) around w."""
    a = zero - w
    denominator = 1 - np.conj(zero) * w
    ratio = np.conj(zero) / denominator
    series = np.empty(order + 1, dtype=complex)
    series[0] = a / denominator
    if order:
        powers = np.ones(order, dtype=complex)
        powers[1:] = np.cumprod(np.full(order - 1, ratio))
        series[1:] = powers * (a * ratio - 1) / denominator
    return series


def evaluate_derivative(b: BlaschkeProduct, w: complex, order: int) -> complex:
    """
    Exact derivative of b at an interior point via Taylor-series arithmetic.

    Each factor is expanded around w in closed form and the expansions are
    multiplied as truncated power series. The derivative is order! times the
    coefficient of (z - w)^order.

    Raises:
        ValueError: If order is negative or above the policy's maximum.
        DomainError: If |w| >= 1.
    """
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)) or order < 0:
        raise ValueError(f"The derivative order must be a non-negative integer, got {order!r}")
    if order > b.policy.max_derivative_order:
        raise ValueError(
            f"Derivative order {order} exceeds the maximum of {b.policy.max_derivative_order}"
        )
    w = complex(w)
    if abs(w) >= 1:
        raise DomainError("Derivatives are only evaluated inside the open unit disk")

    series = np.zeros(order + 1, dtype=complex)
    series[0] = b.phase
    for zero, mult in zip(b.zeros, b.multiplicities):
        factor = _factor_series(zero, w, order)
        for _ in range(mult):
            series = np.convolve(series, factor)[: order + 1]

    return complex(math.factorial(order) * series[order])


@lru_cache(maxsize=64)
def _cached_samples(b: BlaschkeProduct, grid_size: int) -> np.ndarray:
    samples = evaluate(b, unit_circle(grid_size))
    samples.setflags(write=False)
    return samples


def boundary_samples(b: BlaschkeProduct, grid_size: int) -> np.ndarray:
    """
    Values b(e^{2 pi i j / M}) for j = 0..M-1 as a read-only array.

    Raises:
        ValueError: If grid_size is not a power of two >= 8.
    """
    validate_grid_size(grid_size)
    return _cached_samples(b, int(grid_size))
