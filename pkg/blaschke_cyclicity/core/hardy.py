"""Hardy space functions as truncated Taylor series with a boundary-sample view."""

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from blaschke_cyclicity.common.schema import ReportSchema
from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core.exceptions import BandwidthError, DomainError
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.tools import (
    complex_to_pairs,
    next_power_of_two,
    pairs_to_complex,
    spectral_extent,
)
from blaschke_cyclicity.core.validation import validate_exponent_p

# Coefficients smaller than this, relative to the largest one, do not count
# towards the effective degree.
DEGREE_TOLERANCE = 1e-15


@dataclass(frozen=True, eq=False)
class HardyFunction:
    """An element of H^p represented by its first N Taylor coefficients.

    Args:
        coeffs (np.ndarray): Taylor coefficients a_0, a_1, ... Padded with zeros
            to the truncation degree N of the policy.
        policy (NumericPolicy): Supplies N and the grid size M.
        truncation_warning (bool): Set when a Riesz projection dropped more than
            residual_tolerance of the energy beyond degree N.
        tail_energy (float): The energy that was dropped.
    """

    coeffs: np.ndarray
    policy: NumericPolicy = field(default_factory=NumericPolicy)
    truncation_warning: bool = False
    tail_energy: float = 0.0

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex).ravel()
        size = self.policy.truncation_degree
        if coeffs.size > size:
            raise ValueError(
                f"Got {coeffs.size} coefficients for truncation degree {size}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Taylor coefficients must be finite")
        padded = np.zeros(size, dtype=complex)
        padded[: coeffs.size] = coeffs
        padded.setflags(write=False)
        object.__setattr__(self, "coeffs", padded)

    # ------------------------------------------------------------------ builders

    @classmethod
    def zero(cls, policy: NumericPolicy | None = None) -> "HardyFunction":
        return cls(np.zeros(0), policy or NumericPolicy())

    @classmethod
    def polynomial(cls, coeffs, policy: NumericPolicy | None = None) -> "HardyFunction":
        return cls(np.asarray(coeffs, dtype=complex), policy or NumericPolicy())

    @classmethod
    def monomial(
        cls, n: int, scale: complex = 1.0, policy: NumericPolicy | None = None
    ) -> "HardyFunction":
        policy = policy or NumericPolicy()
        if not 0 <= n < policy.truncation_degree:
            raise BandwidthError(f"z^{n} does not fit truncation degree {policy.truncation_degree}")
        coeffs = np.zeros(n + 1, dtype=complex)
        coeffs[n] = scale
        return cls(coeffs, policy)

    @classmethod
    def rational(
        cls,
        poles,
        residues,
        constant: complex = 0.0,
        policy: NumericPolicy | None = None,
    ) -> "HardyFunction":
        """
        The function c + sum_j r_j / (1 - z / p_j) with every |p_j| > 1.

        Raises:
            DomainError: If a pole lies in the closed unit disk.
        """
        policy = policy or NumericPolicy()
        poles = np.atleast_1d(np.asarray(poles, dtype=complex))
        residues = np.atleast_1d(np.asarray(residues, dtype=complex))
        if poles.shape != residues.shape:
            raise ValueError("poles and residues must have the same length")
        if np.any(np.abs(poles) <= 1):
            raise DomainError("Rational Hardy functions need poles outside the closed disk")
        n = np.arange(policy.truncation_degree)
        coeffs = (residues[:, None] * (1 / poles[:, None]) ** n[None, :]).sum(axis=0)
        coeffs[0] += constant
        return cls(coeffs, policy)

    @classmethod
    def from_dict(cls, data: dict, policy: NumericPolicy | None = None) -> "HardyFunction":
        """Read {"coeffs": [[re, im], ...]}. Plain numbers are accepted as reals."""
        if not isinstance(data, dict) or set(data) != {ReportSchema.COEFFS}:
            raise ValueError("A Hardy function is given as {'coeffs': [[re, im], ...]}")
        return cls(pairs_to_complex(data[ReportSchema.COEFFS]), policy or NumericPolicy())

    # ---------------------------------------------------------------- properties

    @property
    def truncation_degree(self) -> int:
        return self.policy.truncation_degree

    @property
    def grid_size(self) -> int:
        return self.policy.grid_size

    def effective_degree(self, tolerance: float = DEGREE_TOLERANCE) -> int:
        """Index of the last significant coefficient, or -1 for the zero function."""
        magnitudes = np.abs(self.coeffs)
        peak = magnitudes.max()
        if peak == 0:
            return -1
        return int(np.flatnonzero(magnitudes > tolerance * peak)[-1])

    def boundary_samples(self) -> np.ndarray:
        """Values f(e^{2 pi i j / M}), j = 0..M-1."""
        padded = np.zeros(self.grid_size, dtype=complex)
        padded[: self.truncation_degree] = self.coeffs
        return self.grid_size * np.fft.ifft(padded)

    def samples_frame(self) -> pd.DataFrame:
        """Boundary samples as a table for plotting."""
        samples = self.boundary_samples()
        return pd.DataFrame(
            {
                ReportSchema.THETA: 2 * np.pi * np.arange(self.grid_size) / self.grid_size,
                ReportSchema.REAL: samples.real,
                ReportSchema.IMAG: samples.imag,
                ReportSchema.MODULUS: np.abs(samples),
            }
        )

    # --------------------------------------------------------------- evaluation

    def evaluate(self, z):
        """Evaluate the truncated series at points of the closed disk."""
        points = np.asarray(z, dtype=complex)
        if np.any(np.abs(points) > 1 + self.policy.unimodularity_tolerance):
            raise DomainError("Hardy functions are evaluated on the closed unit disk only")
        value = np.polynomial.polynomial.polyval(points, self.coeffs)
        return complex(value) if np.ndim(z) == 0 else value

    def derivative_at(self, z: complex, order: int) -> complex:
        """The derivative f^(order)(z) of the truncated series."""
        if order < 0:
            raise ValueError("The derivative order must be non-negative")
        derived = np.polynomial.polynomial.polyder(self.coeffs, order) if order else self.coeffs
        if derived.size == 0:
            return 0j
        return complex(np.polynomial.polynomial.polyval(complex(z), derived))

    # --------------------------------------------------------------- arithmetic

    def _check_compatible(self, other: "HardyFunction") -> None:
        if (
            self.truncation_degree != other.truncation_degree
            or self.grid_size != other.grid_size
        ):
            raise ValueError("Hardy functions must share truncation degree and grid size")

    def __add__(self, other: "HardyFunction") -> "HardyFunction":
        if not isinstance(other, HardyFunction):
            return NotImplemented
        self._check_compatible(other)
        return HardyFunction(self.coeffs + other.coeffs, self.policy)

    def __sub__(self, other: "HardyFunction") -> "HardyFunction":
        if not isinstance(other, HardyFunction):
            return NotImplemented
        self._check_compatible(other)
        return HardyFunction(self.coeffs - other.coeffs, self.policy)

    def __mul__(self, scalar) -> "HardyFunction":
        if isinstance(scalar, HardyFunction):
            return multiply(self, scalar)
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return HardyFunction(self.coeffs * scalar, self.policy)

    __rmul__ = __mul__

    def __neg__(self) -> "HardyFunction":
        return HardyFunction(-self.coeffs, self.policy)

    def norm(self, p: float = 2.0) -> float:
        return norm_p(self, p)

    def distance(self, other: "HardyFunction") -> float:
        """H^2 distance, computed from the coefficients."""
        self._check_compatible(other)
        return float(np.linalg.norm(self.coeffs - other.coeffs))

    def to_dict(self) -> dict:
        return {ReportSchema.COEFFS: complex_to_pairs(self.coeffs)}

    def __repr__(self):
        return (
            f"HardyFunction(N={self.truncation_degree}, M={self.grid_size}, "
            f"degree={self.effective_degree()}, truncation_warning={self.truncation_warning})"
        )


def riesz_project(samples: np.ndarray, policy: NumericPolicy | None = None) -> HardyFunction:
    """
    Keep the non-negative frequencies of boundary samples, truncated to N.

    The energy found in frequencies N..M/2 is compared to the total energy. If
    it exceeds residual_tolerance times the total, the result carries a
    truncation warning.

    Args:
        samples (np.ndarray): Values on the M-point grid of the policy.
        policy (NumericPolicy): Supplies N and M.

    Raises:
        ValueError: If the sample vector does not have length M.
    """
    policy = policy or NumericPolicy()
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (policy.grid_size,):
        raise ValueError(
            f"Expected {policy.grid_size} boundary samples, got shape {samples.shape}"
        )

    spectrum = np.fft.fft(samples) / policy.grid_size
    size = policy.truncation_degree
    tail = float(np.sum(np.abs(spectrum[size : policy.grid_size // 2 + 1]) ** 2))
    total = float(np.sum(np.abs(spectrum) ** 2))
    flagged = total > 0 and tail > policy.residual_tolerance * total
    if flagged:
        logger.debug(f"Riesz projection dropped {tail:.3e} of {total:.3e} energy")

    return HardyFunction(
        spectrum[:size], policy, truncation_warning=flagged, tail_energy=tail
    )


def multiply(
    f: HardyFunction,
    g: "HardyFunction | np.ndarray",
    extent: tuple[int, int] | None = None,
) -> HardyFunction:
    """
    Boundary product f * g followed by the Riesz projection.

    Args:
        f (HardyFunction): The analytic factor.
        g (HardyFunction | np.ndarray): Another Hardy function or boundary samples
            of any L^2 function on the grid of f.
        extent (tuple[int, int] | None): Known (lowest, highest) significant
            frequency of g. Computed from the samples when omitted.

    Raises:
        BandwidthError: If the product's frequencies do not fit in [-M/2, M/2).
    """
    if isinstance(g, HardyFunction):
        f._check_compatible(g)
        g_samples = g.boundary_samples()
        extent = (0, max(g.effective_degree(), 0))
    else:
        g_samples = np.asarray(g, dtype=complex)
        if g_samples.shape != (f.grid_size,):
            raise ValueError(
                f"Expected {f.grid_size} boundary samples, got shape {g_samples.shape}"
            )
        extent = extent or spectral_extent(g_samples)

    lowest, highest = extent
    bandwidth = max(max(f.effective_degree(), 0) + highest, -lowest)
    if bandwidth >= f.grid_size // 2:
        raise BandwidthError(
            f"The product needs frequencies up to {bandwidth}; "
            f"use a grid size of at least {next_power_of_two(2 * bandwidth + 2)}"
        )

    return riesz_project(f.boundary_samples() * g_samples, f.policy)


def norm_p(f: HardyFunction, p: float) -> float:
    """
    Boundary quadrature estimate of the H^p norm on the M-point grid.

    Raises:
        ValueError: If p < 1.
    """
    p = validate_exponent_p(p)
    moduli = np.abs(f.boundary_samples())
    peak = moduli.max()
    if peak == 0:
        return 0.0
    # Scale before raising to the power p to stay clear of overflow
    return float(peak * np.mean((moduli / peak) ** p) ** (1 / p))


def inner_product(f: HardyFunction, g: HardyFunction) -> complex:
    """
    The H^2 pairing sum_k a_k conj(b_k).

    Raises:
        ValueError: If the truncation degrees differ.
    """
    if f.truncation_degree != g.truncation_degree:
        raise ValueError("Inner products need a common truncation degree")
    return complex(np.vdot(g.coeffs, f.coeffs))


def rational_derivative(poles, residues, constant: complex, z: complex, order: int) -> complex:
    """Closed-form derivative of c + sum_j r_j / (1 - z / p_j)."""
    poles = np.atleast_1d(np.asarray(poles, dtype=complex))
    residues = np.atleast_1d(np.asarray(residues, dtype=complex))
    terms = residues * math.factorial(order) / poles**order / (1 - z / poles) ** (order + 1)
    value = complex(terms.sum())
    return value + complex(constant) if order == 0 else value
