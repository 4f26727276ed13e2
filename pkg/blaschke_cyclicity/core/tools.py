import numpy as np


def is_power_of_two(n: int) -> bool:
    """Check if n is a positive power of two."""
    return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    """Smallest power of two that is >= n."""
    return 1 if n <= 1 else 1 << (int(n) - 1).bit_length()


def unit_circle(grid_size: int) -> np.ndarray:
    """Equispaced points e^{2 pi i j / M} on the unit circle."""
    return np.exp(2j * np.pi * np.arange(grid_size) / grid_size)


def geometric_powers(x: complex, count: int) -> np.ndarray:
    """Return [1, x, x^2, ..., x^(count-1)] without relying on 0**0."""
    powers = np.ones(count, dtype=complex)
    if count > 1:
        powers[1:] = np.cumprod(np.full(count - 1, x, dtype=complex))
    return powers


def spectral_extent(samples: np.ndarray, tolerance: float = 1e-15) -> tuple[int, int]:
    """
    Lowest and highest significant Fourier frequency of boundary samples.

    Args:
        samples (np.ndarray): Values on an equispaced grid of the circle.
        tolerance (float): Relative magnitude below which a coefficient is noise.

    Returns:
        tuple[int, int]: Most negative and most positive significant frequency.
    """
    grid_size = samples.shape[-1]
    magnitudes = np.abs(np.fft.fft(samples)) / grid_size
    peak = magnitudes.max(initial=0.0)
    if peak == 0:
        return 0, 0
    indices = np.flatnonzero(magnitudes > tolerance * peak)
    frequencies = np.where(indices < grid_size // 2, indices, indices - grid_size)
    return int(frequencies.min()), int(frequencies.max())


def complex_to_pairs(values) -> list[list[float]]:
    """Encode complex numbers as [re, im] pairs for JSON."""
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, complex).ravel()]


def parse_complex(value) -> complex:
    """Read a number, an [re, im] pair or an {"re", "im"} object."""
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"Complex pairs must have two entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, bool) or not isinstance(value, (int, float, complex)):
        raise ValueError(f"Cannot read a complex number from {value!r}")
    return complex(value)


def pairs_to_complex(values) -> np.ndarray:
    """Decode a list of numbers or [re, im] pairs."""
    return np.array([parse_complex(v) for v in values], dtype=complex)


def relative_rank(matrix: np.ndarray, tolerance: float) -> tuple[int, np.ndarray]:
    """
    Numerical rank with a threshold relative to the largest singular value.

    Returns:
        tuple[int, np.ndarray]: The rank and the singular values.
    """
    if matrix.size == 0:
        return 0, np.zeros(0)
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    if singular_values[0] == 0:
        return 0, singular_values
    return int(np.sum(singular_values > tolerance * singular_values[0])), singular_values
