import math
from typing import TYPE_CHECKING, Iterable

import numpy as np

from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core.tools import is_power_of_two

if TYPE_CHECKING:
    from blaschke_cyclicity.core.policy import NumericPolicy


def validate_numeric_policy(policy: "NumericPolicy") -> None:
    """
    Args:
        policy (NumericPolicy): The policy to validate.

    Raises:
        ValueError: If the grid size is not a power of two.
        ValueError: If the grid is smaller than four times the truncation degree
        and undersampling has not been explicitly allowed.
        ValueError: If a tolerance lies outside (0, 1e-2].
    """
    for name in ("truncation_degree", "grid_size", "max_derivative_order"):
        value = getattr(policy, name)
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ValueError(f"{name} must be an integer, got {value!r}")
    for name in (
        "rank_tolerance",
        "residual_tolerance",
        "pole_guard",
        "unimodularity_tolerance",
        "zero_merge_tolerance",
        "disk_margin",
    ):
        value = getattr(policy, name)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{name} must be a number, got {value!r}")
    if not isinstance(policy.allow_undersampled, bool):
        raise ValueError("allow_undersampled must be true or false")

    if policy.truncation_degree < 1:
        raise ValueError("The truncation degree must be a positive integer")

    if not is_power_of_two(policy.grid_size) or policy.grid_size < 8:
        raise ValueError(
            f"The grid size must be a power of two >= 8, got {policy.grid_size}"
        )

    if policy.grid_size < 4 * policy.truncation_degree:
        if not policy.allow_undersampled:
            raise ValueError(
                f"The grid size ({policy.grid_size}) must be at least four times "
                f"the truncation degree ({policy.truncation_degree})"
            )
        logger.warning(
            f"Undersampled grid: M={policy.grid_size} < 4N={4 * policy.truncation_degree}. "
            "Boundary products may alias."
        )

    if policy.grid_size < 2 * policy.truncation_degree:
        raise ValueError("The grid size must be at least twice the truncation degree")

    for name in ("rank_tolerance", "residual_tolerance"):
        value = getattr(policy, name)
        if not 0 < value <= 1e-2:
            raise ValueError(f"{name} must lie in (0, 1e-2], got {value}")

    for name in (
        "pole_guard",
        "unimodularity_tolerance",
        "zero_merge_tolerance",
        "disk_margin",
    ):
        if not getattr(policy, name) > 0:
            raise ValueError(f"{name} must be positive")

    if policy.max_derivative_order < 0:
        raise ValueError("max_derivative_order must be non-negative")


def validate_grid_size(grid_size: int) -> None:
    """
    Args:
        grid_size (int): Number of equispaced points on the unit circle.

    Raises:
        ValueError: If the grid size is not a power of two >= 8.
    """
    if not isinstance(grid_size, (int, np.integer)) or isinstance(grid_size, bool):
        raise ValueError(f"The grid size must be an integer, got {grid_size!r}")
    if grid_size < 8 or not is_power_of_two(grid_size):
        raise ValueError(f"The grid size must be a power of two >= 8, got {grid_size}")


def validate_non_negative_int(value, name: str) -> int:
    """Check that value is a non-negative integer and return it as int."""
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def validate_exponent_p(p: float, minimum: float = 1.0) -> float:
    """
    Args:
        p (float): A Lebesgue exponent.
        minimum (float): Smallest accepted value.

    Raises:
        ValueError: If p is not a finite number or is below the minimum.
    """
    if isinstance(p, bool) or not isinstance(p, (int, float, np.integer, np.floating)):
        raise ValueError(f"The exponent p must be a number, got {p!r}")
    p = float(p)
    if not math.isfinite(p) or p < minimum:
        raise ValueError(f"The exponent p must be a finite number >= {minimum}, got {p}")
    return p


def validate_real(value, name: str, minimum: float) -> float:
    """Check that value is a finite number >= minimum and return it as float."""
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise ValueError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value) or value < minimum:
        raise ValueError(f"{name} must be a finite number >= {minimum}, got {value}")
    return float(value)


def validate_exponents(exponents: Iterable[int]) -> tuple[int, ...]:
    """
    Args:
        exponents (Iterable[int]): The powers n_k of the Blaschke product.

    Raises:
        ValueError: If the exponents are not strictly increasing positive integers.
    """
    exponents = tuple(exponents)
    for n in exponents:
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ValueError(f"Exponents must be positive integers, got {n!r}")
    if any(a >= b for a, b in zip(exponents, exponents[1:])):
        raise ValueError("Exponents must be strictly increasing")
    return exponents


def validate_keys(settings: dict, allowed: Iterable[str], section: str) -> None:
    """
    Args:
        settings (dict): A parsed configuration section.
        allowed (Iterable[str]): The keys accepted in that section.
        section (str): Name used in the error message.

    Raises:
        ValueError: If the section is not a mapping or holds unknown keys.
    """
    if not isinstance(settings, dict):
        raise ValueError(f"The '{section}' section must be a JSON object")
    unknown = sorted(set(settings) - set(allowed))
    if unknown:
        raise ValueError(
            f"Unknown keys in '{section}': {unknown}. Allowed keys: {sorted(allowed)}"
        )


def validate_seed(seed) -> int:
    """Seeds are unsigned 64-bit integers."""
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ValueError(f"The seed must be an integer in [0, 2**64), got {seed!r}")
    return seed
