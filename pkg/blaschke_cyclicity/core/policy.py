from dataclasses import asdict, dataclass, fields, replace

from blaschke_cyclicity.core.validation import validate_numeric_policy

POLICY_ALIASES: dict[str, str] = {
    "N": "truncation_degree",
    "M": "grid_size",
    "tau_rank": "rank_tolerance",
    "tau_res": "residual_tolerance",
}


@dataclass(frozen=True)
class NumericPolicy:
    """Every tolerance and grid size used by a computation session.

    Args:
        truncation_degree (int): Number N of Taylor coefficients kept.
        grid_size (int): Number M of boundary samples. A power of two, at least 4N.
        rank_tolerance (float): Relative singular value threshold for ranks and
            determinant witnesses.
        residual_tolerance (float): Relative threshold for residuals, aliasing
            energy and membership tests.
        pole_guard (float): Smallest accepted |1 - conj(lambda) w| in evaluation.
        unimodularity_tolerance (float): Accepted deviation of |w| from 1 on the circle.
        zero_merge_tolerance (float): Zeros closer than this are merged.
        disk_margin (float): Zeros must satisfy |lambda| < 1 - disk_margin.
        max_derivative_order (int): Highest derivative order accepted.
        allow_undersampled (bool): Accept M < 4N. Only meant to inject aliasing.
    """

    truncation_degree: int = 256
    grid_size: int = 2048
    rank_tolerance: float = 1e-8
    residual_tolerance: float = 1e-10
    pole_guard: float = 1e-14
    unimodularity_tolerance: float = 1e-12
    zero_merge_tolerance: float = 1e-12
    disk_margin: float = 1e-10
    max_derivative_order: int = 64
    allow_undersampled: bool = False

    def __post_init__(self):
        validate_numeric_policy(self)

    def with_overrides(self, **overrides) -> "NumericPolicy":
        """Return a copy with some fields replaced. Accepts N, M, tau_rank and tau_res."""
        valid = {f.name for f in fields(self)}
        resolved = {}
        for key, value in overrides.items():
            name = POLICY_ALIASES.get(key, key)
            if name not in valid:
                raise ValueError(
                    f"'{key}' is not a valid policy field.\n"
                    f"Please choose from: {sorted(valid | set(POLICY_ALIASES))}"
                )
            resolved[name] = value
        return replace(self, **resolved)

    @classmethod
    def from_assignments(
        cls, assignments: list[str], base: "NumericPolicy | None" = None
    ) -> "NumericPolicy":
        """Build a policy from "key=value" strings, as given to --policy."""
        base = base or cls()
        types = {f.name: f.type for f in fields(cls)}
        overrides = {}
        for assignment in assignments:
            key, sep, raw = assignment.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ValueError(f"Policy overrides must look like key=value, got {assignment!r}")
            name = POLICY_ALIASES.get(key, key)
            if name not in types:
                raise ValueError(f"'{key}' is not a valid policy field")
            overrides[key] = _cast(raw.strip(), types[name], key)
        return base.with_overrides(**overrides)

    def to_dict(self) -> dict:
        return asdict(self)


def _cast(raw: str, kind, key: str):
    try:
        if kind is bool:
            if raw.lower() not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1")
        if kind is int:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ValueError(f"Cannot read {key}={raw!r}") from None
