import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from blaschke_cyclicity.config import CyclicityPaths, logger
from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.enums import ValidSubcommands
from blaschke_cyclicity.core.fixtures import get_fixture
from blaschke_cyclicity.core.hardy import HardyFunction
from blaschke_cyclicity.core.lacunary import LacunarySpec
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.tools import pairs_to_complex, parse_complex
from blaschke_cyclicity.core.validation import validate_keys, validate_seed

SECTIONS = ("blaschke", "function", "lacunary", "policy", "parameters", "output", "seed")

# Accepted parameters and their defaults, per subcommand
PARAMETER_DEFAULTS: dict[ValidSubcommands, dict[str, Any]] = {
    ValidSubcommands.DECOMPOSE: {"K": None},
    ValidSubcommands.ITERATE: {"iterations": 16, "remainder_max": 8, "p": 1.0},
    ValidSubcommands.CYCLICITY: {"p": 2.0, "oracle_iterations": 512, "witness_mode": "greedy"},
    ValidSubcommands.LACUNARY_CHECK: {"p": 2.0, "min_ratio": 1.5, "gamma": 1.0},
    ValidSubcommands.INVARIANT_SUITE: {"battery_size": 50},
    ValidSubcommands.KERNEL_GROWTH: {"k_min": 3, "k_max": 10, "radii": None},
}

# Exactly one of these sections supplies the input function
SOURCE_SECTIONS: dict[ValidSubcommands, tuple[str, ...]] = {
    ValidSubcommands.DECOMPOSE: ("function", "lacunary"),
    ValidSubcommands.ITERATE: ("function", "lacunary"),
    ValidSubcommands.CYCLICITY: ("lacunary",),
    ValidSubcommands.LACUNARY_CHECK: ("lacunary",),
    ValidSubcommands.INVARIANT_SUITE: (),
    ValidSubcommands.KERNEL_GROWTH: (),
}


@dataclass
class RunConfig:
    """A validated run configuration. Built by `load_run_config` before any computation."""

    subcommand: ValidSubcommands
    policy: NumericPolicy
    seed: int = 0
    product: BlaschkeProduct | None = None
    function: HardyFunction | None = None
    spec: LacunarySpec | None = None
    fixture: str | None = None
    parameters: dict[str, Any] = field(default_factory=dict)
    output_directory: Path = field(default_factory=lambda: CyclicityPaths.output)


class SectionLoader(ABC):
    """A base class for reading one section of a run configuration."""

    def __init__(self, settings):
        self.settings = settings

    @abstractmethod
    def load(self, config: RunConfig) -> None:
        """Read the section into the run configuration."""


class BlaschkeLoader(SectionLoader):
    def load(self, config: RunConfig) -> None:
        config.product = BlaschkeProduct.from_dict(self.settings, config.policy)


class FunctionLoader(SectionLoader):
    """Either {"coeffs": [...]} or {"rational": {"poles", "residues", "constant"}}."""

    def load(self, config: RunConfig) -> None:
        validate_keys(self.settings, ("coeffs", "rational"), "function")
        if len(self.settings) != 1:
            raise ValueError("The function section holds exactly one of 'coeffs' or 'rational'")
        if "coeffs" in self.settings:
            config.function = HardyFunction.from_dict(self.settings, config.policy)
            return

        rational = self.settings["rational"]
        validate_keys(rational, ("poles", "residues", "constant"), "function.rational")
        config.function = HardyFunction.rational(
            pairs_to_complex(rational.get("poles", [])),
            pairs_to_complex(rational.get("residues", [])),
            parse_complex(rational.get("constant", 0.0)),
            config.policy,
        )


class LacunaryLoader(SectionLoader):
    """Either {"fixture": name} or an explicit spec over the 'blaschke' product."""

    def load(self, config: RunConfig) -> None:
        if isinstance(self.settings, dict) and "fixture" in self.settings:
            validate_keys(self.settings, ("fixture",), "lacunary")
            if config.product is not None:
                raise ValueError("A lacunary fixture brings its own product; drop 'blaschke'")
            config.fixture = str(self.settings["fixture"])
            config.spec = get_fixture(config.fixture).spec(config.policy)
            config.product = config.spec.product
            return

        if config.product is None:
            raise ValueError("An explicit lacunary spec needs a 'blaschke' section")
        config.spec = LacunarySpec.from_dict(self.settings, config.product, config.policy)


class ParametersLoader(SectionLoader):
    def load(self, config: RunConfig) -> None:
        defaults = PARAMETER_DEFAULTS[config.subcommand]
        validate_keys(self.settings, defaults, f"parameters ({config.subcommand})")
        config.parameters = {**defaults, **self.settings}


class OutputLoader(SectionLoader):
    def load(self, config: RunConfig) -> None:
        validate_keys(self.settings, ("directory",), "output")
        if "directory" in self.settings:
            config.output_directory = Path(self.settings["directory"])


class SeedLoader(SectionLoader):
    def load(self, config: RunConfig) -> None:
        config.seed = validate_seed(self.settings)


# Order matters: the product is read before the function and the lacunary spec
AVAILABLE_LOADERS = {
    "blaschke": BlaschkeLoader,
    "function": FunctionLoader,
    "lacunary": LacunaryLoader,
    "parameters": ParametersLoader,
    "output": OutputLoader,
    "seed": SeedLoader,
}


def read_config_file(path: str | Path | None) -> dict:
    """
    Raises:
        ValueError: If the file is not a JSON object (json.JSONDecodeError included).
        OSError: If the file cannot be read.
    """
    if path is None:
        return {}
    settings = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(settings, dict):
        raise ValueError("A run configuration must be a JSON object")
    return settings


def _policy(settings: dict, assignments: list[str]) -> NumericPolicy:
    """Fixture defaults, then the 'policy' section, then --policy assignments."""
    lacunary = settings.get("lacunary")
    base = NumericPolicy()
    if isinstance(lacunary, dict) and "fixture" in lacunary:
        base = get_fixture(str(lacunary["fixture"])).default_policy()
    overrides = settings.get("policy", {})
    if not isinstance(overrides, dict):
        raise ValueError("The 'policy' section must be a JSON object")
    policy = base.with_overrides(**overrides) if overrides else base
    return NumericPolicy.from_assignments(list(assignments), policy) if assignments else policy


def load_run_config(
    settings: dict | str | Path | None,
    subcommand: str,
    policy_assignments: list[str] | None = None,
    seed: int | None = None,
    output_directory: str | Path | None = None,
) -> RunConfig:
    """
    Validate a configuration for a subcommand.

    Args:
        settings (dict | str | Path | None): A parsed configuration or the path of a JSON file.
        subcommand (str): One of the ValidSubcommands.
        policy_assignments (list[str]): "key=value" overrides from --policy.
        seed (int | None): Overrides the 'seed' section.
        output_directory (str | Path | None): Overrides the 'output' section.

    Raises:
        ValueError: On unknown keys, missing sections or invalid values.
    """
    subcommand = ValidSubcommands(subcommand)
    if not isinstance(settings, dict):
        settings = read_config_file(settings)
    validate_keys(settings, SECTIONS, "config")

    sources = SOURCE_SECTIONS[subcommand]
    present = [s for s in sources if s in settings]
    if sources and len(present) != 1:
        raise ValueError(f"The {subcommand} subcommand needs exactly one of the sections {list(sources)}")
    unused = [s for s in ("function", "lacunary") if s in settings and s not in sources]
    if "blaschke" in settings and not sources:
        unused.insert(0, "blaschke")
    if unused:
        raise ValueError(f"The sections {unused} are not used by {subcommand}")

    config = RunConfig(subcommand, _policy(settings, policy_assignments or []))
    config.parameters = dict(PARAMETER_DEFAULTS[subcommand])
    for name, loader in AVAILABLE_LOADERS.items():
        if name in settings:
            loader(settings=settings[name]).load(config)
    if sources and config.product is None:
        raise ValueError(f"The {subcommand} subcommand needs a 'blaschke' section")

    if seed is not None:
        config.seed = validate_seed(seed)
    if output_directory is not None:
        config.output_directory = Path(output_directory)

    logger.info(f"Loaded {subcommand} configuration")
    return config
