from enum import Enum


class ValidatedEnum(Enum):
    """Enum that rejects unknown values with the list of valid choices."""

    @classmethod
    def _missing_(cls, value):
        raise ValueError(
            f"'{value}' is not a valid {cls.__name__}.\nPlease choose from: {cls.valid()}"
        )

    @classmethod
    def valid(cls) -> str:
        return ", ".join([repr(v.value) for v in cls])

    def __repr__(self):
        return f"{self.value}"

    def __eq__(self, other):
        if isinstance(other, ValidatedEnum):
            return self.value == other.value
        if isinstance(other, (str, int, float)):
            return self.value == other

        return super().__eq__(other)

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return str(self.value)


class Verdict(ValidatedEnum):
    CYCLIC = "cyclic"
    NON_CYCLIC = "non_cyclic"
    INCONCLUSIVE = "inconclusive"


class ValidSubcommands(ValidatedEnum):
    DECOMPOSE = "decompose"
    ITERATE = "iterate"
    CYCLICITY = "cyclicity"
    LACUNARY_CHECK = "lacunary-check"
    INVARIANT_SUITE = "invariant-suite"
    KERNEL_GROWTH = "kernel-growth"


class ValidNorms(ValidatedEnum):
    """Exponents supported by the model space norm-equivalence search."""

    ONE = 1
    TWO = 2
    FOUR = 4


class WitnessModes(ValidatedEnum):
    GREEDY = "greedy"
    EXHAUSTIVE = "exhaustive"


class ExitCodes(ValidatedEnum):
    SUCCESS = 0
    INVARIANT_FAILURE = 1
    CONFIG_ERROR = 2
    NUMERICAL_INCONSISTENCY = 3

    def __int__(self):
        return int(self.value)
