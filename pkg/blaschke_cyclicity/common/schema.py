from dataclasses import dataclass


@dataclass
class ReportSchema:
    VERSION: str = "version"
    SUBCOMMAND: str = "subcommand"
    SEED: str = "seed"
    POLICY: str = "policy"
    RESULT: str = "result"
    ZEROS: str = "zeros"
    PHASE: str = "phase"
    RE: str = "re"
    IM: str = "im"
    MULT: str = "mult"
    COEFFS: str = "coeffs"
    EXPONENTS: str = "exponents"
    COMPONENTS: str = "components"
    RESIDUAL: str = "residual"
    TRUNCATION_INDEX: str = "truncation_index"
    K: str = "k"
    N: str = "n"
    EXPONENT: str = "exponent"
    NORM: str = "norm"
    NORM_P: str = "norm_p"
    PARTIAL_SUM: str = "partial_sum"
    PROJECTION_RATIO: str = "projection_ratio"
    TARGET: str = "target"
    DISTANCE: str = "distance"
    CHECKPOINT: str = "checkpoint"
    THETA: str = "theta"
    REAL: str = "real"
    IMAG: str = "imag"
    MODULUS: str = "modulus"
    RADIUS: str = "r"
    H1_NORM: str = "h1_norm"
    REFERENCE: str = "reference"
    RATIO: str = "ratio"
    RATIO_NATURAL: str = "ratio_natural"
    GRID: str = "grid"
    INVARIANT: str = "invariant"
    PASSED: str = "passed"
    WORST_RESIDUAL: str = "worst_residual"
    TOLERANCE: str = "tolerance"
    CHECKS: str = "checks"
    VERDICT: str = "verdict"
    ITERATIONS: str = "iterations"
    DEFECT: str = "defect"
    M: str = "m"
