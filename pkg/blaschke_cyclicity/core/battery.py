"""Seeded random battery behind the invariant suite."""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from blaschke_cyclicity.common.schema import ReportSchema
from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.exceptions import BandwidthError
from blaschke_cyclicity.core.hardy import HardyFunction, inner_product, rational_derivative
from blaschke_cyclicity.core.lacunary import (
    LacunarySpec,
    build,
    l4_l1_equivalence_check,
    max_feasible_terms,
    product_lemma_check,
)
from blaschke_cyclicity.core.model_space import build_model_space, cached_norm_constant, kernel
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.toeplitz import (
    decompose,
    h1_kernel_growth_witness,
    project_Pk,
    project_Pk_integral,
    remainder_consistency,
    wold_checks,
)
from blaschke_cyclicity.core.validation import validate_non_negative_int, validate_seed

TOLERANCES = {
    "parseval": 1e-8,
    "pk_identities": 1e-9,
    "pk_integral": 1e-8,
    "remainder": 1e-8,
    "reproducing": 1e-9,
    "wold": 1e-6,
    "product_lemma": 1e-9,
    "l4_l1": 1e-8,
    "kernel_growth": 0.0,
}

KERNEL_GROWTH_BAND = (0.2, 0.5)
MAX_PROJECTION_INDEX = 5
MAX_REMAINDER_INDEX = 8
MAX_DERIVATIVE_ORDER = 3
MAX_KERNEL_POINT = 0.8
WOLD_DEPTH = 200

# Number of products from the default list that take part in the L4 checks
L4_PRODUCTS = 3

MAX_RECORDED_ERRORS = 5


def default_products(policy: NumericPolicy) -> list[BlaschkeProduct]:
    """Degrees 1 to 4, with and without multiple zeros."""
    return [
        BlaschkeProduct.monomial(1, policy),
        BlaschkeProduct((0.5,), policy=policy),
        BlaschkeProduct((0.5, -0.4), policy=policy),
        BlaschkeProduct((0j, 0.5), (2, 1), policy=policy),
        BlaschkeProduct((0.3 + 0.2j, -0.5, 0.4j), (2, 1, 1), policy=policy),
    ]


@dataclass
class RandomFunction:
    """A battery function. Rational ones keep their poles for closed-form derivatives."""

    function: HardyFunction
    poles: np.ndarray | None = None
    residues: np.ndarray | None = None
    constant: complex = 0j

    def derivative(self, z: complex, order: int) -> complex:
        if self.poles is None:
            return self.function.derivative_at(z, order)
        return rational_derivative(self.poles, self.residues, self.constant, z, order)


def _complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_function(rng: np.random.Generator, policy: NumericPolicy) -> RandomFunction:
    """A rational function with 1 to 3 poles at radius 2 to 4, or a polynomial of degree <= 12."""
    if rng.random() < 0.5:
        count = int(rng.integers(1, 4))
        poles = rng.uniform(2, 4, count) * np.exp(2j * np.pi * rng.random(count))
        residues = _complex_normal(rng, count)
        constant = complex(rng.standard_normal())
        f = HardyFunction.rational(poles, residues, constant, policy)
        return RandomFunction(f, poles, residues, constant)

    degree = int(rng.integers(0, 13))
    return RandomFunction(HardyFunction.polynomial(_complex_normal(rng, degree + 1), policy))


def random_b2_spec(
    rng: np.random.Generator, product: BlaschkeProduct, policy: NumericPolicy
) -> LacunarySpec:
    """Exponents with n_{k+1} > 2 n_k, hence a B2 set, and random components."""
    exponents = [int(rng.integers(1, 4))]
    target = int(rng.integers(3, 6))
    while len(exponents) < target:
        exponents.append(2 * exponents[-1] + int(rng.integers(1, 4)))
    components = _complex_normal(rng, (len(exponents), product.degree))
    spec = LacunarySpec(product, tuple(exponents), components, policy=policy)
    spec = spec.subsequence(range(max(max_feasible_terms(spec), 1)))
    # The bandwidth pre-check ignores the spread of b^n, so confirm by building
    while spec.count > 1:
        try:
            build(spec)
            break
        except BandwidthError:
            spec = spec.subsequence(range(spec.count - 1))
    return spec


@dataclass
class InvariantResult:
    invariant: str
    passed: bool
    worst_residual: float
    tolerance: float
    checks: int
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            ReportSchema.INVARIANT: self.invariant,
            ReportSchema.PASSED: self.passed,
            ReportSchema.WORST_RESIDUAL: self.worst_residual,
            ReportSchema.TOLERANCE: self.tolerance,
            ReportSchema.CHECKS: self.checks,
            "errors": list(self.errors),
        }


class _Tracker:
    """Accumulates the residuals and failures of one invariant."""

    def __init__(self, name: str, tolerance: float | None = None):
        self.name = name
        self.tolerance = TOLERANCES[name] if tolerance is None else tolerance
        self.worst = 0.0
        self.checks = 0
        self.failed = False
        self.errors: list[str] = []

    def record(self, residual: float, passed: bool | None = None) -> None:
        self.checks += 1
        residual = float(residual)
        if np.isnan(residual):
            self.failed = True
            return
        self.worst = max(self.worst, residual)
        if passed is None:
            passed = residual < self.tolerance
        self.failed = self.failed or not passed

    def error(self, error: Exception) -> None:
        self.checks += 1
        self.failed = True
        message = f"{type(error).__name__}: {error}"
        if len(self.errors) < MAX_RECORDED_ERRORS and message not in self.errors:
            self.errors.append(message)

    def result(self) -> InvariantResult:
        passed = not self.failed
        logger.info(
            f"{self.name}: {'passed' if passed else 'FAILED'} over {self.checks} checks, "
            f"worst residual {self.worst:.2e}"
        )
        return InvariantResult(
            self.name, passed, self.worst, self.tolerance, self.checks, self.errors
        )


@dataclass
class SuiteReport:
    results: list[InvariantResult]
    seed: int
    battery_size: int

    @property
    def vacuous(self) -> bool:
        return self.battery_size == 0

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def frame(self) -> pd.DataFrame:
        columns = [
            ReportSchema.INVARIANT,
            ReportSchema.PASSED,
            ReportSchema.WORST_RESIDUAL,
            ReportSchema.TOLERANCE,
            ReportSchema.CHECKS,
        ]
        return pd.DataFrame([{c: r.to_dict()[c] for c in columns} for r in self.results], columns=columns)

    def to_dict(self) -> dict:
        return {
            "battery_size": self.battery_size,
            "vacuous": self.vacuous,
            "all_passed": self.all_passed,
            "invariants": [r.to_dict() for r in self.results],
        }


def _check_parseval(tracker, product, functions, decompositions):
    for sample in functions:
        try:
            decomposition = decompose(product, sample.function)
            decompositions.append(decomposition)
            tracker.record(decomposition.parseval_defect())
        except (ValueError, ArithmeticError) as error:
            decompositions.append(None)
            tracker.error(error)


def _check_projections(identities, integral, product, functions):
    for sample in functions:
        f = sample.function
        size = f.norm(2)
        if size == 0:
            continue
        try:
            pieces = [project_Pk(product, f, l) for l in range(MAX_PROJECTION_INDEX + 1)]
            for k in range(MAX_PROJECTION_INDEX + 1):
                for l, piece in enumerate(pieces):
                    expected = piece if k == l else HardyFunction.zero(f.policy)
                    identities.record(project_Pk(product, piece, k).distance(expected) / size)
        except (ValueError, ArithmeticError) as error:
            identities.error(error)
            pieces = None

        for k in range(MAX_PROJECTION_INDEX + 1):
            try:
                operator_path = pieces[k] if pieces else project_Pk(product, f, k)
                gap = operator_path.distance(project_Pk_integral(product, f, k))
                integral.record(gap / size)
            except (ValueError, ArithmeticError) as error:
                integral.error(error)


def _check_remainders(tracker, product, functions, decompositions):
    for sample, decomposition in zip(functions, decompositions):
        size = sample.function.norm(2)
        if size == 0:
            continue
        for m in range(MAX_REMAINDER_INDEX + 1):
            try:
                report = remainder_consistency(product, sample.function, m, decomposition)
                tracker.record(report.worst / size)
            except (ValueError, ArithmeticError) as error:
                tracker.error(error)


def _check_reproducing(tracker, rng, functions, policy):
    for sample in functions:
        lam = MAX_KERNEL_POINT * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        for order in range(MAX_DERIVATIVE_ORDER + 1):
            try:
                paired = inner_product(sample.function, kernel(lam, order, policy))
                exact = sample.derivative(lam, order)
                tracker.record(abs(paired - exact) / max(1.0, abs(exact)))
            except (ValueError, ArithmeticError) as error:
                tracker.error(error)


def _check_wold(tracker, product, functions):
    try:
        report = wold_checks(product, [s.function for s in functions], WOLD_DEPTH)
        worst = max(
            report.right_inverse,
            report.idempotence,
            report.range_orthogonality,
            report.partial_sum_gap,
            report.iterate_norm,
        )
        tracker.record(worst, report.passed())
    except (ValueError, ArithmeticError) as error:
        tracker.error(error)


def _check_product_lemma(tracker, rng, product, policy, size):
    basis = build_model_space(product, policy)
    for _ in range(size):
        try:
            pair = []
            for _ in range(2):
                coordinates = _complex_normal(rng, basis.dimension)
                pair.append(basis.from_coordinates(coordinates / np.linalg.norm(coordinates)))
            tracker.record(product_lemma_check(product, *pair).projection_norm)
        except (ValueError, ArithmeticError) as error:
            tracker.error(error)


def _check_l4(tracker, rng, product, policy, size):
    constant = cached_norm_constant(product, policy, 4, 2)
    for _ in range(size):
        try:
            report = l4_l1_equivalence_check(random_b2_spec(rng, product, policy), constant)
            excess = max(report.norm_4 - report.bound_l1, report.norm_4 - report.bound_l2, 0.0)
            tracker.record(excess / max(1.0, report.norm_4), bool(report.holds_l1 and report.holds_l2))
        except (ValueError, ArithmeticError) as error:
            tracker.error(error)


def _check_kernel_growth(tracker, policy):
    low, high = KERNEL_GROWTH_BAND
    try:
        table = h1_kernel_growth_witness(1 - 2.0 ** -np.arange(3, 11), policy)
        ratios = table[ReportSchema.RATIO].to_numpy()
        outside = float(np.clip(np.maximum(low - ratios, ratios - high), 0, None).max())
        increasing = bool(np.all(np.diff(table[ReportSchema.H1_NORM]) > 0))
        tracker.record(outside, outside == 0 and increasing)
    except (ValueError, ArithmeticError) as error:
        tracker.error(error)


def run_invariant_suite(
    seed: int = 0,
    battery_size: int = 50,
    policy: NumericPolicy | None = None,
    products: list[BlaschkeProduct] | None = None,
) -> SuiteReport:
    """
    Run every invariant over a seeded random battery.

    Args:
        seed (int): Seed of every random draw.
        battery_size (int): Random functions per product. Zero gives a vacuous suite.
        policy (NumericPolicy): Grid and tolerances shared by the whole battery.
        products (list[BlaschkeProduct]): Defaults to `default_products`.

    Returns:
        SuiteReport: One result per invariant, in a fixed order.
    """
    seed = validate_seed(seed)
    battery_size = validate_non_negative_int(battery_size, "battery_size")
    policy = policy or NumericPolicy()
    if battery_size == 0:
        logger.info("Empty battery: no invariant checked")
        return SuiteReport([], seed, 0)

    products = products or default_products(policy)
    rng = np.random.default_rng(seed)
    functions = [random_function(rng, policy) for _ in range(battery_size)]
    # The costlier identities run on a prefix of the battery
    projection_sample = functions[:10]
    kernel_sample = functions[:20]
    wold_sample = [s for s in functions if s.poles is not None][:5] or functions[:5]

    trackers = {name: _Tracker(name) for name in TOLERANCES}
    for index, product in enumerate(products):
        logger.info(f"Battery on product {index + 1}/{len(products)} of degree {product.degree}")
        decompositions: list = []
        _check_parseval(trackers["parseval"], product, functions, decompositions)
        _check_projections(
            trackers["pk_identities"], trackers["pk_integral"], product, projection_sample
        )
        _check_remainders(
            trackers["remainder"], product, projection_sample, decompositions[: len(projection_sample)]
        )
        _check_wold(trackers["wold"], product, wold_sample)
        _check_product_lemma(trackers["product_lemma"], rng, product, policy, battery_size)
        if index < L4_PRODUCTS:
            _check_l4(trackers["l4_l1"], rng, product, policy, battery_size)

    _check_reproducing(trackers["reproducing"], rng, kernel_sample, policy)
    _check_kernel_growth(trackers["kernel_growth"], policy)

    return SuiteReport([t.result() for t in trackers.values()], seed, battery_size)
