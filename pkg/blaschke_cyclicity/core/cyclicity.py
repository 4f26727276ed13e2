"""
Cyclicity of lacunary decompositions for T = T_conj(b).

f = sum_k b^{n_k} f_k is cyclic when the tail span K_* = cap_n span(f_k : k >= n)
is all of K_b, or equivalently when for every m some d components with index
>= m have a non-vanishing determinant of values and derivatives at the zeros
of b. Both criteria are evaluated on the finite list of components available,
and cross-checked against the distances from targets to span(T^n f).
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg

from blaschke_cyclicity.common.schema import ReportSchema
from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.enums import Verdict, WitnessModes
from blaschke_cyclicity.core.hardy import HardyFunction, riesz_project
from blaschke_cyclicity.core.lacunary import (
    HypothesisReport,
    LacunarySpec,
    build,
    check_hypotheses,
)
from blaschke_cyclicity.core.model_space import build_model_space
from blaschke_cyclicity.core.toeplitz import apply_R, apply_T, apply_T_power, decompose
from blaschke_cyclicity.core.tools import complex_to_pairs, relative_rank
from blaschke_cyclicity.core.validation import validate_non_negative_int

MAX_KRYLOV_ITERATIONS = 2048
KRYLOV_CHECKPOINTS = (8, 32, 128)

# A new Krylov vector shorter than this fraction of ||f|| after projection ends the iteration
KRYLOV_COLLAPSE = 1e-13

# Reorthogonalise when a projection pass keeps less than this share of the norm
REORTHOGONALIZE_BELOW = 0.7

# Greedy scores within this relative distance of the best one are ties
WITNESS_TIE = 1e-9

EXHAUSTIVE_MAX_DEGREE = 4
EXHAUSTIVE_CHUNK = 65536

ORTHOGONALITY_TOLERANCE = 1e-10

# A target whose final distance exceeds this is evidence of non-cyclicity
PLATEAU_THRESHOLD = 0.1

REDUCING_TOLERANCE = 1e-9


# ------------------------------------------------------------------------ K_*


@dataclass
class KStar:
    """The finite-horizon tail span K_* in orthonormal K_b coordinates.

    Attributes:
        basis: Orthonormal rows spanning K_*.
        rank: Dimension of K_*.
        stabilization_index: First tail index from which the rank stays constant.
        ranks: Rank of span(f_k : k >= n) for n = 0 .. count - d.
        all_zero: Every component is zero.
    """

    basis: np.ndarray
    rank: int
    stabilization_index: int
    ranks: list[int]
    all_zero: bool
    finite_horizon: bool = True

    @property
    def trailing_window(self) -> int:
        """Number of consecutive tail indices with the stable rank."""
        return len(self.ranks) - self.stabilization_index

    def project(self, coordinates: np.ndarray) -> np.ndarray:
        """Orthogonal projection of K_b coordinates onto K_*."""
        coordinates = np.asarray(coordinates, dtype=complex)
        return (coordinates @ self.basis.conj().T) @ self.basis

    def to_dict(self) -> dict:
        return {
            "basis": [complex_to_pairs(row) for row in self.basis],
            "rank": self.rank,
            "stabilization_index": self.stabilization_index,
            "ranks": list(self.ranks),
            "trailing_window": self.trailing_window,
            "all_zero": self.all_zero,
            "finite_horizon": self.finite_horizon,
        }


def compute_kstar(spec: LacunarySpec) -> KStar:
    """
    Rank of span(f_k : k >= n) for n = 0 .. count - d and the stable tail span.

    Ranks use singular values relative to the largest one of each tail, with
    threshold rank_tolerance. Only tails holding at least d components (or the
    whole list when there are fewer) are examined.

    Raises:
        ValueError: If the spec has no components.
    """
    if spec.count == 0:
        raise ValueError("K_* needs at least one component")

    tolerance = spec.policy.rank_tolerance
    last = max(spec.count - spec.degree, 0)
    ranks = [relative_rank(spec.components[n:], tolerance)[0] for n in range(last + 1)]

    stable = ranks[-1]
    stabilization = last
    while stabilization > 0 and ranks[stabilization - 1] == stable:
        stabilization -= 1

    if stable:
        _, _, vh = np.linalg.svd(spec.components[last:])
        basis = vh[:stable]
    else:
        basis = np.zeros((0, spec.degree), dtype=complex)

    all_zero = not spec.components.any()
    if all_zero:
        logger.warning("Every component is zero: K_* = {0}")

    return KStar(
        basis=basis,
        rank=stable,
        stabilization_index=stabilization,
        ranks=ranks,
        all_zero=all_zero,
    )


# --------------------------------------------------------- determinant witness


@dataclass
class DeterminantWitness:
    """d component indices >= m whose value/derivative matrix is invertible."""

    m: int
    indices: tuple[int, ...]
    determinant: complex
    normalized_volume: float
    mode: str

    def to_dict(self) -> dict:
        return {
            ReportSchema.M: self.m,
            "indices": list(self.indices),
            "determinant": [self.determinant.real, self.determinant.imag],
            "normalized_volume": self.normalized_volume,
            "mode": self.mode,
        }


def derivative_columns(spec: LacunarySpec) -> np.ndarray:
    """Column k holds f_k^(l)(lambda) over the (lambda, l) pairs of b, shape (d, count)."""
    return spec.basis.evaluation_matrix @ spec.components.T


def _greedy_selection(normalized: np.ndarray, candidates: list[int], size: int):
    """Add, one at a time, the column maximising the smallest singular value."""
    chosen: list[int] = []
    for _ in range(size):
        scores = {
            k: np.linalg.svd(normalized[:, chosen + [k]], compute_uv=False)[-1]
            for k in candidates
            if k not in chosen
        }
        top = max(scores.values())
        chosen.append(min(k for k, s in scores.items() if s >= top * (1 - WITNESS_TIE)))
    return tuple(sorted(chosen))


def _exhaustive_selection(normalized: np.ndarray, candidates: list[int], size: int):
    """The index tuple of largest normalised volume, first in lexicographic order on ties."""
    best_value, best = -1.0, None
    combos = itertools.combinations(candidates, size)
    while True:
        chunk = np.array(list(itertools.islice(combos, EXHAUSTIVE_CHUNK)), dtype=int)
        if chunk.size == 0:
            break
        # (combos, size, size) stack of square column selections
        volumes = np.abs(np.linalg.det(np.moveaxis(normalized[:, chunk], 1, 0)))
        index = int(np.argmax(volumes))
        if volumes[index] > best_value * (1 + WITNESS_TIE):
            best_value, best = float(volumes[index]), tuple(int(k) for k in chunk[index])
    return best


def _find_witness(
    spec: LacunarySpec, m: int, mode: WitnessModes, columns: np.ndarray | None = None
) -> tuple[DeterminantWitness | None, str | None]:
    degree = spec.degree
    if columns is None:
        columns = derivative_columns(spec)
    norms = np.linalg.norm(columns, axis=0)
    candidates = [k for k in range(m, spec.count) if norms[k] > 0]
    if len(candidates) < degree:
        return None, (
            f"only {len(candidates)} non-zero components with index >= {m}, "
            f"{degree} are needed"
        )

    normalized = np.zeros_like(columns)
    normalized[:, norms > 0] = columns[:, norms > 0] / norms[norms > 0]

    if mode == WitnessModes.EXHAUSTIVE:
        indices = _exhaustive_selection(normalized, candidates, degree)
    else:
        indices = _greedy_selection(normalized, candidates, degree)

    selection = list(indices)
    determinant = complex(np.linalg.det(columns[:, selection]))
    volume = float(abs(np.linalg.det(normalized[:, selection])))
    if volume <= spec.policy.rank_tolerance:
        return None, (
            f"largest normalised volume {volume:.3e} at m={m} is below "
            f"{spec.policy.rank_tolerance:.1e}"
        )
    return DeterminantWitness(m, indices, determinant, volume, str(mode)), None


def determinant_witness(
    spec: LacunarySpec, m: int, mode: str = "greedy"
) -> DeterminantWitness | None:
    """
    Find d components f_{m_1}, ..., f_{m_d} with m_j >= m whose matrix of
    values and derivatives (f_{m_j}^(l)(lambda_i)) is invertible.

    Columns are normalised before selection, and the witness is accepted when
    |det| divided by the product of the column norms exceeds rank_tolerance.

    Args:
        spec (LacunarySpec): The decomposition.
        m (int): Smallest admissible component index.
        mode (str): "greedy" volume maximisation or "exhaustive" search (d <= 4).

    Returns:
        DeterminantWitness | None: None when no witness exists; the reason is logged.

    Raises:
        ValueError: If m is not below the component count, or for exhaustive
            search with d > 4.
    """
    m = validate_non_negative_int(m, "m")
    mode = WitnessModes(mode)
    if m >= spec.count:
        raise ValueError(f"m={m} must be below the component count {spec.count}")
    if mode == WitnessModes.EXHAUSTIVE and spec.degree > EXHAUSTIVE_MAX_DEGREE:
        raise ValueError(
            f"Exhaustive witness search is limited to degree <= {EXHAUSTIVE_MAX_DEGREE}"
        )

    witness, reason = _find_witness(spec, m, mode)
    if witness is None:
        logger.info(f"No determinant witness for m={m}: {reason}")
    return witness


# --------------------------------------------------------------- Krylov oracle


@dataclass
class KrylovResult:
    """Distances from targets to span(T^n f : n <= iterations).

    `history` holds one (n, target, distance) row per computed iterate.
    `stopped_at` is the iterate whose new direction collapsed, if any.
    """

    target_names: list[str]
    iterations: int
    stopped_at: int | None
    rank: int
    history: pd.DataFrame

    @property
    def checkpoints(self) -> list[int]:
        return sorted({c for c in KRYLOV_CHECKPOINTS if c <= self.iterations} | {self.iterations})

    def distances_at(self, n: int) -> dict[str, float]:
        """Distances after the iterates up to n, or the final ones if the iteration stopped earlier."""
        if self.history.empty:
            return {}
        reached = self.history[self.history[ReportSchema.N] <= n]
        if reached.empty:
            reached = self.history[self.history[ReportSchema.N] == self.history[ReportSchema.N].min()]
        last = reached[ReportSchema.N].max()
        rows = reached[reached[ReportSchema.N] == last]
        return dict(zip(rows[ReportSchema.TARGET], rows[ReportSchema.DISTANCE]))

    def final_distances(self) -> dict[str, float]:
        return self.distances_at(self.iterations)

    def checkpoint_frame(self) -> pd.DataFrame:
        rows = [
            {ReportSchema.TARGET: name, ReportSchema.ITERATIONS: c, ReportSchema.DISTANCE: value}
            for c in self.checkpoints
            for name, value in self.distances_at(c).items()
        ]
        return pd.DataFrame(
            rows, columns=[ReportSchema.TARGET, ReportSchema.ITERATIONS, ReportSchema.DISTANCE]
        )

    def to_dict(self) -> dict:
        return {
            ReportSchema.ITERATIONS: self.iterations,
            "stopped_at": self.stopped_at,
            "rank": self.rank,
            "distances": self.checkpoint_frame().to_dict(orient="records"),
        }


def _orthogonalize(vector: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    """Modified Gram-Schmidt against `basis`, with a second pass after heavy cancellation."""
    start = np.linalg.norm(vector)
    for q in basis:
        vector = vector - np.vdot(q, vector) * q
    if np.linalg.norm(vector) < REORTHOGONALIZE_BELOW * start:
        for q in basis:
            vector = vector - np.vdot(q, vector) * q
    return vector


def krylov_oracle(
    product: BlaschkeProduct,
    f: HardyFunction,
    targets: list[HardyFunction],
    iterations: int,
    target_names: list[str] | None = None,
) -> KrylovResult:
    """
    H^2 distance from each target to span(f, T f, ..., T^n f), for n up to `iterations`.

    The iterates are orthonormalised incrementally. When a new iterate adds a
    direction shorter than 1e-13 ||f||, the span is T-invariant and the
    iteration stops early; later checkpoints repeat the final distances.

    Raises:
        ValueError: If iterations exceeds 2048 or a target does not share f's policy.
    """
    iterations = validate_non_negative_int(iterations, "iterations")
    if iterations > MAX_KRYLOV_ITERATIONS:
        raise ValueError(f"The Krylov oracle runs at most {MAX_KRYLOV_ITERATIONS} iterations")
    for target in targets:
        if target.policy != f.policy:
            raise ValueError("Targets must share the numeric policy of f")
    names = list(target_names) if target_names is not None else [
        f"target_{i}" for i in range(len(targets))
    ]
    if len(names) != len(targets):
        raise ValueError("target_names must have one entry per target")

    scale = f.norm(2)
    residuals = [t.coeffs.astype(complex) for t in targets]
    distances = np.array([np.linalg.norm(r) for r in residuals])
    basis: list[np.ndarray] = []
    rows = []
    stopped_at = None
    current = f

    for n in range(iterations + 1):
        vector = _orthogonalize(current.coeffs.astype(complex), basis)
        length = np.linalg.norm(vector)
        if scale == 0 or length < KRYLOV_COLLAPSE * scale:
            stopped_at = n
            logger.debug(f"Krylov iteration collapsed at n={n}, rank {len(basis)}")
            if n == 0:
                rows.extend(
                    {ReportSchema.N: 0, ReportSchema.TARGET: name, ReportSchema.DISTANCE: value}
                    for name, value in zip(names, distances)
                )
            break

        q = vector / length
        basis.append(q)
        for residual in residuals:
            residual -= np.vdot(q, residual) * q
        distances = np.minimum(distances, [np.linalg.norm(r) for r in residuals])
        rows.extend(
            {ReportSchema.N: n, ReportSchema.TARGET: name, ReportSchema.DISTANCE: float(value)}
            for name, value in zip(names, distances)
        )
        if n < iterations:
            current = apply_T(product, current)

    history = pd.DataFrame(rows, columns=[ReportSchema.N, ReportSchema.TARGET, ReportSchema.DISTANCE])
    return KrylovResult(
        target_names=names,
        iterations=iterations,
        stopped_at=stopped_at,
        rank=len(basis),
        history=history,
    )


def monomial_targets(count: int, policy) -> tuple[list[HardyFunction], list[str]]:
    """The targets z^j, j < count."""
    count = min(count, policy.truncation_degree)
    return [HardyFunction.monomial(j, policy=policy) for j in range(count)], [
        f"z^{j}" for j in range(count)
    ]


# ------------------------------------------------------------------- decision


@dataclass
class StructureReport:
    """E_f = K_* (x) [H^p o b] (+) E_p: the K_* basis and the finite part p.

    The finite part is f minus its K_* components, sum_k b^{n_k} (f_k - P_{K_*} f_k).
    """

    kstar_basis: np.ndarray
    finite_part: HardyFunction
    finite_part_degree: int | None
    finite_part_krylov_rank: int

    def to_dict(self) -> dict:
        return {
            "kstar_basis": [complex_to_pairs(row) for row in self.kstar_basis],
            "finite_part_norm": self.finite_part.norm(2),
            "finite_part_degree": self.finite_part_degree,
            "finite_part_krylov_rank": self.finite_part_krylov_rank,
        }


def structure_report(spec: LacunarySpec, kstar: KStar) -> StructureReport:
    residuals = np.array([c - kstar.project(c) for c in spec.components])
    sizes = np.linalg.norm(residuals, axis=1)
    scale = np.linalg.norm(spec.components, axis=1).max(initial=0.0)
    significant = np.flatnonzero(sizes > spec.policy.rank_tolerance * scale)
    degree = int(spec.exponents[significant[-1]]) if significant.size else None

    finite = LacunarySpec(
        spec.product, spec.exponents, residuals, allow_zero_components=True, policy=spec.policy
    )
    finite_part = build(finite)
    horizon = min(spec.exponents[-1] + 1, MAX_KRYLOV_ITERATIONS)
    krylov_rank = krylov_oracle(spec.product, finite_part, [], horizon).rank
    return StructureReport(kstar.basis, finite_part, degree, krylov_rank)


@dataclass
class CyclicityReport:
    """Verdict, evidence and structure of E_f for a lacunary decomposition."""

    p: float
    degree: int
    count: int
    kstar: KStar
    witnesses: dict[int, DeterminantWitness | None]
    witness_reasons: dict[int, str]
    hypotheses: HypothesisReport
    hypotheses_gating: bool
    verdict: Verdict
    reason: str
    structure: StructureReport
    krylov: KrylovResult | None = field(default=None)

    @property
    def kstar_basis(self) -> np.ndarray:
        return self.kstar.basis

    @property
    def kstar_rank(self) -> int:
        return self.kstar.rank

    @property
    def stabilization_index(self) -> int:
        return self.kstar.stabilization_index

    @property
    def determinant_witness(self) -> DeterminantWitness | None:
        return self.witnesses.get(0)

    def distances_frame(self) -> pd.DataFrame:
        """(target, iterations, distance) at the Krylov checkpoints."""
        if self.krylov is None:
            return pd.DataFrame(
                columns=[ReportSchema.TARGET, ReportSchema.ITERATIONS, ReportSchema.DISTANCE]
            )
        return self.krylov.checkpoint_frame()

    def to_dict(self) -> dict:
        hypotheses = self.hypotheses.to_dict()
        hypotheses["gating"] = self.hypotheses_gating
        return {
            ReportSchema.VERDICT: str(self.verdict),
            "reason": self.reason,
            "p": self.p,
            "degree": self.degree,
            "count": self.count,
            "kstar": self.kstar.to_dict(),
            "determinant_witness": (
                self.determinant_witness.to_dict() if self.determinant_witness else None
            ),
            "witnesses": [
                witness.to_dict() if witness else {ReportSchema.M: m, "absent": self.witness_reasons[m]}
                for m, witness in sorted(self.witnesses.items())
            ],
            "hypotheses": hypotheses,
            "structure": self.structure.to_dict(),
            "krylov": self.krylov.to_dict() if self.krylov else None,
        }


def decide(spec: LacunarySpec, p: float = 2.0, oracle_iterations: int = 0) -> CyclicityReport:
    """
    Decide whether f = sum_k b^{n_k} f_k is cyclic for T_conj(b) in H^p.

    The verdict is
        - cyclic when K_* has rank d and a determinant witness exists for every
          m up to count - d,
        - non_cyclic when the stable tail rank is below d,
        - inconclusive when the stable rank holds on fewer than d tail indices,
          when the hypotheses fail for p > 2, or when the two criteria disagree.

    For p <= 2 the summability and domination hypotheses are reported but do
    not gate the verdict.

    Args:
        spec (LacunarySpec): The decomposition, with at least one component.
        p (float): Exponent, p > 1.
        oracle_iterations (int): When positive, run the Krylov oracle on the
            targets z^j, j < 4d, for that many iterations.
    """
    p = float(p)
    if not np.isfinite(p) or p <= 1:
        raise ValueError(f"Cyclicity is decided for 1 < p < inf, got p={p}")

    kstar = compute_kstar(spec)
    degree = spec.degree
    gating = p > 2
    hypotheses = check_hypotheses(spec, max(p, 2.0))

    columns = derivative_columns(spec)
    witnesses, reasons = {}, {}
    for m in range(len(kstar.ranks)):
        witnesses[m], reason = _find_witness(spec, m, WitnessModes.GREEDY, columns)
        if reason:
            reasons[m] = reason

    window = kstar.trailing_window
    if gating and not hypotheses.cyclicity_hypotheses:
        verdict, reason = Verdict.INCONCLUSIVE, "the lacunarity, summability or domination hypothesis fails"
    elif window < degree:
        verdict, reason = Verdict.INCONCLUSIVE, (
            f"horizon too short: the tail rank is stable on {window} indices, {degree} are needed"
        )
    elif kstar.rank == degree:
        missing = [m for m, w in witnesses.items() if w is None]
        if missing:
            verdict, reason = Verdict.INCONCLUSIVE, (
                f"K_* has full rank but no determinant witness exists for m in {missing}"
            )
        else:
            verdict, reason = Verdict.CYCLIC, f"K_* = K_b (rank {degree})"
    else:
        verdict, reason = Verdict.NON_CYCLIC, (
            f"K_* has rank {kstar.rank} < {degree} over a trailing window of {window}"
        )

    if verdict == Verdict.INCONCLUSIVE:
        logger.warning(f"Inconclusive verdict for {spec!r}: {reason}")
    else:
        logger.info(f"Verdict {verdict} for {spec!r}")

    krylov = None
    if oracle_iterations:
        targets, names = monomial_targets(4 * degree, spec.policy)
        krylov = krylov_oracle(spec.product, build(spec), targets, oracle_iterations, names)

    return CyclicityReport(
        p=p,
        degree=degree,
        count=spec.count,
        kstar=kstar,
        witnesses=witnesses,
        witness_reasons=reasons,
        hypotheses=hypotheses,
        hypotheses_gating=gating,
        verdict=verdict,
        reason=reason,
        structure=structure_report(spec, kstar),
        krylov=krylov,
    )


# ------------------------------------------------------ orthogonal components


@dataclass
class OrthogonalDemoReport:
    """Krylov plateaus for a decomposition with pairwise orthogonal components."""

    nonzero_components: int
    dimension: int
    krylov: KrylovResult
    note: str

    @property
    def plateau(self) -> dict[str, float]:
        return self.krylov.final_distances()

    @property
    def non_cyclic(self) -> bool:
        return max(self.plateau.values(), default=0.0) > PLATEAU_THRESHOLD

    def to_dict(self) -> dict:
        return {
            "nonzero_components": self.nonzero_components,
            "dimension": self.dimension,
            "plateau": self.plateau,
            "non_cyclic": self.non_cyclic,
            "note": self.note,
            "krylov": self.krylov.to_dict(),
        }


def orthogonal_components_demo(
    product: BlaschkeProduct, spec: LacunarySpec, iterations: int = 512
) -> OrthogonalDemoReport:
    """
    Show that a decomposition with pairwise orthogonal components is not cyclic.

    K_b has dimension d, so at most d components can be non-zero and pairwise
    orthogonal. The decomposition is then finite and span(T^n f) is
    finite-dimensional; the Krylov distances to z^j (j < 4d) and to
    b^(n_K + 1) plateau.

    Raises:
        ValueError: If the spec uses another product, has no non-zero
            component, or two non-zero components are not orthogonal within 1e-10.
    """
    if spec.product != product:
        raise ValueError("The spec must be built over the same Blaschke product")
    nonzero = spec.components[np.linalg.norm(spec.components, axis=1) > 0]
    if nonzero.shape[0] == 0:
        raise ValueError("At least one non-zero component is needed")
    gram = nonzero.conj() @ nonzero.T
    off_diagonal = np.abs(gram - np.diag(np.diag(gram)))
    if off_diagonal.max(initial=0.0) >= ORTHOGONALITY_TOLERANCE:
        raise ValueError(
            f"Components are not pairwise orthogonal: |<f_j, f_k>| reaches {off_diagonal.max():.2e}"
        )

    policy = spec.policy
    targets, names = monomial_targets(4 * spec.degree, policy)
    power = spec.exponents[-1] + 1
    shifted = riesz_project(product.boundary_samples(policy.grid_size) ** power, policy)
    if shifted.truncation_warning:
        logger.warning(f"b^{power} does not fit the truncation degree; target skipped")
    else:
        targets.append(shifted)
        names.append(f"b^{power}")

    krylov = krylov_oracle(product, build(spec), targets, iterations, names)
    note = (
        f"{nonzero.shape[0]} non-zero orthogonal components in a {spec.degree}-dimensional "
        "model space: the decomposition is finite and span(T^n f) is finite-dimensional. "
        "Infinitely many non-zero orthogonal components need an infinite-dimensional model space."
    )
    return OrthogonalDemoReport(nonzero.shape[0], spec.degree, krylov, note)


# ------------------------------------------------------------ structure checks


def iterate_span_defect(spec: LacunarySpec, iterations=(1, 2, 4, 8)) -> pd.DataFrame:
    """
    For each n, the largest distance from a component of T^n f to span(f_j), relative to ||f||.

    Every component of an element of E_f lies in the span of the f_j.
    """
    f = build(spec)
    size = f.norm(2)
    rank, _ = relative_rank(spec.components, spec.policy.rank_tolerance)
    if rank:
        _, _, vh = np.linalg.svd(spec.components)
        span = vh[:rank]
    else:
        span = np.zeros((0, spec.degree), dtype=complex)

    rows = []
    for n in iterations:
        n = validate_non_negative_int(n, "n")
        components = decompose(spec.product, apply_T_power(spec.product, f, n)).components
        outside = components - (components @ span.conj().T) @ span
        defect = float(np.linalg.norm(outside, axis=1).max(initial=0.0))
        rows.append({ReportSchema.N: n, ReportSchema.DEFECT: defect / size if size else defect})
    return pd.DataFrame(rows, columns=[ReportSchema.N, ReportSchema.DEFECT])


@dataclass
class ReducingSubspaceReport:
    """Components of T g and R g outside L, for random g in L (x) [H^2 o b]."""

    rank: int
    t_defect: float
    r_defect: float
    tolerance: float = REDUCING_TOLERANCE

    @property
    def passed(self) -> bool:
        return self.t_defect < self.tolerance and self.r_defect < self.tolerance

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "t_defect": self.t_defect,
            "r_defect": self.r_defect,
            ReportSchema.PASSED: self.passed,
        }


def reducing_subspace_defect(
    spec: LacunarySpec, subspace: np.ndarray | None = None, depth: int = 4, seed: int = 0
) -> ReducingSubspaceReport:
    """
    Check that L (x) [H^2 o b] is invariant under T and R.

    Args:
        spec (LacunarySpec): Supplies the product and the policy.
        subspace (np.ndarray | None): Rows spanning L in K_b coordinates. Defaults to K_*.
        depth (int): g = sum_{k <= depth} b^k l_k with random l_k in L.
        seed (int): Seed of the random l_k.
    """
    depth = validate_non_negative_int(depth, "depth")
    if subspace is None:
        subspace = compute_kstar(spec).basis
    subspace = np.atleast_2d(np.asarray(subspace, dtype=complex))
    rows = scipy.linalg.orth(subspace.T).T if subspace.size else subspace
    if rows.shape[0] == 0:
        return ReducingSubspaceReport(0, 0.0, 0.0)

    basis = build_model_space(spec.product, spec.policy)
    rng = np.random.default_rng(seed)
    pieces = [
        basis.from_coordinates(
            (rng.standard_normal(rows.shape[0]) + 1j * rng.standard_normal(rows.shape[0])) @ rows
        )
        for _ in range(depth + 1)
    ]
    g = pieces[-1]
    for piece in reversed(pieces[:-1]):
        g = apply_R(spec.product, g) + piece

    def outside(h: HardyFunction, K: int) -> float:
        components = decompose(spec.product, h, K, basis).components
        residual = components - (components @ rows.conj().T) @ rows
        return float(np.linalg.norm(residual, axis=1).max())

    size = g.norm(2)
    return ReducingSubspaceReport(
        rank=rows.shape[0],
        t_defect=outside(apply_T(spec.product, g), depth) / size,
        r_defect=outside(apply_R(spec.product, g), depth + 1) / size,
    )
