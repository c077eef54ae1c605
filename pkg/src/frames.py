import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .config import (
    DECAY_RATIO,
    DECAY_SLOPE,
    DEFAULT_SEED,
    DIVERGENCE_RATIO,
    DIVERGENCE_SLOPE,
    MIN_SCAN_LEVELS,
    TAU_NULL,
    TAU_PARS,
)
from .errors import DimensionMismatch, EmptyFamily, GridMismatch, InconsistentScan
from .hilbert import AmbientSpace, SymOp, Vec, as_vec, probe_vectors

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def complex_list(v: np.ndarray) -> List[List[float]]:
    """
    JSON-friendly [re, im] pairs
    """
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


@dataclass(frozen=True, eq=False)
class MeasureGrid:
    """
    Discretized index set: labels with positive quadrature weights
    """
    points: Tuple
    weights: np.ndarray

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float).ravel()
        points = tuple(self.points)
        if len(points) != weights.shape[0]:
            raise GridMismatch(f"{len(points)} points but {weights.shape[0]} weights")
        if np.any(~np.isfinite(weights)) or np.any(weights <= 0):
            raise GridMismatch("Quadrature weights must be finite and positive")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", _readonly(weights))

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def counting(cls, labels: Sequence) -> "MeasureGrid":
        labels = tuple(labels)
        return cls(labels, np.ones(len(labels)))

    @classmethod
    def midpoint(cls, n: int, lower: float = 0.0, upper: float = 1.0) -> "MeasureGrid":
        """
        n cells of (lower, upper), sampled at cell centres
        """
        h = (upper - lower) / n
        x = lower + h * (np.arange(n) + 0.5)
        return cls(tuple(float(t) for t in x), np.full(n, h))

    def matches(self, other: "MeasureGrid") -> bool:
        return self.size == other.size and np.allclose(self.weights, other.weights, rtol=1e-12, atol=0.0)


@dataclass(frozen=True, eq=False)
class DomainSubspace:
    """
    Declared closure of the analysis domain, given by a spanning set (one vector per row)
    """
    spanning: np.ndarray

    def __post_init__(self):
        spanning = np.array(self.spanning, dtype=complex)
        if spanning.ndim != 2 or spanning.shape[0] == 0:
            raise DimensionMismatch("A domain needs at least one spanning vector")
        object.__setattr__(self, "spanning", _readonly(spanning))

    @property
    def dim(self) -> int:
        return self.spanning.shape[1]


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """
    One ambient vector phi_x per grid point, stored as the rows of `vectors`
    """
    grid: MeasureGrid
    vectors: np.ndarray
    space: AmbientSpace
    domain: Optional[DomainSubspace] = None

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=complex)
        if vectors.ndim != 2:
            vectors = vectors.reshape(self.grid.size, self.space.dim)
        if vectors.shape != (self.grid.size, self.space.dim):
            raise DimensionMismatch(
                f"Family has shape {vectors.shape}, expected ({self.grid.size}, {self.space.dim})"
            )
        if self.domain is not None and self.domain.dim != self.space.dim:
            raise DimensionMismatch("Domain spanning vectors do not live in the ambient space")
        object.__setattr__(self, "vectors", _readonly(vectors))

    @classmethod
    def from_vectors(cls,
                     vectors,
                     weights: Optional[Sequence[float]] = None,
                     points: Optional[Sequence] = None,
                     domain: Optional[DomainSubspace] = None) -> "VectorFamily":
        vectors = np.atleast_2d(np.array(vectors, dtype=complex))
        n, dim = vectors.shape
        weights = np.ones(n) if weights is None else weights
        points = tuple(range(n)) if points is None else points
        return cls(MeasureGrid(points, weights), vectors, AmbientSpace(dim), domain)

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def dim(self) -> int:
        return self.space.dim

    def vector(self, i: int) -> Vec:
        return self.vectors[i].copy()

    def with_vectors(self, vectors: np.ndarray, keep_domain: bool = False) -> "VectorFamily":
        return VectorFamily(self.grid, vectors, self.space, self.domain if keep_domain else None)

    def mapped(self, matrix: np.ndarray) -> "VectorFamily":
        """
        The family {M phi_x}
        """
        return self.with_vectors(self.vectors @ np.asarray(matrix).T)

    def scaled(self, c: float) -> "VectorFamily":
        return self.with_vectors(c * self.vectors, keep_domain=True)

    def coefficients(self, f: Vec) -> np.ndarray:
        """
        The coefficient function x -> <f, phi_x>
        """
        return self.vectors.conj() @ as_vec(f, self.dim)

    def energy(self, f: Vec) -> float:
        return float(np.sum(self.grid.weights * np.abs(self.coefficients(f)) ** 2))

    def sup_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.vectors, axis=1))) if self.size else 0.0


@dataclass(frozen=True, eq=False)
class AnalysisOp:
    """
    Row i is sqrt(w_i) * conj(phi_i), so (C f)_i = sqrt(w_i) <f, phi_i>
    """
    matrix: np.ndarray
    family: VectorFamily


def analysis(family: VectorFamily) -> AnalysisOp:
    if family.size == 0:
        raise EmptyFamily("Cannot build the analysis operator of an empty family")
    matrix = np.sqrt(family.grid.weights)[:, None] * family.vectors.conj()
    return AnalysisOp(_readonly(matrix), family)


def synthesis(an: AnalysisOp, coeff) -> Vec:
    """
    sum_i w_i coeff_i phi_i, the weak integral of a coefficient function
    """
    coeff = np.asarray(coeff, dtype=complex).ravel()
    if coeff.shape[0] != an.family.size:
        raise DimensionMismatch(f"{coeff.shape[0]} coefficients for a family of size {an.family.size}")
    return an.matrix.conj().T @ (np.sqrt(an.family.grid.weights) * coeff)


def frame_operator(family: VectorFamily) -> SymOp:
    c = analysis(family).matrix
    return SymOp.from_matrix(c.conj().T @ c)


def mixed_frame_operator(psi: VectorFamily, phi: VectorFamily) -> np.ndarray:
    """
    S_{psi,phi} with <S f, g> = sum_i w_i <f, psi_i><phi_i, g>
    """
    _check_same_grid(psi, phi)
    w = psi.grid.weights
    return phi.vectors.T @ (w[:, None] * psi.vectors.conj())


def _check_same_grid(phi: VectorFamily, psi: VectorFamily) -> None:
    if not phi.grid.matches(psi.grid):
        raise GridMismatch("Families live on different grids")
    if phi.dim != psi.dim:
        raise DimensionMismatch(f"Families live in spaces of dim {phi.dim} and {psi.dim}")


@dataclass
class FrameBounds:
    lower: float
    upper: float
    attained_low: np.ndarray
    attained_high: np.ndarray
    diverging: bool = False

    def __post_init__(self):
        self.lower = max(float(self.lower), 0.0)
        self.upper = max(float(self.upper), self.lower)

    def as_dict(self) -> Dict[str, Any]:
        return {"lower": self.lower, "upper": self.upper, "diverging": self.diverging}


def bounds_from_operator(op: SymOp) -> FrameBounds:
    """
    Optimal bounds of the quadratic form of `op`, with the eigenvectors attaining them
    """
    return FrameBounds(
        lower=op.lambda_min,
        upper=op.lambda_max,
        attained_low=op.eigenvectors[:, 0].copy(),
        attained_high=op.eigenvectors[:, -1].copy(),
    )


def frame_bounds(family: VectorFamily) -> FrameBounds:
    return bounds_from_operator(frame_operator(family))


@dataclass(frozen=True)
class TruncationScan:
    """
    The same family truncated at increasing refinement levels
    """
    levels: Tuple[VectorFamily, ...]
    refinements: Tuple[float, ...]

    def __post_init__(self):
        levels = tuple(self.levels)
        refinements = tuple(float(r) for r in self.refinements)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "refinements", refinements)
        if not levels or len(levels) != len(refinements):
            raise InconsistentScan(f"{len(levels)} levels but {len(refinements)} refinement values")
        if any(r <= 0 for r in refinements):
            raise InconsistentScan("Refinement values must be positive")
        if any(b <= a for a, b in zip(refinements, refinements[1:])):
            raise InconsistentScan(f"Refinement values must increase strictly: {refinements}")
        sizes = [level.size for level in levels]
        if any(b < a for a, b in zip(sizes, sizes[1:])):
            raise InconsistentScan(f"Grid sizes shrink across levels: {sizes}")

    @property
    def finest(self) -> VectorFamily:
        return self.levels[-1]

    def __len__(self) -> int:
        return len(self.levels)


@dataclass
class Trend:
    """
    Log-log trend of a bound trajectory against refinement
    """
    slope: Optional[float]
    ratio: float
    flagged: bool

    def as_dict(self) -> Dict[str, Any]:
        return {"slope": self.slope, "ratio": self.ratio, "flagged": self.flagged}


def _loglog_slope(refinements: Sequence[float], values: Sequence[float]) -> float:
    tiny = np.finfo(float).tiny
    x = np.log(np.asarray(refinements, dtype=float))
    y = np.log(np.maximum(np.asarray(values, dtype=float), tiny))
    return float(stats.linregress(x, y).slope)


def divergence_trend(refinements: Sequence[float], uppers: Sequence[float]) -> Trend:
    """
    Upper bounds diverge when slope >= DIVERGENCE_SLOPE and last/first >= DIVERGENCE_RATIO
    over at least MIN_SCAN_LEVELS levels
    """
    uppers = np.asarray(uppers, dtype=float)
    ratio = float(uppers[-1] / max(uppers[0], np.finfo(float).tiny))
    if len(uppers) < MIN_SCAN_LEVELS:
        return Trend(None, ratio, False)
    slope = _loglog_slope(refinements, uppers)
    return Trend(slope, ratio, slope >= DIVERGENCE_SLOPE and ratio >= DIVERGENCE_RATIO)


def decay_trend(refinements: Sequence[float], lowers: Sequence[float]) -> Trend:
    lowers = np.asarray(lowers, dtype=float)
    ratio = float(lowers[0] / max(lowers[-1], np.finfo(float).tiny))
    if len(lowers) < MIN_SCAN_LEVELS:
        return Trend(None, ratio, False)
    slope = _loglog_slope(refinements, lowers)
    return Trend(slope, ratio, slope <= DECAY_SLOPE and ratio >= DECAY_RATIO)


class Verdict(str, Enum):
    FRAME = "Frame"
    PARSEVAL = "ParsevalFrame"
    BESSEL_ONLY = "BesselOnly"
    UPPER_SEMI = "UpperSemiFrame"
    PROPER_LOWER = "ProperLowerSemiFrame"
    NOT_TOTAL = "NotTotal"
    NONE = "None"


@dataclass
class Classification:
    verdict: Verdict
    evidence: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_bessel(self) -> bool:
        return bool(self.evidence.get("bessel", False))

    def as_dict(self) -> Dict[str, Any]:
        return {"verdict": self.verdict.value, "evidence": self.evidence}


def _is_parseval(lowers: np.ndarray, uppers: np.ndarray) -> bool:
    return bool(np.all(np.abs(lowers - 1.0) <= TAU_PARS) and np.all(np.abs(uppers - 1.0) <= TAU_PARS))


def classify_trajectory(refinements: Sequence[float],
                        lowers: Sequence[float],
                        uppers: Sequence[float],
                        check_total: bool = True) -> Classification:
    """
    Classify from bound trajectories alone

    Shared by measured classification and by closed-form predictions.
    `check_total=False` is for families whose totality is already known,
    such as invertible transforms of a total family.
    """
    lowers = np.maximum(np.asarray(lowers, dtype=float), 0.0)
    uppers = np.asarray(uppers, dtype=float)
    divergence = divergence_trend(refinements, uppers)
    evidence: Dict[str, Any] = {
        "refinements": [float(r) for r in refinements],
        "lower": lowers.tolist(),
        "upper": uppers.tolist(),
        "divergence": divergence.as_dict(),
        "bessel": not divergence.flagged,
    }

    if np.all(uppers <= 0.0):
        return Classification(Verdict.NONE, evidence)

    total = lowers > TAU_NULL * uppers
    if check_total and not np.all(total):
        evidence["null_level"] = int(np.argmin(total))
        return Classification(Verdict.NOT_TOTAL, evidence)

    if len(lowers) == 1:
        verdict = Verdict.PARSEVAL if _is_parseval(lowers, uppers) else Verdict.FRAME
        return Classification(verdict, evidence)

    decay = decay_trend(refinements, lowers)
    evidence["decay"] = decay.as_dict()
    if divergence.flagged and decay.flagged:
        verdict = Verdict.NONE
    elif divergence.flagged:
        verdict = Verdict.PROPER_LOWER
    elif decay.flagged:
        verdict = Verdict.UPPER_SEMI
    elif decay.ratio >= DECAY_RATIO:
        verdict = Verdict.BESSEL_ONLY
    elif _is_parseval(lowers, uppers):
        verdict = Verdict.PARSEVAL
    else:
        verdict = Verdict.FRAME
    return Classification(verdict, evidence)


def classify(family: VectorFamily, scan: Optional[TruncationScan] = None) -> Classification:
    """
    Classify a family, across the levels of `scan` when one is given

    Without a scan only the single truncation is judged, so proper
    semi-frame verdicts cannot occur.
    """
    levels = scan.levels if scan is not None else (family,)
    refinements = scan.refinements if scan is not None else (float(max(family.size, 1)),)
    bounds = [frame_bounds(level) for level in levels]
    for r, b in zip(refinements, bounds):
        logger.debug(f"level {r:g}: bounds ({b.lower:.6g}, {b.upper:.6g})")

    result = classify_trajectory(refinements, [b.lower for b in bounds], [b.upper for b in bounds])
    if result.verdict == Verdict.NOT_TOTAL:
        witness = bounds[result.evidence["null_level"]].attained_low
        result.evidence["null_witness"] = complex_list(witness)
    if result.verdict == Verdict.PROPER_LOWER:
        bounds[-1].diverging = True
    logger.info(f"Classified family ({len(levels)} level(s)): {result.verdict.value}")
    return result


def check_duality(phi: VectorFamily, psi: VectorFamily, seed: int = DEFAULT_SEED) -> float:
    """
    max over probe pairs of |<f,g> - sum_i w_i <f,phi_i><psi_i,g>| / (|f||g|)
    """
    _check_same_grid(phi, psi)
    defect = np.eye(phi.dim) - mixed_frame_operator(phi, psi)
    probes = probe_vectors(phi.dim, seed)
    values = probes.conj() @ defect @ probes.T
    return float(np.max(np.abs(values)))


def omega_bound(phi: VectorFamily, psi: VectorFamily) -> float:
    """
    sum_i w_i |phi_i| |psi_i|, a bound for the norm of S_{psi,phi}
    """
    _check_same_grid(phi, psi)
    norms = np.linalg.norm(phi.vectors, axis=1) * np.linalg.norm(psi.vectors, axis=1)
    return float(np.sum(phi.grid.weights * norms))


def mixed_operator_norm(psi: VectorFamily, phi: VectorFamily) -> float:
    return float(np.linalg.norm(mixed_frame_operator(psi, phi), 2))


@dataclass
class ReproducingPairReport:
    norm: float
    inverse_norm: float
    is_pair: bool

    @property
    def condition(self) -> float:
        return self.norm * self.inverse_norm


def is_reproducing_pair(psi: VectorFamily, phi: VectorFamily) -> ReproducingPairReport:
    """
    S_{psi,phi} bounded with bounded inverse at this truncation
    """
    singular = np.linalg.svd(mixed_frame_operator(psi, phi), compute_uv=False)
    largest, smallest = float(singular[0]), float(singular[-1])
    is_pair = smallest > TAU_NULL * largest
    return ReproducingPairReport(largest, 1.0 / smallest if is_pair else float("inf"), is_pair)
