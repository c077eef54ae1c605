"""
Metric operators, the lattice of Hilbert spaces they generate, Hilbert
scales and similarity through bounded intertwiners.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from .config import DEFAULT_SEED, TAU_NULL, TAU_SIM, TAU_SPECTRA
from .errors import DimensionMismatch, SingularCalculus
from .hilbert import SpectralFn, SymOp, Vec, as_vec, fn_calculus, probe_vectors

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

POWER = "power"
GRAPH = "graph"


@dataclass(frozen=True, eq=False)
class MetricOp:
    """
    Strictly positive self-adjoint G
    """
    op: SymOp
    strictly_positive: bool

    @classmethod
    def from_symop(cls, op: SymOp) -> "MetricOp":
        positive = op.lambda_max > 0 and op.lambda_min > TAU_NULL * op.lambda_max
        if not positive:
            logger.warning(f"Metric operator is not strictly positive (lambda_min = {op.lambda_min:.3e})")
        return cls(op, positive)

    @classmethod
    def from_matrix(cls, matrix) -> "MetricOp":
        return cls.from_symop(SymOp.from_matrix(matrix))

    @property
    def dim(self) -> int:
        return self.op.dim

    def form(self, fn: SpectralFn) -> np.ndarray:
        return fn_calculus(self.op, fn).matrix

    def power(self, exponent: float) -> np.ndarray:
        if exponent < 0 and not self.strictly_positive:
            raise SingularCalculus("Negative powers need a strictly positive metric operator")
        return self.form(SpectralFn.power(exponent))

    def inverse(self) -> "MetricOp":
        return MetricOp.from_symop(fn_calculus(self.op, SpectralFn.power(-1.0)))


def _form_norm(form: np.ndarray, f: Vec) -> float:
    return float(np.sqrt(max(np.real(np.vdot(f, form @ f)), 0.0)))


@dataclass(frozen=True)
class ScaleSpace:
    """
    H_alpha with |f|_alpha = |G^{alpha/2} f|, or the graph variant
    (|f|^2 + |G^{alpha/2} f|^2)^{1/2} when G is not bounded below by 1
    """
    base: MetricOp
    alpha: float
    convention: Optional[str] = None

    def __post_init__(self):
        if self.convention is None:
            at_least_one = self.base.op.lambda_min >= 1.0 - TAU_NULL
            object.__setattr__(self, "convention", POWER if at_least_one else GRAPH)

    def norm(self, f: Vec) -> float:
        f = as_vec(f, self.base.dim)
        if self.alpha == 0.0:
            return float(np.linalg.norm(f))
        powered = float(np.linalg.norm(self.base.power(self.alpha / 2.0) @ f))
        if self.convention == POWER:
            return powered
        return float(np.sqrt(np.linalg.norm(f) ** 2 + powered ** 2))


def rg_norm(G: MetricOp, f: Vec) -> float:
    """
    |(I + G)^{1/2} f|, equal to the graph norm of G^{1/2}
    """
    f = as_vec(f, G.dim)
    return float(np.linalg.norm(G.form(SpectralFn(lambda t: np.sqrt(1.0 + t), "(1+t)^1/2")) @ f))


def join_norm(first: np.ndarray, second: np.ndarray, f: Vec) -> float:
    """
    inf over f = f1 + f2 of |f1|_first^2 + |f2|_second^2, square-rooted

    The minimizer solves (first + second) f1 = second f.
    """
    f1 = linalg.solve(first + second, second @ f, assume_a="her")
    f2 = f - f1
    return float(np.sqrt(np.real(np.vdot(f1, first @ f1) + np.vdot(f2, second @ f2))))


# Quadratic forms of the lattice nodes as functions of G.
NODE_FORMS: Dict[str, SpectralFn] = {
    "meet": SpectralFn(lambda t: t + 1.0 / t, "t+1/t"),
    "H(R_Ginv)": SpectralFn(lambda t: 1.0 + 1.0 / t, "1+1/t"),
    "H(R_G)": SpectralFn(lambda t: 1.0 + t, "1+t"),
    "H(G^-1)": SpectralFn.power(-1.0),
    "H": SpectralFn.power(0.0),
    "H(G)": SpectralFn.power(1.0),
    "H(R_G^-1)": SpectralFn(lambda t: 1.0 / (1.0 + t), "1/(1+t)"),
    "H(R_Ginv^-1)": SpectralFn(lambda t: t / (1.0 + t), "t/(1+t)"),
    "join": SpectralFn(lambda t: t / (1.0 + t * t), "t/(1+t^2)"),
}

LATTICE_EDGES: Tuple[Tuple[str, str], ...] = (
    ("meet", "H(R_Ginv)"),
    ("meet", "H(R_G)"),
    ("H(R_Ginv)", "H(G^-1)"),
    ("H(R_Ginv)", "H"),
    ("H(R_G)", "H"),
    ("H(R_G)", "H(G)"),
    ("H(G^-1)", "H(R_G^-1)"),
    ("H", "H(R_G^-1)"),
    ("H", "H(R_Ginv^-1)"),
    ("H(G)", "H(R_Ginv^-1)"),
    ("H(R_G^-1)", "join"),
    ("H(R_Ginv^-1)", "join"),
)


@dataclass
class Edge:
    source: str
    target: str
    constant: float
    source_norm: float
    target_norm: float

    @property
    def holds(self) -> bool:
        return self.target_norm <= self.constant * self.source_norm * (1.0 + 1e-9) + 1e-14


@dataclass
class LatticeNorms:
    norms: Dict[str, float]
    edges: List[Edge] = field(default_factory=list)

    @property
    def all_edges_hold(self) -> bool:
        return all(edge.holds for edge in self.edges)


def node_forms(G: MetricOp) -> Dict[str, np.ndarray]:
    if not G.strictly_positive:
        raise SingularCalculus("The lattice needs a strictly positive metric operator")
    return {name: G.form(fn) for name, fn in NODE_FORMS.items()}


def embedding_constant(source: np.ndarray, target: np.ndarray) -> float:
    """
    Smallest c with |f|_target <= c |f|_source
    """
    ratios = linalg.eigh(target, source, eigvals_only=True)
    return float(np.sqrt(max(ratios[-1], 0.0)))


def lattice_norms(G: MetricOp, f: Vec) -> LatticeNorms:
    f = as_vec(f, G.dim)
    forms = node_forms(G)
    norms = {name: _form_norm(form, f) for name, form in forms.items()}
    norms["join"] = join_norm(forms["H(G)"], forms["H(G^-1)"], f)

    edges = [
        Edge(source, target, embedding_constant(forms[source], forms[target]), norms[source], norms[target])
        for source, target in LATTICE_EDGES
    ]
    return LatticeNorms(norms, edges)


def dual_pairing_residual(G: MetricOp, f: Vec) -> float:
    """
    Join norm of H + H(G^-1) against the dual norm of H(R_G), relative
    """
    f = as_vec(f, G.dim)
    joined = join_norm(np.eye(G.dim), G.power(-1.0), f)
    dual = float(np.linalg.norm(G.form(SpectralFn(lambda t: 1.0 / np.sqrt(1.0 + t), "(1+t)^-1/2")) @ f))
    return abs(joined - dual) / max(dual, np.finfo(float).tiny)


def collapse_check(G: MetricOp, seed: int = DEFAULT_SEED) -> Tuple[float, float]:
    """
    Largest ratio between any two lattice norms on probes, with the bound (1 + kappa)^2
    """
    kappa = max(G.op.lambda_max, 1.0 / G.op.lambda_min)
    worst = 0.0
    for f in probe_vectors(G.dim, seed):
        values = np.array(list(lattice_norms(G, f).norms.values()))
        worst = max(worst, float(values.max() / values.min()))
    return worst, (1.0 + kappa) ** 2


def scale_unitarity(G: MetricOp, n_from: int, n_to: int, seed: int = DEFAULT_SEED) -> float:
    """
    Max relative gap of |G^{1/2} f|_{n-1} = |f|_n and |G f|_{n-2} = |f|_n over probes
    """
    root, full = G.power(0.5), G.op.matrix
    worst = 0.0
    for n in range(min(n_from, n_to), max(n_from, n_to) + 1):
        here = ScaleSpace(G, float(n), POWER)
        down_one = ScaleSpace(G, float(n - 1), POWER)
        down_two = ScaleSpace(G, float(n - 2), POWER)
        for f in probe_vectors(G.dim, seed):
            reference = max(here.norm(f), np.finfo(float).tiny)
            worst = max(
                worst,
                abs(down_one.norm(root @ f) - here.norm(f)) / reference,
                abs(down_two.norm(full @ f) - here.norm(f)) / reference,
            )
    return worst


@dataclass
class ClosedMetrics:
    """
    G1 = I + S*S and G2 = G1^{-1} for a closed operator S
    """
    g1: MetricOp
    g2: MetricOp
    triplet_violation: float
    inverse_residual: float

    def __iter__(self) -> Iterator[MetricOp]:
        return iter((self.g1, self.g2))


def build_metric_from_closed(Smat, seed: int = DEFAULT_SEED) -> ClosedMetrics:
    s = np.atleast_2d(np.asarray(Smat, dtype=complex))
    g1 = MetricOp.from_matrix(np.eye(s.shape[1]) + s.conj().T @ s)
    g2 = g1.inverse()
    if g1.op.lambda_min < 1.0 - 1e-12:
        logger.warning(f"I + S*S has lambda_min {g1.op.lambda_min:.3e} < 1")
    if g2.op.norm > 1.0 + 1e-12:
        logger.warning(f"(I + S*S)^-1 has norm {g2.op.norm:.3e} > 1")

    upper = ScaleSpace(g1, 1.0, POWER)
    lower = ScaleSpace(g1, -1.0, POWER)
    violation, inverse_residual = 0.0, 0.0
    for f in probe_vectors(g1.dim, seed):
        plain = np.linalg.norm(f)
        violation = max(violation, lower.norm(f) - plain, plain - upper.norm(f))
        image = g1.op.matrix @ f
        inverse_residual = max(inverse_residual, float(np.linalg.norm(g2.op.matrix @ image - f) * np.linalg.norm(image)))
    logger.debug(f"Triplet violation {violation:.3e}, inverse residual {inverse_residual:.3e}")
    return ClosedMetrics(g1, g2, max(violation, 0.0), inverse_residual)


@dataclass
class SimilarityReport:
    residual: float
    similar: bool
    spectral_distance: Optional[float] = None
    spectra_match: Optional[bool] = None

    def as_dict(self) -> Dict:
        return {
            "residual": self.residual,
            "similar": self.similar,
            "spectral_distance": self.spectral_distance,
            "spectra_match": self.spectra_match,
        }


def spectral_distance(A: np.ndarray, B: np.ndarray) -> float:
    """
    Max eigenvalue distance after optimally pairing the two spectra
    """
    a, b = np.linalg.eigvals(A), np.linalg.eigvals(B)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols])) if len(rows) else 0.0


def similarity_check(A, B, T: MetricOp) -> SimilarityReport:
    """
    Is B T = T A with T bounded both ways?
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if A.shape != B.shape or A.shape != (T.dim, T.dim):
        raise DimensionMismatch(f"Shapes {A.shape}, {B.shape} do not fit an intertwiner of dim {T.dim}")

    t = T.op.matrix
    scale = max(np.linalg.norm(A, "fro") * T.op.norm, np.finfo(float).tiny)
    residual = float(np.linalg.norm(B @ t - t @ A, "fro") / scale)
    report = SimilarityReport(residual, residual <= TAU_SIM and T.strictly_positive)

    if report.similar:
        report.spectral_distance = spectral_distance(A, B)
        report.spectra_match = report.spectral_distance <= TAU_SPECTRA * max(1.0, np.linalg.norm(A, 2))
        if not report.spectra_match:
            logger.warning(f"Similar operators with spectra {report.spectral_distance:.3e} apart")
    logger.info(f"Similarity residual {residual:.3e}: {'similar' if report.similar else 'not similar'}")
    return report
