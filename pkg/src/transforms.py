"""
Transforms of a family by functions of its generalized frame operator,
judged in weighted spaces, and the metric-transformability decision.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .config import TAU_CALC, TAU_DUAL, TAU_K, TAU_NULL, TAU_PARS, TAU_RANGE
from .errors import GridMismatch, HypothesisViolated, NotBiorthogonal, NotTotal, PostconditionFailed, SingularCalculus
from .frames import (
    Classification,
    FrameBounds,
    TruncationScan,
    VectorFamily,
    Verdict,
    classify,
    classify_trajectory,
    divergence_trend,
    frame_operator,
)
from .genframe import GenFrameOp, build_genframe, restricted_bounds
from .hilbert import SpectralFn, Vec, as_vec

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

OPEN_QUESTION = (
    "Undecided: is there a metric operator G making G phi a frame if and only if "
    "phi is total and D(C_phi) is dense? Neither a construction nor an impossibility clause applies."
)


class WeightKind(str, Enum):
    POWER = "power"
    FN = "fn"


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """
    Norm |W f| with W = T^m or W = h(T) for the base operator T
    """
    kind: WeightKind
    base: GenFrameOp
    m: float = 0.0
    h: Optional[SpectralFn] = None

    @classmethod
    def power(cls, base: GenFrameOp, m: float) -> "WeightSpec":
        if m < 0:
            raise HypothesisViolated(f"Weight exponent must be nonnegative, got {m}")
        return cls(WeightKind.POWER, base, m=float(m))

    @classmethod
    def function(cls, base: GenFrameOp, h: SpectralFn) -> "WeightSpec":
        t = _spectral_points(base)
        values = h(t)
        with np.errstate(divide="ignore"):
            inverse = 1.0 / values
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(inverse))):
            raise SingularCalculus(f"{h.label} and its reciprocal must be finite on the spectrum")
        return cls(WeightKind.FN, base, h=h)

    @property
    def spectral_fn(self) -> SpectralFn:
        return SpectralFn.power(self.m) if self.kind == WeightKind.POWER else self.h

    def operator(self) -> np.ndarray:
        return self.base.fn(self.spectral_fn)


def _spectral_points(gf: GenFrameOp) -> np.ndarray:
    t = np.clip(gf.spectrum, 0.0, None)
    t[t <= gf.restricted.null_threshold()] = 0.0
    return t


def fn_transform(family: VectorFamily, gf: GenFrameOp, g: SpectralFn) -> VectorFamily:
    """
    {g~(T) P phi_x} with g~ = 1/g
    """
    return family.mapped(gf.fn(g.reciprocal()))


def power_transform(family: VectorFamily, gf: GenFrameOp, k: float) -> VectorFamily:
    """
    {T^{-k} phi_x}; k = 0 gives the family projected onto H_phi
    """
    return family.mapped(gf.power(-float(k)))


def weighted_energy(family: VectorFamily, w: WeightSpec, f: Vec) -> float:
    """
    sum_i w_i |<f, phi_i>_W|^2 with <u, v>_W = <W u, W v>
    """
    weight = w.operator()
    f = as_vec(f, family.dim)
    return family.mapped(weight).energy(weight @ f)


def power_energy_prediction(gf: GenFrameOp, k: float, m: float, f: Vec) -> float:
    """
    |T^{2m-k+1/2} f|^2, the energy of T^{-k} phi in H(T^m)
    """
    return float(np.linalg.norm(gf.power(2.0 * m - k + 0.5) @ f) ** 2)


def fn_energy_prediction(gf: GenFrameOp, g: SpectralFn, h: SpectralFn, f: Vec) -> float:
    """
    |(h^2 g~ t^{1/2})(T) f|^2, the energy of g~(T) phi in H_h
    """
    symbol = h * h * g.reciprocal() * SpectralFn.power(0.5)
    return float(np.linalg.norm(gf.fn(symbol) @ f) ** 2)


@dataclass
class VerdictFlags:
    is_bessel: bool
    is_lower_semiframe: bool
    is_frame: bool
    is_parseval: bool

    @classmethod
    def from_classification(cls, result: Classification) -> "VerdictFlags":
        verdict = result.verdict
        if verdict in (Verdict.FRAME, Verdict.PARSEVAL):
            return cls(True, True, True, verdict == Verdict.PARSEVAL)
        if verdict == Verdict.PROPER_LOWER:
            return cls(False, True, False, False)
        if verdict in (Verdict.UPPER_SEMI, Verdict.BESSEL_ONLY):
            return cls(True, False, False, False)
        if verdict == Verdict.NOT_TOTAL:
            return cls(result.is_bessel, False, False, False)
        return cls(False, False, False, False)

    def as_dict(self) -> Dict[str, bool]:
        return {
            "is_bessel": self.is_bessel,
            "is_lower_semiframe": self.is_lower_semiframe,
            "is_frame": self.is_frame,
            "is_parseval": self.is_parseval,
        }


@dataclass
class TransformVerdict:
    """
    Measured verdicts in the weighted norm next to the predicted ones
    """
    is_bessel: bool
    is_lower_semiframe: bool
    is_frame: bool
    is_parseval: bool
    predicted: VerdictFlags
    bounds: FrameBounds
    verdict: Verdict
    predicted_verdict: Verdict
    evidence: Dict[str, Any] = field(default_factory=dict)

    @property
    def measured(self) -> VerdictFlags:
        return VerdictFlags(self.is_bessel, self.is_lower_semiframe, self.is_frame, self.is_parseval)

    @property
    def agrees(self) -> bool:
        return self.measured == self.predicted

    def as_dict(self) -> Dict[str, Any]:
        return {
            "measured": self.measured.as_dict(),
            "predicted": self.predicted.as_dict(),
            "verdict": self.verdict.value,
            "predicted_verdict": self.predicted_verdict.value,
            "agrees": self.agrees,
            "bounds": self.bounds.as_dict(),
            "evidence": self.evidence,
        }


def _levels(family: VectorFamily,
            gf: GenFrameOp,
            scan: Optional[TruncationScan]) -> List[Tuple[float, VectorFamily, GenFrameOp]]:
    if scan is None:
        return [(float(max(family.size, 1)), family, gf)]
    return [
        (r, level, gf if level is family else build_genframe(level))
        for r, level in zip(scan.refinements, scan.levels)
    ]


def _check_hypotheses(levels, g: SpectralFn, h: SpectralFn) -> Dict[str, Any]:
    refinements = [r for r, _, _ in levels]
    g_inverse, dominance = [], []
    for _, _, level_gf in levels:
        t = _spectral_points(level_gf)
        g_values, h_values = g(t), h(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            g_inverse.append(float(np.max(np.abs(1.0 / g_values))))
            dominance.append(float(np.max(np.abs(h_values / g_values))))

    if not (np.all(np.isfinite(g_inverse)) and np.all(np.isfinite(dominance))):
        raise HypothesisViolated(f"1/{g.label} or {h.label}/{g.label} is infinite on the spectrum")
    for label, trajectory in (("1/g", g_inverse), ("h/g", dominance)):
        if divergence_trend(refinements, trajectory).flagged:
            raise HypothesisViolated(f"{label} is unbounded across the scan: {trajectory}")
    return {"gamma": float(max(dominance)), "sup_inverse_g": float(max(g_inverse))}


def classify_fn_transform(family: VectorFamily,
                          gf: GenFrameOp,
                          g: SpectralFn,
                          h: SpectralFn,
                          scan: Optional[TruncationScan] = None) -> TransformVerdict:
    """
    Judge g~(T) phi as a family of H_h

    Predictions use the energy-to-norm ratio r(t) = t (h(t)/g(t))^2 on the
    spectrum of each level: Bessel iff max r stays bounded, lower semi-frame
    iff min r stays away from zero, Parseval iff r = 1.
    """
    levels = _levels(family, gf, scan)
    refinements = [r for r, _, _ in levels]
    evidence = {"g": g.label, "h": h.label}
    evidence["hypotheses"] = _check_hypotheses(levels, g, h)

    measured_low, measured_high, predicted_low, predicted_high = [], [], [], []
    bounds = None
    inherited_total = True
    for _, level, level_gf in levels:
        transformed = fn_transform(level, level_gf, g)
        weighted = transformed.mapped(level_gf.fn(h))
        bounds = restricted_bounds(level_gf, weighted)
        measured_low.append(bounds.lower)
        measured_high.append(bounds.upper)

        t = _spectral_points(level_gf)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.nan_to_num(t * (h(t) / g(t)) ** 2)
        predicted_low.append(float(np.min(ratio)))
        predicted_high.append(float(np.max(ratio)))
        inherited_total = inherited_total and level_gf.is_invertible()

    measured = classify_trajectory(refinements, measured_low, measured_high, check_total=not inherited_total)
    predicted = classify_trajectory(refinements, predicted_low, predicted_high, check_total=not inherited_total)
    evidence["measured"] = measured.evidence
    evidence["predicted"] = predicted.evidence

    flags = VerdictFlags.from_classification(measured)
    result = TransformVerdict(
        is_bessel=flags.is_bessel,
        is_lower_semiframe=flags.is_lower_semiframe,
        is_frame=flags.is_frame,
        is_parseval=flags.is_parseval,
        predicted=VerdictFlags.from_classification(predicted),
        bounds=bounds,
        verdict=measured.verdict,
        predicted_verdict=predicted.verdict,
        evidence=evidence,
    )
    if not result.agrees:
        logger.warning(f"Measured {measured.verdict.value} but predicted {predicted.verdict.value} for g={g.label}, h={h.label}")
    logger.info(f"Transform g={g.label} in H_h, h={h.label}: {measured.verdict.value}")
    return result


def snap_k(k: float, m: float) -> float:
    """
    k within TAU_K of m + 1/2 is taken to be exactly m + 1/2
    """
    if abs(k - m - 0.5) < TAU_K:
        return m + 0.5
    return k


def classify_transform(family: VectorFamily,
                       gf: GenFrameOp,
                       k: float,
                       m: float,
                       scan: Optional[TruncationScan] = None) -> TransformVerdict:
    """
    Judge T^{-k} phi as a family of H(T^m)

    Runs through classify_fn_transform with g = t^k and h = t^m. For T
    bounded below and unbounded above the outcome is: Bessel iff
    k >= m + 1/2, lower semi-frame iff m <= k <= m + 1/2, Parseval iff
    k = m + 1/2.
    """
    if m < 0:
        raise HypothesisViolated(f"m must be nonnegative, got {m}")
    if k < m:
        raise HypothesisViolated(f"Transform requires k >= m, got k = {k}, m = {m}")
    k = snap_k(k, m)

    result = classify_fn_transform(family, gf, SpectralFn.power(k), SpectralFn.power(m), scan)
    result.evidence["k"] = k
    result.evidence["m"] = m
    result.evidence["power_rule"] = {
        "is_bessel": k >= m + 0.5,
        "is_lower_semiframe": m <= k <= m + 0.5,
        "is_parseval": k == m + 0.5,
    }
    return result


@dataclass
class MetricReport:
    """
    Outcome of the metric-transformability decision
    """
    clause: str
    possible: Optional[bool]
    message: str
    metric: Optional[np.ndarray] = None
    residuals: Dict[str, float] = field(default_factory=dict)
    evidence: Dict[str, Any] = field(default_factory=dict)

    @property
    def verified(self) -> Optional[bool]:
        """
        Whether the constructed G phi is Parseval; None when nothing was constructed
        """
        if "parseval" not in self.residuals:
            return None
        return self.residuals["parseval"] <= TAU_PARS

    def as_dict(self) -> Dict[str, Any]:
        return {
            "clause": self.clause,
            "possible": self.possible,
            "verified": self.verified,
            "message": self.message,
            "residuals": self.residuals,
            "evidence": self.evidence,
        }


def _complement_witness(level: VectorFamily) -> Optional[Vec]:
    """
    A unit vector orthogonal to the declared domain, if the domain is proper
    """
    if level.domain is None:
        return None
    gf = build_genframe(level)
    if gf.full_domain:
        return None
    complement = np.eye(level.dim) - gf.projector.matrix
    column = int(np.argmax(np.linalg.norm(complement, axis=0)))
    v = complement[:, column]
    return v / np.linalg.norm(v)


def _verify_construction(levels: Sequence[VectorFamily]) -> Tuple[np.ndarray, float]:
    worst = 0.0
    metric = None
    for level in levels:
        gf = build_genframe(level)
        metric = gf.power(-0.5)
        bounds = restricted_bounds(gf, level.mapped(metric))
        worst = max(worst, abs(bounds.lower - 1.0), abs(bounds.upper - 1.0))
    return metric, worst


def _range_residual(level: VectorFamily) -> float:
    gf = build_genframe(level)
    pseudo = linalg.pinvh(gf.op.matrix, atol=0.0, rtol=TAU_NULL)
    worst = 0.0
    for v in level.vectors:
        size = max(np.linalg.norm(v), np.finfo(float).tiny)
        worst = max(worst, float(np.linalg.norm(gf.op.matrix @ (pseudo @ v) - v) / size))
    return worst


def metric_transformability(family: VectorFamily, scan: Optional[TruncationScan] = None) -> MetricReport:
    """
    Decide whether some metric operator G can turn the family into a frame

    Clauses are tried in order: non-dense domain, non-total Bessel,
    non-total, dense lower semi-frame, total with phi_x in the range of T.
    """
    scan = scan if scan is not None else TruncationScan((family,), (float(max(family.size, 1)),))
    classification = classify(scan.finest, scan)
    evidence: Dict[str, Any] = {"classification": classification.as_dict()}

    witnesses = [_complement_witness(level) for level in scan.levels]
    if witnesses[-1] is not None:
        energies = [level.energy(w) if w is not None else 0.0 for level, w in zip(scan.levels, witnesses)]
        evidence["domain_witness_energy"] = energies
        evidence["domain_witness_trend"] = divergence_trend(scan.refinements, energies).as_dict()
        report = MetricReport("iii", False, "D(C_phi) is not dense: no metric operator G makes G phi a frame",
                              evidence=evidence)
    elif classification.verdict == Verdict.NOT_TOTAL and classification.is_bessel:
        report = MetricReport("ii", False, "phi is Bessel but not total: no metric operator G exists",
                              evidence=evidence)
    elif classification.verdict == Verdict.NOT_TOTAL:
        report = MetricReport("i", False, "phi is not total: no metric operator G with bounded inverse exists",
                              evidence=evidence)
    elif classification.verdict in (Verdict.FRAME, Verdict.PARSEVAL, Verdict.PROPER_LOWER):
        metric, residual = _verify_construction(scan.levels)
        report = MetricReport("iv", True, "Dense lower semi-frame: G = T^{-1/2} makes G phi a Parseval frame",
                              metric=metric, residuals={"parseval": residual}, evidence=evidence)
    else:
        range_residual = max(_range_residual(level) for level in scan.levels)
        if range_residual <= TAU_RANGE:
            metric, residual = _verify_construction(scan.levels)
            report = MetricReport("v", True, "Total with phi_x in R(T): G = T^{-1/2} makes G phi a Parseval frame",
                                  metric=metric, residuals={"parseval": residual, "range": range_residual},
                                  evidence=evidence)
        else:
            report = MetricReport("open", None, OPEN_QUESTION, residuals={"range": range_residual}, evidence=evidence)

    if report.verified is False:
        logger.error(f"Constructed G phi misses Parseval by {report.residuals['parseval']:.3e}")
    logger.info(f"Metric transformability: clause ({report.clause}) {report.message}")
    return report


def biorthogonal_to_onb(phi: VectorFamily, psi: VectorFamily) -> VectorFamily:
    """
    {T^{-1/2} phi_n} for a biorthogonal pair of total families

    Both families are sequences: their grids must carry the counting measure.
    """
    if phi.size != psi.size or phi.dim != psi.dim:
        raise NotBiorthogonal(f"Families of sizes {phi.size} and {psi.size} cannot be biorthogonal")
    for name, family in (("phi", phi), ("psi", psi)):
        if not np.allclose(family.grid.weights, 1.0, rtol=0.0, atol=TAU_NULL):
            raise GridMismatch(f"{name} must be indexed with unit weights to yield an orthonormal basis")
    gram = psi.vectors @ phi.vectors.conj().T
    defect = float(np.max(np.abs(gram - np.eye(phi.size))))
    if defect > TAU_DUAL:
        raise NotBiorthogonal(f"<psi_n, phi_m> deviates from the identity by {defect:.3e}")

    for name, family in (("phi", phi), ("psi", psi)):
        s = frame_operator(family)
        if s.lambda_min <= TAU_NULL * s.lambda_max:
            raise NotTotal(f"{name} is not total at this truncation")

    gf = build_genframe(phi)
    onb = phi.mapped(gf.power(-0.5))

    orthonormality = float(np.max(np.abs(onb.vectors @ onb.vectors.conj().T - np.eye(phi.size))))
    intertwining = float(np.max(np.linalg.norm(
        psi.vectors @ gf.op.matrix.T - phi.vectors, axis=1
    )))
    if orthonormality > TAU_PARS:
        raise PostconditionFailed(f"Output deviates from orthonormal by {orthonormality:.3e}")
    if intertwining > TAU_CALC * max(gf.op.norm, 1.0):
        raise PostconditionFailed(f"T psi_n = phi_n fails by {intertwining:.3e}")
    logger.debug(f"Biorthogonal pair: orthonormality {orthonormality:.3e}, T psi = phi residual {intertwining:.3e}")
    return onb
