"""
Generalized frame operator T = P S P on the closure of the analysis domain,
the lower-bound certificate, and the canonical dual and tight families.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .config import DEFAULT_SEED, TAU_CALC, TAU_CERT, TAU_DUAL, TAU_NULL, TAU_PARS, TAU_SPAN
from .errors import DependentSpanningSet, NotInvertible, PostconditionFailed
from .frames import (
    DomainSubspace,
    FrameBounds,
    TruncationScan,
    VectorFamily,
    analysis,
    bounds_from_operator,
    divergence_trend,
    frame_operator,
    mixed_frame_operator,
)
from .hilbert import SpectralFn, SymOp, Vec, fn_calculus, probe_vectors

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def orthonormal_basis(spanning: np.ndarray, tol: float = TAU_SPAN) -> np.ndarray:
    """
    Modified Gram-Schmidt with one re-orthogonalization pass

    Rows of `spanning` are the input vectors; the basis is returned as columns.
    """
    basis = []
    for i, x in enumerate(np.asarray(spanning, dtype=complex)):
        v = x.copy()
        norm_init = np.linalg.norm(v)
        if norm_init == 0.0:
            raise DependentSpanningSet(f"Spanning vector {i} is zero")

        for q in basis:
            v -= np.vdot(q, v) * q
        if np.linalg.norm(v) < 0.7 * norm_init:
            for q in basis:
                v -= np.vdot(q, v) * q

        if np.linalg.norm(v) < tol * norm_init:
            raise DependentSpanningSet(f"Spanning vector {i} depends on the previous ones")
        basis.append(v / np.linalg.norm(v))
    return np.column_stack(basis)


@dataclass(frozen=True, eq=False)
class GenFrameOp:
    """
    T acting on the ambient space as 0 on the orthogonal complement of H_phi

    `basis` holds an orthonormal basis Q of H_phi as columns and
    `restricted` is Q* S Q, the matrix of T in that basis.
    """
    op: SymOp
    projector: SymOp
    basis: np.ndarray
    restricted: SymOp

    @property
    def domain_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def full_domain(self) -> bool:
        return self.domain_dim == self.dim

    @property
    def spectrum(self) -> np.ndarray:
        return self.restricted.eigenvalues

    def is_invertible(self) -> bool:
        return self.restricted.lambda_max > 0 and self.restricted.lambda_min > TAU_NULL * self.restricted.lambda_max

    def inverse_norm(self) -> float:
        self._require_invertible()
        return 1.0 / self.restricted.lambda_min

    def _require_invertible(self) -> None:
        if not self.is_invertible():
            raise NotInvertible(
                f"T is singular on H_phi (lambda_min = {self.restricted.lambda_min:.3e}, "
                f"lambda_max = {self.restricted.lambda_max:.3e})"
            )

    def _lift(self, inner: np.ndarray) -> np.ndarray:
        q = self.basis
        return q @ inner @ q.conj().T

    def power(self, exponent: float) -> np.ndarray:
        """
        T^a on H_phi, 0 on the complement; T^0 is the projector
        """
        a = float(exponent)
        if a == 0.0:
            return self.projector.matrix.copy()
        if a < 0.0:
            self._require_invertible()
        return self._lift(fn_calculus(self.restricted, SpectralFn.power(a)).matrix)

    def fn(self, fn: SpectralFn) -> np.ndarray:
        if fn.exponent is not None:
            return self.power(fn.exponent)
        return self._lift(fn_calculus(self.restricted, fn).matrix)

    def project(self, f: Vec) -> Vec:
        return self.projector.matrix @ f

    def eigenvectors(self) -> np.ndarray:
        """
        Eigenvectors of T on H_phi as ambient columns, ascending eigenvalues
        """
        return self.basis @ self.restricted.eigenvectors


def build_genframe(family: VectorFamily, domain: Optional[DomainSubspace] = None) -> GenFrameOp:
    domain = domain if domain is not None else family.domain
    s = frame_operator(family)

    if domain is None:
        gf = GenFrameOp(s, SymOp.identity(family.dim), np.eye(family.dim, dtype=complex), s)
    else:
        q = orthonormal_basis(domain.spanning)
        projector = SymOp.from_spectrum(
            np.concatenate([np.zeros(family.dim - q.shape[1]), np.ones(q.shape[1])]),
            _complete_basis(q),
        )
        compressed = projector.matrix @ s.matrix @ projector.matrix
        gf = GenFrameOp(SymOp.from_matrix(compressed), projector, q, SymOp.from_matrix(q.conj().T @ s.matrix @ q))

    logger.debug(f"Built T on a domain of dim {gf.domain_dim}/{gf.dim}")
    return gf


def _complete_basis(q: np.ndarray) -> np.ndarray:
    """
    Extend the orthonormal columns q to a unitary [complement | q]
    """
    dim, k = q.shape
    if k == dim:
        return q
    u, _, _ = np.linalg.svd(np.eye(dim) - q @ q.conj().T)
    return np.column_stack([u[:, :dim - k], q])


def _domain_probes(gf: GenFrameOp, seed: int) -> np.ndarray:
    """
    Unit probes inside H_phi (rows): projected basis and random vectors plus eigenvectors of T
    """
    projected = probe_vectors(gf.dim, seed) @ gf.projector.matrix.T
    probes = np.vstack([projected, gf.eigenvectors().T])
    norms = np.linalg.norm(probes, axis=1)
    keep = norms > 1e-8
    return probes[keep] / norms[keep, None]


def kato_residual(gf: GenFrameOp, family: VectorFamily, seed: int = DEFAULT_SEED) -> float:
    """
    Relative gap between sum_i w_i <f,phi_i><phi_i,g> and <T^{1/2} f, T^{1/2} g> on domain probes
    """
    probes = _domain_probes(gf, seed)
    c = analysis(family).matrix
    omega = (c @ probes.T).conj().T @ (c @ probes.T)
    root = gf.power(0.5)
    rooted = root @ probes.T
    kato = rooted.conj().T @ rooted
    return float(np.max(np.abs(omega - kato)) / max(gf.op.norm, np.finfo(float).tiny))


@dataclass
class LowerBoundCertificate:
    """
    Five equivalent ways of saying "bounded from below by m", measured at one truncation
    """
    m: float
    values: Dict[str, float] = field(default_factory=dict)
    thresholds: Dict[str, float] = field(default_factory=dict)
    statements: Dict[str, bool] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return len(set(self.statements.values())) <= 1

    @property
    def holds(self) -> bool:
        return self.consistent and all(self.statements.values())

    def as_dict(self) -> Dict:
        return {
            "m": self.m,
            "values": self.values,
            "thresholds": self.thresholds,
            "statements": self.statements,
            "consistent": self.consistent,
        }


def lower_bound_certificate(family: VectorFamily,
                            m: float,
                            gf: Optional[GenFrameOp] = None,
                            seed: int = DEFAULT_SEED) -> LowerBoundCertificate:
    """
    Evaluate the five statements

      frame_bound: lower frame bound on H_phi >= m
      omega:       sum_i w_i |<f,phi_i>|^2 >= m |f|^2 on probes
      analysis:    |C f| >= sqrt(m) |f| on probes
      operator:    |T f| >= m |f| on probes
      inverse:     T invertible on H_phi with |T^{-1}| <= 1/m
    """
    gf = gf if gf is not None else build_genframe(family)
    probes = _domain_probes(gf, seed)
    c = analysis(family).matrix

    coefficients = c @ probes.T
    omega = np.sum(np.abs(coefficients) ** 2, axis=0)
    images = gf.op.matrix @ probes.T

    cert = LowerBoundCertificate(m=float(m))
    cert.values = {
        "frame_bound": gf.restricted.lambda_min,
        "omega": float(np.min(omega)),
        "analysis": float(np.sqrt(np.min(omega))),
        "operator": float(np.min(np.linalg.norm(images, axis=0))),
        "inverse": 1.0 / gf.inverse_norm() if gf.is_invertible() else 0.0,
    }
    cert.thresholds = {key: float(m) for key in cert.values}
    cert.thresholds["analysis"] = float(np.sqrt(m))
    cert.statements = {
        key: bool(value >= cert.thresholds[key] * (1.0 - TAU_CERT))
        for key, value in cert.values.items()
    }

    if not cert.consistent:
        logger.error(f"Lower-bound certificate disagrees for m = {m:g}: {cert.statements}")
    else:
        logger.info(f"Lower bound {m:g}: {'holds' if cert.holds else 'fails'} in all five forms")
    return cert


def restricted_bounds(gf: GenFrameOp, family: VectorFamily) -> FrameBounds:
    """
    Frame bounds of `family` as a family of H_phi
    """
    q = gf.basis
    s = frame_operator(family).matrix
    inner = SymOp.from_matrix(q.conj().T @ s @ q)
    bounds = bounds_from_operator(inner)
    bounds.attained_low = q @ bounds.attained_low
    bounds.attained_high = q @ bounds.attained_high
    return bounds


def reconstruction_residual(gf: GenFrameOp,
                            phi: VectorFamily,
                            psi: VectorFamily,
                            seed: int = DEFAULT_SEED) -> float:
    """
    max |<f,h> - sum_i w_i <f,phi_i><psi_i,h>| over f in H_phi, h arbitrary
    """
    domain = _domain_probes(gf, seed)
    everywhere = probe_vectors(gf.dim, seed)
    defect = np.eye(gf.dim) - mixed_frame_operator(phi, psi)
    values = everywhere.conj() @ defect @ domain.T
    return float(np.max(np.abs(values)))


def canonical_dual(gf: GenFrameOp, family: VectorFamily) -> VectorFamily:
    """
    psi_i = T^{-1} P phi_i
    """
    dual = family.mapped(gf.power(-1.0))

    bessel = frame_operator(dual).lambda_max
    if bessel > gf.inverse_norm() * (1.0 + TAU_CALC):
        raise PostconditionFailed(f"Canonical dual Bessel bound {bessel:.6g} exceeds |T^-1| = {gf.inverse_norm():.6g}")
    residual = reconstruction_residual(gf, family, dual)
    if residual > TAU_DUAL:
        raise PostconditionFailed(f"Canonical dual reconstruction residual {residual:.3e} exceeds {TAU_DUAL:.0e}")
    logger.debug(f"Canonical dual: Bessel bound {bessel:.6g}, reconstruction residual {residual:.3e}")
    return dual


def canonical_tight(gf: GenFrameOp, family: VectorFamily) -> VectorFamily:
    """
    chi_i = T^{-1/2} P phi_i, a Parseval frame of H_phi
    """
    tight = family.mapped(gf.power(-0.5))
    bounds = restricted_bounds(gf, tight)
    if abs(bounds.lower - 1.0) > TAU_PARS or abs(bounds.upper - 1.0) > TAU_PARS:
        raise PostconditionFailed(f"Canonical tight family has bounds ({bounds.lower:.12g}, {bounds.upper:.12g})")
    return tight


def riesz_representer(family: VectorFamily,
                      x_index: int,
                      gf: Optional[GenFrameOp] = None,
                      seed: int = DEFAULT_SEED) -> Vec:
    """
    chi_x = T^{-1} phi_x, so that <f, phi_x> = <T^{1/2} f, T^{1/2} chi_x> on H_phi

    `x_index` is the 0-based grid position.
    """
    gf = gf if gf is not None else build_genframe(family)
    chi = gf.power(-1.0) @ family.vectors[x_index]
    residual = representer_residual(gf, family, x_index, chi, seed)
    if residual > TAU_DUAL:
        raise PostconditionFailed(f"Representer of index {x_index} misses <f, phi_x> by {residual:.3e}")
    return chi


def representer_residual(gf: GenFrameOp,
                         family: VectorFamily,
                         x_index: int,
                         chi: Vec,
                         seed: int = DEFAULT_SEED) -> float:
    probes = _domain_probes(gf, seed)
    root = gf.power(0.5)
    lhs = probes @ family.vectors[x_index].conj()
    rhs = (probes @ root.T) @ (root @ chi).conj()
    return float(np.max(np.abs(lhs - rhs)) / max(np.linalg.norm(family.vectors[x_index]), np.finfo(float).tiny))


def inverse_representer(chi: VectorFamily, gf: GenFrameOp) -> VectorFamily:
    """
    eta = T chi; every chi_x lies in the domain of T at finite truncation

    chi must lie in H_phi, where T^{-1} eta recovers it.
    """
    eta = chi.mapped(gf.op.matrix)
    recovered = eta.mapped(gf.power(-1.0))
    scale = max(chi.sup_norm(), np.finfo(float).tiny)
    residual = float(np.max(np.abs(recovered.vectors - chi.vectors))) / scale
    if residual > TAU_CALC:
        raise PostconditionFailed(f"T^-1 (T chi) misses chi by {residual:.3e}; chi leaves H_phi")
    return eta


def dual_is_upper_semiframe(family: VectorFamily, scan: Optional[TruncationScan] = None) -> bool:
    """
    The canonical dual is total on H_phi with Bessel bound |T^{-1}| at every
    level, and that bound stays bounded across the scan
    """
    levels = scan.levels if scan is not None else (family,)
    refinements = scan.refinements if scan is not None else (1.0,)
    uppers = []
    for level in levels:
        gf = build_genframe(level)
        if not gf.is_invertible():
            logger.info("Family is not bounded below on H_phi; no canonical dual")
            return False
        bounds = restricted_bounds(gf, level.mapped(gf.power(-1.0)))
        if bounds.upper > gf.inverse_norm() * (1.0 + TAU_CALC) or bounds.lower <= TAU_NULL * bounds.upper:
            return False
        uppers.append(bounds.upper)
    return not divergence_trend(refinements, uppers).flagged
