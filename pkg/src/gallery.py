"""
Executable example families, each shipped with the classification that
theory predicts for it.

Every builder returns a GalleryCase holding a truncation scan. Predicted
verdicts come from closed-form bound trajectories run through the same
trajectory heuristics as measured ones.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from .config import ParamValue
from .errors import ConfigParse, InvalidB, NonpositiveSymbol, UnknownGalleryCase, WeightBelowOne
from .frames import (
    DomainSubspace,
    MeasureGrid,
    TruncationScan,
    VectorFamily,
    Verdict,
    classify_trajectory,
    frame_operator,
)
from .hilbert import AmbientSpace

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

Symbol = Callable[[np.ndarray], np.ndarray]

EXPONENTIAL_SYMBOLS: Dict[str, Symbol] = {
    "one": lambda x: np.ones_like(x),
    "inv_x": lambda x: 1.0 / x,
    "x": lambda x: x,
    "smooth": lambda x: 2.0 + np.sin(2.0 * np.pi * x),
}

RKHS_WEIGHTS: Dict[str, Symbol] = {
    "one": lambda x: np.ones_like(x),
    "two": lambda x: np.full_like(x, 2.0),
    "linear": lambda x: 1.0 + x,
}

SPHERICAL_SYMBOLS: Dict[str, Symbol] = {
    "const": lambda l: np.ones_like(l),
    "growing": lambda l: 1.0 + l ** 2,
    "decaying": lambda l: 1.0 / (1.0 + l),
}


@dataclass
class GalleryCase:
    name: str
    params: Dict[str, Any]
    scan: TruncationScan
    predicted: Verdict
    predicted_operator: str
    note: str = ""
    predicted_clause: Optional[str] = None
    companion: Optional[VectorFamily] = None
    evidence: Dict[str, Any] = field(default_factory=dict)

    @property
    def family(self) -> VectorFamily:
        return self.scan.finest

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "params": self.params,
            "refinements": list(self.scan.refinements),
            "predicted": self.predicted.value,
            "predicted_operator": self.predicted_operator,
            "predicted_clause": self.predicted_clause,
            "note": self.note,
        }


def _lookup(table: Dict[str, Symbol], key: Union[str, Symbol], kind: str) -> Symbol:
    if callable(key):
        return key
    if key not in table:
        raise ConfigParse(f"Unknown {kind} '{key}', expected one of {sorted(table)}")
    return table[key]


def _predicted(refinements: Sequence[float], lowers: Sequence[float], uppers: Sequence[float]) -> Verdict:
    return classify_trajectory(refinements, lowers, uppers).verdict


def _schedule(start: int, factor: int, levels: int) -> List[int]:
    return [start * factor ** j for j in range(levels)]


# Weighted exponentials g(x) e^{2 pi i n b x} on (0, 1)

def _frequencies(n_x: int, b: float) -> np.ndarray:
    count = max(int(round(n_x / b)), n_x)
    return np.arange(count) - count // 2


def exponential_level(g: Symbol, b: float, n_x: int) -> VectorFamily:
    """
    Ambient coordinates are sqrt(h) f(x_j) at the cell midpoints, so the
    Euclidean norm is the midpoint rule for the L^2 norm
    """
    grid = MeasureGrid.midpoint(n_x)
    x = np.asarray(grid.points)
    h = 1.0 / n_x
    n = _frequencies(n_x, b)
    b_eff = n_x / n.shape[0]
    vectors = np.sqrt(h) * g(x)[None, :] * np.exp(2j * np.pi * b_eff * np.outer(n, x))
    return VectorFamily(MeasureGrid.counting(n.tolist()), vectors, AmbientSpace(n_x))


def effective_b(n_x: int, b: float) -> float:
    return n_x / _frequencies(n_x, b).shape[0]


def weighted_exponentials(g: Union[str, Symbol] = "one", b: float = 1.0, n_x: int = 16, levels: int = 5) -> GalleryCase:
    """
    T is multiplication by |g|^2 / b at the grid nodes
    """
    if not 0.0 < b <= 1.0:
        raise InvalidB(f"b must lie in (0, 1], got {b}")
    symbol = _lookup(EXPONENTIAL_SYMBOLS, g, "exponential symbol")

    sizes = _schedule(n_x, 2, levels)
    families, lowers, uppers = [], [], []
    for size in sizes:
        b_eff = effective_b(size, b)
        if abs(b_eff - b) > 1e-12:
            logger.warning(f"N_x = {size}: using b = {b_eff:.6g} instead of {b:g}")
        values = np.abs(symbol(np.asarray(MeasureGrid.midpoint(size).points))) ** 2 / b_eff
        lowers.append(float(values.min()))
        uppers.append(float(values.max()))
        families.append(exponential_level(symbol, b, size))

    return GalleryCase(
        name="exp",
        params={"g": g if isinstance(g, str) else getattr(g, "__name__", "custom"), "b": b, "n_x": n_x, "levels": levels},
        scan=TruncationScan(tuple(families), tuple(float(s) for s in sizes)),
        predicted=_predicted(sizes, lowers, uppers),
        predicted_operator="multiplication by |g|^2/b",
        note="lower semi-frame iff g is bounded away from zero",
        evidence={"b_eff": [effective_b(s, b) for s in sizes]},
    )


def exponential_power_symbol(g: Union[str, Symbol], b: float, k: float) -> Symbol:
    """
    Symbol of T^{-k} applied to the exponential family: g (b/|g|^2)^k
    """
    symbol = _lookup(EXPONENTIAL_SYMBOLS, g, "exponential symbol")
    return lambda x: symbol(x) * (b / np.abs(symbol(x)) ** 2) ** k


def symbol_error(g: Union[str, Symbol], b: float, n_x: int) -> Dict[str, float]:
    """
    Node deviation of T from |g|^2/b, and the midpoint error of the energy
    of f(x) = x against an adaptive quadrature of the continuum integral
    """
    symbol = _lookup(EXPONENTIAL_SYMBOLS, g, "exponential symbol")
    family = exponential_level(symbol, b, n_x)
    b_eff = effective_b(n_x, b)
    x = np.asarray(MeasureGrid.midpoint(n_x).points)

    expected = np.abs(symbol(x)) ** 2 / b_eff
    s = frame_operator(family).matrix
    node_deviation = float(np.max(np.abs(s - np.diag(expected))) / np.max(expected))

    probe = np.sqrt(1.0 / n_x) * x
    continuum, _ = integrate.quad(lambda t: float(np.abs(symbol(np.array(t))) ** 2) * t * t / b_eff, 0.0, 1.0, limit=200)
    energy_error = abs(family.energy(probe) - continuum)
    return {"node_deviation": node_deviation, "energy_error": float(energy_error)}


# Discrete reproducing-kernel model

def rkhs_level(weight: Symbol, n: int, n_x: int):
    grid = MeasureGrid.midpoint(n_x)
    x = np.asarray(grid.points)
    m = weight(x)
    if np.any(m <= 1.0):
        raise WeightBelowOne(f"Weight must exceed 1 everywhere, min is {m.min():.6g}")
    kernel = np.diag(1.0 / np.sqrt(grid.weights)).astype(complex)
    phi = VectorFamily(grid, kernel * (m ** n)[:, None], AmbientSpace(n_x))
    psi = VectorFamily(grid, kernel * (m ** (-n))[:, None], AmbientSpace(n_x))
    return phi, psi, m


def rkhs_scale(mweight: Union[str, Symbol] = "linear", n: int = 1, n_x: int = 8, levels: int = 4) -> GalleryCase:
    """
    phi_x = k_x m(x)^n, psi_x = k_x m(x)^-n; T is multiplication by m^{2n}
    """
    weight = _lookup(RKHS_WEIGHTS, mweight, "RKHS weight")
    sizes = _schedule(n_x, 2, levels)
    families, lowers, uppers = [], [], []
    psi = None
    for size in sizes:
        phi, psi, m = rkhs_level(weight, n, size)
        families.append(phi)
        lowers.append(float(np.min(m ** (2 * n))))
        uppers.append(float(np.max(m ** (2 * n))))

    return GalleryCase(
        name="rkhs",
        params={"mweight": mweight if isinstance(mweight, str) else "custom", "n": n, "n_x": n_x, "levels": levels},
        scan=TruncationScan(tuple(families), tuple(float(s) for s in sizes)),
        predicted=_predicted(sizes, lowers, uppers),
        predicted_operator="multiplication by m^{2n}",
        note="(psi, phi) is a reproducing pair with S_{psi,phi} = I",
        companion=psi,
    )


# Spherical wavelets through their Fourier symbol

def spherical_level(symbol: Symbol, degree: int) -> VectorFamily:
    l = np.arange(degree + 1, dtype=float)
    s = np.asarray(symbol(l), dtype=float)
    if np.any(~np.isfinite(s)) or np.any(s <= 0):
        raise NonpositiveSymbol(f"Symbol must be positive, got min {np.nanmin(s):.6g}")
    diagonal = np.repeat(s, 2 * np.arange(degree + 1) + 1)
    labels = [(int(j), int(k)) for j in range(degree + 1) for k in range(-j, j + 1)]
    return VectorFamily(MeasureGrid.counting(labels), np.diag(np.sqrt(diagonal)), AmbientSpace(len(labels)))


def spherical_symbol(s: Union[str, Symbol] = "const", degree: int = 2, levels: int = 5) -> GalleryCase:
    """
    S has eigenvalue s(l) with multiplicity 2l + 1
    """
    symbol = _lookup(SPHERICAL_SYMBOLS, s, "spherical symbol")
    degrees = _schedule(degree, 2, levels)
    families = [spherical_level(symbol, d) for d in degrees]
    values = [np.asarray(symbol(np.arange(d + 1, dtype=float)), dtype=float) for d in degrees]

    return GalleryCase(
        name="spherical",
        params={"s": s if isinstance(s, str) else "custom", "degree": degree, "levels": levels},
        scan=TruncationScan(tuple(families), tuple(float(d) for d in degrees)),
        predicted=_predicted(degrees, [v.min() for v in values], [v.max() for v in values]),
        predicted_operator="Fourier multiplier s(l)",
        note="frame iff d <= s(l) <= c; proper lower semi-frame if s(l) grows without bound",
    )


# Diagonal sequences n^{p/2} e_n

DIAGONAL_SIZES = (3, 7, 16, 40, 100)


def diagonal_level(exponent: float, size: int) -> VectorFamily:
    n = np.arange(1, size + 1, dtype=float)
    return VectorFamily(MeasureGrid.counting(range(1, size + 1)), np.diag(n ** (exponent / 2.0)), AmbientSpace(size))


def diagonal_sequence(exponent: float = -2.0, levels: int = 5) -> GalleryCase:
    """
    phi_n = n^{p/2} e_n with S = diag(n^p)
    """
    sizes = list(DIAGONAL_SIZES[:levels]) if levels <= len(DIAGONAL_SIZES) else _schedule(3, 2, levels)
    spectra = [np.arange(1, s + 1, dtype=float) ** exponent for s in sizes]
    return GalleryCase(
        name="diagonal",
        params={"exponent": exponent, "levels": levels},
        scan=TruncationScan(tuple(diagonal_level(exponent, s) for s in sizes), tuple(float(s) for s in sizes)),
        predicted=_predicted(sizes, [v.min() for v in spectra], [v.max() for v in spectra]),
        predicted_operator="diag(n^p)",
    )


# Sequences that no metric operator can repair, and a rank-one Bessel family

PATHOLOGICAL_SIZES = (3, 11, 51, 251)


def _pathological_sizes(levels: int) -> List[int]:
    if levels <= len(PATHOLOGICAL_SIZES):
        return list(PATHOLOGICAL_SIZES[:levels])
    return [1 + 2 * 5 ** j for j in range(levels)]


def e1_plus_en_level(size: int) -> VectorFamily:
    vectors = np.zeros((size - 1, size), dtype=complex)
    vectors[:, 0] = 1.0
    vectors[np.arange(size - 1), np.arange(1, size)] = 1.0
    domain = DomainSubspace(np.eye(size, dtype=complex)[1:])
    return VectorFamily(MeasureGrid.counting(range(2, size + 1)), vectors, AmbientSpace(size), domain)


def en_from_2_level(size: int) -> VectorFamily:
    return VectorFamily(MeasureGrid.counting(range(2, size + 1)), np.eye(size, dtype=complex)[1:], AmbientSpace(size))


def rank_one_level(n_x: int, dim: int = 1, decay: float = 0.4) -> VectorFamily:
    grid = MeasureGrid.midpoint(n_x)
    a = np.asarray(grid.points) ** (-decay)
    vectors = np.zeros((n_x, dim), dtype=complex)
    vectors[:, 0] = a
    return VectorFamily(grid, vectors, AmbientSpace(dim))


def pathological_sequences(kind: str = "en_from_2", levels: int = 4, dim: int = 1) -> GalleryCase:
    if kind == "e1_plus_en":
        sizes = _pathological_sizes(levels)
        families = [e1_plus_en_level(s) for s in sizes]
        predicted, operator, clause = Verdict.NOT_TOTAL, "S = (N-1) e1 e1* + cross terms + I on {e1}^perp", "iii"
        note = "D(C_phi) = {e1}^perp is not dense"
    elif kind == "en_from_2":
        sizes = _pathological_sizes(levels)
        families = [en_from_2_level(s) for s in sizes]
        predicted, operator, clause = Verdict.NOT_TOTAL, "projection onto {e1}^perp", "ii"
        note = "Bessel sequence that is not total"
    elif kind == "rank_one_bessel":
        sizes = _schedule(16, 4, levels)
        families = [rank_one_level(s, dim) for s in sizes]
        forms = [float(np.sum(f.grid.weights * np.abs(f.vectors[:, 0]) ** 2)) for f in families]
        predicted = _predicted(sizes, [0.0 if dim > 1 else v for v in forms], forms)
        operator, clause = "sum_i w_i a_i^2 e1 e1*", ("iv" if dim == 1 else "ii")
        note = "bounded form with unbounded pointwise norms"
    else:
        raise ConfigParse(f"Unknown pathological kind '{kind}'")

    case = GalleryCase(
        name=kind,
        params={"levels": levels} if kind != "rank_one_bessel" else {"levels": levels, "dim": dim},
        scan=TruncationScan(tuple(families), tuple(float(s) for s in sizes)),
        predicted=predicted,
        predicted_operator=operator,
        note=note,
        predicted_clause=clause,
    )
    if kind == "rank_one_bessel":
        case.evidence["sup_norm"] = [f.sup_norm() for f in families]
    return case


@dataclass
class GalleryEntry:
    builder: Callable[..., GalleryCase]
    description: str
    defaults: Dict[str, ParamValue]


GALLERY: Dict[str, GalleryEntry] = {
    "exp": GalleryEntry(weighted_exponentials, "Weighted exponentials g(x)e^{2 pi i n b x} on (0,1)",
                        {"g": "one", "b": 1.0, "n_x": 16, "levels": 5}),
    "rkhs": GalleryEntry(rkhs_scale, "Discrete RKHS scale k_x m(x)^n", {"mweight": "linear", "n": 1, "n_x": 8, "levels": 4}),
    "spherical": GalleryEntry(spherical_symbol, "Spherical wavelets given by their symbol s(l)",
                              {"s": "const", "degree": 2, "levels": 5}),
    "diagonal": GalleryEntry(diagonal_sequence, "Diagonal sequence n^{p/2} e_n", {"exponent": -2.0, "levels": 5}),
    "e1_plus_en": GalleryEntry(lambda levels: pathological_sequences("e1_plus_en", levels),
                               "{e1 + en} with domain {e1}^perp", {"levels": 4}),
    "en_from_2": GalleryEntry(lambda levels: pathological_sequences("en_from_2", levels),
                              "{en} for n >= 2, Bessel but not total", {"levels": 4}),
    "rank_one_bessel": GalleryEntry(lambda levels, dim: pathological_sequences("rank_one_bessel", levels, dim),
                                    "Rank-one family a(x) e1 with a in L^2 but unbounded", {"levels": 4, "dim": 1}),
}


def _coerce(name: str, value: ParamValue, default: ParamValue) -> ParamValue:
    try:
        if isinstance(default, bool):
            return str(value).lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except (TypeError, ValueError):
        raise ConfigParse(f"Parameter '{name}' expects {type(default).__name__}, got {value!r}")
    return str(value)


def build_case(name: str, params: Optional[Dict[str, ParamValue]] = None, levels: Optional[int] = None) -> GalleryCase:
    if name not in GALLERY:
        raise UnknownGalleryCase(f"Unknown gallery case '{name}', expected one of {sorted(GALLERY)}")
    entry = GALLERY[name]
    merged = dict(entry.defaults)
    for key, value in (params or {}).items():
        if key not in entry.defaults:
            raise ConfigParse(f"Gallery case '{name}' has no parameter '{key}'")
        merged[key] = _coerce(key, value, entry.defaults[key])
    if levels is not None:
        merged["levels"] = int(levels)
    if merged["levels"] < 1:
        raise ConfigParse("levels must be at least 1")

    case = entry.builder(**merged)
    logger.info(f"Built gallery case {name} with {len(case.scan)} level(s), predicted {case.predicted.value}")
    return case
