from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

RESULTS_DIR = "./evaluation/results"
CONFIG_DIR = "./evaluation/configs"
FAMILY_DIR = "./evaluation/families"

DEFAULT_SEED = 20240101
SEED_ENV_VAR = "SEMIFRAME_SEED"
RANDOM_PROBES = 32

TAU_HERM = 1e-10
TAU_ORTH = 1e-10
TAU_RECON = 1e-10
TAU_CALC = 1e-8
TAU_PSD = 1e-10
TAU_NULL = 1e-12
TAU_PARS = 1e-8
TAU_DUAL = 1e-8
TAU_K = 1e-12
TAU_SIM = 1e-9
TAU_SPECTRA = 1e-7
TAU_RANGE = 1e-8
TAU_SPAN = 1e-10
TAU_CERT = 1e-9

# Trajectory heuristics for limit statements over truncation scans.
MIN_SCAN_LEVELS = 4
DIVERGENCE_SLOPE = 0.5
DIVERGENCE_RATIO = 1e2
DECAY_SLOPE = -0.5
DECAY_RATIO = 1e1

ParamValue = Union[int, float, str]


@dataclass
class RunConfig:
    """
    Configuration for a single CLI run
    """
    case: Optional[str] = None
    params: Dict[str, ParamValue] = field(default_factory=dict)
    family: Optional[str] = None
    levels: Optional[int] = None
    k_grid: Tuple[float, ...] = ()
    m_grid: Tuple[float, ...] = ()
    fn_pairs: Tuple[Tuple[str, str], ...] = ()
    seed: int = DEFAULT_SEED
    output_dir: str = RESULTS_DIR

    def echo(self) -> Dict:
        return {
            "case": self.case,
            "params": dict(self.params),
            "family": self.family,
            "levels": self.levels,
            "k_grid": list(self.k_grid),
            "m_grid": list(self.m_grid),
            "fn_pairs": [list(pair) for pair in self.fn_pairs],
            "seed": self.seed,
            "output_dir": self.output_dir,
        }
