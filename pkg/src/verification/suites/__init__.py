from typing import Dict, Type

from .base import InvariantCheck, InvariantSuite, SuiteResult
from .frames_suite import FramesSuite
from .gallery_suite import GallerySuite
from .genframe_suite import GenFrameSuite
from .hilbert_suite import HilbertSuite
from .lattice_suite import LatticeSuite
from .transforms_suite import TransformsSuite

SUITES: Dict[str, Type[InvariantSuite]] = {
    suite.module: suite
    for suite in (HilbertSuite, FramesSuite, GenFrameSuite, TransformsSuite, LatticeSuite, GallerySuite)
}
