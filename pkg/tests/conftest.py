import os
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

# keep test runs out of the shared registry
os.environ.setdefault("RUNS_DATABASE_URL", "")

from igeom.gff import StepFunction, TriangulatedGrid  # noqa: E402
from igeom.gff.boundary import BoundaryTrace  # noqa: E402


@pytest.fixture
def small_grid() -> TriangulatedGrid:
    return TriangulatedGrid(9)


@pytest.fixture
def zero_boundary(small_grid: TriangulatedGrid) -> BoundaryTrace:
    return BoundaryTrace.constant(small_grid.boundary_indices(), 0.0)


@pytest.fixture
def symmetric_step() -> StepFunction:
    return StepFunction.two_sided(-1.0, 1.0)
