"""Discrete Gaussian free fields on triangulated square grids."""

from .boundary import BoundaryTrace, StepFunction, step_from_pairs
from .conformal import SquareMap, pullback_boundary_data, square_map
from .dirichlet import (
    GFF_SCALE,
    DirichletForm,
    SamplerMethod,
    dirichlet_form,
    harmonic_extension,
    sample_field,
    sample_zero_boundary_gff,
    spectral_sample,
)
from .grid import DiscreteField, TrianglePick, TriangulatedGrid, eval_pl, locate_triangle
from .io import read_boundary_arcs, read_field, write_boundary_arcs, write_field
from .markov import MarkovDecomposition, gaussian_conditioning, markov_decomposition
from .winding import WindingRecord, flow_line_heights, winding_boundary_value

__all__ = [
    "GFF_SCALE",
    "BoundaryTrace",
    "DirichletForm",
    "DiscreteField",
    "MarkovDecomposition",
    "SamplerMethod",
    "SquareMap",
    "StepFunction",
    "TrianglePick",
    "TriangulatedGrid",
    "WindingRecord",
    "dirichlet_form",
    "eval_pl",
    "flow_line_heights",
    "gaussian_conditioning",
    "harmonic_extension",
    "locate_triangle",
    "markov_decomposition",
    "pullback_boundary_data",
    "read_boundary_arcs",
    "read_field",
    "sample_field",
    "sample_zero_boundary_gff",
    "spectral_sample",
    "square_map",
    "step_from_pairs",
    "winding_boundary_value",
    "write_boundary_arcs",
    "write_field",
]
