"""Linear slices of quasifuchsian punctured-torus space.

Build groups from complex Fenchel-Nielsen data, classify Tr B windows with
a trace-tree discreteness oracle, and check the closed-form constants.
"""

__version__ = "0.1.0"

from .discreteness import (  # noqa: E402
    OracleBudget,
    OracleVerdict,
    Tag,
    TraceTriple,
    bq_search,
    markov_third_trace,
    probe,
)
from .raster import SliceSpec, flood_components, render  # noqa: E402

__all__ = [
    "OracleBudget",
    "OracleVerdict",
    "SliceSpec",
    "Tag",
    "TraceTriple",
    "bq_search",
    "flood_components",
    "markov_third_trace",
    "probe",
    "render",
]
