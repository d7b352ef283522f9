"""Self-organizing maps on arbitrary graph lattices.

Typical flow: load and clean a :class:`SampleTable`, standardize it, build a
:class:`MapTopology`, :func:`train` a map, derive macro-classes and measure
them with the quality module, then study class sequences over time with the
trajectory module.
"""

from .dataset import SampleTable, clean, load_samples, standardize
from .macroclass import hac, macro_from_components, macro_from_star
from .quality import quality_report
from .som import CodebookMap, TrainingConfig, assign, bmu, train
from .topology import MacroPartition, MapTopology, grid, star, strings

__all__ = [
    "SampleTable", "clean", "load_samples", "standardize",
    "hac", "macro_from_components", "macro_from_star",
    "quality_report",
    "CodebookMap", "TrainingConfig", "assign", "bmu", "train",
    "MacroPartition", "MapTopology", "grid", "star", "strings",
]
__version__ = "0.1.0"
