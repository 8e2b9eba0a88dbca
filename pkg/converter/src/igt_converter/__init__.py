"""Offline converters from upstream citation-dataset distributions to the
plain-text layout consumed by igt-lab (graph.txt / features.txt / labels.txt /
split_*.txt)."""

__version__ = "0.1.0"

from .planetoid import convert_planetoid
from .wikics import convert_wikics

__all__ = ["convert_planetoid", "convert_wikics", "__version__"]
