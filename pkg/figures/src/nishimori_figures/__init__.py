"""Publication-style figure rendering for nishimori sweep CSV artifacts."""

from .csvio import Table, read_table
from .render import FIGURES

__version__ = "0.1.0"

__all__ = ["FIGURES", "Table", "read_table", "__version__"]
