"""Publication-style figures from latticewalk CSV result files."""

__version__ = "0.1.0"

from .csvio import SCHEMAS, SchemaError, read_result_csv
from .figures import FigureSpec, render
