"""Chart renderer for lotzkit experiment summary CSVs."""

from .figures import FigureSpec, SummarySchemaError, build_figure, read_summary, render

__version__ = "0.1.0"
