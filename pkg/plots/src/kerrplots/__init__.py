"""Figure rendering for kerrmc CSV outputs."""

from .figures import (MissingColumnError, MissingInputError, RENDERERS,
                      read_table, render)

__version__ = "0.1.0"
