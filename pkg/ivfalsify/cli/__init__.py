"""
Command-line front end: `ivfalsify falsify-unconditional | falsify-conditional | falsify-discrete | simulate`.

Exit status 0 means the model was not rejected, 1 that it was rejected and 2 a usage or data error.
"""

from .config import CliMethod, ConditionalMode, Dichotomize, OutputFormat, RunConfig, Subcommand
from .main import EXIT_ERROR, EXIT_NOT_REJECTED, EXIT_REJECTED, build_parser, main, run

__all__ = [
    "EXIT_ERROR",
    "EXIT_NOT_REJECTED",
    "EXIT_REJECTED",
    "CliMethod",
    "ConditionalMode",
    "Dichotomize",
    "OutputFormat",
    "RunConfig",
    "Subcommand",
    "build_parser",
    "main",
    "run",
]
