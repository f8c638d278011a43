"""Application version information."""

__version__ = "1.0.0"

# Written into every JSON report so archived runs stay attributable.
REPORT_GENERATOR = f"flatband-studio {__version__}"
