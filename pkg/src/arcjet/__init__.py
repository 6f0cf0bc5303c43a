"""arcjet: exact stratification of jet/arc fibers over ADE surface singularities."""

__version__ = "0.1.0"
