"""Space-time Chebyshev collocation for the 3-D Maxwell system."""
__version__ = "0.1.0"
