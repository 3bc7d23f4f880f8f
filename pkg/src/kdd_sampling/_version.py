"""Version information for kdd-sampling."""

__version__ = "0.1.0"
