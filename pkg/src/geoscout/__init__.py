"""Context-free interest detection and guided approach for a simulated camera."""

__version__ = "0.1.0"
