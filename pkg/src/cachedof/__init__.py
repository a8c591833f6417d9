"""Cache-aided interference management: scheme construction, verification,
and zero-forcing delivery simulation over a complex AWGN channel."""

__version__ = "0.1.0"
