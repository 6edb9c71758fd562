"""Linear BV quantization at the chain level over the rationals."""

__version__ = "0.1.0"
