"""descentlab: exact 2-descent and rational-point verification for the genus-2 family
y^2 = x(x^2 + 2^i p^j)(x^2 + 2^(i+1) p^j)."""

__version__ = "0.1.0"
