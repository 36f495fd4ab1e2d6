"""Fixed-price bilateral trade: exact welfare computation, factor-revealing
bound programs, and quantile/order-statistic mechanism analysis."""

__version__ = "0.1.0"
