"""Decision-focused linear predictors scored by exact pessimistic regret."""

__version__ = "0.1.0"
