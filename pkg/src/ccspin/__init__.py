"""Central configurations, collision blow-up and the infinite-spin question."""

__version__ = "0.1.0"
