"""evoscat: mine version-control histories into event logs and precompute
density-scatterplot layouts that scale to millions of events."""

__version__ = "0.1.0"
