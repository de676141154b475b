"""Static figures from robust-langevin benchmark CSVs.

This package never recomputes metrics; it only aggregates and draws what the
harness wrote. Every figure gets a small data sidecar CSV holding exactly the
points drawn, so re-running on the same input is bit-identical on the sidecar.
"""

from .sweep import PlotSpec, PlotError, plot_sweep
from .loglik import plot_loglik_profile

__all__ = ["PlotSpec", "PlotError", "plot_sweep", "plot_loglik_profile"]
__version__ = "0.1.0"
