"""Exception types shared across the package."""


class LoopSoupError(Exception):
    """Base class for all errors raised by this package."""


class OutOfDomain(LoopSoupError):
    """A point lies outside the validity region of a map primitive."""


class DegenerateDerivative(LoopSoupError):
    """Derivative magnitude below tolerance where a nonzero value is required."""


class EndpointMismatch(LoopSoupError):
    """Concatenation requires the first curve to end where the second starts."""


class PointNotOnLoop(LoopSoupError):
    """Requested re-rooting point is not within tolerance of any loop sample."""


class DegenerateGrid(LoopSoupError):
    """Grid step too coarse for the geometry being rasterized."""


class NonIntegrable(LoopSoupError):
    """Conformal time change blew up at an interior sample."""


class NonConvergent(LoopSoupError):
    """Series parameters violate the convergence preconditions."""


class WindowUnbounded(LoopSoupError):
    """Sampling requires a finite truncation window."""


class WindowTooSmall(LoopSoupError):
    """Doubling check detected that a truncation window clips the statistic."""


class BudgetExceeded(LoopSoupError):
    """A random walk exceeded its step budget."""


class TooFewSamples(LoopSoupError):
    """Statistical test invoked with fewer samples than it supports."""


class SparseTable(LoopSoupError):
    """Contingency table has expected cell counts below the chi-square floor."""


class ConfigError(LoopSoupError):
    """Invalid run configuration."""
