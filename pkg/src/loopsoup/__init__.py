"""Monte Carlo toolkit for Brownian loop, bubble and excursion measures.

The package implements composable conformal maps with exact derivatives,
discretized curves and unrooted loops, exact-in-law samplers for bridges,
half-plane and half-disk excursions, bubbles and the windowed loop measure,
half-plane capacity estimation, Poisson loop and bubble soups, and the
chronological discovery of soup loops along a capacity-parametrized curve,
together with the statistical harness that verifies the closed-form
identities tying these objects together.
"""

__version__ = "0.1.0"
