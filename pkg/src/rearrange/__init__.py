"""Exact and numeric toolkit for rearrangement set maps and their contractions.

Submodules:
    intervals     exact interval-union algebra (the 1-D set model)
    setmaps       1-D set maps, the dyadic polarization chain, checkers
    contractions  piecewise-linear and n-D contraction calculus
    ndsets        fibered and voxel n-D sets, ball tracking
    stepfuncs     step/grid functions and the layer-cake rearrangement bridge
    verify        the property suites behind `rearrange verify`
    cli           batch experiment commands
"""

__version__ = "0.1.0"
