"""Residue cocycles of spectral triples and their quantum double suspensions.

Finite truncations of the circle, the round two-sphere and the noncommutative
torus; heat-trace expansions and zeta residues; the suspension transfer
formulas; and exact combinatorics of the local index cocycle.
"""

from __future__ import annotations

from .errors import ConfigError, FitError, PreconditionError, QdsError, TruncationMismatch, WindowError
from .operators import DiracData, Grading, HilbertTruncation, Op, SpectralTriple
from .residues import ResidueReport, zeta_at_zero, zeta_residue
from .series import AsymptoticSeries, FitConfig, Growth

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSeries",
    "ConfigError",
    "DiracData",
    "FitConfig",
    "FitError",
    "Grading",
    "Growth",
    "HilbertTruncation",
    "Op",
    "PreconditionError",
    "QdsError",
    "ResidueReport",
    "SpectralTriple",
    "TruncationMismatch",
    "WindowError",
    "zeta_at_zero",
    "zeta_residue",
]
