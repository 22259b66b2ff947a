"""Numerics for 1-D periodic Schrodinger operators -y'' + Vy = Ey.

Floquet band structure, Lyapunov exponents, the integrated density of
states, and constructions of periodic potentials whose spectra are thin in
a fixed energy window uniformly over a compact coupling range.
"""

from .potential import (BlockLayout, Concatenation, Constant,
                        CosinePerturbation, CosineSeries, Potential, Samples,
                        concatenate_blocks, from_json, load_potential,
                        make_connector, to_json)
from .propagator import PropagationSettings, SL2Matrix, monodromy, transfer_matrix

__version__ = "0.1.0"
