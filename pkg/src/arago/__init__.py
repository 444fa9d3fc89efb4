"""Matter-wave diffraction toolkit.

Near-field Poisson (Arago) spot patterns behind spheres and discs, including
Casimir-Polder surface attraction, finite source size and velocity spread,
the classical-deflection counter-model, and a far-field grating-diffraction
feasibility calculus.

Units are SI throughout the computational core; particle masses cross the API
boundary in atomic mass units and polarizabilities as volumes in m^3 (Gaussian
convention), see `constants_units`.
"""

__version__ = "0.1.0"
