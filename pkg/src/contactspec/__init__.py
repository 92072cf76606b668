"""Spectral toolkit for subLaplacians on contact metric manifolds.

Layers, bottom up:

- ``heisenberg``: exact Heisenberg-group primitives (BCH product, dilations,
  Koranyi quasinorm) and the infinitesimal Schrodinger representation on
  truncated Hermite bases.
- ``transforms``: sampled convolution kernels, the group Fourier transform,
  Plancherel and inversion checks, and the Fock-Bargmann equivalence check.
- ``landau``: oscillator symbols, Landau projectors, Sylvester solvers
  (direct and contour), parity compression and spectral functional calculus.
- ``diffops`` / ``corrector``: difference operators on symbols and the
  first-order projector corrector with its compatibility diagnostics.
- ``contact``: concrete 3D contact models on the torus, Reeb fields and
  flows, Birkhoff averages, contact volumes.
- ``models``: magnetic Fourier-mode operators, the Heisenberg nilmanifold,
  spectrum assembly and Landau labelling.
- ``analysis``: eigenvalue counting, Weyl fits, Landau proportions, quantum
  variance, density-one extraction, Helffer-Sjostrand calculus.
- ``cli``: configuration, experiment orchestration and deterministic sweeps.
"""

__version__ = "0.1.0"
