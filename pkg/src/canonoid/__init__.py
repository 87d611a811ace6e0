"""Quantum and classical models built from fouled harmonic-oscillator Hamiltonians.

Submodules:
    special          Hermite, double-factorial ratios, Kummer M and U, Gauss-Hermite
    fock             truncated Fock-space operators and algebra checks
    jacobi           n-rep recursion, Jacobi matrix, self-adjoint extension spectra
    representations  q-rep and z-rep eigenfunctions and residuals
    classical        fouled Lagrangians/Hamiltonians, Poisson brackets, Ermakov
    cli              command-line front end
"""

__version__ = "0.1.0"
