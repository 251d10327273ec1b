"""Ground-state toolkit for a deep-strong-coupled qubit-resonator circuit
attached to a waveguide environment.

Subpackages:
  hilbert      truncated-Fock-space linear algebra
  rabi         qubit-resonator Hamiltonian and displaced-cat eigenstates
  environment  waveguide coupling spectrum and circuit conversion
  cvs          coherent variational ground state
  diag         exact diagonalization of the truncated total system
  metrology    Fisher-information diagnostics and Wigner functions
  config/runner/cli   configuration, sweep execution, CSV persistence
"""

from . import cvs, diag, environment, hilbert, metrology, rabi  # noqa: F401

__version__ = "0.1.0"
