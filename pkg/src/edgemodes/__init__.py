"""Majorana edge modes of a kicked Ising qubit chain.

Subpackages: core (types and Pauli algebra), freefermion (exact integrable
solution), statevector (dense many-body dynamics), spectroscopy (Fourier
analysis and envelope fits), lindblad (open-system engine), reconstruct
(edge-operator coefficient extraction), experiments (scenario runners),
cli (command line and result schema).
"""

__version__ = "0.1.0"
