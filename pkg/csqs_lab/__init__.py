"""
csqs-lab - phase-space toolkit for the coherent superposed quantum state.

The state N(t·a + r·a†)|α⟩ is analysed through closed-form expressions for its
Wigner function, nonclassicality and non-Gaussianity measures and its evolution
under photon loss. Every closed form is paired with a truncated Fock-space oracle.
"""

__version__ = "0.1.0-alpha"
