"""
Steady-state entanglement in cascaded chiral-waveguide qubit chains.
"""
__version__ = "0.1.0"
