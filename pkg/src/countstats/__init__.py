"""Unified photon-counting and electron-transport statistics.

Lindblad models for a pulsed cavity-QED single-photon source and a double
quantum dot, their correlation and noise statistics, the extended
Leggett-Garg test, and a quantum-jump simulator with the time-adjusted
counting transformation.
"""

__version__ = "0.1.0"
