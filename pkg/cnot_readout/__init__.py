"""CNOT chain readout of a lossy photonic qubit.

Exact density-matrix evolution of five readout schemes, a Monte Carlo
oracle, closed-form baselines, sweeps and the break-even loss surface.
"""

__version__ = "1.0.0"
