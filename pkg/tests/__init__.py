"""Tests for the CNOT readout package."""
