"""Numerical core: kinematics, special functions, phase shifts, amplitudes and the radial oracle."""
