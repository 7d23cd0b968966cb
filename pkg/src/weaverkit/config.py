"""Numerical tolerances, work budgets and pipeline constants.

Everything lives at module level with the documented defaults. Functions
that need a knob accept it as a keyword argument defaulting to the value
here, so callers can override per call without global mutation.
"""

from __future__ import annotations

# linalg-core
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
JACOBI_REL_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

# poly-core
COEFF_ZERO_REL = 1e-13
GCD_REL_TOL = 1e-12
NEWTON_REL_STOP = 1e-13
NEWTON_MAX_ITER = 200

# mixed-char
POLARIZATION_BUDGET = 10**7  # k x k determinant evaluations
ENUMERATION_CAP = 10**6  # joint outcomes of a random model

# partitioner / paving / frames
BLOCK_ENUMERATION_CAP = 10**6  # r ** (unassigned indices)
SUBSET_UNIVERSE_CAP = 22  # 2 ** m subset tables
SUBMASK_PAIR_CAP = 3**13  # (U, T subset U) pairs for the disjoint convolution
BRUTE_FORCE_CAP = 10**6  # r ** m
MAX_BLOCKS = 64  # largest r a single greedy run may use
PARSEVAL_TOL = 1e-8
PROJECTION_TOL = 1e-8

# Feichtinger pipeline; the 0.92 threshold may be any number above 3/4.
VES_THRESHOLD = 0.92
RIESZ_LOWER_DIVISOR = 50.0

# certificates
CERT_SLACK = 1e-9


def ves_constants(threshold: float = VES_THRESHOLD) -> dict:
    """Derived constants of the two-Riesz-sequence split for a norm threshold."""
    delta = 1.0 - threshold
    bessel = 0.5 + (2.0 * delta) ** 0.5 + delta
    return {"threshold": threshold, "complement_delta": delta,
            "complement_bessel": bessel, "riesz_lower": 1.0 - bessel}
