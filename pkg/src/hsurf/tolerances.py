"""Numeric constants shared across hsurf."""

# --- Roots and poles ---
ROOT_TOL: float = 1e-10  # scaled by (1 + max |coeff|) for root coincidence
ROOT_CLUSTER_TOL: float = 1e-4  # companion eigenvalues closer than this (relative) form one cluster
NEWTON_MAX_ITER: int = 50

# --- Reduction ---
DEPENDENCE_TOL: float = 1e-9  # relative 2x2 real determinant tolerance
SERIES_ZERO_TOL: float = 1e-11  # relative size below which a Laurent coefficient is zero

# --- Residues and periods ---
RESIDUE_IMAG_TOL: float = 1e-9
PERIOD_TOL: float = 1e-9
QUAD_EPSABS: float = 1e-12
QUAD_EPSREL: float = 1e-10
QUAD_LIMIT: int = 2000  # subintervals; ~ depth 40 of adaptive bisection on fixtures
BISECT_XTOL: float = 1e-13

# --- Evaluation ---
REG_TOL: float = 1e-12  # scaled by (local |phi|)^2
DODGE_TOL: float = 1e-3
BRANCH_STEP: float = 0.25  # max relative change of w between tracking nodes

# --- Curvature integration ---
ANNULUS_RATIO: float = 1.2
INNER_RADIUS: float = 1e-4
OUTER_RADIUS: float = 1e4

# --- Verification ---
SYMMETRY_TOL: float = 1e-8
WITNESS_TOL: float = 1e-6  # relative to bbox diagonal
MOLLER_EPS: float = 1e-12  # relative to bbox diagonal
BVH_LEAF_SIZE: int = 8
