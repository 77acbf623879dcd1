"""hsurf

Harmonic surfaces in R³ built from triples of meromorphic 1-forms: end typing,
period closing, evaluation, meshing and numerical verification.
"""

import os
from pathlib import Path

__version__ = "2026.10.0"
__author__ = "James Mineau"
__email__ = "James.Mineau@utah.edu"


def get_cache_dir(env_var: str = "HSURF_CACHE_DIR") -> Path:
    """Return the directory stored in *env_var*, raising a clear error if unset.

    Set the variable in your shell profile, e.g.::

        export HSURF_CACHE_DIR=/scratch/hsurf/cache
    """
    value = os.environ.get(env_var)
    if value is None:
        raise OSError(
            f"Environment variable '{env_var}' is not set. "
            f"Please set it to a writable cache directory before using this feature."
        )
    return Path(value)
