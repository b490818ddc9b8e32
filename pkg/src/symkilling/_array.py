"""Small helpers so tensor code runs on numpy arrays and on jax tracers alike."""
from __future__ import annotations

import numpy as np


def xp_of(*arrays):
    """Return ``jax.numpy`` if any argument is a jax array, else ``numpy``."""
    for a in arrays:
        mod = type(a).__module__
        if mod.startswith("jax") or mod.startswith("jaxlib"):
            import jax.numpy as jnp

            return jnp
    return np


def is_traced(*arrays) -> bool:
    return xp_of(*arrays) is not np


def maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0
