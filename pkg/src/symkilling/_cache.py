"""Opt-in persistent cache for compiled jax kernels (compile time dominates short runs)."""
from __future__ import annotations

import os

import jax

_DONE = False


def enable_compilation_cache(path: str | None = None) -> str | None:
    """Turn on jax's on-disk compilation cache; ``SYMKILLING_JAX_CACHE=off`` disables it."""
    global _DONE
    env = os.environ.get("SYMKILLING_JAX_CACHE")
    if env == "off":
        return None
    path = path or env or os.path.join(os.path.expanduser("~"), ".cache", "symkilling", "jax")
    if not _DONE:
        os.makedirs(path, exist_ok=True)
        jax.config.update("jax_compilation_cache_dir", path)
        jax.config.update("jax_persistent_cache_min_compile_time_secs", 0.5)
        _DONE = True
    return path
