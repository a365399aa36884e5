"""Input validation and seeding helpers."""

import numbers
import zlib

import numpy as np

from .exceptions import InputError, ParameterError


def check_count(value, name, minimum=1):
    """Return ``value`` as an int, raising if it is not an integer >= minimum."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_bounds(h_min, h_max):
    """Validate a bounded-support magnitude interval ``0 < h_min < h_max < inf``."""
    h_min = float(h_min)
    h_max = float(h_max)
    if not (np.isfinite(h_min) and np.isfinite(h_max)):
        raise ParameterError("channel bounds must be finite")
    if h_min <= 0:
        raise ParameterError(f"h_min must be positive, got {h_min}")
    if h_max <= h_min:
        raise ParameterError(f"h_max must exceed h_min, got [{h_min}, {h_max}]")
    return h_min, h_max


def check_matrix(A, name="A", ndim=2):
    """Return ``A`` as a float array of the given rank with finite entries."""
    A = np.asarray(A, dtype=float)
    if A.ndim != ndim:
        raise InputError(f"{name} must be {ndim}-dimensional, got shape {A.shape}")
    if A.size == 0:
        raise InputError(f"{name} is empty")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


def as_diagonal(T, name="T"):
    """Accept a diagonal matrix or a 1-D diagonal and return the 1-D diagonal."""
    T = np.asarray(T, dtype=float)
    if T.ndim == 1:
        return T
    if T.ndim == 2 and T.shape[0] == T.shape[1]:
        if np.any(T - np.diag(np.diag(T))):
            raise InputError(f"{name} is not diagonal")
        return np.diag(T).copy()
    raise InputError(f"{name} must be a diagonal matrix or a vector, got shape {T.shape}")


def _key_word(key):
    if isinstance(key, str):
        return zlib.crc32(key.encode())
    return int(key)


def make_rng(seed, *keys):
    """Generator for ``seed`` split deterministically by the integer/str ``keys``.

    The same ``(seed, keys)`` always gives the same stream, and distinct keys
    give independent streams, so modules can draw without sharing state.
    """
    if isinstance(seed, np.random.Generator):
        if keys:
            raise ParameterError("keys cannot be applied to an existing Generator")
        return seed
    seed = check_count(seed, "seed", minimum=0)
    words = tuple(_key_word(k) for k in keys)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=words))


def bounded_draw(rng, size, h_min=0.5, h_max=2.0):
    """Magnitudes uniform on ``[h_min, h_max]`` with an independent fair sign."""
    mag = rng.uniform(h_min, h_max, size)
    sign = rng.choice(np.array([-1.0, 1.0]), size)
    return mag * sign
