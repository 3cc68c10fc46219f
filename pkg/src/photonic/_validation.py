"""Small input-checking helpers used across modules."""

from __future__ import annotations

import numbers

import numpy as np

from .errors import StructuralError, ValidationError


def as_square_matrix(value, name: str, dtype=complex) -> np.ndarray:
    """Return ``value`` as a 2D square array or raise StructuralError."""
    arr = np.asarray(value, dtype=dtype)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise StructuralError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def as_real(value, name: str) -> float:
    """Return ``value`` as a finite float."""
    if isinstance(value, bool) or not isinstance(value, (numbers.Real, np.floating, np.integer)):
        raise ValidationError(f"{name} must be a real number, got {value!r}")
    out = float(value)
    if not np.isfinite(out):
        raise ValidationError(f"{name} must be finite, got {out}")
    return out


def require_positive(value, name: str) -> float:
    out = as_real(value, name)
    if out <= 0:
        raise ValidationError(f"{name} must be > 0, got {out}")
    return out


def require_nonnegative(value, name: str) -> float:
    out = as_real(value, name)
    if out < 0:
        raise ValidationError(f"{name} must be >= 0, got {out}")
    return out


def unitarity_defect(U: np.ndarray) -> float:
    """Max-norm distance of ``U U†`` from the identity."""
    return float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))


def require_unitary(U, name: str, tol: float = 1e-9) -> np.ndarray:
    arr = as_square_matrix(U, name)
    defect = unitarity_defect(arr)
    if defect > tol:
        raise ValidationError(f"{name} is not unitary (defect {defect:.3e} > {tol:.1e})")
    return arr


def require_mode_index(index, mode_count: int, name: str = "mode") -> int:
    if isinstance(index, bool) or not isinstance(index, (numbers.Integral, np.integer)):
        raise ValidationError(f"{name} must be an integer, got {index!r}")
    idx = int(index)
    if not 0 <= idx < mode_count:
        raise ValidationError(f"{name} index {idx} out of range for {mode_count} modes")
    return idx


def require_mode_pair(modes, mode_count: int) -> tuple[int, int]:
    try:
        i, j = modes
    except (TypeError, ValueError):
        raise ValidationError(f"modes must be a pair of indices, got {modes!r}") from None
    i = require_mode_index(i, mode_count, "first mode")
    j = require_mode_index(j, mode_count, "second mode")
    if i == j:
        raise ValidationError(f"mode pair must be distinct, got ({i}, {j})")
    return i, j


def frozen(arr: np.ndarray) -> np.ndarray:
    """Return a read-only copy of ``arr``."""
    out = np.array(arr, copy=True)
    out.flags.writeable = False
    return out
