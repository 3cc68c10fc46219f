"""Polarization correlations of photon pairs and the CHSH combination.

Polarizer settings are unit vectors ``a`` on the Poincare sphere.  The
measurement ``a . sigma`` has eigenvalues +1 and -1, and the ``sigma_z``
eigenstates are the polarization basis ``{+, -}``.  Two-photon states are
4x4 density matrices in the basis ``|++>, |+->, |-+>, |-->``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import frozen
from .errors import StructuralError, ValidationError

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# CHSH sign patterns: index k carries the minus sign on term k of
# (D(a1,a2), D(a1,a2'), D(a1',a2), D(a1',a2')).
SIGN_PATTERNS = (
    (-1, 1, 1, 1),
    (1, -1, 1, 1),
    (1, 1, -1, 1),
    (1, 1, 1, -1),
)
STANDARD_PATTERN = 3


@dataclass(frozen=True)
class PolarizerSetting:
    """Unit vector on the Poincare sphere."""

    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if v.shape != (3,):
            raise StructuralError(f"setting must be a 3-vector, got shape {v.shape}")
        if abs(np.linalg.norm(v) - 1) > 1e-12:
            raise ValidationError(f"setting must have unit length, got norm {np.linalg.norm(v):.15g}")
        object.__setattr__(self, "vector", frozen(v))

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0) -> "PolarizerSetting":
        """Spherical angles: polar ``theta`` from +z, azimuth ``phi`` from +x."""
        v = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
        return cls(v / np.linalg.norm(v))

    @classmethod
    def from_direction(cls, v) -> "PolarizerSetting":
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValidationError("direction must be nonzero")
        return cls(v / n)

    def operator(self) -> np.ndarray:
        return sum(c * s for c, s in zip(self.vector, PAULI))

    def angles(self) -> tuple[float, float]:
        x, y, z = self.vector
        return math.acos(max(-1.0, min(1.0, z))), math.atan2(y, x)


def _as_setting(a) -> PolarizerSetting:
    return a if isinstance(a, PolarizerSetting) else PolarizerSetting.from_direction(a)


@dataclass(frozen=True)
class TwoQubitPolarizationState:
    """Density matrix over ``{+,-} x {+,-}``."""

    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=complex)
        if rho.shape != (4, 4):
            raise StructuralError(f"density matrix must be 4x4, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-10:
            raise ValidationError(f"density matrix trace is {np.trace(rho).real:.12g}, not 1")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
            raise ValidationError("density matrix is not positive semidefinite")
        object.__setattr__(self, "density", frozen(rho))

    @classmethod
    def from_vector(cls, psi) -> "TwoQubitPolarizationState":
        psi = np.asarray(psi, dtype=complex).reshape(4)
        n = np.linalg.norm(psi)
        if n == 0:
            raise ValidationError("state vector is zero")
        psi = psi / n
        return cls(np.outer(psi, psi.conj()))

    def reduced(self, which: int) -> np.ndarray:
        """Single-photon density matrix of photon ``which`` (0 or 1)."""
        r = self.density.reshape(2, 2, 2, 2)
        if which == 0:
            return np.einsum("ijkj->ik", r)
        if which == 1:
            return np.einsum("ijil->jl", r)
        raise ValidationError(f"which must be 0 or 1, got {which}")

    def fidelity(self, psi) -> float:
        """``<psi| rho |psi>`` for a normalized pure target."""
        psi = np.asarray(psi, dtype=complex).reshape(4)
        psi = psi / np.linalg.norm(psi)
        return float(np.real(psi.conj() @ self.density @ psi))


def singlet() -> TwoQubitPolarizationState:
    """``(|+-> - |-+>)/sqrt 2``."""
    return TwoQubitPolarizationState.from_vector([0, 1, -1, 0])


def singlet_vector() -> np.ndarray:
    return np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)


def product_state(psi1, psi2) -> TwoQubitPolarizationState:
    return TwoQubitPolarizationState.from_vector(np.kron(np.asarray(psi1, complex), np.asarray(psi2, complex)))


def maximally_mixed() -> TwoQubitPolarizationState:
    return TwoQubitPolarizationState(np.eye(4) / 4)


def werner(p: float) -> TwoQubitPolarizationState:
    """``p * singlet + (1 - p) I/4``."""
    if not 0 <= p <= 1:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    return TwoQubitPolarizationState(p * singlet().density + (1 - p) * np.eye(4) / 4)


def correlation_matrix(state: TwoQubitPolarizationState) -> np.ndarray:
    """``T_ij = tr(rho sigma_i x sigma_j)``; the correlator is ``a1 . T a2``."""
    if not isinstance(state, TwoQubitPolarizationState):
        raise ValidationError("expected a TwoQubitPolarizationState")
    rho = state.density
    return np.array([[np.real(np.trace(rho @ np.kron(si, sj))) for sj in PAULI] for si in PAULI])


def correlator(state: TwoQubitPolarizationState, a1, a2) -> float:
    """``D = tr(rho (a1 . sigma) x (a2 . sigma))``."""
    if not isinstance(state, TwoQubitPolarizationState):
        raise ValidationError("expected a TwoQubitPolarizationState")
    op = np.kron(_as_setting(a1).operator(), _as_setting(a2).operator())
    return float(np.real(np.trace(state.density @ op)))


def chsh(state: TwoQubitPolarizationState, a1, a2, a1p, a2p) -> float:
    """``D(a1,a2) + D(a1,a2') + D(a1',a2) - D(a1',a2')``."""
    return chsh_patterns(state, a1, a2, a1p, a2p)[STANDARD_PATTERN]


def chsh_patterns(state: TwoQubitPolarizationState, a1, a2, a1p, a2p) -> tuple[float, float, float, float]:
    """The CHSH combination for each of the four sign placements (see ``SIGN_PATTERNS``)."""
    terms = (
        correlator(state, a1, a2),
        correlator(state, a1, a2p),
        correlator(state, a1p, a2),
        correlator(state, a1p, a2p),
    )
    return tuple(float(np.dot(signs, terms)) for signs in SIGN_PATTERNS)


class ChshOptimum(NamedTuple):
    settings: tuple[PolarizerSetting, PolarizerSetting, PolarizerSetting, PolarizerSetting]
    value: float
    pattern: int


def _unit(v: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n if n > 1e-300 else fallback


def _ascend(T: np.ndarray, signs, start: np.ndarray, max_sweeps: int = 1000) -> tuple[np.ndarray, float]:
    """Coordinate ascent over the four settings; each step is an exact maximization.

    With the correlator bilinear, ``a1 . T a2``, the best single setting given
    the other three is the normalized vector it is dotted with.
    """
    x, y, xp, yp = (v.copy() for v in start)
    s0, s1, s2, s3 = signs
    value = -np.inf
    for _ in range(max_sweeps):
        x = _unit(T @ (s0 * y + s1 * yp), x)
        xp = _unit(T @ (s2 * y + s3 * yp), xp)
        y = _unit(T.T @ (s0 * x + s2 * xp), y)
        yp = _unit(T.T @ (s1 * x + s3 * xp), yp)
        new = s0 * x @ T @ y + s1 * x @ T @ yp + s2 * xp @ T @ y + s3 * xp @ T @ yp
        if new - value <= 1e-15:
            value = max(value, new)
            break
        value = new
    return np.array([x, y, xp, yp]), float(value)


def chsh_maximize(state: TwoQubitPolarizationState, restarts: int = 3, seed: int = 0) -> ChshOptimum:
    """Search all settings for the largest CHSH value over the four sign patterns.

    Coordinate ascent over the four settings, ``restarts`` random starts per
    pattern from a seeded generator.  The relabelings ``a2 <-> a2'`` and
    ``a1 <-> a1'`` map the patterns onto each other, so all four share the
    same optimum; ties resolve to the standard pattern (minus on the
    ``(a1', a2')`` term).

    Returns:
        ChshOptimum with settings ``(a1, a2, a1', a2')``, the value, and the
        index into ``SIGN_PATTERNS`` that attained it.
    """
    T = correlation_matrix(state)
    rng = np.random.default_rng(seed)
    best = None
    for pattern in (STANDARD_PATTERN, 0, 1, 2):
        for _ in range(restarts):
            start = rng.normal(size=(4, 3))
            start /= np.linalg.norm(start, axis=1, keepdims=True)
            vecs, value = _ascend(T, SIGN_PATTERNS[pattern], start)
            if best is None or value > best[1] + 1e-13:
                best = (vecs, value, pattern)
    vecs, value, pattern = best
    settings = tuple(PolarizerSetting.from_direction(v) for v in vecs)
    exact = chsh_patterns(state, *settings)[pattern]
    return ChshOptimum(settings, exact, pattern)


def horodecki_bound(state: TwoQubitPolarizationState) -> float:
    """Closed-form CHSH maximum ``2 sqrt(m1 + m2)`` from the two largest squared singular values of T."""
    sv = np.linalg.svd(correlation_matrix(state), compute_uv=False)
    return 2 * math.sqrt(sv[0] ** 2 + sv[1] ** 2)
