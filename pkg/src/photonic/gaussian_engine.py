"""Gaussian states described by quadrature means and covariances.

Quadratures are ``q = (a + a^+)/sqrt 2`` and ``p = i (a^+ - a)/sqrt 2``,
interleaved as ``(q_1, p_1, ..., q_M, p_M)``.  The vacuum has variance 1/2
in every quadrature and Wigner function ``exp(-q^2 - p^2)/pi``.  A mode
transform acts on the Wigner function like a linear change of variables of a
classical probability density, so means and covariances transform with a
real symplectic matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._validation import as_real, frozen, require_mode_index, require_nonnegative
from .errors import StructuralError, ValidationError
from .fock_engine import quadrature_basis
from .mode_core import ModeTransform

VACUUM_VARIANCE = 0.5
UNCERTAINTY_TOL = 1e-10


def symplectic_form(M: int) -> np.ndarray:
    """``J`` with ``[x_i, x_j] = i J_ij`` for interleaved quadratures."""
    return np.kron(np.eye(M), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Williamson normal-mode variances of a covariance matrix, ascending."""
    M = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(M) @ cov))
    return np.sort(ev)[::2]


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of an ``M``-mode Gaussian state.

    Args:
        mean: real vector of length ``2M``.
        cov: real symmetric ``2M x 2M`` covariance.
        check: verify positivity and the uncertainty bound.
    """

    mean: np.ndarray
    cov: np.ndarray
    check: bool = True

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if mean.size % 2 or mean.size == 0:
            raise StructuralError(f"mean must have positive even length, got {mean.size}")
        if cov.shape != (mean.size, mean.size):
            raise StructuralError(f"covariance shape {cov.shape} does not match mean length {mean.size}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValidationError("mean and covariance must be finite")
        if np.max(np.abs(cov - cov.T)) > 1e-10 * max(1.0, np.max(np.abs(cov))):
            raise ValidationError("covariance must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if self.check:
            if np.min(np.linalg.eigvalsh(cov)) <= 0:
                raise ValidationError("covariance must be positive definite")
            nu = symplectic_eigenvalues(cov)
            if nu[0] < VACUUM_VARIANCE - UNCERTAINTY_TOL * max(1.0, float(np.max(nu))):
                raise ValidationError(f"uncertainty bound violated: smallest symplectic eigenvalue {nu[0]:.12g} < 1/2")
        object.__setattr__(self, "mean", frozen(mean))
        object.__setattr__(self, "cov", frozen(cov))

    @property
    def mode_count(self) -> int:
        return self.mean.size // 2

    def to_json(self) -> dict:
        return {"modes": self.mode_count, "mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "GaussianState":
        try:
            out = cls(data["mean"], data["cov"])
            M = int(data["modes"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed GaussianState JSON: {exc}") from None
        if out.mode_count != M:
            raise StructuralError(f"'modes' is {M} but mean has {out.mode_count} modes")
        return out

    def photon_numbers(self) -> np.ndarray:
        """``<n_k> = (var q + var p + mean_q^2 + mean_p^2 - 1)/2`` per mode."""
        d = np.diag(self.cov)
        m2 = self.mean ** 2
        return 0.5 * (d[0::2] + d[1::2] + m2[0::2] + m2[1::2] - 1.0)

    def amplitudes(self) -> np.ndarray:
        """Coherent amplitudes ``alpha_k = (q_k + i p_k)/sqrt 2`` of the mean."""
        return (self.mean[0::2] + 1j * self.mean[1::2]) / math.sqrt(2)


def vacuum(M: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * M), VACUUM_VARIANCE * np.eye(2 * M))


def coherent(amplitudes: Sequence[complex]) -> GaussianState:
    """Product of coherent states with the given complex amplitudes."""
    alpha = np.atleast_1d(np.asarray(amplitudes, dtype=complex))
    if alpha.ndim != 1 or alpha.size == 0:
        raise ValidationError("amplitudes must be a nonempty list")
    mean = np.empty(2 * alpha.size)
    mean[0::2] = math.sqrt(2) * alpha.real
    mean[1::2] = math.sqrt(2) * alpha.imag
    return GaussianState(mean, VACUUM_VARIANCE * np.eye(2 * alpha.size))


def thermal(N: float | Sequence[float]) -> GaussianState:
    """Thermal state(s) with mean occupation ``N``; variance ``(2N+1)/2``."""
    Ns = np.atleast_1d(np.asarray(N, dtype=float))
    for n in Ns:
        require_nonnegative(float(n), "N")
    var = np.repeat(Ns + 0.5, 2)
    return GaussianState(np.zeros(2 * Ns.size), np.diag(var))


def squeezed_thermal(N: float, r: float, angle: float = 0.0) -> GaussianState:
    """Thermal state squeezed by ``r``: variances ``(2N+1)/2 * e^{-+2r}`` along the rotated axes."""
    N = require_nonnegative(N, "N")
    r = as_real(r, "r")
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s], [s, c]])
    cov = (N + 0.5) * R @ np.diag([math.exp(-2 * r), math.exp(2 * r)]) @ R.T
    return GaussianState(np.zeros(2), cov)


def product(*states: GaussianState) -> GaussianState:
    """Tensor product; modes are concatenated in argument order."""
    if not states:
        raise ValidationError("need at least one state")
    mean = np.concatenate([s.mean for s in states])
    n = mean.size
    cov = np.zeros((n, n))
    k = 0
    for s in states:
        d = s.mean.size
        cov[k:k + d, k:k + d] = s.cov
        k += d
    return GaussianState(mean, cov)


def quadrature_symplectic(S: ModeTransform) -> np.ndarray:
    """Real matrix ``M_S = Omega S Omega^-1`` acting on interleaved quadratures."""
    Omega = quadrature_basis(S.mode_count)
    M = Omega @ S.full() @ np.linalg.inv(Omega)
    if np.max(np.abs(M.imag)) > 1e-9 * max(1.0, np.max(np.abs(M))):
        raise ValidationError("transform does not map Hermitian quadratures to Hermitian quadratures")
    return M.real


def transform(state: GaussianState, S: ModeTransform) -> GaussianState:
    """Propagate a state through a mode transform."""
    if S.mode_count != state.mode_count:
        raise StructuralError(f"transform has {S.mode_count} modes, state has {state.mode_count}")
    M = quadrature_symplectic(S)
    return GaussianState(M @ state.mean, M @ state.cov @ M.T)


def tmsv_gaussian(zeta: float) -> GaussianState:
    """Two-mode squeezed vacuum.

    In the combination variables ``(q1 -+ q2)/sqrt 2`` the variances are
    ``e^{-+2 zeta}/2``, so ``var(q1 - q2) = var(p1 + p2) = e^{-2 zeta}``.
    """
    zeta = as_real(zeta, "zeta")
    ch, sh = math.cosh(2 * zeta), math.sinh(2 * zeta)
    cov = 0.5 * np.array([
        [ch, 0, sh, 0],
        [0, ch, 0, -sh],
        [sh, 0, ch, 0],
        [0, -sh, 0, ch],
    ])
    return GaussianState(np.zeros(4), cov)


def reduce(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Marginal state of the modes in ``keep`` (in the given order)."""
    keep = [require_mode_index(k, state.mode_count, "kept mode") for k in keep]
    if not keep:
        raise ValidationError("keep must name at least one mode")
    if len(set(keep)) != len(keep):
        raise ValidationError(f"kept modes must be distinct, got {keep}")
    idx = np.array([[2 * k, 2 * k + 1] for k in keep]).reshape(-1)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def purity(state: GaussianState) -> float:
    """``tr rho^2 = (1/2)^M / sqrt(det cov)``."""
    det = np.linalg.det(state.cov)
    if det <= 0:
        raise ValidationError("covariance must be positive definite")
    return float(VACUUM_VARIANCE ** state.mode_count / math.sqrt(det))


def wigner_eval(state: GaussianState, point) -> float | np.ndarray:
    """Wigner function at a point, or at each row of an ``(n, 2M)`` array."""
    x = np.asarray(point, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != state.mean.size:
        raise StructuralError(f"points must have length {state.mean.size}, got {x.shape[1]}")
    d = x - state.mean
    inv = np.linalg.inv(state.cov)
    expo = -0.5 * np.einsum("ni,ij,nj->n", d, inv, d)
    norm = (2 * math.pi) ** state.mode_count * math.sqrt(np.linalg.det(state.cov))
    out = np.exp(expo) / norm
    return float(out[0]) if single else out


def thermal_temperature(N: float, omega: float) -> float:
    """Temperature (units with hbar = k_B = 1) at which a mode of frequency ``omega`` holds ``N`` photons."""
    N = require_nonnegative(N, "N")
    if N == 0:
        return 0.0
    return float(omega / math.log1p(1.0 / N))


def tmsv_temperature(zeta: float, omega: float) -> float:
    """Temperature of either half of a two-mode squeezed vacuum: ``omega / (2 ln coth zeta)``."""
    zeta = abs(as_real(zeta, "zeta"))
    if zeta == 0:
        return 0.0
    return float(omega / (2 * math.log(1 / math.tanh(zeta))))
