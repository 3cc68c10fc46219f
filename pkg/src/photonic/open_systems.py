"""Absorption and amplification of a single mode.

A mode coupled to a reservoir with absorption rate ``gamma1`` and emission
rate ``gamma2`` evolves, in the Wigner picture, by the Fokker-Planck equation

    dW/dt = g (d(qW)/dq + d(pW)/dp) + D (d^2W/dq^2 + d^2W/dp^2),

with drift ``g = gamma1 - gamma2`` and diffusion ``D = (gamma1 + gamma2)/2``.
Its solution over a time ``t`` is a Gaussian channel with
``eta = exp(-2 g t)``:

* ``eta < 1`` (attenuator): a beam splitter of transmission ``eta`` that
  mixes in a thermal mode with ``2N + 1 = |(gamma1 + gamma2)/(gamma1 - gamma2)|``;
* ``eta > 1`` (amplifier): a two-mode squeezer with ``cosh^2 zeta = eta`` that
  mixes in the conjugate of such a mode;
* ``gamma1 = gamma2`` (diffusive): no drift, the variances grow by
  ``(gamma1 + gamma2) t``.

With squeezed Lindblad operators ``b = mu a + nu a^+`` the same statements
hold for ``b``; the noise then looks squeezed in the quadratures of ``a``.

The grid integrator exists to cross-check the analytic channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._validation import as_real, require_mode_index, require_nonnegative
from .errors import DomainError, NumericalError, StepSizeError, UnsupportedConfigurationError, ValidationError
from .gaussian_engine import (
    GaussianState,
    product,
    purity,
    quadrature_symplectic,
    reduce,
    transform,
    wigner_eval,
)
from .mode_core import BeamSplitterParams, ModeTransform, beam_splitter, embed, two_mode_squeezer

ATTENUATOR = "attenuator"
AMPLIFIER = "amplifier"
DIFFUSIVE = "diffusive"
SQUEEZE_TOL = 1e-9


@dataclass(frozen=True)
class ReservoirParams:
    """Reservoir rates and the optional squeezing of its Lindblad operators."""

    gamma1: float
    gamma2: float = 0.0
    mu: complex = 1.0
    nu: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gamma1", require_nonnegative(self.gamma1, "gamma1"))
        object.__setattr__(self, "gamma2", require_nonnegative(self.gamma2, "gamma2"))
        mu, nu = complex(self.mu), complex(self.nu)
        defect = abs(abs(mu) ** 2 - abs(nu) ** 2 - 1)
        if defect > SQUEEZE_TOL:
            raise ValidationError(f"squeeze parameters need |mu|^2 - |nu|^2 = 1 (defect {defect:.3e})")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)

    @property
    def drift(self) -> float:
        return self.gamma1 - self.gamma2

    @property
    def diffusion(self) -> float:
        return 0.5 * (self.gamma1 + self.gamma2)

    @property
    def squeezed(self) -> bool:
        return self.nu != 0

    @property
    def occupation(self) -> float:
        """Reservoir occupation ``N`` with ``2N + 1 = |(gamma1 + gamma2)/(gamma1 - gamma2)|``."""
        if self.drift == 0:
            return math.inf
        return 0.5 * (abs((self.gamma1 + self.gamma2) / self.drift) - 1.0)


@dataclass(frozen=True)
class ChannelMap:
    """Gaussian channel on one mode.

    Attributes:
        eta: transmission (attenuator) or gain (amplifier); 1 for diffusion.
        kind: ``"attenuator"``, ``"amplifier"`` or ``"diffusive"``.
        noise_state: single-mode state of the fictitious mode mixed in by the
            attenuator or amplifier; ``None`` for the diffusive kind.
        added_noise: covariance added by the diffusive kind; ``None`` otherwise.
        occupation: thermal occupation ``N`` of the reservoir (infinite when diffusive).
    """

    eta: float
    kind: str
    noise_state: GaussianState | None = None
    added_noise: np.ndarray | None = None
    occupation: float = 0.0

    def __post_init__(self):
        if self.kind not in (ATTENUATOR, AMPLIFIER, DIFFUSIVE):
            raise ValidationError(f"unknown channel kind {self.kind!r}")
        if self.kind == ATTENUATOR and not 0 < self.eta <= 1:
            raise ValidationError(f"attenuator needs eta in (0, 1], got {self.eta}")
        if self.kind == AMPLIFIER and self.eta < 1:
            raise ValidationError(f"amplifier needs eta >= 1, got {self.eta}")
        if self.kind != DIFFUSIVE and self.noise_state is None:
            raise ValidationError(f"{self.kind} needs a noise_state")
        if self.kind == DIFFUSIVE and self.added_noise is None:
            raise ValidationError("diffusive channel needs added_noise")

    def output_covariance_map(self) -> tuple[float, np.ndarray]:
        """``(scale, offset)`` with single-mode ``cov -> scale * cov + offset``."""
        if self.kind == DIFFUSIVE:
            return 1.0, np.array(self.added_noise)
        Z = np.diag([1.0, -1.0])
        cov0 = self.noise_state.cov
        if self.kind == ATTENUATOR:
            return self.eta, (1 - self.eta) * cov0
        return self.eta, (self.eta - 1) * Z @ cov0 @ Z

    def to_json(self) -> dict:
        out = {"kind": self.kind, "eta": self.eta, "N": None if math.isinf(self.occupation) else self.occupation}
        if self.noise_state is not None:
            out["noise_state"] = self.noise_state.to_json()
        if self.added_noise is not None:
            out["added_noise"] = np.asarray(self.added_noise).tolist()
        return out


def _frame(mu: complex, nu: complex) -> np.ndarray:
    """Quadrature matrix taking ``b``-frame quadratures to ``a``-frame ones, ``a = conj(mu) b - nu b^+``."""
    S_inv = ModeTransform(np.array([[np.conj(mu)]]), np.array([[-nu]]))
    return quadrature_symplectic(S_inv)


def channel_from_rates(params: ReservoirParams, duration: float) -> ChannelMap:
    """Channel produced by the reservoir acting for ``duration``."""
    t = require_nonnegative(duration, "duration")
    K = _frame(params.mu, params.nu)
    g = params.drift
    if g == 0:
        added = (params.gamma1 + params.gamma2) * t * K @ K.T
        return ChannelMap(1.0, DIFFUSIVE, added_noise=added, occupation=math.inf)
    eta = math.exp(-2 * g * t)
    N = params.occupation
    cov_b = (N + 0.5) * np.eye(2)
    cov_a = K @ cov_b @ K.T
    if g > 0:
        return ChannelMap(eta, ATTENUATOR, noise_state=GaussianState(np.zeros(2), cov_a), occupation=N)
    Z = np.diag([1.0, -1.0])
    return ChannelMap(eta, AMPLIFIER, noise_state=GaussianState(np.zeros(2), Z @ cov_a @ Z), occupation=N)


def squeezed_channel(params: ReservoirParams, duration: float) -> ChannelMap:
    """Channel of a reservoir with squeezed Lindblad operators ``b = mu a + nu a^+``."""
    if not isinstance(params, ReservoirParams):
        raise ValidationError("expected ReservoirParams")
    return channel_from_rates(params, duration)


def apply_channel(state: GaussianState, ch: ChannelMap, mode: int = 0) -> GaussianState:
    """Send ``mode`` of ``state`` through the channel.

    The attenuator and the amplifier are realized by mixing the mode with an
    appended fictitious mode (beam splitter or two-mode squeezer) and then
    tracing that mode out.
    """
    if not isinstance(ch, ChannelMap):
        raise ValidationError("expected a ChannelMap")
    M = state.mode_count
    mode = require_mode_index(mode, M)
    if ch.kind == DIFFUSIVE:
        cov = np.array(state.cov)
        sl = slice(2 * mode, 2 * mode + 2)
        cov[sl, sl] += ch.added_noise
        return GaussianState(state.mean, cov)
    joint = product(state, ch.noise_state)
    if ch.kind == ATTENUATOR:
        mixer = beam_splitter(BeamSplitterParams(Theta=2 * math.acos(math.sqrt(ch.eta))))
    else:
        mixer = two_mode_squeezer(math.acosh(math.sqrt(ch.eta)))
    out = transform(joint, embed(mixer, (mode, M), M + 1))
    return reduce(out, list(range(M)))


def compose_channels(first: ChannelMap, second: ChannelMap) -> tuple[float, np.ndarray]:
    """``(scale, offset)`` of ``second`` after ``first`` on a single-mode covariance."""
    s1, o1 = first.output_covariance_map()
    s2, o2 = second.output_covariance_map()
    return s1 * s2, s2 * o1 + o2


def purity_trajectory(state: GaussianState, params: ReservoirParams, times: Sequence[float],
                      mode: int = 0) -> list[float]:
    """Purity after pure diffusion (``gamma1 = gamma2``) for each time."""
    if params.drift != 0:
        raise UnsupportedConfigurationError("purity_trajectory needs gamma1 == gamma2; use apply_channel otherwise")
    return [purity(apply_channel(state, channel_from_rates(params, t), mode)) for t in times]


# ---------------------------------------------------------------------------
# Grid Fokker-Planck integrator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform tensor grid over ``(q, p)``; ``W[i, j]`` sits at ``(q[i], p[j])``."""

    q: np.ndarray
    p: np.ndarray

    @property
    def hq(self) -> float:
        return float(self.q[1] - self.q[0])

    @property
    def hp(self) -> float:
        return float(self.p[1] - self.p[0])

    @property
    def cell(self) -> float:
        return self.hq * self.hp

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q, self.p, indexing="ij")

    @classmethod
    def covering(cls, states: Sequence[GaussianState], points: int = 301, width: float = 8.0) -> "PhaseSpaceGrid":
        """Grid spanning mean +- ``width`` standard deviations of every single-mode state given."""
        lo = np.full(2, np.inf)
        hi = np.full(2, -np.inf)
        for s in states:
            if s.mode_count != 1:
                raise ValidationError("grid states must be single-mode")
            sigma = np.sqrt(np.diag(s.cov))
            lo = np.minimum(lo, s.mean - width * sigma)
            hi = np.maximum(hi, s.mean + width * sigma)
        return cls(np.linspace(lo[0], hi[0], points), np.linspace(lo[1], hi[1], points))


def gaussian_on_grid(state: GaussianState, grid: PhaseSpaceGrid) -> np.ndarray:
    Q, P = grid.mesh()
    pts = np.stack([Q.ravel(), P.ravel()], axis=1)
    return wigner_eval(state, pts).reshape(Q.shape)


def grid_moments(W: np.ndarray, grid: PhaseSpaceGrid) -> tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of a grid density (normalized by its own mass)."""
    Q, P = grid.mesh()
    mass = W.sum()
    mean = np.array([(Q * W).sum(), (P * W).sum()]) / mass
    dq, dp = Q - mean[0], P - mean[1]
    cov = np.array([[(dq * dq * W).sum(), (dq * dp * W).sum()],
                    [(dq * dp * W).sum(), (dp * dp * W).sum()]]) / mass
    return mean, cov


def grid_purity(W: np.ndarray, grid: PhaseSpaceGrid) -> float:
    """``2 pi * integral W^2 dq dp``."""
    return float(2 * math.pi * (W ** 2).sum() * grid.cell)


def max_stable_step(grid: PhaseSpaceGrid, params: ReservoirParams) -> float:
    """The explicit-step limit ``0.2 h^2 / D`` (infinite without diffusion)."""
    D = params.diffusion
    h = min(grid.hq, grid.hp)
    return math.inf if D == 0 else 0.2 * h * h / D


def _boundary_fraction(W: np.ndarray) -> float:
    peak = np.max(np.abs(W))
    if peak == 0:
        return 0.0
    edge = max(np.max(np.abs(W[0])), np.max(np.abs(W[-1])), np.max(np.abs(W[:, 0])), np.max(np.abs(W[:, -1])))
    return float(edge / peak)


def _face_ratios(x: np.ndarray, g: float, D: float) -> np.ndarray:
    """``sqrt(w_i / w_{i+1})`` for the stationary profile ``w = exp(-g x^2 / 2D)``."""
    return np.exp(g * (x[1:] ** 2 - x[:-1] ** 2) / (4 * D))


def evolve_fokker_planck(W, grid: PhaseSpaceGrid, params: ReservoirParams, dt: float, steps: int, *,
                         boundary_tol: float = 1e-12, mass_tol: float = 1e-6) -> np.ndarray:
    """Explicit finite-volume integration of the single-mode Fokker-Planck equation.

    Each face flux ``g x W + D dW/dx`` is written as ``D w d(W/w)/dx`` with the
    stationary Gaussian ``w`` and discretized by symmetric second-order
    differences.  The scheme is conservative and every thermal steady state
    is an exact fixed point of the discrete update.

    Raises:
        StepSizeError: ``dt`` exceeds ``0.2 h^2 / D``.
        DomainError: the density reaches the grid edge (relative to its peak).
        NumericalError: total mass drifted by more than ``mass_tol``.
    """
    if params.squeezed:
        raise UnsupportedConfigurationError("the grid integrator covers unsqueezed reservoirs only")
    W = np.array(W, dtype=float)
    if W.shape != (grid.q.size, grid.p.size):
        raise ValidationError(f"W has shape {W.shape}, grid is {(grid.q.size, grid.p.size)}")
    dt = as_real(dt, "dt")
    if dt <= 0 or int(steps) != steps or steps < 0:
        raise ValidationError("dt must be > 0 and steps a nonnegative integer")
    limit = max_stable_step(grid, params)
    if dt > limit * (1 + 1e-12):
        raise StepSizeError(f"dt = {dt:.3e} exceeds the stability limit 0.2 h^2/D = {limit:.3e}")
    if _boundary_fraction(W) > boundary_tol:
        raise DomainError(f"initial density reaches the grid edge ({_boundary_fraction(W):.2e} of peak)")
    g, D = params.drift, params.diffusion
    mass0 = W.sum()
    if D == 0 or steps == 0:
        return W
    rq, rp = _face_ratios(grid.q, g, D), _face_ratios(grid.p, g, D)
    cq, cp = D / grid.hq ** 2, D / grid.hp ** 2
    for _ in range(int(steps)):
        Fq = cq * (W[1:, :] * rq[:, None] - W[:-1, :] / rq[:, None])
        Fp = cp * (W[:, 1:] * rp[None, :] - W[:, :-1] / rp[None, :])
        dW = np.zeros_like(W)
        dW[:-1, :] += Fq
        dW[1:, :] -= Fq
        dW[:, :-1] += Fp
        dW[:, 1:] -= Fp
        W += dt * dW
    if _boundary_fraction(W) > boundary_tol:
        raise DomainError(f"density reached the grid edge ({_boundary_fraction(W):.2e} of peak)")
    drift = abs(W.sum() - mass0) / abs(mass0)
    if drift > mass_tol:
        raise NumericalError(f"mass drifted by {drift:.3e}")
    return W


def grid_to_csv(W: np.ndarray, grid: PhaseSpaceGrid) -> str:
    """Snapshot as CSV rows ``q,p,W`` with ``q`` varying slowest."""
    W = np.asarray(W, dtype=float)
    if W.shape != (grid.q.size, grid.p.size):
        raise ValidationError(f"W has shape {W.shape}, grid is {(grid.q.size, grid.p.size)}")
    Q, P = grid.mesh()
    lines = ["q,p,W"]
    lines.extend(f"{q:.17e},{p:.17e},{w:.17e}" for q, p, w in zip(Q.ravel(), P.ravel(), W.ravel()))
    return "\n".join(lines) + "\n"
