"""Multimode states in truncated Fock space.

Amplitudes are a dense complex tensor indexed by ``(n_1, ..., n_M)`` with
``0 <= n_k <= cutoff``.  Instruments act in the Schroedinger picture: the
output state is ``U^+ |psi>`` where ``U v U^+ = S v``, so expectation values
of the mode operators transform with ``S`` exactly as the Gaussian engine's
means do.  Concretely, a passive instrument with matrix ``B`` sends the
creation operator ``a_k^+`` to ``sum_l B_lk a_l^+``.

Active maps push weight above the cutoff.  The discarded weight is the
*leakage*; by default an operation fails when it exceeds ``1e-8``.  Pass
``renormalize=True`` to accept larger losses and rescale the survivor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.special import gammaln

from ._validation import as_real, frozen, require_mode_index, require_mode_pair, require_unitary
from .bell import TwoQubitPolarizationState
from .errors import EmptyPostselectionError, StructuralError, TruncationError, ValidationError
from .mode_core import EffectiveHamiltonianMatrix

DEFAULT_LEAKAGE_BOUND = 1e-8
MAX_MODES = 4
MAX_CUTOFF = 32
DEFAULT_AMPLITUDE_FLOOR = 1e-14


@dataclass(frozen=True)
class FockState:
    """Truncated multimode photon-number amplitudes.

    Args:
        amplitudes: complex array of shape ``(cutoff + 1,) * mode_count``.
        leakage: weight already lost to truncation by the operations that
            produced this state.  The squared norm equals ``1 - leakage`` unless
            the state was renormalized.
    """

    amplitudes: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim < 1 or len(set(amps.shape)) != 1:
            raise StructuralError(f"amplitudes must be a hypercube, got shape {amps.shape}")
        if amps.ndim > MAX_MODES:
            raise StructuralError(f"at most {MAX_MODES} modes are supported, got {amps.ndim}")
        if amps.shape[0] - 1 > MAX_CUTOFF:
            raise StructuralError(f"cutoff at most {MAX_CUTOFF} is supported, got {amps.shape[0] - 1}")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes must be finite")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - (1 - self.leakage)) > 1e-9 and abs(norm2 - 1) > 1e-9:
            raise ValidationError(f"squared norm {norm2:.12g} inconsistent with leakage {self.leakage:.3g}")
        object.__setattr__(self, "amplitudes", frozen(amps))

    @property
    def mode_count(self) -> int:
        return self.amplitudes.ndim

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, occupation: Sequence[int]) -> complex:
        occ = tuple(int(n) for n in occupation)
        if len(occ) != self.mode_count:
            raise StructuralError(f"occupation needs {self.mode_count} entries, got {len(occ)}")
        if any(n < 0 for n in occ):
            raise ValidationError("occupations must be nonnegative")
        if any(n > self.cutoff for n in occ):
            return 0j
        return complex(self.amplitudes[occ])

    @classmethod
    def vacuum(cls, mode_count: int, cutoff: int) -> "FockState":
        return cls.basis([0] * mode_count, cutoff)

    @classmethod
    def basis(cls, occupation: Sequence[int], cutoff: int) -> "FockState":
        occ = tuple(int(n) for n in occupation)
        if any(n < 0 or n > cutoff for n in occ):
            raise ValidationError(f"occupation {occ} outside 0..{cutoff}")
        amps = np.zeros((cutoff + 1,) * len(occ), dtype=complex)
        amps[occ] = 1.0
        return cls(amps)

    @classmethod
    def from_dict(cls, amplitudes: Mapping[tuple, complex], cutoff: int, normalize: bool = True) -> "FockState":
        if not amplitudes:
            raise ValidationError("need at least one amplitude")
        M = len(next(iter(amplitudes)))
        amps = np.zeros((cutoff + 1,) * M, dtype=complex)
        for occ, value in amplitudes.items():
            if len(occ) != M or any(n < 0 or n > cutoff for n in occ):
                raise ValidationError(f"occupation {occ} invalid for {M} modes and cutoff {cutoff}")
            amps[tuple(occ)] = value
        if normalize:
            n = np.linalg.norm(amps)
            if n == 0:
                raise ValidationError("all amplitudes are zero")
            amps = amps / n
        return cls(amps)

    def to_json(self, floor: float = DEFAULT_AMPLITUDE_FLOOR) -> list:
        out = []
        for occ in zip(*np.nonzero(np.abs(self.amplitudes) > floor)):
            z = self.amplitudes[occ]
            out.append({"occ": [int(n) for n in occ], "re": float(z.real), "im": float(z.imag)})
        return out

    @classmethod
    def from_json(cls, data: list, cutoff: int) -> "FockState":
        try:
            entries = {tuple(int(n) for n in e["occ"]): complex(e["re"], e["im"]) for e in data}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed FockState JSON: {exc}") from None
        return cls.from_dict(entries, cutoff, normalize=False)


@dataclass(frozen=True)
class JointPhotonDistribution:
    """Photon-number probabilities indexed by ``(n_1, ..., n_M)``."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < -1e-15):
            raise ValidationError("probabilities must be nonnegative")
        object.__setattr__(self, "probabilities", frozen(np.clip(p, 0.0, None)))

    @property
    def leakage(self) -> float:
        return max(0.0, 1.0 - float(np.sum(self.probabilities)))

    def __getitem__(self, occupation) -> float:
        occ = tuple(occupation)
        if any(n >= s for n, s in zip(occ, self.probabilities.shape)):
            return 0.0
        return float(self.probabilities[occ])

    def marginal(self, modes: Sequence[int]) -> "JointPhotonDistribution":
        keep = [require_mode_index(m, self.probabilities.ndim) for m in modes]
        drop = tuple(k for k in range(self.probabilities.ndim) if k not in keep)
        p = np.sum(self.probabilities, axis=drop)
        order = np.argsort(np.argsort(keep))
        return JointPhotonDistribution(np.transpose(p, order) if p.ndim > 1 else p)

    def as_dict(self, floor: float = 0.0) -> dict:
        return {tuple(int(n) for n in occ): float(self.probabilities[occ])
                for occ in zip(*np.nonzero(self.probabilities > floor))}


def photon_distribution(state: FockState) -> JointPhotonDistribution:
    return JointPhotonDistribution(np.abs(state.amplitudes) ** 2)


def _finish(state: FockState, out: np.ndarray, leakage_bound: float, renormalize: bool,
            suggest=None) -> FockState:
    before = float(np.sum(np.abs(state.amplitudes) ** 2))
    after = float(np.sum(np.abs(out) ** 2))
    step_leak = max(0.0, 1.0 - after / before) if before > 0 else 0.0
    if step_leak > leakage_bound and not renormalize:
        suggested = suggest(step_leak) if suggest else None
        hint = f"; try cutoff >= {suggested}" if suggested else ""
        raise TruncationError(
            f"truncation leakage {step_leak:.3e} exceeds bound {leakage_bound:.1e}{hint}",
            step_leak,
            suggested,
        )
    if renormalize:
        if after == 0:
            raise TruncationError("all weight was truncated", 1.0)
        total = step_leak + state.leakage
        return FockState(out / math.sqrt(after), leakage=min(1.0, total))
    return FockState(out, leakage=1.0 - after)


# ---------------------------------------------------------------------------
# Passive two-mode instruments
# ---------------------------------------------------------------------------


def _powers(z: complex, n: int) -> np.ndarray:
    out = np.empty(n + 1, dtype=complex)
    out[0] = 1.0
    for k in range(1, n + 1):
        out[k] = out[k - 1] * z
    return out


def _log_binom(n: int) -> np.ndarray:
    k = np.arange(n + 1)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def beam_splitter_block(B: np.ndarray, total: int) -> np.ndarray:
    """Matrix of the passive two-mode map on the sector with ``total`` photons.

    Entry ``[k, m]`` is the amplitude of ``|k, total-k>`` produced from
    ``|m, total-m>``.  The creation operators expand binomially,
    ``(B11 a1^+ + B21 a2^+)^m (B12 a1^+ + B22 a2^+)^(total-m)``; factorial
    ratios are evaluated through log-gamma.
    """
    N = total
    p11, p21 = _powers(B[0, 0], N), _powers(B[1, 0], N)
    p12, p22 = _powers(B[0, 1], N), _powers(B[1, 1], N)
    log_fact = gammaln(np.arange(N + 1) + 1)
    block = np.zeros((N + 1, N + 1), dtype=complex)
    for m in range(N + 1):
        r = N - m
        u = np.exp(_log_binom(m)) * p11[: m + 1] * p21[m::-1]
        w = np.exp(_log_binom(r)) * p12[: r + 1] * p22[r::-1]
        coeff = np.convolve(u, w)
        k = np.arange(N + 1)
        scale = np.exp(0.5 * (log_fact[k] + log_fact[N - k] - log_fact[m] - log_fact[r]))
        block[:, m] = coeff * scale
    return block


def apply_beam_splitter(state: FockState, modes, B, *, tol: float = 1e-9,
                        leakage_bound: float = DEFAULT_LEAKAGE_BOUND,
                        renormalize: bool = False) -> FockState:
    """Apply a 2x2 unitary ``B`` to the mode pair ``modes``.

    Photon number in the pair is conserved, so no weight is lost as long as
    the input has at most ``cutoff`` photons in the two modes together.
    """
    i, j = require_mode_pair(modes, state.mode_count)
    B = require_unitary(B, "B", tol)
    if B.shape != (2, 2):
        raise StructuralError(f"B must be 2x2, got {B.shape}")
    c = state.cutoff
    psi = np.moveaxis(state.amplitudes, (i, j), (-2, -1))
    out = np.zeros_like(psi)
    for N in range(2 * c + 1):
        lo, hi = max(0, N - c), min(c, N)
        m = np.arange(lo, hi + 1)
        vec = psi[..., m, N - m]
        if not np.any(vec):
            continue
        block = beam_splitter_block(B, N)[lo:hi + 1, lo:hi + 1]
        out[..., m, N - m] = vec @ block.T
    out = np.moveaxis(out, (-2, -1), (i, j))
    return _finish(state, out, leakage_bound, renormalize)


def apply_phase(state: FockState, mode: int, phi: float) -> FockState:
    """Phase shifter ``a -> e^{i phi} a`` on one mode."""
    mode = require_mode_index(mode, state.mode_count)
    n = np.arange(state.cutoff + 1)
    shape = [1] * state.mode_count
    shape[mode] = -1
    out = state.amplitudes * np.exp(1j * as_real(phi, "phi") * n).reshape(shape)
    return FockState(out, leakage=state.leakage)


# ---------------------------------------------------------------------------
# Two-mode squeezer
# ---------------------------------------------------------------------------


def _pair_exponential(psi: np.ndarray, coeff: complex, raise_: bool) -> np.ndarray:
    """``exp(coeff a b)`` or ``exp(coeff a^+ b^+)`` on the last two axes, truncated."""
    c = psi.shape[-1] - 1
    n = np.arange(c + 1)
    total = psi.copy()
    term = psi.copy()
    for p in range(1, c + 1):
        nxt = np.zeros_like(term)
        if raise_:
            w = np.sqrt(np.outer(n[1:], n[1:]))
            nxt[..., 1:, 1:] = (coeff / p) * w * term[..., :-1, :-1]
        else:
            w = np.sqrt(np.outer(n[1:], n[1:]))
            nxt[..., :-1, :-1] = (coeff / p) * w * term[..., 1:, 1:]
        term = nxt
        if not np.any(term):
            break
        total += term
    return total


def apply_two_mode_squeezer(state: FockState, modes, zeta: float, phase: float = 0.0, *,
                            leakage_bound: float = DEFAULT_LEAKAGE_BOUND,
                            renormalize: bool = False) -> FockState:
    """Apply ``exp(xi a_i^+ a_j^+ - conj(xi) a_i a_j)`` with ``xi = zeta e^{i phase}``.

    Uses the disentangled product
    ``exp(t a^+ b^+) cosh(zeta)^-(n_a + n_b + 1) exp(-conj(t) a b)`` with
    ``t = e^{i phase} tanh zeta``, applied right to left.  Every amplitude
    inside the cutoff is exact; only weight pushed above it is lost.
    """
    i, j = require_mode_pair(modes, state.mode_count)
    zeta = as_real(zeta, "zeta")
    phase = as_real(phase, "phase")
    if zeta == 0:
        return state
    t = np.exp(1j * phase) * math.tanh(zeta)
    c = state.cutoff
    psi = np.moveaxis(state.amplitudes, (i, j), (-2, -1))
    psi = _pair_exponential(psi, -np.conj(t), raise_=False)
    n = np.arange(c + 1)
    psi = psi * math.cosh(zeta) ** (-(n[:, None] + n[None, :] + 1.0))
    psi = _pair_exponential(psi, t, raise_=True)
    out = np.moveaxis(psi, (-2, -1), (i, j))

    def suggest(leak: float) -> int:
        ratio = abs(t) ** 2
        if ratio <= 0 or ratio >= 1:
            return c + 1
        extra = math.ceil(math.log(leakage_bound / leak) / math.log(ratio))
        return c + max(1, extra)

    return _finish(state, out, leakage_bound, renormalize, suggest)


# ---------------------------------------------------------------------------
# Photon statistics
# ---------------------------------------------------------------------------


def split_fock_distribution(n: int, tau_sq: float) -> JointPhotonDistribution:
    """Joint distribution of ``n`` photons split by a beam splitter of transmission ``tau_sq``.

    ``p(k, n-k) = C(n,k) tau^(2k) (1 - tau^2)^(n-k)``; stored as an
    ``(n+1) x (n+1)`` array.
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValidationError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    tau_sq = as_real(tau_sq, "tau_sq")
    if not 0 <= tau_sq <= 1:
        raise ValidationError(f"tau_sq must lie in [0, 1], got {tau_sq}")
    p = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        p[k, n - k] = math.comb(n, k) * tau_sq ** k * (1 - tau_sq) ** (n - k)
    return JointPhotonDistribution(p)


# ---------------------------------------------------------------------------
# Operators and expectation values
# ---------------------------------------------------------------------------


def annihilate(psi: np.ndarray, mode: int) -> np.ndarray:
    """``a_mode`` applied to an amplitude tensor."""
    c = psi.shape[mode] - 1
    moved = np.moveaxis(psi, mode, -1)
    out = np.zeros_like(moved)
    out[..., :-1] = moved[..., 1:] * np.sqrt(np.arange(1, c + 1))
    return np.moveaxis(out, -1, mode)


def create(psi: np.ndarray, mode: int) -> np.ndarray:
    """``a_mode^+`` applied to an amplitude tensor; weight above the cutoff is dropped."""
    c = psi.shape[mode] - 1
    moved = np.moveaxis(psi, mode, -1)
    out = np.zeros_like(moved)
    out[..., 1:] = moved[..., :-1] * np.sqrt(np.arange(1, c + 1))
    return np.moveaxis(out, -1, mode)


def number(psi: np.ndarray, mode: int) -> np.ndarray:
    n = np.arange(psi.shape[mode])
    shape = [1] * psi.ndim
    shape[mode] = -1
    return psi * n.reshape(shape)


def _expect(psi: np.ndarray, phi: np.ndarray) -> complex:
    return complex(np.vdot(psi, phi))


def mean_photon_numbers(state: FockState) -> np.ndarray:
    p = np.abs(state.amplitudes) ** 2
    return np.array([float(np.sum(number(p, k))) for k in range(state.mode_count)])


def _stokes_actions(psi: np.ndarray, i: int, j: int):
    ai, aj = annihilate(psi, i), annihilate(psi, j)
    ci_aj = create(aj, i)
    cj_ai = create(ai, j)
    ni, nj = number(psi, i), number(psi, j)
    Lt = 0.5 * (ni + nj)
    Lx = 0.5 * (ci_aj + cj_ai)
    Ly = 0.5j * (cj_ai - ci_aj)
    Lz = 0.5 * (ni - nj)
    return Lt, Lx, Ly, Lz


def stokes_expectations(state: FockState, modes) -> tuple[float, float, float, float]:
    """``<L_t>, <L_x>, <L_y>, <L_z>`` of the Jordan-Schwinger operators.

    ``L_t = (n_i + n_j)/2``, ``L_x = (a_i^+ a_j + a_j^+ a_i)/2``,
    ``L_y = i (a_j^+ a_i - a_i^+ a_j)/2``, ``L_z = (n_i - n_j)/2``.
    """
    i, j = require_mode_pair(modes, state.mode_count)
    psi = state.amplitudes
    return tuple(float(_expect(psi, op).real) for op in _stokes_actions(psi, i, j))


def stokes_casimir(state: FockState, modes) -> tuple[float, float]:
    """``(<Lx^2 + Ly^2 + Lz^2>, <Lt (Lt + 1)>)``, equal for states below the cutoff edge."""
    i, j = require_mode_pair(modes, state.mode_count)
    psi = state.amplitudes
    Lt, Lx, Ly, Lz = _stokes_actions(psi, i, j)
    lhs = sum(float(np.vdot(v, v).real) for v in (Lx, Ly, Lz))
    rhs = float(np.vdot(Lt, Lt).real + _expect(psi, Lt).real)
    return lhs, rhs


def _k_actions(psi: np.ndarray, i: int, j: int):
    ai_aj = annihilate(annihilate(psi, j), i)
    ci_cj = create(create(psi, j), i)
    ni, nj = number(psi, i), number(psi, j)
    Kt = 0.5 * (ni + nj + psi)
    Kx = 0.5 * (ai_aj + ci_cj)
    Ky = 0.5j * (ai_aj - ci_cj)
    Kz = 0.5 * (ni - nj - psi)
    return Kt, Kx, Ky, Kz


def k_expectations(state: FockState, modes) -> tuple[float, float, float, float]:
    """``<K_t>, <K_x>, <K_y>, <K_z>`` of the two-mode pair operators.

    ``K_t = (n_i + n_j + 1)/2``, ``K_x = (a_i a_j + a_i^+ a_j^+)/2``,
    ``K_y = i (a_i a_j - a_i^+ a_j^+)/2``, ``K_z = (n_i - n_j - 1)/2``.
    """
    i, j = require_mode_pair(modes, state.mode_count)
    psi = state.amplitudes
    Kt, _, _, Kz = _k_actions(psi, i, j)
    # <a^+ a^+> = conj(<a a>); this avoids the truncated raising operators.
    w = _expect(psi, annihilate(annihilate(psi, j), i))
    return float(_expect(psi, Kt).real), float(w.real), float(-w.imag), float(_expect(psi, Kz).real)


def k_casimir(state: FockState, modes) -> tuple[float, float]:
    """``(<Kt^2 - Kx^2 - Ky^2>, <Kz (Kz + 1)>)``, equal for states well below the cutoff."""
    i, j = require_mode_pair(modes, state.mode_count)
    psi = state.amplitudes
    Kt, Kx, Ky, Kz = _k_actions(psi, i, j)
    lhs = float((np.vdot(Kt, Kt) - np.vdot(Kx, Kx) - np.vdot(Ky, Ky)).real)
    rhs = float(np.vdot(Kz, Kz).real + _expect(psi, Kz).real)
    return lhs, rhs


def gaussian_moments(state: FockState) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature mean and covariance, ordered ``(q_1, p_1, ..., q_M, p_M)``.

    ``q = (a + a^+)/sqrt 2`` and ``p = i (a^+ - a)/sqrt 2``; the covariance is
    the symmetrized second moment minus the product of means.
    """
    psi = state.amplitudes / state.norm
    M = state.mode_count
    low = [annihilate(psi, k) for k in range(M)]
    mean_a = np.array([_expect(psi, low[k]) for k in range(M)])
    N = np.array([[_expect(low[k], low[l]) for l in range(M)] for k in range(M)])
    G = np.array([[_expect(psi, annihilate(low[l], k)) for l in range(M)] for k in range(M)])
    V = np.block([[G, N.T + np.eye(M)], [N, G.conj().T]])
    m = np.concatenate([mean_a, mean_a.conj()])
    Omega = quadrature_basis(M)
    sym = 0.5 * (V + V.T) - np.outer(m, m)
    cov = np.real(Omega @ sym @ Omega.T)
    mean = np.real(Omega @ m)
    return mean, 0.5 * (cov + cov.T)


def quadrature_basis(M: int) -> np.ndarray:
    """Matrix ``Omega`` with ``x = Omega v`` for ``v = (a, a^+)`` and interleaved ``x = (q_1, p_1, ...)``."""
    Omega = np.zeros((2 * M, 2 * M), dtype=complex)
    s = 1 / math.sqrt(2)
    for k in range(M):
        Omega[2 * k, k] = s
        Omega[2 * k, M + k] = s
        Omega[2 * k + 1, k] = -1j * s
        Omega[2 * k + 1, M + k] = 1j * s
    return Omega


def _sparse_annihilators(M: int, cutoff: int) -> list:
    d = cutoff + 1
    a = sparse.diags(np.sqrt(np.arange(1, d)), 1, shape=(d, d), format="csr", dtype=complex)
    eye = sparse.identity(d, format="csr", dtype=complex)
    ops = []
    for k in range(M):
        op = None
        for l in range(M):
            f = a if l == k else eye
            op = f if op is None else sparse.kron(op, f, format="csr")
        ops.append(op)
    return ops


def hamiltonian_operator(H: EffectiveHamiltonianMatrix, cutoff: int):
    """Sparse matrix of ``-1/2 v^+ H v`` on the truncated space (row-major occupations)."""
    M = H.mode_count
    a = _sparse_annihilators(M, cutoff)
    ad = [op.conj().T.tocsr() for op in a]
    v = a + ad
    vd = ad + a
    Hm = H.matrix_H
    dim = (cutoff + 1) ** M
    out = sparse.csr_matrix((dim, dim), dtype=complex)
    for r in range(2 * M):
        for s in range(2 * M):
            if Hm[r, s] != 0:
                out = out + (-0.5 * Hm[r, s]) * (vd[r] @ v[s])
    return out


# ---------------------------------------------------------------------------
# Downconversion and postselection
# ---------------------------------------------------------------------------

# Mode order of the four-mode downconversion state.
DOWNCONVERSION_MODES = ("1+", "1-", "2+", "2-")


def downconversion_state(zeta: float, phase: float, cutoff: int, *,
                         leakage_bound: float = DEFAULT_LEAKAGE_BOUND) -> FockState:
    """Polarization-invariant pair state over modes ``(1+, 1-, 2+, 2-)``.

    The generator ``xi (a_{1+}^+ a_{2-}^+ - a_{1-}^+ a_{2+}^+) + h.c.`` with
    ``xi = zeta e^{i phase}`` factorizes into two commuting two-mode squeezers:
    ``(1+, 2-)`` with ``xi`` and ``(1-, 2+)`` with ``-xi``.  The result is
    renormalized after truncation.
    """
    if isinstance(cutoff, bool) or int(cutoff) != cutoff or cutoff < 1:
        raise ValidationError(f"cutoff must be an integer >= 1, got {cutoff!r}")
    state = FockState.vacuum(4, int(cutoff))
    state = apply_two_mode_squeezer(state, (0, 3), zeta, phase, leakage_bound=leakage_bound)
    state = apply_two_mode_squeezer(state, (1, 2), zeta, phase + math.pi, leakage_bound=leakage_bound)
    amps = state.amplitudes / state.norm
    return FockState(amps, leakage=state.leakage)


def postselect_single_pairs(state: FockState) -> tuple[TwoQubitPolarizationState, float]:
    """Keep the sector with exactly one photon in each beam.

    Beam 1 is modes ``(1+, 1-)`` and beam 2 is ``(2+, 2-)``.  The occupied
    polarization mode of each beam labels the qubit.

    Returns:
        The normalized two-photon polarization state and the probability of
        the postselected sector.
    """
    if state.mode_count != 4:
        raise StructuralError(f"postselection needs the four-mode layout, got {state.mode_count} modes")
    amp = {}
    for s1, s2 in product((0, 1), repeat=2):
        occ = [0, 0, 0, 0]
        occ[s1] = 1
        occ[2 + s2] = 1
        amp[(s1, s2)] = state.amplitude(occ)
    vec = np.array([amp[(0, 0)], amp[(0, 1)], amp[(1, 0)], amp[(1, 1)]])
    weight = float(np.sum(np.abs(vec) ** 2)) / state.norm ** 2
    if weight <= 1e-300:
        raise EmptyPostselectionError("no weight in the one-photon-per-beam sector")
    return TwoQubitPolarizationState.from_vector(vec), weight
