"""Quasi-unitary mode transformations.

A linear optical instrument with ``M`` modes maps the column of operators
``v = (a_1, ..., a_M, a_1^+, ..., a_M^+)`` to ``S v`` with

    S = [[B, C], [conj(C), conj(B)]].

Canonical commutation relations survive exactly when ``S G S^+ = G`` for the
metric ``G = diag(1, ..., 1, -1, ..., -1)``.  Passive instruments have
``C = 0`` and a unitary ``B``; active instruments mix creation and
annihilation operators.

Every instrument is generated by a Hermitian matrix ``H`` through
``S = expm(i G H)``.  The operator it corresponds to is
``H_op = -1/2 v^+ H v`` and the unitary ``U = exp(i H_op)`` acts as
``U v U^+ = S v``.  This sign is the one that reproduces the familiar
beam-splitter Hamiltonian ``i phi (a1^+ a2 - a2^+ a1)`` and the pair-creation
Hamiltonian ``i zeta (a1^+ a2^+ - a1 a2)`` from the rotation and squeezer
matrices; :meth:`EffectiveHamiltonianMatrix.quadratic_form` exposes the
coefficients in that normal-ordered form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from ._validation import (
    as_real,
    as_square_matrix,
    frozen,
    require_mode_index,
    require_mode_pair,
    require_unitary,
)
from .errors import BranchCutError, StructuralError, ValidationError

DEFAULT_TOL = 1e-9
BRANCH_CUT_TOL = 1e-9


def metric(mode_count: int) -> np.ndarray:
    """The metric ``G = diag(I_M, -I_M)``."""
    return np.diag(np.concatenate([np.ones(mode_count), -np.ones(mode_count)]))


@dataclass(frozen=True)
class ModeTransform:
    """A linear mode transformation stored as its blocks ``B`` and ``C``.

    Args:
        block_B: ``M x M`` complex matrix multiplying the annihilation operators.
        block_C: ``M x M`` complex matrix multiplying the creation operators.
            Defaults to zero (a passive instrument).
    """

    block_B: np.ndarray
    block_C: np.ndarray | None = None

    def __post_init__(self):
        B = as_square_matrix(self.block_B, "block_B")
        C = np.zeros_like(B) if self.block_C is None else as_square_matrix(self.block_C, "block_C")
        if B.shape != C.shape:
            raise StructuralError(f"block shapes differ: B {B.shape} vs C {C.shape}")
        object.__setattr__(self, "block_B", frozen(B))
        object.__setattr__(self, "block_C", frozen(C))

    @property
    def mode_count(self) -> int:
        return self.block_B.shape[0]

    @property
    def is_passive(self) -> bool:
        return not np.any(self.block_C)

    def full(self) -> np.ndarray:
        """Materialize the ``2M x 2M`` matrix ``S``."""
        B, C = self.block_B, self.block_C
        return np.block([[B, C], [C.conj(), B.conj()]])

    @classmethod
    def from_full(cls, S) -> "ModeTransform":
        """Build from a full ``2M x 2M`` matrix, keeping its upper blocks.

        Raises:
            StructuralError: the lower blocks are not the conjugates of the upper ones.
        """
        S = as_square_matrix(S, "S")
        if S.shape[0] % 2:
            raise StructuralError(f"full matrix must have even size, got {S.shape}")
        M = S.shape[0] // 2
        B, C = S[:M, :M], S[:M, M:]
        mismatch = max(np.max(np.abs(S[M:, M:] - B.conj())), np.max(np.abs(S[M:, :M] - C.conj())))
        if mismatch > 1e-9 * max(1.0, float(np.max(np.abs(S)))):
            raise StructuralError(f"lower blocks must be conj(C), conj(B) (mismatch {mismatch:.3e})")
        return cls(B, C)

    @classmethod
    def identity(cls, mode_count: int) -> "ModeTransform":
        return cls(np.eye(mode_count, dtype=complex))

    def inverse(self) -> "ModeTransform":
        """The inverse ``G S^+ G``, exact for quasi-unitary ``S``."""
        return ModeTransform(self.block_B.conj().T, -self.block_C.T)

    def __matmul__(self, other: "ModeTransform") -> "ModeTransform":
        return compose(self, other)

    def to_json(self) -> dict:
        return {
            "modes": self.mode_count,
            "B": _complex_to_pairs(self.block_B),
            "C": _complex_to_pairs(self.block_C),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModeTransform":
        try:
            M = int(data["modes"])
            B = _pairs_to_complex(data["B"])
            C = _pairs_to_complex(data["C"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed ModeTransform JSON: {exc}") from None
        out = cls(B, C)
        if out.mode_count != M:
            raise StructuralError(f"'modes' is {M} but blocks are {out.mode_count}x{out.mode_count}")
        return out


def _complex_to_pairs(A: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def _pairs_to_complex(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("expected rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def quasi_unitarity_defect(S: ModeTransform) -> float:
    """``max |S G S^+ - G|``."""
    full = S.full()
    G = metric(S.mode_count)
    return float(np.max(np.abs(full @ G @ full.conj().T - G)))


def check_quasi_unitary(S: ModeTransform, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``max |S G S^+ - G| <= tol``."""
    if not tol > 0:
        raise ValidationError(f"tol must be > 0, got {tol}")
    if not isinstance(S, ModeTransform):
        raise StructuralError("check_quasi_unitary expects a ModeTransform")
    return quasi_unitarity_defect(S) <= tol


def compose(S1: ModeTransform, S2: ModeTransform) -> ModeTransform:
    """The product ``S1 S2`` (``S2`` acts first)."""
    if S1.mode_count != S2.mode_count:
        raise StructuralError(f"mode counts differ: {S1.mode_count} vs {S2.mode_count}")
    B1, C1, B2, C2 = S1.block_B, S1.block_C, S2.block_B, S2.block_C
    return ModeTransform(B1 @ B2 + C1 @ C2.conj(), B1 @ C2 + C1 @ B2.conj())


def compose_all(transforms: Sequence[ModeTransform]) -> ModeTransform:
    """Compose instruments in the order light meets them (first element acts first)."""
    if not transforms:
        raise ValidationError("need at least one transform")
    out = transforms[0]
    for T in transforms[1:]:
        out = compose(T, out)
    return out


def embed(T: ModeTransform, modes: Sequence[int], mode_count: int) -> ModeTransform:
    """Place a transform acting on ``len(modes)`` modes into a larger network."""
    idx = [require_mode_index(m, mode_count) for m in modes]
    if len(set(idx)) != len(idx):
        raise ValidationError(f"modes must be distinct, got {list(modes)}")
    if len(idx) != T.mode_count:
        raise StructuralError(f"transform has {T.mode_count} modes but {len(idx)} indices given")
    B = np.eye(mode_count, dtype=complex)
    C = np.zeros((mode_count, mode_count), dtype=complex)
    sel = np.ix_(idx, idx)
    B[sel] = T.block_B
    C[sel] = T.block_C
    return ModeTransform(B, C)


# ---------------------------------------------------------------------------
# Two-mode instruments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BeamSplitterParams:
    """Euler-type angles of a general 2x2 unitary.

    ``B = e^{i Lambda/2} P(Psi) R(Theta/2) P(Phi)`` with
    ``P(x) = diag(e^{ix/2}, e^{-ix/2})`` and ``R(t) = [[cos t, sin t], [-sin t, cos t]]``.
    """

    Lambda: float = 0.0
    Psi: float = 0.0
    Theta: float = 0.0
    Phi: float = 0.0

    @property
    def transmissivity(self) -> float:
        return math.cos(self.Theta / 2)

    @property
    def reflectivity(self) -> float:
        return -math.sin(self.Theta / 2)


@dataclass(frozen=True)
class AmplifierParams:
    """Parameters of the 2x2 matrix acting on ``(a_1, a_2^+)`` of a parametric amplifier.

    ``B = e^{i Lambda/2} P(Psi) K(Theta/2) P(Phi)`` with
    ``K(t) = [[cosh t, sinh t], [sinh t, cosh t]]``.
    """

    Lambda: float = 0.0
    Psi: float = 0.0
    Theta: float = 0.0
    Phi: float = 0.0

    @property
    def zeta(self) -> float:
        return self.Theta / 2

    @property
    def gain(self) -> float:
        return math.cosh(self.Theta / 2)


def _phase_pair(x: float) -> np.ndarray:
    return np.diag([np.exp(0.5j * x), np.exp(-0.5j * x)])


def beam_splitter_matrix(params: BeamSplitterParams) -> np.ndarray:
    """The 2x2 unitary of a beam splitter with the given angles."""
    t = params.Theta / 2
    R = np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]], dtype=complex)
    return np.exp(0.5j * params.Lambda) * _phase_pair(params.Psi) @ R @ _phase_pair(params.Phi)


def beam_splitter(params: BeamSplitterParams) -> ModeTransform:
    """Passive two-mode transform of a lossless beam splitter."""
    return ModeTransform(beam_splitter_matrix(params))


def rotation(phi: float) -> ModeTransform:
    """The real rotation ``[[cos phi, sin phi], [-sin phi, cos phi]]``."""
    return beam_splitter(BeamSplitterParams(Theta=2 * as_real(phi, "phi")))


def phase_shift(phi: float, mode: int = 0, mode_count: int = 1) -> ModeTransform:
    """Multiply one mode's annihilation operator by ``e^{i phi}``."""
    mode = require_mode_index(mode, mode_count)
    B = np.eye(mode_count, dtype=complex)
    B[mode, mode] = np.exp(1j * as_real(phi, "phi"))
    return ModeTransform(B)


def amplifier_matrix(params: AmplifierParams) -> np.ndarray:
    """The 2x2 matrix acting on ``(a_1, a_2^+)``."""
    t = params.Theta / 2
    K = np.array([[math.cosh(t), math.sinh(t)], [math.sinh(t), math.cosh(t)]], dtype=complex)
    return np.exp(0.5j * params.Lambda) * _phase_pair(params.Psi) @ K @ _phase_pair(params.Phi)


def amplifier_from_matrix(Bamp) -> ModeTransform:
    """Mode transform of an amplifier given its ``(a_1, a_2^+)`` matrix."""
    Bamp = as_square_matrix(Bamp, "amplifier matrix")
    if Bamp.shape != (2, 2):
        raise StructuralError(f"amplifier matrix must be 2x2, got {Bamp.shape}")
    B = np.diag([Bamp[0, 0], np.conj(Bamp[1, 1])])
    C = np.array([[0, Bamp[0, 1]], [np.conj(Bamp[1, 0]), 0]])
    return ModeTransform(B, C)


def amplifier(params: AmplifierParams) -> ModeTransform:
    return amplifier_from_matrix(amplifier_matrix(params))


def amplifier_block(S: ModeTransform) -> np.ndarray:
    """Recover the ``(a_1, a_2^+)`` matrix of a two-mode amplifier transform."""
    if S.mode_count != 2:
        raise StructuralError("amplifier_block needs a two-mode transform")
    B, C = S.block_B, S.block_C
    if max(abs(B[0, 1]), abs(B[1, 0]), abs(C[0, 0]), abs(C[1, 1])) > DEFAULT_TOL:
        raise ValidationError("transform does not have the two-mode amplifier pattern")
    return np.array([[B[0, 0], C[0, 1]], [np.conj(C[1, 0]), np.conj(B[1, 1])]])


def two_mode_squeezer(zeta: float) -> ModeTransform:
    """Non-degenerate parametric amplifier with real squeeze parameter ``zeta``."""
    return amplifier(AmplifierParams(Theta=2 * as_real(zeta, "zeta")))


def _wrap(x: float) -> float:
    """Map an angle into (-pi, pi]."""
    return x - 2 * math.pi * math.ceil((x - math.pi) / (2 * math.pi))


def _phase_or_zero(z: complex, floor: float = 1e-15) -> float:
    return float(np.angle(z)) if abs(z) > floor else 0.0


def decompose_beam_splitter(B, tol: float = DEFAULT_TOL) -> BeamSplitterParams:
    """Angles reproducing a 2x2 unitary.

    The result lies in the canonical ranges ``Lambda, Psi, Phi`` in (-pi, pi] and
    ``Theta`` in [0, 2 pi) whenever such a representative exists, preferring the
    smaller ``Theta``.  Some unitaries have no representative in those ranges
    (the half-angle phases force one of ``Psi``, ``Phi`` outside); for them
    ``Phi`` is moved by 2 pi, staying within (-2 pi, 2 pi).  The reconstructed
    matrix always equals the input.
    """
    U0 = require_unitary(B, "B", tol)
    if U0.shape != (2, 2):
        raise StructuralError(f"beam splitter matrix must be 2x2, got {U0.shape}")
    lam = float(np.angle(np.linalg.det(U0)))
    U = np.exp(-0.5j * lam) * U0
    half = math.atan2(abs(U[0, 1]), abs(U[0, 0]))
    d = _phase_or_zero(U[0, 1])
    s = _phase_or_zero(U[0, 0]) if abs(U[0, 0]) > 1e-15 else 0.0
    fallback = None
    for theta, s_branch in ((2 * half, s), (2 * math.pi - 2 * half, s + math.pi)):
        if theta >= 2 * math.pi:
            continue
        psi0, phi0 = s_branch + d, s_branch - d
        psi, phi = _wrap(psi0), _wrap(phi0)
        shifts = round((psi - psi0) / (2 * math.pi)) - round((phi - phi0) / (2 * math.pi))
        if shifts % 2 == 0:
            return BeamSplitterParams(lam, psi, theta, phi)
        if fallback is None:
            phi_alt = phi - 2 * math.pi if phi > 0 else phi + 2 * math.pi
            fallback = BeamSplitterParams(lam, psi, theta, phi_alt)
    return fallback


def _hyperbolic_defect(B: np.ndarray) -> float:
    sz = np.diag([1.0, -1.0])
    return float(np.max(np.abs(B @ sz @ B.conj().T - sz)))


def decompose_amplifier(B, tol: float = DEFAULT_TOL) -> AmplifierParams:
    """Parameters reproducing a 2x2 amplifier matrix acting on ``(a_1, a_2^+)``.

    The input must satisfy ``B diag(1,-1) B^+ = diag(1,-1)``, which contains
    ``|B11|^2 - |B12|^2 = 1``.  ``Theta >= 0`` always; the phases are not
    folded into a canonical range.
    """
    B = as_square_matrix(B, "B")
    if B.shape != (2, 2):
        raise StructuralError(f"amplifier matrix must be 2x2, got {B.shape}")
    defect = _hyperbolic_defect(B)
    if defect > tol:
        raise ValidationError(f"amplifier normalization violated (defect {defect:.3e} > {tol:.1e})")
    lam = float(np.angle(np.linalg.det(B)))
    U = np.exp(-0.5j * lam) * B
    theta = 2 * math.asinh(abs(U[0, 1]))
    s = _phase_or_zero(U[0, 0])
    d = _phase_or_zero(U[0, 1])
    return AmplifierParams(lam, s + d, theta, s - d)


def amplifier_factorization(theta: float) -> tuple[ModeTransform, ModeTransform, ModeTransform]:
    """Split ``two_mode_squeezer(theta/2)`` into ``R^-1 D R``.

    ``R`` is the 50:50 beam splitter and ``D`` squeezes the rotated modes
    independently: the first is stretched along ``q`` by ``e^{theta/2}``,
    the second along ``p``.
    """
    theta = as_real(theta, "theta")
    R = beam_splitter(BeamSplitterParams(Theta=math.pi / 2))
    c, s = math.cosh(theta / 2), math.sinh(theta / 2)
    D = ModeTransform(c * np.eye(2), np.diag([s, -s]))
    return R.inverse(), D, R


# ---------------------------------------------------------------------------
# Effective Hamiltonians
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticForm:
    """Normal-ordered coefficients of ``H_op = a^+ N a + (a^+ K a^+ + h.c.)/2 + constant``."""

    number: np.ndarray
    pairing: np.ndarray
    constant: float


@dataclass(frozen=True)
class EffectiveHamiltonianMatrix:
    """Hermitian generator ``H`` of a mode transform, ``S = expm(i G H)``."""

    matrix_H: np.ndarray

    def __post_init__(self):
        H = as_square_matrix(self.matrix_H, "matrix_H")
        if H.shape[0] % 2:
            raise StructuralError(f"H must have even size, got {H.shape}")
        object.__setattr__(self, "matrix_H", frozen(H))

    @property
    def mode_count(self) -> int:
        return self.matrix_H.shape[0] // 2

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix_H - self.matrix_H.conj().T)))

    def quadratic_form(self) -> QuadraticForm:
        """Coefficients of the operator ``-1/2 v^+ H v`` after normal ordering."""
        M = self.mode_count
        H = self.matrix_H
        H11, H12, H22 = H[:M, :M], H[:M, M:], H[M:, M:]
        number = -0.5 * (H11 + H22.T)
        pairing = -0.5 * (H12 + H12.T)
        constant = float(-0.5 * np.trace(H22).real)
        return QuadraticForm(number, pairing, constant)


def _check_branch_cut(S_full: np.ndarray) -> None:
    eig = np.linalg.eigvals(S_full)
    bad = [z for z in eig if z.real < 0 and abs(z.imag) <= BRANCH_CUT_TOL * max(1.0, abs(z))]
    if bad:
        listed = ", ".join(f"{z.real:.6g}{z.imag:+.3g}j" for z in bad)
        raise BranchCutError(
            f"principal logarithm undefined: eigenvalues on the negative real axis ({listed})"
        )


def effective_hamiltonian(S: ModeTransform, tol: float = DEFAULT_TOL) -> EffectiveHamiltonianMatrix:
    """``H = -i G ln S`` with the principal matrix logarithm.

    Raises:
        ValidationError: ``S`` is not quasi-unitary within ``tol``.
        BranchCutError: an eigenvalue of ``S`` sits on the logarithm's cut.
    """
    defect = quasi_unitarity_defect(S)
    if defect > tol:
        raise ValidationError(f"S is not quasi-unitary (defect {defect:.3e} > {tol:.1e})")
    full = S.full()
    _check_branch_cut(full)
    log_S = linalg.logm(full)
    H = -1j * metric(S.mode_count) @ log_S
    herm_defect = float(np.max(np.abs(H - H.conj().T)))
    if herm_defect > max(1e3 * tol, 1e-6):
        raise BranchCutError(f"logarithm left the generator algebra (Hermiticity defect {herm_defect:.3e})")
    return EffectiveHamiltonianMatrix(0.5 * (H + H.conj().T))


def exponentiate(H: EffectiveHamiltonianMatrix, tol: float = DEFAULT_TOL) -> ModeTransform:
    """``S = expm(i G H)``, the endpoint of the flow ``dS/deta = i G H S``."""
    if not isinstance(H, EffectiveHamiltonianMatrix):
        H = EffectiveHamiltonianMatrix(H)
    defect = H.hermiticity_defect()
    if defect > tol:
        raise ValidationError(f"H is not Hermitian (defect {defect:.3e} > {tol:.1e})")
    full = linalg.expm(1j * metric(H.mode_count) @ H.matrix_H)
    return ModeTransform.from_full(full)


def two_mode(modes: tuple[int, int], mode_count: int, T: ModeTransform) -> ModeTransform:
    """Embed a two-mode instrument on ``modes`` of a ``mode_count``-mode network."""
    return embed(T, require_mode_pair(modes, mode_count), mode_count)
