"""Transfer and scattering matrices of lossless one-dimensional dielectrics.

Units have ``c = 1``: the wavenumber is ``k = omega sqrt(eps mu)`` and the
impedance is ``Z = sqrt(mu / eps)``.  The state carried through the medium is
the column ``(A_-, A_+)`` of left- and right-moving amplitudes with the
propagation phase ``phi = int k dx`` stripped off.  It obeys

    d/dx (A_-, A_+) = (Z' / 2Z) M(phi) (A_-, A_+),
    M(phi) = [[1, -exp(2i phi)], [-exp(-2i phi), 1]].

The trace of the coefficient matrix is ``Z'/Z``.  The determinant
``|a|^2 - |b|^2`` of the transfer matrix therefore grows as ``Z(x)/Z(x_left)``,
and ``TransferMatrix.z_ratio`` stores ``Z_right / Z_left``.

Two kinds of profile are supported.  ``LayeredProfile`` is a stack of uniform
slabs whose impedance jumps at each interface.  ``SampledProfile`` is a
smooth profile interpolated through grid samples.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from ._validation import as_real, frozen, require_positive
from .errors import NumericalError, PhotonicError, SingularTransferError, StructuralError, ValidationError

RTOL = 1e-12
ATOL = 1e-14
DETERMINANT_TOL = 1e-8
SYMMETRY_TOL = 1e-10
UNITARITY_TOL = 1e-8
FLAT_END_TOL = 1e-6
# largest step times the fastest local rate (wavenumber or |Z'/Z|) in the Magnus integrator
MAGNUS_STEP = 0.05


def coupling_matrix(phi: float) -> np.ndarray:
    """``M(phi)``; it satisfies ``M^2 = 2M``."""
    e = np.exp(2j * phi)
    return np.array([[1.0, -e], [-1.0 / e, 1.0]])


@dataclass(frozen=True)
class Layer:
    """Uniform slab of thickness ``d``."""

    d: float
    eps: float
    mu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "d", require_positive(self.d, "layer thickness d"))
        object.__setattr__(self, "eps", require_positive(self.eps, "eps"))
        object.__setattr__(self, "mu", require_positive(self.mu, "mu"))

    @property
    def impedance(self) -> float:
        return math.sqrt(self.mu / self.eps)

    @property
    def index(self) -> float:
        return math.sqrt(self.eps * self.mu)


@dataclass(frozen=True)
class LayeredProfile:
    """Slabs between a left and a right half-space.

    Args:
        layers: slabs ordered from left to right.
        left: ``(eps, mu)`` of the left half-space.
        right: ``(eps, mu)`` of the right half-space.
    """

    layers: tuple[Layer, ...]
    left: tuple[float, float] = (1.0, 1.0)
    right: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        layers = tuple(l if isinstance(l, Layer) else Layer(*l) for l in self.layers)
        left = _medium(self.left, "left")
        right = _medium(self.right, "right")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def z_left(self) -> float:
        return math.sqrt(self.left[1] / self.left[0])

    @property
    def z_right(self) -> float:
        return math.sqrt(self.right[1] / self.right[0])

    def interfaces(self, omega: float) -> list[tuple[float, float]]:
        """``(phi, Z_after / Z_before)`` at each interface, left to right."""
        zs = [self.z_left] + [l.impedance for l in self.layers] + [self.z_right]
        out = []
        phi = 0.0
        for j in range(len(zs) - 1):
            if j > 0:
                phi += omega * self.layers[j - 1].index * self.layers[j - 1].d
            out.append((phi, zs[j + 1] / zs[j]))
        return out


@dataclass(frozen=True)
class SampledProfile:
    """Smooth profile through samples ``(x, eps(x), mu(x))``.

    The first two and the last two samples must agree, so the ends are flat
    and the asymptotic plane waves are well defined.
    """

    x: np.ndarray
    eps: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        eps = np.asarray(self.eps, dtype=float).reshape(-1)
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        if not (x.size == eps.size == mu.size):
            raise StructuralError(f"x, eps, mu lengths differ: {x.size}, {eps.size}, {mu.size}")
        if x.size < 4:
            raise StructuralError(f"need at least 4 samples, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(eps)) and np.all(np.isfinite(mu))):
            raise ValidationError("profile samples must be finite")
        if np.any(np.diff(x) <= 0):
            raise ValidationError("x samples must be strictly increasing")
        if np.any(eps <= 0) or np.any(mu <= 0):
            raise ValidationError("eps and mu must be positive everywhere")
        for name, v in (("eps", eps), ("mu", mu)):
            for i, j in ((0, 1), (-1, -2)):
                if abs(v[i] - v[j]) > FLAT_END_TOL * v[i]:
                    side = "left" if i == 0 else "right"
                    raise ValidationError(f"{name} is not constant at the {side} end ({v[i]!r} vs {v[j]!r})")
        object.__setattr__(self, "x", frozen(x))
        object.__setattr__(self, "eps", frozen(eps))
        object.__setattr__(self, "mu", frozen(mu))

    @classmethod
    def from_function(cls, eps, mu, x_min: float, x_max: float, points: int = 2001) -> "SampledProfile":
        """Sample callables ``eps(x)`` and ``mu(x)`` on a uniform grid."""
        x = np.linspace(x_min, x_max, points)
        return cls(x, np.broadcast_to(eps(x), x.shape), np.broadcast_to(mu(x), x.shape))

    @property
    def z_left(self) -> float:
        return math.sqrt(self.mu[0] / self.eps[0])

    @property
    def z_right(self) -> float:
        return math.sqrt(self.mu[-1] / self.eps[-1])

    def log_impedance(self) -> PchipInterpolator:
        return PchipInterpolator(self.x, 0.5 * np.log(self.mu / self.eps))

    def index(self) -> PchipInterpolator:
        return PchipInterpolator(self.x, np.sqrt(self.eps * self.mu))


MediumProfile = LayeredProfile | SampledProfile


def _medium(pair, name: str) -> tuple[float, float]:
    try:
        eps, mu = pair
    except (TypeError, ValueError):
        raise StructuralError(f"{name} medium must be a pair (eps, mu)") from None
    return require_positive(eps, f"{name} eps"), require_positive(mu, f"{name} mu")


@dataclass(frozen=True)
class TransferMatrix:
    """``T = [[a, b*], [b, a*]]`` mapping ``(A_-, A_+)`` from the left end to the right end.

    ``z_ratio`` is ``Z_right / Z_left`` and equals ``|a|^2 - |b|^2``.
    """

    a: complex
    b: complex
    z_ratio: float

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        z = require_positive(self.z_ratio, "z_ratio")
        det = abs(a) ** 2 - abs(b) ** 2
        if abs(det - z) > DETERMINANT_TOL * max(1.0, abs(a) ** 2):
            raise NumericalError(f"|a|^2 - |b|^2 = {det!r} differs from z_ratio = {z!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "z_ratio", z)

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(1.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, T, z_ratio: float) -> "TransferMatrix":
        T = np.asarray(T, dtype=complex)
        if T.shape != (2, 2):
            raise StructuralError(f"transfer matrix must be 2x2, got {T.shape}")
        defect = max(abs(T[1, 1] - np.conj(T[0, 0])), abs(T[0, 1] - np.conj(T[1, 0])))
        if defect > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(T)))):
            raise NumericalError(f"matrix lacks the [[a, b*], [b, a*]] structure (defect {defect:.3g})")
        return cls(T[0, 0], T[1, 0], z_ratio)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, np.conj(self.b)], [self.b, np.conj(self.a)]])

    @property
    def determinant(self) -> float:
        return abs(self.a) ** 2 - abs(self.b) ** 2

    def inverse(self) -> np.ndarray:
        return np.array([[np.conj(self.a), -np.conj(self.b)], [-self.b, self.a]]) / self.z_ratio

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        """``self @ other`` applies ``other`` first (``other`` lies to the left)."""
        return TransferMatrix.from_matrix(self.matrix() @ other.matrix(), self.z_ratio * other.z_ratio)

    @property
    def reflectance(self) -> float:
        return abs(self.b / self.a) ** 2 if self.a != 0 else 1.0

    @property
    def transmittance(self) -> float:
        return self.z_ratio / abs(self.a) ** 2 if self.a != 0 else 0.0


@dataclass(frozen=True)
class ScatteringMatrix2:
    """Unitary 2x2 matrix taking incident to outgoing amplitudes."""

    matrix: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.matrix, dtype=complex)
        if B.shape != (2, 2):
            raise StructuralError(f"scattering matrix must be 2x2, got {B.shape}")
        defect = float(np.max(np.abs(B @ B.conj().T - np.eye(2))))
        if defect > UNITARITY_TOL:
            raise NumericalError(f"scattering matrix is not unitary (defect {defect:.3g})")
        object.__setattr__(self, "matrix", frozen(B))

    @property
    def transmission(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def reflection(self) -> complex:
        return complex(self.matrix[1, 0])


def scattering_from_transfer(T: TransferMatrix) -> ScatteringMatrix2:
    """``(1/a) [[sqrt(d), -b], [b*, sqrt(d)]]`` with ``d = |a|^2 - |b|^2``.

    Raises:
        SingularTransferError: if ``a = 0``.
    """
    if T.a == 0:
        raise SingularTransferError("transfer coefficient a vanishes (total reflection limit)")
    s = math.sqrt(T.determinant)
    return ScatteringMatrix2(np.array([[s, -T.b], [np.conj(T.b), s]]) / T.a)


def _exact_layered(profile: LayeredProfile, omega: float) -> np.ndarray:
    T = np.eye(2, dtype=complex)
    for phi, rho in profile.interfaces(omega):
        T = (np.eye(2) + 0.5 * (rho - 1.0) * coupling_matrix(phi)) @ T
    return T


def _pack(T: np.ndarray) -> np.ndarray:
    flat = T.reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def _unpack(y: np.ndarray) -> np.ndarray:
    return (y[:4] + 1j * y[4:8]).reshape(2, 2)


def _check_steps(xs, Ts, expected_det, where: str) -> None:
    """Compare ``det T`` at every accepted step with the impedance ratio reached there."""
    for k, (x, T) in enumerate(zip(xs, Ts)):
        det = (T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0]).real
        want = expected_det(x)
        if abs(det - want) > DETERMINANT_TOL * max(1.0, want):
            raise NumericalError(
                f"{where}: determinant {det!r} departs from impedance ratio {want!r} "
                f"at step {k} of {len(xs) - 1} (position {x!r})"
            )


def _integrate(fun, span, y0, where: str, max_step: float = np.inf):
    sol = solve_ivp(fun, span, y0, method="DOP853", rtol=RTOL, atol=ATOL, max_step=max_step)
    if sol.status != 0:
        raise NumericalError(
            f"{where}: integrator failed at position {sol.t[-1]!r} after {sol.nfev} evaluations: {sol.message}"
        )
    return sol


def _ode_layered(profile: LayeredProfile, omega: float) -> np.ndarray:
    T = np.eye(2, dtype=complex)
    for j, (phi, rho) in enumerate(profile.interfaces(omega)):
        if rho == 1.0:
            continue
        half_m = 0.5 * coupling_matrix(phi)

        def rhs(s, y, half_m=half_m):
            return _pack(half_m @ _unpack(y))

        s_end = math.log(rho)
        det0 = (T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0]).real
        sol = _integrate(rhs, (0.0, s_end), _pack(T), f"interface {j}")
        steps = [_unpack(y) for y in sol.y.T]
        _check_steps(sol.t, steps, lambda s, det0=det0: det0 * math.exp(s), f"interface {j}")
        T = _unpack(sol.y[:, -1])
    return T


def _expm2(X: np.ndarray) -> np.ndarray:
    """Closed-form exponential of a 2x2 matrix."""
    half = 0.5 * (X[0, 0] + X[1, 1])
    Y = X - half * np.eye(2)
    s = np.sqrt(complex(-(Y[0, 0] * Y[1, 1] - Y[0, 1] * Y[1, 0])))
    if abs(s) < 1e-4:
        s2 = s * s
        c, sinc = 1 + s2 / 2 + s2 * s2 / 24, 1 + s2 / 6 + s2 * s2 / 120
    else:
        c, sinc = np.cosh(s), np.sinh(s) / s
    return np.exp(half) * (c * np.eye(2) + sinc * Y)


_GAUSS3 = 0.5 + np.array([-1.0, 0.0, 1.0]) * math.sqrt(15) / 10
_SQRT15 = math.sqrt(15)


def _magnus_step(A1: np.ndarray, A2: np.ndarray, A3: np.ndarray, h: float) -> np.ndarray:
    """Sixth-order Magnus exponent from the generator at the three Gauss nodes of a step."""

    def comm(P, Q):
        return P @ Q - Q @ P

    a1 = h * A2
    a2 = (_SQRT15 * h / 3) * (A3 - A1)
    a3 = (10 * h / 3) * (A3 - 2 * A2 + A1)
    c1 = comm(a1, a2)
    c2 = -comm(a1, 2 * a3 + c1) / 60
    return a1 + a3 / 12 + comm(-20 * a1 - a3 + c1, a2 + c2) / 240


def _ode_sampled(profile: SampledProfile, omega: float) -> np.ndarray:
    """Magnus integration aligned with the sample grid.

    The interpolants are polynomials between samples, so each step stays
    inside one sample interval, where the generator is smooth.  The
    three-point Gauss rule integrates the trace ``Z'/Z`` exactly there, and
    commutators are traceless, so each step multiplies ``det T`` by exactly
    the impedance ratio across it.  The phase ``phi`` comes from the exact
    antiderivative of the index interpolant.
    """
    lnz = profile.log_impedance()
    dlnz = lnz.derivative()
    phase = profile.index().antiderivative()
    x = profile.x
    phase0 = float(phase(x[0]))
    lnz0 = float(lnz(x[0]))
    k_max = omega * float(np.max(np.sqrt(profile.eps * profile.mu)))
    T = np.eye(2, dtype=complex)
    xs, Ts = [float(x[0])], [T]
    for a, b in zip(x[:-1], x[1:]):
        probe = np.linspace(a, b, 5)
        rate = max(k_max, float(np.max(np.abs(dlnz(probe)))))
        substeps = max(1, math.ceil((b - a) * rate / MAGNUS_STEP))
        edges = np.linspace(a, b, substeps + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            h = hi - lo
            nodes = lo + h * _GAUSS3
            g = 0.5 * dlnz(nodes)
            phi = omega * (phase(nodes) - phase0)
            A = [gi * coupling_matrix(p) for gi, p in zip(g, phi)]
            T = _expm2(_magnus_step(*A, h)) @ T
        xs.append(float(b))
        Ts.append(T)
    _check_steps(xs, Ts, lambda s: math.exp(float(lnz(s)) - lnz0), "sampled profile")
    return T


def transfer_matrix(profile: MediumProfile, omega: float, method: str = "auto") -> TransferMatrix:
    """Transfer matrix from the left end of ``profile`` to its right end.

    Args:
        profile: layered or sampled medium.
        omega: angular frequency (``c = 1``).
        method: ``"exact"`` multiplies closed-form interface jumps (layered
            only); ``"ode"`` integrates the coupled-amplitude equation, with
            adaptive DOP853 across layer interfaces and a sixth-order Magnus
            scheme on sampled profiles.  ``"auto"`` picks
            ``"exact"`` for layers and ``"ode"`` for samples.

    Raises:
        NumericalError: if the integrator fails or the determinant drifts from
            the impedance ratio by more than 1e-8 at any step.
    """
    omega = require_positive(omega, "omega")
    if method not in ("auto", "exact", "ode"):
        raise ValidationError(f"method must be 'auto', 'exact' or 'ode', got {method!r}")
    if isinstance(profile, LayeredProfile):
        T = _ode_layered(profile, omega) if method == "ode" else _exact_layered(profile, omega)
    elif isinstance(profile, SampledProfile):
        if method == "exact":
            raise ValidationError("method 'exact' needs a layered profile")
        T = _ode_sampled(profile, omega)
    else:
        raise ValidationError(f"expected a LayeredProfile or SampledProfile, got {type(profile).__name__}")
    return TransferMatrix.from_matrix(T, profile.z_right / profile.z_left)


class SpectrumPoint(NamedTuple):
    omega: float
    reflectance: float
    transmittance: float


def spectrum_sweep(profile: MediumProfile, omegas: Iterable[float], method: str = "auto") -> list[SpectrumPoint]:
    """Reflectance and transmittance at each frequency.

    Raises:
        PhotonicError: any failure at one frequency is re-raised with the
            same type and the frequency prepended; ``R + T`` departing from 1
            by more than 1e-8 raises NumericalError.
    """
    omegas = [as_real(w, "omega") for w in omegas]
    if not omegas:
        raise ValidationError("need at least one frequency")
    out = []
    for w in omegas:
        try:
            T = transfer_matrix(profile, w, method)
        except PhotonicError as exc:
            raise type(exc)(f"omega={w!r}: {exc}") from exc
        R, Tr = T.reflectance, T.transmittance
        if abs(R + Tr - 1.0) > 1e-8:
            raise NumericalError(f"omega={w!r}: R + T = {R + Tr!r}")
        out.append(SpectrumPoint(w, R, Tr))
    return out


def quarter_wave_stack(n_high: float, n_low: float, periods: int, design_omega: float,
                       ambient: float = 1.0) -> LayeredProfile:
    """``periods`` pairs of high/low-index quarter-wave layers in a uniform ambient medium (mu = 1)."""
    n_high = require_positive(n_high, "n_high")
    n_low = require_positive(n_low, "n_low")
    design_omega = require_positive(design_omega, "design_omega")
    if int(periods) != periods or periods < 1:
        raise ValidationError(f"periods must be a positive integer, got {periods}")
    pair = [Layer(math.pi / (2 * design_omega * n), n * n) for n in (n_high, n_low)]
    amb = (ambient * ambient, 1.0)
    return LayeredProfile(tuple(pair * int(periods)), amb, amb)


def profile_from_json(data) -> LayeredProfile:
    """Layers from ``[{"d", "eps", "mu"}, ...]`` or ``{"layers": [...], "left": {...}, "right": {...}}``."""
    if isinstance(data, dict):
        layers = data.get("layers")
        left = data.get("left", {"eps": 1.0, "mu": 1.0})
        right = data.get("right", {"eps": 1.0, "mu": 1.0})
    else:
        layers, left, right = data, {"eps": 1.0, "mu": 1.0}, {"eps": 1.0, "mu": 1.0}
    if not isinstance(layers, list):
        raise ValidationError("layers must be a list of {'d', 'eps', 'mu'} objects")
    try:
        parsed = tuple(Layer(float(l["d"]), float(l["eps"]), float(l.get("mu", 1.0))) for l in layers)
        ends = [(float(m["eps"]), float(m.get("mu", 1.0))) for m in (left, right)]
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValidationError(f"malformed layer list: missing or bad field {exc}") from None
    return LayeredProfile(parsed, *ends)


def profile_from_csv(text: str) -> SampledProfile:
    """Samples from CSV text with header ``x,eps,mu``."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"x", "eps", "mu"} <= {f.strip() for f in reader.fieldnames}:
        raise ValidationError("profile CSV needs a header with columns x, eps, mu")
    rows = [{k.strip(): v for k, v in r.items()} for r in reader]
    try:
        cols = {k: [float(r[k]) for r in rows] for k in ("x", "eps", "mu")}
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"profile CSV has a non-numeric entry: {exc}") from None
    return SampledProfile(cols["x"], cols["eps"], cols["mu"])


def load_profile(path: str | Path) -> MediumProfile:
    """Read a ``.json`` layer list or a ``.csv`` sample grid."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return profile_from_csv(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    return profile_from_json(data)


def sweep_to_csv(points: Sequence[SpectrumPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "R", "T"])
    for p in points:
        w.writerow([repr(float(p.omega)), repr(float(p.reflectance)), repr(float(p.transmittance))])
    return buf.getvalue()
