"""Light in a moving medium with a horizon: the analog Hawking effect.

Units have ``hbar = k_B = c = 1``.  The medium flows from right to left, so
the velocity ``u(x)`` is negative, and light in it moves at
``c' = 1/sqrt(eps)``.  Counter-propagating light stands still where
``u + c' = 0``.  That point is the horizon ``x_h``, and the gradient
``alpha = (u + c')'(x_h) > 0`` plays the role of surface gravity.

The permittivity is piecewise constant.  It has a background value that
covers the horizon, plus optional steps further right that scatter the
emitted radiation back across the horizon.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import constants
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from ._validation import as_real, require_positive
from .dielectric import TransferMatrix, scattering_from_transfer
from .errors import DomainError, HorizonError, NumericalError, UnsupportedConfigurationError, ValidationError
from .fock_engine import DEFAULT_LEAKAGE_BOUND, FockState, apply_two_mode_squeezer

SCAN_POINTS = 20001
ROOT_RTOL = 1e-12
QUAD_TOL = 1e-9
DEFAULT_BUFFER_WAVELENGTHS = 10.0


@dataclass(frozen=True)
class FlowProfile:
    """Flow velocity and permittivity on a finite domain.

    Args:
        velocity: vectorized ``u(x)``.
        domain: ``(x_min, x_max)`` containing the horizon and the scattering region.
        epsilon: background permittivity, in force left of the first step.
        steps: ``(x_j, eps_j)`` pairs meaning ``eps = eps_j`` for ``x >= x_j``,
            sorted by position.
        du_dx: optional analytic derivative of ``u``; the horizon gradient
            otherwise comes from a central difference.
    """

    velocity: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float]
    epsilon: float = 1.0
    steps: tuple[tuple[float, float], ...] = ()
    du_dx: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        lo, hi = (as_real(v, "domain bound") for v in self.domain)
        if not lo < hi:
            raise ValidationError(f"domain must satisfy x_min < x_max, got {self.domain}")
        if not callable(self.velocity):
            raise ValidationError("velocity must be a callable u(x)")
        eps = require_positive(self.epsilon, "epsilon")
        steps = tuple((as_real(x, "step position"), require_positive(e, "step epsilon")) for x, e in self.steps)
        xs = [x for x, _ in steps]
        if xs != sorted(xs) or len(set(xs)) != len(xs):
            raise ValidationError("permittivity steps must have distinct, increasing positions")
        if any(not lo < x < hi for x in xs):
            raise ValidationError("permittivity steps must lie strictly inside the domain")
        object.__setattr__(self, "domain", (lo, hi))
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "steps", steps)

    @classmethod
    def linear(cls, alpha: float, c_prime: float = 1.0, domain=(-5.0, 5.0), x_h: float = 0.0) -> "FlowProfile":
        """``u = -c' + alpha (x - x_h)``, the near-horizon form of any single-horizon flow."""
        alpha = as_real(alpha, "alpha")
        c_prime = require_positive(c_prime, "c_prime")
        return cls(
            velocity=lambda x: -c_prime + alpha * (np.asarray(x, dtype=float) - x_h),
            domain=domain,
            epsilon=1.0 / c_prime ** 2,
            du_dx=lambda x: alpha + 0.0 * np.asarray(x, dtype=float),
        )

    @classmethod
    def from_samples(cls, x, u, eps=None) -> "FlowProfile":
        """PCHIP-interpolated velocity; ``eps[i]`` holds on ``[x_i, x_{i+1})``."""
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if x.ndim != 1 or x.shape != u.shape or x.size < 4:
            raise ValidationError("need matching 1D x and u arrays with at least 4 samples")
        if np.any(np.diff(x) <= 0):
            raise ValidationError("x samples must be strictly increasing")
        interp = PchipInterpolator(x, u)
        if eps is None:
            eps = np.ones_like(x)
        eps = np.asarray(eps, dtype=float)
        if eps.shape != x.shape:
            raise ValidationError("eps must have one value per sample")
        steps = tuple((float(x[i]), float(eps[i])) for i in range(1, x.size - 1) if eps[i] != eps[i - 1])
        return cls(interp, (float(x[0]), float(x[-1])), float(eps[0]), steps, interp.derivative())

    def permittivity(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.epsilon)
        for xj, ej in self.steps:
            out = np.where(x >= xj, ej, out)
        return out

    def light_speed(self, x) -> np.ndarray:
        return 1.0 / np.sqrt(self.permittivity(x))

    def counter_speed(self, x) -> np.ndarray:
        """``u + c'``, the lab-frame speed of counter-propagating light."""
        return np.asarray(self.velocity(x), dtype=float) + self.light_speed(x)

    def co_speed(self, x) -> np.ndarray:
        """``u - c'``, the lab-frame speed of co-propagating light."""
        return np.asarray(self.velocity(x), dtype=float) - self.light_speed(x)


class Horizon(NamedTuple):
    x: float
    alpha: float


def locate_horizon(profile: FlowProfile) -> Horizon:
    """Root of ``u + c'`` and the gradient there.

    Raises:
        HorizonError: if ``u + c'`` changes sign zero or several times, if the
            crossing sits on a permittivity step, or if the gradient is not positive.
    """
    lo, hi = profile.domain
    xs = np.linspace(lo, hi, SCAN_POINTS)
    g = profile.counter_speed(xs)
    s = np.sign(g)
    exact = [float(xs[i]) for i in np.flatnonzero(s == 0)]
    changes = [i for i in range(xs.size - 1) if s[i] * s[i + 1] < 0]
    brackets = [(float(xs[i]), float(xs[i + 1])) for i in changes]
    found = len(exact) + len(brackets)
    if found != 1:
        where = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in brackets) or "none"
        raise HorizonError(f"need exactly one sign change of u + c', found {found} (brackets: {where}; exact zeros: {exact})")
    if exact:
        x_h = exact[0]
    else:
        a, b = brackets[0]
        if any(a <= xj <= b for xj, _ in profile.steps):
            raise HorizonError(f"the horizon falls on a permittivity step inside [{a:.6g}, {b:.6g}]")
        x_h = float(brentq(lambda x: float(profile.counter_speed(x)), a, b, xtol=1e-300, rtol=ROOT_RTOL, maxiter=500))
    if profile.du_dx is not None:
        alpha = float(profile.du_dx(x_h))
    else:
        h = 1e-5 * max(1.0, abs(x_h))
        alpha = float((profile.velocity(x_h + h) - profile.velocity(x_h - h)) / (2 * h))
    if not alpha > 0:
        raise HorizonError(f"gradient of u + c' at the horizon must be positive, got {alpha!r}")
    return Horizon(x_h, alpha)


def _interior_steps(profile: FlowProfile, a: float, b: float) -> list[float]:
    lo, hi = min(a, b), max(a, b)
    return [xj for xj, _ in profile.steps if lo < xj < hi]


def _integral(f, a: float, b: float, points) -> float:
    if a == b:
        return 0.0
    kw = {"points": points} if points else {}
    with warnings.catch_warnings():
        # An integrand that is pure rounding noise (the remainder on an exactly
        # linear profile) trips quad's convergence heuristics; judge by the
        # returned error estimate instead.
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=400, **kw)
    if not err <= QUAD_TOL * max(1.0, abs(val)):
        raise NumericalError(f"quadrature over [{a!r}, {b!r}] did not converge (error estimate {err:.3g})")
    return float(val)


def null_coordinate(profile: FlowProfile, x: float, t: float = 0.0, branch: str = "+",
                    x_inf: float | None = None) -> float:
    """``tau_(+-) = t - int dx / (u +- c')``.

    On the ``+`` branch the integrand has a simple pole at the horizon.  The
    pole part ``1/(alpha (s - x_h))`` integrates to the logarithm, which is kept
    in closed form, and only the finite remainder goes to quadrature:

        tau_+ = t - ln(|x - x_h| / |x_inf|) / alpha
                  - int_{x_h + x_inf}^{x} [1/(u + c') - 1/(alpha (s - x_h))] ds.

    ``x_inf`` fixes the additive constant.  It must be positive right of the
    horizon and negative left of it; the default is ``+-1`` on the side of ``x``.
    The ``-`` branch is regular and is referenced to the horizon itself.

    Raises:
        DomainError: on the ``+`` branch at the horizon or with ``x_inf`` on the
            other side; on the ``-`` branch if ``u - c'`` vanishes on the path.
    """
    x = as_real(x, "x")
    t = as_real(t, "t")
    lo, hi = profile.domain
    if not lo <= x <= hi:
        raise ValidationError(f"x = {x!r} lies outside the profile domain {profile.domain}")
    x_h, alpha = locate_horizon(profile)
    if branch in ("+", 1, "plus"):
        if x == x_h:
            raise DomainError("tau_+ diverges at the horizon")
        side = 1.0 if x > x_h else -1.0
        if x_inf is None:
            x_inf = side
        x_inf = as_real(x_inf, "x_inf")
        if x_inf == 0 or math.copysign(1.0, x_inf) != side:
            raise DomainError("tau_+ cannot be continued across the horizon: x and x_inf lie on opposite sides")
        ref = x_h + x_inf
        if not lo <= ref <= hi:
            raise ValidationError(f"reference point x_h + x_inf = {ref!r} lies outside the domain")

        def remainder(s):
            return 1.0 / float(profile.counter_speed(s)) - 1.0 / (alpha * (s - x_h))

        rest = _integral(remainder, ref, x, _interior_steps(profile, ref, x))
        return t - math.log(abs(x - x_h) / abs(x_inf)) / alpha - rest
    if branch in ("-", -1, "minus"):
        path = np.linspace(x_h, x, 1001)
        if np.any(profile.co_speed(path) >= 0):
            raise DomainError("u - c' vanishes between the horizon and x; tau_- is singular there")
        rest = _integral(lambda s: 1.0 / float(profile.co_speed(s)), x_h, x, _interior_steps(profile, x_h, x))
        return t - rest
    raise ValidationError(f"branch must be '+' or '-', got {branch!r}")


def local_wavelength(profile: FlowProfile, x: float, omega: float) -> float:
    """Wavelength ``2 pi / d_x phase`` of counter-propagating light ``exp(-i omega tau_+)``."""
    omega = require_positive(omega, "omega")
    return float(2 * math.pi * abs(profile.counter_speed(as_real(x, "x"))) / omega)


def bogoliubov_zeta(omega: float, alpha: float) -> float:
    """Squeezing parameter with ``tanh zeta = exp(-pi omega / alpha)``."""
    omega = require_positive(omega, "omega")
    alpha = require_positive(alpha, "alpha")
    return float(math.atanh(math.exp(-math.pi * omega / alpha)))


def mean_occupation(omega: float, alpha: float) -> float:
    """Planck occupation ``1 / (exp(2 pi omega / alpha) - 1)``."""
    omega = require_positive(omega, "omega")
    alpha = require_positive(alpha, "alpha")
    return float(1.0 / math.expm1(2 * math.pi * omega / alpha))


def hawking_temperature(alpha: float) -> float:
    """``T = alpha / 2 pi`` with ``hbar = k_B = 1``."""
    return require_positive(alpha, "alpha") / (2 * math.pi)


def hawking_temperature_si(alpha: float) -> float:
    """Temperature in kelvin for a velocity gradient ``alpha`` in 1/s: ``hbar alpha / (2 pi k_B)``."""
    return constants.hbar * require_positive(alpha, "alpha") / (2 * math.pi * constants.k)


def fitted_temperature(omega: float, occupation: float) -> float:
    """Invert the Planck law at one frequency: ``T = omega / ln(1 + 1/n)``."""
    omega = require_positive(omega, "omega")
    occupation = require_positive(occupation, "occupation")
    return float(omega / math.log1p(1.0 / occupation))


def pair_state(omega: float, alpha: float, cutoff: int, *, leakage_bound: float = DEFAULT_LEAKAGE_BOUND,
               renormalize: bool = False) -> FockState:
    """Two-mode squeezed vacuum of an escaping (mode 0) and a trapped (mode 1) partner."""
    zeta = bogoliubov_zeta(omega, alpha)
    vac = FockState.vacuum(2, cutoff)
    return apply_two_mode_squeezer(vac, (0, 1), zeta, leakage_bound=leakage_bound, renormalize=renormalize)


def _phase_integral(profile: FlowProfile, omega: float, a: float, b: float, which) -> float:
    pts = _interior_steps(profile, a, b)
    return omega * _integral(lambda s: 1.0 / float(which(s)), a, b, pts)


def grey_body_transfer(profile: FlowProfile, omega: float,
                       buffer_wavelengths: float = DEFAULT_BUFFER_WAVELENGTHS) -> TransferMatrix:
    """Transfer matrix of the scattering region right of the horizon.

    Within a constant-permittivity segment, ``exp(-i omega tau_+)`` and
    ``exp(-i omega tau_-)`` solve the wave equation exactly, so their
    coefficients change only at steps.  Continuity of the field and of
    its flux there gives

        J = 1/2 [[1 + r, (1 - r) e^{i D}], [(1 - r) e^{-i D}, 1 + r]],

    which acts on ``(A_-, A_+)``.  Here ``r = sqrt(eps_before / eps_after)``
    and ``D`` is the difference of the phases ``omega int ds/(u +- c')``
    accumulated from the edge of the buffer.

    Raises:
        UnsupportedConfigurationError: if a step lies left of the horizon or
            within ``buffer_wavelengths`` wavelengths ``2 pi c'_h / omega`` of it.
    """
    omega = require_positive(omega, "omega")
    buffer_wavelengths = require_positive(buffer_wavelengths, "buffer_wavelengths")
    x_h, _ = locate_horizon(profile)
    c_h = float(profile.light_speed(x_h))
    edge = x_h + buffer_wavelengths * 2 * math.pi * c_h / omega
    for xj, _ in profile.steps:
        if xj < edge:
            raise UnsupportedConfigurationError(
                f"permittivity step at x = {xj!r} lies within the horizon buffer (x < {edge!r}); "
                "scattering is supported only right of the horizon, beyond the buffer"
            )
    T = np.eye(2, dtype=complex)
    z_ratio = 1.0
    eps_before = profile.epsilon
    theta_p = theta_m = 0.0
    start = edge
    for xj, ej in profile.steps:
        # Phases accumulate segment by segment; no step lies inside a segment.
        theta_p += _phase_integral(profile, omega, start, xj, profile.counter_speed)
        theta_m += _phase_integral(profile, omega, start, xj, profile.co_speed)
        start = xj
        r = math.sqrt(eps_before / ej)
        e = np.exp(1j * (theta_p - theta_m))
        J = 0.5 * np.array([[1 + r, (1 - r) * e], [(1 - r) / e, 1 + r]])
        T = J @ T
        z_ratio *= r
        eps_before = ej
    return TransferMatrix.from_matrix(T, z_ratio)


def grey_body_factor(profile: FlowProfile, omega: float,
                     buffer_wavelengths: float = DEFAULT_BUFFER_WAVELENGTHS) -> complex:
    """Amplitude ``a^-1 sqrt(|a|^2 - |b|^2)`` of the emitted radiation reaching ``x = +inf``."""
    T = grey_body_transfer(profile, omega, buffer_wavelengths)
    return scattering_from_transfer(T).transmission


def piecewise_steps(eps: Callable[[np.ndarray], np.ndarray], edges: Sequence[float]) -> tuple[tuple[float, float], ...]:
    """Steps approximating a smooth ``eps(x)`` by its midpoint value on each cell between ``edges``.

    The last edge returns to ``eps`` evaluated there.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValidationError("edges must be an increasing list of at least two positions")
    mids = 0.5 * (edges[1:] + edges[:-1])
    values = list(np.asarray(eps(mids), dtype=float)) + [float(eps(edges[-1:])[0])]
    return tuple((float(x), float(v)) for x, v in zip(edges, values))


@dataclass(frozen=True)
class HawkingSpectrum:
    """Per-frequency squeezing, occupation and grey-body transmittance ``|factor|^2``."""

    omega: np.ndarray
    zeta: np.ndarray
    nbar: np.ndarray
    greybody: np.ndarray
    alpha: float

    @property
    def temperature(self) -> float:
        return hawking_temperature(self.alpha)

    def fitted_temperatures(self) -> np.ndarray:
        return np.array([fitted_temperature(w, n) for w, n in zip(self.omega, self.nbar)])

    def detected_flux(self) -> np.ndarray:
        return self.nbar * self.greybody

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega", "zeta", "nbar", "greybody"])
        for row in zip(self.omega, self.zeta, self.nbar, self.greybody):
            w.writerow([f"{float(v):.17e}" for v in row])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "temperature": self.temperature,
            "omega": self.omega.tolist(),
            "zeta": self.zeta.tolist(),
            "nbar": self.nbar.tolist(),
            "greybody": self.greybody.tolist(),
        }


def hawking_spectrum(omegas: Sequence[float], alpha: float | None = None, flow: FlowProfile | None = None,
                     buffer_wavelengths: float = DEFAULT_BUFFER_WAVELENGTHS) -> HawkingSpectrum:
    """Spectrum at each frequency.  ``alpha`` defaults to the gradient at the horizon of ``flow``."""
    if alpha is None:
        if flow is None:
            raise ValidationError("give alpha, a flow profile, or both")
        alpha = locate_horizon(flow).alpha
    alpha = require_positive(alpha, "alpha")
    omegas = np.array([require_positive(w, "omega") for w in omegas], dtype=float)
    if omegas.size == 0:
        raise ValidationError("need at least one frequency")
    zeta = np.array([bogoliubov_zeta(w, alpha) for w in omegas])
    nbar = np.sinh(zeta) ** 2
    if flow is None:
        grey = np.ones_like(omegas)
    else:
        grey = np.array([abs(grey_body_factor(flow, w, buffer_wavelengths)) ** 2 for w in omegas])
    return HawkingSpectrum(omegas, zeta, nbar, grey, alpha)


def flow_from_json(data) -> FlowProfile:
    """Samples ``{"x": [...], "u": [...], "eps": [...]}``; ``eps`` is optional."""
    if not isinstance(data, dict):
        raise ValidationError("flow JSON must be an object with 'x' and 'u' arrays")
    try:
        return FlowProfile.from_samples(data["x"], data["u"], data.get("eps"))
    except KeyError as exc:
        raise ValidationError(f"flow JSON is missing field {exc}") from None


def flow_from_csv(text: str) -> FlowProfile:
    """Samples from CSV with columns ``x,u`` and optional ``eps`` and ``mu`` (``mu`` must be 1)."""
    reader = csv.DictReader(io.StringIO(text))
    names = {f.strip() for f in (reader.fieldnames or [])}
    if not {"x", "u"} <= names:
        raise ValidationError("flow CSV needs a header with columns x and u")
    rows = [{k.strip(): v for k, v in r.items()} for r in reader]
    try:
        cols = {k: np.array([float(r[k]) for r in rows]) for k in names & {"x", "u", "eps", "mu"}}
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"flow CSV has a non-numeric entry: {exc}") from None
    if "mu" in cols and np.any(cols["mu"] != 1.0):
        raise UnsupportedConfigurationError("moving-medium profiles take mu = 1; only eps may vary")
    return FlowProfile.from_samples(cols["x"], cols["u"], cols.get("eps"))


def load_flow(path: str | Path) -> FlowProfile:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return flow_from_csv(text)
    try:
        return flow_from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from None
