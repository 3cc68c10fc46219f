"""Command-line front end: ``photonic <scenario> [--config FILE] [-p key=value ...]``.

Every scenario reads a parameter map, validates it against a JSON schema,
runs, and writes one table.  CSV output has a header row and numbers in
``%.17e`` form.  JSON output is a single object carrying ``schema_version``,
the resolved parameters, the table as named columns, and a summary.

Parameters come from the defaults, then the config file, then ``-p``
flags, with later sources winning.  A config file holds either the parameter
map itself or an object of the form
``{"params": {...}, "out": ..., "format": ..., "seed": ...}``.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Callable, NamedTuple

import jsonschema
import numpy as np

from . import bell, dielectric, fock_engine, gaussian_engine, horizon, mode_core, open_systems
from .errors import PhotonicError, ValidationError
from .network_dsl import parse_network

SCHEMA_VERSION = "1.0"
SCENARIOS = ("transfer", "hom", "fock-split", "tmsv", "lindblad", "chsh", "hawking", "network")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_SWEEP = {
    "oneOf": [
        {"type": "array", "items": _NUM, "minItems": 1},
        {
            "type": "object",
            "properties": {"start": _NUM, "stop": _NUM, "num": {"type": "integer", "minimum": 1}},
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
    ]
}
_POS_SWEEP = {
    "oneOf": [
        {"type": "array", "items": _POS, "minItems": 1},
        {
            "type": "object",
            "properties": {"start": _POS, "stop": _POS, "num": {"type": "integer", "minimum": 1}},
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
    ]
}
_LAYER = {
    "type": "object",
    "properties": {"d": _POS, "eps": _POS, "mu": _POS},
    "required": ["d", "eps"],
    "additionalProperties": False,
}


class Table(NamedTuple):
    columns: list[str]
    rows: list[list]
    summary: dict


class Scenario(NamedTuple):
    schema: dict
    defaults: dict
    run: Callable[[dict, int], Table]
    help: str


def _sweep(spec) -> np.ndarray:
    if isinstance(spec, dict):
        return np.linspace(spec["start"], spec["stop"], spec["num"])
    return np.asarray(spec, dtype=float)


def _obj(properties: dict, required=()) -> dict:
    return {"type": "object", "properties": properties, "required": list(required), "additionalProperties": False}


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------


def _run_transfer(p: dict, seed: int) -> Table:
    if "profile" in p:
        profile = dielectric.load_profile(p["profile"])
    elif "layers" in p:
        profile = dielectric.profile_from_json({"layers": p["layers"],
                                                "left": p.get("left", {"eps": 1.0}),
                                                "right": p.get("right", {"eps": 1.0})})
    else:
        q = p["quarter_wave"]
        profile = dielectric.quarter_wave_stack(q["n_high"], q["n_low"], q["periods"], q["design_omega"],
                                                q.get("ambient", 1.0))
    points = dielectric.spectrum_sweep(profile, _sweep(p["omegas"]), p["method"])
    rows = [[pt.omega, pt.reflectance, pt.transmittance] for pt in points]
    best = max(points, key=lambda pt: pt.reflectance)
    return Table(["omega", "R", "T"], rows, {"max_R": best.reflectance, "omega_at_max_R": best.omega})


def _run_hom(p: dict, seed: int) -> Table:
    rows = []
    for theta in _sweep(p["theta"]):
        params = mode_core.BeamSplitterParams(Lambda=p["lam"], Psi=p["psi"], Theta=theta, Phi=p["phi"])
        B = mode_core.beam_splitter_matrix(params)
        out = fock_engine.apply_beam_splitter(fock_engine.FockState.basis((1, 1), 2), (0, 1), B)
        dist = fock_engine.photon_distribution(out)
        rows.append([theta, dist[(1, 1)], dist[(2, 0)], dist[(0, 2)]])
    k = int(np.argmin([r[1] for r in rows]))
    return Table(["theta", "p11", "p20", "p02"], rows, {"min_p11": rows[k][1], "theta_at_min": rows[k][0]})


def _run_fock_split(p: dict, seed: int) -> Table:
    n, tau_sq = p["n"], p["tau_sq"]
    t = math.sqrt(tau_sq)
    B = np.array([[t, math.sqrt(1 - tau_sq)], [-math.sqrt(1 - tau_sq), t]])
    out = fock_engine.apply_beam_splitter(fock_engine.FockState.basis((n, 0), n), (0, 1), B)
    measured = fock_engine.photon_distribution(out)
    closed = fock_engine.split_fock_distribution(n, tau_sq)
    rows = [[k, n - k, measured[(k, n - k)], closed[(k, n - k)]] for k in range(n + 1)]
    err = max(abs(r[2] - r[3]) for r in rows)
    return Table(["n1", "n2", "p", "binomial"], rows, {"max_abs_error": err})


def _run_tmsv(p: dict, seed: int) -> Table:
    zeta, cutoff = p["zeta"], p["cutoff"]
    vac = fock_engine.FockState.vacuum(2, cutoff)
    state = fock_engine.apply_two_mode_squeezer(vac, (0, 1), zeta, leakage_bound=p["leakage_bound"])
    rows = []
    for n in range(cutoff + 1):
        c = state.amplitude((n, n))
        rows.append([n, c.real, c.imag, math.tanh(zeta) ** n / math.cosh(zeta)])
    g = gaussian_engine.tmsv_gaussian(zeta)
    _, cov = fock_engine.gaussian_moments(state)
    summary = {
        "mean_photons": fock_engine.mean_photon_numbers(state).tolist(),
        "thermal_N": math.sinh(zeta) ** 2,
        "leakage": state.leakage,
        "gaussian_fock_cov_max_diff": float(np.max(np.abs(cov - g.cov))),
    }
    if p.get("omega") is not None:
        summary["temperature"] = gaussian_engine.tmsv_temperature(zeta, p["omega"])
    return Table(["n", "amplitude_re", "amplitude_im", "closed_form"], rows, summary)


def _run_lindblad(p: dict, seed: int) -> Table:
    params = open_systems.ReservoirParams(p["gamma1"], p["gamma2"])
    init = p["initial"]
    state = gaussian_engine.squeezed_thermal(init["N"], init["r"], init["angle"])
    alpha = complex(init["alpha_re"], init["alpha_im"])
    state = gaussian_engine.GaussianState(gaussian_engine.coherent([alpha]).mean, state.cov)
    times = _sweep(p["times"])
    if np.any(times < 0):
        raise ValidationError("times must be nonnegative")
    columns = ["t", "eta", "mean_q", "mean_p", "var_q", "cov_qp", "var_p", "purity"]
    rows, outs = [], []
    for t in times:
        ch = open_systems.channel_from_rates(params, float(t))
        out = open_systems.apply_channel(state, ch)
        outs.append(out)
        rows.append([t, ch.eta, *out.mean, out.cov[0, 0], out.cov[0, 1], out.cov[1, 1], gaussian_engine.purity(out)])
    summary = {"occupation": params.occupation if params.gamma1 != params.gamma2 else None}
    if p["grid"]:
        columns.append("grid_linf")
        grid = open_systems.PhaseSpaceGrid.covering([state, *outs], points=p["grid_points"])
        W = open_systems.gaussian_on_grid(state, grid)
        dt_max = open_systems.max_stable_step(grid, params)
        now = 0.0
        for row, t, out in zip(rows, times, outs):
            span = float(t) - now
            if span < 0:
                raise ValidationError("grid evolution needs nondecreasing times")
            steps = max(1, math.ceil(span / dt_max)) if span > 0 else 0
            if steps:
                W = open_systems.evolve_fokker_planck(W, grid, params, span / steps, steps)
            now = float(t)
            row.append(float(np.max(np.abs(W - open_systems.gaussian_on_grid(out, grid)))))
    return Table(columns, rows, summary)


def _run_chsh(p: dict, seed: int) -> Table:
    kind = p["state"]
    if kind == "singlet":
        state = bell.singlet()
    elif kind == "werner":
        state = bell.werner(p["p"])
    elif kind == "mixed":
        state = bell.maximally_mixed()
    else:
        state = bell.product_state([1, 0], [0, 1])
    opt = bell.chsh_maximize(state, restarts=p["restarts"], seed=seed)
    row = [opt.value, bell.horodecki_bound(state), opt.pattern]
    for s in opt.settings:
        row.extend(s.vector.tolist())
    cols = ["value", "horodecki_bound", "pattern"]
    for name in ("a1", "a2", "a1p", "a2p"):
        cols.extend(f"{name}_{c}" for c in "xyz")
    return Table(cols, [row], {"classical_bound": 2.0, "tsirelson_bound": 2 * math.sqrt(2)})


def default_flow(alpha: float, steps=(), c_prime: float = 1.0, x_max: float | None = None) -> horizon.FlowProfile:
    """``u = -c' (1 - tanh(2 alpha x / c') / 2)``: one horizon at 0 with gradient ``alpha``."""
    w = 2 * alpha / c_prime
    end = x_max if x_max is not None else max([20.0] + [x + 20.0 for x, _ in steps])
    return horizon.FlowProfile(
        velocity=lambda x: -c_prime * (1 - 0.5 * np.tanh(w * np.asarray(x, dtype=float))),
        domain=(-5.0, end),
        epsilon=1.0 / c_prime ** 2,
        steps=tuple(tuple(s) for s in steps),
        du_dx=lambda x: 0.5 * c_prime * w / np.cosh(w * np.asarray(x, dtype=float)) ** 2,
    )


def _run_hawking(p: dict, seed: int) -> Table:
    omegas = _sweep(p["omegas"])
    flow = None
    if "flow" in p:
        flow = horizon.load_flow(p["flow"])
    elif p.get("steps"):
        flow = default_flow(p["alpha"], p["steps"])
    alpha = p["alpha"] if flow is None else None
    spec = horizon.hawking_spectrum(omegas, alpha=alpha, flow=flow, buffer_wavelengths=p["buffer_wavelengths"])
    rows = [list(r) for r in zip(spec.omega, spec.zeta, spec.nbar, spec.greybody)]
    fitted = spec.fitted_temperatures()
    summary = {
        "alpha": spec.alpha,
        "temperature": spec.temperature,
        "fitted_temperature_spread": float(np.max(fitted) - np.min(fitted)),
    }
    if p["si_alpha"] is not None:
        summary["temperature_kelvin"] = horizon.hawking_temperature_si(p["si_alpha"])
    return Table(["omega", "zeta", "nbar", "greybody"], rows, summary)


def _run_network(p: dict, seed: int) -> Table:
    text = Path(p["file"]).read_text() if "file" in p else p["text"]
    net = parse_network(text)
    S = net.transform()
    rows = []
    for name, block in (("B", S.block_B), ("C", S.block_C)):
        for i in range(S.mode_count):
            for j in range(S.mode_count):
                z = complex(block[i, j])
                rows.append([name, i + 1, j + 1, z.real, z.imag])
    summary = {
        "modes": S.mode_count,
        "passive": S.is_passive,
        "quasi_unitarity_defect": mode_core.quasi_unitarity_defect(S),
        "canonical_text": net.to_text(),
    }
    return Table(["block", "i", "j", "re", "im"], rows, summary)


SCENARIO_TABLE: dict[str, Scenario] = {
    "transfer": Scenario(
        _obj({
            "layers": {"type": "array", "items": _LAYER},
            "left": _obj({"eps": _POS, "mu": _POS}, ["eps"]),
            "right": _obj({"eps": _POS, "mu": _POS}, ["eps"]),
            "profile": {"type": "string"},
            "quarter_wave": _obj({"n_high": _POS, "n_low": _POS, "periods": {"type": "integer", "minimum": 1},
                                  "design_omega": _POS, "ambient": _POS},
                                 ["n_high", "n_low", "periods", "design_omega"]),
            "omegas": _POS_SWEEP,
            "method": {"enum": ["auto", "exact", "ode"]},
        }),
        {"quarter_wave": {"n_high": 1.5, "n_low": 1.0, "periods": 8, "design_omega": 1.0},
         "omegas": {"start": 0.5, "stop": 1.5, "num": 101}, "method": "auto"},
        _run_transfer,
        "reflectance/transmittance sweep of a 1D dielectric",
    ),
    "hom": Scenario(
        _obj({"theta": _SWEEP, "phi": _NUM, "psi": _NUM, "lam": _NUM}),
        {"theta": {"start": 0.0, "stop": math.pi, "num": 181}, "phi": 0.0, "psi": 0.0, "lam": 0.0},
        _run_hom,
        "coincidence probability of |1,1> behind a beam splitter",
    ),
    "fock-split": Scenario(
        _obj({"n": {"type": "integer", "minimum": 0, "maximum": fock_engine.MAX_CUTOFF},
              "tau_sq": {"type": "number", "minimum": 0, "maximum": 1}}),
        {"n": 5, "tau_sq": 0.5},
        _run_fock_split,
        "photon-number split of |n,0> against the binomial law",
    ),
    "tmsv": Scenario(
        _obj({"zeta": _NUM, "cutoff": {"type": "integer", "minimum": 1, "maximum": fock_engine.MAX_CUTOFF},
              "leakage_bound": _POS, "omega": _POS}),
        {"zeta": 0.5, "cutoff": 24, "leakage_bound": fock_engine.DEFAULT_LEAKAGE_BOUND},
        _run_tmsv,
        "two-mode squeezed vacuum amplitudes and moments",
    ),
    "lindblad": Scenario(
        _obj({
            "gamma1": {"type": "number", "minimum": 0},
            "gamma2": {"type": "number", "minimum": 0},
            "initial": _obj({"N": {"type": "number", "minimum": 0}, "r": _NUM, "angle": _NUM,
                             "alpha_re": _NUM, "alpha_im": _NUM}),
            "times": _SWEEP,
            "grid": {"type": "boolean"},
            "grid_points": {"type": "integer", "minimum": 11},
        }),
        {"gamma1": 1.0, "gamma2": 0.0,
         "initial": {"N": 0.0, "r": 0.0, "angle": 0.0, "alpha_re": 1.0, "alpha_im": 0.0},
         "times": {"start": 0.0, "stop": 2.0, "num": 21}, "grid": False, "grid_points": 301},
        _run_lindblad,
        "single-mode absorber/amplifier evolution of a Gaussian state",
    ),
    "chsh": Scenario(
        _obj({"state": {"enum": ["singlet", "werner", "product", "mixed"]},
              "p": {"type": "number", "minimum": 0, "maximum": 1},
              "restarts": {"type": "integer", "minimum": 1}}),
        {"state": "singlet", "p": 1.0, "restarts": 3},
        _run_chsh,
        "maximal CHSH value of a two-photon polarization state",
    ),
    "hawking": Scenario(
        _obj({
            "alpha": _POS,
            "omegas": _POS_SWEEP,
            "flow": {"type": "string"},
            "steps": {"type": "array", "items": {"type": "array", "items": [_NUM, _POS], "minItems": 2, "maxItems": 2}},
            "buffer_wavelengths": _POS,
            "si_alpha": {"oneOf": [_POS, {"type": "null"}]},
        }),
        {"alpha": 1.0, "omegas": {"start": 0.05, "stop": 3.0, "num": 60},
         "buffer_wavelengths": horizon.DEFAULT_BUFFER_WAVELENGTHS, "si_alpha": None},
        _run_hawking,
        "Hawking spectrum with optional grey-body correction",
    ),
    "network": Scenario(
        _obj({"text": {"type": "string"}, "file": {"type": "string"}}),
        {"text": "bs 1 2 theta=1.5707963267948966\n"},
        _run_network,
        "compose a network from the line-oriented description",
    ),
}


# ---------------------------------------------------------------------------
# Plumbing
# ---------------------------------------------------------------------------


class UsageError(Exception):
    pass


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and not set(v) & {"start", "stop", "num"}:
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _field_path(err: jsonschema.ValidationError) -> str:
    parts = ["params"] + [str(p) for p in err.absolute_path]
    return ".".join(parts)


def validate_params(name: str, params: dict) -> dict:
    """Merge defaults under ``params`` and validate; raises ``UsageError`` with a field path."""
    sc = SCENARIO_TABLE[name]
    merged = _merge(sc.defaults, params)
    for exclusive in (("layers", "profile", "quarter_wave"), ("flow", "steps"), ("text", "file")):
        given = [k for k in exclusive if k in params]
        if len(given) > 1:
            raise UsageError(f"params: give at most one of {', '.join(given)}")
        if given:
            for k in exclusive:
                if k != given[0]:
                    merged.pop(k, None)
    validator = jsonschema.Draft7Validator(sc.schema)
    errors = sorted(validator.iter_errors(merged), key=lambda e: list(e.absolute_path))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise UsageError(f"{_field_path(err)}: {err.message}")
    return merged


def _parse_override(text: str) -> tuple[list[str], object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise UsageError(f"-p expects key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def _set_path(d: dict, path: list[str], value) -> None:
    for k in path[:-1]:
        d = d.setdefault(k, {})
        if not isinstance(d, dict):
            raise UsageError(f"-p {'.'.join(path)}: {k} is not an object")
    d[path[-1]] = value


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else repr(f)
    return v


def render(name: str, params: dict, table: Table, fmt: str, seed: int) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for r in table.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    data = {c: [r[i] for r in table.rows] for i, c in enumerate(table.columns)}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "scenario": name,
        "seed": seed,
        "params": params,
        "columns": table.columns,
        "data": data,
        "summary": table.summary,
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photonic", description="Simulate simple optical instruments.")
    sub = parser.add_subparsers(dest="scenario", metavar="scenario")
    for name in SCENARIOS:
        sp = sub.add_parser(name, help=SCENARIO_TABLE[name].help, description=SCENARIO_TABLE[name].help)
        sp.add_argument("--config", type=Path, help="JSON file with parameters")
        sp.add_argument("--out", type=Path, help="output path (default: standard output)")
        sp.add_argument("--format", choices=("csv", "json"), help="output format (default: csv)")
        sp.add_argument("--seed", type=int, help="seed for randomized searches (default: 0)")
        sp.add_argument("-p", "--param", action="append", default=[], metavar="KEY=VALUE",
                        help="override a parameter; VALUE is parsed as JSON when possible; dotted keys reach nested fields")
    return parser


def _load_config(path: Path) -> dict | None:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    if not text.strip():
        return None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path}: top level must be an object")
    return data or None


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    """Run the CLI; returns the exit status (0 ok, 1 module error, 2 usage error)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.scenario is None:
        parser.print_usage(stderr)
        return 2
    name = args.scenario
    try:
        params: dict = {}
        fmt, out, seed = "csv", None, 0
        if args.config is not None:
            cfg = _load_config(args.config)
            if cfg is None:
                parser.print_usage(stderr)
                print(f"photonic {name}: error: config {args.config} is empty", file=stderr)
                return 2
            if "params" in cfg or {"out", "format", "seed", "scenario"} & set(cfg):
                extra = set(cfg) - {"params", "out", "format", "seed", "scenario"}
                if extra:
                    raise UsageError(f"config: unknown top-level field(s) {', '.join(sorted(extra))}")
                if cfg.get("scenario", name) != name:
                    raise UsageError(f"config: scenario is {cfg['scenario']!r} but the command is {name!r}")
                params = cfg.get("params", {})
                if not isinstance(params, dict):
                    raise UsageError("config.params: must be an object")
                fmt = cfg.get("format", fmt)
                out = cfg.get("out", out)
                seed = cfg.get("seed", seed)
            else:
                params = cfg
        for item in args.param:
            path, value = _parse_override(item)
            _set_path(params, path, value)
        fmt = args.format or fmt
        out = args.out if args.out is not None else out
        seed = args.seed if args.seed is not None else seed
        if fmt not in ("csv", "json"):
            raise UsageError(f"config.format: must be 'csv' or 'json', got {fmt!r}")
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise UsageError(f"config.seed: must be a nonnegative integer, got {seed!r}")
        resolved = validate_params(name, params)
    except UsageError as exc:
        print(f"photonic {name}: error: {exc}", file=stderr)
        return 2
    try:
        table = SCENARIO_TABLE[name].run(resolved, seed)
    except (PhotonicError, OSError) as exc:
        print(f"photonic {name}: error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    text = render(name, resolved, table, fmt, seed)
    if out is None:
        stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            print(f"photonic {name}: error: cannot write {out}: {exc.strerror}", file=stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
