"""Line-oriented description of linear optical networks.

One element per line, applied to the light in the order written::

    modes 3                      # optional; otherwise the largest index used
    bs 1 2 theta=1.5708          # beam splitter, optional phi= psi= lam=
    sq 2 3 zeta=0.3              # two-mode squeezer
    phase 1 phi=0.2              # phase shift on one mode

Mode indices are 1-based.  ``#`` starts a comment.  The network's transform
is ``S_n ... S_2 S_1``, so the last line multiplies on the left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DSLError, PhotonicError
from .mode_core import (
    BeamSplitterParams,
    ModeTransform,
    beam_splitter,
    compose_all,
    phase_shift,
    two_mode,
    two_mode_squeezer,
)

# element -> (number of mode indices, required keys, optional keys)
ELEMENTS = {
    "bs": (2, ("theta",), ("phi", "psi", "lam")),
    "sq": (2, ("zeta",), ()),
    "phase": (1, ("phi",), ()),
}
MAX_MODES = 64


class Element(NamedTuple):
    kind: str
    modes: tuple[int, ...]
    params: dict
    line: int


@dataclass(frozen=True)
class Network:
    mode_count: int
    elements: tuple[Element, ...]

    def transform(self) -> ModeTransform:
        parts = [_element_transform(e, self.mode_count) for e in self.elements]
        if not parts:
            return ModeTransform.identity(self.mode_count)
        return compose_all(parts)

    def to_text(self) -> str:
        """Canonical text form; parsing it gives the same network."""
        lines = [f"modes {self.mode_count}"]
        for e in self.elements:
            idx = " ".join(str(m + 1) for m in e.modes)
            kv = " ".join(f"{k}={float(v)!r}" for k, v in e.params.items())
            lines.append(f"{e.kind} {idx} {kv}")
        return "\n".join(lines) + "\n"


def _element_transform(e: Element, M: int) -> ModeTransform:
    p = e.params
    try:
        if e.kind == "bs":
            params = BeamSplitterParams(Lambda=p.get("lam", 0.0), Psi=p.get("psi", 0.0),
                                        Theta=p["theta"], Phi=p.get("phi", 0.0))
            return two_mode(e.modes, M, beam_splitter(params))
        if e.kind == "sq":
            return two_mode(e.modes, M, two_mode_squeezer(p["zeta"]))
        return phase_shift(p["phi"], e.modes[0], M)
    except PhotonicError as exc:
        raise DSLError(str(exc), e.line) from exc


def _parse_number(token: str, key: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DSLError(f"{key}={token!r} is not a number", line) from None
    if not math.isfinite(value):
        raise DSLError(f"{key} must be finite, got {token!r}", line)
    return value


def _parse_index(token: str, line: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise DSLError(f"mode index {token!r} is not an integer", line) from None
    if value < 1:
        raise DSLError(f"mode indices start at 1, got {value}", line)
    return value - 1


def parse_network(text: str) -> Network:
    """Parse network text into its elements.

    Raises:
        DSLError: for an unknown element, a wrong number of mode indices, a
            missing or unknown parameter, or an index beyond the declared mode count.
    """
    declared = None
    elements: list[Element] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        head, *rest = body.split()
        if head == "modes":
            if declared is not None or elements:
                raise DSLError("'modes' must appear once, before any element", lineno)
            if len(rest) != 1:
                raise DSLError("'modes' takes exactly one integer", lineno)
            try:
                declared = int(rest[0])
            except ValueError:
                raise DSLError(f"mode count {rest[0]!r} is not an integer", lineno) from None
            if not 1 <= declared <= MAX_MODES:
                raise DSLError(f"mode count must lie in [1, {MAX_MODES}], got {declared}", lineno)
            continue
        if head not in ELEMENTS:
            raise DSLError(f"unknown element {head!r} (expected one of {', '.join(ELEMENTS)})", lineno)
        arity, required, optional = ELEMENTS[head]
        positional = [t for t in rest if "=" not in t]
        keyed = [t for t in rest if "=" in t]
        if len(positional) != arity:
            raise DSLError(f"'{head}' takes {arity} mode index(es), got {len(positional)}", lineno)
        if rest[:arity] != positional:
            raise DSLError(f"mode indices of '{head}' must come before its parameters", lineno)
        modes = tuple(_parse_index(t, lineno) for t in positional)
        if len(set(modes)) != len(modes):
            raise DSLError(f"'{head}' needs distinct modes, got {[m + 1 for m in modes]}", lineno)
        params = {}
        for token in keyed:
            key, _, value = token.partition("=")
            if key not in required and key not in optional:
                raise DSLError(f"'{head}' has no parameter {key!r}", lineno)
            if key in params:
                raise DSLError(f"parameter {key!r} given twice", lineno)
            params[key] = _parse_number(value, key, lineno)
        missing = [k for k in required if k not in params]
        if missing:
            raise DSLError(f"'{head}' is missing parameter(s) {', '.join(missing)}", lineno)
        if declared is not None and max(modes) >= declared:
            raise DSLError(f"mode index {max(modes) + 1} exceeds the declared {declared} modes", lineno)
        if max(modes) >= MAX_MODES:
            raise DSLError(f"mode index {max(modes) + 1} exceeds the limit of {MAX_MODES} modes", lineno)
        ordered = {k: params[k] for k in required + optional if k in params}
        elements.append(Element(head, modes, ordered, lineno))
    if declared is None:
        if not elements:
            raise DSLError("network is empty", 1)
        declared = max(max(e.modes) for e in elements) + 1
    return Network(declared, tuple(elements))


def network_dsl_parse(text: str) -> ModeTransform:
    """The transform of the network described by ``text``."""
    return parse_network(text).transform()
