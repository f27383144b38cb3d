"""System-under-test models: uniform, mixed, and variable-strength configurations.

A model is a list of discrete parameters (each with its own value count), a
main interaction strength ``t``, and optionally a set of sub-configurations
that must be covered at a higher strength over a subset of the parameters.

The textual grammar is exponential notation: ``"2^3 3^2"`` describes three
binary parameters followed by two ternary ones.  Sub-configurations are given
as ``"<params>:<strength>"`` where ``<params>`` is a range (``"0-2"``), an
explicit list (``"0,1,2"``), or a mix (``"0,2-4"``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import groupby


class ModelError(ValueError):
    """Malformed model spec or inconsistent strength configuration."""


@dataclass(frozen=True)
class SubConfig:
    """Higher-strength coverage requirement over a subset of parameters."""

    params: tuple[int, ...]
    strength: int


@dataclass(frozen=True)
class SystemModel:
    """A system description: per-parameter value counts plus coverage strengths.

    ``values[i]`` is the number of values of parameter ``i``; individual values
    are always handled as 0-based indices.  ``main_strength`` applies to every
    parameter combination; each entry of ``sub_configs`` adds a stronger
    requirement on its own parameter subset.
    """

    values: tuple[int, ...]
    main_strength: int
    sub_configs: tuple[SubConfig, ...] = field(default=())

    def __post_init__(self):
        if not self.values:
            raise ModelError("model has no parameters")
        for i, v in enumerate(self.values):
            if v < 2:
                raise ModelError(f"parameter {i} needs at least two values, got {v}")
        p = len(self.values)
        if not 2 <= self.main_strength <= p:
            raise ModelError(
                f"main strength must satisfy 2 <= t <= {p}, got {self.main_strength}"
            )
        for sub in self.sub_configs:
            if not sub.params:
                raise ModelError("sub-configuration has no parameters")
            if list(sub.params) != sorted(set(sub.params)):
                raise ModelError(
                    f"sub-configuration parameters must be distinct and ascending: {sub.params}"
                )
            if sub.params[0] < 0 or sub.params[-1] >= p:
                raise ModelError(
                    f"sub-configuration parameter out of range 0..{p - 1}: {sub.params}"
                )
            if sub.strength <= self.main_strength:
                raise ModelError(
                    f"sub-strength {sub.strength} must exceed main strength {self.main_strength}"
                )
            if sub.strength > len(sub.params):
                raise ModelError(
                    f"sub-strength {sub.strength} exceeds its {len(sub.params)} parameters"
                )

    @property
    def param_count(self) -> int:
        return len(self.values)


_TERM_RE = re.compile(r"^(\d+)(?:\^(\d+))?$")


def parse_model(spec: str, t: int, sub_specs=()) -> SystemModel:
    """Parse an exponential-notation spec plus sub-configurations into a model.

    ``spec`` is whitespace-separated ``base^exponent`` terms (a bare ``base``
    means exponent 1); parameter order follows order of appearance.
    ``sub_specs`` is an iterable of ``(params_text, strength)`` pairs.
    """
    tokens = spec.split()
    if not tokens:
        raise ModelError(f"empty model spec {spec!r}")
    values: list[int] = []
    for token in tokens:
        m = _TERM_RE.match(token)
        if m is None:
            raise ModelError(f"malformed term {token!r} (expected base or base^exponent)")
        base = int(m.group(1))
        exponent = int(m.group(2)) if m.group(2) is not None else 1
        if base < 2:
            raise ModelError(f"term {token!r}: parameters need at least two values")
        if exponent < 1:
            raise ModelError(f"term {token!r}: exponent must be positive")
        values.extend([base] * exponent)
    subs = tuple(
        SubConfig(parse_param_list(text, len(values)), strength)
        for text, strength in sub_specs
    )
    return SystemModel(tuple(values), t, subs)


def parse_param_list(text: str, param_count: int) -> tuple[int, ...]:
    """Parse a sub-configuration parameter list like ``"0-2"`` or ``"0,1,4"``.

    An optional leading ``params`` word is accepted.  Indices are validated
    against ``param_count``, deduplicated entries are an error, and the result
    is sorted ascending.
    """
    body = text.strip()
    if body.lower().startswith("params"):
        body = body[len("params"):].strip()
    if not body:
        raise ModelError(f"empty parameter list in sub-configuration {text!r}")
    indices: list[int] = []
    for piece in body.split(","):
        piece = piece.strip()
        if re.fullmatch(r"\d+", piece):
            indices.append(int(piece))
        elif m := re.fullmatch(r"(\d+)\s*-\s*(\d+)", piece):
            lo, hi = int(m.group(1)), int(m.group(2))
            if lo > hi:
                raise ModelError(f"bad range {piece!r} in sub-configuration {text!r}")
            indices.extend(range(lo, hi + 1))
        else:
            raise ModelError(f"bad token {piece!r} in sub-configuration {text!r}")
    if len(indices) != len(set(indices)):
        raise ModelError(f"duplicate parameter index in sub-configuration {text!r}")
    out = tuple(sorted(indices))
    if out and out[-1] >= param_count:
        raise ModelError(
            f"sub-configuration {text!r} references parameter {out[-1]} "
            f"but the model has only {param_count}"
        )
    return out


def render_model(model: SystemModel) -> str:
    """Render the value counts back to exponential notation (grammar inverse)."""
    parts = []
    for base, run in groupby(model.values):
        n = len(list(run))
        parts.append(f"{base}^{n}" if n > 1 else f"{base}")
    return " ".join(parts)


def render_params(params: tuple[int, ...]) -> str:
    """Render sorted parameter indices compactly, e.g. ``(0,1,2,5) -> "0-2,5"``."""
    runs = []
    start = prev = params[0]
    for idx in params[1:]:
        if idx == prev + 1:
            prev = idx
            continue
        runs.append((start, prev))
        start = prev = idx
    runs.append((start, prev))
    return ",".join(f"{a}-{b}" if b > a else f"{a}" for a, b in runs)


def render_subs(model: SystemModel) -> str:
    """Render sub-configurations as ``params:strength`` joined by ``+`` (or ``none``)."""
    if not model.sub_configs:
        return "none"
    return "+".join(f"{render_params(s.params)}:{s.strength}" for s in model.sub_configs)


def exhaustive_count(model: SystemModel) -> int:
    """Number of test cases in the full Cartesian product of all parameters."""
    return math.prod(model.values)
