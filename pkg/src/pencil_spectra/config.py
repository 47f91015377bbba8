"""Material config files: a flat key-value text format with two sections.

Example::

    # Drude metal against a constant dielectric
    scale = 1.0            # optional, applies to both sides (default 1.0)

    [plus]
    kind = "constant"
    value = 2.0

    [minus]
    kind = "drude"
    omega_p = 0.8
    gamma = 1.0
    background = 1.0       # optional (default 1.0)

Values are Python literals (floats, complex like ``1+2j``, lists for the
rational kind). Recognized kinds and their keys:

* ``constant``: value
* ``drude``: omega_p, gamma, background (optional)
* ``rational``: numerator, denominator (coefficient lists, descending powers)

Unknown keys, missing keys, and bad literals raise ConfigError naming the
offending key and line.
"""

from __future__ import annotations

import ast

from .dielectric import DielectricModel, InterfaceProblem
from .errors import ConfigError

_SIDE_KEYS = {
    "constant": {"kind", "value"},
    "drude": {"kind", "omega_p", "gamma", "background"},
    "rational": {"kind", "numerator", "denominator"},
}
_REQUIRED = {
    "constant": {"value"},
    "drude": {"omega_p", "gamma"},
    "rational": {"numerator", "denominator"},
}


def _parse_literal(value, key, lineno, source):
    try:
        return ast.literal_eval(value)
    except (ValueError, SyntaxError) as exc:
        raise ConfigError(
            f"{source}:{lineno}: invalid value for key {key!r}: {value!r}") from exc


def parse_problem_config(text: str, source: str = "<config>") -> InterfaceProblem:
    sections: dict = {"": {}}
    current = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in ("plus", "minus"):
                raise ConfigError(f"{source}:{lineno}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        sections.setdefault(current, {})[key] = (_parse_literal(value.strip(), key, lineno, source), lineno)

    top = sections.get("", {})
    for key in top:
        if key != "scale":
            raise ConfigError(f"{source}: unknown top-level key {key!r} "
                              f"(line {top[key][1]}); only 'scale' is allowed")
    scale = float(top.get("scale", (1.0, 0))[0])

    models = {}
    for side in ("plus", "minus"):
        if side not in sections:
            raise ConfigError(f"{source}: missing [{side}] section")
        body = sections[side]
        if "kind" not in body:
            raise ConfigError(f"{source}: section [{side}] is missing key 'kind'")
        kind, kind_line = body["kind"]
        if not isinstance(kind, str) or kind not in _SIDE_KEYS:
            raise ConfigError(
                f"{source}:{kind_line}: key 'kind' must be one of "
                f"{sorted(_SIDE_KEYS)}, got {kind!r}")
        allowed = _SIDE_KEYS[kind]
        for key, (_, lineno) in body.items():
            if key not in allowed:
                raise ConfigError(
                    f"{source}:{lineno}: key {key!r} is not valid for kind {kind!r} "
                    f"(allowed: {sorted(allowed - {'kind'})})")
        for key in _REQUIRED[kind]:
            if key not in body:
                raise ConfigError(
                    f"{source}: section [{side}] with kind {kind!r} is missing key {key!r}")
        vals = {key: v for key, (v, _) in body.items()}
        try:
            if kind == "constant":
                models[side] = DielectricModel.constant(vals["value"], scale=scale)
            elif kind == "drude":
                models[side] = DielectricModel.drude(
                    vals["omega_p"], vals["gamma"],
                    background=vals.get("background", 1.0), scale=scale)
            else:
                models[side] = DielectricModel.rational(
                    vals["numerator"], vals["denominator"], scale=scale)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: section [{side}]: {exc}") from exc

    return InterfaceProblem(plus=models["plus"], minus=models["minus"])


def load_problem(path) -> InterfaceProblem:
    with open(path, encoding="utf-8") as fh:
        return parse_problem_config(fh.read(), source=str(path))
