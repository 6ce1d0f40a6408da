"""Flat key=value spec files.

Grammar (one assignment per line, ``#`` starts a comment, blank lines ignored)::

    form    = pareto-sym | rv-sym | two-sided
    alpha   = <real > 2>              pareto-sym, rv-sym
    beta    = <real > 2>              two-sided (right tail)
    gamma   = <real > 2>              two-sided (left tail)
    L       = <sv>                    rv-sym
    L_plus  = <sv>                    two-sided
    L_minus = <sv>                    two-sided

    <sv>    = const:<c> | logpow:<p>[,<c>] | ramp:<c0>,<c1>

``logpow`` is c * log(sqrt(e^2 + x^2))^p so it stays finite at 0.  Every
spec is standardized to mean 0 and unit variance on load; pareto-sym uses
the closed-form constants.  Keys may also be joined by ``;`` on one line.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

from .density_model import (
    DensitySpec,
    SlowlyVarying,
    SymmetricPareto,
    SymmetricRV,
    TwoSided,
)

FORMS = ("pareto-sym", "rv-sym", "two-sided")
_REQUIRED = {
    "pareto-sym": ("alpha",),
    "rv-sym": ("alpha", "L"),
    "two-sided": ("beta", "gamma", "L_plus", "L_minus"),
}


class ConfigError(ValueError):
    """Malformed spec file."""


@dataclass(frozen=True)
class SpecConfig:
    form: str
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    L: str | None = None
    L_plus: str | None = None
    L_minus: str | None = None

    def items(self) -> list[tuple[str, str]]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                out.append((f.name, repr(v) if isinstance(v, float) else str(v)))
        return out

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.items())

    def build(self) -> DensitySpec:
        if self.form == "pareto-sym":
            return SymmetricPareto.standard(self.alpha)
        if self.form == "rv-sym":
            return SymmetricRV(self.alpha, parse_sv(self.L)).standardize()
        return TwoSided(self.beta, self.gamma, parse_sv(self.L_plus), parse_sv(self.L_minus)).standardize()


def parse_sv(text: str) -> SlowlyVarying:
    kind, _, args = text.strip().partition(":")
    try:
        vals = [float(a) for a in args.split(",")] if args else []
    except ValueError as exc:
        raise ConfigError(f"bad numbers in slowly varying spec {text!r}") from exc
    if kind == "const" and len(vals) == 1:
        return SlowlyVarying.constant(vals[0])
    if kind == "logpow" and len(vals) in (1, 2):
        return SlowlyVarying.log_power(vals[0], vals[1] if len(vals) == 2 else 1.0)
    if kind == "ramp" and len(vals) == 2:
        return SlowlyVarying.ramp(*vals)
    raise ConfigError(f"unknown slowly varying spec {text!r}")


def parse_config(text: str) -> SpecConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        for part in line.split(";"):
            part = part.strip()
            if not part:
                continue
            key, eq, val = part.partition("=")
            key, val = key.strip(), val.strip()
            if not eq or not key or not val:
                raise ConfigError(f"line {lineno}: expected key=value, got {part!r}")
            if key in raw:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = val
    form = raw.pop("form", None)
    if form not in FORMS:
        raise ConfigError(f"form must be one of {', '.join(FORMS)}; got {form!r}")
    allowed = set(_REQUIRED[form])
    extra = set(raw) - allowed
    if extra:
        raise ConfigError(f"keys not valid for form {form}: {', '.join(sorted(extra))}")
    missing = allowed - set(raw)
    if missing:
        raise ConfigError(f"form {form} needs: {', '.join(sorted(missing))}")
    kw: dict = {}
    for k, v in raw.items():
        if k in ("alpha", "beta", "gamma"):
            try:
                kw[k] = float(v)
            except ValueError as exc:
                raise ConfigError(f"{k} must be a number, got {v!r}") from exc
        else:
            parse_sv(v)  # validate early
            kw[k] = v
    return SpecConfig(form, **kw)


def load_config(path: str) -> SpecConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read spec file {path}: {exc}") from exc
