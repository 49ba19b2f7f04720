"""Model configuration files.

A config is a JSON object whose numbers are given as decimal strings so that
exact rational arithmetic is preserved::

    {
      "beta1": [[1, 0, "1"], [0, 1, "1"]],
      "beta2": [[1, 0, "1"], [0, 1, "1"]],
      "l2": [],
      "L0": "-1",
      "theta0": "0.1",
      "epsilon": "0.1",
      "tolerances": {"delta_rel": "1e-9"}
    }

Plain JSON numbers and ``"p/q"`` strings are accepted as well; both are
converted exactly.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any

from .classifier import ZeroBand
from .errors import ChencinerError
from .normal_form import NormalFormModel, TaylorSeries2D

__all__ = ["ConfigError", "ModelConfig", "parse_config", "load_config", "fraction_to_str", "TOLERANCE_KEYS"]

TOLERANCE_KEYS = ("delta_rel", "beta_rel", "root_abs", "trace_tol", "convergence_tol")
_DEFAULT_TOL = {"delta_rel": 1e-9, "beta_rel": 1e-12, "root_abs": 1e-12, "trace_tol": 1e-12, "convergence_tol": 1e-6}


class ConfigError(ChencinerError, ValueError):
    """Malformed configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _to_fraction(value: Any, path: str) -> Fraction:
    if isinstance(value, bool):
        raise ConfigError(path, "expected a number, got a boolean")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ConfigError(path, "value must be finite")
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ConfigError(path, "value must be finite")
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return Fraction(text)
            dec = Decimal(text)
        except (ValueError, ZeroDivisionError, InvalidOperation):
            raise ConfigError(path, f"not a decimal or rational string: {value!r}") from None
        if not dec.is_finite():
            raise ConfigError(path, "value must be finite")
        return Fraction(dec)
    raise ConfigError(path, f"expected a decimal string, got {type(value).__name__}")


def fraction_to_str(q: Fraction) -> str:
    """Exact text form: a terminating decimal when possible, else ``p/q``."""
    d = q.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = 0
    while (q * 10**digits).denominator != 1:
        digits += 1
    scaled = q.numerator * 10**digits // q.denominator
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + s
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _parse_terms(raw: Any, path: str) -> tuple[tuple[int, int, Fraction], ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ConfigError(path, "expected a list of [i, j, value] triples")
    out = []
    seen = set()
    for k, item in enumerate(raw):
        p = f"{path}[{k}]"
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise ConfigError(p, "expected [i, j, value]")
        i, j, v = item
        for name, e in (("i", i), ("j", j)):
            if isinstance(e, bool) or not isinstance(e, int) or e < 0:
                raise ConfigError(p, f"exponent {name} must be a non-negative integer")
        if (i, j) in seen:
            raise ConfigError(p, f"duplicate exponent pair ({i}, {j})")
        seen.add((i, j))
        out.append((i, j, _to_fraction(v, p)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class ModelConfig:
    beta1: tuple[tuple[int, int, Fraction], ...]
    beta2: tuple[tuple[int, int, Fraction], ...]
    l2: tuple[tuple[int, int, Fraction], ...]
    L0: Fraction
    theta0: Fraction
    epsilon: Fraction = Fraction(1, 10)
    tolerances: dict[str, float] = field(default_factory=dict)

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, _DEFAULT_TOL[key]))

    @property
    def band(self) -> ZeroBand:
        return ZeroBand(self.tol("delta_rel"), self.tol("beta_rel"), self.tol("root_abs"))

    def to_model(self) -> NormalFormModel:
        if self.L0 == 0:
            raise ConfigError("L0", "must be nonzero")
        if not (0 < self.theta0 < math.pi):
            raise ConfigError("theta0", "must lie in (0, pi)")
        if self.epsilon <= 0:
            raise ConfigError("epsilon", "must be positive")
        for name in ("beta1", "beta2"):
            for k, (i, j, _) in enumerate(getattr(self, name)):
                if i == 0 and j == 0:
                    raise ConfigError(f"{name}[{k}]", "parameter functions must vanish at alpha = 0")
        for k, (i, j, v) in enumerate(self.l2):
            if i == 0 and j == 0 and v != self.L0:
                raise ConfigError(f"l2[{k}]", "constant term must equal L0 (or be omitted)")
        try:
            return NormalFormModel(
                TaylorSeries2D.from_terms(self.beta1),
                TaylorSeries2D.from_terms(self.beta2),
                TaylorSeries2D.from_terms(self.l2),
                self.L0,
                self.theta0,
                self.epsilon,
            )
        except ChencinerError as exc:
            raise ConfigError("model", str(exc)) from exc

    def to_dict(self) -> dict:
        def terms(ts):
            return [[i, j, fraction_to_str(v)] for i, j, v in ts]

        out = {
            "beta1": terms(self.beta1),
            "beta2": terms(self.beta2),
            "l2": terms(self.l2),
            "L0": fraction_to_str(self.L0),
            "theta0": fraction_to_str(self.theta0),
            "epsilon": fraction_to_str(self.epsilon),
        }
        if self.tolerances:
            out["tolerances"] = {k: repr(float(v)) for k, v in sorted(self.tolerances.items())}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    @classmethod
    def from_model(cls, m: NormalFormModel, tolerances: dict | None = None) -> "ModelConfig":
        def terms(s: TaylorSeries2D):
            return tuple((i, j, Fraction(v)) for (i, j), v in s.coefficients.items() if (i, j) != (0, 0))

        return cls(
            terms(m.beta1), terms(m.beta2), terms(m.l2),
            Fraction(m.L0), Fraction(m.theta0), Fraction(m.validity_radius),
            dict(tolerances or {}),
        )


_KNOWN = {"beta1", "beta2", "l2", "L0", "theta0", "epsilon", "tolerances"}


def parse_config(data: str | dict) -> ModelConfig:
    if isinstance(data, str):
        try:
            data = json.loads(data, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("$", "top level must be an object")
    unknown = sorted(set(data) - _KNOWN)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    for key in ("beta1", "beta2", "L0"):
        if key not in data:
            raise ConfigError(key, "missing required field")
    tol_raw = data.get("tolerances") or {}
    if not isinstance(tol_raw, dict):
        raise ConfigError("tolerances", "expected an object")
    tolerances = {}
    for k, v in tol_raw.items():
        if k not in TOLERANCE_KEYS:
            raise ConfigError(f"tolerances.{k}", "unknown tolerance")
        val = float(_to_fraction(v, f"tolerances.{k}"))
        if not val > 0:
            raise ConfigError(f"tolerances.{k}", "must be positive")
        tolerances[k] = val
    cfg = ModelConfig(
        beta1=_parse_terms(data["beta1"], "beta1"),
        beta2=_parse_terms(data["beta2"], "beta2"),
        l2=_parse_terms(data.get("l2"), "l2"),
        L0=_to_fraction(data["L0"], "L0"),
        theta0=_to_fraction(data.get("theta0", "0.1"), "theta0"),
        epsilon=_to_fraction(data.get("epsilon", "0.1"), "epsilon"),
        tolerances=tolerances,
    )
    cfg.to_model()  # enforce model invariants with field paths
    return cfg


def load_config(path: str | Path) -> ModelConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("$", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
