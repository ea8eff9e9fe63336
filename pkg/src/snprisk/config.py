"""INI experiment configs: parsing, validation with line numbers, and
construction of model objects.

Any key can be overridden from the environment as
``SNPRISK_<SECTION>__<KEY>`` (for example ``SNPRISK_SHOCK__KIND=constant``).
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from scipy import stats

from .arrivals import (
    ExponentialLaw,
    FixedCount,
    HomogeneousPoisson,
    LinearIntensity,
    PiecewiseConstantIntensity,
    PoissonCount,
    Renewal,
    ScipyLaw,
)
from .heavytail import Degenerate, DependentSequenceGen, Pareto
from .risk import RiskScenario
from .seqmodel import DenseIID, DiagonalShock, IdentityMatrix, LowerTriangularShock, Norm, SequenceScenario
from .snp import ConstantShock, ContinuousOmega, DiscreteOmega, ExponentialShock, IndicatorShock

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "ENV_PREFIX", "DEFAULTS"]

ENV_PREFIX = "SNPRISK_"

DEFAULTS: Dict[str, Dict[str, str]] = {
    "run": {
        "command": "indicators",
        "n_paths": "100000",
        "indicators": "tail-ratio, ruin",
        "levels": "0.99, 0.999, 0.9999",
        "method": "plain",
        "workers": "1",
        "sup_mode": "skeleton+terminal",
    },
    "marginal": {"kind": "pareto", "alpha": "2", "scale": "1"},
    "counting": {"kind": "poisson", "rate": "1"},
    "scenario": {"horizon": "1"},
    "shock": {"kind": "constant"},
    "sequence": {"matrix": "identity", "norm": "l1", "min_exceedances": "200"},
    "extremal": {"modes": "numeric-limit, paper-closed-form, embedded-chain", "t_grid": "10, 20, 40, 80"},
    "h2": {"length": "5", "bound": "0.05"},
    "path": {},
}

COMMANDS = ("simulate-path", "tail-ratio", "ruin", "indicators", "spectral", "extremal-index",
            "convergence-study", "h2-check")


class ConfigError(Exception):
    """Validation failure; ``str()`` is anchored to a line of the config file."""

    def __init__(self, message: str, path: str = "<config>", line: int = 0):
        self.message, self.path, self.line = message, path, line
        super().__init__(f"{path}:{line}: {message}")


def _line_index(text: str) -> Dict[Tuple[str, Optional[str]], int]:
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    index: Dict[Tuple[str, Optional[str]], int] = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"^\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            index.setdefault((section, None), no)
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            index[(section, m.group(1).strip().lower())] = no
    return index


@dataclass
class ExperimentConfig:
    parser: configparser.ConfigParser
    path: str
    lines: Dict[Tuple[str, Optional[str]], int]
    overridden: Dict[Tuple[str, str], str]

    # ---- access with line-anchored errors

    def where(self, section: str, key: Optional[str] = None) -> int:
        return self.lines.get((section, key), self.lines.get((section, None), 0))

    def error(self, section: str, key: Optional[str], message: str) -> ConfigError:
        label = f"[{section}]" + (f" {key}" if key else "")
        src = " (from environment)" if (section, key) in self.overridden else ""
        return ConfigError(f"{label}: {message}{src}", self.path, self.where(section, key))

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def get(self, section: str, key: str, default: Optional[str] = None) -> str:
        if self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        if default is not None:
            return default
        raise self.error(section, key, "missing required key")

    def number(self, section: str, key: str, default: Optional[str] = None, positive: bool = False,
               integer: bool = False):
        raw = self.get(section, key, default)
        try:
            val = int(raw) if integer else float(raw)
        except ValueError:
            kind = "an integer" if integer else "a number"
            raise self.error(section, key, f"expected {kind}, got {raw!r}") from None
        if positive and not val > 0:
            raise self.error(section, key, f"must be positive, got {raw}")
        return val

    def numbers(self, section: str, key: str, default: Optional[str] = None) -> list:
        raw = self.get(section, key, default)
        try:
            return [float(v) for v in raw.replace(";", ",").split(",") if v.strip()]
        except ValueError:
            raise self.error(section, key, f"expected a comma-separated list of numbers, got {raw!r}") from None

    def words(self, section: str, key: str, default: Optional[str] = None) -> list:
        raw = self.get(section, key, default)
        return [v.strip().lower() for v in raw.split(",") if v.strip()]

    def choice(self, section: str, key: str, options, default: Optional[str] = None) -> str:
        val = self.get(section, key, default).lower()
        if val not in options:
            raise self.error(section, key, f"unknown value {val!r} (expected one of {', '.join(options)})")
        return val

    # ---- resolved view

    def resolved(self) -> Dict[str, Dict[str, str]]:
        """All sections with defaults filled in, as plain strings."""
        out: Dict[str, Dict[str, str]] = {}
        for section in sorted(set(DEFAULTS) | set(self.parser.sections())):
            vals = dict(DEFAULTS.get(section, {}))
            if self.parser.has_section(section):
                vals.update({k: v.strip() for k, v in self.parser.items(section)})
            if vals:
                out[section] = dict(sorted(vals.items()))
        return out

    @property
    def seed(self) -> Optional[int]:
        if not self.has("run", "seed"):
            return None
        seed = self.number("run", "seed", integer=True)
        if not 0 <= seed < 2**64:
            raise self.error("run", "seed", "seed must be an unsigned 64-bit integer")
        return seed

    def set(self, section: str, key: str, value: str) -> None:
        if not self.parser.has_section(section):
            self.parser.add_section(section)
        self.parser.set(section, key, value)

    # ---- builders

    def marginal(self):
        kind = self.choice("marginal", "kind", ("pareto", "stochastic-volatility"), "pareto")
        alpha = self.number("marginal", "alpha", "2", positive=True)
        scale = self.number("marginal", "scale", "1", positive=True)
        base = Pareto(alpha, scale)
        if kind == "pareto":
            return base
        phi = self.number("marginal", "persistence", "0.5")
        sd = self.number("marginal", "noise_sd", "0.5")
        try:
            return DependentSequenceGen(base, phi, sd)
        except ValueError as exc:
            raise self.error("marginal", "persistence", str(exc)) from None

    def _law(self, section: str, prefix: str):
        kind = self.choice(section, f"{prefix}", ("exponential", "deterministic", "gamma", "uniform"))
        if kind == "exponential":
            return ExponentialLaw(self.number(section, f"{prefix}_rate", "1", positive=True))
        if kind == "deterministic":
            return Degenerate(self.number(section, f"{prefix}_value", positive=True))
        if kind == "gamma":
            shape = self.number(section, f"{prefix}_shape", positive=True)
            return ScipyLaw(stats.gamma(shape, scale=self.number(section, f"{prefix}_scale", "1", positive=True)))
        lo = self.number(section, f"{prefix}_low", "0")
        hi = self.number(section, f"{prefix}_high")
        if not 0 <= lo < hi:
            raise self.error(section, f"{prefix}_high", "uniform law needs 0 <= low < high")
        return ScipyLaw(stats.uniform(lo, hi - lo))

    def counting(self):
        kind = self.choice("counting", "kind",
                           ("poisson", "linear", "piecewise", "renewal", "fixed", "poisson-count"), "poisson")
        try:
            if kind == "poisson":
                return HomogeneousPoisson(self.number("counting", "rate", "1", positive=True))
            if kind == "linear":
                return LinearIntensity(self.number("counting", "a", "0"), self.number("counting", "b", "0"))
            if kind == "piecewise":
                return PiecewiseConstantIntensity(tuple(self.numbers("counting", "breaks")),
                                                  tuple(self.numbers("counting", "rates")))
            if kind == "renewal":
                return Renewal(self._law("counting", "interarrival"))
            if kind == "fixed":
                return FixedCount(self.number("counting", "n", integer=True))
            return PoissonCount(self.number("counting", "mean", positive=True),
                                self.number("counting", "min_count", "0", integer=True))
        except ValueError as exc:
            raise self.error("counting", "kind", str(exc)) from None

    def horizon(self) -> float:
        return self.number("scenario", "horizon", "1", positive=True)

    def shock(self):
        kind = self.choice("shock", "kind", ("constant", "exponential", "indicator"), "constant")
        if kind == "constant":
            return ConstantShock(self.number("shock", "c", "1", positive=True))
        if kind == "indicator":
            return IndicatorShock()
        if self.has("shock", "omega_values"):
            vals = self.numbers("shock", "omega_values")
            probs = self.numbers("shock", "omega_probs", ",".join(["1"] * len(vals)))
            total = sum(probs)
            try:
                return ExponentialShock(DiscreteOmega(tuple(vals), tuple(p / total for p in probs)))
            except ValueError as exc:
                raise self.error("shock", "omega_probs", str(exc)) from None
        if self.has("shock", "omega_dist"):
            name = self.get("shock", "omega_dist")
            dist = getattr(stats, name, None)
            if dist is None or not hasattr(dist, "rvs") or not hasattr(dist, "numargs"):
                raise self.error("shock", "omega_dist", f"unknown scipy.stats distribution {name!r}")
            shapes = self.numbers("shock", "omega_shapes", "") if self.has("shock", "omega_shapes") else []
            frozen = dist(*shapes, loc=self.number("shock", "omega_loc", "0"),
                          scale=self.number("shock", "omega_scale", "1", positive=True))
            return ExponentialShock(ContinuousOmega(frozen))
        return ExponentialShock(self.number("shock", "omega", "1"))

    def risk_scenario(self) -> RiskScenario:
        marginal = self.marginal()
        if not isinstance(marginal, Pareto):
            raise self.error("marginal", "kind", "risk commands need an i.i.d. marginal")
        counting = self.counting()
        if isinstance(counting, (FixedCount, PoissonCount)):
            raise self.error("counting", "kind", "risk commands need a counting process, not a count law")
        return RiskScenario(marginal, counting, self.shock(), self.horizon())

    def sequence_scenario(self) -> SequenceScenario:
        matrix = self.choice("sequence", "matrix", ("identity", "diagonal", "lower-triangular", "dense"), "identity")
        norm_kind = self.choice("sequence", "norm", ("l1", "linf", "lp"), "l1")
        p = self.number("sequence", "p", "2") if norm_kind == "lp" else None
        try:
            norm = Norm(norm_kind, p)
        except ValueError as exc:
            raise self.error("sequence", "p", str(exc)) from None
        if matrix == "identity":
            spec = IdentityMatrix()
        elif matrix == "dense":
            spec = DenseIID(Pareto(self.number("sequence", "entry_alpha", positive=True),
                                   self.number("sequence", "entry_scale", "1", positive=True)))
        elif matrix == "diagonal":
            spec = DiagonalShock(self.shock())
        else:
            spec = LowerTriangularShock(self.shock())
        counting = self.counting()
        horizon = self.horizon() if not isinstance(counting, (FixedCount, PoissonCount)) else None
        try:
            return SequenceScenario(self.marginal(), counting, spec, norm, horizon)
        except (ValueError, TypeError) as exc:
            raise self.error("sequence", "matrix", str(exc)) from None

    def validate(self, command: str) -> None:
        """Build everything ``command`` needs so errors surface before any work."""
        if command not in COMMANDS:
            raise self.error("run", "command", f"unknown command {command!r}")
        self.number("run", "n_paths", DEFAULTS["run"]["n_paths"], positive=True, integer=True)
        self.number("run", "workers", "1", positive=True, integer=True)
        if command in ("spectral",):
            self.sequence_scenario()
        elif command == "h2-check":
            self.marginal()
            self.number("h2", "length", "5", positive=True, integer=True)
        else:
            self.risk_scenario()
        if command in ("tail-ratio", "ruin", "indicators", "convergence-study", "spectral", "h2-check"):
            self.thresholds_or_levels()
        if command in ("indicators", "convergence-study"):
            from .risk import INDICATORS

            for ind in self.words("run", "indicators", DEFAULTS["run"]["indicators"]):
                if ind not in INDICATORS:
                    raise self.error("run", "indicators", f"unknown indicator {ind!r}")
        self.choice("run", "method", ("plain", "conditional"), "plain")
        self.choice("run", "sup_mode", ("skeleton", "skeleton+terminal", "dense"), "skeleton+terminal")

    def thresholds_or_levels(self):
        """``("thresholds", xs)`` or ``("levels", qs)``."""
        if self.has("run", "thresholds"):
            xs = self.numbers("run", "thresholds")
            if not xs or any(x <= 0 for x in xs) or xs != sorted(xs):
                raise self.error("run", "thresholds", "thresholds must be positive and ascending")
            return "thresholds", xs
        qs = self.numbers("run", "levels", DEFAULTS["run"]["levels"])
        if not qs or any(not 0 < q < 1 for q in qs) or qs != sorted(qs):
            raise self.error("run", "levels", "levels must be ascending and lie in (0, 1)")
        return "levels", qs


def load_config(path: str, environ=None) -> ExperimentConfig:
    """Read ``path``, apply environment overrides and index line numbers."""
    environ = os.environ if environ is None else environ
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path, 0) from None
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("syntax error: key outside any [section]", path, exc.lineno) from None
    except configparser.ParsingError as exc:
        line, bad = exc.errors[0]
        raise ConfigError(f"syntax error: cannot parse {bad.strip()!r}", path, line) from None
    except configparser.Error as exc:
        line = getattr(exc, "lineno", 0) or 0
        raise ConfigError(f"syntax error: {exc.message.splitlines()[0]}", path, line) from None
    lines = _line_index(text)
    for section in parser.sections():
        if section.lower() not in DEFAULTS:
            raise ConfigError(f"[{section}]: unknown section", path, lines.get((section.lower(), None), 0))
    overridden = {}
    for name, value in sorted(environ.items()):
        if not name.startswith(ENV_PREFIX) or "__" not in name[len(ENV_PREFIX):]:
            continue
        section, key = name[len(ENV_PREFIX):].lower().split("__", 1)
        if section not in DEFAULTS:
            raise ConfigError(f"environment override {name}: unknown section [{section}]", path, 0)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)
        overridden[(section, key)] = value
    return ExperimentConfig(parser, path, lines, overridden)
