"""Sweep configuration: a TOML document validated into a ``SweepSpec``.

Grammar (every key optional)::

    preset = "fig3"            # start from a named preset, then override

    [sweep]
    axis = "gamma_M_dB"        # gamma_M_dB | secrecy_rate | beta | alpha_split
    values = [40, 50, 60]      # strictly increasing
    schemes = ["OSS", "IL", "IC"]
    methods = "both"           # analytic | mc | both
    combiner = "product"       # product | mean
    mc_samples = 1000000
    seed = 1

    [system]
    gamma_M_dB = 100
    beta = 0.5
    alpha_split = 0.5
    R_M = 1.0
    R_S = 1.0

    [gains]                    # direct average gains; excludes [geometry]
    Mm = 1.0                   # ... Ms, Ss, Sm, Me, Se

    [geometry.Ss]              # per-link overrides of the default layout
    distance = 30.0
    path_loss_exponent = 2.5
    fading_variance = 1.0
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..analytic import Combiner, Scheme, SystemConfig, db_to_linear, ic_beta_limit
from ..channel import LINKS, LinkGains, LinkGeometry
from ..errors import ConfigError, DomainError

AXES = ("gamma_M_dB", "secrecy_rate", "beta", "alpha_split")
METHODS = ("analytic", "mc")
MIN_MC_SAMPLES = 1000

_SWEEP_KEYS = {"axis", "values", "schemes", "methods", "combiner", "mc_samples", "seed"}
_SYSTEM_KEYS = {"gamma_M_dB", "beta", "alpha_split", "R_M", "R_S"}
_LINK_KEYS = {"distance", "path_loss_exponent", "fading_variance"}
_TOP_KEYS = {"preset", "sweep", "system", "gains", "geometry"}


@dataclass(frozen=True)
class SweepSpec:
    """A validated one-axis sweep.

    ``system`` holds the fixed operating point; the swept quantity is
    overwritten per point by :meth:`config_at`.
    """

    axis: str = "gamma_M_dB"
    values: tuple = (100.0,)
    system: SystemConfig = field(default_factory=lambda: SystemConfig.from_db(100.0))
    gains: LinkGains = field(default_factory=lambda: LinkGeometry.default().gains())
    gain_source: str = "geometry"
    schemes: tuple = (Scheme.OSS, Scheme.IL, Scheme.IC)
    methods: tuple = ("analytic",)
    combiner: Combiner = Combiner.PRODUCT
    mc_samples: int = 10 ** 6
    seed: int = 1

    def config_at(self, value: float) -> SystemConfig:
        if self.axis == "gamma_M_dB":
            return self.system.with_(gamma_M=db_to_linear(value))
        if self.axis == "secrecy_rate":
            return self.system.with_(R_M=value, R_S=value)
        return self.system.with_(**{self.axis: value})

    def with_(self, **changes):
        return replace(self, **changes)


class _Locator:
    """Maps ``(table, key)`` to the 1-based line where the key is set."""

    _HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\s]+?)\s*\]\s*(#.*)?$")
    _ASSIGN = re.compile(r"^\s*([A-Za-z0-9_]+)\s*=")

    def __init__(self, text):
        self.lines = {}
        table = ""
        for n, line in enumerate(text.splitlines(), start=1):
            m = self._HEADER.match(line)
            if m:
                table = re.sub(r"\s+", "", m.group(1))
                parts = table.split(".")
                # [geometry.Ss] also locates the parent table
                for k in range(1, len(parts) + 1):
                    self.lines.setdefault((".".join(parts[:k]), None), n)
                continue
            m = self._ASSIGN.match(line)
            if m:
                self.lines.setdefault((table, m.group(1)), n)

    def __call__(self, table, key=None):
        return self.lines.get((table, key), self.lines.get((table, None)))


def _number(value, what, line, *, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number, got {value!r}", line)
    if integer and not (isinstance(value, int) or float(value).is_integer()):
        raise ConfigError(f"{what} must be an integer, got {value!r}", line)
    if not math.isfinite(value):
        raise ConfigError(f"{what} must be finite, got {value!r}", line)
    return int(value) if integer else float(value)


def _table(doc, name, allowed, where):
    sub = doc.get(name, {})
    if not isinstance(sub, dict):
        raise ConfigError(f"[{name}] must be a table", where(name))
    for key in sub:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{name}]", where(name, key))
    return sub


def _choice(value, options, what, line):
    if value not in options:
        raise ConfigError(f"{what} must be one of {', '.join(options)}; got {value!r}", line)
    return value


def parse_config(text: str) -> SweepSpec:
    """Parse and validate a sweep document.

    Omitted fields take the preset's values if ``preset`` is given, and the
    default operating point otherwise (300 m links with a 30 m small cell,
    100 dB, R = 1, alpha = beta = 0.5, analytic OSS/IL/IC).

    Raises
    ------
    ConfigError
        On syntax errors, unknown keys, malformed values or an infeasible
        IC configuration; the message starts with the offending line.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"at line (\d+)", str(exc))
        if m:
            line = int(m.group(1))
        elif "end of document" in str(exc):
            line = max(len(text.splitlines()), 1)
        else:
            line = None
        raise ConfigError(f"syntax error: {exc}", line) from None
    where = _Locator(text)

    for key in doc:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown key {key!r}", where("", key) or where(key))

    spec = SweepSpec()
    if "preset" in doc:
        from .presets import PRESETS
        name = doc["preset"]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}",
                              where("", "preset"))
        spec = parse_config(PRESETS[name])

    sweep = _table(doc, "sweep", _SWEEP_KEYS, where)
    system = _table(doc, "system", _SYSTEM_KEYS, where)
    gains = _table(doc, "gains", set(LINKS), where)
    geometry = _table(doc, "geometry", set(LINKS), where)
    if "gains" in doc and "geometry" in doc:
        raise ConfigError("[gains] and [geometry] are mutually exclusive gain sources",
                          where("geometry"))

    changes = {}
    if "axis" in sweep:
        changes["axis"] = _choice(sweep["axis"], AXES, "axis", where("sweep", "axis"))
    if "values" in sweep:
        line = where("sweep", "values")
        raw = sweep["values"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("values must be a non-empty list", line)
        values = tuple(_number(v, "axis value", line) for v in raw)
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("axis values must be strictly increasing", line)
        changes["values"] = values
    if "schemes" in sweep:
        line = where("sweep", "schemes")
        raw = sweep["schemes"]
        if isinstance(raw, str):
            raw = [raw]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("schemes must be a non-empty list", line)
        names = [_choice(s, tuple(x.value for x in Scheme), "scheme", line) for s in raw]
        if len(set(names)) != len(names):
            raise ConfigError("schemes must not repeat", line)
        changes["schemes"] = tuple(Scheme(s) for s in names)
    if "methods" in sweep:
        raw = _choice(sweep["methods"], METHODS + ("both",), "methods",
                      where("sweep", "methods"))
        changes["methods"] = METHODS if raw == "both" else (raw,)
    if "combiner" in sweep:
        changes["combiner"] = Combiner(_choice(sweep["combiner"], ("product", "mean"),
                                               "combiner", where("sweep", "combiner")))
    if "mc_samples" in sweep:
        changes["mc_samples"] = _number(sweep["mc_samples"], "mc_samples",
                                        where("sweep", "mc_samples"), integer=True)
    if "seed" in sweep:
        line = where("sweep", "seed")
        seed = _number(sweep["seed"], "seed", line, integer=True)
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must lie in [0, 2**64)", line)
        changes["seed"] = seed

    if system:
        fields_ = {}
        for key, value in system.items():
            fields_[key] = _number(value, key, where("system", key))
        cfg = spec.system
        try:
            if "gamma_M_dB" in fields_:
                cfg = cfg.with_(gamma_M=db_to_linear(fields_.pop("gamma_M_dB")))
            cfg = cfg.with_(**fields_)
        except DomainError as exc:
            raise ConfigError(str(exc), where("system")) from None
        changes["system"] = cfg

    if "gains" in doc:
        line = where("gains")
        missing = [k for k in LINKS if k not in gains]
        if missing:
            raise ConfigError(f"[gains] needs all six links; missing {', '.join(missing)}", line)
        values = {k: _number(gains[k], f"gain {k}", where("gains", k)) for k in LINKS}
        try:
            changes["gains"] = LinkGains(**values)
        except DomainError as exc:
            raise ConfigError(str(exc), line) from None
        changes["gain_source"] = "gains"
    elif "geometry" in doc:
        base = LinkGeometry.default()
        links = {}
        for name in LINKS:
            link = getattr(base, name)
            over = geometry.get(name, {})
            table = f"geometry.{name}"
            if not isinstance(over, dict):
                raise ConfigError(f"[{table}] must be a table", where("geometry", name))
            for key in over:
                if key not in _LINK_KEYS:
                    raise ConfigError(f"unknown key {key!r} in [{table}]", where(table, key))
            kw = {k: _number(v, f"{table}.{k}", where(table, k)) for k, v in over.items()}
            try:
                links[name] = replace(link, **kw)
            except DomainError as exc:
                raise ConfigError(str(exc), where(table)) from None
        changes["gains"] = LinkGeometry(**links).gains()
        changes["gain_source"] = "geometry"

    spec = replace(spec, **changes)
    _validate(spec, where)
    return spec


def _validate(spec, where):
    if "mc" in spec.methods and spec.mc_samples < MIN_MC_SAMPLES:
        raise ConfigError(f"mc_samples must be >= {MIN_MC_SAMPLES} when Monte-Carlo is on",
                          where("sweep", "mc_samples"))
    line = where("sweep", "values")
    for v in spec.values:
        try:
            cfg = spec.config_at(v)
        except DomainError as exc:
            raise ConfigError(f"axis value {v}: {exc}", line) from None
        if Scheme.IC in spec.schemes:
            limit = ic_beta_limit(spec.gains)
            if cfg.beta > limit:
                raise ConfigError(
                    f"IC needs beta <= sigma2_Mm/sigma2_Sm = {limit:.6g}, got beta = "
                    f"{cfg.beta}", where("sweep", "values") if spec.axis == "beta"
                    else where("system", "beta"))
        if cfg.beta <= 0 and (Scheme.IL in spec.schemes or Scheme.IC in spec.schemes):
            raise ConfigError("non-orthogonal schemes need beta > 0",
                              line if spec.axis == "beta" else where("system", "beta"))
