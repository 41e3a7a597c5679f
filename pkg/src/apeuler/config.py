"""Run configuration (TOML) and the JSON bundle of a built field."""
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from apeuler.assembly import AssembledField, EmbeddingPoint
from apeuler.base_flow import BaseFlow
from apeuler.errors import ConstructionError
from apeuler.frequencies import FrequencySeq, generate_frequencies
from apeuler.packing import LayoutSpec, PointLayout, select_points

BUNDLE_FORMAT = "apeuler-bundle"
BUNDLE_VERSION = 1


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class FrequencyConfig:
    mode: str = "sqrt_prime"
    c: float = 1.0
    eta: float = 1.0
    blocks: list = None


@dataclass
class ProbeConfig:
    weight_max: float = 10.0
    comp_max: int = 3
    budget: int = 10**7


@dataclass
class GridConfig:
    pressure: list = field(default_factory=lambda: [128, 256, 512])
    pressure_tol: float = 5e-4
    residual_points: int = 10_000
    residual_times: int = 20
    estimate_per_dim: int = 65
    estimate_times: list = field(default_factory=lambda: [0.0, 0.7, 3.1])
    phase_samples: int = 20
    drift_n: int = 256
    drift_dt: float = 1e-3
    drift_t: float = 1.0
    drift_tol: float = 1e-4
    drift_fine_n: int = 512
    drift_fine_dt: float = 5e-4


@dataclass
class RunConfig:
    d: int = 2
    m: int = 1
    S: int = 2
    epsilon: Fraction = Fraction(1, 10)
    J: list = field(default_factory=lambda: [2, 1, 1])
    K: int = None
    q: int = 8
    p: int = 8
    seed: int = 7
    frequencies: FrequencyConfig = field(default_factory=FrequencyConfig)
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    grids: GridConfig = field(default_factory=GridConfig)
    out: str = "runs"

    def __post_init__(self):
        if self.K is None:
            self.K = len(self.J)
        self.validate()

    def validate(self):
        def integer(name, value, low):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(name, f"expected an integer, got {value!r}")
            if value < low:
                raise ConfigError(name, f"must be >= {low}, got {value}")

        integer("d", self.d, 2)
        if self.d % 2:
            raise ConfigError("d", f"odd dimension {self.d} is out of scope; only even d is supported")
        integer("m", self.m, 1)
        if self.m >= self.d:
            raise ConfigError("m", f"must be below d={self.d}, got {self.m}")
        integer("S", self.S, 1)
        integer("seed", self.seed, 0)
        if not isinstance(self.J, list) or not self.J:
            raise ConfigError("J", "expected a nonempty list of positive integers")
        for i, j in enumerate(self.J):
            integer(f"J[{i}]", j, 1)
        integer("K", self.K, 1)
        if self.K > len(self.J):
            raise ConfigError("K", f"K={self.K} exceeds len(J)={len(self.J)}")
        # the audited ranges reach velocity order 2S+2 and drift order S+1
        integer("q", self.q, 2 * self.S + 3)
        integer("p", self.p, self.S + 1)
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon", f"must lie in (0, 1), got {self.epsilon}")
        bound = (4 * max(self.J)) ** (-1.0 / self.m)
        if not float(self.epsilon) < bound:
            raise ConfigError("epsilon", f"{self.epsilon} is not below (4 ||J||_inf)^(-1/m) = {bound:.6g}, "
                                         "so it cannot be below eps_0")
        f = self.frequencies
        if f.mode not in ("sqrt_prime", "user"):
            raise ConfigError("frequencies.mode", f"unknown mode {f.mode!r}")
        if not f.c > 0:
            raise ConfigError("frequencies.c", f"must be positive, got {f.c}")
        if not f.eta > 0:
            raise ConfigError("frequencies.eta", f"must be positive, got {f.eta}")
        if f.mode == "user":
            if f.blocks is None or len(f.blocks) < self.K:
                raise ConfigError("frequencies.blocks", f"user mode needs {self.K} blocks")
        g = self.grids
        for i, n in enumerate(g.pressure):
            integer(f"grids.pressure[{i}]", n, 2)
            if n % 2:
                raise ConfigError(f"grids.pressure[{i}]", f"grid size must be even, got {n}")
        for name in ("drift_n", "drift_fine_n"):
            n = getattr(g, name)
            integer(f"grids.{name}", n, 2)
            if n % 2:
                raise ConfigError(f"grids.{name}", f"grid size must be even, got {n}")
        integer("grids.residual_points", g.residual_points, 1)
        integer("grids.residual_times", g.residual_times, 1)

    def to_dict(self):
        out = asdict(self)
        out["epsilon"] = str(self.epsilon)
        return out


def parse_epsilon(value):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ConfigError("epsilon", f"expected a rational string such as \"1/10\", got {value!r}")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError("epsilon", f"cannot parse {value!r} as a rational") from exc


def _section(cls, data, name):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(name, "expected a table")
    known = cls.__dataclass_fields__
    for key in data:
        if key not in known:
            raise ConfigError(f"{name}.{key}", "unknown key")
    return cls(**data)


def config_from_dict(data):
    data = dict(data)
    known = RunConfig.__dataclass_fields__
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown key")
    kwargs = {k: v for k, v in data.items() if k not in ("frequencies", "probe", "grids")}
    if "epsilon" in kwargs:
        kwargs["epsilon"] = parse_epsilon(kwargs["epsilon"])
    return RunConfig(
        frequencies=_section(FrequencyConfig, data.get("frequencies"), "frequencies"),
        probe=_section(ProbeConfig, data.get("probe"), "probe"),
        grids=_section(GridConfig, data.get("grids"), "grids"),
        **kwargs,
    )


def load_config(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"invalid TOML: {exc}") from exc
    return config_from_dict(data)


# -- construction and bundles ----------------------------------------------------


def build(cfg):
    """Layout and frequencies for ``cfg``; raises ConfigError on infeasibility."""
    spec = LayoutSpec(cfg.m, tuple(cfg.J[: cfg.K]), cfg.epsilon)
    try:
        layout = select_points(spec, rng_seed=cfg.seed)
    except ConstructionError as exc:
        raise ConfigError("epsilon", str(exc)) from exc
    fq = cfg.frequencies
    freqs = generate_frequencies(spec, cfg.d, cfg.S, c=fq.c, mode=fq.mode,
                                 user_blocks=fq.blocks, eta=fq.eta)
    return layout, freqs


def make_bundle(cfg, layout, freqs, pressure_scale=1.0):
    return {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "parameters": {
            "d": cfg.d, "m": cfg.m, "S": cfg.S, "epsilon": str(cfg.epsilon), "K": cfg.K,
            "J": list(cfg.J[: cfg.K]), "q": cfg.q, "p": cfg.p, "seed": cfg.seed,
            "pressure_scale": pressure_scale,
        },
        "layout": {"strategy": layout.strategy, "eps11": layout.eps11, "records": layout.to_records()},
        "frequencies": freqs.to_dict(),
        "config": cfg.to_dict(),
    }


def dump_bundle(bundle):
    # float repr is the shortest decimal that round-trips, so reloads are bit-exact
    return json.dumps(bundle, indent=2, sort_keys=True) + "\n"


def load_bundle(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("<bundle>", f"invalid JSON: {exc}") from exc
    if data.get("format") != BUNDLE_FORMAT:
        raise ConfigError("<bundle>", "not an apeuler bundle")
    return data


def field_from_bundle(data, theta=None):
    """``(AssembledField, RunConfig)`` from a loaded bundle."""
    par = data["parameters"]
    cfg = config_from_dict(data["config"])
    spec = LayoutSpec(par["m"], tuple(par["J"]), par["epsilon"])
    layout = PointLayout.from_records(spec, data["layout"]["records"], strategy=data["layout"]["strategy"])
    freqs = FrequencySeq.from_dict(data["frequencies"])
    if theta is not None and not isinstance(theta, EmbeddingPoint):
        theta = EmbeddingPoint(theta)
    af = AssembledField(BaseFlow(par["d"], par["q"]), par["S"], layout, freqs, par["p"], K=par["K"],
                        theta=theta, pressure_scale=float(par.get("pressure_scale", 1.0)))
    return af, cfg
