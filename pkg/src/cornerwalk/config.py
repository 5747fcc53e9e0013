"""Experiment configuration: one flat dataclass, loadable from INI files.

Every knob has a default, so an empty config is runnable; the INI file only
needs the keys it wants to change.  ``reference_ini`` returns a fully
commented config with every key at its default, which the CLI exposes as
``cornerwalk config-reference``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace

from .cantor_geometry import ScaleSequence
from .errors import ParameterError
from .oracle_grid import GridOracleParams
from .wos_engine import WosParams


@dataclass(frozen=True)
class ExperimentConfig:
    # [sequence]
    kind: str = "constant"
    values: tuple = (0.25,)
    # [campaign]
    depth: int = 4
    walkers: int = 100_000
    seed: int = 2024
    workers: int = 1
    batch_size: int = 131072
    # [wos]
    absorb_epsilon: float | None = None  # None: l(depth) * 1e-3
    start_radius: float = 8.0
    outer_radius: float = 16.0
    reentry_radius: float = 8.0
    max_steps: int = 1_000_000
    # [stats]
    count_floor: int = 100
    bootstrap_reps: int = 500
    # [continuity]
    deltas: tuple = (0.05, 0.02, 0.01)
    pattern: str = "alternating"
    control_seed_offset: int = 7777
    # [harnack]
    harnack_n: int = 1
    harnack_m: int = 1
    k_max: int = 3
    r2_threshold: float = 0.8
    # [delta]
    delta_j: int = 1
    # [oracle]
    oracle_depth: int = 2
    oracle_spacing: float | None = None  # None: l(oracle_depth) / 8
    oracle_start_radius: float = 1.25
    oracle_outer_radius: float = 2.5
    oracle_walkers: int = 200_000
    # [dims]
    dim_n_max: int = 10_000
    dim_window: int | None = None  # None: two cycles of the scale values
    # [output]
    out_dir: str = "."
    plots: bool = False

    # -- derived objects -----------------------------------------------------

    def sequence(self) -> ScaleSequence:
        if self.kind == "constant":
            if len(self.values) != 1:
                raise ParameterError("a constant sequence takes exactly one value")
            return ScaleSequence.constant(self.values[0])
        if self.kind == "periodic":
            return ScaleSequence.periodic(self.values)
        if self.kind == "explicit":
            return ScaleSequence.explicit(self.values)
        raise ParameterError(f"unknown sequence kind {self.kind!r}")

    def wos_params(self, depth: int | None = None) -> WosParams:
        depth = self.depth if depth is None else depth
        overrides = dict(
            start_radius=self.start_radius,
            outer_radius=self.outer_radius,
            reentry_radius=self.reentry_radius,
            max_steps=self.max_steps,
        )
        if self.absorb_epsilon is not None:
            overrides["absorb_epsilon"] = self.absorb_epsilon
        return WosParams.for_depth(self.sequence(), depth, **overrides)

    def oracle_params(self) -> GridOracleParams:
        seq = self.sequence()
        if self.oracle_spacing is None:
            return GridOracleParams.for_depth(
                seq,
                self.oracle_depth,
                start_radius=self.oracle_start_radius,
                outer_radius=self.oracle_outer_radius,
            )
        return GridOracleParams(
            depth=self.oracle_depth,
            spacing=self.oracle_spacing,
            start_radius=self.oracle_start_radius,
            outer_radius=self.oracle_outer_radius,
        )

    def overridden(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


_SECTIONS = {
    "sequence": ("kind", "values"),
    "campaign": ("depth", "walkers", "seed", "workers", "batch_size"),
    "wos": ("absorb_epsilon", "start_radius", "outer_radius", "reentry_radius", "max_steps"),
    "stats": ("count_floor", "bootstrap_reps"),
    "continuity": ("deltas", "pattern", "control_seed_offset"),
    "harnack": ("harnack_n", "harnack_m", "k_max", "r2_threshold"),
    "delta": ("delta_j",),
    "oracle": (
        "oracle_depth",
        "oracle_spacing",
        "oracle_start_radius",
        "oracle_outer_radius",
        "oracle_walkers",
    ),
    "dims": ("dim_n_max", "dim_window"),
    "output": ("out_dir", "plots"),
}

_INT_KEYS = {
    "depth", "walkers", "seed", "workers", "batch_size", "max_steps",
    "count_floor", "bootstrap_reps", "control_seed_offset", "harnack_n",
    "harnack_m", "k_max", "delta_j", "oracle_depth", "oracle_walkers",
    "dim_n_max",
}
_FLOAT_KEYS = {
    "start_radius", "outer_radius", "reentry_radius", "r2_threshold",
    "oracle_start_radius", "oracle_outer_radius",
}
_OPT_FLOAT_KEYS = {"absorb_epsilon", "oracle_spacing"}
_OPT_INT_KEYS = {"dim_window"}
_TUPLE_KEYS = {"values", "deltas"}
_BOOL_KEYS = {"plots"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _TUPLE_KEYS:
        return tuple(float(v) for v in raw.replace(",", " ").split())
    if key in _OPT_FLOAT_KEYS or key in _OPT_INT_KEYS:
        if raw.lower() in ("auto", "none", ""):
            return None
        return float(raw) if key in _OPT_FLOAT_KEYS else int(raw)
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ParameterError(f"cannot parse boolean {key} = {raw!r}")
    return raw


def load_config(path) -> ExperimentConfig:
    """Read an INI file; unknown sections or keys are an error, not a shrug."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ParameterError(f"config file {path} not found or unreadable")
    known = {k: section for section, keys in _SECTIONS.items() for k in keys}
    updates = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ParameterError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in known or known[key] != section:
                raise ParameterError(f"unknown key {key!r} in section [{section}]")
            try:
                updates[key] = _parse_value(key, raw)
            except ValueError as exc:
                raise ParameterError(f"bad value for {key}: {raw!r}") from exc
    return ExperimentConfig(**updates)


_REFERENCE = """\
# cornerwalk experiment configuration, all keys at their defaults.
# Values shown are what an empty config means; keep only what you change.

[sequence]
# kind: constant | periodic | explicit (prefix cycled beyond its length)
kind = constant
# one ratio for constant, the period / prefix otherwise; each in (0, 1/2)
values = 0.25

[campaign]
# cylinder generation the walkers are absorbed on
depth = 4
walkers = 100000
seed = 2024
# worker processes for walker batches (counts merge exactly)
workers = 1
batch_size = 131072

[wos]
# absorption distance; auto = sidelength(depth) / 1000
absorb_epsilon = auto
# start circle radius (uniform start samples the view from infinity exactly)
start_radius = 8.0
# walkers beyond outer_radius re-enter on reentry_radius via the disk kernel
outer_radius = 16.0
reentry_radius = 8.0
max_steps = 1000000

[stats]
# cells below this count are excluded from ratio scans, never imputed
count_floor = 100
# multinomial bootstrap replicates for ratio uncertainties
bootstrap_reps = 500

[continuity]
# perturbation sizes for the continuity sweep, run largest to smallest
deltas = 0.05, 0.02, 0.01
# sign pattern of the perturbation: alternating | constant
pattern = alternating
# seed shift for the delta = 0 control campaign
control_seed_offset = 7777

[harnack]
# base generation n, tail generation m, offsets k = 1..k_max
harnack_n = 1
harnack_m = 1
k_max = 3
# a decay fit below this r squared is flagged non-decaying
r2_threshold = 0.8

[delta]
# oscillation block j for delta_j^k tabulation
delta_j = 1

[oracle]
# lattice cross-check; depth capped at 3 by the cost guard
oracle_depth = 2
# lattice spacing; auto = sidelength(oracle_depth) / 8
oracle_spacing = auto
oracle_start_radius = 1.25
oracle_outer_radius = 2.5
oracle_walkers = 200000

[dims]
# generations for the limit-set dimension and the liminf window
dim_n_max = 10000
# auto = two cycles of the scale values
dim_window = auto

[output]
out_dir = .
plots = false
"""


def reference_ini() -> str:
    return _REFERENCE
