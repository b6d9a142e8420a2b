"""Flat ``key = value`` run configuration.

    # comment
    method = nct
    layer_dims = 2, 32, 32, 2
    dataset_path = train.csv

Relative paths resolve against the config file's directory.  Unknown keys
are rejected.  ``materialize`` writes every key, defaults included, so the
written file alone reproduces the run.
"""
import os

from .errors import ConfigError, NctError
from .noise import NOISE_KINDS, NoiseSpec
from .probe import ProbeConfig
from .schedules import ScheduleParams
from .trainer import METHODS, TrainConfig


def _ints(text):
    return tuple(int(v) for v in text.replace(",", " ").split())


_AT90 = "90% of total_epochs"

# key -> (parser, default); ``None`` default means required
SCHEMA = {
    "method": (str, "nct"),
    "batch_size": (int, 128),
    "total_epochs": (int, 200),
    "lr_initial": (float, 0.02),
    "lr_decay_epoch": (int, _AT90),
    "lr_decay_factor": (float, 10.0),
    "momentum": (float, 0.9),
    "weight_decay": (float, 1e-5),
    "tau": (float, 4.0),
    "alpha_max": (float, 0.9),
    "beta_mag": (float, 0.65),
    "ramp_len": (int, _AT90),
    "r_min": (float, 0.0),
    "r_max": (float, 0.5),
    "warmup": (int, 1),
    "dml_alpha": (float, 0.5),
    "layer_dims": (_ints, (2, 32, 32, 2)),
    "seed_master": (int, 0),
    "eval_every": (int, 1),
    "dtype": (str, "float64"),
    "noise_kind": (str, "none"),
    "noise_rate": (float, 0.0),
    "dataset_path": (str, None),
    "test_path": (str, None),
    "output_dir": (str, "run"),
    "probe_hidden_dims": (_ints, (400, 200)),
    "probe_num_samples": (int, 1000),
    "probe_epochs": (int, 200),
    "probe_lr": (float, 0.01),
    "probe_batch_size": (int, 64),
}
PATH_KEYS = ("dataset_path", "test_path", "output_dir")


def parse_config_text(text):
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def resolve(raw, base_dir="."):
    """Typed, fully-defaulted config dict from raw string values."""
    cfg = {}
    for key, (parse, default) in SCHEMA.items():
        if key in raw:
            try:
                cfg[key] = parse(raw[key])
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {raw[key]!r}") from None
        elif default is None:
            raise ConfigError(f"missing required key {key!r}")
        else:
            cfg[key] = default
    at90 = max(1, int(round(0.9 * cfg["total_epochs"])))
    for key in ("lr_decay_epoch", "ramp_len"):
        if cfg[key] == _AT90:
            cfg[key] = at90
    for key in PATH_KEYS:
        cfg[key] = os.path.abspath(os.path.join(base_dir, cfg[key]))
    if cfg["method"] not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}")
    if cfg["noise_kind"] not in ("none",) + NOISE_KINDS:
        raise ConfigError(f"noise_kind must be 'none' or one of {NOISE_KINDS}")
    return cfg


def load_config(path, check_files=True):
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as f:
        raw = parse_config_text(f.read())
    cfg = resolve(raw, os.path.dirname(os.path.abspath(path)))
    if check_files:
        for key in ("dataset_path", "test_path"):
            if not os.path.isfile(cfg[key]):
                raise ConfigError(f"{key}: file not found: {cfg[key]}")
    return cfg


def _format_value(v):
    if isinstance(v, tuple):
        return ", ".join(str(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def materialize(cfg):
    return "".join(f"{key} = {_format_value(cfg[key])}\n" for key in SCHEMA)


def train_config(cfg):
    try:
        schedule = ScheduleParams(
            total_epochs=cfg["total_epochs"],
            alpha_max=cfg["alpha_max"],
            beta_mag=cfg["beta_mag"],
            ramp_len=cfg["ramp_len"],
            r_min=cfg["r_min"],
            r_max=cfg["r_max"],
            warmup=cfg["warmup"],
            lr_initial=cfg["lr_initial"],
            lr_decay_epoch=cfg["lr_decay_epoch"],
            lr_decay_factor=cfg["lr_decay_factor"],
        )
        return TrainConfig(
            method=cfg["method"],
            layer_dims=tuple(cfg["layer_dims"]),
            batch_size=cfg["batch_size"],
            schedule=schedule,
            tau=cfg["tau"],
            dml_alpha=cfg["dml_alpha"],
            momentum=cfg["momentum"],
            weight_decay=cfg["weight_decay"],
            seed_master=cfg["seed_master"],
            eval_every=cfg["eval_every"],
            dtype=cfg["dtype"],
        )
    except (NctError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def noise_spec(cfg):
    if cfg["noise_kind"] == "none":
        return None
    try:
        return NoiseSpec(cfg["noise_kind"], cfg["noise_rate"], cfg["seed_master"])
    except (NctError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def probe_config(cfg):
    try:
        return ProbeConfig(
            hidden_dims=tuple(cfg["probe_hidden_dims"]),
            num_samples=cfg["probe_num_samples"],
            probe_epochs=cfg["probe_epochs"],
            probe_lr=cfg["probe_lr"],
            batch_size=cfg["probe_batch_size"],
            seed=cfg["seed_master"],
        )
    except (NctError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
