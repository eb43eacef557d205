"""Binary matrix files, run configuration and CSV results.

Matrix files ("JSRB") are little-endian: a 23-byte header
``magic(4) = b"JSRB" | version u16 = 1 | flags u8 (bit 0: complex) |
rows u64 | cols u64`` followed by the row-major payload, 8 bytes per real
entry or 16 bytes (real then imaginary part) per complex entry.
"""

import csv
import json
import math
import os
import struct
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional

import numpy as np

from .errors import ConfigError, FormatError

MAGIC = b"JSRB"
VERSION = 1
_HEADER = struct.Struct("<4sHBQQ")
FLAG_COMPLEX = 0x01


def write_matrix(path, matrix):
    """Write a real or complex matrix (1-D input is stored as a column)."""
    a = np.asarray(matrix)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"expected a 1-D or 2-D array, got shape {a.shape}")
    is_complex = np.iscomplexobj(a)
    a = np.ascontiguousarray(a, dtype="<c16" if is_complex else "<f8")
    header = _HEADER.pack(MAGIC, VERSION, FLAG_COMPLEX if is_complex else 0, *a.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(a.tobytes(order="C"))


def read_matrix(path):
    """Read a matrix written by :func:`write_matrix`.

    Raises:
        FormatError: bad magic, unsupported version or flags, or a payload
            that does not match the header dimensions.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise FormatError(f"truncated header: expected {_HEADER.size} bytes, got {len(raw)}",
                          len(raw))
    magic, version, flags, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", 0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    if flags & ~FLAG_COMPLEX:
        raise FormatError(f"unknown flag bits {flags:#04x}", 6)
    is_complex = bool(flags & FLAG_COMPLEX)
    width = 16 if is_complex else 8
    expected = rows * cols * width
    actual = len(raw) - _HEADER.size
    if actual != expected:
        raise FormatError(f"payload length mismatch: expected {expected} bytes for "
                          f"{rows}x{cols}, got {actual}", _HEADER.size + min(actual, expected))
    a = np.frombuffer(raw, dtype="<c16" if is_complex else "<f8", offset=_HEADER.size)
    return a.reshape(rows, cols).astype(np.complex128 if is_complex else np.float64)


# --- run configuration -------------------------------------------------------

MODES = ("generate", "solve", "sweep", "rates")


@dataclass
class RunConfig:
    """Flat run configuration loaded from a JSON object.

    Unknown keys are rejected. Paths are resolved relative to the config
    file's directory.
    """

    mode: str = "solve"
    # synthetic instance
    M: int = 50
    sigma: float = 0.05
    seed: int = 1
    phantom: str = "two_blocks_and_spike"
    phantom_breakpoints: Optional[List[int]] = None
    phantom_heights: Optional[List[float]] = None
    # single run
    method: str = "joint"
    alpha: float = 1.53e-5
    lam: float = 4.88e-4
    gamma: float = 0.25
    mu: float = 1.0
    # grid
    grid_gamma: Optional[List[float]] = None
    grid_mu: Optional[List[float]] = None
    grid_alpha: Optional[List[float]] = None
    grid_lambda: Optional[List[float]] = None
    methods: List[str] = field(default_factory=lambda: ["joint", "c_with_Seps"])
    select_metric: str = "l2"
    # schedule
    outer_iterations: int = 100
    c_sweeps_per_outer: int = 500
    s_sweeps_per_outer: int = 300
    relaxation_tau: float = 1.0
    stop_rel_change: Optional[float] = None
    reset_S: bool = True
    warm_start_c: bool = False
    # rate experiment
    rate_sigma0: float = 0.08
    rate_levels: int = 5
    rate_seeds: List[int] = field(default_factory=lambda: [1, 2, 3])
    rate_gamma: float = 1.0
    rate_mu_ratio: float = 1.0
    rate_lambda_ratio: float = 2.0 ** -4
    # external matrices (JSRB files); all four of s_mod/s_calib/q/u or none
    s_mod_path: Optional[str] = None
    s_calib_path: Optional[str] = None
    q_path: Optional[str] = None
    u_path: Optional[str] = None
    s_true_path: Optional[str] = None
    c_true_path: Optional[str] = None
    # outputs
    out_dir: str = "out"
    results_csv: Optional[str] = None
    plots_dir: Optional[str] = None
    workers: int = 1


# config key -> attribute; "lambda" is the user-facing spelling
_ALIASES = {"lambda": "lam"}
_KEYS = {f.name for f in fields(RunConfig)}
_PATH_KEYS = ("s_mod_path", "s_calib_path", "q_path", "u_path", "s_true_path",
              "c_true_path", "out_dir", "results_csv", "plots_dir")
_EXTERNAL = ("s_mod_path", "s_calib_path", "q_path", "u_path")


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _num_list(x):
    return isinstance(x, list) and x and all(_is_num(v) and v >= 0 for v in x)


def validate_config(cfg):
    """Return the list of every violation in ``cfg`` (empty when valid)."""
    from .sweep import METHODS

    out = []
    if cfg.mode not in MODES:
        out.append(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if not (_is_int(cfg.M) and cfg.M >= 2 and cfg.M % 2 == 0):
        out.append(f"M must be an even integer >= 2, got {cfg.M!r}")
    if not (_is_num(cfg.sigma) and cfg.sigma >= 0):
        out.append(f"sigma must be a finite number >= 0, got {cfg.sigma!r}")
    if not (_is_int(cfg.seed) and 0 <= cfg.seed < 2 ** 64):
        out.append(f"seed must be an unsigned 64-bit integer, got {cfg.seed!r}")
    if cfg.phantom not in ("two_blocks_and_spike", "custom"):
        out.append(f"phantom must be 'two_blocks_and_spike' or 'custom', got {cfg.phantom!r}")
    if cfg.phantom == "custom" and (cfg.phantom_breakpoints is None or cfg.phantom_heights is None):
        out.append("custom phantom needs phantom_breakpoints and phantom_heights")
    if cfg.method not in METHODS:
        out.append(f"method must be one of {METHODS}, got {cfg.method!r}")
    for name in ("alpha", "lam", "gamma", "mu"):
        v = getattr(cfg, name)
        if not (_is_num(v) and v >= 0):
            key = "lambda" if name == "lam" else name
            out.append(f"{key} must be a finite number >= 0, got {v!r}")
    for name in ("grid_gamma", "grid_mu", "grid_alpha", "grid_lambda"):
        v = getattr(cfg, name)
        if v is not None and not _num_list(v):
            out.append(f"{name} must be a nonempty list of numbers >= 0")
        elif v is not None and len(set(v)) != len(v):
            out.append(f"{name} contains duplicates")
    if not (isinstance(cfg.methods, list) and cfg.methods
            and all(m in METHODS for m in cfg.methods)):
        out.append(f"methods must be a nonempty subset of {METHODS}")
    if cfg.select_metric not in ("l2", "one_minus_ssim"):
        out.append(f"select_metric must be 'l2' or 'one_minus_ssim', got {cfg.select_metric!r}")
    for name in ("outer_iterations", "c_sweeps_per_outer", "s_sweeps_per_outer"):
        v = getattr(cfg, name)
        if not (_is_int(v) and v >= 0):
            out.append(f"{name} must be an integer >= 0, got {v!r}")
    if not (_is_num(cfg.relaxation_tau) and 0 < cfg.relaxation_tau < 2):
        out.append(f"relaxation_tau outside (0,2): {cfg.relaxation_tau!r}")
    if cfg.stop_rel_change is not None and not (_is_num(cfg.stop_rel_change)
                                                and cfg.stop_rel_change > 0):
        out.append(f"stop_rel_change must be > 0, got {cfg.stop_rel_change!r}")
    for name in ("reset_S", "warm_start_c"):
        if not isinstance(getattr(cfg, name), bool):
            out.append(f"{name} must be true or false")
    if not (_is_num(cfg.rate_sigma0) and cfg.rate_sigma0 > 0):
        out.append(f"rate_sigma0 must be > 0, got {cfg.rate_sigma0!r}")
    if not (_is_int(cfg.rate_levels) and cfg.rate_levels >= 3):
        out.append(f"rate_levels must be an integer >= 3, got {cfg.rate_levels!r}")
    if not (isinstance(cfg.rate_seeds, list) and cfg.rate_seeds
            and all(_is_int(s) and s >= 0 for s in cfg.rate_seeds)):
        out.append("rate_seeds must be a nonempty list of nonnegative integers")
    for name in ("rate_gamma", "rate_mu_ratio", "rate_lambda_ratio"):
        v = getattr(cfg, name)
        if not (_is_num(v) and v >= 0):
            out.append(f"{name} must be a finite number >= 0, got {v!r}")
    if not (_is_int(cfg.workers) and cfg.workers >= 1):
        out.append(f"workers must be an integer >= 1, got {cfg.workers!r}")
    given = [k for k in _EXTERNAL if getattr(cfg, k) is not None]
    if given and len(given) != len(_EXTERNAL):
        missing = sorted(set(_EXTERNAL) - set(given))
        out.append(f"external instance needs all of {list(_EXTERNAL)}; missing {missing}")
    for key in _PATH_KEYS[:6]:
        p = getattr(cfg, key)
        if p is not None and not os.path.isfile(p):
            out.append(f"{key}: file not found: {p}")
    return out


def config_from_dict(data, base_dir=None):
    """Build and validate a :class:`RunConfig` from a mapping.

    Raises:
        ConfigError: listing unknown keys and every invalid value.
    """
    if not isinstance(data, dict):
        raise ConfigError(["configuration must be a JSON object"])
    problems = []
    kwargs = {}
    for key, value in data.items():
        name = _ALIASES.get(key, key)
        if name not in _KEYS or key == "lam":
            problems.append(f"unknown key {key!r}")
            continue
        kwargs[name] = value
    if problems:
        raise ConfigError(problems)
    cfg = RunConfig(**kwargs)
    if base_dir is not None:
        for key in _PATH_KEYS:
            p = getattr(cfg, key)
            if isinstance(p, str) and not os.path.isabs(p):
                setattr(cfg, key, os.path.join(base_dir, p))
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON: {exc}"]) from exc
    return config_from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


# --- results CSV ---------------------------------------------------------------

CSV_COLUMNS = ("method", "gamma", "mu", "alpha", "lambda", "seed", "outer_iters", "l2_error",
               "ssim", "data_residual", "J_final", "wall_ms", "status")
_FLOATS = ("gamma", "mu", "alpha", "lambda", "l2_error", "ssim", "data_residual", "J_final",
           "wall_ms")


def _fmt(x):
    return format(float(x), ".17g")


def write_results_csv(records, path):
    """Write sweep records, ordered by combination index."""
    rows = sorted(records, key=lambda r: r.index)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in rows:
                writer.writerow([r.method, _fmt(r.gamma), _fmt(r.mu), _fmt(r.alpha), _fmt(r.lam),
                                 r.seed, r.outer_iters, _fmt(r.l2_error), _fmt(r.ssim),
                                 _fmt(r.data_residual), _fmt(r.J_final), _fmt(r.wall_ms),
                                 r.status])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results_csv(path):
    """Parse a results CSV back into :class:`~jointkaczmarz.sweep.SweepRecord` objects."""
    from .sweep import SweepRecord

    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for i, row in enumerate(reader):
            vals: Dict[str, object] = {k: float(row[k]) for k in _FLOATS}
            out.append(SweepRecord(index=i, method=row["method"], gamma=vals["gamma"],
                                   mu=vals["mu"], alpha=vals["alpha"], lam=vals["lambda"],
                                   seed=int(row["seed"]), outer_iters=int(row["outer_iters"]),
                                   l2_error=vals["l2_error"], ssim=vals["ssim"],
                                   data_residual=vals["data_residual"],
                                   J_final=vals["J_final"], wall_ms=vals["wall_ms"],
                                   status=row["status"]))
    return out
