"""Experiment harness: ``qae-lab run | verify | configs``.

A config is a YAML mapping describing one sweep. Each sweep point gets its own
random generator derived from ``(seed, point index)``, so results do not depend
on the number of workers or on execution order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .adiabatic import aqae_run
from .models import (
    latent_hamiltonian,
    tfim_hamiltonian,
    thermal_state,
    werner_log_hamiltonian,
    werner_state,
)
from .pqae import PureEnsemble, pqae_pipeline, qae_ensemble_run
from .qae import run_pipeline
from .qstate import Bipartition, random_density_matrix, von_neumann_entropy
from .training import TrainConfig

MODELS = ("qae", "nqae", "aqae", "naqae", "pqae")
SYSTEMS = ("tfim", "werner", "random", "custom")
SWEEPS = ("beta", "alpha", "t_a", "iterations", "ensemble_size")
CSV_HEADER = (
    "sweep_value",
    "fidelity",
    "input_entropy",
    "output_entropy",
    "final_loss",
    "epsilons",
    "iterations",
    "wall_seconds",
    "converged",
)
REPO_ROOT = Path(__file__).resolve().parents[2]
CONFIG_DIR = REPO_ROOT / "configs"
ACCEPTANCE_TESTS = REPO_ROOT / "tests" / "test_acceptance.py"

logger = logging.getLogger(__name__)

TRAINING_DEFAULTS = {
    "max_iters": 2000,
    "tolerance": 1e-5,
    "learning_rate": 0.05,
    "depth_p": 2,
    "adaptive": False,
    "depth_max": 8,
    "loss_threshold": None,
    "restarts": 1,
    "init_spread": 2 * math.pi,
}
DEFAULTS = {
    "beta": 1.0,
    "alpha": 0.5,
    "ensemble_size": 4,
    "projection": "exact",
    "annealing": {"t_a": 1000.0, "dt": 0.1},
    "system_options": {"j_coupling": 1.0, "g_field": 1.0, "rank": None, "hamiltonian_path": None},
}
TOP_KEYS = {
    "model", "system", "n_A", "n_B", "seed", "sweep", "beta", "alpha", "ensemble_size", "training",
    "annealing", "projection", "system_options", "output_path", "figure", "description",
}  # fmt: skip


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the key path."""


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    system: str
    n_a: int
    n_b: int
    sweep: str
    values: tuple[float, ...]
    seed: int = 0
    beta: float = 1.0
    alpha: float = 0.5
    ensemble_size: int = 4
    training: TrainConfig = field(default_factory=TrainConfig)
    t_a: float = 1000.0
    dt: float = 0.1
    projection: str = "exact"
    j_coupling: float = 1.0
    g_field: float = 1.0
    rank: int | None = None
    hamiltonian_path: str | None = None
    output_path: str | None = None
    figure: str | None = None
    description: str = ""

    @property
    def part(self) -> Bipartition:
        return Bipartition(self.n_a, self.n_b)


@dataclass
class ResultRow:
    sweep_value: float
    fidelity: float
    input_entropy: float
    output_entropy: float
    final_loss: float
    epsilons: list[float]
    iterations: int
    wall_seconds: float
    converged: bool = True


# ---- config parsing -------------------------------------------------------


def _number(value, path: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected {'an integer' if integer else 'a number'}, got {value!r}")
    if integer and not float(value).is_integer():
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite")
    return int(value) if integer else float(value)


def _mapping(value, path: str, allowed: set[str]) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(value).__name__}")
    for key in value:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key" if path else f"{key}: unknown key")
    return value


def _choice(value, path: str, options) -> str:
    if value not in options:
        raise ConfigError(f"{path}: expected one of {', '.join(options)}, got {value!r}")
    return value


def _check_range(name: str, value: float, path: str, cfg: dict) -> None:
    model = cfg["model"]
    if name == "beta" and value < 0:
        raise ConfigError(f"{path}: beta must be >= 0, got {value}")
    if name == "alpha":
        if model in ("aqae", "naqae") and not -1 < value < 1:
            raise ConfigError(f"{path}: alpha must lie strictly inside (-1, 1) for {model}, got {value}")
        if not -1 <= value <= 1:
            raise ConfigError(f"{path}: alpha must lie in [-1, 1], got {value}")
    if name == "t_a" and value <= 0:
        raise ConfigError(f"{path}: t_a must be > 0, got {value}")
    if name in ("iterations", "ensemble_size") and (value < 1 or not float(value).is_integer()):
        raise ConfigError(f"{path}: {name} must be a positive integer, got {value}")


def _sweep_allowed(sweep: str, model: str, system: str) -> str | None:
    """Reason why the sweep does not apply, or None."""
    if sweep == "beta" and system not in ("tfim", "custom", "random"):
        return "beta sweeps need a tfim, custom or random Hamiltonian"
    if sweep == "beta" and system == "random" and model not in ("aqae", "naqae"):
        return "random states have no temperature; use a t_a or iterations sweep"
    if sweep == "alpha" and system != "werner":
        return "alpha sweeps need system werner"
    if sweep == "t_a" and model not in ("aqae", "naqae"):
        return "t_a sweeps need model aqae or naqae"
    if sweep == "iterations" and model not in ("qae", "nqae", "pqae"):
        return "iterations sweeps need a trained model (qae, nqae or pqae)"
    if sweep == "ensemble_size" and (model not in ("pqae", "qae") or system != "random"):
        return "ensemble_size sweeps need model pqae or qae on system random"
    return None


def parse_config(source, base_dir: Path | None = None) -> ExperimentConfig:
    """Parse and validate a config from a path, YAML text or a mapping."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and source.endswith((".yaml", ".yml"))):
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        base_dir = path.parent if base_dir is None else base_dir
        source = text
    if isinstance(source, str):
        try:
            source = yaml.safe_load(source)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config: invalid YAML: {exc}") from None
    raw = _mapping(source, "", TOP_KEYS)
    for key in ("model", "system", "n_A", "n_B", "sweep"):
        if key not in raw:
            raise ConfigError(f"{key}: required key missing")
    model = _choice(raw["model"], "model", MODELS)
    system = _choice(raw["system"], "system", SYSTEMS)
    n_a = _number(raw["n_A"], "n_A", integer=True)
    n_b = _number(raw["n_B"], "n_B", integer=True)
    for name, n in (("n_A", n_a), ("n_B", n_b)):
        if n < 1:
            raise ConfigError(f"{name}: must be >= 1, got {n}")
    if n_a + n_b > 10:
        raise ConfigError(f"n_A: n_A + n_B = {n_a + n_b} exceeds the 10-qubit simulator limit")
    if system == "werner" and (n_a + n_b) % 2:
        raise ConfigError("n_B: werner states need an even total qubit count")
    if model == "pqae" and system != "random":
        raise ConfigError("system: model pqae compresses Haar-random ensembles; use system random")
    ctx = {"model": model, "system": system}

    sweep_raw = _mapping(raw["sweep"], "sweep", {"parameter", "values"})
    if "parameter" not in sweep_raw or "values" not in sweep_raw:
        raise ConfigError("sweep: needs keys parameter and values")
    sweep = _choice(sweep_raw["parameter"], "sweep.parameter", SWEEPS)
    reason = _sweep_allowed(sweep, model, system)
    if reason:
        raise ConfigError(f"sweep.parameter: {reason}")
    values = sweep_raw["values"]
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values: expected a non-empty list")
    values = tuple(_number(v, f"sweep.values[{i}]") for i, v in enumerate(values))
    for i, v in enumerate(values):
        _check_range(sweep, v, f"sweep.values[{i}]", ctx)

    kw: dict = {}
    for key in ("beta", "alpha"):
        if key in raw:
            kw[key] = _number(raw[key], key)
            _check_range(key, kw[key], key, ctx)
    if "ensemble_size" in raw:
        kw["ensemble_size"] = _number(raw["ensemble_size"], "ensemble_size", integer=True)
        _check_range("ensemble_size", kw["ensemble_size"], "ensemble_size", ctx)
    if system == "werner" and sweep != "alpha":
        _check_range("alpha", kw.get("alpha", DEFAULTS["alpha"]), "alpha", ctx)
    if "seed" in raw:
        kw["seed"] = _number(raw["seed"], "seed", integer=True)
        if kw["seed"] < 0:
            raise ConfigError("seed: must be >= 0")
    if "projection" in raw:
        kw["projection"] = _choice(raw["projection"], "projection", ("exact", "variational"))

    tr = _mapping(raw.get("training"), "training", set(TRAINING_DEFAULTS))
    targs = {}
    for key, value in tr.items():
        path = f"training.{key}"
        if key == "adaptive":
            if not isinstance(value, bool):
                raise ConfigError(f"{path}: expected true or false, got {value!r}")
            targs[key] = value
        elif key == "loss_threshold":
            targs[key] = None if value is None else _number(value, path)
        else:
            targs[key] = _number(value, path, integer=key in ("max_iters", "depth_p", "depth_max", "restarts"))
    if "depth_p" in targs and "depth_max" not in targs and not targs.get("adaptive"):
        targs["depth_max"] = max(targs["depth_p"], TRAINING_DEFAULTS["depth_max"])
    for key in ("max_iters", "restarts"):
        if key in targs and targs[key] < 1:
            raise ConfigError(f"training.{key}: must be >= 1, got {targs[key]}")
    for key in ("tolerance", "learning_rate"):
        if key in targs and targs[key] <= 0 and not (key == "tolerance" and targs[key] == 0):
            raise ConfigError(f"training.{key}: must be positive, got {targs[key]}")
    if "init_spread" in targs and not 0 < targs["init_spread"] <= 2 * math.pi:
        raise ConfigError(f"training.init_spread: must lie in (0, 2 pi], got {targs['init_spread']}")
    if targs.get("depth_p", 0) < 0:
        raise ConfigError(f"training.depth_p: must be >= 0, got {targs['depth_p']}")
    try:
        kw["training"] = TrainConfig(**targs)
    except ValueError as exc:
        raise ConfigError(f"training: {exc}") from None

    ann = _mapping(raw.get("annealing"), "annealing", {"t_a", "dt"})
    t_a = _number(ann.get("t_a", DEFAULTS["annealing"]["t_a"]), "annealing.t_a")
    dt = _number(ann.get("dt", DEFAULTS["annealing"]["dt"]), "annealing.dt")
    _check_range("t_a", t_a, "annealing.t_a", ctx)
    if dt <= 0:
        raise ConfigError(f"annealing.dt: must be > 0, got {dt}")
    smallest_t_a = min(values) if sweep == "t_a" else t_a
    if dt > smallest_t_a:
        raise ConfigError(f"annealing.dt: {dt} exceeds the annealing time {smallest_t_a}")
    kw.update(t_a=t_a, dt=dt)

    opts = _mapping(raw.get("system_options"), "system_options", set(DEFAULTS["system_options"]))
    for key in ("j_coupling", "g_field"):
        if key in opts:
            kw[key] = _number(opts[key], f"system_options.{key}")
    if opts.get("rank") is not None:
        kw["rank"] = _number(opts["rank"], "system_options.rank", integer=True)
        if not 1 <= kw["rank"] <= 2 ** (n_a + n_b):
            raise ConfigError(f"system_options.rank: must lie in [1, {2 ** (n_a + n_b)}]")
    if system == "custom":
        hpath = opts.get("hamiltonian_path")
        if not isinstance(hpath, str):
            raise ConfigError("system_options.hamiltonian_path: required for system custom")
        hpath = Path(hpath)
        if not hpath.is_absolute() and base_dir is not None:
            hpath = base_dir / hpath
        kw["hamiltonian_path"] = str(hpath)
        _load_custom(kw["hamiltonian_path"], 2 ** (n_a + n_b))

    for key in ("output_path", "figure", "description"):
        if key in raw and raw[key] is not None:
            if not isinstance(raw[key], (str, int, float)):
                raise ConfigError(f"{key}: expected a string")
            kw[key] = str(raw[key])
    if "output_path" in kw and base_dir is not None and not Path(kw["output_path"]).is_absolute():
        kw["output_path"] = str(base_dir / kw["output_path"])
    return ExperimentConfig(model=model, system=system, n_a=n_a, n_b=n_b, sweep=sweep, values=values, **kw)


def _load_custom(path: str, dim: int) -> np.ndarray:
    try:
        h = np.load(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"system_options.hamiltonian_path: cannot load {path}: {exc}") from None
    if h.shape != (dim, dim) or not np.allclose(h, np.conj(h).T):
        raise ConfigError(f"system_options.hamiltonian_path: need a Hermitian {dim}x{dim} matrix, got {h.shape}")
    return h


# ---- running ----------------------------------------------------------------


def _point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _hamiltonian(cfg: ExperimentConfig, rng: np.random.Generator) -> np.ndarray:
    n = cfg.n_a + cfg.n_b
    if cfg.system == "tfim":
        return tfim_hamiltonian(n, cfg.j_coupling, cfg.g_field)
    if cfg.system == "custom":
        return _load_custom(cfg.hamiltonian_path, 2**n).astype(complex)
    g = rng.standard_normal((2**n, 2**n)) + 1j * rng.standard_normal((2**n, 2**n))
    return (g + g.conj().T) / (2 * np.sqrt(2**n))


def run_point(cfg: ExperimentConfig, index: int) -> ResultRow:
    """Run one sweep point; a pure function of (cfg, index).

    A numerical failure yields a NaN row marked ``converged=False`` so the sweep continues.
    """
    start = time.perf_counter()
    try:
        row = _run_point(cfg, index)
    except (ValueError, np.linalg.LinAlgError, FloatingPointError) as exc:
        logger.warning("sweep point %d failed: %s", index, exc)
        nan = float("nan")
        row = ResultRow(cfg.values[index], nan, nan, nan, nan, [], 0, 0.0, False)
    row.wall_seconds = time.perf_counter() - start
    return row


def _run_point(cfg: ExperimentConfig, index: int) -> ResultRow:
    value = cfg.values[index]
    # an iterations sweep shows snapshots of one training run, so every point shares the seed
    seed = _point_seed(cfg.seed, 0 if cfg.sweep == "iterations" else index)
    rng = np.random.default_rng(seed)
    params = {"beta": cfg.beta, "alpha": cfg.alpha, "t_a": cfg.t_a, "ensemble_size": cfg.ensemble_size}
    params[cfg.sweep] = value
    training = TrainConfig(**{**asdict(cfg.training), "seed": seed})
    if cfg.sweep == "iterations":
        # fixed budget: no early stop
        training = TrainConfig(**{**asdict(training), "max_iters": int(value), "tolerance": 0.0})
    part = cfg.part
    d_half = 2 ** ((cfg.n_a + cfg.n_b) // 2)

    if cfg.model in ("qae", "nqae") and cfg.sweep != "ensemble_size":
        if cfg.system == "werner":
            rho = werner_state(d_half, params["alpha"])
        elif cfg.system == "random":
            rho = random_density_matrix(part.dim, rng, cfg.rank)
        else:
            rho = thermal_state(_hamiltonian(cfg, rng), params["beta"])
        _, rep = run_pipeline(rho, part, cfg.model, training)
        row = ResultRow(
            value, rep.fidelity, rep.input_entropy, rep.output_entropy, rep.final_loss,
            list(map(float, rep.epsilons)), rep.train.iterations_used, 0.0, rep.train.converged,
        )  # fmt: skip
    elif cfg.model in ("aqae", "naqae"):
        if cfg.system == "werner":
            h, beta = werner_log_hamiltonian(d_half, params["alpha"]), 1.0
        else:
            h, beta = _hamiltonian(cfg, rng), params["beta"]
        h_l = latent_hamiltonian(cfg.n_a, cfg.n_b)
        _, rep = aqae_run(h, beta, part, h_l, params["t_a"], cfg.model, cfg.dt)
        row = ResultRow(
            value, rep.fidelity, rep.input_entropy, rep.output_entropy, float("nan"),
            list(map(float, rep.epsilons)), rep.n_steps, 0.0, True,
        )  # fmt: skip
    else:
        ens = PureEnsemble.haar_random(int(params["ensemble_size"]), part.n_qubits, rng)
        if cfg.model == "pqae":
            rep = pqae_pipeline(ens, part, training, cfg.projection)
            fid, mixture, train = rep.mean_fidelity, rep.mixture, rep.train
        else:
            rec, train = qae_ensemble_run(ens, part, training)
            fid, mixture = float(np.mean(rec.qae_fidelities)), rec.qae_mixture
        row = ResultRow(
            value, fid, von_neumann_entropy(ens.density_matrix()), von_neumann_entropy(mixture),
            train.final_loss, [], train.iterations_used, 0.0, train.converged,
        )  # fmt: skip
    return row


def resolve_workers(requested: int | None) -> int:
    env = os.environ.get("QAE_LAB_WORKERS")
    if env:
        try:
            requested = int(env)
        except ValueError:
            raise ConfigError(f"QAE_LAB_WORKERS: expected an integer, got {env!r}") from None
    workers = 1 if requested is None else requested
    if workers < 1:
        raise ConfigError(f"workers: must be >= 1, got {workers}")
    return workers


def run_experiment(cfg: ExperimentConfig, workers: int = 1, fmt: str = "csv", timing: bool = True) -> list[ResultRow]:
    """Run every sweep point, sort rows by sweep value and write them if ``output_path`` is set."""
    indices = range(len(cfg.values))
    if workers > 1 and len(cfg.values) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_point, [cfg] * len(cfg.values), indices))
    else:
        rows = [run_point(cfg, i) for i in indices]
    rows.sort(key=lambda r: r.sweep_value)
    if cfg.output_path:
        emit_results(rows, fmt, cfg.output_path, timing)
    return rows


# ---- output -------------------------------------------------------------------


def _g12(x: float) -> str:
    return "nan" if math.isnan(x) else format(x, ".12g")


def format_results(rows: list[ResultRow], fmt: str = "csv", timing: bool = True) -> str:
    if not rows:
        raise ValueError("no rows to emit")
    if fmt == "json":
        records = []
        for r in rows:
            d = asdict(r)
            for key, value in d.items():
                if isinstance(value, float) and math.isnan(value):
                    d[key] = None
            if not timing:
                d["wall_seconds"] = None
            records.append(d)
        return json.dumps(records, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [
                _g12(r.sweep_value), _g12(r.fidelity), _g12(r.input_entropy), _g12(r.output_entropy),
                _g12(r.final_loss), ";".join(_g12(e) for e in r.epsilons), str(r.iterations),
                _g12(r.wall_seconds) if timing else "nan", "true" if r.converged else "false",
            ]
        )  # fmt: skip
    return buf.getvalue()


def emit_results(rows: list[ResultRow], fmt: str = "csv", path=None, timing: bool = True) -> None:
    """Write rows as CSV or JSON to ``path``, or to stdout when ``path`` is None."""
    text = format_results(rows, fmt, timing)
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def parse_results(text: str, fmt: str = "csv") -> list[ResultRow]:
    """Inverse of :func:`format_results`."""
    if fmt == "json":
        rows = []
        for d in json.loads(text):
            d = {k: (float("nan") if v is None and k != "epsilons" else v) for k, v in d.items()}
            rows.append(ResultRow(**d))
        return rows
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for rec in reader:
        rows.append(
            ResultRow(
                sweep_value=float(rec["sweep_value"]),
                fidelity=float(rec["fidelity"]),
                input_entropy=float(rec["input_entropy"]),
                output_entropy=float(rec["output_entropy"]),
                final_loss=float(rec["final_loss"]),
                epsilons=[float(e) for e in rec["epsilons"].split(";")] if rec["epsilons"] else [],
                iterations=int(rec["iterations"]),
                wall_seconds=float(rec["wall_seconds"]),
                converged=rec["converged"] == "true",
            )
        )
    return rows


# ---- command line ---------------------------------------------------------------


def list_configs(directory: Path = CONFIG_DIR) -> list[tuple[str, str, str]]:
    """(file name, figure, description) for every shipped config."""
    out = []
    for path in sorted(directory.glob("*.yaml")):
        raw = yaml.safe_load(path.read_text()) or {}
        out.append((path.name, str(raw.get("figure", "")), str(raw.get("description", ""))))
    return out


def _help_epilog() -> str:
    lines = ["config defaults:"]
    for key, value in DEFAULTS.items():
        lines.append(f"  {key}: {value}")
    lines.append("  training:")
    for key, value in TRAINING_DEFAULTS.items():
        lines.append(f"    {key}: {value}")
    lines.append("exit codes: 0 success, 1 config error, 2 acceptance failure")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qae-lab",
        description="Quantum autoencoder experiments.",
        epilog=_help_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one sweep", epilog=_help_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    run.add_argument("--config", required=True, help="YAML experiment config")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--out", help="output file (default: output_path from the config, else stdout)")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--workers", type=int, help="worker processes (QAE_LAB_WORKERS overrides)")
    run.add_argument("--model", choices=MODELS, help="override the config model")
    run.add_argument("--no-timing", action="store_true", help="write nan for wall_seconds so reruns are byte-identical")
    verify = sub.add_parser("verify", help="run the acceptance suite")
    verify.add_argument("pytest_args", nargs="*", help="extra arguments passed to pytest")
    sub.add_parser("configs", help="list shipped figure configs")
    return parser


def _override(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    data = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    data.update(changes)
    if "model" in changes:
        reason = _sweep_allowed(data["sweep"], data["model"], data["system"])
        if reason or (data["model"] == "pqae" and data["system"] != "random"):
            raise ConfigError(f"model: {reason or 'pqae needs system random'}")
    return ExperimentConfig(**data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "configs":
        for name, figure, desc in list_configs():
            print(f"{name:32s} Fig. {figure:4s} {desc}")
        return 0
    if args.command == "verify":
        if not ACCEPTANCE_TESTS.exists():
            print(f"acceptance suite not found at {ACCEPTANCE_TESTS}", file=sys.stderr)
            return 1
        cmd = [sys.executable, "-m", "pytest", str(ACCEPTANCE_TESTS), "-v", "-s", *args.pytest_args]
        return 0 if subprocess.call(cmd, cwd=REPO_ROOT) == 0 else 2
    try:
        cfg = parse_config(Path(args.config))
        changes = {}
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed: must be >= 0")
            changes["seed"] = args.seed
        if args.model is not None:
            changes["model"] = args.model
        if args.out is not None:
            changes["output_path"] = args.out
        if changes:
            cfg = _override(cfg, **changes)
        workers = resolve_workers(args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    rows = run_experiment(cfg, workers, args.format, timing=not args.no_timing)
    if not cfg.output_path:
        emit_results(rows, args.format, None, timing=not args.no_timing)
    return 0


if __name__ == "__main__":
    sys.exit(main())
