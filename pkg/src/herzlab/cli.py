"""Batch front-end: ``herzlab --config run.json [--seed N] [--output DIR]``.

A run is one JSON document naming a command (norm, decompose, heat, solve,
verify) plus the grid, norm parameters, solver settings and check options it
needs. Each run writes ``report.json`` (resolved config, results, and a
separate metadata block holding timestamps and runtimes) and CSV tables into
the output directory.

Exit codes: 0 on success or a passing check, 1 on a failing or inconclusive
check or a numeric failure mid-run, 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from dataclasses import field as dc_field
from dataclasses import fields as dc_fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import CompositionError, HerzlabError, InputDomainError, ParameterError, ResolutionError
from .field import GridSpec, SampledField, load_field
from .heat import COMPLETED, MildSolverConfig, heat_propagate, solve_mild
from .herz import TLParams, export_breakdown_csv, herz_norm, ktl_norm
from .lpdecomp import build_dyadic_system, export_multipliers_csv, lp_blocks
from .nonlinear import nonlinearity_by_name
from .verify import checks
from .verify.families import GENERATORS, FunctionFamily, gaussian
from .verify.report import PASS, CheckReport, jsonable

__all__ = ["RunConfig", "ConfigError", "run", "main"]

COMMANDS = ("norm", "decompose", "heat", "solve", "verify")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ParameterError):
    """Raised for malformed or inconsistent run configurations."""


def _num(v):
    """Config number: accepts "inf" / "-inf" strings."""
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        if v.strip().lower() in ("-inf", "-infinity"):
            return -math.inf
        raise ConfigError(f"not a number: {v!r}")
    if v is None:
        return None
    return float(v)


@dataclass
class RunConfig:
    command: str
    grid: dict = dc_field(default_factory=lambda: {"dim": 1, "halfwidth": math.pi, "points_per_axis": 256})
    params: dict = dc_field(default_factory=dict)
    solver: dict = dc_field(default_factory=dict)
    nonlinearity: dict = dc_field(default_factory=lambda: {"name": "power", "mu": 2.0})
    field: dict = dc_field(default_factory=lambda: {"generator": "gaussian"})
    check: dict = dc_field(default_factory=dict)
    heat: dict = dc_field(default_factory=dict)
    j_max: int | None = None
    seed: int = 0
    output_dir: str = "herzlab_out"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dc_fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "command" not in d:
            raise ConfigError("config needs a command")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.command == "verify":
            name = self.check.get("name")
            if name not in checks.CHECKS:
                raise ConfigError(f"unknown check {name!r}; expected one of {sorted(checks.CHECKS)}")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        out = Path(self.output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            probe = out / ".write_probe"
            probe.write_text("")
            probe.unlink()
        except OSError as exc:
            raise ConfigError(f"output_dir {out} is not writable: {exc}") from exc

    # builders -------------------------------------------------------------

    def grid_spec(self) -> GridSpec:
        g = self.grid
        try:
            return GridSpec(int(g.get("dim", 1)), float(g["halfwidth"]), int(g["points_per_axis"]))
        except KeyError as exc:
            raise ConfigError(f"grid needs {exc.args[0]}") from exc

    def tl_params(self, **overrides) -> TLParams:
        p = {"p": 2.0, "q": 2.0, "alpha": 0.0, "s": 0.0, "beta": 2.0, **self.params, **overrides}
        k_min = p.get("k_min")
        k_max = p.get("k_max")
        return TLParams.make(
            _num(p["p"]), _num(p["q"]), _num(p["alpha"]), _num(p["s"]), _num(p["beta"]),
            None if k_min is None else int(k_min), None if k_max is None else int(k_max),
        )

    def solver_config(self, monitor: TLParams | None = None) -> MildSolverConfig:
        s = dict(self.solver)
        if "T" not in s:
            raise ConfigError("solver needs a horizon T")
        monitored = s.pop("monitor_norm", True) and monitor is not None
        try:
            return MildSolverConfig(norm_params=monitor if monitored else None, **{k: _num(v) if k in ("T", "picard_tol", "blowup_threshold") else int(v) for k, v in s.items()})
        except TypeError as exc:
            raise ConfigError(f"bad solver settings: {exc}") from exc

    def lip_function(self):
        nl = self.nonlinearity
        return nonlinearity_by_name(nl.get("name", "power"), float(nl.get("mu", 2.0)), float(nl.get("scale", 1.0)))

    def input_field(self, grid: GridSpec, spec: dict | None = None) -> SampledField:
        return build_field(grid, spec if spec is not None else self.field, self.seed)

    def resolved(self, grid: GridSpec | None = None) -> dict:
        d = asdict(self)
        tp = self.tl_params()
        d["params"] = {**self.params, "p": tp.p, "q": tp.q, "alpha": tp.alpha, "s": tp.s, "beta": tp.beta}
        if grid is not None:
            d["grid"] = grid.to_dict()
            hp = tp.herz.resolve(grid)
            d["params"].update(k_min=hp.k_min, k_max=hp.k_max)
            if self.command in ("norm", "decompose", "heat", "solve"):
                d["j_max"] = build_dyadic_system(grid, self.j_max).j_max
        if "T" in self.solver:
            sc = self.solver_config()
            d["solver"] = {**self.solver, **{k: v for k, v in asdict(sc).items() if k != "norm_params"}}
        return jsonable(d)


def build_field(grid: GridSpec, spec: dict, seed: int) -> SampledField:
    """Field from a config entry: a family generator, ``gaussian``, ``constant``, ``zero`` or ``file``."""
    spec = dict(spec)
    gen = spec.pop("generator", None)
    if gen == "zero":
        return SampledField.zeros(grid)
    if gen == "constant":
        return SampledField(grid, np.full(grid.shape, float(spec.get("value", 1.0))))
    if gen == "gaussian":
        return gaussian(grid, float(spec.get("width", 1.0)), amplitude=float(spec.get("amplitude", 1.0)))
    if gen == "file":
        f = load_field(spec["stem"])
        if f.grid != grid:
            raise ConfigError("loaded field does not match the configured grid")
        return f
    if gen in GENERATORS:
        if gen == "random_band_weighted":
            spec.setdefault("seed", seed)
        try:
            return GENERATORS[gen](grid, spec)
        except KeyError as exc:
            raise ConfigError(f"field generator {gen} needs {exc.args[0]}") from exc
    raise ConfigError(f"unknown field generator {gen!r}")


def _family(cfg: RunConfig, grid: GridSpec) -> list[SampledField]:
    fam = cfg.check.get("family")
    if fam is None:
        raise ConfigError("this check needs a family")
    if "m_range" in fam:
        lo, hi, count = fam["m_range"]
        return FunctionFamily.dilated(np.linspace(lo, hi, int(count))).fields(grid)
    members = fam.get("members")
    if fam.get("generator") == "random_band_weighted" and "seeds" in fam:
        members = [dict(s=fam["s"], seed=cfg.seed + int(sd)) for sd in fam["seeds"]]
    return FunctionFamily(fam["generator"], tuple(members or ())).fields(grid)


def _times(spec, default=None) -> list[float]:
    if spec is None:
        if default is None:
            raise ConfigError("missing time grid")
        return default
    if isinstance(spec, dict):
        return list(np.logspace(math.log10(spec["start"]), math.log10(spec["stop"]), int(spec["count"])))
    return [float(t) for t in spec]


def _tl_from(d: dict) -> TLParams:
    return TLParams.make(_num(d["p"]), _num(d["q"]), _num(d["alpha"]), _num(d["s"]), _num(d["beta"]))


def run_check(cfg: RunConfig) -> CheckReport:
    """Dispatch the configured verification check."""
    c = dict(cfg.check)
    name = c.pop("name")
    c.pop("family", None)
    grid = cfg.grid_spec()
    if name == "hardy_sequences":
        return checks.check_hardy_sequences(
            lengths=c.get("lengths", (8, 16, 32, 64)),
            a_values=c.get("a_values", (0.25, 0.5, 0.75)),
            q_values=[_num(q) for q in c.get("q_values", (0.5, 1, 2, "inf"))],
            trials=int(c.get("trials", 100)),
            seed=cfg.seed,
        )
    if name == "herz_smoothing":
        return checks.check_herz_smoothing(
            grid, _num(c["p"]), _num(c["q"]), _num(c["alpha1"]), _num(c["alpha2"]), _num(c.get("r", 8.0)),
            _times(c.get("t_grid"), list(np.logspace(-5, -3, 8))),
        )
    sys_ = build_dyadic_system(grid, cfg.j_max)
    tp = cfg.tl_params()
    if name == "heat_smoothing":
        return checks.check_heat_smoothing(
            cfg.input_field(grid), tp.s, [float(t) for t in c.get("thetas", (0.5, 1.0))],
            _times(c.get("t_grid"), list(np.logspace(-4, -2, 8))), tp, sys_,
        )
    if name == "composition":
        return checks.check_composition(cfg.lip_function(), _family(cfg, grid), tp, sys_, c.get("variant", "general"))
    if name == "product":
        return checks.check_product(_family(cfg, grid), int(c.get("m", 2)), tp, sys_, c.get("variant", "general"))
    if name == "embedding_interpolation":
        emb = c.get("embedding")
        itp = c.get("interpolation")
        return checks.check_embedding_interpolation(
            _family(cfg, grid), sys_,
            embedding=None if emb is None else (_tl_from(emb["source"]), _tl_from(emb["target"])),
            interpolation=None if itp is None else (_tl_from(itp["params0"]), _tl_from(itp["params1"])),
            thetas=[float(t) for t in c.get("thetas", (0.25, 0.5, 0.75))],
        )
    if name == "blowup_scaling":
        return checks.check_blowup_scaling(
            cfg.input_field(grid), [float(x) for x in c.get("lambdas", (1, 2, 4, 8))], cfg.lip_function(),
            cfg.solver_config(), tp, None, calibrate=c.get("calibrate", "smallest"),
        )
    if name == "regularity_gain":
        return checks.check_regularity_gain(
            cfg.input_field(grid), float(c["theta"]), cfg.solver_config(), tp, sys_, cfg.lip_function(),
            refine=int(c.get("refine", 2)),
        )
    if name == "optimality_probe":
        return checks.check_optimality_probe(
            float(c.get("kappa", 0.5)), [float(d) for d in c.get("d_values", (0.7, 1.3))], tp, sys_,
            refine=int(c.get("refine", 4)), cutoff_radius=float(c.get("cutoff_radius", 1.0)),
            profile=c.get("profile", "gaussian"),
        )
    raise ConfigError(f"unknown check {name!r}")


def _write_csv(path: Path, header: list[str], rows) -> None:
    import csv

    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute ``cfg``; returns (exit status, report dict). Artifacts go to ``cfg.output_dir``."""
    out = Path(cfg.output_dir)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    status, result, code = "ok", {}, EXIT_OK
    grid = None
    try:
        if cfg.command == "verify":
            rep = run_check(cfg)
            rep.to_csv(out / f"{rep.check_name}_points.csv")
            result = rep.to_dict(include_runtime=False)
            status = rep.verdict
            code = EXIT_OK if rep.verdict == PASS else EXIT_FAIL
            runtime_extra = {"check_runtime": rep.runtime}
        else:
            grid = cfg.grid_spec()
            sys_ = build_dyadic_system(grid, cfg.j_max)
            tp = cfg.tl_params()
            f = cfg.input_field(grid)
            runtime_extra = {}
            if cfg.command == "norm":
                result = {
                    "ktl_norm": ktl_norm(f, tp, sys_),
                    "herz_norm": herz_norm(f, tp.herz),
                    "sup_norm": f.sup_norm(),
                    "l2_norm": f.l2_norm(),
                }
                export_breakdown_csv(f, tp, sys_, out / "breakdown.csv")
            elif cfg.command == "decompose":
                blocks = lp_blocks(f, sys_)
                recon = np.sum(blocks, axis=0)
                levels = [
                    (j, float(np.sqrt(np.sum(np.abs(blocks[j]) ** 2) * grid.cell_volume)), float(np.max(np.abs(blocks[j]))))
                    for j in sys_.levels
                ]
                _write_csv(out / "levels.csv", ["j", "l2_norm", "sup_norm"], levels)
                export_multipliers_csv(sys_, out / "multipliers.csv")
                err = float(np.sqrt(np.sum(np.abs(recon - f.samples) ** 2)) / max(np.sqrt(np.sum(np.abs(f.samples) ** 2)), 1e-300))
                result = {"j_max": sys_.j_max, "reconstruction_rel_err": err, "levels": [list(r) for r in levels]}
            elif cfg.command == "heat":
                times = _times(cfg.heat.get("times"), [0.0, 0.1, 0.5, 1.0])
                rows = []
                for t in times:
                    g = heat_propagate(f, t)
                    rows.append((t, ktl_norm(g, tp, sys_), herz_norm(g, tp.herz), g.sup_norm()))
                _write_csv(out / "heat.csv", ["time", "ktl_norm", "herz_norm", "sup_norm"], rows)
                result = {"rows": [list(r) for r in rows]}
            elif cfg.command == "solve":
                scfg = cfg.solver_config(monitor=tp)
                traj = solve_mild(f, cfg.lip_function(), scfg, sys_)
                traj.to_csv(out / "trajectory.csv")
                status = traj.status
                result = {
                    "status": traj.status,
                    "status_time": traj.status_time,
                    "iterations": traj.iterations,
                    "final_time": float(traj.times[-1]) if len(traj.times) else 0.0,
                    "final_norm": float(traj.norm_trace[-1]) if len(traj.norm_trace) else None,
                    "final_sup_norm": traj.final.sup_norm() if traj.states else None,
                    "monitored": "ktl_norm" if scfg.norm_params is not None else "sup_norm",
                    "contraction_ratios": list(traj.contraction_ratios),
                }
                code = EXIT_OK if traj.status == COMPLETED else EXIT_FAIL
    except (FloatingPointError, np.linalg.LinAlgError, HerzlabError) as exc:
        if isinstance(exc, (ParameterError, ResolutionError, InputDomainError, CompositionError)):
            raise
        status, code = "error", EXIT_FAIL
        result = {**result, "error": f"{type(exc).__name__}: {exc}"}
        runtime_extra = {}
    report = {
        "command": cfg.command,
        "status": status,
        "config": cfg.resolved(grid),
        "result": jsonable(result),
        "metadata": {
            "started": started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "runtime": time.perf_counter() - t0,
            **runtime_extra,
        },
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return code, report


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="herzlab", description="Herz-type Triebel-Lizorkin spectral toolkit")
    ap.add_argument("--config", required=True, help="path to the JSON run configuration")
    ap.add_argument("--seed", type=int, default=None, help="override the config seed")
    ap.add_argument("--output", default=None, help="override the output directory")
    args = ap.parse_args(argv)
    try:
        data = json.loads(Path(args.config).read_text())
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        if args.seed is not None:
            data["seed"] = args.seed
        if args.output is not None:
            data["output_dir"] = args.output
        cfg = RunConfig.from_dict(data)
        code, report = run(cfg)
    except (OSError, json.JSONDecodeError, ParameterError, ResolutionError, InputDomainError, CompositionError,
            KeyError, TypeError, ValueError) as exc:
        print(f"configuration error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{report['command']}: {report['status']} -> {Path(cfg.output_dir) / 'report.json'}")
    return code


if __name__ == "__main__":
    sys.exit(main())
