"""Batch front end: flat-file configuration, experiment drivers, artifacts.

Every run resolves its configuration (defaults < config file < flags), writes
its outputs into the chosen directory, and finishes with a ``manifest.json``
recording the resolved configuration and the SHA-256 of every artifact, so
identical configurations are verifiably reproducible.

Exit codes: 0 success, 2 configuration, 3 blowup, 4 fit/convergence failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__, checks, diagnostics, svg
from .errors import (
    BlowupError,
    ConfigError,
    ConvergenceError,
    DomainError,
    FitError,
    WindowError,
)
from .fluxes import CARREAU, POWER_LAW, ConvexFlux, ViscosityModel
from .solver import (
    DEFAULT_DX,
    Grid1D,
    SolverConfig,
    auto_grid,
    convergence_study,
    parse_perturbation,
    simulate,
)
from .waves import RiemannData, SmoothRarefaction, SmoothWave, exact_rarefaction, rate_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_FIT = 4

KINDS = ("simulate", "rates", "sweep", "convergence", "check", "plot")


@dataclass(frozen=True)
class RunConfig:
    """Resolved flat configuration of one experiment."""

    kind: str = "simulate"
    flux: str = "burgers"
    viscosity: str = "carreau"
    mu: float = 1.0
    p: float = 1.0
    q: float = 1.0
    u_minus: float = -0.5
    u_plus: float = 0.5
    t_end: float = 50.0
    n_cells: int | None = None      # None: sized from dx <= 0.05
    x_min: float | None = None      # None: fan-containment auto domain
    x_max: float | None = None
    cfl_adv: float = 0.4
    cfl_diff: float = 0.4
    integrator: str = "rk2"
    perturbation: str = "none"
    seed: int = 0
    out: str = "out"
    plots: bool = False
    p_list: str = ""
    snapshot_times: str = ""        # CSV; empty: dyadic times plus t_end
    refinements: int = 3
    pure_diffusion: bool = False


_OPTIONAL = {"n_cells", "x_min", "x_max"}


def _field_types() -> dict:
    out = {}
    for f in fields(RunConfig):
        base = {"float | None": float, "int | None": int}.get(f.type)
        if base is None:
            base = {"float": float, "int": int, "bool": bool, "str": str}[f.type]
        out[f.name] = base
    return out


FIELD_TYPES = _field_types()


def _coerce(key: str, value: str, where: str):
    typ = FIELD_TYPES[key]
    if key in _OPTIONAL and value == "auto":
        return None
    try:
        if typ is bool:
            low = value.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(value)
        return typ(value)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {value!r}") from exc


def read_config_file(path) -> dict:
    """Plain `key = value` lines; `#` starts a comment."""
    data = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "kind":
            raise ConfigError(f"{path}:{lineno}: 'kind' comes from the subcommand")
        if key not in FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        data[key] = _coerce(key, value, f"{path}:{lineno}")
    return data


def serialize_config(rc: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        if f.name == "kind":
            continue
        value = getattr(rc, f.name)
        if value is None:
            value = "auto"
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def _validate_runconfig(rc: RunConfig) -> RunConfig:
    if rc.kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {rc.kind!r}")
    if rc.flux not in ("burgers", "quartic"):
        raise ConfigError(f"unknown flux {rc.flux!r} (burgers|quartic)")
    if rc.viscosity not in ("carreau", "powerlaw"):
        raise ConfigError(f"unknown viscosity {rc.viscosity!r} (carreau|powerlaw)")
    if not rc.mu > 0.0:
        raise ConfigError("mu must be positive")
    if not rc.p > 0.0:
        raise ConfigError("p must be positive")
    if not rc.q > 0.5:
        raise ConfigError("q must exceed 1/2 (profile tail integrability)")
    if not rc.u_minus < rc.u_plus:
        raise ConfigError(
            f"fan configuration requires u_minus < u_plus, "
            f"got {rc.u_minus} >= {rc.u_plus}")
    if rc.t_end < 0.0:
        raise ConfigError("t_end must be non-negative")
    if rc.integrator not in ("rk2", "rk3"):
        raise ConfigError(f"unknown integrator {rc.integrator!r} (rk2|rk3)")
    if rc.kind == "sweep" and not rc.p_list:
        raise ConfigError("sweep requires --p-list")
    return rc


def parse_config(kind: str, config_path=None, overrides=None) -> RunConfig:
    """Resolve kind + optional file + flag overrides into a RunConfig."""
    data = {"kind": kind}
    if config_path is not None:
        data.update(read_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in FIELD_TYPES:
            raise ConfigError(f"unknown configuration key {key!r}")
        data[key] = value
    return _validate_runconfig(RunConfig(**data))


def _parse_csv_floats(text: str, what: str) -> list[float]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            out.append(float(item))
        except ValueError as exc:
            raise ConfigError(f"bad {what} entry {item!r}") from exc
    return out


def _default_snapshot_times(t_end: float) -> tuple:
    times = {0.0, t_end}
    k = 0
    while 2.0**k < t_end:
        times.add(2.0**k)
        k += 1
    return tuple(sorted(times))


def build_solver_config(rc: RunConfig) -> SolverConfig:
    flux = ConvexFlux.burgers() if rc.flux == "burgers" else ConvexFlux.quartic()
    try:
        visc = ViscosityModel(CARREAU if rc.viscosity == "carreau" else POWER_LAW,
                              rc.mu, rc.p)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    riemann = RiemannData(rc.u_minus, rc.u_plus)
    base = auto_grid(flux, riemann, rc.t_end, DEFAULT_DX, rc.pure_diffusion)
    x_min = base.x_min if rc.x_min is None else rc.x_min
    x_max = base.x_max if rc.x_max is None else rc.x_max
    if rc.n_cells is None:
        n_cells = int(math.ceil((x_max - x_min) / DEFAULT_DX))
    else:
        n_cells = rc.n_cells
    spec = rc.perturbation
    if spec.startswith("random:") and "seed=" not in spec:
        spec = f"{spec},seed={rc.seed}"
    if rc.snapshot_times:
        snaps = tuple(sorted(set(_parse_csv_floats(rc.snapshot_times, "snapshot time"))))
    else:
        snaps = _default_snapshot_times(rc.t_end)
    cfg = SolverConfig(
        flux=flux,
        viscosity=visc,
        riemann=riemann,
        grid=Grid1D(x_min, x_max, n_cells),
        t_end=rc.t_end,
        cfl_advective=rc.cfl_adv,
        cfl_diffusive=rc.cfl_diff,
        integrator=rc.integrator,
        snapshot_times=snaps,
        perturbation=parse_perturbation(spec),
        q=rc.q,
        pure_diffusion=rc.pure_diffusion,
    )
    cfg.validate()
    return cfg


# --- artifact helpers --------------------------------------------------------

def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _config_dict(rc: RunConfig) -> dict:
    out = {}
    for key, value in asdict(rc).items():
        out[key] = "auto" if value is None else value
    return out


def write_manifest(outdir: Path, rc: RunConfig, artifact_names) -> Path:
    manifest = {
        "tool": "viscwave",
        "version": __version__,
        "command": rc.kind,
        "config": _config_dict(rc),
        "artifacts": {name: _sha256(outdir / name) for name in sorted(artifact_names)},
    }
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(repr(float(v)) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _snapshot_name(t: float) -> str:
    return f"snap_t{t:.6g}.csv"


# --- experiment drivers --------------------------------------------------------

@dataclass
class RunOutput:
    outdir: Path
    manifest: Path
    artifacts: list
    payload: object = None


def run_simulate(rc: RunConfig) -> RunOutput:
    cfg = build_solver_config(rc)
    outdir = Path(rc.out)
    outdir.mkdir(parents=True, exist_ok=True)
    result = simulate(cfg)
    rare = SmoothRarefaction.build(cfg.flux, cfg.riemann, cfg.q)
    names = []
    for snap in result.snapshots:
        u_wave = rare.U(snap.t, snap.x)
        name = _snapshot_name(snap.t)
        _write_csv(outdir / name, "x,u,U,phi",
                   zip(snap.x, snap.values, u_wave, snap.values - u_wave))
        names.append(name)
    diagnostics.records_to_csv(result.records, outdir / "diagnostics.csv")
    names.append("diagnostics.csv")
    summary = diagnostics.run_summary(result.records)
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    names.append("summary.json")
    manifest = write_manifest(outdir, rc, names)
    if rc.plots:
        emit_plots(outdir)
    return RunOutput(outdir, manifest, names, result)


RATE_NORMS = [(1, 1), (1, 2), (1, math.inf), (2, 1), (2, 2), (2, math.inf)]


def run_rates(rc: RunConfig) -> RunOutput:
    flux = ConvexFlux.burgers() if rc.flux == "burgers" else ConvexFlux.quartic()
    riemann = RiemannData(rc.u_minus, rc.u_plus)
    wave = SmoothWave.for_flux(flux, riemann, rc.q)
    times = np.logspace(2, 4, 25)
    outdir = Path(rc.out)
    outdir.mkdir(parents=True, exist_ok=True)
    names = []
    fit_digest = {}
    for field_name in ("w", "U"):
        tbl = rate_table(wave, times, RATE_NORMS, field_name=field_name,
                         flux=flux, riemann=riemann)
        name = f"rates_{field_name}.csv"
        tbl.to_csv(outdir / name)
        names.append(name)
        fit_digest[field_name] = {
            f"k{k}_r{'inf' if r == math.inf else r}":
                None if tbl.slope(k, r) is None else tbl.slope(k, r).slope
            for (k, r) in RATE_NORMS}
    (outdir / "rates_summary.json").write_text(
        json.dumps({"q": rc.q, "slopes": fit_digest}, indent=2, sort_keys=True) + "\n")
    names.append("rates_summary.json")
    manifest = write_manifest(outdir, rc, names)
    if rc.plots:
        emit_plots(outdir)
    return RunOutput(outdir, manifest, names, fit_digest)


def _sweep_member(payload) -> dict:
    rc = RunConfig(**payload)
    row = {"p": rc.p, "completed": False, "error": "",
           "final_sup_dev_exact": math.nan, "ess_sup_bracket": math.nan,
           "final_l2_phi": math.nan, "n_steps": 0}
    try:
        out = run_simulate(rc)
        result = out.payload
        summary = diagnostics.run_summary(result.records)
        row.update(completed=True,
                   final_sup_dev_exact=summary["final_sup_dev_exact"],
                   ess_sup_bracket=summary["ess_sup_bracket"],
                   final_l2_phi=result.records[-1].l2_phi,
                   n_steps=result.n_steps)
    except BlowupError:
        row["error"] = "Blowup"
    except ConfigError:
        row["error"] = "Config"
    except ConvergenceError:
        row["error"] = "Convergence"
    return row


def run_sweep(rc: RunConfig) -> RunOutput:
    p_values = sorted(set(_parse_csv_floats(rc.p_list, "p-list")))
    if not p_values:
        raise ConfigError("sweep requires a non-empty --p-list")
    outdir = Path(rc.out)
    outdir.mkdir(parents=True, exist_ok=True)
    payloads = []
    for p in p_values:
        member = replace(rc, kind="simulate", p=p,
                         out=str(outdir / f"p_{p:g}"), plots=False, p_list="")
        payloads.append(asdict(member))
    workers = min(len(payloads), os.cpu_count() or 1)
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_member, payloads))
    else:
        rows = [_sweep_member(p) for p in payloads]
    rows.sort(key=lambda r: r["p"])
    header = "p,completed,error,final_sup_dev_exact,ess_sup_bracket,final_l2_phi,n_steps"
    lines = [header]
    for row in rows:
        lines.append(",".join([
            repr(row["p"]), str(row["completed"]).lower(), row["error"],
            repr(row["final_sup_dev_exact"]), repr(row["ess_sup_bracket"]),
            repr(row["final_l2_phi"]), str(row["n_steps"])]))
    (outdir / "sweep_summary.csv").write_text("\n".join(lines) + "\n")
    manifest = write_manifest(outdir, rc, ["sweep_summary.csv"])
    return RunOutput(outdir, manifest, ["sweep_summary.csv"], rows)


def run_convergence(rc: RunConfig) -> RunOutput:
    cfg = build_solver_config(rc)
    rows = convergence_study(cfg, rc.refinements)
    outdir = Path(rc.out)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["n_cells,error,observed_order"]
    for row in rows:
        lines.append(f"{row.n_cells},{row.error!r},{row.observed_order!r}")
    (outdir / "convergence.csv").write_text("\n".join(lines) + "\n")
    manifest = write_manifest(outdir, rc, ["convergence.csv"])
    return RunOutput(outdir, manifest, ["convergence.csv"], rows)


def run_check(rc: RunConfig) -> tuple[RunOutput, bool]:
    outdir = Path(rc.out)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = []

    def report(line):
        lines.append(line)
        print(line)

    ok = checks.run_all(report)
    (outdir / "check_report.txt").write_text("\n".join(lines) + "\n")
    manifest = write_manifest(outdir, rc, ["check_report.txt"])
    return RunOutput(outdir, manifest, ["check_report.txt"], lines), ok


# --- plotting --------------------------------------------------------------------

def _read_csv_columns(path: Path) -> dict:
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    cols = {h: [] for h in header}
    for ln in lines[1:]:
        for h, v in zip(header, ln.split(",")):
            cols[h].append(float(v))
    return {h: np.asarray(v) for h, v in cols.items()}


def _fit_summary_line(path: Path) -> dict | None:
    for ln in path.read_text().splitlines():
        if ln.startswith("# fit-summary: "):
            return json.loads(ln[len("# fit-summary: "):])
    return None


def _decimate(arr, limit=1600):
    stride = max(1, len(arr) // limit)
    return arr[::stride]


def emit_plots(run_dir) -> list[Path]:
    """Render SVG plots for the artifacts found in a run directory."""
    run_dir = Path(run_dir)
    written = []

    diag = run_dir / "diagnostics.csv"
    if diag.exists():
        cols = _read_csv_columns(diag)
        series = [(name, cols["t"], cols[name])
                  for name in ("l2_phi", "sup_phi", "linf_dxphi", "sup_dev_exact")]
        text = svg.line_plot(series, title="deviation decay", xlabel="t",
                             ylabel="norm", logx=True, logy=True)
        if text is None:
            print(f"warning: no plottable series in {diag}")
        else:
            path = run_dir / "decay_loglog.svg"
            path.write_text(text)
            written.append(path)

    manifest_path = run_dir / "manifest.json"
    snaps = sorted(run_dir.glob("snap_t*.csv"),
                   key=lambda p: float(p.stem[len("snap_t"):]))
    if snaps and manifest_path.exists():
        config = json.loads(manifest_path.read_text())["config"]
        snap = snaps[-1]
        t = float(snap.stem[len("snap_t"):])
        cols = _read_csv_columns(snap)
        x = _decimate(cols["x"])
        series = [("u", x, _decimate(cols["u"])), ("U", x, _decimate(cols["U"]))]
        if t > 0.0:
            flux = ConvexFlux.burgers() if config["flux"] == "burgers" else ConvexFlux.quartic()
            riemann = RiemannData(config["u_minus"], config["u_plus"])
            series.append(("u^r", x, exact_rarefaction(flux, riemann, x / t)))
        text = svg.line_plot(series, title=f"profiles at t={t:.6g}", xlabel="x", ylabel="u")
        if text is None:
            print(f"warning: no plottable profile in {snap}")
        else:
            path = run_dir / "profile.svg"
            path.write_text(text)
            written.append(path)

    for rates in sorted(run_dir.glob("rates_*.csv")):
        cols = _read_csv_columns(rates)
        summary = _fit_summary_line(rates)
        keys = [k for k in cols if k != "t"]
        series = [(k, cols["t"], cols[k]) for k in keys]
        notes = []
        if summary:
            for key, fit in sorted(summary["fits"].items()):
                if fit is not None:
                    notes.append(f"{key}: slope {fit['slope']:.3f}")
        text = svg.line_plot(series, title=rates.stem, xlabel="t", ylabel="norm",
                             logx=True, logy=True, annotations=notes)
        if text is None:
            print(f"warning: no plottable series in {rates}")
            continue
        path = run_dir / f"{rates.stem}.svg"
        path.write_text(text)
        written.append(path)
    return written


# --- entry point --------------------------------------------------------------------

def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="key = value configuration file")
    sub.add_argument("--flux", choices=["burgers", "quartic"], default=None)
    sub.add_argument("--viscosity", choices=["carreau", "powerlaw"], default=None)
    sub.add_argument("--mu", type=float, default=None)
    sub.add_argument("--p", type=float, default=None)
    sub.add_argument("--p-list", dest="p_list", default=None)
    sub.add_argument("--q", type=float, default=None)
    sub.add_argument("--u-minus", dest="u_minus", type=float, default=None)
    sub.add_argument("--u-plus", dest="u_plus", type=float, default=None)
    sub.add_argument("--t-end", dest="t_end", type=float, default=None)
    sub.add_argument("--n-cells", dest="n_cells", type=int, default=None)
    sub.add_argument("--x-min", dest="x_min", type=float, default=None)
    sub.add_argument("--x-max", dest="x_max", type=float, default=None)
    sub.add_argument("--cfl-adv", dest="cfl_adv", type=float, default=None)
    sub.add_argument("--cfl-diff", dest="cfl_diff", type=float, default=None)
    sub.add_argument("--integrator", choices=["rk2", "rk3"], default=None)
    sub.add_argument("--perturbation", default=None,
                     help="none | gaussian:a=,c=,s= | sine:a=,c=,s=,k= | random:a=,ell=[,seed=]")
    sub.add_argument("--snapshot-times", dest="snapshot_times", default=None)
    sub.add_argument("--refinements", type=int, default=None)
    sub.add_argument("--pure-diffusion", dest="pure_diffusion",
                     action="store_true", default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", default=None)
    sub.add_argument("--plots", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viscwave",
        description="Viscous conservation-law laboratory (fan stability studies)")
    subs = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sub = subs.add_parser(kind)
        if kind == "plot":
            sub.add_argument("run_dir", help="directory of a previous run")
        else:
            _add_common_flags(sub)
    return parser


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.kind == "plot":
            written = emit_plots(ns.run_dir)
            for path in written:
                print(f"wrote {path}")
            return EXIT_OK
        overrides = {k: v for k, v in vars(ns).items()
                     if k in FIELD_TYPES and v is not None}
        rc = parse_config(ns.kind, ns.config, overrides)
        if rc.kind == "simulate":
            out = run_simulate(rc)
            print(f"wrote {out.manifest}")
        elif rc.kind == "rates":
            out = run_rates(rc)
            print(f"wrote {out.manifest}")
        elif rc.kind == "sweep":
            out = run_sweep(rc)
            for row in out.payload:
                status = "ok" if row["completed"] else f"FAILED({row['error']})"
                print(f"p={row['p']:g}: {status} "
                      f"sup_dev={row['final_sup_dev_exact']:.6g} "
                      f"bracket={row['ess_sup_bracket']:.6g}")
            print(f"wrote {out.manifest}")
        elif rc.kind == "convergence":
            out = run_convergence(rc)
            for row in out.payload:
                print(f"n={row.n_cells}: error={row.error:.6e} "
                      f"order={row.observed_order:.3f}")
            print(f"wrote {out.manifest}")
        elif rc.kind == "check":
            _, ok = run_check(rc)
            return EXIT_OK if ok else EXIT_FIT
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowupError as exc:
        print(f"blowup: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (ConvergenceError, FitError, WindowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FIT
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
