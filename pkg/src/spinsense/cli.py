"""Command-line front end for the collective-spin sensing library.

Subcommands map onto the library layers: space inspection, single
evolutions, interrogation-time sweeps, particle-number scans, power-law
fits, Husimi maps, and a one-shot verification battery.

Every output is deterministic and self-describing: a metadata header
(package version, resolved configuration, configuration hash, whether the
rate default was assumed) precedes the data, so any table can be
reproduced from its own header. Curves and scans are emitted as RFC-4180
CSV with '#'-prefixed metadata lines; single-result commands emit JSON.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .dicke import (build_space, coherent_state, collective_operator,
                    dicke_dimension, ghz_state, simultaneous_probe)
from .dephasing import NoiseKind, NoiseSpec, build_dephasing_superoperator
from .dynamics import (FieldBasis, FieldParams, evolve, full_gkls_reference,
                       full_hilbert_reference)
from .errors import (AssumptionViolated, DegenerateProbe, ExperimentFailed,
                     InvalidArgument, NumericalError, SingularQfim)
from .experiments import (SweepConfig, SweepScenario, TimeGrid, fit_power_law,
                          husimi_grid, husimi_map, scan_particles, sweep_time)

_DEFAULT_PHI = (0.01, 0.01, 0.01)
_DEFAULT_AXIS = (2.0 / math.sqrt(3.0),) * 3

_PROBES = ("ghz-x", "ghz-y", "ghz-z", "sim")

_CRLF = "\r\n"


# ---------------------------------------------------------------------------
# Option table and argument parsing
# ---------------------------------------------------------------------------

def _split_values(text, count, what):
    """Accept both 'a,b,c' strings (flags) and JSON lists (config files)."""
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != count:
        raise InvalidArgument(f"{what} needs {count} values, got {text!r}")
    return parts


def _triple(text):
    try:
        return tuple(float(p) for p in _split_values(text, 3, "vector"))
    except ValueError as exc:
        raise InvalidArgument(f"could not parse {text!r} as three numbers") from exc


def _grid_spec(text):
    parts = _split_values(text, 3, "t-grid (count,min,max)")
    try:
        return TimeGrid(count=int(parts[0]), start=float(parts[1]), stop=float(parts[2]))
    except ValueError as exc:
        raise InvalidArgument(f"could not parse t-grid {text!r}") from exc


def _shape(text):
    parts = _split_values(text, 2, "grid (rows,cols)")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise InvalidArgument(f"could not parse grid {text!r}") from exc


def _int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise InvalidArgument("n-list must not be empty")
    try:
        return [int(p) for p in parts]
    except ValueError as exc:
        raise InvalidArgument(f"could not parse n-list {text!r}") from exc


def _as_bool(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise InvalidArgument(f"expected a boolean, got {value!r}")


# One row per option: kebab name, argparse kwargs, coercion for config-file
# values, and the resolved default. Commands pick subsets from this table.
_OPTIONS = {
    "n": dict(flag="--n", help="particle count N", coerce=int, default=None,
              kwargs=dict(type=int, metavar="N")),
    "gamma": dict(flag="--gamma", help="dephasing rate", coerce=float, default=0.05,
                  kwargs=dict(type=float, metavar="G")),
    "kind": dict(flag="--kind", help="noise profile", coerce=str, default="markovian",
                 kwargs=dict(choices=["markovian", "nonmarkovian", "none"])),
    "scenario": dict(flag="--scenario", help="estimation strategy", coerce=str,
                     default="sim", kwargs=dict(choices=["sim", "ind"])),
    "t-total": dict(flag="--t-total", help="total time budget T", coerce=float,
                    default=100.0, kwargs=dict(type=float, metavar="T")),
    "phi": dict(flag="--phi", help="field components x,y,z", coerce=_triple,
                default=_DEFAULT_PHI, kwargs=dict(type=_triple, metavar="X,Y,Z")),
    "axis": dict(flag="--axis", help="noise axis x,y,z (norm 2)", coerce=_triple,
                 default=_DEFAULT_AXIS, kwargs=dict(type=_triple, metavar="X,Y,Z")),
    "t-grid": dict(flag="--t-grid", help="shot-duration grid count,min,max",
                   coerce=_grid_spec, default=TimeGrid(),
                   kwargs=dict(type=_grid_spec, metavar="C,MIN,MAX")),
    "n-list": dict(flag="--n-list", help="particle counts, ascending",
                   coerce=_int_list, default=None,
                   kwargs=dict(type=_int_list, metavar="N1,N2,...")),
    "t": dict(flag="--t", help="shot duration", coerce=float, default=None,
              kwargs=dict(type=float, metavar="T")),
    "probe": dict(flag="--probe", help="initial state", coerce=str, default=None,
                  kwargs=dict(choices=list(_PROBES))),
    "allow-nonparallel": dict(flag="--allow-nonparallel",
                              help="fall back to the joint integrator off-axis",
                              coerce=_as_bool, default=False,
                              kwargs=dict(action="store_true", default=None)),
    "grid": dict(flag="--grid", help="husimi grid rows,cols", coerce=_shape,
                 default=(181, 360), kwargs=dict(type=_shape, metavar="ROWS,COLS")),
    "in": dict(flag="--in", help="input CSV produced by scan-n", coerce=str,
               default=None, kwargs=dict(type=str, metavar="PATH", dest="in")),
    "column": dict(flag="--column", help="value column to fit", coerce=str,
                   default="i_min", kwargs=dict(type=str, metavar="NAME")),
    "n-min": dict(flag="--n-min", help="smallest N included in the fit",
                  coerce=int, default=10, kwargs=dict(type=int, metavar="N")),
    "out": dict(flag="--out", help="output path (default: stdout)", coerce=str,
                default=None, kwargs=dict(type=str, metavar="PATH")),
    "format": dict(flag="--format", help="output encoding", coerce=str,
                   default=None, kwargs=dict(choices=["csv", "json"])),
    "workers": dict(flag="--workers", help="worker process cap", coerce=int,
                    default=None, kwargs=dict(type=int, metavar="K")),
    "seed": dict(flag="--seed", help="reserved; computation is deterministic",
                 coerce=int, default=None, kwargs=dict(type=int, metavar="S")),
    "verbose": dict(flag="--verbose", help="progress notes on stderr",
                    coerce=int, default=0, kwargs=dict(action="count", default=None)),
}

# Options consumed by each subcommand. "config" is implicit everywhere.
_COMMANDS = {
    "space-info": ("n", "out", "format", "verbose"),
    "evolve": ("n", "gamma", "kind", "phi", "axis", "t", "probe",
               "allow-nonparallel", "seed", "out", "format", "verbose"),
    "sweep-time": ("n", "gamma", "kind", "scenario", "t-total", "phi", "axis",
                   "t-grid", "workers", "seed", "out", "format", "verbose"),
    "scan-n": ("n-list", "gamma", "kind", "scenario", "t-total", "phi", "axis",
               "t-grid", "workers", "seed", "out", "format", "verbose"),
    "fit": ("in", "column", "n-min", "out", "format", "verbose"),
    "husimi": ("n", "probe", "grid", "seed", "out", "format", "verbose"),
    "verify": ("n", "out", "verbose"),
}

# Keys that shape the computation and therefore enter the config hash.
_NON_HASHED = ("out", "format", "workers", "verbose")

_COMMAND_HELP = {
    "space-info": "print the sector layout of the collective basis",
    "evolve": "evolve one probe state and report its collective moments",
    "sweep-time": "sweep the shot duration and locate the optimal time",
    "scan-n": "repeat the sweep over a list of particle counts",
    "fit": "fit a power law to a scan-n output column",
    "husimi": "tabulate the Husimi distribution of a probe state",
    "verify": "run the built-in verification battery",
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spinsense",
        description="Collective-spin sensing: dynamics, bounds, and sweeps.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)
    for command, keys in _COMMANDS.items():
        sub = subs.add_parser(command, help=_COMMAND_HELP[command])
        sub.add_argument("--config", type=str, metavar="PATH",
                         help="flat JSON config; explicit flags win")
        for key in keys:
            opt = _OPTIONS[key]
            sub.add_argument(opt["flag"], help=opt["help"], **opt["kwargs"])
    return parser


@dataclass(frozen=True)
class RunConfig:
    """One fully resolved invocation: the command, its parameters, and where
    and how the result is written. explicit_keys records which parameters
    were set by the user (flag or config file) rather than defaulted."""

    command: str
    params: dict
    out: str
    fmt: str
    workers: int
    verbose: int
    explicit_keys: frozenset


def _load_config_file(path, allowed):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidArgument(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidArgument(f"config file {path} must hold a flat JSON object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise InvalidArgument(
            f"config file {path} has unknown keys {unknown}; allowed: {sorted(allowed)}")
    return data


def _resolve(args):
    """Merge flags over the config file over defaults into a RunConfig."""
    command = args.command
    keys = _COMMANDS[command]
    file_values = {}
    if getattr(args, "config", None):
        file_values = _load_config_file(args.config, keys)

    params = {}
    explicit = set()
    for key in keys:
        opt = _OPTIONS[key]
        flag_value = getattr(args, key.replace("-", "_"), None)
        if flag_value is not None:
            params[key] = flag_value
            explicit.add(key)
        elif key in file_values:
            params[key] = opt["coerce"](file_values[key])
            explicit.add(key)
        else:
            params[key] = opt["default"]

    fmt = params.pop("format", None)
    out = params.pop("out", None)
    workers = params.pop("workers", None)
    verbose = params.pop("verbose", 0) or 0
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise InvalidArgument(f"workers must be >= 1, got {workers}")
    return RunConfig(command=command, params=params, out=out, fmt=fmt,
                     workers=workers, verbose=verbose,
                     explicit_keys=frozenset(explicit))


# ---------------------------------------------------------------------------
# Metadata and serialization helpers
# ---------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, TimeGrid):
        return [value.count, value.start, value.stop]
    if isinstance(value, tuple):
        return list(value)
    return value


def _build_meta(run):
    """Metadata block shared by all outputs; the hash covers exactly the
    configuration keys that influence the numbers."""
    cfg = {k: _jsonable(v) for k, v in sorted(run.params.items())
           if k not in _NON_HASHED}
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), allow_nan=False)
    gamma_assumed = "gamma" in run.params and "gamma" not in run.explicit_keys
    return {
        "version": __version__,
        "command": run.command,
        "config": cfg,
        "config-json": blob,
        "config-sha256": hashlib.sha256(blob.encode("utf-8")).hexdigest(),
        "gamma-assumed": bool(gamma_assumed),
    }


def _meta_lines(meta):
    return [
        f"# spinsense-version = {meta['version']}",
        f"# command = {meta['command']}",
        f"# config = {meta['config-json']}",
        f"# config-sha256 = {meta['config-sha256']}",
        f"# gamma-assumed = {'true' if meta['gamma-assumed'] else 'false'}",
    ]


def _json_meta(meta):
    return {
        "version": meta["version"],
        "command": meta["command"],
        "config": meta["config"],
        "config-sha256": meta["config-sha256"],
        "gamma-assumed": meta["gamma-assumed"],
    }


def _fmt_float(x):
    # repr round-trips exactly and is the shortest such form.
    x = float(x)
    if not math.isfinite(x):
        return ""
    return repr(x)


def _sanitize(obj):
    """Replace non-finite floats by None so the JSON stays strict."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _dump_json(document):
    return json.dumps(_sanitize(document), indent=2, sort_keys=True,
                      allow_nan=False) + "\n"


def _csv_text(meta, header, rows, footer=()):
    buf = io.StringIO()
    for line in _meta_lines(meta):
        buf.write(line + _CRLF)
    writer = csv.writer(buf, lineterminator=_CRLF)
    if header is not None:
        writer.writerow(header)
    writer.writerows(rows)
    for line in footer:
        buf.write(line + _CRLF)
    return buf.getvalue()


def _require(params, key, command):
    if params.get(key) is None:
        raise InvalidArgument(f"{command} requires --{key}")
    return params[key]


def _pick_format(run, default, supported):
    fmt = run.fmt or default
    if fmt not in supported:
        raise InvalidArgument(
            f"{run.command} supports format {supported}, got {fmt!r}")
    return fmt


def _probe_state(space, name):
    if name == "sim":
        return simultaneous_probe(space)
    if name in ("ghz-x", "ghz-y", "ghz-z"):
        return ghz_state(space, name[-1])
    raise InvalidArgument(f"unknown probe {name!r}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _run_space_info(run):
    n = _require(run.params, "n", "space-info")
    space = build_space(n)
    meta = _build_meta(run)
    fmt = _pick_format(run, "json", ("json", "csv"))
    sectors = [
        {"j": s.twoj / 2.0, "dim": s.dim, "offset": s.offset,
         "multiplicity": s.multiplicity}
        for s in space.sectors
    ]
    if fmt == "json":
        text = _dump_json({
            "meta": _json_meta(meta),
            "n-particles": space.n_particles,
            "dimension": space.total_dim,
            "product-dimension": 2 ** space.n_particles,
            "sectors": sectors,
        })
    else:
        rows = [[_fmt_float(s["j"]), s["dim"], s["offset"], s["multiplicity"]]
                for s in sectors]
        footer = [f"# dimension = {space.total_dim}",
                  f"# product-dimension = {2 ** space.n_particles}"]
        text = _csv_text(meta, ["j", "dim", "offset", "multiplicity"], rows, footer)
    return [(run.out, text)]


def _run_evolve(run):
    p = run.params
    n = _require(p, "n", "evolve")
    t = _require(p, "t", "evolve")
    probe_name = p["probe"] or "ghz-z"
    space = build_space(n)
    spec = NoiseSpec(kind=p["kind"], gamma=p["gamma"], axis=p["axis"])
    field = FieldParams(p["phi"])
    probe = _probe_state(space, probe_name)
    result = evolve(probe.projector(), field, spec, t,
                    allow_nonparallel=bool(p["allow-nonparallel"]))
    rho = result.rho
    jops = [collective_operator(space, a) for a in ("x", "y", "z")]
    first = [float(op.expectation(rho.matrix).real) for op in jops]
    second = [[(a @ b).expectation(rho.matrix) for b in jops] for a in jops]
    meta = _build_meta(run)
    _pick_format(run, "json", ("json",))
    text = _dump_json({
        "meta": _json_meta(meta),
        "t": float(t),
        "probe": probe_name,
        "split-valid": bool(result.split_valid),
        "trace": float(np.trace(rho.matrix).real),
        "purity": rho.purity(),
        "sector-weights": [float(w) for w in rho.sector_weights()],
        "first-moments": {"x": first[0], "y": first[1], "z": first[2]},
        "second-moments-real": [[float(v.real) for v in row] for row in second],
        "second-moments-imag": [[float(v.imag) for v in row] for row in second],
    })
    return [(run.out, text)]


def _sweep_config(params):
    n = _require(params, "n", "sweep-time")
    return SweepConfig(
        n_particles=n,
        scenario=SweepScenario(params["scenario"]),
        kind=NoiseKind(params["kind"]),
        gamma=params["gamma"],
        field=params["phi"],
        axis=params["axis"],
        total_time=params["t-total"],
        grid=params["t-grid"],
    )


def _run_sweep_time(run):
    config = _sweep_config(run.params)
    result = sweep_time(config)
    meta = _build_meta(run)
    fmt = _pick_format(run, "csv", ("csv", "json"))
    column = "i_sim" if config.scenario is SweepScenario.SIMULTANEOUS else "i_ind"
    if fmt == "csv":
        rows = [[_fmt_float(t), _fmt_float(v)]
                for t, v in zip(result.times, result.bounds)]
        footer = [f"# t_opt = {_fmt_float(result.t_opt)}",
                  f"# i_min = {_fmt_float(result.i_min)}",
                  f"# boundary = {'true' if result.refinement.boundary else 'false'}"]
        text = _csv_text(meta, ["t", column], rows, footer)
    else:
        text = _dump_json({
            "meta": _json_meta(meta),
            "column": column,
            "curve": [[float(t), float(v)] for t, v in zip(result.times, result.bounds)],
            "t-opt": result.t_opt,
            "i-min": result.i_min,
            "boundary": result.refinement.boundary,
        })
    return [(run.out, text)]


def _run_scan_n(run):
    p = run.params
    n_list = _require(p, "n-list", "scan-n")
    base = _sweep_config({**p, "n": n_list[0]})
    if run.verbose:
        print(f"scan-n: {len(n_list)} particle counts, "
              f"workers={run.workers}", file=sys.stderr)
    rows = scan_particles(n_list, base, workers=run.workers)
    meta = _build_meta(run)
    fmt = _pick_format(run, "csv", ("csv", "json"))
    if fmt == "csv":
        data = [[r.n_particles, r.scenario.value, r.kind.value,
                 _fmt_float(r.t_opt), _fmt_float(r.i_min)] for r in rows]
        text = _csv_text(meta, ["n", "scenario", "kind", "t_opt", "i_min"], data)
    else:
        text = _dump_json({
            "meta": _json_meta(meta),
            "rows": [{"n": r.n_particles, "scenario": r.scenario.value,
                      "kind": r.kind.value, "t-opt": r.t_opt, "i-min": r.i_min}
                     for r in rows],
        })
    return [(run.out, text)]


def _read_scan_csv(path, column):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise InvalidArgument(f"{path} holds no CSV header") from None
    if "n" not in header or column not in header:
        raise InvalidArgument(
            f"{path} must provide columns 'n' and {column!r}, found {header}")
    n_idx, v_idx = header.index("n"), header.index(column)
    points = []
    for row in reader:
        if len(row) <= max(n_idx, v_idx) or not row[v_idx].strip():
            continue
        points.append((float(row[n_idx]), float(row[v_idx])))
    return points


def _run_fit(run):
    p = run.params
    path = _require(p, "in", "fit")
    points = _read_scan_csv(path, p["column"])
    fit = fit_power_law(points, n_min=p["n-min"])
    meta = _build_meta(run)
    _pick_format(run, "json", ("json",))
    text = _dump_json({
        "meta": _json_meta(meta),
        "column": p["column"],
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "residual": fit.residual,
        "n-used": fit.n_used,
    })
    return [(run.out, text)]


def _run_husimi(run):
    p = run.params
    n = _require(p, "n", "husimi")
    probe_name = p["probe"] or "sim"
    shape = p["grid"]
    space = build_space(n)
    probe = _probe_state(space, probe_name)
    qmap = husimi_map(probe, shape)
    thetas, phis = husimi_grid(shape)
    meta = _build_meta(run)
    fmt = _pick_format(run, "csv", ("csv", "json"))
    if fmt == "json":
        text = _dump_json({
            "meta": _json_meta(meta),
            "probe": probe_name,
            "theta": [float(v) for v in thetas],
            "phi": [float(v) for v in phis],
            "q": [[float(v) for v in row] for row in qmap],
        })
        return [(run.out, text)]
    if not run.out:
        raise InvalidArgument(
            "husimi csv output writes a matrix plus a companion axes file; "
            "pass --out")
    matrix_rows = [[_fmt_float(v) for v in row] for row in qmap]
    text = _csv_text(meta, None, matrix_rows)
    axes = _dump_json({
        "meta": _json_meta(meta),
        "probe": probe_name,
        "rows": int(shape[0]),
        "cols": int(shape[1]),
        "theta": [float(v) for v in thetas],
        "phi": [float(v) for v in phis],
    })
    return [(run.out, text), (run.out + ".axes.json", axes)]


# ---------------------------------------------------------------------------
# Verification battery
# ---------------------------------------------------------------------------

def _check_dimensions():
    for n in range(1, 31):
        space = build_space(n)
        counted = sum(s.multiplicity * s.dim for s in space.sectors)
        if counted != 2 ** n:
            return False, f"multiplicity sum {counted} != 2^{n}"
        if space.total_dim != dicke_dimension(n):
            return False, f"sector layout disagrees with the dimension formula at N={n}"
    return True, "N = 1..30 exact"


def _fixture_jx3():
    r = math.sqrt(3.0) / 2.0
    expected = np.zeros((6, 6))
    for i, j, v in ((0, 1, r), (1, 2, 1.0), (2, 3, r), (4, 5, 0.5)):
        expected[i, j] = expected[j, i] = v
    return expected


def _check_operator_fixture():
    got = collective_operator(build_space(3), "x").to_dense()
    dev = float(np.max(np.abs(got - _fixture_jx3())))
    return dev <= 1e-12, f"max entry deviation {dev:.2e}"


def _check_commutators(n):
    space = build_space(n)
    jx, jy, jz = (collective_operator(space, a) for a in ("x", "y", "z"))
    dev = 0.0
    for bx, by, bz in zip(jx.blocks, jy.blocks, jz.blocks):
        dev = max(dev, float(np.max(np.abs(bx @ by - by @ bx - 1j * bz))))
    return dev <= 1e-12, f"N={n}, max |[Jx,Jy] - iJz| = {dev:.2e}"


def _check_superoperator(n):
    space = build_space(n)
    spec = NoiseSpec(kind=NoiseKind.MARKOVIAN, gamma=0.05, axis=_DEFAULT_AXIS)
    superop = build_dephasing_superoperator(space, spec)
    rng = np.random.default_rng(20240817)
    d = space.total_dim
    worst_tr, worst_h = 0.0, 0.0
    for _ in range(20):
        x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        x = (x + x.conj().T) / 2.0
        x /= np.max(np.abs(x))
        lx = superop.apply(x)
        worst_tr = max(worst_tr, abs(float(np.trace(lx).real)), abs(float(np.trace(lx).imag)))
        worst_h = max(worst_h, float(np.max(np.abs(lx - lx.conj().T))))
    ok = worst_tr <= 1e-10 and worst_h <= 1e-10
    return ok, f"N={n}, trace leak {worst_tr:.2e}, hermiticity leak {worst_h:.2e}"


def _check_split_vs_joint(n):
    space = build_space(n)
    spec = NoiseSpec(kind=NoiseKind.MARKOVIAN, gamma=0.05, axis=_DEFAULT_AXIS)
    field = FieldParams(_DEFAULT_PHI)
    rho0 = ghz_state(space, "z").projector()
    fast = evolve(rho0, field, spec, 2.0).rho.matrix
    slow = full_gkls_reference(rho0, field, spec, 2.0).matrix
    dist = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(fast - slow))))
    return dist <= 1e-8, f"N={n}, trace distance {dist:.2e}"


def _check_product_space(n):
    space = build_space(n)
    field = FieldParams(_DEFAULT_PHI)
    worst = 0.0
    for kind in (NoiseKind.MARKOVIAN, NoiseKind.NONMARKOVIAN):
        spec = NoiseSpec(kind=kind, gamma=0.05, axis=_DEFAULT_AXIS)
        cmp = full_hilbert_reference(n, simultaneous_probe(space), field, spec, 2.0)
        worst = max(worst,
                    float(np.max(np.abs(cmp.first_moments_full - cmp.first_moments_dicke))),
                    float(np.max(np.abs(cmp.second_moments_full - cmp.second_moments_dicke))),
                    abs(cmp.fidelity - 1.0))
    return worst <= 1e-6, f"N={n}, worst moment/fidelity deviation {worst:.2e}"


def _check_finite_differences(n):
    space = build_space(n)
    rng = np.random.default_rng(20240818)
    eps = 1e-6
    worst = 0.0
    for _ in range(10):
        phi = rng.uniform(-0.2, 0.2, size=3)
        if np.linalg.norm(phi) < 1e-3:
            phi = phi + 0.05
        t = float(rng.uniform(0.1, 5.0))
        axis = ("x", "y", "z")[int(rng.integers(3))]
        k = ("x", "y", "z").index(axis)
        basis = FieldBasis(space, FieldParams(tuple(phi)))
        step = np.zeros(3)
        step[k] = eps
        u_plus = FieldBasis(space, FieldParams(tuple(phi + step))).unitary(t).to_dense()
        u_minus = FieldBasis(space, FieldParams(tuple(phi - step))).unitary(t).to_dense()
        fd = (u_plus - u_minus) / (2.0 * eps)
        analytic = -1j * (basis.unitary(t).to_dense() @ basis.generator(t, axis).to_dense())
        scale = float(np.max(np.abs(analytic)))
        worst = max(worst, float(np.max(np.abs(fd - analytic))) / scale)
    return worst <= 1e-6, f"N={n}, worst relative derivative error {worst:.2e}"


def _run_verify(run):
    n = run.params["n"] if run.params["n"] is not None else 3
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")
    checks = [
        ("dimension-counting", _check_dimensions),
        ("operator-fixture", _check_operator_fixture),
        ("commutators", lambda: _check_commutators(n)),
        ("superoperator-preservation", lambda: _check_superoperator(n)),
        ("split-vs-joint", lambda: _check_split_vs_joint(n)),
        ("product-space-oracle", lambda: _check_product_space(n)),
        ("finite-difference-generators", lambda: _check_finite_differences(n)),
    ]
    lines = []
    failures = 0
    for name, func in checks:
        if name == "product-space-oracle" and n > 6:
            lines.append(f"SKIP {name} (requires n <= 6, got {n})")
            continue
        if name == "split-vs-joint" and dicke_dimension(n) > 400:
            lines.append(f"SKIP {name} (reference integrator capped at d <= 400)")
            continue
        ok, detail = func()
        lines.append(f"{'PASS' if ok else 'FAIL'} {name} ({detail})")
        failures += 0 if ok else 1
    total = len([ln for ln in lines if not ln.startswith("SKIP")])
    lines.append(f"verify: {total - failures}/{total} checks passed")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if run.out:
        with open(run.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0 if failures == 0 else 3


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_DISPATCH = {
    "space-info": _run_space_info,
    "evolve": _run_evolve,
    "sweep-time": _run_sweep_time,
    "scan-n": _run_scan_n,
    "fit": _run_fit,
    "husimi": _run_husimi,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        run = _resolve(args)
        if run.command == "verify":
            return _run_verify(run)
        outputs = _DISPATCH[run.command](run)
        for path, text in outputs:
            if path is None:
                sys.stdout.write(text)
            else:
                with open(path, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
                if run.verbose:
                    print(f"wrote {path}", file=sys.stderr)
    except InvalidArgument as exc:
        print(f"spinsense: InvalidArgument: {exc}", file=sys.stderr)
        return 2
    except AssumptionViolated as exc:
        print(f"spinsense: AssumptionViolated: {exc}", file=sys.stderr)
        return 4
    except (NumericalError, SingularQfim, ExperimentFailed, DegenerateProbe) as exc:
        print(f"spinsense: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"spinsense: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
