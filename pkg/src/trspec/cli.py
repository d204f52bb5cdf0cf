"""Command line interface: ``trspec {spectrum,classify,simulate,coeffs,sweep}``.

Exit codes: 0 success, 1 numerical failure, 2 input error, 3 indeterminate
verdict with ``--strict``, 4 degenerate model (equal velocities where they
must differ).
"""

import argparse
import copy
import csv
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import perturb
from .classify import Verdict, classify
from .errors import DegenerateVelocitiesError, InputError, TrspecError
from .model import from_dict
from .modes import semigroup_spectrum, spectrum_table, track_branches
from .simulate import (
    FourierState,
    default_grid,
    evolve,
    growth_bound_estimate,
    observables,
    sample_random_ic,
    synthesize,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INDETERMINATE = 3
EXIT_DEGENERATE = 4
MAX_AXES = 3


def fmt(x):
    """Shortest round-trip text for a float."""
    return repr(float(x))


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_model(path):
    data = load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: model must be a JSON object")
    return from_dict(data)


def write_json(path, obj):
    text = json.dumps(obj, indent=2) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_spectrum_csv(path, table):
    header = [f"k{i}" for i in range(table.d)] + ["branch", "re", "im"]
    rows = ([*k, j, fmt(lam.real), fmt(lam.imag)] for k, j, lam in table.records())
    _write_csv(path, header, rows)


def write_semigroup_csv(path, table, sample):
    header = [f"k{i}" for i in range(table.d)] + ["branch", "t", "re", "im"]
    points = sample.points.reshape(table.lambdas.shape)
    rows = []
    for k, row in zip(table.ks, points):
        for j, p in enumerate(row):
            rows.append([*(int(c) for c in k), j, fmt(sample.t), fmt(p.real), fmt(p.imag)])
    _write_csv(path, header, rows)


def write_sigma_csv(path, profile):
    header = [f"k{i}" for i in range(profile.ks.shape[1])] + ["sigma"]
    rows = ([*(int(c) for c in k), fmt(s)] for k, s in zip(profile.ks, profile.sigma))
    _write_csv(path, header, rows)


def _gnuplot(path, lines):
    Path(path).write_text("\n".join(lines) + "\n")


def load_ic(path, spec):
    """Initial coefficients from JSON ``{"K": int, "coeffs": [[[re, im], ...], ...]}`` (d = 1)."""
    data = load_json(path)
    try:
        K = int(data["K"])
        raw = np.asarray(data["coeffs"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: initial condition needs 'K' and 'coeffs'") from exc
    if raw.shape != (spec.N, 2 * K + 1, 2):
        raise InputError(f"{path}: coeffs must have shape ({spec.N}, {2 * K + 1}, 2), got {raw.shape}")
    return FourierState.from_coeffs(raw[..., 0] + 1j * raw[..., 1])


def _parse_times(values):
    out = []
    for v in values:
        out.extend(float(p) for p in str(v).split(",") if p.strip())
    if not out:
        raise InputError("--t needs at least one time")
    return sorted(out)


def cmd_spectrum(args):
    spec = load_model(args.model)
    table = spectrum_table(spec, args.kmax)
    if args.track and spec.d == 1:
        try:
            anchor = perturb.validity_threshold(spec)
        except DegenerateVelocitiesError:
            anchor = None
        table = track_branches(table, spec, anchor_from=anchor)
    write_spectrum_csv(args.out, table)
    files = [args.out]
    if args.time is not None:
        semi = args.semigroup_out or str(Path(args.out).with_suffix("")) + "_semigroup.csv"
        write_semigroup_csv(semi, table, semigroup_spectrum(table, args.time))
        files.append(semi)
    if args.gnuplot:
        _gnuplot(str(Path(args.out).with_suffix(".gp")), [
            "set datafile separator ','",
            "set xlabel 'Re'", "set ylabel 'Im'",
            *[f"plot '{f}' using 're':'im' with dots title '{Path(f).name}'" for f in files],
        ])
    return EXIT_OK


def cmd_classify(args):
    spec = load_model(args.model)
    report = classify(spec, K_max=args.kmax, tol=args.tol)
    csv_path = None
    if args.profile_csv:
        csv_path = args.profile_csv
        write_sigma_csv(csv_path, report.sigma_profile)
    write_json(args.out, report.to_dict(sigma_profile_csv=csv_path))
    if args.strict and report.verdict is Verdict.INDETERMINATE:
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_simulate(args):
    spec = load_model(args.model)
    times = _parse_times(args.t)
    if args.ic:
        state = load_ic(args.ic, spec)
    else:
        state = sample_random_ic(spec, args.kmax, seed=args.seed, amplitude=args.amplitude)
    nx = args.nx or default_grid(state.K)
    if args.rescale == "auto":
        rate = growth_bound_estimate(spec, state.K)
    else:
        try:
            rate = float(args.rescale)
        except ValueError as exc:
            raise InputError(f"--rescale must be 'auto' or a number, got {args.rescale!r}") from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = ["t"] + [f"x{i}" for i in range(spec.d)] + ["component", "value"]
    long_rows = []
    obs_rows = []
    written = []
    for t in times:
        st = evolve(spec, state, t)
        x, u = synthesize(st, nx, spec.L)
        u = np.exp(-rate * t) * u
        rows = []
        for idx in itertools.product(range(nx), repeat=spec.d):
            pos = [fmt(x[i]) for i in idx]
            for j in range(spec.N):
                rows.append([fmt(t), *pos, j, fmt(u[(j,) + idx])])
        if args.layout == "snapshot":
            name = out / f"trajectory_t={fmt(t)}.csv"
            _write_csv(name, header, rows)
            written.append(name)
        else:
            long_rows.extend(rows)
        ob = observables(spec, st, t, nx)
        obs_rows.append([fmt(t), *(fmt(a) for a in ob.averages), fmt(ob.l2_norm), fmt(ob.min_value)])
    if args.layout == "long":
        name = out / "trajectory.csv"
        _write_csv(name, header, long_rows)
        written.append(name)
    _write_csv(out / "observables.csv",
               ["t", *(f"mean{j}" for j in range(spec.N)), "l2_norm", "min_value"], obs_rows)
    meta = {"rescale_rate": rate, "K": state.K, "nx": nx, "seed": args.seed, "times": times}
    write_json(out / "run.json", meta)
    if args.gnuplot and spec.d == 1:
        lines = ["set datafile separator ','", "set xlabel 'x'", "set ylabel 'u'"]
        for name in written:
            lines.append(f"plot for [c=0:{spec.N - 1}] '{name.name}' using 'x0':(column('component')==c ? "
                         f"column('value') : 1/0) with lines title sprintf('component %d', c)")
        _gnuplot(out / "trajectory.gp", lines)
    return EXIT_OK


def cmd_coeffs(args):
    spec = load_model(args.model)
    report = perturb.monotonicity(spec, order=args.order)
    write_json(args.out, {"K_pert": report.K_pert, "branches": report.to_json()})
    return EXIT_OK


def _axis_values(axis):
    try:
        path = str(axis["path"])
        start, stop, step = float(axis["start"]), float(axis["stop"]), float(axis["step"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"sweep axis needs path/start/stop/step: {axis!r}") from exc
    if step <= 0:
        raise InputError(f"sweep axis {path}: step must be positive")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return path, [start + i * step for i in range(max(count, 0))]


def set_path(model, path, value):
    """Assign ``value`` at a dotted path such as ``B.0.1`` or ``L`` in a model dict."""
    parts = path.split(".")
    target = model
    try:
        for p in parts[:-1]:
            target = target[int(p)] if isinstance(target, list) else target[p]
        last = parts[-1]
        if isinstance(target, list):
            idx = int(last)
            if isinstance(target[idx], (list, dict)):
                raise InputError(f"sweep path {path!r} does not name a scalar")
            target[idx] = value
        else:
            if last not in target or isinstance(target[last], (list, dict)):
                raise InputError(f"sweep path {path!r} does not name a scalar")
            target[last] = value
    except (KeyError, IndexError, ValueError, TypeError) as exc:
        raise InputError(f"invalid sweep path {path!r}") from exc


def _sweep_point(job):
    model, K_max, tol, path = job
    report = classify(from_dict(model), K_max=K_max, tol=tol)
    out = report.to_dict()
    Path(path).write_text(json.dumps(out, indent=2) + "\n")
    return out


def _workers():
    cap = os.environ.get("TRSPEC_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def cmd_sweep(args):
    data = load_json(args.sweep)
    try:
        template = data["template"]
    except (KeyError, TypeError) as exc:
        raise InputError("sweep file needs a 'template' model") from exc
    axes = [_axis_values(a) for a in data.get("axes", [])]
    if len(axes) > MAX_AXES:
        raise InputError(f"at most {MAX_AXES} sweep axes are supported")
    for path, _ in axes:
        set_path(copy.deepcopy(template), path, 0.0)
    from_dict(template)
    out = Path(args.out or data.get("output", "sweep_out"))
    out.mkdir(parents=True, exist_ok=True)
    K_max = data.get("kmax")
    tol = float(data.get("tol", 1e-9))
    jobs, points = [], []
    for combo in itertools.product(*(vals for _, vals in axes)):
        model = copy.deepcopy(template)
        for (path, _), value in zip(axes, combo):
            set_path(model, path, value)
        name = "_".join(f"{p}={fmt(v)}" for (p, _), v in zip(axes, combo)) or "point"
        jobs.append((model, K_max, tol, str(out / f"{name}.json")))
        points.append((combo, name))
    workers = min(_workers(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    rows = []
    for (combo, name), res in zip(points, results):
        rows.append([*(fmt(v) for v in combo), res["verdict"], fmt(res["b"]),
                     len(res["dominant_modes"]), f"{name}.json"])
    _write_csv(out / "summary.csv",
               [p for p, _ in axes] + ["verdict", "b", "n_dominant", "file"], rows)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="trspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues of M(k) for |k| <= kmax")
    p.add_argument("--model", required=True)
    p.add_argument("--kmax", type=int, default=64)
    p.add_argument("--out", required=True)
    p.add_argument("--time", type=float, help="also write exp(t * lambda)")
    p.add_argument("--semigroup-out")
    p.add_argument("--track", action="store_true", help="continuous branch labels (d = 1)")
    p.add_argument("--gnuplot", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("classify", help="stability verdict as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--kmax", type=int)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--strict", action="store_true", help="exit 3 on Indeterminate")
    p.add_argument("--out", default="-")
    p.add_argument("--profile-csv")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="exact Fourier evolution")
    p.add_argument("--model", required=True)
    p.add_argument("--t", nargs="+", required=True, help="output times (space or comma separated)")
    p.add_argument("--kmax", type=int, default=100)
    p.add_argument("--nx", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amplitude", type=float, default=1e-4)
    p.add_argument("--ic")
    p.add_argument("--rescale", default="0")
    p.add_argument("--layout", choices=("long", "snapshot"), default="long")
    p.add_argument("--out", required=True)
    p.add_argument("--gnuplot", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("coeffs", help="perturbation coefficients and monotonicity")
    p.add_argument("--model", required=True)
    p.add_argument("--order", type=int)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("sweep", help="classify over a parameter grid")
    p.add_argument("--sweep", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except DegenerateVelocitiesError as exc:
        print(f"trspec: degenerate model: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputError, ValueError) as exc:
        print(f"trspec: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TrspecError as exc:
        print(f"trspec: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
