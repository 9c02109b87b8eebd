"""Command line: apply, kernel, certify, pv-sweep, show-config.

Exit codes: 0 success, 1 tolerance failure or failed certificate,
2 usage or input error.  All outputs are written atomically and are
byte-identical across runs with the same configuration.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import kernels as K
from . import spectral
from .certify import ESTIMATES, certify
from .hermite import EnvelopedFunction, analyze, synthesize
from .pv import kernel_spec, pv_apply
from .semigroup import heat_apply, mehler_kernel


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    dim: int = 1
    degree: int = 10
    order: int = None  # Gauss-Hermite order for analysis, default degree + 12
    tol: float = 1e-5
    beta: float = 1.0  # exponent of M_beta = A^{-beta} kernels
    eta: float = 0.75
    out: str = None

    def validate(self):
        if not 1 <= self.dim <= 3:
            raise UsageError("--dim must be 1, 2 or 3")
        if not 0 <= self.degree <= 60:
            raise UsageError("--degree must lie in [0, 60]")
        if self.order is not None and not 1 <= self.order <= 256:
            raise UsageError("--order must lie in [1, 256]")
        if not self.tol >= 1e-12:
            raise UsageError("--tol must be at least 1e-12")
        if self.beta is not None and not self.beta > 0:
            raise UsageError("--beta must be positive")
        if not 0 < self.eta < 1:
            raise UsageError("--eta must lie in (0, 1)")
        return self


def load_config(args):
    """Defaults, then the JSON config file, then explicit flags."""
    cfg = RunConfig()
    names = {f.name for f in fields(RunConfig)}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(data) - names
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for k, v in data.items():
            setattr(cfg, k, v)
    for k in names:
        v = getattr(args, k, None)
        if v is not None:
            setattr(cfg, k, v)
    return cfg.validate()


# ------------------------------------------------------------------ helpers


def fmt(v):
    return format(float(v), ".17g")


def write_atomic(path, text):
    """Write text to path through a temporary file and a rename; path None means stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def parse_operator(text, dim):
    """'riesz:1,0', 'riesz_bar:2', 'neg_power:1.5', 'kbar:0.5', 'imaginary:1', 'heat:0.5'."""
    kind, _, param = text.partition(":")
    if kind not in ("riesz", "riesz_bar", "neg_power", "kbar", "imaginary", "heat"):
        raise UsageError(f"unknown operator {kind!r}")
    if not param:
        raise UsageError(f"operator {kind!r} needs a parameter, e.g. {kind}:1")
    try:
        if kind in ("riesz", "riesz_bar"):
            alpha = tuple(int(a) for a in param.split(","))
            if len(alpha) != dim or min(alpha) < 0 or sum(alpha) == 0:
                raise UsageError(f"multi-index {param!r} must be nonzero with {dim} entries")
            return kind, alpha
        value = float(param)
    except ValueError:
        raise UsageError(f"bad parameter {param!r} for {kind}") from None
    if not math.isfinite(value):
        raise UsageError(f"bad parameter {param!r} for {kind}")
    if kind == "heat" and value < 0:
        raise UsageError("heat time must be non-negative")
    if kind in ("neg_power", "kbar") and value <= 0:
        raise UsageError("beta must be positive")
    if kind == "imaginary" and value == 0:
        raise UsageError("gamma must be nonzero")
    return kind, value


def load_function(path, dim):
    try:
        with open(path) as fh:
            f = EnvelopedFunction.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"cannot read function {path}: {exc}") from None
    if f.dim != dim:
        raise UsageError(f"function dimension {f.dim} does not match --dim {dim}")
    return f


def load_points(path, dim):
    try:
        with open(path) as fh:
            text = fh.read()
        if path.endswith(".json"):
            pts = np.array(json.loads(text), dtype=float)
        else:
            rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
            pts = np.array([[float(v) for v in r] for r in rows], dtype=float)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read points {path}: {exc}") from None
    pts = pts.reshape(len(pts), -1) if pts.size else pts.reshape(0, dim)
    if pts.shape[1] != dim:
        raise UsageError(f"points must have {dim} coordinates")
    return pts


def parse_grid(text):
    try:
        lo, hi, m = text.split(",")
        lo, hi, m = float(lo), float(hi), int(m)
    except ValueError:
        raise UsageError("--grid takes lo,hi,count") from None
    if m < 1 or not hi >= lo:
        raise UsageError("--grid needs count >= 1 and hi >= lo")
    return np.linspace(lo, hi, m)


# ------------------------------------------------------------------ commands


def spectral_value(f, kind, param, cfg, X):
    e = analyze(f, cfg.degree, order=cfg.order)
    out = spectral.apply_operator(e, kind, param)
    return np.asarray(synthesize(out, X))


def direct_value(f, kind, param, cfg, x):
    if kind == "heat":
        return heat_apply(f, param, x)
    spec = kernel_spec(kind, cfg.dim, param)
    return pv_apply(spec, f, x, tol=min(cfg.tol * 1e-2, 1e-8)).value


def cmd_apply(args, cfg):
    kind, param = parse_operator(args.operator, cfg.dim)
    f = load_function(args.function, cfg.dim)
    pts = load_points(args.points, cfg.dim)
    spec_vals = spectral_value(f, kind, param, cfg, pts)
    rows, worst = [], 0.0
    for x, s in zip(pts, spec_vals):
        v = direct_value(f, kind, param, cfg, x)
        diff = abs(v - s)
        worst = max(worst, diff)
        rows.append([fmt(c) for c in x] + [fmt(s.real), fmt(s.imag), fmt(v.real), fmt(v.imag), fmt(diff)])
    header = [f"x{i + 1}" for i in range(cfg.dim)] + ["spectral_re", "spectral_im", "pv_re", "pv_im", "abs_diff"]
    write_atomic(cfg.out, csv_text(header, rows))
    if worst > cfg.tol:
        print(f"max abs_diff {worst:.3e} exceeds tol {cfg.tol:g}", file=sys.stderr)
        return 1
    return 0


def kernel_function(text, dim, beta=None):
    if text == "Mbeta":
        text = f"neg_power:{beta}"
    kind, _, param = text.partition(":")
    if kind == "mehler":
        t = float(param)
        return lambda X, Y: mehler_kernel(np.full(len(X), t), X, Y)
    if kind == "classical_riesz":
        alpha = tuple(int(a) for a in param.split(","))
        return lambda X, Y: K.classical_riesz_closed(alpha, X - Y)
    kind, param = parse_operator(text, dim)
    if kind == "heat":
        return lambda X, Y: mehler_kernel(np.full(len(X), param), X, Y)
    spec = kernel_spec(kind, dim, param)
    return lambda X, Y: spec.kernel(X, Y - X)


def cmd_kernel(args, cfg):
    n = cfg.dim
    try:
        fn = kernel_function(args.kernel, n, cfg.beta)
    except ValueError:
        raise UsageError(f"bad kernel {args.kernel!r}") from None
    axis = parse_grid(args.grid)
    P = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    X = np.repeat(P, len(P), axis=0)
    Y = np.tile(P, (len(P), 1))
    diag = np.all(X == Y, axis=-1)
    for x in P:
        print("skip diagonal " + " ".join(fmt(c) for c in x), file=sys.stderr)
    print(f"skipped {int(diag.sum())} diagonal pairs", file=sys.stderr)
    X, Y = X[~diag], Y[~diag]
    vals = np.asarray(fn(X, Y), dtype=complex) if len(X) else np.zeros(0, complex)
    header = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)] + ["value_re", "value_im"]
    rows = ([fmt(c) for c in x] + [fmt(c) for c in y] + [fmt(v.real), fmt(v.imag)] for x, y, v in zip(X, Y, vals))
    write_atomic(cfg.out, csv_text(header, rows))
    if not np.all(np.isfinite(vals)):
        print("non-finite kernel values in the grid", file=sys.stderr)
        return 1
    return 0


def cmd_certify(args, cfg):
    if args.estimate not in ESTIMATES:
        raise UsageError(f"unknown estimate {args.estimate!r}; choose from {', '.join(ESTIMATES)}")
    try:
        alpha = [int(a) for a in args.alpha.split(",")] if args.alpha else None
        cert = certify(args.estimate, cfg.dim, eta=cfg.eta, alpha=alpha, power=cfg.beta, coarse=args.coarse)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_atomic(cfg.out, cert.to_json())
    print(f"{cert.estimate}: {cert.verdict} (C = {cert.calibrated_C:.6g}, worst = {cert.worst_ratio:.6g})",
          file=sys.stderr)
    return 0 if cert.verdict == "pass" else 1


def cmd_pv_sweep(args, cfg):
    kind, param = parse_operator(args.operator, cfg.dim)
    if kind == "heat":
        raise UsageError("the heat semigroup has no principal value")
    f = load_function(args.function, cfg.dim)
    try:
        x = np.array([float(v) for v in args.point.split(",")])
    except ValueError:
        raise UsageError("--point takes comma-separated coordinates") from None
    if x.size != cfg.dim:
        raise UsageError(f"--point needs {cfg.dim} coordinates")
    spec = kernel_spec(kind, cfg.dim, param)
    res = pv_apply(spec, f, x, tol=min(cfg.tol * 1e-2, 1e-8), depth=args.depth)
    rows = [[fmt(e), fmt(s.real), fmt(s.imag), fmt(c.real), fmt(c.imag)]
            for e, s, c in zip(res.epsilon_sequence, res.shell_values, res.corrected_values)]
    rows.append(["limit", "", "", fmt(res.value.real), fmt(res.value.imag)])
    write_atomic(cfg.out, csv_text(["eps", "shell_re", "shell_im", "corrected_re", "corrected_im"], rows))
    return 0 if res.converged else 1


def cmd_show_config(args, cfg):
    d = asdict(cfg)
    d["order"] = cfg.order if cfg.order is not None else cfg.degree + 12
    write_atomic(None, json.dumps(d, sort_keys=True, indent=2) + "\n")
    return 0


# ------------------------------------------------------------------ parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--dim", type=int)
    common.add_argument("--degree", type=int, help="Hermite degree cap K")
    common.add_argument("--order", type=int, help="Gauss-Hermite order for analysis")
    common.add_argument("--tol", type=float)
    common.add_argument("--beta", type=float, help="exponent beta of M_beta kernels (kernel Mbeta, certify)")
    common.add_argument("--eta", type=float, help="Gaussian envelope exponent in (0, 1)")
    common.add_argument("--out", help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="invgauss", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("apply", parents=[common], help="spectral vs kernel application at points")
    a.add_argument("operator", help="e.g. riesz:1,0  neg_power:1.5  imaginary:1  heat:0.5")
    a.add_argument("--function", required=True, help="function JSON")
    a.add_argument("--points", required=True, help="points as JSON list or CSV rows")
    a.set_defaults(run=cmd_apply)

    k = sub.add_parser("kernel", parents=[common], help="dump a kernel on a grid of pairs")
    k.add_argument("kernel", help="operator id as for apply, or Mbeta, mehler:t, classical_riesz:alpha")
    k.add_argument("--grid", default="-3,3,21", help="lo,hi,count per axis; write --grid=-3,3,21 when lo is negative")
    k.set_defaults(run=cmd_kernel)

    c = sub.add_parser("certify", parents=[common], help="calibrate and verify a kernel estimate")
    c.add_argument("estimate", help=", ".join(ESTIMATES))
    c.add_argument("--alpha", help="Riesz multi-index, default e_1")
    c.add_argument("--coarse", type=int, help="coarse grid points per axis, default 15")
    c.set_defaults(run=cmd_certify)

    s = sub.add_parser("pv-sweep", parents=[common], help="truncated integrals along the eps ladder")
    s.add_argument("operator")
    s.add_argument("--function", required=True)
    s.add_argument("--point", required=True, help="comma-separated coordinates")
    s.add_argument("--depth", type=int, default=12)
    s.set_defaults(run=cmd_pv_sweep)

    sc = sub.add_parser("show-config", parents=[common], help="print the effective configuration")
    sc.set_defaults(run=cmd_show_config)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return args.run(args, cfg)
    except UsageError as exc:
        print(f"invgauss: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
