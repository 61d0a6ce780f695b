"""Command line front end.

Subcommands: analyze, symbol, density, simulate, solve, verify.  Every
run writes a manifest.txt (config hash, seed, package versions) next to
its outputs; all files go through atomic replace, numbers are written
with repr so a rerun with the same config and seed is byte-identical.

Exit codes: 0 ok, 1 domain error, 2 tolerance failure, 64 usage,
65 config parse failure.
"""

import argparse
import hashlib
import io
import math
import os
import platform
import sys

import numpy as np
import scipy

from . import __version__, density, measures, orv, simulate, solver, \
    symbols, verify
from .coeffs import CoefficientSpec
from .errors import ConfigError, DomainError, ToleranceError
from .grid import SpectralGrid, atomic_write, write_field, write_field_csv

USAGE_EXIT = 64
CONFIG_EXIT = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def build_parser() -> _Parser:
    p = _Parser(prog="levykit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, help_, measure=True, grid=False, seed=False):
        sp = sub.add_parser(name, help=help_)
        if measure:
            sp.add_argument("--measure", required=(name != "verify"),
                            help="measure (or solve) config path")
        sp.add_argument("--out", default=".", help="output directory")
        if grid:
            sp.add_argument("--grid-n", type=int, default=None)
            sp.add_argument("--grid-L", type=float, default=None)
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        return sp

    add("analyze", "tail profile indices, moments, nondegeneracy")
    add("symbol", "tabulate the generator symbol on a frequency ray",
        grid=True)
    add("density", "transition density field at t = 1", grid=True)
    add("simulate", "increment samples at t = 1", seed=True)
    add("solve", "run the parabolic solver from a solve config")
    sv = add("verify", "run the verification suite")
    sv.add_argument("--suite", default="all",
                    help="suite or single check name (see verify.SUITES)")
    sv.add_argument("--tol-scale", type=float, default=1.0)
    return p


# ---------------------------------------------------------------------------
# output plumbing


def _fmt(v) -> str:
    return repr(float(v))


def _write_text(path, text: str):
    atomic_write(path, text.encode())


def _manifest(out_dir, cmd, config_bytes=None, seed=None):
    lines = [f"command = {cmd}",
             f"levykit = {__version__}",
             f"numpy = {np.__version__}",
             f"scipy = {scipy.__version__}",
             f"python = {platform.python_version()}"]
    if config_bytes is not None:
        lines.append("config_sha256 = "
                     + hashlib.sha256(config_bytes).hexdigest())
    if seed is not None:
        lines.append(f"seed = {seed}")
    _write_text(os.path.join(out_dir, "manifest.txt"),
                "\n".join(lines) + "\n")


def _load(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    spec = measures.parse_config(raw.decode(),
                                 base_dir=os.path.dirname(
                                     os.path.abspath(path)))
    return spec, raw


def _grid_for(spec, args):
    n = args.grid_n or (1024 if spec.dim == 1 else 256)
    L = args.grid_L or (64.0 if spec.dim == 1 else 32.0)
    return SpectralGrid(spec.dim, n, L)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_analyze(args):
    spec, raw = _load(args.measure)
    out = args.out
    prof = measures.w_profile(spec)
    rep = orv.estimate_indices(prof)
    if 0 < spec.sigma < 2:
        rep.assumption_A = orv.check_assumption_A(rep, spec.sigma)
    _write_text(os.path.join(out, "indices.csv"), rep.to_csv())

    a1, a2 = (spec.sigma + 2.0) / 2.0, spec.sigma / 2.0
    mom = measures.truncated_moments(spec, a1, a2)
    _write_text(os.path.join(out, "moments.csv"),
                "quantity,value\n"
                f"alpha1,{_fmt(a1)}\nalpha2,{_fmt(a2)}\n"
                f"small,{_fmt(mom.small)}\nlarge,{_fmt(mom.large)}\n")

    nd = measures.nondegeneracy(spec)
    wdir = " ".join(_fmt(v) for v in np.atleast_1d(nd.witness_dir))
    _write_text(os.path.join(out, "nondegeneracy.csv"),
                "quantity,value\n"
                f"value,{_fmt(nd.value)}\nwitness_R,{_fmt(nd.witness_R)}\n"
                f"witness_dir,{wdir}\n")

    rs = 2.0 ** np.arange(-10, 11, dtype=float)
    rows = "".join(f"{_fmt(r)},{_fmt(measures.tail_mass(spec, r))}\n"
                   for r in rs)
    _write_text(os.path.join(out, "tail.csv"), rows)
    _manifest(out, "analyze", raw)
    return 0


def _xi_ray(spec, grid):
    xi = grid.xi_mesh()
    if spec.dim == 1:
        q = np.sort(xi)
        pts = q
    else:
        q = np.sort(xi[:, 0, 0])
        pts = np.zeros((len(q), spec.dim))
        pts[:, 0] = q
    return q, pts


def _cmd_symbol(args):
    spec, raw = _load(args.measure)
    g = _grid_for(spec, args)
    q, pts = _xi_ray(spec, g)
    vals = symbols.psi(spec, pts)
    rows = "".join(f"{_fmt(a)},{_fmt(v.real)},{_fmt(v.imag)}\n"
                   for a, v in zip(q, vals))
    _write_text(os.path.join(args.out, "psi.csv"), rows)
    _manifest(args.out, "symbol", raw)
    return 0


def _cmd_density(args):
    spec, raw = _load(args.measure)
    g = _grid_for(spec, args)
    fld = density.transition_density(spec, t=1.0, grid=g)
    write_field(os.path.join(args.out, "density.lvf"), g, fld.values)
    if spec.dim == 1:
        write_field_csv(os.path.join(args.out, "density.csv"), g, fld.values)
    _manifest(args.out, "density", raw)
    return 0


def _cmd_simulate(args):
    spec, raw = _load(args.measure)
    plan = simulate.SamplePlan(spec, t=1.0, n=10_000, eps=1e-3,
                               seed=args.seed)
    xs = simulate.sample_increments(plan)
    simulate.write_samples(os.path.join(args.out, "samples.csv"), xs)
    _manifest(args.out, "simulate", raw, seed=args.seed)
    return 0


_SOLVE_KEYS = ("measure", "lambda", "T", "nt", "grid.n", "grid.L", "p",
               "coeff.form", "homotopy", "tol")


def _parse_solve_config(text, base_dir):
    kv = {}
    for ln, rawline in enumerate(io.StringIO(text), start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _SOLVE_KEYS:
            raise ConfigError(f"line {ln}: unknown key '{key}'")
        if key in kv:
            raise ConfigError(f"line {ln}: duplicate key '{key}'")
        kv[key] = val
    if "measure" not in kv:
        raise ConfigError("solve config needs 'measure = <path>'")

    def num(key, default):
        if key not in kv:
            return default
        try:
            return float(kv[key])
        except ValueError:
            raise ConfigError(f"key '{key}': not a number: "
                              f"{kv[key]!r}") from None

    def integer(key, default):
        v = num(key, default)
        if v != int(v):
            raise ConfigError(f"key '{key}': not an integer: {kv[key]!r}")
        return int(v)

    mpath = kv["measure"]
    if not os.path.isabs(mpath):
        mpath = os.path.join(base_dir, mpath)
    spec = measures.load_measure(mpath)

    form = kv.get("coeff.form", "unit")
    coeff = None
    if form != "unit":
        head, _, params = form.partition(":")
        if head != "cosine":
            raise ConfigError(f"coeff.form: unknown form {form!r}")
        if spec.dim != 1:
            raise ConfigError("cosine coefficient is one-dimensional")
        try:
            amp, period = (float(v) for v in params.split(","))
        except ValueError:
            raise ConfigError("coeff.form: expected "
                              "'cosine:<amp>,<period>'") from None
        if not 0 < amp < 1:
            raise ConfigError("coeff.form: need 0 < amp < 1")
        fn = (lambda a, per: lambda t, x:
              1.0 + a * np.cos(2 * np.pi * np.asarray(x) / per))(amp, period)
        coeff = CoefficientSpec(1.0 - amp, 1.0 + amp, terms=[(fn, None)])

    lam = num("lambda", 0.0)
    if lam < 0:
        raise ConfigError("lambda must be nonnegative")
    return {
        "spec": spec, "coeff": coeff, "lam": lam,
        "T": num("T", 1.0), "nt": integer("nt", 64),
        "n": integer("grid.n", 256), "L": num("grid.L", 16.0),
        "p": num("p", 2.0), "homotopy": integer("homotopy", 1),
        "tol": num("tol", 1e-8),
    }


def _cmd_solve(args):
    try:
        with open(args.measure, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    cfg = _parse_solve_config(raw.decode(),
                              os.path.dirname(os.path.abspath(args.measure)))
    spec, coeff = cfg["spec"], cfg["coeff"]
    g = SpectralGrid(spec.dim, cfg["n"], cfg["L"])
    f = np.ones(g.shape)
    if coeff is None:
        res = solver.solve_duhamel(spec, None, cfg["lam"], f, g, cfg["nt"],
                                   T=cfg["T"], p=cfg["p"])
    else:
        res = solver.solve_frozen_iteration(
            spec, coeff, cfg["lam"], f, g, cfg["nt"], T=cfg["T"],
            homotopy_steps=cfg["homotopy"], tol=cfg["tol"], p=cfg["p"])
    _write_text(os.path.join(args.out, "diagnostics.csv"),
                res.diagnostics_csv())
    if spec.dim == 1:
        write_field_csv(os.path.join(args.out, "solution.csv"), g, res.final)
    else:
        write_field(os.path.join(args.out, "solution.lvf"), g, res.final)
    _manifest(args.out, "solve", raw)
    return 0


def _cmd_verify(args):
    raw = None
    if args.measure:
        spec, raw = _load(args.measure)
        print(f"measure {args.measure}: family {spec.family}, "
              f"dim {spec.dim}, sigma {spec.sigma:g}")
    try:
        results = verify.run_suite(args.suite, tol_scale=args.tol_scale)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    for r in results:
        print(r.line())
    table = ("name,value,bound,status\n"
             + "".join(r.row() + "\n" for r in results))
    _write_text(os.path.join(args.out, "verify.csv"), table)
    _manifest(args.out, "verify", raw)
    bad = [r for r in results if not r.passed]
    if bad:
        raise ToleranceError(bad[0].name, bad[0].value, bad[0].bound)
    return 0


_DISPATCH = {"analyze": _cmd_analyze, "symbol": _cmd_symbol,
             "density": _cmd_density, "simulate": _cmd_simulate,
             "solve": _cmd_solve, "verify": _cmd_verify}


def run(argv) -> int:
    args = build_parser().parse_args(argv)
    out = os.path.abspath(args.out)
    os.makedirs(out, exist_ok=True)
    args.out = out
    try:
        return _DISPATCH[args.cmd](args)
    except ConfigError as exc:
        print(f"levykit: config error: {exc}", file=sys.stderr)
        return CONFIG_EXIT
    except ToleranceError as exc:
        print(f"levykit: tolerance: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"levykit: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
