"""``nlqm`` command-line interface.

Exit codes: 0 success, 1 usage or validation error, 2 runtime or numerical
failure.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import figures
from .dynamics import IntegratorConfig, SystemForm, initial_state, integrate
from .elliptic import sncndn
from .equilibria import analyse
from .errors import DomainError, InadmissibleError, IntegrationError, NLQMError, SingularityError
from .export import trajectory_json, trajectory_rows, write_csv
from .params import ModelParams
from .solutions import Family, SolutionFamily, abel_grid, soliton_shape, verify_residual
from .transforms import first_integral

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2

FORMS = {"coupled": SystemForm.COUPLED, "lienard": SystemForm.LIENARD, "levinson": SystemForm.LEVINSON}
FAMILIES = ("sn", "abel", "soliton-b0", "soliton-mu0", "soliton-general")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _diag(kind, message):
    prefix = f"{kind}:"
    if kind == "warning" and sys.stderr.isatty() and "NO_COLOR" not in os.environ:
        prefix = f"\033[33m{prefix}\033[0m"
    print(f"{prefix} {message}", file=sys.stderr)


def _add_common(p, *names):
    flags = {
        "mu": dict(type=float, help="mu"),
        "b": dict(type=float, help="imaginary part of the coupling"),
        "N": dict(type=float, help="conserved norm N > 0"),
        "E": dict(type=float, help="level-surface energy"),
    }
    for name in names:
        p.add_argument(f"--{name}", dest=name, default=None, **flags[name])
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--config", default=None, help="JSON file with flag values; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nlqm", description="Reduced nonlinear two-state dynamics toolkit.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("simulate", help="integrate one of the three system forms")
    _add_common(s, "mu", "b", "N", "E")
    s.add_argument("--x0", type=float, default=None)
    s.add_argument("--y0", type=float, default=None)
    s.add_argument("--v0", type=float, default=None,
                   help="initial derivative for second-order forms (default: from the coupled equations)")
    s.add_argument("--t-end", dest="t_end", type=float, default=None)
    s.add_argument("--dt", type=float, default=None, help="fixed RK4 step (selects rk4)")
    s.add_argument("--tol", type=float, default=None, help="adaptive abs/rel tolerance")
    s.add_argument("--method", choices=("rk4", "adaptive"), default=None)
    s.add_argument("--max-steps", dest="max_steps", type=int, default=None)
    s.add_argument("--form", choices=tuple(FORMS), default=None)
    s.add_argument("--format", choices=("csv", "json"), default=None)

    e = sub.add_parser("equilibria", help="fixed points and their stability")
    _add_common(e, "mu", "b", "N")

    v = sub.add_parser("verify", help="ODE residual of a closed-form family")
    _add_common(v, "mu", "b", "N", "E")
    v.add_argument("--family", choices=FAMILIES, default=None)
    v.add_argument("--B", type=float, default=None)
    v.add_argument("--grid-n", dest="grid_n", type=int, default=None)

    f = sub.add_parser("figure", help="write figure data as CSV")
    f.add_argument("which", choices=("fig1", "fig2"))
    _add_common(f, "mu", "b", "N", "E")

    el = sub.add_parser("elliptic", help="tabulate sn, cn, dn")
    el.add_argument("--k", type=float, default=None)
    el.add_argument("--u-min", dest="u_min", type=float, default=None)
    el.add_argument("--u-max", dest="u_max", type=float, default=None)
    el.add_argument("--n", type=int, default=None)
    el.add_argument("--out", default=None)
    el.add_argument("--config", default=None)
    return parser


def _effective(args, defaults) -> dict:
    cfg = dict(defaults)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in data.items()})
    cfg.update({k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")})
    echo = {k: v for k, v in sorted(cfg.items()) if v is not None}
    print(f"# {args.command} config: {json.dumps(echo, sort_keys=True)}", file=sys.stderr)
    return cfg


def _need(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"missing required option(s): {flags}")


def _params(cfg) -> ModelParams:
    N = 1.0 if cfg.get("N") is None else float(cfg["N"])
    return ModelParams(float(cfg["mu"]), float(cfg["b"]), N,
                       None if cfg.get("E") is None else float(cfg["E"]))


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise _WriteError(f"cannot write {path}: {exc}") from None
    with fh:
        yield fh


class _WriteError(Exception):
    pass


# -- commands -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = _effective(args, {"N": 1.0, "form": "coupled", "format": "csv", "max_steps": 1_000_000})
    _need(cfg, "mu", "b")
    p = _params(cfg)
    try:
        form = SystemForm.parse(cfg["form"])
    except ValueError:
        raise UsageError(f"unknown form {cfg['form']!r}") from None
    if form is SystemForm.LEVINSON and not p.levinson_admissible:
        raise InadmissibleError("levinson form is branch-inadmissible: b + mu != 0 required")
    _need(cfg, "x0", "y0", "t_end")

    method = cfg.get("method") or ("rk4" if cfg.get("dt") is not None else "adaptive")
    icfg = dict(t_end=float(cfg["t_end"]), method=method, max_steps=int(cfg["max_steps"]))
    if cfg.get("dt") is not None:
        icfg["dt"] = float(cfg["dt"])
    if cfg.get("tol") is not None:
        icfg["abs_tol"] = icfg["rel_tol"] = float(cfg["tol"])
    icfg = IntegratorConfig(**icfg)
    v0 = None if cfg.get("v0") is None else float(cfg["v0"])
    init = initial_state(form, p, float(cfg["x0"]), float(cfg["y0"]), v0)

    status = EXIT_OK
    try:
        tr = integrate(form, p, init, icfg)
    except IntegrationError as exc:
        _diag("error", f"integration failed: {exc}; writing partial trajectory")
        tr, status = exc.partial, EXIT_FAILURE
    with _output(cfg.get("out")) as fh:
        if cfg["format"] == "json":
            fh.write(trajectory_json(tr, form.value) + "\n")
        else:
            write_csv(fh, *trajectory_rows(tr))
    s = tr.stats
    print(f"# {form.value} {tr.method}: {len(tr)} rows, accepted={s.accepted} rejected={s.rejected}",
          file=sys.stderr)
    return status


def cmd_equilibria(args) -> int:
    cfg = _effective(args, {"N": 1.0})
    _need(cfg, "mu", "b")
    p = _params(cfg)
    reports = [r.to_dict() for r in analyse(p)]
    with _output(cfg.get("out")) as fh:
        fh.write(json.dumps(reports, indent=1) + "\n")
    return EXIT_OK


def _family_from(cfg) -> SolutionFamily:
    tag = Family.parse(cfg["family"])
    get = lambda k, d=None: d if cfg.get(k) is None else float(cfg[k])
    if tag is Family.SN:
        _need(cfg, "mu")
        mu = get("mu")
        base = SolutionFamily.sn(mu).params
        params = ModelParams(mu, get("b", base.b), get("N", base.N))
        return SolutionFamily(tag, params)
    if tag is Family.ABEL:
        _need(cfg, "B")
        mu = get("mu", 1.0)
        return SolutionFamily(tag, ModelParams(mu, get("b", -0.5 * mu), get("N", 1.0)), get("B"))
    if tag is Family.SOLITON_B0:
        _need(cfg, "mu", "E")
        return SolutionFamily(tag, ModelParams(get("mu"), get("b", 0.0), get("N", 1.0), get("E")))
    if tag is Family.SOLITON_MU0:
        _need(cfg, "b", "E")
        return SolutionFamily(tag, ModelParams(get("mu", 0.0), get("b"), get("N", 1.0), get("E")))
    _need(cfg, "mu", "b")
    return SolutionFamily(tag, ModelParams(get("mu"), get("b"), get("N", 1.0), get("E")))


def _first_integral_summary(f: SolutionFamily, grid) -> dict:
    """First integral along a soliton, on points where x >= 1e-6 A."""
    A, kappa = soliton_shape(f)
    p = f.params
    t = grid[np.abs(kappa * grid) <= 7.0]
    x = A / np.cosh(kappa * t) ** 2
    xp = -2.0 * kappa * x * np.tanh(kappa * t)
    values = first_integral(p, x, xp)
    expected = 0.0 if f.tag is Family.SOLITON_GENERAL else p.E
    dev = float(np.max(np.abs(values - expected)))
    out = {
        "min": float(values.min()),
        "max": float(values.max()),
        "level_E": expected,
        "max_deviation": dev,
        "n_points": int(t.size),
    }
    if f.tag is not Family.SOLITON_GENERAL:
        out["passed"] = dev <= 1e-6 * max(1.0, abs(expected))
    return out


def cmd_verify(args) -> int:
    cfg = _effective(args, {})
    _need(cfg, "family")
    f = _family_from(cfg)
    f.check()
    if f.tag is Family.ABEL:
        grid = abel_grid(f.params.N, f.B, n=int(cfg.get("grid_n") or 1201))
    else:
        grid = np.linspace(-10.0, 10.0, int(cfg.get("grid_n") or 401))
    report = verify_residual(f, grid)
    data = report.to_dict()
    data["params"] = f.params.to_dict()
    if f.B is not None:
        data["B"] = f.B
    ok = report.passed
    if f.tag.is_soliton:
        fi = _first_integral_summary(f, grid)
        data["first_integral"] = fi
        ok = ok and fi.get("passed", True)
    data["passed"] = ok
    with _output(cfg.get("out")) as fh:
        fh.write(json.dumps(data, indent=1) + "\n")
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_figure(args) -> int:
    cfg = _effective(args, dict(figures.FIG2_DEFAULTS))
    outdir = Path(cfg.get("out") or ".")
    if args.which == "fig1":
        for N in figures.FIG1_N:
            header, rows, poles = figures.fig1_table(N)
            for B, locs in poles.items():
                where = ", ".join(f"{x:.6f}" for x in locs)
                print(f"# fig1 N={N:g} B={B:g}: cells within {figures.POLE_NEIGHBOURHOOD:g} of poles "
                      f"[{where}] left empty", file=sys.stderr)
            with _output(outdir / f"fig1_N{N:g}.csv") as fh:
                write_csv(fh, header, rows)
        return EXIT_OK
    header, rows, warns = figures.fig2_table(E=float(cfg["E"]), N=float(cfg["N"]),
                                             mu=float(cfg["mu"]), b=float(cfg["b"]))
    for w in warns:
        _diag("warning", w)
    with _output(outdir / "fig2.csv") as fh:
        write_csv(fh, header, rows)
    return EXIT_OK


def cmd_elliptic(args) -> int:
    cfg = _effective(args, {"u_min": 0.0, "u_max": 10.0, "n": 201})
    _need(cfg, "k")
    k = float(cfg["k"])
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"k must lie in [0, 1], got {k:g}")
    if int(cfg["n"]) < 2:
        raise UsageError("--n must be at least 2")
    u = np.linspace(float(cfg["u_min"]), float(cfg["u_max"]), int(cfg["n"]))
    sn, cn, dn = sncndn(u, k)
    with _output(cfg.get("out")) as fh:
        write_csv(fh, ("u", "sn", "cn", "dn"), zip(u, sn, cn, dn))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "equilibria": cmd_equilibria,
    "verify": cmd_verify,
    "figure": cmd_figure,
    "elliptic": cmd_elliptic,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _diag("error", str(exc))
        return EXIT_USAGE
    except (InadmissibleError, DomainError) as exc:
        _diag("error", str(exc))
        return EXIT_USAGE
    except (_WriteError, SingularityError, NLQMError, ValueError) as exc:
        _diag("error", str(exc))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
