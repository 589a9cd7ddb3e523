"""Command-line interface: simulate, reduce, fixedpoints, portrait, verify.

Every file a command writes embeds the resolved run configuration in its
header, so a result is reproducible from the file alone.  Exit codes:
0 success, 1 verification failure, 2 usage error, 3 singular termination.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import dynamics as dyn
from . import fixedpoints as fp
from . import flowatlas as fa
from . import homographic as hom
from . import verification as ver
from .geometry import Curvature

HYPERBOLIC = "hyperbolic"
_KINDS = {"lagrangian": hom.LAGRANGIAN, "eulerian": hom.EULERIAN}


class UsageError(ValueError):
    """Inconsistent or incomplete command configuration."""


@dataclass
class RunConfig:
    """Resolved parameters of one invocation; embedded in output files."""
    command: str
    kappa: float | None = None
    c: float | None = None
    m: float | None = None
    kind: str | None = None
    preset: str | None = None
    out: str | None = None
    csv: bool = False
    tol: float | None = None
    t_end: float | None = None
    seed: int | None = None
    r0: float | None = None
    nu0: float = 0.0
    omega0: float = 0.0
    rho0: float | None = None
    rho_dot0: float = 0.0
    omega_dot0: float | None = None
    escape_radius: float | None = None
    r_min: float | None = None
    r_max: float | None = None
    nu_min: float | None = None
    nu_max: float | None = None
    grid: tuple | None = None
    t_span: float | None = None
    check: list | None = None
    trials: int | None = None

    def as_dict(self) -> dict:
        # the output path names the file, it is not part of the run
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in asdict(self).items()
                if v is not None and k != "out"}


def _cfg_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for name in vars(args):
        if name != "command" and hasattr(cfg, name):
            setattr(cfg, name, getattr(args, name))
    return cfg


def _apply_preset(cfg: RunConfig) -> None:
    if cfg.preset is None:
        return
    kind, kappa, c, m = ver.FIGURE_PRESETS[cfg.preset]
    if cfg.kind is None:
        cfg.kind = kind.lower()
    if cfg.kappa is None:
        cfg.kappa = kappa
    if cfg.c is None:
        cfg.c = c
    if cfg.m is None:
        cfg.m = m
    if cfg.command == "portrait":
        (rmin, rmax), (numin, numax), grid, t_span = ver.PORTRAIT_WINDOWS[cfg.preset]
        if cfg.r_min is None:
            cfg.r_min = rmin
        if cfg.r_max is None:
            cfg.r_max = rmax
        if cfg.nu_min is None:
            cfg.nu_min = numin
        if cfg.nu_max is None:
            cfg.nu_max = numax
        if cfg.grid is None:
            cfg.grid = grid
        if cfg.t_span is None:
            cfg.t_span = t_span


def _need(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"missing required {flags}")


def _common_checks(cfg: RunConfig) -> Curvature:
    _need(cfg, "kappa", "m", "kind")
    if cfg.kappa == 0.0:
        raise UsageError("--kappa must be nonzero")
    if cfg.m <= 0.0:
        raise UsageError("--m must be positive")
    return Curvature(cfg.kappa)


def _reduced_kind(cfg: RunConfig) -> str:
    if cfg.kind not in _KINDS:
        raise UsageError(f"command {cfg.command!r} supports --kind "
                         "lagrangian|eulerian")
    return _KINDS[cfg.kind]


def _ctrl(cfg: RunConfig) -> dyn.StepControl | None:
    if cfg.tol is None:
        return None
    return dyn.StepControl(rtol=cfg.tol, atol=cfg.tol * 1e-2)


def _drift_summary(series: dyn.TrajectorySeries) -> str:
    e0 = series.ledgers[0].energy
    l0 = series.ledgers[0].angular_momentum
    de = max(abs(led.energy - e0) for led in series.ledgers) / max(1.0, abs(e0))
    dl = max(np.abs(led.angular_momentum - l0).max() for led in series.ledgers) \
        / max(1.0, np.abs(l0).max())
    return f"energy_drift={de:.3e} momentum_drift={dl:.3e}"


def cmd_simulate(cfg: RunConfig) -> int:
    curv = _common_checks(cfg)
    t_end = 10.0 if cfg.t_end is None else cfg.t_end
    if cfg.kind == HYPERBOLIC:
        if cfg.kappa >= 0:
            raise UsageError("--kind hyperbolic needs --kappa < 0")
        _need(cfg, "rho0")
        rate = cfg.omega_dot0
        if rate is None:
            rate = hom.hyperbolic_re_rate(cfg.rho0, curv, cfg.m)
        state = hom.embed_hyperbolic(
            hom.HyperbolicState(cfg.rho0, cfg.rho_dot0, cfg.omega0, rate),
            curv, cfg.m)
    else:
        kind = _reduced_kind(cfg)
        _need(cfg, "c", "r0")
        rs = hom.ReducedState(cfg.r0, cfg.nu0, cfg.omega0, cfg.c)
        embed = hom.embed_lagrangian if kind == hom.LAGRANGIAN \
            else hom.embed_eulerian
        state = embed(rs, curv, cfg.m)
    try:
        series = dyn.integrate(state, t_end, ctrl=_ctrl(cfg))
    except dyn.StepUnderflow as exc:
        series = exc.partial
        if series is None or not len(series):
            print(f"error: {exc}", file=sys.stderr)
            return 3
        _write_series(series, cfg)
        print(f"reason=STEP_UNDERFLOW samples={len(series)} "
              f"t_final={series.times[-1]:.6g} " + _drift_summary(series))
        return 3
    _write_series(series, cfg)
    print(f"reason={series.reason} samples={len(series)} "
          f"t_final={series.times[-1]:.6g} " + _drift_summary(series))
    return 0 if series.reason == dyn.T_END else 3


def cmd_reduce(cfg: RunConfig) -> int:
    curv = _common_checks(cfg)
    kind = _reduced_kind(cfg)
    _need(cfg, "c", "r0")
    t_end = 10.0 if cfg.t_end is None else cfg.t_end
    rs = hom.ReducedState(cfg.r0, cfg.nu0, cfg.omega0, cfg.c)
    underflow = False
    try:
        series = hom.integrate_reduced(kind, rs, curv, cfg.m, t_end,
                                       ctrl=_ctrl(cfg),
                                       escape_radius=cfg.escape_radius)
    except dyn.StepUnderflow as exc:
        series = exc.partial
        underflow = True
        if series is None or not len(series):
            print(f"error: {exc}", file=sys.stderr)
            return 3
    _write_series(series, cfg)
    reason = "STEP_UNDERFLOW" if underflow else series.reason
    print(f"reason={reason} samples={len(series)} "
          f"t_final={series.t[-1]:.6g} r_final={series.r[-1]:.6g} "
          f"r_range=[{series.r.min():.6g}, {series.r.max():.6g}]")
    # an escape stop only happens when --escape-radius requested it
    return 3 if underflow else \
        (0 if series.reason in (dyn.T_END, dyn.ESCAPE) else 3)


def _write_series(series, cfg: RunConfig) -> None:
    if cfg.out is None:
        return
    extra = {"run_config": cfg.as_dict()}
    if cfg.csv:
        series.to_csv(cfg.out, extra=extra)
    else:
        series.to_jsonl(cfg.out, extra=extra)


def cmd_fixedpoints(cfg: RunConfig) -> int:
    curv = _common_checks(cfg)
    kind = _reduced_kind(cfg)
    _need(cfg, "c")
    if kind == hom.LAGRANGIAN:
        records = fp.lagrangian_fixed_points(curv, cfg.c, cfg.m)
    else:
        records = fp.eulerian_fixed_points(curv, cfg.c, cfg.m)
    diagnostics: dict = {"count": len(records)}
    if kind == hom.LAGRANGIAN and cfg.kappa > 0:
        thr = fp.lagrangian_threshold(curv, cfg.c, cfg.m)
        diagnostics["threshold"] = thr
        diagnostics["interior_root_expected"] = thr < 0
    if kind == hom.EULERIAN and cfg.kappa < 0:
        diagnostics["existence_sign"] = fp.eulerian_existence(curv, cfg.c, cfg.m)
    doc = {"config": cfg.as_dict(),
           "records": json.loads(fp.records_to_json(records)),
           "diagnostics": diagnostics}
    text = json.dumps(doc, indent=2)
    print(text)
    if cfg.out is not None:
        with open(cfg.out, "w") as f:
            f.write(text + "\n")
    return 0


def cmd_portrait(cfg: RunConfig) -> int:
    curv = _common_checks(cfg)
    kind = _reduced_kind(cfg)
    _need(cfg, "c", "r_min", "r_max", "nu_min", "nu_max", "grid", "t_span")
    data = fa.sweep(kind, curv, cfg.c, cfg.m, (cfg.r_min, cfg.r_max),
                    (cfg.nu_min, cfg.nu_max), cfg.grid, cfg.t_span,
                    ctrl=_ctrl(cfg))
    if cfg.out is not None:
        extra = {"run_config": cfg.as_dict()}
        if cfg.csv:
            data.to_csv(cfg.out, extra=extra)
        else:
            data.to_json(cfg.out, extra=extra)
    counts = data.counts()
    print(" ".join(f"{tag}={counts[tag]}" for tag in sorted(counts)))
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    results = ver.run_checks(cfg.check, trials=cfg.trials, seed=cfg.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  {r.detail}  [{r.elapsed:.1f}s]")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return 0 if passed == len(results) else 1


_COMMANDS = {
    "simulate": cmd_simulate,
    "reduce": cmd_reduce,
    "fixedpoints": cmd_fixedpoints,
    "portrait": cmd_portrait,
    "verify": cmd_verify,
}


def _grid_arg(text: str) -> tuple:
    try:
        nr, nn = text.lower().split("x")
        grid = (int(nr), int(nn))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NRxNN, got {text!r}")
    if grid[0] < 1 or grid[1] < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be >= 1")
    return grid


def _add_common(sp) -> None:
    sp.add_argument("--kappa", type=float, help="surface curvature (nonzero)")
    sp.add_argument("--c", type=float, help="angular momentum constant")
    sp.add_argument("--m", type=float, help="common body mass")
    sp.add_argument("--kind", choices=["lagrangian", "eulerian", "hyperbolic"],
                    help="ansatz family")
    sp.add_argument("--preset", choices=sorted(ver.FIGURE_PRESETS),
                    help="named parameter bundle; explicit flags override")
    sp.add_argument("--out", help="output file path")
    sp.add_argument("--csv", action="store_true",
                    help="write CSV instead of JSON")
    sp.add_argument("--tol", type=float,
                    help="integrator relative tolerance override")
    sp.add_argument("--t-end", type=float, dest="t_end",
                    help="integration end time (default 10)")
    sp.add_argument("--seed", type=int, help="random seed where applicable")


def _add_initial_conditions(sp, hyperbolic: bool) -> None:
    sp.add_argument("--r0", type=float, help="initial triangle/segment size")
    sp.add_argument("--nu0", type=float, default=0.0, help="initial dr/dt")
    sp.add_argument("--omega0", type=float, default=0.0,
                    help="initial rotation angle")
    if hyperbolic:
        sp.add_argument("--rho0", type=float,
                        help="hyperbolic ansatz half-separation")
        sp.add_argument("--rho-dot0", type=float, dest="rho_dot0", default=0.0)
        sp.add_argument("--omega-dot0", type=float, dest="omega_dot0",
                        help="rotation rate (default: relative-equilibrium rate)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curved3body",
        description="Three-body dynamics on constant-curvature surfaces")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate",
                        help="integrate the full system from an embedded ansatz")
    _add_common(sp)
    _add_initial_conditions(sp, hyperbolic=True)

    sp = sub.add_parser("reduce", help="integrate the planar reduced system")
    _add_common(sp)
    _add_initial_conditions(sp, hyperbolic=False)
    sp.add_argument("--escape-radius", type=float, dest="escape_radius",
                    help="stop once r exceeds this value")

    sp = sub.add_parser("fixedpoints",
                        help="locate and classify reduced-system fixed points")
    _add_common(sp)

    sp = sub.add_parser("portrait", help="classify a grid of initial conditions")
    _add_common(sp)
    sp.add_argument("--r-min", type=float, dest="r_min")
    sp.add_argument("--r-max", type=float, dest="r_max")
    sp.add_argument("--nu-min", type=float, dest="nu_min")
    sp.add_argument("--nu-max", type=float, dest="nu_max")
    sp.add_argument("--grid", type=_grid_arg, help="grid size as NRxNN, e.g. 7x5")
    sp.add_argument("--t-span", type=float, dest="t_span",
                    help="integration span per cell")

    sp = sub.add_parser("verify", help="run the verification checks")
    _add_common(sp)
    sp.add_argument("--check", action="append", choices=sorted(ver.ALL_CHECKS),
                    help="run only this check (repeatable)")
    sp.add_argument("--trials", type=int, help="trial count override")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _cfg_from_args(args)
    try:
        _apply_preset(cfg)
        return _COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except dyn.SingularConfiguration as exc:
        print(f"error: singular configuration: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # bad numeric ranges raised by the library (DomainError included)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
