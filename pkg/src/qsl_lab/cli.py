"""``qsl-lab`` command line.

    qsl-lab evolve --delta D --t-max T --steps N --initial excited|ground|mixed:p
    qsl-lab qsl --delta D --tau T --tau-d TD --initial excited|mixed:p
    qsl-lab sweep --figure 1..5 | --mode fig1|tau-scan ...

Standard output carries CSV only; progress goes to standard error. Exit status
is 0 on success, 1 on a domain error (its class name is printed) and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from . import matrix2 as m2
from .errors import QslLabError
from .sweep import (
    FIG1,
    TAU_SCAN,
    SweepSpec,
    emit_csv,
    figure_specs,
    run,
    window_row,
    write_csv,
)

EVOLVE_HEADER = ("t", "rho11", "rho12_re", "rho12_im", "rho22", "generator_norm")


def _initial(allow_ground: bool):
    def parse(text: str) -> str:
        if text == "ground" and not allow_ground:
            raise argparse.ArgumentTypeError("ground is not accepted here")
        try:
            dyn.parse_initial(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
        return text

    return parse


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _odd_nodes(text: str) -> int:
    n = _positive_int(text)
    if n < 3 or n % 2 == 0:
        raise argparse.ArgumentTypeError("nodes must be odd and >= 3")
    return n


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0 or not np.isfinite(x):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return x


def _finite_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(x):
        raise argparse.ArgumentTypeError("must be finite")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsl-lab",
        description="Quantum speed limits of a qubit with non-Hermitian detuning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evolve", help="evolve a state and print the trajectory")
    ev.add_argument("--delta", type=_finite_float, required=True)
    ev.add_argument("--omega", type=_finite_float, default=1.0)
    ev.add_argument("--t-max", type=_positive_float, required=True)
    ev.add_argument("--steps", type=_positive_int, required=True)
    ev.add_argument("--initial", type=_initial(True), required=True)
    ev.add_argument("--method", choices=("closed", "ode"), default="closed")
    ev.add_argument("--out")

    q = sub.add_parser("qsl", help="bound for one window [tau, tau + tau_d]")
    q.add_argument("--delta", type=_finite_float, required=True)
    q.add_argument("--tau", type=_finite_float, required=True)
    q.add_argument("--tau-d", type=_positive_float, required=True)
    q.add_argument("--initial", type=_initial(False), required=True)
    q.add_argument("--nodes", type=_odd_nodes, default=None)
    q.add_argument("--out")

    sw = sub.add_parser("sweep", help="figure presets or custom sweeps")
    sel = sw.add_mutually_exclusive_group(required=True)
    sel.add_argument("--figure", type=int, choices=range(1, 6))
    sel.add_argument("--mode", choices=(FIG1, TAU_SCAN))
    sw.add_argument("--delta", type=_finite_float)
    sw.add_argument("--delta-min", type=_finite_float)
    sw.add_argument("--delta-max", type=_finite_float)
    sw.add_argument("--delta-steps", type=_positive_int)
    sw.add_argument("--tau-max", type=_positive_float)
    sw.add_argument("--tau-steps", type=_positive_int)
    sw.add_argument("--tau-d", type=_positive_float)
    sw.add_argument("--initial", type=_initial(False))
    sw.add_argument("--nodes", type=_odd_nodes)
    sw.add_argument("--workers", type=_positive_int, default=1)
    sw.add_argument("--out")
    return parser


_SWEEP_FIELDS = (
    "delta", "delta_min", "delta_max", "delta_steps",
    "tau_max", "tau_steps", "tau_d", "initial", "nodes",
)


def parse(argv=None) -> argparse.Namespace:
    """Parse and validate arguments; usage errors exit with status 2."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "qsl" and args.tau < 0:
        parser.error("--tau must be >= 0")
    if args.command == "sweep":
        overrides = {k: getattr(args, k) for k in _SWEEP_FIELDS if getattr(args, k) is not None}
        try:
            if args.figure is not None:
                specs = figure_specs(args.figure, **overrides)
            else:
                if args.mode == TAU_SCAN and "delta" not in overrides:
                    parser.error("--mode tau-scan requires --delta")
                specs = [SweepSpec(kind=args.mode, **overrides)]
        except (TypeError, ValueError) as exc:
            parser.error(str(exc))
        args.specs = specs
    return args


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _cmd_evolve(args) -> None:
    params = dyn.ModelParams.from_delta(args.delta, args.omega)
    rho0 = dyn.parse_initial(args.initial)
    if args.method == "ode":
        traj = dyn.integrate_ode(rho0, params, args.t_max, args.steps)
        times, states, gens = traj.times, traj.states, traj.generators
    else:
        times = np.linspace(0.0, args.t_max, args.steps + 1)
        states = dyn.evolve_closed_form(rho0, params, times)
        gens = dyn.generator(states, params)
    norms = m2.schatten_norm(gens, np.inf)
    stream, close = _open_out(args.out)
    try:
        stream.write(",".join(EVOLVE_HEADER) + "\n")
        for t, r, g in zip(times, states, norms):
            vals = (t, r[0, 0].real, r[0, 1].real, r[0, 1].imag, r[1, 1].real, g)
            stream.write(",".join(format(float(v), ".12g") for v in vals) + "\n")
    finally:
        if close:
            stream.close()


def _cmd_qsl(args) -> None:
    row = window_row(args.delta, args.tau, args.tau_d, args.initial, args.nodes)
    if args.out is None:
        write_csv([row], sys.stdout)
    else:
        emit_csv([row], args.out)


def _suffixed(path: str, delta: float) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}_delta{delta:g}{p.suffix}")


def _cmd_sweep(args) -> None:
    specs = args.specs
    per_delta = args.figure is not None and args.figure > 1 and len(specs) > 1
    first = True
    for spec in specs:
        label = f"delta={spec.delta:g}" if spec.kind == TAU_SCAN else "delta scan"
        print(f"sweep {spec.kind} {label}: {len(spec.grid())} points", file=sys.stderr)
        rows = run(spec, workers=args.workers)
        if args.out is None:
            write_csv(rows, sys.stdout, header=first)
        elif per_delta:
            dest = _suffixed(args.out, spec.delta)
            emit_csv(rows, dest)
            print(f"wrote {dest}", file=sys.stderr)
        else:
            emit_csv(rows, args.out)
            print(f"wrote {args.out}", file=sys.stderr)
        first = False


COMMANDS = {"evolve": _cmd_evolve, "qsl": _cmd_qsl, "sweep": _cmd_sweep}


def main(argv=None) -> int:
    args = parse(argv)
    try:
        COMMANDS[args.command](args)
    except QslLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
