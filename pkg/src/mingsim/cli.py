"""Command-line front end.

    mingsim orbits --n 3
    mingsim evolve --n 7 --times 0,0.5,1 --p1 0.3
    mingsim converge --n-list 5,7,11,101 --p1 0.3 --budget zero
    mingsim paradox --eps 0,0.001,0.01,0.1
    mingsim macro-check --n-list 101,211,401

Exit status: 0 ok, 1 invariant or validation failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import logging
import math
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from mingsim.dynamics import (
    VALIDATION_CAP,
    CombinedState,
    PhysicalScale,
    cycle_matrix,
    dense_orbit_propagator,
    evolve_combined,
    evolve_orbit,
)
from mingsim.errors import MingError
from mingsim.measurement import SMOOTHING_NOTE, LogisticSmoothing, paradox_scan, smoothing_scan
from mingsim.orbits import decompose, is_prime
from mingsim.pointer import (
    BudgetRule,
    CockedSet,
    PointerConfig,
    Prefix,
    cocked_mass,
    convergence_sweep,
    macroscopic_check,
    pointer_value,
)

log = logging.getLogger("mingsim")

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
AGREEMENT_TOL = 1e-8


class InvariantFailure(Exception):
    pass


def load_schema() -> dict:
    return json.loads(resources.files("mingsim").joinpath("schema.json").read_text())


def _columns(command: str) -> list[str]:
    return load_schema()["commands"][command]["csv_columns"]


# -- argument parsing ---------------------------------------------------------


def _prime(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not is_prime(n):
        raise argparse.ArgumentTypeError(f"n={n} is not prime")
    return n


def _prime_list(text: str) -> list[int]:
    return [_prime(part) for part in text.split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _complex_pair(text: str) -> tuple[complex, complex]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two complex numbers 'a0,a1'")
    try:
        return complex(parts[0].strip()), complex(parts[1].strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex pair {text!r}") from None


def _unit_interval(text: str) -> float:
    p = float(text)
    if not 0 <= p <= 1:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {p}")
    return p


def _add_amplitudes(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("particle state a0 psi0 + a1 psi1")
    g.add_argument("--p1", type=_unit_interval, default=0.5, help="|a1|^2 (default 0.5)")
    g.add_argument("--phase", type=float, default=0.0, help="phase of a1 in radians (default 0)")
    g.add_argument("--amplitudes", type=_complex_pair, help="explicit pair 'a0,a1'; overrides --p1/--phase")


def _add_budget(p: argparse.ArgumentParser, default: str = "sqrt") -> None:
    p.add_argument("--budget", choices=("zero", "sqrt", "exponent"), default=default,
                   help=f"defect budget rule for the cocked set (default {default})")
    p.add_argument("--gamma", type=float, help="exponent for --budget exponent, 0 < gamma < 1")


def _add_output(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("output")
    g.add_argument("-o", "--output", default="-", help="output file (default stdout)")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header")
    g.add_argument("--plot-data", type=Path, help="directory for two-column plot data files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mingsim", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbits", help="list rotation orbits of n-bit strings")
    p.add_argument("--n", type=_prime, required=True)
    _add_output(p)

    p = sub.add_parser("evolve", help="pointer value along a trajectory from the cocked state")
    p.add_argument("--n", type=_prime, required=True)
    p.add_argument("--times", type=_float_list, default=[0.0, 1.0], help="comma-separated times")
    p.add_argument("--h0", type=float, default=1.0, help="action unit before 1/n rescaling")
    p.add_argument("--idle-phase-rate", type=float, default=0.0, help="constant energy on the psi0 branch")
    p.add_argument("--validate", action="store_true", help=f"dense cross-check (n <= {VALIDATION_CAP})")
    _add_amplitudes(p)
    _add_budget(p)
    _add_output(p)

    p = sub.add_parser("converge", help="time-averaged pointer versus n")
    p.add_argument("--n-list", type=_prime_list, required=True)
    p.add_argument("--steps-per-n", type=int, default=10,
                   help="quadrature samples per unit time; 0 skips quadrature (default 10)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--validate", action="store_true", help=f"dense cross-check for rows with n <= {VALIDATION_CAP}")
    _add_amplitudes(p)
    _add_budget(p)
    _add_output(p)

    p = sub.add_parser("paradox", help="<R> after measuring Q_eps")
    p.add_argument("--eps", type=_float_list, default=[0.0, 0.001, 0.01, 0.1])
    p.add_argument("--smoothing-width", type=float, default=0.01)
    p.add_argument("--smoothing-steepness", type=float, default=4.0)
    _add_output(p)

    p = sub.add_parser("macro-check", help="prefix independence of pointer values on product states")
    p.add_argument("--n-list", type=_prime_list, default=[101, 211, 401])
    p.add_argument("--prefix", action="append", dest="prefixes", metavar="BITS",
                   help="basis prefix as a 0/1 string, repeatable (default: '', '1', '0', '10')")
    p.add_argument("--tail", type=_complex_pair, default=(1 + 0j, 0j), help="tail site vector 'c0,c1'")
    p.add_argument("--pointer", choices=("default", "indicator"), default="default")
    p.add_argument("--tol", type=float, default=1e-3)
    _add_amplitudes(p)
    _add_budget(p)
    _add_output(p)
    return parser


def _amplitudes(args: argparse.Namespace) -> tuple[complex, complex]:
    if args.amplitudes is not None:
        a0, a1 = args.amplitudes
        norm = math.hypot(abs(a0), abs(a1))
        if norm == 0:
            raise argparse.ArgumentTypeError("amplitudes must not both vanish")
        return a0 / norm, a1 / norm
    return complex(math.sqrt(1 - args.p1)), math.sqrt(args.p1) * cmath.exp(1j * args.phase)


def _budget(args: argparse.Namespace) -> BudgetRule:
    try:
        return BudgetRule(args.budget, args.gamma)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# -- commands -----------------------------------------------------------------


def _cplx(z: complex) -> list[float]:
    return [z.real, z.imag]


def cmd_orbits(args: argparse.Namespace) -> dict:
    dec = decompose(args.n)
    rows = [{"kind": "fixed", "representative": v, "length": 1, "members": [v]} for v in dec.fixed_points]
    rows += [
        {"kind": "orbit", "representative": o.representative, "length": o.length, "members": list(o.members)}
        for o in dec.orbits
    ]
    if dec.q * args.n + 2 != 2**args.n:
        raise InvariantFailure("q * n + 2 != 2**n")
    return {
        "command": "orbits",
        "n": args.n,
        "q": dec.q,
        "fixed_points": list(dec.fixed_points),
        "orbits": [list(o.members) for o in dec.orbits],
        "rows": rows,
    }


def _validate_evolution(n: int, t: float, h0: float) -> float:
    """Max deviation between FFT evolution and the dense Ming exponential."""
    scale = PhysicalScale(n, h0)
    dense = dense_orbit_propagator(n, t, scale)
    fast = np.column_stack([evolve_orbit(col, t, n) for col in np.eye(n)])
    err = float(np.abs(dense - fast).max())
    err_cycle = float(np.abs(dense_orbit_propagator(n, 1.0, scale) - cycle_matrix(n)).max())
    return max(err, err_cycle)


def cmd_evolve(args: argparse.Namespace) -> dict:
    a0, a1 = _amplitudes(args)
    config = PointerConfig(args.n, _budget(args))
    cocked = CockedSet(config)
    state0 = CombinedState.product(a0, a1, config.canonical_value, args.n)
    rows = []
    for t in args.times:
        state = evolve_combined(state0, t, idle_phase_rate=args.idle_phase_rate)
        norm = state.norm
        if abs(norm - 1) > 1e-12:
            raise InvariantFailure(f"norm drift {norm - 1:.3e} at t={t}")
        m0 = cocked_mass(CombinedState(args.n, 1, 0, state.branch0, state.branch0), cocked)
        m1 = cocked_mass(CombinedState(args.n, 0, 1, state.branch1, state.branch1), cocked)
        rows.append({"t": t, "pointer": pointer_value(state, cocked),
                     "cocked_mass_psi0": m0, "cocked_mass_psi1": m1, "norm": norm})
        if args.validate:
            if args.n > VALIDATION_CAP:
                raise InvariantFailure(f"--validate needs n <= {VALIDATION_CAP}")
            err = _validate_evolution(args.n, t, args.h0)
            if err > 1e-9:
                raise InvariantFailure(f"dense oracle mismatch {err:.3e} at t={t}")
    return {"command": "evolve", "n": args.n, "a0": _cplx(a0), "a1": _cplx(a1),
            "budget_rule": str(config.rule), "defect_budget": config.defect_budget, "rows": rows}


def cmd_converge(args: argparse.Namespace) -> dict:
    a0, a1 = _amplitudes(args)
    rule = _budget(args)
    steps = args.steps_per_n or None
    if steps is not None and steps < 3:
        raise argparse.ArgumentTypeError("--steps-per-n must be 0 or at least 3 (2n+1 samples per period)")
    p1 = abs(a1) ** 2
    rows = []
    for r in convergence_sweep(args.n_list, a0, a1, rule, steps_per_n=steps, jobs=args.jobs):
        if abs(r.residual - p1 * r.s / r.n) > 1e-12:
            raise InvariantFailure(f"n={r.n}: residual {r.residual} != p1*s/n")
        if r.avg_quadrature is not None and abs(r.avg_quadrature - r.avg_spectral) > AGREEMENT_TOL:
            raise InvariantFailure(f"n={r.n}: quadrature and spectral averages disagree")
        if args.validate and r.n <= VALIDATION_CAP:
            err = _validate_evolution(r.n, 0.5 + r.n / 3, 1.0)
            if err > 1e-9:
                raise InvariantFailure(f"n={r.n}: dense oracle mismatch {err:.3e}")
        rows.append({"n": r.n, "s": r.s, "s_over_n": r.s_over_n, "avg_spectral": r.avg_spectral,
                     "avg_quadrature": r.avg_quadrature, "residual": r.residual})
    return {"command": "converge", "p1": p1, "a0": _cplx(a0), "a1": _cplx(a1),
            "budget_rule": str(rule), "steps_per_n": steps, "rows": rows,
            "_plot": {"residual.dat": [(r["n"], r["residual"]) for r in rows]}}


def cmd_paradox(args: argparse.Namespace) -> dict:
    if any(e < 0 for e in args.eps):
        raise argparse.ArgumentTypeError("eps values must be nonnegative")
    try:
        model = LogisticSmoothing(args.smoothing_width, args.smoothing_steepness)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    sharp = paradox_scan(args.eps)
    smooth = smoothing_scan(args.eps, model)
    rows = [{"eps": e, "expectation_R": r, "smoothed_R": s} for (e, r), (_, s) in zip(sharp, smooth)]
    return {"command": "paradox", "smoothing": model.describe(), "rows": rows,
            "_notes": [f"smoothed_R: {SMOOTHING_NOTE}"],
            "_plot": {"paradox_R.dat": sharp, "smoothing_R.dat": smooth}}


def cmd_macro_check(args: argparse.Namespace) -> dict:
    a0, a1 = _amplitudes(args)
    rule = _budget(args)
    bits = args.prefixes if args.prefixes is not None else ["", "1", "0", "10"]
    if any(set(b) - {"0", "1"} for b in bits):
        raise argparse.ArgumentTypeError("prefixes must be 0/1 strings")
    c0, c1 = args.tail
    norm = math.hypot(abs(c0), abs(c1))
    tail = (c0 / norm, c1 / norm)
    prefixes = [Prefix((a0, a1), tuple((0j, 1 + 0j) if b == "1" else (1 + 0j, 0j) for b in s)) for s in bits]
    report = macroscopic_check(prefixes, tail, args.n_list, rule, args.pointer, args.tol)
    rows = [{"prefix": bits[j], "n": n, "value": v}
            for j, vals in report.values.items() for n, v in zip(report.n_grid, vals)]
    out = {"command": "macro-check", "pointer": args.pointer, "budget_rule": str(rule),
           "tail": [_cplx(tail[0]), _cplx(tail[1])], "spread": report.spread, "tol": report.tol,
           "passed": report.passed, "rows": rows}
    if not report.passed:
        out["_failure"] = f"spread {report.spread:.3e} >= tol {report.tol}"
    return out


COMMANDS = {
    "orbits": cmd_orbits,
    "evolve": cmd_evolve,
    "converge": cmd_converge,
    "paradox": cmd_paradox,
    "macro-check": cmd_macro_check,
}


# -- output -------------------------------------------------------------------


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(result: dict, fmt: str, timestamp: str | None) -> str:
    command = result["command"]
    if fmt == "json":
        payload = {k: v for k, v in result.items() if not k.startswith("_")}
        if command == "orbits":
            payload.pop("rows")
        if timestamp is not None:
            payload = {"generated": timestamp, **payload}
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    if timestamp is not None:
        buf.write(f"# generated: {timestamp}\n")
    for note in result.get("_notes", []):
        buf.write(f"# {note}\n")
    cols = _columns(command)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in result["rows"]:
        writer.writerow([_csv_cell(row[c]) for c in cols])
    return buf.getvalue()


def write_plot_data(directory: Path, result: dict) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name, pairs in result.get("_plot", {}).items():
        lines = [f"# {note}" for note in result.get("_notes", []) if name.startswith("smoothing")]
        lines += [f"{x!r} {y!r}" for x, y in pairs]
        (directory / name).write_text("\n".join(lines) + "\n")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        result = COMMANDS[args.command](args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except (InvariantFailure, MingError) as exc:
        log.error("%s", exc)
        return EXIT_INVARIANT

    timestamp = None if args.no_timestamp else datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = render(result, args.format, timestamp)
    try:
        if args.output == "-":
            sys.stdout.write(text)
        else:
            Path(args.output).write_text(text)
        if args.plot_data is not None:
            write_plot_data(args.plot_data, result)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    if "_failure" in result:
        log.error("%s", result["_failure"])
        return EXIT_INVARIANT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
