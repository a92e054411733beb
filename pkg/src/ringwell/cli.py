"""Command-line front end.

Every subcommand writes a report with the layout::

    {"command": ..., "params": {...}, "version": ..., "rows": [...],
     "diagnostics": {...}}

as JSON (default) or CSV (rows only, header first).  Exit status is 0 on
success, 1 for invalid arguments and 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from .core import RingState
from .energy import EnergyConvention, FixedNodeInput, delta_E, divergence_scan, truncated_energy
from .evolution import TimeGrid, evolve, sample_grid
from .insertion import insert_double, insert_single
from .loclin import consistency_scan, default_alpha_grid
from .overlap import (
    CoeffFamily,
    Convention,
    ConvergenceFailure,
    QuadratureSettings,
    closed_form_coeff,
    family_oracle,
    parseval_defect,
)

COMMANDS = ("coeffs", "insert", "energy", "scan-divergence", "check-loclin", "evolve")

_PI_TOKEN = re.compile(r"^\s*(-?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


class UsageError(Exception):
    pass


def parse_angle(text: str) -> float:
    """Decimal radians, or an exact token such as ``pi/4``, ``3pi/8`` or ``2*pi``."""
    match = _PI_TOKEN.match(text)
    if match:
        num = match.group(1)
        num = 1 if num in ("", None) else (-1 if num == "-" else int(num))
        den = int(match.group(2) or 1)
        if den == 0:
            raise argparse.ArgumentTypeError(f"bad angle {text!r}")
        frac = Fraction(num, den)
        return frac.numerator * math.pi / frac.denominator
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"bad angle {text!r}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("truncations must be positive")
    return values


def _angle_list(text: str) -> list[float]:
    return [parse_angle(x) for x in text.split(",") if x.strip()]


@dataclass
class Report:
    command: str
    params: dict
    version: str = __version__
    rows: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    timestamp: str | None = None

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "params": self.params,
            "version": self.version,
            "rows": self.rows,
            "diagnostics": self.diagnostics,
        }
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return out

    def to_json(self) -> str:
        # repr-based float output is the shortest string that round-trips exactly
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        return cls(
            command=data["command"],
            params=data["params"],
            version=data["version"],
            rows=data["rows"],
            diagnostics=data["diagnostics"],
            timestamp=data.get("timestamp"),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        if not self.rows:
            return ""
        writer = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        return buf.getvalue()


@dataclass
class RunSpec:
    command: str
    params: dict
    output_format: str = "json"
    output_path: str | None = None
    timestamp: bool = False
    threads: int = 1


def _state(name: str, shift: float) -> RingState:
    if name == "sin":
        return RingState.sin(1, shift)
    if name == "cos":
        return RingState.cos(1, shift)
    raise UsageError(f"unknown state {name!r}")


def _cmd_coeffs(p, threads):
    fam = CoeffFamily(p["family"])
    alpha = p["alpha"]
    if fam is not CoeffFamily.f and not (0 < alpha < math.pi / 2):
        raise UsageError("--alpha must lie in (0, pi/2)")
    settings = QuadratureSettings()
    rows, worst = [], 0.0
    for n in range(1, p["n_max"] + 1):
        closed = closed_form_coeff(fam, n, alpha, p["convention"])
        quad = family_oracle(fam, n, alpha, settings, p["convention"])
        worst = max(worst, abs(closed - quad))
        rows.append({"n": n, "closed_form": closed, "quadrature": quad, "abs_diff": abs(closed - quad)})
    return rows, {"quadrature_max_err": worst}


def _expansion(p):
    state = _state(p["state"], p["shift"])
    barriers = p["barrier"]
    if len(barriers) == 1:
        return state, insert_single(state, barriers[0], p["n_trunc"])
    if len(barriers) == 2 and barriers[0] == 0.0:
        if not (0 < barriers[1] < math.pi / 2):
            raise UsageError("second barrier must lie in (0, pi/2)")
        return state, insert_double(state, barriers[1], p["n_trunc"])
    raise UsageError("give one barrier, or two barriers with the first at 0")


def _chambers(exp):
    if hasattr(exp, "chambers"):
        return list(zip(("left", "right"), exp.chambers))
    return [("single", exp)]


def _cmd_insert(p, threads):
    state, exp = _expansion(p)
    rows = []
    for name, ch in _chambers(exp):
        for n, c in zip(ch.modes, ch.coeffs.real):
            rows.append({"chamber": name, "n": int(n), "coeff": float(c)})
    return rows, {"parseval_defect": parseval_defect(exp, state),
                  "truncated_energy": truncated_energy(exp)}


def _cmd_energy(p, threads):
    alpha = p["alpha"]
    if not (0 < alpha < math.pi / 2):
        raise UsageError("--alpha must lie in (0, pi/2)")
    n, m = np.meshgrid(np.arange(1, p["n_max"] + 1), np.arange(1, p["m_max"] + 1), indexing="ij")
    table = delta_E(n, m, p["state"], alpha, convention=p["convention"])
    rows = [{"n": int(i), "m": int(j), "delta_E": float(v)}
            for i, j, v in zip(n.ravel(), m.ravel(), np.atleast_1d(table).ravel())]
    return rows, {"min_abs_delta_E": float(np.abs(table).min())}


def _cmd_scan(p, threads):
    state = _state(p["state"], p["shift"])
    try:
        scan = divergence_scan(state, p["barrier"], p["n_list"])
    except FixedNodeInput as exc:
        raise UsageError(str(exc)) from exc
    return [{"N": n, "partial_energy": e} for n, e in scan], {}


def _cmd_loclin(p, threads):
    grid = p["alpha"] if p["alpha"] else default_alpha_grid(p["alpha_grid"])
    if any(not (0 < a < math.pi / 2) for a in grid):
        raise UsageError("alpha values must lie in (0, pi/2)")
    report = consistency_scan(grid, p["n_max"], p["m_max"], p["threshold"], workers=threads)
    rows = [{"n": c.n, "m": c.m, "alpha": c.alpha, "residual_eq5": c.residual_eq5,
             "residual_eq8": c.residual_eq8, "residual_eq9": c.residual_eq9,
             "R0_from_eq3": c.R0_from_eq3, "R0_from_eq4": c.R0_from_eq4,
             "Ralpha_from_eq6": c.Ralpha_from_eq6, "Ralpha_from_eq7": c.Ralpha_from_eq7}
            for c in report.cells]
    diag = report.to_dict()
    diag.pop("alpha_grid")
    return rows, diag


def _cmd_evolve(p, threads):
    state, exp = _expansion(p)
    grid = TimeGrid(p["t_start"], p["t_end"], p["steps"])
    thetas = p["theta"] or []
    rows = []
    e0 = truncated_energy(exp)
    n0 = math.sqrt(sum(ch.weight for _, ch in _chambers(exp)))
    drift_n = drift_e = 0.0
    for t in grid.times:
        ev = evolve(exp, float(t))
        nrm = math.sqrt(sum(ch.weight for _, ch in _chambers(ev)))
        en = truncated_energy(ev)
        drift_n, drift_e = max(drift_n, abs(nrm - n0)), max(drift_e, abs(en - e0))
        row = {"t": float(t), "norm": nrm, "energy": en}
        if thetas:
            amps = sample_grid(ev, thetas)
            for i, a in enumerate(amps):
                row[f"re_{i}"] = float(a.real)
                row[f"im_{i}"] = float(a.imag)
        rows.append(row)
    return rows, {"parseval_defect": parseval_defect(exp, state),
                  "norm_drift": drift_n, "energy_drift": drift_e}


_HANDLERS = {
    "coeffs": _cmd_coeffs,
    "insert": _cmd_insert,
    "energy": _cmd_energy,
    "scan-divergence": _cmd_scan,
    "check-loclin": _cmd_loclin,
    "evolve": _cmd_evolve,
}


def run(spec: RunSpec) -> tuple[int, str]:
    """Execute one command; returns ``(exit_code, serialized report or message)``."""
    if spec.command not in _HANDLERS:
        return 1, f"unknown command {spec.command!r}"
    try:
        rows, diag = _HANDLERS[spec.command](spec.params, spec.threads)
    except (UsageError, ValueError) as exc:
        return 1, f"error: {exc}"
    except ConvergenceFailure as exc:
        return 2, f"numerical failure in {exc.integral_id}: {exc}"
    except (FloatingPointError, ZeroDivisionError) as exc:
        return 2, f"numerical failure: {exc}"
    report = Report(spec.command, _jsonable(spec.params), rows=rows, diagnostics=_jsonable(diag))
    if spec.timestamp:
        report.timestamp = datetime.now(timezone.utc).isoformat()
    text = report.to_csv() if spec.output_format == "csv" else report.to_json()
    return 0, text


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ringwell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default=None, help="output file (default: stdout)")
    common.add_argument("--timestamp", action="store_true", help="add a wall-clock timestamp")
    common.add_argument("--threads", type=int, default=None)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("coeffs", parents=[common], help="closed-form coefficients with quadrature check")
    p.add_argument("--family", choices=[f.value for f in CoeffFamily], required=True)
    p.add_argument("--alpha", type=parse_angle, default=math.pi / 4)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--convention", choices=[c.value for c in Convention], default="orthonormal")

    def add_state(p):
        p.add_argument("--state", choices=("sin", "cos"), default="sin")
        p.add_argument("--shift", type=parse_angle, default=0.0, help="use f(theta - shift)")

    def add_insertion(p):
        add_state(p)
        p.add_argument("--barrier", type=parse_angle, action="append", required=True,
                       help="barrier angle; repeat for a second barrier at alpha (first must be 0)")
        p.add_argument("--n-trunc", type=int, default=100)

    p = sub.add_parser("insert", parents=[common], help="re-expand a ring state after insertion")
    add_insertion(p)

    p = sub.add_parser("energy", parents=[common], help="energy-transfer table dE_nm")
    p.add_argument("--state", choices=("phi", "psi"), default="phi")
    p.add_argument("--alpha", type=parse_angle, default=math.pi / 4)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--convention", choices=[c.value for c in EnergyConvention], default="corrected")

    p = sub.add_parser("scan-divergence", parents=[common], help="partial energies after a non-nodal insertion")
    add_state(p)
    p.add_argument("--barrier", type=parse_angle, default=0.0)
    p.add_argument("--n-list", type=_int_list, default=[101, 201, 401])

    p = sub.add_parser("check-loclin", parents=[common], help="certify that no branch weights exist")
    p.add_argument("--alpha-grid", type=int, default=50, help="number of angles in [0.05, pi/2 - 0.05]")
    p.add_argument("--alpha", type=_angle_list, default=None, help="explicit comma-separated angles")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--threshold", type=float, default=1e-6)

    p = sub.add_parser("evolve", parents=[common], help="norm, energy and samples over a time grid")
    add_insertion(p)
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--theta", type=_angle_list, default=None)
    return parser


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("RINGWELL_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


_POSITIVE = ("n_max", "m_max", "n_trunc", "steps", "alpha_grid")


def parse_args(argv) -> RunSpec:
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("a command is required: " + ", ".join(COMMANDS))
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "format", "output", "timestamp", "threads")}
    for key in _POSITIVE:
        if key in params and params[key] < 1:
            raise UsageError(f"--{key.replace('_', '-')} must be positive")
    threads = _threads(args.threads)
    if threads < 1:
        raise UsageError("--threads must be positive")
    return RunSpec(args.command, params, args.format, args.output, args.timestamp, threads)


def main(argv=None) -> int:
    try:
        spec = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    code, text = run(spec)
    if code != 0:
        print(text, file=sys.stderr)
        return code
    if spec.output_path:
        with open(spec.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
