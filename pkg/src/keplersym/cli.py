"""Command-line front end.

Subcommands: `verify` runs the seeded theorem-verification suites and
emits a deterministic report (JSON is the machine interface; the human
table is derived from it); `orbit` inspects or samples a single orbit;
`ode` evaluates the ODE invariants or the Wunschmann residual; `map`
transforms point files through the special maps; `envelope` emits
envelope curve data with family samples.

Exit codes: 0 all checks pass; 1 verification failure or domain error;
2 usage or expression-parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import expr as ex
from . import invariants as inv
from . import kmaps
from . import theorems as th
from .expr import ParseError
from .orbit import (
    LineDualError,
    OrbitError,
    from_abc,
    geometry,
    orbit_to_dict,
    sample,
)
from .verify import DEFAULT_TOL, SUITES, run_suites

SEED_ENV_VAR = "KEPLER_SYM_SEED"


class CliError(Exception):
    """Domain-level failure mapped to exit code 1."""


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as err:
        raise CliError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from err


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kepler-sym",
        description="Kepler orbit geometry, its Minkowski orbit space, and the orbital symmetry group",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p_verify.add_argument("--json", action="store_true", help="emit the JSON report")
    p_verify.set_defaults(func=cmd_verify)

    p_orbit = sub.add_parser("orbit", help="inspect or sample one orbit")
    orbit_sub = p_orbit.add_subparsers(dest="action", required=True)
    for action in ("info", "sample"):
        p = orbit_sub.add_parser(action)
        p.add_argument("--a", type=float, required=True)
        p.add_argument("--b", type=float, required=True)
        p.add_argument("--c", type=float, required=True)
        if action == "sample":
            p.add_argument("--n", type=int, default=100)
            p.add_argument("--format", choices=("csv", "json"), default="csv")
            p.set_defaults(func=cmd_orbit_sample)
        else:
            p.set_defaults(func=cmd_orbit_info)

    p_ode = sub.add_parser("ode", help="ODE invariants and the Wunschmann residual")
    ode_sub = p_ode.add_subparsers(dest="action", required=True)
    p_inv = ode_sub.add_parser("invariants")
    p_inv.add_argument("--f", required=True, help="right-hand side f(x, y, p) of y'' = f")
    p_inv.add_argument("--at", required=True, help='bindings, e.g. "y=2,p=0"')
    p_inv.set_defaults(func=cmd_ode_invariants)
    p_wun = ode_sub.add_parser("wunschmann")
    p_wun.add_argument("--alpha", type=float, required=True, help="force exponent in r^alpha")
    p_wun.set_defaults(func=cmd_ode_wunschmann)

    p_map = sub.add_parser("map", help="transform a point file through a special map")
    p_map.add_argument("name", choices=("square", "flattenM", "hill", "parabola-chart"))
    p_map.add_argument("--m", type=float, help="angular momentum for flattenM")
    p_map.add_argument("--energy", type=float, help="energy for hill")
    p_map.add_argument("--points", required=True, help="input CSV with columns theta,x,y")
    p_map.add_argument("--out", required=True, help="output CSV path")
    p_map.set_defaults(func=cmd_map)

    p_env = sub.add_parser("envelope", help="envelope of a concurrent orbit family")
    p_env.add_argument("kind", choices=("minor-axis", "energy", "hooke"))
    p_env.add_argument("--b-axis", type=float, dest="b_axis", help="minor axis B")
    p_env.add_argument("--x1", type=float, help="fixed point abscissa (minor-axis)")
    p_env.add_argument("--energy", type=float, help="fixed energy E < 0")
    p_env.add_argument("--x0", type=float, help="fixed point abscissa (energy)")
    p_env.add_argument("--area", type=float, help="fixed area (hooke)")
    p_env.add_argument("--members", type=int, default=20)
    p_env.set_defaults(func=cmd_envelope)

    return parser


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    reports = run_suites(args.suite, seed=seed, tol=args.tol)
    ok = all(r.ok for r in reports)
    if args.json:
        payload = [r.to_dict() for r in reports]
        print(json.dumps(payload[0] if len(payload) == 1 else payload, sort_keys=True, indent=2))
    else:
        for r in reports:
            print(f"suite {r.suite}  seed={r.seed}  ({r.wall_time_s:.2f}s)")
            for c in r.cases:
                res = "-" if c.residual is None else f"{c.residual:.3e}"
                line = f"  [{c.status.upper():5s}] {c.name:28s} residual={res} tol={c.tol:.1e}"
                if c.detail:
                    line += f"  ({c.detail})"
                print(line)
            s = r.summary
            print(f"  {s['pass']}/{s['total']} passed")
    return 0 if ok else 1


# --------------------------------------------------------------------------
# orbit
# --------------------------------------------------------------------------

def _make_orbit(args):
    try:
        return from_abc(args.a, args.b, args.c)
    except LineDualError as err:
        raise CliError(f"line, not a Kepler orbit: {err}") from err
    except OrbitError as err:
        raise CliError(str(err)) from err


def cmd_orbit_info(args) -> int:
    o = _make_orbit(args)
    g = geometry(o)
    record = {
        **orbit_to_dict(o),
        "e": g.eccentricity,
        "E": g.energy,
        "M": g.ang_momentum,
        "class": o.conic_class().value,
        "latus_rectum": g.latus_rectum,
        "pericenter_angle": g.pericenter_angle,
        "semi_major": g.semi_major,
        "semi_minor": g.semi_minor,
    }
    print(json.dumps(record, sort_keys=True, indent=2))
    return 0


def cmd_orbit_sample(args) -> int:
    o = _make_orbit(args)
    pts = sample(o, args.n)
    if args.format == "json":
        print(json.dumps([{"theta": p.theta, "x": p.x, "y": p.y} for p in pts], indent=2))
        return 0
    writer = csv.writer(sys.stdout)
    writer.writerow(["theta", "x", "y"])
    for p in pts:
        writer.writerow([repr(p.theta), repr(p.x), repr(p.y)])
    return 0


# --------------------------------------------------------------------------
# ode
# --------------------------------------------------------------------------

def _parse_bindings(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, _, value = chunk.partition("=")
        if not _ or not name.strip():
            raise CliError(f"bad binding {chunk!r}; expected name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError as err:
            raise CliError(f"bad binding value in {chunk!r}") from err
    return out


def cmd_ode_invariants(args) -> int:
    rhs = ex.parse(args.f)
    bindings = _parse_bindings(args.at)
    box = {name: (v, v) for name, v in bindings.items()}
    ode = inv.SecondOrderODE(rhs, box)
    try:
        v1 = ex.evaluate(inv.i1(ode), bindings)
        v2 = ex.evaluate(inv.i2(ode), bindings)
    except ex.EvalError as err:
        raise CliError(str(err)) from err
    print(f"I1 = {v1!r}")
    print(f"I2 = {v2!r}")
    return 0


def cmd_ode_wunschmann(args) -> int:
    alpha = inv._as_number(args.alpha)
    exponent = -alpha if not isinstance(alpha, float) else -float(alpha)
    force_rho = ex.pow_(ex.var("rho"), exponent)
    ode = inv.central_3rd_order(force_rho)
    residual = ex.max_residual(inv.wunschmann_residual(ode), ode.box)
    print(f"wunschmann_residual = {residual!r}")
    print(f"satisfied = {residual <= ex.ZERO_TEST_THRESHOLD}")
    return 0


# --------------------------------------------------------------------------
# map
# --------------------------------------------------------------------------

def _read_points(path: str) -> list[list[str]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise CliError(f"cannot read {path}: {err}") from err
    if rows and any(not _is_number(cell) for cell in rows[0][-2:]):
        rows = rows[1:]  # drop header
    return rows


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def cmd_map(args) -> int:
    from .orbit import PlanePoint

    if args.name == "flattenM" and args.m is None:
        raise CliError("flattenM needs --m")
    if args.name == "hill" and args.energy is None:
        raise CliError("hill needs --energy")
    rows = _read_points(args.points)
    out_rows = [["theta", "x", "y", "err"]]
    for row in rows:
        if len(row) < 2:
            out_rows.append(["", "", "", "short row"])
            continue
        x, y = float(row[-2]), float(row[-1])
        try:
            if args.name == "square":
                q = kmaps.square(PlanePoint(x, y))
            elif args.name == "flattenM":
                q = kmaps.flatten_m(PlanePoint(x, y), args.m)
            elif args.name == "hill":
                q = kmaps.hill_embed(PlanePoint(x, y), args.energy)
            else:
                q = kmaps.parabola_chart(x, y)
            out_rows.append([repr(math.atan2(q.y, q.x)), repr(q.x), repr(q.y), ""])
        except (kmaps.MapError, OrbitError) as err:
            out_rows.append(["", "", "", str(err)])
    try:
        with open(args.out, "w", newline="") as fh:
            csv.writer(fh).writerows(out_rows)
    except OSError as err:
        raise CliError(f"cannot write {args.out}: {err}") from err
    return 0


# --------------------------------------------------------------------------
# envelope
# --------------------------------------------------------------------------

def _orbit_points(o, n=100) -> list[list[float]]:
    return [[p.x, p.y] for p in sample(o, n)]


def cmd_envelope(args) -> int:
    try:
        if args.kind == "minor-axis":
            if args.b_axis is None or args.x1 is None:
                raise CliError("minor-axis needs --b-axis and --x1")
            env = th.envelope_minor_axis(args.b_axis, args.x1)
            members = th.minor_axis_family(
                args.b_axis, args.x1, np.linspace(-1.2, 1.2, args.members)
            )
            payload = {
                "kind": args.kind,
                "params": {"b_axis": args.b_axis, "x1": args.x1},
                "envelope": orbit_to_dict(env),
                "envelope_points": _orbit_points(env),
                "family": [
                    {"dual": orbit_to_dict(m), "points": _orbit_points(m, 50)} for m in members
                ],
            }
        elif args.kind == "energy":
            if args.energy is None or args.x0 is None:
                raise CliError("energy needs --energy and --x0")
            env = th.envelope_energy(args.energy, args.x0)
            members = th.energy_family(
                args.energy, args.x0, np.linspace(-0.9, 0.9, args.members)
            )
            fx, fy = th.second_focus(env)
            payload = {
                "kind": args.kind,
                "params": {"energy": args.energy, "x0": args.x0},
                "envelope": orbit_to_dict(env),
                "second_focus": [fx, fy],
                "envelope_points": _orbit_points(env),
                "family": [
                    {"dual": orbit_to_dict(m), "points": _orbit_points(m, 50)} for m in members
                ],
            }
        else:
            if args.area is None:
                raise CliError("hooke needs --area")
            env = th.envelope_hooke(args.area)
            curves = th.hooke_family(args.area, np.linspace(-1.0, 1.0, args.members))
            ts = np.linspace(0.0, 2 * math.pi, 50, endpoint=False)
            payload = {
                "kind": args.kind,
                "params": {"area": args.area},
                "envelope_lines": [env.half_gap, -env.half_gap],
                "family": [
                    {"points": [list(cv.point(float(t))) for t in ts]} for cv in curves
                ],
            }
    except th.TheoremError as err:
        raise CliError(str(err)) from err
    print(json.dumps(payload, sort_keys=True, indent=2))
    return 0


# --------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (CliError, OrbitError, inv.InvariantError, kmaps.MapError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
