"""Command line front end.

Every command takes a model source (builtin name or file path) and emits
deterministic CSV on stdout: header row, ``.`` decimal separator, reals
in shortest round-trip form, vectors semicolon-joined.  Exit codes:
0 success, 2 validation failure, 3 numerical non-convergence or refused
computation.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import checks
from .counting import (
    CountQuery,
    FiniteQuotient,
    chebotarev_distribution,
    equidistribution_test,
    exact_window_count,
    margulis_total,
    predict_count,
    sweep,
)
from .errors import OrbitflowError
from .graphs import validate_graph
from .legendre import direction_hull, entropy_hessian, solve_u
from .models import load_model, serialize_model
from .thermo import flow_pressure, pressure_gradient


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _fmt_vec(vec) -> str:
    return ";".join(_fmt(x) for x in vec)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _parse_obs(text: str) -> dict:
    out = {}
    for token in text.split(","):
        edge_part, value = token.split("=", 1)
        a, b = edge_part.split(">", 1)
        out[(int(a), int(b))] = float(value)
    return out


def _emit(header: str, rows) -> None:
    print(header)
    for row in rows:
        print(",".join(row))


def cmd_validate(args) -> int:
    model = load_model(args.model)
    problems = validate_graph(model.graph)
    for p in problems:
        print(p)
    if problems:
        return 2
    print(f"ok: {model.name} ({model.graph.vertex_count} vertices, "
          f"{len(model.graph.edges)} edges, d={model.weights.dimension})")
    return 0


def cmd_pressure(args) -> int:
    m = load_model(args.model)
    u = _parse_floats(args.u)
    p = flow_pressure(m.graph, m.weights, u)
    grad = pressure_gradient(m.graph, m.weights, u)
    _emit("u,pressure,gradient", [[_fmt_vec(u), _fmt(p), _fmt_vec(grad)]])
    return 0


def cmd_entropy(args) -> int:
    m = load_model(args.model)
    rho = _parse_floats(args.rho)
    dd = solve_u(m.graph, m.weights, rho)
    det = float(np.linalg.det(entropy_hessian(dd)))
    _emit(
        "rho,u,entropy,det_hessian",
        [[_fmt_vec(rho), _fmt_vec(dd.u), _fmt(dd.entropy), _fmt(det)]],
    )
    return 0


def cmd_hull(args) -> int:
    m = load_model(args.model)
    hull = direction_hull(m.graph, m.weights, args.n)
    rows = [["dim", str(hull.dim)]]
    for p in sorted(hull.points):
        rows.append(["point", _fmt_vec(p)])
    for v in sorted(hull.vertices):
        rows.append(["vertex", _fmt_vec(v)])
    _emit("role,coords", rows)
    return 0


def _query_from(args, m) -> CountQuery:
    return CountQuery(
        T=args.T,
        delta=args.delta,
        rho=_parse_floats(args.rho),
        alpha=_parse_ints(args.alpha),
        removed=m.removed,
    )


def cmd_count(args) -> int:
    m = load_model(args.model)
    q = _query_from(args, m)
    exact = exact_window_count(m.graph, m.weights, q, budget_cap=args.budget)
    target = tuple(
        f + a
        for f, a in zip(
            (int(np.floor(args.T * r)) for r in q.rho), q.alpha
        )
    )
    _emit(
        "T,delta,target_class,exact",
        [[_fmt(q.T), _fmt(q.delta), _fmt_vec(target), str(exact)]],
    )
    return 0


def cmd_predict(args) -> int:
    m = load_model(args.model)
    q = _query_from(args, m)
    dd = solve_u(m.graph, m.weights, q.rho)
    predicted = predict_count(m.graph, m.weights, dd, q)
    target = tuple(
        f + a
        for f, a in zip((int(np.floor(args.T * r)) for r in q.rho), q.alpha)
    )
    _emit(
        "T,delta,target_class,predicted",
        [[_fmt(q.T), _fmt(q.delta), _fmt_vec(target), _fmt(predicted)]],
    )
    return 0


def cmd_sweep(args) -> int:
    m = load_model(args.model)
    T_list = []
    t = args.Tmin
    while t <= args.Tmax + 1e-12:
        T_list.append(t)
        t += args.step
    rows = sweep(
        m.graph,
        m.weights,
        _parse_floats(args.rho),
        _parse_ints(args.alpha),
        args.delta,
        T_list,
        removed=m.removed,
        budget_cap=args.budget,
    )
    _emit(
        "T,delta,target_class,exact,predicted,ratio",
        [
            [
                _fmt(r.T),
                _fmt(r.delta),
                _fmt_vec(r.target_class),
                str(r.exact),
                _fmt(r.predicted),
                _fmt(r.ratio),
            ]
            for r in rows
        ],
    )
    return 0


def cmd_margulis(args) -> int:
    m = load_model(args.model)
    res = margulis_total(m.graph, m.weights, m.removed, args.T, budget_cap=args.budget)
    _emit(
        "T,exact,reference,ratio",
        [[_fmt(args.T), str(res.exact), _fmt(res.reference), _fmt(res.exact / res.reference)]],
    )
    return 0


def cmd_chebotarev(args) -> int:
    m = load_model(args.model)
    if (args.mod is None) == (args.quotient is None):
        print("exactly one of --mod / --quotient is required", file=sys.stderr)
        return 2
    if args.mod is not None:
        quot = FiniteQuotient.from_modulus(args.mod, m.weights.dimension)
    else:
        quot = m.quotient(args.quotient)
    res = chebotarev_distribution(m.graph, m.weights, m.removed, quot, args.n)
    rows = []
    for key in sorted(res.counts, key=repr):
        label = _fmt_vec(key) if isinstance(key, tuple) and key and isinstance(key[0], int) else repr(key)
        rows.append(
            [label, str(res.counts[key]), _fmt(res.frequencies[key]), _fmt(res.reference[key])]
        )
    _emit("class,count,frequency,reference", rows)
    return 0


def cmd_equidist(args) -> int:
    m = load_model(args.model)
    q = _query_from(args, m)
    dd = solve_u(m.graph, m.weights, q.rho)
    phi = {e: 0.0 for e in m.graph.edges}
    phi.update(_parse_obs(args.obs))
    res = equidistribution_test(m.graph, m.weights, dd, q, phi, budget_cap=args.budget)
    _emit(
        "empirical,expected,n_orbits",
        [[_fmt(res.empirical), _fmt(res.expected), str(res.n_orbits)]],
    )
    return 0


def cmd_check(args) -> int:
    return 0 if checks.run_all_checks() else 2


def cmd_show(args) -> int:
    model = load_model(args.model)
    sys.stdout.write(serialize_model(model))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="orbitflow",
        description="Periodic-orbit statistics of suspension flows over directed graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, model=True):
        p = sub.add_parser(name)
        if model:
            p.add_argument("model", help="builtin name (full2, goldenmean, bench3) or model file path")
        p.set_defaults(fn=fn)
        return p

    add("validate", cmd_validate)
    add("show", cmd_show)

    p = add("pressure", cmd_pressure)
    p.add_argument("--u", required=True, help="comma-separated reals")

    p = add("entropy", cmd_entropy)
    p.add_argument("--rho", required=True, help="comma-separated reals")

    p = add("hull", cmd_hull)
    p.add_argument("--n", type=int, required=True)

    for name, fn in (("count", cmd_count), ("predict", cmd_predict)):
        p = add(name, fn)
        p.add_argument("--T", type=float, required=True)
        p.add_argument("--delta", type=float, required=True)
        p.add_argument("--rho", required=True)
        p.add_argument("--alpha", required=True)
        p.add_argument("--budget", type=int, default=32)

    p = add("sweep", cmd_sweep)
    p.add_argument("--Tmin", type=float, required=True)
    p.add_argument("--Tmax", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--rho", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--budget", type=int, default=32)

    p = add("margulis", cmd_margulis)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--budget", type=int, default=32)

    p = add("chebotarev", cmd_chebotarev)
    p.add_argument("--mod", type=int)
    p.add_argument("--quotient")
    p.add_argument("--n", type=int, required=True)

    p = add("equidist", cmd_equidist)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--obs", required=True, help="edge values, e.g. 1>2=1.0,2>1=0.5")
    p.add_argument("--budget", type=int, default=32)

    add("check", cmd_check, model=False)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except OrbitflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
