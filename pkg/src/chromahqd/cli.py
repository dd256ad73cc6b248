"""Command line front end.

Every subcommand reads graphs in the JSON interchange format, prints a
single JSON payload, and uses exit codes uniformly: 0 for success and
agreement, 1 for usage or input errors, 2 for numerical failures and
cross-route mismatches.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Mapping

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .chromatic import (
    chi_at_negative,
    chromatic_polynomial,
    count_report,
    predicted_realizations,
)
from .dirichlet import DegenerateEdgeError, SingularSystemError, solve_dirichlet
from .fixtures import fixture, list_fixtures
from .graphs import (
    EdgeId,
    Graph,
    augment_k,
    graph_from_json,
    graph_to_json,
    load_graph,
)
from .hqd import QAssignment, residuals, sample_balanced_q, solve_realizations
from .integral import estimate_chi
from .lc_circuit import (
    ElementStack,
    PhasorDrive,
    reactive_power_as_hqd,
    resonant_frequencies,
    solve_circuit,
)
from .orientations import CapExceededError, count_compatible

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Encoder(json.JSONEncoder):
    def default(self, o):
        if isinstance(o, complex):
            return [o.real, o.imag]
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, frozenset):
            return sorted(o)
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            return dataclasses.asdict(o)
        return super().default(o)


def _payload(args, **fields) -> dict:
    skip = {"func", "output", "pretty"}
    config = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"command": args.command, "config": config, **fields}


def _emit(payload: dict, args) -> None:
    text = json.dumps(
        payload, cls=_Encoder, indent=2 if args.pretty else None, sort_keys=True
    )
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_values(text: str | None) -> list[float] | None:
    if text is None:
        return None
    return [float(part) for part in text.split(",")]


def _scalar(raw) -> complex | float:
    if isinstance(raw, list):
        re, im = raw
        return complex(re, im)
    return float(raw)


def _require_boundary_values(g: Graph, values: Mapping[str, complex]) -> None:
    missing = sorted(v for v in g.boundary if v not in values)
    if missing:
        raise ValueError(f"graph file gives no boundary values for {missing}")


def _stacks_from_attrs(g: Graph, attrs: Mapping[EdgeId, dict]) -> dict:
    stacks = {}
    for e in g.edges:
        rec = attrs.get(e.id) or {}
        kwargs = {key: rec[key] for key in ("L", "C", "R") if rec.get(key) is not None}
        if not kwargs:
            raise ValueError(f"edge {e.id} carries no L, C, or R attribute")
        stacks[e.id] = ElementStack(**kwargs)
    return stacks


def _load_q(g: Graph, spec: str) -> QAssignment:
    if spec.startswith("sample:"):
        return sample_balanced_q(g, int(spec.split(":", 1)[1]))
    with open(spec) as fh:
        raw = json.load(fh)
    return QAssignment.from_values(g, {int(k): _scalar(v) for k, v in raw.items()})


# --- subcommands -------------------------------------------------------------


def _cmd_chromatic(args):
    g, _, _ = load_graph(args.graph)
    p = chromatic_polynomial(g)
    fields = {
        "coefficients": list(p.coeffs),
        "degree": p.degree,
        "polynomial": str(p),
    }
    if args.at is not None:
        fields["value_at"] = {"x": args.at, "value": p(args.at)}
    return _payload(args, **fields), EXIT_OK


def _cmd_predict(args):
    g, _, _ = load_graph(args.graph)
    rep = count_report(g, graph_id=args.graph)
    return _payload(args, report=rep), EXIT_OK


def _cmd_orient_count(args):
    g, _, _ = load_graph(args.graph)
    values = _parse_values(args.values)
    g_k, bmap = augment_k(g, args.k, values)
    count = count_compatible(g_k, bmap, cap=args.cap, workers=args.threads)
    try:
        exact = abs(chi_at_negative(g, args.k))
    except ValueError:
        exact = None
    match = exact is None or count == exact
    fields = {"count": count, "exact": exact, "match": match}
    return _payload(args, **fields), EXIT_OK if match else EXIT_NUMERIC


def _cmd_mc_chi(args):
    g, _, _ = load_graph(args.graph)
    est = estimate_chi(
        g,
        args.k,
        args.samples,
        args.seed,
        values=_parse_values(args.values),
        threads=args.threads,
    )
    fields = {"estimate": est}
    try:
        exact = abs(chi_at_negative(g, args.k))
    except ValueError:
        exact = None
    fields["exact"] = exact
    if exact is not None and est.stderr > 0:
        fields["z_score"] = (est.mean - exact) / est.stderr
    return _payload(args, **fields), EXIT_OK


def _cmd_dirichlet(args):
    g, bvals, _ = load_graph(args.graph)
    _require_boundary_values(g, bvals)
    with open(args.conductances) as fh:
        raw = json.load(fh)
    c = {int(k): _scalar(v) for k, v in raw.items()}
    sol = solve_dirichlet(g, c, bvals)
    fields = {
        "values": sol.values,
        "energies": {str(k): v for k, v in sol.energies.items()},
        "total_energy": sol.total_energy,
    }
    return _payload(args, **fields), EXIT_OK


def _cmd_hqd_check(args):
    with open(args.instance) as fh:
        doc = json.load(fh)
    g, _, _ = graph_from_json(doc["graph"])
    q = {int(k): _scalar(v) for k, v in doc["q"].items()}
    z = {str(k): _scalar(v) for k, v in doc["z"].items()}
    rep = residuals(g, q, z)
    qa = QAssignment.from_values(g, q)
    fields = {
        "balance": {v: abs(x) for v, x in rep.balance.items()},
        "realization": {v: abs(x) for v, x in rep.realization.items()},
        "max_balance": rep.max_balance,
        "max_realization": rep.max_realization,
        "balanced": qa.balanced,
    }
    code = EXIT_OK
    if args.tol is not None and rep.max_realization > args.tol:
        code = EXIT_NUMERIC
    return _payload(args, **fields), code


def _cmd_hqd_solve(args):
    g, bvals, _ = load_graph(args.graph)
    _require_boundary_values(g, bvals)
    qa = _load_q(g, args.q)
    sols = solve_realizations(
        g,
        qa,
        bvals,
        n_starts=args.starts,
        seed=args.seed,
        residual_tol=args.tol,
    )
    try:
        predicted = predicted_realizations(g)
    except (ValueError, RuntimeError):
        predicted = None
    match = predicted is None or len(sols) == predicted
    fields = {
        "solutions": [{"z": s.z, "residual": s.residual} for s in sols],
        "count": len(sols),
        "predicted": predicted,
        "match": match,
    }
    return _payload(args, **fields), EXIT_OK if match else EXIT_NUMERIC


def _cmd_circuit(args):
    g, bvals, attrs = load_graph(args.graph)
    _require_boundary_values(g, bvals)
    stacks = _stacks_from_attrs(g, attrs)
    drive = PhasorDrive(amplitudes=bvals, omega=args.omega)
    voltages, report = solve_circuit(g, stacks, drive)
    edges = {
        str(eid): {
            "S": ep.S,
            "real_power": ep.real_power,
            "reactive_power": ep.reactive_power,
            "current": ep.current,
            "voltage_drop": ep.voltage_drop,
            "impedance": ep.impedance,
        }
        for eid, ep in report.edges.items()
    }
    fields = {"voltages": voltages, "edges": edges}
    if args.hqd:
        qa, real, rep = reactive_power_as_hqd(g, stacks, drive)
        fields["hqd"] = {
            "q": {str(k): v for k, v in qa.values.items()},
            "balanced": qa.balanced,
            "realization_residual": real.residual,
            "max_balance": rep.max_balance,
        }
    return _payload(args, **fields), EXIT_OK


def _cmd_resonance(args):
    g, _, attrs = load_graph(args.graph)
    stacks = _stacks_from_attrs(g, attrs)
    rep = resonant_frequencies(g, stacks)
    fields = {
        "omegas": list(rep.omegas),
        "degenerate": rep.degenerate,
        "coefficients": list(rep.polynomial.coeffs),
        "zero_root_multiplicity": rep.zero_root_multiplicity,
        "normalization_power": rep.normalization_power,
        "verified": rep.verified,
        "roots": list(rep.roots),
    }
    bad = bool(rep.omegas) and not rep.verified
    return _payload(args, **fields), EXIT_NUMERIC if bad else EXIT_OK


def _cmd_cross_check(args):
    g, _, _ = load_graph(args.graph)
    if g.num_vertices > args.max_vertices:
        raise ValueError(
            f"{g.num_vertices} vertices exceeds --max-vertices {args.max_vertices}"
        )
    exact = abs(chi_at_negative(g, args.k))
    g_k, bmap = augment_k(g, args.k)
    count = count_compatible(g_k, bmap, cap=args.cap, workers=args.threads)
    est = estimate_chi(g, args.k, args.samples, args.seed, threads=args.threads)
    # the absolute slack covers integrands that are exactly constant, where
    # the sample standard error is zero and the mean is off only by rounding
    mc_ok = abs(est.mean - exact) <= args.sigma * est.stderr + 1e-9 * max(1.0, exact)
    z = (est.mean - exact) / est.stderr if est.stderr > 0 else None
    ok = count == exact and mc_ok
    fields = {
        "exact": exact,
        "orientation_count": count,
        "mc_estimate": est,
        "z_score": z,
        "agree": ok,
    }
    return _payload(args, **fields), EXIT_OK if ok else EXIT_NUMERIC


def _cmd_fixture(args):
    g, extras = fixture(args.name, k=args.k)
    doc = graph_to_json(g, extras.get("values"))
    doc["extras"] = {k: v for k, v in extras.items() if k != "values"}
    return _payload(args, graph=doc), EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the output")
    common.add_argument("--output", help="write the payload to a file")

    parser = _Parser(prog="chroma", description=__doc__)
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__} (kernels: {BACKEND})",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("chromatic", parents=[common], help="chromatic polynomial")
    p.add_argument("graph")
    p.add_argument("--at", type=int, help="also evaluate at this integer")
    p.set_defaults(func=_cmd_chromatic)

    p = subs.add_parser(
        "predict", parents=[common], help="realization count from the interior"
    )
    p.add_argument("graph")
    p.set_defaults(func=_cmd_predict)

    p = subs.add_parser(
        "orient-count",
        parents=[common],
        help="enumerate compatible orientations of the augmented graph",
    )
    p.add_argument("graph")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--values", help="comma separated boundary values")
    p.add_argument("--cap", type=int, default=30, help="log2 edge budget")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_orient_count)

    p = subs.add_parser(
        "mc-chi", parents=[common], help="Monte-Carlo estimate of |chi(-k)|"
    )
    p.add_argument("graph")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--values", help="comma separated boundary values")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_mc_chi)

    p = subs.add_parser(
        "dirichlet", parents=[common], help="harmonic extension of boundary data"
    )
    p.add_argument("graph")
    p.add_argument("--conductances", required=True, help="JSON file {edge id: value}")
    p.set_defaults(func=_cmd_dirichlet)

    p = subs.add_parser(
        "hqd-check", parents=[common], help="balance and realization residuals"
    )
    p.add_argument("instance", help="JSON file with graph, q, z")
    p.add_argument("--tol", type=float, help="fail (exit 2) above this residual")
    p.set_defaults(func=_cmd_hqd_check)

    p = subs.add_parser(
        "hqd-solve", parents=[common], help="find realizations by Newton search"
    )
    p.add_argument("graph", help="graph JSON with boundary values")
    p.add_argument("--q", required=True, help="q JSON file or sample:SEED")
    p.add_argument("--starts", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_hqd_solve)

    p = subs.add_parser(
        "circuit", parents=[common], help="solve an AC network at one frequency"
    )
    p.add_argument("graph", help="graph JSON with L/C/R edge attributes")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument(
        "--hqd",
        action="store_true",
        help="also read reactive powers as a quadratic drop",
    )
    p.set_defaults(func=_cmd_circuit)

    p = subs.add_parser(
        "resonance", parents=[common], help="resonant frequencies of an LC network"
    )
    p.add_argument("graph", help="graph JSON with L/C edge attributes")
    p.set_defaults(func=_cmd_resonance)

    p = subs.add_parser(
        "cross-check",
        parents=[common],
        help="exact vs orientation count vs Monte-Carlo",
    )
    p.add_argument("graph")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=4.0)
    p.add_argument("--cap", type=int, default=30)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-vertices", type=int, default=8)
    p.set_defaults(func=_cmd_cross_check)

    p = subs.add_parser(
        "fixture", parents=[common], help="emit a named example graph"
    )
    p.add_argument("name", choices=list_fixtures())
    p.add_argument("--k", type=int, help="boundary size parameter for star")
    p.set_defaults(func=_cmd_fixture)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, code = args.func(args)
    except (
        CapExceededError,
        DegenerateEdgeError,
        SingularSystemError,
        ArithmeticError,
        RuntimeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(payload, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
