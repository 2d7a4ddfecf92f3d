"""Command-line entry point: ``qudit-swap {bell,swap,scan-qubit,verify,conjecture}``.

Exit codes: 0 success (conjecture violations are findings, not errors),
2 usage, 3 invalid input state, 4 I/O failure, 5 verification regression.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .conjecture import ScanConfig, scan
from .gates import bell_basis, bell_gram, bell_state
from .oracle import verify
from .protocol import SchmidtCoeffs, qubit_scan, run_protocol
from .tensor_core import MAX_TOTAL_DIM, StateError

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STATE = 3
EXIT_IO = 4
EXIT_REGRESSION = 5

NORM_DRIFT_MAX = 1e-3
NORM_SILENT = 1e-12
VERIFY_TOL = 1e-9


class UsageError(Exception):
    pass


class InputStateError(Exception):
    pass


def parse_coeffs(text: str, d: int) -> SchmidtCoeffs:
    """Parse ``c0,c1,...``; entries may be complex such as ``0.5+0.1j``.

    Squared-norm drift up to ``NORM_DRIFT_MAX`` is renormalized (with a warning
    on stderr past ``NORM_SILENT``); larger drift is a usage error.
    """
    try:
        values = np.array([complex(tok.strip().replace(" ", "")) for tok in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"malformed coefficient list {text!r}: {exc}") from None
    if values.size != d:
        raise UsageError(f"expected {d} coefficients, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise UsageError("coefficients must be finite")
    nrm = float(np.sum(np.abs(values) ** 2))
    if nrm == 0.0:
        raise InputStateError("coefficient vector is zero")
    drift = abs(nrm - 1.0)
    if drift > NORM_DRIFT_MAX:
        raise UsageError(f"coefficients have squared norm {nrm!r}; drift above {NORM_DRIFT_MAX}")
    if drift > NORM_SILENT:
        print(f"warning: renormalizing coefficients (squared norm {nrm!r})", file=sys.stderr)
    return SchmidtCoeffs.from_values(values, normalize=True)


def document(command: str, args: dict, payload) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": {"name": command, "args": args},
        "created": datetime.now(timezone.utc).isoformat(),
        "payload": payload,
    }


def dumps_json(doc: dict) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def dumps_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(row[h]) for h in header])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return v


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc


def _check_dim(d: int) -> None:
    if d < 2:
        raise UsageError(f"--dim must be >= 2, got {d}")


# --- subcommands ------------------------------------------------------------


def cmd_bell(args) -> int:
    d = args.dim
    _check_dim(d)
    if (args.p is None) != (args.q is None):
        raise UsageError("--p and --q must be given together")
    if args.p is not None:
        if not (0 <= args.p < d and 0 <= args.q < d):
            raise UsageError(f"--p/--q must lie in [0, {d})")
        states = [((args.p, args.q), bell_state(d, args.p, args.q))]
    else:
        states = [(divmod(i, d), s) for i, s in enumerate(bell_basis(d))]
    gram_dev = float(np.max(np.abs(bell_gram(d) - np.eye(d * d))))
    payload = {
        "d": d,
        "states": [
            {"p": p, "q": q, "amplitudes": [[z.real, z.imag] for z in s.amps.tolist()]}
            for (p, q), s in states
        ],
        "gram_max_deviation": gram_dev,
    }
    if args.format == "json":
        text = dumps_json(document("bell", {"dim": d, "p": args.p, "q": args.q}, payload))
    elif args.format == "csv":
        rows = []
        for (p, q), s in states:
            for idx, z in enumerate(s.amps.tolist()):
                rows.append({"p": p, "q": q, "a": idx // d, "b": idx % d, "re": z.real, "im": z.imag})
        text = dumps_csv(["p", "q", "a", "b", "re", "im"], rows)
    else:
        lines = [f"generalized Bell states, d={d}"]
        for (p, q), s in states:
            terms = [f"({z.real:+.6f}{z.imag:+.6f}j)|{i // d}{i % d}>"
                     for i, z in enumerate(s.amps.tolist()) if abs(z) > 1e-15]
            lines.append(f"  Phi[{p},{q}] = " + " ".join(terms))
        lines.append(f"max |Gram - I| = {gram_dev:.3e}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_swap(args) -> int:
    d = args.dim
    _check_dim(d)
    xi = parse_coeffs(args.xi, d)
    eta = parse_coeffs(args.eta, d)
    report = run_protocol(xi, eta, tol=args.tol)
    if args.format == "json":
        text = dumps_json(document("swap", {"dim": d, "xi": args.xi, "eta": args.eta, "tol": args.tol},
                                   report.as_dict()))
    elif args.format == "csv":
        header = ["p", "q", "probability", "entanglement", "degenerate", "per_outcome_bound"]
        rows = [
            {**o.as_dict(), "per_outcome_bound": b}
            for o, b in zip(report.outcomes, report.bounds.per_outcome_bounds)
        ]
        text = dumps_csv(header, rows)
    else:
        b = report.bounds
        lines = [f"entanglement swapping, d={d}",
                 f"  E(xi) = {b.bound_xi:.6f}   E(eta) = {b.bound_eta:.6f}",
                 "   p  Pr(single q)   Pr(sum q)   E(post)"]
        for row in report.per_p():
            lines.append(f"  {row['p']:2d}  {row['probability']:.6f}   {row['probability_sum_q']:.6f}"
                         f"   {row['entanglement']:.6f}{'  degenerate' if row['degenerate'] else ''}")
        lines.append(f"  <E> = {b.avg_entanglement:.6f}")
        for name, ok in b.flags.items():
            lines.append(f"  {name:22s} {'ok' if ok else 'VIOLATED'}")
        lines.append(f"  conjecture: {b.conjecture_status}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


QUBIT_COLUMNS = ["x", "y", "pr_p0", "pr_p1", "ent_p0", "ent_p1",
                 "pr_p0_sum_q", "pr_p1_sum_q", "degenerate_p0", "degenerate_p1"]


def cmd_scan_qubit(args) -> int:
    if args.nx < 2 or args.ny < 2:
        raise UsageError("--nx and --ny must be >= 2")
    grid = qubit_scan(np.linspace(0.0, 1.0, args.nx), np.linspace(0.0, 1.0, args.ny))
    if args.format == "json":
        payload = {c: [] for c in QUBIT_COLUMNS}
        for row in grid.rows():
            for c in QUBIT_COLUMNS:
                payload[c].append(row[c])
        text = dumps_json(document("scan-qubit", {"nx": args.nx, "ny": args.ny}, payload))
    else:
        text = dumps_csv(QUBIT_COLUMNS, grid.rows())
    _emit(text, args.out)
    return EXIT_OK


def _verify_samples(d: int, n: int, seed: int):
    """Complex Gaussian coefficient vectors, so phases are exercised too."""
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        pair = []
        for _ in range(2):
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            pair.append(SchmidtCoeffs.from_values(v, normalize=True))
        yield pair


def cmd_verify(args) -> int:
    d = args.dim
    _check_dim(d)
    if d**4 > MAX_TOTAL_DIM:
        raise UsageError(f"--dim {d} gives a register of {d**4} amplitudes (cap {MAX_TOTAL_DIM})")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    t0 = time.perf_counter()
    pairs = list(_verify_samples(d, args.samples, args.seed))
    devs = np.array([verify(xi, eta).max_abs_deviation for xi, eta in pairs])
    worst = pairs[int(np.argmax(devs))]
    payload = {
        "d": d,
        "samples": args.samples,
        "seed": args.seed,
        "max_abs_deviation": float(devs.max()),
        "mean_abs_deviation": float(devs.mean()),
        "threshold": VERIFY_TOL,
        "passed": bool(devs.max() < VERIFY_TOL),
        "worst_xi": [[z.real, z.imag] for z in worst[0].coeffs.tolist()],
        "worst_eta": [[z.real, z.imag] for z in worst[1].coeffs.tolist()],
        "seconds": time.perf_counter() - t0,
    }
    if args.format == "json":
        text = dumps_json(document("verify", {"dim": d, "samples": args.samples, "seed": args.seed}, payload))
    elif args.format == "csv":
        text = dumps_csv(["d", "samples", "seed", "max_abs_deviation", "passed"], [payload])
    else:
        text = (f"oracle check d={d}: {args.samples} samples, max deviation "
                f"{payload['max_abs_deviation']:.3e} -> {'PASS' if payload['passed'] else 'FAIL'}\n")
    _emit(text, args.out)
    return EXIT_OK if payload["passed"] else EXIT_REGRESSION


def cmd_conjecture(args) -> int:
    _check_dim(args.dim)
    try:
        config = ScanConfig(
            d=args.dim,
            n_samples=args.samples,
            seed=args.seed,
            distribution=args.distribution,
            k=args.k,
            tol=args.tol,
            structured=True if args.structured else None,
        )
    except StateError as exc:
        raise UsageError(str(exc)) from None
    result = scan(config)
    payload = result.as_dict()
    if args.format == "json":
        text = dumps_json(document("conjecture", config.as_dict(), payload))
    elif args.format == "csv":
        rows = [{"source": v.source, "ratio": v.ratio,
                 "xi": " ".join(repr(x) for x in v.xi.moduli.tolist()),
                 "eta": " ".join(repr(x) for x in v.eta.moduli.tolist()),
                 "oracle_deviation": v.oracle_deviation,
                 "numerical_suspect": v.numerical_suspect} for v in result.violations]
        text = dumps_csv(["source", "ratio", "xi", "eta", "oracle_deviation", "numerical_suspect"], rows)
    else:
        lines = [f"conjecture scan d={config.d} ({config.distribution}, n={config.n_samples}, seed={config.seed})",
                 f"  evaluated {result.n_evaluated}, applicable {result.n_applicable}, backend {result.backend}",
                 f"  max ratio {result.max_ratio:.12f}",
                 f"  saturated {result.saturation_count}, violations {len(result.violations)}",
                 f"  proven bounds hold: {result.proven_bounds_hold}",
                 f"  status: {result.status}"]
        for v in sorted(result.violations, key=lambda v: -v.ratio)[:5]:
            lines.append(f"    ratio {v.ratio:.6f} [{v.source}] xi={np.round(v.xi.moduli, 6).tolist()} "
                         f"eta={np.round(v.eta.moduli, 6).tolist()}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser, default_format: str = "json") -> None:
    # added per subcommand: argparse parents share Action objects, so a
    # per-subcommand default set through a parent would leak into the others
    p.add_argument("--format", choices=("json", "csv", "pretty"), default=default_format)
    p.add_argument("--tol", type=float, default=1e-9, help="bound-check tolerance")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qudit-swap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bell", help="generalized Bell states")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("swap", help="run the swapping protocol")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--xi", required=True, help="comma-separated coefficients of pair A-C")
    p.add_argument("--eta", required=True, help="comma-separated coefficients of pair C'-B")
    _add_common(p)
    p.set_defaults(func=cmd_swap)

    p = sub.add_parser("scan-qubit", help="qubit (x, y) grid as CSV")
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--ny", type=int, default=101)
    _add_common(p, "csv")
    p.set_defaults(func=cmd_scan_qubit)

    p = sub.add_parser("verify", help="closed form vs brute-force statevector")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("conjecture", help="scan the improved-bound conjecture")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distribution", default="uniform-simplex",
                   choices=("uniform-simplex", "sparse-support", "structured-periodic"))
    p.add_argument("--k", type=int, default=None, help="support size for sparse-support")
    p.add_argument("--structured", action="store_true",
                   help="include the periodic family (default on for d >= 4)")
    _add_common(p)
    p.set_defaults(func=cmd_conjecture)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputStateError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
