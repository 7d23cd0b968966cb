"""Command line front end.

Every subcommand reads JSON, calls one library operation and writes a run
report: the command, SHA-256 digests of the inputs, the certificate and the
seed. Exit codes: 0 success, 2 bad input, 3 budget exceeded, 4 certificate
unmet or failed verification.
"""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import config, corpus, jsonio
from .barrier import mcp_certificate
from .errors import CertificateUnmet, InvalidInput, WeaverError
from .frames import (bessel_riesz_complement_check, bt_partition, feichtinger_partition,
                     fourier_frame_gram, gram_to_vectors, naimark_complement, r_epsilon_partition)
from .mixed import matrix_tuple
from .partition import Partition, brute_force_partition, greedy_partition
from .paving import (pave_bounded, pave_projection_delta, pave_projection_half, pave_reflection,
                     pave_selfadjoint)

TOL_PROFILES = {
    "default": {"CERT_SLACK": 1e-9, "PARSEVAL_TOL": 1e-8, "PROJECTION_TOL": 1e-8},
    "strict": {"CERT_SLACK": 1e-12, "PARSEVAL_TOL": 1e-10, "PROJECTION_TOL": 1e-10},
    "loose": {"CERT_SLACK": 1e-6, "PARSEVAL_TOL": 1e-6, "PROJECTION_TOL": 1e-6},
}
VERIFY_TOL = 1e-9


class Run:
    """Collects inputs, phase timings and the report for one invocation."""

    def __init__(self, command: str, seed: int | None):
        self.command = command
        self.seed = seed
        self.inputs: dict[str, str] = {}
        self.timings: dict[str, float] = {}

    def load(self, path: str):
        data, digest = jsonio.load(path)
        self.inputs[str(path)] = digest
        return data

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        yield
        self.timings[name] = round(1000.0 * (time.perf_counter() - t0), 3)

    def report(self, certificate: dict, extra: dict | None = None) -> dict:
        out = {"command": self.command, "inputs": dict(sorted(self.inputs.items())),
               "seed": self.seed, "certificate": certificate}
        if extra:
            out.update(extra)
        return out


# independent re-checks of emitted certificates, from the partition alone

def _np_top(A: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(A)[-1]) if A.size else 0.0


def _verify_bessel(V: np.ndarray, assignment, claimed) -> dict:
    part = Partition(len(claimed), tuple(assignment))
    got = [max(_np_top(V[b].T @ V[b].conj()), 0.0) if b else 0.0 for b in part.blocks()]
    err = max(abs(a - b) for a, b in zip(got, claimed))
    return {"recomputed": got, "max_error": err, "ok": err <= VERIFY_TOL}


def _verify_riesz(V: np.ndarray, assignment, claimed) -> dict:
    blocks = Partition(max(assignment) + 1, tuple(assignment)).nonempty_blocks()
    got = []
    for b in blocks:
        w = np.linalg.eigvalsh(V[b].conj() @ V[b].T)
        got.append([max(float(w[0]), 0.0), max(float(w[-1]), 0.0)])
    err = max(abs(x - y) for g, c in zip(got, claimed) for x, y in zip(g, c))
    return {"recomputed": got, "max_error": err, "ok": err <= VERIFY_TOL}


def _verify_paving(T: np.ndarray, assignment, claimed) -> dict:
    blocks = Partition(max(assignment) + 1, tuple(assignment)).nonempty_blocks()
    got = [float(np.linalg.norm(T[np.ix_(b, b)], 2)) for b in blocks]
    err = max(abs(a - b) for a, b in zip(got, claimed))
    return {"recomputed": got, "max_error": err, "ok": err <= VERIFY_TOL}


# subcommands

def _frame(run: Run, path: str) -> np.ndarray:
    return jsonio.vectors_from_json(run.load(path))


def cmd_weaver(args, run: Run):
    V = _frame(run, args.frame)
    with run.phase("greedy"):
        cert = greedy_partition(V, args.r, extend=not args.no_extend)
    d = cert.to_dict()
    extra = {}
    if args.verify:
        extra["verify"] = _verify_bessel(V, d["assignment"], d["per_block_bessel"])
    return d, cert.ok, extra


def cmd_oracle(args, run: Run):
    V = _frame(run, args.frame)
    with run.phase("brute_force"):
        cert = brute_force_partition(V, args.r)
    d = cert.to_dict()
    d["optimum"] = cert.achieved
    extra = {}
    if args.verify:
        extra["verify"] = _verify_bessel(V, d["assignment"], d["per_block_bessel"])
    return d, True, extra


def cmd_pave(args, run: Run):
    T = jsonio.matrix_from_json(run.load(args.matrix))
    with run.phase("pave"):
        if args.cls == "projection-half":
            cert = pave_projection_half(T, args.eps, args.r)
        elif args.cls == "projection-delta":
            cert = pave_projection_delta(T, args.delta)
        elif args.cls == "reflection":
            cert = pave_reflection(T, args.eps, args.r)
        elif args.cls == "selfadjoint":
            cert = pave_selfadjoint(T, args.eps, args.r)
        else:
            cert = pave_bounded(T, args.eps, args.r)
    d = cert.to_dict()
    extra = {}
    if args.verify:
        extra["verify"] = _verify_paving(T, d["assignment"], d["achieved"])
    return d, cert.ok, extra


def _riesz_command(args, run: Run, fn, V, *fargs):
    with run.phase("partition"):
        cert = fn(V, *fargs)
    d = cert.to_dict()
    extra = {}
    if args.verify:
        extra["verify"] = _verify_riesz(V, d["assignment"], d["per_block_riesz"])
    return d, cert.ok, extra


def cmd_feichtinger(args, run: Run):
    V = _frame(run, args.frame)
    return _riesz_command(args, run, feichtinger_partition, V, args.eps)


def cmd_repsilon(args, run: Run):
    V = _frame(run, args.frame)
    return _riesz_command(args, run, r_epsilon_partition, V, args.eps)


def cmd_bt(args, run: Run):
    T = jsonio.rect_matrix_from_json(run.load(args.matrix))
    with run.phase("partition"):
        cert = bt_partition(T, args.eps)
    d = cert.to_dict()
    extra = {}
    if args.verify:
        extra["verify"] = _verify_riesz(T.T, d["assignment"], d["per_block_riesz"])
    return d, cert.ok, extra


def cmd_complement(args, run: Run):
    V = _frame(run, args.frame)
    with run.phase("complement"):
        W = naimark_complement(V)
    norms = np.sum(np.abs(W) ** 2, axis=1)
    d = {"complement": jsonio.vectors_to_json(W), "squared_norms": norms.tolist(),
         "norm_identity_error": float(np.max(np.abs(norms + np.sum(np.abs(V) ** 2, axis=1) - 1.0)))}
    ok = d["norm_identity_error"] <= 1e-10
    if args.subset is not None:
        J = [int(x) for x in args.subset.split(",") if x.strip()]
        d["subset"] = J
        d["check"] = bessel_riesz_complement_check(V, J, args.delta)
        ok = ok and d["check"]
    extra = {}
    if args.verify:
        G = V.conj() @ V.T
        GW = W.conj() @ W.T
        err = float(np.max(np.abs(G + GW - np.eye(V.shape[0]))))
        extra["verify"] = {"gram_identity_error": err, "ok": err <= 1e-10}
    return d, ok, extra


def _intervals(text: str) -> list[tuple[float, float]]:
    vals = [float(x) for x in text.split(",") if x.strip()]
    if len(vals) % 2:
        raise InvalidInput("intervals need an even number of endpoints")
    return list(zip(vals[0::2], vals[1::2]))


def cmd_fourier(args, run: Run):
    if args.input:
        data = run.load(args.input)
        try:
            intervals, N = data["intervals"], int(data["N"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad Fourier JSON: {exc}") from exc
    else:
        if args.intervals is None or args.N is None:
            raise InvalidInput("give --intervals and --N, or an input file")
        intervals, N = _intervals(args.intervals), args.N
    with run.phase("gram"):
        G = fourier_frame_gram(intervals, N)
    d = {"N": N, "intervals": [list(map(float, iv)) for iv in intervals], "gram": jsonio.matrix_to_json(G)}
    extra = {}
    if args.partition:
        V = gram_to_vectors(G)
        with run.phase("partition"):
            cert = greedy_partition(V, args.partition, extend=False)
        blocks = cert.partition.nonempty_blocks()
        bounds = []
        for b in blocks:
            w = np.linalg.eigvalsh(G[np.ix_(b, b)])
            bounds.append([max(float(w[0]), 0.0), float(w[-1])])
        d["partition"] = cert.to_dict()
        d["per_block_riesz"] = bounds
    if args.verify:
        err = float(np.max(np.abs(np.diag(G).real - sum(b - a for a, b in intervals))))
        extra["verify"] = {"diagonal_error": err, "ok": err <= VERIFY_TOL}
    return d, True, extra


def cmd_certify_mcp(args, run: Run):
    data = run.load(args.matrices)
    try:
        mats = [jsonio.matrix_from_json(x) for x in data["matrices"]]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"bad matrix-tuple JSON: {exc}") from exc
    with run.phase("mcp"):
        cert = mcp_certificate(matrix_tuple(mats), strict=False, budget=args.budget)
    d = cert.to_dict()
    extra = {}
    if args.verify:
        from .mixed import mixed_char_poly
        roots = np.roots(mixed_char_poly(matrix_tuple(mats), budget=args.budget).coeffs[::-1])
        top = float(np.max(roots.real))
        # np.roots spreads a multiple root by about eps**(1/k), so the agreement is looser here
        err = abs(top - cert.achieved_maxroot)
        extra["verify"] = {"companion_maxroot": top, "max_error": err, "ok": err <= 1e-6}
    return d, cert.ok, extra


GENERATORS = {
    "parseval": lambda rng, a: jsonio.vectors_to_json(corpus.parseval_frame(rng, a.d, a.m)),
    "two-bases": lambda rng, a: jsonio.vectors_to_json(corpus.two_bases(rng, a.d)),
    "unit-frame": lambda rng, a: jsonio.vectors_to_json(corpus.unit_frame(rng, a.d, a.m)),
    "bessel": lambda rng, a: jsonio.vectors_to_json(corpus.unit_bessel_system(rng, a.d, a.m)),
    "hermitian": lambda rng, a: jsonio.matrix_to_json(corpus.zero_diagonal_hermitian(rng, a.d)),
    "half-projection": lambda rng, a: jsonio.matrix_to_json(corpus.half_projection(rng, a.d)),
    "small-projection": lambda rng, a: jsonio.matrix_to_json(
        corpus.small_diagonal_projection(rng, a.d, a.delta)),
    "mcp": lambda rng, a: {"matrices": [jsonio.matrix_to_json(A)
                                        for A in corpus.psd_tuple_summing_to_identity(rng, a.d, a.m)]},
}


def cmd_gen(args, run: Run):
    rng = np.random.default_rng(args.seed)
    return {"kind": args.kind, "d": args.d, "m": args.m,
            "instance": GENERATORS[args.kind](rng, args)}, True, {}


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand; defaults are filled in by main
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="64-bit seed for generated instances")
    common.add_argument("--budget", type=int,
                        help="determinant budget for mixed characteristic polynomials")
    common.add_argument("--tol-profile", choices=sorted(TOL_PROFILES))
    common.add_argument("--verify", action="store_true",
                        help="recompute achieved bounds from the partition and compare")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true",
                        help="include per-phase milliseconds (makes reports run-dependent)")

    p = argparse.ArgumentParser(prog="weaverkit", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("weaver", parents=[common], help="greedy Weaver partition of a frame")
    s.add_argument("frame")
    s.add_argument("--r", type=int, default=2)
    s.add_argument("--no-extend", action="store_true", help="do not complete to a Parseval frame first")
    s.set_defaults(func=cmd_weaver)

    s = sub.add_parser("oracle", parents=[common], help="exhaustive optimal partition")
    s.add_argument("frame")
    s.add_argument("--r", type=int, default=2)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("pave", parents=[common], help="pave a matrix of a given class")
    s.add_argument("matrix")
    s.add_argument("--class", dest="cls", required=True,
                   choices=["projection-half", "projection-delta", "reflection", "selfadjoint", "bounded"])
    s.add_argument("--eps", type=float, default=0.9)
    s.add_argument("--r", type=int, default=None, help="override the block count r(eps)")
    s.add_argument("--delta", type=float, default=None)
    s.set_defaults(func=cmd_pave)

    s = sub.add_parser("feichtinger", parents=[common], help="Riesz partition of a Bessel system")
    s.add_argument("frame")
    s.add_argument("--eps", type=float, default=None)
    s.set_defaults(func=cmd_feichtinger)

    s = sub.add_parser("repsilon", parents=[common], help="near-orthogonal partition of a unit-norm system")
    s.add_argument("frame")
    s.add_argument("--eps", type=float, required=True)
    s.set_defaults(func=cmd_repsilon)

    s = sub.add_parser("bt", parents=[common], help="restricted-invertibility coordinate blocks")
    s.add_argument("matrix")
    s.add_argument("--eps", type=float, required=True)
    s.set_defaults(func=cmd_bt)

    s = sub.add_parser("complement", parents=[common], help="Naimark complement of a Parseval frame")
    s.add_argument("frame")
    s.add_argument("--subset", default=None, help="comma separated indices J for the equivalence check")
    s.add_argument("--delta", type=float, default=0.0)
    s.set_defaults(func=cmd_complement)

    s = sub.add_parser("fourier", parents=[common], help="Gram matrix of a Fourier frame")
    s.add_argument("input", nargs="?", default=None)
    s.add_argument("--intervals", default=None, help="a1,b1,a2,b2,...")
    s.add_argument("--N", type=int, default=None)
    s.add_argument("--partition", type=int, default=0, help="also run a greedy partition into this many blocks")
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("certify-mcp", parents=[common], help="root bound of a mixed characteristic polynomial")
    s.add_argument("matrices")
    s.set_defaults(func=cmd_certify_mcp)

    s = sub.add_parser("gen", parents=[common], help="generate a random instance")
    s.add_argument("kind", choices=sorted(GENERATORS))
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--m", type=int, default=4)
    s.add_argument("--delta", type=float, default=0.2)
    s.set_defaults(func=cmd_gen)
    return p


def _apply_profile(name: str) -> None:
    for key, value in TOL_PROFILES[name].items():
        setattr(config, key, value)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


GLOBAL_DEFAULTS = {"seed": 0, "budget": config.POLARIZATION_BUDGET, "tol_profile": "default",
                   "verify": False, "out": None, "timings": False}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    _apply_profile(args.tol_profile)
    run = Run(args.command, args.seed)
    try:
        cert, ok, extra = args.func(args, run)
    except WeaverError as exc:
        report = run.report(None, {"error": {"type": type(exc).__name__, "message": str(exc),
                                             "required": getattr(exc, "required", None)}})
        _emit(jsonio.dumps(report), args.out)
        print(f"weaverkit: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.timings:
        extra["timings_ms"] = run.timings
    report = run.report(cert, extra)
    report["ok"] = bool(ok and extra.get("verify", {}).get("ok", True))
    _emit(jsonio.dumps(report), args.out)
    if not report["ok"]:
        print("weaverkit: " + ("verification failed" if ok else "certificate unmet"), file=sys.stderr)
        return CertificateUnmet.exit_code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
