"""Command-line front end.

Results go to stdout as a single JSON line, diagnostics to stderr. Exit
status is 0 on success, 2 for bad input and 3 when an exhaustive solver would
exceed its size cap.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import LOG_BASES, ConditionalMatrix, conditional_entropy, entropy, hsum, log_scale, make_distribution
from .errors import SizeCapExceeded, VoiError
from .greedy import DEFAULT_EXACT_TAIL, greedy_metric_bound
from .reduction import exact_reduce, greedy_reduce
from .transport import DEFAULT_SIZE_CAP, closed_form_2x2, exact_metric, exact_n_by_2

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAP = 3


class InputError(Exception):
    pass


def read_distribution_file(path: str | Path, renormalize: bool = False) -> np.ndarray:
    """Parse a JSON ``{"p": [...]}`` document or one number per line.

    Text after ``#`` is ignored in the plain format. With ``renormalize`` the
    vector is divided by its sum before validation, for data rounded to a few decimals.
    """
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    try:
        if stripped.startswith("{"):
            doc = json.loads(text)
            if not isinstance(doc, dict) or not isinstance(doc.get("p"), list):
                raise InputError(f"{path}: JSON distribution needs a list under \"p\"")
            values = [float(x) for x in doc["p"]]
        else:
            values = []
            for line in text.splitlines():
                line = line.split("#", 1)[0].strip()
                if line:
                    values.append(float(line))
    except (ValueError, TypeError) as e:
        raise InputError(f"{path}: {e}") from e
    a = np.asarray(values, dtype=float)
    if renormalize and a.size and np.all(np.isfinite(a)) and a.sum() > 0:
        a = a / a.sum()
    return make_distribution(a).p


def _round(x: Any) -> Any:
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return _round(x.tolist())
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def _emit(record: dict) -> None:
    sys.stdout.write(json.dumps(_round(record)) + "\n")


def _scale_arg(base: str) -> str | float:
    return base if base in LOG_BASES else float(base)


def run_distance(args: argparse.Namespace) -> int:
    phi = read_distribution_file(args.phi, args.renormalize)
    psi = read_distribution_file(args.psi, args.renormalize)
    base = _scale_arg(args.log_base)
    s = log_scale(base)
    rec: dict[str, Any] = {"method": args.method, "n": int(phi.size), "m": int(psi.size), "log_base": args.log_base}

    if args.method == "greedy":
        tr = greedy_metric_bound(phi, psi, exact_tail=args.exact_tail, base=base)
        rec.update(V_phi_psi=tr.V_bound, V_psi_phi=tr.U_bound, d=tr.d_bound, exact=False)
        if args.trace:
            rec["trace"] = {
                "swapped": tr.swapped,
                "psi_order": tr.psi_order,
                "rounds": [
                    {
                        "s": r.s,
                        "n_s": r.n_s,
                        "m_s": r.m_s,
                        "method": r.method,
                        "assignments": r.assignments,
                        "K": r.K,
                        "alpha": r.alpha,
                        "c": r.c,
                        "V": r.V,
                        "U": r.U,
                    }
                    for r in tr.rounds
                ],
            }
        _emit(rec)
        return EXIT_OK

    if args.method == "exact":
        res = exact_metric(phi, psi, size_cap=args.size_cap, base=base)
        v, P = res.V_phi_psi / s, res.argmin_P
    elif args.method == "closed2x2":
        v, P = closed_form_2x2(phi, psi)
    else:
        v, P = exact_n_by_2(phi, psi, size_cap=args.size_cap)
    v = conditional_entropy(phi, P)
    ha, hb = hsum(phi), hsum(psi)
    u = max(v + ha - hb, 0.0)
    rec.update(W=(v + ha) * s, V_phi_psi=v * s, V_psi_phi=u * s, d=(v + u) * s, exact=True)
    if args.trace:
        rec["trace"] = {"argmin_joint": phi[:, None] * ConditionalMatrix(P).rows}
    _emit(rec)
    return EXIT_OK


def run_reduce(args: argparse.Namespace) -> int:
    phi = read_distribution_file(args.phi, args.renormalize)
    base = _scale_arg(args.log_base)
    if args.method == "greedy":
        agg = greedy_reduce(phi, args.m, presort=args.presort)
    else:
        agg = exact_reduce(phi, args.m, size_cap=args.size_cap)
    rec: dict[str, Any] = {
        "method": args.method,
        "m": args.m,
        "partition": agg.partition,
        "psi_a": agg.psi_a.p,
        "entropy": agg.entropy(base),
        "distance": agg.distance(base),
    }
    if args.method == "greedy":
        rho = 0.5 * float(np.abs(agg.psi_a.p - 1.0 / args.m).sum())
        bound = 0.25 * args.m * float(phi.max())
        rec["bound_thm9"] = {"rho": rho, "bound": bound, "ok": bool(rho <= bound + 1e-12)}
    _emit(rec)
    return EXIT_OK


def run_entropy(args: argparse.Namespace) -> int:
    phi = read_distribution_file(args.phi, args.renormalize)
    _emit({"n": int(phi.size), "log_base": args.log_base, "entropy": entropy(phi, _scale_arg(args.log_base))})
    return EXIT_OK


def run_gen(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise InputError(f"n must be at least 1, got {args.n}")
    rng = np.random.default_rng(args.seed)
    if args.style == "exp_stretch":
        w = np.exp(rng.uniform(0.0, 1.0, size=args.n))
        p = w / w.sum()
    else:
        p = rng.dirichlet(np.ones(args.n))
    doc = json.dumps({"p": p.tolist(), "name": f"{args.style} n={args.n} seed={args.seed}"}) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(doc)
    else:
        Path(args.out).write_text(doc, encoding="utf-8")
    return EXIT_OK


def _base_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--log-base", default="e", help="e, 2, 10 or any positive number != 1 (default e)")
    p.add_argument("--renormalize", action="store_true", help="divide input vectors by their sum before validation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voimetric", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distance", help="coupling distance between two distributions")
    d.add_argument("--method", choices=["exact", "greedy", "closed2x2", "n_by_2"], default="exact")
    d.add_argument("--phi", required=True)
    d.add_argument("--psi", required=True)
    d.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP)
    d.add_argument("--exact-tail", type=int, default=DEFAULT_EXACT_TAIL)
    d.add_argument("--trace", action="store_true")
    _base_flag(d)
    d.set_defaults(func=run_distance)

    r = sub.add_parser("reduce", help="aggregate a distribution onto m labels")
    r.add_argument("--method", choices=["exact", "greedy"], default="greedy")
    r.add_argument("--phi", required=True)
    r.add_argument("--m", type=int, required=True)
    r.add_argument("--presort", action="store_true")
    r.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP)
    _base_flag(r)
    r.set_defaults(func=run_reduce)

    e = sub.add_parser("entropy", help="Shannon entropy of a distribution")
    e.add_argument("--phi", required=True)
    _base_flag(e)
    e.set_defaults(func=run_entropy)

    g = sub.add_parser("gen", help="generate a random distribution file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--style", choices=["exp_stretch", "uniform_simplex"], default="exp_stretch")
    g.add_argument("--out", default=None, help="output path (stdout if omitted)")
    g.set_defaults(func=run_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (VoiError, InputError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
