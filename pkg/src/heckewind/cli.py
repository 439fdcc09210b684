"""Command-line front end.

Data goes to stdout (or ``--output``), diagnostics to stderr.  Exit codes:
0 success, 2 invalid input, 3 numerical failure, 4 resource cap.

JSON schemas (``--format json``), one object per run:

- ``space``: ``level, weight, dim_full, dim_cuspidal, dim_plus, n_cusps, dim_forms``
- ``winding``: ``vectors`` (list of ``name, coords, expression``) and ``certificate``
- ``scan``: ``rows`` (list of ``p, rank, verdict``)
- ``lvalues``: ``systems`` (eigen-system records with ``central_value_sq``, ``afe_value``, ``epsilon``)
- ``petersson``: ``omega, residuals, pairs, c_max, max_residual, consistent, warnings``
- ``smain-soff``: ``reports`` (one per coefficient vector, with ``dominant``)
- ``equiv``: ``reports`` (one per ``l``, with ``cond1..cond3`` and ``agree``)
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_RESOURCE = 0, 2, 3, 4

_FORMATS = {
    "space": ("json", "plain", "csv"),
    "winding": ("json", "plain", "magma"),
    "scan": ("csv", "json", "plain"),
    "lvalues": ("json", "plain", "csv"),
    "petersson": ("json", "plain"),
    "smain-soff": ("json", "plain", "csv"),
    "equiv": ("json", "plain", "csv"),
}


class _UsageError(ValueError):
    pass


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _weight(text: str) -> int:
    v = _positive(text)
    if v % 2:
        raise argparse.ArgumentTypeError(f"weight must be even: {v}")
    return v


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}") from None
    if not sep or a < 2 or b < a:
        raise argparse.ArgumentTypeError(f"expected lo..hi with 2 <= lo <= hi, got {text!r}")
    return a, b


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heckewind", description="Winding-element Hecke orbits and central L-values.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, level=True, weight=True):
        if level:
            p.add_argument("--level", type=_positive, required=True, help="prime level p")
        if weight:
            p.add_argument("--weight", type=_weight, required=True, help="even weight 2k")
        p.add_argument("--format", default=None, help="output format")
        p.add_argument("--output", default=None, help="write data here instead of stdout")
        p.add_argument("--max-generators", type=_positive, default=50_000)
        return p

    common(sub.add_parser("space", help="dimensions of the symbol spaces"))

    p = common(sub.add_parser("winding", help="winding vector, its Hecke images and a certificate"))
    p.add_argument("--hecke-upto", type=_positive, default=5)
    p.add_argument("--d", type=_positive, default=None, help="orbit length for the certificate")
    p.add_argument("--modulus", type=_positive, default=None)
    p.add_argument("--frame", choices=("cuspidal", "full"), default="cuspidal")

    p = common(sub.add_parser("scan", help="independence verdict for each prime in a range"), level=False)
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--primes", type=_range, required=True, help="inclusive range lo..hi")
    p.add_argument("--modulus", type=_positive, default=None)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--journal", default=None, help="append-only progress file for resuming")
    p.add_argument("--frame", choices=("cuspidal", "full"), default="cuspidal")

    p = common(sub.add_parser("lvalues", help="eigen-systems and central values"))
    p.add_argument("--cutoff", type=_positive, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("petersson", help="harmonic weights from the Petersson formula"))
    p.add_argument("--c-max", type=_positive, default=None)
    p.add_argument("--pairs", type=_positive, default=8, help="use (r, s) in {1..n}^2")
    p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("smain-soff", help="diagonal against Kloosterman part"))
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--alpha", type=_float_list, default=None, help="coefficients; default all unit vectors")
    p.add_argument("--c-max", type=_positive, default=None)

    p = common(sub.add_parser("equiv", help="mod-l equivalence of the three conditions"))
    p.add_argument("--l", type=_int_list, required=True, help="comma-separated primes")
    p.add_argument("--d", type=_positive, required=True)
    return parser


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, Fraction):
        return str(x)
    return x


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _table(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines += [",".join("" if v is None else str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _space(args):
    from .manin import build_space

    return build_space(args.level, args.weight // 2, max_generators=args.max_generators)


def _cmd_space(args, fmt):
    from .manin import dimension_cusp_forms

    info = _space(args).summary()
    info["dim_forms"] = dimension_cusp_forms(args.level, args.weight)
    if fmt == "json":
        return _dump(info)
    if fmt == "csv":
        keys = sorted(info)
        return _table(keys, [[info[k] for k in keys]])
    return "".join(f"{k}: {info[k]}\n" for k in sorted(info))


def _cmd_winding(args, fmt):
    from .experiments import independence_certificate, magma_transcript, render_symbol_expression

    space = _space(args)
    transcript = magma_transcript(space, args.hecke_upto)
    if fmt == "magma":
        return "".join(render_symbol_expression(space, v, "magma") + "\n" for _, v in transcript)
    D = args.d or args.hecke_upto
    cert = independence_certificate(space, D, args.modulus, args.frame)
    vectors = [
        {"name": name, "coords": [int(x) for x in v], "expression": render_symbol_expression(space, v, "plain")}
        for name, v in transcript
    ]
    if fmt == "json":
        return _dump({"vectors": vectors, "certificate": cert.to_json()})
    out = [f"{v['name']} = {v['expression']}" for v in vectors]
    out.append(f"rank {cert.rank} of {D} ({cert.verdict}); witness {json.dumps(cert.witness)}")
    return "\n".join(out) + "\n"


def _cmd_scan(args, fmt):
    from sympy import primerange

    from .experiments import scan_csv, scan_primes

    lo, hi = args.primes
    rows = scan_primes(
        args.weight // 2,
        args.d,
        primerange(lo, hi + 1),
        args.modulus,
        args.journal,
        args.jobs,
        args.frame,
        args.max_generators,
    )
    if fmt == "json":
        return _dump({"rows": [{"p": r.p, "rank": r.rank, "verdict": r.verdict} for r in rows]})
    if fmt == "plain":
        return "".join(f"{r.p:>6} {'' if r.rank is None else r.rank:>4} {r.verdict}\n" for r in rows)
    return scan_csv(rows)


def _cmd_lvalues(args, fmt):
    from .analytic import afe_central_value, central_value_sq, default_cutoff, eigen_systems

    space = _space(args)
    cutoff = args.cutoff or default_cutoff(args.level, args.weight // 2)
    records = []
    for f in eigen_systems(space, max(cutoff, 64), seed=args.seed):
        cv = central_value_sq(f, cutoff)
        afe = afe_central_value(f)
        rec = f.to_json()
        rec.update(
            central_value_sq=cv.value,
            tail_estimate=cv.tail_estimate,
            cutoff=cv.cutoff,
            afe_value=afe.value,
            epsilon=afe.epsilon,
            afe_discrepancy=afe.discrepancy,
        )
        records.append(rec)
    if fmt == "json":
        return _dump({"level": args.level, "weight": args.weight, "systems": records})
    rows = [[r["index"], r["a"][1] if len(r["a"]) > 1 else "", r["epsilon"], repr(r["central_value_sq"]), repr(r["afe_value"])] for r in records]
    if fmt == "csv":
        return _table(["index", "a2", "epsilon", "central_value_sq", "afe_value"], rows)
    return "".join(f"f{r[0]}: a2={r[1]:+.6f} eps={r[2]:+d} |L|^2={float(r[3]):.12g} L={float(r[4]):.12g}\n" for r in rows)


def _cmd_petersson(args, fmt):
    from .analytic import eigen_systems, petersson_fit

    space = _space(args)
    systems = eigen_systems(space, max(64, args.pairs), seed=args.seed)
    pairs = [(r, s) for r in range(1, args.pairs + 1) for s in range(1, args.pairs + 1)]
    fit = petersson_fit(systems, pairs, args.c_max)
    if fmt == "json":
        return _dump(fit.to_json())
    lines = [f"omega_{i + 1} = {w:.12g}" for i, w in enumerate(fit.omega)]
    lines.append(f"max residual {fit.max_residual:.3g} at c <= {fit.c_max}")
    lines += [f"warning: {w}" for w in fit.warnings]
    return "\n".join(lines) + "\n"


def _cmd_smain_soff(args, fmt):
    from .analytic import smain_soff_eval

    k = args.weight // 2
    if args.alpha is None:
        alphas = [[1.0 if i == j else 0.0 for i in range(args.d)] for j in range(args.d)]
    elif len(args.alpha) != args.d:
        raise _UsageError(f"--alpha needs {args.d} entries")
    else:
        alphas = [args.alpha]
    reports = [smain_soff_eval(args.level, k, args.d, a, args.c_max) for a in alphas]
    for r in reports:
        for w in r.warnings:
            print(f"warning: {w}", file=sys.stderr)
    if fmt == "json":
        return _dump({"reports": [r.to_json() for r in reports]})
    rows = [[json.dumps(r.alpha), repr(r.s_main), repr(r.s_off), repr(r.tail_bound), r.dominant] for r in reports]
    if fmt == "csv":
        return _table(["alpha", "s_main", "s_off", "tail_bound", "dominant"], [[f'"{r[0]}"'] + r[1:] for r in rows])
    return "".join(
        f"alpha={r.alpha} S_main={r.s_main:.6g} S_off={r.s_off:.6g} tail<={r.tail_bound:.3g} dominant={r.dominant}\n"
        for r in reports
    )


def _cmd_equiv(args, fmt):
    from .algebra import equivalence_report

    space = _space(args)
    reports = [equivalence_report(space, l, args.d).to_json() for l in args.l]
    if fmt == "json":
        return _dump({"reports": reports})
    keys = ["level", "weight", "l", "D", "cond1", "cond2", "cond3", "agree"]
    if fmt == "csv":
        return _table(keys, [[r[k] for k in keys] for r in reports])
    return "".join(" ".join(f"{k}={r[k]}" for k in keys) + "\n" for r in reports)


_COMMANDS = {
    "space": _cmd_space,
    "winding": _cmd_winding,
    "scan": _cmd_scan,
    "lvalues": _cmd_lvalues,
    "petersson": _cmd_petersson,
    "smain-soff": _cmd_smain_soff,
    "equiv": _cmd_equiv,
}


def _validate(args) -> str:
    allowed = _FORMATS[args.command]
    fmt = args.format or allowed[0]
    if fmt not in allowed:
        raise _UsageError(f"{args.command} supports --format {', '.join(allowed)}")
    level = getattr(args, "level", None)
    if level is not None:
        from sympy import isprime

        if not isprime(level):
            raise _UsageError(f"level {level} is not prime")
    modulus = getattr(args, "modulus", None)
    if modulus is not None:
        from sympy import isprime

        if not isprime(modulus):
            raise _UsageError(f"modulus {modulus} is not prime")
    return fmt


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    old_err = sys.stderr
    sys.stderr = stderr
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    finally:
        sys.stderr = old_err

    from .analytic.special import NumericalError
    from .manin import ResourceLimitError

    old_err, sys.stderr = sys.stderr, stderr
    try:
        fmt = _validate(args)
        text = _COMMANDS[args.command](args, fmt)
    except ResourceLimitError as exc:
        print(f"heckewind: resource limit: {exc}", file=stderr)
        return EXIT_RESOURCE
    except NumericalError as exc:
        print(f"heckewind: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"heckewind: invalid input: {exc}", file=stderr)
        return EXIT_INPUT
    finally:
        sys.stderr = old_err
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
