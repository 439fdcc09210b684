"""Independence certificates for the winding orbit, prime scans and the
MAGMA-style symbol notation.

Notation.  A vector is written over the free Manin generators, each shown
as the path ``(gP)⊗{g0, g∞}`` for the fixed lift ``g`` of its point:
``<coeff>*{<cusp>, <cusp>}`` in weight 2 and
``<coeff>*<poly>*{<cusp>, <cusp>}`` in higher weight, terms joined by
``" + "``.  A coefficient of 1 is omitted.  The plain style writes Manin
symbols directly as ``<coeff>*[<poly>, (c:d)]``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import sympy

from . import __version__, linalg
from .algebra import cuspidal_winding, winding_orbit
from .geometry import Cusp, PathSymbol, path_to_coords, winding_vector
from .hecke import hecke_apply
from .manin import ResourceLimitError, SymbolSpace, act, build_space, lift_to_sl2z

__all__ = [
    "render_symbol_expression",
    "parse_symbol_expression",
    "IndependenceCertificate",
    "independence_certificate",
    "verify_certificate",
    "orbit_rows",
    "ScanRow",
    "scan_primes",
    "scan_csv",
    "magma_transcript",
]

_X, _Y = sympy.symbols("X Y")


# notation


def _format_coeff(c: Fraction) -> str:
    if c == 1:
        return ""
    text = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return text + "*"


def _format_poly(coeffs: Sequence[int]) -> str:
    n = len(coeffs) - 1
    expr = sum(int(c) * _X**i * _Y ** (n - i) for i, c in enumerate(coeffs))
    text = str(sympy.expand(expr)).replace("**", "^")
    terms = [t for t in coeffs if t]
    if len(terms) == 1 and not text.startswith("-"):
        return text
    return f"({text})"


def _monomial_text(i: int, n: int) -> str:
    parts = []
    if i:
        parts.append("X" if i == 1 else f"X^{i}")
    if n - i:
        parts.append("Y" if n - i == 1 else f"Y^{n - i}")
    return "*".join(parts) or "1"


def render_symbol_expression(space: SymbolSpace, v, style: str = "magma") -> str:
    """Text form of a full-coordinate vector (see module docstring)."""
    u = space.free_expansion(v)
    n = space.degree
    terms = []
    for j in reversed(range(len(u))):
        c = u[j]
        if not c:
            continue
        i, (pc, pd) = space.generator(space.free[j])
        if style == "plain":
            terms.append(f"{_format_coeff(c)}[{_monomial_text(i, n)}, ({pc}:{pd})]")
            continue
        g = lift_to_sl2z(pc, pd, space.level)
        a, b, cc, dd = g
        path = f"{{{Cusp(b, dd)}, {Cusp(a, cc)}}}"
        if n == 0:
            terms.append(f"{_format_coeff(c)}{path}")
        else:
            mono = [int(t == i) for t in range(n + 1)]
            terms.append(f"{_format_coeff(c)}{_format_poly(act(g, mono))}*{path}")
    return " + ".join(terms) if terms else "0"


def _split_terms(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if depth == 0 and text.startswith(" + ", i):
            out.append("".join(cur).strip())
            cur = []
            i += 3
            continue
        cur.append(ch)
        i += 1
    tail = "".join(cur).strip()
    if tail:
        out.append(tail)
    return out


_TERM = re.compile(
    r"^(?:(?P<coeff>-?\d+(?:/\d+)?)\*)?(?:(?P<poly>\([^{}\[\]]*\)|[-\w^*]+?)\*)?"
    r"(?:\{(?P<a>[^,{}]+),\s*(?P<b>[^,{}]+)\}|\[(?P<mono>[^,\[\]]+),\s*\((?P<c>-?\d+):(?P<d>-?\d+)\)\])$"
)


def _parse_poly(text: str | None, n: int) -> list[int]:
    if text is None:
        if n:
            raise ValueError("missing polynomial factor")
        return [1]
    expr = sympy.sympify(text.replace("^", "**"), locals={"X": _X, "Y": _Y})
    poly = sympy.Poly(expr, _X, _Y)
    out = [0] * (n + 1)
    for (ex, ey), c in poly.terms():
        if ex + ey != n:
            raise ValueError(f"term of degree {ex + ey} in weight {n + 2}")
        out[ex] = int(c)
    return out


def parse_symbol_expression(space: SymbolSpace, text: str) -> np.ndarray:
    """Full coordinates of an expression in either notation style."""
    total = np.zeros(space.dim_full, dtype=object)
    text = text.strip()
    if text in ("", "0"):
        return total
    n = space.degree
    for term in _split_terms(text):
        m = _TERM.match(term.replace(" ", "") if "[" in term else term)
        if m is None:
            raise ValueError(f"cannot parse term {term!r}")
        coeff = Fraction(m.group("coeff") or 1)
        if m.group("mono") is not None:
            i = _parse_poly(m.group("mono") if n else None, n).index(1) if n else 0
            g = space.generator_index(i, int(m.group("c")), int(m.group("d")))
            vec = space.gen_coords[g].astype(object)
        else:
            poly = _parse_poly(m.group("poly"), n)
            vec = path_to_coords(space, PathSymbol(tuple(poly), Cusp.parse(m.group("a")), Cusp.parse(m.group("b"))))
        if coeff.denominator == 1:
            total = total + int(coeff) * vec
        else:
            total = total + np.array([coeff * int(x) for x in vec], dtype=object)
    if all(Fraction(x).denominator == 1 for x in total):
        total = np.array([int(x) for x in total], dtype=object)
    return total


# certificates


def orbit_rows(space: SymbolSpace, D: int, frame: str = "cuspidal") -> list[list[int]]:
    """``T_1 e, ..., T_D e`` as integer rows.

    ``frame="cuspidal"`` uses the cuspidal winding element in cuspidal
    coordinates; ``frame="full"`` uses the raw class of z^(k-1)⊗{0, oo} in
    full coordinates.
    """
    if frame == "cuspidal":
        if space.dim_cuspidal == 0:
            return [[] for _ in range(D)]
        return winding_orbit(space, D)
    if frame == "full":
        e = winding_vector(space, space.k - 1).coords
        return [[int(x) for x in hecke_apply(space, n, e)] for n in range(1, D + 1)]
    raise ValueError(f"unknown frame {frame!r}")


@dataclass
class IndependenceCertificate:
    level: int
    weight: int
    D: int
    modulus: int | None
    rank: int
    verdict: str
    witness: dict
    frame: str
    input_hash: str
    tool_version: str = __version__

    def to_json(self) -> dict:
        return asdict(self)


def _hash_rows(level, weight, D, modulus, frame, rows) -> str:
    blob = json.dumps([level, weight, D, modulus, frame, rows], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _certify(level, weight, D, modulus, frame, rows) -> IndependenceCertificate:
    ncols = len(rows[0]) if rows else 0
    if ncols == 0:
        rank, pivots = 0, []
    else:
        ech = linalg.echelon_rank(rows, modulus, ncols=ncols)
        rank, pivots = ech.rank, ech.pivots
    if rank == D:
        minor = [[row[j] for j in pivots] for row in rows]
        det = linalg.det(minor, modulus)
        witness = {"kind": "minor", "columns": pivots, "determinant": str(det)}
        verdict = "independent"
    else:
        if ncols == 0:
            vec = [1] + [0] * (D - 1)
        elif modulus is None:
            vec = linalg.left_integer_kernel(rows, ncols=ncols)[0]
        else:
            vec = linalg.nullspace_mod(linalg.transpose(rows, ncols), modulus, ncols=D)[0]
        witness = {"kind": "dependence", "vector": [int(x) for x in vec]}
        verdict = "dependent"
    return IndependenceCertificate(
        level, weight, D, modulus, rank, verdict, witness, frame, _hash_rows(level, weight, D, modulus, frame, rows)
    )


def independence_certificate(
    space: SymbolSpace, D: int, modulus: int | None = None, frame: str = "cuspidal"
) -> IndependenceCertificate:
    """Verdict on ``T_1 e', ..., T_D e'`` over Q or F_l, with a checkable witness."""
    if D < 1:
        raise ValueError("D must be at least 1")
    if modulus is not None:
        linalg._check_modulus(modulus)
    rows = orbit_rows(space, D, frame)
    return _certify(space.level, space.weight, D, modulus, frame, rows)


def verify_certificate(cert: IndependenceCertificate, space: SymbolSpace | None = None) -> bool:
    """Re-check the witness against orbit rows recomputed from scratch."""
    if space is None:
        space = build_space(cert.level, cert.weight // 2)
    rows = orbit_rows(space, cert.D, cert.frame)
    if _hash_rows(cert.level, cert.weight, cert.D, cert.modulus, cert.frame, rows) != cert.input_hash:
        return False
    l = cert.modulus
    w = cert.witness
    if cert.verdict == "independent":
        minor = [[row[j] for j in w["columns"]] for row in rows]
        det = linalg.det(minor, l) if minor and minor[0] else 0
        return len(w["columns"]) == cert.D and det != 0 and str(det) == w["determinant"]
    vec = w["vector"]
    if not any(x % l if l else x for x in vec):
        return False
    ncols = len(rows[0]) if rows else 0
    for j in range(ncols):
        s = sum(c * row[j] for c, row in zip(vec, rows))
        if (s % l if l else s) != 0:
            return False
    return True


# scans


@dataclass(frozen=True)
class ScanRow:
    p: int
    rank: int | None
    verdict: str


def _scan_one(args) -> ScanRow:
    p, k, D, modulus, frame, max_generators = args
    try:
        space = build_space(p, k, max_generators=max_generators)
        if modulus is not None and p % modulus == 0:
            return ScanRow(p, None, "skipped")
        cert = independence_certificate(space, D, modulus, frame)
    except ResourceLimitError:
        return ScanRow(p, None, "skipped")
    return ScanRow(p, cert.rank, cert.verdict)


def _journal_key(k, D, modulus, frame) -> str:
    return f"{k},{D},{modulus if modulus is not None else 'Q'},{frame}"


def _read_journal(path: str, key: str) -> dict[int, ScanRow]:
    done: dict[int, ScanRow] = {}
    if not path or not os.path.exists(path):
        return done
    with open(path) as fh:
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != 7 or ",".join(parts[:4]) != key:
                continue
            p, rank, verdict = int(parts[4]), parts[5], parts[6]
            done[p] = ScanRow(p, int(rank) if rank else None, verdict)
    return done


def scan_primes(
    k: int,
    D: int,
    primes: Iterable[int],
    modulus: int | None = None,
    journal: str | None = None,
    jobs: int = 1,
    frame: str = "cuspidal",
    max_generators: int = 50_000,
) -> list[ScanRow]:
    """One row per prime, sorted by prime; resumable through an append-only journal."""
    plist = sorted({int(p) for p in primes if sympy.isprime(p)})
    key = _journal_key(k, D, modulus, frame)
    done = _read_journal(journal, key) if journal else {}
    todo = [p for p in plist if p not in done]
    tasks = [(p, k, D, modulus, frame, max_generators) for p in todo]
    results: dict[int, ScanRow] = {p: done[p] for p in plist if p in done}

    def record(row: ScanRow):
        results[row.p] = row
        if journal:
            with open(journal, "a") as fh:
                rank = "" if row.rank is None else row.rank
                fh.write(f"{key},{row.p},{rank},{row.verdict}\n")

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for row in pool.map(_scan_one, tasks):
                record(row)
    else:
        for t in tasks:
            record(_scan_one(t))
    return [results[p] for p in plist]


def scan_csv(rows: Sequence[ScanRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "rank", "verdict"])
    for r in rows:
        w.writerow([r.p, "" if r.rank is None else r.rank, r.verdict])
    return buf.getvalue()


def magma_transcript(space: SymbolSpace, upto: int = 5) -> list[tuple[str, np.ndarray]]:
    """``[("E", E), ("E*T2", T_2 E), ...]`` for the full-space class E of z^(k-1)⊗{0, oo}."""
    e = winding_vector(space, space.k - 1).coords
    out = [("E", e)]
    for n in range(2, upto + 1):
        out.append((f"E*T{n}", hecke_apply(space, n, e)))
    return out
