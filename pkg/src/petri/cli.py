"""`petri` command line: ideals, audits, automorphisms, Betti tables, Tor characters.

Primary payloads are deterministic; timing and digests go to a JSON-lines
run manifest (default ``petri-manifest.jsonl``, disable with ``--no-manifest``).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import PetriError
from .fermat import FermatIdeal, build_ideal, dimension_audit, verify_vanishing
from .field import admissible, default_prime, is_prime
from .group import CandidateAutomorphism, enumerate_fermat_group
from .koszul import betti_table
from .linalg import ExactMatrix
from .quadrics import QuadricSystem, condition_equations, is_automorphism, load_matrix
from .tor import character_table_slice, tor_space

log = logging.getLogger("petri")


class UsageError(Exception):
    """Bad flags or input files; exit code 2."""


@dataclass
class RunManifest:
    command: str
    parameters: dict
    version: str = __version__
    started: str = ""
    seconds: float = 0.0
    digests: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"command": self.command, "parameters": self.parameters, "version": self.version,
                "started": self.started, "seconds": round(self.seconds, 6),
                "digests": self.digests}


# -- input helpers -------------------------------------------------------------

def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _prime(args, n: int | None, strict: bool) -> int:
    p = args.field if args.field is not None else (default_prime(n) if n else None)
    if p is None:
        raise UsageError("--field is required without --n")
    if not is_prime(p) or p == 2:
        raise UsageError(f"--field {p} must be an odd prime")
    if strict and n is not None and not admissible(n, p):
        raise UsageError(f"--field {p} is not admissible for n={n} (need p ≡ 1 mod n, p ∤ 6n²)")
    return p


def _need_n(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    return args.n


def _fermat_ideal(args, strict: bool = False) -> FermatIdeal:
    if getattr(args, "ideal", None):
        try:
            return FermatIdeal.from_json(_read_json(args.ideal))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed ideal file: {exc}") from exc
    n = _need_n(args)
    return build_ideal(n, _prime(args, n, strict))


def _quadric_system(args) -> QuadricSystem:
    if getattr(args, "quadrics", None):
        try:
            return QuadricSystem.from_json(_read_json(args.quadrics))
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed quadrics file: {exc}") from exc
    return QuadricSystem.from_ideal(_fermat_ideal(args))


# -- renderers -----------------------------------------------------------------

def _json(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _render(fmt: str, renderers: dict, command: str) -> str:
    if fmt not in renderers:
        raise UsageError(f"--format {fmt} is not supported by '{command}' "
                         f"(choose from {', '.join(renderers)})")
    return renderers[fmt]()


# -- commands ------------------------------------------------------------------

def cmd_ideal(args) -> tuple[str, dict]:
    ideal = _fermat_ideal(args)
    data = ideal.to_json()

    def text():
        lines = []
        for gen in data["generators"]:
            parts = []
            for t in gen["terms"]:
                mono = "*".join(f"w_{{{i},{j}}}" for i, j in t["mono"])
                parts.append(f"{t['coeff']}*{mono}")
            lines.append(f"{gen['family']}: " + " + ".join(parts))
        return "\n".join(lines) + "\n"

    def table():
        rows = []
        for k, gen in enumerate(data["generators"]):
            for t in gen["terms"]:
                rows.append([k, gen["family"], t["coeff"],
                             " ".join(f"{i},{j}" for i, j in t["mono"])])
        return _csv(["generator", "family", "coeff", "mono"], rows)

    out = _render(args.format, {"json": lambda: _json(data), "text": text, "csv": table}, "ideal")
    return out, {"n": ideal.n, "p": ideal.p}


def cmd_audit(args) -> tuple[str, dict]:
    n = _need_n(args)
    p = _prime(args, n, strict=False)
    ideal = build_ideal(n, p)
    report = dimension_audit(n, ideal)
    data = report.to_json()
    data["vanishing"] = verify_vanishing(ideal)
    if not data["vanishing"]:
        raise PetriError("a generator does not vanish on the curve")
    g = report.g
    lhs, rhs = 3 * (g - 1), report.minkowski_size - report.c_size

    def text():
        return (f"n={n} g={g}: |A+A|={report.minkowski_size} |C|={report.c_size}\n"
                f"certified, identity {lhs} - {rhs} = {report.identity_value}\n")

    out = _render(args.format, {"json": lambda: _json(data), "text": text,
                                "csv": lambda: _csv(list(data), [list(data.values())])}, "audit")
    return out, {"n": n, "p": p}


def cmd_aut_check(args) -> tuple[str, dict]:
    if not args.matrix:
        raise UsageError("--matrix is required")
    system = _quadric_system(args)
    raw = _read_json(args.matrix)
    try:
        sigma = load_matrix(raw.get("sigma", raw) if isinstance(raw, dict) else raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed matrix file: {exc}") from exc
    if sigma.p != system.p:
        raise UsageError(f"matrix is over GF({sigma.p}), quadrics over GF({system.p})")
    dec = is_automorphism(sigma, system)
    data = {"accepted": dec.accepted,
            "lambda": None if dec.lam is None else _matrix_json(dec.lam, system.p),
            "first_failure": dec.first_failure}

    def text():
        if dec.accepted:
            return "accepted\n"
        return f"rejected: image of quadric {dec.first_failure} leaves the span\n"

    out = _render(args.format, {"json": lambda: _json(data), "text": text}, "aut check")
    return out, {"p": system.p, "g": system.g}


def _matrix_json(M, p):
    return ExactMatrix.from_dense(M, p).to_json()


def cmd_aut_equations(args) -> tuple[str, dict]:
    system = _quadric_system(args)
    eqs = condition_equations(system)
    fmt = args.format or "text"
    out = _render(fmt, {"text": eqs.to_text, "json": lambda: _json(eqs.to_json())},
                  "aut equations")
    return out, {"p": system.p, "g": system.g, "r": system.r, "equations": len(eqs.equations)}


def cmd_aut_enumerate(args) -> tuple[str, dict]:
    n = _need_n(args)
    p = _prime(args, n, strict=True)
    system = QuadricSystem.from_ideal(build_ideal(n, p))
    group = enumerate_fermat_group(n, p, system)
    data = {"n": n, "p": p, "order": len(group), "elements": [e.to_json() for e in group]}

    def table():
        return _csv(["element", "perm", "a", "b"], [[k, *e.label] for k, e in enumerate(group)])

    out = _render(args.format, {"json": lambda: _json(data), "csv": table}, "aut enumerate")
    return out, {"n": n, "p": p, "order": len(group)}


def cmd_betti(args) -> tuple[str, dict]:
    ideal = _fermat_ideal(args)
    n, p = ideal.n, ideal.p
    method = args.method
    if method == "auto":
        method = "koszul" if ideal.g <= 10 else "artinian"
    table = betti_table(ideal, method=method, second_prime=args.second_field,
                        threads=args.threads)
    data = table.to_json()
    if args.second_field:
        data["second_prime"] = args.second_field

    def table_csv():
        return _csv(["i", "j", "value"], data["betti"])

    out = _render(args.format, {"json": lambda: _json(data),
                                "text": lambda: table.diagram() + "\n", "csv": table_csv}, "betti")
    return out, {"n": n, "p": p, "second_prime": args.second_field, "method": method}


def cmd_rep(args) -> tuple[str, dict]:
    if args.tor is None or args.degree is None:
        raise UsageError("--tor and --degree are required")
    if args.group:
        data = _read_json(args.group)
        group = [CandidateAutomorphism.from_json(e) for e in data["elements"]]
        n, p = data["n"], data["p"]
        ideal = build_ideal(n, p)
    else:
        n = _need_n(args)
        p = _prime(args, n, strict=True)
        ideal = build_ideal(n, p)
        group = enumerate_fermat_group(n, p, QuadricSystem.from_ideal(ideal))
    chars = character_table_slice(group, ideal, args.tor, args.degree)
    payload = {"i": args.tor, "j": args.degree, "dim": tor_space(ideal, args.tor, args.degree).dim,
               "characters": [{"element": k, "trace": t} for k, t in sorted(chars.items())]}
    out = _render(args.format, {
        "json": lambda: _json(payload),
        "csv": lambda: _csv(["element", "trace"],
                            [[c["element"], c["trace"]] for c in payload["characters"]])}, "rep")
    return out, {"n": n, "p": p, "i": args.tor, "j": args.degree}


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="Fermat exponent (n >= 6)")
    common.add_argument("--field", type=int, help="prime p (default: smallest admissible)")
    common.add_argument("--second-field", type=int, help="second prime for cross-checking")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=["json", "csv", "text"], default=None)
    common.add_argument("--manifest", default="petri-manifest.jsonl")
    common.add_argument("--no-manifest", action="store_true")

    parser = argparse.ArgumentParser(prog="petri", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"petri {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ideal", parents=[common], help="emit the canonical ideal generators")
    p.set_defaults(func=cmd_ideal)
    p = sub.add_parser("audit", parents=[common], help="certify the degree-2 dimension count")
    p.set_defaults(func=cmd_audit)

    aut = sub.add_parser("aut", help="automorphism checks").add_subparsers(
        dest="aut_command", required=True)
    for name, func in (("check", cmd_aut_check), ("equations", cmd_aut_equations)):
        a = aut.add_parser(name, parents=[common])
        a.add_argument("--ideal", help="ideal JSON")
        a.add_argument("--quadrics", help="list of symmetric matrices (JSON)")
        if name == "check":
            a.add_argument("--matrix", help="candidate matrix JSON")
        a.set_defaults(func=func, command=f"aut {name}")
    a = aut.add_parser("enumerate", parents=[common])
    a.set_defaults(func=cmd_aut_enumerate, command="aut enumerate")

    p = sub.add_parser("betti", parents=[common], help="graded Betti table")
    p.add_argument("--ideal", help="ideal JSON")
    p.add_argument("--method", choices=["auto", "koszul", "artinian"], default="auto")
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("rep", parents=[common], help="characters on a Tor strand")
    p.add_argument("--tor", type=int, help="homological degree i")
    p.add_argument("--degree", type=int, help="internal degree j")
    p.add_argument("--group", help="group JSON from 'aut enumerate'")
    p.set_defaults(func=cmd_rep)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("PETRI_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None and args.func is not cmd_aut_equations:
        args.format = "json"
    start = time.perf_counter()
    started = datetime.now(timezone.utc).isoformat()
    try:
        payload, params = args.func(args)
    except UsageError as exc:
        print(f"petri: error: {exc}", file=sys.stderr)
        return 2
    except PetriError as exc:
        print(json.dumps(exc.to_record()), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"petri: error: {exc}", file=sys.stderr)
        return 2

    if args.out:
        Path(args.out).write_text(payload)
        target = args.out
    else:
        try:
            sys.stdout.write(payload)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. `| head`); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        target = "stdout"
    if not args.no_manifest:
        params = {**params, "seed": args.seed, "format": args.format}
        m = RunManifest(args.command, params, started=started,
                        seconds=time.perf_counter() - start, digests={target: _digest(payload)})
        with open(args.manifest, "a") as fh:
            fh.write(json.dumps(m.to_json(), sort_keys=True) + "\n")
    log.info("%s done in %.2fs", args.command, time.perf_counter() - start)
    return 0


if __name__ == "__main__":
    sys.exit(main())
