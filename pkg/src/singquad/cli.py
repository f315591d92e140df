"""Command-line front end.

    singquad verify      --fixture sqrt1mx --grid 64:65536:2 --N 64
    singquad rates       --fixture sqrt1mx --p 1.5 --format csv
    singquad proofcheck  --fixture sqrt1mx_m1
    singquad extrapolate --fixture mixed --n 256
    singquad corpus

Exit status: 0 when every reported ``holds`` flag is true, 1 when some bound
fails, 2 for usage errors and unknown fixtures, 3 for hypothesis violations,
4 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import accel, analysis, oracle, proofcheck
from .errors import NumericalError, SingquadError
from .integrand import ClassTag, Integrand, corpus
from .riemann import SumScheme

SCHEMA = "singquad/1"
COMMANDS = ("verify", "rates", "proofcheck", "extrapolate", "corpus")
IDENTITY_NS = (8, 32, 128, 512)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_NUMERIC = 0, 1, 2, 3, 4

_SCHEME_FOR = {
    ClassTag.P1: (SumScheme.TRAPEZOID_ENDPOINT, 1.5),
    ClassTag.P1_ITEM2: (SumScheme.TRAPEZOID_ENDPOINT, 1.5),
    ClassTag.P2: (SumScheme.LEFT, 0.5),
    ClassTag.P3_RAW: (SumScheme.SYMMETRIC, -0.5),
}


class UnknownFixture(SingquadError):
    pass


@dataclass
class RunConfig:
    command: str
    grid: tuple = (64, 65536, 2)
    N: int = analysis.DEFAULT_N
    format: str = "json"
    fixture: Optional[str] = None
    integrand_file: Optional[str] = None
    cmax_factor: float = 1.25
    cmin_frac: float = 0.5
    tol: float = 1e-9
    p: Optional[float] = None
    n: int = 256
    out: Optional[str] = None

    def __post_init__(self):
        n_min, n_max, factor = self.grid
        if n_min < 2 or factor < 2 or n_max < n_min:
            raise ValueError("--grid needs MIN >= 2, FACTOR >= 2, MAX >= MIN")
        if self.N > n_max:
            raise ValueError("--N must not exceed the grid maximum")

    @property
    def grid_values(self) -> list[int]:
        return analysis.geometric_grid(*self.grid)


def _grid_arg(text: str) -> tuple:
    try:
        parts = tuple(int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--grid expects MIN:MAX:FACTOR, got {text!r}")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"--grid expects MIN:MAX:FACTOR, got {text!r}")
    return parts


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="singquad",
                                 description="Riemann-sum error bounds for endpoint-singular integrands")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--fixture", metavar="NAME")
        src.add_argument("--integrand", metavar="FILE.json", dest="integrand_file")
        sp.add_argument("--grid", type=_grid_arg, default=(64, 65536, 2),
                        metavar="MIN:MAX:FACTOR")
        sp.add_argument("--N", type=int, default=analysis.DEFAULT_N)
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--cmax-factor", type=float, default=1.25)
        sp.add_argument("--cmin-frac", type=float, default=0.5)
        sp.add_argument("--tol", type=float, default=1e-9)
        if name == "rates":
            sp.add_argument("--p", type=float)
        if name == "extrapolate":
            sp.add_argument("--n", type=int, default=256)
    return ap


def parse_config(argv=None) -> RunConfig:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        return RunConfig(ns.command, ns.grid, ns.N, ns.format, ns.fixture,
                         ns.integrand_file, ns.cmax_factor, ns.cmin_frac, ns.tol,
                         getattr(ns, "p", None), getattr(ns, "n", 256), ns.out)
    except ValueError as exc:
        ap.error(str(exc))


# -- fixtures ---------------------------------------------------------------

def select_integrands(cfg: RunConfig) -> tuple[list[Integrand], bool]:
    """Integrands to process and whether the user picked them explicitly."""
    if cfg.integrand_file:
        d = json.loads(Path(cfg.integrand_file).read_text())
        return [Integrand.from_dict(d)], True
    fixtures = corpus()
    if cfg.fixture:
        for f in fixtures:
            if f.name == cfg.fixture:
                return [f], True
        raise UnknownFixture(f"unknown fixture {cfg.fixture!r}")
    return fixtures, False


# -- commands ---------------------------------------------------------------

def _verify(f: Integrand, cfg: RunConfig) -> list[dict]:
    grid, N = cfg.grid_values, cfg.N
    tag = f.class_tag
    if tag is ClassTag.P2:
        reps = [analysis.verify_prop2(f, grid, N, cmax_factor=cfg.cmax_factor,
                                      cmin_frac=cfg.cmin_frac)]
    elif tag is ClassTag.P3_RAW:
        reps = [analysis.verify_prop3(f, grid, N)]
    else:
        reps = [analysis.verify_prop1(f, grid, N)]
        if tag is ClassTag.P1_ITEM2:
            reps.append(analysis.verify_prop1_item2(f, grid, N))
    return [r.to_dict() for r in reps]


def _rates(f: Integrand, cfg: RunConfig) -> list[dict]:
    scheme, p = _SCHEME_FOR[f.class_tag]
    if cfg.p is not None:
        p = cfg.p
    seq = analysis.compute_error_sequence(f, scheme, cfg.grid_values)
    rows = [{"n": n, "value": v, "scaled": n ** p * v} for n, v in seq.entries]
    return [{"kind": "rates", "integrand": f.name, "scheme": scheme.value, "p": p,
             "rows": rows}]


def _proofcheck(f: Integrand, cfg: RunConfig, explicit: bool) -> list[dict]:
    if f.class_tag is ClassTag.P1_ITEM2 and f.z0 == -1:
        out = []
        for n in IDENTITY_NS:
            rep = proofcheck.check_item2_identities(f, n, cfg.tol).to_dict()
            rep["kind"] = "identities"
            out.append(rep)
        pc = proofcheck.proof_constants(f, cfg.N, [n for n in cfg.grid_values if n >= cfg.N])
        out.append({"kind": "proof_constants", "integrand": f.name, "holds": True,
                    **pc.to_dict()})
        return out
    if f.class_tag is ClassTag.P2:
        cert = proofcheck.prop2_certificate(f, cfg.N, cmax_factor=cfg.cmax_factor,
                                            cmin_frac=cfg.cmin_frac)
        n_lo = max(cfg.N, math.ceil(2 / cert.delta))
        decs = [proofcheck.prop2_decomposition(f, n, cert).to_dict()
                for n in cfg.grid_values if n >= n_lo]
        return [{"kind": "prop2_certificate", "integrand": f.name,
                 "holds": all(d["holds"] for d in decs),
                 "certificate": cert.to_dict(), "decompositions": decs}]
    if explicit:
        proofcheck.symmetrize(f)  # raises the hypothesis error
    return []


def _extrapolate(f: Integrand, cfg: RunConfig, explicit: bool) -> list[dict]:
    if f.class_tag not in (ClassTag.P1, ClassTag.P1_ITEM2):
        if explicit:
            accel.extrapolate(f, cfg.n)
        return []
    est = accel.extrapolate(f, cfg.n).to_dict()
    exact = oracle.exact_integral(f).value
    est.update(kind="extrapolate", integrand=f.name, exact=exact,
               raw_error=exact - est["raw_sum"],
               corrected_error=exact - est["corrected_value"])
    return [est]


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute ``cfg``; returns the exit status and the report document."""
    doc = {"schema": SCHEMA, "command": cfg.command,
           "config": {"grid": list(cfg.grid), "N": cfg.N, "tol": cfg.tol,
                      "cmax_factor": cfg.cmax_factor, "cmin_frac": cfg.cmin_frac},
           "reports": []}
    try:
        fixtures, explicit = select_integrands(cfg)
        for f in fixtures:
            if cfg.command == "verify":
                doc["reports"] += _verify(f, cfg)
            elif cfg.command == "rates":
                doc["reports"] += _rates(f, cfg)
            elif cfg.command == "proofcheck":
                doc["reports"] += _proofcheck(f, cfg, explicit)
            elif cfg.command == "extrapolate":
                doc["reports"] += _extrapolate(f, cfg, explicit)
            else:
                doc["reports"].append(f.to_dict())
    except UnknownFixture as exc:
        doc["error"] = str(exc)
        return EXIT_USAGE, doc
    except NumericalError as exc:
        doc["error"] = str(exc)
        return EXIT_NUMERIC, doc
    except (SingquadError, ValueError, KeyError, OSError) as exc:
        doc["error"] = f"{type(exc).__name__}: {exc}"
        return EXIT_HYPOTHESIS, doc
    holds = all(r.get("holds", True) for r in doc["reports"])
    doc["holds"] = holds
    return (EXIT_OK if holds else EXIT_FAIL), doc


# -- output -----------------------------------------------------------------

def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if doc["command"] == "rates" and "error" not in doc:
        w.writerow(["integrand", "scheme", "p", "n", "value", "scaled"])
        for rep in doc["reports"]:
            for row in rep["rows"]:
                w.writerow([rep["integrand"], rep["scheme"], _fmt(rep["p"]),
                            row["n"], _fmt(row["value"]), _fmt(row["scaled"])])
        return buf.getvalue()
    w.writerow(["report", "field", "value"])
    for i, rep in enumerate(doc["reports"]):
        flat = []
        _flatten("", rep, flat)
        for key, val in flat:
            w.writerow([i, key, _fmt(val)])
    if "error" in doc:
        w.writerow(["", "error", doc["error"]])
    return buf.getvalue()


def to_text(doc: dict) -> str:
    lines = [f"{doc['schema']} {doc['command']}"]
    for rep in doc["reports"]:
        kind = rep.get("proposition") or rep.get("kind") or "integrand"
        name = rep.get("integrand") or rep.get("name")
        head = f"{kind:<18} {name:<16}"
        if "holds" in rep:
            head += " holds" if rep["holds"] else " FAILS"
        if "constants" in rep:
            head += "  " + "  ".join(
                f"{k}={v:.6g}" for k, v in rep["constants"].items() if isinstance(v, float))
        lines.append(head)
        if kind == "rates":
            for row in rep["rows"]:
                lines.append(f"  n={row['n']:<8d} value={row['value']: .10e}"
                             f"  n^p*value={row['scaled']: .10f}")
        elif kind == "extrapolate":
            lines.append(f"  raw_error={rep['raw_error']: .3e}"
                         f"  corrected_error={rep['corrected_error']: .3e}")
    if "error" in doc:
        lines.append(f"error: {doc['error']}")
    return "\n".join(lines) + "\n"


_WRITERS = {"json": to_json, "csv": to_csv, "text": to_text}


def main(argv=None) -> int:
    cfg = parse_config(argv)
    status, doc = run(cfg)
    text = _WRITERS[cfg.format](doc)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if "error" in doc:
        print(f"singquad: {doc['error']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
