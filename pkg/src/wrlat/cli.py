"""Batch command-line front end.

Subcommands: count, summatory, series, verify, csl (index | scan), asympt,
constants, highdim.  Output is a single-header CSV or JSON with stable key
order, streamed to stdout by default (``--out path`` writes a file).  Counting
subcommands accept ``--workers``; the merge step adds exact integer tables,
so output bytes are identical for any worker count.  Exit codes: 0 success,
1 verification mismatch, 2 usage error.

Lattice arguments accept the presets ``square`` (identity Gram) and
``triangle`` (Gram [[2,1],[1,2]]) or an explicit Gram ``g11,g12,g22`` whose
entries use the syntax ``a+b*sqrt(m)`` with rationals ``p/q``.  Pass
``--radicand m`` to pin the radicand a Gram text is allowed to use.
Coincidence scans enumerate primitive lattice-coordinate mirror axes only;
mirrors with irrational axes are out of scope by design, so an empty scan of
an irrational lattice is evidence, not proof, of absence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import asympt as asy
from . import csl as cslmod
from . import hnf
from . import series as ser
from .highdim import (
    OrthoSpec,
    fullsign_lattice,
    is_well_rounded_d,
    shortest_vectors,
    subset_sign_lattice,
)
from .lattice import (
    GramMatrix2,
    PlanarLattice,
    lagrange_reduce,
    parse_gram,
    square_lattice,
    triangle_lattice,
)
from .quadratic import QuadValue

__all__ = ["RunConfig", "run", "main"]


@dataclass
class RunConfig:
    """Parsed invocation: subcommand plus its validated options."""

    subcommand: str
    options: dict = field(default_factory=dict)


def _lattice_from_spec(text: str, radicand: Optional[int]) -> PlanarLattice:
    if text == "square":
        return square_lattice()
    if text == "triangle":
        return triangle_lattice()
    gram = parse_gram(text, radicand)
    return PlanarLattice(gram, label=text)


def _emit(lines, out: str) -> None:
    payload = "\n".join(lines) + "\n"
    if out == "-":
        sys.stdout.write(payload)
    else:
        with open(out, "w") as fh:
            fh.write(payload)


def _csv_float(v: float) -> str:
    return repr(float(v))


def _diag_irrational_ratio(lattice: PlanarLattice) -> Optional[QuadValue]:
    """Reduced-diagonal ratio g22/g11 when the lattice is rectangular with an
    irrational aspect; None otherwise."""
    _, red = lagrange_reduce(lattice.gram)
    if red.g12.sign() != 0:
        return None
    ratio = red.g22 / red.g11
    return None if ratio.is_rational else ratio


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_count(opt) -> int:
    lattice = _lattice_from_spec(opt["lattice"], opt.get("radicand"))
    table = hnf.count_table(
        lattice, opt["max_n"], opt["predicate"], workers=opt["workers"]
    )
    if opt["format"] == "json":
        obj = {
            "lattice": opt["lattice"],
            "predicate": table.predicate,
            "max_n": table.nmax,
            "counts": [[n, int(table.counts[n])] for n in range(1, table.nmax + 1)],
        }
        _emit([json.dumps(obj, indent=2)], opt["out"])
    else:
        lines = ["n,count"]
        lines += [f"{n},{int(table.counts[n])}" for n in range(1, table.nmax + 1)]
        _emit(lines, opt["out"])
    return 0


def _resolve_model(name: str, lattice_key: str, c_value: Optional[float],
                   counts: Optional[hnf.CountTable] = None) -> asy.AsymptoticModel:
    if name == "thm3":
        return asy.model_thm3_square()
    if name == "thm4":
        if lattice_key == "triangle":
            if c_value is None:
                fit = asy.estimate_laurent_constant(counts, asy.triangle_slope())
                c_value = fit.constant
            return asy.model_triangle_two_term(c_value)
        if c_value is None:
            c_value = asy.compute_c_square().value
        return asy.model_thm4_square(c_value)
    if name.startswith("thm5:"):
        return asy.model_two_reflection(int(name.split(":", 1)[1]))
    raise ValueError(f"unknown model {name!r}")


def _report_lines(report: hnf.SummatoryReport) -> list[str]:
    lines = ["x,A,model,residual,normalized_residual"]
    for x, a, m, r, nr in report.rows():
        lines.append(f"{x},{a},{_csv_float(m)},{_csv_float(r)},{_csv_float(nr)}")
    return lines


def _cmd_summatory(opt) -> int:
    lattice = _lattice_from_spec(opt["lattice"], opt.get("radicand"))
    table = hnf.count_table(
        lattice, opt["max_n"], opt["predicate"], workers=opt["workers"]
    )
    if opt["x_grid"]:
        xs = [int(v) for v in opt["x_grid"].split(",")]
    else:
        xs = list(asy.default_log_grid(opt["max_n"], low=max(2, opt["max_n"] // 100),
                                       points=opt["x_points"]))
    model_name = opt["model"]
    if model_name == "none":
        report = hnf.summatory(table, xs)
    else:
        model = _resolve_model(model_name, opt["lattice"], opt.get("c_value"), table)
        report = hnf.summatory(table, xs, model.evaluate, model.normalizer,
                               model.name, model.normalizer_name)
    _emit(_report_lines(report), opt["out"])
    return 0


_SERIES_CHOICES = {
    "square-wr": lambda n: ser.wr_series_square(n),
    "triangle-wr": lambda n: ser.wr_series_triangle(n),
    "square-similar": lambda n: ser.standard_series("dedekind_gauss", n),
    "triangle-similar": lambda n: ser.standard_series("dedekind_eisenstein", n),
}


def _cmd_series(opt) -> int:
    which = opt["which"]
    if which in _SERIES_CHOICES:
        out = _SERIES_CHOICES[which](opt["max_n"])
    elif which.startswith("window:"):
        out = ser.window_series(which.split(":", 1)[1], opt["max_n"])
    else:
        raise ValueError(f"unknown series {which!r}")
    if opt["format"] == "json":
        obj = {"which": which, "max_n": out.nmax,
               "coefficients": [[n, out.c(n)] for n in range(1, out.nmax + 1)]}
        _emit([json.dumps(obj, indent=2)], opt["out"])
    else:
        lines = ["n,c"]
        lines += [f"{n},{out.c(n)}" for n in range(1, out.nmax + 1)]
        _emit(lines, opt["out"])
    return 0


def _cmd_verify(opt) -> int:
    key = opt["lattice"]
    nmax = opt["max_n"]
    lattice = _lattice_from_spec(key, opt.get("radicand"))
    checks: list[tuple[str, np.ndarray, np.ndarray]] = []
    if key == "square":
        brute = hnf.count_table(lattice, nmax, "wr", workers=opt["workers"])
        checks.append(("wr", brute.counts, ser.wr_series_square(nmax).coeffs))
        sim = hnf.count_table(lattice, nmax, "square", workers=opt["workers"])
        checks.append(
            ("similar", sim.counts, ser.standard_series("dedekind_gauss", nmax).coeffs)
        )
    elif key == "triangle":
        brute = hnf.count_table(lattice, nmax, "wr", workers=opt["workers"])
        checks.append(("wr", brute.counts, ser.wr_series_triangle(nmax).coeffs))
        sim = hnf.count_table(lattice, nmax, "hexagonal", workers=opt["workers"])
        checks.append(
            ("similar", sim.counts,
             ser.standard_series("dedekind_eisenstein", nmax).coeffs)
        )
    else:
        ratio = _diag_irrational_ratio(lattice)
        if ratio is None:
            raise ValueError(
                "verify supports 'square', 'triangle', or a rectangular Gram "
                "with irrational aspect ratio"
            )
        brute = hnf.count_table(lattice, nmax, "wr")
        fast = hnf.diag_irrational_wr_table(ratio, nmax)
        checks.append(("wr", brute.counts, fast.counts))
    lines = []
    status = 0
    for name, got, expected in checks:
        mism = np.nonzero(got[1:] != expected[1:])[0]
        if len(mism):
            n = int(mism[0]) + 1
            lines.append(
                f"MISMATCH {name}: n={n} brute={int(got[n])} series={int(expected[n])}"
            )
            status = 1
        else:
            lines.append(f"OK {name}: all n <= {nmax} agree")
    if opt["spot_checks"]:
        rng = np.random.default_rng(opt["seed"])
        from .lattice import IntMatrix2, classify, sublattice_gram

        base_shape = classify(lattice)
        for _ in range(opt["spot_checks"]):
            while True:
                a, b, c, d = (int(v) for v in rng.integers(-3, 4, size=4))
                if a * d - b * c in (1, -1):
                    break
            u = IntMatrix2(a, b, c, d)
            if classify(PlanarLattice(lattice.gram.transformed(u))) != base_shape:
                lines.append(f"MISMATCH basis-independence under {u}")
                status = 1
                break
        else:
            lines.append(
                f"OK basis-independence: {opt['spot_checks']} random unimodular "
                "conjugates classify identically"
            )
    _emit(lines, opt["out"])
    return status


def _cmd_csl(opt) -> int:
    gram = _lattice_from_spec(opt["gram"], opt.get("radicand"))
    if opt["csl_action"] == "index":
        p, q = (int(v) for v in opt["axis"].split(","))
        s = cslmod.reflection_matrix(gram.gram, (p, q))
        if s is None:
            obj = {"axis": [p, q], "rational": False}
        else:
            obj = {
                "axis": [p, q],
                "matrix": s.as_strings(),
                "sigma": cslmod.csl_index(s),
            }
        _emit([json.dumps(obj, indent=2)], opt["out"])
    else:
        scan = cslmod.coincidence_reflections(gram.gram, opt["bound"])
        obj = {
            "all_rational": scan.all_rational,
            "axis_bound": scan.axis_bound,
            "witnesses": [
                {
                    "axis": list(w.axis),
                    "matrix": w.matrix.as_strings(),
                    "sigma": w.sigma,
                }
                for w in scan.witnesses
            ],
        }
        _emit([json.dumps(obj, indent=2)], opt["out"])
    return 0


def _counts_for_asympt(key: str, xmax: int, radicand) -> hnf.CountTable:
    if key == "square":
        return hnf.CountTable(
            ser.wr_series_square(xmax).coeffs, "wr", "square", source="dirichlet-series"
        )
    if key == "triangle":
        return hnf.CountTable(
            ser.wr_series_triangle(xmax).coeffs, "wr", "triangle",
            source="dirichlet-series",
        )
    if key.startswith("file:"):
        path = key.split(":", 1)[1]
        counts = np.zeros(xmax + 1, dtype=np.int64)
        with open(path) as fh:
            header = fh.readline()
            if header.strip() != "n,count":
                raise ValueError(f"{path}: expected header 'n,count'")
            for line in fh:
                n_str, c_str = line.strip().split(",")
                n = int(n_str)
                if 1 <= n <= xmax:
                    counts[n] = int(c_str)
        return hnf.CountTable(counts, "wr", path, source="file")
    lattice = _lattice_from_spec(key, radicand)
    ratio = _diag_irrational_ratio(lattice)
    if ratio is not None:
        return hnf.diag_irrational_wr_table(ratio, xmax)
    return hnf.count_table(lattice, xmax, "wr")


def _cmd_asympt(opt) -> int:
    table = _counts_for_asympt(opt["lattice"], opt["x_max"], opt.get("radicand"))
    model = _resolve_model(opt["model"], opt["lattice"], opt.get("c_value"), table)
    xs = asy.default_log_grid(opt["x_max"], points=opt["points"])
    report = asy.residual_report(table, model, xs)
    _emit(_report_lines(report), opt["out"])
    return 0


def _cmd_constants(opt) -> int:
    if opt["which"] == "c-square":
        res = asy.compute_c_square(tol=opt["tol"])
        obj = {"value": res.value, "error": res.error,
               "p_terms": res.p_terms, "k_terms": res.k_terms}
    elif opt["which"] == "base":
        bundle = asy.constant_bundle()
        obj = {"values": bundle.as_float_dict(), "errors": bundle.errors}
    else:
        raise ValueError(f"unknown constant {opt['which']!r}")
    _emit([json.dumps(obj, indent=2)], opt["out"])
    return 0


def _cmd_highdim(opt) -> int:
    lengths = [Fraction(v) for v in opt["lengths_sq"].split(",")]
    spec = OrthoSpec(lengths)
    if opt["construct"] == "fullsign":
        lat = fullsign_lattice(spec)
    else:
        lat = subset_sign_lattice(spec)
    min_norm, vectors = shortest_vectors(lat)
    obj = {
        "construct": opt["construct"],
        "d": lat.d,
        "lengths_sq": [str(v) for v in spec.lengths_sq],
        "basis": [list(r) for r in lat.basis],
        "basis_det": lat.basis_det(),
        "min_norm": str(min_norm),
        "min_vector_count": len(vectors),
        "well_rounded": is_well_rounded_d(lat),
    }
    _emit([json.dumps(obj, indent=2)], opt["out"])
    return 0


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


def _add_common(p, lattice_flag="--lattice"):
    p.add_argument(lattice_flag, required=True,
                   help="square | triangle | 'g11,g12,g22'")
    p.add_argument("--radicand", type=int, default=None,
                   help="radicand any sqrt() in the Gram text must use")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wrlat",
        description="Exact well-rounded sublattice counting and verification",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("count", help="brute-force counts per index")
    _add_common(p)
    p.add_argument("--predicate", default="wr",
                   choices=sorted(hnf.PREDICATES) + ["similar"])
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--workers", type=int, default=hnf.default_worker_count())
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-")

    p = sub.add_parser("summatory", help="summatory function with residuals")
    _add_common(p)
    p.add_argument("--predicate", default="wr",
                   choices=sorted(hnf.PREDICATES) + ["similar"])
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--model", default="none",
                   help="none | thm3 | thm4 | thm5:SIGMA")
    p.add_argument("--c-value", type=float, default=None,
                   help="override the fitted/computed Laurent constant")
    p.add_argument("--x-grid", default=None, help="comma list of x values")
    p.add_argument("--x-points", type=int, default=10)
    p.add_argument("--workers", type=int, default=hnf.default_worker_count())
    p.add_argument("--out", default="-")

    p = sub.add_parser("series", help="Dirichlet series coefficients")
    p.add_argument("--which", required=True,
                   help="square-wr | triangle-wr | square-similar | "
                        "triangle-similar | window:{sq_even,sq_odd,tri_even,tri_odd}")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-")

    p = sub.add_parser("verify", help="oracle equality sweep (exit 1 on mismatch)")
    _add_common(p)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--workers", type=int, default=hnf.default_worker_count())
    p.add_argument("--spot-checks", type=int, default=0,
                   help="also classify K random unimodular conjugates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("csl", help="coincidence reflections")
    csl_sub = p.add_subparsers(dest="csl_action", required=True)
    pi = csl_sub.add_parser("index", help="reflection matrix and index for one axis")
    _add_common(pi, "--gram")
    pi.add_argument("--axis", required=True, help="p,q (primitive)")
    pi.add_argument("--out", default="-")
    ps = csl_sub.add_parser("scan", help="scan primitive axes up to a bound")
    _add_common(ps, "--gram")
    ps.add_argument("--bound", type=int, required=True)
    ps.add_argument("--out", default="-")

    p = sub.add_parser("asympt", help="growth-law residual report")
    p.add_argument("--lattice", required=True,
                   help="square | triangle | 'g11,g12,g22' | file:PATH (CSV n,count)")
    p.add_argument("--radicand", type=int, default=None)
    p.add_argument("--x-max", type=int, required=True)
    p.add_argument("--model", required=True, help="thm3 | thm4 | thm5:SIGMA")
    p.add_argument("--c-value", type=float, default=None)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--out", default="-")

    p = sub.add_parser("constants", help="evaluate verified constants")
    p.add_argument("--which", default="c-square", choices=("c-square", "base"))
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--out", default="-")

    p = sub.add_parser("highdim", help="sign-vector lattice constructions")
    p.add_argument("--construct", required=True, choices=("fullsign", "subset"))
    p.add_argument("--lengths-sq", required=True,
                   help="comma list of rational squared lengths")
    p.add_argument("--out", default="-")

    return ap


_HANDLERS = {
    "count": _cmd_count,
    "summatory": _cmd_summatory,
    "series": _cmd_series,
    "verify": _cmd_verify,
    "csl": _cmd_csl,
    "asympt": _cmd_asympt,
    "constants": _cmd_constants,
    "highdim": _cmd_highdim,
}


def run(config: RunConfig) -> int:
    """Dispatch a validated configuration; returns the process exit status."""
    for key in ("max_n", "x_max", "bound"):
        if config.options.get(key) is not None and config.options[key] < 1:
            raise ValueError(f"{key} must be positive")
    handler = _HANDLERS[config.subcommand]
    return handler(config.options)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    config = RunConfig(ns.subcommand, vars(ns))
    try:
        return run(config)
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
