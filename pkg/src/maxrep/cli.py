"""Command line interface: ``maxrep <subcommand> FILE [options]``.

Exit codes: 0 success, 1 verification violations (or a non-constant
deformation), 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import numeric
from .boundary import (
    LimitCurveSample,
    contraction_exponent,
    fixed_point_chart,
    qi_scan,
    rectifiable_length,
    sample_limit_curve,
    verify_maximality,
    verify_monotonicity,
    verify_transversality,
)
from .maslov import maslov_index
from .numeric import NumericError
from .representations import (
    CentralizerElement,
    SurfaceRep,
    amalgam_z_rep,
    degenerate_rep,
    irreducible_surface_rep,
    polydisk_rep,
)
from .siegel import ComplexStructureJ, cayley, inverse_cayley, siegel_distance, standard_j
from .surface import (
    DEFAULT_LAMBDA,
    Hyperbolization,
    default_hyperbolization,
    matched_hyperbolization,
)
from .symplectic import LagrangianFrame
from .toledo import ToledoError, toledo

REP_TYPES = ("polydisk", "irreducible", "amalgam_z", "degenerate", "custom")
SUITES = ("maximality", "transversality", "monotonicity", "all")


class SpecError(Exception):
    """Malformed input; ``where`` is a line/column or a field path."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------------------
# input parsing


def load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SpecError(path, e.strerror or str(e)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    if not isinstance(data, dict):
        raise SpecError(path, "top level must be a JSON object")
    return data


def _field(data: dict, key: str, where: str, default=None, required: bool = False):
    if key not in data:
        if required:
            raise SpecError(f"{where}.{key}" if where else key, "missing field")
        return default
    return data[key]


def _number(x, where: str) -> float:
    try:
        v = numeric.parse_scalar(x)
    except (ValueError, ZeroDivisionError, TypeError):
        raise SpecError(where, f"not a number: {x!r}") from None
    v = float(v)
    if not math.isfinite(v):
        raise SpecError(where, "must be finite")
    return v


def _int(x, where: str, low: int = 1) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < low:
        raise SpecError(where, f"expected an integer >= {low}, got {x!r}")
    return x


def _matrix(x, where: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise SpecError(where, "expected a non-empty array of rows")
    if len({len(r) for r in x}) != 1:
        raise SpecError(where, "rows have different lengths")
    try:
        m = numeric.parse_matrix(x)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise SpecError(where, f"bad entry ({e})") from None
    if shape is not None and m.shape != shape:
        raise SpecError(where, f"expected shape {shape}, got {m.shape}")
    return m


def _complex_matrix(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise SpecError(where, "expected a non-empty array of rows")
    try:
        return np.array([[complex(str(v).replace(" ", "")) for v in row] for row in x], dtype=complex)
    except ValueError as e:
        raise SpecError(where, f"bad entry ({e})") from None


def _frame(x, n: int, where: str) -> LagrangianFrame:
    m = _matrix(x, where)
    if m.shape == (n, 2 * n) and n != 2 * n:
        m = m.T  # given as a list of columns
    if m.shape != (2 * n, n):
        raise SpecError(where, f"expected a {2 * n}x{n} frame, got {m.shape}")
    try:
        return LagrangianFrame(m)
    except NumericError as e:
        raise SpecError(where, str(e)) from None


def parse_hyperbolization(spec: dict) -> Hyperbolization:
    """From "hyperbolization": {"matrices": [4 x 2x2], "twist": s} or the "torus" parameters."""
    hyp = spec.get("hyperbolization")
    if hyp is not None:
        if not isinstance(hyp, dict):
            raise SpecError("hyperbolization", "expected an object")
        mats = _field(hyp, "matrices", "hyperbolization", required=True)
        if not isinstance(mats, list) or len(mats) % 2 or not mats:
            raise SpecError("hyperbolization.matrices", "expected 2g matrices")
        ms = tuple(numeric.to_float(_matrix(m, f"hyperbolization.matrices[{i}]", (2, 2))) for i, m in enumerate(mats))
        twist = _number(hyp.get("twist", 0.0), "hyperbolization.twist")
        return Hyperbolization(ms, twist)
    torus = _field(spec, "torus", "", default={})
    if not isinstance(torus, dict):
        raise SpecError("torus", "expected an object")
    lam = _number(torus.get("lambda", DEFAULT_LAMBDA), "torus.lambda")
    mu = _number(torus.get("mu", DEFAULT_LAMBDA), "torus.mu")
    angle = _number(torus.get("angle", math.pi / 2), "torus.angle")
    twist = _number(torus.get("twist", 0.0), "torus.twist")
    try:
        return default_hyperbolization(twist, lam, mu, angle)
    except NumericError as e:
        raise SpecError("torus", str(e)) from None


def _centralizer(spec: dict) -> CentralizerElement:
    z = _field(spec, "z", "", default={"a": 1, "b": 0, "c": 0, "d": 1})
    if not isinstance(z, dict):
        raise SpecError("z", "expected an object {a, b, c, d} or {phi}")
    try:
        if "phi" in z:
            return CentralizerElement.rotation(_number(z["phi"], "z.phi"))
        vals = [_number(_field(z, k, "z", required=True), f"z.{k}") for k in "abcd"]
        return CentralizerElement(*vals)
    except NumericError as e:
        raise SpecError("z", str(e)) from None


def second_hyperbolization(spec: dict, h: Hyperbolization) -> Hyperbolization:
    other = _field(spec, "torus2", "", default={})
    if not isinstance(other, dict):
        raise SpecError("torus2", "expected an object")
    lam = _number(other.get("lambda", DEFAULT_LAMBDA), "torus2.lambda")
    angle = _number(other.get("angle", math.pi / 3), "torus2.angle")
    twist = _number(other.get("twist", 1.0), "torus2.twist")
    try:
        return matched_hyperbolization(h, lam, angle, twist)
    except NumericError as e:
        raise SpecError("torus2", str(e)) from None


def build_representation(spec: dict) -> tuple[SurfaceRep, Hyperbolization]:
    """Representation spec -> (rho, the hyperbolization used to sample the circle)."""
    kind = _field(spec, "type", "", required=True)
    if kind not in REP_TYPES:
        raise SpecError("type", f"expected one of {', '.join(REP_TYPES)}, got {kind!r}")
    genus = _int(spec.get("genus", 2), "genus")
    if kind != "custom" and genus != 2:
        raise SpecError("genus", "built-in constructions are genus 2")
    h = parse_hyperbolization(spec)
    try:
        if kind == "polydisk":
            n = _int(spec.get("n", 2), "n")
            return polydisk_rep(*([h] * n)), h
        if kind == "irreducible":
            n = _int(spec.get("n", 2), "n")
            return irreducible_surface_rep(h, n), h
        if kind == "amalgam_z":
            return amalgam_z_rep(h, second_hyperbolization(spec, h), _centralizer(spec)), h
        if kind == "degenerate":
            return degenerate_rep(h, _int(spec.get("n", 2), "n")), h
        n = _int(_field(spec, "n", "", required=True), "n")
        mats = _field(spec, "matrices", "", required=True)
        if not isinstance(mats, list) or len(mats) != 2 * genus:
            raise SpecError("matrices", f"expected {2 * genus} generator matrices")
        ms = tuple(numeric.to_float(_matrix(m, f"matrices[{i}]", (2 * n, 2 * n))) for i, m in enumerate(mats))
        if h.genus != genus:
            raise SpecError("hyperbolization", "genus does not match the representation")
        return SurfaceRep(n, ms, "custom", h), h
    except NumericError as e:
        raise SpecError(kind, str(e)) from None


# ---------------------------------------------------------------------------
# output


def _emit(args, record: dict, text_lines: list[str]) -> None:
    out = json.dumps(record, indent=2, sort_keys=True) if args.format == "json" else "\n".join(text_lines)
    if args.out and args.command not in ("limit-curve",):
        Path(args.out).write_text(out + "\n")
    else:
        print(out)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_maslov(args) -> int:
    data = load_json(args.file)
    n = _int(_field(data, "n", "", required=True), "n")
    frames = _field(data, "frames", "", required=True)
    if not isinstance(frames, list) or len(frames) != 3:
        raise SpecError("frames", "expected three frames")
    ls = [_frame(f, n, f"frames[{i}]") for i, f in enumerate(frames)]
    idx = maslov_index(*ls)
    _emit(args, {"maslov": idx, "exact": all(l.exact for l in ls)}, [str(idx)])
    return 0


def cmd_toledo(args) -> int:
    rho, _ = build_representation(load_json(args.file))
    res = toledo(rho)
    rec = {"T": res.T, "maximal": res.maximal, "winding": res.winding,
           "relator_residual": res.relator_residual, "bound": res.bound}
    _emit(args, rec, [f"T={res.T} maximal={'true' if res.maximal else 'false'}",
                      f"winding={_fmt(res.winding)}", f"relator_residual={res.relator_residual:.3e}"])
    return 0


def _point(data, key: str, where: str) -> ComplexStructureJ:
    m = numeric.to_float(_matrix(data[key], where))
    try:
        return ComplexStructureJ(m)
    except NumericError as e:
        raise SpecError(where, str(e)) from None


def cmd_distance(args) -> int:
    data = load_json(args.file)
    if "J1" in data:
        j1 = _point(data, "J1", "J1")
        j2 = _point(data, "J2", "J2") if "J2" in data else standard_j(j1.n)
    else:
        j2 = _point(data, "J", "J") if "J" in data else None
        if j2 is None:
            raise SpecError("J", "missing field")
        j1 = standard_j(j2.n)
    if j1.n != j2.n:
        raise SpecError("J2", "dimension differs from J1")
    d = siegel_distance(j1, j2)
    _emit(args, {"distance": d}, [_fmt(d)])
    return 0


def cmd_cayley(args) -> int:
    data = load_json(args.file)
    key = "W" if args.inverse else "Z"
    m = _complex_matrix(_field(data, key, "", required=True), key)
    if m.shape[0] != m.shape[1]:
        raise SpecError(key, "expected a square matrix")
    try:
        out = inverse_cayley(m) if args.inverse else cayley(m)
    except NumericError as e:
        raise SpecError(key, str(e)) from None
    rows = [[_fmt_complex(v) for v in row] for row in out]
    _emit(args, {"Z" if args.inverse else "W": rows}, [" ".join(r) for r in rows])
    return 0


def _fmt_complex(v: complex) -> str:
    return f"{v.real:.12g}{v.imag:+.12g}j"


def _sample(args, rho, h) -> LimitCurveSample:
    return sample_limit_curve(rho, h, args.length)


def sample_csv(sample: LimitCurveSample) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = sample.n
    cols = [f"f{r}{c}" for r in range(2 * n) for c in range(n)]
    w.writerow(["angle", "word", "gap"] + cols)
    for e in sample.entries:
        f = e.frame.frame.astype(float)
        w.writerow([_fmt(e.point.theta), " ".join(str(x) for x in e.word), _fmt(e.gap)]
                   + [_fmt(v + 0.0) for v in f.reshape(-1)])
    return buf.getvalue()


def cmd_limit_curve(args) -> int:
    from .plotting import plot_limit_curve

    rho, h = build_representation(load_json(args.file))
    sample = _sample(args, rho, h)
    rec = {"samples": len(sample), "skipped": sample.skipped, "length": args.length}
    chart = fixed_point_chart(sample, (1,)) if rho.n > 1 else None
    if chart is not None:
        try:
            cl = rectifiable_length(sample, chart)
            rec.update({"chart_length": cl.length, "chart_bound": cl.bound})
        except NumericError as e:
            # non-maximal curves need not live in the cone; the samples are still written
            rec["chart_error"] = str(e)
    if args.out:
        base = Path(args.out)
        base.parent.mkdir(parents=True, exist_ok=True)
        csv_path = base.with_suffix(".csv")
        svg_path = base.with_suffix(".svg")
        csv_path.write_text(sample_csv(sample))
        plot_limit_curve(sample, svg_path, chart, title=f"{rho.kind}, words of length <= {args.length}")
        rec.update({"csv": str(csv_path), "svg": str(svg_path)})
        if args.format == "json":
            print(json.dumps(rec, indent=2, sort_keys=True))
        else:
            print("\n".join(f"{k}={v}" for k, v in sorted(rec.items())))
    elif args.format == "json":
        print(json.dumps(rec, indent=2, sort_keys=True))
    else:
        sys.stdout.write(sample_csv(sample))
    return 0


def cmd_verify(args) -> int:
    rho, h = build_representation(load_json(args.file))
    try:
        sample = _sample(args, rho, h)
    except NumericError as e:
        print(f"verify: {e}", file=sys.stderr)
        return 1
    suites = [args.suite] if args.suite != "all" else ["maximality", "transversality", "monotonicity"]
    trials = args.trials if args.trials > 0 else None
    reports = []
    for s in suites:
        if s == "maximality":
            reports.append(verify_maximality(sample, trials, args.seed))
        elif s == "transversality":
            reports.append(verify_transversality(sample))
        else:
            reports.append(verify_monotonicity(sample, trials, args.seed))
    total = sum(r.violations for r in reports)
    rec = {"samples": len(sample), "seed": args.seed, "reports": [r.as_dict() for r in reports],
           "violations": total}
    lines = [f"samples={len(sample)} seed={args.seed}"]
    for r in reports:
        lines.append(f"{r.name}: checked={r.checked} violations={r.violations}")
        for wit in r.witnesses[:3]:
            lines.append(f"  witness {json.dumps(wit, sort_keys=True)}")
    lines.append("PASS" if total == 0 else "FAIL")
    _emit(args, rec, lines)
    return 0 if total == 0 else 1


def cmd_qi(args) -> int:
    rho, h = build_representation(load_json(args.file))
    rep = qi_scan(rho, args.length, reference=h)
    rec = rep.as_dict()
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["length", "count", "min", "max"])
        for l, c, lo, hi in zip(rep.lengths, rep.counts, rep.minima, rep.maxima):
            w.writerow([int(l), int(c), _fmt(lo), _fmt(hi)])
        lines = [buf.getvalue().rstrip("\n"), f"# A={_fmt(rep.slope)} B={_fmt(rep.intercept)}"]
    else:
        lines = [f"{int(l)}\t{int(c)}\t{_fmt(lo)}\t{_fmt(hi)}"
                 for l, c, lo, hi in zip(rep.lengths, rep.counts, rep.minima, rep.maxima)]
        lines.append(f"A={_fmt(rep.slope)} B={_fmt(rep.intercept)}")
    _emit(args, rec, lines)
    return 0


def cmd_deform(args) -> int:
    """Toledo along z(t) = rotation(2 pi t / steps) for an amalgam spec."""
    spec = load_json(args.file)
    if spec.get("type") != "amalgam_z":
        raise SpecError("type", "deform needs an amalgam_z spec")
    h = parse_hyperbolization(spec)
    h2 = second_hyperbolization(spec, h)
    values, residuals = [], []
    for k in range(args.steps + 1):
        phi = 2.0 * math.pi * k / args.steps
        rho = amalgam_z_rep(h, h2, CentralizerElement.rotation(phi))
        res = toledo(rho)
        values.append(res.T)
        residuals.append(rho.relator_residual)
    constant = len(set(values)) == 1
    rec = {"steps": args.steps, "T": values, "constant": constant, "max_relator_residual": max(residuals)}
    lines = [f"{k}\t{_fmt(2.0 * math.pi * k / args.steps)}\tT={t}" for k, t in enumerate(values)]
    lines.append(f"constant={'true' if constant else 'false'}")
    _emit(args, rec, lines)
    return 0 if constant else 1


def cmd_contraction(args) -> int:
    rho, h = build_representation(load_json(args.file))
    sample = sample_limit_curve(rho, h, 3)
    rows = []
    for text in args.words:
        w = rho.presentation.parse(text)
        c = contraction_exponent(rho, h, w, sample=sample)
        rows.append({"word": text, "measured": c.measured, "predicted": c.predicted,
                     "growth": c.growth, "monotone": c.monotone})
    ok = all(r["monotone"] and r["measured"] >= r["predicted"] - 0.05 for r in rows)
    lines = [f"{r['word']}\tmeasured={_fmt(r['measured'])}\tpredicted={_fmt(r['predicted'])}\tmonotone={r['monotone']}"
             for r in rows]
    _emit(args, {"rows": rows, "ok": ok}, lines)
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maxrep", description="Maximal surface group representations into Sp(2n, R).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None, help="float tolerance (default 1e-9)")
    common.add_argument("--out", default=None, help="output path")
    common.add_argument("--format", choices=("csv", "svg", "json", "text"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=20000, help="random tuples per suite; 0 checks all")
    common.add_argument("--length", type=int, default=6, help="maximal word length L")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, **extra):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("file", help="JSON input")
        sp.set_defaults(func=func)
        return sp

    add("maslov", cmd_maslov, "Maslov index of a Lagrangian triple")
    add("toledo", cmd_toledo, "Toledo invariant of a representation")
    add("distance", cmd_distance, "distance between two complex structures")
    sp = add("cayley", cmd_cayley, "Cayley transform of a matrix")
    sp.add_argument("--inverse", action="store_true", help="apply the inverse transform to W")
    add("limit-curve", cmd_limit_curve, "sample the limit curve; CSV and SVG with --out")
    sp = add("verify", cmd_verify, "run verification suites on the sampled limit curve")
    sp.add_argument("--suite", choices=SUITES, default="all")
    add("qi", cmd_qi, "orbit growth scan")
    sp = add("deform", cmd_deform, "Toledo invariant along a loop of centralizer elements")
    sp.add_argument("--steps", type=int, default=8)
    sp = add("contraction", cmd_contraction, "decay exponents along axes of group elements")
    sp.add_argument("--words", nargs="+", default=["a1", "b1", "a1 b1"])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    old = None
    try:
        if args.tolerance is not None:
            old = numeric.set_tolerance(args.tolerance)
        if args.length < 1:
            raise SpecError("--length", "must be >= 1")
        return args.func(args)
    except SpecError as e:
        print(f"maxrep {args.command}: input error: {e}", file=sys.stderr)
        return 2
    except (NumericError, ToledoError) as e:
        print(f"maxrep {args.command}: {e}", file=sys.stderr)
        return 2
    finally:
        if old is not None:
            numeric.set_tolerance(old)


if __name__ == "__main__":
    raise SystemExit(main())
