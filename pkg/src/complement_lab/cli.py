"""Command-line entry point.

Exit codes: 0 success (whatever the verdict), 2 input error, 3 parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from itertools import combinations
from typing import Sequence, TextIO

import numpy as np

from . import catalog
from .complementarity import Verdict, classify, conditions_agree
from .duality import CSV_COLUMNS, DualityReport, TwoPathState, duality_measures, normalization_vs_duality
from .hilbert import DimensionMismatch, expectation, meet
from .optics import build_biprism, detection_probabilities, propagate
from .scenefile import SceneFile, SceneInputError, SceneParseError
from .tolerances import Tolerances

EXIT_OK, EXIT_INPUT, EXIT_PARSE = 0, 2, 3


class GridSpecError(ValueError):
    pass


def parse_grid(text: str) -> list[float]:
    """``"start:stop:count"`` (inclusive linspace), ``"x"`` or ``"x,y,z"``."""
    try:
        parts = text.split(":")
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError
            return [float(x) for x in np.linspace(start, stop, count)]
        if len(parts) == 1:
            return [float(x) for x in text.split(",")]
    except ValueError:
        pass
    raise GridSpecError(f"malformed grid {text!r}; expected start:stop:count or comma-separated values")


def _num(x: float) -> str:
    return repr(float(x))


def _short(x: float) -> str:
    return f"{x:.6g}"


def _vec(v: np.ndarray) -> str:
    def c(z: complex) -> str:
        if abs(z.imag) < 5e-7:
            return _short(z.real + 0.0)
        return f"{_short(z.real + 0.0)}{z.imag:+.6g}j"

    return "(" + ", ".join(c(z) for z in v) + ")"


def _load(args: argparse.Namespace) -> SceneFile:
    if args.file and args.builtin:
        raise SceneInputError("give either a scene file or --builtin, not both")
    if args.builtin:
        params = {}
        if args.builtin == "biprism":
            params = {
                "dim_r": args.dim_r,
                "dim_t": args.dim_t,
                "wave_rank": args.wave_rank,
                "alpha2": args.alpha2 if args.alpha2 is not None else 0.5,
            }
        try:
            sf = catalog.builtin(args.builtin, **params)
        except KeyError as exc:
            raise SceneInputError(exc.args[0]) from None
    elif args.file:
        sf = SceneFile.load(args.file)
    else:
        raise SceneInputError("give a scene file or --builtin NAME")
    if getattr(args, "dump", None):
        sf.dump(args.dump)
    return sf


# analyze


def analyze(sf: SceneFile, pairs: Sequence[Sequence[str]], fmt: str, out: TextIO, tol: Tolerances | None = None) -> None:
    results = []
    for a_name, b_name in pairs:
        a, b = sf.observable(a_name, tol), sf.observable(b_name, tol)
        if a.dim != b.dim:
            raise DimensionMismatch(f"{a_name} has dim {a.dim}, {b_name} has dim {b.dim}")
        results.append((a_name, b_name, a.dim, classify(a, b, tol), conditions_agree(a, b, tol)))

    if fmt == "json":
        doc = [{"a": a, "b": b, "dim": d, "conditions_agree": ok, **v.to_dict()} for a, b, d, v, ok in results]
        out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(
            ["a", "b", "dim", "relation", "commutation", "commutator_norm", "total_pairs", "zero_meet",
             "nonzero_meet", "conditions_agree", "witness_kind", "witness_value_set_a", "witness_value_set_b",
             "witness_magnitude"]
        )
        for a, b, d, v, ok in results:
            wit = v.witnesses[0]
            w.writerow(
                [a, b, d, v.relation.value, v.commutation.value, _num(v.commutator_norm), v.counts.total,
                 v.counts.zero_meet, v.counts.nonzero_meet, str(ok).lower(), wit.kind.value,
                 wit.value_set_a.format(ascii=True), wit.value_set_b.format(ascii=True), _num(wit.magnitude)]
            )
    else:
        for i, (a, b, d, v, ok) in enumerate(results):
            if i:
                out.write("\n")
            _write_verdict_table(a, b, d, v, ok, out)


def _write_verdict_table(a: str, b: str, dim: int, v: Verdict, agree: bool, out: TextIO) -> None:
    out.write(f"pair:        {a} vs {b} (dim {dim})\n")
    out.write(f"verdict:     {v.summary}\n")
    out.write(f"commutator:  {_short(v.commutator_norm)} (max-norm)\n")
    out.write(
        f"value-set pairs: total={v.counts.total} zero_meet={v.counts.zero_meet} "
        f"nonzero_meet={v.counts.nonzero_meet}\n"
    )
    out.write(f"meet and probability tests agree: {'yes' if agree else 'NO'}\n")
    out.write("witnesses:\n")
    for w in v.witnesses:
        out.write(
            f"  {w.kind.value:<17} X={w.value_set_a} Y={w.value_set_b} magnitude={_short(w.magnitude)}"
            + (f"  [{w.note}]" if w.note else "")
            + "\n"
        )
        for col in w.evidence_vectors().T:
            out.write(f"    {_vec(col)}\n")
    for note in v.notes:
        out.write(f"note: {note}\n")


# simulate


def simulate(sf: SceneFile, phis: Sequence[float], fmt: str, out: TextIO, tol: Tolerances | None = None) -> None:
    scene = sf.optical_scene(tol)
    names = list(scene.detectors)
    header = ["phi"] + ["p_" + n.replace("_", "") for n in names] + ["anticoincidence"]
    rows = []
    for phi in phis:
        s = scene.at_phase(phi)
        probs = detection_probabilities(s, tol)
        state = propagate(s)
        anti = max(
            (expectation(state, meet(s.detectors[x], s.detectors[y], tol), tol) for x, y in combinations(names, 2)),
            default=0.0,
        )
        rows.append([phi] + [probs[n] for n in names] + [anti])
    _write_rows(header, rows, fmt, out)


def _write_rows(header: Sequence[str], rows: Sequence[Sequence[float]], fmt: str, out: TextIO, flags=None) -> None:
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_num(x) for x in r])
        return
    width = max(12, max(len(h) for h in header) + 2)
    out.write("".join(f"{h:>{width}}" for h in header) + "\n")
    for i, r in enumerate(rows):
        line = "".join(f"{x:>{width}.6f}" for x in r)
        if flags and flags[i]:
            line += "  ! P^2+V^2 > 1"
        out.write(line + "\n")


# duality


def duality_rows(alpha2: Sequence[float], mu: Sequence[float]) -> list[DualityReport]:
    return [duality_measures(TwoPathState.from_alpha2(a, m)) for a in alpha2 for m in mu]


def write_duality(reports: Sequence[DualityReport], fmt: str, out: TextIO, err: TextIO) -> None:
    flags = [r.violates_bound for r in reports]
    if fmt == "table":
        labels = sorted({r.label for r in reports})
        out.write(f"# P = ||alpha|^2 - |beta|^2| (predictability), V = 2 mu |alpha| |beta| (visibility); rows: {', '.join(labels)}\n")
        for note in dict.fromkeys(n for r in reports for n in r.notes):
            out.write(f"# {note}\n")
    _write_rows(CSV_COLUMNS, [r.row() for r in reports], fmt, out, flags)
    if any(flags):
        err.write(f"warning: {sum(flags)} row(s) violate P^2 + V^2 <= 1\n")


# argument handling


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="scene file (JSON)")
    p.add_argument("--builtin", choices=sorted(catalog.BUILTINS), help="use a builtin scene")
    p.add_argument("--dump", metavar="PATH", help="write the loaded scene file to PATH")
    p.add_argument("--dim-r", type=int, default=4, help="biprism: reflected block dimension")
    p.add_argument("--dim-t", type=int, default=4, help="biprism: transmitted block dimension")
    p.add_argument("--wave-rank", type=int, default=2, help="biprism: rank of the tunnelling projector")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="complement-lab",
        description="Decide complementarity of observable pairs and simulate single-photon scenes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify observable pairs")
    _add_source(p)
    p.add_argument("--pair", help="two observable names, comma separated (default: the file's analyze queries)")
    p.add_argument("--alpha2", type=float, help="biprism: |alpha|^2")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("simulate", help="detector probabilities over a phase sweep")
    _add_source(p)
    p.add_argument("--phi", help="phase grid start:stop:count or list")
    p.add_argument("--alpha2", type=float, help="biprism: |alpha|^2")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("duality", help="predictability/visibility table")
    p.add_argument("--alpha2", default=None, help="|alpha|^2 grid (default 0:1:11; biprism: single value)")
    p.add_argument("--mu", default="1", help="coherence grid (default 1)")
    p.add_argument("--builtin", choices=("biprism",), help="report on the biprism scene instead of a grid")
    p.add_argument("--dim-r", type=int, default=4)
    p.add_argument("--dim-t", type=int, default=4)
    p.add_argument("--wave-rank", type=int, default=2)
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.set_defaults(func=_cmd_duality)

    p = sub.add_parser("run", help="execute every query stored in a scene file")
    p.add_argument("file")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.set_defaults(func=_cmd_run)
    return parser


def _pair(text: str) -> list[str]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise SceneInputError(f"--pair needs two comma-separated names, got {text!r}")
    return parts


def _cmd_analyze(args, out, err) -> int:
    sf = _load(args)
    if args.pair:
        pairs = [_pair(args.pair)]
    else:
        pairs = [q["pair"] for q in sf.queries if q["kind"] == "analyze"]
        if not pairs:
            raise SceneInputError("no --pair given and the scene has no analyze queries")
    analyze(sf, pairs, args.format, out)
    return EXIT_OK


def _phis_for(sf: SceneFile, spec: str | None) -> list[float]:
    if spec is not None:
        return parse_grid(spec)
    for q in sf.queries:
        if q["kind"] == "simulate" and q.get("phi"):
            return parse_grid(str(q["phi"]))
    return [0.0]


def _cmd_simulate(args, out, err) -> int:
    sf = _load(args)
    simulate(sf, _phis_for(sf, args.phi), args.format, out)
    return EXIT_OK


def _cmd_duality(args, out, err) -> int:
    mu = parse_grid(args.mu)
    if args.builtin == "biprism":
        a2 = parse_grid(args.alpha2) if args.alpha2 else [0.5]
        reports = []
        for a in a2:
            if not 0.0 <= a <= 1.0:
                raise SceneInputError(f"|alpha|^2 = {a} outside [0, 1]")
            scene = build_biprism(args.dim_r, args.dim_t, args.wave_rank, np.sqrt(a), np.sqrt(1.0 - a))
            reports.append(normalization_vs_duality(scene))
            if scene.wave_rank < scene.dim_t:
                reports.append(normalization_vs_duality(scene, scene.state_outside_wave()))
    else:
        a2 = parse_grid(args.alpha2 or "0:1:11")
        for x in list(a2) + list(mu):
            if not 0.0 <= x <= 1.0:
                raise GridSpecError(f"grid value {x} outside [0, 1]")
        reports = duality_rows(a2, mu)
    write_duality(reports, args.format, out, err)
    return EXIT_OK


def _cmd_run(args, out, err) -> int:
    sf = SceneFile.load(args.file)
    for i, q in enumerate(sf.queries):
        out.write(("\n" if i else "") + f"## query {i + 1}: {q['kind']}\n")
        if q["kind"] == "analyze":
            analyze(sf, [q["pair"]], args.format, out)
        elif q["kind"] == "simulate":
            simulate(sf, _phis_for(sf, q.get("phi")), args.format, out)
        else:
            a2 = parse_grid(str(q.get("alpha2", "0:1:11")))
            mu = parse_grid(str(q.get("mu", "1")))
            write_duality(duality_rows(a2, mu), args.format, out, err)
    return EXIT_OK


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out, err)
    except SceneParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (SceneInputError, DimensionMismatch, GridSpecError, ValueError) as exc:
        err.write(f"input error: {exc}\n")
        return EXIT_INPUT


def run_capture(argv: Sequence[str]) -> tuple[int, str, str]:
    """Run the CLI in-process and return (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
