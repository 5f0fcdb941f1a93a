"""Command line front end: ``qfslice <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import analysis, files
from .discreteness import OracleBudget, TraceTriple, bq_search, markov_third_trace, realize_triple
from .groups import CfnParams, EarleParam, cfn_generators, earle_generators, trace_W21
from .moebius import MoebiusMatrix
from .raster import SliceSpec, dehn_twist_spot_check, flood_components, render
from .words import FareySlope, evaluate_word, special_word

log = logging.getLogger("qfslice")

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2

# (Tr A, centre, width) per panel; only the Maskit centre is published, the
# others are anchored at Tr B = 0 so the zooms nest
FIGURE_PRESETS = {
    "maskit": [(2.0, 2 + 0j, 4.0)],
    "2.5": [(2.5, 3 + 0j, 6.0)],
    "8": [(8.0, 8 + 0j, 16.0), (8.0, 16 + 0j, 32.0), (8.0, 64 + 0j, 128.0)],
    "100": [(100.0, 64 + 0j, 128.0), (100.0, 1280 + 0j, 2560.0), (100.0, 6400 + 0j, 12800.0)],
}
FIGURE_TITLES = {
    "maskit": "Maskit slice (Tr A = 2)",
    "2.5": "Tr A = 2.5",
    "8": "Tr A = 8",
    "100": "Tr A = 100",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_complex(text: str) -> complex:
    text = str(text).strip()
    if "," in text:
        re, im = text.split(",", 1)
        return complex(float(re), float(im))
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _jsonable(z):
    if isinstance(z, complex):
        return [z.real, z.imag]
    if isinstance(z, MoebiusMatrix):
        return [[_jsonable(z.a), _jsonable(z.b)], [_jsonable(z.c), _jsonable(z.d)]]
    return z


def _emit(obj, fh=None):
    print(json.dumps(obj, indent=2, default=_jsonable), file=fh or sys.stdout)


# ---------------------------------------------------------------------------
# argument plumbing


def _add_slice_flags(p, res_default=256):
    g = p.add_argument_group("slice")
    g.add_argument("--trA", type=float, help="fixed trace of A (>= 2)")
    g.add_argument("--length", type=float, help="real length c of A; trA = 2 cosh(c/2)")
    g.add_argument("--center", type=parse_complex, help="window centre, 're,im'")
    g.add_argument("--width", type=float, help="window width in the Tr B plane")
    g.add_argument("--res", type=int, default=res_default, help="pixels per side")
    g.add_argument("--root", choices=["plus", "minus", "both"], default="plus")
    _add_budget_flags(p)
    g = p.add_argument_group("output")
    g.add_argument("--out", default="out", help="output directory")
    g.add_argument("--name", help="file stem (default derived from parameters)")
    g.add_argument("--format", choices=["pgm", "png"], default="pgm",
                   help="pgm is always written; png adds a raw PNG")
    g.add_argument("--no-plot", action="store_true", help="skip the matplotlib figure")


def _add_budget_flags(p):
    d = OracleBudget()
    g = p.add_argument_group("oracle budget")
    g.add_argument("--depth", type=int, default=d.max_depth)
    g.add_argument("--grow", type=float, default=d.grow_threshold)
    g.add_argument("--stop", type=float, default=d.stop_magnitude)
    g.add_argument("--eps", type=float, default=d.eps_real)
    g.add_argument("--nodes", type=int, default=d.max_nodes)


def _budget(args) -> OracleBudget:
    return OracleBudget(args.depth, args.grow, args.stop, args.eps, args.nodes)


def _trA(args, required=True) -> float | None:
    if args.trA is not None and getattr(args, "length", None) is not None:
        if not math.isclose(args.trA, 2 * math.cosh(args.length / 2), rel_tol=1e-12):
            raise UsageError("--trA and --length disagree")
    if args.trA is not None:
        return args.trA
    if getattr(args, "length", None) is not None:
        if args.length < 0:
            raise ValueError("--length must be non-negative")
        return 2 * math.cosh(args.length / 2)
    if required:
        raise UsageError("one of --trA / --length is required")
    return None


def _slice_spec(args) -> SliceSpec:
    trA = _trA(args)
    if args.width is None:
        raise UsageError("--width is required")
    center = args.center
    if center is None:
        # frame the standard component: centre on the fold value 2 coth(c/2)
        center = complex(2 * trA / math.sqrt(trA * trA - 4)) if trA > 2 else 2 + 0j
    return SliceSpec(trA, center, args.width, args.res, _budget(args), args.root)


def _default_stem(spec: SliceSpec) -> str:
    c = spec.center
    return f"slice_trA{spec.trA:g}_c{c.real:g}{c.imag:+g}i_w{spec.width:g}_n{spec.resolution}"


def _write_render(grid, stem: Path, args, extra: dict, components=None, title=None) -> dict:
    from . import plotting

    stem.parent.mkdir(parents=True, exist_ok=True)
    outputs = {"pgm": str(files.write_pgm(stem.with_name(stem.name + ".pgm"), grid.gray()))}
    if args.format == "png":
        outputs["png"] = str(files.write_png(stem.with_name(stem.name + ".png"), grid.gray()))
    if components is not None:
        j, c = files.write_components(stem, components)
        outputs["components_json"], outputs["components_csv"] = str(j), str(c)
    if not getattr(args, "no_plot", False):
        fig = plotting.plot_slice(grid, stem.with_name(stem.name + "_figure.png"), components, title)
        outputs["figure"] = str(fig)
    extra = dict(extra, outputs=outputs)
    outputs["sidecar"] = str(files.write_sidecar(stem, grid, extra))
    return outputs


# ---------------------------------------------------------------------------
# subcommands


def cmd_render(args) -> int:
    if args.from_sidecar:
        spec, _ = files.read_sidecar(args.from_sidecar)
    else:
        spec = _slice_spec(args)
    t0 = time.perf_counter()
    grid = render(spec)
    elapsed = time.perf_counter() - t0
    comps = flood_components(grid)
    stem = Path(args.out) / (args.name or _default_stem(spec))
    extra = {"command": "render", "argv": sys.argv[1:], "seconds": elapsed,
             "trA_flag": args.trA, "length_flag": args.length}
    outputs = _write_render(grid, stem, args, extra, comps)
    summary = {"spec": spec.as_dict(), "counts": grid.counts(), "components": len(comps),
               "standard_found": any(c.is_standard for c in comps), "seconds": elapsed,
               "outputs": outputs}
    if args.json:
        _emit(summary)
    else:
        print(f"rendered {spec.resolution}x{spec.resolution} in {elapsed:.2f}s -> {outputs['pgm']}")
        print(f"{len(comps)} components; counts {grid.counts()}")
    return EXIT_OK


def cmd_components(args) -> int:
    if args.input:
        grid = files.load_grid(args.input, args.sidecar)
        stem = Path(args.out) / (args.name or Path(args.input).stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        comps = flood_components(grid)
        outputs = dict(zip(("components_json", "components_csv"),
                           map(str, files.write_components(stem, comps))))
    else:
        spec = _slice_spec(args)
        grid = render(spec)
        comps = flood_components(grid)
        stem = Path(args.out) / (args.name or _default_stem(spec))
        outputs = _write_render(grid, stem, args, {"command": "components", "argv": sys.argv[1:]}, comps)
    if args.json:
        _emit({"components": [c.as_dict() for c in comps], "outputs": outputs})
    else:
        wr = csv.writer(sys.stdout)
        wr.writerow(files.COMPONENT_FIELDS)
        for c in comps:
            d = c.as_dict()
            wr.writerow([d["label"], d["pixels"], " ".join(map(str, d["bbox"])),
                         d["centroid_re"], d["centroid_im"], str(d["standard"]).lower()])
    return EXIT_OK


def cmd_probe(args) -> int:
    trA = _trA(args)
    if args.trB is None:
        raise UsageError("--trB is required")
    zp, zm = markov_third_trace(trA, args.trB)
    z = args.trAB if args.trAB is not None else (zm if args.root == "minus" else zp)
    triple = TraceTriple(trA, args.trB, z).check()
    verdict = bq_search(triple, _budget(args))
    out = {"triple": {"x": trA, "y": args.trB, "z": z}, "budget": _budget(args).as_dict()}
    out.update(verdict.as_dict())
    _emit(out)
    return EXIT_OK


def _group_from_args(args):
    if args.d is not None:
        return earle_generators(EarleParam(args.d)), "earle"
    if args.lam is not None:
        return cfn_generators(CfnParams(args.lam, args.tau or 0)), "cfn"
    if args.trA is not None and args.trB is not None:
        z = markov_third_trace(args.trA, args.trB)[0]
        return realize_triple(TraceTriple(args.trA, args.trB, z)), "traces"
    return None, None


def cmd_farey_word(args) -> int:
    slope = FareySlope.parse(args.slope)
    word = special_word(slope)
    out = {"slope": str(slope), "word": str(word), "pretty": word.pretty(), "length": len(word)}
    group, kind = _group_from_args(args)
    if group is not None:
        A, B = (group.A, group.B) if kind != "traces" else group
        m = evaluate_word(word, A, B)
        out["group"] = kind
        out["trace"] = m.trace
    if args.json:
        _emit(out)
    else:
        line = f"{out['slope']}\t{out['word']}\t{out['pretty']}"
        if "trace" in out:
            line += f"\t{out['trace']}"
        print(line)
    return EXIT_OK


def _pair_json(pair) -> dict:
    x, y, z = pair.traces
    return {
        "A": pair.A, "B": pair.B,
        "trA": x, "trB": y, "trAB": z,
        "commutator_trace": pair.commutator_trace,
        "fricke_residual": TraceTriple(x, y, z).fricke_residual(),
    }


def cmd_gens(args) -> int:
    if args.lam is None:
        raise UsageError("--lambda is required")
    p = CfnParams(args.lam, args.tau or 0)
    out = {"lambda": p.lam, "tau": p.tau}
    out.update(_pair_json(cfn_generators(p)))
    _emit(out)
    return EXIT_OK


def cmd_earle(args) -> int:
    if args.d is None:
        raise UsageError("--d is required")
    e = EarleParam(args.d)
    out = {"d": e.d}
    out.update(_pair_json(earle_generators(e)))
    out["trace_W21"] = trace_W21(e)
    _emit(out)
    return EXIT_OK


def cmd_constants(args) -> int:
    c0 = analysis.c0_lower_bound()
    trAs = args.trA_list or [2.5, 8.0, 100.0]
    out = {
        "c0_lower_bound": c0,
        "c0_cosh": math.cosh(c0),
        "tube_radius_at_c0": analysis.meyerhoff_radius(c0).r,
        "scaling_constants": {f"{t:g}": analysis.scaling_constant(t) for t in trAs},
        "window_ratio_gaps": {f"{t:g}": analysis.window_ratio_gap(t)
                              for t in trAs if analysis.window_ratio_gap(t) is not None},
        "parabolic_limit": 1.0,
    }
    _emit(out)
    return EXIT_OK


def cmd_scaling(args) -> int:
    trA = _trA(args)
    if args.trB is None:
        raise UsageError("--trB is required")
    rep = analysis.scaling_convergence(trA, args.trB, args.n, trAB=args.trAB)
    wr = csv.writer(sys.stdout)
    wr.writerow(["n", "trace_re", "trace_im", "ratio_re", "ratio_im", "error"])
    for n, tr, z, err in rep.rows():
        tr = tr if tr is not None else complex("nan")
        wr.writerow([n, repr(tr.real), repr(tr.imag), repr(z.real), repr(z.imag), repr(err)])
    print(f"# limit={rep.limit!r} converged_at={rep.converged_at} status={rep.status}", file=sys.stderr)
    if args.out and not args.no_plot:
        from . import plotting

        Path(args.out).mkdir(parents=True, exist_ok=True)
        plotting.plot_scaling(rep, Path(args.out) / f"scaling_trA{trA:g}.png")
    return EXIT_OK


def cmd_twist_check(args) -> int:
    spec = _slice_spec(args)
    grid = render(spec)
    rep = dehn_twist_spot_check(grid, args.samples, args.n, seed=args.seed)
    _emit({"spec": spec.as_dict(), **rep.as_dict()})
    return EXIT_OK


def cmd_figures(args) -> int:
    from . import plotting

    which = list(FIGURE_PRESETS) if args.which == "all" else [args.which]
    budget = _budget(args)
    summary = []
    for key in which:
        grids = []
        for i, (trA, center, width) in enumerate(FIGURE_PRESETS[key]):
            spec = SliceSpec(trA, center, width, args.res, budget, args.root)
            t0 = time.perf_counter()
            grid = render(spec)
            elapsed = time.perf_counter() - t0
            comps = flood_components(grid)
            stem = Path(args.out) / f"figure_{key}_w{width:g}"
            extra = {"command": "figures", "preset": key, "panel": i, "argv": sys.argv[1:],
                     "seconds": elapsed}
            outputs = _write_render(grid, stem, args, extra, comps,
                                    title=f"{FIGURE_TITLES[key]}, width {width:g}")
            grids.append(grid)
            summary.append({"preset": key, "width": width, "components": len(comps),
                            "counts": grid.counts(), "seconds": elapsed, "outputs": outputs})
        if len(grids) > 1 and not args.no_plot:
            plotting.plot_figure_panel(grids, Path(args.out) / f"figure_{key}_panel.png",
                                       FIGURE_TITLES[key])
    if args.json:
        _emit(summary)
    else:
        for s in summary:
            print(f"{s['preset']:>6} width {s['width']:>8g}: {s['components']} components, "
                  f"{s['seconds']:.2f}s -> {s['outputs']['pgm']}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qfslice", description=__doc__)
    p.add_argument("--config", help="flat key=value file mirroring the flags")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("render", help="render a linear slice")
    _add_slice_flags(s)
    s.add_argument("--from-sidecar", help="re-render from a sidecar JSON")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("components", help="label connected components")
    _add_slice_flags(s)
    s.add_argument("--input", help="existing PGM (sidecar JSON alongside)")
    s.add_argument("--sidecar")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_components)

    s = sub.add_parser("probe", help="oracle verdict at one point")
    s.add_argument("--trA", type=float)
    s.add_argument("--length", type=float)
    s.add_argument("--trB", type=parse_complex)
    s.add_argument("--trAB", type=parse_complex)
    s.add_argument("--root", choices=["plus", "minus"], default="plus")
    s.add_argument("--json", action="store_true", help="accepted for symmetry; output is JSON")
    _add_budget_flags(s)
    s.set_defaults(func=cmd_probe)

    s = sub.add_parser("farey-word", help="special word of a slope")
    s.add_argument("slope")
    s.add_argument("--lambda", dest="lam", type=parse_complex)
    s.add_argument("--tau", type=parse_complex)
    s.add_argument("--d", type=parse_complex)
    s.add_argument("--trA", type=parse_complex)
    s.add_argument("--trB", type=parse_complex)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_farey_word)

    s = sub.add_parser("gens", help="generators from complex Fenchel-Nielsen data")
    s.add_argument("--lambda", dest="lam", type=parse_complex)
    s.add_argument("--tau", type=parse_complex)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_gens)

    s = sub.add_parser("earle", help="Earle slice generators")
    s.add_argument("--d", type=parse_complex)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_earle)

    s = sub.add_parser("constants", help="c0 bound and scaling constants")
    s.add_argument("--trA", dest="trA_list", type=float, nargs="*")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("scaling", help="ratio table Tr A^n B / Tr A^(n-1) B as CSV")
    s.add_argument("--trA", type=float)
    s.add_argument("--length", type=float)
    s.add_argument("--trB", type=parse_complex)
    s.add_argument("--trAB", type=parse_complex)
    s.add_argument("--n", type=int, default=40)
    s.add_argument("--out", help="directory for the convergence plot")
    s.add_argument("--no-plot", action="store_true")
    s.set_defaults(func=cmd_scaling)

    s = sub.add_parser("twist-check", help="Dehn twist spot check on a render")
    _add_slice_flags(s)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_twist_check)

    s = sub.add_parser("figures", help="reproduce the published slice figures")
    s.add_argument("--which", choices=[*FIGURE_PRESETS, "all"], default="all")
    s.add_argument("--res", type=int, default=512)
    s.add_argument("--root", choices=["plus", "minus", "both"], default="plus")
    s.add_argument("--out", default="out")
    s.add_argument("--format", choices=["pgm", "png"], default="pgm")
    s.add_argument("--no-plot", action="store_true")
    s.add_argument("--json", action="store_true")
    _add_budget_flags(s)
    s.set_defaults(func=cmd_figures)
    return p


def read_config(path) -> list[str]:
    """Turn 'key = value' lines into flag tokens; blank lines and # comments skipped."""
    tokens = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = key.strip().replace("_", "-"), value.strip()
        if value.lower() in ("true", "yes", "on"):
            tokens.append(f"--{key}")
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            tokens.extend([f"--{key}", value])
    return tokens


def _expand_config(argv: list[str]) -> list[str]:
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    # config tokens go right after the subcommand so explicit flags override them
    cmd_at = next((k for k, a in enumerate(rest) if not a.startswith("-")), None)
    if cmd_at is None:
        raise UsageError("--config needs a subcommand")
    return rest[:cmd_at + 1] + read_config(path) + rest[cmd_at + 1:]


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_config(argv)
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if not getattr(args, "func", None):
            build_parser().print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"qfslice: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        print(f"qfslice: numeric domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
