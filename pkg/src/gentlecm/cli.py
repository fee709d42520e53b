"""Command-line front end.

Exit status: 0 success, 1 rejected input or failed check, 2 usage error,
3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path as FilePath

from . import __version__
from .corpus import load_algebra
from .diffmod import (Inconclusive, SquareNonzeroError, decompose, dump_module,
                      indecomposability, isomorphism_verdict, load_module, split_projectives,
                      twist)
from .folding import GradingError, band_complex, dump_complex, string_complex
from .linalg import GF, jordan_block
from .matrix_problem import (B_band, B_string, G_object, SigmaError, build_Y, dump_sigma_matrix,
                             gamma, gamma_b)
from .quiver import InfiniteGlobalDimensionError, PresentationError
from .strings import (StringError, band_object, canonical_band, canonical_string,
                      enumerate_bands, enumerate_strings, format_letters, grading,
                      parse_letters, rotation_sign, string_object, twist_target, validate_band,
                      validate_string, winding)
from .surface import build_surface, finite_gldim_geometric, invariants, render_svg

DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


# ------------------------------------------------------------- helpers
def _out(args):
    return args.stdout


def _emit(args, text: str = "") -> None:
    print(text, file=_out(args))


def _write_target(args, target: str, text: str) -> None:
    if target == "-":
        _out(args).write(text)
    else:
        FilePath(target).write_text(text)


def _algebra(args):
    return load_algebra(args.algebra)


def _field(args):
    return GF(args.prime)


def _jordan(args, F):
    if not args.jordan:
        return jordan_block(F, 1, 1)
    try:
        lam, n = (int(x) for x in args.jordan.split(","))
    except ValueError:
        raise UsageError("--jordan expects LAMBDA,N") from None
    if n < 1 or lam % F.p == 0:
        raise UsageError("--jordan needs a nonzero eigenvalue and a positive size")
    return jordan_block(F, lam, n)


def _word(args, A):
    """The string or band named on the command line, as ``(kind, word)``."""
    if bool(args.string) == bool(args.band):
        raise UsageError("give exactly one of --string and --band")
    if args.string:
        return "string", validate_string(A, parse_letters(A, args.string))
    return "band", validate_band(A, parse_letters(A, args.band))


def _object(args, A, F):
    kind, w = _word(args, A)
    if kind == "string":
        return kind, w, None, string_object(A, F, w)
    J = _jordan(args, F)
    return kind, w, J, band_object(A, F, w, J)


def _module_summary(M) -> str:
    mult = " ".join(f"{v}={d}" for v, d in zip(M.algebra.vertices, M.mult))
    return f"multiplicities {mult}; dimension {M.dimension}"


def _add_word_options(p, jordan: bool = True) -> None:
    p.add_argument("--string", help="comma-separated letters, e.g. \"a,b'^-1\"")
    p.add_argument("--band", help="cyclic word in the same syntax")
    if jordan:
        p.add_argument("--jordan", metavar="LAMBDA,N", help="band parameter jordan(LAMBDA, N)")


# ------------------------------------------------------------ commands
def cmd_validate(args) -> int:
    try:
        A = load_algebra(args.algebra)
    except InfiniteGlobalDimensionError as exc:
        A = load_algebra(args.algebra, check_gldim=False)
        _emit(args, f"gentle, infinite global dimension, dim {A.dimension} ({exc})")
        return 1
    _emit(args, f"gentle, finite global dimension, dim {A.dimension}")
    return 0


def cmd_info(args) -> int:
    A = _algebra(args)
    S = build_surface(A)
    inv = invariants(S)
    _emit(args, f"vertices {len(A.vertices)}, arrows {len(A.arrows)}, relations {len(A.relations)}")
    _emit(args, f"dimension {A.dimension}; trivial extension {A.trivial_extension().dimension}")
    _emit(args, "projectives " + " ".join(f"P{v}={A.dim_projective(v)}" for v in A.vertices))
    _emit(args, "maximal paths " + " ".join(A.format_path(w) for w in A.maximal_paths_alg))
    _emit(args, f"surface: genus {inv.genus}, boundary {inv.boundary_components}, "
                f"marked points {inv.marked_points}")
    _emit(args, f"euler characteristic {inv.euler_characteristic}; "
                f"every corner on the boundary: {'yes' if finite_gldim_geometric(S) else 'no'}")
    return 0


def cmd_enumerate(args) -> int:
    if not (args.strings or args.bands):
        raise UsageError("choose --strings and/or --bands")
    A = _algebra(args)
    lengths: dict[str, Counter] = {}
    if args.strings:
        ss = enumerate_strings(A, args.max_letters)
        lengths["strings"] = Counter(len(s) for s in ss)
        for s in ss:
            _emit(args, f"string {len(s)} {format_letters(A, s.letters)}")
        _emit(args, f"# {len(ss)} strings")
    if args.bands:
        bs = enumerate_bands(A, args.max_letters)
        lengths["bands"] = Counter(len(b) for b in bs)
        for b in bs:
            _emit(args, f"band {len(b)} {format_letters(A, b.letters)} winding {winding(b)}")
        _emit(args, f"# {len(bs)} bands")
    if args.plot:
        _plot_counts(lengths, args.plot)
    return 0


def _plot_counts(lengths, path: str) -> None:
    try:
        import matplotlib
    except ImportError:
        raise UsageError("--plot needs matplotlib (install the 'plot' extra)") from None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(5, 3))
    for label, counts in lengths.items():
        xs = sorted(counts)
        ax.plot(xs, [counts[x] for x in xs], marker="o", label=label)
    ax.set_xlabel("letters")
    ax.set_ylabel("count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if path.endswith(".svg") else None)
    plt.close(fig)


def cmd_object(args) -> int:
    A, F = _algebra(args), _field(args)
    kind, w, J, M = _object(args, A, F)
    canon = canonical_string(w) if kind == "string" else canonical_band(w)
    _emit(args, f"{kind} {format_letters(A, w.letters)} (canonical {format_letters(A, canon.letters)})")
    _emit(args, _module_summary(M))
    v = indecomposability(M, seed=args.seed)
    _emit(args, f"indecomposable: {'yes' if v.indecomposable else 'no'} ({v.method})")
    if args.dump:
        _write_target(args, args.dump, dump_module(M))
    if args.complex:
        P = (string_complex(A, F, w) if kind == "string" else band_complex(A, F, w, J))
        _write_target(args, args.complex, dump_complex(P))
    return 0


def cmd_decompose(args) -> int:
    A, F = _algebra(args), _field(args)
    M = load_module(A, FilePath(args.input).read_text(), F)
    _emit(args, "input: " + _module_summary(M))
    R, counts = split_projectives(M)
    for v, c in counts.items():
        _emit(args, f"contractible P{v}: {c}")
    parts = decompose(R, seed=args.seed)
    for i, X in enumerate(parts):
        _emit(args, f"summand {i}: " + _module_summary(X))
        if args.dumps:
            _out(args).write(dump_module(X))
    _emit(args, f"# {len(parts)} indecomposable radical summands")
    return 0


def cmd_winding(args) -> int:
    A = _algebra(args)
    kind, w = _word(args, A)
    if kind == "string":
        _emit(args, "grading " + " ".join(map(str, grading(w, args.anchor))))
        return 0
    mu = grading(w, args.anchor)
    _emit(args, f"winding {winding(w)}")
    _emit(args, "grading " + (" ".join(map(str, mu)) if mu is not None else "none"))
    return 0


def cmd_twist(args) -> int:
    A, F = _algebra(args), _field(args)
    lam = args.lam % F.p
    if lam == 0:
        raise UsageError("--lambda must be nonzero in the field")
    kind, w, J, M = _object(args, A, F)
    X = twist(M, lam)
    if kind == "string":
        target = M
        _emit(args, "expected: the same string object")
    else:
        Jt = twist_target(F, w, J, lam)
        target = band_object(A, F, w, Jt)
        eps = 1 if w.letters[-1].direct else -1
        _emit(args, f"winding {winding(w)}, sign {eps}, rotation sign {rotation_sign(w)}")
        _emit(args, f"expected parameter {Jt.tolist()}")
    verdict = isomorphism_verdict(X, target, seed=args.seed)
    _emit(args, f"isomorphic: {'yes' if verdict.isomorphic else 'no'} ({verdict.method})")
    if args.dump:
        _write_target(args, args.dump, dump_module(X))
    return 0 if verdict.isomorphic else 1


def cmd_matrixify(args) -> int:
    A, F = _algebra(args), _field(args)
    Y = build_Y(A, args.order.split(",") if args.order else None)
    if args.input:
        M = load_module(A, FilePath(args.input).read_text(), F)
        B = G_object(Y, split_projectives(M)[0])
    else:
        kind, w, J, M = _object(args, A, F)
        if args.canonical:
            B = B_string(Y, F, gamma(Y, w)) if kind == "string" else B_band(Y, F, gamma_b(Y, w), J)
        else:
            B = G_object(Y, M)
    _emit(args, "# Y: " + str(Y))
    _out(args).write(dump_sigma_matrix(B))
    return 0


def cmd_render(args) -> int:
    A = _algebra(args)
    curves = [validate_string(A, parse_letters(A, s)) for s in args.string or ()]
    curves += [validate_band(A, parse_letters(A, b)) for b in args.band or ()]
    _write_target(args, args.svg_out, render_svg(build_surface(A), curves))
    return 0


def cmd_selftest(args) -> int:
    from .selftest import CHECKS, run_all
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_run_check, range(len(CHECKS))))
        for r in results:
            _emit(args, r.line())
    else:
        results = run_all(_out(args))
    failed = [r.number for r in results if not r.passed]
    _emit(args, f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def _run_check(i: int):
    from .selftest import CHECKS
    return CHECKS[i]()


# ------------------------------------------------------------- parser
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gentlecm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gentlecm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, algebra=True):
        p = sub.add_parser(name, help=help_text)
        if algebra:
            p.add_argument("algebra", help="algebra file, or builtin:a0 / builtin:cycle3")
        p.add_argument("--prime", type=int, default=5, help="field size (default 5)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized steps")
        p.set_defaults(func=func)
        return p

    command("validate", cmd_validate, "check gentleness and finite global dimension")
    command("info", cmd_info, "dimensions, maximal paths and surface invariants")
    p = command("enumerate", cmd_enumerate, "list canonical strings and bands")
    p.add_argument("--strings", action="store_true")
    p.add_argument("--bands", action="store_true")
    p.add_argument("--max-letters", type=int, default=4)
    p.add_argument("--plot", metavar="FILE", help="plot counts per length (needs matplotlib)")
    p = command("object", cmd_object, "build a string or band object")
    _add_word_options(p)
    p.add_argument("--dump", metavar="PATH", help="write the module dump ('-' for stdout)")
    p.add_argument("--complex", metavar="PATH", help="write the graded complex, if one exists")
    p = command("decompose", cmd_decompose, "split a dumped module into indecomposables")
    p.add_argument("--input", required=True, help="module dump")
    p.add_argument("--dumps", action="store_true", help="print a dump of every summand")
    for name in ("winding", "grade"):
        p = command(name, cmd_winding, "winding number and grading of a string or band")
        _add_word_options(p, jordan=False)
        p.add_argument("--anchor", type=int, default=0, help="degree of the first crossing")
    p = command("twist", cmd_twist, "twist an object and compare with the predicted object")
    _add_word_options(p)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--dump", metavar="PATH")
    p = command("matrixify", cmd_matrixify, "emit G(M), or the canonical matrix with --canonical")
    _add_word_options(p)
    p.add_argument("--input", help="module dump instead of --string/--band")
    p.add_argument("--canonical", action="store_true", help="emit B_w instead of G(M)")
    p.add_argument("--order", help="comma-separated order of the maximal paths")
    p = command("render", cmd_render, "draw the surface model as SVG")
    p.add_argument("--svg-out", required=True, metavar="PATH")
    p.add_argument("--string", action="append", help="curve to draw (repeatable)")
    p.add_argument("--band", action="append", help="closed curve to draw (repeatable)")
    p = command("selftest", cmd_selftest, "run the acceptance checks", algebra=False)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None, stdout=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    args.stdout = stdout or sys.stdout
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gentlecm: usage error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"gentlecm: {exc}", file=sys.stderr)
        return 1
    except (PresentationError, StringError, GradingError, SigmaError, SquareNonzeroError,
            Inconclusive, KeyError, ValueError) as exc:
        print(f"gentlecm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything else is a bug
        print(f"gentlecm: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
