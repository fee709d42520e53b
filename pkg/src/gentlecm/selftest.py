"""Acceptance checks over the built-in algebras, shared by ``gentlecm selftest`` and the tests.

Each check returns a :class:`CheckResult`; ``passed`` is computed from exact
comparisons, the counts in ``detail`` say what was covered.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import build_corpus, jordan_parameters, load_algebra
from .diffmod import (DifferentialModule, Inconclusive, conjugate, decompose, direct_sum,
                      hom, indecomposability, intertwines, isomorphism_classes, isomorphism_verdict,
                      random_automorphism, suspend, twist)
from .folding import GradingError, band_complex, fold, string_complex
from .linalg import GF, jordan_block
from .matrix_problem import (B_band, B_string, G_morphism, G_object, SigmaError, build_Y,
                             gamma, gamma_b, sigma_invariants, sigma_isomorphism)
from .strings import (band_object, enumerate_bands, enumerate_strings, grading, parse_letters,
                      string_object, twist_target, validate_band, winding)
from .surface import build_surface, invariants

__all__ = ["CheckResult", "CHECKS", "run_all"]

SIX_LETTER_BAND = "a,b,ab'^-1,a',b',a'b^-1"


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        info = ", ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"[{status}] criterion {self.number}: {self.title} ({info}; {self.seconds:.2f}s)"


_CACHE: dict = {}


def _algebra(name: str):
    key = ("alg", name)
    if key not in _CACHE:
        _CACHE[key] = load_algebra(f"builtin:{name}")
    return _CACHE[key]


def _corpus(name: str, p: int = 5):
    key = ("corpus", name, p)
    if key not in _CACHE:
        _CACHE[key] = build_corpus(_algebra(name), GF(p))
    return _CACHE[key]


def _timed(number: int, title: str, fn) -> CheckResult:
    t = time.perf_counter()
    passed, detail = fn()
    return CheckResult(number, title, bool(passed), detail, time.perf_counter() - t)


# -------------------------------------------------------------- criteria
def check_torus_example() -> CheckResult:
    def run():
        A = load_algebra("builtin:a0")
        maximal = sorted(A.format_path(w) for w in A.maximal_paths_alg)
        inv = invariants(build_surface(A))
        ok = A.has_finite_gldim() and maximal == sorted(["ab'", "a'b"]) and (inv.genus, inv.boundary_components, inv.marked_points) == (1, 1, 2)
        return ok, {"maximal": maximal, "genus": inv.genus, "boundary": inv.boundary_components,
                    "marked": inv.marked_points}
    return _timed(1, "torus algebra: gentle, two maximal paths, genus 1 with one boundary", run)


def check_cycle_band() -> CheckResult:
    def run():
        A, F = load_algebra("builtin:cycle3"), GF(5)
        b = validate_band(A, parse_letters(A, "abd"))
        ok = True
        for lam in range(1, 5):
            M = band_object(A, F, b, [[lam]])
            expected = DifferentialModule(A, F, (0, 1, 0), {"abd": [[lam]]})
            ok &= M == expected and M.dimension_vector() == (1, 2, 1)
        w = winding(b)
        ok &= w != 0 and grading(b) is None
        try:
            band_complex(A, F, b, [[1]])
            ok = False
        except GradingError:
            pass
        return ok, {"winding": w, "dimension_vector": M.dimension_vector()}
    return _timed(2, "single-letter band on the 3-cycle is (P2, lam*abd) and ungradable", run)


def check_six_letter_band() -> CheckResult:
    def run():
        A, F = load_algebra("builtin:a0"), GF(5)
        b = validate_band(A, parse_letters(A, SIX_LETTER_BAND))
        ok = True
        names = ["a", "b", "ab'", "a'", "b'", "a'b"]
        for n in (1, 2):
            J = jordan_block(F, 2, n)
            M = band_object(A, F, b, J)
            ok &= M.mult == (2 * n, 2 * n, 2 * n)
            used = sorted(A.format_path(A.paths[k]) for k in M.coeffs)
            ok &= used == sorted(names)
            # the last letter carries J, the others identity blocks
            for name in names:
                C = M.coefficient(name)
                ok &= int(np.count_nonzero(C)) == int(np.count_nonzero(J if name == "a'b" else F.eye(n)))
        ok &= grading(b) is None and abs(winding(b)) == 2
        return ok, {"multiplicities": M.mult, "winding": winding(b)}
    return _timed(3, "six-letter band on the torus algebra: (P1+P2+P3)^(2n), no grading", run)


def check_sweep() -> CheckResult:
    def run():
        counts = Counter()
        ok = True
        for name in ("a0", "cycle3"):
            entries = _corpus(name)
            for e in entries:
                M = e.module
                ok &= (M.phi @ M.phi).is_zero() and M.is_radical()
                v = indecomposability(M, seed=0, require_certificate=True)
                ok &= v.indecomposable and v.certified
                counts[name] += 1
            strings = [e.module for e in entries if e.kind == "string"]
            try:
                classes = isomorphism_classes(strings, seed=0)
            except Inconclusive:
                return False, {"inconclusive": name}
            ok &= len(classes) == len(strings)
        return ok, dict(counts)
    return _timed(4, "square zero, radical, indecomposable, strings pairwise non-isomorphic", run)


def check_decomposition(trials: int = 50) -> CheckResult:
    def run():
        import random
        A, F = _algebra("a0"), GF(5)
        pool = ([string_object(A, F, s) for s in enumerate_strings(A, 4)]
                + [band_object(A, F, b, jordan_block(F, lam, n))
                   for b in enumerate_bands(A, 4) for lam in (1, 2) for n in (1, 2)])
        rng = random.Random(2024)
        good = 0
        for t in range(trials):
            k = rng.randint(2, 4)
            pick = [pool[rng.randrange(len(pool))] for _ in range(k)]
            S = direct_sum(*pick)
            S = conjugate(S, random_automorphism(A, F, S.mult, seed=t))
            parts = decompose(S, seed=t)
            if len(parts) != k:
                continue
            classes = isomorphism_classes(pick + parts, seed=t)
            if all(sum(1 for j in c if j < k) == sum(1 for j in c if j >= k) for c in classes):
                good += 1
        return good == trials, {"recovered": good, "trials": trials}
    return _timed(5, "random direct sums decompose into the original summands", run)


def _explicit_iso(M, N, seed) -> bool:
    f = isomorphism_verdict(M, N, seed=seed).isomorphism
    return f is not None and intertwines(f, M, N) and f.top_invertible()


def check_twist() -> CheckResult:
    def run():
        F = GF(5)
        bands = strings = 0
        ok = True
        for name in ("a0", "cycle3"):
            A = _algebra(name)
            for b in enumerate_bands(A, 6):
                if abs(winding(b)) > 2:
                    continue
                for J in jordan_parameters(F):
                    M = band_object(A, F, b, J)
                    for lam in range(1, 5):
                        N = band_object(A, F, b, twist_target(F, b, J, lam))
                        ok &= _explicit_iso(twist(M, lam), N, lam)
                        bands += 1
            for s in enumerate_strings(A, 8):
                M = string_object(A, F, s)
                for lam in range(2, 5):
                    ok &= _explicit_iso(twist(M, lam), M, lam)
                    strings += 1
        return ok, {"band_checks": bands, "string_checks": strings}
    return _timed(6, "twisting rescales band parameters by lam^(eps*w) and fixes strings", run)


def check_gradability() -> CheckResult:
    def run():
        F = GF(5)
        ok = True
        counts = Counter()
        for name in ("a0", "cycle3"):
            A = _algebra(name)
            for b in enumerate_bands(A, 6):
                gradable = grading(b) is not None
                try:
                    band_complex(A, F, b, [[1]])
                    built = True
                except GradingError:
                    built = False
                ok &= gradable == (winding(b) == 0) == built
                counts["bands"] += 1
            for s in enumerate_strings(A, 8):
                g0, g3 = grading(s, 0), grading(s, 3)
                ok &= len({y - x for x, y in zip(g0, g3)}) == 1
                counts["strings"] += 1
        return ok, dict(counts)
    return _timed(7, "bands are gradable exactly when the winding number vanishes", run)


def check_folding() -> CheckResult:
    def run():
        F = GF(5)
        ok = True
        n = 0
        for name in ("a0", "cycle3"):
            A = _algebra(name)
            for s in enumerate_strings(A, 8):
                M = string_object(A, F, s)
                for anchor in (0, 3):
                    P = string_complex(A, F, s, anchor)
                    ok &= fold(P) == M
                    ok &= fold(P).dimension == sum(P.term_dimension(k) for k in P.support)
                n += 1
            for e in _corpus(name):
                ok &= suspend(suspend(e.module)) == e.module
        return ok, {"strings": n}
    return _timed(8, "folding string complexes gives string objects; suspension is an involution", run)


def _functor_verdicts(name: str, order) -> tuple[bool, Counter]:
    A, F = _algebra(name), GF(5)
    Y = build_Y(A, order)
    ok = True
    counts = Counter()
    for i, e in enumerate(_corpus(name)):
        M = e.module
        try:
            GM = G_object(Y, M)
        except SigmaError:
            ok = False
            continue
        counts["objects"] += 1
        ok &= not GM.is_zero()
        if e.kind == "string":
            ok &= GM == B_string(Y, F, gamma(Y, e.word))
        else:
            T, certified = sigma_isomorphism(GM, B_band(Y, F, gamma_b(Y, e.word), e.J), seed=i)
            ok &= T is not None
            if T is not None:
                T.validate()
                ok &= T.is_invertible()
        # G of an endomorphism is a morphism of (Y, sigma)-matrices
        if i % 25 == 0:
            rng = np.random.default_rng(i)
            G_morphism(Y, hom(M, M).random_element(rng), M, M)
            counts["morphisms"] += 1
    for v in A.vertices:
        mult = tuple(2 if u == v else 0 for u in A.vertices)
        ok &= G_object(Y, DifferentialModule(A, F, mult)).is_zero()
    return ok, counts


def check_functor() -> CheckResult:
    def run():
        verdicts = {}
        detail = {}
        for name in ("a0", "cycle3"):
            A = _algebra(name)
            orders = [None, list(reversed(sorted(A.maximal_paths_alg)))]
            verdicts[name] = [_functor_verdicts(name, o) for o in orders]
            detail[name] = dict(verdicts[name][0][1])
        ok = all(v[0][0] and v[1][0] and v[0][1] == v[1][1] for v in verdicts.values())
        return ok, detail
    return _timed(9, "G respects the matrix invariants and sends strings and bands to B_w", run)


def check_uniqueness() -> CheckResult:
    """Every image matches its own canonical matrix and the canonical matrices
    are pairwise non-isomorphic, so by transitivity no image matches two."""
    def run():
        F = GF(5)
        ok = True
        matched = pairs = 0
        for name in ("a0", "cycle3"):
            A = _algebra(name)
            Y = build_Y(A)
            entries = _corpus(name)
            canon = []
            for i, e in enumerate(entries):
                GM = G_object(Y, e.module)
                if e.kind == "string":
                    B = B_string(Y, F, gamma(Y, e.word))
                    own = GM == B
                else:
                    B = B_band(Y, F, gamma_b(Y, e.word), e.J)
                    own = sigma_isomorphism(GM, B, seed=i, image_only=True)[0] is not None
                canon.append(B)
                ok &= own
                matched += own
            buckets: dict = {}
            for j, B in enumerate(canon):
                buckets.setdefault((B.sizes, sigma_invariants(B)), []).append(j)
            for idx in buckets.values():
                for x, i in enumerate(idx):
                    for j in idx[x + 1:]:
                        T, certified = sigma_isomorphism(canon[i], canon[j], seed=j, image_only=True)
                        pairs += 1
                        if not certified:
                            return False, {"uncertified": f"{entries[i].label} / {entries[j].label}"}
                        ok &= T is None
        return ok, {"matched": matched, "pairs_separated": pairs}
    return _timed(10, "each corpus object matches exactly one canonical matrix", run)


CHECKS = [check_torus_example, check_cycle_band, check_six_letter_band, check_sweep,
          check_decomposition, check_twist, check_gradability, check_folding, check_functor,
          check_uniqueness]


def run_all(stream=None) -> list[CheckResult]:
    out = []
    for check in CHECKS:
        r = check()
        out.append(r)
        if stream is not None:
            print(r.line(), file=stream, flush=True)
    return out
