"""Homotopy strings and bands, their gradings, and the associated modules.

A letter is a nonzero nontrivial path read forwards (direct) or backwards
(inverse).  A string visits a sequence of crossings ``v_0, ..., v_n`` (vertices
of the quiver); letter ``i`` joins ``v_{i-1}`` to ``v_i``.  A band is a cyclic
word whose crossings are ``v_0, ..., v_{r-1}``; its last letter joins
``v_{r-1}`` back to ``v_0`` and carries the module parameter.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffmod import DifferentialModule
from .linalg import Field, is_invertible
from .quiver import GentlePresentation, Path

__all__ = [
    "Letter",
    "HomotopyString",
    "HomotopyBand",
    "StringError",
    "junction_error",
    "validate_string",
    "validate_band",
    "canonical_string",
    "canonical_band",
    "enumerate_strings",
    "enumerate_bands",
    "string_object",
    "band_object",
    "winding",
    "grading",
    "twist_target",
    "rotation_sign",
    "parse_letters",
    "format_letters",
]


class StringError(ValueError):
    def __init__(self, kind: str, detail: str = ""):
        self.kind = kind
        super().__init__(f"{kind}: {detail}" if detail else kind)


@dataclass(frozen=True)
class Letter:
    path: Path
    inverse: bool = False

    @property
    def start(self) -> str:
        return self.path.target if self.inverse else self.path.source

    @property
    def end(self) -> str:
        return self.path.source if self.inverse else self.path.target

    @property
    def direct(self) -> bool:
        return not self.inverse

    def inverted(self) -> "Letter":
        return Letter(self.path, not self.inverse)

    def key(self):
        return (self.path.sort_key(), self.inverse)

    def __str__(self) -> str:
        return str(self.path) + ("^-1" if self.inverse else "")


def _word_key(letters) -> tuple:
    return tuple(x.key() for x in letters)


def _invert_word(letters) -> tuple[Letter, ...]:
    return tuple(x.inverted() for x in reversed(letters))


@dataclass(frozen=True)
class HomotopyString:
    """A homotopy string; ``vertex`` is used only by the trivial string."""

    letters: tuple[Letter, ...]
    vertex: str | None = None

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "HomotopyString":
        return HomotopyString(_invert_word(self.letters), self.vertex)

    def crossings(self) -> list[str]:
        if not self.letters:
            return [self.vertex]
        return [self.letters[0].start] + [x.end for x in self.letters]

    def key(self):
        return _word_key(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return f"e({self.vertex})"
        return ",".join(map(str, self.letters))


@dataclass(frozen=True)
class HomotopyBand:
    letters: tuple[Letter, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "HomotopyBand":
        return HomotopyBand(_invert_word(self.letters))

    def rotate(self, k: int) -> "HomotopyBand":
        k %= len(self.letters)
        return HomotopyBand(self.letters[k:] + self.letters[:k])

    def crossings(self) -> list[str]:
        return [self.letters[0].start] + [x.end for x in self.letters[:-1]]

    def key(self):
        return _word_key(self.letters)

    def __str__(self) -> str:
        return ",".join(map(str, self.letters))


# ------------------------------------------------------------- validation
def junction_error(A: GentlePresentation, x: Letter, y: Letter) -> str | None:
    """Why ``x`` cannot be followed by ``y`` (None if the junction is allowed)."""
    if x.end != y.start:
        return "endpoint mismatch"
    px, py = x.path.arrows, y.path.arrows
    if x.direct and y.direct:
        if (px[-1], py[0]) not in A.relations:
            return "composable-without-relation"
    elif x.inverse and y.inverse:
        if (py[-1], px[0]) not in A.relations:
            return "composable-without-relation"
    elif x.direct:
        if x.path == y.path:
            return "unreduced"
        if px[-1] == py[-1]:
            return "shared-arrow"
    else:
        if x.path == y.path:
            return "unreduced"
        if px[0] == py[0]:
            return "shared-arrow"
    return None


def _check_letter(A: GentlePresentation, x: Letter) -> None:
    if x.path.is_trivial:
        raise StringError("trivial letter")
    if not A.is_nonzero_word(x.path.arrows):
        raise StringError("zero letter", str(x.path))


def validate_string(A: GentlePresentation, letters) -> HomotopyString:
    letters = tuple(letters)
    if not letters:
        raise StringError("empty string")
    for x in letters:
        _check_letter(A, x)
    for i, (x, y) in enumerate(zip(letters, letters[1:]), start=1):
        err = junction_error(A, x, y)
        if err:
            raise StringError(err, f"between letters {i} and {i + 1} ({x}, {y})")
    return HomotopyString(letters)


def _is_primitive(letters) -> bool:
    r = len(letters)
    for k in range(1, r):
        if r % k == 0 and letters[k:] + letters[:k] == letters:
            return False
    return True


def validate_band(A: GentlePresentation, letters) -> HomotopyBand:
    letters = tuple(letters)
    if not letters:
        raise StringError("empty band")
    for x in letters:
        _check_letter(A, x)
    r = len(letters)
    for i in range(r):
        x, y = letters[i], letters[(i + 1) % r]
        err = junction_error(A, x, y)
        if err:
            raise StringError(err, f"between letters {i + 1} and {(i + 1) % r + 1} ({x}, {y})")
    if not _is_primitive(letters):
        raise StringError("non-primitive", "band is a proper power")
    return HomotopyBand(letters)


# --------------------------------------------------------- canonical forms
def canonical_string(w: HomotopyString) -> HomotopyString:
    inv = w.inverse()
    return inv if inv.key() < w.key() else w


def _band_orbit(w: HomotopyBand):
    for base in (w, w.inverse()):
        for k in range(len(base)):
            yield base.rotate(k)


def canonical_band(w: HomotopyBand) -> HomotopyBand:
    return min(_band_orbit(w), key=lambda b: b.key())


# ------------------------------------------------------------- enumeration
def all_letters(A: GentlePresentation) -> list[Letter]:
    out = []
    for p in A.paths:
        if not p.is_trivial:
            out.append(Letter(p, False))
            out.append(Letter(p, True))
    return sorted(out, key=Letter.key)


def _successors(A: GentlePresentation):
    letters = all_letters(A)
    return letters, {x: [y for y in letters if junction_error(A, x, y) is None] for x in letters}


def enumerate_strings(A: GentlePresentation, max_letters: int) -> list[HomotopyString]:
    if max_letters < 1:
        raise ValueError("bound must be at least 1")
    letters, succ = _successors(A)
    out = []

    def extend(word):
        w = HomotopyString(tuple(word))
        if w.key() <= w.inverse().key():
            out.append(w)
        if len(word) < max_letters:
            for y in succ[word[-1]]:
                word.append(y)
                extend(word)
                word.pop()

    for x in letters:
        extend([x])
    return sorted(out, key=lambda w: (len(w), w.key()))


def enumerate_bands(A: GentlePresentation, max_letters: int) -> list[HomotopyBand]:
    if max_letters < 1:
        raise ValueError("bound must be at least 1")
    letters, succ = _successors(A)
    out = []

    def extend(word):
        first = word[0]
        if junction_error(A, word[-1], first) is None and _is_primitive(tuple(word)):
            b = HomotopyBand(tuple(word))
            if canonical_band(b) == b:
                out.append(b)
        if len(word) < max_letters:
            for y in succ[word[-1]]:
                # a canonical band starts with its smallest letter
                if y.key() < first.key():
                    continue
                word.append(y)
                extend(word)
                word.pop()

    for x in letters:
        extend([x])
    return sorted(out, key=lambda w: (len(w), w.key()))


# -------------------------------------------------------- winding, grading
def step(x: Letter) -> int:
    """Degree change along a letter: a direct letter maps the later crossing
    to the earlier one, which therefore sits one degree higher."""
    return -1 if x.direct else 1


def winding(w: HomotopyBand) -> int:
    return sum(1 if x.direct else -1 for x in w.letters)


def grading(w, anchor: int = 0) -> list[int] | None:
    """Degrees of the crossings, starting from ``anchor`` at the first one."""
    if isinstance(w, HomotopyBand):
        if winding(w) != 0:
            return None
        letters = w.letters[:-1]
    else:
        letters = w.letters
    out = [anchor]
    for x in letters:
        out.append(out[-1] + step(x))
    return out


def rotation_sign(w: HomotopyBand) -> int:
    """+1 when the first and last letters point the same way, else -1."""
    return 1 if w.letters[0].direct == w.letters[-1].direct else -1


def twist_target(F: Field, w: HomotopyBand, J, lam) -> np.ndarray:
    """Parameter ``lam^(eps * winding) J`` of the band module isomorphic to the twist."""
    eps = 1 if w.letters[-1].direct else -1
    e = eps * winding(w)
    lam = F.scalar(lam)
    c = pow(int(lam), e, F.p) if hasattr(F, "p") else lam ** e
    return F.reduce(F.array(J) * c)


# ----------------------------------------------------------------- objects
def _copy_layout(A: GentlePresentation, crossings, n: int = 1):
    """Copy indices of each crossing inside its vertex's multiplicity space."""
    vi = A.vertex_index
    mult = [0] * len(A.vertices)
    copies = []
    for v in crossings:
        k = vi[v]
        copies.append(list(range(mult[k], mult[k] + n)))
        mult[k] += n
    return tuple(mult), copies


def _place(A, F, coeffs, mult, x: Letter, src_copies, dst_copies, block):
    """Put ``block`` on the component of letter ``x`` joining two crossings.

    ``src_copies`` belong to the crossing before the letter, ``dst_copies`` to
    the one after.  The map of a direct letter goes from its end to its start.
    """
    k = A.path_index[x.path]
    s, t = A.path_ends[k]
    if k not in coeffs:
        coeffs[k] = F.zeros(mult[s], mult[t])
    rows, cols = (src_copies, dst_copies) if x.direct else (dst_copies, src_copies)
    coeffs[k][np.ix_(rows, cols)] = F.reduce(coeffs[k][np.ix_(rows, cols)] + block)


def string_object(A: GentlePresentation, F: Field, w: HomotopyString) -> DifferentialModule:
    crossings = w.crossings()
    mult, copies = _copy_layout(A, crossings)
    coeffs: dict[int, np.ndarray] = {}
    for i, x in enumerate(w.letters, start=1):
        _place(A, F, coeffs, mult, x, copies[i - 1], copies[i], F.eye(1))
    return DifferentialModule(A, F, mult, coeffs)


def band_object(A: GentlePresentation, F: Field, w: HomotopyBand, J, start: int = 0,
                inverted: bool = False) -> DifferentialModule:
    """Band module with parameter ``J`` on the last letter of the chosen decomposition."""
    J = F.array(np.atleast_2d(J))
    if not is_invertible(F, J):
        raise ValueError("band parameter must be invertible")
    if inverted:
        w = w.inverse()
    w = w.rotate(start)
    n = J.shape[0]
    crossings = w.crossings()
    mult, copies = _copy_layout(A, crossings, n)
    coeffs: dict[int, np.ndarray] = {}
    r = len(w)
    for i, x in enumerate(w.letters, start=1):
        block = J if i == r else F.eye(n)
        _place(A, F, coeffs, mult, x, copies[i - 1], copies[i % r], block)
    return DifferentialModule(A, F, mult, coeffs)


# ------------------------------------------------------------------ syntax
def parse_letters(A: GentlePresentation, text: str) -> tuple[Letter, ...]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            raise StringError("empty letter")
        inv = tok.endswith("^-1")
        if inv:
            tok = tok[:-3]
        out.append(Letter(A.parse_path(tok), inv))
    return tuple(out)


def format_letters(A: GentlePresentation, letters) -> str:
    return ",".join(A.format_path(x.path) + ("^-1" if x.inverse else "") for x in letters)
