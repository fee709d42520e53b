"""Built-in algebras and the enumerated test corpus of string and band objects."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path as FilePath

import numpy as np

from .diffmod import DifferentialModule
from .linalg import Field, jordan_block
from .quiver import GentlePresentation, parse_presentation
from .strings import (HomotopyBand, HomotopyString, band_object, enumerate_bands,
                      enumerate_strings, string_object)

__all__ = ["BUILTIN", "load_algebra", "CorpusEntry", "build_corpus", "jordan_parameters"]

BUILTIN = {
    # two maximal paths ab' and a'b; the surface is a torus with one boundary component
    "a0": """\
vertex 1
vertex 2
vertex 3
arrow a 1 2
arrow a' 1 2
arrow b 2 3
arrow b' 2 3
rel a b
rel a' b'
""",
    # oriented 3-cycle with one relation; its surface is an annulus
    "cycle3": """\
vertex 1
vertex 2
vertex 3
arrow d 1 2
arrow a 2 3
arrow b 3 1
rel d a
""",
}


def load_algebra(source: str, **kwargs) -> GentlePresentation:
    """Parse a file, or a built-in algebra given as ``builtin:<name>``."""
    if source.startswith("builtin:"):
        return parse_presentation(BUILTIN[source[len("builtin:"):]], **kwargs)
    return parse_presentation(FilePath(source).read_text(), **kwargs)


@dataclass
class CorpusEntry:
    kind: str                 # "string" or "band"
    word: HomotopyString | HomotopyBand
    J: np.ndarray | None
    module: DifferentialModule

    @property
    def label(self) -> str:
        if self.J is None:
            return f"string {self.word}"
        return f"band {self.word} J={self.J.tolist()}"


def jordan_parameters(F: Field, sizes=(1, 2)) -> list[np.ndarray]:
    """``jordan(lam, n)`` for every nonzero ``lam`` of a prime field and each size."""
    return [jordan_block(F, lam, n) for lam in range(1, F.p) for n in sizes]


def build_corpus(A: GentlePresentation, F: Field, max_string: int = 8, max_band: int = 6,
                 parameters=None) -> list[CorpusEntry]:
    if parameters is None:
        parameters = jordan_parameters(F)
    out = [CorpusEntry("string", s, None, string_object(A, F, s))
           for s in enumerate_strings(A, max_string)]
    for b in enumerate_bands(A, max_band):
        for J in parameters:
            out.append(CorpusEntry("band", b, J, band_object(A, F, b, J)))
    return out
