"""Gentle algebra presentations: parsing, validation and path combinatorics.

Conventions used throughout the package:

* paths are written left to right, ``ab`` means ``a`` then ``b``;
* modules are right modules, so the indecomposable projective ``P_i`` has a
  basis of nonzero paths starting at ``i``;
* a path ``w: i -> j`` acts as the map ``P_j -> P_i`` given by left
  multiplication, so composing coefficient maps multiplies paths in reading
  order.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

__all__ = [
    "Arrow",
    "Path",
    "GentlePresentation",
    "TrivialExtension",
    "PresentationError",
    "ParseError",
    "NotGentleError",
    "InfiniteDimensionError",
    "InfiniteGlobalDimensionError",
    "DisconnectedQuiverError",
    "ZeroPathError",
    "parse_presentation",
    "natural_key",
]

NAME_RE = re.compile(r"[A-Za-z0-9_']+\Z")


class PresentationError(ValueError):
    """Base class for rejected presentations."""


class ParseError(PresentationError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class NotGentleError(PresentationError):
    def __init__(self, clause: str, detail: str):
        self.clause = clause
        super().__init__(f"not gentle ({clause}): {detail}")


class InfiniteDimensionError(PresentationError):
    pass


class InfiniteGlobalDimensionError(PresentationError):
    pass


class DisconnectedQuiverError(PresentationError):
    pass


class ZeroPathError(ValueError):
    pass


def natural_key(name: str):
    """Sort key putting ``2`` before ``10`` while keeping plain strings stable."""
    return tuple((0, int(tok), "") if tok.isdigit() else (1, 0, tok)
                 for tok in re.findall(r"\d+|\D+", name))


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Path:
    """A path in the quiver; ``arrows`` is empty for the trivial path at ``source``."""

    source: str
    target: str
    arrows: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.arrows)

    @property
    def is_trivial(self) -> bool:
        return not self.arrows

    def sort_key(self):
        if self.arrows:
            return (len(self.arrows), tuple(self.arrows))
        return (0, natural_key(self.source))

    def __lt__(self, other: "Path") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if not self.arrows:
            return f"e({self.source})"
        return "".join(self.arrows)

    def dotted(self) -> str:
        return f"e({self.source})" if not self.arrows else ".".join(self.arrows)


@dataclass(frozen=True)
class TrivialExtension:
    """Presentation of the trivial extension: one loop per vertex added."""

    base: "GentlePresentation"
    loops: dict
    monomial_relations: tuple
    commutation_relations: tuple

    @property
    def dimension(self) -> int:
        # basis: p and p*eps for every nonzero path p of the base
        return 2 * len(self.base.paths)


@dataclass
class GentlePresentation:
    """A gentle bound quiver (Q, I) with I generated by paths of length two.

    Construct through :meth:`build` or :func:`parse_presentation`; both run the
    full validation unless told otherwise.
    """

    vertices: tuple[str, ...]
    arrows: dict[str, Arrow]
    relations: frozenset[tuple[str, str]]
    _paths: list[Path] = field(default_factory=list, repr=False)

    # ------------------------------------------------------------------ build
    @classmethod
    def build(cls, vertices, arrows, relations, *, check_gldim: bool = True,
              check_dimension: bool = True) -> "GentlePresentation":
        vertices = tuple(sorted(set(vertices), key=natural_key))
        if len(vertices) == 0:
            raise PresentationError("quiver has no vertices")
        arrow_map: dict[str, Arrow] = {}
        for item in arrows:
            arr = item if isinstance(item, Arrow) else Arrow(*item)
            if arr.name in arrow_map:
                raise PresentationError(f"duplicate arrow name {arr.name!r}")
            for v in (arr.source, arr.target):
                if v not in vertices:
                    raise PresentationError(f"arrow {arr.name!r} uses undeclared vertex {v!r}")
            arrow_map[arr.name] = arr
        rels = set()
        for a, b in relations:
            if a not in arrow_map or b not in arrow_map:
                raise PresentationError(f"relation {a} {b} uses an unknown arrow")
            if arrow_map[a].target != arrow_map[b].source:
                raise PresentationError(f"relation {a} {b} is not a composable pair")
            rels.add((a, b))
        arrow_map = dict(sorted(arrow_map.items()))
        pres = cls(vertices, arrow_map, frozenset(rels))
        pres._check_connected()
        pres._check_gentle()
        if check_dimension:
            pres._check_finite_dimension()
        if check_gldim:
            pres._check_finite_gldim()
        if check_dimension:
            pres._paths = pres._walk_paths()
        return pres

    def _check_connected(self) -> None:
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for arr in self.arrows.values():
            parent[find(arr.source)] = find(arr.target)
        if len({find(v) for v in self.vertices}) > 1:
            raise DisconnectedQuiverError("quiver is not connected")

    def _check_gentle(self) -> None:
        for v in self.vertices:
            if len(self.arrows_into(v)) > 2:
                raise NotGentleError("in-degree", f"more than two arrows end at {v}")
            if len(self.arrows_out(v)) > 2:
                raise NotGentleError("out-degree", f"more than two arrows start at {v}")
        for name, arr in self.arrows.items():
            succ = [b.name for b in self.arrows_out(arr.target)]
            pred = [b.name for b in self.arrows_into(arr.source)]
            if sum((name, b) not in self.relations for b in succ) > 1:
                raise NotGentleError("successor", f"two composable successors of {name} avoid relations")
            if sum((name, b) in self.relations for b in succ) > 1:
                raise NotGentleError("successor", f"two relations start with {name}")
            if sum((b, name) not in self.relations for b in pred) > 1:
                raise NotGentleError("predecessor", f"two composable predecessors of {name} avoid relations")
            if sum((b, name) in self.relations for b in pred) > 1:
                raise NotGentleError("predecessor", f"two relations end with {name}")

    def _arrow_cycle(self, in_relation: bool) -> list[str] | None:
        """Find a cyclic arrow sequence whose junctions all are (or all avoid) relations."""
        graph = {
            a: [b.name for b in self.arrows_out(arr.target)
                if ((a, b.name) in self.relations) == in_relation]
            for a, arr in self.arrows.items()
        }
        colour = dict.fromkeys(graph, 0)
        stack_path: list[str] = []

        def visit(a):
            colour[a] = 1
            stack_path.append(a)
            for b in graph[a]:
                if colour[b] == 1:
                    return stack_path[stack_path.index(b):]
                if colour[b] == 0:
                    found = visit(b)
                    if found:
                        return found
            stack_path.pop()
            colour[a] = 2
            return None

        for a in graph:
            if colour[a] == 0:
                found = visit(a)
                if found:
                    return list(found)
        return None

    def _check_finite_dimension(self) -> None:
        cyc = self._arrow_cycle(in_relation=False)
        if cyc:
            raise InfiniteDimensionError("relation-free cycle " + "".join(cyc))

    def _check_finite_gldim(self) -> None:
        cyc = self._arrow_cycle(in_relation=True)
        if cyc:
            raise InfiniteGlobalDimensionError("full-relation cycle " + "".join(cyc))

    def has_finite_gldim(self) -> bool:
        return self._arrow_cycle(in_relation=True) is None

    # ------------------------------------------------------------- adjacency
    def arrows_out(self, v: str) -> list[Arrow]:
        return [a for a in self.arrows.values() if a.source == v]

    def arrows_into(self, v: str) -> list[Arrow]:
        return [a for a in self.arrows.values() if a.target == v]

    def successor(self, name: str, in_relation: bool) -> str | None:
        arr = self.arrows[name]
        for b in self.arrows_out(arr.target):
            if ((name, b.name) in self.relations) == in_relation:
                return b.name
        return None

    def predecessor(self, name: str, in_relation: bool) -> str | None:
        arr = self.arrows[name]
        for b in self.arrows_into(arr.source):
            if ((b.name, name) in self.relations) == in_relation:
                return b.name
        return None

    # ----------------------------------------------------------------- paths
    def _walk_paths(self) -> list[Path]:
        out = [Path(v, v) for v in self.vertices]
        frontier = [Path(a.source, a.target, (a.name,)) for a in self.arrows.values()]
        while frontier:
            out.extend(frontier)
            nxt = []
            for p in frontier:
                b = self.successor(p.arrows[-1], in_relation=False)
                if b is not None:
                    nxt.append(Path(p.source, self.arrows[b].target, p.arrows + (b,)))
            frontier = nxt
        return sorted(out)

    @property
    def paths(self) -> list[Path]:
        """All nonzero paths, trivial ones included, in canonical order."""
        return self._paths

    def nonzero_paths(self, max_len: int | None = None) -> list[Path]:
        if max_len is None:
            return list(self._paths)
        return [p for p in self._paths if len(p) <= max_len]

    @cached_property
    def path_index(self) -> dict[Path, int]:
        return {p: i for i, p in enumerate(self._paths)}

    @cached_property
    def mult_table(self) -> dict[tuple[int, int], int]:
        """(i, j) -> k when paths[i] * paths[j] = paths[k] is nonzero."""
        table = {}
        for i, p in enumerate(self._paths):
            for j, q in enumerate(self._paths):
                r = self.multiply(p, q)
                if r is not None:
                    table[(i, j)] = self.path_index[r]
        return table

    @cached_property
    def factorizations(self) -> dict[int, list[tuple[int, int]]]:
        """k -> list of (i, j) with paths[i] * paths[j] = paths[k]."""
        out: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for (i, j), k in self.mult_table.items():
            out[k].append((i, j))
        return dict(out)

    def is_nonzero_word(self, arrows) -> bool:
        arrows = tuple(arrows)
        for x, y in zip(arrows, arrows[1:]):
            if self.arrows[x].target != self.arrows[y].source:
                return False
            if (x, y) in self.relations:
                return False
        return True

    def multiply(self, p: Path, q: Path) -> Path | None:
        if p.target != q.source:
            return None
        if p.arrows and q.arrows and (p.arrows[-1], q.arrows[0]) in self.relations:
            return None
        return Path(p.source, q.target, p.arrows + q.arrows)

    def trivial(self, v: str) -> Path:
        return Path(v, v)

    def path(self, arrows) -> Path:
        """Path from a sequence of arrow names; raises ZeroPathError if it lies in I."""
        arrows = tuple(arrows)
        if not arrows:
            raise ValueError("use trivial(v) for trivial paths")
        for a in arrows:
            if a not in self.arrows:
                raise KeyError(f"unknown arrow {a!r}")
        for x, y in zip(arrows, arrows[1:]):
            if self.arrows[x].target != self.arrows[y].source:
                raise ValueError(f"arrows {x} and {y} do not compose")
        if not self.is_nonzero_word(arrows):
            raise ZeroPathError("".join(arrows) + " is zero in the algebra")
        return Path(self.arrows[arrows[0]].source, self.arrows[arrows[-1]].target, arrows)

    def parse_path(self, text: str) -> Path:
        """Parse ``e(v)``, ``a.b.c`` or a concatenation ``abc`` with a unique split."""
        text = text.strip()
        m = re.fullmatch(r"e\((.+)\)", text)
        if m and m.group(1) in self.vertices:
            return self.trivial(m.group(1))
        if "." in text:
            return self.path(text.split("."))
        splits = self._splits(text)
        if not splits:
            raise ValueError(f"cannot read {text!r} as a path")
        if len(splits) > 1:
            raise ValueError(f"ambiguous path {text!r}; separate arrows with '.'")
        return self.path(splits[0])

    def _splits(self, text: str):
        names = sorted(self.arrows, key=len, reverse=True)
        results = []

        def go(pos, acc):
            if pos == len(text):
                if self._composable(acc):
                    results.append(tuple(acc))
                return
            for n in names:
                if text.startswith(n, pos):
                    if acc and self.arrows[acc[-1]].target != self.arrows[n].source:
                        continue
                    go(pos + len(n), acc + [n])

        go(0, [])
        return results

    def _composable(self, arrows) -> bool:
        return all(self.arrows[x].target == self.arrows[y].source
                   for x, y in zip(arrows, arrows[1:]))

    def format_path(self, p: Path) -> str:
        """Shortest unambiguous spelling of ``p`` accepted by :meth:`parse_path`."""
        if p.is_trivial:
            return f"e({p.source})"
        plain = "".join(p.arrows)
        if len(self._splits(plain)) == 1:
            return plain
        return ".".join(p.arrows)

    # index helpers used by the linear-algebra layers
    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def path_ends(self) -> list[tuple[int, int]]:
        vi = self.vertex_index
        return [(vi[p.source], vi[p.target]) for p in self._paths]

    @cached_property
    def trivial_index(self) -> list[int]:
        return [self.path_index[self.trivial(v)] for v in self.vertices]

    @cached_property
    def projective_basis(self) -> list[list[int]]:
        """Per vertex index, the indices of paths starting there (basis of P_v)."""
        out: list[list[int]] = [[] for _ in self.vertices]
        for k, (s, _) in enumerate(self.path_ends):
            out[s].append(k)
        return out

    @cached_property
    def position_in_projective(self) -> list[int]:
        pos = [0] * len(self._paths)
        for basis in self.projective_basis:
            for i, k in enumerate(basis):
                pos[k] = i
        return pos

    def paths_from(self, v: str) -> list[Path]:
        return [p for p in self._paths if p.source == v]

    def dim_projective(self, v: str) -> int:
        return len(self.paths_from(v))

    @property
    def dimension(self) -> int:
        return len(self._paths)

    # --------------------------------------------------------- maximal paths
    @cached_property
    def maximal_paths_alg(self) -> list[Path]:
        out = []
        for p in self._paths:
            if p.is_trivial:
                continue
            if self.predecessor(p.arrows[0], in_relation=False) is not None:
                continue
            if self.successor(p.arrows[-1], in_relation=False) is not None:
                continue
            out.append(p)
        return sorted(out)

    @cached_property
    def maximal_paths_geo(self) -> list[Path]:
        """Maximal paths plus trivial paths filling each vertex up to two occurrences.

        A vertex met once along the maximal paths gets one trivial path; an
        isolated vertex (one-vertex algebra) gets two, so that every vertex
        labels exactly two polygon edges.
        """
        count = dict.fromkeys(self.vertices, 0)
        for w in self.maximal_paths_alg:
            for v in self.path_vertices(w):
                count[v] += 1
        out = list(self.maximal_paths_alg)
        for v in self.vertices:
            out.extend([self.trivial(v)] * max(0, 2 - count[v]))
        return out

    def path_vertices(self, p: Path) -> list[str]:
        return [p.source] + [self.arrows[a].target for a in p.arrows]

    def maximal_path_of(self, p: Path | str) -> tuple[Path, Path, Path]:
        """Return ``(w, hat, bar)`` with ``w = hat * p * bar`` the maximal path through ``p``."""
        if isinstance(p, str):
            p = self.parse_path(p)
        if p.is_trivial:
            raise ValueError("trivial paths do not lie in a unique maximal path")
        if not self.is_nonzero_word(p.arrows):
            raise ZeroPathError(str(p) + " is zero in the algebra")
        before: list[str] = []
        a = p.arrows[0]
        while (b := self.predecessor(a, in_relation=False)) is not None:
            before.insert(0, b)
            a = b
        after: list[str] = []
        a = p.arrows[-1]
        while (b := self.successor(a, in_relation=False)) is not None:
            after.append(b)
            a = b
        whole = self.path(before + list(p.arrows) + after)
        hat = self.path(before) if before else self.trivial(p.source)
        bar = self.path(after) if after else self.trivial(p.target)
        return whole, hat, bar

    # ----------------------------------------------------- trivial extension
    def trivial_extension(self) -> TrivialExtension:
        loops = {v: f"eps_{v}" for v in self.vertices}
        mono = tuple((loops[v], loops[v]) for v in self.vertices)
        comm = tuple(((loops[a.source], a.name), (a.name, loops[a.target]))
                     for a in self.arrows.values())
        ext = TrivialExtension(self, loops, mono, comm)
        assert ext.dimension == 2 * self.dimension
        return ext

    # ------------------------------------------------------------ serialize
    def serialize(self) -> str:
        lines = [f"vertex {v}" for v in self.vertices]
        lines += [f"arrow {a.name} {a.source} {a.target}"
                  for a in sorted(self.arrows.values(), key=lambda a: a.name)]
        lines += [f"rel {a} {b}" for a, b in sorted(self.relations)]
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        if not isinstance(other, GentlePresentation):
            return NotImplemented
        return (self.vertices == other.vertices and self.arrows == other.arrows
                and self.relations == other.relations)

    __hash__ = None


def parse_presentation(text: str, *, check_gldim: bool = True,
                       check_dimension: bool = True) -> GentlePresentation:
    vertices: list[str] = []
    arrows: list[Arrow] = []
    rels: list[tuple[str, str]] = []
    expected = {"vertex": 1, "arrow": 3, "rel": 2}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]
        kw, col = tokens[0]
        if kw not in expected:
            raise ParseError(f"unknown keyword {kw!r}", lineno, col)
        args = tokens[1:]
        if len(args) != expected[kw]:
            pos = args[expected[kw]][1] if len(args) > expected[kw] else len(line) + 1
            raise ParseError(f"'{kw}' takes {expected[kw]} argument(s), got {len(args)}", lineno, pos)
        for tok, c in args:
            if not NAME_RE.match(tok):
                raise ParseError(f"invalid name {tok!r}", lineno, c)
        vals = [t for t, _ in args]
        if kw == "vertex":
            if vals[0] in vertices:
                raise ParseError(f"duplicate vertex {vals[0]!r}", lineno, args[0][1])
            vertices.append(vals[0])
        elif kw == "arrow":
            arrows.append(Arrow(*vals))
        else:
            rels.append((vals[0], vals[1]))
    return GentlePresentation.build(vertices, arrows, rels, check_gldim=check_gldim,
                                    check_dimension=check_dimension)
