"""Block matrices over an ordered set with involution, and the functor G into them.

``Y`` consists of the prefixes ``u`` of the maximal paths (trivial prefix
included), ordered by a chosen order on the maximal paths and then by length.
``sigma`` swaps the two prefixes sharing a target, if there are two.

A (Y, sigma)-matrix is stored as one square matrix whose rows and columns are
both cut into bands, one band per element of Y.  A morphism ``T: B -> C`` is a
block matrix with rows cut like C and columns cut like B satisfying
``T B = C T``; it is block upper triangular and its diagonal blocks agree on
sigma-orbits.

Conventions for the functor G (column vectors, paths composed in reading
order): the block ``(u, u alpha)`` of ``G(M)`` is the coefficient matrix of the
path ``alpha`` in the differential, and a letter of a Y-word joining the basis
vectors ``v_{i-1}`` and ``v_i`` writes a single entry into the block
``(min, max)`` of its two ends, in the row of the vector sitting at the smaller
end.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffmod import DifferentialModule, PathMap, _rng, _TopAlgebra
from .linalg import Field, PrimeField, char_poly_cyclic, companion, is_invertible, kernel_basis, rref
from .quiver import GentlePresentation, Path
from .strings import HomotopyBand, HomotopyString, _is_primitive

__all__ = [
    "YElement",
    "OrderedSetY",
    "SigmaMatrix",
    "SigmaMorphism",
    "SigmaError",
    "YWord",
    "build_Y",
    "G_object",
    "G_morphism",
    "B_string",
    "B_band",
    "gamma",
    "gamma_b",
    "validate_ystring",
    "validate_yband",
    "canonical_ystring",
    "canonical_yband",
    "sigma_hom",
    "sigma_isomorphism",
    "sigma_invariants",
    "dump_sigma_matrix",
]


class SigmaError(ValueError):
    pass


@dataclass(frozen=True)
class YElement:
    maximal: Path
    prefix: Path

    def __str__(self) -> str:
        return f"{self.prefix}[{self.maximal}]"


class OrderedSetY:
    def __init__(self, A: GentlePresentation, order=None):
        maximal = list(A.maximal_paths_alg)
        if order is not None:
            order = [A.parse_path(w) if isinstance(w, str) else w for w in order]
            if sorted(order) != sorted(maximal):
                raise ValueError("order must be a permutation of the maximal paths")
            maximal = order
        self.algebra = A
        self.maximal = maximal
        elements = []
        for w in maximal:
            elements.append(YElement(w, A.trivial(w.source)))
            for n in range(1, len(w) + 1):
                elements.append(YElement(w, A.path(w.arrows[:n])))
        self.elements = elements
        self.index = {y: i for i, y in enumerate(elements)}
        self.target = [A.vertex_index[y.prefix.target] for y in elements]
        by_target: dict[int, list[int]] = {}
        for i, t in enumerate(self.target):
            by_target.setdefault(t, []).append(i)
        if any(len(v) > 2 for v in by_target.values()):
            raise AssertionError("more than two prefixes share a target")
        self.sigma = list(range(len(elements)))
        for group in by_target.values():
            if len(group) == 2:
                a, b = group
                self.sigma[a], self.sigma[b] = b, a
        # orbit of each element, labelled by its smallest member
        self.orbit = [min(i, self.sigma[i]) for i in range(len(elements))]
        # position of (maximal path, prefix length)
        self._pos = {(y.maximal, len(y.prefix)): i for i, y in enumerate(elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def of_vertex(self, v: int) -> list[int]:
        return [i for i, t in enumerate(self.target) if t == v]

    def element(self, maximal: Path, length: int) -> int:
        return self._pos[(maximal, length)]

    def extends(self, u: int, v: int) -> bool:
        """True when ``v = u alpha`` for a path ``alpha`` (possibly trivial)."""
        a, b = self.elements[u], self.elements[v]
        return a.maximal == b.maximal and len(a.prefix) <= len(b.prefix)

    def __str__(self) -> str:
        return " < ".join(map(str, self.elements))


def build_Y(A: GentlePresentation, order=None) -> OrderedSetY:
    return OrderedSetY(A, order)


# ------------------------------------------------------------ the matrices
def _offsets(sizes) -> list[int]:
    out = [0]
    for s in sizes:
        out.append(out[-1] + s)
    return out


class SigmaMatrix:
    def __init__(self, Y: OrderedSetY, field: Field, sizes, matrix=None, *, check: bool = True):
        self.Y = Y
        self.field = field
        self.sizes = tuple(int(s) for s in sizes)
        if len(self.sizes) != len(Y):
            raise SigmaError("one size per element of Y expected")
        self.offsets = _offsets(self.sizes)
        n = self.offsets[-1]
        self.matrix = field.zeros(n, n) if matrix is None else field.array(matrix)
        if self.matrix.shape != (n, n):
            raise SigmaError("matrix does not match the partition")
        if check:
            self.validate()

    def rows(self, u: int) -> slice:
        return slice(self.offsets[u], self.offsets[u + 1])

    def block(self, u: int, v: int) -> np.ndarray:
        return self.matrix[self.rows(u), self.rows(v)]

    def nonzero_blocks(self) -> list[tuple[int, int]]:
        n = len(self.Y)
        return [(u, v) for u in range(n) for v in range(n)
                if self.block(u, v).size and np.any(self.block(u, v) != 0)]

    def validate(self) -> None:
        Y, F = self.Y, self.field
        for u in range(len(Y)):
            if self.sizes[u] != self.sizes[Y.sigma[u]]:
                raise SigmaError(f"sigma-paired bands {Y.elements[u]} and "
                                 f"{Y.elements[Y.sigma[u]]} differ in size")
        if np.any(F.matmul(self.matrix, self.matrix) != 0):
            raise SigmaError("B^2 != 0")

    def is_zero(self) -> bool:
        return not np.any(self.matrix != 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SigmaMatrix):
            return NotImplemented
        return (self.sizes == other.sizes and self.Y.elements == other.Y.elements
                and np.array_equal(self.matrix, other.matrix))

    def __repr__(self):
        blocks = ", ".join(f"({self.Y.elements[u]},{self.Y.elements[v]})" for u, v in self.nonzero_blocks())
        return f"SigmaMatrix(sizes={self.sizes}; {blocks})"


class SigmaMorphism:
    def __init__(self, source: SigmaMatrix, target: SigmaMatrix, matrix, *, check: bool = True):
        self.source = source
        self.target = target
        self.field = source.field
        self.matrix = source.field.array(matrix)
        if self.matrix.shape != (target.offsets[-1], source.offsets[-1]):
            raise SigmaError("morphism does not match the partitions")
        if check:
            self.validate()

    @classmethod
    def _trusted(cls, source, target, matrix) -> "SigmaMorphism":
        out = cls.__new__(cls)
        out.source, out.target, out.field, out.matrix = source, target, source.field, matrix
        return out

    def block(self, u: int, v: int) -> np.ndarray:
        return self.matrix[self.target.rows(u), self.source.rows(v)]

    def validate(self) -> None:
        F, Y = self.field, self.source.Y
        B, C, T = self.source.matrix, self.target.matrix, self.matrix
        if not np.array_equal(F.matmul(T, B), F.matmul(C, T)):
            raise SigmaError("T B != C T")
        for u in range(len(Y)):
            for v in range(u):
                if np.any(self.block(u, v) != 0):
                    raise SigmaError("morphism is not upper triangular")
            s = Y.sigma[u]
            if not np.array_equal(self.block(u, u), self.block(s, s)):
                raise SigmaError("diagonal blocks differ on a sigma-orbit")

    def diagonal(self) -> list[np.ndarray]:
        """Diagonal blocks, one per sigma-orbit (by smallest member)."""
        Y = self.source.Y
        return [self.block(u, u) for u in range(len(Y)) if Y.orbit[u] == u]

    def is_invertible(self) -> bool:
        return all(is_invertible(self.field, b) for b in self.diagonal() if b.shape[0])

    def __matmul__(self, other: "SigmaMorphism") -> "SigmaMorphism":
        return SigmaMorphism(other.source, self.target,
                             self.field.matmul(self.matrix, other.matrix), check=False)


# --------------------------------------------------------------- functor G
def _module_sizes(Y: OrderedSetY, mult) -> list[int]:
    return [mult[t] for t in Y.target]


def _place_pathmap(Y: OrderedSetY, F: Field, f: PathMap, src_sizes, dst_sizes) -> np.ndarray:
    A = Y.algebra
    dst_off, src_off = _offsets(dst_sizes), _offsets(src_sizes)
    out = F.zeros(dst_off[-1], src_off[-1])
    for k, mat in f.coeffs.items():
        p = A.paths[k]
        if p.is_trivial:
            v = A.vertex_index[p.source]
            for u in Y.of_vertex(v):
                out[dst_off[u]:dst_off[u + 1], src_off[u]:src_off[u + 1]] = mat
            continue
        whole, hat, _ = A.maximal_path_of(p)
        u = Y.element(whole, len(hat))
        v = Y.element(whole, len(hat) + len(p))
        out[dst_off[u]:dst_off[u + 1], src_off[v]:src_off[v + 1]] = mat
    return out


def G_object(Y: OrderedSetY, M: DifferentialModule) -> SigmaMatrix:
    if not M.is_radical():
        raise SigmaError("G is defined on radical modules only")
    sizes = _module_sizes(Y, M.mult)
    return SigmaMatrix(Y, M.field, sizes, _place_pathmap(Y, M.field, M.phi, sizes, sizes))


def G_morphism(Y: OrderedSetY, psi: PathMap, M: DifferentialModule, N: DifferentialModule) -> SigmaMorphism:
    GM, GN = G_object(Y, M), G_object(Y, N)
    T = _place_pathmap(Y, M.field, psi, GM.sizes, GN.sizes)
    return SigmaMorphism(GM, GN, T)


# ------------------------------------------------------------ Y-words
YWord = tuple  # tuple of (p1, p2) pairs of Y indices


def _word_ok(Y: OrderedSetY, word, cyclic: bool) -> None:
    if not word:
        raise SigmaError("empty word")
    pairs = list(zip(word, word[1:])) + ([(word[-1], word[0])] if cyclic else [])
    for x, y in pairs:
        if Y.orbit[x[1]] != Y.orbit[y[0]]:
            raise SigmaError("consecutive edges do not meet")
        if x[1] == y[0]:
            raise SigmaError("p2 of an edge equals p1 of the next one")


def validate_ystring(Y: OrderedSetY, word) -> tuple:
    word = tuple(tuple(e) for e in word)
    _word_ok(Y, word, cyclic=False)
    return word


def validate_yband(Y: OrderedSetY, word) -> tuple:
    word = tuple(tuple(e) for e in word)
    _word_ok(Y, word, cyclic=True)
    if not _is_primitive(word):
        raise SigmaError("band is a proper power")
    return word


def _letter_edge(Y: OrderedSetY, x) -> tuple[int, int]:
    A = Y.algebra
    whole, hat, _ = A.maximal_path_of(x.path)
    a = Y.element(whole, len(hat))
    b = Y.element(whole, len(hat) + len(x.path))
    return (b, a) if x.inverse else (a, b)


def gamma(Y: OrderedSetY, w: HomotopyString) -> tuple:
    return validate_ystring(Y, [_letter_edge(Y, x) for x in w.letters])


def gamma_b(Y: OrderedSetY, w: HomotopyBand) -> tuple:
    return validate_yband(Y, [_letter_edge(Y, x) for x in w.letters])


def inverse_yword(word) -> tuple:
    return tuple((b, a) for a, b in reversed(word))


def canonical_ystring(word) -> tuple:
    return min(tuple(word), inverse_yword(word))


def canonical_yband(word) -> tuple:
    word = tuple(word)
    out = []
    for base in (word, inverse_yword(word)):
        out.extend(base[k:] + base[:k] for k in range(len(base)))
    return min(out)


def _basis_layout(Y: OrderedSetY, classes, d: int):
    """Sizes per Y element and, per basis position, its row index inside its band."""
    count: dict[int, int] = {}
    local = []
    for c in classes:
        local.append(list(range(count.get(c, 0), count.get(c, 0) + d)))
        count[c] = count.get(c, 0) + d
    sizes = [count.get(Y.orbit[u], 0) for u in range(len(Y))]
    return sizes, local


def _write(out, offsets, Y, edge, rows_pos, cols_pos, block, F):
    """Write ``block`` for the edge joining basis groups ``rows_pos`` (at p1) and ``cols_pos`` (at p2)."""
    a, b = edge
    if a < b:
        u, v, r, c, blk = a, b, rows_pos, cols_pos, block
    else:
        u, v, r, c, blk = b, a, cols_pos, rows_pos, block
    ri = offsets[u] + np.array(r)
    ci = offsets[v] + np.array(c)
    out[np.ix_(ri, ci)] = F.reduce(out[np.ix_(ri, ci)] + blk)


def B_string(Y: OrderedSetY, F: Field, word) -> SigmaMatrix:
    word = validate_ystring(Y, word)
    classes = [Y.orbit[word[0][0]]] + [Y.orbit[e[1]] for e in word]
    sizes, local = _basis_layout(Y, classes, 1)
    offsets = _offsets(sizes)
    out = F.zeros(offsets[-1], offsets[-1])
    for i, e in enumerate(word, start=1):
        _write(out, offsets, Y, e, local[i - 1], local[i], F.eye(1), F)
    return SigmaMatrix(Y, F, sizes, out)


def B_band(Y: OrderedSetY, F: Field, word, J) -> SigmaMatrix:
    """Canonical matrix of a Y-band with the companion matrix of J's characteristic polynomial."""
    word = validate_yband(Y, word)
    J = F.array(np.atleast_2d(J))
    if not is_invertible(F, J):
        raise SigmaError("band parameter must be invertible")
    chi = char_poly_cyclic(F, J)
    C = companion(F, chi[:-1])
    d = C.shape[0]
    n = len(word)
    classes = [Y.orbit[e[0]] for e in word]
    sizes, local = _basis_layout(Y, classes, d)
    offsets = _offsets(sizes)
    out = F.zeros(offsets[-1], offsets[-1])
    for i, e in enumerate(word, start=1):
        # block entry (row at p1 side, column at p2 side); the wrap edge carries C^T
        blk = C.T if i == n else F.eye(d)
        _write(out, offsets, Y, e, local[i - 1], local[i % n], blk, F)
    return SigmaMatrix(Y, F, sizes, out)


# ----------------------------------------------------- hom and isomorphism
def _allowed_blocks(Y: OrderedSetY, image_only: bool) -> np.ndarray:
    """Boolean ``(u, v)`` table of the blocks a morphism may use."""
    cache = Y.__dict__.setdefault("_allowed", {})
    if image_only not in cache:
        n = len(Y)
        if image_only:
            table = np.array([[Y.extends(u, v) for v in range(n)] for u in range(n)], dtype=bool)
        else:
            table = np.triu(np.ones((n, n), dtype=bool))
        cache[image_only] = table
    return cache[image_only]


def _band_of(sizes) -> np.ndarray:
    return np.repeat(np.arange(len(sizes)), sizes)


def sigma_hom(B: SigmaMatrix, C: SigmaMatrix, image_only: bool = False) -> list[SigmaMorphism]:
    """Basis of morphisms ``B -> C``; ``image_only`` restricts to blocks ``(u, u alpha)``."""
    Y, F = B.Y, B.field
    R, S = C.offsets[-1], B.offsets[-1]
    if R == 0 or S == 0:
        return []
    row_band, col_band = _band_of(C.sizes), _band_of(B.sizes)
    mask = _allowed_blocks(Y, image_only)[np.ix_(row_band, col_band)]
    orbit = np.array(Y.orbit)
    # diagonal blocks off the orbit representative repeat the representative's entries
    tied = mask & (row_band[:, None] == col_band[None, :]) & (orbit[row_band] != np.arange(len(Y))[row_band])[:, None]
    free = mask & ~tied
    var_id = np.full((R, S), -1, dtype=np.int64)
    nvar = int(free.sum())
    if nvar == 0:
        return []
    var_id[free] = np.arange(nvar)
    ti, tj = np.nonzero(tied)
    if len(ti):
        u = row_band[ti]
        o = orbit[u]
        off_c, off_b = np.array(C.offsets), np.array(B.offsets)
        var_id[ti, tj] = var_id[ti - off_c[u] + off_c[o], tj - off_b[u] + off_b[o]]
    I, J = np.nonzero(mask)
    V = var_id[I, J]
    # the unit matrix E_ij contributes E_ij B - C E_ij to T B - C T
    m = len(I)
    k = np.arange(m)
    Z = np.zeros((m, R, S), dtype=B.matrix.dtype)
    Z[k, I, :] += B.matrix[J, :]
    Z[k, :, J] -= C.matrix[:, I].T
    system = np.zeros((nvar, R * S), dtype=B.matrix.dtype)
    np.add.at(system, V, Z.reshape(m, R * S))
    K = kernel_basis(F, F.reduce(system.T))
    if len(K) == 0:
        return []
    Ts = np.zeros((len(K), R, S), dtype=B.matrix.dtype)
    Ts[:, I, J] = K[:, V]
    return [SigmaMorphism._trusted(B, C, T) for T in Ts]


def _combine(F: Field, basis, coeffs, B, C) -> SigmaMorphism:
    T = F.zeros(C.offsets[-1], B.offsets[-1])
    for c, f in zip(coeffs, basis):
        if c:
            T = F.reduce(T + F.scalar(c) * f.matrix)
    return SigmaMorphism._trusted(B, C, T)


def _end_data(B: SigmaMatrix, image_only: bool):
    """Cached ``(dim End(B), residue vertex or None)``.

    The vertex is an orbit whose block size is prime to p, recorded only when
    End(B) is proven local with residue field k.
    """
    key = ("end", image_only)
    cache = B.__dict__.setdefault("_cache", {})
    if key not in cache:
        F = B.field
        ends = sigma_hom(B, B, image_only)
        vertex = None
        if ends and isinstance(F, PrimeField):
            dims = [b.shape[0] for b in ends[0].diagonal()]
            T = _TopAlgebra(F, dims, [e.diagonal() for e in ends])
            if T.dim == 1 or T.local_certificate():
                vertex = next((i for i, d in enumerate(dims) if d % F.p), None)
        cache[key] = (len(ends), vertex)
    return cache[key]


def sigma_isomorphism(B: SigmaMatrix, C: SigmaMatrix, seed=None, image_only: bool = False,
                      trials: int = 48):
    """``(T, certified)`` with ``T`` an invertible morphism ``B -> C`` or None.

    A None answer is certified by differing invariants or Hom dimensions, or
    when End(B) is local with residue field k and no product ``g f`` of basis
    morphisms ``f: B -> C``, ``g: C -> B`` has nonzero residue.
    """
    F = B.field
    if B.sizes != C.sizes:
        return None, True
    if B.offsets[-1] == 0:
        return SigmaMorphism(B, C, F.zeros(0, 0), check=False), True
    if sigma_invariants(B) != sigma_invariants(C):
        return None, True
    H = sigma_hom(B, C, image_only)
    if len(H) != _end_data(C, image_only)[0]:
        return None, True
    for f in H:
        if f.is_invertible():
            return f, True
    K = sigma_hom(C, B, image_only)
    if len(K) != len(H):
        return None, True
    v = _end_data(B, image_only)[1]
    if v is not None:
        # the residue of an endomorphism x of B is tr(x_v) / d_v
        Fv = np.array([f.diagonal()[v] for f in H], dtype=np.int64)
        Gv = np.array([g.diagonal()[v] for g in K], dtype=np.int64)
        tr = np.einsum("gij,fji->gf", Gv, Fv) % F.p
        hits = np.argwhere(tr != 0)
        if len(hits):
            return H[int(hits[0][1])], True
        return None, True
    rng = _rng(seed)
    for _ in range(trials):
        f = _combine(F, H, F.random(rng, len(H)), B, C)
        if f.is_invertible():
            return f, True
    return None, False


def sigma_invariants(B: SigmaMatrix) -> tuple:
    """Ranks preserved by block upper-triangular base change.

    Such a change fixes each span of leading bands, so the rank of ``B`` from the
    leading ``j`` bands onto the trailing bands after ``i`` is invariant.
    """
    cache = B.__dict__.setdefault("_cache", {})
    if "invariants" in cache:
        return cache["invariants"]
    F = B.field
    n = len(B.Y)
    out = []
    for i in range(n + 1):
        sub = B.matrix[B.offsets[i]:, :]
        # rank of the first c columns is the number of pivots among them
        pivots = np.array(rref(F, sub)[1] if sub.size else [], dtype=np.int64)
        for j in range(n + 1):
            out.append(int(np.count_nonzero(pivots < B.offsets[j])))
    cache["invariants"] = tuple(out)
    return cache["invariants"]


def dump_sigma_matrix(B: SigmaMatrix) -> str:
    Y = B.Y
    lines = [f"band {Y.elements[u]} rows={s} cols={s}" for u, s in enumerate(B.sizes)]
    for u, v in B.nonzero_blocks():
        lines.append(f"block {Y.elements[u]} {Y.elements[v]}")
        lines.extend(" ".join(str(x) for x in row) for row in B.block(u, v))
    return "\n".join(lines) + "\n"
