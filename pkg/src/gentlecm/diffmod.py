"""Differential modules (P, phi): P projective over a gentle algebra, phi^2 = 0.

A map ``f: P -> Q`` between ``P = (+) P_i^{d_i}`` and ``Q = (+) P_i^{d'_i}`` is
stored as a :class:`PathMap`: one coefficient matrix per nonzero path ``w``.
For ``w: i -> j`` the matrix has shape ``d'_i x d_j`` and records the
component ``P_j^{d_j} -> P_i^{d'_i}`` given by left multiplication with ``w``.
Composition multiplies paths in reading order: ``(f g)_p = sum_{p = y x} F_y G_x``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import sympy

from .linalg import GF, Field, PrimeField, inverse, is_invertible, kernel_basis, rank, rref, solve
from .quiver import GentlePresentation

__all__ = [
    "PathMap",
    "DifferentialModule",
    "SquareNonzeroError",
    "Inconclusive",
    "Verdict",
    "hom",
    "stable_hom",
    "find_isomorphism",
    "is_isomorphic",
    "isomorphism_verdict",
    "isomorphism_classes",
    "IsoVerdict",
    "hom_dimension",
    "rank_profile",
    "indecomposability",
    "is_indecomposable",
    "decompose",
    "split_by_idempotent",
    "split_projectives",
    "direct_sum",
    "suspend",
    "twist",
    "contractible",
    "random_automorphism",
    "conjugate",
    "dump_module",
    "load_module",
]

MIN_TRIALS = 64
EXHAUSTIVE_DIM = 8
EXHAUSTIVE_SIZE = 10**6


class SquareNonzeroError(ValueError):
    pass


class Inconclusive(RuntimeError):
    """Randomized search ended without a certificate either way."""


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(0 if seed is None else seed)


# ---------------------------------------------------------------- path maps
@dataclass(eq=False)
class PathMap:
    algebra: GentlePresentation
    field: Field
    src: tuple[int, ...]
    dst: tuple[int, ...]
    coeffs: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        A, F = self.algebra, self.field
        clean = {}
        for k, mat in self.coeffs.items():
            s, t = A.path_ends[k]
            mat = F.array(mat)
            if mat.shape != (self.dst[s], self.src[t]):
                raise ValueError(f"coefficient of {A.paths[k]} has shape {mat.shape}, "
                                 f"expected {(self.dst[s], self.src[t])}")
            if mat.size and np.any(mat != 0):
                clean[k] = mat
        self.coeffs = clean

    # construction
    @classmethod
    def _trusted(cls, A, F, src, dst, coeffs) -> "PathMap":
        """Skip validation: ``coeffs`` already reduced and correctly shaped."""
        obj = cls.__new__(cls)
        obj.algebra, obj.field, obj.src, obj.dst = A, F, src, dst
        obj.coeffs = {k: m for k, m in coeffs.items() if np.any(m)}
        return obj

    @classmethod
    def zero(cls, A, F, src, dst) -> "PathMap":
        return cls(A, F, tuple(src), tuple(dst), {})

    @classmethod
    def identity(cls, A, F, dims) -> "PathMap":
        dims = tuple(dims)
        return cls(A, F, dims, dims, {A.trivial_index[v]: F.eye(d) for v, d in enumerate(dims) if d})

    @classmethod
    def diagonal(cls, A, F, blocks) -> "PathMap":
        """Trivial-path map with the given square block per vertex."""
        dims = tuple(np.shape(b)[0] for b in blocks)
        return cls(A, F, dims, dims, {A.trivial_index[v]: b for v, b in enumerate(blocks) if dims[v]})

    # arithmetic
    def __add__(self, other: "PathMap") -> "PathMap":
        self._check_same(other)
        F = self.field
        out = dict(self.coeffs)
        for k, m in other.coeffs.items():
            out[k] = F.reduce(out[k] + m) if k in out else m
        return PathMap._trusted(self.algebra, F, self.src, self.dst, out)

    def __neg__(self) -> "PathMap":
        return self.scale(-1)

    def __sub__(self, other: "PathMap") -> "PathMap":
        return self + (-other)

    def scale(self, c) -> "PathMap":
        F = self.field
        c = F.scalar(c)
        return PathMap._trusted(self.algebra, F, self.src, self.dst,
                                {k: F.reduce(m * c) for k, m in self.coeffs.items()})

    def _check_same(self, other):
        if self.src != other.src or self.dst != other.dst:
            raise ValueError("maps have different shapes")

    def __matmul__(self, other: "PathMap") -> "PathMap":
        """``self o other`` (apply ``other`` first)."""
        if other.dst != self.src:
            raise ValueError("maps do not compose")
        A, F = self.algebra, self.field
        table = A.mult_table
        out: dict[int, np.ndarray] = {}
        for y, my in self.coeffs.items():
            for x, mx in other.coeffs.items():
                k = table.get((y, x))
                if k is None:
                    continue
                prod = F.matmul(my, mx)
                out[k] = F.reduce(out[k] + prod) if k in out else prod
        return PathMap._trusted(A, F, other.src, self.dst, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PathMap):
            return NotImplemented
        if self.src != other.src or self.dst != other.dst:
            return False
        if self.coeffs.keys() != other.coeffs.keys():
            return False
        return all(np.array_equal(self.coeffs[k], other.coeffs[k]) for k in self.coeffs)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs

    def top(self) -> list[np.ndarray]:
        """Trivial-path blocks, one per vertex (the induced map on tops)."""
        A, F = self.algebra, self.field
        out = []
        for v in range(len(A.vertices)):
            k = A.trivial_index[v]
            out.append(self.coeffs.get(k, F.zeros(self.dst[v], self.src[v])))
        return out

    def radical_part(self) -> "PathMap":
        triv = set(self.algebra.trivial_index)
        return PathMap(self.algebra, self.field, self.src, self.dst,
                       {k: m for k, m in self.coeffs.items() if k not in triv})

    def top_invertible(self) -> bool:
        if self.src != self.dst:
            return False
        return all(b.shape[0] == 0 or is_invertible(self.field, b) for b in self.top())

    def inverse(self) -> "PathMap":
        """Inverse of an automorphism (top invertible; the radical part is nilpotent)."""
        if not self.top_invertible():
            raise ZeroDivisionError("map is not invertible")
        A, F = self.algebra, self.field
        dinv = PathMap.diagonal(A, F, [inverse(F, b) if b.shape[0] else b for b in self.top()])
        step = -(dinv @ self.radical_part())
        total = PathMap.identity(A, F, self.src)
        power = total
        while True:
            power = step @ power
            if power.is_zero():
                break
            total = total + power
        return total @ dinv

    def restrict(self, src_copies, dst_copies) -> "PathMap":
        """Sub-block on the given copy indices (lists per vertex)."""
        A = self.algebra
        out = {}
        for k, m in self.coeffs.items():
            s, t = A.path_ends[k]
            out[k] = m[np.ix_(dst_copies[s], src_copies[t])]
        return PathMap(A, self.field, tuple(map(len, src_copies)), tuple(map(len, dst_copies)), out)

    def flat(self, layout) -> np.ndarray:
        """Coordinates in a :class:`_Layout`."""
        vec = self.field.zeros(1, layout.size)[0]
        for k, m in self.coeffs.items():
            off = layout.offsets.get(k)
            if off is None:
                raise ValueError("coefficient outside layout")
            vec[off:off + m.size] = m.ravel()
        return vec

    # regular representation
    def regular_matrix(self) -> np.ndarray:
        A, F = self.algebra, self.field
        src_off = _regular_offsets(A, self.src)
        dst_off = _regular_offsets(A, self.dst)
        big = F.zeros(dst_off[-1], src_off[-1])
        pos = A.position_in_projective
        dims = [len(b) for b in A.projective_basis]
        for w, mat in self.coeffs.items():
            i, j = A.path_ends[w]
            for p in A.projective_basis[j]:
                q = A.mult_table.get((w, p))
                if q is None:
                    continue
                rows = dst_off[i] + np.arange(self.dst[i]) * dims[i] + pos[q]
                cols = src_off[j] + np.arange(self.src[j]) * dims[j] + pos[p]
                big[np.ix_(rows, cols)] = F.reduce(big[np.ix_(rows, cols)] + mat)
        return big

    def __repr__(self):
        A = self.algebra
        parts = ", ".join(f"{A.format_path(A.paths[k])}:{m.tolist()}" for k, m in sorted(self.coeffs.items()))
        return f"PathMap({self.src}->{self.dst}; {parts})"


def _regular_offsets(A: GentlePresentation, dims) -> list[int]:
    out = [0]
    for v, d in enumerate(dims):
        out.append(out[-1] + d * len(A.projective_basis[v]))
    return out


class _Layout:
    """Coordinates for all PathMaps ``src -> dst``: one block per nonzero path."""

    def __init__(self, A: GentlePresentation, src, dst):
        self.src, self.dst = tuple(src), tuple(dst)
        self.offsets: dict[int, int] = {}
        self.shapes: dict[int, tuple[int, int]] = {}
        off = 0
        for k, (s, t) in enumerate(A.path_ends):
            shape = (self.dst[s], self.src[t])
            if shape[0] and shape[1]:
                self.offsets[k] = off
                self.shapes[k] = shape
                off += shape[0] * shape[1]
        self.size = off

    def unflatten(self, A, F, vec) -> PathMap:
        coeffs = {}
        for k, off in self.offsets.items():
            r, c = self.shapes[k]
            coeffs[k] = vec[off:off + r * c].reshape(r, c)
        return PathMap._trusted(A, F, self.src, self.dst, coeffs)


# ------------------------------------------------------- differential modules
class DifferentialModule:
    """A pair ``(P, phi)`` with ``P = (+) P_v^{mult[v]}`` and ``phi^2 = 0``."""

    def __init__(self, algebra: GentlePresentation, field: Field, multiplicities, coeffs=None,
                 *, check: bool = True):
        A = algebra
        mult = tuple(int(d) for d in multiplicities)
        if len(mult) != len(A.vertices):
            raise ValueError("one multiplicity per vertex expected")
        if any(d < 0 for d in mult):
            raise ValueError("negative multiplicity")
        if isinstance(coeffs, PathMap):
            phi = coeffs
            if phi.src != mult or phi.dst != mult:
                raise ValueError("differential has the wrong shape")
        else:
            keyed = {}
            for key, mat in (coeffs or {}).items():
                if isinstance(key, str):
                    key = A.parse_path(key)
                if not isinstance(key, int):
                    key = A.path_index[key]
                keyed[key] = mat
            phi = PathMap(A, field, mult, mult, keyed)
        self.algebra = A
        self.field = field
        self.mult = mult
        self.phi = phi
        if check and not (phi @ phi).is_zero():
            raise SquareNonzeroError("phi^2 is not zero")

    @classmethod
    def zero(cls, A, F, mult=None) -> "DifferentialModule":
        return cls(A, F, mult or (0,) * len(A.vertices))

    @property
    def coeffs(self) -> dict[int, np.ndarray]:
        return self.phi.coeffs

    def coefficient(self, path) -> np.ndarray:
        A = self.algebra
        if isinstance(path, str):
            path = A.parse_path(path)
        k = A.path_index[path]
        s, t = A.path_ends[k]
        return self.phi.coeffs.get(k, self.field.zeros(self.mult[s], self.mult[t]))

    @property
    def dimension(self) -> int:
        """Dimension of P as a vector space."""
        return sum(d * len(b) for d, b in zip(self.mult, self.algebra.projective_basis))

    def dimension_vector(self) -> tuple[int, ...]:
        """Dimension of P e_v for each vertex v."""
        A = self.algebra
        out = [0] * len(A.vertices)
        for k, (s, t) in enumerate(A.path_ends):
            out[t] += self.mult[s]
        return tuple(out)

    def is_radical(self) -> bool:
        return not any(k in self.phi.coeffs for k in self.algebra.trivial_index)

    def is_projective_module(self) -> bool:
        """True for phi = 0 (the module P itself, projective over A)."""
        return self.phi.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DifferentialModule):
            return NotImplemented
        return (self.algebra == other.algebra and self.field == other.field
                and self.mult == other.mult and self.phi == other.phi)

    __hash__ = None

    def __repr__(self):
        return f"DifferentialModule(mult={self.mult}, phi={self.phi!r})"

    def identity(self) -> PathMap:
        return PathMap.identity(self.algebra, self.field, self.mult)


def suspend(M: DifferentialModule) -> DifferentialModule:
    return DifferentialModule(M.algebra, M.field, M.mult, -M.phi, check=False)


def twist(M: DifferentialModule, lam) -> DifferentialModule:
    F = M.field
    lam = F.scalar(lam)
    if lam == 0:
        raise ValueError("twist parameter must be nonzero")
    return DifferentialModule(M.algebra, F, M.mult, M.phi.scale(lam), check=False)


def direct_sum(*mods: DifferentialModule) -> DifferentialModule:
    if not mods:
        raise ValueError("need at least one summand")
    A, F = mods[0].algebra, mods[0].field
    nv = len(A.vertices)
    mult = tuple(sum(M.mult[v] for M in mods) for v in range(nv))
    coeffs = {}
    for k, (s, t) in enumerate(A.path_ends):
        if not any(k in M.coeffs for M in mods):
            continue
        block = F.zeros(mult[s], mult[t])
        r = c = 0
        for M in mods:
            if k in M.coeffs:
                m = M.coeffs[k]
                block[r:r + m.shape[0], c:c + m.shape[1]] = m
            r += M.mult[s]
            c += M.mult[t]
        coeffs[k] = block
    return DifferentialModule(A, F, mult, coeffs, check=False)


def contractible(A: GentlePresentation, F: Field, vertex: str) -> DifferentialModule:
    """``(P_v (+) P_v, [[0, 1], [0, 0]])``, the projective-injective attached to P_v."""
    v = A.vertex_index[vertex]
    mult = tuple(2 if u == v else 0 for u in range(len(A.vertices)))
    return DifferentialModule(A, F, mult, {A.trivial_index[v]: [[0, 1], [0, 0]]})


def conjugate(M: DifferentialModule, g: PathMap) -> DifferentialModule:
    """The module ``(P', g^{-1} phi g)`` for an isomorphism ``g: P' -> P``."""
    phi = g.inverse() @ M.phi @ g
    return DifferentialModule(M.algebra, M.field, g.src, phi, check=False)


def random_automorphism(A: GentlePresentation, F: Field, mult, seed=None,
                        radical: bool = True) -> PathMap:
    rng = _rng(seed)
    layout = _Layout(A, mult, mult)
    triv = set(A.trivial_index)
    while True:
        coeffs = {}
        for k, shape in layout.shapes.items():
            if k in triv or radical:
                coeffs[k] = F.random(rng, shape)
        g = PathMap(A, F, tuple(mult), tuple(mult), coeffs)
        if g.top_invertible():
            return g


# ------------------------------------------------------------------- hom
def _intertwining_system(M: DifferentialModule, N: DifferentialModule):
    """Matrix of ``psi -> psi phi_M - phi_N psi`` in the coordinates of ``_Layout(M, N)``."""
    A, F = M.algebra, M.field
    layout = _Layout(A, M.mult, N.mult)
    row_layout = layout  # the equation for path p has the shape of psi_p
    E = F.zeros(row_layout.size, layout.size)
    for p, pairs in A.factorizations.items():
        if p not in row_layout.offsets:
            continue
        r0 = row_layout.offsets[p]
        rr, rc = row_layout.shapes[p]
        for y, x in pairs:
            # psi_y M_x
            if x in M.coeffs and y in layout.offsets:
                c0 = layout.offsets[y]
                blk = np.kron(F.eye(layout.shapes[y][0]), M.coeffs[x].T)
                E[r0:r0 + rr * rc, c0:c0 + blk.shape[1]] += blk
            # - N_y psi_x
            if y in N.coeffs and x in layout.offsets:
                c0 = layout.offsets[x]
                blk = np.kron(N.coeffs[y], F.eye(layout.shapes[x][1]))
                E[r0:r0 + rr * rc, c0:c0 + blk.shape[1]] -= blk
    return layout, F.reduce(E)


@dataclass
class HomBasis:
    source: DifferentialModule
    target: DifferentialModule
    elements: list[PathMap]

    def __len__(self):
        return len(self.elements)

    def combination(self, coeffs) -> PathMap:
        M, N = self.source, self.target
        out = PathMap.zero(M.algebra, M.field, M.mult, N.mult)
        for c, f in zip(coeffs, self.elements):
            if c:
                out = out + f.scale(c)
        return out

    def random_element(self, rng) -> PathMap:
        return self.combination(self.source.field.random(rng, len(self.elements)))


def hom(M: DifferentialModule, N: DifferentialModule) -> HomBasis:
    if M.algebra != N.algebra or M.field != N.field:
        raise ValueError("modules live over different algebras or fields")
    layout, E = _intertwining_system(M, N)
    if layout.size == 0:
        return HomBasis(M, N, [])
    K = kernel_basis(M.field, E)
    return HomBasis(M, N, [layout.unflatten(M.algebra, M.field, row) for row in K])


def hom_dimension(M: DifferentialModule, N: DifferentialModule) -> int:
    layout, E = _intertwining_system(M, N)
    return layout.size - rank(M.field, E) if layout.size else 0


def intertwines(psi: PathMap, M: DifferentialModule, N: DifferentialModule) -> bool:
    return ((psi @ M.phi) - (N.phi @ psi)).is_zero()


@dataclass
class StableHom:
    hom: HomBasis
    null_homotopic_dim: int
    representatives: list[PathMap]

    @property
    def dimension(self) -> int:
        return len(self.representatives)


def stable_hom(M: DifferentialModule, N: DifferentialModule) -> StableHom:
    """Hom modulo the maps ``phi_N h + h phi_M`` with ``h`` any A-linear map."""
    A, F = M.algebra, M.field
    H = hom(M, N)
    layout = _Layout(A, M.mult, N.mult)
    images = []
    for k, (r, c) in layout.shapes.items():
        for a, b in itertools.product(range(r), range(c)):
            m = F.zeros(r, c)
            m[a, b] = 1
            h = PathMap(A, F, M.mult, N.mult, {k: m})
            images.append((N.phi @ h + h @ M.phi).flat(layout))
    null_rank = rank(F, np.array(images)) if images else 0
    reps = []
    if H.elements:
        from .linalg import SpanBuilder
        span = SpanBuilder(F, layout.size)
        for v in images:
            span.add(v)
        for f in H.elements:
            if span.add(f.flat(layout)):
                reps.append(f)
    return StableHom(H, null_rank, reps)


# ------------------------------------------------------------ isomorphism
@dataclass
class IsoVerdict:
    isomorphism: PathMap | None
    certified: bool
    method: str

    @property
    def isomorphic(self) -> bool:
        return self.isomorphism is not None


def _tops_invertible(F: Field, blocks) -> bool:
    return all(is_invertible(F, b) for b in blocks if b.shape[0])


def _trace_vertex(F: Field, mult) -> int | None:
    if not isinstance(F, PrimeField):
        return None
    for v, d in enumerate(mult):
        if d and d % F.p:
            return v
    return None


def _residue_is_field_k(M: DifferentialModule) -> bool:
    """True if End(M) is proven local with residue field k."""
    if not isinstance(M.field, PrimeField):
        return False
    T = _TopAlgebra.of_module(M, hom(M, M))
    return T.dim == 1 or T.local_certificate()


def isomorphism_verdict(M: DifferentialModule, N: DifferentialModule, seed=None,
                        trials: int = 48, local: bool | None = None,
                        end_dim: int | None = None) -> IsoVerdict:
    """Look for an isomorphism ``M -> N``; say whether a negative answer is proven.

    A negative answer is certified by a differing invariant, or, when End(M) is
    known to be local with residue field k, by checking that no product
    ``g_i f_j`` of Hom basis elements is a unit: the residue character of
    ``g f`` is bilinear in ``(f, g)``.
    """
    if M.algebra != N.algebra or M.field != N.field:
        return IsoVerdict(None, True, "different-base")
    F = M.field
    if M.mult != N.mult:
        return IsoVerdict(None, True, "multiplicities")
    if M.dimension == 0:
        return IsoVerdict(PathMap.identity(M.algebra, F, M.mult), True, "zero")
    if M.is_radical() != N.is_radical() or rank_profile(M) != rank_profile(N):
        return IsoVerdict(None, True, "rank-profile")
    H = hom(M, N)
    if end_dim is None:
        end_dim = hom_dimension(N, N)
    if len(H) != end_dim:
        return IsoVerdict(None, True, "hom-dimension")
    for f in H.elements:
        if f.top_invertible():
            return IsoVerdict(f, True, "basis")
    K = hom(N, M)
    if len(K) != len(H):
        return IsoVerdict(None, True, "hom-dimension")
    ftops = [f.top() for f in H.elements]
    gtops = [g.top() for g in K.elements]
    if local is None:
        local = _residue_is_field_k(M)
    v = _trace_vertex(F, M.mult) if local else None
    if v is not None:
        # on a local End(M) with residue k, the residue of x is tr(x_v) / d_v
        Fv = np.array([t[v] for t in ftops], dtype=np.int64)
        Gv = np.array([t[v] for t in gtops], dtype=np.int64)
        tr = np.einsum("gij,fji->gf", Gv, Fv) % F.p
        hits = np.argwhere(tr != 0)
        if len(hits):
            return IsoVerdict(H.elements[int(hits[0][1])], True, "basis-pair")
        return IsoVerdict(None, True, "local-residue")
    for f, ft in zip(H.elements, ftops):
        for gt in gtops:
            if _tops_invertible(F, [F.matmul(x, y) for x, y in zip(gt, ft)]):
                # g f is an automorphism, so f is injective between spaces of equal dimension
                return IsoVerdict(f, True, "basis-pair")
    if local:
        return IsoVerdict(None, True, "local-residue")
    rng = _rng(seed)
    for _ in range(trials):
        f = H.random_element(rng)
        if f.top_invertible():
            return IsoVerdict(f, True, "random")
    return IsoVerdict(None, False, "randomized")


def find_isomorphism(M: DifferentialModule, N: DifferentialModule, seed=None,
                     trials: int = 48) -> PathMap | None:
    """An isomorphism ``M -> N`` if one was found; verified exactly."""
    return isomorphism_verdict(M, N, seed, trials).isomorphism


def is_isomorphic(M: DifferentialModule, N: DifferentialModule, seed=None) -> bool:
    return find_isomorphism(M, N, seed) is not None


def isomorphism_classes(mods, seed=None) -> list[list[int]]:
    """Partition indices of ``mods`` into isomorphism classes.

    Modules are bucketed by cheap invariants first; within a bucket each new
    module is compared with one representative per class found so far.
    """
    buckets: dict = {}
    for i, M in enumerate(mods):
        key = (M.mult, M.is_radical(), rank_profile(M), hom_dimension(M, M))
        buckets.setdefault(key, []).append(i)
    classes: list[list[int]] = []
    residue: dict[int, bool] = {}
    for key, idx in buckets.items():
        local: list[list[int]] = []
        for i in idx:
            for cls in local:
                r = cls[0]
                if r not in residue:
                    residue[r] = _residue_is_field_k(mods[r])
                verdict = isomorphism_verdict(mods[r], mods[i], seed, local=residue[r], end_dim=key[3])
                if not verdict.certified:
                    raise Inconclusive("could not decide isomorphism within a bucket")
                if verdict.isomorphic:
                    cls.append(i)
                    break
            else:
                local.append([i])
        classes.extend(local)
    return sorted(classes)


def rank_profile(M: DifferentialModule) -> tuple:
    """Isomorphism invariant: rank of phi restricted to each ``P e_v``."""
    cached = getattr(M, "_rank_profile", None)
    if cached is None:
        cached = M._rank_profile = _rank_profile(M)
    return cached


def _rank_profile(M: DifferentialModule) -> tuple:
    A, F = M.algebra, M.field
    big = M.phi.regular_matrix()
    off = _regular_offsets(A, M.mult)
    dims = [len(b) for b in A.projective_basis]
    pos = A.position_in_projective
    ranks = []
    for v in range(len(A.vertices)):
        # basis vectors of P ending at v
        idx = []
        for u, d in enumerate(M.mult):
            for k in A.projective_basis[u]:
                if A.path_ends[k][1] == v:
                    idx.extend(off[u] + c * dims[u] + pos[k] for c in range(d))
        ranks.append(rank(F, big[np.ix_(idx, idx)]) if idx else 0)
    return tuple(ranks)


# ---------------------------------------------------- idempotents and split
@dataclass
class Verdict:
    indecomposable: bool
    certified: bool
    method: str
    idempotent: PathMap | None = None


def _single_eigenvalue(F: Field, X, mp):
    """The eigenvalue ``c`` if the minimal polynomial can only be ``(x - c)^m``.

    The caller still verifies ``(X - c)^m = 0``.
    """
    m = len(mp) - 1
    p = F.characteristic
    if not p or m % p:
        # read c from the x^{m-1} coefficient of (x - c)^m
        return F.scalar(F.neg(mp[m - 1]) * F.inv(m))
    n = X.shape[0]
    if n % p:
        return F.scalar(int(np.trace(X)) * F.inv(n))
    x = sympy.Symbol("x")
    roots = sympy.Poly(list(reversed([int(c) for c in mp])), x, modulus=p).ground_roots()
    return F.scalar(int(next(iter(roots)))) if len(roots) == 1 else None


class _TopAlgebra:
    """Image of an endomorphism algebra in a product of matrix algebras.

    ``tops[i]`` lists the square diagonal blocks of the ``i``-th basis
    element.  The map to this product must be an algebra map with nilpotent
    kernel, as for the trivial-path part of End(M).
    """

    def __init__(self, F: Field, dims, tops, combine=None):
        self.F = F
        self.dims = list(dims)
        self.combine = combine
        self.total = sum(d * d for d in self.dims)
        flat = [np.concatenate([np.asarray(b).ravel() for b in t] + [F.zeros(1, 0)[0]]) for t in tops]
        if flat:
            R, piv = rref(F, np.array(flat))
            self.basis = R[:len(piv)]
        else:
            self.basis = F.zeros(0, self.total)
        self.flat_end = np.array(flat) if flat else F.zeros(0, self.total)

    @classmethod
    def of_module(cls, M: DifferentialModule, H: HomBasis) -> "_TopAlgebra":
        return cls(M.field, M.mult, [f.top() for f in H.elements], H.combination)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def blocks(self, vec) -> list[np.ndarray]:
        out, off = [], 0
        for d in self.dims:
            out.append(vec[off:off + d * d].reshape(d, d))
            off += d * d
        return out

    def as_matrix(self, vec) -> np.ndarray:
        """Block-diagonal matrix of an element."""
        F = self.F
        n = sum(self.dims)
        big = F.zeros(n, n)
        off = 0
        for b in self.blocks(vec):
            d = b.shape[0]
            big[off:off + d, off:off + d] = b
            off += d
        return big

    def from_matrix(self, big) -> np.ndarray:
        parts, off = [], 0
        for d in self.dims:
            parts.append(big[off:off + d, off:off + d].ravel())
            off += d
        return np.concatenate(parts)

    def is_idempotent_nontrivial(self, vec) -> bool:
        F = self.F
        big = self.as_matrix(vec)
        n = big.shape[0]
        if not np.array_equal(F.matmul(big, big), big):
            return False
        return np.any(big != 0) and not np.array_equal(big, F.eye(n))

    def local_certificate(self) -> bool:
        """True if ``T = k 1 + J`` with ``J`` spanned by ``b - c(b) 1`` nilpotent.

        Each basis element must have a single eigenvalue ``c(b)`` in the prime
        field; then ``J`` is checked to be nilpotent by multiplying spans until
        they vanish.  Success proves that every element of T is a unit or
        nilpotent, so T is local.
        """
        from .linalg import minimal_polynomial
        F = self.F
        n = sum(self.dims)
        one = F.eye(n)
        gens = []
        for vec in self.basis:
            X = self.as_matrix(vec)
            mp = minimal_polynomial(F, X)
            m = len(mp) - 1
            c = _single_eigenvalue(F, X, mp)
            if c is None:
                return False
            N = F.reduce(X - c * one)
            P = F.eye(n)
            for _ in range(m):
                P = F.matmul(P, N)
            if not F.is_zero(P):
                return False
            gens.append(N)
        J = [g for g in gens if np.any(g != 0)]
        power = J
        for _ in range(n + 1):
            if not power:
                return True
            prods = [F.matmul(x, y).ravel() for x in power for y in J]
            prods = [v for v in prods if np.any(v != 0)]
            if not prods:
                return True
            R, piv = rref(F, np.array(prods))
            power = [R[i].reshape(n, n) for i in range(len(piv))]
        return False

    def random_split(self, rng) -> np.ndarray | None:
        """Idempotent from the primary decomposition of a random element, if proper."""
        F = self.F
        if self.dim == 0:
            return None
        c = F.random(rng, self.dim)
        big = self.as_matrix(F.reduce(c @ self.basis))
        e = _primary_idempotent(F, big)
        if e is None:
            return None
        return self.from_matrix(e)

    def exhaustive_split(self) -> np.ndarray | None:
        F = self.F
        p = F.p
        m = self.dim
        B = self.basis
        chunk = 20000
        combos = itertools.product(range(p), repeat=m)
        while True:
            block = list(itertools.islice(combos, chunk))
            if not block:
                return None
            C = np.array(block, dtype=np.int64)
            E = (C @ B) % p
            ok = np.ones(len(C), dtype=bool)
            off = 0
            nonzero = np.zeros(len(C), dtype=bool)
            not_one = np.zeros(len(C), dtype=bool)
            for d in self.dims:
                if d == 0:
                    continue
                X = E[:, off:off + d * d].reshape(-1, d, d)
                ok &= np.all((np.einsum("nij,njk->nik", X, X) % p) == X, axis=(1, 2))
                nonzero |= np.any(X != 0, axis=(1, 2))
                not_one |= np.any(X != np.eye(d, dtype=np.int64), axis=(1, 2))
                off += d * d
            hits = np.nonzero(ok & nonzero & not_one)[0]
            if len(hits):
                return E[hits[0]]

    def lift(self, vec) -> PathMap:
        """An idempotent of End(M) whose top is the idempotent ``vec``."""
        F = self.F
        coords = solve(F, self.flat_end.T, vec)
        assert coords is not None
        x = self.combine(coords)
        for _ in range(64):
            x2 = x @ x
            if x2 == x:
                return x
            x = x2.scale(3) - (x2 @ x).scale(2)
        raise AssertionError("idempotent lifting did not converge")


def _poly_from_sympy(F, poly) -> list[int]:
    return [int(c) % F.p for c in reversed(poly.all_coeffs())]


def _primary_idempotent(F: PrimeField, big: np.ndarray) -> np.ndarray | None:
    """Idempotent projecting onto one primary component of ``big``, if there are two."""
    from .linalg import minimal_polynomial, poly_eval_matrix
    x = sympy.Symbol("x")
    mp = minimal_polynomial(F, big)
    P = sympy.Poly(list(reversed([int(c) for c in mp])), x, modulus=F.p)
    _, factors = P.factor_list()
    if len(factors) < 2:
        return None
    f1 = factors[0][0] ** factors[0][1]
    rest = sympy.Poly(1, x, modulus=F.p)
    for g, k in factors[1:]:
        rest = rest * g ** k
    s, t, h = sympy.gcdex(f1, rest)
    # s f1 + t rest = 1, so t*rest is 1 on the f1-part and 0 elsewhere
    e_poly = (t * rest).rem(P)
    e = poly_eval_matrix(F, _poly_from_sympy(F, e_poly), big)
    n = big.shape[0]
    if not np.any(e != 0) or np.array_equal(e, F.eye(n)):
        return None
    return e


def indecomposability(M: DifferentialModule, seed=None, trials: int = MIN_TRIALS,
                      require_certificate: bool = False) -> Verdict:
    """Decide indecomposability via idempotents of the top algebra of End(M).

    End(M) maps onto an algebra T of block matrices with nilpotent kernel, so
    M is indecomposable iff T has no idempotent besides 0 and 1.  Random
    elements are split by their primary decomposition; when T is small, an
    exhaustive search certifies the answer.
    """
    F = M.field
    if not isinstance(F, PrimeField):
        raise ValueError("indecomposability requires a prime field")
    if M.dimension == 0:
        return Verdict(False, True, "zero")
    H = hom(M, M)
    T = _TopAlgebra.of_module(M, H)
    if T.dim == 1:
        return Verdict(True, True, "scalar-top")
    if T.local_certificate():
        return Verdict(True, True, "nilpotent-complement")
    rng = _rng(seed)
    for _ in range(trials):
        e = T.random_split(rng)
        if e is not None:
            return Verdict(False, True, "random-split", T.lift(e))
    if T.dim <= EXHAUSTIVE_DIM and F.p ** T.dim <= EXHAUSTIVE_SIZE:
        e = T.exhaustive_split()
        if e is None:
            return Verdict(True, True, "exhaustive")
        return Verdict(False, True, "exhaustive", T.lift(e))
    if require_certificate or trials < MIN_TRIALS:
        raise Inconclusive(f"no split after {trials} trials; top algebra of dimension {T.dim} "
                           "too large for exhaustive search")
    return Verdict(True, False, "randomized")


def is_indecomposable(M: DifferentialModule, seed=None, trials: int = MIN_TRIALS,
                      require_certificate: bool = False) -> bool:
    return indecomposability(M, seed, trials, require_certificate).indecomposable


def split_by_idempotent(M: DifferentialModule, e: PathMap):
    """Split ``M = eM (+) (1-e)M`` for an idempotent endomorphism ``e``.

    Returns ``(M1, M2, g)`` where ``g: P1 (+) P2 -> P`` is the isomorphism used.
    """
    A, F = M.algebra, M.field
    tops = e.top()
    S_blocks, keep, drop = [], [], []
    for v, E in enumerate(tops):
        d = E.shape[0]
        if d == 0:
            S_blocks.append(E)
            keep.append([])
            drop.append([])
            continue
        R, piv = rref(F, E.T)
        im = R[:len(piv)].T
        ker = kernel_basis(F, E).T
        S_blocks.append(np.concatenate([im, ker], axis=1))
        keep.append(list(range(len(piv))))
        drop.append(list(range(len(piv), d)))
    S = PathMap.diagonal(A, F, S_blocks)
    e1 = S.inverse() @ e @ S
    pi = PathMap.diagonal(A, F, [np.diag([1] * len(k) + [0] * len(r)).astype(np.int64)
                                 if len(k) + len(r) else F.zeros(0, 0)
                                 for k, r in zip(keep, drop)])
    one = PathMap.identity(A, F, M.mult)
    u = e1 @ pi + (one - e1) @ (one - pi)
    g = S @ u
    phi = g.inverse() @ M.phi @ g
    off = phi.restrict(keep, drop)
    off2 = phi.restrict(drop, keep)
    if not (off.is_zero() and off2.is_zero()):
        raise AssertionError("idempotent does not commute with the differential")
    M1 = DifferentialModule(A, F, tuple(map(len, keep)), phi.restrict(keep, keep), check=False)
    M2 = DifferentialModule(A, F, tuple(map(len, drop)), phi.restrict(drop, drop), check=False)
    return M1, M2, g


def decompose(M: DifferentialModule, seed=None, trials: int = MIN_TRIALS,
              require_certificate: bool = False) -> list[DifferentialModule]:
    """Indecomposable summands of M (Krull-Schmidt), found by recursive splitting."""
    rng = _rng(seed)
    out = []
    stack = [M]
    while stack:
        X = stack.pop()
        if X.dimension == 0:
            continue
        v = indecomposability(X, rng, trials, require_certificate)
        if v.indecomposable:
            out.append(X)
            continue
        X1, X2, _ = split_by_idempotent(X, v.idempotent)
        stack.extend([X2, X1])
    return out


def split_projectives(M: DifferentialModule):
    """Peel off contractible summands ``(P_v (+) P_v, [[0,1],[0,0]])``.

    Returns ``(M_rad, counts)`` with ``M_rad`` radical and ``counts[v]`` the
    number of contractible summands attached to vertex ``v``.
    """
    A, F = M.algebra, M.field
    counts = dict.fromkeys(A.vertices, 0)
    while True:
        hit = None
        for v, k in enumerate(A.trivial_index):
            blk = M.coeffs.get(k)
            if blk is not None:
                rows, cols = np.nonzero(blk)
                hit = (v, int(cols[0]))
                break
        if hit is None:
            return M, {v: c for v, c in counts.items() if c}
        v, l = hit
        d = M.mult
        two = tuple(2 if u == v else 0 for u in range(len(d)))
        # iota: generator 0 -> copy l of P_v, generator 1 -> its image under phi
        iota = {}
        for w, mat in M.coeffs.items():
            s, t = A.path_ends[w]
            if t == v:
                blk = F.zeros(d[s], 2)
                blk[:, 1] = mat[:, l]
                iota[w] = blk
        ev = A.trivial_index[v]
        blk = iota.get(ev, F.zeros(d[v], 2)).copy()
        blk[l, 0] = 1
        iota[ev] = blk
        iota = PathMap(A, F, two, d, iota)
        ytop = M.coeffs[ev][:, l]
        ks = [k for k in np.nonzero(ytop)[0] if k != l]
        assert ks, "top of phi(x) must leave the span of x"
        beta = F.zeros(1, d[v])
        beta[0, ks[0]] = F.inv(ytop[ks[0]])
        b = PathMap(A, F, d, tuple(1 if u == v else 0 for u in range(len(d))), {ev: beta})
        bphi = b @ M.phi
        rho = {}
        for w in set(b.coeffs) | set(bphi.coeffs):
            s, t = A.path_ends[w]
            blk = F.zeros(2, d[t])
            if w in bphi.coeffs:
                blk[0] = bphi.coeffs[w][0]
            if w in b.coeffs:
                blk[1] = b.coeffs[w][0]
            rho[w] = blk
        rho = PathMap(A, F, d, two, rho)
        e = iota @ (rho @ iota).inverse() @ rho
        C, M, _ = split_by_idempotent(M, e)
        assert C.mult == two
        counts[A.vertices[v]] += 1


# ------------------------------------------------------------------ dumps
def dump_module(M: DifferentialModule) -> str:
    A, F = M.algebra, M.field
    lines = [f"field {F.p if isinstance(F, PrimeField) else 'QQ'}"]
    lines += [f"dim {v}={d}" for v, d in zip(A.vertices, M.mult)]
    for k in sorted(M.coeffs):
        m = M.coeffs[k]
        lines.append(f"coef {A.format_path(A.paths[k])} {m.shape[0]}x{m.shape[1]}")
        lines.extend(" ".join(str(x) for x in row) for row in m)
    return "\n".join(lines) + "\n"


def load_module(A: GentlePresentation, text: str, field: Field | None = None) -> DifferentialModule:
    from fractions import Fraction
    from .linalg import QQ
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    F = field
    mult = dict.fromkeys(A.vertices, 0)
    coeffs = {}
    i = 0
    while i < len(lines):
        parts = lines[i].split()
        if parts[0] == "field":
            declared = QQ if parts[1] == "QQ" else GF(int(parts[1]))
            if F is None:
                F = declared
            i += 1
        elif parts[0] == "dim":
            v, d = parts[1].split("=")
            if v not in mult:
                raise ValueError(f"unknown vertex {v!r}")
            mult[v] = int(d)
            i += 1
        elif parts[0] == "deg":
            # complex dumps carry degrees, which the folded module forgets
            i += 1
        elif parts[0] == "coef":
            r, c = (int(x) for x in parts[2].split("x"))
            rows = [[Fraction(x) for x in lines[i + 1 + j].split()] for j in range(r)]
            if any(len(row) != c for row in rows):
                raise ValueError(f"coefficient {parts[1]} has ragged rows")
            coeffs[parts[1]] = rows if r else np.zeros((0, c), dtype=np.int64)
            i += 1 + r
        else:
            raise ValueError(f"unexpected line {lines[i]!r}")
    F = F or GF(5)
    return DifferentialModule(A, F, [mult[v] for v in A.vertices], coeffs)
