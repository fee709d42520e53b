import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gentlecm.corpus import load_algebra
from gentlecm.diffmod import DifferentialModule, contractible, hom
from gentlecm.linalg import GF, jordan_block
from gentlecm.matrix_problem import (B_band, B_string, G_morphism, G_object, SigmaError,
                                     SigmaMatrix, SigmaMorphism, build_Y, canonical_yband,
                                     canonical_ystring, dump_sigma_matrix, gamma, gamma_b,
                                     inverse_yword, sigma_hom, sigma_invariants,
                                     sigma_isomorphism, validate_yband, validate_ystring)
from gentlecm.quiver import parse_presentation
from gentlecm.strings import (band_object, enumerate_bands, enumerate_strings, parse_letters,
                              string_object, validate_band, validate_string)

F = GF(5)
A0 = load_algebra("builtin:a0")
C3 = load_algebra("builtin:cycle3")
SIX = "a,b,ab'^-1,a',b',a'b^-1"


def orders(A):
    return [None, list(reversed(sorted(A.maximal_paths_alg)))]


def Ylabels(Y):
    return [(str(y.maximal), str(y.prefix)) for y in Y.elements]


def prefix_oracle(A, maximal):
    """Prefixes of each maximal path and the pairing of prefixes with a common target."""
    elems = []
    for w in maximal:
        elems.append((w, A.trivial(w.source)))
        elems += [(w, A.path(w.arrows[:n])) for n in range(1, len(w.arrows) + 1)]
    sigma = []
    for i, (_, p) in enumerate(elems):
        same = [j for j, (_, q) in enumerate(elems) if q.target == p.target and j != i]
        sigma.append(same[0] if same else i)
    return elems, sigma


# ---------------------------------------------------------------- Y
def test_Y_torus_algebra():
    Y = build_Y(A0, ["ab'", "a'b"])
    assert [str(y) for y in Y.elements] == ["e(1)[ab']", "a[ab']", "ab'[ab']",
                                            "e(1)[a'b]", "a'[a'b]", "a'b[a'b]"]
    assert Y.sigma == [3, 4, 5, 0, 1, 2]


def test_Y_single_arrow():
    A = parse_presentation("vertex 1\nvertex 2\narrow a 1 2\n")
    Y = build_Y(A)
    assert [str(y.prefix) for y in Y.elements] == ["e(1)", "a"]
    assert Y.sigma == [0, 1]


def test_Y_cycle():
    Y = build_Y(C3)
    assert [str(y.prefix) for y in Y.elements] == ["e(2)", "a", "ab", "abd"]
    # e_2 and abd both end at 2
    assert Y.sigma == [3, 1, 2, 0]


@pytest.mark.parametrize("A", [A0, C3])
def test_Y_matches_prefix_oracle(A):
    for order in orders(A):
        Y = build_Y(A, order)
        elems, sigma = prefix_oracle(A, Y.maximal)
        assert [(y.maximal, y.prefix) for y in Y.elements] == elems
        assert Y.sigma == sigma
        assert all(Y.sigma[Y.sigma[i]] == i for i in range(len(Y)))


def test_Y_order_must_be_permutation():
    with pytest.raises(ValueError):
        build_Y(A0, ["ab'"])


# ---------------------------------------------------------------- G on objects
def test_G_of_arrow_string():
    Y = build_Y(A0)
    M = string_object(A0, F, validate_string(A0, parse_letters(A0, "a")))
    GM = G_object(Y, M)
    assert GM.nonzero_blocks() == [(0, 1)]
    assert GM.block(0, 1).tolist() == [[1]]


@pytest.mark.parametrize("lam", [1, 2, 3, 4])
def test_G_of_cycle_band(lam):
    Y = build_Y(C3)
    M = DifferentialModule(C3, F, (0, 1, 0), {"abd": [[lam]]})
    GM = G_object(Y, M)
    assert GM.nonzero_blocks() == [(0, 3)]
    assert GM.block(0, 3).tolist() == [[lam]]


def test_G_of_projectives_is_zero():
    for A in (A0, C3):
        Y = build_Y(A)
        for mult in [(1, 0, 0), (0, 2, 1), (1, 1, 1)]:
            assert G_object(Y, DifferentialModule(A, F, mult)).is_zero()


def test_G_rejects_non_radical():
    with pytest.raises(SigmaError):
        G_object(build_Y(A0), contractible(A0, F, "1"))


def test_G_is_nonzero_off_projectives():
    Y = build_Y(A0)
    for w in enumerate_strings(A0, 3):
        assert not G_object(Y, string_object(A0, F, w)).is_zero()


# ---------------------------------------------------------------- G on morphisms
def test_G_identity():
    Y = build_Y(A0)
    M = band_object(A0, F, validate_band(A0, parse_letters(A0, SIX)), jordan_block(F, 2, 2))
    T = G_morphism(Y, M.identity(), M, M)
    assert np.array_equal(T.matrix, F.eye(T.matrix.shape[0]))
    assert T.is_invertible()


def test_G_of_trivial_path_morphism_is_block_diagonal():
    Y = build_Y(A0)
    M = string_object(A0, F, validate_string(A0, parse_letters(A0, "a,a'^-1")))
    for f in hom(M, M).elements:
        triv = {k: m for k, m in f.coeffs.items() if A0.paths[k].is_trivial}
        if len(triv) != len(f.coeffs):
            continue
        T = G_morphism(Y, f, M, M)
        for u in range(len(Y)):
            for v in range(len(Y)):
                if u != v:
                    assert not np.any(T.block(u, v))


@given(st.sampled_from([(A, w) for A in (A0, C3) for w in enumerate_strings(A, 4)]),
       st.integers(0, 10**6))
def test_G_respects_composition(pair, seed):
    A, w = pair
    Y = build_Y(A)
    M = string_object(A, F, w)
    H = hom(M, M)
    rng = np.random.default_rng(seed)
    p, q = H.random_element(rng), H.random_element(rng)
    lhs = G_morphism(Y, p @ q, M, M)
    rhs = G_morphism(Y, p, M, M) @ G_morphism(Y, q, M, M)
    assert np.array_equal(lhs.matrix, rhs.matrix)
    rhs.validate()


# ---------------------------------------------------------------- Y-words and gamma
def test_gamma_of_arrow():
    Y = build_Y(A0)
    assert gamma(Y, validate_string(A0, parse_letters(A0, "a"))) == ((0, 1),)


def test_gamma_of_six_letter_band():
    Y = build_Y(A0)
    word = gamma_b(Y, validate_band(A0, parse_letters(A0, SIX)))
    assert len(word) == 6
    assert validate_yband(Y, word) == word
    for x, y in zip(word, word[1:] + word[:1]):
        assert x[1] != y[0] and Y.orbit[x[1]] == Y.orbit[y[0]]


def test_gamma_of_cycle_band():
    Y = build_Y(C3)
    assert gamma_b(Y, validate_band(C3, parse_letters(C3, "abd"))) == ((0, 3),)


def test_invalid_ywords():
    Y = build_Y(A0)
    with pytest.raises(SigmaError):
        validate_ystring(Y, [(0, 1), (1, 2)])
    with pytest.raises(SigmaError):
        validate_ystring(Y, [])
    with pytest.raises(SigmaError):
        validate_yband(Y, [(0, 1), (4, 3), (0, 1), (4, 3)])


@pytest.mark.parametrize("A", [A0, C3])
def test_gamma_equivariant_under_inversion(A):
    for order in orders(A):
        Y = build_Y(A, order)
        for w in enumerate_strings(A, 5):
            assert gamma(Y, w.inverse()) == inverse_yword(gamma(Y, w))


@pytest.mark.parametrize("A", [A0, C3])
def test_gamma_injective_on_canonical_forms(A):
    for order in orders(A):
        Y = build_Y(A, order)
        strings = [canonical_ystring(gamma(Y, w)) for w in enumerate_strings(A, 6)]
        bands = [canonical_yband(gamma_b(Y, b)) for b in enumerate_bands(A, 6)]
        assert len(set(strings)) == len(strings)
        assert len(set(bands)) == len(bands)


# ---------------------------------------------------------------- canonical matrices
def test_single_edge_string():
    Y = build_Y(A0)
    B = B_string(Y, F, [(0, 1)])
    assert B.nonzero_blocks() == [(0, 1)]
    assert B.block(0, 1).shape == (1, 1)


def test_B_string_of_arrow_equals_G():
    Y = build_Y(A0)
    w = validate_string(A0, parse_letters(A0, "a"))
    assert B_string(Y, F, gamma(Y, w)) == G_object(Y, string_object(A0, F, w))


@pytest.mark.parametrize("lam", [1, 2, 3, 4])
def test_B_band_of_cycle_isomorphic_to_G(lam):
    Y = build_Y(C3)
    b = validate_band(C3, parse_letters(C3, "abd"))
    J = jordan_block(F, lam, 2)
    GM = G_object(Y, band_object(C3, F, b, J))
    T, certified = sigma_isomorphism(GM, B_band(Y, F, gamma_b(Y, b), J), seed=lam)
    assert T is not None and certified
    T.validate()
    assert T.is_invertible()


def test_B_band_rejects_singular():
    Y = build_Y(C3)
    with pytest.raises(SigmaError):
        B_band(Y, F, [(0, 3)], [[0]])


def test_sigma_matrix_checks():
    Y = build_Y(C3)
    with pytest.raises(SigmaError):
        SigmaMatrix(Y, F, (1, 0, 0, 0))
    with pytest.raises(SigmaError):
        SigmaMatrix(Y, F, (1, 1, 1))


def test_morphism_checks():
    Y = build_Y(C3)
    B = B_band(Y, F, [(0, 3)], [[2]])
    with pytest.raises(SigmaError):
        SigmaMorphism(B, B, [[1, 0], [0, 2]])
    with pytest.raises(SigmaError):
        SigmaMorphism(B, B, [[1, 0], [1, 1]])
    SigmaMorphism(B, B, [[3, 0], [0, 3]])


def test_distinct_band_parameters_not_isomorphic():
    Y = build_Y(C3)
    B2, B3 = B_band(Y, F, [(0, 3)], [[2]]), B_band(Y, F, [(0, 3)], [[3]])
    T, certified = sigma_isomorphism(B2, B3, seed=0)
    assert T is None and certified


def test_dump_format():
    Y = build_Y(C3)
    text = dump_sigma_matrix(B_band(Y, F, [(0, 3)], [[2]]))
    assert text.splitlines()[:4] == ["band e(2)[abd] rows=1 cols=1", "band a[abd] rows=0 cols=0",
                                     "band ab[abd] rows=0 cols=0", "band abd[abd] rows=1 cols=1"]
    assert "block e(2)[abd] abd[abd]" in text


# ---------------------------------------------------------------- properties
STRINGS = [(A, w) for A in (A0, C3) for w in enumerate_strings(A, 6)]
BANDS = [(A, b) for A in (A0, C3) for b in enumerate_bands(A, 4)]


@given(st.sampled_from(STRINGS), st.booleans())
def test_G_of_string_is_B_string(pair, reverse):
    A, w = pair
    Y = build_Y(A, orders(A)[reverse])
    GM = G_object(Y, string_object(A, F, w))
    GM.validate()
    assert GM == B_string(Y, F, gamma(Y, w))


@given(st.sampled_from(BANDS), st.integers(1, 4), st.integers(1, 2), st.booleans())
def test_G_of_band_isomorphic_to_B_band(pair, lam, n, reverse):
    A, b = pair
    Y = build_Y(A, orders(A)[reverse])
    J = jordan_block(F, lam, n)
    GM = G_object(Y, band_object(A, F, b, J))
    T, _ = sigma_isomorphism(GM, B_band(Y, F, gamma_b(Y, b), J), seed=lam)
    assert T is not None
    T.validate()
    assert T.is_invertible()


@given(st.sampled_from(BANDS), st.integers(0, 10**6))
def test_G_morphisms_validate(pair, seed):
    A, b = pair
    Y = build_Y(A)
    M = band_object(A, F, b, jordan_block(F, 3, 1))
    f = hom(M, M).random_element(np.random.default_rng(seed))
    G_morphism(Y, f, M, M).validate()


@given(st.sampled_from(STRINGS))
def test_sigma_hom_elements_are_morphisms(pair):
    A, w = pair
    Y = build_Y(A)
    B = B_string(Y, F, gamma(Y, w))
    for T in sigma_hom(B, B)[:5]:
        T.validate()
    assert sigma_invariants(B) == sigma_invariants(G_object(Y, string_object(A, F, w)))
