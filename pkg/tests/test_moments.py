import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorflat.group_algebra import AlgebraElement, approx_eq, max_coeff_diff
from tensorflat.moments import (
    Letter,
    Word,
    all_sigma_mixture,
    catalan,
    character_mixture,
    covariance,
    enumerate_nc_pairings,
    freeness_conditions,
    hermitized_mixture,
    mixture_covariance,
    parastat_mixture,
    plain_word,
    predicted_moments,
    scalar_freeness_report,
    word_expectation,
    word_expectation_enumerated,
    word_phi,
)
from tensorflat.perms import Permutation, compose, coset_key, embed_join, group, tau

id1 = Permutation.identity(1)
id2 = Permutation.identity(2)
swap2 = Permutation([2, 1])


def random_word(rng, k, L):
    letters = tuple(
        Letter(
            group(2 * k)[rng.integers(math.factorial(2 * k))],
            "1" if rng.integers(2) else "*",
        )
        for _ in range(L)
    )
    etas = tuple(group(k)[rng.integers(math.factorial(k))] for _ in range(L))
    return Word(k, letters, etas)


def test_covariance_examples():
    # same letter against its adjoint through the unit: full weight c
    cov = covariance(Letter(swap2, "1"), id1, Letter(swap2, "*"), 1.0, 0.0)
    assert cov == AlgebraElement(1, {id1: 1.0})
    # plain-plain pair matching through the half swap picks up c'
    cov = covariance(Letter(id2, "1"), id1, Letter(swap2, "1"), 1.0, 0.25)
    assert cov == AlgebraElement(1, {id1: 0.25})
    # different half-preserving cosets have vanishing covariance
    k = 2
    reps = {}
    for s in group(4):
        reps.setdefault(coset_key(s, "Skk"), s)
    reps = list(reps.values())
    cov = covariance(Letter(reps[0], "1"), id2, Letter(reps[1], "*"), 1.0, 0.0)
    assert cov.is_zero()


def test_covariance_formula_cases():
    k = 2
    c, cp = 1.0, 0.5 + 0.25j
    sigma2 = group(4)[7]
    eta_m, eta_l = Permutation([2, 1]), Permutation([2, 1])
    # plain/adjoint: supported at the left factor when sigma = (l join m) sigma2
    sigma = compose(embed_join(eta_l, eta_m), sigma2)
    cov = covariance(Letter(sigma, "1"), eta_m, Letter(sigma2, "*"), c, cp)
    assert cov == AlgebraElement(2, {eta_l: c})
    # adjoint/plain: middle factor on the left slot
    cov = covariance(Letter(sigma, "*"), eta_l, Letter(sigma2, "1"), c, cp)
    assert cov == AlgebraElement(2, {eta_m: c})
    # plain/plain with the half swap
    sigma = compose(tau(k), compose(embed_join(eta_m, eta_l), sigma2))
    cov = covariance(Letter(sigma, "1"), eta_m, Letter(sigma2, "1"), c, cp)
    assert cov == AlgebraElement(2, {eta_l: cp})


@given(st.integers(0, 23), st.integers(0, 23), st.integers(0, 1), st.integers(0, 1))
@settings(max_examples=60)
def test_covariance_adjoint_symmetry(i, j, e, h):
    c, cp = 1.0, 0.3 - 0.4j
    sigma, sigma2 = group(4)[i], group(4)[j]
    eta = group(2)[e]
    lhs = covariance(Letter(sigma, "*"), eta, Letter(sigma2, "*"), c, cp)
    rhs = covariance(
        Letter(sigma2, "1"), eta.inverse(), Letter(sigma, "1"), c, cp
    ).adjoint()
    assert approx_eq(lhs, rhs, 1e-14)


def test_nc_pairings():
    assert enumerate_nc_pairings(2) == [((0, 1),)]
    assert len(enumerate_nc_pairings(4)) == 2
    assert len(enumerate_nc_pairings(16)) == 1430
    assert enumerate_nc_pairings(3) == []
    for pairing in enumerate_nc_pairings(6):
        flat = sorted(x for p in pairing for x in p)
        assert flat == list(range(6))


def test_word_expectation_length_two():
    sigma = group(2)[1]
    w = plain_word(1, [(sigma, "1"), (sigma, "*")])
    assert word_expectation(w, 1.0, 0.0) == AlgebraElement(1, {id1: 1.0})


def test_odd_words_vanish():
    rng = np.random.default_rng(0)
    for L in (1, 3, 5):
        w = random_word(rng, 1, L)
        assert word_expectation(w, 1.0, 0.5).is_zero()


def test_alternating_length_four():
    sigma = group(2)[0]
    w = plain_word(1, [(sigma, "1"), (sigma, "*")] * 2)
    assert word_expectation(w, 1.0, 0.0) == AlgebraElement(1, {id1: 2.0})


def test_word_phi_catalan():
    sigma = group(2)[0]
    for n in (1, 2, 3, 4):
        w = plain_word(1, [(sigma, "1"), (sigma, "*")] * n)
        assert word_phi(w, 1.0, 0.0) == catalan(n)


def test_word_phi_plain_square():
    sigma = group(2)[0]
    w = plain_word(1, [(sigma, "1"), (sigma, "1")])
    assert word_phi(w, 1.0, 0.0) == 0


@pytest.mark.parametrize("k,L", [(1, 4), (1, 6), (2, 4)])
def test_recursion_matches_enumeration(k, L):
    rng = np.random.default_rng(k * 10 + L)
    for _ in range(6):
        w = random_word(rng, k, L)
        a = word_expectation(w, 1.0, 0.3 + 0.2j)
        b = word_expectation_enumerated(w, 1.0, 0.3 + 0.2j)
        assert max_coeff_diff(a, b) <= 1e-12


def test_word_expectation_bimodule():
    rng = np.random.default_rng(11)
    k = 2
    w = random_word(rng, k, 4)
    eta = Permutation([2, 1])
    # appending u_eta multiplies the expectation on the right
    shifted = Word(k, w.letters, w.etas[:-1] + (w.etas[-1] * eta,))
    lhs = word_expectation(shifted, 1.0, 0.5)
    rhs = word_expectation(w, 1.0, 0.5) * AlgebraElement.basis(eta)
    assert approx_eq(lhs, rhs, 1e-13)


def test_word_phi_cyclic_invariance():
    rng = np.random.default_rng(12)
    k = 2
    for _ in range(5):
        w = random_word(rng, k, 4)
        base = word_phi(w, 1.0, 0.5)
        for r in range(1, 4):
            rotated = Word(k, w.letters[r:] + w.letters[:r], w.etas[r:] + w.etas[:r])
            assert abs(word_phi(rotated, 1.0, 0.5) - base) <= 1e-12


def test_word_json_roundtrip():
    rng = np.random.default_rng(13)
    w = random_word(rng, 2, 4)
    assert Word.from_json(w.to_json()) == w


def test_mixture_covariance_all_sigma():
    k = 2
    s = all_sigma_mixture(k, 1.0)
    expected = AlgebraElement(k, {eta: 0.5 for eta in group(k)})
    for eta in group(k):
        cov = mixture_covariance(s, eta, s, 1.0, 0.0, conj_second=True)
        assert approx_eq(cov, expected, 1e-12)


def test_mixture_covariance_signed():
    k = 2
    s = all_sigma_mixture(k, 1.0, signed=True)
    cov = mixture_covariance(s, id2, s, 1.0, 0.0, conj_second=True)
    expected = AlgebraElement(k, {id2: 0.5, swap2: -0.5})
    assert approx_eq(cov, expected, 1e-12)
    # signature weight flips with the middle element's sign
    cov = mixture_covariance(s, swap2, s, 1.0, 0.0, conj_second=True)
    expected = AlgebraElement(k, {id2: -0.5, swap2: 0.5})
    assert approx_eq(cov, expected, 1e-12)


def test_hermitized_mixture_covariance():
    k = 2
    c, cp = 1.0, 0.0
    s = hermitized_mixture(k, c, cp)
    cov = mixture_covariance(s, id2, s, c, cp, conj_second=True)
    expected = AlgebraElement(k, {eta: 0.5 for eta in group(k)})
    assert approx_eq(cov, expected, 1e-12)


def test_mixtures_in_distinct_extended_cosets_are_uncorrelated():
    k = 2
    reps = {}
    for s in group(4):
        reps.setdefault(coset_key(s, "SkkTau"), s)
    reps = list(reps.values())
    from tensorflat.moments import Mixture

    s1 = Mixture.from_map(k, {(reps[0], "1"): 1.0})
    s2 = Mixture.from_map(k, {(reps[1], "1"): 1.0})
    for conj_second in (False, True):
        cov = mixture_covariance(s1, id2, s2, 1.0, 0.7, conj_second=conj_second)
        assert cov.is_zero()


def test_freeness_conditions_characters():
    k = 2
    from tensorflat.characters import character_value

    def charmap(rho):
        return {
            (e1, e2): (1 if e1.is_identity() else 0) * character_value(rho, e2)
            for e1 in group(k)
            for e2 in group(k)
        }

    a, a2 = charmap((2,)), charmap((1, 1))
    cross, a_scal, a2_scal = freeness_conditions(a, a2, k)
    assert cross and a_scal and a2_scal
    ones = {(e1, e2): 1.0 for e1 in group(k) for e2 in group(k)}
    cross, a_scal, _ = freeness_conditions(ones, ones, k)
    assert not cross and not a_scal


def test_scalar_freeness_reports():
    k = 2
    reps = {}
    for s in group(4):
        reps.setdefault(coset_key(s, "SkkTau"), s)
    letters = [Letter(s, "1") for s in reps.values()]
    assert scalar_freeness_report(letters, 1.0, 0.5)
    # two members of one coset are correlated beyond the unit
    sigma = group(4)[3]
    twisted = compose(embed_join(swap2, id2), sigma)
    assert not scalar_freeness_report(
        [Letter(sigma, "1"), Letter(twisted, "1")], 1.0, 0.0
    )
    # transpose pair at k=1 with c' = 0 is scalar-circular
    assert scalar_freeness_report(
        [Letter(Permutation([1, 2]), "1"), Letter(Permutation([2, 1]), "1")], 1.0, 0.0
    )


def test_parastat_mixture_covariance_structure():
    # the symmetrizer-style combination has covariance proportional to
    # characters of the doubled group evaluated on joined permutations
    k = 2
    lam = (3, 1)
    s = parastat_mixture(k, lam)
    from tensorflat.characters import character_value, dimension

    for eta in group(k):
        cov = mixture_covariance(s, eta, s, 1.0, 0.0, conj_second=True)
        norm = dimension(lam) / math.factorial(2 * k)
        for eta2 in group(k):
            expected = norm * character_value(lam, embed_join(eta2, eta))
            assert abs(complex(cov.coeff(eta2)) - expected) <= 1e-10


def test_character_mixture_is_self_scalar():
    k = 2
    s = character_mixture(k, (1, 1))
    cov = mixture_covariance(s, id2, s, 1.0, 0.0, conj_second=True)
    # supported somewhere, but the left-shifted self correlations vanish
    from tensorflat.characters import character_value

    a = {
        (e1, e2): (1 if e1.is_identity() else 0) * character_value((1, 1), e2)
        for e1 in group(k)
        for e2 in group(k)
    }
    _, a_scal, _ = freeness_conditions(a, a, k)
    assert a_scal


def test_predicted_moments():
    assert predicted_moments("S1", 2, 4) == [0.5, 1.0, 2.5, 7.0]
    assert predicted_moments("S1", 1, 4) == [1.0, 2.0, 5.0, 14.0]
    assert predicted_moments("S3", 2, 4) == [0.0, 0.5, 0.0, 1.0]
    with pytest.raises(ValueError):
        predicted_moments("S9", 2, 4)
    with pytest.raises(ValueError):
        predicted_moments("S1", 2, 13)
