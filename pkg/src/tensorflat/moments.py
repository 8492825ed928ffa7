"""Exact limit theory for words in flattening letters.

The limiting family is circular over the group algebra: all cumulants of
order other than two vanish, so every word expectation is a sum over
non-crossing pair partitions of nested two-letter covariances.  The
covariance of a pair of letters is supported on at most one basis element
and is given by a coset membership test on the two flattening permutations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

from .group_algebra import AlgebraElement
from .perms import Permutation, embed_join, group, split_join, tau


@dataclass(frozen=True)
class Letter:
    sigma: Permutation
    eps: str  # "1" or "*"

    def __post_init__(self):
        if self.eps not in ("1", "*"):
            raise ValueError(f"eps must be '1' or '*', got {self.eps!r}")
        if self.sigma.n % 2 != 0:
            raise ValueError("letter permutation must have even degree")

    @property
    def k(self):
        return self.sigma.n // 2


@dataclass(frozen=True)
class Word:
    k: int
    letters: tuple
    etas: tuple

    def __post_init__(self):
        if len(self.letters) != len(self.etas):
            raise ValueError("letters and etas must have equal length")
        for l in self.letters:
            if l.k != self.k:
                raise ValueError("letter degree mismatch")
        for eta in self.etas:
            if eta.n != self.k:
                raise ValueError("eta degree mismatch")

    def __len__(self):
        return len(self.letters)

    def to_json(self):
        return {
            "k": self.k,
            "letters": [
                {"sigma": list(l.sigma.image), "eps": l.eps} for l in self.letters
            ],
            "etas": [list(eta.image) for eta in self.etas],
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        k = data["k"]
        letters = tuple(
            Letter(Permutation(item["sigma"]), item["eps"]) for item in data["letters"]
        )
        etas = tuple(Permutation(img) for img in data.get("etas") or [])
        if not etas:
            etas = tuple(Permutation.identity(k) for _ in letters)
        return cls(k, letters, etas)


def plain_word(k, pairs):
    """Word from (sigma, eps) pairs with trivial interleaved permutations."""
    letters = tuple(Letter(s, e) for s, e in pairs)
    ident = Permutation.identity(k)
    return Word(k, letters, tuple(ident for _ in letters))


def covariance(l, eta, l2, c, cp):
    """The limiting two-letter covariance: the expectation of
    letter * u_eta * letter2 in the group algebra.

    Supported on at most one basis element; which one is decided by whether
    the two flattening permutations differ by a half-preserving factor
    (possibly twisted by the half-swap for same-eps pairs).
    """
    k = eta.n
    if (l.eps, l2.eps) == ("*", "*"):
        # adjoint reduction to the (1, 1) case
        inner = covariance(Letter(l2.sigma, "1"), eta.inverse(), Letter(l.sigma, "1"), c, cp)
        return inner.adjoint()
    d = l.sigma * l2.sigma.inverse()
    if (l.eps, l2.eps) == ("1", "*"):
        split = split_join(d)
        if split is not None and split[1] == eta:
            return c * AlgebraElement.basis(split[0])
        return AlgebraElement.zero(k)
    if (l.eps, l2.eps) == ("*", "1"):
        split = split_join(d)
        if split is not None and split[0] == eta:
            return c * AlgebraElement.basis(split[1])
        return AlgebraElement.zero(k)
    # (1, 1): sigma = tau (eta join eta') sigma'
    split = split_join(tau(k) * d)
    if split is not None and split[0] == eta:
        return cp * AlgebraElement.basis(split[1])
    return AlgebraElement.zero(k)


def enumerate_nc_pairings(n):
    """All non-crossing pair partitions of [n] (0-based pairs internally)."""
    if n % 2:
        return []
    if n > 20:
        raise ValueError(f"n={n} exceeds pairing enumeration bound 20")
    return [tuple(sorted(p)) for p in _nc_pairings(tuple(range(n)))]


def _nc_pairings(points):
    if not points:
        yield ()
        return
    first = points[0]
    for idx in range(1, len(points), 2):
        partner = points[idx]
        inner = points[1:idx]
        outer = points[idx + 1 :]
        for pi in _nc_pairings(inner):
            for po in _nc_pairings(outer):
                yield ((first, partner),) + pi + po


def word_expectation(w, c, cp):
    """Group-algebra expectation of the word, by the pair recursion.

    The first letter is paired with each admissible position j; the inner
    segment is evaluated first and folded into the middle argument of the
    pair covariance (module linearity), then the outer segment multiplies on
    the right.
    """
    return _wick(w.k, w.letters, w.etas, c, cp, {})


def _wick(k, letters, etas, c, cp, cache):
    L = len(letters)
    if L == 0:
        return AlgebraElement.unit(k)
    if L % 2:
        return AlgebraElement.zero(k)
    key = (letters, etas)
    hit = cache.get(key)
    if hit is not None:
        return hit
    total = AlgebraElement.zero(k)
    for j in range(1, L, 2):
        inner = _wick(k, letters[1:j], etas[1:j], c, cp, cache)
        middle = AlgebraElement.basis(etas[0]) * inner
        paircov = AlgebraElement.zero(k)
        for mu, coeff in middle.coeffs.items():
            paircov = paircov + coeff * covariance(letters[0], mu, letters[j], c, cp)
        if paircov.is_zero():
            continue
        outer = _wick(k, letters[j + 1 :], etas[j + 1 :], c, cp, cache)
        total = total + paircov * AlgebraElement.basis(etas[j]) * outer
    cache[key] = total
    return total


def word_expectation_enumerated(w, c, cp):
    """Oracle evaluator: explicit sum over non-crossing pair partitions with
    nested interval-first evaluation.  Independent code path from the
    recursion above; used to cross-check it.
    """
    k = w.k
    L = len(w)
    if L == 0:
        return AlgebraElement.unit(k)
    if L % 2:
        return AlgebraElement.zero(k)
    unit = AlgebraElement.unit(k)
    total = AlgebraElement.zero(k)
    for pairing in enumerate_nc_pairings(L):
        elements = [
            (unit, w.letters[i], AlgebraElement.basis(w.etas[i])) for i in range(L)
        ]
        total = total + _eval_pairing(list(pairing), elements, c, cp)
    return total


def _pair_cov(e1, e2, c, cp):
    left1, l1, right1 = e1
    left2, l2, right2 = e2
    middle = right1 * left2
    out = AlgebraElement.zero(l1.k)
    for mu, coeff in middle.coeffs.items():
        out = out + coeff * covariance(l1, mu, l2, c, cp)
    return left1 * out * right2


def _eval_pairing(pairs, elements, c, cp):
    # repeatedly collapse the innermost interval pair (adjacent positions)
    positions = list(range(len(elements)))
    while pairs:
        # find a pair occupying adjacent current positions
        for pidx, (a, b) in enumerate(pairs):
            ia, ib = positions.index(a), positions.index(b)
            if ib == ia + 1:
                break
        else:
            raise AssertionError("non-crossing pairing has no interval block")
        val = _pair_cov(elements[ia], elements[ib], c, cp)
        del pairs[pidx]
        if len(positions) == 2:
            return val
        if ia > 0:
            left, letter, right = elements[ia - 1]
            elements[ia - 1] = (left, letter, right * val)
        else:
            left, letter, right = elements[ib + 1]
            elements[ib + 1] = (val * left, letter, right)
        del elements[ia : ib + 1]
        del positions[ia : ib + 1]
    raise AssertionError("unreachable")


def word_phi(w, c, cp):
    """Scalar moment: the unit coefficient of the word expectation."""
    return word_expectation(w, c, cp).phi()


# --- mixtures -------------------------------------------------------------


@dataclass(frozen=True)
class Mixture:
    """A linear combination of flattening letters, sum of coeff * m_sigma^eps."""

    k: int
    terms: tuple  # tuple of ((sigma, eps), coeff)

    @classmethod
    def from_map(cls, k, mapping):
        terms = tuple(
            ((sigma, eps), complex(coeff))
            for (sigma, eps), coeff in sorted(
                mapping.items(), key=lambda t: (t[0][0].image, t[0][1])
            )
            if coeff != 0
        )
        return cls(k, terms)

    def items(self):
        return self.terms

    def adjoint_letters(self):
        """Terms of the adjoint mixture (eps flipped, coefficients conjugated)."""
        flipped = {}
        for (sigma, eps), coeff in self.terms:
            key = (sigma, "*" if eps == "1" else "1")
            flipped[key] = flipped.get(key, 0) + coeff.conjugate()
        return Mixture.from_map(self.k, flipped)

    def to_json(self):
        return {
            "k": self.k,
            "terms": [
                {"sigma": list(s.image), "eps": e, "re": c.real, "im": c.imag}
                for (s, e), c in self.terms
            ],
        }


def mixture_covariance(s, eta, s2, c, cp, conj_second=False):
    """Bilinear expansion of the expectation of S u_eta S2 (or S u_eta S2*)."""
    if s.k != s2.k or eta.n != s.k:
        raise ValueError("mixture/eta degree mismatch")
    second = s2.adjoint_letters() if conj_second else s2
    out = AlgebraElement.zero(eta.n)
    for (sig1, e1), c1 in s.terms:
        for (sig2, e2), c2 in second.terms:
            cov = covariance(Letter(sig1, e1), eta, Letter(sig2, e2), c, cp)
            if not cov.is_zero():
                out = out + (c1 * c2) * cov
    return out


def all_sigma_mixture(k, c, signed=False):
    """The normalized sum of all flattenings (optionally signature-weighted)."""
    norm = 1.0 / math.sqrt(math.factorial(2 * k) * math.factorial(k) * c)
    terms = {}
    for sigma in group(2 * k):
        w = sigma.signature() if signed else 1
        terms[(sigma, "1")] = w * norm
    return Mixture.from_map(k, terms)


def hermitized_mixture(k, c, cp):
    """The normalized Hermitian sum of all flattenings plus their adjoints."""
    denom = math.factorial(2 * k) * math.factorial(k) * 2 * (c + complex(cp).real)
    if denom <= 0:
        raise ValueError("c + Re c' must be positive for the Hermitian target")
    norm = 1.0 / math.sqrt(denom)
    terms = {}
    for sigma in group(2 * k):
        terms[(sigma, "1")] = norm
        terms[(sigma, "*")] = norm
    return Mixture.from_map(k, terms)


def character_mixture(k, rho, base_sigma=None, left_delta=True):
    """Mixture with coefficients a(eta1, eta2) = delta(eta1 = id) chi^rho(eta2)
    placed on (eta1 join eta2) base_sigma; with left_delta=False the
    character runs over both factors."""
    from .characters import character_value

    if base_sigma is None:
        base_sigma = Permutation.identity(2 * k)
    terms = {}
    for eta1 in group(k):
        for eta2 in group(k):
            if left_delta and not eta1.is_identity():
                continue
            coeff = character_value(rho, eta2)
            if not left_delta:
                coeff = character_value(rho, eta1) * character_value(rho, eta2)
            sigma = embed_join(eta1, eta2) * base_sigma
            key = (sigma, "1")
            terms[key] = terms.get(key, 0) + coeff
    return Mixture.from_map(k, terms)


def parastat_mixture(k, lam):
    """The symmetrizer-style combination with coefficients proportional to
    the character of a representation of the doubled symmetric group,
    evaluated on the flattening permutation itself."""
    from .characters import character_value, dimension

    norm = dimension(lam) / math.factorial(2 * k)
    terms = {}
    for sigma in group(2 * k):
        terms[(sigma, "1")] = norm * character_value(lam, sigma)
    return Mixture.from_map(k, terms)


# --- freeness criteria ----------------------------------------------------


def freeness_conditions(a, a2, k):
    """Decide asymptotic freeness of two linear combinations given their
    coefficient maps (eta1, eta2) -> complex on the doubled group.

    Returns (cross_free, a_scalar, a2_scalar):
      * cross_free: all shifted cross-correlations of a against a2 vanish;
      * x_scalar: the self-correlation of x vanishes for every nontrivial
        left shift (the combination then behaves as an ordinary circular
        element with scalar covariance).
    """
    elements = group(k)

    def get(m, e1, e2):
        return complex(m.get((e1, e2), 0))

    cross_free = True
    for eta1 in elements:
        for eta2 in elements:
            total = sum(
                get(a, eta1 * mu1, eta2 * mu2) * get(a2, mu1, mu2).conjugate()
                for mu1 in elements
                for mu2 in elements
            )
            if abs(total) > 1e-10:
                cross_free = False
                break
        if not cross_free:
            break

    def self_scalar(m):
        for eta in elements:
            if eta.is_identity():
                continue
            total = sum(
                get(m, eta * mu1, mu2) * get(m, mu1, mu2).conjugate()
                for mu1 in elements
                for mu2 in elements
            )
            if abs(total) > 1e-10:
                return False
        return True

    return cross_free, self_scalar(a), self_scalar(a2)


def scalar_freeness_report(letters, c, cp):
    """True iff every pairwise covariance at the identity middle element is
    supported on the identity, for all adjoint combinations of the given
    letters: the criterion for the family to be circular in the scalar sense.
    """
    if not letters:
        return True
    k = letters[0].k
    ident = Permutation.identity(k)
    for l in letters:
        for l2 in letters:
            for e1 in ("1", "*"):
                for e2 in ("1", "*"):
                    cov = covariance(
                        Letter(l.sigma, e1), ident, Letter(l2.sigma, e2), c, cp
                    )
                    for eta in cov.support():
                        if not eta.is_identity():
                            return False
    return True


@lru_cache(maxsize=None)
def catalan(n):
    return math.comb(2 * n, n) // (n + 1)


def predicted_moments(target, k, n_max):
    """Limiting moments of the spectral targets.

    For the two non-Hermitian targets these are the moments of (SS*)^n; for
    the Hermitian one they are the moments of S^n (odd ones vanish).
    """
    if n_max > 12:
        raise ValueError("n_max exceeds guard 12")
    kfact = math.factorial(k)
    if target in ("S1", "S2"):
        return [catalan(n) / kfact for n in range(1, n_max + 1)]
    if target == "S3":
        return [
            0.0 if n % 2 else catalan(n // 2) / kfact for n in range(1, n_max + 1)
        ]
    raise ValueError(f"unknown target {target!r}")
