"""Symbolic Heisenberg algebra extended by its commutant.

Generators ``q, p`` satisfy ``[q, p] = i``; the commutant generators
``q', p'`` satisfy the pseudo-canonical relation ``[q', p'] = -i`` and commute
with the unprimed pair.  Elements are kept in the canonical normal-ordered
monomial basis ``q^j p^k q'^l p'^m`` with exact complex-rational coefficients,
so every identity in this module is exact.

The indefinite ground state is encoded by a :class:`CovarianceTable` of
ordered two-point values; all higher moments are evaluated by the Gaussian
pair-partition rule (truncated correlations vanish).  On top of the state sit
the GNS-label operations: the adjoint map ``A |0> -> A* |0>``, the modular
phases diagonal in the ``p``-before-``q`` basis, and the metric conjugation
``q <-> p'``, ``p <-> q'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exactcomplex import I, ONE, ZERO, ComplexRational
from .gram import GramMatrix, gram_signature

DEFAULT_WORD_LIMIT = 32


class WordLengthError(ValueError):
    """Raised when a generator word exceeds the configured length bound."""


class UnsupportedDomainError(ValueError):
    """Raised when an operation is applied outside its label domain."""


class Generator(IntEnum):
    Q = 0
    P = 1
    Q_PRIME = 2
    P_PRIME = 3

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]


_SYMBOLS = {
    Generator.Q: "q",
    Generator.P: "p",
    Generator.Q_PRIME: "q'",
    Generator.P_PRIME: "p'",
}

# Monomial key: exponents (j, k, l, m) of q^j p^k q'^l p'^m.
MonomialKey = tuple[int, int, int, int]

_UNIT_KEY: MonomialKey = (0, 0, 0, 0)
_GENERATOR_KEYS = {
    Generator.Q: (1, 0, 0, 0),
    Generator.P: (0, 1, 0, 0),
    Generator.Q_PRIME: (0, 0, 1, 0),
    Generator.P_PRIME: (0, 0, 0, 1),
}


@lru_cache(maxsize=None)
def _reorder_coeffs(k: int, j: int, sign_im: int) -> tuple[tuple[int, ComplexRational], ...]:
    """Coefficients of p^k q^j = sum_s C(k,s) C(j,s) s! (sign_im*i)^s q^(j-s) p^(k-s).

    ``sign_im=-1`` reorders the unprimed pair ([q,p]=i), ``sign_im=+1`` the
    primed pair ([q',p']=-i).  Returns ((s, coeff), ...).
    """
    unit = ComplexRational(0, sign_im)
    out = []
    for s in range(min(j, k) + 1):
        coeff = ComplexRational(math.comb(k, s) * math.comb(j, s) * math.factorial(s)) * unit**s
        out.append((s, coeff))
    return tuple(out)


@lru_cache(maxsize=None)
def _mul_keys(a: MonomialKey, b: MonomialKey) -> tuple[tuple[MonomialKey, ComplexRational], ...]:
    """Product of canonical monomials, reduced to canonical form."""
    j1, k1, l1, m1 = a
    j2, k2, l2, m2 = b
    out = []
    for s, cs in _reorder_coeffs(k1, j2, -1):
        for t, ct in _reorder_coeffs(m1, l2, +1):
            key = (j1 + j2 - s, k1 + k2 - s, l1 + l2 - t, m1 + m2 - t)
            out.append((key, cs * ct))
    return tuple(out)


def _coerce_scalar(value) -> ComplexRational | None:
    if isinstance(value, ComplexRational):
        return value
    if isinstance(value, (int, Fraction)):
        return ComplexRational(value)
    return None


class AlgebraElement:
    """Exact linear combination of canonical monomials q^j p^k q'^l p'^m."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[MonomialKey, ComplexRational] | None = None):
        clean: dict[MonomialKey, ComplexRational] = {}
        if terms:
            for key, coeff in terms.items():
                if coeff:
                    clean[key] = coeff
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls()

    @classmethod
    def one(cls) -> "AlgebraElement":
        return cls({_UNIT_KEY: ONE})

    @classmethod
    def generator(cls, g: Generator) -> "AlgebraElement":
        return cls({_GENERATOR_KEYS[g]: ONE})

    @classmethod
    def monomial(cls, key: MonomialKey, coeff=ONE) -> "AlgebraElement":
        c = _coerce_scalar(coeff)
        if c is None:
            raise TypeError(f"bad coefficient {coeff!r}")
        return cls({tuple(key): c})

    # -- inspection -----------------------------------------------------------

    @property
    def terms(self) -> dict[MonomialKey, ComplexRational]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(key) for key in self._terms)

    def coefficient(self, key: MonomialKey) -> ComplexRational:
        return self._terms.get(tuple(key), ZERO)

    def is_unprimed(self) -> bool:
        return all(l == 0 and m == 0 for (_, _, l, m) in self._terms)

    # -- algebra --------------------------------------------------------------

    def __add__(self, other):
        other = _coerce_element(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            terms[key] = terms.get(key, ZERO) + coeff
        return AlgebraElement(terms)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_element(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_element(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return AlgebraElement({k: -c for k, c in self._terms.items()})

    def __mul__(self, other):
        scalar = _coerce_scalar(other)
        if scalar is not None:
            return AlgebraElement({k: c * scalar for k, c in self._terms.items()})
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        terms: dict[MonomialKey, ComplexRational] = {}
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                cab = ca * cb
                for key, red in _mul_keys(ka, kb):
                    terms[key] = terms.get(key, ZERO) + cab * red
        return AlgebraElement(terms)

    def __rmul__(self, other):
        scalar = _coerce_scalar(other)
        if scalar is not None:
            return self * scalar
        return NotImplemented

    def __eq__(self, other):
        other = _coerce_element(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for key in sorted(self._terms, key=lambda k: (sum(k), k)):
            coeff = self._terms[key]
            mono = _format_monomial(key)
            if mono == "1":
                parts.append(f"({coeff})")
            elif coeff == ONE:
                parts.append(mono)
            else:
                parts.append(f"({coeff}) {mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"AlgebraElement({self})"


def _coerce_element(value):
    if isinstance(value, AlgebraElement):
        return value
    scalar = _coerce_scalar(value)
    if scalar is None:
        return NotImplemented
    return AlgebraElement({_UNIT_KEY: scalar})


def _format_monomial(key: MonomialKey) -> str:
    if key == _UNIT_KEY:
        return "1"
    parts = []
    for g, exp in zip(Generator, key):
        if exp == 1:
            parts.append(g.symbol)
        elif exp > 1:
            parts.append(f"{g.symbol}^{exp}")
    return " ".join(parts)


Q = AlgebraElement.generator(Generator.Q)
P = AlgebraElement.generator(Generator.P)
Q_PRIME = AlgebraElement.generator(Generator.Q_PRIME)
P_PRIME = AlgebraElement.generator(Generator.P_PRIME)
UNIT = AlgebraElement.one()


def normal_order(word, max_len: int = DEFAULT_WORD_LIMIT) -> AlgebraElement:
    """Reduce a generator word (left to right product) to canonical form."""
    word = list(word)
    if len(word) > max_len:
        raise WordLengthError(f"word of length {len(word)} exceeds bound {max_len}")
    result = UNIT
    for g in word:
        result = result * AlgebraElement.generator(Generator(g))
    return result


def commutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b - b * a


def adjoint(e: AlgebraElement) -> AlgebraElement:
    """Antilinear *-operation: conjugate coefficients, reverse each monomial."""
    result: dict[MonomialKey, ComplexRational] = {}
    for (j, k, l, m), coeff in e.terms.items():
        cc = coeff.conjugate()
        # reversed word is (p^k q^j)(p'^m q'^l); reorder each factor
        for s, cs in _reorder_coeffs(k, j, -1):
            for t, ct in _reorder_coeffs(m, l, +1):
                key = (j - s, k - s, l - t, m - t)
                result[key] = result.get(key, ZERO) + cc * cs * ct
    return AlgebraElement(result)


def evolve(e: AlgebraElement, t) -> AlgebraElement:
    """Free time evolution: q -> q + t p, p -> p, q' -> q' - t p', p' -> p'."""
    t = Fraction(t)
    if t == 0:
        return e
    total = AlgebraElement.zero()
    img_q = Q + AlgebraElement.monomial(_GENERATOR_KEYS[Generator.P], ComplexRational(t))
    img_qp = Q_PRIME + AlgebraElement.monomial(
        _GENERATOR_KEYS[Generator.P_PRIME], ComplexRational(-t)
    )
    pow_cache: dict[tuple[int, int], AlgebraElement] = {}

    def _power(base_id: int, base: AlgebraElement, n: int) -> AlgebraElement:
        out = pow_cache.get((base_id, n))
        if out is None:
            out = UNIT
            for _ in range(n):
                out = out * base
            pow_cache[(base_id, n)] = out
        return out

    for (j, k, l, m), coeff in e.terms.items():
        part = _power(0, img_q, j)
        if k:
            part = part * AlgebraElement.monomial((0, k, 0, 0))
        if l:
            part = part * _power(1, img_qp, l)
        if m:
            part = part * AlgebraElement.monomial((0, 0, 0, m))
        total = total + part * coeff
    return total


def metric_conjugate(e: AlgebraElement) -> AlgebraElement:
    """Krein-metric conjugation: the involutive automorphism q <-> p', p <-> q'."""
    total: dict[MonomialKey, ComplexRational] = {}
    for (j, k, l, m), coeff in e.terms.items():
        # image word p'^j q'^k p^l q^m, reordered per commuting sector
        for s, cs in _reorder_coeffs(l, m, -1):
            for t, ct in _reorder_coeffs(j, k, +1):
                key = (m - s, l - s, k - t, j - t)
                total[key] = total.get(key, ZERO) + coeff * cs * ct
    return AlgebraElement(total)


def scale_transform(e: AlgebraElement, lam) -> AlgebraElement:
    """Scale automorphism q -> lam q, p -> lam^-1 p (and mirrored on primes)."""
    lam = Fraction(lam)
    if lam == 0:
        raise ValueError("scale parameter must be nonzero")
    terms = {}
    for (j, k, l, m), coeff in e.terms.items():
        terms[(j, k, l, m)] = coeff * ComplexRational(lam ** (j - k + l - m))
    return AlgebraElement(terms)


# -- state ---------------------------------------------------------------------


@dataclass(frozen=True)
class CovarianceTable:
    """Ordered two-point values of the invariant Gaussian functional.

    The unprimed block is (q^2 -> c, p^2 -> 0, qp -> i/2, pq -> -i/2) and the
    primed block mirrors it with the opposite commutator sign.  The cross
    block is fixed by the annihilation relations (q + i q')|0> = 0 and
    (p - i p')|0> = 0, which are solvable jointly with hermiticity and
    vanishing mixed commutators only for c = 0; the resulting cross values
    (qq' -> 0, qp' -> 1/2, pq' -> 1/2, pp' -> 0) are kept for every c so the
    table stays a consistent functional on the extended algebra.
    """

    c: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))

    def value(self, x: Generator, y: Generator) -> ComplexRational:
        return self._matrix()[x][y]

    @lru_cache(maxsize=None)
    def _matrix(self):
        c = ComplexRational(self.c)
        half = ComplexRational(Fraction(1, 2))
        ihalf = ComplexRational(0, Fraction(1, 2))
        return (
            (c, ihalf, ZERO, half),
            (-ihalf, ZERO, half, ZERO),
            (ZERO, half, c, -ihalf),
            (half, ZERO, ihalf, ZERO),
        )


def wick_value(word, table: CovarianceTable) -> ComplexRational:
    """Evaluate the state on an ordered generator word by pair partitions.

    Sums over perfect matchings of the word, each pair contributing the
    ordered two-point value of its (earlier, later) generators; odd words
    vanish.  Memoized on the remaining subword, which collapses the
    exponentially many matchings of repeated generators.
    """
    word = tuple(Generator(g) for g in word)
    if len(word) % 2 == 1:
        return ZERO
    memo: dict[tuple, ComplexRational] = {(): ONE}

    def rec(sub: tuple) -> ComplexRational:
        cached = memo.get(sub)
        if cached is not None:
            return cached
        first = sub[0]
        total = ZERO
        for pos in range(1, len(sub)):
            pair = table.value(first, sub[pos])
            if not pair:
                continue
            total = total + pair * rec(sub[1:pos] + sub[pos + 1 :])
        memo[sub] = total
        return total

    return rec(word)


def _word_of_key(key: MonomialKey) -> tuple[Generator, ...]:
    j, k, l, m = key
    return (
        (Generator.Q,) * j
        + (Generator.P,) * k
        + (Generator.Q_PRIME,) * l
        + (Generator.P_PRIME,) * m
    )


def omega(e: AlgebraElement, table: CovarianceTable) -> ComplexRational:
    """State value on an algebra element (linear, Gaussian pair-partition)."""
    total = ZERO
    for key, coeff in e.terms.items():
        total = total + coeff * wick_value(_word_of_key(key), table)
    return total


@dataclass(frozen=True)
class GnsVector:
    """GNS label: the vector A |0> represented by the element A."""

    label: AlgebraElement


def _label_of(v) -> AlgebraElement:
    return v.label if isinstance(v, GnsVector) else v


def gns_inner(u, v, table: CovarianceTable) -> ComplexRational:
    """Indefinite inner product <A|0>, B|0>> = omega(A* B)."""
    return omega(adjoint(_label_of(u)) * _label_of(v), table)


# -- modular structure (c = 0) ---------------------------------------------------


def _to_pq_basis(e: AlgebraElement) -> dict[tuple[int, int], ComplexRational]:
    """Rewrite an unprimed element in the p^a q^b monomial basis."""
    out: dict[tuple[int, int], ComplexRational] = {}
    for (j, k, l, m), coeff in e.terms.items():
        if l or m:
            raise UnsupportedDomainError("modular maps are defined on the unprimed subalgebra")
        # q^j p^k = sum_s C(j,s) C(k,s) s! i^s p^(k-s) q^(j-s)
        for s, cs in _reorder_coeffs(j, k, +1):
            key = (k - s, j - s)
            out[key] = out.get(key, ZERO) + coeff * cs
    return {k: c for k, c in out.items() if c}


def _from_pq_basis(terms: dict[tuple[int, int], ComplexRational]) -> AlgebraElement:
    out: dict[MonomialKey, ComplexRational] = {}
    for (a, b), coeff in terms.items():
        # p^a q^b = sum_s C(a,s) C(b,s) s! (-i)^s q^(b-s) p^(a-s)
        for s, cs in _reorder_coeffs(a, b, -1):
            key = (b - s, a - s, 0, 0)
            out[key] = out.get(key, ZERO) + coeff * cs
    return AlgebraElement(out)


def _modular_phases(v, sign: int) -> GnsVector:
    label = _label_of(v)
    phased = {}
    for (a, b), coeff in _to_pq_basis(label).items():
        phase = ComplexRational(0, sign) ** a * ComplexRational(0, -sign) ** b
        phased[(a, b)] = coeff * phase
    return GnsVector(_from_pq_basis(phased))


def modular_sqrt(v) -> GnsVector:
    """Square root of the modular operator: p^k q^j |0> -> i^k (-i)^j p^k q^j |0>."""
    return _modular_phases(v, +1)


def modular_inv_sqrt(v) -> GnsVector:
    """Inverse square root: the i <-> -i swapped phases."""
    return _modular_phases(v, -1)


def modular_conjugation(v) -> GnsVector:
    """Antiunitary conjugation J, the adjoint map composed after inverse sqrt."""
    return GnsVector(adjoint(modular_inv_sqrt(v).label))


_MODULAR_KINDS = {
    "delta_half": modular_sqrt,
    "delta_inv_half": modular_inv_sqrt,
    "J": modular_conjugation,
}


def modular_apply(kind: str, v) -> GnsVector:
    try:
        fn = _MODULAR_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown modular map {kind!r}; expected one of {sorted(_MODULAR_KINDS)}")
    return fn(v)


# -- distinguished elements -------------------------------------------------------


def hamiltonian() -> AlgebraElement:
    """Free Hamiltonian (p^2 + p'^2)/2 annihilating the ground state."""
    return (P * P + P_PRIME * P_PRIME) * Fraction(1, 2)


def fock_a() -> AlgebraElement:
    """Annihilator of the Fock factor: a = (q + i p + i q' + p')/2, a|0> = 0."""
    return (Q + I * P + I * Q_PRIME + P_PRIME) * Fraction(1, 2)


def fock_b() -> AlgebraElement:
    """Anti-Fock partner: b = (q + i p - i q' - p')/2 with b*|0> = 0."""
    return (Q + I * P - I * Q_PRIME - P_PRIME) * Fraction(1, 2)


def commutant_pair_plus() -> tuple[AlgebraElement, AlgebraElement]:
    """Canonical pair (q + p', p + q'), scaled by sqrt(2) to stay rational."""
    return Q + P_PRIME, P + Q_PRIME


def commutant_pair_minus() -> tuple[AlgebraElement, AlgebraElement]:
    """Pseudo-canonical pair (q - p', -p + q'), scaled by sqrt(2)."""
    return Q - P_PRIME, -P + Q_PRIME


# -- desk-scale witnesses ----------------------------------------------------------


def _qp_basis_keys(max_degree: int) -> list[MonomialKey]:
    keys = []
    for d in range(max_degree + 1):
        for j in range(d, -1, -1):
            keys.append((j, d - j, 0, 0))
    return keys


def unprimed_monomials(max_degree: int) -> list[AlgebraElement]:
    """All q^j p^k with j + k <= max_degree, in degree-then-q-power order."""
    return [AlgebraElement.monomial(key) for key in _qp_basis_keys(max_degree)]


def _exact_det(rows: list[list[ComplexRational]]) -> ComplexRational:
    n = len(rows)
    rows = [list(r) for r in rows]
    det = ONE
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot is None:
            return ZERO
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det = det * rows[col][col]
        inv = ONE / rows[col][col]
        for r in range(col + 1, n):
            if not rows[r][col]:
                continue
            factor = rows[r][col] * inv
            for cidx in range(col, n):
                rows[r][cidx] = rows[r][cidx] - factor * rows[col][cidx]
    return det


def moment_matrix(max_degree: int, table: CovarianceTable) -> GramMatrix:
    """Gram matrix of the monomial labels q^j p^k, j+k <= max_degree.

    The determinant is computed exactly (faithfulness witness); the
    eigen-signature is a floating-point diagnostic.
    """
    if max_degree > 6:
        raise ValueError("moment_matrix is a desk-scale witness; max_degree <= 6")
    keys = _qp_basis_keys(max_degree)
    basis = [AlgebraElement.monomial(k) for k in keys]
    adjoints = [adjoint(b) for b in basis]
    exact = [[omega(adjoints[i] * basis[j], table) for j in range(len(basis))] for i in range(len(basis))]
    entries = np.array([[v.to_complex() for v in row] for row in exact])
    signature, eigenvalues = gram_signature(entries)
    return GramMatrix(
        entries=entries,
        signature=signature,
        eigenvalues=eigenvalues,
        det_exact=_exact_det(exact),
    )


def weyl_moment_partial_sum(alpha, beta, order: int, c=Fraction(0)) -> complex:
    """Partial sum of the double exponential series for <e^{i alpha q} e^{i beta p}>.

    Sums (i alpha)^n (i beta)^m / (n! m!) <q^n p^m> for n, m <= order with
    exact moment values, floating each term only on accumulation; at c = 0 the
    sum telescopes to sum_n (-i alpha beta / 2)^n / n! -> e^{-i alpha beta/2}.
    """
    if order > 64:
        raise ValueError("partial-sum order is capped at 64")
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    c = Fraction(c)

    @lru_cache(maxsize=None)
    def qp_moment(n: int, m: int) -> ComplexRational:
        # first q pairs with another q (value c) or with one of the p's (i/2)
        if n == 0:
            return ONE if m == 0 else ZERO
        total = ZERO
        if m:
            total = total + ComplexRational(m) * ComplexRational(0, Fraction(1, 2)) * qp_moment(n - 1, m - 1)
        if n >= 2 and c:
            total = total + ComplexRational((n - 1) * c) * qp_moment(n - 2, m)
        return total

    total = 0j
    ia = ComplexRational(0, alpha)
    ib = ComplexRational(0, beta)
    for n in range(order + 1):
        for m in range(order + 1):
            moment = qp_moment(n, m)
            if not moment:
                continue
            term = ia**n * ib**m * moment / ComplexRational(math.factorial(n) * math.factorial(m))
            total += term.to_complex()
    return total
