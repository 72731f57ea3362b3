"""The finite-dimensional engine for graded pieces of submodules.

A module is presented by t-homogeneous generators of one common t-degree g
inside the degree-g piece of R[t_1..t_p]; semantically it is the submodule
generated over the local ring R_m (m the irrelevant maximal ideal), so every
membership and length computed here agrees with the local one.

Two regimes coexist:

* monomial: every generator is a single monomial.  Powers, colons,
  saturations and lengths are lattice combinatorics; no truncation is needed
  and infinite colength is allowed.
* general: computations run inside the truncated quotient F^g / m^D F^g.
  A membership or equality test against a module B is exact as soon as
  m^(D-1) F^g lies inside B: the test decides equality with B + m^D F^g and
  Nakayama (over the local ring) upgrades that to equality with B.  Every
  such D is taken from a ColengthWitness and recorded, and TRUNC_MARGIN lets
  a verification run re-ask every question with an enlarged bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

import numpy as np

from .errors import (
    InfiniteLengthError,
    NotASubpairError,
    RegimeError,
    RingMismatchError,
    StructuralError,
    UndecidedColengthError,
)
from .linalg import ExactMatrix, PrimeField, SpanBuilder, Subspace, kernel_basis
from .poly import (
    Monomial,
    MonomialIndex,
    PolyElement,
    RingDescriptor,
    compositions,
    exponents_below,
    t_basis,
)

# additional slack added to every truncation bound; raised temporarily by
# the --trunc-probe soundness re-run
TRUNC_MARGIN = 0

# default ceiling for colength searches
COLENGTH_CEILING = 64


class truncation_margin:
    """Context manager bumping every truncation bound by `extra`."""

    def __init__(self, extra: int):
        self.extra = extra

    def __enter__(self):
        global TRUNC_MARGIN
        self._saved = TRUNC_MARGIN
        TRUNC_MARGIN = self._saved + self.extra
        return self

    def __exit__(self, *exc):
        global TRUNC_MARGIN
        TRUNC_MARGIN = self._saved
        return False


@dataclass
class ColengthWitness:
    """Least exponent c with m^c F^g inside the module, or infinite."""

    exponent: Optional[int]  # None encodes infinite colength
    method: str

    @property
    def finite(self) -> bool:
        return self.exponent is not None


@dataclass
class GradedPiece:
    """Truncated vector-space model of one t-graded component."""

    ring: RingDescriptor
    tdeg: int
    bound: int
    basis: Subspace
    soundness: dict

    @property
    def dim(self) -> int:
        return self.basis.dim


def _canonical_scale(poly: PolyElement) -> PolyElement:
    """Scale to a canonical generator: leading coefficient 1 over a prime
    field, primitive integer coefficients with positive leading term over Q."""
    if poly.is_zero():
        return poly
    field = poly.ring.field
    lead = poly.coeffs[poly.leading_monomial()]
    if isinstance(field, PrimeField):
        return poly.scale(field.inv(lead))
    denom = 1
    for c in poly.coeffs.values():
        denom = denom * Fraction(c).denominator // gcd(denom, Fraction(c).denominator)
    g = 0
    for c in poly.coeffs.values():
        g = gcd(g, abs(int(Fraction(c) * denom)))
    scale = Fraction(denom, g)
    if Fraction(lead) < 0:
        scale = -scale
    return poly.scale(scale)


class ModulePresentation:
    """A submodule of the t-degree-g piece, given by finitely many
    generators of that degree.  Immutable; caches derive from it."""

    def __init__(self, ring: RingDescriptor, gens, tdeg: Optional[int] = None):
        self.ring = ring
        cleaned = []
        for g in gens:
            if g.ring != ring:
                raise RingMismatchError("generator over a different ring")
            if g.is_zero():
                continue
            if not g.is_t_homogeneous():
                raise RingMismatchError("generators must be t-homogeneous")
            cleaned.append(_canonical_scale(g))
        degs = {g.tdeg() for g in cleaned}
        if len(degs) > 1:
            raise RingMismatchError("generators of mixed t-degree")
        if cleaned:
            self.tdeg = degs.pop()
        elif tdeg is not None:
            self.tdeg = tdeg
        else:
            raise ValueError("zero module needs an explicit t-degree")
        if not all(g.is_monomial() for g in cleaned):
            # k-linear compression can reveal a hidden monomial generating set
            cleaned = _compress_generators(ring, cleaned)
        self.monomial = all(g.is_monomial() for g in cleaned)
        if self.monomial:
            monos = _minimalize([g.leading_monomial() for g in cleaned])
            cleaned = [PolyElement.from_monomial(ring, m) for m in monos]
        self.gens = sorted(cleaned, key=lambda g: g.leading_monomial().key, reverse=True)
        self._powers = {1: self}
        self._colength: Optional[ColengthWitness] = None
        self._buckets = None
        self._monomial_set = (
            tuple(g.leading_monomial() for g in self.gens) if self.monomial else None
        )

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_monomials(cls, ring: RingDescriptor, monomials) -> "ModulePresentation":
        return cls(ring, [PolyElement.from_monomial(ring, m) for m in monomials])

    @classmethod
    def zero(cls, ring: RingDescriptor, tdeg: int) -> "ModulePresentation":
        return cls(ring, [], tdeg=tdeg)

    @classmethod
    def free(cls, ring: RingDescriptor, tdeg: int = 1) -> "ModulePresentation":
        """The full degree-tdeg piece of the free module."""
        return cls.from_monomials(ring, t_basis(ring, tdeg))

    @classmethod
    def maximal_ideal(cls, ring: RingDescriptor) -> "ModulePresentation":
        gens = []
        for i in range(ring.d):
            x = [0] * ring.d
            x[i] = 1
            gens.append(Monomial(x, (0,) * ring.p))
        return cls.from_monomials(ring, gens)

    @property
    def mono_gens(self):
        if not self.monomial:
            raise RegimeError("monomial generators requested for a general module")
        return self._monomial_set

    @property
    def buckets(self) -> "MonomialBuckets":
        if self._buckets is None:
            self._buckets = MonomialBuckets(self.mono_gens)
        return self._buckets

    def is_zero(self) -> bool:
        return not self.gens

    def __repr__(self):
        tag = "monomial" if self.monomial else "general"
        return f"Module(tdeg={self.tdeg}, {len(self.gens)} gens, {tag})"

    def text(self) -> str:
        return "[" + "; ".join(g.text() for g in self.gens) + "]"


def _minimalize(monomials):
    """Drop monomials divisible by another one; sorted, deduplicated."""
    out = []
    for m in sorted(set(monomials)):
        if not any(g.divides(m) for g in out):
            out = [g for g in out if not m.divides(g)] + [m]
    return sorted(out)


def _compress_generators(ring, gens):
    """Replace the generator list by an equivalent k-independent one (RREF
    over the joint monomial support).  Invertible k-linear moves preserve
    the generated module."""
    if len(gens) <= 1:
        return list(gens)
    support = sorted({m for g in gens for m in g.coeffs}, reverse=True)
    pos = {m: i for i, m in enumerate(support)}
    field = ring.field
    rows = []
    for g in gens:
        if isinstance(field, PrimeField):
            v = np.zeros(len(support), dtype=np.int64)
            for m, c in g.coeffs.items():
                v[pos[m]] = c
        else:
            v = [Fraction(0)] * len(support)
            for m, c in g.coeffs.items():
                v[pos[m]] = Fraction(c)
        rows.append(v)
    sub = Subspace.from_rows(field, len(support), rows)
    out = []
    for i in range(sub.dim):
        row = sub.matrix.row(i)
        coeffs = {}
        for j, m in enumerate(support):
            c = int(row[j]) if isinstance(field, PrimeField) else row[j]
            if not field.is_zero(c):
                coeffs[m] = c
        out.append(_canonical_scale(PolyElement(ring, coeffs)))
    return out


# ---------------------------------------------------------------------------
# monomial-regime combinatorics
# ---------------------------------------------------------------------------


def mono_member(m: Monomial, gens) -> bool:
    return any(g.divides(m) for g in gens)


class MonomialBuckets:
    """Divisibility tests for same-degree monomial generators, bucketed by
    t-part: a generator of equal t-degree divides a monomial only when the
    t-exponents coincide, so each test touches one bucket."""

    def __init__(self, gens):
        self.buckets = {}
        for g in gens:
            self.buckets.setdefault(g.texp, []).append(g.xexp)

    def contains(self, m: Monomial) -> bool:
        bucket = self.buckets.get(m.texp)
        if not bucket:
            return False
        mx = m.xexp
        return any(all(a <= b for a, b in zip(x, mx)) for x in bucket)


def poly_member_monomial(poly: PolyElement, gens) -> bool:
    """A polynomial lies in a monomial module iff every term does."""
    buckets = MonomialBuckets(gens)
    return all(buckets.contains(m) for m in poly.coeffs)


def mono_sum(a: ModulePresentation, b: ModulePresentation) -> ModulePresentation:
    assert a.tdeg == b.tdeg
    return ModulePresentation.from_monomials(a.ring, list(a.mono_gens) + list(b.mono_gens))


def mono_intersect(a: ModulePresentation, b: ModulePresentation) -> ModulePresentation:
    """Pairwise lcm over generators with matching t-part.  Two monomials of
    the same t-degree admit a common multiple in that degree only when their
    t-parts coincide."""
    assert a.tdeg == b.tdeg
    out = []
    for ga in a.mono_gens:
        for gb in b.mono_gens:
            if ga.texp != gb.texp:
                continue
            out.append(
                Monomial(tuple(max(u, v) for u, v in zip(ga.xexp, gb.xexp)), ga.texp)
            )
    return ModulePresentation.from_monomials(a.ring, _minimalize(out)) if out else ModulePresentation.zero(a.ring, a.tdeg)


def mono_colon_monomial(target: ModulePresentation, w: Monomial, result_tdeg: int) -> ModulePresentation:
    """All u of t-degree result_tdeg with u*w inside the monomial target."""
    ring = target.ring
    if target.tdeg != result_tdeg + w.tdeg:
        raise RingMismatchError("degree mismatch in colon")
    gens = []
    for g in target.mono_gens:
        vx = tuple(max(a - b, 0) for a, b in zip(g.xexp, w.xexp))
        vt = tuple(max(a - b, 0) for a, b in zip(g.texp, w.texp))
        slack = result_tdeg - sum(vt)
        if slack < 0:
            continue
        for extra in compositions(slack, ring.p):
            gens.append(Monomial(vx, tuple(a + b for a, b in zip(vt, extra))))
    if not gens:
        return ModulePresentation.zero(ring, result_tdeg)
    return ModulePresentation.from_monomials(ring, _minimalize(gens))


def mono_colon_module(target: ModulePresentation, elems: ModulePresentation, result_tdeg: int) -> ModulePresentation:
    """(target : elems) at the stated degree, both modules monomial."""
    out = None
    for w in elems.mono_gens:
        piece = mono_colon_monomial(target, w, result_tdeg)
        out = piece if out is None else mono_intersect(out, piece)
        if out.is_zero():
            return out
    if out is None:
        raise RegimeError("colon by the zero module")
    return out


def _mono_escapes_all_powers(mono: Monomial, floor_gens, ring) -> bool:
    """True when no power of some variable pushes the monomial into floor.

    x_i^k * mono enters a monomial module for large k iff some generator
    divides it away from the i-th exponent, so the answer needs no search.
    """
    for i in range(ring.d):
        if not any(
            g.texp == mono.texp
            and all(e <= m for j, (e, m) in enumerate(zip(g.xexp, mono.xexp)) if j != i)
            for g in floor_gens
        ):
            return True
    return False


def _mono_pair_bound(frame_gens, floor_gens, ring, ceiling: int) -> int:
    """Least K with m^K * frame inside floor; both monomial.

    Finiteness is decided exactly first: the quotient is infinite iff some
    frame generator escapes every power of some variable.
    """
    for f in frame_gens:
        if _mono_escapes_all_powers(f, floor_gens, ring):
            raise InfiniteLengthError(
                f"monomial quotient is infinite: {f.text()} escapes the floor"
            )
    floor_buckets = MonomialBuckets(floor_gens)
    for K in range(ceiling + 1):
        ok = True
        for f in frame_gens:
            for alpha in compositions(K, ring.d):
                if not floor_buckets.contains(Monomial(tuple(a + b for a, b in zip(alpha, f.xexp)), f.texp)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return K
    raise UndecidedColengthError(
        f"no K <= {ceiling} with m^K * frame inside floor despite finite length"
    )


def mono_quotient_monomials(frame: ModulePresentation, floor: ModulePresentation, ceiling: int = COLENGTH_CEILING):
    """Monomials of frame not in floor: a k-basis of frame/floor.

    Every monomial of frame is x^gamma * (a generator), and for |gamma| >= K
    it falls into floor, so the enumeration below is exhaustive.
    """
    ring = frame.ring
    K = _mono_pair_bound(frame.mono_gens, floor.mono_gens, ring, ceiling)
    floor_buckets = floor.buckets
    seen = set()
    for f in frame.mono_gens:
        for gamma in exponents_below(K, ring.d):
            m = Monomial(tuple(a + b for a, b in zip(gamma, f.xexp)), f.texp)
            if m not in seen and not floor_buckets.contains(m):
                seen.add(m)
    return sorted(seen)


def mono_quotient_length(frame: ModulePresentation, floor: ModulePresentation, ceiling: int = COLENGTH_CEILING) -> int:
    return len(mono_quotient_monomials(frame, floor, ceiling))


def _mono_finite_colength(mod: ModulePresentation) -> bool:
    """A monomial module has finite colength in its degree piece iff for
    every t-basis monomial and every variable it contains a pure power."""
    ring = mod.ring
    gens = mod.mono_gens
    for beta in compositions(mod.tdeg, ring.p):
        for i in range(ring.d):
            if not any(
                g.texp == beta and all(e == 0 for j, e in enumerate(g.xexp) if j != i)
                for g in gens
            ):
                return False
    return True


# ---------------------------------------------------------------------------
# presentation-level algebra
# ---------------------------------------------------------------------------


def module_sum(a: ModulePresentation, b: ModulePresentation) -> ModulePresentation:
    if a.tdeg != b.tdeg:
        raise RingMismatchError("sum of modules in different degrees")
    return ModulePresentation(a.ring, list(a.gens) + list(b.gens), tdeg=a.tdeg)


def module_multiply(a: ModulePresentation, b: ModulePresentation) -> ModulePresentation:
    if a.is_zero() or b.is_zero():
        return ModulePresentation.zero(a.ring, a.tdeg + b.tdeg)
    gens = [ga.mul(gb) for ga in a.gens for gb in b.gens]
    return ModulePresentation(a.ring, gens, tdeg=a.tdeg + b.tdeg)


def module_power(mod: ModulePresentation, n: int) -> ModulePresentation:
    """n-th power inside the symmetric algebra, by iterated multiplication
    with per-step compression of the spanning set."""
    if n < 1:
        raise ValueError("power must be >= 1")
    cache = mod._powers
    if n in cache:
        return cache[n]
    best = max(k for k in cache if k <= n)
    current = cache[best]
    for k in range(best + 1, n + 1):
        current = module_multiply(current, mod)
        cache[k] = current
    return cache[n]


def scale_by_ideal(ideal: ModulePresentation, mod: ModulePresentation) -> ModulePresentation:
    """Product ideal * module; the ideal is a t-degree-0 presentation."""
    if ideal.tdeg != 0:
        raise RingMismatchError("expected a t-degree-0 ideal presentation")
    return module_multiply(ideal, mod)


# ---------------------------------------------------------------------------
# truncated spans and colength
# ---------------------------------------------------------------------------


def _span_rows(mod: ModulePresentation, index: MonomialIndex):
    """Projected spanning vectors x^gamma * gen, |gamma| < bound.  Higher
    gamma project to zero, so this is the full image of the module (and of
    its localization) in the truncated quotient."""
    ring = mod.ring
    for g in mod.gens:
        for gamma in exponents_below(index.bound, ring.d):
            yield index.vector(g.mul_monomial(Monomial(gamma, (0,) * ring.p)))


def module_span(mod: ModulePresentation, bound: int, index: Optional[MonomialIndex] = None) -> Subspace:
    if index is None:
        index = MonomialIndex(mod.ring, mod.tdeg, bound)
    builder = SpanBuilder(mod.ring.field, index.dim)
    for v in _span_rows(mod, index):
        builder.insert(v)
    return builder.subspace()


def colength_exponent(mod: ModulePresentation, ceiling: int = COLENGTH_CEILING) -> ColengthWitness:
    """Least c >= 0 with m^c F^g inside the module.

    The monomial path decides infinite colength exactly; the general path
    searches upward and reports an undecided error at the ceiling.  Each
    candidate c is checked through the truncated quotient at bound c+1,
    which is exact by Nakayama over the local ring.
    """
    if mod._colength is not None and TRUNC_MARGIN == 0:
        return mod._colength
    ring = mod.ring
    if mod.is_zero():
        witness = ColengthWitness(None, "zero module")
        mod._colength = witness
        return witness
    if mod.monomial:
        if not _mono_finite_colength(mod):
            witness = ColengthWitness(None, "monomial staircase is infinite")
            mod._colength = witness
            return witness
        buckets = mod.buckets
        for c in range(ceiling + 1):
            if all(
                buckets.contains(Monomial(alpha, beta))
                for alpha in compositions(c, ring.d)
                for beta in compositions(mod.tdeg, ring.p)
            ):
                witness = ColengthWitness(c, "monomial divisibility sweep")
                mod._colength = witness
                return witness
        raise UndecidedColengthError(f"monomial colength exceeds ceiling {ceiling}")
    for c in range(ceiling + 1):
        bound = c + 1 + TRUNC_MARGIN
        index = MonomialIndex(ring, mod.tdeg, bound)
        span = module_span(mod, bound, index)
        if all(
            span.contains_vector(index.vector(PolyElement.from_monomial(ring, Monomial(alpha, beta))))
            for alpha in compositions(c, ring.d)
            for beta in compositions(mod.tdeg, ring.p)
        ):
            witness = ColengthWitness(c, f"truncated sweep at bound {bound}")
            if TRUNC_MARGIN == 0:
                mod._colength = witness
            return witness
    raise UndecidedColengthError(
        f"colength undecided up to ceiling {ceiling}; enlarge it or use a monomial presentation"
    )


def piece(mod: ModulePresentation, n: int, bound: Optional[int] = None) -> GradedPiece:
    """Truncated model of the degree-n*g component of the n-th power.

    When no bound is given it is derived from the colength witness:
    m^c F^g inside the module gives m^(c*n) F^(g*n) inside the power.
    """
    justification = "caller-specified bound"
    if bound is None:
        witness = colength_exponent(mod)
        if not witness.finite:
            raise InfiniteLengthError("no finite truncation bound exists; module has infinite colength")
        bound = witness.exponent * n + 1
        justification = f"colength exponent {witness.exponent} scaled to power {n}"
    bound += TRUNC_MARGIN
    power = module_power(mod, n)
    index = MonomialIndex(mod.ring, power.tdeg, bound)
    if power.monomial:
        # divisibility picks out a coordinate subspace of the chart
        rows = []
        for i, m in enumerate(index.monomials):
            if power.buckets.contains(m):
                row = [0] * index.dim
                row[i] = 1
                rows.append(row)
        basis = Subspace.from_rows(mod.ring.field, index.dim, rows)
    else:
        basis = module_span(power, bound, index)
    return GradedPiece(
        ring=mod.ring,
        tdeg=power.tdeg,
        bound=bound,
        basis=basis,
        soundness={"c": bound - TRUNC_MARGIN - 1, "justification": justification},
    )


# ---------------------------------------------------------------------------
# membership / inclusion / equality
# ---------------------------------------------------------------------------


def module_membership(elem: PolyElement, mod: ModulePresentation, witness: Optional[ColengthWitness] = None) -> bool:
    """Exact membership of a t-homogeneous element (in the localized sense)."""
    if elem.is_zero():
        return True
    if elem.tdeg() != mod.tdeg:
        raise RingMismatchError("element degree does not match the module")
    if mod.monomial:
        return all(mod.buckets.contains(m) for m in elem.coeffs)
    if witness is None:
        witness = colength_exponent(mod)
    if not witness.finite:
        raise RegimeError("general-regime membership needs finite colength")
    bound = max(witness.exponent, 1) + TRUNC_MARGIN
    index = MonomialIndex(mod.ring, mod.tdeg, bound)
    span = module_span(mod, bound, index)
    return span.contains_vector(index.vector(elem))


def module_contains(big: ModulePresentation, small: ModulePresentation) -> bool:
    if big.tdeg != small.tdeg:
        raise RingMismatchError("containment across different degrees")
    if big.monomial:
        return all(big.buckets.contains(m) for g in small.gens for m in g.coeffs)
    witness = colength_exponent(big)
    if not witness.finite:
        raise RegimeError("containment in a general module needs finite colength")
    bound = max(witness.exponent, 1) + TRUNC_MARGIN
    index = MonomialIndex(big.ring, big.tdeg, bound)
    span = module_span(big, bound, index)
    return all(span.contains_vector(index.vector(g)) for g in small.gens)


def modules_equal(a: ModulePresentation, b: ModulePresentation) -> bool:
    return module_contains(a, b) and module_contains(b, a)


# ---------------------------------------------------------------------------
# quotient lengths
# ---------------------------------------------------------------------------


def _general_pair_length(big: ModulePresentation, small: ModulePresentation) -> int:
    """dim big/small via truncated spans; small must have finite colength."""
    witness = colength_exponent(small)
    if not witness.finite:
        raise InfiniteLengthError("smaller module has infinite colength")
    bound = witness.exponent + 1 + TRUNC_MARGIN
    index = MonomialIndex(big.ring, big.tdeg, bound)
    span_small = module_span(small, bound, index)
    builder = SpanBuilder(big.ring.field, index.dim)
    for i in range(span_small.dim):
        builder.insert(span_small.matrix.row(i))
    dim_small = builder.dim
    for v in _span_rows(big, index):
        builder.insert(v)
    return builder.dim - dim_small


def quotient_length(big: ModulePresentation, small: ModulePresentation, verify_inclusion: bool = True) -> int:
    """Exact length of big/small (same t-degree, small of finite relative
    colength)."""
    if big.tdeg != small.tdeg:
        raise RingMismatchError("quotient across different degrees")
    if verify_inclusion and not module_contains(big, small):
        raise NotASubpairError("smaller module is not contained in the larger one")
    if big.monomial and small.monomial:
        return mono_quotient_length(big, small)
    if small.monomial:
        return relative_quotient_dim(big, small)
    return _general_pair_length(big, small)


def length_of_quotient(big: ModulePresentation, small: ModulePresentation, n: int) -> int:
    """Length of big^n / small^n; the pair inclusion is verified."""
    bn = module_power(big, n)
    sn = module_power(small, n)
    return quotient_length(bn, sn)


# ---------------------------------------------------------------------------
# relative quotient against a monomial modulus
# ---------------------------------------------------------------------------


def _drop_modulus_terms(poly: PolyElement, buckets: MonomialBuckets) -> PolyElement:
    """Canonical reduction modulo a monomial module: drop member terms."""
    kept = {m: c for m, c in poly.coeffs.items() if not buckets.contains(m)}
    return PolyElement(poly.ring, kept)


def relative_quotient_dim(big: ModulePresentation, small: ModulePresentation, ceiling: int = COLENGTH_CEILING) -> int:
    """Exact length of (big + small)/small for a monomial `small`.

    Sweeps x^gamma * gen reductions by ascending |gamma|; once a whole level
    reduces to zero, every higher level does too (small is a module), so the
    collected rows span the quotient.  Works whatever the colength of small,
    as long as the quotient itself has finite length.
    """
    if not small.monomial:
        raise RegimeError("relative quotient chart needs a monomial modulus")
    if big.tdeg != small.tdeg:
        raise RingMismatchError("quotient across different degrees")
    return _spanned_quotient_dim(big.ring, list(big.gens), small.mono_gens, ceiling)


def product_quotient_dim(
    a: ModulePresentation,
    b: ModulePresentation,
    small: ModulePresentation,
    ceiling: int = COLENGTH_CEILING,
) -> int:
    """Length of (a*b + small)/small for a monomial `small`.

    Streams the products of the two generator lists straight into the chart
    sweep; a compressed presentation of a*b over the full joint support is
    never built, which matters at high t-degrees."""
    if not small.monomial:
        raise RegimeError("relative quotient chart needs a monomial modulus")
    if a.tdeg + b.tdeg != small.tdeg:
        raise RingMismatchError("quotient across different degrees")
    products = [ga.mul(gb) for ga in a.gens for gb in b.gens]
    return _spanned_quotient_dim(a.ring, products, small.mono_gens, ceiling)


def _spanned_quotient_dim(ring, elems, small_gens, ceiling: int) -> int:
    buckets = MonomialBuckets(small_gens)
    alive = []
    for g in elems:
        reduced = _drop_modulus_terms(g, buckets)
        if reduced.is_zero():
            continue
        for m in reduced.coeffs:
            if _mono_escapes_all_powers(m, small_gens, ring):
                raise InfiniteLengthError(
                    f"quotient is infinite: the term {m.text()} escapes the modulus"
                )
        alive.append(reduced)
    reduced_rows = []
    level = 0
    while alive:
        survivors = []
        for g in alive:
            hit = False
            for gamma in compositions(level, ring.d):
                red = _drop_modulus_terms(g.mul_monomial(Monomial(gamma, (0,) * ring.p)), buckets)
                if not red.is_zero():
                    reduced_rows.append(red)
                    hit = True
            if hit:
                # an element whose level is all zero stays zero at every
                # higher level, so it can be retired
                survivors.append(g)
        alive = survivors
        level += 1
        if level > ceiling:
            raise UndecidedColengthError(
                f"relative quotient still has new rows at x-shift level {ceiling}; enlarge the ceiling"
            )
    if not reduced_rows:
        return 0
    chart = sorted({m for row in reduced_rows for m in row.coeffs})
    pos = {m: i for i, m in enumerate(chart)}
    builder = SpanBuilder(ring.field, len(chart))
    for row in reduced_rows:
        if isinstance(ring.field, PrimeField):
            v = np.zeros(len(chart), dtype=np.int64)
            for m, c in row.coeffs.items():
                v[pos[m]] = c
        else:
            v = [Fraction(0)] * len(chart)
            for m, c in row.coeffs.items():
                v[pos[m]] = Fraction(c)
        builder.insert(v)
    return builder.dim


# ---------------------------------------------------------------------------
# the frame colon
# ---------------------------------------------------------------------------


def quotient_lifts(frame: ModulePresentation, floor: ModulePresentation):
    """Polynomial representatives of a k-basis of frame/floor.

    Monomial pairs enumerate the set difference directly.  Otherwise the
    floor span inside the truncated chart is extended by frame vectors; the
    successfully inserted frame vectors are the lifts.  Representatives are
    unique only up to floor, which is all the colon computation needs.
    """
    ring = frame.ring
    if frame.monomial and floor.monomial:
        return [PolyElement.from_monomial(ring, m) for m in mono_quotient_monomials(frame, floor)]
    witness = colength_exponent(floor)
    if not witness.finite:
        raise RegimeError("frame/floor lift needs floor of finite colength")
    bound = witness.exponent + 1 + TRUNC_MARGIN
    index = MonomialIndex(ring, frame.tdeg, bound)
    builder = SpanBuilder(ring.field, index.dim)
    for v in _span_rows(floor, index):
        builder.insert(v)
    lifts = []
    for v in _span_rows(frame, index):
        before = builder.dim
        if builder.insert(v):
            assert builder.dim == before + 1
            lifts.append(index.poly(v))
    return lifts


def _residual_coordinates(products, target: ModulePresentation):
    """Canonical coset coordinates of each product modulo the target.

    Monomial targets reduce term-by-term on an ad-hoc chart of the residual
    monomials that actually occur; general targets reduce against the
    truncated RREF span, whose residuals live on the non-pivot columns.
    """
    ring = target.ring
    field = ring.field
    if target.monomial:
        buckets = target.buckets
        residual_monos = sorted(
            {m for poly in products for m in poly.coeffs if not buckets.contains(m)}
        )
        pos = {m: i for i, m in enumerate(residual_monos)}
        width = len(residual_monos)
        rows = []
        for poly in products:
            if isinstance(field, PrimeField):
                v = np.zeros(width, dtype=np.int64)
                for m, c in poly.coeffs.items():
                    if m in pos:
                        v[pos[m]] = c
            else:
                v = [Fraction(0)] * width
                for m, c in poly.coeffs.items():
                    if m in pos:
                        v[pos[m]] = Fraction(c)
            rows.append(v)
        return rows, width
    witness = colength_exponent(target)
    if not witness.finite:
        raise RegimeError("colon target needs finite colength in the general regime")
    bound = witness.exponent + 1 + TRUNC_MARGIN
    index = MonomialIndex(ring, target.tdeg, bound)
    span = module_span(target, bound, index)
    rows = [span.reduce_vector(index.vector(p)) for p in products]
    return rows, index.dim


def colon_into_frame(
    target: ModulePresentation,
    elems,
    frame: ModulePresentation,
    floor: ModulePresentation,
) -> ModulePresentation:
    """(target : elems) intersected with the frame, as floor + kernel.

    Preconditions (verified): floor inside frame, floor * elem inside target
    for every elem, and frame/floor of finite length.  The answer is then
    floor plus the kernel of the k-linear map sending a coset of frame/floor
    to the tuple of its products with the elems, taken modulo target.
    """
    ring = target.ring
    if not module_contains(frame, floor):
        raise StructuralError("floor is not contained in the frame")
    for e in elems:
        for g in floor.gens:
            if not module_membership(g.mul(e), target):
                raise StructuralError(
                    "floor * elem escapes the target: wrong power or not a reduction"
                )
    lifts = quotient_lifts(frame, floor)
    if not lifts:
        return floor
    blocks = []
    width_total = 0
    for e in elems:
        products = [w.mul(e) for w in lifts]
        block, width = _residual_coordinates(products, target)
        blocks.append((block, width))
        width_total += width
    if width_total == 0:
        # every product already lies in the target: the colon is the frame
        return ModulePresentation(ring, list(floor.gens) + list(lifts), tdeg=floor.tdeg)
    # solve for coefficient vectors over the lifts: one matrix row per
    # residual coordinate, one column per lift, right kernel = the colon
    field = ring.field
    if isinstance(field, PrimeField):
        mat = np.zeros((width_total, len(lifts)), dtype=np.int64)
        off = 0
        for block, width in blocks:
            for j, row in enumerate(block):
                mat[off : off + width, j] = row
            off += width
        kernel = kernel_basis(ExactMatrix(field, mat, copy=False))
    else:
        mat = [[Fraction(0)] * len(lifts) for _ in range(width_total)]
        off = 0
        for block, width in blocks:
            for j, row in enumerate(block):
                for i in range(width):
                    mat[off + i][j] = row[i]
            off += width
        kernel = kernel_basis(ExactMatrix(field, mat))
    extra = []
    for lam in kernel:
        poly = PolyElement.zero(ring)
        for j, w in enumerate(lifts):
            c = int(lam[j]) if isinstance(field, PrimeField) else lam[j]
            if not field.is_zero(c):
                poly = poly.add(w.scale(c))
        if not poly.is_zero():
            extra.append(poly)
    return ModulePresentation(ring, list(floor.gens) + extra, tdeg=floor.tdeg)


# ---------------------------------------------------------------------------
# monomial promotion
# ---------------------------------------------------------------------------


def try_monomialize(
    mod: ModulePresentation,
    colength_hint: Optional[int] = None,
    ceiling: int = 16,
) -> ModulePresentation:
    """Return an equal monomial presentation when the module happens to be
    spanned by the monomials it contains; otherwise return the input.

    Torus symmetry makes this the common case for modules derived from
    monomial inputs, and the monomial form unlocks the combinatorial fast
    paths.  Equality with the input is verified, never assumed.  Any c with
    m^c F^g inside the module is a valid `colength_hint`; without one a
    bounded search runs and an undecided search just skips the promotion.
    """
    if mod.monomial or mod.is_zero():
        return mod
    try:
        if colength_hint is not None:
            witness = ColengthWitness(colength_hint, "caller hint")
        else:
            witness = colength_exponent(mod, ceiling=ceiling)
        if not witness.finite:
            return mod
        candidates = set()
        for g in mod.gens:
            for m in g.coeffs:
                if module_membership(PolyElement.from_monomial(mod.ring, m), mod, witness):
                    candidates.add(m)
        if not candidates:
            return mod
        candidate = ModulePresentation.from_monomials(mod.ring, _minimalize(candidates))
        if module_contains(candidate, mod):
            return candidate
    except (RegimeError, UndecidedColengthError, InfiniteLengthError):
        pass
    return mod
