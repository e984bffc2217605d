"""Groebner-basis kernel and the ideal-theoretic toolbox.

Buchberger's algorithm with the Gebauer-Moeller pair update (product and
chain criteria) and sugar-degree pair selection.  Linear and monomial ideals
short-circuit through exact linear algebra / divisibility pruning, which the
tree bookkeeping downstream leans on heavily.

Everything is exact: rationals via gmpy2, or GF(p) in the heuristic prime
mode.  Resource guards raise ComputationLimitError instead of hanging.
"""

from __future__ import annotations

import heapq
import operator
import threading
from dataclasses import dataclass

from .polycore import (
    GREVLEX,
    ComputationLimitError,
    MonomialOrder,
    Polynomial,
    Ring,
    StructuralError,
    block_order,
    exact_divide,
    mono_divides,
    mono_lcm,
    _fresh_name,
)

_le = operator.le
_add = operator.add
_sub = operator.sub


@dataclass
class GrobnerLimits:
    """Caps on Buchberger work; exceeding them raises ComputationLimitError."""

    max_pairs: int = 200_000
    max_degree: int = 300


DEFAULT_LIMITS = GrobnerLimits()


def set_default_limits(max_pairs=None, max_degree=None):
    if max_pairs is not None:
        DEFAULT_LIMITS.max_pairs = max_pairs
    if max_degree is not None:
        DEFAULT_LIMITS.max_degree = max_degree


# ---------------------------------------------------------------------------
# Ideals


class Ideal:
    """Finitely generated ideal with cached reduced Groebner bases per order."""

    __slots__ = ("ring", "gens", "_gb", "_lock")

    def __init__(self, ring: Ring, gens):
        polys = []
        for g in gens:
            if not isinstance(g, Polynomial):
                raise StructuralError("ideal generators must be polynomials")
            if g.ring != ring:
                raise StructuralError("generator ring mismatch")
            if not g.is_zero():
                polys.append(g)
        self.ring = ring
        self.gens = tuple(polys)
        self._gb: dict = {}
        self._lock = threading.Lock()

    def groebner(self, order: MonomialOrder = GREVLEX, limits=None):
        with self._lock:
            got = self._gb.get(order)
        if got is not None:
            return got
        gb = _reduced_groebner(self.gens, self.ring, order, limits)
        with self._lock:
            self._gb.setdefault(order, gb)
            return self._gb[order]

    def __repr__(self):
        inside = ", ".join(str(g) for g in self.gens)
        return f"Ideal({inside})"


def ideal(ring: Ring, *gens) -> Ideal:
    return Ideal(ring, gens)


# ---------------------------------------------------------------------------
# Core Buchberger machinery


class _GPoly:
    """Monic polynomial prepared for reduction: leading term split off."""

    __slots__ = ("lm", "lmdeg", "tail", "sugar")

    def __init__(self, lm, tail, sugar):
        self.lm = lm
        self.lmdeg = sum(lm)
        self.tail = tail
        self.sugar = sugar


def _make_gpoly(terms: dict, order, char, sugar=None):
    lm = max(terms, key=order.key)
    lc = terms[lm]
    if sugar is None:
        sugar = max(sum(e) for e in terms)
    if char:
        inv = pow(lc, char - 2, char)
        tail = {e: (c * inv) % char for e, c in terms.items() if e != lm}
    else:
        tail = {e: c / lc for e, c in terms.items() if e != lm}
    return _GPoly(lm, tail, sugar)


def _find_reducer(e, deg_e, basis):
    for g in basis:
        if g.lmdeg <= deg_e and all(map(_le, g.lm, e)):
            return g
    return None


def _reduce_full(terms: dict, basis, order, char, sugar=0):
    """Fully reduce a term dict modulo monic basis elements.

    Mutates and consumes `terms`; returns (normal-form dict, sugar).  The
    output dict has no monomial divisible by a basis leading monomial.
    """
    negkey = order.negkey
    heap = [(negkey(e), e) for e in terms]
    heapq.heapify(heap)
    out = {}
    heappop = heapq.heappop
    heappush = heapq.heappush
    while heap:
        _, e = heappop(heap)
        c = terms.pop(e, None)
        if c is None:
            continue
        deg_e = sum(e)
        g = _find_reducer(e, deg_e, basis)
        if g is None:
            out[e] = c
            continue
        q = tuple(map(_sub, e, g.lm))
        gs = g.sugar + sum(q)
        if gs > sugar:
            sugar = gs
        if char:
            for eg, cg in g.tail.items():
                ee = tuple(map(_add, q, eg))
                prev = terms.get(ee)
                if prev is None:
                    v = (-c * cg) % char
                    if v:
                        terms[ee] = v
                        heappush(heap, (negkey(ee), ee))
                else:
                    v = (prev - c * cg) % char
                    if v:
                        terms[ee] = v
                    else:
                        del terms[ee]
        else:
            for eg, cg in g.tail.items():
                ee = tuple(map(_add, q, eg))
                prev = terms.get(ee)
                if prev is None:
                    terms[ee] = -c * cg
                    heappush(heap, (negkey(ee), ee))
                else:
                    v = prev - c * cg
                    if v:
                        terms[ee] = v
                    else:
                        del terms[ee]
    return out, sugar


def _spair_terms(gi: _GPoly, gj: _GPoly, lcm, char):
    """S-polynomial of two monic prepared polys as a term dict."""
    qi = tuple(map(_sub, lcm, gi.lm))
    qj = tuple(map(_sub, lcm, gj.lm))
    terms = {}
    for e, c in gi.tail.items():
        terms[tuple(map(_add, qi, e))] = c
    for e, c in gj.tail.items():
        ee = tuple(map(_add, qj, e))
        prev = terms.get(ee)
        if prev is None:
            v = -c
        else:
            v = prev - c
        if char:
            v %= char
        if v:
            terms[ee] = v
        elif ee in terms:
            del terms[ee]
    return terms


def _gm_update(basis, lms, active, heap, new_index, order, char):
    """Gebauer-Moeller pair update after appending basis[new_index]."""
    lmt = basis[new_index].lm
    # chain criterion against existing pairs
    for pair in list(active):
        i, j = pair
        lcm_ij = mono_lcm(lms[i], lms[j])
        if (
            all(map(_le, lmt, lcm_ij))
            and lcm_ij != mono_lcm(lms[i], lmt)
            and lcm_ij != mono_lcm(lms[j], lmt)
        ):
            active.discard(pair)
    # new pairs, minimalized by lcm with one representative per lcm
    lcms = {}
    for i in range(new_index):
        lcms.setdefault(mono_lcm(lms[i], lmt), []).append(i)
    kept = []
    for lcm in sorted(lcms, key=order.key):
        if all(not all(map(_le, prev, lcm)) for prev in kept):
            kept.append(lcm)
    prod = None
    for lcm in kept:
        idxs = lcms[lcm]
        # product criterion: coprime leading terms reduce to zero
        if any(lcm == tuple(map(_add, lms[i], lmt)) for i in idxs):
            continue
        i = min(idxs)
        pair = (i, new_index)
        active.add(pair)
        gi, gt = basis[i], basis[new_index]
        sugar = max(
            gi.sugar + sum(lcm) - gi.lmdeg, gt.sugar + sum(lcm) - gt.lmdeg
        )
        heapq.heappush(heap, (sugar, order.key(lcm), pair))
    return prod


def _buchberger(seeds, order, char, limits):
    """Reduced Groebner basis of the seed term-dicts; list of monic dicts."""
    basis: list = []
    lms: list = []
    active: set = set()
    heap: list = []
    for terms, sugar in seeds:
        red, sugar = _reduce_full(dict(terms), basis, order, char, sugar)
        if not red:
            continue
        g = _make_gpoly(red, order, char, sugar)
        basis.append(g)
        lms.append(g.lm)
        _gm_update(basis, lms, active, heap, len(basis) - 1, order, char)
    processed = 0
    while heap:
        sugar, lcm_key, pair = heapq.heappop(heap)
        if pair not in active:
            continue
        active.discard(pair)
        processed += 1
        if processed > limits.max_pairs:
            raise ComputationLimitError(
                f"S-pair budget exceeded ({limits.max_pairs})"
            )
        i, j = pair
        lcm = mono_lcm(lms[i], lms[j])
        if sum(lcm) > limits.max_degree:
            raise ComputationLimitError(
                f"degree bound exceeded ({sum(lcm)} > {limits.max_degree})"
            )
        terms = _spair_terms(basis[i], basis[j], lcm, char)
        if not terms:
            continue
        red, s = _reduce_full(terms, basis, order, char, sugar)
        if not red:
            continue
        g = _make_gpoly(red, order, char, s)
        basis.append(g)
        lms.append(g.lm)
        _gm_update(basis, lms, active, heap, len(basis) - 1, order, char)
    return _interreduce(basis, order, char)


def _interreduce(basis, order, char):
    """Minimal then fully tail-reduced monic basis, sorted by leading monomial."""
    # minimalize: drop any element whose lm is divisible by another kept lm
    order_key = order.key
    items = sorted(basis, key=lambda g: order_key(g.lm))
    kept = []
    for g in items:
        if not any(all(map(_le, h.lm, g.lm)) for h in kept):
            kept.append(g)
    # interreduce tails
    out = []
    for idx, g in enumerate(kept):
        others = kept[:idx] + kept[idx + 1 :]
        terms = dict(g.tail)
        red, _ = _reduce_full(terms, others, order, char, g.sugar)
        out.append((g.lm, red, g.sugar))
    result = []
    for lm, tail, sugar in out:
        d = dict(tail)
        d[lm] = 1 if char else _one_q()
        result.append(d)
    result.sort(key=lambda d: order_key(max(d, key=order_key)))
    return result


def _one_q():
    from gmpy2 import mpq

    return mpq(1)


# ---------------------------------------------------------------------------
# Fast paths


def _linear_rref_basis(gens, ring, order):
    """Reduced GB of an ideal generated by (affine-)linear polynomials."""
    n = ring.arity
    unit_exps = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        unit_exps.append(tuple(e))
    cols = sorted(range(n), key=lambda i: order.key(unit_exps[i]), reverse=True)
    const_exp = (0,) * n
    char = ring.char
    rows = []
    for g in gens:
        row = [g.terms.get(unit_exps[i], 0) for i in cols]
        row.append(g.terms.get(const_exp, 0))
        rows.append(row)
    width = n + 1
    pivots = []
    r = 0
    for c in range(width):
        pivot_row = None
        for rr in range(r, len(rows)):
            if rows[rr][c]:
                pivot_row = rr
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = ring.coeff_inv(rows[r][c])
        rows[r] = [
            (v * inv) % char if char else v * inv for v in rows[r]
        ]
        for rr in range(len(rows)):
            if rr != r and rows[rr][c]:
                factor = rows[rr][c]
                if char:
                    rows[rr] = [
                        (a - factor * b) % char for a, b in zip(rows[rr], rows[r])
                    ]
                else:
                    rows[rr] = [a - factor * b for a, b in zip(rows[rr], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == len(rows):
            break
    basis = []
    for rr, c in pivots:
        if c == width - 1:
            return (ring.one(),)
        terms = {}
        for k in range(c, width - 1):
            if rows[rr][k]:
                terms[unit_exps[cols[k]]] = rows[rr][k]
        if rows[rr][width - 1]:
            terms[const_exp] = rows[rr][width - 1]
        basis.append(ring.poly(dict(terms)))
    basis.sort(key=lambda f: order.key(f.leading_monomial(order)))
    return tuple(basis)


def _monomial_basis(gens, ring, order):
    """Reduced GB of a monomial ideal: the minimal monomial generators."""
    exps = sorted({next(iter(g.terms)) for g in gens}, key=sum)
    minimal = []
    for e in exps:
        if not any(mono_divides(m, e) for m in minimal):
            minimal.append(e)
    one = 1 if ring.char else _one_q()
    polys = [Polynomial(ring, {e: one}) for e in minimal]
    polys.sort(key=lambda f: order.key(f.leading_monomial(order)))
    return tuple(polys)


def _reduced_groebner(gens, ring, order, limits):
    if limits is None:
        limits = DEFAULT_LIMITS
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return ()
    if any(g.is_constant() for g in gens):
        return (ring.one(),)
    if all(g.degree() <= 1 for g in gens):
        return _linear_rref_basis(gens, ring, order)
    if all(g.is_monomial() for g in gens):
        return _monomial_basis(gens, ring, order)
    char = ring.char
    seeds = []
    for g in gens:
        seeds.append((dict(g.terms), g.degree()))
    dicts = _buchberger(seeds, order, char, limits)
    return tuple(Polynomial(ring, d) for d in dicts)


# ---------------------------------------------------------------------------
# Public operations


def groebner_basis(I: Ideal, order: MonomialOrder = GREVLEX, limits=None):
    """Reduced Groebner basis (auto-reduced, monic, unique for the order)."""
    return I.groebner(order, limits)


def normal_form(
    f: Polynomial, I: Ideal, order: MonomialOrder = GREVLEX, limits=None
) -> Polynomial:
    """Unique remainder of f modulo the reduced GB of I under order."""
    if f.ring != I.ring:
        raise StructuralError("normal_form: ring mismatch")
    gb = I.groebner(order, limits)
    if not gb:
        return f
    if f.is_zero():
        return f
    char = I.ring.char
    prepared = [_make_gpoly(dict(g.terms), order, char) for g in gb]
    red, _ = _reduce_full(dict(f.terms), prepared, order, char)
    return Polynomial(I.ring, red)


def in_ideal(f: Polynomial, I: Ideal, limits=None) -> bool:
    return normal_form(f, I, GREVLEX, limits).is_zero()


def is_trivial(I: Ideal, limits=None) -> bool:
    """True iff I = (1)."""
    gb = I.groebner(GREVLEX, limits)
    return len(gb) == 1 and gb[0].is_constant()


def ideal_equal(I: Ideal, J: Ideal, limits=None) -> bool:
    if I.ring != J.ring:
        raise StructuralError("ideal_equal: ring mismatch")
    return I.groebner(GREVLEX, limits) == J.groebner(GREVLEX, limits)


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    if I.ring != J.ring:
        raise StructuralError("ideal_sum: ring mismatch")
    return Ideal(I.ring, I.gens + J.gens)


# -- variable plumbing -------------------------------------------------------


def extend_ring(ring: Ring, new_names, position: int = 0) -> Ring:
    new_names = tuple(new_names)
    names = ring.names[:position] + new_names + ring.names[position:]
    return Ring(names, ring.char)


def embed_poly(f: Polynomial, big: Ring, offset: int) -> Polynomial:
    """View f inside `big`, its variables occupying slots offset..offset+n."""
    n = f.ring.arity
    pre = offset
    post = big.arity - offset - n
    if post < 0:
        raise StructuralError("embedding does not fit in the target ring")
    terms = {(0,) * pre + e + (0,) * post: c for e, c in f.terms.items()}
    return Polynomial(big, terms)


def project_poly(f: Polynomial, small: Ring, offset: int) -> Polynomial:
    """Inverse of embed_poly; fails if f touches variables outside the window."""
    n = small.arity
    terms = {}
    for e, c in f.terms.items():
        if any(e[:offset]) or any(e[offset + n :]):
            raise StructuralError("polynomial not contained in the subring window")
        terms[e[offset : offset + n]] = c
    return Polynomial(small, terms)


def eliminate(I: Ideal, first_k: int, limits=None) -> Ideal:
    """I intersected with the subring omitting the first k variables.

    Returns an ideal of the same ring whose generators are free of the first
    k variables (compute a block-order GB and keep the x-free elements).
    """
    n = I.ring.arity
    if first_k <= 0:
        return I
    if first_k >= n:
        return Ideal(I.ring, [I.ring.one()] if is_trivial(I, limits) else [])
    gb = I.groebner(block_order(first_k), limits)
    kept = [g for g in gb if all(not any(e[:first_k]) for e in g.terms)]
    return Ideal(I.ring, kept)


def restrict_to_tail_ring(I: Ideal, first_k: int, tail_ring: Ring) -> Ideal:
    """Rewrite an already-eliminated ideal in the ring of the last variables."""
    gens = []
    for g in I.gens:
        terms = {}
        for e, c in g.terms.items():
            if any(e[:first_k]):
                raise StructuralError("ideal not free of the eliminated variables")
            terms[e[first_k:]] = c
        gens.append(Polynomial(tail_ring, terms))
    return Ideal(tail_ring, gens)


# -- intersection, quotient, saturation ---------------------------------------


def intersect(I: Ideal, J: Ideal, limits=None) -> Ideal:
    """I ∩ J via the auxiliary-variable construction t·I + (1−t)·J."""
    if I.ring != J.ring:
        raise StructuralError("intersect: ring mismatch")
    ring = I.ring
    if not I.gens:
        return I
    if not J.gens:
        return J
    tname = _fresh_name(ring.names, "_t")
    big = extend_ring(ring, (tname,), 0)
    t = big.var(0)
    one = big.one()
    gens = [t * embed_poly(g, big, 1) for g in I.gens]
    gens += [(one - t) * embed_poly(g, big, 1) for g in J.gens]
    E = eliminate(Ideal(big, gens), 1, limits)
    return restrict_to_tail_ring(E, 1, ring)


def intersect_many(ideals, limits=None) -> Ideal:
    if not ideals:
        raise StructuralError("intersect_many needs at least one ideal")
    out = ideals[0]
    for J in ideals[1:]:
        out = intersect(out, J, limits)
    return out


def ideal_quotient(I: Ideal, J: Ideal, limits=None) -> Ideal:
    """I : J = {f : f·J ⊆ I}."""
    if I.ring != J.ring:
        raise StructuralError("ideal_quotient: ring mismatch")
    if not J.gens:
        return Ideal(I.ring, [I.ring.one()])
    parts = []
    for g in J.gens:
        if g.is_constant():
            parts.append(I)
            continue
        K = intersect(I, Ideal(I.ring, [g]), limits)
        quots = []
        for h in K.gens:
            q = exact_divide(h, g)
            if q is None:
                raise StructuralError("quotient division failed (internal)")
            quots.append(q)
        parts.append(Ideal(I.ring, quots))
    out = parts[0]
    for P in parts[1:]:
        out = intersect(out, P, limits)
    return out


def saturate_principal(I: Ideal, g: Polynomial, limits=None) -> Ideal:
    """I : g^inf via the single extended variable: I + (1 − z·g), eliminate z."""
    if g.ring != I.ring:
        raise StructuralError("saturate: ring mismatch")
    if g.is_zero():
        return I
    if g.is_constant():
        return I
    ring = I.ring
    zname = _fresh_name(ring.names, "_z")
    big = extend_ring(ring, (zname,), 0)
    z = big.var(0)
    gens = [embed_poly(h, big, 1) for h in I.gens]
    gens.append(big.one() - z * embed_poly(g, big, 1))
    E = eliminate(Ideal(big, gens), 1, limits)
    return restrict_to_tail_ring(E, 1, ring)


def saturate(I: Ideal, J: Ideal, limits=None, max_rounds: int = 64) -> Ideal:
    """I : J^inf, iterating quotients to stabilization (principal: z-trick)."""
    if I.ring != J.ring:
        raise StructuralError("saturate: ring mismatch")
    if not J.gens:
        return I
    nonunits = [g for g in J.gens if not g.is_constant()]
    if not nonunits:
        return I
    if len(nonunits) == 1:
        return saturate_principal(I, nonunits[0], limits)
    S = I
    for _ in range(max_rounds):
        S2 = ideal_quotient(S, J, limits)
        if ideal_equal(S2, S, limits):
            return S
        S = S2
    raise ComputationLimitError("saturation did not stabilize within the round budget")


# -- membership, containment, dimension ---------------------------------------


def radical_membership(f: Polynomial, I: Ideal, limits=None) -> bool:
    """f ∈ √I, via 1 ∈ I + (1 − z·f) in an extended ring."""
    if f.ring != I.ring:
        raise StructuralError("radical_membership: ring mismatch")
    if f.is_zero():
        return True
    if f.is_constant():
        return is_trivial(I, limits)
    if in_ideal(f, I, limits):
        return True
    ring = I.ring
    zname = _fresh_name(ring.names, "_z")
    big = extend_ring(ring, (zname,), 0)
    z = big.var(0)
    gens = [embed_poly(h, big, 1) for h in I.gens]
    gens.append(big.one() - z * embed_poly(f, big, 1))
    return is_trivial(Ideal(big, gens), limits)


def variety_contains(I: Ideal, J: Ideal, limits=None) -> bool:
    """Z(I) ⊇ Z(J): every generator of I lies in √J."""
    if I.ring != J.ring:
        raise StructuralError("variety_contains: ring mismatch")
    return all(radical_membership(g, J, limits) for g in I.gens)


def dimension(I: Ideal, flavor: str = "affine", limits=None) -> int:
    """Krull dimension of Z(I); -1 for the empty variety.

    Computed as the maximum number of variables independent modulo the
    leading-term ideal of a grevlex GB; projective = affine cone − 1.
    """
    if flavor not in ("affine", "projective"):
        raise StructuralError(f"unknown dimension flavor {flavor!r}")
    gb = I.groebner(GREVLEX, limits)
    if len(gb) == 1 and gb[0].is_constant():
        return -1
    n = I.ring.arity
    supports = []
    for g in gb:
        lm = g.leading_monomial(GREVLEX)
        supports.append(frozenset(i for i, e in enumerate(lm) if e))
    supports = sorted(set(supports), key=len)
    best = _max_independent(n, supports)
    if flavor == "projective":
        return max(best - 1, -1)
    return best


def _max_independent(n, supports):
    """Largest variable subset containing no full leading-term support."""
    best = 0

    def go(i, chosen, chosen_set):
        nonlocal best
        if chosen + (n - i) <= best:
            return
        if i == n:
            best = max(best, chosen)
            return
        # try including variable i
        chosen_set.add(i)
        if not any(s <= chosen_set for s in supports):
            go(i + 1, chosen + 1, chosen_set)
        chosen_set.discard(i)
        go(i + 1, chosen, chosen_set)

    go(0, 0, set())
    return best


def standard_monomial_count(I: Ideal, limit: int = 1_000_000, limits=None):
    """Number of monomials outside LT(I); None if infinite (positive dim)."""
    gb = I.groebner(GREVLEX, limits)
    if len(gb) == 1 and gb[0].is_constant():
        return 0
    n = I.ring.arity
    lms = [g.leading_monomial(GREVLEX) for g in gb]
    bounds = []
    for i in range(n):
        pure = [lm[i] for lm in lms if all(e == 0 for j, e in enumerate(lm) if j != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    # product-bounded enumeration with a divisibility check at the leaves
    count = 0
    exp = [0] * n

    def rec(i):
        nonlocal count
        if i == n:
            t = tuple(exp)
            if not any(mono_divides(lm, t) for lm in lms):
                count += 1
                if count > limit:
                    raise ComputationLimitError("standard monomial count limit")
            return
        for v in range(bounds[i]):
            exp[i] = v
            rec(i + 1)
        exp[i] = 0

    rec(0)
    return count
