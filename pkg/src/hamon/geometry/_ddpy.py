"""Pure-Python double-description kernels.

Vectors are tuples of Python ints in homogeneous coordinates.  A cone is
given by generators (``lines``, ``rays``) and, dually, by rows (equalities
and inequalities ``row . y >= 0``).  ``sats[k]`` is the bitmask of the
inequality rows saturated by ray ``k``.

The same two routines serve both directions of the conversion: feeding
constraint rows into a generator system yields generators, and feeding
generators into a constraint system (the dual cone) yields constraints.
"""
from __future__ import annotations

from math import gcd
from operator import mul


def dot(a, b):
    return sum(map(mul, a, b))


def normalize(v):
    g = gcd(*v)
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


def _combine(a, u, b, w):
    # a*u + b*w, gcd-normalised
    return normalize([a * x + b * y for x, y in zip(u, w)])


def _canonical_line(v):
    v = normalize(v)
    for x in v:
        if x:
            if x < 0:
                return tuple(-y for y in v)
            break
    return v


def add_rows(lines, rays, sats, nbits, eqs, ineqs, need_point=False):
    """Intersect ``cone(lines, rays)`` with the given rows.

    Returns ``(lines, rays)``.  Every inequality row gets the next saturation
    bit.  With ``need_point`` the loop stops early once no ray has a positive
    homogenising coordinate (the polyhedron is empty).
    """
    lines = list(lines)
    rays = list(rays)
    sats = list(sats)
    work = [(r, True) for r in eqs] + [(r, False) for r in ineqs]
    for row, is_eq in work:
        pivot = -1
        for k, ln in enumerate(lines):
            s = dot(row, ln)
            if s:
                pivot = k
                ps = s
                break
        if pivot >= 0:
            piv = lines.pop(pivot)
            if ps < 0:
                piv = tuple(-x for x in piv)
                ps = -ps
            new_lines = []
            for ln in lines:
                s = dot(row, ln)
                new_lines.append(_canonical_line(_combine(ps, ln, -s, piv)) if s else ln)
            lines = new_lines
            for k, r in enumerate(rays):
                s = dot(row, r)
                if s:
                    rays[k] = _combine(ps, r, -s, piv)
            if not is_eq:
                old = (1 << nbits) - 1
                bit = 1 << nbits
                nbits += 1
                sats = [m | bit for m in sats]
                rays.append(piv)
                sats.append(old)
            continue

        signs = [dot(row, r) for r in rays]
        pos = [k for k, s in enumerate(signs) if s > 0]
        neg = [k for k, s in enumerate(signs) if s < 0]
        if is_eq:
            if not pos and not neg:
                continue
        elif not neg:
            bit = 1 << nbits
            nbits += 1
            sats = [m | bit if s == 0 else m for m, s in zip(sats, signs)]
            continue

        new_rays = []
        new_sats = []
        bit = 0 if is_eq else 1 << nbits
        nr = len(rays)
        for p in pos:
            sp = signs[p]
            mp = sats[p]
            rp = rays[p]
            for q in neg:
                common = mp & sats[q]
                adjacent = True
                for r in range(nr):
                    if r != p and r != q and (sats[r] & common) == common:
                        adjacent = False
                        break
                if adjacent:
                    new_rays.append(_combine(sp, rays[q], -signs[q], rp))
                    new_sats.append(common | bit)
        keep_rays = []
        keep_sats = []
        for k, s in enumerate(signs):
            if s == 0:
                keep_rays.append(rays[k])
                keep_sats.append(sats[k] | bit)
            elif s > 0 and not is_eq:
                keep_rays.append(rays[k])
                keep_sats.append(sats[k])
        rays = keep_rays + new_rays
        sats = keep_sats + new_sats
        if not is_eq:
            nbits += 1
        if need_point and not any(r[0] > 0 for r in rays):
            return lines, []
    return lines, rays


def echelon(rows):
    """Integer reduced row-echelon basis of the span of ``rows``.

    Pivots are searched from column 1 onward with column 0 last, so an
    equality system reads ``x_i = ...`` on the variable columns.
    """
    basis = []
    pivots = []
    for row in rows:
        v = list(row)
        for b, pc in zip(basis, pivots):
            if v[pc]:
                a = b[pc]
                f = v[pc]
                v = [a * x - f * y for x, y in zip(v, b)]
        if any(v):
            pc = _pivot_col(v)
            if v[pc] < 0:
                v = [-x for x in v]
            v = list(normalize(v))
            for i, b in enumerate(basis):
                if b[pc]:
                    a = v[pc]
                    f = b[pc]
                    w = [a * x - f * y for x, y in zip(b, v)]
                    pw = pivots[i]
                    if w[pw] < 0:
                        w = [-x for x in w]
                    basis[i] = list(normalize(w))
            basis.append(v)
            pivots.append(pc)
    order = sorted(range(len(basis)), key=lambda i: (pivots[i] == 0, pivots[i]))
    return [tuple(basis[i]) for i in order]


def _pivot_col(v):
    for i in range(1, len(v)):
        if v[i]:
            return i
    return 0


def minimize(glines, grays, eqs, ineqs):
    """Drop redundant rows of a cone described by generators ``glines``/``grays``.

    Returns ``(eqs, ineqs, csat)`` where ``eqs`` is an echelon basis including
    implicit equalities, ``ineqs`` holds one row per facet and ``csat[k]`` is
    the bitmask of generator rays saturating ``ineqs[k]``.
    """
    full = (1 << len(grays)) - 1
    eq_rows = list(eqs)
    cand = []
    seen = set()
    for c in ineqs:
        m = 0
        bit = 1
        for g in grays:
            if not dot(c, g):
                m |= bit
            bit <<= 1
        if m == full:
            eq_rows.append(c)
        elif m not in seen:
            seen.add(m)
            cand.append((c, m))
    kept = []
    csat = []
    for c, m in cand:
        for _, m2 in cand:
            if m2 != m and (m & m2) == m:
                break
        else:
            kept.append(c)
            csat.append(m)
    return echelon(eq_rows), kept, csat


def transpose_sat(csat, nrays):
    rsat = [0] * nrays
    for i, m in enumerate(csat):
        bit = 1 << i
        k = 0
        while m:
            if m & 1:
                rsat[k] |= bit
            m >>= 1
            k += 1
    return rsat
