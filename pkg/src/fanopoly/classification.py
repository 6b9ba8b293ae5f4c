"""Enumeration of minimal Fano polygons and partition into mutation classes.

The enumerators follow the finiteness casework: polygons are anchored at an
edge of maximum local index placed horizontally on top, and the remaining
vertex chain is grown counter-clockwise through a finite candidate region
with exact convexity, height and closure constraints. Output is always a
canonically sorted list of canonical forms.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Iterable, NamedTuple, Optional, Sequence

from .lattice import (
    FanoPolygon,
    NotFano,
    Degenerate,
    Vec2,
    boundary_point_count,
    cross,
    dot,
    edge_data,
    make_polygon,
)
from .mutations import is_minimal, neighbors, t_sublattice_invariant
from .quivers import NoTCones, all_even, quiver_mutation_class, quiver_of
from .singularities import (
    CyclicQuotientSingularity,
    SingularityContent,
    degree,
    degree_contribution,
    hilbert_window,
    is_residual,
    singularity_content,
)


class Unsupported(ValueError):
    """Requested enumeration exceeds the configured desk-scale budgets."""


class NonResidualEntry(ValueError):
    """A basket may only contain residual singularities."""


# -- basket numerics ----------------------------------------------------------


class BasketBounds(NamedTuple):
    m_b: int
    d_b: int
    s_b: Fraction


def basket_bounds(basket: Sequence[CyclicQuotientSingularity]) -> BasketBounds:
    """(max index, lcm of degree-contribution denominators, negative slack)."""
    for sigma in basket:
        if not is_residual(sigma):
            raise NonResidualEntry(f"{sigma} is not residual")
    if not basket:
        return BasketBounds(1, 1, Fraction(0))
    m_b = max(s.r for s in basket)
    d_b = 1
    s_min = Fraction(0)
    for s in basket:
        a = degree_contribution(s)
        d_b = d_b * a.denominator // gcd(d_b, a.denominator)
        s_min = min(s_min, a)
    return BasketBounds(m_b, d_b, -s_min)


class CandidateTriple(NamedTuple):
    j: int
    r_e: int
    b: int


def candidate_triples(basket: Sequence[CyclicQuotientSingularity]) -> list[CandidateTriple]:
    """Vertical-edge casework parameters (j, r_E, b) for the given basket.

    For the empty basket the degree is a positive integer and all three
    edges span T-cones, which cuts the range to exactly the twelve printed
    triples; in general the looser slack bounds apply.
    """
    m_b, d_b, s_b = basket_bounds(basket)
    return _triples_from_bounds(m_b, d_b, s_b, empty=not basket)


def _triples_from_bounds(
    m_b: int, d_b: int, s_b: Fraction, empty: bool
) -> list[CandidateTriple]:
    # global height bound from the slack inequality chain
    sd = s_b * d_b
    disc = sd * sd + 4 * d_b * (s_b + 31)
    r_cap = int((sd + _frac_sqrt_upper(disc)) / 2) + 1
    j_cap = int(11 + (r_cap + 1) * s_b) + 1
    out = []
    for j in range(5, j_cap + 1):
        if empty and j > 9:
            # empty basket: n >= j + 2 and degree 12 - n >= 1
            break
        for r_e in range(max(2, m_b + 1), r_cap + 1):
            if Fraction(j) >= 11 + (r_e + 1) * s_b:
                continue
            if r_e * r_e * (j - 4) > j * j * d_b:
                continue
            b_lo = -((-2 * r_e) // j)  # ceil(2 r_E / j)
            b_hi = r_e // 2
            for b in range(b_lo, b_hi + 1):
                if gcd(b, r_e) == 1:
                    out.append(CandidateTriple(j, r_e, b))
    return out


def _frac_sqrt_upper(x: Fraction) -> Fraction:
    """A rational upper bound for sqrt(x), x >= 0."""
    n = x.numerator * x.denominator
    root = isqrt(n)
    if root * root < n:
        root += 1
    return Fraction(root, x.denominator)


# -- anchored chain growth ----------------------------------------------------

_N_CAP = 30  # primitive T-cones per polygon (generous; real values stay < 16)
_EDGE_CAP = 16
_BOUNDARY_CAP = 120


def _ccw_key_factory(base: Vec2):
    """Total order on lattice points by CCW angle starting just after base."""

    def key(u: Vec2):
        c = cross(base, u)
        d = dot(base, u)
        if c == 0 and d > 0:
            half = 0  # on the base ray itself
            slope = 0
        elif c > 0:
            half = 1
            slope = Fraction(-d, c)
        elif c == 0 and d < 0:
            half = 2
            slope = 0
        else:
            half = 3
            slope = Fraction(-d, c)
        return (half, slope)

    return key


def _grow_closed_chains(
    anchor: Sequence[Vec2],
    candidates: Sequence[Vec2],
    r_max: int,
    n_cap: int = _N_CAP,
    edge_cap: int = _EDGE_CAP,
    boundary_cap: int = _BOUNDARY_CAP,
):
    """All Fano polygons whose CCW cycle starts with `anchor` and whose
    remaining vertices are drawn from `candidates`, every edge of height
    at most r_max. Yields vertex cycles.
    """
    first, last = anchor[0], anchor[-1]
    key = _ccw_key_factory(first)
    cand = sorted(
        (u for u in candidates if key(u) > key(last)),
        key=key,
    )
    anchor_n = 0
    anchor_boundary = 0
    for a, b in zip(anchor, anchor[1:]):
        det = cross(a, b)
        d = (b[0] - a[0], b[1] - a[1])
        k = gcd(d[0], d[1])
        anchor_n += k // (det // k)
        anchor_boundary += k
    first_dir = (anchor[1][0] - anchor[0][0], anchor[1][1] - anchor[0][1])

    def try_close(v: Vec2, d_prev: Vec2, n_used: int, b_used: int) -> bool:
        det = cross(v, first)
        if det <= 0:
            return False
        d = (first[0] - v[0], first[1] - v[1])
        k = gcd(d[0], d[1])
        if det > r_max * k:
            return False
        if cross(d_prev, d) <= 0 or cross(d, first_dir) <= 0:
            return False
        if b_used + k > boundary_cap:
            return False
        if n_used + k // (det // k) > n_cap:
            return False
        return True

    chain: list[Vec2] = list(anchor)

    def extend(start_idx: int, d_prev: Vec2, n_used: int, b_used: int):
        v = chain[-1]
        if len(chain) > len(anchor) and try_close(v, d_prev, n_used, b_used):
            yield tuple(chain)
        if len(chain) - len(anchor) >= edge_cap - len(anchor):
            return
        for idx in range(start_idx, len(cand)):
            u = cand[idx]
            det = cross(v, u)
            if det <= 0:
                continue
            d = (u[0] - v[0], u[1] - v[1])
            if cross(d_prev, d) <= 0:
                continue
            # the chain end must stay strictly left of every new edge
            if cross(d, (first[0] - v[0], first[1] - v[1])) <= 0:
                continue
            k = gcd(d[0], d[1])
            if det > r_max * k:
                continue
            if b_used + k > boundary_cap:
                continue
            n_new = n_used + k // (det // k)
            if n_new > n_cap:
                continue
            chain.append(u)
            yield from extend(idx + 1, d, n_new, b_used + k)
            chain.pop()

    yield from extend(0, first_dir, anchor_n, anchor_boundary)


def _primitive_points(
    x_lo: int, x_hi: int, y_lo: int, y_hi: int
) -> list[Vec2]:
    return [
        (x, y)
        for x in range(x_lo, x_hi + 1)
        for y in range(y_lo, y_hi + 1)
        if gcd(x, y) == 1
    ]


@lru_cache(maxsize=None)
def _max_index_raw(r: int, box: int) -> tuple[FanoPolygon, ...]:
    """Canonical forms of all Fano polygons with every local index <= r.

    Anchors each polygon at a maximum-index edge normalized to the top;
    the search box is an empirical bound on the anchored coordinates,
    validated by the frozen counts and a margin re-run in the test suite.
    """
    found: dict[tuple, FanoPolygon] = {}
    for m in range(1, r + 1):
        points = _primitive_points(-box, box, -box, m - 1)
        for x_l in range(-m + 1, 1):
            if gcd(x_l, m) != 1:
                continue
            for k in range(1, box - x_l + 1):
                x_r = x_l + k
                if gcd(x_r, m) != 1:
                    continue
                if k // m > _N_CAP:
                    break
                anchor = ((x_r, m), (x_l, m))
                for cycle in _grow_closed_chains(anchor, points, m):
                    try:
                        p = FanoPolygon(cycle)
                    except (NotFano, Degenerate):
                        continue
                    if max(e.height for e in edge_data(p)) != m:
                        continue
                    c = p.canonical()[0]
                    found.setdefault(c.vertices, c)
    return tuple(found[k] for k in sorted(found))


_MAX_SUPPORTED_INDEX = 3
_DEFAULT_BOX = 20


def enumerate_fano_max_index(r: int, box: int = _DEFAULT_BOX) -> list[FanoPolygon]:
    """All Fano polygons (canonical, sorted) whose edges have height <= r."""
    if r < 1:
        raise Unsupported("index bound must be >= 1")
    if r > _MAX_SUPPORTED_INDEX:
        raise Unsupported(
            f"max local index {r} exceeds the configured budget "
            f"({_MAX_SUPPORTED_INDEX})"
        )
    return list(_max_index_raw(r, box))


# -- minimal polygons with empty basket ----------------------------------------


def _k2_triangles(m_b: int, r_lo: int, r_hi: int) -> Iterable[FanoPolygon]:
    """Triangles conv{(-a, r), (-a + 2r, r), (-a, -r)} from the width-2 case."""
    for r in range(r_lo, r_hi + 1):
        for a in range(1, r):
            if gcd(a, r) != 1:
                continue
            try:
                yield make_polygon([(-a, r), (-a + 2 * r, r), (-a, -r)])
            except (NotFano, Degenerate):
                continue


def _rectangles(r_lo: int, r_hi: int) -> Iterable[FanoPolygon]:
    for r in range(r_lo, r_hi + 1):
        for a in range(1, r):
            try:
                yield make_polygon([(-a, r), (-a + r, r), (-a + r, -r), (-a, -r)])
            except (NotFano, Degenerate):
                continue


def _vertical_case_polygons(
    j: int, r_e: int, b: int, l: int, r_height_cap: int
) -> Iterable[FanoPolygon]:
    """Completions of the anchored vertex data from the vertical-edge case:
    top edge (b - r_E, r_E)..(b, r_E), right vertical edge down to
    (b, r_E - j*b - l); remaining vertices grown in the bounding box."""
    bottom = (b, r_e - j * b - l)
    if gcd(bottom[0], bottom[1]) != 1:
        return
    # CCW cycle: (b, r_E), (b - r_E, r_E), [completions], (b, r_E - jb - l)
    start = ((b, r_e), (b - r_e, r_e))
    candidates = _primitive_points(b - r_e, b, r_e - j * b - l, r_e - 1)
    for cycle in _grow_closed_chains_with_terminal(
        start, bottom, candidates, r_height_cap
    ):
        try:
            yield FanoPolygon(cycle)
        except (NotFano, Degenerate):
            continue


def _grow_closed_chains_with_terminal(
    start: Sequence[Vec2],
    terminal: Vec2,
    candidates: Sequence[Vec2],
    r_max: int,
):
    """Chains start -> ... -> terminal -> start[0], with the terminal vertex
    forced to be on the cycle (the vertical edge terminal -> start[0] is part
    of the anchor data)."""
    first = start[0]
    for cycle in _grow_closed_chains(
        start, list(candidates) + [terminal], r_max
    ):
        if cycle[-1] == terminal:
            yield cycle


# -- the three published enumerations ------------------------------------------


def _is_basket_all_third(content: SingularityContent) -> bool:
    return len(content.basket) >= 1 and all(
        s.rkc() == (3, 1, 2) for s in content.basket
    )


@lru_cache(maxsize=1)
def enumerate_minimal_empty_cached() -> tuple[FanoPolygon, ...]:
    found: dict[tuple, FanoPolygon] = {}

    def take(p: FanoPolygon):
        content = singularity_content(p)
        if content.basket:
            return
        if not is_minimal(p):
            return
        c = p.canonical()[0]
        found.setdefault(c.vertices, c)

    # reflexive polygons (max local index 1) are all minimal
    for p in enumerate_fano_max_index(1):
        take(p)
    # width-2 triangles at the maximum edge
    for p in _k2_triangles(1, 2, 8):
        take(p)
    # parallel-edge rectangles
    for p in _rectangles(2, 6):
        take(p)
    # vertical-edge casework: j = 4 forces the [-1,1] x [-2,2] box
    for p in _box_polygons(-1, 1, -2, 2, r_max=2):
        take(p)
    # j >= 5 triples
    for j, r_e, b in candidate_triples(()):
        for p in _vertical_case_polygons(j, r_e, b, 0, r_e):
            take(p)
    return tuple(found[k] for k in sorted(found))


def enumerate_minimal_empty() -> list[FanoPolygon]:
    """The minimal Fano polygons with empty residual basket (exactly 35)."""
    return list(enumerate_minimal_empty_cached())


def _box_polygons(x_lo, x_hi, y_lo, y_hi, r_max) -> Iterable[FanoPolygon]:
    """All Fano polygons with vertices in a small box (subset search)."""
    pts = _primitive_points(x_lo, x_hi, y_lo, y_hi)
    for size in range(3, len(pts) + 1):
        for combo in itertools.combinations(pts, size):
            try:
                p = FanoPolygon(_hull_or_none(combo))
            except (NotFano, Degenerate, TypeError):
                continue
            if len(p.vertices) != size:
                continue  # avoid emitting the same hull many times
            if max(e.height for e in edge_data(p)) > r_max:
                continue
            yield p


def _hull_or_none(points):
    from .lattice import convex_hull

    return convex_hull(points)


def enumerate_minimal_with_basket(
    basket: Sequence[CyclicQuotientSingularity],
) -> list[FanoPolygon]:
    """Minimal Fano polygons whose residual basket equals the given multiset.

    Combines the bounded-index enumeration (max local index = basket index)
    with the larger-index casework candidates, each filtered through
    minimality and exact basket equality.
    """
    basket = tuple(basket)
    if not basket:
        return enumerate_minimal_empty()
    m_b, d_b, s_b = basket_bounds(basket)
    if m_b > _MAX_SUPPORTED_INDEX:
        raise Unsupported(f"baskets with index {m_b} exceed the configured scale")
    want = tuple(sorted(s.rkc() for s in basket))

    found: dict[tuple, FanoPolygon] = {}
    for p in enumerate_fano_max_index(m_b):
        if is_minimal(p) and singularity_content(p).basket_multiset() == want:
            found.setdefault(p.vertices, p)
    for p in _high_index_minimal_candidates(m_b, d_b, s_b):
        if singularity_content(p).basket_multiset() == want:
            found.setdefault(p.vertices, p)
    return [found[k] for k in sorted(found)]


@lru_cache(maxsize=None)
def _high_index_minimal_candidates(
    m_b: int, d_b: int, s_b: Fraction
) -> tuple[FanoPolygon, ...]:
    """Minimal canonical polygons with m_P > m_B from the finiteness
    casework, before intersecting with a concrete basket."""
    found: dict[tuple, FanoPolygon] = {}

    def take(p: FanoPolygon):
        if max(e.height for e in edge_data(p)) <= m_b:
            return
        if not is_minimal(p):
            return
        c = p.canonical()[0]
        found.setdefault(c.vertices, c)

    # width-2 triangles at the maximum edge
    for p in _k2_triangles(m_b, m_b + 1, 2 * m_b + 2):
        take(p)
    # parallel-edge rectangles (the proof rules these out; kept for safety)
    for p in _rectangles(m_b + 1, 2 * m_b):
        take(p)
    # vertical edge spanning T-cones only (l = 0)
    for j, r_e, b in _triples_from_bounds(m_b, d_b, s_b, empty=False):
        for p in _vertical_case_polygons(j, r_e, b, 0, r_e):
            take(p)
    # vertical edge carrying a residue (l > 0); its index is b, so only
    # b <= m_B can produce a basket bounded by m_B
    for j, r_e, b, l in _residual_vertical_triples(m_b, d_b, s_b):
        for p in _vertical_case_polygons(j, r_e, b, l, r_e):
            take(p)
    return tuple(found[k] for k in sorted(found))


def _residual_vertical_triples(m_b: int, d_b: int, s_b: Fraction):
    """(j, r_E, b, l) casework parameters when the vertical edge itself
    contributes a residual singularity: 2b < r_E, 0 < l < b, jb + l >= 2r_E,
    with the proof's j = 4 and j >= 5 bounds."""
    # j = 4: l = 1 impossible, l > 1 forces r_E < 10 d_B
    for r_e in range(m_b + 1, 10 * d_b):
        for b in range(2, min(m_b, (r_e - 1) // 2) + 1):
            if gcd(b, r_e) != 1 or 2 * b >= r_e:
                continue
            for l in range(2, b):
                if 4 * b + l >= 2 * r_e:
                    yield (4, r_e, b, l)
    # j >= 5: r_E^2 (j - 4) < j (j + 1) d_B and j < 11 + (r_E + 2) s_B
    sd = s_b * d_b
    disc = sd * sd + 4 * d_b * (2 * s_b + 36)
    r_cap = int((sd + _frac_sqrt_upper(disc)) / 2) + 1
    j_cap = int(11 + (r_cap + 2) * s_b) + 1
    for j in range(5, j_cap + 1):
        for r_e in range(m_b + 1, r_cap + 1):
            if Fraction(j) >= 11 + (r_e + 2) * s_b:
                continue
            if r_e * r_e * (j - 4) >= j * (j + 1) * d_b:
                continue
            for b in range(1, min(m_b, (r_e - 1) // 2) + 1):
                if 2 * b >= r_e or gcd(b, r_e) != 1:
                    continue
                for l in range(1, b):
                    if j * b + l >= 2 * r_e:
                        yield (j, r_e, b, l)


THIRD = CyclicQuotientSingularity.from_weights(3, 1, 1)


@lru_cache(maxsize=1)
def enumerate_minimal_third_cached() -> tuple[FanoPolygon, ...]:
    out: list[FanoPolygon] = []
    for m in range(1, 7):
        out.extend(enumerate_minimal_with_basket((THIRD,) * m))
    return tuple(sorted(out, key=lambda p: p.vertices))


def enumerate_minimal_third() -> list[FanoPolygon]:
    """Minimal polygons with basket {m x 1/3(1,1)}, m >= 1 (exactly 64)."""
    return list(enumerate_minimal_third_cached())


# -- mutation-class partition ---------------------------------------------------


class ClassReport(NamedTuple):
    polygons: tuple[FanoPolygon, ...]
    fingerprints: tuple[tuple, ...]
    components: tuple[tuple[int, ...], ...]
    distinct_pairs: tuple[tuple[int, int], ...]
    unresolved_pairs: tuple[tuple[int, int], ...]

    @property
    def class_count(self) -> int:
        return len(self.components)

    def component_of(self, index: int) -> int:
        for ci, members in enumerate(self.components):
            if index in members:
                return ci
        raise IndexError(index)

    def to_json_dict(self) -> dict:
        return {
            "polygons": [list(map(list, p.vertices)) for p in self.polygons],
            "components": [list(c) for c in self.components],
            "distinct_pairs": [list(x) for x in self.distinct_pairs],
            "unresolved_pairs": [list(x) for x in self.unresolved_pairs],
        }

    def to_csv_rows(self) -> list[dict]:
        rows = []
        comp_of = {}
        for ci, members in enumerate(self.components):
            for m in members:
                comp_of[m] = ci
        for i, p in enumerate(self.polygons):
            content = singularity_content(p)
            rows.append(
                {
                    "vertices": ";".join(f"{x},{y}" for x, y in p.vertices),
                    "n": content.n,
                    "basket": "+".join(str(s) for s in content.basket),
                    "degree": str(degree(p)),
                    "divisors": "{},{}".format(*t_sublattice_invariant(p)),
                    "class": comp_of[i],
                }
            )
        return rows


def mutation_fingerprint(p: FanoPolygon, hilbert_degree: int = 8) -> tuple:
    """Mutation-invariant data used to certify class distinctness."""
    content = singularity_content(p)
    window = hilbert_window(p, hilbert_degree)
    try:
        parity = all_even(quiver_of(p))
    except NoTCones:
        parity = None
    return (
        content.n,
        content.basket_multiset(),
        degree(p),
        window.coefficients,
        tuple(t_sublattice_invariant(p)),
        parity,
    )


def partition_into_classes(
    polys: Sequence[FanoPolygon],
    max_nodes: int = 10000,
    max_boundary: Optional[int] = None,
    hilbert_degree: int = 8,
    quiver_cap: int = 500,
) -> ClassReport:
    """Group polygons into mutation classes, certifying distinctness only by
    invariants and connection only by explicit mutation paths.

    Same-fingerprint groups that fail to connect within the search budget
    are reported as unresolved, never silently merged or split.
    """
    if not polys:
        raise ValueError("need at least one polygon")
    canon = [p.canonical()[0] for p in polys]
    fingerprints = [mutation_fingerprint(p, hilbert_degree) for p in canon]
    if max_boundary is None:
        max_boundary = max(boundary_point_count(p) for p in canon) + 10

    parent = list(range(len(canon)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    # identical canonical forms are trivially equivalent
    by_key: dict[tuple, int] = {}
    for i, p in enumerate(canon):
        j = by_key.setdefault(p.vertices, i)
        if j != i:
            union(i, j)

    groups: dict[tuple, list[int]] = {}
    for i, f in enumerate(fingerprints):
        groups.setdefault(f, []).append(i)

    for members in groups.values():
        if len({find(i) for i in members}) > 1:
            _connect_group(canon, members, union, find, max_nodes, max_boundary)

    comp: dict[int, list[int]] = {}
    for i in range(len(canon)):
        comp.setdefault(find(i), []).append(i)
    components = tuple(
        tuple(sorted(v)) for _, v in sorted(comp.items())
    )

    distinct = []
    unresolved = []
    for a in range(len(components)):
        for b in range(a + 1, len(components)):
            fa = fingerprints[components[a][0]]
            fb = fingerprints[components[b][0]]
            if fa != fb:
                distinct.append((a, b))
            elif _quiver_orbits_disjoint(
                canon[components[a][0]], canon[components[b][0]], quiver_cap
            ):
                distinct.append((a, b))
            else:
                unresolved.append((a, b))
    return ClassReport(
        tuple(canon),
        tuple(fingerprints),
        components,
        tuple(distinct),
        tuple(unresolved),
    )


def _connect_group(canon, members, union, find, max_nodes, max_boundary):
    """Joint BFS over the mutation graph of one fingerprint group."""
    seen: dict[tuple, int] = {}
    queue: list[tuple[FanoPolygon, int]] = []
    for i in members:
        key = canon[i].vertices
        if key in seen:
            union(i, seen[key])
        else:
            seen[key] = i
            queue.append((canon[i], i))
    explored = 0
    while queue:
        if len({find(i) for i in members}) == 1:
            return
        node, owner = queue.pop(0)
        explored += 1
        if explored > max_nodes:
            return
        for q, _ in neighbors(node):
            if boundary_point_count(q) > max_boundary:
                continue
            key = q.vertices
            if key in seen:
                union(owner, seen[key])
            else:
                seen[key] = owner
                if len(seen) <= max_nodes:
                    queue.append((q, owner))


def _quiver_orbits_disjoint(p, q, cap) -> bool:
    """Provably distinct via complete bounded quiver mutation classes."""
    try:
        qp = quiver_mutation_class(quiver_of(p), cap)
        qq = quiver_mutation_class(quiver_of(q), cap)
    except NoTCones:
        return False
    if qp is None or qq is None:
        return False
    return not (set(qp) & set(qq))
