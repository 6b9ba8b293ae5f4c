"""Exact integer and rational geometry for lattice polygons around the origin.

All coordinates are Python ints or fractions.Fraction; no floating point
enters any predicate. Polygons are stored as counter-clockwise vertex
cycles rotated to start at the lexicographically smallest vertex, so two
equal polygons compare equal as values.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, NamedTuple, Sequence


Vec2 = tuple[int, int]


class Degenerate(ValueError):
    """Input points do not span a two-dimensional polygon."""


class NotFano(ValueError):
    """Polygon fails the Fano conditions (primitive vertices, 0 interior)."""


def cross(a, b):
    """2x2 determinant a_x*b_y - a_y*b_x (works for ints and Fractions)."""
    return a[0] * b[1] - a[1] * b[0]


def is_primitive(v: Vec2) -> bool:
    return gcd(v[0], v[1]) == 1


def primitivize(v: Vec2) -> Vec2:
    """Divide a nonzero integer vector by the gcd of its entries."""
    g = gcd(v[0], v[1])
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return (v[0] // g, v[1] // g)


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


class UnimodularMap(NamedTuple):
    """Integer 2x2 matrix [[a, b], [c, d]] with determinant +-1."""

    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def apply(self, v) -> Vec2:
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def compose(self, other: "UnimodularMap") -> "UnimodularMap":
        """self after other: (self.compose(other)).apply(v) = self(other(v))."""
        return UnimodularMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMap":
        d = self.det
        if d == 1:
            return UnimodularMap(self.d, -self.b, -self.c, self.a)
        if d == -1:
            return UnimodularMap(-self.d, self.b, self.c, -self.a)
        raise ValueError("not unimodular")


IDENTITY = UnimodularMap(1, 0, 0, 1)
_REFLECT = UnimodularMap(1, 0, 0, -1)


def convex_hull(points: Sequence) -> list:
    """Strict convex hull (no collinear vertices), CCW, via monotone chain.

    Accepts int or Fraction coordinate pairs.
    """
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) < 3:
        raise Degenerate("need at least 3 distinct points")

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(
                (out[-1][0] - out[-2][0], out[-1][1] - out[-2][1]),
                (p[0] - out[-1][0], p[1] - out[-1][1]),
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise Degenerate("points are collinear")
    return hull


def _rotate_to_min(cycle: Sequence) -> tuple:
    i = min(range(len(cycle)), key=lambda k: cycle[k])
    return tuple(cycle[i:]) + tuple(cycle[:i])


class FanoPolygon:
    """Convex lattice polygon with primitive vertices and 0 strictly inside.

    ``vertices`` is the CCW cycle of true vertices, rotated so the first
    vertex is lexicographically smallest. Instances are immutable values;
    equality and hashing are by vertex cycle.
    """

    __slots__ = ("vertices", "_canonical")

    def __init__(self, vertices: Iterable[Vec2], _validated: bool = False):
        cycle = tuple((int(v[0]), int(v[1])) for v in vertices)
        if not _validated:
            _validate_fano_cycle(cycle)
        object.__setattr__(self, "vertices", _rotate_to_min(cycle))
        object.__setattr__(self, "_canonical", None)

    def __setattr__(self, name, value):
        raise AttributeError("FanoPolygon is immutable")

    def __eq__(self, other):
        return isinstance(other, FanoPolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"FanoPolygon({list(self.vertices)})"

    def __len__(self):
        return len(self.vertices)

    def __reduce__(self):
        return (FanoPolygon, (self.vertices, True))

    # -- cached canonical form -------------------------------------------

    def canonical(self) -> tuple["FanoPolygon", UnimodularMap]:
        cached = self._canonical
        if cached is None:
            cached = _canonical_form(self)
            object.__setattr__(self, "_canonical", cached)
        return cached

    def canonical_key(self) -> tuple:
        return self.canonical()[0].vertices


def _angular_class(v: Vec2) -> int:
    if v[1] > 0 or (v[1] == 0 and v[0] > 0):
        return 0
    return 1


def _angular_before(u: Vec2, v: Vec2) -> bool:
    """Strictly smaller angle in [0, 2pi), measured from the positive x-axis."""
    cu, cv = _angular_class(u), _angular_class(v)
    if cu != cv:
        return cu < cv
    return cross(u, v) > 0


def _validate_fano_cycle(cycle: Sequence[Vec2]) -> None:
    if len(cycle) < 3:
        raise Degenerate("a polygon needs at least 3 vertices")
    n = len(cycle)
    wraps = 0
    for i, v in enumerate(cycle):
        if v == (0, 0) or not is_primitive(v):
            raise NotFano(f"vertex {v} is not primitive")
        w = cycle[(i + 1) % n]
        # det > 0 for every edge <=> each edge sees 0 strictly on its left
        if cross(v, w) <= 0:
            raise NotFano("origin is not strictly interior (or cycle not CCW)")
        u = cycle[(i + 2) % n]
        if cross((w[0] - v[0], w[1] - v[1]), (u[0] - w[0], u[1] - w[1])) <= 0:
            raise Degenerate("vertex cycle is not strictly convex")
        if not _angular_before(v, w):
            wraps += 1
    # winding number one: the angular order wraps exactly once
    if wraps != 1:
        raise NotFano("vertex cycle winds around the origin more than once")


def make_polygon(points: Iterable[Vec2]) -> FanoPolygon:
    """Convex hull of the given lattice points as a validated Fano polygon.

    Raises Degenerate if the hull is not two-dimensional and NotFano if a
    hull vertex is imprimitive or the origin is not strictly interior.
    """
    pts = [(int(p[0]), int(p[1])) for p in points]
    hull = convex_hull(pts)
    return FanoPolygon(hull)


# -- canonical form ---------------------------------------------------------


def _normalize_sequence(seq: Sequence[Vec2]) -> tuple[tuple, UnimodularMap]:
    """The unique SL2(Z) image of a CCW vertex sequence with fixed start.

    Maps seq[0] to (1, 0) and shears so the second vertex (a, b) has
    0 <= a < b; b = det(seq[0], seq[1]) > 0 is shear-invariant.
    """
    v0, v1 = seq[0], seq[1]
    g, x, y = extended_gcd(v0[0], v0[1])
    # rows (x, y) and (-v0y, v0x): determinant x*v0x + y*v0y = 1
    u = UnimodularMap(x, y, -v0[1], v0[0])
    a, b = u.apply(v1)
    t = -(a // b)
    u = UnimodularMap(1, t, 0, 1).compose(u)
    return tuple(u.apply(v) for v in seq), u


def _canonical_form(p: FanoPolygon) -> tuple[FanoPolygon, UnimodularMap]:
    n = len(p.vertices)
    best = None
    best_map = None
    for reflect in (False, True):
        if reflect:
            base = tuple(_REFLECT.apply(v) for v in p.vertices)[::-1]
            pre = _REFLECT
        else:
            base = p.vertices
            pre = IDENTITY
        for s in range(n):
            seq = base[s:] + base[:s]
            image, u = _normalize_sequence(seq)
            key = _rotate_to_min(image)
            if best is None or key < best:
                best = key
                best_map = u.compose(pre)
    poly = FanoPolygon(best, _validated=True)
    return poly, best_map


def canonical_form(p: FanoPolygon) -> tuple[FanoPolygon, UnimodularMap]:
    """Canonical representative of the GL2(Z)-orbit of P and a map onto it.

    canonical_form(P) == canonical_form(g(P)) for every unimodular g, and
    the returned g satisfies g(P) = C as a vertex set.
    """
    return p.canonical()


def apply_map(g: UnimodularMap, p: FanoPolygon) -> FanoPolygon:
    verts = [g.apply(v) for v in p.vertices]
    if g.det < 0:
        verts.reverse()
    return FanoPolygon(verts)


def equivalent(p: FanoPolygon, q: FanoPolygon) -> bool:
    """True iff P and Q lie in the same GL2(Z)-orbit."""
    return p.canonical_key() == q.canonical_key()


# -- edges ------------------------------------------------------------------


class EdgeData(NamedTuple):
    """One polygon edge: endpoints, primitive inner normal, height, width."""

    index: int
    tail: Vec2
    head: Vec2
    normal: Vec2  # primitive w with w(tail) = w(head) = -height
    height: int  # local index r
    width: int  # lattice length k = |E cap N| - 1


def edge_data(p: FanoPolygon) -> list[EdgeData]:
    """Edge records in CCW order; normals primitive, heights positive."""
    out = []
    verts = p.vertices
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        d = (b[0] - a[0], b[1] - a[1])
        w = primitivize((d[1], -d[0]))
        r = -(w[0] * a[0] + w[1] * a[1])
        if r < 0:
            w = (-w[0], -w[1])
            r = -r
        assert w[0] * b[0] + w[1] * b[1] == -r
        k = gcd(d[0], d[1])
        out.append(EdgeData(i, a, b, w, r, abs(k)))
    return out


def dot(w, v):
    return w[0] * v[0] + w[1] * v[1]


def height_range(p: FanoPolygon, w: Vec2) -> tuple[int, int]:
    """(h_min, h_max) of the grading w over the vertices of P."""
    values = [dot(w, v) for v in p.vertices]
    return min(values), max(values)


# -- counting ---------------------------------------------------------------


def boundary_point_count(p: FanoPolygon) -> int:
    return sum(e.width for e in edge_data(p))


def normalized_volume(p: FanoPolygon) -> int:
    """2 * Euclidean area; equals the sum of edge determinants."""
    verts = p.vertices
    return sum(cross(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts)))


def counts(p: FanoPolygon) -> tuple[int, int, int]:
    """(boundary points, interior points, normalized volume), all exact.

    Interior count comes from Pick's identity; tests compare all three
    against a direct bounding-box enumeration.
    """
    b = boundary_point_count(p)
    vol = normalized_volume(p)
    interior2 = vol - b + 2
    assert interior2 % 2 == 0
    return b, interior2 // 2, vol


def contains_point(p: FanoPolygon, pt: Vec2, strict: bool = False) -> bool:
    verts = p.vertices
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        s = cross((b[0] - a[0], b[1] - a[1]), (pt[0] - a[0], pt[1] - a[1]))
        if s < 0 or (strict and s == 0):
            return False
    return True


def lattice_points(p: FanoPolygon) -> list[Vec2]:
    """All lattice points of P by bounding-box scan (test oracle helper)."""
    xs = [v[0] for v in p.vertices]
    ys = [v[1] for v in p.vertices]
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            if contains_point(p, (x, y)):
                out.append((x, y))
    return out


# -- duality ----------------------------------------------------------------

QVec2 = tuple[Fraction, Fraction]


class RationalPolygon:
    """Convex polygon with exact rational vertices and 0 strictly inside."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable, _validated: bool = False):
        cycle = tuple((Fraction(v[0]), Fraction(v[1])) for v in vertices)
        if not _validated:
            if len(cycle) < 3:
                raise Degenerate("a polygon needs at least 3 vertices")
            n = len(cycle)
            for i in range(n):
                if cross(cycle[i], cycle[(i + 1) % n]) <= 0:
                    raise NotFano("origin not strictly interior or cycle not CCW")
                d1 = (
                    cycle[(i + 1) % n][0] - cycle[i][0],
                    cycle[(i + 1) % n][1] - cycle[i][1],
                )
                d2 = (
                    cycle[(i + 2) % n][0] - cycle[(i + 1) % n][0],
                    cycle[(i + 2) % n][1] - cycle[(i + 1) % n][1],
                )
                if cross(d1, d2) <= 0:
                    raise Degenerate("vertex cycle is not strictly convex")
        object.__setattr__(self, "vertices", _rotate_to_min(cycle))

    def __setattr__(self, name, value):
        raise AttributeError("RationalPolygon is immutable")

    def __eq__(self, other):
        return isinstance(other, RationalPolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"RationalPolygon({[(str(x), str(y)) for x, y in self.vertices]})"

    def __len__(self):
        return len(self.vertices)


def dual_polygon(p: FanoPolygon) -> RationalPolygon:
    """Polar dual {u : u(v) >= -1 on P}; vertex i is normal_i / height_i."""
    verts = [
        (Fraction(e.normal[0], e.height), Fraction(e.normal[1], e.height))
        for e in edge_data(p)
    ]
    return RationalPolygon(verts, _validated=True)


def dual_back(d: RationalPolygon) -> RationalPolygon:
    """Polar dual of a rational polygon containing 0 strictly inside."""
    verts = []
    cyc = d.vertices
    n = len(cyc)
    for i in range(n):
        u1, u2 = cyc[i], cyc[(i + 1) % n]
        # solve u1(v) = -1, u2(v) = -1
        det = cross(u1, u2)
        vx = Fraction(-u2[1] + u1[1], det)
        vy = Fraction(u2[0] - u1[0], det)
        verts.append((vx, vy))
    return RationalPolygon(verts)


def rational_to_fano(d: RationalPolygon) -> FanoPolygon:
    verts = []
    for x, y in d.vertices:
        if x.denominator != 1 or y.denominator != 1:
            raise NotFano(f"vertex ({x}, {y}) is not integral")
        verts.append((int(x), int(y)))
    return FanoPolygon(verts)


def normalized_dual_volume(p: FanoPolygon) -> Fraction:
    """Exact rational 2 * area of the dual polygon (the degree of X_P)."""
    verts = dual_polygon(p).vertices
    n = len(verts)
    return sum(
        (cross(verts[i], verts[(i + 1) % n]) for i in range(n)), Fraction(0)
    )


def _integer_inequalities(d: RationalPolygon) -> list[tuple[int, int, int]]:
    """Integer (A, B, C) with D = {p : A*p_x + B*p_y + C >= 0 for all rows}."""
    out = []
    cyc = d.vertices
    n = len(cyc)
    for i in range(n):
        a, b = cyc[i], cyc[(i + 1) % n]
        ax = b[1] - a[1]
        by = b[0] - a[0]
        # inside: cross(b - a, p - a) >= 0, i.e. -dy*x + dx*y + cross(a, b) >= 0
        ca = a[0] * b[1] - a[1] * b[0]
        m = (-ax).denominator
        for q in (by.denominator, ca.denominator):
            m = m * q // gcd(m, q)
        coef = (int(-ax * m), int(by * m), int(ca * m))
        g = gcd(gcd(abs(coef[0]), abs(coef[1])), abs(coef[2]))
        if g > 1:
            coef = (coef[0] // g, coef[1] // g, coef[2] // g)
        out.append(coef)
    return out


def _iceil(num: int, den: int) -> int:
    assert den > 0
    return -((-num) // den)


def _ifloor(num: int, den: int) -> int:
    assert den > 0
    return num // den


def ehrhart_count(d: RationalPolygon, i: int) -> int:
    """|i*D cap Z^2| by brute-force bounding-box scan with exact tests.

    This is deliberately the simplest possible oracle along the spec; see
    ehrhart_count_rows for the faster row-interval path.
    """
    if i < 0:
        raise ValueError("dilation factor must be >= 0")
    if i == 0:
        return 1
    ineqs = _integer_inequalities(d)
    xs = [x * i for x, _ in d.vertices]
    ys = [y * i for _, y in d.vertices]
    x_lo, x_hi = _frac_ceil(min(xs)), _frac_floor(max(xs))
    y_lo, y_hi = _frac_ceil(min(ys)), _frac_floor(max(ys))
    count = 0
    for x in range(x_lo, x_hi + 1):
        for y in range(y_lo, y_hi + 1):
            if all(a * x + b * y + c * i >= 0 for a, b, c in ineqs):
                count += 1
    return count


def ehrhart_count_rows(d: RationalPolygon, i: int) -> int:
    """|i*D cap Z^2| by row-by-row interval counting (independent path)."""
    if i < 0:
        raise ValueError("dilation factor must be >= 0")
    if i == 0:
        return 1
    ineqs = _integer_inequalities(d)
    ys = [y * i for _, y in d.vertices]
    total = 0
    for y in range(_frac_ceil(min(ys)), _frac_floor(max(ys)) + 1):
        lo, hi = None, None
        empty = False
        for a, b, c in ineqs:
            rhs = -(b * y + c * i)
            if a > 0:
                v = _iceil(rhs, a)
                lo = v if lo is None else max(lo, v)
            elif a < 0:
                v = _ifloor(-rhs, -a)
                hi = v if hi is None else min(hi, v)
            elif rhs > 0:
                empty = True
                break
        if not empty and lo is not None and hi is not None and lo <= hi:
            total += hi - lo + 1
    return total


def _frac_ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def _frac_floor(q: Fraction) -> int:
    return q.numerator // q.denominator
