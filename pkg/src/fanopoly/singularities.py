"""Cyclic quotient singularities of edge cones and the invariants built on
them: singularity content, degree contributions, and the anticanonical
Hilbert series window.

A two-dimensional cyclic quotient singularity 1/R(a, b) is stored through
the triple (r, k, c): r the Gorenstein index, k the width, c the residue
parameter, so that the germ is 1/(kr)(1, kc - 1). Germs are canonicalized
at construction (the two presentations 1/R(1, x) and 1/R(1, x^-1) describe
the same singularity), which makes equality, hashing and basket comparison
well defined.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import NamedTuple, Optional, Sequence

from .lattice import (
    FanoPolygon,
    Vec2,
    cross,
    dual_polygon,
    edge_data,
    ehrhart_count_rows,
    extended_gcd,
    normalized_dual_volume,
)


class DegenerateCone(ValueError):
    """Cone generators are parallel or zero."""


class BadInput(ValueError):
    """Malformed singularity or continued-fraction data."""


class InconsistentHilbert(ArithmeticError):
    """The Dedekind-sum series disagrees with the Ehrhart oracle.

    This is a hard internal failure: it means a delta rationalization went
    wrong, never a property of the input polygon.
    """


class CyclicQuotientSingularity:
    """The germ 1/(kr)(1, kc - 1), canonicalized.

    r is the Gorenstein index, k the width, and c the parameter with
    gcd(r, c) = 1; of the two weight presentations of the germ the one
    with the smaller (r, k, c) is stored.
    """

    __slots__ = ("r", "k", "c")

    def __init__(self, r: int, k: int, c: int):
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "c", c)

    def __setattr__(self, name, value):
        raise AttributeError("CyclicQuotientSingularity is immutable")

    @staticmethod
    def from_weights(order: int, a: int, b: int) -> "CyclicQuotientSingularity":
        """The singularity 1/order(a, b); both weights must be units mod order."""
        if order < 1:
            raise BadInput("group order must be positive")
        if order == 1:
            return CyclicQuotientSingularity(1, 1, 1)
        a %= order
        b %= order
        if gcd(a, order) != 1 or gcd(b, order) != 1:
            raise BadInput(f"1/{order}({a},{b}) is not well formed")
        x1 = b * pow(a, -1, order) % order
        x2 = a * pow(b, -1, order) % order
        x = min(x1, x2)
        k = gcd(order, 1 + x)
        r = order // k
        c = ((1 + x) // k) % r if r > 1 else 1
        return CyclicQuotientSingularity(r, k, c)

    @staticmethod
    def from_cone(rho0: Vec2, rho1: Vec2) -> "CyclicQuotientSingularity":
        return classify_cone(rho0, rho1)

    @staticmethod
    def parse(text: str) -> "CyclicQuotientSingularity":
        """Parse the text form "1/R(a,b)"."""
        try:
            head, rest = text.split("(", 1)
            order = int(head.strip().removeprefix("1/"))
            a, b = (int(t) for t in rest.rstrip(")").split(","))
        except (ValueError, IndexError) as exc:
            raise BadInput(f"cannot parse singularity {text!r}") from exc
        return CyclicQuotientSingularity.from_weights(order, a, b)

    @property
    def order(self) -> int:
        """The group order R = k*r."""
        return self.k * self.r

    @property
    def weight(self) -> int:
        """The second weight kc - 1 of the presentation 1/R(1, kc - 1)."""
        return self.k * self.c - 1

    def rkc(self) -> tuple[int, int, int]:
        return (self.r, self.k, self.c)

    def __eq__(self, other):
        return (
            isinstance(other, CyclicQuotientSingularity)
            and self.rkc() == other.rkc()
        )

    def __hash__(self):
        return hash(self.rkc())

    def __lt__(self, other):
        return self.rkc() < other.rkc()

    def __str__(self):
        return f"1/{self.order}(1,{self.weight})"

    def __repr__(self):
        return f"CyclicQuotientSingularity(r={self.r}, k={self.k}, c={self.c})"


def classify_cone(rho0: Vec2, rho1: Vec2) -> CyclicQuotientSingularity:
    """Quotient singularity of the cone spanned by two primitive rays.

    The height of the segment rho0-rho1 equals r and its width equals k;
    both are recomputed from the geometry and asserted against the modular
    arithmetic as an internal cross-check.
    """
    if gcd(rho0[0], rho0[1]) != 1 or gcd(rho1[0], rho1[1]) != 1:
        raise DegenerateCone("cone generators must be primitive")
    det = cross(rho0, rho1)
    if det == 0:
        raise DegenerateCone("cone generators are parallel")
    if det < 0:
        rho0, rho1 = rho1, rho0
        det = -det
    if det == 1:
        return CyclicQuotientSingularity(1, 1, 1)
    # complete rho0 to a basis (rho0, s); then rho1 = u*rho0 + det*s
    g, x, y = extended_gcd(rho0[0], rho0[1])
    s = (-y, x)
    u = cross(rho1, s)
    weight = pow(-u, -1, det)
    sigma = CyclicQuotientSingularity.from_weights(det, 1, weight)
    d = (rho1[0] - rho0[0], rho1[1] - rho0[1])
    k_geom = gcd(d[0], d[1])
    assert sigma.k == k_geom and sigma.r * k_geom == det
    return sigma


def is_T(sigma: CyclicQuotientSingularity) -> bool:
    return sigma.k % sigma.r == 0


def is_primitive_T(sigma: CyclicQuotientSingularity) -> bool:
    return sigma.k == sigma.r


def is_residual(sigma: CyclicQuotientSingularity) -> bool:
    return sigma.k < sigma.r


class ConeContent(NamedTuple):
    """Primitive T-cone count and residue of a single cone."""

    n: int
    residue: Optional[CyclicQuotientSingularity]


def cone_content(sigma: CyclicQuotientSingularity) -> ConeContent:
    """Decompose k = n*r + k0; residue is 1/(k0*r)(1, k0*c - 1) if k0 > 0."""
    n, k0 = divmod(sigma.k, sigma.r)
    if k0 == 0:
        return ConeContent(n, None)
    res = CyclicQuotientSingularity.from_weights(k0 * sigma.r, 1, k0 * sigma.c - 1)
    return ConeContent(n, res)


class SingularityContent(NamedTuple):
    """Total primitive T-cone count and cyclically ordered residual basket."""

    n: int
    basket: tuple[CyclicQuotientSingularity, ...]

    def basket_multiset(self) -> tuple:
        return tuple(sorted(s.rkc() for s in self.basket))

    def __str__(self):
        inner = ",".join(str(s) for s in self.basket)
        return f"({self.n},{{{inner}}})"


def singularity_content(p: FanoPolygon) -> SingularityContent:
    """Sum of per-edge contents; basket keeps the cyclic edge order."""
    n = 0
    basket = []
    for e in edge_data(p):
        cc = cone_content(classify_cone(e.tail, e.head))
        n += cc.n
        if cc.residue is not None:
            basket.append(cc.residue)
    return SingularityContent(n, tuple(basket))


def baskets_equal_as_multisets(b1: Sequence, b2: Sequence) -> bool:
    return sorted(s.rkc() for s in b1) == sorted(s.rkc() for s in b2)


def baskets_equal_cyclically(b1: Sequence, b2: Sequence) -> bool:
    """Equality as cyclic sequences, up to rotation and reflection."""
    s1 = [s.rkc() for s in b1]
    s2 = [s.rkc() for s in b2]
    if len(s1) != len(s2):
        return False
    if not s1:
        return True
    for cand in (s2, s2[::-1]):
        for shift in range(len(cand)):
            if s1 == cand[shift:] + cand[:shift]:
                return True
    return False


# -- Hirzebruch-Jung data -----------------------------------------------------


class HJExpansion(NamedTuple):
    coefficients: tuple[int, ...]
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    discrepancies: tuple[Fraction, ...]


def hj_expand(p: int, q: int) -> HJExpansion:
    """Continued fraction p/q = b1 - 1/(b2 - 1/(...)), all b_i >= 2,
    together with the companion sequences and discrepancies."""
    if not (0 < q < p) or gcd(p, q) != 1:
        raise BadInput(f"need 0 < q < p coprime, got p={p}, q={q}")
    coeffs = []
    num, den = p, q
    while den:
        b = -(-num // den)  # ceil
        coeffs.append(b)
        num, den = den, b * den - num
    s = len(coeffs)
    alpha = [1] * s
    for i in range(1, s):
        alpha[i] = coeffs[i - 1] * alpha[i - 1] - (alpha[i - 2] if i >= 2 else 0)
    beta = [1] * s
    for i in range(s - 2, -1, -1):
        beta[i] = coeffs[i + 1] * beta[i + 1] - (beta[i + 2] if i <= s - 3 else 0)
    # continuant identities pin both ends of the recursion
    assert (coeffs[-1] * alpha[-1] - (alpha[-2] if s > 1 else 0)) == p
    assert beta[0] == q
    disc = tuple(Fraction(a + b, p) - 1 for a, b in zip(alpha, beta))
    return HJExpansion(tuple(coeffs), tuple(alpha), tuple(beta), disc)


def degree_contribution(sigma: CyclicQuotientSingularity) -> Fraction:
    """Contribution A of a singularity to the anticanonical degree."""
    order = sigma.order
    if order == 1:
        return Fraction(1)
    hj = hj_expand(order, sigma.weight)
    d = hj.discrepancies
    s = len(hj.coefficients)
    total = Fraction(s + 1)
    total -= sum((d[i] * d[i] * hj.coefficients[i] for i in range(s)), Fraction(0))
    total += 2 * sum((d[i] * d[i + 1] for i in range(s - 1)), Fraction(0))
    return total


# -- Riemann-Roch corrections -------------------------------------------------


class SeriesWindow(NamedTuple):
    """Exact power-series coefficients c_0..c_D."""

    degree_bound: int
    coefficients: tuple[Fraction, ...]


@lru_cache(maxsize=None)
def _delta_table(order: int, a: int) -> tuple[Fraction, ...]:
    """delta_j for j = 0..order-1, rationalized from a 260-bit evaluation.

    delta_j = (1/R) * sum over nontrivial R-th roots eps of
    eps^j / ((1 - eps)(1 - eps^(a-1))). The values are rational; they are
    recovered with denominator bound 12*R^2 and sanity-checked exactly.
    """
    import mpmath

    scale = 1 << 200
    with mpmath.workprec(260):
        roots = [
            mpmath.e ** (2j * mpmath.pi * t / order) for t in range(1, order)
        ]
        factors = [1 / ((1 - eps) * (1 - eps ** (a - 1))) for eps in roots]
        deltas = []
        for j in range(order):
            val = mpmath.fsum(eps**j * f for eps, f in zip(roots, factors)) / order
            assert abs(mpmath.im(val)) < mpmath.mpf(2) ** -80
            approx = Fraction(int(mpmath.nint(mpmath.re(val) * scale)), scale)
            deltas.append(approx.limit_denominator(12 * order * order))
    # the full sum over j telescopes to zero exactly
    if sum(deltas, Fraction(0)) != 0:
        raise InconsistentHilbert(f"delta table for 1/{order}(1,{a - 1}) is bad")
    return tuple(deltas)


def rr_numerator(sigma: CyclicQuotientSingularity) -> tuple[Fraction, ...]:
    """Coefficients of (1 - t^R) * Q_sigma, a polynomial of degree R - 2."""
    order = sigma.order
    a = sigma.weight + 1
    deltas = _delta_table(order, a)
    return tuple(deltas[a * i % order] - deltas[0] for i in range(1, order))


def rr_contribution(sigma: CyclicQuotientSingularity, degree_bound: int) -> SeriesWindow:
    """Window of Q_sigma = rr_numerator / (1 - t^R) up to t^degree_bound."""
    if degree_bound < 0:
        raise BadInput("degree bound must be >= 0")
    num = rr_numerator(sigma)
    order = sigma.order
    coeffs = []
    for i in range(degree_bound + 1):
        m = i % order
        coeffs.append(num[m] if m < len(num) else Fraction(0))
    return SeriesWindow(degree_bound, tuple(coeffs))


# -- degree and Hilbert series ------------------------------------------------


def degree(p: FanoPolygon) -> Fraction:
    """Anticanonical self-intersection 12 - n - sum of basket contributions."""
    content = singularity_content(p)
    total = Fraction(12 - content.n)
    for sigma in content.basket:
        total -= degree_contribution(sigma)
    return total


def hilbert_window(p: FanoPolygon, degree_bound: int) -> SeriesWindow:
    """Coefficients 0..D of the anticanonical Hilbert series of X_P.

    Every window is verified coefficient-by-coefficient against exact
    lattice-point counts of the dual polygon; a mismatch raises
    InconsistentHilbert (hard failure, per the delta rationalization
    contract).
    """
    if degree_bound < 0:
        raise BadInput("degree bound must be >= 0")
    content = singularity_content(p)
    deg = Fraction(12 - content.n) - sum(
        (degree_contribution(s) for s in content.basket), Fraction(0)
    )
    numerators = [(rr_numerator(s), s.order) for s in content.basket]
    coeffs = []
    for i in range(degree_bound + 1):
        c = Fraction(i * (i + 1), 2) * deg + 1
        for num, order in numerators:
            m = i % order
            if m < len(num):
                c += num[m]
        coeffs.append(c)
    dual = dual_polygon(p)
    for i, c in enumerate(coeffs):
        expected = ehrhart_count_rows(dual, i)
        if c != expected:
            raise InconsistentHilbert(
                f"coefficient {i}: series gives {c}, lattice count gives {expected}"
            )
    return SeriesWindow(degree_bound, tuple(coeffs))


def residual_point_count(p: FanoPolygon) -> int:
    """Lattice points of P lying strictly inside residual cones."""
    total = 0
    for sigma in singularity_content(p).basket:
        k0, r = sigma.k, sigma.r
        total += k0 * (r - 1) // 2 + k0 - 1
    return total


# -- triangle weights ---------------------------------------------------------


class NotTriangle(ValueError):
    pass


def triangle_weights(p: FanoPolygon) -> tuple[tuple[int, int, int], int]:
    """Pairwise-coprime positive weights (in vertex order) and multiplicity.

    The weights satisfy l0*v0 + l1*v1 + l2*v2 = 0; the multiplicity is the
    index of the vertex-generated sublattice, so X_P is the quotient of
    P(l0, l1, l2) by a group of that order.
    """
    if len(p.vertices) != 3:
        raise NotTriangle(f"polygon has {len(p.vertices)} vertices")
    v0, v1, v2 = p.vertices
    raw = (cross(v1, v2), cross(v2, v0), cross(v0, v1))
    g = gcd(gcd(raw[0], raw[1]), raw[2])
    weights = (raw[0] // g, raw[1] // g, raw[2] // g)
    assert (
        sum(weights[i] * p.vertices[i][0] for i in range(3)) == 0
        and sum(weights[i] * p.vertices[i][1] for i in range(3)) == 0
    )
    return weights, g


def check_degree_identity(p: FanoPolygon) -> bool:
    """degree(P) == normalized dual volume, exactly."""
    return degree(p) == normalized_dual_volume(p)
