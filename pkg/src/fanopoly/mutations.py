"""Mutation of Fano polygons, orbit exploration, minimality, minimization,
and the normal-vector sublattice invariant.

The production mutation path works on the dual side (dualize, apply the
piecewise-unimodular shear, dualize back) because it is choice-free; the
slice-by-slice construction in the original lattice is kept as an
independent oracle for the test suite.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import NamedTuple, Optional, Sequence

from .lattice import (
    FanoPolygon,
    RationalPolygon,
    UnimodularMap,
    Vec2,
    boundary_point_count,
    convex_hull,
    cross,
    dot,
    dual_back,
    dual_polygon,
    edge_data,
    extended_gcd,
    normalized_dual_volume,
    rational_to_fano,
)
from .singularities import (
    classify_cone,
    cone_content,
    singularity_content,
)


class NoMutation(ValueError):
    """The requested edge does not admit a mutation (width < height)."""


class MutationSpec(NamedTuple):
    """Data of one admissible mutation: grading w, factor direction, heights."""

    w: Vec2
    v_e: Vec2
    h_min: int
    h_max: int


def _factor_direction(w: Vec2) -> Vec2:
    # rotate w by +90 degrees; primitive because w is
    return (-w[1], w[0])


def mutation_exists(p: FanoPolygon, edge_index: int) -> bool:
    """True iff the edge's width is at least its height."""
    e = edge_data(p)[edge_index]
    return e.width >= e.height


def mutation_spec(p: FanoPolygon, edge_index: int) -> MutationSpec:
    e = edge_data(p)[edge_index]
    if e.width < e.height:
        raise NoMutation(
            f"edge {edge_index} has width {e.width} < height {e.height}"
        )
    h_max = max(dot(e.normal, v) for v in p.vertices)
    return MutationSpec(e.normal, _factor_direction(e.normal), -e.height, h_max)


def mutate_dual(pdual: RationalPolygon, w: Vec2, v_e: Vec2) -> RationalPolygon:
    """Image of the dual polygon under u -> u - min(0, u(v_e)) * w.

    The map is linear on each side of the line spanned by w, so the image
    is the hull of the mapped vertices together with the boundary points on
    the bending line.
    """
    if gcd(w[0], w[1]) != 1:
        raise ValueError("w must be primitive")
    if dot(w, v_e) != 0:
        raise ValueError("v_e must satisfy w(v_e) = 0")
    pts = []
    verts = pdual.vertices
    n = len(verts)
    for i in range(n):
        u = verts[i]
        s = u[0] * v_e[0] + u[1] * v_e[1]
        if s >= 0:
            pts.append(u)
        else:
            pts.append((u[0] - s * w[0], u[1] - s * w[1]))
        # crossing of edge (u, next) with the line u(v_e) = 0
        v = verts[(i + 1) % n]
        sv = v[0] * v_e[0] + v[1] * v_e[1]
        if (s > 0 > sv) or (s < 0 < sv):
            t = Fraction(s, s - sv)
            pts.append((u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])))
    return RationalPolygon(convex_hull(pts), _validated=True)


def mutate(p: FanoPolygon, edge_index: int) -> FanoPolygon:
    """Mutation of P at the given edge, as a raw polygon in the same lattice.

    The result is not canonicalized so that dual_polygon(mutate(P)) equals
    mutate_dual(dual_polygon(P)) exactly; orbit-level code deduplicates by
    canonical form.
    """
    spec = mutation_spec(p, edge_index)
    q_dual = mutate_dual(dual_polygon(p), spec.w, spec.v_e)
    return rational_to_fano(dual_back(q_dual))


def edge_index_for_normal(p: FanoPolygon, w: Vec2) -> int:
    for e in edge_data(p):
        if e.normal == tuple(w):
            return e.index
    raise ValueError(f"no edge of {p} has inner normal {w}")


def mutate_at_normal(p: FanoPolygon, w: Vec2) -> FanoPolygon:
    return mutate(p, edge_index_for_normal(p, w))


def mutate_n_side(p: FanoPolygon, edge_index: int) -> FanoPolygon:
    """Slice-by-slice mutation in the original lattice (test oracle).

    Change basis so the grading is by -y and the factor is horizontal, take
    G_h = [a_h, b_h - |h|] on each negative-height row, rebuild, and map
    back.
    """
    spec = mutation_spec(p, edge_index)
    w, v_e = spec.w, spec.v_e
    # basis with columns v_e and -z where w(z) = 1: maps v_e -> (1,0) and
    # makes w the grading (0,-1)
    g, xw, yw = extended_gcd(w[0], w[1])
    z = (xw, yw)  # w(z) = 1
    to_frame = UnimodularMap(v_e[0], -z[0], v_e[1], -z[1]).inverse()
    frame_verts = [to_frame.apply(v) for v in p.vertices]
    assert all(
        -y == dot(w, v) for (x, y), v in zip(frame_verts, p.vertices)
    ), "frame change must turn w into the -y grading"

    rows = _row_intervals(frame_verts)
    points = []
    for y, (lo, hi) in rows.items():
        h = -y
        if h < 0:
            # Minkowski summand: shrink by |h| on the right
            if any(v[1] == y for v in frame_verts) or hi - abs(h) >= lo:
                assert hi - abs(h) >= lo, "admissible mutation must fit"
                points.append((lo, y))
                points.append((hi - abs(h), y))
        else:
            points.append((lo, y))
            points.append((hi + h, y))
    hull = convex_hull(points)
    back = to_frame.inverse()
    return FanoPolygon([back.apply(v) for v in hull])


def _row_intervals(verts: Sequence[Vec2]) -> dict[int, tuple[int, int]]:
    """Integer x-interval of each lattice row of the polygon, omitting rows
    with no lattice points."""
    n = len(verts)
    ys = [v[1] for v in verts]
    out = {}
    for y in range(min(ys), max(ys) + 1):
        lo_hi = _row_bounds(verts, y)
        if lo_hi is not None:
            lo, hi = lo_hi
            if lo <= hi:
                out[y] = (lo, hi)
    return out


def _row_bounds(verts: Sequence[Vec2], y: int) -> Optional[tuple[int, int]]:
    lo = None
    hi = None
    n = len(verts)
    found = False
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        y0, y1 = a[1], b[1]
        if y0 == y1:
            if y0 == y:
                xs = sorted((a[0], b[0]))
                lo = xs[0] if lo is None else min(lo, xs[0])
                hi = xs[1] if hi is None else max(hi, xs[1])
                found = True
            continue
        if min(y0, y1) <= y <= max(y0, y1):
            x = Fraction(a[0] * (b[1] - y) + b[0] * (y - a[1]), b[1] - a[1])
            lo = x if lo is None else min(lo, x)
            hi = x if hi is None else max(hi, x)
            found = True
    if not found:
        return None
    lo_i = -((-lo.numerator) // lo.denominator) if isinstance(lo, Fraction) else lo
    hi_i = hi.numerator // hi.denominator if isinstance(hi, Fraction) else hi
    return lo_i, hi_i


# -- neighbours and orbits ----------------------------------------------------


def neighbors(p: FanoPolygon) -> list[tuple[FanoPolygon, list[Vec2]]]:
    """One canonical neighbour per admissible edge, deduplicated.

    Each neighbour keeps every inner normal w (in the coordinates of P)
    that realizes it.
    """
    found: dict[tuple, tuple[FanoPolygon, list[Vec2]]] = {}
    for e in edge_data(p):
        if e.width < e.height:
            continue
        q = mutate(p, e.index).canonical()[0]
        key = q.vertices
        if key in found:
            found[key][1].append(e.normal)
        else:
            found[key] = (q, [e.normal])
    return [
        (q, sorted(ws)) for key, (q, ws) in sorted(found.items())
    ]


class MutationGraph(NamedTuple):
    """Deduplicated mutation graph: canonical nodes, labelled edges."""

    nodes: tuple[FanoPolygon, ...]
    edges: tuple[tuple[int, int, Vec2], ...]  # (i, j, w discovered from node i)
    truncated: bool

    def to_json_dict(self) -> dict:
        return {
            "nodes": [list(map(list, p.vertices)) for p in self.nodes],
            "edges": [
                {"a": i, "b": j, "w": list(w)} for i, j, w in self.edges
            ],
            "truncated": self.truncated,
        }

    def to_dot(self) -> str:
        lines = ["graph mutations {"]
        for i, p in enumerate(self.nodes):
            label = ";".join(f"{x},{y}" for x, y in p.vertices)
            lines.append(f'  n{i} [label="{label}"];')
        for i, j, w in self.edges:
            lines.append(f'  n{i} -- n{j} [label="{w[0]},{w[1]}"];')
        lines.append("}")
        return "\n".join(lines)


class OrbitInvariantViolation(AssertionError):
    """A node reached by mutation fails to share the mutation invariants."""


def orbit(
    p: FanoPolygon, max_nodes: int = 10000, max_boundary: Optional[int] = None
) -> MutationGraph:
    """Breadth-first closure of `neighbors` under canonical-form dedup.

    Polygons with more than max_boundary boundary points are pruned (and
    the graph marked truncated); likewise when max_nodes is reached. Every
    inserted node is checked to share singularity content, dual volume and
    sublattice divisors with the root.
    """
    if max_nodes <= 0:
        raise ValueError("max_nodes must be positive")
    root = p.canonical()[0]
    if max_boundary is None:
        max_boundary = boundary_point_count(root) + 10
    ref = (
        singularity_content(root).basket_multiset(),
        singularity_content(root).n,
        normalized_dual_volume(root),
        t_sublattice_invariant(root),
    )
    index = {root.vertices: 0}
    nodes = [root]
    edges = set()
    truncated = False
    frontier = [root]
    while frontier:
        next_frontier = []
        for node in frontier:
            i = index[node.vertices]
            for q, ws in neighbors(node):
                if boundary_point_count(q) > max_boundary:
                    truncated = True
                    continue
                j = index.get(q.vertices)
                if j is None:
                    if len(nodes) >= max_nodes:
                        truncated = True
                        continue
                    content = singularity_content(q)
                    got = (
                        content.basket_multiset(),
                        content.n,
                        normalized_dual_volume(q),
                        t_sublattice_invariant(q),
                    )
                    if got != ref:
                        raise OrbitInvariantViolation(
                            f"{q} does not share invariants with {root}"
                        )
                    j = len(nodes)
                    index[q.vertices] = j
                    nodes.append(q)
                    next_frontier.append(q)
                a, b = min(i, j), max(i, j)
                edges.add((a, b, ws[0]))
        frontier = sorted(next_frontier, key=lambda q: q.vertices)
    order = sorted(range(len(nodes)), key=lambda i: nodes[i].vertices)
    rank = {old: new for new, old in enumerate(order)}
    nodes_sorted = tuple(nodes[i] for i in order)
    edges_sorted = tuple(
        sorted(
            (min(rank[a], rank[b]), max(rank[a], rank[b]), w)
            for a, b, w in edges
        )
    )
    return MutationGraph(nodes_sorted, edges_sorted, truncated)


# -- minimality ----------------------------------------------------------------


def is_minimal(p: FanoPolygon) -> bool:
    """Height criterion: every admissible edge has h_max >= its height."""
    for e in edge_data(p):
        if e.width >= e.height:
            h_max = max(dot(e.normal, v) for v in p.vertices)
            if h_max < e.height:
                return False
    return True


def minimize(p: FanoPolygon) -> FanoPolygon:
    """Greedy boundary-count descent to a minimal mutation-equivalent form."""
    current = p.canonical()[0]
    current_count = boundary_point_count(current)
    while True:
        best = None
        for q, _ in neighbors(current):
            c = boundary_point_count(q)
            if c < current_count and (
                best is None or (c, q.vertices) < (best[0], best[1].vertices)
            ):
                best = (c, q)
        if best is None:
            return current
        current_count, current = best


# -- normal-vector sublattice ---------------------------------------------------


class SublatticeInvariant(NamedTuple):
    """Elementary divisors (d1, d2) of the T-cone normal sublattice of M.

    d2 = 0 encodes rank one; (0, 0) the degenerate empty generating set.
    """

    d1: int
    d2: int


def t_sublattice_invariant(p: FanoPolygon) -> SublatticeInvariant:
    """Divisors of the sublattice spanned by normals of T-cone-bearing edges.

    Only edges contributing at least one primitive T-cone generate, which is
    the reading forced by the rank-one triangle example; see the ledger.
    """
    gens = []
    for e in edge_data(p):
        if cone_content(classify_cone(e.tail, e.head)).n >= 1:
            gens.append(e.normal)
    if not gens:
        return SublatticeInvariant(0, 0)
    d1 = 0
    for w in gens:
        d1 = gcd(d1, gcd(w[0], w[1]))
    minor_gcd = 0
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            minor_gcd = gcd(minor_gcd, cross(gens[i], gens[j]))
    if minor_gcd == 0:
        return SublatticeInvariant(d1, 0)
    return SublatticeInvariant(d1, abs(minor_gcd) // d1)
