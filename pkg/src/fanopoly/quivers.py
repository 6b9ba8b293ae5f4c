"""Quivers attached to Fano polygons and skew-symmetric matrix mutation."""

from __future__ import annotations

from itertools import permutations
from typing import NamedTuple, Optional

from .lattice import FanoPolygon, cross, edge_data
from .singularities import classify_cone, cone_content


class NoTCones(ValueError):
    """The polygon has no primitive T-cones, hence no quiver."""


class SizeMismatch(ValueError):
    pass


class Quiver(NamedTuple):
    """Skew-symmetric signed arrow-count matrix with vertex labels.

    b[i][j] > 0 means b[i][j] arrows from vertex i to vertex j; labels
    record the polygon edge each T-cone vertex sits on (None for abstract
    quivers).
    """

    b: tuple[tuple[int, ...], ...]
    labels: tuple[Optional[int], ...]

    @property
    def size(self) -> int:
        return len(self.b)

    def to_json_dict(self) -> dict:
        return {"n": self.size, "B": [list(row) for row in self.b]}

    def to_dot(self) -> str:
        lines = ["digraph quiver {"]
        for i in range(self.size):
            label = f"v{i}" if self.labels[i] is None else f"e{self.labels[i]}"
            lines.append(f'  n{i} [label="{label}"];')
        for i in range(self.size):
            for j in range(self.size):
                if self.b[i][j] > 0:
                    lines.append(f'  n{i} -> n{j} [label="{self.b[i][j]}"];')
        lines.append("}")
        return "\n".join(lines)


def make_quiver(matrix, labels=None) -> Quiver:
    b = tuple(tuple(int(x) for x in row) for row in matrix)
    n = len(b)
    if any(len(row) != n for row in b):
        raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(n):
            if b[i][j] != -b[j][i]:
                raise ValueError("matrix must be skew-symmetric")
    if labels is None:
        labels = (None,) * n
    return Quiver(b, tuple(labels))


def quiver_of(p: FanoPolygon) -> Quiver:
    """One vertex per primitive T-cone; arrow counts are determinants of the
    primitive inner normals of the underlying edges."""
    normals = []
    labels = []
    for e in edge_data(p):
        n_e = cone_content(classify_cone(e.tail, e.head)).n
        for _ in range(n_e):
            normals.append(e.normal)
            labels.append(e.index)
    if not normals:
        raise NoTCones("singularity content has n = 0")
    size = len(normals)
    b = tuple(
        tuple(cross(normals[i], normals[j]) for j in range(size))
        for i in range(size)
    )
    return Quiver(b, tuple(labels))


def mutate_quiver(q: Quiver, v: int) -> Quiver:
    """Fomin-Zelevinsky matrix mutation at vertex v."""
    n = q.size
    if not 0 <= v < n:
        raise IndexError(f"vertex {v} out of range")
    b = q.b
    new = [
        [
            -b[i][j]
            if v in (i, j)
            else b[i][j]
            + (abs(b[i][v]) * b[v][j] + b[i][v] * abs(b[v][j])) // 2
            for j in range(n)
        ]
        for i in range(n)
    ]
    return Quiver(tuple(tuple(row) for row in new), q.labels)


def mutate_quiver_surgery(q: Quiver, v: int) -> Quiver:
    """Graph-surgery formulation of quiver mutation (independent of the
    matrix rule): add a composite arrow for every path through v, cancel
    two-cycles, reverse arrows at v."""
    n = q.size
    arrows = {(i, j): max(q.b[i][j], 0) for i in range(n) for j in range(n)}
    composite = {}
    for i in range(n):
        for j in range(n):
            if i == j or v in (i, j):
                continue
            composite[(i, j)] = arrows[(i, v)] * arrows[(v, j)]
    for key, extra in composite.items():
        arrows[key] += extra
    # cancel two-cycles
    for i in range(n):
        for j in range(i + 1, n):
            m = min(arrows[(i, j)], arrows[(j, i)])
            arrows[(i, j)] -= m
            arrows[(j, i)] -= m
    # reverse at v
    for i in range(n):
        if i != v:
            arrows[(i, v)], arrows[(v, i)] = arrows[(v, i)], arrows[(i, v)]
    b = [
        [arrows[(i, j)] - arrows[(j, i)] if i != j else 0 for j in range(n)]
        for i in range(n)
    ]
    return Quiver(tuple(tuple(row) for row in b), q.labels)


def all_even(q: Quiver) -> bool:
    """True iff every signed arrow count is even (a mutation invariant)."""
    return all(x % 2 == 0 for row in q.b for x in row)


def _row_profile(q: Quiver) -> list[tuple]:
    return [tuple(sorted(abs(x) for x in row)) for row in q.b]


def quivers_isomorphic(q1: Quiver, q2: Quiver) -> bool:
    """Existence of a vertex permutation carrying one matrix to the other."""
    if q1.size != q2.size:
        raise SizeMismatch(f"sizes {q1.size} and {q2.size} differ")
    n = q1.size
    p1, p2 = _row_profile(q1), _row_profile(q2)
    if sorted(p1) != sorted(p2):
        return False

    b1, b2 = q1.b, q2.b
    assignment = [-1] * n  # assignment[i] = image of vertex i of q1 in q2
    used = [False] * n

    def backtrack(i: int) -> bool:
        if i == n:
            return True
        for t in range(n):
            if used[t] or p1[i] != p2[t]:
                continue
            ok = True
            for j in range(i):
                if b1[i][j] != b2[t][assignment[j]]:
                    ok = False
                    break
            if ok:
                assignment[i] = t
                used[t] = True
                if backtrack(i + 1):
                    return True
                used[t] = False
                assignment[i] = -1
        return False

    return backtrack(0)


def canonical_quiver_key(q: Quiver) -> tuple:
    """Matrix minimized over vertex permutations (small n only)."""
    n = q.size
    if n > 8:
        # profile-guided backtracking would be needed beyond table scale
        raise SizeMismatch("canonical key supported for n <= 8 only")
    best = None
    for perm in permutations(range(n)):
        mat = tuple(tuple(q.b[perm[i]][perm[j]] for j in range(n)) for i in range(n))
        if best is None or mat < best:
            best = mat
    return best


def quiver_mutation_class(q: Quiver, cap: int = 500) -> Optional[list[tuple]]:
    """All quivers mutation-equivalent to q, as canonical keys, or None if
    the class exceeds the cap (or the size exceeds the canonical-key scale)."""
    try:
        start = canonical_quiver_key(q)
    except SizeMismatch:
        return None
    seen = {start}
    frontier = [start]
    while frontier:
        key = frontier.pop()
        current = Quiver(key, (None,) * len(key))
        for v in range(current.size):
            nxt = canonical_quiver_key(mutate_quiver(current, v))
            if nxt not in seen:
                if len(seen) >= cap:
                    return None
                seen.add(nxt)
                frontier.append(nxt)
    return sorted(seen)


def quiver_commutes_check(p: FanoPolygon, vertex: int) -> bool:
    """Polygon mutation at the edge owning the T-cone vertex induces quiver
    mutation at that vertex."""
    from .mutations import mutate

    qp = quiver_of(p)
    edge_index = qp.labels[vertex]
    q_poly = quiver_of(mutate(p, edge_index))
    q_matrix = mutate_quiver(qp, vertex)
    return quivers_isomorphic(q_poly, q_matrix)
