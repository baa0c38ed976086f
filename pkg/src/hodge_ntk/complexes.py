"""Oriented simplicial complexes of dimension <= 2 and their boundary matrices.

Orientation follows the increasing-index convention: edges are stored as
(i, j) with i < j and triangles as (i, j, k) with i < j < k, with
alternating face signs in the boundary operators. Under this convention
B1 @ B2 = 0 holds exactly in integer arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ClosureViolation, FormatError, IndexOutOfRange, TooSmall
from .rng import as_rng

Edge = tuple[int, int]
Triangle = tuple[int, int, int]


@dataclass(frozen=True)
class SimplicialComplex:
    """A complex on vertices 0..n_vertices-1 with canonically sorted simplices."""

    n_vertices: int
    edges: tuple[Edge, ...]
    triangles: tuple[Triangle, ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def skeleton(self) -> "SimplicialComplex":
        """The same complex with all triangles removed."""
        return SimplicialComplex(self.n_vertices, self.edges, ())


@dataclass(frozen=True)
class BoundaryMatrices:
    """Signed incidence matrices. b1 is |V| x |E|, b2 is |E| x |T|, integer."""

    b1: np.ndarray
    b2: np.ndarray


def _check_vertex(v: int, n_vertices: int) -> int:
    v = int(v)
    if not 0 <= v < n_vertices:
        raise IndexOutOfRange(f"vertex {v} not in [0, {n_vertices})")
    return v


def _canonical_edge(e: Sequence[int], n_vertices: int) -> Edge:
    if len(e) != 2:
        raise ValueError(f"an edge needs exactly 2 vertices, got {tuple(e)}")
    i, j = (_check_vertex(v, n_vertices) for v in e)
    if i == j:
        raise ValueError(f"degenerate edge ({i}, {j})")
    return (i, j) if i < j else (j, i)


def _canonical_triangle(t: Sequence[int], n_vertices: int) -> Triangle:
    if len(t) != 3:
        raise ValueError(f"a triangle needs exactly 3 vertices, got {tuple(t)}")
    verts = sorted(_check_vertex(v, n_vertices) for v in t)
    if verts[0] == verts[1] or verts[1] == verts[2]:
        raise ValueError(f"degenerate triangle {tuple(t)}")
    return (verts[0], verts[1], verts[2])


def triangle_faces(t: Triangle) -> tuple[Edge, Edge, Edge]:
    i, j, k = t
    return (i, j), (i, k), (j, k)


def new_complex(
    n_vertices: int,
    edges: Iterable[Sequence[int]],
    triangles: Iterable[Sequence[int]] = (),
) -> SimplicialComplex:
    """Build a validated complex: canonical order, deduplication, closure.

    Raises ClosureViolation when a triangle's face edge is missing and
    IndexOutOfRange for vertex indices outside [0, n_vertices).
    """
    if n_vertices < 0:
        raise IndexOutOfRange(f"n_vertices must be nonnegative, got {n_vertices}")
    canon_edges = tuple(sorted({_canonical_edge(e, n_vertices) for e in edges}))
    canon_tris = tuple(sorted({_canonical_triangle(t, n_vertices) for t in triangles}))
    edge_set = set(canon_edges)
    for t in canon_tris:
        for face in triangle_faces(t):
            if face not in edge_set:
                raise ClosureViolation(f"triangle {t} is missing face edge {face}")
    return SimplicialComplex(n_vertices, canon_edges, canon_tris)


def boundary_matrices(sc: SimplicialComplex) -> BoundaryMatrices:
    """B1[v, e] = -1 at the smaller endpoint, +1 at the larger.

    For a triangle (i, j, k) the column of B2 is +1 on face (j, k),
    -1 on face (i, k) and +1 on face (i, j).
    """
    b1 = np.zeros((sc.n_vertices, sc.n_edges), dtype=np.int64)
    for e, (i, j) in enumerate(sc.edges):
        b1[i, e] = -1
        b1[j, e] = 1
    b2 = np.zeros((sc.n_edges, sc.n_triangles), dtype=np.int64)
    idx = sc.edge_index()
    for t, (i, j, k) in enumerate(sc.triangles):
        b2[idx[(j, k)], t] = 1
        b2[idx[(i, k)], t] = -1
        b2[idx[(i, j)], t] = 1
    return BoundaryMatrices(b1=b1, b2=b2)


def three_cliques(sc: SimplicialComplex) -> tuple[Triangle, ...]:
    """All 3-cliques of the 1-skeleton in lexicographic order."""
    adjacency: dict[int, set[int]] = {v: set() for v in range(sc.n_vertices)}
    for i, j in sc.edges:
        adjacency[i].add(j)
        adjacency[j].add(i)
    cliques = []
    for i, j in sc.edges:
        for k in sorted(adjacency[i] & adjacency[j]):
            if k > j:
                cliques.append((i, j, k))
    return tuple(sorted(cliques))


def cycle_chord_skeleton(n: int) -> tuple[SimplicialComplex, tuple[Triangle, ...]]:
    """Cycle edges (i, i+1) plus second-neighbor chords (i, i+2), mod n.

    Returns the triangle-free skeleton and the n candidate triples
    {i, i+1, i+2} mod n in canonical order. Requires n >= 5.
    """
    if n < 5:
        raise TooSmall(f"cycle-chord skeleton needs n >= 5, got {n}")
    edges = {_canonical_edge((i, (i + 1) % n), n) for i in range(n)}
    edges |= {_canonical_edge((i, (i + 2) % n), n) for i in range(n)}
    candidates = tuple(
        sorted(_canonical_triangle((i, (i + 1) % n, (i + 2) % n), n) for i in range(n))
    )
    return new_complex(n, edges), candidates


def fill_candidates(
    skeleton: SimplicialComplex,
    candidates: Sequence[Triangle],
    q: float,
    seed: int | np.random.Generator,
) -> SimplicialComplex:
    """Fill each candidate triangle independently with probability q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be a probability, got {q}")
    rng = as_rng(seed)
    draws = rng.random(len(candidates))
    chosen = tuple(c for c, u in zip(candidates, draws) if u < q)
    return new_complex(skeleton.n_vertices, skeleton.edges, skeleton.triangles + chosen)


def er_clique_complex(
    n: int, p: float, q: float, seed: int | np.random.Generator
) -> SimplicialComplex:
    """Erdos-Renyi 1-skeleton G(n, p); each 3-clique filled with probability q."""
    for name, val in (("p", p), ("q", q)):
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"{name} must be a probability, got {val}")
    rng = as_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    edge_draws = rng.random(len(pairs))
    edges = tuple(e for e, u in zip(pairs, edge_draws) if u < p)
    skeleton = new_complex(n, edges)
    candidates = three_cliques(skeleton)
    tri_draws = rng.random(len(candidates))
    triangles = tuple(t for t, u in zip(candidates, tri_draws) if u < q)
    return new_complex(n, edges, triangles)


def flip_triangles(
    sc: SimplicialComplex, eps: float, seed: int | np.random.Generator
) -> SimplicialComplex:
    """Toggle filled/unfilled status of each 3-clique with probability eps.

    The candidate set is every 3-clique of the 1-skeleton; edges and
    vertices are never altered.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be a probability, got {eps}")
    rng = as_rng(seed)
    candidates = three_cliques(sc)
    draws = rng.random(len(candidates))
    current = set(sc.triangles)
    flipped = {c for c, u in zip(candidates, draws) if u < eps}
    triangles = tuple(sorted(current.symmetric_difference(flipped)))
    return new_complex(sc.n_vertices, sc.edges, triangles)


def b2_on_candidates(sc: SimplicialComplex, candidates: Sequence[Triangle]) -> np.ndarray:
    """B2 represented over a fixed candidate-triangle set.

    Columns follow the candidate order; unfilled candidates give zero
    columns. Lets two complexes on the same skeleton be compared through
    boundary matrices of equal shape.
    """
    idx = sc.edge_index()
    filled = set(sc.triangles)
    b2 = np.zeros((sc.n_edges, len(candidates)), dtype=np.int64)
    for c, t in enumerate(candidates):
        if t not in filled:
            continue
        i, j, k = t
        b2[idx[(j, k)], c] = 1
        b2[idx[(i, k)], c] = -1
        b2[idx[(i, j)], c] = 1
    return b2


# -- plain-text serialization -------------------------------------------------
#
# Line format: "n <n_vertices>", then "e i j" per edge and "t i j k" per
# triangle. Whitespace separated, "#" starts a comment.


def dumps_complex(sc: SimplicialComplex) -> str:
    lines = [f"n {sc.n_vertices}"]
    lines += [f"e {i} {j}" for i, j in sc.edges]
    lines += [f"t {i} {j} {k}" for i, j, k in sc.triangles]
    return "\n".join(lines) + "\n"


def loads_complex(text: str) -> SimplicialComplex:
    n_vertices = None
    edges: list[Edge] = []
    triangles: list[Triangle] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        try:
            values = [int(a) for a in args]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: non-integer field in {raw!r}") from exc
        if kind == "n":
            if n_vertices is not None or len(values) != 1:
                raise FormatError(f"line {lineno}: expected a single 'n <count>' header")
            n_vertices = values[0]
        elif kind == "e":
            if len(values) != 2:
                raise FormatError(f"line {lineno}: 'e' takes two vertex ids")
            edges.append((values[0], values[1]))
        elif kind == "t":
            if len(values) != 3:
                raise FormatError(f"line {lineno}: 't' takes three vertex ids")
            triangles.append((values[0], values[1], values[2]))
        else:
            raise FormatError(f"line {lineno}: unknown record type {kind!r}")
        if n_vertices is None:
            raise FormatError(f"line {lineno}: 'n <count>' must come first")
    if n_vertices is None:
        raise FormatError("empty complex file: missing 'n <count>' header")
    return new_complex(n_vertices, edges, triangles)


def save_complex(sc: SimplicialComplex, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_complex(sc))


def load_complex(path) -> SimplicialComplex:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_complex(fh.read())
