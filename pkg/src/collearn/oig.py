"""One-inclusion graphs, min-max out-degree orientation and the transductive predictor.

The predictor returns the value at the test point of the HEAD of the edge
joining the two consistent behaviours. With that convention a leave-one-out
mistake at position i is exactly an edge oriented out of the true behaviour,
so the total number of mistakes is at most the true node's out-degree. The
graph on dom(S) is the same for every left-out position, hence the
leave-one-out error is at most (max out-degree)/n <= vc/n.
"""
from __future__ import annotations

from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .concepts import ConceptClass, LabeledSample, as_points, rows_to_codes, vc_of_restriction
from .errors import InputError, InvariantViolation, ResourceError


class OneInclusionGraph:
    """Nodes are the total behaviours of a class on ``support``; edges differ in one coordinate.

    ``edges`` is an ``(E, 3)`` int array of ``(a, b, coordinate)`` with ``a < b``.
    ``heads`` (after orientation) holds the head node of each edge.
    """

    def __init__(self, support, nodes: np.ndarray, edges: np.ndarray):
        self.support = tuple(support)
        self.nodes = nodes
        self.edges = edges
        self.heads = None
        self._edge_at = None

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_edges(self):
        return self.edges.shape[0]

    def out_degrees(self):
        if self.heads is None:
            raise InvariantViolation("graph is not oriented")
        tails = np.where(self.heads == self.edges[:, 0], self.edges[:, 1], self.edges[:, 0])
        return np.bincount(tails, minlength=self.n_nodes)

    def max_out_degree(self):
        return int(self.out_degrees().max()) if self.n_edges else 0

    def edge_between(self, a, b):
        if self._edge_at is None:
            self._edge_at = {(int(u), int(v)): i for i, (u, v, _) in enumerate(self.edges)}
        return self._edge_at.get((min(a, b), max(a, b)))

    def to_text(self) -> str:
        """Edge list, one line ``nodeA nodeB coordinate direction`` (direction ``->`` or ``<-``)."""
        out = []
        for i, (a, b, j) in enumerate(self.edges.tolist()):
            d = "?" if self.heads is None else ("->" if self.heads[i] == b else "<-")
            out.append(f"{a} {b} {self.support[j]} {d}")
        return "\n".join(out) + ("\n" if out else "")


def _edges_of(nodes: np.ndarray) -> np.ndarray:
    n, width = nodes.shape
    if n < 2 or width == 0:
        return np.zeros((0, 3), dtype=np.int64)
    found = []
    if width <= 62:
        codes = np.asarray(rows_to_codes(nodes), dtype=np.int64)
        order = np.argsort(codes)
        sorted_codes = codes[order]
        for j in range(width):
            bit = np.int64(1) << np.int64(j)
            low = np.flatnonzero((codes & bit) == 0)
            target = codes[low] | bit
            pos = np.searchsorted(sorted_codes, target)
            pos[pos == n] = 0
            hit = sorted_codes[pos] == target
            for a, b in zip(low[hit].tolist(), order[pos[hit]].tolist()):
                found.append((min(a, b), max(a, b), j))
    else:
        index = {r.tobytes(): i for i, r in enumerate(nodes)}
        for i, r in enumerate(nodes):
            for j in np.flatnonzero(r == 0).tolist():
                flipped = r.copy()
                flipped[j] = 1
                k = index.get(flipped.tobytes())
                if k is not None:
                    found.append((min(i, k), max(i, k), j))
    found.sort()
    return np.array(found, dtype=np.int64).reshape(-1, 3)


def build_graph(cls: ConceptClass, U) -> OneInclusionGraph:
    U = as_points(U, cls.domain_size)
    nodes = cls.restrict(U)
    return OneInclusionGraph(U, nodes, _edges_of(nodes))


def graph_from_edges(n_nodes, pairs) -> OneInclusionGraph:
    """Bare graph for orientation tests; coordinates are set to the edge index."""
    pairs = sorted((min(a, b), max(a, b)) for a, b in pairs)
    edges = np.array([(a, b, i) for i, (a, b) in enumerate(pairs)], dtype=np.int64).reshape(-1, 3)
    return OneInclusionGraph(tuple(range(len(pairs))), np.zeros((n_nodes, 0), dtype=np.uint8), edges)


def orient_min_outdegree(graph: OneInclusionGraph) -> OneInclusionGraph:
    """Orient edges to minimise the maximum out-degree, in place; returns the graph.

    Greedy start, then repeated path reversal from the lowest-index node of
    maximum out-degree D towards any node of out-degree <= D-2. When no such
    path exists the set R reachable from that node has more than |R|(D-1)
    edges inside it, so no orientation beats D. Each reversal lowers the sum
    of squared out-degrees, so the loop terminates.
    """
    n, E = graph.n_nodes, graph.n_edges
    heads = np.empty(E, dtype=np.int64)
    out = [0] * n
    incident = [[] for _ in range(n)]
    for e, (a, b, _) in enumerate(graph.edges.tolist()):
        if out[b] < out[a]:
            tail, head = b, a
        else:
            tail, head = a, b
        heads[e] = head
        out[tail] += 1
        incident[a].append(e)
        incident[b].append(e)
    ends = graph.edges[:, :2].tolist()

    def other(e, v):
        a, b = ends[e]
        return b if v == a else a

    while E:
        D = max(out)
        if D <= 1:
            break
        v = out.index(D)
        parent = {v: None}
        queue = deque([v])
        goal = None
        while queue and goal is None:
            u = queue.popleft()
            for e in sorted(incident[u], key=lambda e: other(e, u)):
                if heads[e] == u:
                    continue
                w = int(heads[e])
                if w in parent:
                    continue
                parent[w] = (u, e)
                if out[w] <= D - 2:
                    goal = w
                    break
                queue.append(w)
        if goal is None:
            break
        w = goal
        while parent[w] is not None:
            u, e = parent[w]
            heads[e] = u
            w = u
        out[v] -= 1
        out[goal] += 1
    graph.heads = heads
    return graph


def density_lower_bound(graph: OneInclusionGraph, max_nodes=18) -> int:
    """max over node subsets W of ceil(|E(W)| / |W|), by enumeration."""
    n = graph.n_nodes
    if n > max_nodes:
        raise ResourceError(f"density bound enumeration over {n} nodes exceeds cap {max_nodes}")
    if graph.n_edges == 0:
        return 0
    a = graph.edges[:, 0]
    b = graph.edges[:, 1]
    masks = np.arange(1, 2 ** n, dtype=np.int64)
    inside = ((masks[:, None] >> a) & 1) & ((masks[:, None] >> b) & 1)
    e_in = inside.sum(1)
    sizes = np.array([bin(int(mk)).count("1") for mk in masks])
    return int(np.max(-(-e_in // sizes)))


def exhaustive_min_outdegree(graph: OneInclusionGraph, max_edges=16) -> int:
    """Minimum over all 2^E orientations of the maximum out-degree."""
    E = graph.n_edges
    if E > max_edges:
        raise ResourceError(f"exhaustive orientation over {E} edges exceeds cap {max_edges}")
    if E == 0:
        return 0
    flips = ((np.arange(2 ** E)[:, None] >> np.arange(E)) & 1).astype(bool)
    tails = np.where(flips, graph.edges[:, 1], graph.edges[:, 0])
    counts = np.zeros((2 ** E, graph.n_nodes), dtype=np.int64)
    rows = np.repeat(np.arange(2 ** E), E)
    np.add.at(counts, (rows, tails.reshape(-1)), 1)
    return int(counts.max(1).min())


def _graph_cache(cls):
    cache = cls.__dict__.setdefault("_oig_cache", {})
    if len(cache) > 20_000:
        cache.clear()
    return cache


def oriented_graph(cls: ConceptClass, U) -> OneInclusionGraph:
    """Memoised oriented graph of ``cls`` on ``U`` (orientation depends only on the node set)."""
    return _oriented(cls, as_points(U, cls.domain_size))


def _oriented(cls, U: tuple) -> OneInclusionGraph:
    cache = _graph_cache(cls)
    g = cache.get(U)
    if g is None:
        g = orient_min_outdegree(build_graph(cls, U))
        g.rows = g.nodes.tolist()
        cache[U] = g
    return g


def _predict_on_graph(g: OneInclusionGraph, train_cols, train_labels, xcol):
    rows = g.rows
    if train_cols:
        pairs = list(zip(train_cols, train_labels))
        cons = [i for i, r in enumerate(rows) if all(r[c] == y for c, y in pairs)]
    else:
        cons = list(range(len(rows)))
    if not cons:
        return 0
    if len(cons) == 1:
        return rows[cons[0]][xcol]
    if len(cons) == 2:
        e = g.edge_between(cons[0], cons[1])
        if e is None:
            raise InvariantViolation("two consistent behaviours are not adjacent")
        return rows[int(g.heads[e])][xcol]
    raise InvariantViolation(f"{len(cons)} behaviours consistent with a sample covering all but one point")


def _training_view(S: LabeledSample):
    """Distinct training points and their labels, or None when labels conflict."""
    pts = {}
    for p, y in zip(S.points.tolist(), S.labels.tolist()):
        if pts.setdefault(p, y) != y:
            return None
    return pts


def oig_predict(cls: ConceptClass, S: LabeledSample, x) -> int:
    """Label of ``x`` from the oriented one-inclusion graph on dom(S) and x."""
    return int(oig_predict_many(cls, S, [x])[0])


def oig_predict_many(cls: ConceptClass, S: LabeledSample, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64).reshape(-1)
    out = np.zeros(len(xs), dtype=np.uint8)
    view = _training_view(S)
    if view is None:
        return out
    train = sorted(view)
    labs = [view[p] for p in train]
    memo = {}
    for i, x in enumerate(xs.tolist()):
        val = memo.get(x)
        if val is None:
            if not 0 <= x < cls.domain_size:
                raise InputError(f"test point {x} outside domain of size {cls.domain_size}")
            if x in view:
                g = _oriented(cls, tuple(train))
                val = _predict_on_graph(g, list(range(len(train))), labs, train.index(x))
            else:
                j = bisect_left(train, x)
                U = tuple(train[:j]) + (x,) + tuple(train[j:])
                g = _oriented(cls, U)
                cols = list(range(j)) + list(range(j + 1, len(U)))
                val = _predict_on_graph(g, cols, labs, j)
            memo[x] = val
        out[i] = val
    return out


@dataclass(frozen=True)
class LooResult:
    error: Fraction
    realizable: bool
    vc: int
    n: int

    @property
    def bound(self) -> Fraction:
        return Fraction(self.vc, self.n)

    @property
    def bound_n_plus_1(self) -> Fraction:
        return Fraction(self.vc, self.n + 1)


def is_realizable(cls: ConceptClass, S: LabeledSample) -> bool:
    view = _training_view(S)
    if view is None:
        return False
    train = sorted(view)
    rows = cls.restrict(train)
    labs = np.array([view[p] for p in train], dtype=np.uint8)
    return bool(rows.shape[0]) and bool(np.any(np.all(rows == labs, axis=1)))


def loo_error(cls: ConceptClass, S: LabeledSample, vc_cap=None) -> LooResult:
    """Leave-one-out error of the OIG predictor, with realizability flag and vc(dom S)."""
    n = len(S)
    mistakes = 0
    for i in range(n):
        pred = oig_predict(cls, S.drop(i), int(S.points[i]))
        mistakes += pred != int(S.labels[i])
    vc = vc_of_restriction(cls, S.domain(), cap=vc_cap)
    return LooResult(Fraction(mistakes, n), is_realizable(cls, S), vc, n)
