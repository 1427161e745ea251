"""Box coverings of the chain recurrent set.

The domain is cut into ``n`` equal boxes. Box ``i`` has an edge to box ``j``
when the open ``eps``-neighbourhood of the exact image of box ``i`` meets box
``j``. For interval maps that image is an interval, so every node's
successors form a contiguous run of boxes and the graph is stored as two
integer arrays ``succ_lo``/``succ_hi`` instead of an explicit edge list.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ConfigError, ResolutionLimitError
from .maps import MapFamily, find_critical_points

MAX_BOXES = 2**24


@dataclass(frozen=True)
class BoxPartition:
    a: float
    b: float
    n_boxes: int

    def __post_init__(self):
        n = int(self.n_boxes)
        if n < 1 or n & (n - 1):
            raise ConfigError("n_boxes must be a power of two")
        if not self.a < self.b:
            raise ConfigError(f"empty partition domain [{self.a}, {self.b}]")

    @classmethod
    def of(cls, family: MapFamily, n_boxes: int) -> BoxPartition:
        return cls(family.domain[0], family.domain[1], n_boxes)

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_boxes

    def lower(self, i):
        return self.a + np.asarray(i) * self.h

    def upper(self, i):
        return self.a + (np.asarray(i) + 1) * self.h

    def center(self, i):
        return self.a + (np.asarray(i) + 0.5) * self.h

    def index_of(self, x):
        """Box containing ``x``; the right endpoint belongs to the last box."""
        i = np.floor((np.asarray(x, dtype=float) - self.a) / self.h).astype(np.int64)
        return np.clip(i, 0, self.n_boxes - 1)

    def boxes_meeting(self, lo, hi):
        """First and last box meeting the open interval ``(lo, hi)``."""
        t_lo = (np.asarray(lo, dtype=float) - self.a) / self.h
        t_hi = (np.asarray(hi, dtype=float) - self.a) / self.h
        jl = np.floor(t_lo).astype(np.int64)
        jh = np.ceil(t_hi).astype(np.int64) - 1
        return np.clip(jl, 0, self.n_boxes - 1), np.clip(jh, 0, self.n_boxes - 1)


@dataclass(frozen=True, eq=False)
class TransitionGraph:
    """Range-successor graph on the boxes listed in ``nodes``.

    ``succ_lo[k]..succ_hi[k]`` (inclusive, box indices) are the successors of
    box ``nodes[k]``. Edges into boxes outside ``nodes`` are dropped, which is
    how restricted rebuilds during refinement are represented.
    """

    partition: BoxPartition
    lam: float
    eps: float
    nodes: np.ndarray
    succ_lo: np.ndarray
    succ_hi: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.size)

    @property
    def full(self) -> bool:
        return self.n_nodes == self.partition.n_boxes

    def position(self, box) -> np.ndarray:
        """Compact index of each box in ``nodes`` (-1 when absent)."""
        box = np.asarray(box, dtype=np.int64)
        pos = np.searchsorted(self.nodes, box)
        pos = np.clip(pos, 0, max(self.n_nodes - 1, 0))
        ok = (self.n_nodes > 0) & (self.nodes[pos] == box)
        return np.where(ok, pos, -1)

    def compact_ranges(self) -> tuple[np.ndarray, np.ndarray]:
        """Successor ranges in compact indices, half-open ``[lo, hi)``."""
        lo = np.searchsorted(self.nodes, self.succ_lo, side="left")
        hi = np.searchsorted(self.nodes, self.succ_hi, side="right")
        return lo, np.maximum(hi, lo)

    def self_loops(self) -> np.ndarray:
        return (self.succ_lo <= self.nodes) & (self.nodes <= self.succ_hi)

    def to_csr(self) -> csr_matrix:
        lo, hi = self.compact_ranges()
        counts = hi - lo
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        # column k of the run starting at indptr[r] is lo[r] + k
        offsets = np.arange(indptr[-1], dtype=np.int64) - np.repeat(indptr[:-1], counts)
        indices = np.repeat(lo, counts) + offsets
        data = np.ones(indices.size, dtype=np.int8)
        return csr_matrix((data, indices, indptr), shape=(self.n_nodes, self.n_nodes))

    def successors(self, box: int) -> np.ndarray:
        k = int(self.position(box))
        if k < 0:
            raise IndexError(f"box {box} is not a node of this graph")
        run = np.arange(self.succ_lo[k], self.succ_hi[k] + 1)
        return run[self.position(run) >= 0]

    def edge_list(self) -> np.ndarray:
        m = self.to_csr().tocoo()
        return np.column_stack([self.nodes[m.row], self.nodes[m.col]])


def image_bounds(family: MapFamily, lam: float, partition: BoxPartition,
                 boxes: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact image ``[lo, hi]`` of each box.

    f is monotone between critical points, so the image of a box is spanned by
    its endpoint values plus the values at interior critical points.
    """
    if boxes is None:
        boxes = np.arange(partition.n_boxes)
    left = family.eval(partition.lower(boxes), lam)
    right = family.eval(partition.upper(boxes), lam)
    lo = np.minimum(left, right)
    hi = np.maximum(left, right)
    for cp in find_critical_points(family, lam):
        k = int(partition.index_of(cp.x))
        pos = np.searchsorted(boxes, k)
        if pos < boxes.size and boxes[pos] == k:
            v = float(family.eval(cp.x, lam))
            lo[pos] = min(lo[pos], v)
            hi[pos] = max(hi[pos], v)
    return lo, hi


def build_graph(family: MapFamily, lam: float, partition: BoxPartition,
                eps: float | None = None, nodes: np.ndarray | None = None) -> TransitionGraph:
    """Transition graph at fattening radius ``eps`` (default one box width).

    ``nodes`` restricts the graph to a sorted subset of boxes.
    """
    h = partition.h
    if eps is None:
        eps = h
    if eps < h * (1 - 1e-12):
        raise ConfigError(f"eps_num={eps} is below the box width {h}")
    if nodes is None:
        nodes = np.arange(partition.n_boxes, dtype=np.int64)
    else:
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    lo, hi = image_bounds(family, lam, partition, nodes)
    succ_lo, succ_hi = partition.boxes_meeting(lo - eps, hi + eps)
    return TransitionGraph(partition, float(lam), float(eps), nodes, succ_lo, succ_hi)


# -- strongly connected components -----------------------------------------


def tarjan_scc(indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Iterative Tarjan on a CSR adjacency; returns a component label per node.

    Labels are assigned in the order components are completed (reverse
    topological order of the condensation).
    """
    n = indptr.size - 1
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    label = np.full(n, -1, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, int(indptr[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, ptr = work[-1]
            end = int(indptr[v + 1])
            advanced = False
            while ptr < end:
                w = int(indices[ptr])
                ptr += 1
                if index[w] < 0:
                    work[-1] = (v, ptr)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, int(indptr[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    label[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return label


def strong_components(graph: TransitionGraph, method: str = "scipy") -> np.ndarray:
    """Component label per node (compact indexing)."""
    if graph.n_nodes == 0:
        return np.zeros(0, dtype=np.int64)
    csr = graph.to_csr()
    if method == "scipy":
        _, labels = connected_components(csr, directed=True, connection="strong")
        return labels.astype(np.int64)
    if method == "tarjan":
        return tarjan_scc(csr.indptr, csr.indices)
    raise ValueError(f"unknown SCC method {method!r}")


@dataclass(frozen=True, eq=False)
class ChainSetApprox:
    """Recurrent boxes of a transition graph and their chain components.

    ``boxes`` is sorted; ``labels[k]`` is the component of ``boxes[k]``,
    numbered by smallest member box.
    """

    graph: TransitionGraph
    boxes: np.ndarray
    labels: np.ndarray

    @property
    def partition(self) -> BoxPartition:
        return self.graph.partition

    @property
    def h(self) -> float:
        return self.partition.h

    @property
    def eps(self) -> float:
        return self.graph.eps

    @property
    def lam(self) -> float:
        return self.graph.lam

    @property
    def measure(self) -> float:
        return self.boxes.size * self.h

    @property
    def n_components(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def mask(self) -> np.ndarray:
        m = np.zeros(self.partition.n_boxes, dtype=bool)
        m[self.boxes] = True
        return m

    def contains_point(self, x: float) -> bool:
        k = int(self.partition.index_of(x))
        pos = np.searchsorted(self.boxes, k)
        return bool(pos < self.boxes.size and self.boxes[pos] == k)

    def component_of(self, box: int) -> int:
        pos = np.searchsorted(self.boxes, box)
        if pos < self.boxes.size and self.boxes[pos] == box:
            return int(self.labels[pos])
        return -1

    def runs(self) -> list[tuple[int, int, int]]:
        """Maximal runs ``(start, length, component)`` of consecutive boxes
        sharing a component."""
        if self.boxes.size == 0:
            return []
        brk = np.flatnonzero((np.diff(self.boxes) != 1) | (np.diff(self.labels) != 0)) + 1
        starts = np.concatenate([[0], brk])
        ends = np.concatenate([brk, [self.boxes.size]])
        return [(int(self.boxes[s]), int(e - s), int(self.labels[s])) for s, e in zip(starts, ends)]


def chain_recurrent_set(graph: TransitionGraph, method: str = "scipy") -> ChainSetApprox:
    """Boxes in a nontrivial SCC or carrying a self-loop."""
    labels = strong_components(graph, method)
    sizes = np.bincount(labels, minlength=labels.max() + 1 if labels.size else 0)
    rec = (sizes[labels] > 1) | graph.self_loops() if labels.size else np.zeros(0, bool)
    boxes = graph.nodes[rec]
    raw = labels[rec]
    # canonical numbering: by the smallest box of each component
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(order.size, dtype=np.int64)
    remap[order] = np.arange(order.size)
    canon = remap[np.searchsorted(np.unique(raw), raw)] if raw.size else raw
    return ChainSetApprox(graph, boxes, canon.astype(np.int64))


def chain_set(family: MapFamily, lam: float, n_boxes: int, eps: float | None = None,
              nodes: np.ndarray | None = None) -> ChainSetApprox:
    part = BoxPartition.of(family, n_boxes)
    return chain_recurrent_set(build_graph(family, lam, part, eps, nodes))


def epsilon_chain_exists(graph: TransitionGraph, from_box: int, to_box: int) -> bool:
    """Whether a path of length >= 1 leads from ``from_box`` to ``to_box``."""
    src, dst = int(graph.position(from_box)), int(graph.position(to_box))
    if src < 0 or dst < 0:
        raise IndexError("box is not a node of this graph")
    lo, hi = graph.compact_ranges()
    seen = np.zeros(graph.n_nodes, dtype=bool)
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in range(lo[v], hi[v]):
            if w == dst:
                return True
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return False


def transitive_closure(graph: TransitionGraph) -> np.ndarray:
    """Dense reachability matrix (paths of length >= 1) by repeated squaring."""
    a = graph.to_csr().toarray().astype(np.float32)
    reach = a > 0
    while True:
        r = reach.astype(np.float32)
        nxt = reach | ((r @ r) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def refine(family: MapFamily, lam: float, approx: ChainSetApprox, margin: int = 1) -> ChainSetApprox:
    """Rebuild at twice the resolution around the current recurrent boxes."""
    part = approx.partition
    n = part.n_boxes * 2
    if n > MAX_BOXES:
        raise ResolutionLimitError(f"n_boxes={n} exceeds the cap {MAX_BOXES}", partial=approx)
    child = BoxPartition(part.a, part.b, n)
    kids = np.concatenate([2 * approx.boxes, 2 * approx.boxes + 1])
    shifts = np.arange(-margin, margin + 1)
    nodes = np.unique(np.clip((kids[:, None] + shifts[None, :]).ravel(), 0, n - 1))
    eps = max(approx.eps / 2, child.h)
    return chain_recurrent_set(build_graph(family, lam, child, eps, nodes))


# -- invariant checks used by the assertion suite ---------------------------


def forward_invariance_violations(approx: ChainSetApprox) -> np.ndarray:
    """Recurrent boxes whose successor run misses the recurrent covering."""
    g = approx.graph
    pos = g.position(approx.boxes)
    lo = np.searchsorted(approx.boxes, g.succ_lo[pos], side="left")
    hi = np.searchsorted(approx.boxes, g.succ_hi[pos], side="right")
    return approx.boxes[hi <= lo]


def refinement_violations(parent: ChainSetApprox, child: ChainSetApprox) -> np.ndarray:
    """Child recurrent boxes outside the one-box fattening of the parent covering."""
    allowed = np.zeros(child.partition.n_boxes, dtype=bool)
    kids = np.concatenate([2 * parent.boxes, 2 * parent.boxes + 1])
    for s in (-1, 0, 1):
        allowed[np.clip(kids + s, 0, allowed.size - 1)] = True
    return child.boxes[~allowed[child.boxes]]
