"""Cluster graphs for the Heisenberg model.

A cluster is an undirected, connected graph whose vertices are spin-1/2
sites and whose edges are the antiferromagnetic bonds. Sites are labelled
0..N-1 everywhere.

Presets
-------
``chain:<N>``      periodic ring, site i bonded to (i+1) mod N
``complete:<N>``   every pair bonded (infinite-range model)
``square:4x4``     4x4 square lattice, periodic in both directions
``tictactoe:12``   "#" shaped cluster: four crossing sites forming a
                   plaquette, each with two dangling boundary sites
``tri:10``         triangular-lattice patch with rows of 3, 4, 3 sites
``tri:4x4``        16-site triangular cluster, periodic, with the vertical
                   wrap shifted by two columns (so four slanted steps do
                   not close a loop while four horizontal steps do)
``davidstar:12``   kagome star: 12-ring with chords (2k, 2k+2)
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

Pair = tuple[int, int]


class ClusterError(ValueError):
    """Invalid cluster definition (parse error or broken invariant)."""


def _norm_pair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ClusterGraph:
    name: str
    num_sites: int
    edges: tuple[Pair, ...]
    pair_class_labels: Mapping[Pair, str] = field(default_factory=dict)

    def __post_init__(self):
        n = self.num_sites
        if not isinstance(n, int) or n < 1:
            raise ClusterError(f"{self.name}: num_sites must be a positive integer, got {n!r}")
        seen: set[Pair] = set()
        normed = []
        for k, edge in enumerate(self.edges):
            try:
                a, b = (int(x) for x in edge)
            except (TypeError, ValueError):
                raise ClusterError(f"{self.name}: edges[{k}] is not a pair of integers: {edge!r}")
            if not (0 <= a < n and 0 <= b < n):
                raise ClusterError(f"{self.name}: edges[{k}] = {[a, b]} has a site outside [0, {n})")
            if a == b:
                raise ClusterError(f"{self.name}: edges[{k}] = {[a, b]} is a self-loop")
            p = _norm_pair(a, b)
            if p in seen:
                raise ClusterError(f"{self.name}: edges[{k}] = {[a, b]} duplicates an earlier edge")
            seen.add(p)
            normed.append(p)
        labels = {}
        for key, label in dict(self.pair_class_labels).items():
            a, b = key
            if a == b or not (0 <= a < n and 0 <= b < n):
                raise ClusterError(f"{self.name}: pair_class_labels key {key!r} is not a valid site pair")
            labels[_norm_pair(a, b)] = str(label)
        object.__setattr__(self, "edges", tuple(sorted(normed)))
        object.__setattr__(self, "pair_class_labels", labels)
        if not _is_connected(n, self.edges):
            raise ClusterError(f"{self.name}: graph is not connected")

    @property
    def num_bonds(self) -> int:
        return len(self.edges)

    @property
    def edge_set(self) -> frozenset[Pair]:
        return frozenset(self.edges)

    def pairs(self) -> list[Pair]:
        """All unordered site pairs (i < j) in lexicographic order."""
        return list(combinations(range(self.num_sites), 2))

    def neighbors(self, site: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == site} | {a for a, b in self.edges if b == site})

    def relabel(self, perm: Sequence[int], name: str | None = None) -> ClusterGraph:
        """Graph with site ``s`` renamed ``perm[s]``."""
        return ClusterGraph(
            name or self.name,
            self.num_sites,
            tuple(_norm_pair(perm[a], perm[b]) for a, b in self.edges),
            {_norm_pair(perm[a], perm[b]): v for (a, b), v in self.pair_class_labels.items()},
        )

    def to_dict(self) -> dict:
        d = {"name": self.name, "num_sites": self.num_sites, "edges": [list(e) for e in self.edges]}
        if self.pair_class_labels:
            d["pair_class_labels"] = {f"{a}-{b}": v for (a, b), v in sorted(self.pair_class_labels.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _is_connected(n: int, edges: Iterable[Pair]) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        for t in adj[s]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return len(seen) == n


def is_bipartite(graph: ClusterGraph) -> bool:
    color = {0: 0}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        for t in graph.neighbors(s):
            if t not in color:
                color[t] = 1 - color[s]
                queue.append(t)
            elif color[t] == color[s]:
                return False
    return True


# ---------------------------------------------------------------- presets


def chain(n: int) -> ClusterGraph:
    if n < 3:
        raise ClusterError("chain needs at least 3 sites")
    return ClusterGraph(f"chain:{n}", n, tuple(_norm_pair(i, (i + 1) % n) for i in range(n)))


def complete(n: int) -> ClusterGraph:
    if n < 2:
        raise ClusterError("complete graph needs at least 2 sites")
    return ClusterGraph(f"complete:{n}", n, tuple(combinations(range(n), 2)))


def square_4x4() -> ClusterGraph:
    def site(x, y):
        return (y % 4) * 4 + x % 4

    edges = set()
    for x in range(4):
        for y in range(4):
            edges.add(_norm_pair(site(x, y), site(x + 1, y)))
            edges.add(_norm_pair(site(x, y), site(x, y + 1)))
    return ClusterGraph("square:4x4", 16, tuple(edges))


def tictactoe_12() -> ClusterGraph:
    # 4x4 grid minus corners; only bonds touching the inner plaquette survive
    pts = [(x, y) for y in range(4) for x in range(4) if (x, y) not in {(0, 0), (3, 0), (0, 3), (3, 3)}]
    index = {p: k for k, p in enumerate(pts)}
    inner = {(1, 1), (2, 1), (1, 2), (2, 2)}
    edges = []
    for p in pts:
        for q in ((p[0] + 1, p[1]), (p[0], p[1] + 1)):
            if q in index and (p in inner or q in inner):
                edges.append((index[p], index[q]))
    return ClusterGraph("tictactoe:12", 12, tuple(edges))


def triangular_10() -> ClusterGraph:
    # rows of 3, 4, 3 in a triangular lattice; x in units of the bond length
    rows = [[(x + 0.5, 0) for x in range(3)], [(x, 1) for x in range(4)], [(x + 0.5, 2) for x in range(3)]]
    pts = [p for row in rows for p in row]
    edges = []
    for a, b in combinations(range(len(pts)), 2):
        dx = pts[a][0] - pts[b][0]
        dy = pts[a][1] - pts[b][1]
        if abs(dx * dx + 0.75 * dy * dy - 1.0) < 1e-9:
            edges.append((a, b))
    return ClusterGraph("tri:10", 10, tuple(edges))


def triangular_4x4() -> ClusterGraph:
    def site(x, y):
        wraps, row = divmod(y, 4)
        return row * 4 + (x - 2 * wraps) % 4

    edges = {}
    for x in range(4):
        for y in range(4):
            edges[_norm_pair(site(x, y), site(x + 1, y))] = "horizontal"
            edges[_norm_pair(site(x, y), site(x, y + 1))] = "slanted"
            edges[_norm_pair(site(x, y), site(x - 1, y + 1))] = "slanted"
    return ClusterGraph("tri:4x4", 16, tuple(edges), edges)


def davidstar_12() -> ClusterGraph:
    ring = [_norm_pair(i, (i + 1) % 12) for i in range(12)]
    chords = [_norm_pair(2 * k, (2 * k + 2) % 12) for k in range(6)]
    return ClusterGraph("davidstar:12", 12, tuple(ring + chords))


_FIXED = {
    "square:4x4": square_4x4,
    "tictactoe:12": tictactoe_12,
    "tri:10": triangular_10,
    "tri:4x4": triangular_4x4,
    "davidstar:12": davidstar_12,
}
_SIZED = {"chain": chain, "complete": complete}

PRESET_IDS = ("chain:<N>", "complete:<N>", *_FIXED)


def preset(name: str) -> ClusterGraph:
    if name in _FIXED:
        return _FIXED[name]()
    m = re.fullmatch(r"(chain|complete):(\d+)", name)
    if m:
        return _SIZED[m.group(1)](int(m.group(2)))
    raise ClusterError(f"unknown preset {name!r}; valid ids: {', '.join(PRESET_IDS)}")


def load_cluster(text: str) -> ClusterGraph:
    """Parse a cluster JSON document and validate it."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ClusterError(f"cluster file: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise ClusterError("cluster file: top level must be a JSON object")
    for key in ("num_sites", "edges"):
        if key not in data:
            raise ClusterError(f"cluster file: missing required key {key!r}")
    n = data["num_sites"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ClusterError(f"cluster file: num_sites must be an integer, got {n!r}")
    edges = data["edges"]
    if not isinstance(edges, list):
        raise ClusterError("cluster file: edges must be a list")
    for k, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise ClusterError(f"cluster file: edges[{k}] must be [int, int], got {e!r}")
    labels = {}
    for key, value in (data.get("pair_class_labels") or {}).items():
        m = re.fullmatch(r"\s*(\d+)\s*-\s*(\d+)\s*", key)
        if not m:
            raise ClusterError(f"cluster file: pair_class_labels key {key!r} must look like 'i-j'")
        labels[(int(m.group(1)), int(m.group(2)))] = value
    return ClusterGraph(str(data.get("name", "custom")), n, tuple(tuple(e) for e in edges), labels)


def resolve(source: str) -> ClusterGraph:
    """Preset id, or else a path to a cluster file."""
    try:
        return preset(source)
    except ClusterError:
        if ":" in source and not source.endswith(".json"):
            raise
    with open(source, encoding="utf-8") as fh:
        return load_cluster(fh.read())


def pair_classes(graph: ClusterGraph, reports, tol: float = 1e-6) -> dict[Pair, str]:
    """Group pairs whose (gamma, z) agree within ``tol``.

    Reports are visited in (i, j) order and each joins the first class whose
    representative matches, so ids are deterministic. Labels stored on the
    graph take precedence over the value-based grouping.
    """
    assignment: dict[Pair, str] = {}
    reps: list[tuple[float, float, str]] = []
    for r in sorted(reports, key=lambda r: (r.i, r.j)):
        key = _norm_pair(r.i, r.j)
        if key in graph.pair_class_labels:
            assignment[key] = graph.pair_class_labels[key]
            continue
        for g, z, cid in reps:
            if abs(g - r.gamma) <= tol and abs(z - r.z) <= tol:
                assignment[key] = cid
                break
        else:
            cid = f"c{len(reps)}"
            reps.append((r.gamma, r.z, cid))
            assignment[key] = cid
    return assignment
