"""Device coupling maps, the shipped IBM-style catalog, and device selection."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class CouplingMap:
    name: str
    size: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise TopologyError(f"{self.name}: self-loop on {a}")
            if not (0 <= a < self.size and 0 <= b < self.size):
                raise TopologyError(f"{self.name}: edge ({a},{b}) out of range for size {self.size}")
            if a > b:
                raise TopologyError(f"{self.name}: edge ({a},{b}) not canonical")
            seen.add((a, b))
        if self.size > 1 and not self.is_connected():
            raise TopologyError(f"{self.name}: coupling graph is disconnected")

    @classmethod
    def from_pairs(cls, name: str, size: int, pairs: Iterable[tuple[int, int]]) -> "CouplingMap":
        edges = set()
        for a, b in pairs:
            e = (min(a, b), max(a, b))
            if e in edges:
                raise TopologyError(f"{name}: duplicate edge {e}")
            edges.add(e)
        return cls(name, size, frozenset(edges))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.size)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(n)) for n in adj)

    def degree(self, q: int) -> int:
        return len(self.neighbors[q])

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges

    def is_connected(self) -> bool:
        return len(self._bfs(0)) == self.size

    def _bfs(self, src: int) -> dict[int, int]:
        dist = {src: 0}
        todo = deque([src])
        while todo:
            u = todo.popleft()
            for v in self.neighbors[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    todo.append(v)
        return dist

    @cached_property
    def distance(self) -> np.ndarray:
        """All-pairs hop distance, shape (size, size)."""
        d = np.zeros((self.size, self.size), dtype=np.int64)
        for s in range(self.size):
            for t, k in self._bfs(s).items():
                d[s, t] = k
        return d

    @cached_property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def to_text(self) -> str:
        lines = [f"device {self.name} {self.size}"]
        lines += [f"edge {a} {b}" for a, b in self.sorted_edges]
        return "\n".join(lines) + "\n"


def parse_coupling(text: str) -> CouplingMap:
    name = size = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "device" and len(fields) == 3 and name is None:
            name, size = fields[1], int(fields[2])
        elif fields[0] == "edge" and len(fields) == 3 and name is not None:
            pairs.append((int(fields[1]), int(fields[2])))
        else:
            raise TopologyError(f"line {lineno}: cannot parse {raw!r}")
    if name is None:
        raise TopologyError("missing 'device <name> <size>' header")
    return CouplingMap.from_pairs(name, size, pairs)


def load_coupling(path) -> CouplingMap:
    return parse_coupling(Path(path).read_text(encoding="utf-8"))


def _shipped(name: str) -> CouplingMap:
    return parse_coupling(resources.files(__package__).joinpath("devices", f"{name}.txt").read_text("utf-8"))


def quito() -> CouplingMap:
    return _shipped("quito")


def montreal() -> CouplingMap:
    return _shipped("montreal")


def washington() -> CouplingMap:
    return _shipped("washington")


def line(n: int) -> CouplingMap:
    return CouplingMap.from_pairs(f"line{n}", n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> CouplingMap:
    return CouplingMap.from_pairs(f"complete{n}", n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def heavy_hex(rows: int = 7, cols: int = 15, name: str | None = None) -> CouplingMap:
    """Eagle-style heavy-hex lattice.

    ``rows`` long rows of ``cols`` qubits joined by bridge qubits every fourth
    column, alternating between even and odd offsets. The first row drops its
    last column and the last row drops its first, as on the 127-qubit devices.
    Numbering runs row by row with each row's downward bridges following it.
    """
    if rows < 2 or cols < 3:
        raise TopologyError("heavy_hex needs rows >= 2 and cols >= 3")
    pairs = []
    index: dict[tuple[int, int], int] = {}
    nxt = 0
    row_cols = []
    for r in range(rows):
        cs = list(range(cols))
        if r == 0:
            cs = cs[:-1]
        elif r == rows - 1:
            cs = cs[1:]
        row_cols.append(cs)
    bridges: list[list[tuple[int, int]]] = []
    for r in range(rows):
        for c in row_cols[r]:
            index[(r, c)] = nxt
            nxt += 1
        for c1, c2 in zip(row_cols[r], row_cols[r][1:]):
            pairs.append((index[(r, c1)], index[(r, c2)]))
        if r == rows - 1:
            break
        start = 0 if r % 2 == 0 else 2
        here = []
        for c in range(start, cols, 4):
            if c in row_cols[r] and c in row_cols[r + 1]:
                here.append((c, nxt))
                pairs.append((index[(r, c)], nxt))
                nxt += 1
        bridges.append(here)
    # Bridge lower ends need the next row's indices, so attach them afterwards.
    for r, here in enumerate(bridges):
        for c, b in here:
            pairs.append((b, index[(r + 1, c)]))
    return CouplingMap.from_pairs(name or f"heavy_hex_{rows}x{cols}", nxt, pairs)


@dataclass(frozen=True)
class DeviceCatalog:
    devices: tuple[CouplingMap, ...]

    def __post_init__(self) -> None:
        sizes = [d.size for d in self.devices]
        if any(a >= b for a, b in zip(sizes, sizes[1:])):
            raise TopologyError(f"catalog sizes must be strictly increasing, got {sizes}")

    @classmethod
    def of(cls, devices: Iterable[CouplingMap]) -> "DeviceCatalog":
        return cls(tuple(sorted(devices, key=lambda d: d.size)))

    def by_name(self, name: str) -> CouplingMap:
        for d in self.devices:
            if d.name == name:
                return d
        known = ", ".join(d.name for d in self.devices)
        raise KeyError(f"no device named {name!r} (catalog: {known})")

    @property
    def max_size(self) -> int:
        return self.devices[-1].size if self.devices else 0


def default_catalog() -> DeviceCatalog:
    return DeviceCatalog.of([quito(), montreal(), washington()])


def load_catalog(path) -> DeviceCatalog:
    """Load every ``*.txt`` coupling file in a directory, or the files listed one per line in a catalog file."""
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("*.txt"))
    else:
        files = []
        for raw in path.read_text(encoding="utf-8").splitlines():
            entry = raw.split("#", 1)[0].strip()
            if entry:
                files.append(path.parent / entry)
    return DeviceCatalog.of(load_coupling(f) for f in files)


def select_device(catalog: DeviceCatalog, n: int) -> CouplingMap:
    """Smallest catalog device with at least ``n`` qubits."""
    if n < 1:
        raise TopologyError("need at least one qubit")
    for d in catalog.devices:
        if d.size >= n:
            return d
    raise TopologyError(f"no device in catalog holds {n} qubits (largest is {catalog.max_size})")
