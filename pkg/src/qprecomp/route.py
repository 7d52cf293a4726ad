"""Initial placement and SWAP routing.

Routing works on *units*: a tagged CX-RZ-CX triple is one two-qubit unit and
is emitted contiguously, so no foreign gate ever lands between its gates.
Everything else is a unit of its own.
"""
from __future__ import annotations

import heapq
import random
import sys
from dataclasses import dataclass

from .ir import Circuit, Gate, GateKind, cx, header_fields
from .topology import CouplingMap


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class Layout:
    """``logical_to_physical[l]`` is where logical ``l`` starts; ``output_permutation[l]`` where it ends."""

    logical_to_physical: tuple[int, ...]
    output_permutation: tuple[int, ...]

    def __post_init__(self) -> None:
        for m in (self.logical_to_physical, self.output_permutation):
            if len(set(m)) != len(m):
                raise RoutingError(f"layout is not injective: {m}")
        if len(self.logical_to_physical) != len(self.output_permutation):
            raise RoutingError("layout maps have different lengths")

    @classmethod
    def static(cls, mapping) -> "Layout":
        mapping = tuple(int(p) for p in mapping)
        return cls(mapping, mapping)

    @classmethod
    def trivial(cls, n: int) -> "Layout":
        return cls.static(range(n))

    # Short aliases used by serialization.
    @property
    def initial(self) -> tuple[int, ...]:
        return self.logical_to_physical

    @property
    def final(self) -> tuple[int, ...]:
        return self.output_permutation

    @classmethod
    def from_qasm(cls, text: str) -> "Layout | None":
        """Layout recorded in a serialized circuit's header comments, if any."""
        fields = header_fields(text)
        if "layout" not in fields:
            return None

        def read(value):
            pairs = sorted(tuple(map(int, item.split("->"))) for item in value.split())
            if [l for l, _ in pairs] != list(range(len(pairs))):
                raise RoutingError(f"malformed layout header: {value!r}")
            return tuple(p for _, p in pairs)

        initial = read(fields["layout"])
        return cls(initial, read(fields.get("outperm", fields["layout"])))

    def validate(self, device: CouplingMap) -> None:
        for p in self.logical_to_physical + self.output_permutation:
            if not 0 <= p < device.size:
                raise RoutingError(f"physical qubit {p} outside {device.name}")


@dataclass(frozen=True, slots=True)
class _Unit:
    qubits: tuple[int, ...]
    gates: tuple[Gate, ...]


def _units(circuit: Circuit) -> list[_Unit]:
    gates = circuit.gates
    out = []
    i, n = 0, len(gates)
    while i < n:
        g = gates[i]
        if g.tag is not None and g.kind is GateKind.CX and i + 2 < n:
            mid, end = gates[i + 1], gates[i + 2]
            if (mid.kind is GateKind.RZ and end.kind is GateKind.CX and mid.tag == g.tag == end.tag
                    and end.qubits == g.qubits and mid.qubits == (g.qubits[1],)):
                out.append(_Unit(g.qubits, (g, mid, end)))
                i += 3
                continue
        out.append(_Unit(g.qubits, (g,)))
        i += 1
    return out


def interaction_graph(circuit: Circuit) -> dict[tuple[int, int], int]:
    weights: dict[tuple[int, int], int] = {}
    for u in _units(circuit):
        if len(u.qubits) == 2:
            a, b = sorted(u.qubits)
            weights[(a, b)] = weights.get((a, b), 0) + 1
    return weights


def initial_layout(circuit: Circuit, device: CouplingMap) -> Layout:
    """Greedy placement growing outward from the device hub.

    The logical qubit with the highest interaction degree goes on the highest
    degree physical qubit. Each following logical qubit (the one most tied to
    those already placed) takes the free physical qubit minimising weighted
    distance to its placed partners; ties prefer higher device degree, then
    lower index.
    """
    n = circuit.width
    if n > device.size:
        raise RoutingError(f"circuit needs {n} qubits, {device.name} has {device.size}")
    weights = interaction_graph(circuit)
    partners: list[dict[int, int]] = [{} for _ in range(n)]
    for (a, b), w in weights.items():
        partners[a][b] = w
        partners[b][a] = w
    dist = device.distance
    free = set(range(device.size))
    l2p = [-1] * n

    def best_start() -> int:
        # Free qubit with most free neighbours, then highest degree, then lowest index.
        return min(free, key=lambda p: (-sum(q in free for q in device.neighbors[p]), -device.degree(p), p))

    remaining = set(range(n))
    while remaining:
        tied = [l for l in remaining if any(l2p[m] >= 0 for m in partners[l])]
        if tied:
            def pull(l):
                return (-sum(w for m, w in partners[l].items() if l2p[m] >= 0), -len(partners[l]), l)
            l = min(tied, key=pull)
            placed = [(l2p[m], w) for m, w in partners[l].items() if l2p[m] >= 0]
            p = min(free, key=lambda q: (sum(w * dist[q, r] for r, w in placed), -device.degree(q), q))
        else:
            l = min(remaining, key=lambda l: (-len(partners[l]), l))
            p = best_start() if partners[l] else min(free)
        l2p[l] = p
        free.discard(p)
        remaining.discard(l)
    return Layout.static(l2p)


def _embedding_order(adj: list[set[int]]) -> list[int]:
    """Non-isolated logical qubits, component by component (largest first), each in DFS
    order from a lowest-degree node so chains are walked end to end."""
    n = len(adj)
    seen: set[int] = set()
    comps = []
    for start in sorted(range(n), key=lambda l: (len(adj[l]), l)):
        if start in seen or not adj[start]:
            continue
        comp = []
        stack = [start]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            comp.append(v)
            stack.extend(sorted(adj[v] - seen, reverse=True))
        comps.append(comp)
    return [l for comp in sorted(comps, key=len, reverse=True) for l in comp]


def _embed(adj: list[set[int]], device: CouplingMap, defects: int, budget: int) -> list[int] | None:
    """Backtracking placement where at most ``defects`` interacting pairs sit at distance 2
    and all others are coupled. Candidates go fewest-free-neighbours first (Warnsdorff)."""
    n = len(adj)
    order = _embedding_order(adj)
    nbrs = device.neighbors
    dist = device.distance
    ring2 = [sorted({r for q in nbrs[p] for r in nbrs[q]} - {p} - set(nbrs[p]))
             for p in range(device.size)]
    l2p = [-1] * n
    used = [False] * device.size
    steps = 0
    left = defects

    def free_degree(p):
        return sum(1 for q in nbrs[p] if not used[q])

    def place(k: int) -> bool:
        nonlocal steps, left
        if k == len(order):
            return True
        l = order[k]
        placed = [l2p[m] for m in adj[l] if l2p[m] >= 0]
        if placed:
            pool = list(nbrs[placed[0]]) + (ring2[placed[0]] if left else [])
        else:
            pool = range(device.size)
        cands = []
        for q in pool:
            if used[q]:
                continue
            cost = 0
            for r in placed:
                d = dist[q, r]
                if d > 2:
                    cost = left + 1
                    break
                cost += d - 1
            if cost > left:
                continue
            if cost == 0 and left == 0 and free_degree(q) < len(adj[l]) - len(placed):
                continue
            cands.append((cost, free_degree(q), q))
        cands.sort()
        for cost, _, q in cands:
            steps += 1
            if steps > budget:
                return False
            l2p[l] = q
            used[q] = True
            left -= cost
            if place(k + 1):
                return True
            left += cost
            l2p[l] = -1
            used[q] = False
            if steps > budget:
                return False
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        if not place(0):
            return None
    finally:
        sys.setrecursionlimit(limit)
    free = (p for p in range(device.size) if not used[p])
    for l in range(n):
        if l2p[l] < 0:
            l2p[l] = next(free)
    return l2p


def _adjacency(circuit: Circuit, device: CouplingMap) -> list[set[int]] | None:
    """Interaction adjacency, or None when no low-defect placement can exist."""
    if circuit.width > device.size:
        return None
    weights = interaction_graph(circuit)
    adj: list[set[int]] = [set() for _ in range(circuit.width)]
    for a, b in weights:
        adj[a].add(b)
        adj[b].add(a)
    max_dev = max((device.degree(p) for p in range(device.size)), default=0)
    if len(weights) > len(device.edges) or any(len(a) > max_dev for a in adj):
        return None
    return adj


def perfect_layout(circuit: Circuit, device: CouplingMap, budget: int = 20000) -> Layout | None:
    """Placement under which every interacting pair is coupled, or None.

    Backtracking subgraph-monomorphism search that packs chains into snakes;
    gives up after ``budget`` placement attempts.
    """
    adj = _adjacency(circuit, device)
    found = None if adj is None else _embed(adj, device, 0, budget)
    return None if found is None else Layout.static(found)


def near_perfect_layout(circuit: Circuit, device: CouplingMap, max_defects: int = 6,
                        budget: int = 20000) -> Layout | None:
    """Like :func:`perfect_layout` but tolerating up to ``max_defects`` pairs at distance 2;
    the smallest defect count found wins."""
    adj = _adjacency(circuit, device)
    if adj is None:
        return None
    for k in range(max_defects + 1):
        found = _embed(adj, device, k, budget)
        if found is not None:
            return Layout.static(found)
    return None


def _sabre(units: list[_Unit], device: CouplingMap, l2p: list[int], emit: bool,
           lookahead: int = 20, weight: float = 0.5, decay_delta: float = 0.001,
           decay_reset: int = 5) -> tuple[list[Gate], list[int], int]:
    size = device.size
    dist = device.distance.tolist()
    nbrs = device.neighbors
    edges = device.edges
    n_units = len(units)
    succ: list[list[int]] = [[] for _ in range(n_units)]
    indeg = [0] * n_units
    last: dict[int, int] = {}
    for i, u in enumerate(units):
        preds = {last[q] for q in u.qubits if q in last}
        for p in preds:
            succ[p].append(i)
        indeg[i] = len(preds)
        for q in u.qubits:
            last[q] = i

    l2p = list(l2p)
    p2l = [-1] * size
    for l, p in enumerate(l2p):
        p2l[p] = l
    out: list[Gate] = []
    decay = [1.0] * size
    swaps = 0
    since_progress = 0
    since_reset = 0
    max_stall = 10 * size

    def adjacent(a, b):
        return (a, b) in edges or (b, a) in edges

    def do_swap(p, q):
        nonlocal swaps
        la, lb = p2l[p], p2l[q]
        p2l[p], p2l[q] = lb, la
        if la >= 0:
            l2p[la] = q
        if lb >= 0:
            l2p[lb] = p
        if emit:
            a, b = (p, q) if p < q else (q, p)
            out.extend((cx(a, b), cx(b, a), cx(a, b)))
        swaps += 1

    heap = [i for i in range(n_units) if indeg[i] == 0]
    heapq.heapify(heap)
    front: list[int] = []
    while heap or front:
        progressed = False
        blocked = []
        while heap:
            i = heapq.heappop(heap)
            qs = units[i].qubits
            if len(qs) == 2 and not adjacent(l2p[qs[0]], l2p[qs[1]]):
                blocked.append(i)
                continue
            if emit:
                for g in units[i].gates:
                    out.append(Gate(g.kind, tuple(l2p[q] for q in g.qubits), g.angle, g.tag))
            progressed = True
            for s in succ[i]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    heapq.heappush(heap, s)
        front = blocked
        if not front:
            break
        if progressed:
            since_progress = 0
            since_reset = 0
            decay = [1.0] * size

        if since_progress >= max_stall:
            # Release valve: walk the first blocked gate's qubits together along a shortest path.
            a, b = (l2p[q] for q in units[min(front)].qubits)
            while not adjacent(a, b):
                step = min(nbrs[a], key=lambda q: (dist[q][b], q))
                do_swap(a, step)
                a = step
            since_progress = 0
            heap = front
            heapq.heapify(heap)
            continue

        ext: list[tuple[int, int]] = []
        seen = set(front)
        queue = list(front)
        k = 0
        while k < len(queue) and len(ext) < lookahead:
            for s in succ[queue[k]]:
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
                    if len(units[s].qubits) == 2:
                        ext.append(units[s].qubits)
                        if len(ext) >= lookahead:
                            break
            k += 1
        front_pairs = [units[i].qubits for i in front]

        cands = set()
        for a, b in front_pairs:
            for p in (l2p[a], l2p[b]):
                for q in nbrs[p]:
                    cands.add((p, q) if p < q else (q, p))
        best = None
        best_score = 0.0
        for p, q in sorted(cands):
            def where(l):
                x = l2p[l]
                return q if x == p else p if x == q else x
            f = sum(dist[where(a)][where(b)] for a, b in front_pairs) / len(front_pairs)
            e = sum(dist[where(a)][where(b)] for a, b in ext) / len(ext) if ext else 0.0
            score = max(decay[p], decay[q]) * (f + weight * e)
            if best is None or score < best_score - 1e-12:
                best, best_score = (p, q), score
        p, q = best
        do_swap(p, q)
        decay[p] += decay_delta
        decay[q] += decay_delta
        since_progress += 1
        since_reset += 1
        if since_reset >= decay_reset:
            decay = [1.0] * size
            since_reset = 0
        heap = front
        heapq.heapify(heap)
    return out, l2p, swaps


def _check_native(circuit: Circuit) -> None:
    for g in circuit.gates:
        if g.kind.arity == 2 and g.kind is not GateKind.CX:
            raise RoutingError(f"route needs a native circuit, found {g.kind.value}")


def route(circuit: Circuit, device: CouplingMap, layout: Layout) -> tuple[Circuit, Layout]:
    """Insert SWAPs (as three CX) so every CX lands on a coupled pair."""
    _check_native(circuit)
    if len(layout.logical_to_physical) != circuit.width:
        raise RoutingError("layout size does not match circuit width")
    layout.validate(device)
    gates, final, _ = _sabre(_units(circuit), device, list(layout.logical_to_physical), emit=True)
    routed = Circuit.unchecked(device.size, gates, native=True, global_phase=circuit.global_phase)
    return routed, Layout(layout.logical_to_physical, tuple(final))


def count_swaps(circuit: Circuit, device: CouplingMap, layout: Layout) -> int:
    _, _, swaps = _sabre(_units(circuit), device, list(layout.logical_to_physical), emit=False)
    return swaps


def refine_layout(circuit: Circuit, device: CouplingMap, layout: Layout, rounds: int = 2) -> Layout:
    """Forward/backward routing passes; each backward pass's end mapping seeds the next start."""
    units = _units(circuit)
    rev = units[::-1]
    l2p = list(layout.logical_to_physical)
    for _ in range(rounds):
        _, mid, _ = _sabre(units, device, l2p, emit=False)
        _, l2p, _ = _sabre(rev, device, mid, emit=False)
    return Layout.static(l2p)


def choose_layout(circuit: Circuit, device: CouplingMap, trials: int = 3, rounds: int = 2,
                  seed: int = 0) -> Layout:
    """Best-effort placement: a perfect layout if the search finds one, else the candidate
    needing the fewest SWAPs among greedy, near-perfect and seeded random starts, each
    tried both as is and after forward/backward refinement."""
    perfect = perfect_layout(circuit, device)
    if perfect is not None:
        return perfect
    starts = [initial_layout(circuit, device)]
    near = near_perfect_layout(circuit, device)
    if near is not None:
        starts.append(near)
    rng = random.Random(seed)
    for _ in range(max(trials - 1, 0)):
        starts.append(Layout.static(rng.sample(range(device.size), circuit.width)))
    best, best_swaps = None, None
    for start in starts:
        for cand in (start, refine_layout(circuit, device, start, rounds)):
            swaps = count_swaps(circuit, device, cand)
            if best is None or swaps < best_swaps:
                best, best_swaps = cand, swaps
    return best


def verify_mapped(circuit: Circuit, device: CouplingMap) -> bool:
    if circuit.width > device.size:
        return False
    return all(device.has_edge(*g.qubits) for g in circuit.gates if g.kind.arity == 2)


__all__ = [
    "Layout", "RoutingError", "choose_layout", "count_swaps", "initial_layout", "interaction_graph",
    "near_perfect_layout", "perfect_layout",
    "refine_layout", "route", "verify_mapped",
]
