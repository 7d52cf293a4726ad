from collections import deque

import numpy as np
import pytest

from qprecomp.topology import (CouplingMap, TopologyError, complete, default_catalog, heavy_hex, line,
                               load_catalog, load_coupling, montreal, parse_coupling, quito,
                               select_device, washington)


def test_quito():
    q = quito()
    assert q.size == 5
    assert q.edges == {(0, 1), (1, 2), (1, 3), (3, 4)}
    assert q.degree(1) == 3 and q.has_edge(3, 1) and not q.has_edge(0, 4)


@pytest.mark.parametrize("device,size,edges", [(montreal, 27, 28), (washington, 127, 144)])
def test_heavy_hex_devices(device, size, edges):
    d = device()
    assert d.size == size and len(d.edges) == edges
    assert d.is_connected
    assert max(d.degree(p) for p in range(d.size)) == 3
    # Heavy-hex lattices have no triangles.
    for a, b in d.edges:
        assert not set(d.neighbors[a]) & set(d.neighbors[b])


def test_washington_matches_generator():
    assert heavy_hex(7, 15).edges == washington().edges


def test_distance_matches_bfs():
    d = montreal()
    for src in (0, 13, 26):
        seen = {src: 0}
        todo = deque([src])
        while todo:
            v = todo.popleft()
            for w in d.neighbors[v]:
                if w not in seen:
                    seen[w] = seen[v] + 1
                    todo.append(w)
        assert [seen[v] for v in range(d.size)] == d.distance[src].tolist()
    assert np.array_equal(d.distance, d.distance.T)


def test_text_round_trip(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text(montreal().to_text())
    assert load_coupling(path) == montreal()


@pytest.mark.parametrize("text", [
    "device bad 5\nedge 0 7\n",
    "device bad 3\nedge 1 1\n",
    "device bad 4\nedge 0 1\nedge 2 3\n",
    "device bad 3\nedge 0 1\nedge 1 0\nedge 1 2\n",
    "edge 0 1\n",
    "device bad 3\nbridge 0 1\n",
])
def test_malformed_maps(text):
    with pytest.raises(TopologyError):
        parse_coupling(text)


def test_comments_are_ignored():
    d = parse_coupling("# a line\ndevice tiny 2  # trailing\nedge 0 1\n")
    assert d.edges == {(0, 1)}


def test_synthetic_maps():
    assert len(line(6).edges) == 5 and line(6).distance[0, 5] == 5
    assert len(complete(5).edges) == 10 and complete(5).distance.max() == 1


@pytest.mark.parametrize("n,name", [(2, "ibmq_quito"), (4, "ibmq_quito"), (5, "ibmq_quito"),
                                    (6, "ibmq_montreal"), (27, "ibmq_montreal"),
                                    (28, "ibmq_washington"), (127, "ibmq_washington")])
def test_select_device(n, name):
    assert select_device(default_catalog(), n).name == name


def test_select_device_too_large():
    with pytest.raises(TopologyError):
        select_device(default_catalog(), 128)


def test_load_catalog_directory(tmp_path):
    for d in (quito(), line(8)):
        (tmp_path / f"{d.name}.txt").write_text(d.to_text())
    cat = load_catalog(tmp_path)
    assert [d.size for d in cat.devices] == [5, 8]
    assert select_device(cat, 7).size == 8


def test_coupling_map_rejects_bad_edges():
    with pytest.raises(TopologyError):
        CouplingMap.from_pairs("x", 3, [(0, 1), (1, 0), (1, 2)])
