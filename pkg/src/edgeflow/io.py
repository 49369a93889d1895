"""Plain-text readers and writers for graphs, flows and label sets.

Graph file: one edge per line, two whitespace-separated positive integers.
Flow file: ``i j value`` per line, meaning ``f(i, j) = value``.
Label file: one one-based edge index per line.
``#`` starts a comment in all three.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .graph import FlowNetwork, GraphError, build_network


def _records(path):
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def read_graph(path, **kwargs) -> FlowNetwork:
    edges = []
    for lineno, tok in _records(path):
        if len(tok) != 2:
            raise GraphError(f"{path}:{lineno}: expected two vertex ids")
        try:
            edges.append((int(tok[0]), int(tok[1])))
        except ValueError:
            raise GraphError(f"{path}:{lineno}: vertex ids must be integers") from None
    return build_network(edges, **kwargs)


def write_graph(path, net: FlowNetwork, header: str | None = None):
    ids = net.vertex_ids
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for i, j in net.edges:
            fh.write(f"{ids[i]} {ids[j]}\n")


def read_flows(path, net: FlowNetwork, atol: float = 0.0):
    """Read a flow file.

    Returns ``(indices, values)`` in file order (first occurrence), with
    values oriented along the reference orientation. A repeated record for
    the same edge must agree (within ``atol``) or ``ValueError`` is raised.
    """
    lookup = {v: k for k, v in enumerate(net.vertex_ids)}
    values: dict[int, float] = {}
    for lineno, tok in _records(path):
        if len(tok) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'i j value'")
        try:
            a, b, val = lookup[int(tok[0])], lookup[int(tok[1])], float(tok[2])
        except KeyError as exc:
            raise ValueError(f"{path}:{lineno}: unknown vertex {exc.args[0]}") from None
        if not np.isfinite(val):
            raise ValueError(f"{path}:{lineno}: non-finite flow value")
        try:
            r, sign = net.edge_id(a, b)
        except KeyError:
            raise ValueError(f"{path}:{lineno}: ({tok[0]}, {tok[1]}) is not an edge") from None
        val *= sign
        if r in values:
            if abs(values[r] - val) > atol:
                raise ValueError(
                    f"{path}:{lineno}: conflicting records for edge ({tok[0]}, {tok[1]})"
                )
            continue
        values[r] = val
    idx = np.fromiter(values.keys(), dtype=int, count=len(values))
    vals = np.fromiter(values.values(), dtype=float, count=len(values))
    return idx, vals


def read_full_flow(path, net: FlowNetwork) -> np.ndarray:
    """Read a flow file that must cover every edge."""
    idx, vals = read_flows(path, net)
    if len(idx) != net.m:
        raise ValueError(f"{path}: flow file covers {len(idx)} of {net.m} edges")
    f = np.empty(net.m)
    f[idx] = vals
    return f


def format_value(x: float) -> str:
    return repr(float(x))


def write_flows(path, net: FlowNetwork, f):
    f = np.asarray(f, dtype=float)
    if f.shape != (net.m,):
        raise ValueError(f"flow has shape {f.shape}, expected ({net.m},)")
    ids = net.vertex_ids
    with open(path, "w") as fh:
        for (i, j), v in zip(net.edges, f):
            fh.write(f"{ids[i]} {ids[j]} {format_value(v)}\n")


def read_labels(path, m: int) -> np.ndarray:
    """Read one-based edge indices; returns zero-based indices in file order."""
    out = []
    for lineno, tok in _records(path):
        r = int(tok[0])
        if not 1 <= r <= m:
            raise ValueError(f"{path}:{lineno}: edge index {r} outside [1, {m}]")
        out.append(r - 1)
    if len(set(out)) != len(out):
        raise ValueError(f"{path}: duplicate edge indices")
    return np.asarray(out, dtype=int)


def write_labels(path, indices):
    with open(path, "w") as fh:
        for r in indices:
            fh.write(f"{int(r) + 1}\n")


def read_tntp_flows(path):
    """Parse a TNTP ``*_flow.tntp`` file into net (non-directed) flows.

    Returns a dict ``{(a, b): value}`` with ``a < b`` holding
    ``volume(a -> b) - volume(b -> a)``.
    """
    net: dict[tuple[int, int], float] = {}
    with open(path) as fh:
        for line in fh:
            tok = line.replace(";", " ").split()
            if len(tok) < 3:
                continue
            try:
                a, b, vol = int(tok[0]), int(tok[1]), float(tok[2])
            except ValueError:
                continue  # header row
            if a == b:
                continue
            key, sign = ((a, b), 1.0) if a < b else ((b, a), -1.0)
            net[key] = net.get(key, 0.0) + sign * vol
    return net


def ingest_play_sequence(path, mode: str = "song"):
    """Turn a play sequence into a transition flow network.

    Each line is one play, either ``token`` or ``artist<TAB>title``. In
    ``artist`` mode only the first tab-separated field is used. Every
    consecutive pair of distinct tokens ``A, B`` adds one unit of flow from
    ``A`` to ``B``.

    Returns ``(net, flow, tokens)`` with ``tokens[v]`` naming vertex ``v``.
    """
    if mode not in ("song", "artist"):
        raise ValueError("mode must be 'song' or 'artist'")
    seq = []
    for line in Path(path).read_text().splitlines():
        line = line.rstrip("\n")
        if not line.strip():
            continue
        seq.append(line.split("\t", 1)[0].strip() if mode == "artist" else line.strip())
    ids: dict[str, int] = {}
    for t in seq:
        ids.setdefault(t, len(ids) + 1)
    counts: dict[tuple[int, int], float] = {}
    for s, t in zip(seq, seq[1:]):
        a, b = ids[s], ids[t]
        if a == b:
            continue
        key, sign = ((a, b), 1.0) if a < b else ((b, a), -1.0)
        counts[key] = counts.get(key, 0.0) + sign
    if not counts:
        raise ValueError(f"{path}: no transitions between distinct tokens")
    net = build_network(list(counts), warn_disconnected=False)
    flow = np.zeros(net.m)
    lookup = {v: k for k, v in enumerate(net.vertex_ids)}
    for (a, b), val in counts.items():
        r, sign = net.edge_id(lookup[a], lookup[b])
        flow[r] = sign * val
    tokens = sorted(ids, key=ids.__getitem__)
    return net, flow, [tokens[vid - 1] for vid in net.vertex_ids]
