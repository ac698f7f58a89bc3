"""Graphs and 2-factorizations: blown-up cycles C_g[Gamma, S], complete and
complete equipartite graphs, the row-sum-matrix-to-factorization conversion,
and independent certificate verifiers.

Edge convention for C_g[Gamma, S]: vertices Z_g x Gamma, edges
(i, x)(i+1, x + d) for d in S (the Cayley graph of Z_g x Gamma with
connection set {1} x S under right translation).  For a row (s_1, ..., s_g)
the walk ascending through the columns closes after g * ord(sigma) steps,
where sigma = s_1 + ... + s_g is the left-to-right row sum; this holds in
any group, which is what the uniform-factor profile needs.

Vertices are integers; Cayley vertex (i, x) has id i * |Gamma| + index(x).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .checks import Check
from .groups import Element, Group, parse_group
from .rsm import RowSumMatrix, row_sum_orders


@dataclass(frozen=True)
class CayleyGraph:
    g: int
    group: Group
    connection: tuple[int, ...]          # sorted element indices (the set S)

    def __post_init__(self):
        if self.g < 3:
            raise ValueError(f"g must be >= 3, got {self.g}")
        if not self.connection:
            raise ValueError("connection set must be nonempty")

    @property
    def vertex_count(self) -> int:
        return self.g * self.group.order

    @property
    def edge_count(self) -> int:
        return self.g * self.group.order * len(self.connection)

    @property
    def degree(self) -> int:
        return 2 * len(self.connection)

    def vertex_id(self, column: int, x: Element) -> int:
        return column * self.group.order + self.group.index(x)

    def vertex_label(self, vid: int) -> str:
        n = self.group.order
        return f"({vid // n},{self.group.format_element(self.group.elements[vid % n])})"

    def has_edge(self, u: int, v: int) -> bool:
        n = self.group.order
        cu, cv = u // n, v // n
        if (cv - cu) % self.g == 1:
            pass
        elif (cu - cv) % self.g == 1:
            u, v = v, u
            cu, cv = cv, cu
        else:
            return False
        addt, negt = self.group.add_table(), self.group.neg_table()
        d = addt[negt[u % n]][v % n]
        return d in set(self.connection)

    def descriptor(self) -> dict:
        doc = {"type": "cayley", "g": self.g, "group": self.group.descriptor()}
        if len(self.connection) == self.group.order:
            doc["connection"] = "full"
        else:
            els = self.group.elements
            doc["connection"] = [self.group.format_element(els[i]) for i in self.connection]
        return doc


@dataclass(frozen=True)
class CompleteGraph:
    v: int
    one_factor: Optional[tuple[tuple[int, int], ...]] = None   # K_v minus I

    @property
    def vertex_count(self) -> int:
        return self.v

    @property
    def edge_count(self) -> int:
        base = self.v * (self.v - 1) // 2
        return base - (len(self.one_factor) if self.one_factor else 0)

    def descriptor(self) -> dict:
        doc: dict = {"type": "complete", "v": self.v,
                     "minus_one_factor": self.one_factor is not None}
        if self.one_factor is not None:
            doc["one_factor"] = [list(e) for e in self.one_factor]
        return doc


@dataclass(frozen=True)
class EquipartiteGraph:
    t: int
    z: int       # parts are contiguous: part(v) = v // z

    @property
    def vertex_count(self) -> int:
        return self.t * self.z

    @property
    def edge_count(self) -> int:
        return self.t * (self.t - 1) // 2 * self.z * self.z

    def descriptor(self) -> dict:
        return {"type": "equipartite", "t": self.t, "z": self.z}


VertexGraph = Union[CayleyGraph, CompleteGraph, EquipartiteGraph]


def graph_from_descriptor(doc: dict) -> VertexGraph:
    kind = doc["type"]
    if kind == "cayley":
        group = parse_group(doc["group"])
        conn = doc["connection"]
        if conn == "full":
            connection = tuple(range(group.order))
        else:
            connection = tuple(sorted(group.index(group.parse_element(t)) for t in conn))
        return CayleyGraph(doc["g"], group, connection)
    if kind == "complete":
        one = doc.get("one_factor")
        return CompleteGraph(doc["v"],
                             tuple(tuple(e) for e in one) if one else None)
    if kind == "equipartite":
        return EquipartiteGraph(doc["t"], doc["z"])
    raise ValueError(f"unknown graph type {kind!r}")


def build_cayley_graph(g: int, group: Group, connection: Iterable[Element]) -> CayleyGraph:
    """C_g[Gamma, S]; S given as group elements."""
    idxs = tuple(sorted(group.index(e) for e in connection))
    if len(set(idxs)) != len(idxs):
        raise ValueError("connection set has repeated elements")
    return CayleyGraph(g, group, idxs)


@dataclass
class Factor:
    cycle_length: int
    cycles: list[list[int]]


@dataclass
class TwoFactorization:
    graph: VertexGraph
    factors: list[Factor]

    def profile(self) -> Counter:
        out: Counter = Counter()
        for f in self.factors:
            out[f.cycle_length] += 1
        return out


# -- Theorem 2.5: rows to factors -----------------------------------------


def rsm_to_factorization(M: RowSumMatrix) -> TwoFactorization:
    """One 2-factor per row of the matrix; row r's factor uses, between
    columns j-1 and j, the edges (j-1, x)(j, x + s_j); its cycles have
    length g * ord(row sum).  Output is verified before returning."""
    group = M.group
    n = group.order
    g = M.g
    graph = CayleyGraph(g, group, tuple(sorted(M.support)))
    addt = group.add_table()
    ords = group.order_of_idx()

    factors: list[Factor] = []
    for row in M.rows:
        prefix = [0] * (g + 1)
        for j in range(g):
            prefix[j + 1] = addt[prefix[j]][row[j]]
        sigma = prefix[g]
        length = g * ords[sigma]
        covered = bytearray(n)
        cycles: list[list[int]] = []
        for x0 in range(n):
            if covered[x0]:
                continue
            cyc: list[int] = []
            cur = x0
            for _ in range(ords[sigma]):
                covered[cur] = 1
                for j in range(g):
                    cyc.append(j * n + addt[cur][prefix[j]])
                cur = addt[cur][sigma]
            if cur != x0:
                raise RuntimeError("walk failed to close (construction bug)")
            cycles.append(cyc)
        factors.append(Factor(length, cycles))

    out = TwoFactorization(graph, factors)
    expected = Counter({g * o: c for o, c in row_sum_orders(M).items()})
    chk = verify_factorization(out.graph, out, expected)
    if not chk:
        raise RuntimeError(f"factorization self-check failed: {chk.reason}")
    return out


# -- verification ----------------------------------------------------------


def _cycle_arrays(cycles: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    us = np.concatenate([np.asarray(c, dtype=np.int64) for c in cycles])
    vs = np.concatenate([np.roll(np.asarray(c, dtype=np.int64), -1) for c in cycles])
    return us, vs


def _edges_valid(graph: VertexGraph, us: np.ndarray, vs: np.ndarray) -> bool:
    if isinstance(graph, CayleyGraph):
        n = graph.group.order
        g = graph.g
        cu, cv = us // n, vs // n
        eu, ev = us % n, vs % n
        fwd = (cv - cu) % g == 1
        bwd = (cu - cv) % g == 1
        if not np.all(fwd | bwd):
            return False
        lo_e = np.where(fwd, eu, ev)
        hi_e = np.where(fwd, ev, eu)
        npa, npn = graph.group.np_add(), graph.group.np_neg()
        d = npa[npn[lo_e], hi_e]
        mask = np.zeros(n, dtype=bool)
        mask[list(graph.connection)] = True
        return bool(np.all(mask[d]))
    if isinstance(graph, CompleteGraph):
        if np.any(us == vs):
            return False
        if graph.one_factor:
            v = graph.v
            codes = np.minimum(us, vs) * v + np.maximum(us, vs)
            banned = np.asarray([min(a, b) * v + max(a, b)
                                 for a, b in graph.one_factor], dtype=np.int64)
            return not bool(np.any(np.isin(codes, banned)))
        return True
    if isinstance(graph, EquipartiteGraph):
        return not bool(np.any(us // graph.z == vs // graph.z))
    raise TypeError(f"unknown graph {graph!r}")


def verify_two_factor(graph: VertexGraph, cycles: Sequence[Sequence[int]],
                      expected_len: int) -> Check:
    """Vertex-disjoint cycles covering all vertices, every edge in the
    graph, every cycle of the expected length."""
    if expected_len < 3:
        return Check.failed(f"cycle length {expected_len} < 3")
    for c in cycles:
        if len(c) != expected_len:
            return Check.failed(
                f"cycle of length {len(c)}, expected {expected_len}")
    vcount = graph.vertex_count
    if sum(len(c) for c in cycles) != vcount:
        return Check.failed("cycles do not cover the vertex set exactly")
    us, vs = _cycle_arrays(cycles)
    order = np.sort(us)
    if order[0] != 0 or order[-1] != vcount - 1 or np.any(np.diff(order) != 1):
        return Check.failed("cycles repeat or miss vertices")
    if not _edges_valid(graph, us, vs):
        return Check.failed("factor uses an edge outside the graph")
    return Check.passed()


def verify_factorization(graph: VertexGraph, tf: TwoFactorization,
                         expected_profile: Counter | None = None) -> Check:
    """Every factor is a valid uniform 2-factor, the (length, count)
    profile matches, and the factor edge sets partition E(graph)."""
    if expected_profile is not None:
        got = tf.profile()
        want = +Counter(expected_profile)
        if got != want:
            return Check.failed(f"factor profile {dict(got)} != expected {dict(want)}")
    vcount = graph.vertex_count
    all_codes = []
    for fi, f in enumerate(tf.factors):
        chk = verify_two_factor(graph, f.cycles, f.cycle_length)
        if not chk:
            return Check.failed(f"factor {fi}: {chk.reason}")
        us, vs = _cycle_arrays(f.cycles)
        all_codes.append(np.minimum(us, vs) * vcount + np.maximum(us, vs))
    codes = np.sort(np.concatenate(all_codes)) if all_codes else np.asarray([], dtype=np.int64)
    if codes.size != graph.edge_count:
        return Check.failed(
            f"{codes.size} edges in factors, graph has {graph.edge_count}")
    if codes.size and np.any(np.diff(codes) == 0):
        dup = int(codes[np.nonzero(np.diff(codes) == 0)[0][0]])
        return Check.failed(f"edge {dup // vcount}-{dup % vcount} covered twice")
    return Check.passed()


# -- serialization ----------------------------------------------------------


def factorization_to_json(tf: TwoFactorization, include_labels: bool = True) -> dict:
    doc: dict = {
        "schema": 1,
        "kind": "factorization",
        "graph": tf.graph.descriptor(),
        "edge_rule": "right-translation",
        "factors": [{"cycle_length": f.cycle_length,
                     "cycles": [list(map(int, c)) for c in f.cycles]}
                    for f in tf.factors],
    }
    if include_labels and isinstance(tf.graph, CayleyGraph):
        doc["vertex_labels"] = [tf.graph.vertex_label(v)
                                for v in range(tf.graph.vertex_count)]
    return doc


def factorization_from_json(doc: dict) -> TwoFactorization:
    if doc.get("kind") != "factorization":
        raise ValueError("not a factorization document")
    graph = graph_from_descriptor(doc["graph"])
    factors = [Factor(int(f["cycle_length"]), [list(map(int, c)) for c in f["cycles"]])
               for f in doc["factors"]]
    return TwoFactorization(graph, factors)
