"""Top-level Hamilton-Waterloo assembly.

Solves HWP(C_g[2^{k+2}mn]; gm, 2^k gn; alpha, beta) through the row-sum
machinery, decomposes K_v into complete blocks plus a complete equipartite
layer, blows up equipartite factors, and assembles certified HWP(v; M, N;
alpha, beta) solutions.  Classical ingredient factorizations (uniform
factorizations of K_v* and of K_t[z]) are provided by a chain of
certificate import, explicit small constructions, and seeded search; every
provider output is re-verified before use.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .checks import Check
from .groups import cyclic_group
from .perms import VList, hall_delta_permutation
from .rsm import (RowSumMatrix, RsmSpec, build_abelian_rsm, build_dihedral_rsm,
                  extend_columns, orders_profile, verify_rsm)
from .factor import (CayleyGraph, CompleteGraph, EquipartiteGraph, Factor,
                     TwoFactorization, factorization_from_json,
                     factorization_to_json, verify_factorization)

log = logging.getLogger("hwpkit")

INGREDIENTS_ENV = "HWP_INGREDIENTS"


class HwpParameterError(ValueError):
    """Necessary conditions fail (invalid parameters)."""


class HwpKnownException(Exception):
    """The instance falls in one of the possible-exception bullets."""

    def __init__(self, case: str):
        super().__init__(case)
        self.case = case


class IngredientNonexistent(Exception):
    """A classical ingredient is known not to exist."""


class IngredientNotFound(Exception):
    """Search/import could not produce an ingredient within budget."""


class IngredientUnavailable(Exception):
    """solve_hwp failed because an ingredient could not be obtained."""


# -- instances and admissibility -------------------------------------------


@dataclass(frozen=True)
class HwpInstance:
    v: int
    M: int
    N: int
    alpha: int
    beta: int
    g: int = 0
    m: int = 0
    n: int = 0
    k: int = 0
    ell: int = 0
    swapped: bool = False     # roles exchanged so that M/g is odd

    @property
    def s(self) -> Optional[int]:
        if self.ell and self.v % (4 * self.ell) == 0:
            return self.v // (4 * self.ell)
        return None


def make_instance(v: int, M: int, N: int, alpha: int, beta: int) -> HwpInstance:
    if min(v, M, N) < 1 or alpha < 0 or beta < 0:
        raise HwpParameterError("v, M, N must be positive and alpha, beta >= 0")
    g = math.gcd(M, N)
    Mn, Nn, swapped = M, N, False
    if (M // g) % 2 == 0:
        Mn, Nn, swapped = N, M, True
    mm, nn = Mn // g, Nn // g
    k = (nn & -nn).bit_length() - 1
    n = nn >> k
    return HwpInstance(v, M, N, alpha, beta, g=g, m=mm, n=n, k=k,
                       ell=math.lcm(M, N), swapped=swapped)


@dataclass(frozen=True)
class Admissible:
    note: str = ""


@dataclass(frozen=True)
class NecessaryFail:
    reason: str


@dataclass(frozen=True)
class KnownException:
    case: str


def check_admissible(inst: HwpInstance):
    """Necessary conditions, then the support window of the assembly."""
    v, M, N = inst.v, inst.M, inst.N
    if M <= 2 or N <= 2:
        return NecessaryFail(f"M and N must be divisors of v greater than 2 (got {M}, {N})")
    if v % M or v % N:
        return NecessaryFail(f"M and N must divide v ({M} or {N} does not divide {v})")
    want = (v - 1) // 2 if v % 2 else (v - 2) // 2
    if inst.alpha + inst.beta != want:
        return NecessaryFail(
            f"alpha + beta must be {want} for v = {v} (got {inst.alpha + inst.beta})")
    ell = inst.ell
    if (v // ell) % 4:
        return KnownException(f"4 does not divide v/lcm(M,N) = {v // ell}")
    s = v // (4 * ell)
    if s < 3:
        return KnownException(f"v/(4 lcm(M,N)) = {s} is in {{1, 2}} (v = 4lcm or 8lcm)")
    if inst.g in (1, 2):
        return KnownException(f"gcd(M,N) = {inst.g} is in {{1, 2}}")
    if s == 4 and inst.g % 2 == 1:
        return KnownException("v = 16 lcm(M,N) and gcd(M,N) is odd")
    if (inst.g, s) == (3, 6):
        return KnownException("v = 24 lcm(M,N) and gcd(M,N) = 3")
    note = ""
    if min(M, N) == 3:
        note = "M or N equals 3: outside the stated range (M, N > 3); construction attempted anyway"
    return Admissible(note)


def _subseed(seed: int, *tags) -> int:
    h = hashlib.blake2s(repr((seed,) + tags).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


# -- Theorem 5.1: HWP on the blown-up cycle ---------------------------------


@lru_cache(maxsize=None)
def solve_cg_blowup(g: int, k: int, m: int, n: int, alpha: int, beta: int,
                    seed: int = 0) -> TwoFactorization:
    """HWP(C_g[2^{k+2}mn]; gm, 2^k gn; alpha, beta): alpha factors of cycle
    length gm first, then beta of length 2^k gn.  Even pairs route through
    the abelian builder, odd pairs through the dihedral one (the two routes
    cover every split, since alpha = beta mod 2)."""
    u = 2 ** (k + 2) * m * n
    if alpha < 0 or beta < 0 or alpha + beta != u:
        raise ValueError(f"alpha + beta must equal 2^(k+2) m n = {u}")
    if g < 3:
        raise ValueError("g must be >= 3")
    if alpha % 2 == 0 and beta % 2 == 0:
        M = build_abelian_rsm(k + 1, m, n, k, alpha // 2, beta // 2, g, seed=seed)
    else:
        M = build_dihedral_rsm(RsmSpec(k, m, n, g, alpha, beta), seed=seed)
    from .factor import rsm_to_factorization
    tf = rsm_to_factorization(M)
    len_m, len_q = g * m, g * 2 ** k * n
    tf.factors.sort(key=lambda f: (f.cycle_length != len_m))
    got = tf.profile()
    if got != orders_profile(alpha, len_m, beta, len_q):
        raise RuntimeError(f"blow-up solve produced profile {dict(got)}")
    return tf


# -- K_v decomposition ------------------------------------------------------


@dataclass(frozen=True)
class KvDecomposition:
    v: int
    ell: int
    s: int
    t: int
    eps: int

    @property
    def block_size(self) -> int:
        return 4 * self.ell * self.eps

    @property
    def parts(self) -> list[range]:
        b = self.block_size
        return [range(p * b, (p + 1) * b) for p in range(self.t)]

    @property
    def g0_edge_count(self) -> int:
        b = self.block_size
        return self.t * b * (b - 1) // 2

    @property
    def g1_edge_count(self) -> int:
        b = self.block_size
        return self.t * (self.t - 1) // 2 * b * b


def decompose_Kv(v: int, ell: int, s: int) -> KvDecomposition:
    """K_v = t disjoint K_{4 ell eps} blocks plus K_t[4 ell eps]."""
    if s < 3:
        raise ValueError(f"s must be >= 3, got {s}")
    if v != 4 * ell * s:
        raise ValueError(f"v = {v} != 4 * {ell} * {s}")
    t, eps = (s // 2, 2) if (s >= 6 and s % 2 == 0) else (s, 1)
    dec = KvDecomposition(v, ell, s, t, eps)
    assert dec.g0_edge_count + dec.g1_edge_count == v * (v - 1) // 2
    return dec


# -- blow-up -----------------------------------------------------------------


@dataclass
class BlownFactorization:
    base: TwoFactorization      # a C_g-factorization of K_t[z]
    w: int

    @property
    def factors(self) -> list[list[list[int]]]:
        """Per base factor, its components: each g-cycle of base vertices
        becomes one C_g[w] component after replacing vertices by w clones."""
        return [[list(c) for c in f.cycles] for f in self.base.factors]

    @property
    def blown_graph(self) -> EquipartiteGraph:
        base = self.base.graph
        assert isinstance(base, EquipartiteGraph)
        return EquipartiteGraph(base.t, base.z * self.w)

    def component_edge_count(self, g: int) -> int:
        return g * self.w * self.w


def blow_up_factorization(tf: TwoFactorization, w: int) -> BlownFactorization:
    if w < 1:
        raise ValueError("w must be >= 1")
    if not isinstance(tf.graph, EquipartiteGraph):
        raise ValueError("blow-up expects a factorization of K_t[z]")
    chk = verify_factorization(tf.graph, tf)
    if not chk:
        raise ValueError(f"refusing to blow up an invalid factorization: {chk.reason}")
    return BlownFactorization(tf, w)


# -- classical ingredient providers ------------------------------------------


def walecki_hamiltonians(v: int) -> tuple[list[list[int]], Optional[list[tuple[int, int]]]]:
    """Hamilton decomposition of K_v (v odd) or K_v - I (v even), with the
    leftover perfect matching I in the even case.  Hub vertex is v - 1."""
    if v < 3:
        raise ValueError("v must be >= 3")
    hub = v - 1
    if v % 2 == 0:
        x = v // 2
        r = v - 1
        zig = [0]
        for i in range(1, x):
            zig += [i, r - i]
        cycles = [[hub] + [(sv + j) % r for sv in zig] for j in range(x - 1)]
        used = set()
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                used.add((min(a, b), max(a, b)))
        one = [(a, b) for a in range(v) for b in range(a + 1, v)
               if (a, b) not in used]
        if len(one) != v // 2:
            raise RuntimeError("Walecki leftover is not a perfect matching")
        return cycles, one
    x = (v - 1) // 2
    q = v - 1
    zig = [0]
    for i in range(1, x):
        zig += [i, q - i]
    zig.append(x)
    cycles = [[hub] + [(sv + j) % q for sv in zig] for j in range(x)]
    return cycles, None


def _bipartite_uniform_factors(z: int, c: int, off_a: int, off_b: int
                               ) -> Optional[list[list[list[int]]]]:
    """C_c-factorization of K_{z,z} by pairing difference classes (d, d+delta)
    with delta = z * 2/c; needs c = 2r with r even, r | z, z even."""
    if c % 2 or z % 2:
        return None
    r = c // 2
    if r < 2 or r % 2 or z % r:
        return None
    delta = z // r
    pairs = []
    seen = [False] * z
    for x0 in range(z):
        if seen[x0]:
            continue
        orbit = [(x0 + t * delta) % z for t in range(r)]
        for o in orbit:
            seen[o] = True
        for j in range(0, r, 2):
            pairs.append((orbit[j], orbit[j + 1]))
    factors = []
    for d, e in pairs:
        visited = [False] * z
        cycles = []
        for a0 in range(z):
            if visited[a0]:
                continue
            cyc = []
            a = a0
            while True:
                visited[a] = True
                cyc.append(off_a + a)
                cyc.append(off_b + (a + d) % z)
                a = (a + d - e) % z
                if a == a0:
                    break
            cycles.append(cyc)
        factors.append(cycles)
    return factors


def _all_zero_sum_rsm(group_moduli: Sequence[int], g: int, seed: int) -> RowSumMatrix:
    """RSM over an abelian group with every row sum zero (needs sum(G) = 0)."""
    from .groups import add, neg
    group = cyclic_group(*group_moduli)
    whole = VList(group, Counter({a: 1 for a in group.elements}))
    psi = hall_delta_permutation(group, whole, seed=seed)
    gi = group.index
    rows = []
    for x in group.elements:
        px = psi.apply(x)
        d = add(group, px, neg(group, x))
        rows.append((gi(neg(group, px)), gi(x), gi(d)))
    M = RowSumMatrix(group, tuple(range(group.order)), tuple(rows), "full")
    M = extend_columns(M, g - 3, seed=seed)
    chk = verify_rsm(M, Counter({1: group.order}))
    if not chk:
        raise RuntimeError(f"zero-sum RSM failed: {chk.reason}")
    return M


def _cg_zero_sum_factorization(g: int, w: int, seed: int) -> Optional[TwoFactorization]:
    """C_g-factorization of C_g[w] (w factors) via an all-zero-row-sum RSM.

    Even g: alternate identity/negation columns over Z_w.  Odd g: needs an
    abelian group of order w with zero element-sum (w odd or 4 | w); for
    w = 2 (mod 4) no such matrix exists (g * sum(S) != 0)."""
    if w == 1:
        # C_g[1] is the g-cycle itself: a single factor
        group = cyclic_group(1)
        gi = group.index((0,))
        M = RowSumMatrix(group, (gi,), ((gi,) * g,), "full")
    elif g % 2 == 0:
        group = cyclic_group(w)
        gi = group.index
        rows = []
        for x in group.elements:
            xm = gi(x)
            xn = gi(((-x[0]) % w,))
            rows.append(tuple(xm if j % 2 == 0 else xn for j in range(g)))
        M = RowSumMatrix(group, tuple(range(w)), tuple(rows), "full")
        chk = verify_rsm(M, Counter({1: w}))
        if not chk:
            raise RuntimeError(f"alternating RSM failed: {chk.reason}")
    elif w % 2 == 1:
        M = _all_zero_sum_rsm((w,), g, seed)
    elif w % 4 == 0:
        M = _all_zero_sum_rsm((2, 2, w // 4), g, seed)
    else:
        return None
    from .factor import rsm_to_factorization
    return rsm_to_factorization(M)


def _shift_cycles(factors: list[list[list[int]]], offset: int) -> list[list[list[int]]]:
    return [[[v + offset for v in c] for c in f] for f in factors]


def _map_cycles(factors: list[list[list[int]]], vmap) -> list[list[list[int]]]:
    return [[[vmap(v) for v in c] for c in f] for f in factors]


def _uniform_explicit(vp: int, c: int, seed: int
                      ) -> Optional[tuple[list[list[list[int]]], Optional[list[tuple[int, int]]]]]:
    """Explicit C_c-factorization of K_vp* (list of factors as cycle lists,
    plus the removed 1-factor when vp is even); None when no explicit route
    applies."""
    if c == vp:
        cycles, one = walecki_hamiltonians(vp)
        return [[cyc] for cyc in cycles], one

    if vp % 2 == 0:
        z = vp // 2
        if z % c == 0 and z >= c:
            bip = _bipartite_uniform_factors(z, c, 0, z)
            if bip is not None:
                sub = _uniform_explicit(z, c, seed)
                if sub is not None:
                    sub_factors, sub_one = sub
                    shifted = _shift_cycles(sub_factors, z)
                    factors = [fa + fb for fa, fb in zip(sub_factors, shifted)]
                    factors += bip
                    one = None
                    if sub_one is not None:
                        one = sub_one + [(a + z, b + z) for a, b in sub_one]
                    return factors, one

    # s' parts of size z, same parity as vp
    for z in sorted((d for d in range(c, vp, c) if vp % d == 0 and d % 2 == vp % 2),
                    reverse=True):
        sp = vp // z
        try:
            equi = provide_equipartite_factorization(sp, z, c, seed=_subseed(seed, "eq", z))
        except (IngredientNonexistent, IngredientNotFound, HwpParameterError, ValueError):
            continue
        sub = _uniform_explicit(z, c, seed)
        if sub is None:
            try:
                tf_sub = provide_uniform_factorization(z, c, seed=_subseed(seed, "u", z))
                sub = ([f.cycles for f in tf_sub.factors],
                       list(tf_sub.graph.one_factor) if tf_sub.graph.one_factor else None)
            except (IngredientNonexistent, IngredientNotFound):
                continue
        sub_factors, sub_one = sub
        factors = []
        for j in range(len(sub_factors)):
            merged: list[list[int]] = []
            for p in range(sp):
                merged += _shift_cycles([sub_factors[j]], p * z)[0]
            factors.append(merged)
        factors += [f.cycles for f in equi.factors]
        one = None
        if sub_one is not None:
            one = [(a + p * z, b + p * z) for p in range(sp) for a, b in sub_one]
        return factors, one
    return None


def _iter_uniform_factors(vertex_count: int, adjacency: dict[int, set[int]],
                          c: int, rng: random.Random, nodes: list[int],
                          budget: int):
    """Yield spanning sets of vertex-disjoint c-cycles inside the current
    edge set, in a randomized backtracking order.  The consumer may mutate
    the adjacency between yields as long as it restores it before resuming."""
    covered = [False] * vertex_count
    cycles: list[tuple[int, ...]] = []

    def place_next():
        start = -1
        for v in range(vertex_count):
            if not covered[v]:
                start = v
                break
        if start < 0:
            yield [list(cyc) for cyc in cycles]
            return
        covered[start] = True
        yield from dfs(start, [start])
        covered[start] = False

    def dfs(start, path):
        nodes[0] += 1
        if nodes[0] > budget:
            return
        last = path[-1]
        if len(path) == c:
            if start in adjacency[last]:
                cycles.append(tuple(path))
                yield from place_next()
                cycles.pop()
            return
        nbrs = [w for w in adjacency[last] if not covered[w]]
        rng.shuffle(nbrs)
        for w in nbrs:
            covered[w] = True
            path.append(w)
            yield from dfs(start, path)
            path.pop()
            covered[w] = False

    yield from place_next()


def _search_uniform_factorization(vertex_count: int, edges: set[tuple[int, int]],
                                  c: int, n_factors: int, seed: int,
                                  budget: int = 400_000, tries: int = 6
                                  ) -> Optional[list[list[list[int]]]]:
    """Full backtracking over the factor stack with randomized orders and
    a shared node budget per attempt."""
    for attempt in range(tries):
        rng = random.Random(_subseed(seed, "search", attempt))
        adjacency: dict[int, set[int]] = {v: set() for v in range(vertex_count)}
        for a, b in edges:
            adjacency[a].add(b)
            adjacency[b].add(a)
        nodes = [0]
        factors: list[list[list[int]]] = []

        def solve(level: int) -> bool:
            if level == n_factors:
                return True
            for fac in _iter_uniform_factors(vertex_count, adjacency, c, rng,
                                             nodes, budget):
                for cyc in fac:
                    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                        adjacency[a].discard(b)
                        adjacency[b].discard(a)
                factors.append(fac)
                if solve(level + 1):
                    return True
                factors.pop()
                for cyc in fac:
                    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                        adjacency[a].add(b)
                        adjacency[b].add(a)
                if nodes[0] > budget:
                    return False
            return False

        if solve(0):
            return factors
    return None


def _iter_ingredient_files(ingredients_dir) -> Iterable[Path]:
    dirs = []
    if ingredients_dir:
        dirs.append(Path(ingredients_dir))
    env = os.environ.get(INGREDIENTS_ENV)
    if env:
        dirs.append(Path(env))
    for d in dirs:
        if d.is_dir():
            yield from sorted(d.glob("*.json"))


def _import_factorization(ingredients_dir, matches, expected_profile) -> Optional[TwoFactorization]:
    for path in _iter_ingredient_files(ingredients_dir):
        try:
            doc = json.loads(path.read_text())
            if doc.get("kind") != "factorization":
                continue
            tf = factorization_from_json(doc)
        except (ValueError, KeyError, json.JSONDecodeError):
            continue
        if not matches(tf.graph):
            continue
        chk = verify_factorization(tf.graph, tf, expected_profile)
        if not chk:
            log.warning("rejecting ingredient certificate %s: %s", path.name, chk.reason)
            continue
        return tf
    return None


def provide_uniform_factorization(vp: int, c: int, seed: int = 0,
                                  ingredients_dir=None,
                                  budget: int = 400_000) -> TwoFactorization:
    """C_c-factorization of K_vp* (K_vp for odd vp, K_vp - I for even).

    Chain: known-nonexistence guard, certificate import, explicit
    constructions (Hamilton decomposition, bipartite pairing, recursive
    part splits), then seeded backtracking search."""
    if c < 3:
        raise ValueError(f"cycle length must be >= 3, got {c}")
    if vp < 3 or vp % c:
        raise ValueError(f"need c | v' and v' >= 3 (got v'={vp}, c={c})")
    if (c, vp) in ((3, 6), (3, 12)):
        raise IngredientNonexistent(f"no C_3-factorization of K_{vp}^*")

    n_factors = (vp - 1) // 2 if vp % 2 else (vp - 2) // 2
    profile = Counter({c: n_factors})

    def match(graph) -> bool:
        return (isinstance(graph, CompleteGraph) and graph.v == vp
                and (graph.one_factor is not None) == (vp % 2 == 0))

    imported = _import_factorization(ingredients_dir, match, profile)
    if imported is not None:
        return imported

    built = _uniform_explicit(vp, c, seed)
    if built is None:
        edges = {(a, b) for a in range(vp) for b in range(a + 1, vp)}
        one: Optional[list[tuple[int, int]]] = None
        if vp % 2 == 0:
            one = [(2 * i, 2 * i + 1) for i in range(vp // 2)]
            edges -= set(one)
        factors = _search_uniform_factorization(vp, edges, c, n_factors, seed, budget)
        if factors is None:
            raise IngredientNotFound(f"C_{c}-factorization of K_{vp}^*")
        built = factors, one

    factors, one = built
    graph = CompleteGraph(vp, tuple(tuple(e) for e in one) if one else None)
    tf = TwoFactorization(graph, [Factor(c, f) for f in factors])
    chk = verify_factorization(graph, tf, profile)
    if not chk:
        raise RuntimeError(f"uniform provider produced an invalid factorization: {chk.reason}")
    return tf


LIU_EXCEPTIONS = {(3, 3, 2), (3, 6, 2), (3, 3, 6), (6, 2, 6)}


def _rotational_equipartite(t: int, z: int, c: int, seed: int,
                            budget: int = 200_000) -> Optional[list[list[list[int]]]]:
    """K_t[z] as the circulant on Z_{tz} with parts u mod t; search
    (t-1)/2 base C_c-factors whose orbits under the rotation u -> u+t
    tile the edge set (t odd).  Returns contiguous-part labelled factors."""
    if t % 2 == 0 or ((t - 1) * z // 2) % z:
        return None
    N = t * z
    bases_needed = (t - 1) // 2
    rng = random.Random(_subseed(seed, "rot"))

    def orbit_id(u: int, v: int) -> tuple[int, int]:
        d = (v - u) % N
        if d > N - d:
            u, v, d = v, u, N - d
        elif d == N - d:
            return (d, min(u % t, v % t))
        return (d, u % t)

    adjacency = {u: [v for v in range(N) if (v - u) % t] for u in range(N)}
    for tries in range(20):
        used_orbits: set = set()
        bases: list[list[list[int]]] = []
        ok = True
        for _ in range(bases_needed):
            fac = _orbit_factor_search(N, t, adjacency, c, used_orbits,
                                       orbit_id, rng, budget)
            if fac is None:
                ok = False
                break
            bases.append(fac)
            for cyc in fac:
                for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                    used_orbits.add(orbit_id(a, b))
        if not ok:
            continue
        factors = []
        for base in bases:
            for j in range(z):
                factors.append([[((u + j * t) % N) for u in cyc] for cyc in base])
        # relabel: parts by residue mod t -> contiguous parts of size z
        relabel = lambda u: (u % t) * z + (u // t)
        return [[[relabel(u) for u in cyc] for cyc in f] for f in factors]
    return None


def _orbit_factor_search(N, t, adjacency, c, used_orbits, orbit_id, rng, budget):
    """One spanning C_c-factor whose edges lie in pairwise-distinct unused
    rotation orbits."""
    covered = [False] * N
    local_orbits: set = set()
    cycles: list[list[int]] = []
    nodes = [0]

    def edge_ok(a, b):
        oid = orbit_id(a, b)
        return oid not in used_orbits and oid not in local_orbits

    def place_next() -> bool:
        try:
            start = covered.index(False)
        except ValueError:
            return True
        path = [start]
        covered[start] = True

        def dfs() -> bool:
            nodes[0] += 1
            if nodes[0] > budget:
                return False
            last = path[-1]
            if len(path) == c:
                if start in adjacency[last] and edge_ok(last, start):
                    oid = orbit_id(last, start)
                    cycles.append(path[:])
                    local_orbits.add(oid)
                    if place_next():
                        return True
                    local_orbits.discard(oid)
                    cycles.pop()
                return False
            nbrs = [w for w in adjacency[last] if not covered[w] and edge_ok(last, w)]
            rng.shuffle(nbrs)
            for w in nbrs:
                oid = orbit_id(last, w)
                covered[w] = True
                path.append(w)
                local_orbits.add(oid)
                if dfs():
                    return True
                local_orbits.discard(oid)
                path.pop()
                covered[w] = False
            return False

        if dfs():
            return True
        covered[start] = False
        return False

    return cycles if place_next() else None


def _equipartite_blowup(t: int, z: int, c: int, seed: int, ingredients_dir,
                        budget: int) -> Optional[list[list[list[int]]]]:
    """K_t[z] = K_t[z1] blown by w: each C_c-factor of K_t[z1] blows into
    disjoint C_c[w] components, each factored into w C_c-factors."""
    for w in sorted((w for w in range(2, z + 1) if z % w == 0), reverse=True):
        z1 = z // w
        if (t * z1) % c or ((t - 1) * z1) % 2 or (t == 2 and c % 2):
            continue
        if (c, t, z1) in LIU_EXCEPTIONS:
            continue
        comp = _cg_zero_sum_factorization(c, w, _subseed(seed, "bw", w))
        if comp is None:
            continue
        try:
            base = provide_equipartite_factorization(
                t, z1, c, seed=_subseed(seed, "bz", z1),
                ingredients_dir=ingredients_dir, budget=budget)
        except (IngredientNonexistent, IngredientNotFound, ValueError):
            continue
        nsz = comp.graph.group.order          # = w
        factors = []
        for f in base.factors:
            for j in range(w):
                cycles: list[list[int]] = []
                for base_cycle in f.cycles:   # one C_c[w] component each
                    for cyc in comp.factors[j].cycles:
                        cycles.append([base_cycle[vid // nsz] * w + (vid % nsz)
                                       for vid in cyc])
                factors.append(cycles)
        return factors
    return None


def provide_equipartite_factorization(t: int, z: int, c: int, seed: int = 0,
                                      ingredients_dir=None,
                                      budget: int = 400_000) -> TwoFactorization:
    """C_c-factorization of K_t[z] ((t-1)z/2 factors)."""
    if c < 3 or t < 2 or z < 1:
        raise ValueError("need c >= 3, t >= 2, z >= 1")
    if (t * z) % c or ((t - 1) * z) % 2 or (t == 2 and c % 2):
        raise ValueError(
            f"inadmissible equipartite parameters (t={t}, z={z}, c={c})")
    if (c, t, z) in LIU_EXCEPTIONS:
        raise IngredientNonexistent(f"no C_{c}-factorization of K_{t}[{z}]")

    n_factors = (t - 1) * z // 2
    profile = Counter({c: n_factors})

    def match(graph) -> bool:
        return isinstance(graph, EquipartiteGraph) and graph.t == t and graph.z == z

    imported = _import_factorization(ingredients_dir, match, profile)
    if imported is not None:
        return imported

    factors: Optional[list[list[list[int]]]] = None
    if t == 2:
        factors = _bipartite_uniform_factors(z, c, 0, z)
    elif c == t and t % 2 == 1:
        comp = _cg_zero_sum_factorization(t, z, _subseed(seed, "ctz"))
        if comp is not None:
            hams, _ = walecki_hamiltonians(t)
            factors = []
            for ham in hams:
                for f in comp.factors:
                    cycles = [[ham[vid // z] * z + (vid % z) for vid in cyc]
                              for cyc in f.cycles]
                    factors.append(cycles)
    if factors is None:
        factors = _equipartite_blowup(t, z, c, seed, ingredients_dir, budget)
    if factors is None:
        factors = _rotational_equipartite(t, z, c, seed)
    if factors is None:
        edges = {(a, b) for a in range(t * z) for b in range(a + 1, t * z)
                 if a // z != b // z}
        factors = _search_uniform_factorization(t * z, edges, c, n_factors,
                                                seed, budget)
    if factors is None:
        raise IngredientNotFound(f"C_{c}-factorization of K_{t}[{z}]")

    graph = EquipartiteGraph(t, z)
    tf = TwoFactorization(graph, [Factor(c, f) for f in factors])
    chk = verify_factorization(graph, tf, profile)
    if not chk:
        raise RuntimeError(f"equipartite provider produced an invalid factorization: {chk.reason}")
    return tf


# -- certificates ------------------------------------------------------------


@dataclass
class HwpCertificate:
    v: int
    M: int
    N: int
    alpha: int
    beta: int
    one_factor: Optional[list[tuple[int, int]]]
    factors: list[Factor]      # cycle lengths in {M, N}; alpha of length M


def certificate_to_json(cert: HwpCertificate) -> dict:
    return {
        "schema": 1,
        "kind": "hwp-certificate",
        "instance": {"v": cert.v, "M": cert.M, "N": cert.N,
                     "alpha": cert.alpha, "beta": cert.beta},
        "one_factor": ([list(e) for e in cert.one_factor]
                       if cert.one_factor is not None else None),
        "factors": [{"cycle_length": f.cycle_length,
                     "cycles": [list(map(int, c)) for c in f.cycles]}
                    for f in cert.factors],
    }


def certificate_from_json(doc: dict) -> HwpCertificate:
    if doc.get("kind") != "hwp-certificate":
        raise ValueError("not an HWP certificate document")
    inst = doc["instance"]
    one = doc.get("one_factor")
    return HwpCertificate(
        int(inst["v"]), int(inst["M"]), int(inst["N"]),
        int(inst["alpha"]), int(inst["beta"]),
        [tuple(e) for e in one] if one is not None else None,
        [Factor(int(f["cycle_length"]), [list(map(int, c)) for c in f["cycles"]])
         for f in doc["factors"]],
    )


def verify_hwp_certificate(cert: HwpCertificate) -> Check:
    """alpha uniform C_M-factors and beta C_N-factors, each spanning and
    2-regular on v vertices, partitioning E(K_v) together with the
    1-factor when v is even."""
    v = cert.v
    want_factors = (v - 1) // 2 if v % 2 else (v - 2) // 2
    if cert.alpha + cert.beta != want_factors:
        return Check.failed(
            f"alpha + beta = {cert.alpha + cert.beta}, expected {want_factors}")
    if len(cert.factors) != want_factors:
        return Check.failed(f"{len(cert.factors)} factors, expected {want_factors}")
    profile = Counter(f.cycle_length for f in cert.factors)
    if profile != +orders_profile(cert.alpha, cert.M, cert.beta, cert.N):
        return Check.failed(f"factor length profile {dict(profile)} mismatch")

    all_codes = []
    for fi, f in enumerate(cert.factors):
        if f.cycle_length < 3:
            return Check.failed(f"factor {fi}: cycle length < 3")
        total = 0
        for cyc in f.cycles:
            if len(cyc) != f.cycle_length:
                return Check.failed(f"factor {fi}: non-uniform cycle")
            total += len(cyc)
        if total != v:
            return Check.failed(f"factor {fi}: does not span {v} vertices")
        us = np.concatenate([np.asarray(c, dtype=np.int64) for c in f.cycles])
        vs = np.concatenate([np.roll(np.asarray(c, dtype=np.int64), -1)
                             for c in f.cycles])
        srt = np.sort(us)
        if srt[0] != 0 or srt[-1] != v - 1 or np.any(np.diff(srt) != 1):
            return Check.failed(f"factor {fi}: repeated or missing vertex")
        if np.any(us == vs) or np.any(us < 0) or np.any(us >= v):
            return Check.failed(f"factor {fi}: invalid edge")
        all_codes.append(np.minimum(us, vs) * v + np.maximum(us, vs))

    if v % 2 == 0:
        if cert.one_factor is None:
            return Check.failed("even order needs the removed 1-factor")
        ivs = sorted(x for e in cert.one_factor for x in e)
        if len(cert.one_factor) != v // 2 or ivs != list(range(v)):
            return Check.failed("one_factor is not a perfect matching")
        ius = np.asarray([e[0] for e in cert.one_factor], dtype=np.int64)
        ivs2 = np.asarray([e[1] for e in cert.one_factor], dtype=np.int64)
        all_codes.append(np.minimum(ius, ivs2) * v + np.maximum(ius, ivs2))
    elif cert.one_factor is not None:
        return Check.failed("odd order admits no 1-factor")

    codes = np.sort(np.concatenate(all_codes))
    if codes.size != v * (v - 1) // 2:
        return Check.failed(f"{codes.size} edges covered, K_{v} has {v * (v - 1) // 2}")
    if np.any(np.diff(codes) == 0):
        dup = int(codes[np.nonzero(np.diff(codes) == 0)[0][0]])
        return Check.failed(f"edge {dup // v}-{dup % v} covered twice")
    return Check.passed()


# -- the assembly ------------------------------------------------------------


def solve_hwp(inst: HwpInstance, seed: int = 0, ingredients_dir=None) -> HwpCertificate:
    """Certified solution of HWP(v; M, N; alpha, beta) on the supported window."""
    adm = check_admissible(inst)
    if isinstance(adm, NecessaryFail):
        raise HwpParameterError(adm.reason)
    if isinstance(adm, KnownException):
        raise HwpKnownException(adm.case)

    v = inst.v
    if inst.alpha == 0 or inst.beta == 0:
        c = inst.N if inst.alpha == 0 else inst.M
        try:
            tf = provide_uniform_factorization(v, c, seed=_subseed(seed, "uop"),
                                               ingredients_dir=ingredients_dir)
        except (IngredientNonexistent, IngredientNotFound) as exc:
            raise IngredientUnavailable(str(exc)) from exc
        cert = HwpCertificate(
            v, inst.M, inst.N, inst.alpha, inst.beta,
            list(tf.graph.one_factor) if tf.graph.one_factor else None,
            tf.factors)
        chk = verify_hwp_certificate(cert)
        if not chk:
            raise RuntimeError(f"certificate verification failed: {chk.reason}")
        return cert

    # normalized roles: Mn = g m (m odd), Nn = 2^k g n
    Mn, Nn = (inst.N, inst.M) if inst.swapped else (inst.M, inst.N)
    an, bn = (inst.beta, inst.alpha) if inst.swapped else (inst.alpha, inst.beta)
    g, m, n, k, ell = inst.g, inst.m, inst.n, inst.k, inst.ell
    s = v // (4 * ell)
    dec = decompose_Kv(v, ell, s)
    t, eps, block = dec.t, dec.eps, dec.block_size
    w = 4 * ell // g                      # = 2^(k+2) m n

    half = 2 * ell * eps - 1              # factors obtained from each block
    a0, b0 = (half, 0) if an >= half else (0, half)
    a1, b1 = an - a0, bn - b0
    if a1 < 0 or b1 < 0:
        raise RuntimeError("block budget exceeds the requested counts")

    c0 = Mn if a0 else Nn
    try:
        base = provide_uniform_factorization(block, c0, seed=_subseed(seed, "block"),
                                             ingredients_dir=ingredients_dir)
        equi = provide_equipartite_factorization(t, g * eps, g,
                                                 seed=_subseed(seed, "equi"),
                                                 ingredients_dir=ingredients_dir)
    except (IngredientNonexistent, IngredientNotFound) as exc:
        raise IngredientUnavailable(str(exc)) from exc

    m_factors: list[Factor] = []
    n_factors: list[Factor] = []
    # G_0: union each block-level factor across the t blocks
    for f in base.factors:
        cycles = [[x + p * block for x in cyc]
                  for p in range(t) for cyc in f.cycles]
        (m_factors if c0 == Mn else n_factors).append(Factor(c0, cycles))
    one = [(a + p * block, b + p * block)
           for p in range(t) for a, b in base.graph.one_factor]

    blown = blow_up_factorization(equi, w)

    def clone(u: int, p: int) -> int:
        return (u // (g * eps)) * block + (u % (g * eps)) * w + p

    a_left, b_left = a1, b1
    for components in blown.factors:
        af = min(w, a_left)
        bf = w - af
        a_left -= af
        b_left -= bf
        sol = solve_cg_blowup(g, k, m, n, af, bf, seed=_subseed(seed, "cg", af))
        nsz = sol.graph.group.order
        for j in range(w):
            cycles: list[list[int]] = []
            for comp in components:
                for cyc in sol.factors[j].cycles:
                    cycles.append([clone(comp[vid // nsz], vid % nsz) for vid in cyc])
            length = Mn if j < af else Nn
            assert sol.factors[j].cycle_length == length
            (m_factors if j < af else n_factors).append(Factor(length, cycles))
    if a_left or b_left:
        raise RuntimeError("factor budget distribution failed")

    factors = sorted(m_factors + n_factors,
                     key=lambda f: f.cycle_length != inst.M)
    cert = HwpCertificate(v, inst.M, inst.N, inst.alpha, inst.beta, one, factors)
    chk = verify_hwp_certificate(cert)
    if not chk:
        raise RuntimeError(f"certificate verification failed: {chk.reason}")
    return cert
