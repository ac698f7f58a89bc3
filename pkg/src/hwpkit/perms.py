"""Delta-permutations: verification, Hall-type solver, and special permutations.

A Delta-permutation of an abelian group G is a permutation phi whose
difference multiset [phi(a) - a : a in G] equals a prescribed v-list Delta.
Existence for zero-sum Delta is classical; the solver here uses structured
fast paths plus randomized most-constrained-first backtracking with
escalating budgets (existence is guaranteed, so persistent failure is a bug).
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .checks import Check
from .groups import (CompleteMappingNonexistent, CompleteMappingNotFound,
                     Element, Group, add, cyclic_group, element_order,
                     find_complete_mapping, neg)


class VList:
    """Multiset of group elements with multiplicities (a v-list)."""

    __slots__ = ("group", "counts")

    def __init__(self, group: Group, items: Iterable[Element] | Counter | None = None):
        self.group = group
        self.counts: Counter = Counter()
        if items is not None:
            self.counts.update(items)
        for a, c in self.counts.items():
            if c < 1:
                raise ValueError(f"multiplicity must be >= 1, got {c} for {a}")
            if a not in group._index:
                raise ValueError(f"{a} is not an element of {group.descriptor()}")

    @staticmethod
    def from_pairs(group: Group, pairs: Iterable[tuple[int, Element]]) -> "VList":
        c: Counter = Counter()
        for mult, a in pairs:
            if mult < 0:
                raise ValueError(f"negative multiplicity {mult} for {a}")
            if mult:
                c[a] += mult
        return VList(group, c)

    def total(self) -> int:
        return sum(self.counts.values())

    def order_list(self) -> Counter:
        out: Counter = Counter()
        for a, c in self.counts.items():
            out[element_order(self.group, a)] += c
        return out

    def sum(self) -> Element:
        if not self.group.is_abelian:
            raise ValueError("multiset sums are only defined over abelian groups")
        acc = self.group.zero()
        for a, c in self.counts.items():
            t = c % element_order(self.group, a)
            for _ in range(t):
                acc = add(self.group, acc, a)
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, VList) and self.group == other.group and self.counts == other.counts

    def __repr__(self) -> str:
        return f"VList({self.format()})"

    def format(self) -> str:
        parts = [f"^{c} {self.group.format_element(a)}"
                 for a, c in sorted(self.counts.items(), key=lambda kv: self.group.index(kv[0]))]
        return "[" + ", ".join(parts) + "]"

    @staticmethod
    def parse(group: Group, text: str) -> "VList":
        body = text.strip()
        if body.startswith("["):
            if not body.endswith("]"):
                raise ValueError(f"unbalanced brackets in {text!r}")
            body = body[1:-1]
        parts, depth, cur = [], 0, ""
        for ch in body:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
            else:
                cur += ch
        if cur.strip():
            parts.append(cur)
        c: Counter = Counter()
        for part in parts:
            part = part.strip()
            m = re.match(r"\^\s*(\d+)\s*(\(.*\))$", part)
            if m:
                c[group.parse_element(m.group(2))] += int(m.group(1))
            else:
                c[group.parse_element(part)] += 1
        if not c:
            raise ValueError(f"could not parse v-list {text!r}")
        return VList(group, c)


@dataclass(frozen=True)
class Permutation:
    """Total bijection on the group, stored as images under canonical indexing."""

    group: Group
    images: tuple[int, ...]

    def __post_init__(self):
        n = self.group.order
        if len(self.images) != n or sorted(self.images) != list(range(n)):
            raise ValueError("images do not form a bijection on the element set")

    def apply_idx(self, i: int) -> int:
        return self.images[i]

    def apply(self, a: Element) -> Element:
        return self.group.elements[self.images[self.group.index(a)]]

    @staticmethod
    def identity(group: Group) -> "Permutation":
        return Permutation(group, tuple(range(group.order)))

    @staticmethod
    def from_map(group: Group, mapping: dict) -> "Permutation":
        images = [-1] * group.order
        for a, b in mapping.items():
            images[group.index(a)] = group.index(b)
        return Permutation(group, tuple(images))

    def as_map(self) -> dict:
        els = self.group.elements
        return {els[i]: els[j] for i, j in enumerate(self.images)}


def differences(group: Group, perm: Permutation) -> VList:
    """The difference multiset [phi(a) - a : a in G]; abelian groups only."""
    if not group.is_abelian:
        raise ValueError("difference lists are restricted to abelian groups")
    els = group.elements
    c: Counter = Counter()
    for i, j in enumerate(perm.images):
        c[add(group, els[j], neg(group, els[i]))] += 1
    return VList(group, c)


def verify_delta_permutation(group: Group, perm: Permutation, delta: VList) -> Check:
    if delta.total() != group.order:
        return Check.failed(
            f"v-list has {delta.total()} entries, group has order {group.order}")
    got = differences(group, perm)
    if got.counts != delta.counts:
        missing = delta.counts - got.counts
        sample = {group.format_element(a): c for a, c in list(missing.items())[:3]}
        return Check.failed(f"difference multiset mismatch, e.g. missing {sample}")
    return Check.passed()


class HallInfeasible(ValueError):
    """The necessary condition sum(Delta) = 0 fails (or sizes mismatch)."""


class HallSolverError(RuntimeError):
    """Budget exhausted on a theorem-guaranteed instance: solver bug."""


def hall_delta_permutation(group: Group, delta: VList, seed: int = 0,
                           budget: int | None = None,
                           pins: dict | None = None) -> Permutation:
    """A Delta-permutation of an abelian group with sum(Delta) = 0.

    ``pins`` maps elements x to required differences phi(x) - x; each pin
    consumes one copy from Delta.  Pins realize the constructions' "we can
    assume" normalizations; callers re-verify every output.
    """
    if not group.is_abelian:
        raise ValueError("Hall solver is abelian-only")
    n = group.order
    if delta.total() != n:
        raise HallInfeasible(f"v-list size {delta.total()} != group order {n}")
    if delta.sum() != group.zero():
        raise HallInfeasible(f"sum(Delta) = {group.format_element(delta.sum())} != 0")

    addt = group.add_table()
    idx = group.index
    counts: Counter = Counter({idx(a): c for a, c in delta.counts.items()})
    images = [-1] * n
    used_img = [False] * n

    if pins:
        for x, d in pins.items():
            xi, di = idx(x), idx(d)
            if counts[di] <= 0:
                raise HallInfeasible(
                    f"pin difference {group.format_element(d)} not available in Delta")
            y = addt[xi][di]
            if used_img[y] or images[xi] != -1:
                raise HallInfeasible("conflicting pins")
            counts[di] -= 1
            images[xi] = y
            used_img[y] = True
        counts = +counts

    free = [x for x in range(n) if images[x] == -1]
    if not free:
        return Permutation(group, tuple(images))

    # fast path: constant difference -> translation
    if len(counts) == 1:
        (d, _), = counts.items()
        trial, tused, ok = images[:], used_img[:], True
        for x in free:
            y = addt[x][d]
            if tused[y]:
                ok = False
                break
            trial[x] = y
            tused[y] = True
        if ok:
            return Permutation(group, tuple(trial))

    # fast path: Delta = whole group -> lift a complete mapping
    if not pins and len(counts) == n:
        try:
            pi = find_complete_mapping(group, seed=seed)
            return Permutation(group, tuple(addt[x][pi[x]] for x in range(n)))
        except (CompleteMappingNonexistent, CompleteMappingNotFound):
            pass

    # strategy ladder: cheap backtracking, min-conflicts repair for the
    # dense balanced instances backtracking dislikes, then escalation
    base = budget if budget is not None else max(2000, 30 * n)
    for attempt in range(2):
        rng = random.Random((seed * 0x9E3779B1 + attempt) & 0xFFFFFFFF)
        res = _hall_backtrack(addt, dict(counts), images[:], used_img[:],
                              set(free), rng, base)
        if res is not None:
            return Permutation(group, tuple(res))
    for attempt in range(8):
        rng = random.Random((seed * 0xC2B2AE35 + attempt) & 0xFFFFFFFF)
        res = _hall_min_conflicts(addt, counts, images[:], free, rng,
                                  max(300_000, 600 * n))
        if res is not None:
            return Permutation(group, tuple(res))
    for attempt in range(5):
        rng = random.Random((seed * 0x9E3779B1 + 11 + attempt) & 0xFFFFFFFF)
        res = _hall_backtrack(addt, dict(counts), images[:], used_img[:],
                              set(free), rng, base * (4 ** attempt))
        if res is not None:
            return Permutation(group, tuple(res))
    if n <= 10:
        res = _hall_backtrack(addt, dict(counts), images[:], used_img[:],
                              set(free), random.Random(seed), None)
        if res is not None:
            return Permutation(group, tuple(res))
    raise HallSolverError(
        f"no Delta-permutation found for {delta.format()} on {group.descriptor()} "
        "(existence is guaranteed when unpinned; check pin feasibility)")


def _hall_min_conflicts(addt, counts, images, free, rng, max_steps):
    """Min-conflicts repair: keep the difference counts exact throughout
    and swap class assignments between free elements until no two images
    collide.  Pinned elements stay frozen in their buckets."""
    n = len(addt)
    pool: list[int] = []
    for d, c in counts.items():
        pool.extend([d] * c)
    rng.shuffle(pool)
    free_list = list(free)
    assign = {x: d for x, d in zip(free_list, pool)}
    img = images[:]
    owners: list[set] = [set() for _ in range(n)]
    for x, y in enumerate(images):
        if y >= 0:
            owners[y].add(x)
    for x in free_list:
        y = addt[x][assign[x]]
        img[x] = y
        owners[y].add(x)
    conf_set = {x for x in free_list if len(owners[img[x]]) > 1}

    for _ in range(max_steps):
        if not conf_set:
            return img
        x = rng.choice(tuple(conf_set))
        y_el = free_list[rng.randrange(len(free_list))]
        if y_el == x:
            continue
        ix, iy = img[x], img[y_el]
        nix, niy = addt[x][assign[y_el]], addt[y_el][assign[x]]
        affected = {ix, iy, nix, niy}
        c_before = sum(max(0, len(owners[b]) - 1) for b in affected)
        owners[ix].discard(x)
        owners[iy].discard(y_el)
        owners[nix].add(x)
        owners[niy].add(y_el)
        c_after = sum(max(0, len(owners[b]) - 1) for b in affected)
        # greedy with sideways moves; restarts handle local minima
        if c_after <= c_before:
            assign[x], assign[y_el] = assign[y_el], assign[x]
            img[x], img[y_el] = nix, niy
            for b in affected:
                over = len(owners[b]) > 1
                for v in owners[b]:
                    if v not in assign:
                        continue
                    if over:
                        conf_set.add(v)
                    else:
                        conf_set.discard(v)
        else:
            owners[nix].discard(x)
            owners[niy].discard(y_el)
            owners[ix].add(x)
            owners[iy].add(y_el)
    return None


def _hall_backtrack(addt, counts, images, used_img, pending, rng, budget):
    """Iterative most-constrained-first DFS over element -> difference choices."""
    classes = [d for d, c in counts.items() if c > 0]
    nodes = 0
    stack: list[tuple[int, int, int, list[int]]] = []  # (x, d, y, remaining options)

    while pending:
        best_x, best_opts = -1, None
        for x in pending:
            row = addt[x]
            opts = [d for d in classes if counts[d] > 0 and not used_img[row[d]]]
            if best_opts is None or len(opts) < len(best_opts):
                best_x, best_opts = x, opts
                if len(opts) <= 1:
                    break
        rng.shuffle(best_opts)
        while not best_opts:
            if not stack:
                return None
            px, pd, py, popts = stack.pop()
            counts[pd] += 1
            used_img[py] = False
            images[px] = -1
            pending.add(px)
            best_x, best_opts = px, popts
        nodes += 1
        if budget is not None and nodes > budget:
            return None
        d = best_opts[0]
        y = addt[best_x][d]
        counts[d] -= 1
        used_img[y] = True
        images[best_x] = y
        pending.discard(best_x)
        stack.append((best_x, d, y, best_opts[1:]))
    return images


def normalize_delta_permutation(group: Group, perm: Permutation, x: Element,
                                delta: Element) -> Permutation:
    """Relabel so that phi'(x) - x = delta, preserving the difference multiset."""
    if not group.is_abelian:
        raise ValueError("normalization is abelian-only")
    els = group.elements
    a_j = None
    for i, j in enumerate(perm.images):
        if add(group, els[j], neg(group, els[i])) == delta:
            a_j = els[i]
            break
    if a_j is None:
        raise ValueError(
            f"{group.format_element(delta)} is not a difference of the permutation")
    shift = add(group, neg(group, a_j), x)  # relabel b = a + shift
    images = [-1] * group.order
    for i, j in enumerate(perm.images):
        b = add(group, els[i], shift)
        images[group.index(b)] = group.index(add(group, els[j], shift))
    return Permutation(group, tuple(images))


# -- the two explicit special permutations ------------------------------


def _matching_to_permutation(group: Group, edges: set[frozenset]) -> Permutation:
    images = list(range(group.order))
    seen: set = set()
    for e in edges:
        p, q = tuple(e)
        if p in seen or q in seen:
            raise ValueError("H is not a matching")
        seen.update((p, q))
        images[group.index(p)] = group.index(q)
        images[group.index(q)] = group.index(p)
    return Permutation(group, tuple(images))


def special_perm_1(m: int, n: int) -> tuple[Group, Permutation, VList]:
    """Matching-swap permutation of Z_m x Z_{2n} (m odd): one repeated zero
    difference, every other element except (0, n) once; fixes (0, 0) and
    (-(m-1)/2, floor((n+1)/2) + ((m-1)/2) n)."""
    if m < 1 or m % 2 == 0:
        raise ValueError(f"m must be odd >= 1, got {m}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    group = cyclic_group(m, 2 * n)
    q = 2 * n
    u = (n + 1) // 2

    f_edges = [(j % q, (-j) % q) for j in range(1, (n - 1) // 2 + 1)]
    f_edges += [(j % q, (-j + 1) % q) for j in range((n + 3) // 2, n + 1)]

    edges: set[frozenset] = set()
    half = (m - 1) // 2
    for i in range(0, half + 1):
        for (y1, y2) in f_edges:
            for x in {i % m, (-i) % m}:
                p = (x, (y1 + i * n) % q)
                p2 = ((-x) % m, (y2 + i * n) % q)
                edges.add(frozenset((p, p2)))
    for i in range(1, half + 1):
        edges.add(frozenset(((i % m, (i * n) % q), ((-i) % m, (-i * n) % q))))
        edges.add(frozenset((((-i + 1) % m, (u + i * n + n) % q), (i % m, (u + i * n) % q))))

    assert len(edges) == m * n - 1, f"H has {len(edges)} edges, expected {m * n - 1}"
    perm = _matching_to_permutation(group, edges)
    fixed1 = (0, 0)
    fixed2 = ((-half) % m, (u + half * n) % q)
    assert perm.apply(fixed1) == fixed1 and perm.apply(fixed2) == fixed2, \
        "special permutation 1 does not fix the stated points"
    delta = special_perm_1_delta(group)
    chk = verify_delta_permutation(group, perm, delta)
    assert chk, f"special permutation 1 ({m},{n}): {chk.reason}"
    return group, perm, delta


def special_perm_1_delta(group: Group) -> VList:
    m, q = group.moduli
    n = q // 2
    c: Counter = Counter({a: 1 for a in group.elements if a != (0, n % q)})
    c[(0, 0)] += 1
    return VList(group, c)


def special_perm_2(m: int, n: int) -> tuple[Group, Permutation, VList]:
    """Explicit permutation of Z_m x Z_{2n} (m odd >= 1, n odd >= 3) with a
    3-cycle on (0,0), (0,n), (0,n+2) and a shifted remainder."""
    if m < 1 or m % 2 == 0:
        raise ValueError(f"m must be odd >= 1, got {m}")
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd >= 3, got {n}")
    group = cyclic_group(m, 2 * n)
    q = 2 * n
    cyc = {(0, 0): (0, n % q), (0, n % q): (0, (n + 2) % q), (0, (n + 2) % q): (0, 0)}
    bumped = {((-1) % m, 0), ((-1) % m, n % q), ((-1) % m, (n + 2) % q)} - set(cyc)
    mapping = {}
    for a in group.elements:
        if a in cyc:
            mapping[a] = cyc[a]
        elif a in bumped:
            mapping[a] = ((a[0] + 2) % m, a[1])
        else:
            mapping[a] = ((a[0] + 1) % m, a[1])
    perm = Permutation.from_map(group, mapping)
    delta = special_perm_2_delta(group)
    chk = verify_delta_permutation(group, perm, delta)
    assert chk, f"special permutation 2 ({m},{n}): {chk.reason}"
    return group, perm, delta


def special_perm_2_delta(group: Group) -> VList:
    m, q = group.moduli
    n = q // 2
    return VList.from_pairs(group, [
        (2 * m * n - 6, (1 % m, 0)),
        (3, (2 % m, 0)),
        (1, (0, 2 % q)),
        (1, (0, (n - 2) % q)),
        (1, (0, n % q)),
    ])
