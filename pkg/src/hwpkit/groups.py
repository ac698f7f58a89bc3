"""Finite group arithmetic: cyclic products and generalized dihedral groups.

Elements are plain int tuples reduced to canonical representatives:
cyclic kind (a_1, ..., a_r) with 0 <= a_i < modulus_i, dihedral kind
(x_1, x_2, tau) for the semidirect product (Z_m x Z_{2^{k+1}n}) x| Z_2
with the inversion action.  Every group carries a fixed canonical
enumeration (row-major over coordinates, tau slowest); index-based
arithmetic through Cayley tables is the fast path used by the heavier
modules.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Optional

import numpy as np

Element = tuple

CYCLIC = "cyclic-product"
DIHEDRAL = "generalized-dihedral"


class GroupKindError(ValueError):
    """Operation applied to the wrong group kind."""


@dataclass(frozen=True)
class Group:
    kind: str
    moduli: tuple[int, ...]          # dihedral: (m, 2^{k+1} n)
    m: int = 0                       # dihedral parameters, 0 for cyclic kind
    n: int = 0
    k: int = -1
    elements: tuple[Element, ...] = field(repr=False, default=())
    _index: dict = field(repr=False, default_factory=dict, compare=False)
    _tables: dict = field(repr=False, default_factory=dict, compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_dihedral(self) -> bool:
        return self.kind == DIHEDRAL

    @property
    def is_abelian(self) -> bool:
        # the inversion action is trivial exactly when both moduli divide 2
        if not self.is_dihedral:
            return True
        return self.m == 1 and self.moduli[1] <= 2

    def index(self, a: Element) -> int:
        return self._index[a]

    def zero(self) -> Element:
        return self.elements[0]

    # -- index-based fast path ------------------------------------------

    def add_table(self) -> list[list[int]]:
        tab = self._tables.get("add")
        if tab is None:
            idx = self._index
            els = self.elements
            tab = [[idx[add(self, a, b)] for b in els] for a in els]
            self._tables["add"] = tab
        return tab

    def neg_table(self) -> list[int]:
        tab = self._tables.get("neg")
        if tab is None:
            tab = [self._index[neg(self, a)] for a in self.elements]
            self._tables["neg"] = tab
        return tab

    def np_add(self) -> np.ndarray:
        arr = self._tables.get("np_add")
        if arr is None:
            arr = np.asarray(self.add_table(), dtype=np.int32)
            self._tables["np_add"] = arr
        return arr

    def np_neg(self) -> np.ndarray:
        arr = self._tables.get("np_neg")
        if arr is None:
            arr = np.asarray(self.neg_table(), dtype=np.int32)
            self._tables["np_neg"] = arr
        return arr

    def order_of_idx(self) -> list[int]:
        tab = self._tables.get("ord")
        if tab is None:
            tab = [element_order(self, a) for a in self.elements]
            self._tables["ord"] = tab
        return tab

    def descriptor(self) -> str:
        if self.is_dihedral:
            return f"dihedral:m={self.m},n={self.n},k={self.k}"
        return "cyclic:" + "x".join(str(q) for q in self.moduli)

    def format_element(self, a: Element) -> str:
        if self.is_dihedral:
            return f"(({a[0]},{a[1]}),{a[2]})"
        return "(" + ",".join(str(c) for c in a) + ")"

    def parse_element(self, text: str) -> Element:
        nums = [int(t) for t in text.replace("(", " ").replace(")", " ").replace(",", " ").split()]
        if self.is_dihedral:
            if len(nums) != 3:
                raise ValueError(f"expected ((x,y),t), got {text!r}")
            a = (nums[0] % self.moduli[0], nums[1] % self.moduli[1], nums[2] % 2)
        else:
            if len(nums) != len(self.moduli):
                raise ValueError(f"expected {len(self.moduli)} coordinates, got {text!r}")
            a = tuple(c % q for c, q in zip(nums, self.moduli))
        return a


def make_group(kind: str, *, m: int | None = None, n: int | None = None,
               k: int | None = None, moduli: Iterable[int] | None = None) -> Group:
    """Build a group descriptor with its canonical element enumeration.

    Instances are cached per parameter set so that Cayley tables and
    complete-mapping caches are shared across constructions.
    """
    if kind in (CYCLIC, "cyclic", "cyclic-product"):
        if not moduli:
            raise ValueError("cyclic kind needs moduli")
        return _cyclic_cached(tuple(int(q) for q in moduli))
    if kind in (DIHEDRAL, "dihedral", "generalized-dihedral"):
        if m is None or n is None or k is None:
            raise ValueError("dihedral kind needs m, n, k")
        return _dihedral_cached(int(m), int(n), int(k))
    raise ValueError(f"unknown group kind {kind!r}")


@lru_cache(maxsize=None)
def _cyclic_cached(mods: tuple[int, ...]) -> Group:
    if any(q < 1 for q in mods):
        raise ValueError(f"moduli must be positive, got {mods}")
    elements = tuple(product(*(range(q) for q in mods)))
    g = Group(CYCLIC, mods, elements=elements)
    g._index.update({a: i for i, a in enumerate(g.elements)})
    return g


@lru_cache(maxsize=None)
def _dihedral_cached(m: int, n: int, k: int) -> Group:
    if m < 1 or m % 2 == 0:
        raise ValueError(f"m must be odd >= 1, got {m}")
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd >= 1, got {n}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    q = 2 ** (k + 1) * n
    elements = tuple((x1, x2, tau) for tau in range(2)
                     for x1 in range(m) for x2 in range(q))
    g = Group(DIHEDRAL, (m, q), m=m, n=n, k=k, elements=elements)
    g._index.update({a: i for i, a in enumerate(g.elements)})
    return g


def cyclic_group(*moduli: int) -> Group:
    return make_group(CYCLIC, moduli=moduli)


def dihedral_group(m: int, n: int, k: int) -> Group:
    return make_group(DIHEDRAL, m=m, n=n, k=k)


def parse_group(text: str) -> Group:
    """Parse a descriptor like ``cyclic:2x2x3`` or ``dihedral:m=3,n=1,k=1``."""
    head, _, rest = text.partition(":")
    head = head.strip()
    if head == "cyclic":
        return cyclic_group(*(int(t) for t in rest.split("x")))
    if head == "dihedral":
        params = dict(p.split("=") for p in rest.split(","))
        return dihedral_group(int(params["m"]), int(params["n"]), int(params["k"]))
    raise ValueError(f"unknown group descriptor {text!r}")


def add(group: Group, a: Element, b: Element) -> Element:
    """Group operation; dihedral law (x,t)+(x',t') = (x + eps^t x', t+t')."""
    if group.is_dihedral:
        m, q = group.moduli
        if a[2] == 0:
            return ((a[0] + b[0]) % m, (a[1] + b[1]) % q, b[2])
        return ((a[0] - b[0]) % m, (a[1] - b[1]) % q, 1 - b[2])
    return tuple((x + y) % q for x, y, q in zip(a, b, group.moduli))


def neg(group: Group, a: Element) -> Element:
    """Group inverse; every dihedral (x, 1) is an involution."""
    if group.is_dihedral:
        if a[2] == 1:
            return a
        m, q = group.moduli
        return ((-a[0]) % m, (-a[1]) % q, 0)
    return tuple((-x) % q for x, q in zip(a, group.moduli))


def sub(group: Group, a: Element, b: Element) -> Element:
    return add(group, a, neg(group, b))


def scalar_mul(group: Group, t: int, a: Element) -> Element:
    acc = group.zero()
    if t < 0:
        a, t = neg(group, a), -t
    for _ in range(t):
        acc = add(group, acc, a)
    return acc


def element_order(group: Group, a: Element) -> int:
    """Least t >= 1 with t*a = identity."""
    zero = group.zero()
    acc = a
    t = 1
    while acc != zero:
        acc = add(group, acc, a)
        t += 1
    return t


def group_sum(group: Group, elems: Iterable[Element]) -> Element:
    """Left-to-right sum of a sequence (order matters in dihedral groups)."""
    acc = group.zero()
    for a in elems:
        acc = add(group, acc, a)
    return acc


def two_gamma(group: Group) -> tuple[list[Element], list[Element]]:
    """The subgroup 2*Gamma = {(x, y, 0) : y even} and its complement."""
    if not group.is_dihedral:
        raise GroupKindError("two_gamma is defined for the dihedral kind only")
    sub_set, coset = [], []
    for a in group.elements:
        if a[2] == 0 and a[1] % 2 == 0:
            sub_set.append(a)
        else:
            coset.append(a)
    return sub_set, coset


def halve_odd(m: int, x: int) -> int:
    """The unique element of Z_m (m odd) with 2*(x/2) = x."""
    if m % 2 == 0:
        raise ValueError(f"modulus must be odd, got {m}")
    return (x * ((m + 1) // 2)) % m


def rho(group: Group, y: int) -> int:
    """Integer halving 2Z_{2^{k+1}n} -> I = {0,...,2^k n - 1}."""
    if not group.is_dihedral:
        raise GroupKindError("rho is defined for the dihedral kind only")
    q = group.moduli[1]
    y %= q
    if y % 2:
        raise ValueError(f"rho needs an even argument, got {y}")
    return y // 2


def sylow2_is_cyclic_nontrivial(group: Group) -> Optional[bool]:
    """Structural Sylow-2 test for the two supported families.

    Returns True/False when the implementation can certify the answer,
    None when it cannot (never happens for the supported kinds).
    """
    if group.is_dihedral:
        # Sylow-2 is Dih(Z_{2^{k+1}}) with k >= 0: order >= 4, never cyclic.
        return False
    twoparts = [q & -q for q in group.moduli]
    nontrivial = [p for p in twoparts if p > 1]
    if not nontrivial:
        return False  # trivial Sylow-2
    return len(nontrivial) == 1


class CompleteMappingNonexistent(Exception):
    """Theorem-backed nonexistence (cyclic nontrivial Sylow-2)."""


class CompleteMappingNotFound(Exception):
    """Search budget exhausted without a certificate either way."""


def find_complete_mapping(group: Group, seed: int = 0, budget: int = 200_000):
    """A permutation pi with x -> x + pi(x) bijective, as an image-index list.

    Odd order: the identity.  Otherwise the problem reduces to the group's
    Sylow-2 leaf (the odd part contributes doubling, which is already a
    bijection): for cyclic products the 2-part factor, for the dihedral
    family the 2-group Dih(Z_{2^{k+1}}); only that small leaf is searched.

    Raises CompleteMappingNonexistent for certified-unsolvable groups and
    CompleteMappingNotFound on budget exhaustion.
    """
    cached = group._tables.get(("cm", seed))
    if cached is not None:
        return cached
    n = group.order
    if n % 2 == 1:
        images = list(range(n))  # identity: x -> 2x is bijective for odd order
        group._tables[("cm", seed)] = images
        return images
    if sylow2_is_cyclic_nontrivial(group):
        raise CompleteMappingNonexistent(group.descriptor())

    images = None
    if group.is_dihedral and not (group.m == 1 and group.n == 1):
        images = _dihedral_cm_lift(group, seed, budget)
    elif not group.is_dihedral and any(q // (q & -q) > 1 for q in group.moduli):
        images = _cyclic_cm_lift(group, seed, budget)
    if images is None:
        addt = group.add_table()
        rng = random.Random(seed)
        for attempt in range(8):
            images = _cm_backtrack(addt, n, rng, budget * (attempt + 1))
            if images is not None:
                break
        else:
            raise CompleteMappingNotFound(group.descriptor())
    if not verify_complete_mapping(group, images):
        raise RuntimeError("complete-mapping lift failed verification")
    group._tables[("cm", seed)] = images
    return images


def _crt_pair(r1: int, q1: int, r2: int, q2: int) -> int:
    """x mod q1*q2 with x = r1 (mod q1), x = r2 (mod q2); q1, q2 coprime."""
    if q1 == 1:
        return r2 % q2
    if q2 == 1:
        return r1 % q1
    inv = pow(q1, -1, q2)
    return (r1 + q1 * ((r2 - r1) * inv % q2)) % (q1 * q2)


def _dihedral_cm_lift(group: Group, seed: int, budget: int) -> list[int]:
    """Gamma = N x| D with N = Z_m x Z_n (odd) and D = Dih(Z_{2^{k+1}});
    (u, d) -> (s(d) u, theta(d)) is complete when theta is a complete
    mapping of D, since the sums are (2u, d + theta(d))."""
    m, n, k = group.m, group.n, group.k
    q = group.moduli[1]
    q2 = 2 ** (k + 1)
    D = dihedral_group(1, 1, k)
    theta = find_complete_mapping(D, seed=seed, budget=budget)
    images = [0] * group.order
    for idx, (x1, x2, tau) in enumerate(group.elements):
        d_img = D.elements[theta[D.index((0, x2 % q2, tau))]]
        if tau == 0:
            u1, u2 = x1, x2 % n
        else:
            u1, u2 = (-x1) % m, (-x2) % n
        y2 = _crt_pair(u2, n, d_img[1], q2)
        images[idx] = group.index((u1, y2, d_img[2]))
    return images


def _cyclic_cm_lift(group: Group, seed: int, budget: int) -> Optional[list[int]]:
    """Split each modulus into odd * 2-power parts; the 2-part product is
    the searched leaf, the odd part maps by the identity."""
    twos = tuple(q & -q for q in group.moduli)
    odds = tuple(q // t for q, t in zip(group.moduli, twos))
    leaf_mods = tuple(t for t in twos if t > 1)
    if not leaf_mods:
        return list(range(group.order))
    T = make_group(CYCLIC, moduli=leaf_mods)
    theta = find_complete_mapping(T, seed=seed, budget=budget)
    images = [0] * group.order
    for idx, coords in enumerate(group.elements):
        t_coords = tuple(c % t for c, t in zip(coords, twos) if t > 1)
        t_img = iter(T.elements[theta[T.index(t_coords)]])
        out = []
        for c, q, t, o in zip(coords, group.moduli, twos, odds):
            rt = next(t_img) if t > 1 else 0
            out.append(_crt_pair(c % o, o, rt, t))
        images[idx] = group.index(tuple(out))
    return images


def _cm_backtrack(addt: list[list[int]], n: int, rng: random.Random,
                  budget: int) -> Optional[list[int]]:
    order = list(range(n))
    rng.shuffle(order)
    images = [-1] * n
    used_img = [False] * n
    used_sum = [False] * n
    nodes = 0

    def rec(pos: int) -> bool:
        nonlocal nodes
        if pos == n:
            return True
        x = order[pos]
        row = addt[x]
        cands = [y for y in range(n) if not used_img[y] and not used_sum[row[y]]]
        rng.shuffle(cands)
        for y in cands:
            nodes += 1
            if nodes > budget:
                return False
            images[x] = y
            used_img[y] = True
            used_sum[row[y]] = True
            if rec(pos + 1):
                return True
            used_img[y] = False
            used_sum[row[y]] = False
            images[x] = -1
        return False

    return images if rec(0) else None


def verify_complete_mapping(group: Group, images: list[int]) -> bool:
    n = group.order
    if sorted(images) != list(range(n)):
        return False
    addt = group.add_table()
    sums = {addt[x][images[x]] for x in range(n)}
    return len(sums) == n
