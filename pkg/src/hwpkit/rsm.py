"""Row-sum matrices: representation, verification, column extension, the
abelian builder, the dihedral block machinery, and the full case analysis
producing RSM_Gamma(Gamma, g; [^alpha m, ^beta 2^k n]).

A row-sum matrix over a group has g >= 2 columns, each a permutation of its
support S; the left-to-right row sums realize a prescribed order profile.
The dihedral constructions stack a coset part (support Gamma - 2Gamma,
built from 3x3 blocks indexed by 2G) on top of a subgroup part (support
2Gamma), perform small "surgery" row replacements to reach the odd order
counts, then extend to g columns.

2G = Z_m x 2Z_{2^{k+1}n} is handled through an auxiliary cyclic product
Z_m x Z_{2^k n} ("aux coordinates"), isomorphic via y -> 2y.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import random

from .checks import Check
from .groups import (CompleteMappingNotFound, Element, Group, add,
                     cyclic_group, dihedral_group, find_complete_mapping,
                     group_sum, halve_odd, neg, two_gamma)
from .perms import (HallInfeasible, HallSolverError, Permutation, VList,
                    hall_delta_permutation, special_perm_1, special_perm_2)


class UnsupportedRsmCase(Exception):
    """A (k, alpha, beta) combination the constructions leave open."""

    def __init__(self, case: str):
        super().__init__(case)
        self.case = case


@dataclass(frozen=True)
class RowSumMatrix:
    group: Group
    support: tuple[int, ...]            # element indices, sorted
    rows: tuple[tuple[int, ...], ...]   # |S| rows of g element indices
    support_kind: str = "custom"        # full | 2gamma | coset | custom

    @property
    def g(self) -> int:
        return len(self.rows[0])

    def row_sum(self, r: int) -> Element:
        els = self.group.elements
        return group_sum(self.group, (els[i] for i in self.rows[r]))

    def row_elements(self, r: int) -> list[Element]:
        els = self.group.elements
        return [els[i] for i in self.rows[r]]


def row_sums(M: RowSumMatrix) -> VList:
    c: Counter = Counter()
    for r in range(len(M.rows)):
        c[M.row_sum(r)] += 1
    return VList(M.group, c)


def row_sum_orders(M: RowSumMatrix) -> Counter:
    ords = M.group.order_of_idx()
    idx = M.group.index
    out: Counter = Counter()
    for r in range(len(M.rows)):
        out[ords[idx(M.row_sum(r))]] += 1
    return out


def orders_profile(alpha: int, m_order: int, beta: int, q_order: int) -> Counter:
    out: Counter = Counter()
    if alpha:
        out[m_order] += alpha
    if beta:
        out[q_order] += beta
    return out


def verify_rsm(M: RowSumMatrix, expected_orders: Counter,
               expected_support: Sequence[int] | None = None) -> Check:
    """Columns are permutations of the support and the row-sum order
    multiset matches; order-insensitive in the rows."""
    support = tuple(sorted(M.support))
    if expected_support is not None and tuple(sorted(expected_support)) != support:
        return Check.failed("support set mismatch")
    if len(M.rows) != len(support):
        return Check.failed(f"{len(M.rows)} rows for support of size {len(support)}")
    g = M.g
    if g < 2:
        return Check.failed(f"g = {g} < 2")
    if any(len(r) != g for r in M.rows):
        return Check.failed("ragged rows")
    for j in range(g):
        col = sorted(row[j] for row in M.rows)
        if col != list(support):
            return Check.failed(f"column {j + 1} is not a permutation of the support")
    got = row_sum_orders(M)
    want = +Counter(expected_orders)
    if got != want:
        return Check.failed(f"row-sum orders {dict(got)} != expected {dict(want)}")
    return Check.passed()


# -- column extension ----------------------------------------------------


def _is_subgroup(group: Group, support: Sequence[int]) -> bool:
    sset = set(support)
    addt = group.add_table()
    return all(addt[a][b] in sset for a in support for b in support)


def _support_complete_mapping(group: Group, support: Sequence[int],
                              seed: int) -> dict[int, int]:
    """pi: S -> S with x + pi(x) ranging bijectively over S."""
    n = group.order
    if len(support) == n:
        pi = find_complete_mapping(group, seed=seed)
        return {x: pi[x] for x in range(n)}
    if not _is_subgroup(group, support):
        raise ValueError("complete-mapping extension needs S to be the group or a subgroup")
    if len(support) % 2 == 1:
        return {x: x for x in support}
    addt = group.add_table()
    rng = random.Random(seed)
    sup = list(support)
    for attempt in range(8):
        order = sup[:]
        rng.shuffle(order)
        images: dict[int, int] = {}
        used_img: set[int] = set()
        used_sum: set[int] = set()
        budget = [200_000 * (attempt + 1)]

        def rec(pos: int) -> bool:
            if pos == len(order):
                return True
            x = order[pos]
            cands = [y for y in sup if y not in used_img and addt[x][y] not in used_sum]
            rng.shuffle(cands)
            for y in cands:
                budget[0] -= 1
                if budget[0] < 0:
                    return False
                images[x] = y
                used_img.add(y)
                used_sum.add(addt[x][y])
                if rec(pos + 1):
                    return True
                used_img.discard(y)
                used_sum.discard(addt[x][y])
                del images[x]
            return False

        if rec(0):
            return images
    raise CompleteMappingNotFound(
        f"no complete mapping found on the support subgroup (size {len(support)})")


def extend_columns(M: RowSumMatrix, i: int, seed: int = 0) -> RowSumMatrix:
    """Add i columns preserving the row-sum list exactly.

    Even counts append (c, -c) column pairs (needs S = -S); an odd count
    spends one complete-mapping substitution on the last column (needs S to
    be the whole group, or a subgroup owning a complete mapping).
    """
    if i < 0:
        raise ValueError(f"cannot remove columns (i = {i})")
    if i == 0:
        return M
    group = M.group
    addt = group.add_table()
    negt = group.neg_table()
    sset = set(M.support)
    symmetric = all(negt[x] in sset for x in M.support)
    rows = [list(r) for r in M.rows]
    remaining = i

    if remaining % 2 == 1:
        pi = _support_complete_mapping(group, M.support, seed)
        rho_inv = {addt[x][pi[x]]: x for x in pi}
        if len(rho_inv) != len(pi) or set(rho_inv) != sset:
            raise RuntimeError("complete mapping does not induce a bijection on S")
        for row in rows:
            y = row[-1]
            x = rho_inv[y]
            row[-1] = x
            row.append(pi[x])
        remaining -= 1

    if remaining:
        if not symmetric:
            raise ValueError("even extension needs S = -S")
        col = sorted(sset)
        for _ in range(remaining // 2):
            for r, row in enumerate(rows):
                c = col[r]
                row.append(c)
                row.append(negt[c])

    out = RowSumMatrix(group, M.support, tuple(tuple(r) for r in rows), M.support_kind)
    if row_sums(out).counts != row_sums(M).counts:
        raise RuntimeError("column extension changed the row-sum list")
    return out


# -- the 2G machinery ----------------------------------------------------


@dataclass(frozen=True)
class TwoGContext:
    """Dihedral Gamma together with its doubled subgroup in aux coordinates."""

    gamma: Group   # Dih(Z_m x Z_{2^{k+1}n})
    aux: Group     # Z_m x Z_{2^k n}, iso to 2G via (a, b) -> (a, 2b)

    @staticmethod
    def create(k: int, m: int, n: int) -> "TwoGContext":
        return TwoGContext(dihedral_group(m, n, k), cyclic_group(m, 2 ** k * n))

    def embed(self, za: Element) -> Element:
        """aux (a, b) -> Gamma element ((a, 2b), 0)."""
        return (za[0], (2 * za[1]) % self.gamma.moduli[1], 0)

    def project(self, ge: Element) -> Element:
        if ge[2] != 0 or ge[1] % 2:
            raise ValueError(f"{ge} is not in 2Gamma")
        return (ge[0], ge[1] // 2)

    def a_entry(self, phi: Permutation, za: Element) -> Element:
        img = phi.apply(za)
        return (img[0], (2 * img[1] + 1) % self.gamma.moduli[1], 0)

    def b_entry(self, za: Element) -> Element:
        m, q = self.gamma.moduli
        return ((-halve_odd(m, za[0])) % m, (-za[1]) % q, 1)

    def c_entry(self, za: Element) -> Element:
        m, q = self.gamma.moduli
        return (halve_odd(m, za[0]), (za[1] + 1) % q, 1)


def block_A(ctx: TwoGContext, phis: Sequence[Permutation], z: Element) -> list[list[Element]]:
    """3x3 block with entries from Gamma - 2Gamma; z = (x, y) with y even."""
    za = ctx.project((z[0], z[1], 0))
    a1, a2, a3 = (ctx.a_entry(p, za) for p in phis)
    b, c = ctx.b_entry(za), ctx.c_entry(za)
    return [[a1, b, c], [c, a2, b], [b, c, a3]]


def block_A_prime(ctx: TwoGContext, phis: Sequence[Permutation], z: Element) -> list[list[Element]]:
    """block_A with columns 2 and 3 swapped."""
    rows = block_A(ctx, phis, z)
    return [[r[0], r[2], r[1]] for r in rows]


# -- zero-sum order-profile v-lists over aux 2G --------------------------


def profile_feasible(m: int, n: int, k: int, c: int, d: int) -> bool:
    """Can a zero-sum multiset of Z_m x Z_{2^k n} consist of exactly c
    full-order-m and d full-order-(2^k n) elements?"""
    if c < 0 or d < 0:
        return False
    if m > 1 and c == 1:
        return False
    if 2 ** k * n > 1:
        if d == 1:
            return False
        if k >= 1 and d % 2 == 1:
            return False
    return True


def make_order_profile_vlist(aux: Group, k: int, c: int, d: int) -> VList:
    """Zero-sum v-list of aux = Z_m x Z_{2^k n} with c order-m and d
    order-(2^k n) entries: +/- pairs plus one odd-count triple (x, x, -2x),
    where -2x keeps full order (m odd; n odd when k = 0)."""
    m, q = aux.moduli
    n = q // (2 ** k)
    if not profile_feasible(m, n, k, c, d):
        raise ValueError(f"infeasible profile c={c}, d={d} over Z_{m} x Z_{q}")
    pairs: list[tuple[int, Element]] = []
    if m == 1:
        pairs.append((c, (0, 0)))
    else:
        cc = c
        if cc % 2 == 1:
            pairs += [(2, (1, 0)), (1, ((-2) % m, 0))]
            cc -= 3
        pairs += [(cc // 2, (1, 0)), (cc // 2, ((-1) % m, 0))]
    if q == 1:
        pairs.append((d, (0, 0)))
    else:
        dd = d
        if dd % 2 == 1:
            pairs += [(2, (0, 1)), (1, (0, (-2) % q))]
            dd -= 3
        pairs += [(dd // 2, (0, 1)), (dd // 2, (0, (-1) % q))]
    return VList.from_pairs(aux, [(mult, e) for mult, e in pairs if mult > 0])


def _split_even_capped(total: int, caps: Sequence[int], mins: Sequence[int]) -> list[int]:
    """total = x1+x2+x3 with x_h - mins_h even and mins_h <= x_h <= caps_h."""
    parts = list(mins)
    left = total - sum(parts)
    if left < 0 or left % 2:
        raise ValueError(f"cannot split {total} with mins {mins}")
    for h in range(3):
        take = min(caps[h] - parts[h], left)
        take -= take % 2
        parts[h] += take
        left -= take
    if left:
        raise ValueError(f"cannot split {total} into even parts with caps {caps}")
    return parts


# -- Gamma - 2Gamma (coset) part ----------------------------------------


@dataclass
class CosetPart:
    ctx: TwoGContext
    rsm: RowSumMatrix                    # support Gamma - 2Gamma, 3 columns
    phis: list[Permutation]
    aprime_at: Optional[Element] = None  # aux z carrying the swapped block

    def row_index(self, z_aux: Element, h: int) -> int:
        return 3 * self.ctx.aux.index(z_aux) + (h - 1)


def _coset_support(ctx: TwoGContext) -> tuple[int, ...]:
    _, coset = two_gamma(ctx.gamma)
    return tuple(sorted(ctx.gamma.index(e) for e in coset))


def _two_gamma_support(ctx: TwoGContext) -> tuple[int, ...]:
    sub, _ = two_gamma(ctx.gamma)
    return tuple(sorted(ctx.gamma.index(e) for e in sub))


def build_coset_part(ctx: TwoGContext, alpha: int, beta: int, seed: int = 0,
                     phi_pins: dict[int, tuple[Element, Element]] | None = None
                     ) -> CosetPart:
    """RSM over Gamma - 2Gamma with row-sum orders [^alpha m, ^beta 2^k n],
    alpha + beta = 3 |2G|.  phi_pins: {h: (z_aux, delta_aux)} forces
    phi_h(z) = z + delta."""
    gamma, aux = ctx.gamma, ctx.aux
    k, m, n = gamma.k, gamma.m, gamma.n
    size = aux.order
    if alpha + beta != 3 * size:
        raise ValueError(f"alpha + beta = {alpha + beta} != 3 * 2^k m n = {3 * size}")
    if alpha < 0 or beta < 0:
        raise ValueError("negative counts")
    phi_pins = dict(phi_pins or {})

    aprime_at: Optional[Element] = None
    if alpha % 2 == 0 and beta % 2 == 0:
        mins, caps = [0, 0, 0], [size] * 3
        for h, (_, dlt) in phi_pins.items():
            if dlt == (0, 0):
                mins[h - 1] = max(mins[h - 1], 2 if m > 1 else 0)
            elif dlt[1] == 0:
                mins[h - 1] = max(mins[h - 1], 2)
            else:
                caps[h - 1] = min(caps[h - 1], size - 2)
        cs = _split_even_capped(alpha, caps, mins)
        splits = [(c, size - c) for c in cs]
    elif alpha % 2 == 1 and beta % 2 == 1:
        if k == 0:
            raise ValueError("odd/odd coset profile is impossible at k = 0 (odd total)")
        if alpha < 3 or beta < 3:
            raise UnsupportedRsmCase(
                f"coset part needs alpha != 1 and beta != 1 (got {alpha}, {beta})")
        if phi_pins:
            raise ValueError("pins are not supported on the odd/odd route")
        cs = _split_even_capped(alpha + 3, [size] * 3, [2, 2, 2])
        splits = [(c, size - c) for c in cs]
        aprime_at = (((m - 1) // 2) % m, 0)
        for h in (1, 2, 3):
            phi_pins[h] = (aprime_at, (1 % m, 0))
    else:
        if k != 0:
            raise UnsupportedRsmCase(
                f"mixed-parity coset profile needs k = 0 (got k = {k})")
        splits = _split_profiles_k0(m, n, alpha, beta, size, phi_pins)

    phis: list[Permutation] = []
    for h in (1, 2, 3):
        c_h, d_h = splits[h - 1]
        delta_h = make_order_profile_vlist(aux, k, c_h, d_h)
        pins = None
        if h in phi_pins:
            z_pin, d_pin = phi_pins[h]
            pins = {z_pin: d_pin}
        phis.append(hall_delta_permutation(aux, delta_h, seed=seed * 7 + h, pins=pins))

    rows: list[tuple[int, ...]] = []
    gi = gamma.index
    for za in aux.elements:
        z = ctx.embed(za)
        blk = block_A_prime(ctx, phis, z) if za == aprime_at else block_A(ctx, phis, z)
        rows.extend(tuple(gi(e) for e in row) for row in blk)

    rsm = RowSumMatrix(gamma, _coset_support(ctx), tuple(rows), "coset")
    part = CosetPart(ctx, rsm, phis, aprime_at)
    chk = verify_rsm(rsm, orders_profile(alpha, m, beta, 2 ** k * n))
    if not chk:
        raise RuntimeError(f"coset part self-check failed: {chk.reason}")
    return part


def _split_profiles_k0(m: int, n: int, alpha: int, beta: int, size: int,
                       phi_pins: dict) -> list[tuple[int, int]]:
    """Three (c_h, d_h), c_h + d_h = size = mn, sum c_h = alpha, every
    profile feasible; prefers balanced parts."""
    need_c_min = [0, 0, 0]
    need_d_min = [0, 0, 0]
    for h, (_, dlt) in phi_pins.items():
        if dlt == (0, 0):
            continue
        if dlt[1] == 0:
            need_c_min[h - 1] = 2
        else:
            need_d_min[h - 1] = 2

    def ok(h: int, c: int) -> bool:
        d = size - c
        return (c >= need_c_min[h] and d >= need_d_min[h]
                and profile_feasible(m, n, 0, c, d))

    best = None
    target = alpha / 3
    for c1 in range(0, min(alpha, size) + 1):
        if not ok(0, c1):
            continue
        for c2 in range(0, min(alpha - c1, size) + 1):
            if not ok(1, c2):
                continue
            c3 = alpha - c1 - c2
            if c3 < 0 or c3 > size or not ok(2, c3):
                continue
            spread = abs(c1 - target) + abs(c2 - target) + abs(c3 - target)
            if best is None or spread < best[0]:
                best = (spread, [c1, c2, c3])
        if best is not None and best[0] <= 1.0:
            break
    if best is None:
        raise UnsupportedRsmCase(
            f"no feasible coset split for alpha={alpha}, beta={beta} over Z_{m} x Z_{n}")
    return [(c, size - c) for c in best[1]]


# -- 2Gamma (subgroup) part ----------------------------------------------


@dataclass
class SubgroupPart:
    ctx: TwoGContext
    rsm: RowSumMatrix                   # support 2Gamma, 3 columns
    psi1: Optional[Permutation]
    psi2: Optional[Permutation]
    zbar: Optional[Element]             # aux element carrying the w-override

    def row_index(self, z_aux: Element) -> int:
        return self.ctx.aux.index(z_aux)


def emit_b_rows(ctx: TwoGContext, psi1: Permutation, psi2: Permutation,
                w_override: dict[Element, Element]) -> list[tuple[int, ...]]:
    """Rows B_z = [(z, 0), (-psi1(z), 0), (psi2(w), 0)] in aux order,
    w = psi1(z) - z except at the override arguments."""
    aux, gamma = ctx.aux, ctx.gamma
    gi = gamma.index
    rows = []
    for za in aux.elements:
        img = psi1.apply(za)
        w = w_override.get(za)
        if w is None:
            w = add(aux, img, neg(aux, za))
        rows.append((gi(ctx.embed(za)),
                     gi(ctx.embed(neg(aux, img))),
                     gi(ctx.embed(psi2.apply(w)))))
    return rows


def _lambda1_vlist(aux: Group, excluded: Element) -> VList:
    c: Counter = Counter({a: 1 for a in aux.elements if a != excluded})
    c[(0, 0)] += 1
    return VList(aux, c)


def build_subgroup_part(ctx: TwoGContext, alpha: int, beta: int, seed: int = 0,
                        psi1_pins: dict | None = None,
                        psi2_pins: dict | None = None,
                        zbar_pin: Element | None = None,
                        zbar_avoid: Iterable[Element] = ()) -> SubgroupPart:
    """RSM over 2Gamma with row-sum orders [^alpha m, ^beta 2^k n]."""
    gamma, aux = ctx.gamma, ctx.aux
    k, m, n = gamma.k, gamma.m, gamma.n
    size = aux.order
    q_ord = 2 ** k * n
    if alpha + beta != size:
        raise ValueError(f"alpha + beta = {alpha + beta} != 2^k m n = {size}")
    psi1_pins = dict(psi1_pins or {})
    psi2_pins = dict(psi2_pins or {})
    gi = gamma.index

    if k == 0:
        if not profile_feasible(m, n, 0, alpha, beta):
            raise UnsupportedRsmCase(
                f"2Gamma part needs alpha != 1 and beta != 1 at k=0 (got {alpha}, {beta})")
        if psi1_pins or zbar_pin:
            raise ValueError("the k = 0 subgroup part takes no psi1 pins")
        # doubling is a 2G-permutation of the odd-order subgroup
        psi1 = Permutation(aux, tuple(aux.index(add(aux, a, a)) for a in aux.elements))
        lam2 = make_order_profile_vlist(aux, 0, alpha, beta)
        psi2 = hall_delta_permutation(aux, lam2, seed=seed * 11 + 5, pins=psi2_pins)
        rows = emit_b_rows(ctx, psi1, psi2, {})
        part = SubgroupPart(ctx, RowSumMatrix(gamma, _two_gamma_support(ctx),
                                              tuple(rows), "2gamma"),
                            psi1, psi2, None)
    elif size == 2 and alpha == 1 and beta == 1:
        # k = 1, m = n = 1: the only profile a 3-column matrix on 2Gamma admits
        z0, z1 = gi((0, 0, 0)), gi((0, 2, 0))
        rows2 = ((z0, z0, z0), (z1, z1, z1))
        part = SubgroupPart(ctx, RowSumMatrix(gamma, _two_gamma_support(ctx),
                                              rows2, "2gamma"),
                            None, None, None)
    else:
        qa = aux.moduli[1]                      # 2^k n
        excluded = (0, (qa // 2) % qa)          # aux image of (0, 2^k n)
        if k == 1:
            if alpha % 2 == 0 or beta % 2 == 0 or alpha < 3 or beta < 3:
                raise UnsupportedRsmCase(
                    f"2Gamma part at k=1 needs odd alpha, beta >= 3 (got {alpha}, {beta})")
            a, b = (alpha - 3) // 2, (beta - 3) // 2
            lam2 = VList.from_pairs(aux, [
                (1, (2 % m, 0)), (a, (1 % m, 0)), (a + 2, ((-1) % m, 0)),
                (1, (0, 2 % qa)), (b, (0, 1)), (b + 2, (0, (-1) % qa)),
            ])
            auto_delta = (0, 2 % qa)
        else:
            if alpha % 2 or beta % 2 or beta < 2:
                raise UnsupportedRsmCase(
                    f"2Gamma part at k>=2 needs even alpha, beta with beta >= 2 "
                    f"(got {alpha}, {beta})")
            a, b = alpha // 2, beta // 2
            lam2 = VList.from_pairs(aux, [
                (a, (1 % m, 0)), (a, ((-1) % m, 0)),
                (b, (0, 1)), (b, (0, (-1) % qa)),
            ])
            auto_delta = (0, (-1) % qa)
        if excluded in psi2_pins:
            raise ValueError("caller pin collides with the automatic psi2 pin")

        lam1 = _lambda1_vlist(aux, excluded)
        if zbar_pin is not None:
            psi1_pins.setdefault(zbar_pin, (0, 0))
        psi1 = hall_delta_permutation(aux, lam1, seed=seed * 11 + 3, pins=psi1_pins)
        # the pinned image of the excluded element keeps order 2^k n under
        # either sign of the difference; with caller pins present the printed
        # sign can be infeasible (the +-(0,1) classes force per-parity signs),
        # so both directions are tried, parity-consistent one first
        if k >= 2:
            if psi2_pins and alpha == 0:
                deltas = ((0, 1), auto_delta)
            else:
                deltas = (auto_delta, (0, 1))
        else:
            deltas = (auto_delta,)
        psi2 = None
        last_err: Optional[Exception] = None
        for cand_delta in deltas:
            pins2 = dict(psi2_pins)
            pins2[excluded] = cand_delta
            try:
                psi2 = hall_delta_permutation(aux, lam2, seed=seed * 11 + 5, pins=pins2)
                break
            except (HallInfeasible, HallSolverError) as exc:
                last_err = exc
        if psi2 is None:
            assert last_err is not None
            raise last_err

        if zbar_pin is not None:
            zbar = zbar_pin
            if psi1.apply(zbar) != zbar:
                raise RuntimeError("pinned zbar is not fixed by psi1")
        else:
            avoid = set(zbar_avoid)
            cands = [za for za in aux.elements
                     if psi1.apply(za) == za and za not in avoid]
            if not cands:
                raise RuntimeError("no admissible fixed point for the override row")
            zbar = cands[0]
        rows = emit_b_rows(ctx, psi1, psi2, {zbar: excluded})
        part = SubgroupPart(ctx, RowSumMatrix(gamma, _two_gamma_support(ctx),
                                              tuple(rows), "2gamma"),
                            psi1, psi2, zbar)

    chk = verify_rsm(part.rsm, orders_profile(alpha, m, beta, q_ord))
    if not chk:
        raise RuntimeError(f"2Gamma part self-check failed: {chk.reason}")
    return part


# -- public wrappers for the two sub-block families -----------------------


def build_gamma_minus_2gamma(k: int, m: int, n: int, alpha: int, beta: int,
                             g: int = 3, seed: int = 0) -> RowSumMatrix:
    """RSM_Gamma(Gamma - 2Gamma, g; [^alpha m, ^beta 2^k n])."""
    ctx = TwoGContext.create(k, m, n)
    part = build_coset_part(ctx, alpha, beta, seed=seed)
    out = extend_columns(part.rsm, g - 3, seed=seed)
    chk = verify_rsm(out, orders_profile(alpha, m, beta, 2 ** k * n))
    if not chk:
        raise RuntimeError(chk.reason)
    return out


def build_2gamma(k: int, m: int, n: int, alpha: int, beta: int,
                 g: int = 3, seed: int = 0) -> RowSumMatrix:
    """RSM_Gamma(2Gamma, g; [^alpha m, ^beta 2^k n])."""
    ctx = TwoGContext.create(k, m, n)
    part = build_subgroup_part(ctx, alpha, beta, seed=seed)
    out = extend_columns(part.rsm, g - 3, seed=seed)
    chk = verify_rsm(out, orders_profile(alpha, m, beta, 2 ** k * n))
    if not chk:
        raise RuntimeError(chk.reason)
    return out


# -- abelian builder ------------------------------------------------------


def build_abelian_rsm(ell: int, m: int, n: int, k: int, gamma_count: int,
                      delta_count: int, g: int = 3, seed: int = 0) -> RowSumMatrix:
    """RSM over Z_2 x Z_{2^ell} x Z_{mn} with orders
    [^{2 gamma} m, ^{2 delta} 2^k n], for gamma + delta = 2^ell m n."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if not (0 <= k <= ell):
        raise ValueError(f"k must satisfy 0 <= k <= ell, got {k}")
    if n % 2 == 0 or m % 2 == 0 or n < 1 or m < 1:
        raise ValueError("m and n must be odd >= 1")
    if gamma_count < 0 or delta_count < 0 or gamma_count + delta_count != 2 ** ell * m * n:
        raise ValueError(
            f"gamma + delta = {gamma_count + delta_count} != 2^ell m n = {2 ** ell * m * n}")
    if g < 3:
        raise ValueError(f"g must be >= 3, got {g}")
    group = cyclic_group(2, 2 ** ell, m * n)
    mn, qe = m * n, 2 ** ell
    delta = VList.from_pairs(group, [
        (gamma_count, (0, 0, n % mn)),
        (gamma_count, (0, 0, (-n) % mn)),
        (delta_count, (0, 2 ** (ell - k) % qe, m % mn)),
        (delta_count, (0, (-(2 ** (ell - k))) % qe, (-m) % mn)),
    ])
    phi = hall_delta_permutation(group, delta, seed=seed * 13 + 1)
    whole = VList(group, Counter({a: 1 for a in group.elements}))
    psi = hall_delta_permutation(group, whole, seed=seed * 13 + 2)

    gi = group.index
    rows = []
    for x in group.elements:
        px = psi.apply(x)
        d = add(group, px, neg(group, x))
        rows.append((gi(neg(group, px)), gi(x), gi(phi.apply(d))))
    M = RowSumMatrix(group, tuple(range(group.order)), tuple(rows), "full")
    M = extend_columns(M, g - 3, seed=seed)
    expected = orders_profile(2 * gamma_count, m, 2 * delta_count, 2 ** k * n)
    chk = verify_rsm(M, expected)
    if not chk:
        raise RuntimeError(f"abelian builder self-check failed: {chk.reason}")
    return M


# -- the dihedral dispatcher ----------------------------------------------


@dataclass(frozen=True)
class RsmSpec:
    k: int
    m: int
    n: int
    g: int
    alpha: int
    beta: int

    def __post_init__(self):
        if self.m < 1 or self.m % 2 == 0 or self.n < 1 or self.n % 2 == 0:
            raise ValueError("m and n must be odd >= 1")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.g < 3:
            raise ValueError("g must be >= 3")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")
        if self.alpha + self.beta != 2 ** (self.k + 2) * self.m * self.n:
            raise ValueError(
                f"alpha + beta = {self.alpha + self.beta} != 2^(k+2) m n = "
                f"{2 ** (self.k + 2) * self.m * self.n}")


def _replace_rows(gamma: Group, rows: list[list[int]],
                  replacements: dict[int, Sequence[Element]]) -> None:
    """In-place row replacement; asserts each column keeps its multiset."""
    gi = gamma.index
    width = len(rows[0])
    for j in range(width):
        old = sorted(rows[r][j] for r in replacements)
        new = sorted(gi(entries[j]) for entries in replacements.values())
        if old != new:
            raise RuntimeError(f"surgery changes the content of column {j + 1}")
    for r, entries in replacements.items():
        rows[r] = [gi(e) for e in entries]


def _full_matrix(ctx: TwoGContext, rows: list[list[int]]) -> RowSumMatrix:
    return RowSumMatrix(ctx.gamma, tuple(range(ctx.gamma.order)),
                        tuple(tuple(r) for r in rows), "full")


def build_dihedral_rsm(spec: RsmSpec, seed: int = 0) -> RowSumMatrix:
    """RSM_Gamma(Gamma, g; [^alpha m, ^beta 2^k n]) over the generalized
    dihedral group, for every (alpha, beta) outside the open cases."""
    k, m, n, g = spec.k, spec.m, spec.n, spec.g
    alpha, beta = spec.alpha, spec.beta
    if k >= 2 and beta == 0:
        raise UnsupportedRsmCase(f"open case: k >= 2 and beta = 0 (k={k})")
    if k == 1 and (alpha in (0, 2, 4) or beta in (0, 2, 4)):
        raise UnsupportedRsmCase(
            f"open case: k = 1 and alpha or beta in {{0,2,4}} "
            f"(alpha={alpha}, beta={beta})")

    if k >= 2:
        if alpha == 1:
            M = _k2_case_alpha1(spec, seed)
        elif beta in (1, 3):
            M = _k2_case_beta(spec, seed)
        else:
            M = _build_general(spec, seed)
    elif k == 1:
        if alpha == 1:
            M = _k1_alpha1(spec, seed) if n >= 3 else _k1_alpha1_n1(spec, seed)
        elif beta == 1:
            M = _k1_beta1(spec, seed) if n >= 3 else _k1_beta1_n1(spec, seed)
        else:
            M = _build_general(spec, seed)
    else:
        if m == 1 and n == 1:
            M = _trivial_k0_matrix()
        elif alpha == 1 and m > 1:
            M = _k0_alpha1(spec, seed)
        elif beta == 1 and n > 1:
            swapped = RsmSpec(0, n, m, spec.g, beta, alpha)
            return build_dihedral_rsm(swapped, seed=seed)
        else:
            M = _build_general(spec, seed)

    M = extend_columns(M, g - M.g, seed=seed)
    chk = verify_rsm(M, orders_profile(alpha, m, beta, 2 ** k * n),
                     expected_support=range(M.group.order))
    if not chk:
        raise RuntimeError(f"dihedral RSM self-check failed: {chk.reason}")
    return M


def _trivial_k0_matrix() -> RowSumMatrix:
    """Gamma = Dih(Z_1 x Z_2): all target orders are 1; all row sums zero."""
    ctx = TwoGContext.create(0, 1, 1)
    gi = ctx.gamma.index
    a, b, c = gi((0, 1, 0)), gi((0, 0, 1)), gi((0, 1, 1))
    z = gi((0, 0, 0))
    rows = [[a, b, c], [c, a, b], [b, c, a], [z, z, z]]
    return _full_matrix(ctx, rows)


def _paper_split(k: int, size: int, alpha: int) -> int:
    """The printed general-case alpha_1 tables (k >= 2 / k = 1 / k = 0)."""
    if k >= 2:
        if alpha >= size + 1:
            return min(size - 2, 2 * (alpha // 2))
        if alpha % 2 == 0:
            return alpha
        return alpha - 3
    if k == 1:
        return 3 if alpha <= 3 * size + 3 else size - 3
    if (size + 2 <= alpha <= 4 * size - 2) or alpha == 4 * size:
        return size
    if alpha == size + 1:
        return alpha - 4
    if alpha == size - 1:
        return alpha - 2
    return alpha


def _subgroup_profile_ok(k: int, m: int, n: int, a1: int, b1: int) -> bool:
    size = 2 ** k * m * n
    if a1 < 0 or b1 < 0 or a1 + b1 != size:
        return False
    if k == 0:
        return profile_feasible(m, n, 0, a1, b1)
    if size == 2:
        return a1 == 1 and b1 == 1
    if k == 1:
        return a1 % 2 == 1 and b1 % 2 == 1 and a1 >= 3 and b1 >= 3
    return a1 % 2 == 0 and b1 % 2 == 0 and b1 >= 2


def _coset_profile_ok(k: int, m: int, n: int, a2: int, b2: int) -> bool:
    size = 3 * 2 ** k * m * n
    if a2 < 0 or b2 < 0 or a2 + b2 != size:
        return False
    if a2 % 2 == 0 and b2 % 2 == 0:
        return True
    if a2 % 2 == 1 and b2 % 2 == 1:
        return k >= 1 and a2 >= 3 and b2 >= 3
    if k != 0:
        return False
    try:
        _split_profiles_k0(m, n, a2, b2, 2 ** k * m * n, {})
        return True
    except UnsupportedRsmCase:
        return False


def _build_general(spec: RsmSpec, seed: int) -> RowSumMatrix:
    """Stack a 2Gamma part under a coset part; the split follows the printed
    tables, falling back to the nearest feasible candidate."""
    k, m, n = spec.k, spec.m, spec.n
    alpha = spec.alpha
    size = 2 ** k * m * n
    preferred = _paper_split(k, size, alpha)
    candidates = sorted(range(0, size + 1),
                        key=lambda a1: (abs(a1 - preferred), a1))
    ctx = TwoGContext.create(k, m, n)
    for a1 in candidates:
        b1 = size - a1
        a2, b2 = alpha - a1, spec.beta - b1
        if not _subgroup_profile_ok(k, m, n, a1, b1):
            continue
        if not _coset_profile_ok(k, m, n, a2, b2):
            continue
        a_part = build_coset_part(ctx, a2, b2, seed=seed)
        b_part = build_subgroup_part(ctx, a1, b1, seed=seed)
        rows = [list(r) for r in a_part.rsm.rows] + [list(r) for r in b_part.rsm.rows]
        return _full_matrix(ctx, rows)
    raise UnsupportedRsmCase(
        f"no feasible split for k={k}, m={m}, n={n}, alpha={alpha}, beta={spec.beta}")


# -- k >= 2 surgeries ------------------------------------------------------


def _k2_case_alpha1(spec: RsmSpec, seed: int) -> RowSumMatrix:
    k, m, n = spec.k, spec.m, spec.n
    ctx = TwoGContext.create(k, m, n)
    aux = ctx.aux
    size = aux.order
    qa = aux.moduli[1]
    zp = (1 % m, 1)                              # original (1, 2)
    pin_delta = (0, (-1) % qa)
    a_part = build_coset_part(ctx, 0, 3 * size, seed=seed,
                              phi_pins={1: (zp, pin_delta), 3: (zp, pin_delta)})
    z02 = (0, 1)                                 # original (0, 2)
    b_part = build_subgroup_part(ctx, 0, size, seed=seed,
                                 psi1_pins={z02: (0, 0)},
                                 psi2_pins={(0, 0): (0, 1)},
                                 zbar_avoid={z02})
    rows = [list(r) for r in a_part.rsm.rows] + [list(r) for r in b_part.rsm.rows]
    off = len(a_part.rsm.rows)

    e02 = ctx.embed((0, 1))
    e02n = ctx.embed((0, (-1) % qa))
    a1 = ctx.a_entry(a_part.phis[0], zp)
    a3 = ctx.a_entry(a_part.phis[2], zp)
    b_e, c_e = ctx.b_entry(zp), ctx.c_entry(zp)
    _replace_rows(ctx.gamma, rows, {
        a_part.row_index(zp, 1): [e02, c_e, c_e],
        off + b_part.row_index(z02): [a1, e02n, a3],
        a_part.row_index(zp, 3): [b_e, b_e, e02],
    })
    return _full_matrix(ctx, rows)


def _k2_case_beta(spec: RsmSpec, seed: int) -> RowSumMatrix:
    k, m, n = spec.k, spec.m, spec.n
    beta = spec.beta
    ctx = TwoGContext.create(k, m, n)
    aux = ctx.aux
    size = aux.order
    qa = aux.moduli[1]
    zp = (0, (2 ** (k - 2) * n) % qa)            # original (0, 2^{k-1} n)
    one = (1 % m, 0)
    a_part = build_coset_part(ctx, 3 * size, 0, seed=seed,
                              phi_pins={1: (zp, one), 2: (zp, one)})
    zbar = (1 % m, 0)
    b_part = build_subgroup_part(ctx, size - beta - 1, beta + 1, seed=seed,
                                 zbar_pin=zbar)
    rows = [list(r) for r in a_part.rsm.rows] + [list(r) for r in b_part.rsm.rows]
    off = len(a_part.rsm.rows)

    e1 = ctx.embed(one)
    e1n = ctx.embed(neg(aux, one))
    a1 = ctx.a_entry(a_part.phis[0], zp)
    a2 = ctx.a_entry(a_part.phis[1], zp)
    b_e, c_e = ctx.b_entry(zp), ctx.c_entry(zp)
    keep3 = ctx.gamma.elements[rows[off + b_part.row_index(zbar)][2]]
    _replace_rows(ctx.gamma, rows, {
        a_part.row_index(zp, 1): [e1, b_e, b_e],
        a_part.row_index(zp, 2): [c_e, e1n, c_e],
        off + b_part.row_index(zbar): [a1, a2, keep3],
    })
    return _full_matrix(ctx, rows)


# -- k = 1 theorems --------------------------------------------------------


def _translation(aux: Group, delta: Element) -> Permutation:
    return Permutation(aux, tuple(aux.index(add(aux, a, delta)) for a in aux.elements))


def _k1_stack(ctx: TwoGContext, phis, psi1, psi2, w_override):
    a_rows = []
    gi = ctx.gamma.index
    for za in ctx.aux.elements:
        blk = block_A(ctx, phis, ctx.embed(za))
        a_rows.extend([gi(e) for e in row] for row in blk)
    rows = a_rows + [list(r) for r in emit_b_rows(ctx, psi1, psi2, w_override)]
    return rows, len(a_rows)


def _k1_apply_surgery(ctx: TwoGContext, rows, off, candidates, u_prime,
                      want_orders, gbar) -> RowSumMatrix:
    """Replace U = [S; T] by U'; tries the printed gamma quadruple first,
    then the search stream (the printed values fail in a couple of
    degenerate (m, n) cases; see the six order conditions)."""
    gam, aux = ctx.gamma, ctx.aux
    ords = gam.order_of_idx()
    gi = gam.index
    for cand, swap in candidates:
        if any(y % 2 for _, y in cand):
            continue
        g1a, g2a, g3a, g4a = (ctx.project((x, y, 0)) for x, y in cand)
        if g1a == g3a or g2a == g4a:
            continue
        up = u_prime(g1a, g2a, g3a, g4a, swap)
        sums = [group_sum(gam, r) for r in up]
        if [ords[gi(s)] for s in sums] != want_orders:
            continue
        row_ids = [3 * aux.index(g1a) + 0, 3 * aux.index(g2a) + 1,
                   3 * aux.index(g3a) + 0, 3 * aux.index(g4a) + 1,
                   off + aux.index((0, 0)), off + aux.index(gbar)]
        if len(set(row_ids)) != 6:
            continue
        try:
            _replace_rows(gam, rows, dict(zip(row_ids, up)))
        except RuntimeError:
            continue
        return _full_matrix(ctx, rows)
    raise RuntimeError("no admissible surgery points found (k = 1)")


def _k1_candidate_stream(m: int, n: int, printed: Sequence[tuple],
                         xshape: tuple[int, int, int, int]):
    for cand in printed:
        yield cand, False
    q = 4 * n
    x1, x2, x3, x4 = xshape
    evens = range(0, q, 2)
    for y1 in evens:
        for y2 in evens:
            for y3 in evens:
                for y4 in evens:
                    for swap in (False, True):
                        yield ((x1, y1), (x2, y2), (x3, y3), (x4, y4)), swap


def _k1_alpha1(spec: RsmSpec, seed: int) -> RowSumMatrix:
    """k = 1, n >= 3: target [^1 m, ^{8mn-1} 2n]."""
    m, n = spec.m, spec.n
    ctx = TwoGContext.create(1, m, n)
    aux = ctx.aux
    qa = aux.moduli[1]                            # 2n
    qorig = 4 * n
    phis = [_translation(aux, (0, 1))] * 3
    _, psi1, _ = special_perm_1(m, n)
    psi2 = _translation(aux, (0, 1))
    gbar = ((-((m - 1) // 2)) % m, ((m * n + 1) // 2) % qa)
    assert psi1.apply(gbar) == gbar and psi1.apply((0, 0)) == (0, 0)

    rows, off = _k1_stack(ctx, phis, psi1, psi2, {(0, 0): (0, n % qa)})

    y3 = (3 * n - 3) if (m * n) % 4 == 1 else (3 * n - 5)
    y4 = (3 * n - 3) if (m * n) % 4 == 1 else (3 * n - 1)
    printed = [((1 % m, (2 * n - 2) % qorig), (1 % m, (2 * n - 6) % qorig),
                ((-((m - 1) // 2)) % m, y3 % qorig), (((m - 1) // 2) % m, y4 % qorig))]
    xshape = (1 % m, 1 % m, (-((m - 1) // 2)) % m, ((m - 1) // 2) % m)

    consts = ((0, (2 * n + 2) % qorig, 0), (0, 2 % qorig, 0))
    want = [2 * n] * 5 + [m]
    ident = ctx.gamma.zero()
    e_gbar, e_gbar_n = ctx.embed(gbar), ctx.embed(neg(aux, gbar))

    def u_prime(g1a, g2a, g3a, g4a, swap):
        c5, c6 = (consts[1], consts[0]) if swap else consts
        return [
            [ident, ctx.b_entry(g1a), ctx.b_entry(g2a)],
            [ctx.c_entry(g2a), ident, ctx.c_entry(g1a)],
            [e_gbar, ctx.b_entry(g3a), ctx.b_entry(g4a)],
            [ctx.c_entry(g4a), e_gbar_n, ctx.c_entry(g3a)],
            [ctx.a_entry(phis[0], g3a), ctx.a_entry(phis[1], g4a), c5],
            [ctx.a_entry(phis[0], g1a), ctx.a_entry(phis[1], g2a), c6],
        ]

    return _k1_apply_surgery(ctx, rows, off,
                             _k1_candidate_stream(m, n, printed, xshape),
                             u_prime, want, gbar)


def _k1_beta1(spec: RsmSpec, seed: int) -> RowSumMatrix:
    """k = 1, n >= 3: target [^{8mn-1} m, ^1 2n]."""
    m, n = spec.m, spec.n
    ctx = TwoGContext.create(1, m, n)
    aux = ctx.aux
    qa = aux.moduli[1]
    qorig = 4 * n
    phis = [_translation(aux, (1 % m, 0))] * 3
    _, psi1, _ = special_perm_1(m, n)
    _, psi2, _ = special_perm_2(m, n)
    gbar = ((-((m - 1) // 2)) % m, ((m * n + 1) // 2) % qa)
    assert psi1.apply(gbar) == gbar and psi1.apply((0, 0)) == (0, 0)

    rows, off = _k1_stack(ctx, phis, psi1, psi2, {(0, 0): (0, n % qa)})

    mu = 1 if m % 4 == 1 else -1
    y12 = (3 * n - 1) if (m == 1 and n == 3) else (n + mu - 2)
    w4 = halve_odd(m, halve_odd(m, (m - 1) % m))  # (m-1)/4 in Z_m
    printed = [((((m - 1) // 2) % m, y12 % qorig), ((-((m - 1) // 2)) % m, y12 % qorig),
                ((-w4) % m, ((3 + mu) * n - mu - 1) % qorig),
                (w4, ((3 - mu) * n - mu - 3) % qorig))]
    xshape = (((m - 1) // 2) % m, (-((m - 1) // 2)) % m, (-w4) % m, w4)

    consts = ((0, (2 * n - 2 * mu + 2) % qorig, 0), (0, (2 * n + 2 * mu + 2) % qorig, 0))
    want = [m] * 6
    ident = ctx.gamma.zero()
    e_gbar, e_gbar_n = ctx.embed(gbar), ctx.embed(neg(aux, gbar))

    def u_prime(g1a, g2a, g3a, g4a, swap):
        c5, c6 = (consts[1], consts[0]) if swap else consts
        return [
            [ident, ctx.b_entry(g1a), ctx.b_entry(g2a)],
            [ctx.c_entry(g2a), ident, ctx.c_entry(g1a)],
            [e_gbar, ctx.b_entry(g3a), ctx.b_entry(g4a)],
            [ctx.c_entry(g4a), e_gbar_n, ctx.c_entry(g3a)],
            [ctx.a_entry(phis[0], g1a), ctx.a_entry(phis[1], g2a), c5],
            [ctx.a_entry(phis[0], g3a), ctx.a_entry(phis[1], g4a), c6],
        ]

    return _k1_apply_surgery(ctx, rows, off,
                             _k1_candidate_stream(m, n, printed, xshape),
                             u_prime, want, gbar)


def _k1_alpha1_n1(spec: RsmSpec, seed: int) -> RowSumMatrix:
    """k = 1, n = 1: target [^1 m, ^{8m-1} 2]."""
    m = spec.m
    ctx = TwoGContext.create(1, m, 1)
    aux = ctx.aux                                 # Z_m x Z_2
    phis = [_translation(aux, (0, 1))] * 3
    lam1 = _lambda1_vlist(aux, (0, 1))
    psi1 = hall_delta_permutation(aux, lam1, seed=seed * 17 + 1,
                                  pins={(0, 0): (0, 0)})
    psi2 = _translation(aux, (0, 1))
    rows, off = _k1_stack(ctx, phis, psi1, psi2, {(0, 0): (0, 1)})

    g1a, g2a = (1 % m, 0), (1 % m, 1)
    ident = ctx.gamma.zero()
    up = [
        [ctx.a_entry(phis[0], g1a), ctx.a_entry(phis[1], g2a), ident],
        [ctx.c_entry(g2a), ctx.b_entry(g1a), ctx.b_entry(g2a)],
        [ident, ident, ctx.c_entry(g1a)],
    ]
    row_ids = [3 * aux.index(g1a) + 0, 3 * aux.index(g2a) + 1,
               off + aux.index((0, 0))]
    _replace_rows(ctx.gamma, rows, dict(zip(row_ids, up)))
    return _full_matrix(ctx, rows)


def _k1_beta1_n1(spec: RsmSpec, seed: int) -> RowSumMatrix:
    """k = 1, n = 1: target [^{8m-1} m, ^1 2]."""
    m = spec.m
    ctx = TwoGContext.create(1, m, 1)
    aux = ctx.aux
    a_part = build_coset_part(ctx, 6 * m, 0, seed=seed)

    if m == 1:
        b_part = build_subgroup_part(ctx, 1, 1, seed=seed)
        rows = [list(r) for r in a_part.rsm.rows] + [list(r) for r in b_part.rsm.rows]
        return _full_matrix(ctx, rows)

    lam1 = _lambda1_vlist(aux, (0, 1))
    psi1 = hall_delta_permutation(aux, lam1, seed=seed * 17 + 3,
                                  pins={(0, 0): (0, 0)})
    z0 = next(za for za in aux.elements
              if za != (0, 0) and psi1.apply(za) == za)
    z1 = next(za for za in aux.elements
              if add(aux, psi1.apply(za), neg(aux, za)) == (2 % m, 0))
    try:
        lam2 = VList.from_pairs(aux, [
            (2 * m - 6, (1, 0)), (3, (2 % m, 0)), (2, (0, 1)), (1, (0, 0)),
        ])
        psi2 = hall_delta_permutation(
            aux, lam2, seed=seed * 17 + 5,
            pins={(2 % m, 0): (0, 0), (0, 0): (0, 1), (0, 1): (0, 1)})
    except (HallInfeasible, HallSolverError):
        # the printed pin set is infeasible for m = 3; search psi2 directly
        # against the row-sum profile the subgroup part must realize
        psi2 = _k1_beta1_n1_psi2_search(ctx, z0, z1)
    b_rows = emit_b_rows(ctx, psi1, psi2, {z0: (2 % m, 0), z1: (0, 1)})
    rows = [list(r) for r in a_part.rsm.rows] + [list(r) for r in b_rows]
    return _full_matrix(ctx, rows)


def _k1_beta1_n1_psi2_search(ctx: TwoGContext, z0: Element, z1: Element) -> Permutation:
    """Exhaustive psi2 search for the degenerate small 2G: the subgroup
    rows must sum to [^{2m-1} m, ^1 2] given the w-threading through
    (2,0) at z0 and (0,2) at z1."""
    import itertools

    aux = ctx.aux
    m = ctx.gamma.m
    if aux.order > 8:
        raise RuntimeError("psi2 search fallback is limited to tiny subgroups")
    ords = aux.order_of_idx()
    els = aux.elements
    two = (2 % m, 0)
    oz = (0, 1)
    want = Counter({m: 2 * m - 1, 2: 1})
    for images in itertools.permutations(range(aux.order)):
        psi2 = dict(zip(els, (els[i] for i in images)))
        got: Counter = Counter()
        for w in els:
            if w == two:
                s = psi2[two]                      # the z0 row
            elif w == oz:
                s = add(aux, neg(aux, two), psi2[oz])   # the z1 row
            else:
                s = add(aux, psi2[w], neg(aux, w))
            got[ords[aux.index(s)]] += 1
        if got == want:
            return Permutation(aux, tuple(images))
    raise RuntimeError("no psi2 realizes the k=1, n=1 subgroup profile")


# -- k = 0, alpha = 1 ------------------------------------------------------


def _k0_alpha1(spec: RsmSpec, seed: int) -> RowSumMatrix:
    m, n = spec.m, spec.n
    ctx = TwoGContext.create(0, m, n)
    aux = ctx.aux                                 # Z_m x Z_n
    mn = m * n
    delta = VList.from_pairs(aux, [
        ((mn + 1) // 2, (0, 1 % n)),
        ((mn - 3) // 2, (0, (-1) % n)),
        (1, (0, (-2) % n)),
    ])
    zp = (1 % m, 1 % n)                           # original (1, 2)
    dneg = (0, (-1) % n)
    phis = [hall_delta_permutation(aux, delta, seed=seed * 19 + h,
                                   pins=({zp: dneg} if h in (2, 3) else None))
            for h in (1, 2, 3)]
    phi4 = hall_delta_permutation(aux, delta, seed=seed * 19 + 4,
                                  pins={dneg: dneg})

    gi = ctx.gamma.index
    rows: list[list[int]] = []
    for za in aux.elements:
        blk = block_A(ctx, phis, ctx.embed(za))
        rows.extend([gi(e) for e in row] for row in blk)
    off = len(rows)
    for za in aux.elements:
        dbl = add(aux, za, za)
        rows.append([gi(ctx.embed(za)), gi(ctx.embed(neg(aux, dbl))),
                     gi(ctx.embed(phi4.apply(za)))])

    qorig = 2 * n
    a2 = ctx.a_entry(phis[1], zp)
    a3 = ctx.a_entry(phis[2], zp)
    b_e, c_e = ctx.b_entry(zp), ctx.c_entry(zp)
    up = [
        [(0, (-2) % qorig, 0), a2, a3],
        [b_e, (0, 4 % qorig, 0), b_e],
        [c_e, c_e, (0, (-4) % qorig, 0)],
    ]
    row_ids = [off + aux.index(dneg), 3 * aux.index(zp) + 1, 3 * aux.index(zp) + 2]
    _replace_rows(ctx.gamma, rows, dict(zip(row_ids, up)))
    return _full_matrix(ctx, rows)


# -- serialization ---------------------------------------------------------


def rsm_to_json(M: RowSumMatrix) -> dict:
    els = M.group.elements
    doc = {
        "schema": 1,
        "kind": "rsm",
        "group": M.group.descriptor(),
        "support": M.support_kind,
        "g": M.g,
        "rows": [[M.group.format_element(els[i]) for i in row] for row in M.rows],
    }
    if M.support_kind == "custom":
        doc["support_elements"] = [M.group.format_element(els[i]) for i in M.support]
    return doc


def rsm_from_json(doc: dict) -> RowSumMatrix:
    from .groups import parse_group
    if doc.get("kind") != "rsm":
        raise ValueError("not an RSM document")
    group = parse_group(doc["group"])
    kind = doc["support"]
    if kind == "full":
        support = tuple(range(group.order))
    elif kind in ("2gamma", "coset"):
        sub, coset = two_gamma(group)
        chosen = sub if kind == "2gamma" else coset
        support = tuple(sorted(group.index(e) for e in chosen))
    else:
        support = tuple(sorted(group.index(group.parse_element(t))
                               for t in doc["support_elements"]))
    rows = tuple(tuple(group.index(group.parse_element(t)) for t in row)
                 for row in doc["rows"])
    return RowSumMatrix(group, support, rows, kind)
