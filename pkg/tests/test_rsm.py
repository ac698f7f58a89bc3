import json
from collections import Counter

import pytest

from hwpkit.groups import add, cyclic_group, dihedral_group, group_sum, neg, two_gamma
from hwpkit.perms import Permutation
from hwpkit.rsm import (RowSumMatrix, RsmSpec, TwoGContext, UnsupportedRsmCase,
                        block_A, block_A_prime, build_2gamma, build_abelian_rsm,
                        build_dihedral_rsm, build_gamma_minus_2gamma,
                        extend_columns, orders_profile, row_sum_orders, row_sums,
                        rsm_from_json, rsm_to_json, verify_rsm)


def small_rsm():
    z3 = cyclic_group(3)
    gi = z3.index
    rows = ((gi((0,)), gi((0,)), gi((0,))),
            (gi((1,)), gi((2,)), gi((1,))),
            (gi((2,)), gi((1,)), gi((2,))))
    return RowSumMatrix(z3, tuple(range(3)), rows, "full")


def test_row_sums_example():
    z3 = cyclic_group(3)
    gi = z3.index
    rows = ((gi((0,)), gi((0,))), (gi((1,)), gi((2,))), (gi((2,)), gi((1,))))
    M = RowSumMatrix(z3, tuple(range(3)), rows, "full")
    assert row_sums(M).counts == Counter({(0,): 3})
    assert row_sum_orders(M) == Counter({1: 3})


def test_verify_rsm_diagnostics():
    M = small_rsm()
    assert verify_rsm(M, Counter({1: 1, 3: 2}))
    bad = verify_rsm(M, Counter({1: 3}))
    assert not bad and "orders" in bad.reason
    # duplicate an element in a column
    rows = [list(r) for r in M.rows]
    rows[1][0] = rows[0][0]
    broken = RowSumMatrix(M.group, M.support, tuple(tuple(r) for r in rows), "full")
    chk = verify_rsm(broken, Counter({1: 1, 3: 2}))
    assert not chk and "column 1" in chk.reason


def test_verify_rsm_rejects_single_column():
    z3 = cyclic_group(3)
    rows = ((0,), (1,), (2,))
    M = RowSumMatrix(z3, tuple(range(3)), rows, "full")
    assert not verify_rsm(M, Counter({1: 3}))


def test_column_mutation_breaks_orders():
    M = build_abelian_rsm(1, 3, 1, 1, 0, 6, 3, seed=2)
    rows = [list(r) for r in M.rows]
    rows[0][2], rows[1][2] = rows[1][2], rows[0][2]
    mutated = RowSumMatrix(M.group, M.support, tuple(tuple(r) for r in rows),
                           M.support_kind)
    expected = orders_profile(0, 3, 12, 2)
    assert verify_rsm(M, expected)
    assert not verify_rsm(mutated, expected)


def test_extend_columns_cases():
    # case 2: S is the whole group with a complete mapping (odd order)
    z5 = cyclic_group(5)
    gi = z5.index
    M = RowSumMatrix(z5, tuple(range(5)), tuple(
        (gi((x,)), gi(((-x) % 5,)), gi((x,))) for x in range(5)), "full")
    before = row_sums(M).counts
    M1 = extend_columns(M, 1, seed=0)
    assert M1.g == 4 and row_sums(M1).counts == before
    # case 1: S = -S, even extension
    M2 = extend_columns(M, 2, seed=0)
    assert M2.g == 5 and row_sums(M2).counts == before
    with pytest.raises(ValueError):
        extend_columns(M, -1)


def test_extend_columns_case2_rejected_for_cyclic_sylow():
    z4 = cyclic_group(4)
    gi = z4.index
    rows = tuple((gi((x,)), gi(((-x) % 4,)), gi((x,))) for x in range(4))
    M = RowSumMatrix(z4, tuple(range(4)), rows, "full")
    with pytest.raises(Exception):
        extend_columns(M, 1, seed=0)


def test_block_sums_match_lemma():
    for (k, m, n) in [(0, 1, 1), (0, 3, 1), (1, 3, 1), (1, 1, 3), (2, 3, 3)]:
        ctx = TwoGContext.create(k, m, n)
        ident = Permutation.identity(ctx.aux)
        phis = [ident] * 3
        gam = ctx.gamma
        q = gam.moduli[1]
        for za in ctx.aux.elements:
            z = ctx.embed(za)
            zg = (z[0], z[1], 0)
            blk = block_A(ctx, phis, z)
            for h in range(3):
                assert group_sum(gam, blk[h]) == gam.zero()
            blkp = block_A_prime(ctx, phis, z)
            expect = add(gam, add(gam, zg, zg), (0, 2 % q, 0))
            assert group_sum(gam, blkp[0]) == expect
            assert group_sum(gam, blkp[1]) == expect
            assert group_sum(gam, blkp[2]) == neg(gam, expect)


def test_block_rejects_outside_2g():
    ctx = TwoGContext.create(1, 3, 1)
    with pytest.raises(ValueError):
        block_A(ctx, [Permutation.identity(ctx.aux)] * 3, (0, 1))


def test_gamma_minus_2gamma_examples():
    M = build_gamma_minus_2gamma(2, 1, 1, 0, 12, g=3)
    assert verify_rsm(M, Counter({4: 12}))
    M = build_gamma_minus_2gamma(1, 3, 1, 9, 9, g=3)
    assert verify_rsm(M, orders_profile(9, 3, 9, 2))
    with pytest.raises((UnsupportedRsmCase, ValueError)):
        build_gamma_minus_2gamma(0, 3, 3, 1, 26)


def test_gamma_minus_2gamma_support_partition():
    M = build_gamma_minus_2gamma(1, 3, 1, 10, 8, g=3)
    sub, coset = two_gamma(M.group)
    assert set(M.support) == {M.group.index(e) for e in coset}


def test_2gamma_examples():
    M = build_2gamma(0, 3, 5, 0, 15, g=3)
    assert verify_rsm(M, Counter({5: 15}))
    M = build_2gamma(2, 1, 1, 2, 2, g=3)
    assert verify_rsm(M, orders_profile(2, 1, 2, 4))
    with pytest.raises(UnsupportedRsmCase):
        build_2gamma(1, 3, 1, 2, 4)


def test_stacked_supports_partition_gamma():
    A = build_gamma_minus_2gamma(1, 3, 1, 10, 8, g=3, seed=1)
    B = build_2gamma(1, 3, 1, 3, 3, g=3, seed=1)
    assert A.group == B.group
    assert not (set(A.support) & set(B.support))
    assert len(A.support) + len(B.support) == A.group.order


def test_abelian_builder_examples():
    M = build_abelian_rsm(1, 1, 1, 0, 2, 0, 3)
    assert verify_rsm(M, Counter({1: 4}))
    assert M.group.order == 4
    M = build_abelian_rsm(1, 3, 1, 1, 0, 6, 3)
    assert verify_rsm(M, Counter({2: 12}))
    # gamma + delta = 24 forces ell = 3 here (2^ell m n = 24)
    M = build_abelian_rsm(3, 1, 3, 2, 5, 19, 4)
    assert verify_rsm(M, orders_profile(10, 1, 38, 12))
    with pytest.raises(ValueError):
        build_abelian_rsm(1, 1, 1, 0, 1, 0, 3)


def test_abelian_extension_preserves_sums():
    M3 = build_abelian_rsm(1, 1, 3, 1, 2, 4, 3, seed=5)
    M5 = build_abelian_rsm(1, 1, 3, 1, 2, 4, 5, seed=5)
    assert row_sums(M3).counts == row_sums(M5).counts


def test_dihedral_examples_from_statements():
    # [^7 1, ^1 2] over Dih(Z_1 x Z_4)
    M = build_dihedral_rsm(RsmSpec(1, 1, 1, 3, 7, 1), seed=0)
    assert verify_rsm(M, orders_profile(7, 1, 1, 2))
    # k=0, m=3, n=5, alpha=1: [^1 3, ^59 5]
    M = build_dihedral_rsm(RsmSpec(0, 3, 5, 3, 1, 59), seed=0)
    assert verify_rsm(M, orders_profile(1, 3, 59, 5))
    with pytest.raises(UnsupportedRsmCase):
        build_dihedral_rsm(RsmSpec(2, 1, 1, 3, 16, 0))
    with pytest.raises(UnsupportedRsmCase):
        build_dihedral_rsm(RsmSpec(1, 1, 1, 3, 2, 6))
    with pytest.raises(ValueError):
        RsmSpec(1, 1, 1, 3, 3, 3)


def test_dihedral_beta_one_swaps_group_at_k0():
    M = build_dihedral_rsm(RsmSpec(0, 3, 5, 3, 59, 1), seed=0)
    assert M.group == dihedral_group(5, 3, 0)
    assert verify_rsm(M, orders_profile(59, 3, 1, 5))


@pytest.mark.parametrize("g", [3, 4])
@pytest.mark.parametrize("k,m,n", [(0, 1, 1), (0, 3, 1), (1, 1, 1), (1, 1, 3), (2, 1, 1)])
def test_dihedral_small_grid(g, k, m, n):
    tot = 2 ** (k + 2) * m * n
    for a in range(tot + 1):
        b = tot - a
        open_case = (k >= 2 and b == 0) or (k == 1 and (a in (0, 2, 4) or b in (0, 2, 4)))
        if open_case:
            with pytest.raises(UnsupportedRsmCase):
                build_dihedral_rsm(RsmSpec(k, m, n, g, a, b), seed=g)
            continue
        M = build_dihedral_rsm(RsmSpec(k, m, n, g, a, b), seed=g)
        chk = verify_rsm(M, orders_profile(a, m, b, 2 ** k * n),
                         expected_support=range(M.group.order))
        assert chk, (g, k, m, n, a, b, chk.reason)


def test_rsm_json_round_trip():
    M = build_dihedral_rsm(RsmSpec(1, 3, 1, 3, 11, 13), seed=0)
    doc = json.loads(json.dumps(rsm_to_json(M)))
    M2 = rsm_from_json(doc)
    assert M2.rows == M.rows and M2.group == M.group and M2.support == M.support
    A = build_gamma_minus_2gamma(1, 3, 1, 10, 8, g=3)
    doc = rsm_to_json(A)
    assert doc["support"] == "coset"
    assert rsm_from_json(doc).support == A.support
