import itertools
import time

import numpy as np
import pytest

from petri.errors import AuditFailed, UnsupportedExponent
from petri.fermat import (FermatIdeal, build_basis, build_ideal, decompositions, dimension_audit,
                          genus, minkowski_sum, set_C, sigma_map, verify_vanishing)
from petri.linalg import rank_mod_p
from petri.poly import Monomial, SparsePolynomial, order_key
from petri.ring import coordinate_ring_piece


def coefficient_matrix(ideal):
    mons = list(itertools.combinations_with_replacement(range(ideal.g), 2))
    col = {m: k for k, m in enumerate(mons)}
    A = np.zeros((len(ideal.generators), len(mons)), dtype=np.int64)
    for r, f in enumerate(ideal.generators):
        for m, c in f.terms.items():
            A[r, col[m]] = c
    return A


def test_basis_n6():
    b = build_basis(6)
    assert b.g == 10
    assert b.indices[0] == (0, 0) and b.indices[-1] == (3, 0)
    assert build_basis(7).g == 15


@pytest.mark.parametrize("n", range(6, 13))
def test_basis_size(n):
    b = build_basis(n)
    assert b.g == genus(n) == (n - 1) * (n - 2) // 2
    assert all(i + j <= n - 3 for i, j in b.indices)


@pytest.mark.parametrize("n", [1, 4, 5])
def test_small_exponents_rejected(n):
    with pytest.raises(UnsupportedExponent):
        build_basis(n)


@pytest.mark.parametrize("n", range(6, 13))
def test_region_sizes_brute_force(n):
    b = build_basis(n)
    brute = set()
    for (i, j) in b.indices:
        for (k, l) in b.indices:
            brute.add((i + k, j + l))
    aa = minkowski_sum(b)
    assert aa.points == brute
    assert len(aa) == (2 * n - 5) * (2 * n - 4) // 2
    c = set_C(n)
    assert len(c) == (n - 5) * (n - 4) // 2
    assert c.points <= aa.points


def test_region_examples():
    b6 = build_basis(6)
    assert len(minkowski_sum(b6)) == 28 and (6, 0) in minkowski_sum(b6)
    assert len(minkowski_sum(build_basis(7))) == 45
    assert set_C(6).points == {(6, 0)}
    assert len(set_C(7)) == 3


@pytest.mark.parametrize("n", [6, 7, 8])
def test_sigma_map_minimal(n):
    b = build_basis(n)
    aa = minkowski_sum(b)
    sig = sigma_map(aa, b)
    assert len(sig) == len(aa)
    for pt, m in sig.items():
        cands = [Monomial((a, c)) for a in b.indices for c in b.indices
                 if (a[0] + c[0], a[1] + c[1]) == pt]
        best = min(cands, key=lambda x: order_key(x.factors))
        assert m == best
    assert sig[(0, 0)] == Monomial([(0, 0), (0, 0)])


def test_sigma_c_is_leading_term_n6(ideal6):
    b = ideal6.basis
    sig = sigma_map(minkowski_sum(b), b)
    assert sig[(6, 0)] == Monomial([(3, 0), (3, 0)])
    ring = ideal6.ring()
    leads = [ideal6.labelled(f.leading(ring.order)) for f in ideal6.g2]
    assert Monomial([(3, 0), (3, 0)]) in leads


def test_generator_counts_n6(ideal6):
    assert len(ideal6.g1) == 36
    assert len(ideal6.g2) == 1
    # every (a, b) with a + b > n - 6 has an empty decomposition set
    assert all(a + b > 0 for a, b in ideal6.g2_empty)
    assert len(ideal6.g2_empty) == 10 - 1


@pytest.mark.parametrize("n", [6, 7, 8])
def test_vanishing_and_span(n):
    ideal = build_ideal(n)
    g = ideal.g
    assert verify_vanishing(ideal)
    assert rank_mod_p(coefficient_matrix(ideal), ideal.p) == (g - 2) * (g - 3) // 2
    assert coordinate_ring_piece(ideal, 2).dim == 3 * (g - 1)
    assert coordinate_ring_piece(ideal, 1).dim == g
    assert coordinate_ring_piece(ideal, 0).dim == 1


def test_vanishing_detects_broken_relation(ideal6):
    pos = ideal6.basis.position
    bad = SparsePolynomial(ideal6.p, {(pos[(0, 0)], pos[(1, 1)]): 1,
                                      (pos[(0, 0)], pos[(1, 0)]): -1})
    broken = FermatIdeal(ideal6.basis, ideal6.p, ideal6.g1 + [bad], ideal6.g2)
    assert not verify_vanishing(broken)


def test_g2_terms_lie_over_expected_points(ideal6):
    (f,) = ideal6.g2
    pts = sorted((ideal6.labelled(m).n_sum, ideal6.labelled(m).mu_sum) for m in f.terms)
    assert pts == [(0, 0), (0, 6), (6, 0)]


def test_decompositions_unique_for_corner():
    b = build_basis(6)
    assert decompositions((6, 0), b) == [(b.position[(3, 0)],) * 2]


def test_audit_examples():
    r6 = dimension_audit(6)
    assert r6.certified and r6.identity_value == 0
    assert (r6.minkowski_size, r6.c_size, 3 * (r6.g - 1)) == (28, 1, 27)
    r10 = dimension_audit(10)
    assert (r10.minkowski_size, r10.c_size, 3 * (r10.g - 1)) == (120, 15, 105)
    assert r10.certified


def test_audit_range_fast():
    t0 = time.perf_counter()
    for n in range(6, 13):
        rep = dimension_audit(n)
        assert rep.certified and rep.standard_matches_sigma and rep.sigma_c_leading
        assert rep.g2_outside_c == 0
    assert time.perf_counter() - t0 < 5


def test_audit_fails_on_truncated_g2(ideal6):
    truncated = FermatIdeal(ideal6.basis, ideal6.p, ideal6.g1, [])
    with pytest.raises(AuditFailed) as exc:
        dimension_audit(6, truncated)
    assert exc.value.count == 28


def test_ideal_json_roundtrip(ideal6):
    data = ideal6.to_json()
    assert data["n"] == 6 and data["g"] == 10
    back = FermatIdeal.from_json(data)
    assert back.g1 == ideal6.g1 and back.g2 == ideal6.g2 and back.p == ideal6.p
