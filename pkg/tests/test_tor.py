import numpy as np
import pytest

from petri.errors import IdealNotPreserved, ZeroSpace
from petri.group import compose, diagonal, inverse, random_invertible
from petri.koszul import koszul_complex
from petri.linalg import rank_mod_p
from petri.tor import (block_diagonal_audit, chain_action, character_table_slice, exterior_power,
                       ring_action, tor_representation)

P = 7


def test_ring_action_identity(ideal6):
    act = ring_action(np.eye(10, dtype=np.int64), ideal6, 3)
    for d in range(4):
        assert np.array_equal(act[d].dense(), np.eye(ideal6.ring().piece(d).dim, dtype=np.int64))


def test_ring_action_diagonal(ideal6):
    D = diagonal(6, P, 1, 0)            # x -> 3x
    act = ring_action(D, ideal6, 2)
    expected = [pow(3, i + 1, P) for i, _ in ideal6.basis.indices]
    basis = ideal6.ring().piece(1).basis
    assert [int(act[1].dense()[k, k]) for k in range(10)] == [expected[m[0]] for m in basis]
    assert act[1].dense().sum() % P == sum(expected) % P


def test_ring_action_multiplicative(ideal6, group6):
    ring = ideal6.ring()
    for e in group6[::37]:
        act = ring_action(e, ideal6, 2)
        M = e.dense()
        # σ(w_a w_b) = σ(w_a) σ(w_b) on products of degree-1 basis elements
        for a, b in [(0, 1), (2, 7), (4, 4)]:
            img_a, img_b = M[a], M[b]
            prod = {}
            for u in np.flatnonzero(img_a):
                for v in np.flatnonzero(img_b):
                    key = tuple(sorted((int(u), int(v))))
                    prod[key] = (prod.get(key, 0) + int(img_a[u]) * int(img_b[v])) % P
            vec = np.zeros(ring.piece(2).dim, dtype=np.int64)
            for mono, c in prod.items():
                for r, x in ring.piece(2).normal_form(mono).items():
                    vec[r] = (vec[r] + c * x) % P
            col = np.zeros(ring.piece(2).dim, dtype=np.int64)
            for r, x in ring.piece(2).normal_form((a, b)).items():
                col = (col + x * act[2].dense()[:, r]) % P
            assert np.array_equal(vec, col)


def test_ring_action_rejects_non_automorphism(ideal6):
    rng = np.random.default_rng(1)
    with pytest.raises(IdealNotPreserved):
        ring_action(random_invertible(10, P, rng), ideal6, 2)


def test_exterior_power_is_functorial():
    rng = np.random.default_rng(0)
    A, B = rng.integers(0, P, size=(2, 5, 5))
    for i in range(0, 4):
        # column convention: Λ(σ∘τ) has matrix Λ(τ·σ) = Λ(σ) Λ(τ) in our indexing
        lhs = exterior_power(B @ A % P, i, P)
        rhs = exterior_power(A, i, P) @ exterior_power(B, i, P) % P
        assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("ij", [(1, 2), (2, 3)])
def test_equivariance_with_differential(ideal6, group6, ij):
    i, j = ij
    kc = koszul_complex(ideal6)
    rng = np.random.default_rng(i)
    picks = [group6[k] for k in rng.choice(len(group6), size=12, replace=False)]
    # the differentials out of and into the slice (i, j)
    for a, da in [(i, j - i), (i + 1, j - i - 1)]:
        D = kc.matrix(a, da).dense()
        for s in picks:
            T_src = chain_action(s.dense(), ideal6, a, da)
            T_dst = chain_action(s.dense(), ideal6, a - 1, da + 1)
            assert np.array_equal(D @ T_src % P, T_dst @ D % P)


def test_identity_on_tor12(ideal6, group6):
    rep = tor_representation(group6[0], ideal6, 1, 2)
    assert rep.dim == 28
    assert np.array_equal(rep.matrix.dense(), np.eye(28, dtype=np.int64))
    assert int(rep.trace) == 28 % P


def test_traces_match_lambda(ideal6, group6):
    chars = character_table_slice(group6, ideal6, 1, 2)
    for k, e in enumerate(group6):
        assert chars[k] == int(np.trace(e.lam.dense())) % P


def test_diagonal_trace_is_eigenvalue_sum(ideal6, system6):
    # a diagonal σ scales the quadric w_a w_b by σ_a σ_b; I_2 has a basis of
    # weight vectors, so the trace is the sum of its 28 eigenvalues
    from petri.quadrics import is_automorphism
    D = diagonal(6, P, 2, 3)
    lam = is_automorphism(D, system6).lam
    assert np.count_nonzero(lam - np.diag(np.diag(lam))) == 0
    rep = tor_representation(D, ideal6, 1, 2)
    assert int(rep.trace) == int(np.diag(lam).sum()) % P


def test_traces_are_basis_independent(ideal6, group6):
    for e in group6[::23]:
        for i, j in [(1, 2), (2, 4)]:
            a = tor_representation(e, ideal6, i, j)
            b = tor_representation(e, ideal6, i, j, seed=5)
            assert a.trace == b.trace


def test_inverse_matrix(ideal6, group6):
    for e in group6[::19]:
        A = tor_representation(e, ideal6, 1, 2).matrix.dense()
        B = tor_representation(inverse(e), ideal6, 1, 2).matrix.dense()
        assert np.array_equal(A @ B % P, np.eye(28, dtype=np.int64))


def test_invertible_and_sizes(ideal6, group6):
    for e in group6[::31]:
        for (i, j), size in {(1, 2): 28, (2, 3): 105, (2, 4): 27}.items():
            T = tor_representation(e, ideal6, i, j).matrix.dense()
            assert T.shape == (size, size) and rank_mod_p(T, P) == size


def test_zero_space(ideal6, group6):
    with pytest.raises(ZeroSpace):
        tor_representation(group6[0], ideal6, 1, 3)


def test_block_audit(ideal6, group6):
    a1 = block_diagonal_audit(group6, ideal6, 1, pairs=200)
    assert a1.blocks == {2: 28} and a1.ok
    sample = group6[::9]
    a2 = block_diagonal_audit(sample, ideal6, 2, pairs=30)
    assert a2.blocks == {3: 105, 4: 27} and a2.ok


def test_class_functions(ideal6, group6):
    chars = character_table_slice(group6, ideal6, 2, 4)
    rng = np.random.default_rng(3)
    index = {e.dense().tobytes(): k for k, e in enumerate(group6)}
    for a, b in rng.integers(0, len(group6), size=(60, 2)):
        s, t = group6[a], group6[b]
        conj = compose(compose(t, s), inverse(t))
        assert chars[index[conj.dense().tobytes()]] == chars[a]


def test_duality_dimensions(ideal6, group6):
    kc = koszul_complex(ideal6)
    g = 10
    for i, j in [(1, 2), (2, 3), (2, 4)]:
        assert kc.betti(i, j) == kc.betti(g - 2 - i, g + 1 - j)
    assert len(character_table_slice(group6[:5], ideal6, 2, 4)) == \
        len(character_table_slice(group6[:5], ideal6, 6, 7))
