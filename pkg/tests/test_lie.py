import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brpic.errors import (FormNotInvariant, LieAlgebraError, NondegenerateRequired, WrongCharacteristic)
from brpic.forms import SymForm, WedgeForm, is_nondegenerate
from brpic.gfp import PrimeField, PrimeFieldMatrix
from brpic.h3 import H3Class
from brpic.lie import (LieAlgebraFp, MetricForm, ad_matrix, autm_stab_report, check_invariant, killing_form,
                       omega_from_metric, sl2)

from conftest import random_invertible

F5, F7 = PrimeField(5), PrimeField(7)


def abelian(F, d):
    return LieAlgebraFp(F, d, np.zeros((d, d, d), dtype=np.int64))


def heisenberg(F):
    return LieAlgebraFp.from_brackets(F, 3, {(0, 1): {2: 1}})


def direct_sum(a, b):
    d = a.dim + b.dim
    c = np.zeros((d, d, d), dtype=np.int64)
    c[:a.dim, :a.dim, :a.dim] = a.structure
    c[a.dim:, a.dim:, a.dim:] = b.structure
    return LieAlgebraFp(a.field, d, c)


def change_basis(g, P):
    """Structure constants in the basis f_i = sum_k P[k, i] e_k."""
    p = g.field.p
    Pa = P.to_array()
    Pinv = P.inverse().to_array()
    c = np.einsum("ai,bj,abk,lk->ijl", Pa, Pa, g.structure, Pinv) % p
    return LieAlgebraFp(g.field, g.dim, c)


class TestConstruction:
    def test_sl2_brackets(self):
        g = sl2(F5)
        e, f, h = np.eye(3, dtype=np.int64)
        assert list(g.bracket(e, f)) == list(h)
        assert list(g.bracket(h, e)) == list(2 * e)
        assert list(g.bracket(h, f)) == list(-2 * f % 5)
        assert g.names == ("e", "f", "h") and g.derived_dim() == 3

    def test_small_characteristic(self):
        with pytest.raises(WrongCharacteristic):
            sl2(PrimeField(3))
        with pytest.raises(WrongCharacteristic):
            abelian(PrimeField(2), 2)

    def test_not_antisymmetric(self):
        c = np.zeros((2, 2, 2), dtype=np.int64)
        c[0, 1, 0] = 1
        with pytest.raises(LieAlgebraError, match="antisymmetric"):
            LieAlgebraFp(F5, 2, c)

    def test_jacobi_fails(self):
        # [e0,e1] = e1, [e0,e2] = e0, [e1,e2] = e2 violates Jacobi
        with pytest.raises(LieAlgebraError, match="Jacobi"):
            LieAlgebraFp.from_brackets(F5, 3, {(0, 1): {1: 1}, (0, 2): {0: 1}, (1, 2): {2: 1}})

    def test_diagonal_bracket_rejected(self):
        with pytest.raises(LieAlgebraError):
            LieAlgebraFp.from_brackets(F5, 2, {(0, 0): {1: 1}})


class TestAdKilling:
    def test_ad_e(self):
        assert ad_matrix(sl2(F5), 0) == PrimeFieldMatrix(F5, [[0, 0, -2], [0, 0, 0], [0, 1, 0]])

    def test_ad_h(self):
        assert ad_matrix(sl2(F5), 2) == PrimeFieldMatrix(F5, [[2, 0, 0], [0, -2, 0], [0, 0, 0]])

    def test_ad_abelian(self):
        assert not ad_matrix(abelian(F5, 3), 1).to_array().any()

    def test_ad_index(self):
        with pytest.raises(IndexError):
            ad_matrix(sl2(F5), 3)

    def test_ad_is_representation(self):
        g = sl2(F7)
        for i, j in itertools.product(range(3), repeat=2):
            ai, aj = ad_matrix(g, i).to_array(), ad_matrix(g, j).to_array()
            rhs = sum(int(g.structure[i, j, k]) * ad_matrix(g, k).to_array() for k in range(3))
            assert np.array_equal((ai @ aj - aj @ ai) % 7, rhs % 7)

    def test_killing_sl2(self):
        B = killing_form(sl2(F5))
        assert B.matrix == ((0, 4, 0), (4, 0, 0), (0, 0, 3))
        assert B.is_nondegenerate()

    def test_killing_is_trace(self):
        g = sl2(F7)
        B = killing_form(g)
        for i, j in itertools.product(range(3), repeat=2):
            assert B.matrix[i][j] == np.trace((ad_matrix(g, i) @ ad_matrix(g, j)).to_array()) % 7

    def test_killing_abelian(self):
        assert killing_form(abelian(F5, 3)).matrix == ((0,) * 3,) * 3

    @pytest.mark.parametrize("p", [5, 7, 11])
    def test_killing_invariant_on_random_algebras(self, p, rng):
        F = PrimeField(p)
        algebras = [sl2(F), heisenberg(F), direct_sum(sl2(F), abelian(F, 1)), direct_sum(sl2(F), heisenberg(F))]
        for g in algebras:
            for _ in range(3):
                h = change_basis(g, random_invertible(p, g.dim, rng))
                check_invariant(h, killing_form(h))


class TestOmega:
    def test_sl2_display_over_f5(self):
        w = omega_from_metric(sl2(F5), killing_form(sl2(F5)))
        assert w.alt == WedgeForm.basis(F5, 3, (0, 1, 2), 3)
        assert w.sym == SymForm(F5, 3, 2, {(0, 1): 4, (2, 2): 3})

    def test_sl2_display_integral(self):
        # over a large prime no coefficient of 8 x_e^x_f^x_h, 4 z_e z_f + 8 z_h^2 wraps
        F = PrimeField(101, allow_large=True)
        w = omega_from_metric(sl2(F), killing_form(sl2(F)))
        assert w.alt == WedgeForm.basis(F, 3, (0, 1, 2), 8)
        assert w.sym == SymForm(F, 3, 2, {(0, 1): 4, (2, 2): 8})

    def test_abelian_zero(self):
        g = abelian(F5, 3)
        assert omega_from_metric(g, MetricForm(F5, np.zeros((3, 3), dtype=int))) == H3Class.zero(F5, 3)

    def test_not_invariant(self):
        with pytest.raises(FormNotInvariant) as err:
            omega_from_metric(sl2(F5), MetricForm(F5, np.eye(3, dtype=int)))
        assert len(err.value.triple) == 3

    @pytest.mark.parametrize("p", [5, 7, 11, 13])
    def test_alt_nondegenerate_for_perfect_metric(self, p, rng):
        F = PrimeField(p)
        for _ in range(3):
            g = change_basis(sl2(F), random_invertible(p, 3, rng))
            w = omega_from_metric(g, killing_form(g))
            assert is_nondegenerate(w.alt)

    @given(st.integers(1, 4))
    def test_scaled_killing_is_invariant(self, c):
        g = sl2(F5)
        B = MetricForm(F5, (killing_form(g).array() * c) % 5)
        check_invariant(g, B)


class TestAutm:
    def test_abelian_refused(self):
        g = abelian(F5, 3)
        with pytest.raises(NondegenerateRequired):
            autm_stab_report(g, MetricForm(F5, np.eye(3, dtype=int)))

    def test_heisenberg_refused(self):
        with pytest.raises(NondegenerateRequired):
            autm_stab_report(heisenberg(F5), MetricForm(F5, np.zeros((3, 3), dtype=int)))

    @pytest.mark.slow
    def test_sl2_f5(self):
        rep = autm_stab_report(sl2(F5), keep=200)
        assert rep.stab.order == 120 and rep.brpic_order == 120
        assert rep.stab.named_match == ("SO", 3, 120)
        g = sl2(F5)
        B = killing_form(g).array()
        basis = np.eye(3, dtype=np.int64)
        for m in rep.stab.sample_matrices():
            a = m.to_array()
            assert np.array_equal((a.T @ B @ a) % 5, B)
            for x, y in itertools.combinations(basis, 2):
                assert np.array_equal(a @ g.bracket(x, y) % 5, g.bracket(a @ x % 5, a @ y % 5))
