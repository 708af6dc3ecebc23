import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brpic.errors import DimensionMismatch, WrongCharacteristic
from brpic.forms import (Sym3Coset, SymForm, WedgeForm, act_left, binomial_dims, dims, gl_act_coset, gl_act_sym,
                         gl_act_wedge, interior_derivation, is_nondegenerate, pi_alt, radical, relation_basis,
                         sym3_reduce)
from brpic.gfp import FpVector, PrimeField, PrimeFieldMatrix, all_vectors, gl_enumerate, rank

from conftest import matrices

F2, F3, F5 = PrimeField(2), PrimeField(3), PrimeField(5)


def wedge3(F, n):
    return st.lists(st.integers(0, F.p - 1), min_size=len(WedgeForm.basis_keys(n, 3)),
                    max_size=len(WedgeForm.basis_keys(n, 3))).map(lambda v: WedgeForm.from_vector(F, n, 3, v))


def sym2(F, n):
    k = len(SymForm.basis_keys(n, 2))
    return st.lists(st.integers(0, F.p - 1), min_size=k, max_size=k).map(lambda v: SymForm.from_vector(F, n, 2, v))


def cubic(n):
    k = len(SymForm.basis_keys(n, 3))
    return st.lists(st.integers(0, 1), min_size=k, max_size=k).map(lambda v: SymForm.from_vector(F2, n, 3, v))


def vectors(F, n):
    return st.lists(st.integers(0, F.p - 1), min_size=n, max_size=n).map(lambda c: FpVector(F, c))


X012 = WedgeForm.basis(F3, 3, (0, 1, 2))


class TestWedgeForm:
    def test_sorting_applies_sign(self):
        assert WedgeForm(F3, 3, 3, {(1, 0, 2): 1}) == WedgeForm(F3, 3, 3, {(0, 1, 2): 2})

    def test_repeated_index_vanishes(self):
        assert WedgeForm(F3, 3, 2, {(1, 1): 1}).is_zero()

    def test_evaluate_is_determinant(self):
        assert X012.evaluate([1, 0, 0], [0, 1, 0], [0, 0, 1]) == 1
        assert X012.evaluate([0, 1, 0], [1, 0, 0], [0, 0, 1]) == 2

    def test_index_out_of_range(self):
        with pytest.raises(DimensionMismatch):
            WedgeForm(F3, 3, 3, {(0, 1, 3): 1})


class TestGlActWedge:
    def test_identity(self):
        assert gl_act_wedge(PrimeFieldMatrix.identity(F3, 3), X012) == X012

    @pytest.mark.parametrize("lam", [1, 2, 3, 4])
    def test_diagonal_scales(self, lam):
        phi = WedgeForm.basis(F5, 3, (0, 1, 2))
        assert gl_act_wedge(PrimeFieldMatrix.diag(F5, [lam, 1, 1]), phi) == phi.scale(lam)

    def test_swap_flips_sign(self):
        swap = PrimeFieldMatrix(F3, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        assert gl_act_wedge(swap, X012) == X012.scale(2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            gl_act_wedge(PrimeFieldMatrix.identity(F3, 4), X012)

    @given(wedge3(F3, 4), matrices(3, 4, invertible=True))
    def test_pointwise_pullback(self, phi, g):
        psi = gl_act_wedge(g, phi)
        rng = np.random.default_rng(1)
        for _ in range(5):
            u, v, w = rng.integers(0, 3, size=(3, 4))
            gu, gv, gw = (list(g @ FpVector(F3, x)) for x in (u, v, w))
            assert psi.evaluate(u, v, w) == phi.evaluate(gu, gv, gw)


class TestGlActSym:
    Z01 = SymForm.basis(F3, 3, (0, 1))

    def test_identity(self):
        assert gl_act_sym(PrimeFieldMatrix.identity(F3, 3), self.Z01) == self.Z01

    def test_swap_fixes(self):
        swap = PrimeFieldMatrix(F3, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        assert gl_act_sym(swap, self.Z01) == self.Z01

    def test_shear_pointwise_oracle(self):
        # e0 -> e0, e1 -> e0 + e1: columns of g
        g = PrimeFieldMatrix(F3, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
        out = gl_act_sym(g, self.Z01)
        for u in all_vectors(F3, 3):
            for v in all_vectors(F3, 3):
                assert out.evaluate(u, v) == self.Z01.evaluate(g @ u, g @ v)
        assert out == SymForm(F3, 3, 2, {(0, 1): 1, (1, 1): 2})

    def test_cubic_pointwise(self):
        s = SymForm(F2, 3, 3, {(0, 1, 2): 1, (0, 0, 1): 1})
        for g in list(gl_enumerate(F2, 3))[::7]:
            out = gl_act_sym(g, s)
            for v in all_vectors(F2, 3):
                assert out.evaluate(v) == s.evaluate(g @ v)


class TestActionLaws:
    def test_exhaustive_gl2_f2(self):
        group = list(gl_enumerate(F2, 2))
        forms = [SymForm.from_vector(F2, 2, 2, v) for v in itertools.product(range(2), repeat=3)]
        for g, h in itertools.product(group, repeat=2):
            for s in forms:
                assert gl_act_sym(g @ h, s) == gl_act_sym(h, gl_act_sym(g, s))
                assert act_left(g @ h, s) == act_left(g, act_left(h, s))

    @given(matrices(3, 3, invertible=True), matrices(3, 3, invertible=True), wedge3(F3, 3), sym2(F3, 3))
    def test_random_gl3_f3(self, g, h, phi, s):
        assert gl_act_wedge(g @ h, phi) == gl_act_wedge(h, gl_act_wedge(g, phi))
        assert gl_act_sym(g @ h, s) == gl_act_sym(h, gl_act_sym(g, s))
        assert act_left(g @ h, phi) == act_left(g, act_left(h, phi))

    @given(matrices(2, 3, invertible=True), matrices(2, 3, invertible=True), cubic(3))
    def test_coset_action(self, g, h, c):
        coset = sym3_reduce(c)
        assert gl_act_coset(g @ h, coset) == gl_act_coset(h, gl_act_coset(g, coset))


def naive_contraction(v, phi):
    """Coefficient on (i, j) is phi(e_i, e_j, v)."""
    n = phi.n
    eye = np.eye(n, dtype=int)
    return WedgeForm(phi.field, n, 2, {(i, j): phi.evaluate(eye[i], eye[j], list(v))
                                       for i, j in itertools.combinations(range(n), 2)})


class TestInteriorDerivation:
    def test_e0(self):
        assert interior_derivation(FpVector.basis(F3, 3, 0), X012) == WedgeForm.basis(F3, 3, (1, 2))

    def test_disjoint_support(self):
        phi = WedgeForm.basis(F3, 4, (0, 1, 2))
        assert interior_derivation(FpVector.basis(F3, 4, 3), phi).is_zero()

    def test_wrong_degree(self):
        with pytest.raises(DimensionMismatch):
            interior_derivation(FpVector.basis(F3, 3, 0), WedgeForm.basis(F3, 3, (0, 1)))

    @given(vectors(F3, 4), wedge3(F3, 4))
    def test_naive_oracle(self, v, phi):
        assert interior_derivation(v, phi) == naive_contraction(v, phi)

    @given(vectors(F3, 4), wedge3(F3, 4), matrices(3, 4, invertible=True))
    def test_equivariance(self, v, phi, g):
        # iota_v(phi o g) = (iota_{g v} phi) o g
        assert interior_derivation(v, gl_act_wedge(g, phi)) == gl_act_wedge(g, interior_derivation(g @ v, phi))

    @given(vectors(F5, 4), vectors(F5, 4), wedge3(F5, 4), st.integers(0, 4))
    def test_bilinear(self, u, v, phi, c):
        assert interior_derivation(u + v.scale(c), phi) == \
            interior_derivation(u, phi) + interior_derivation(v, phi).scale(c)


class TestRadical:
    def test_nondegenerate(self):
        assert radical(X012) == [] and is_nondegenerate(X012)

    def test_extra_direction(self):
        phi = WedgeForm.basis(F3, 4, (0, 1, 2))
        assert [v.coords for v in radical(phi)] == [(0, 0, 0, 1)]
        assert not is_nondegenerate(phi)

    def test_zero_form(self):
        assert len(radical(WedgeForm.zero(F3, 3, 3))) == 3
        assert not is_nondegenerate(WedgeForm.zero(F3, 3, 3))

    @given(wedge3(F3, 5), st.integers(0, 2))
    def test_subspace(self, phi, c):
        basis = radical(phi)
        for u, v in itertools.product(basis, repeat=2):
            assert interior_derivation(u + v.scale(c), phi).is_zero()

    @given(wedge3(F3, 4), matrices(3, 4, invertible=True))
    def test_dimension_invariant(self, phi, g):
        assert len(radical(gl_act_wedge(g, phi))) == len(radical(phi))


class TestSym3:
    def test_mixed_square_rewrites_to_smaller_index(self):
        c = sym3_reduce(SymForm(F2, 2, 3, {(0, 1, 1): 1}))  # x0 x1^2
        assert c.representative == SymForm(F2, 2, 3, {(0, 0, 1): 1})

    def test_squarefree_unchanged(self):
        s = SymForm(F2, 3, 3, {(0, 1, 2): 1})
        assert sym3_reduce(s).representative == s

    def test_odd_p_rejected(self):
        with pytest.raises(WrongCharacteristic):
            sym3_reduce(SymForm(F3, 2, 3, {(0, 1, 1): 1}))

    def test_noncanonical_coset_rejected(self):
        with pytest.raises(ValueError):
            Sym3Coset(F2, 2, SymForm(F2, 2, 3, {(0, 1, 1): 1}))

    @given(cubic(4), st.integers(0, 3), st.integers(0, 3))
    def test_well_defined(self, a, i, j):
        if i == j:
            return
        rel = SymForm(F2, 4, 3, {(i, i, j): 1, (i, j, j): 1})
        assert sym3_reduce(a) == sym3_reduce(a + rel)

    @given(cubic(4))
    def test_idempotent(self, a):
        once = sym3_reduce(a)
        assert sym3_reduce(once.representative) == once

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_projection_kernel_is_relations(self, n):
        keys = SymForm.basis_keys(n, 3)
        images = [sym3_reduce(SymForm.basis(F2, n, k)).representative.vector() for k in keys]
        assert rank(images, 2) == len(keys) - len(relation_basis(F2, n))
        for r in relation_basis(F2, n):
            assert sym3_reduce(r).is_zero()

    def test_pi_alt(self):
        assert pi_alt(sym3_reduce(SymForm(F2, 3, 3, {(0, 1, 2): 1}))) == WedgeForm.basis(F2, 3, (0, 1, 2))
        assert pi_alt(sym3_reduce(SymForm(F2, 2, 3, {(0, 1, 1): 1}))).is_zero()


@pytest.mark.parametrize("n", range(1, 7))
def test_dimensions_by_enumeration(n):
    assert dims(n) == binomial_dims(n)
