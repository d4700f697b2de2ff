import numpy as np
import pytest

from gindexlab.circle import FrequencyWindow, PeriodicGrid, grid_for_window
from gindexlab.errors import NoHomomorphism
from gindexlab.groups import build_group
from gindexlab.index_engine import (calibrate_sign, decomposition_check,
                                    index_of_matrix, localized_index,
                                    numerical_index, parametrix, chi_vanishing_check,
                                    tr_g, winding_index_oracle)
from gindexlab.problems import GOperatorProblem
from gindexlab.quantize import LabeledOperator
from gindexlab.samples import (curved_z2_problem, shift_neumann_problem,
                               winding_problem, z2_sample)
from gindexlab.symbols import CrossedSymbol, PrincipalSymbol
from gindexlab.transforms import RealizationFamily

WINDOWS = (48, 64, 96)


def unit_problem():
    fam = RealizationFamily(build_group("trivial"), "trivial")
    return GOperatorProblem(fam, {(): ({0: 1.0}, {0: 1.0})}, unit_fill=True)


class TestNumericalIndex:
    def test_identity(self):
        rep = numerical_index(unit_problem(), WINDOWS)
        assert rep.index == 0 and rep.kernel_dim == 0 and rep.cokernel_dim == 0

    @pytest.mark.parametrize("build", [
        lambda: RealizationFamily(build_group("cyclic", m=4), "rotation"),
        lambda: RealizationFamily(build_group("cyclic", m=2), "reflection"),
        lambda: RealizationFamily(build_group("integer_shift", theta=0.4), "half_wave"),
        lambda: RealizationFamily(build_group("cyclic", m=2), "curved_rotation", eps=0.3),
    ])
    def test_unitaries_have_index_zero(self, build):
        fam = build()
        for cutoff in (32, 64):
            R = fam.at(FrequencyWindow(cutoff))
            data = index_of_matrix(R.phi(1).matrix(), R.window)
            assert data.index == 0
            assert data.kernel_dim == 0 and data.cokernel_dim == 0

    @pytest.mark.parametrize("w", range(-3, 4))
    def test_winding_family(self, w):
        rep = numerical_index(winding_problem(w), WINDOWS)
        s = calibrate_sign()
        assert rep.index == s * w
        assert rep.sv_gap >= 1e3
        grid = grid_for_window(FrequencyWindow(96))
        assert winding_index_oracle(winding_problem(w).symbol(grid), s) == rep.index

    def test_logarithmic_law(self):
        # index(A B) = index(A) + index(B) on products of winding operators
        pa, pb = winding_problem(2), winding_problem(-1)
        A = pa.operator(96)
        B = pb.operator(96)
        prod = A @ B
        data = index_of_matrix(prod.realize(), prod.window)
        assert data.index == 2 + (-1)

    def test_compact_perturbation_invariance(self):
        p = winding_problem(1)
        A = p.operator(96)
        dense = A.realize()
        # small perturbation supported on low modes is a compact surrogate
        rng = np.random.default_rng(0)
        pert = np.zeros_like(dense)
        low = np.abs(A.window.modes) <= 96 // 4
        block = 0.05 * (rng.normal(size=(low.sum(), low.sum()))
                        + 1j * rng.normal(size=(low.sum(), low.sum())))
        pert[np.ix_(low, low)] = block
        data = index_of_matrix(dense + pert, A.window)
        assert data.index == 1


class TestOracle:
    def test_equal_windings_cancel(self):
        fam = RealizationFamily(build_group("trivial"), "trivial")
        grid = PeriodicGrid(256)
        sym = CrossedSymbol.delta(fam, (), PrincipalSymbol.from_coeffs(
            grid, {1: 1.0}, {1: 1.0}))
        assert winding_index_oracle(sym, calibrate_sign()) == 0


class TestParametrix:
    def test_identity(self):
        p = unit_problem()
        A = p.operator(48)
        r = p.principal_inverse(grid_for_window(A.window))
        data = parametrix(A, r, N=4, k_min=p.k_min, unit_fill=True)
        assert data.left_remainder.norm_fro() < 1e-10
        assert data.right_remainder.norm_fro() < 1e-10

    def test_bare_transform(self):
        # Phi_{g^{-1}} is a two-sided inverse of Phi_g for the exact unitaries
        fam = RealizationFamily(build_group("cyclic", m=4), "rotation")
        R = fam.at(FrequencyWindow(48))
        A = LabeledOperator.from_transform(R, 1)
        E = LabeledOperator.from_transform(R, 3)
        unit = LabeledOperator.unit(R)
        assert (unit - E @ A).norm_fro() < 1e-12
        assert (unit - A @ E).norm_fro() < 1e-12
        # the Neumann parametrix from r = delta_{g^{-1}} (x) 1 reproduces
        # Phi_{g^{-1}} away from the zero-section cut; the remainders reduce
        # to the exact cut projector
        grid = grid_for_window(R.window)
        r = CrossedSymbol.delta(fam, 3, PrincipalSymbol.constant(grid, 1.0))
        data = parametrix(A, r, N=3, k_min=1)
        cut = np.abs(R.window.modes) < 1
        off = ~cut
        assert np.max(np.abs((data.E.realize() - R.phi(3).matrix())[:, off])) < 1e-12
        R1 = data.left_remainder.realize()
        assert np.max(np.abs(R1[:, off])) < 1e-12
        assert abs(R1[R.window.index_of(0), R.window.index_of(0)] - 1.0) < 1e-12

    def test_exact_z2_remainder_is_cut_block(self):
        # constant symbols + exact unitaries: remainder supported on the cut modes
        p = z2_sample()
        A = p.operator(48)
        r = p.principal_inverse(grid_for_window(A.window))
        data = parametrix(A, r, N=4, k_min=p.k_min)
        R1 = data.left_remainder.realize()
        outside = np.abs(A.window.modes) >= p.k_min + 4
        assert np.max(np.abs(R1[:, outside])) < 1e-10

    def test_curved_remainder_decays_with_order(self):
        # curved realization: remainder band norms decay as N grows
        p = curved_z2_problem(eps=0.3)
        A = p.operator(96)
        grid = grid_for_window(A.window)
        r = p.principal_inverse(grid)
        band = (np.abs(A.window.modes) >= 96 // 4) & (np.abs(A.window.modes) <= 96 // 2)
        norms = []
        for N in (2, 3, 4):
            data = parametrix(A, r, N=N, k_min=p.k_min)
            R1 = data.left_remainder.realize()
            norms.append(np.linalg.norm(R1[np.ix_(band, band)], 2))
        assert norms[0] > norms[1] > norms[2]


class TestLocalized:
    def test_identity_all_zero(self):
        p = unit_problem()
        v = localized_index(p, ((),), WINDOWS)
        assert abs(v.value) < 1e-12

    def test_trivial_group_matches_svd(self):
        for w in (-2, 1, 3):
            p = winding_problem(w)
            v = localized_index(p, ((),), WINDOWS)
            rep = numerical_index(p, WINDOWS)
            assert abs(v.value - rep.index) < 1e-2
            assert int(np.rint(v.value.real)) == rep.index

    def test_decomposition_z2(self):
        p = z2_sample()
        rep = decomposition_check(p, WINDOWS)
        assert rep.residual < 1e-2
        assert int(np.rint(rep.total.real)) == rep.fredholm_index

    def test_parametrix_order_independence(self):
        p = z2_sample()
        v3 = localized_index(p, (0,), WINDOWS, N=3)
        v4 = localized_index(p, (0,), WINDOWS, N=4)
        assert abs(v3.value - v4.value) < 1e-3

    def test_imaginary_residue_small(self):
        p = z2_sample()
        rep = decomposition_check(p, WINDOWS)
        for v in rep.per_class.values():
            assert abs(v.imag) < 1e-6


class TestChiVanishing:
    def test_shift_classes_vanish(self):
        p = shift_neumann_problem()
        for g0 in (1, 2):
            rep = chi_vanishing_check(p, g0, (48, 64, 96))
            assert rep.ok, f"ind_<{g0}> = {rep.value}"

    def test_requires_homomorphism(self):
        p = z2_sample()
        with pytest.raises(NoHomomorphism):
            chi_vanishing_check(p, 1, WINDOWS)

    def test_unit_operator_trivially_zero(self):
        fam = RealizationFamily(build_group("integer_shift", theta=1.0), "rotation")
        p = GOperatorProblem(fam, {0: ({0: 1.0}, {0: 1.0})}, unit_fill=True)
        rep = chi_vanishing_check(p, 2, (48, 64))
        assert abs(rep.value) == 0.0


class TestGuards:
    def test_no_spectral_gap(self):
        from gindexlab.errors import NoSpectralGap
        fam = RealizationFamily(build_group("trivial"), "trivial")
        # minus sheet sweeps continuously through the zero threshold
        p = GOperatorProblem(fam, {(): ({0: 1.0},
                                        {0: 1e-6, 1: -0.5e-6, -1: -0.5e-6})})
        with pytest.raises(NoSpectralGap):
            numerical_index(p, (48, 64, 96))

    def test_small_window_rejected(self):
        from gindexlab.errors import WindowTooSmall
        with pytest.raises(WindowTooSmall):
            numerical_index(winding_problem(1), (4, 8, 16))
