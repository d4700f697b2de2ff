import numpy as np
import pytest

from gindexlab.circle import FrequencyWindow, PeriodicFunction, PeriodicGrid, grid_for_window
from gindexlab.errors import GroupMismatch, WindowTooSmallForH
from gindexlab.groups import build_group
from gindexlab.quantize import (FullSymbol, LabeledOperator, SemiclassicalSymbol,
                                assemble, labeled_multiply, op_classical, op_h,
                                op_h_term)
from gindexlab.semiclass import SampledTerm, XiLattice
from gindexlab.transforms import RealizationFamily

W = FrequencyWindow(16)
GRID = grid_for_window(W)


def fam(kind, real, m=1, theta=1.0):
    group = build_group(kind, m=m) if kind != "integer_shift" \
        else build_group(kind, theta=theta)
    return RealizationFamily(group, real)


class TestOpClassical:
    def test_unit(self):
        a = FullSymbol.constant(GRID, 1.0, k_min=1, unit_fill=True)
        assert np.max(np.abs(op_classical(a, W) - np.eye(W.dim))) == 0.0

    def test_mode_shift(self):
        f = PeriodicFunction.from_coeff_dict(GRID, {1: 1.0})
        a = FullSymbol(f, f, 0, 1, False)
        mat = op_classical(a, W)
        col = mat[:, W.index_of(5)]
        assert abs(col[W.index_of(6)] - 1.0) < 1e-13
        assert np.sum(np.abs(col)) == pytest.approx(1.0, abs=1e-12)

    def test_positive_mode_projection(self):
        a = FullSymbol(PeriodicFunction.constant(GRID, 1.0),
                       PeriodicFunction.constant(GRID, 0.0), 0, 1, False)
        mat = op_classical(a, W)
        diag = np.diag(mat).real
        assert np.array_equal(diag, (W.modes >= 1).astype(float))

    def test_linear_in_symbol(self):
        rng = np.random.default_rng(0)
        c1 = {k: rng.normal() for k in range(-2, 3)}
        c2 = {k: rng.normal() for k in range(-2, 3)}
        s1 = FullSymbol(PeriodicFunction.from_coeff_dict(GRID, c1),
                        PeriodicFunction.from_coeff_dict(GRID, c2), 0, 2, False)
        both = FullSymbol(s1.plus * 2.0, s1.minus * 2.0, 0, 2, False)
        assert np.max(np.abs(op_classical(both, W) - 2 * op_classical(s1, W))) < 1e-12

    def test_multiplication_operators_compose(self):
        # x-only symbols: op(f g) = op(f) op(g) away from the window boundary
        f = PeriodicFunction.from_coeff_dict(GRID, {1: 0.7, 0: 0.2})
        g = PeriodicFunction.from_coeff_dict(GRID, {-1: 0.5, 2: 0.1})
        af = FullSymbol(f, f, 0, 1, True)
        ag = FullSymbol(g, g, 0, 1, True)
        afg = FullSymbol(f * g, f * g, 0, 1, True)
        prod = op_classical(af, W) @ op_classical(ag, W)
        target = op_classical(afg, W)
        inner = np.abs(W.modes) <= W.cutoff - 4
        # fill region differs (product of fills vs fill of product); compare off-cut
        offcut = np.abs(W.modes) >= 4
        sel = inner & offcut
        assert np.max(np.abs((prod - target)[np.ix_(sel, sel)])) < 1e-10


class TestEgorovTransport:
    def make_symbol(self):
        rng = np.random.default_rng(1)
        pl = {k: rng.normal() + 1j * rng.normal() for k in range(-2, 3)}
        mi = {k: rng.normal() + 1j * rng.normal() for k in range(-2, 3)}
        return FullSymbol(PeriodicFunction.from_coeff_dict(GRID, pl),
                          PeriodicFunction.from_coeff_dict(GRID, mi), 0, 2, False)

    @pytest.mark.parametrize("kind,real,m,theta", [
        ("dihedral", "dihedral", 4, 0.0),
        ("cyclic", "rotation", 3, 0.0),
        ("integer_shift", "half_wave", 1, 0.3)])
    def test_exact_transport(self, kind, real, m, theta):
        f = fam(kind, real, m=m, theta=theta)
        R = f.at(W)
        sym = self.make_symbol()
        A = op_classical(sym, W)
        mask = np.abs(W.modes) <= W.cutoff // 2
        els = f.group.elements() if f.group.is_finite else [1, -1, 2]
        for g in els:
            conj = R.phi(g).mode_map.conjugate(A)
            target = op_classical(sym.transport(f.canonical(f.group.inv(g))), W)
            assert np.max(np.abs((conj - target)[np.ix_(mask, mask)])) < 1e-10


class TestLabeled:
    def setup_method(self):
        self.fam = fam("cyclic", "reflection", m=2)
        self.R = self.fam.at(W)

    def rnd(self, seed):
        rng = np.random.default_rng(seed)
        return LabeledOperator(self.R, {
            g: rng.normal(size=(W.dim, W.dim)) + 1j * rng.normal(size=(W.dim, W.dim))
            for g in self.fam.group.elements()})

    def test_unit_law(self):
        B = self.rnd(0)
        unit = LabeledOperator.unit(self.R)
        assert (unit @ B - B).norm_fro() < 1e-12
        assert (B @ unit - B).norm_fro() < 1e-12

    def test_delta_products(self):
        A = LabeledOperator.from_transform(self.R, 1)
        prod = A @ A
        assert prod.support == [0]
        assert np.max(np.abs(prod.parts[0] - np.eye(W.dim))) < 1e-12

    def test_realize_homomorphism(self):
        A, B = self.rnd(1), self.rnd(2)
        lhs = (A @ B).realize()
        rhs = A.realize() @ B.realize()
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * np.linalg.norm(rhs)

    def test_associative(self):
        A, B, C = self.rnd(3), self.rnd(4), self.rnd(5)
        lhs = ((A @ B) @ C).realize()
        rhs = (A @ (B @ C)).realize()
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * np.linalg.norm(rhs)

    def test_assemble_2I_plus_R(self):
        w2 = FrequencyWindow(2)
        grid = grid_for_window(w2)
        R2 = self.fam.at(w2)
        spec = [(0, FullSymbol.constant(grid, 2.0, k_min=1, unit_fill=False)),
                (1, FullSymbol.constant(grid, 1.0, k_min=1, unit_fill=False))]
        dense = assemble(R2, spec).realize()
        # explicit 5x5: 2 I + R off the zero-mode cut (mode 0 is cut on both parts)
        expect = np.zeros((5, 5), dtype=complex)
        for idx, k in enumerate(range(-2, 3)):
            if abs(k) >= 1:
                expect[idx, idx] += 2.0
                expect[4 - idx, idx] += 1.0
        assert np.max(np.abs(dense - expect)) < 1e-12

    def test_group_mismatch(self):
        other = fam("cyclic", "rotation", m=2).at(W)
        B = LabeledOperator.unit(other)
        with pytest.raises(GroupMismatch):
            _ = self.rnd(0) @ B

    def test_prune(self):
        A = self.rnd(0)
        A.parts[1] *= 1e-16
        assert LabeledOperator(self.R, A.parts).prune(1e-13).support == [0]


class TestOpH:
    def setup_method(self):
        self.grid = PeriodicGrid(128)
        self.lat = XiLattice(3.0, 301)

    def test_unit_like_multiplier(self):
        term = SampledTerm.from_callable(self.grid, self.lat,
                                         lambda X, XI: np.ones_like(X), "clamp")
        sym = SemiclassicalSymbol([(0, term)], eps=0.0)
        for h in (0.1, 0.05):
            mat = op_h(sym, h, W)
            assert np.max(np.abs(mat - np.eye(W.dim))) < 1e-12

    def test_bump_multiplier_diagonal(self):
        chi = lambda XI: np.exp(-((XI - 1.5) / 0.3) ** 2) * (XI > 0.5) * (XI < 2.5)
        term = SampledTerm.from_callable(self.grid, self.lat,
                                         lambda X, XI: chi(XI) * np.ones_like(X))
        sym = SemiclassicalSymbol([(0, term)], eps=0.5)
        h = 0.1
        w = FrequencyWindow(30)
        mat = op_h(sym, h, w)
        off = mat - np.diag(np.diag(mat))
        assert np.max(np.abs(off)) < 1e-12
        assert np.max(np.abs(np.diag(mat) - chi(h * w.modes))) < 1e-8

    def test_norm_equals_sup(self):
        # a = e^{ix} chi(xi): ||op_h(a)|| = max|chi| within 1e-6
        chi = lambda XI: np.exp(-((XI - 1.5) / 0.4) ** 2) * (np.abs(XI) < 2.9)
        term = SampledTerm.from_callable(self.grid, self.lat,
                                         lambda X, XI: np.exp(1j * X) * chi(XI))
        sym = SemiclassicalSymbol([(0, term)], eps=0.5)
        for h in (0.1, 0.05):
            w = FrequencyWindow(int(np.ceil(3.2 / h)))
            norm = np.linalg.norm(op_h(sym, h, w), 2)
            assert abs(norm - 1.0) < 1e-6

    def test_window_too_small(self):
        term = SampledTerm.from_callable(self.grid, self.lat,
                                         lambda X, XI: np.exp(-XI ** 2) * np.ones_like(X))
        sym = SemiclassicalSymbol([(0, term)], eps=0.0)
        with pytest.raises(WindowTooSmallForH):
            op_h(sym, 0.01, FrequencyWindow(16))


class TestTraceConvergence:
    def test_negative_order_traces_converge(self):
        # symbols of order <= -2 have window-stable traces (summable tails)
        grid = grid_for_window(FrequencyWindow(96))
        sym = FullSymbol(PeriodicFunction.constant(grid, 1.0),
                         PeriodicFunction.constant(grid, 1.0), order=-2, k_min=2)
        traces = [complex(np.trace(op_classical(sym, FrequencyWindow(nf))))
                  for nf in (24, 48, 96)]
        assert abs(traces[2] - traces[1]) < abs(traces[1] - traces[0])
        band = 2 * sum(1.0 / k ** 2 for k in range(49, 97))
        assert abs(traces[2] - traces[1]) <= band + 1e-12
