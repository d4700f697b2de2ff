import itertools

import numpy as np
import pytest

from gindexlab.circle import FrequencyWindow, PeriodicGrid
from gindexlab.errors import InvalidParameter, NotADiffeo
from gindexlab.groups import build_group
from gindexlab.transforms import (CircleDiffeo, ModeMap, RealizationFamily,
                                  weighted_shift_matrix)

W16 = FrequencyWindow(16)


def family(kind, real, **kw):
    m = kw.pop("m", 1)
    theta = kw.pop("theta", 0.0)
    if kind == "integer_shift":
        return RealizationFamily(build_group(kind, theta=theta), real, **kw)
    return RealizationFamily(build_group(kind, m=m), real, **kw)


class TestCanonical:
    def test_rotation_base_map(self):
        fam = family("cyclic", "rotation", m=4)
        C = fam.canonical(1)
        x = np.linspace(0, 2 * np.pi, 5)
        # pushforward convention: the base map is the rotation itself
        assert np.allclose(C.base(1, x), x + np.pi / 2)
        assert not C.sheet_swap

    def test_reflection_swaps_sheets(self):
        fam = family("cyclic", "reflection", m=2)
        C = fam.canonical(1)
        x = np.array([0.3, 1.0])
        assert np.allclose(C.base(1, x), -x)
        assert C.sheet_swap

    def test_half_wave_translates_sheets_oppositely(self):
        fam = family("integer_shift", "half_wave", theta=0.3)
        C = fam.canonical(1)
        x = np.array([1.0])
        assert np.allclose(C.base(1, x), x - 0.3)
        assert np.allclose(C.base(-1, x), x + 0.3)
        assert not C.sheet_swap

    @pytest.mark.parametrize("kind,real,m", [
        ("cyclic", "rotation", 4), ("dihedral", "dihedral", 3),
        ("cyclic", "curved_rotation", 3)])
    def test_group_law(self, kind, real, m):
        kw = {"eps": 0.3} if real == "curved_rotation" else {}
        fam = family(kind, real, m=m, **kw)
        pts = np.linspace(0.1, 2 * np.pi, 7)
        for a, b in itertools.product(fam.group.elements(), repeat=2):
            Ca, Cb = fam.canonical(a), fam.canonical(b)
            Cab = fam.canonical(fam.group.mul(a, b))
            for s in (1, -1):
                y = Cb.base(s, pts)
                s2 = Cb.sheet_after(s)
                z = Ca.base(s2, y)
                assert Ca.sheet_after(s2) == Cab.sheet_after(s)
                # compare as circle points
                assert np.max(np.abs(np.exp(1j * z) - np.exp(1j * Cab.base(s, pts)))) < 1e-10

    def test_inverse(self):
        fam = family("cyclic", "curved_rotation", m=2, eps=0.3)
        C = fam.canonical(1)
        Ci = C.inverse()
        x = np.linspace(0, 2 * np.pi, 11)
        assert np.max(np.abs(Ci.base(1, C.base(1, x)) - x)) < 1e-10


class TestDiffeo:
    def test_affine_round_trip(self):
        d = CircleDiffeo.affine(-1, 0.4)
        d.check(PeriodicGrid(64))

    def test_conjugated_rotation_is_diffeo(self):
        d = CircleDiffeo.conjugated_rotation(np.pi, 0.3, order=2)
        d.check(PeriodicGrid(256))
        x = PeriodicGrid(256).nodes
        # declared finite order: two-fold composition is the identity mod 2 pi
        twice = d.forward(d.forward(x))
        assert np.max(np.abs(np.exp(1j * twice) - np.exp(1j * x))) < 1e-8

    def test_eps_guard(self):
        with pytest.raises(NotADiffeo):
            CircleDiffeo.conjugated_rotation(np.pi, 1.1)


class TestQuantized:
    def test_rotation_pi_diagonal(self):
        fam = family("cyclic", "rotation", m=2)
        mat = fam.at(FrequencyWindow(8)).phi(1).matrix()
        expect = np.diag((-1.0 + 0j) ** np.abs(np.arange(-8, 9)))
        assert np.max(np.abs(mat - expect)) < 1e-12

    def test_reflection_squared_identity(self):
        fam = family("cyclic", "reflection", m=2)
        R = fam.at(W16)
        m = R.phi(1).matrix()
        assert np.max(np.abs(m @ m - np.eye(W16.dim))) == 0.0

    def test_identity_exact(self):
        fam = family("dihedral", "dihedral", m=3)
        m = fam.at(W16).phi(fam.group.identity).matrix()
        assert np.array_equal(m, np.eye(W16.dim, dtype=complex))

    @pytest.mark.parametrize("kind,real,m,theta", [
        ("cyclic", "rotation", 5, 0.0),
        ("dihedral", "dihedral", 3, 0.0),
        ("cyclic", "reflection", 2, 0.0),
        ("integer_shift", "half_wave", 1, 0.7)])
    def test_quantized_group_law(self, kind, real, m, theta):
        fam = family(kind, real, m=m, theta=theta)
        R = fam.at(W16)
        els = fam.group.elements() if fam.group.is_finite else [-2, -1, 0, 1, 2]
        for a, b in itertools.product(els, repeat=2):
            ab = fam.group.mul(a, b)
            if not fam.group.is_finite and abs(ab) > 2:
                continue
            lhs = R.phi(a).mode_map.compose(R.phi(b).mode_map).matrix()
            assert np.max(np.abs(lhs - R.phi(ab).matrix())) < 1e-9

    def test_unitarity_exact_families(self):
        for fam in (family("cyclic", "rotation", m=3),
                    family("integer_shift", "half_wave", theta=0.3)):
            R = fam.at(W16)
            for g in ([1, 2] if not fam.group.is_finite else fam.group.elements()):
                m = R.phi(g).matrix()
                assert np.max(np.abs(m.conj().T @ m - np.eye(W16.dim))) < 1e-10

    def test_mode_map_conjugate_matches_dense(self):
        rng = np.random.default_rng(4)
        mm = ModeMap.affine(W16, -1, 0.77)
        X = rng.normal(size=(W16.dim, W16.dim)) + 1j * rng.normal(size=(W16.dim, W16.dim))
        dense = mm.matrix() @ X @ mm.adjoint().matrix()
        assert np.max(np.abs(mm.conjugate(X) - dense)) < 1e-12


class TestCurvedShift:
    def test_truncation_defect_decays(self):
        fam = family("cyclic", "curved_rotation", m=2, eps=0.3)
        defects = []
        for nf in (128, 256, 512):
            defects.append(fam.at(FrequencyWindow(nf)).phi(1).truncation_defect)
        assert defects[0] > defects[1] > defects[2]
        assert defects[2] < 1e-4

    def test_involution_inner_compression(self):
        # measured two-sided inner-half defect at N_F = 256 is ~1.1e-6,
        # decaying superalgebraically with the window
        fam = family("cyclic", "curved_rotation", m=2, eps=0.3)
        prev = None
        for nf in (128, 256):
            R = fam.at(FrequencyWindow(nf))
            M = R.phi(1).matrix()
            mask = np.abs(np.arange(-nf, nf + 1)) <= nf // 2
            D = (M @ M - np.eye(2 * nf + 1))[np.ix_(mask, mask)]
            val = np.linalg.norm(D, 2)
            if prev is not None:
                assert val < prev / 10
            prev = val
        assert val < 1.5e-6

    def test_rejects_incompatible_realization(self):
        with pytest.raises(InvalidParameter):
            family("dihedral", "rotation", m=3)
        with pytest.raises(NotADiffeo):
            family("cyclic", "curved_rotation", m=2, eps=1.2)
