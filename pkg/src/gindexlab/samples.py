"""Canned G-operator problems used by the test suite, the demos and the CLI."""

from __future__ import annotations

import numpy as np

from .groups import build_group
from .problems import GOperatorProblem
from .transforms import RealizationFamily


def winding_problem(w: int, k_min: int = 4) -> GOperatorProblem:
    """Trivial group, plus sheet 1, minus sheet e^{i w x}: the calibration family."""
    fam = RealizationFamily(build_group("trivial"), "trivial")
    coeffs = {(): ({0: 1.0}, {w: 1.0})}
    return GOperatorProblem(fam, coeffs, k_min=k_min, name=f"winding_w{w}")


def z2_sample(k_min: int = 4) -> GOperatorProblem:
    """Z/2 reflection sample: a_e = 2 on plus / 2 e^{ix} on minus, a_s = 1."""
    fam = RealizationFamily(build_group("cyclic", m=2), "reflection")
    coeffs = {
        0: ({0: 2.0}, {1: 2.0}),
        1: ({0: 1.0}, {0: 1.0}),
    }
    return GOperatorProblem(fam, coeffs, k_min=k_min, name="z2_reflection")


def _random_trig(rng: np.random.Generator, deg: int, scale: float) -> dict[int, complex]:
    return {k: scale * (rng.normal() + 1j * rng.normal()) / (1 + abs(k))
            for k in range(-deg, deg + 1)}


def dihedral_sample(seed: int, k_min: int = 4, twist: int = 1) -> GOperatorProblem:
    """Randomized elliptic dihedral(3) operator with a minus-sheet winding twist.

    A dominant identity coefficient guarantees ellipticity; small random trig
    polynomials sit on the other five elements.  Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    fam = RealizationFamily(build_group("dihedral", m=3), "dihedral")
    grp = fam.group
    coeffs = {}
    for g in grp.elements():
        if g == grp.identity:
            coeffs[g] = ({0: 3.0}, {twist: 3.0})
        else:
            coeffs[g] = (_random_trig(rng, 2, 0.35), _random_trig(rng, 2, 0.35))
    return GOperatorProblem(fam, coeffs, k_min=k_min, name=f"dihedral3_seed{seed}")


def shift_neumann_problem(theta: float = 1.0, c: float = 0.3,
                          k_min: int = 4) -> GOperatorProblem:
    """integer_shift sample A = 1 + c op(f) Phi_1 with ||c f||_inf < 1."""
    fam = RealizationFamily(build_group("integer_shift", theta=theta), "rotation")
    f = {0: 0.5 * c, 1: 0.25 * c, -2: 0.15 * c}
    coeffs = {
        0: ({0: 1.0}, {0: 1.0}),
        1: (f, dict(f)),
    }
    return GOperatorProblem(fam, coeffs, k_min=k_min, name="shift_neumann")


def half_wave_problem(t: float = 0.7, c: float = 0.3, k_min: int = 4) -> GOperatorProblem:
    """Half-wave flow sample: 1 + c op(f) e^{i t |D|} over integer_shift(t)."""
    fam = RealizationFamily(build_group("integer_shift", theta=t), "half_wave")
    f = {0: 0.5 * c, 1: 0.3 * c}
    coeffs = {
        0: ({0: 1.0}, {0: 1.0}),
        1: (f, dict(f)),
    }
    return GOperatorProblem(fam, coeffs, k_min=k_min, name="half_wave")


def curved_z2_problem(eps: float = 0.3, k_min: int = 4) -> GOperatorProblem:
    """cyclic(2) realized by a conjugated rotation: A = 2 + op(1) Phi_curved."""
    fam = RealizationFamily(build_group("cyclic", m=2), "curved_rotation", eps=eps)
    coeffs = {
        0: ({0: 2.0}, {0: 2.0}),
        1: ({0: 1.0}, {0: 1.0}),
    }
    return GOperatorProblem(fam, coeffs, k_min=k_min, name=f"curved_z2_eps{eps}")


# ---------------------------------------------------------------------------
# semiclassical diagnostic symbols
# ---------------------------------------------------------------------------

def _meshed(grid, lattice, fn):
    from .semiclass import SampledTerm
    return SampledTerm.from_callable(grid, lattice, fn, "zero")


def weyl_test_terms(grid, lattice):
    """Two rapidly decaying symbols for Weyl-trace comparisons."""
    t1 = _meshed(grid, lattice,
                 lambda X, XI: (2.0 + np.cos(X)) * XI ** 2 * np.exp(-2.0 * XI ** 2))
    t2 = _meshed(grid, lattice,
                 lambda X, XI: (1.0 + 0.5 * np.sin(2 * X)) * XI ** 4 * np.exp(-2.0 * XI ** 2))
    return [t1, t2]


def annulus_term(grid, lattice):
    """Analytic even annulus profile, zero-section content negligible."""
    return _meshed(grid, lattice,
                   lambda X, XI: (2.0 + np.cos(X)) * XI ** 2 * np.exp(-2.0 * XI ** 2))


def reflection_term(grid, lattice):
    """Even profile with mass at the zero section (reflection trace tests)."""
    return _meshed(grid, lattice,
                   lambda X, XI: (1.0 + np.cos(X)) * np.exp(-2.0 * XI ** 2))


def star_consistency_pairs(grid, lattice, family_trivial, family_z2):
    """Two symbol pairs with single-mode x-factors (drift-free norm law)."""
    from .semiclass import StarSeries
    a = _meshed(grid, lattice,
                lambda X, XI: np.exp(1j * X) * np.exp(-((XI - 1.2) / 0.32) ** 2))
    b = _meshed(grid, lattice,
                lambda X, XI: np.exp(1j * X) * XI * np.exp(-((XI - 1.4) / 0.35) ** 2))
    pair1 = (StarSeries(family_trivial, grid, lattice, 0.25, {((), 0): a}),
             StarSeries(family_trivial, grid, lattice, 0.25, {((), 0): b}))
    even1 = lambda XI: np.exp(-((np.abs(XI) - 1.2) / 0.32) ** 2)
    even2 = lambda XI: np.exp(-((np.abs(XI) - 1.4) / 0.35) ** 2)
    c = _meshed(grid, lattice, lambda X, XI: np.exp(1j * X) * even1(XI))
    d = _meshed(grid, lattice, lambda X, XI: np.exp(-1j * X) * XI * even2(XI) / 2)
    e = family_z2.group.identity
    pair2 = (StarSeries(family_z2, grid, lattice, 0.25, {(e, 0): c, (1, 0): d}),
             StarSeries(family_z2, grid, lattice, 0.25, {(1, 0): c, (e, 0): d}))
    return [pair1, pair2]


def egorov_curved_term(grid):
    """Gaussian annulus on a wide lattice covering the curved-stretched support."""
    from .semiclass import SampledTerm, XiLattice
    lattice = XiLattice(7.5, 1501)
    return SampledTerm.from_callable(
        grid, lattice,
        lambda X, XI: np.exp(1j * X) * np.exp(-((np.abs(XI) - 1.5) / 0.55) ** 2), "zero")


def egorov_isometry_term(grid):
    """Zero-section-cut annulus for exact-transport checks."""
    from .semiclass import SampledTerm, XiLattice, zero_section_cut
    lattice = XiLattice(4.0, 801)
    chi = zero_section_cut(lattice, 0.3)
    vals = np.exp(1j * grid.nodes)[:, None] * \
        (chi * np.exp(-((np.abs(lattice.points) - 1.2) / 0.25) ** 2))[None, :]
    return SampledTerm(grid, lattice, vals, "zero")
