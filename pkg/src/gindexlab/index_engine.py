"""Fredholm index, parametrix construction, and conjugacy-class-localized
analytic indices.

Two finite-window facts shape all the numerics here:

* a square window truncation of a Fredholm operator always has equally many
  near-zero left and right singular vectors (boundary artifacts absorb the
  index), so kernel and cokernel dimensions are counted as *interior* null
  mass: the total weight of null vectors on the inner half-window.  Edge
  artifacts carry their mass at |k| ~ N_F and drop out.

* the trace of a commutator of window matrices vanishes identically, so the
  localized trace functional must also be restricted to the inner window;
  parametrix remainders decay away from the zero-section cut, which makes the
  interior trace converge to the infinite-dimensional one as windows grow.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circle import FrequencyWindow, grid_for_window, winding_number
from .errors import (NoHomomorphism, NonStabilized, NoSpectralGap,
                     UnsupportedGroup)
from .groups import Element
from .quantize import FullSymbol, LabeledOperator, assemble
from .symbols import CrossedSymbol
from .problems import GOperatorProblem

GAP_REQUIREMENT = 1e3
DEFAULT_ZERO_TOL = 1e-8
DEFAULT_WINDOWS = (64, 128, 256)
DRIFT_TOL = 1e-3


# ---------------------------------------------------------------------------
# numerical Fredholm index via interior-weighted SVD null counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WindowIndexData:
    cutoff: int
    index: int
    kernel_dim: int
    cokernel_dim: int
    sv_gap: float
    rounding_residual: float


@dataclass(frozen=True)
class IndexReport:
    index: int
    kernel_dim: int
    cokernel_dim: int
    sv_gap: float
    stabilization: list[WindowIndexData]
    zero_tol: float
    stabilized: bool

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "kernel_dim": self.kernel_dim,
            "cokernel_dim": self.cokernel_dim,
            "sv_gap": self.sv_gap,
            "zero_tol": self.zero_tol,
            "stabilized": self.stabilized,
            "stabilization": [vars(w) | {} for w in self.stabilization],
        }


def index_of_matrix(mat: np.ndarray, window: FrequencyWindow,
                    zero_tol: float = DEFAULT_ZERO_TOL,
                    inner_fraction: float = 0.5) -> WindowIndexData:
    """Interior kernel/cokernel counts of one window matrix.

    Null singular vectors supported near the window edge are truncation
    artifacts, not spectral data: they are excluded from the kernel/cokernel
    counts and from the gap (the gap compares the smallest above-threshold
    singular value against the largest *interior* null one).
    """
    U, s, Vh = np.linalg.svd(mat)
    smax = s[0] if s[0] > 0 else 1.0
    zero = s < zero_tol * smax
    inner = window.inner_mask(inner_fraction)
    floor = smax * 1e-18
    if not np.any(zero):
        gap = min(s[-1] / (zero_tol * smax), 1e18)
        return WindowIndexData(window.cutoff, 0, 0, 0, float(gap), 0.0)
    v_mass = np.sum(np.abs(Vh[zero][:, inner]) ** 2, axis=1)
    u_mass = np.sum(np.abs(U[inner][:, zero]) ** 2, axis=0)
    interior = np.maximum(v_mass, u_mass) >= 0.25
    zero_sv = s[zero]
    largest_interior_zero = float(np.max(zero_sv[interior])) if np.any(interior) else floor
    nonzero = s[~zero]
    smallest_nonzero = float(np.min(nonzero)) if nonzero.size else smax
    gap = min(smallest_nonzero / max(largest_interior_zero, floor), 1e18)
    ker_mass = float(np.sum(v_mass))
    coker_mass = float(np.sum(u_mass))
    ker = int(np.rint(ker_mass))
    coker = int(np.rint(coker_mass))
    resid = max(abs(ker_mass - ker), abs(coker_mass - coker))
    return WindowIndexData(window.cutoff, ker - coker, ker, coker, float(gap), resid)


def numerical_index(problem: GOperatorProblem, windows=DEFAULT_WINDOWS,
                    zero_tol: float = DEFAULT_ZERO_TOL,
                    inner_fraction: float = 0.5) -> IndexReport:
    """Stabilized Fredholm index over an increasing window schedule."""
    rows = []
    for cutoff in windows:
        FrequencyWindow(cutoff).require(8)
        A = problem.operator(cutoff)
        rows.append(index_of_matrix(A.realize(), A.window, zero_tol, inner_fraction))
    if all(r.sv_gap < GAP_REQUIREMENT for r in rows):
        raise NoSpectralGap(
            f"sv_gap below {GAP_REQUIREMENT:g} at every window: "
            + ", ".join(f"{r.cutoff}:{r.sv_gap:.2e}" for r in rows))
    indices = {r.index for r in rows}
    stabilized = len(indices) == 1
    if not stabilized:
        raise NonStabilized(f"index varies across windows: "
                            + ", ".join(f"{r.cutoff}:{r.index}" for r in rows))
    last = rows[-1]
    return IndexReport(last.index, last.kernel_dim, last.cokernel_dim,
                       last.sv_gap, rows, zero_tol, stabilized)


def winding_index_oracle(symbol: CrossedSymbol, sign: int) -> int:
    """Classical-index oracle for trivial-group symbols: s (w(minus) - w(plus))."""
    if symbol.group.kind != "trivial":
        raise UnsupportedGroup("winding oracle only applies to the trivial group")
    coeff = symbol.coeff(symbol.group.identity)
    return sign * (winding_number(coeff.minus) - winding_number(coeff.plus))


@lru_cache(maxsize=1)
def calibrate_sign(k_min: int = 4, windows: tuple = (32, 48, 64)) -> int:
    """Pin the index sign convention from the w = 1 winding calibration run."""
    from .samples import winding_problem
    report = numerical_index(winding_problem(1, k_min=k_min), windows)
    if report.index not in (1, -1):
        raise NonStabilized(f"calibration run returned index {report.index}")
    return report.index


# ---------------------------------------------------------------------------
# parametrix and localized traces
# ---------------------------------------------------------------------------

@dataclass
class ParametrixData:
    E: LabeledOperator                 # almost inverse
    left_remainder: LabeledOperator    # 1 - E A   (= S1^N exactly)
    right_remainder: LabeledOperator   # 1 - A E   (= S2^N exactly)
    order: int


def parametrix(A: LabeledOperator, r: CrossedSymbol, N: int = 4,
               k_min: int = 4, unit_fill: bool = False,
               prune_tol: float = 1e-13) -> ParametrixData:
    """Neumann-series almost inverse E = (1 + S1 + ... + S1^{N-1}) E0.

    E0 quantizes the symbol inverse r with the same zero-section convention as
    A (``unit_fill``); the remainders are exact matrix identities 1 - EA =
    S1^N and 1 - AE = S2^N (telescoping), no resummation error enters.
    """
    if N < 2:
        raise ValueError("parametrix order N must be >= 2")
    real = A.realization
    e = real.group.identity
    spec = [(g, FullSymbol.from_principal(r.coeff(g), order=0, k_min=k_min,
                                          unit_fill=unit_fill and g == e))
            for g in r.support]
    E0 = assemble(real, spec)
    unit = LabeledOperator.unit(real)
    S1 = (unit - E0.multiply(A)).prune(prune_tol)
    S2 = (unit - A.multiply(E0)).prune(prune_tol)
    # Horner form of (1 + S1 + ... + S1^{N-1})
    acc = unit
    for _ in range(N - 1):
        acc = (unit + S1.multiply(acc)).prune(prune_tol)
    E = acc.multiply(E0).prune(prune_tol)
    R1 = S1.power(N, prune_tol)
    R2 = S2.power(N, prune_tol)
    return ParametrixData(E, R1, R2, N)


def tr_g(X: LabeledOperator, cls: tuple[Element, ...],
         inner_fraction: float = 0.5) -> complex:
    """Localized trace sum_{l in <g>} tr(X_l Phi_l) over the inner window."""
    window = X.window
    mask = window.inner_mask(inner_fraction)
    total = 0.0 + 0.0j
    for l in cls:
        if l not in X.parts:
            continue
        Xl = X.parts[l]
        phi = X.realization.phi(l)
        if phi.mode_map is not None:
            mm = phi.mode_map
            perm = mm._perm()
            diag = Xl[np.arange(window.dim), perm] * mm.phases
        else:
            diag = np.einsum("kl,lk->k", Xl, phi.matrix())
        total += complex(np.sum(diag[mask]))
    return total


@dataclass
class LocalizedValue:
    cls: tuple
    value: complex
    drift: float
    per_window: list[tuple[int, complex]]


def _remainders(problem: GOperatorProblem, cutoff: int, N: int,
                prune_tol: float = 1e-13) -> ParametrixData:
    key = (cutoff, N, prune_tol)
    if key in problem._parametrix_cache:
        return problem._parametrix_cache[key]
    A = problem.operator(cutoff)
    grid = grid_for_window(A.window)
    r = problem.principal_inverse(grid)
    data = parametrix(A, r, N=N, k_min=problem.k_min,
                      unit_fill=problem.unit_fill, prune_tol=prune_tol)
    problem._parametrix_cache[key] = data
    return data


def _classes_for(problem: GOperatorProblem, data: ParametrixData) -> list[tuple[Element, ...]]:
    grp = problem.group
    support = sorted(set(data.left_remainder.support) | set(data.right_remainder.support),
                     key=repr)
    if grp.is_finite:
        return [c for c in grp.conjugacy_classes()
                if any(l in support for l in c)]
    return grp.conjugacy_classes(support=support)


def localized_index(problem: GOperatorProblem, cls: tuple[Element, ...],
                    windows=DEFAULT_WINDOWS, N: int = 4,
                    inner_fraction: float = 0.5, drift_tol: float = DRIFT_TOL,
                    strict: bool = True) -> LocalizedValue:
    """ind_<g> = Tr_g(1 - EA) - Tr_g(1 - AE), stabilized over the windows."""
    series = []
    for cutoff in windows:
        data = _remainders(problem, cutoff, N)
        v = tr_g(data.left_remainder, cls, inner_fraction) \
            - tr_g(data.right_remainder, cls, inner_fraction)
        series.append((cutoff, v))
    drift = abs(series[-1][1] - series[-2][1]) if len(series) >= 2 else 0.0
    if strict and drift > drift_tol:
        raise NonStabilized(f"localized index drift {drift:.2e} over windows {windows}")
    return LocalizedValue(cls, series[-1][1], drift, series)


@dataclass
class LocalizedIndexReport:
    per_class: dict[str, complex]
    total: complex
    fredholm_index: int
    residual: float
    drifts: dict[str, float]

    def as_dict(self) -> dict:
        return {
            "per_class": {k: [v.real, v.imag] for k, v in self.per_class.items()},
            "total": [self.total.real, self.total.imag],
            "fredholm_index": self.fredholm_index,
            "residual": self.residual,
            "drifts": self.drifts,
        }


def class_label(problem: GOperatorProblem, cls: tuple[Element, ...]) -> str:
    return "<" + problem.group.label(cls[0]) + ">"


def decomposition_check(problem: GOperatorProblem, windows=DEFAULT_WINDOWS,
                        N: int = 4, inner_fraction: float = 0.5,
                        drift_tol: float = DRIFT_TOL,
                        index_windows=None) -> LocalizedIndexReport:
    """Compare sum of localized indices against the SVD Fredholm index."""
    per_window_values: dict[tuple, list[tuple[int, complex]]] = {}
    classes = None
    for cutoff in windows:
        data = _remainders(problem, cutoff, N)
        if classes is None:
            classes = _classes_for(problem, data)
        for cls in classes:
            v = tr_g(data.left_remainder, cls, inner_fraction) \
                - tr_g(data.right_remainder, cls, inner_fraction)
            per_window_values.setdefault(cls, []).append((cutoff, v))
    per_class, drifts = {}, {}
    for cls in classes:
        series = per_window_values[cls]
        label = class_label(problem, cls)
        per_class[label] = series[-1][1]
        drift = abs(series[-1][1] - series[-2][1]) if len(series) >= 2 else 0.0
        drifts[label] = drift
        if drift > drift_tol:
            raise NonStabilized(f"class {label} drift {drift:.2e}")
    total = sum(per_class.values())
    report = numerical_index(problem, index_windows or windows)
    residual = abs(total - report.index)
    return LocalizedIndexReport(per_class, total, report.index, residual, drifts)


@dataclass
class ChiVanishingReport:
    element: Element
    chi_value: int
    value: complex
    ok: bool


def chi_vanishing_check(problem: GOperatorProblem, g0: Element, windows=DEFAULT_WINDOWS,
                N: int = 4, tol: float = 1e-3) -> ChiVanishingReport:
    """Vanishing of ind_<g0> when an integer homomorphism has chi(g0) != 0."""
    grp = problem.group
    if not grp.has_nonzero_chi or grp.chi(g0) == 0:
        raise NoHomomorphism(f"no homomorphism with chi({grp.label(g0)}) != 0")
    cls = grp.conjugacy_class(g0)
    value = localized_index(problem, cls, windows, N=N).value
    return ChiVanishingReport(g0, grp.chi(g0), value, abs(value) < tol)
