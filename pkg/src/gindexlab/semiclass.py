"""Semiclassical star product, localized trace functionals, trace asymptotics,
and the algebraic index.

Symbols are sampled on (circle grid) x (uniform xi-lattice).  The x direction
is spectral (exact for trigonometric polynomials); the xi direction uses
4th-order centered differences and order-6 local Lagrange interpolation, with
an h-independent lattice so that star products stay h-uniform.  Quantized
transforms enter traces only through their exact mode action

    Phi e_k = p(k) e_{s k},   tr(op_h(a) Phi) = sum_k p(k) ahat((1-s)k, s h k),

so the trace functionals never need dense window matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import FrequencyWindow, PeriodicFunction, PeriodicGrid
from .errors import (GroupMismatch, IllConditionedFit, NonIsometricAction,
                     OrderOverflow, ResidualNotTraceClass, TraceDivergence)
from .groups import Element
from .symbols import CrossedSymbol, PrincipalSymbol, invert_principal
from .transforms import RealizationFamily

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# xi-lattice with interpolation and differentiation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class XiLattice:
    """Uniform symmetric lattice xi in [-radius, radius] with n points (n odd)."""

    radius: float
    n: int

    def __post_init__(self):
        if self.n < 16 or self.n % 2 == 0:
            raise ValueError("lattice needs an odd number of points, >= 17")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(-self.radius, self.radius, self.n)

    @property
    def delta(self) -> float:
        return 2.0 * self.radius / (self.n - 1)


def _lagrange_weights(u: np.ndarray) -> np.ndarray:
    """Order-6 Lagrange basis at offsets 0..5, evaluated at u; shape (6, ...)."""
    w = np.empty((6,) + u.shape)
    for j in range(6):
        num = np.ones_like(u)
        den = 1.0
        for i in range(6):
            if i == j:
                continue
            num = num * (u - i)
            den *= (j - i)
        w[j] = num / den
    return w


def lattice_interp(lattice: XiLattice, values: np.ndarray, queries: np.ndarray,
                   extend: str, paired: bool = False) -> np.ndarray:
    """Interpolate ``values`` sampled on the lattice at arbitrary xi.

    values has the lattice on its last axis.  ``paired=True`` pairs
    ``queries[i]`` with ``values[i, :]`` (both leading axes equal); otherwise
    the same queries apply to every leading slice, returning
    ``values.shape[:-1] + queries.shape``.
    """
    q = np.asarray(queries, dtype=float)
    inside = np.abs(q) <= lattice.radius + 1e-12
    if extend == "clamp":
        qq = np.clip(q, -lattice.radius, lattice.radius)
    elif extend == "zero":
        qq = np.where(inside, np.clip(q, -lattice.radius, lattice.radius), 0.0)
    else:
        raise ValueError(f"unknown extension {extend!r}")
    t = (qq + lattice.radius) / lattice.delta
    base = np.clip(np.floor(t).astype(int) - 2, 0, lattice.n - 6)
    u = t - base
    w = _lagrange_weights(u)                      # (6, *q.shape)
    if paired:
        rows = np.arange(values.shape[0])
        out = np.zeros(values.shape[0], dtype=values.dtype)
        for j in range(6):
            out = out + w[j] * values[rows, base + j]
    else:
        out = np.zeros(values.shape[:-1] + q.shape, dtype=values.dtype)
        for j in range(6):
            out = out + values[..., base + j] * w[j]
    if extend == "zero":
        out = out * inside
    return out


def _pad_xi(values: np.ndarray, extend: str, width: int = 2) -> np.ndarray:
    if extend == "zero":
        pad = np.zeros(values.shape[:-1] + (width,), dtype=values.dtype)
        return np.concatenate([pad, values, pad], axis=-1)
    left = np.repeat(values[..., :1], width, axis=-1)
    right = np.repeat(values[..., -1:], width, axis=-1)
    return np.concatenate([left, values, right], axis=-1)


# ---------------------------------------------------------------------------
# sampled terms
# ---------------------------------------------------------------------------

class SampledTerm:
    """One symbol a(x, xi) sampled on grid x lattice, with an extension mode.

    ``extend='zero'`` marks compact xi-support (trace class); ``'clamp'``
    continues the boundary value as a constant plateau (order-zero data).
    """

    def __init__(self, grid: PeriodicGrid, lattice: XiLattice, values: np.ndarray,
                 extend: str = "zero"):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.size, lattice.n):
            raise ValueError(f"expected shape {(grid.size, lattice.n)}, got {values.shape}")
        if extend not in ("zero", "clamp"):
            raise ValueError(f"unknown extension {extend!r}")
        self.grid = grid
        self.lattice = lattice
        self.values = values
        self.extend = extend

    @classmethod
    def from_callable(cls, grid: PeriodicGrid, lattice: XiLattice, fn,
                      extend: str = "zero") -> "SampledTerm":
        X, XI = np.meshgrid(grid.nodes, lattice.points, indexing="ij")
        return cls(grid, lattice, np.asarray(fn(X, XI), dtype=complex), extend)

    def _like(self, values: np.ndarray, extend: str | None = None) -> "SampledTerm":
        return SampledTerm(self.grid, self.lattice, values,
                           self.extend if extend is None else extend)

    def _check(self, other: "SampledTerm"):
        if self.grid.size != other.grid.size or self.lattice != other.lattice:
            raise GroupMismatch("sampled terms on different grids/lattices")

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "SampledTerm") -> "SampledTerm":
        self._check(other)
        extend = "clamp" if "clamp" in (self.extend, other.extend) else "zero"
        return self._like(self.values + other.values, extend)

    def __mul__(self, other):
        if isinstance(other, SampledTerm):
            self._check(other)
            extend = "clamp" if (self.extend == "clamp" and other.extend == "clamp") else "zero"
            return self._like(self.values * other.values, extend)
        return self._like(self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.values)

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.values)))

    def xi_support_radius(self) -> float | None:
        """Support radius for zero-extended terms; None (unbounded) for clamp."""
        if self.extend == "clamp":
            return None
        mask = np.max(np.abs(self.values), axis=0) > 1e-15
        if not np.any(mask):
            return 0.0
        return float(np.max(np.abs(self.lattice.points[mask])))

    # -- calculus ----------------------------------------------------------------

    def dx(self) -> "SampledTerm":
        """Spectral d/dx."""
        M = self.grid.size
        k = np.fft.fftfreq(M, d=1.0 / M)
        F = np.fft.fft(self.values, axis=0)
        return self._like(np.fft.ifft((1j * k)[:, None] * F, axis=0))

    def dxi(self) -> "SampledTerm":
        """4th-order centered d/dxi (extension-aware padding)."""
        p = _pad_xi(self.values, self.extend)
        d = (-p[..., 4:] + 8.0 * p[..., 3:-1] - 8.0 * p[..., 1:-3] + p[..., :-4]) \
            / (12.0 * self.lattice.delta)
        return self._like(d, "zero" if self.extend == "clamp" else self.extend)

    def shift_x(self, c: float) -> "SampledTerm":
        if c == 0.0:
            return self
        M = self.grid.size
        k = np.fft.fftfreq(M, d=1.0 / M)
        F = np.fft.fft(self.values, axis=0)
        return self._like(np.fft.ifft(np.exp(1j * k * c)[:, None] * F, axis=0))

    def reflect(self) -> "SampledTerm":
        """(x, xi) -> (-x, -xi); exact on the symmetric lattice."""
        vals = self.values[:, ::-1]
        vals = np.roll(vals[::-1, :], 1, axis=0)    # x_j -> -x_j is index M-j mod M
        return self._like(vals)

    def sample(self, xi: np.ndarray) -> np.ndarray:
        """Values a(x_nodes, xi) for arbitrary xi, shape (M, len(xi))."""
        return lattice_interp(self.lattice, self.values, np.asarray(xi, dtype=float),
                              self.extend)

    def coeff_row(self, m: int, xi: np.ndarray) -> np.ndarray:
        """Fourier coefficient ahat(m, xi) at arbitrary xi (0 beyond the grid's band)."""
        M = self.grid.size
        if abs(m) > M // 2 - 1:
            return np.zeros(np.asarray(xi).shape, dtype=complex)
        row = np.fft.fft(self.values, axis=0)[m % M, :] / M
        return lattice_interp(self.lattice, row, np.asarray(xi, dtype=float), self.extend)

    def coeff_rows_paired(self, ms: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """ahat(ms[i], xi[i]) with per-entry rows (used by sheet-swapping traces).

        Transfers past the grid's resolvable band are zero, not aliased.
        """
        M = self.grid.size
        F = np.fft.fft(self.values, axis=0) / M
        rows = F[np.mod(ms, M), :]
        out = lattice_interp(self.lattice, rows, np.asarray(xi, dtype=float),
                             self.extend, paired=True)
        return out * (np.abs(ms) <= M // 2 - 1)


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


def zero_section_cut(lattice: XiLattice, eps: float) -> np.ndarray:
    """chi(xi): 0 on |xi| <= eps, 1 on |xi| >= 2 eps, smooth in between."""
    if not (0 < eps and 2 * eps < lattice.radius):
        raise ValueError(f"need 0 < 2 eps < lattice radius, got eps={eps}")
    return smooth_step((np.abs(lattice.points) - eps) / eps)


def edge_taper(lattice: XiLattice, width: float = 0.4) -> np.ndarray:
    """Smooth factor that is 1 on |xi| <= radius - width and 0 at the edge.

    Diagnostic symbols built from slowly decaying profiles multiply by this
    so the lattice carries their full (compact) support.
    """
    return smooth_step((lattice.radius - np.abs(lattice.points)) / width)


# ---------------------------------------------------------------------------
# exact mode action of the isometric transforms
# ---------------------------------------------------------------------------

def mode_action(family: RealizationFamily, g: Element, ks: np.ndarray) -> tuple[int, np.ndarray]:
    """(sign s, phases p) with Phi_g e_k = p(k) e_{s k}; isometric families only."""
    if not family.is_isometric:
        raise NonIsometricAction("curved realizations have no exact mode action")
    kind = family.kind
    ks = np.asarray(ks)
    if kind == "trivial" or g == family.group.identity:
        return 1, np.ones(ks.shape, dtype=complex)
    if kind in ("rotation", "curved_rotation"):
        return 1, np.exp(-1j * ks * family._angle(g))
    if kind == "reflection":
        return -1, np.ones(ks.shape, dtype=complex)
    if kind == "dihedral":
        j, f = g
        sgn = -1 if f else 1
        return sgn, np.exp(-1j * sgn * ks * (TWO_PI * j / family.group.m))
    if kind == "half_wave":
        return 1, np.exp(1j * family.group.theta * g * np.abs(ks))
    raise NonIsometricAction(f"no mode action for realization {kind!r}")


def transport_term(term: SampledTerm, family: RealizationFamily, g: Element) -> SampledTerm:
    """term o C_g for the isometric action (exact)."""
    C = family.canonical(g)
    aff = C.affine_base()
    if C.kind == "halfwave":
        t = C.t
        out = term.values.copy()
        pos = term.lattice.points > 0
        neg = term.lattice.points < 0
        out[:, pos] = term.shift_x(-t).values[:, pos]
        out[:, neg] = term.shift_x(t).values[:, neg]
        return term._like(out)
    if aff is None:
        raise NonIsometricAction("transport_term requires an isometric base map")
    sign, shift = aff
    if sign == 1:
        return term.shift_x(shift)
    return term.reflect().shift_x(shift)


# ---------------------------------------------------------------------------
# star series
# ---------------------------------------------------------------------------

class StarSeries:
    """Element  unit + sum_{g,j} h^j a_{g,j}(x, xi) Phi_g  of the h-graded
    crossed symbol algebra over an isometric realization."""

    def __init__(self, family: RealizationFamily, grid: PeriodicGrid,
                 lattice: XiLattice, eps: float,
                 terms: dict[tuple[Element, int], SampledTerm] | None = None,
                 unit: complex = 0.0):
        if not family.is_isometric:
            raise NonIsometricAction("star calculus is restricted to isometric actions")
        self.family = family
        self.group = family.group
        self.grid = grid
        self.lattice = lattice
        self.eps = eps
        self.unit = complex(unit)
        self.terms = {}
        for key, t in (terms or {}).items():
            if t.norm_inf() > 0.0:
                self.terms[key] = t

    # -- constructors ---------------------------------------------------------

    @classmethod
    def unit_series(cls, family, grid, lattice, eps, value: complex = 1.0) -> "StarSeries":
        return cls(family, grid, lattice, eps, {}, unit=value)

    @classmethod
    def from_crossed(cls, symbol: CrossedSymbol, lattice: XiLattice, eps: float,
                     unit_fill: bool = True) -> "StarSeries":
        """Embed order-zero principal data:  unit + chi(xi) (sigma - unit)."""
        family, grid = symbol.family, symbol.grid
        chi = zero_section_cut(lattice, eps)
        pos = lattice.points > 0
        neg = lattice.points < 0
        terms = {}
        e = family.group.identity
        for g in symbol.support:
            sym = symbol.coeff(g)
            vals = np.zeros((grid.size, lattice.n), dtype=complex)
            vals[:, pos] = sym.plus.values[:, None]
            vals[:, neg] = sym.minus.values[:, None]
            if unit_fill and g == e:
                vals = vals - 1.0
            terms[(g, 0)] = SampledTerm(grid, lattice, vals * chi[None, :], "clamp")
        return cls(family, grid, lattice, eps, terms, unit=1.0 if unit_fill else 0.0)

    def leading_crossed(self) -> CrossedSymbol:
        """Extract the order-zero principal symbol from the plateau."""
        probe = min(3.0 * self.eps, 0.5 * (2.0 * self.eps + self.lattice.radius))
        coeffs: dict[Element, PrincipalSymbol] = {}
        for (g, j), term in self._sorted_terms():
            if j != 0:
                continue
            vplus = term.sample(np.array([probe]))[:, 0]
            vminus = term.sample(np.array([-probe]))[:, 0]
            base = PrincipalSymbol(PeriodicFunction(self.grid, vplus),
                                   PeriodicFunction(self.grid, vminus))
            coeffs[g] = coeffs[g] + base if g in coeffs else base
        e = self.group.identity
        if self.unit != 0.0:
            u = PrincipalSymbol.constant(self.grid, self.unit)
            coeffs[e] = coeffs[e] + u if e in coeffs else u
        return CrossedSymbol(self.family, coeffs, self.grid)

    # -- bookkeeping -----------------------------------------------------------

    def _check(self, other: "StarSeries"):
        if self.family.signature() != other.family.signature():
            raise GroupMismatch("series over different group actions")
        if (self.grid.size, self.lattice, self.eps) != (other.grid.size, other.lattice, other.eps):
            raise GroupMismatch("series on different grids/lattices")

    def _sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (repr(kv[0][0]), kv[0][1]))

    def max_h_order(self) -> int:
        return max((j for (_, j) in self.terms), default=0)

    def copy_with(self, terms, unit) -> "StarSeries":
        return StarSeries(self.family, self.grid, self.lattice, self.eps, terms, unit)

    def __add__(self, other: "StarSeries") -> "StarSeries":
        self._check(other)
        terms = dict(self.terms)
        for key, t in other.terms.items():
            terms[key] = terms[key] + t if key in terms else t
        return self.copy_with(terms, self.unit + other.unit)

    def __sub__(self, other: "StarSeries") -> "StarSeries":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "StarSeries":
        return self.copy_with({k: scalar * t for k, t in self.terms.items()},
                              scalar * self.unit)

    def norm_inf(self) -> float:
        return abs(self.unit) + sum(t.norm_inf() for t in self.terms.values())

    # -- the star product ---------------------------------------------------------

    def star(self, other: "StarSeries", N: int) -> "StarSeries":
        """Composition truncated at h-order < N:

        per group pair, sum_kappa ((-i h)^kappa / kappa!) d_xi^kappa a_g .
        d_x^kappa (b_h o C_{g^{-1}}), group-twisted per the Egorov law.
        """
        self._check(other)
        if N < 1:
            raise OrderOverflow("truncation order must be >= 1")
        grp = self.group
        out: dict[tuple[Element, int], SampledTerm] = {}

        def add(key, term):
            out[key] = out[key] + term if key in out else term

        # unit cross terms
        if self.unit != 0.0:
            for (h, j2), tb in other._sorted_terms():
                if j2 < N:
                    add((h, j2), self.unit * tb)
        if other.unit != 0.0:
            for (g, j1), ta in self._sorted_terms():
                if j1 < N:
                    add((g, j1), other.unit * ta)

        for (g, j1), ta in self._sorted_terms():
            if j1 >= N:
                continue
            C_ginv = grp.inv(g)
            for (h, j2), tb in other._sorted_terms():
                if j1 + j2 >= N:
                    continue
                m = grp.mul(g, h)
                twisted = transport_term(tb, self.family, C_ginv)
                da, db = ta, twisted
                add((m, j1 + j2), da * db)
                kappa = 1
                while j1 + j2 + kappa < N:
                    da = da.dxi()
                    db = db.dx()
                    coeff = (-1j) ** kappa / math.factorial(kappa)
                    add((m, j1 + j2 + kappa), coeff * (da * db))
                    kappa += 1
        return self.copy_with(out, self.unit * other.unit)


# ---------------------------------------------------------------------------
# symbol-level parametrix
# ---------------------------------------------------------------------------

def symbol_parametrix_h(a: StarSeries, N: int) -> StarSeries:
    """Almost inverse r = r0 * (1 + w + ... + w^N), w = 1 - a * r0,
    with r0 the pointwise inverse of the leading crossed symbol embedded with
    the same zero-section cut and unit convention as ``a``."""
    r0_crossed = invert_principal(a.leading_crossed())
    r0 = StarSeries.from_crossed(r0_crossed, a.lattice, a.eps,
                                 unit_fill=(a.unit != 0.0))
    # leading_crossed of the embedding reproduces the inverse on the plateau;
    # grids must match the series
    one = StarSeries.unit_series(a.family, a.grid, a.lattice, a.eps, 1.0)
    w = one - a.star(r0, N)
    acc = one
    for _ in range(N):
        acc = one + w.star(acc, N)
    return r0.star(acc, N)


# ---------------------------------------------------------------------------
# localized trace functionals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceSeries:
    """Trace values over a decreasing h-grid."""

    h_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h_grid, dtype=float)
        if len(h) < 6 or np.max(h) / np.min(h) < 10.0 - 1e-9:
            raise ValueError("h_grid needs >= 6 points spanning a decade")

    def __sub__(self, other: "TraceSeries") -> "TraceSeries":
        return TraceSeries(self.h_grid, self.values - other.values)

    def scale(self) -> float:
        return float(np.max(np.abs(self.values)))


def default_h_grid(n: int = 8, lo: float = 0.02, hi: float = 0.2) -> np.ndarray:
    """Logarithmically spaced, descending (largest h first)."""
    return np.geomspace(hi, lo, n)


def _traceable_terms(series: StarSeries, boundary_tol: float = 1e-8):
    """Validate trace-class surrogates: no unit, negligible lattice-edge values."""
    if abs(series.unit) > 1e-14:
        raise TraceDivergence(f"series has unit component {series.unit!r}")
    scale = max(series.norm_inf(), 1.0)
    for (g, j), term in series._sorted_terms():
        edge = max(float(np.max(np.abs(term.values[:, 0]))),
                   float(np.max(np.abs(term.values[:, -1]))))
        if edge > boundary_tol * scale:
            raise ResidualNotTraceClass(
                f"term (g={series.group.label(g)}, j={j}) carries lattice-edge "
                f"values {edge:.2e}; not trace-class on the window")
    return series._sorted_terms()


def _term_trace(term: SampledTerm, family: RealizationFamily, l: Element,
                h: float, k_max: int) -> np.ndarray:
    """Per-mode contributions to tr(op_h(term) Phi_l) = sum_k p(k) ahat((1-s)k, s h k)."""
    ks = np.arange(-k_max, k_max + 1)
    s, p = mode_action(family, l, ks)
    if s == 1:
        vals = term.coeff_row(0, h * ks)
    else:
        vals = term.coeff_rows_paired(2 * ks, -h * ks)
    return p * vals


def tau_g(series: StarSeries, cls: tuple[Element, ...], h_grid: np.ndarray,
          saturation_check: bool = True, tail_tol: float = 1e-4) -> TraceSeries:
    """Localized trace functional sum_{l in <g>} tr(op_h(a_l) Phi_l) per h.

    The mode sum runs to |h k| <= lattice radius (the symbol support); the
    outer 10% band of the lattice must contribute negligibly, otherwise the
    trace has not saturated and TraceDivergence is raised.
    """
    terms = _traceable_terms(series)
    h_grid = np.asarray(h_grid, dtype=float)
    values = np.zeros(len(h_grid), dtype=complex)
    radius = series.lattice.radius
    for i, h in enumerate(h_grid):
        k_max = int(math.ceil(radius / h)) + 3
        ks = np.arange(-k_max, k_max + 1)
        outer = np.abs(h * ks) >= 0.9 * radius
        total = 0.0 + 0.0j
        tail = 0.0
        for (g, j), term in terms:
            if g not in cls:
                continue
            contrib = (h ** j) * _term_trace(term, series.family, g, h, k_max)
            total += complex(np.sum(contrib))
            tail += float(np.sum(np.abs(contrib[outer])))
        values[i] = total
        if saturation_check and tail > tail_tol * (1.0 + abs(total)):
            raise TraceDivergence(
                f"trace at h={h:.4g} has un-saturated outer-band mass {tail:.2e}")
    return TraceSeries(h_grid, values)


# ---------------------------------------------------------------------------
# Laurent fits and power laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentFit:
    powers: tuple
    coeffs: np.ndarray
    residual: float
    cond: float

    def coeff(self, j: int) -> complex:
        if j not in self.powers:
            return 0.0
        return complex(self.coeffs[self.powers.index(j)])

    def as_dict(self) -> dict:
        return {
            "powers": list(self.powers),
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
            "residual": self.residual,
            "cond": self.cond,
        }


def laurent_fit(series: TraceSeries, j_min: int, j_max: int,
                cond_bound: float = 1e8) -> LaurentFit:
    """Least-squares fit of the values against powers h^{j_min} .. h^{j_max}."""
    h = np.asarray(series.h_grid, dtype=float)
    powers = tuple(range(j_min, j_max + 1))
    if len(h) < len(powers) + 1:
        raise ValueError(f"need >= {len(powers) + 1} h-points for powers {powers}")
    B = np.stack([h ** p for p in powers], axis=1)
    col_scale = np.linalg.norm(B, axis=0)
    Bs = B / col_scale[None, :]
    cond = float(np.linalg.cond(Bs))
    if cond > cond_bound:
        raise IllConditionedFit(f"fit condition number {cond:.2e} > {cond_bound:g}")
    sol, *_ = np.linalg.lstsq(Bs, series.values, rcond=None)
    coeffs = sol / col_scale
    fitted = B @ coeffs
    denom = float(np.linalg.norm(series.values))
    residual = float(np.linalg.norm(fitted - series.values)) / (denom if denom > 0 else 1.0)
    return LaurentFit(powers, coeffs, residual, cond)


@dataclass(frozen=True)
class PowerLawReport:
    slope: float | None        # None when values sit at the noise floor
    max_value: float
    values: np.ndarray
    h_grid: np.ndarray

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "max_value": self.max_value,
            "h": list(map(float, self.h_grid)),
            "abs_values": [float(v) for v in np.abs(self.values)],
        }


def trace_power_law(series: StarSeries, cls: tuple[Element, ...],
                    h_grid: np.ndarray, floor: float = 1e-12) -> PowerLawReport:
    """Log-log slope of |tau_g| over the h-grid (None below the noise floor)."""
    ts = tau_g(series, cls, h_grid)
    mags = np.abs(ts.values)
    top = float(np.max(mags))
    if top < floor:
        return PowerLawReport(None, top, ts.values, ts.h_grid)
    logs = np.log(np.maximum(mags, 1e-300))
    slope = float(np.polyfit(np.log(ts.h_grid), logs, 1)[0])
    return PowerLawReport(slope, top, ts.values, ts.h_grid)


# ---------------------------------------------------------------------------
# the algebraic index
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicIndexResult:
    fit: LaurentFit
    series: TraceSeries
    constant_term: complex
    negative_power: complex
    negative_power_ok: bool
    left_series: TraceSeries | None
    right_series: TraceSeries | None

    def as_dict(self) -> dict:
        return {
            "fit": self.fit.as_dict(),
            "constant_term": [self.constant_term.real, self.constant_term.imag],
            "negative_power": [self.negative_power.real, self.negative_power.imag],
            "negative_power_ok": self.negative_power_ok,
            "h": list(map(float, self.series.h_grid)),
            "values": [[v.real, v.imag] for v in self.series.values],
        }


def algebraic_index(a: StarSeries, cls: tuple[Element, ...], N: int,
                    h_grid: np.ndarray, r: StarSeries | None = None,
                    neg_tol: float = 1e-3) -> AlgebraicIndexResult:
    """tau_g(1 - r*a) - tau_g(1 - a*r), Laurent-fitted on powers -1 .. N-2.

    The constant term is the localized algebraic index; the h^{-1} coefficient
    is flagged against ``neg_tol`` scaled by the value magnitude over the grid.
    """
    if N < 3:
        raise OrderOverflow("algebraic index needs N >= 3")
    if r is None:
        r = symbol_parametrix_h(a, N)
    one = StarSeries.unit_series(a.family, a.grid, a.lattice, a.eps, 1.0)
    res_left = one - r.star(a, N)     # 1 - r * a
    res_right = one - a.star(r, N)    # 1 - a * r
    if abs(res_left.unit) < 1e-12 and abs(res_right.unit) < 1e-12:
        left = tau_g(res_left, cls, h_grid)
        right = tau_g(res_right, cls, h_grid)
        diff = left - right
    else:
        # zero-fill symbols leave plateau parts in each residual that only
        # cancel between the two; trace the star commutator directly
        left = right = None
        diff = tau_g(res_left - res_right, cls, h_grid)
    fit = laurent_fit(diff, -1, N - 2)
    c0 = fit.coeff(0)
    cm1 = fit.coeff(-1)
    h_min = float(np.min(np.asarray(h_grid, dtype=float)))
    scale = max(diff.scale() * h_min, 1e-12)
    ok = abs(cm1) < neg_tol * max(scale, 1.0)
    return AlgebraicIndexResult(fit, diff, c0, cm1, ok, left, right)


# ---------------------------------------------------------------------------
# dense oracles: realized series and the Egorov defect
# ---------------------------------------------------------------------------

def realize_series(series: StarSeries, h: float, window: FrequencyWindow) -> np.ndarray:
    """Dense window matrix  unit I + sum h^j op_h(a_{g,j}) Phi_g  (oracle use)."""
    from .quantize import op_h_term
    real = series.family.at(window)
    out = series.unit * np.eye(window.dim, dtype=complex)
    for (g, j), term in series._sorted_terms():
        mat = (h ** j) * op_h_term(term, h, window)
        out += real.phi(g).right_mul(mat)
    return out


@dataclass(frozen=True)
class EgorovReport:
    defects: np.ndarray
    h_grid: np.ndarray
    slope: float | None
    max_defect: float

    def as_dict(self) -> dict:
        return {
            "h": list(map(float, self.h_grid)),
            "defects": [float(d) for d in self.defects],
            "slope": self.slope,
            "max_defect": self.max_defect,
        }


def egorov_defect(family: RealizationFamily, g: Element, term: SampledTerm,
                  h_grid: np.ndarray, window_factor: float = 2.5,
                  metric: str = "column", floor: float = 1e-11) -> EgorovReport:
    """Defect of  Phi_g op_h(a) Phi_{g^{-1}} - op_h(a o C_{g^{-1}})  on the
    inner window.

    Exact (< 1e-9) for isometric realizations; first-order in h for curved
    weighted shifts, measured as a log-log slope.  ``metric='column'`` takes
    the largest per-column l2 deviation (the columnwise symbol defect, which
    exhibits the clean O(h) law); ``'op'`` takes the operator 2-norm of the
    two-sided inner compression (an upper measurement that converges to the
    same law only deeper in the asymptotic regime).
    """
    from .quantize import op_h_term
    radius = term.xi_support_radius()
    if radius is None or radius == 0.0:
        raise ValueError("egorov defect needs a compactly supported symbol")
    if family.is_isometric:
        transported = transport_term(term, family, family.group.inv(g))
    else:
        transported = _transport_curved(term, family, g)
    defects = []
    for h in np.asarray(h_grid, dtype=float):
        cutoff = int(math.ceil(window_factor * radius / h))
        window = FrequencyWindow(cutoff)
        real = family.at(window)
        A = op_h_term(term, h, window)
        conj = real.phi(g).left_mul(real.phi_inv(g).right_mul(A))
        target = op_h_term(transported, h, window)
        mask = window.inner_mask(0.5)
        D = conj - target
        if metric == "column":
            defects.append(float(np.max(np.linalg.norm(D[:, mask], axis=0))))
        elif metric == "op":
            defects.append(float(np.linalg.norm(D[np.ix_(mask, mask)], 2)))
        else:
            raise ValueError(f"unknown metric {metric!r}")
    defects = np.asarray(defects)
    top = float(np.max(defects))
    slope = None
    if top > floor:
        slope = float(np.polyfit(np.log(h_grid), np.log(np.maximum(defects, 1e-300)), 1)[0])
    return EgorovReport(defects, np.asarray(h_grid, dtype=float), slope, top)


def _transport_curved(term: SampledTerm, family: RealizationFamily,
                      g: Element) -> SampledTerm:
    """a o C_{g^{-1}} for a curved diffeomorphism action, sampled on the lattice.

    C_{g^{-1}}(x, xi) = (alpha^{-1}(x), xi alpha'(alpha^{-1}(x))); the x slice
    is evaluated spectrally, the xi slice by paired lattice interpolation.
    """
    diff = family.diffeo(g)
    x = term.grid.nodes
    X = diff.inverse(x)
    scale = diff.deriv(X)
    M = term.grid.size
    F = np.fft.fft(term.values, axis=0) / M
    kvec = np.fft.fftfreq(M, d=1.0 / M)
    basis = np.exp(1j * np.outer(X, kvec))          # (M, M)
    rows_at_X = basis @ F                           # a(X_i, xi_lattice)
    queries = scale[:, None] * term.lattice.points[None, :]
    out = np.empty_like(term.values)
    for i in range(M):
        out[i, :] = lattice_interp(term.lattice, rows_at_X[i, :], queries[i, :],
                                   term.extend)
    return SampledTerm(term.grid, term.lattice, out, term.extend)
