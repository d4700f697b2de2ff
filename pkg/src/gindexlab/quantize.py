"""Kohn-Nirenberg quantization on a Fourier window and g-graded operators.

``op(a)`` acts on mode k through column k: ``A[j, k]`` is the (j-k)-th Fourier
coefficient of ``x -> a(x, k)``.  A LabeledOperator keeps the g-grading of
``sum_g K_g Phi_g`` so that class-localized traces remain computable after
products; multiplication uses exact matrix conjugation,

    (A B)_m = sum_{gh = m} K_g (Phi_g L_h Phi_{g^{-1}}),

which realizes to the plain matrix product whenever Phi_g Phi_h = Phi_{gh}
holds exactly (all isometric families here).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .circle import FrequencyWindow, PeriodicFunction, PeriodicGrid
from .errors import GroupMismatch, WindowMismatch, WindowTooSmallForH
from .groups import Element
from .transforms import CanonicalTransform, Realization


# ---------------------------------------------------------------------------
# classical (h-free) symbols of nonpositive order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FullSymbol:
    """Sheet data times |k|^order outside a zero-section cut.

        a(x, k) = plus(x) |k|^order   for k >= k_min,
                  minus(x) |k|^order  for k <= -k_min,
                  fill                for |k| < k_min  (0, or 1 if unit_fill).
    """

    plus: PeriodicFunction
    minus: PeriodicFunction
    order: int = 0
    k_min: int = 4
    unit_fill: bool = False

    def __post_init__(self):
        if self.order > 0:
            raise ValueError("only orders m <= 0 are supported")
        if self.k_min < 1:
            raise ValueError("k_min must be >= 1")

    @property
    def grid(self) -> PeriodicGrid:
        return self.plus.grid

    @classmethod
    def from_principal(cls, sym, order: int = 0, k_min: int = 4,
                       unit_fill: bool = False) -> "FullSymbol":
        return cls(sym.plus, sym.minus, order, k_min, unit_fill)

    @classmethod
    def constant(cls, grid: PeriodicGrid, c: complex, k_min: int = 4,
                 unit_fill: bool = False) -> "FullSymbol":
        f = PeriodicFunction.constant(grid, c)
        return cls(f, f, 0, k_min, unit_fill)

    def transport(self, C: CanonicalTransform) -> "FullSymbol":
        """a o C for an isometric transform (|k| is preserved, sheets may swap)."""
        aff = C.affine_base()
        if aff is None and C.kind != "halfwave":
            raise ValueError("FullSymbol transport supports isometric maps only")
        if C.kind == "halfwave":
            new_plus = self.plus.compose_affine(1, -C.t)
            new_minus = self.minus.compose_affine(1, C.t)
            return replace(self, plus=new_plus, minus=new_minus)
        sign, shift = aff
        if sign == 1:
            return replace(self,
                           plus=self.plus.compose_affine(1, shift),
                           minus=self.minus.compose_affine(1, shift))
        # orientation-reversing: sheets swap and the base map applies to each
        return replace(self,
                       plus=self.minus.compose_affine(-1, shift),
                       minus=self.plus.compose_affine(-1, shift))


def op_classical(a: FullSymbol, window: FrequencyWindow) -> np.ndarray:
    """Dense window matrix of the Kohn-Nirenberg quantization of ``a``."""
    grid = a.grid
    M = grid.size
    if M < 2 * window.cutoff + 2:
        raise WindowMismatch(
            f"symbol grid {M} cannot resolve mode transfers up to {2 * window.cutoff}")
    ks = window.modes
    dim = window.dim
    c_plus = np.fft.fft(a.plus.values) / M      # index d mod M = coeff of e^{idx}
    c_minus = np.fft.fft(a.minus.values) / M
    out = np.zeros((dim, dim), dtype=complex)
    J = ks[:, None]
    T = J - ks[None, :]
    D = np.mod(T, M)
    # alias guard on the true mode transfer: past +-M/2 the gather would wrap
    rep = np.abs(T) <= M // 2 - 1
    for sheet, cvec in ((1, c_plus), (-1, c_minus)):
        cols = ks >= a.k_min if sheet == 1 else ks <= -a.k_min
        if not np.any(cols):
            continue
        prof = np.abs(ks[cols]).astype(float) ** a.order
        block = cvec[D[:, cols]] * np.where(rep[:, cols], 1.0, 0.0)
        out[:, cols] = block * prof[None, :]
    if a.unit_fill:
        idx = np.where(np.abs(ks) < a.k_min)[0]
        out[idx, idx] = 1.0
    return out


# ---------------------------------------------------------------------------
# semiclassical symbols (h-graded, sampled in xi)
# ---------------------------------------------------------------------------

@dataclass
class SemiclassicalSymbol:
    """Finite sum  sum_j h^j a_j(x, xi)  of sampled xi-profiles.

    Each ``a_j`` is any object with ``grid`` and ``sample(xi) -> (M, len(xi))``
    (see semiclass.SampledTerm); ``eps`` records the zero-section cut, with
    eps = 0 admitted for diagnostics that need support at the zero section.
    """

    terms: list
    eps: float = 0.0

    @property
    def grid(self) -> PeriodicGrid:
        return self.terms[0][1].grid

    def xi_support_radius(self) -> float | None:
        radii = [t.xi_support_radius() for _, t in self.terms]
        if any(r is None for r in radii):
            return None
        return max(radii)


def op_h_term(term, h: float, window: FrequencyWindow) -> np.ndarray:
    """Dense matrix of one sampled term at semiclassical parameter h."""
    grid = term.grid
    M = grid.size
    ks = window.modes
    vals = term.sample(h * ks)                       # (M, dim)
    coeffs = np.fft.fft(vals, axis=0) / M
    T = ks[:, None] - ks[None, :]
    rep = np.abs(T) <= M // 2 - 1
    cols = np.broadcast_to(np.arange(window.dim), (window.dim, window.dim))
    out = coeffs[np.mod(T, M), cols] * np.where(rep, 1.0, 0.0)
    return out


def op_h(a: SemiclassicalSymbol, h: float, window: FrequencyWindow) -> np.ndarray:
    """Quantize  sum_j h^j a_j  at parameter h on the window."""
    if not (0.0 < h <= 1.0):
        raise ValueError(f"h must be in (0, 1], got {h}")
    radius = a.xi_support_radius()
    if radius is not None and h * window.cutoff < radius:
        raise WindowTooSmallForH(
            f"h N_F = {h * window.cutoff:.3f} below xi-support radius {radius:.3f}")
    out = np.zeros((window.dim, window.dim), dtype=complex)
    for j, term in a.terms:
        out += (h ** j) * op_h_term(term, h, window)
    return out


# ---------------------------------------------------------------------------
# g-graded operators
# ---------------------------------------------------------------------------

class LabeledOperator:
    """Finitely supported map g -> dense window matrix, realizing sum K_g Phi_g."""

    def __init__(self, realization: Realization, parts: dict[Element, np.ndarray]):
        self.realization = realization
        dim = realization.window.dim
        self.parts = {}
        for g, m in parts.items():
            m = np.asarray(m, dtype=complex)
            if m.shape != (dim, dim):
                raise WindowMismatch(f"part {g!r} has shape {m.shape}, window dim {dim}")
            self.parts[g] = m

    # -- constructors -------------------------------------------------------

    @classmethod
    def unit(cls, realization: Realization) -> "LabeledOperator":
        e = realization.group.identity
        return cls(realization, {e: np.eye(realization.window.dim, dtype=complex)})

    @classmethod
    def from_transform(cls, realization: Realization, g: Element) -> "LabeledOperator":
        """delta_g (x) I, i.e. the bare quantized transform Phi_g."""
        return cls(realization, {g: np.eye(realization.window.dim, dtype=complex)})

    # -- plumbing -------------------------------------------------------------

    @property
    def window(self) -> FrequencyWindow:
        return self.realization.window

    @property
    def group(self):
        return self.realization.group

    @property
    def support(self) -> list[Element]:
        return sorted(self.parts.keys(), key=repr)

    def _check_compatible(self, other: "LabeledOperator"):
        if self.realization.family.signature() != other.realization.family.signature():
            raise GroupMismatch("labeled operators over different group actions")
        if self.window.cutoff != other.window.cutoff:
            raise WindowMismatch("labeled operators on different windows")

    def part(self, g: Element) -> np.ndarray:
        if g in self.parts:
            return self.parts[g]
        return np.zeros((self.window.dim, self.window.dim), dtype=complex)

    def __add__(self, other: "LabeledOperator") -> "LabeledOperator":
        self._check_compatible(other)
        out = {g: m.copy() for g, m in self.parts.items()}
        for g, m in other.parts.items():
            out[g] = out[g] + m if g in out else m
        return LabeledOperator(self.realization, out)

    def __sub__(self, other: "LabeledOperator") -> "LabeledOperator":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "LabeledOperator":
        return LabeledOperator(self.realization,
                               {g: scalar * m for g, m in self.parts.items()})

    def prune(self, rel_tol: float = 1e-13) -> "LabeledOperator":
        """Drop parts with negligible Frobenius norm (keeps shift supports finite)."""
        norms = {g: np.linalg.norm(m) for g, m in self.parts.items()}
        top = max(norms.values(), default=0.0)
        if top == 0.0:
            return self
        kept = {g: m for g, m in self.parts.items() if norms[g] > rel_tol * top}
        return LabeledOperator(self.realization, kept)

    # -- algebra -----------------------------------------------------------------

    def multiply(self, other: "LabeledOperator") -> "LabeledOperator":
        """Graded product: (A B)_m = sum_{gh=m} K_g (Phi_g L_h Phi_{g^{-1}})."""
        self._check_compatible(other)
        grp = self.group
        real = self.realization
        out: dict[Element, np.ndarray] = {}
        for g in self.support:
            K = self.parts[g]
            phi_g = real.phi(g)
            phi_ginv = real.phi_inv(g)
            for h in other.support:
                L = other.parts[h]
                if phi_g.mode_map is not None:
                    conj = phi_g.mode_map.conjugate(L)
                else:
                    conj = phi_g.left_mul(phi_ginv.right_mul(L))
                m = grp.mul(g, h)
                contrib = K @ conj
                out[m] = out[m] + contrib if m in out else contrib
        return LabeledOperator(real, out)

    def __matmul__(self, other: "LabeledOperator") -> "LabeledOperator":
        return self.multiply(other)

    def power(self, n: int, prune_tol: float | None = None) -> "LabeledOperator":
        if n < 1:
            raise ValueError("power needs n >= 1")
        acc = self
        for _ in range(n - 1):
            acc = acc.multiply(self)
            if prune_tol is not None:
                acc = acc.prune(prune_tol)
        return acc

    def realize(self) -> np.ndarray:
        """sum_g K_g Phi_g as a dense window matrix."""
        out = np.zeros((self.window.dim, self.window.dim), dtype=complex)
        for g in self.support:
            out += self.realization.phi(g).right_mul(self.parts[g])
        return out

    def norm_fro(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(m) ** 2 for m in self.parts.values())))


def assemble(realization: Realization, spec: list[tuple[Element, FullSymbol]]) -> LabeledOperator:
    """Quantize a list of (g, symbol) pairs into a LabeledOperator."""
    parts: dict[Element, np.ndarray] = {}
    for g, sym in spec:
        mat = op_classical(sym, realization.window)
        parts[g] = parts[g] + mat if g in parts else mat
    return LabeledOperator(realization, parts)


def labeled_multiply(A: LabeledOperator, B: LabeledOperator) -> LabeledOperator:
    """Module-level alias for :meth:`LabeledOperator.multiply`."""
    return A.multiply(B)


def realize(A: LabeledOperator) -> np.ndarray:
    return A.realize()
