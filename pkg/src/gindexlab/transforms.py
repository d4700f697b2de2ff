"""Canonical transformations of the punctured cotangent bundle of the circle
and their exact quantizations on a Fourier window.

The cosphere bundle is two copies of the circle, labeled by the fiber sign
``sheet in {+1, -1}``.  A group element g realized by a circle diffeomorphism
``alpha_g`` acts by the pushforward transformation

    C_g(x, xi) = (alpha_g(x), xi / alpha_g'(x)),

so ``C_g C_h = C_{gh}`` holds on the nose, and conjugation transports symbols
backwards: ``Phi_g op(a) Phi_g^{-1} = op(a o C_{g^{-1}})`` (exactly, for the
isometric families below).  The quantization is the half-density shift

    (Phi_g u)(x) = |(alpha_g^{-1})'(x)|^{1/2} u(alpha_g^{-1}(x)),

which is unitary on L^2 and reduces to exact diagonal / mode-permutation
matrices for rotations, reflections and the half-wave flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .circle import FrequencyWindow, PeriodicFunction, PeriodicGrid
from .errors import InvalidParameter, NotADiffeo
from .groups import Element, GroupSpec

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# circle diffeomorphisms
# ---------------------------------------------------------------------------

class CircleDiffeo:
    """Orientation-preserving or -reversing circle diffeomorphism.

    Lifted to R as ``alpha(x) = sign * x + d(x)`` with 2 pi periodic
    displacement d.  Forward/inverse/derivative are vectorized callables so
    the map can be evaluated exactly on any grid.
    """

    def __init__(self, forward: Callable, inverse: Callable, deriv: Callable,
                 sign: int, order: int | None = None, name: str = ""):
        self.forward = forward
        self.inverse = inverse
        self.deriv = deriv
        self.sign = sign
        self.order = order
        self.name = name

    @classmethod
    def affine(cls, sign: int, shift: float, order: int | None = None) -> "CircleDiffeo":
        if sign not in (1, -1):
            raise InvalidParameter("affine circle map needs sign +-1")
        fwd = lambda x: sign * np.asarray(x, dtype=float) + shift
        inv = lambda y: sign * (np.asarray(y, dtype=float) - shift)
        der = lambda x: np.full_like(np.asarray(x, dtype=float), float(sign))
        return cls(fwd, inv, der, sign, order=order, name=f"affine({sign:+d},{shift:.6g})")

    @classmethod
    def conjugated_rotation(cls, angle: float, eps: float, order: int | None = None) -> "CircleDiffeo":
        """phi o R_angle o phi^{-1} with phi(x) = x + eps sin x (eps < 1)."""
        if not (0.0 <= eps < 1.0):
            raise NotADiffeo(f"conjugating map needs eps in [0, 1), got {eps}")

        def phi(x):
            x = np.asarray(x, dtype=float)
            return x + eps * np.sin(x)

        def phi_inv(y):
            y = np.asarray(y, dtype=float)
            x = y.copy()
            for _ in range(60):  # Newton; phi' = 1 + eps cos x >= 1 - eps > 0
                step = (x + eps * np.sin(x) - y) / (1.0 + eps * np.cos(x))
                x = x - step
                if np.max(np.abs(step)) < 1e-15:
                    break
            return x

        def phi_der(x):
            return 1.0 + eps * np.cos(np.asarray(x, dtype=float))

        fwd = lambda x: phi(phi_inv(x) + angle)
        inv = lambda y: phi(phi_inv(y) - angle)

        def der(x):
            u = phi_inv(x)
            return phi_der(u + angle) / phi_der(u)

        return cls(fwd, inv, der, sign=1, order=order,
                   name=f"conj_rot({angle:.6g},eps={eps:.3g})")

    @property
    def is_isometry(self) -> bool:
        return self.name.startswith("affine")

    def check(self, grid: PeriodicGrid, tol: float = 1e-10):
        """Verify alpha o alpha^{-1} = id and derivative positivity on the grid."""
        x = grid.nodes
        err = np.max(np.abs(self.forward(self.inverse(x)) - x))
        if err > tol:
            raise NotADiffeo(f"alpha o alpha^-1 deviates from id by {err:.2e}")
        d = self.deriv(x) * self.sign
        if np.min(d) <= 0:
            raise NotADiffeo("derivative changes sign on the grid")

    def displacement(self, grid: PeriodicGrid) -> PeriodicFunction:
        x = grid.nodes
        return PeriodicFunction(grid, self.forward(x) - self.sign * x)


# ---------------------------------------------------------------------------
# canonical transformations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalTransform:
    """Action of a group element on the cosphere bundle {+1,-1} x S^1.

    ``kind='diffeo'`` carries a CircleDiffeo (both sheets share the base map,
    sheets swap iff orientation-reversing); ``kind='halfwave'`` translates
    sheet +1 by -t and sheet -1 by +t.
    """

    kind: str                              # 'diffeo' | 'halfwave'
    diffeo: CircleDiffeo | None = None
    t: float = 0.0

    @property
    def sheet_swap(self) -> bool:
        return self.kind == "diffeo" and self.diffeo.sign == -1

    def sheet_after(self, sheet: int) -> int:
        return -sheet if self.sheet_swap else sheet

    def base(self, sheet: int, x: np.ndarray) -> np.ndarray:
        """Base-point image of (sheet, x)."""
        if self.kind == "diffeo":
            return self.diffeo.forward(x)
        return np.asarray(x, dtype=float) - sheet * self.t

    def fiber_scale(self, sheet: int, x: np.ndarray) -> np.ndarray:
        """|xi| scale factor at source point (C(x, xi) has |xi'| = scale * |xi|)."""
        if self.kind == "diffeo":
            return 1.0 / np.abs(self.diffeo.deriv(x))
        return np.ones_like(np.asarray(x, dtype=float))

    def affine_base(self) -> tuple[int, float] | None:
        """(sign, shift) when the base map is exactly affine, else None."""
        if self.kind == "halfwave":
            return None
        if self.diffeo.is_isometry:
            shift = float(self.diffeo.forward(np.zeros(1))[0])
            return self.diffeo.sign, shift
        return None

    def inverse(self) -> "CanonicalTransform":
        if self.kind == "halfwave":
            return CanonicalTransform("halfwave", t=-self.t)
        d = self.diffeo
        inv = CircleDiffeo(d.inverse, d.forward,
                           lambda x, _d=d: 1.0 / _d.deriv(_d.inverse(x)),
                           d.sign, order=d.order, name=d.name + "^-1"
                           if not d.name.startswith("affine") else
                           f"affine({d.sign:+d},{-d.sign * float(d.forward(np.zeros(1))[0]):.6g})")
        return CanonicalTransform("diffeo", diffeo=inv)


# ---------------------------------------------------------------------------
# exact quantized transforms on a window
# ---------------------------------------------------------------------------

class ModeMap:
    """Exact unitary of the form ``e_k -> p(k) e_{s k}`` on a Fourier window.

    Closed under products and adjoints; covers rotations, reflections,
    dihedral elements and the half-wave flow.
    """

    def __init__(self, window: FrequencyWindow, sign: int, phases: np.ndarray):
        self.window = window
        self.sign = sign
        self.phases = np.asarray(phases, dtype=complex)
        if self.phases.shape != (window.dim,):
            raise ValueError("phase vector does not match window")

    @classmethod
    def identity(cls, window: FrequencyWindow) -> "ModeMap":
        return cls(window, 1, np.ones(window.dim, dtype=complex))

    @classmethod
    def affine(cls, window: FrequencyWindow, sign: int, shift: float) -> "ModeMap":
        """Quantization of u -> u o alpha^{-1} for alpha(x) = sign x + shift."""
        k = window.modes
        return cls(window, sign, np.exp(-1j * sign * k * shift))

    @classmethod
    def half_wave(cls, window: FrequencyWindow, t: float) -> "ModeMap":
        k = window.modes
        return cls(window, 1, np.exp(1j * t * np.abs(k)))

    def _perm(self) -> np.ndarray:
        n = self.window.cutoff
        idx = np.arange(self.window.dim)
        return n + self.sign * (idx - n)

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.window.dim, self.window.dim), dtype=complex)
        perm = self._perm()
        m[perm, np.arange(self.window.dim)] = self.phases
        return m

    def compose(self, other: "ModeMap") -> "ModeMap":
        """self o other (apply ``other`` first)."""
        perm = other._perm()
        return ModeMap(self.window, self.sign * other.sign,
                       self.phases[perm] * other.phases)

    def adjoint(self) -> "ModeMap":
        perm = self._perm()
        return ModeMap(self.window, self.sign, np.conj(self.phases[perm]))

    def left_mul(self, mat: np.ndarray) -> np.ndarray:
        """Phi @ mat without densifying Phi."""
        perm = self._perm()
        out = np.empty_like(mat)
        out[perm, :] = self.phases[:, None] * mat
        return out

    def right_mul(self, mat: np.ndarray) -> np.ndarray:
        """mat @ Phi."""
        perm = self._perm()
        return mat[:, perm] * self.phases[None, :]

    def conjugate(self, mat: np.ndarray) -> np.ndarray:
        """Phi @ mat @ Phi^{-1} (exact, unitary)."""
        perm = self._perm()
        core = mat[np.ix_(perm, perm)]
        p = self.phases[perm]
        return (p[:, None] * core) * np.conj(p)[None, :]


class QuantizedTransform:
    """Quantized canonical transformation attached to a group element.

    Wraps either an exact ModeMap or a dense matrix (weighted diffeomorphism
    shift, unitary on L^2 but only approximately unitary after window
    truncation; the inner-window unitarity defect is recorded).
    """

    def __init__(self, element: Element, window: FrequencyWindow, tag: str,
                 mode_map: ModeMap | None = None, dense: np.ndarray | None = None,
                 truncation_defect: float | None = None):
        self.element = element
        self.window = window
        self.tag = tag
        self.mode_map = mode_map
        self._dense = dense
        self.truncation_defect = truncation_defect

    @property
    def is_exact(self) -> bool:
        return self.mode_map is not None

    def matrix(self) -> np.ndarray:
        if self.mode_map is not None:
            return self.mode_map.matrix()
        return self._dense

    def left_mul(self, mat: np.ndarray) -> np.ndarray:
        if self.mode_map is not None:
            return self.mode_map.left_mul(mat)
        return self._dense @ mat

    def right_mul(self, mat: np.ndarray) -> np.ndarray:
        if self.mode_map is not None:
            return self.mode_map.right_mul(mat)
        return mat @ self._dense


def weighted_shift_matrix(diffeo: CircleDiffeo, window: FrequencyWindow,
                          build_grid: PeriodicGrid | None = None) -> np.ndarray:
    """Dense window matrix of u -> |(alpha^{-1})'|^{1/2} (u o alpha^{-1}).

    Column k holds the Fourier coefficients of x -> w(x) exp(i k alpha^{-1}(x)).
    The build grid must resolve the spectral spread of the highest column.
    """
    if build_grid is None:
        need = max(8 * window.cutoff, 64)
        size = 1
        while size < need:
            size *= 2
        build_grid = PeriodicGrid(size)
    x = build_grid.nodes
    ainv = diffeo.inverse(x)
    w = np.sqrt(np.abs(1.0 / diffeo.deriv(ainv)))
    ks = window.modes
    cols = w[:, None] * np.exp(1j * np.outer(ainv, ks))
    coeffs = np.fft.fft(cols, axis=0) / build_grid.size  # row j = coeff of e^{ijx}, j mod M
    dim = window.dim
    out = np.empty((dim, dim), dtype=complex)
    rows = np.mod(ks, build_grid.size)
    out[:] = coeffs[rows, :]
    return out


# ---------------------------------------------------------------------------
# group realizations
# ---------------------------------------------------------------------------

class RealizationFamily:
    """Window-independent assignment g -> (canonical transform, quantization recipe).

    Kinds:

    * ``trivial``          : the trivial group, identity only
    * ``rotation``         : cyclic(m) or integer_shift(theta) by rigid rotations
    * ``reflection``       : cyclic(2) by x -> -x
    * ``dihedral``         : dihedral(m) by x -> (-1)^f x + 2 pi j / m
    * ``curved_rotation``  : cyclic(m) by phi o R_{2 pi j/m} o phi^{-1}, phi = x + eps sin x
    * ``half_wave``        : integer_shift(t) by exp(i n t |D|)
    """

    def __init__(self, group: GroupSpec, kind: str, eps: float = 0.0):
        self.group = group
        self.kind = kind
        self.eps = eps
        self._validate()

    def _validate(self):
        g, k = self.group, self.kind
        ok = {
            "trivial": g.kind == "trivial",
            "rotation": g.kind in ("cyclic", "integer_shift"),
            "reflection": g.kind == "cyclic" and g.m == 2,
            "dihedral": g.kind == "dihedral",
            "curved_rotation": g.kind == "cyclic",
            "half_wave": g.kind == "integer_shift",
        }.get(k)
        if ok is None:
            raise InvalidParameter(f"unknown realization kind {k!r}")
        if not ok:
            raise InvalidParameter(f"realization {k!r} incompatible with group {g.kind!r}")
        if k == "curved_rotation" and not (0.0 <= self.eps < 1.0):
            raise NotADiffeo(f"curved_rotation needs eps in [0,1), got {self.eps}")

    @property
    def is_isometric(self) -> bool:
        return self.kind != "curved_rotation" or self.eps == 0.0

    def signature(self) -> tuple:
        return (self.group.kind, self.group.m, round(self.group.theta, 12),
                self.kind, round(self.eps, 12))

    # -- per-element data ---------------------------------------------------

    def _angle(self, g: Element) -> float:
        if self.group.kind == "cyclic":
            return TWO_PI * g / self.group.m
        return self.group.theta * g

    def diffeo(self, g: Element) -> CircleDiffeo:
        k = self.kind
        if k in ("trivial",):
            return CircleDiffeo.affine(1, 0.0, order=1)
        if k == "rotation":
            return CircleDiffeo.affine(1, self._angle(g), order=self.group.element_order(g))
        if k == "reflection":
            return CircleDiffeo.affine(-1 if g == 1 else 1, 0.0, order=2 if g == 1 else 1)
        if k == "dihedral":
            j, f = g
            return CircleDiffeo.affine(-1 if f else 1, TWO_PI * j / self.group.m,
                                       order=self.group.element_order(g))
        if k == "curved_rotation":
            if g == 0:
                return CircleDiffeo.affine(1, 0.0, order=1)
            return CircleDiffeo.conjugated_rotation(self._angle(g), self.eps,
                                                    order=self.group.element_order(g))
        raise InvalidParameter(f"half_wave has no underlying circle diffeomorphism")

    def canonical(self, g: Element) -> CanonicalTransform:
        if self.kind == "half_wave":
            return CanonicalTransform("halfwave", t=self.group.theta * g)
        return CanonicalTransform("diffeo", diffeo=self.diffeo(g))

    def at(self, window: FrequencyWindow) -> "Realization":
        return Realization(self, window)


class Realization:
    """A RealizationFamily instantiated on a fixed Fourier window; caches Phi_g."""

    def __init__(self, family: RealizationFamily, window: FrequencyWindow):
        if family.kind == "curved_rotation" and family.eps > 0:
            window.require(8)
        self.family = family
        self.group = family.group
        self.window = window
        self._cache: dict[Element, QuantizedTransform] = {}

    def canonical(self, g: Element) -> CanonicalTransform:
        return self.family.canonical(g)

    def phi(self, g: Element) -> QuantizedTransform:
        if g in self._cache:
            return self._cache[g]
        qt = self._build(g)
        self._cache[g] = qt
        return qt

    def phi_inv(self, g: Element) -> QuantizedTransform:
        """Phi_{g^{-1}} = Phi_g^{-1} (exactly for the isometric families)."""
        return self.phi(self.group.inv(g))

    def _build(self, g: Element) -> QuantizedTransform:
        fam, w = self.family, self.window
        k = fam.kind
        if g == self.group.identity:
            return QuantizedTransform(g, w, "identity", mode_map=ModeMap.identity(w))
        if k == "rotation":
            return QuantizedTransform(g, w, "rotation",
                                      mode_map=ModeMap.affine(w, 1, fam._angle(g)))
        if k == "reflection":
            return QuantizedTransform(g, w, "reflection", mode_map=ModeMap.affine(w, -1, 0.0))
        if k == "dihedral":
            j, f = g
            mm = ModeMap.affine(w, -1 if f else 1, TWO_PI * j / self.group.m)
            return QuantizedTransform(g, w, "reflection" if f else "rotation", mode_map=mm)
        if k == "half_wave":
            return QuantizedTransform(g, w, "half_wave",
                                      mode_map=ModeMap.half_wave(w, self.group.theta * g))
        if k == "curved_rotation":
            if fam.eps == 0.0:
                return QuantizedTransform(g, w, "rotation",
                                          mode_map=ModeMap.affine(w, 1, fam._angle(g)))
            diff = fam.diffeo(g)
            dense = weighted_shift_matrix(diff, w)
            defect = _inner_unitarity_defect(dense, w)
            return QuantizedTransform(g, w, "weighted_diffeo_shift",
                                      dense=dense, truncation_defect=defect)
        raise InvalidParameter(f"cannot quantize kind {k!r}")


def _inner_unitarity_defect(dense: np.ndarray, window: FrequencyWindow) -> float:
    """|| (Phi^H Phi - I) P_half ||_2, the recorded truncation defect."""
    mask = window.inner_mask(0.5)
    gram = dense.conj().T @ dense - np.eye(window.dim)
    return float(np.linalg.norm(gram[:, mask], 2))
