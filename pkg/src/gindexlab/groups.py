"""Finite extensions of Z^d used as symmetry groups: trivial, cyclic, dihedral,
and the integer shift group, with conjugacy classes, torsion data, and the
integer homomorphism chi where it exists.

Element encodings (plain hashable values, no wrapper class):

* trivial:        ``()``
* cyclic(m):      ``j`` in ``0..m-1``          (r^j)
* dihedral(m):    ``(j, f)``, ``f in {0,1}``   (r^j s^f)
* integer_shift:  any ``int``                  (generator^n)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import InvalidParameter, UnsupportedGroup

Element = Any


@dataclass(frozen=True)
class GroupSpec:
    """A group given by kind + parameters with explicit multiplication."""

    kind: str                      # trivial | cyclic | dihedral | integer_shift
    m: int = 1                     # order parameter for cyclic/dihedral
    theta: float = 0.0             # shift angle for integer_shift

    def __post_init__(self):
        if self.kind not in ("trivial", "cyclic", "dihedral", "integer_shift"):
            raise InvalidParameter(f"unknown group kind {self.kind!r}")
        if self.kind in ("cyclic", "dihedral") and self.m < 1:
            raise InvalidParameter(f"{self.kind} requires m >= 1, got {self.m}")
        if self.kind == "integer_shift" and not (0.0 < self.theta < 2.0 * math.pi):
            raise InvalidParameter(f"integer_shift requires theta in (0, 2 pi), got {self.theta}")

    # -- structure ---------------------------------------------------------

    @property
    def identity(self) -> Element:
        return {"trivial": (), "cyclic": 0, "dihedral": (0, 0), "integer_shift": 0}[self.kind]

    @property
    def is_finite(self) -> bool:
        return self.kind != "integer_shift"

    @property
    def order(self) -> int | None:
        if self.kind == "trivial":
            return 1
        if self.kind == "cyclic":
            return self.m
        if self.kind == "dihedral":
            return 2 * self.m
        return None

    def elements(self) -> list[Element]:
        if self.kind == "trivial":
            return [()]
        if self.kind == "cyclic":
            return list(range(self.m))
        if self.kind == "dihedral":
            return [(j, f) for f in (0, 1) for j in range(self.m)]
        raise UnsupportedGroup("integer_shift has infinitely many elements")

    def mul(self, a: Element, b: Element) -> Element:
        if self.kind == "trivial":
            return ()
        if self.kind == "cyclic":
            return (a + b) % self.m
        if self.kind == "dihedral":
            j1, f1 = a
            j2, f2 = b
            return ((j1 + (j2 if f1 == 0 else -j2)) % self.m, (f1 + f2) % 2)
        return a + b

    def inv(self, a: Element) -> Element:
        if self.kind == "trivial":
            return ()
        if self.kind == "cyclic":
            return (-a) % self.m
        if self.kind == "dihedral":
            j, f = a
            return ((-j) % self.m, 0) if f == 0 else (j, 1)
        return -a

    def contains(self, a: Element) -> bool:
        if self.kind == "trivial":
            return a == ()
        if self.kind == "cyclic":
            return isinstance(a, int) and 0 <= a < self.m
        if self.kind == "dihedral":
            return (
                isinstance(a, tuple) and len(a) == 2
                and 0 <= a[0] < self.m and a[1] in (0, 1)
            )
        return isinstance(a, int)

    # -- conjugacy and torsion ----------------------------------------------

    def conjugacy_class(self, g: Element) -> tuple[Element, ...]:
        """The conjugacy class of g, sorted for determinism."""
        if self.kind == "integer_shift":
            return (g,)
        els = self.elements()
        cls = {self.mul(self.mul(x, g), self.inv(x)) for x in els}
        return tuple(sorted(cls, key=repr))

    def conjugacy_classes(self, support: Iterable[Element] | None = None) -> list[tuple[Element, ...]]:
        """Partition into conjugacy classes.

        Finite kinds: the full partition.  integer_shift: classes are
        singletons, so a finite ``support`` must be supplied.
        """
        if self.kind == "integer_shift":
            if support is None:
                raise UnsupportedGroup("integer_shift needs an explicit support")
            return [(g,) for g in sorted(set(support))]
        seen: set[Element] = set()
        classes = []
        for g in self.elements():
            if g in seen:
                continue
            cls = self.conjugacy_class(g)
            seen.update(cls)
            classes.append(cls)
        return classes

    def element_order(self, g: Element) -> int | None:
        """Order of g; None for infinite order."""
        if self.kind == "integer_shift":
            return 1 if g == 0 else None
        n, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            n += 1
        return n

    def is_torsion(self, g: Element) -> bool:
        return self.element_order(g) is not None

    def torsion_elements(self) -> list[Element]:
        if self.kind == "integer_shift":
            return [0]
        return self.elements()

    # -- the homomorphism chi: G -> Z ---------------------------------------

    def chi(self, g: Element) -> int:
        """Integer homomorphism: identity on integer_shift, zero otherwise."""
        if self.kind == "integer_shift":
            return g
        return 0

    @property
    def has_nonzero_chi(self) -> bool:
        return self.kind == "integer_shift"

    # -- labels for configs and reports ---------------------------------------

    def label(self, g: Element) -> str:
        if self.kind == "trivial":
            return "e"
        if self.kind == "cyclic":
            return "e" if g == 0 else ("r" if g == 1 else f"r{g}")
        if self.kind == "dihedral":
            j, f = g
            rot = "" if j == 0 else ("r" if j == 1 else f"r{j}")
            ref = "s" if f == 1 else ""
            return (rot + ref) or "e"
        return str(g)

    def parse(self, label: str) -> Element:
        label = label.strip()
        if self.kind == "integer_shift":
            try:
                return int(label)
            except ValueError as exc:
                raise InvalidParameter(f"bad integer_shift element {label!r}") from exc
        for g in self.elements():
            if self.label(g) == label:
                return g
        raise InvalidParameter(f"unknown element {label!r} for {self.kind} group")

    # -- sanity -----------------------------------------------------------------

    def check_axioms(self):
        """Exhaustive spot-check of the group axioms for finite kinds."""
        if not self.is_finite:
            # homomorphism property of chi on a sample
            for a in range(-3, 4):
                for b in range(-3, 4):
                    assert self.chi(self.mul(a, b)) == self.chi(a) + self.chi(b)
            return
        els = self.elements()
        e = self.identity
        for a in els:
            assert self.mul(a, e) == a and self.mul(e, a) == a
            assert self.mul(a, self.inv(a)) == e
            for b in els:
                ab = self.mul(a, b)
                assert self.contains(ab)
                for c in els:
                    assert self.mul(ab, c) == self.mul(a, self.mul(b, c))


def build_group(descriptor: dict | str, **params) -> GroupSpec:
    """Build a validated GroupSpec from a descriptor.

    Accepts either ``build_group({"kind": "cyclic", "m": 4})`` or
    ``build_group("cyclic", m=4)``.
    """
    if isinstance(descriptor, str):
        descriptor = {"kind": descriptor, **params}
    kind = descriptor.get("kind")
    if kind is None:
        raise InvalidParameter("group descriptor missing 'kind'")
    spec = GroupSpec(
        kind=kind,
        m=int(descriptor.get("m", 1)),
        theta=float(descriptor.get("theta", 1.0 if kind == "integer_shift" else 0.0)),
    )
    spec.check_axioms()
    return spec
