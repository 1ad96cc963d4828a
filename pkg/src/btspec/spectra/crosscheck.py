"""Monodromy versus strip: agreement modulo i g."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .branches import band_distance


@dataclass
class InvarianceReport:
    pairs: list = field(default_factory=list)   # (strip index, monodromy index, distance)
    max_mismatch: float = 0.0
    dominant_mismatch: float = math.nan          # dominant monodromy value to nearest strip value
    reference: float = math.nan                  # |lambda| of the dominant monodromy value
    tol: float = 0.0

    @property
    def relative_mismatch(self) -> float:
        if not self.pairs or not self.reference:
            return math.nan
        return self.dominant_mismatch / self.reference

    @property
    def passed(self) -> bool:
        return bool(self.pairs) and self.relative_mismatch <= self.tol


def pseudo_invariance_check(mono, strip, g: float, tol: float) -> InvarianceReport:
    """Pair each strip value with the nearest monodromy value modulo ``i g``.

    ``mono`` and ``strip`` are lists of branch values (complex numbers or
    objects with a ``lam`` attribute). The dominant monodromy value is the
    one with the smallest real part; ``tol`` is relative to its modulus.
    """
    m = [complex(getattr(x, "lam", x)) for x in mono]
    s = [complex(getattr(x, "lam", x)) for x in strip]
    rep = InvarianceReport(tol=tol)
    if not m or not s:
        return rep
    for i, z in enumerate(s):
        j = min(range(len(m)), key=lambda k: band_distance(z, m[k], g))
        rep.pairs.append((i, j, band_distance(z, m[j], g)))
    rep.max_mismatch = max(d for _, _, d in rep.pairs)
    dom = min(m, key=lambda z: (z.real, abs(z.imag)))
    rep.dominant_mismatch = min(band_distance(dom, z, g) for z in s)
    rep.reference = abs(dom)
    return rep
