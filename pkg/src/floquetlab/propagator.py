"""Transfer and monodromy matrices of -y'' + Vy = Ey.

State convention: the vector is (y', y), and ``transfer_matrix(V, E, s, t)``
maps (y'(s), y(s)) to (y'(t), y(t)) along any solution; t < s integrates
backward rather than inverting.  Matrices carry an explicit power-of-two
exponent so deeply hyperbolic propagations stay representable; for ordinary
runs the exponent is zero and the entries are plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .potential import Potential

__all__ = ["SL2Matrix", "PropagationSettings", "PropagationError",
           "transfer_matrix", "monodromy", "monodromy_with_phase"]


class PropagationError(RuntimeError):
    """The adaptive step controller could not meet its tolerance."""


@dataclass(frozen=True)
class PropagationSettings:
    """Step-controller targets for the transfer-matrix integrator."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 1e9
    det_tol: float = 1e-9

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.max_step, self.det_tol) <= 0:
            raise ValueError("all propagation settings must be positive")


DEFAULT_SETTINGS = PropagationSettings()


@dataclass(frozen=True)
class SL2Matrix:
    """2x2 real matrix 2**exp2 * [[a, b], [c, d]] with determinant one.

    The raw determinant drift is kept (never corrected): it is the honesty
    metric for the integrator.
    """

    a: float
    b: float
    c: float
    d: float
    exp2: int = 0

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0, 0)

    @classmethod
    def from_array(cls, m, exp2=0):
        m = np.asarray(m, dtype=float).reshape(4)
        return cls(float(m[0]), float(m[1]), float(m[2]), float(m[3]),
                   int(exp2))

    # -- views ---------------------------------------------------------------

    def array(self) -> np.ndarray:
        """Dense 2x2 array; overflows to inf when exp2 is extreme."""
        s = math.ldexp(1.0, self.exp2) if self.exp2 else 1.0
        return np.array([[self.a * s, self.b * s], [self.c * s, self.d * s]])

    @property
    def mantissa(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return math.ldexp(self.a + self.d, self.exp2)

    def trace_scaled(self) -> tuple[float, int]:
        return self.a + self.d, self.exp2

    @property
    def det(self) -> float:
        """Actual determinant (== 1 up to integrator drift)."""
        return math.ldexp(self.a * self.d - self.b * self.c, 2 * self.exp2)

    @property
    def det_drift(self) -> float:
        return self.det - 1.0

    def norm(self) -> float:
        """Spectral norm (largest singular value)."""
        return math.ldexp(_spectral_norm(self.a, self.b, self.c, self.d),
                          self.exp2)

    def log_norm(self) -> float:
        """log of the spectral norm, safe for extreme exponents."""
        return (math.log(_spectral_norm(self.a, self.b, self.c, self.d))
                + self.exp2 * math.log(2.0))

    # -- algebra --------------------------------------------------------------

    def __matmul__(self, other: "SL2Matrix") -> "SL2Matrix":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        e = self.exp2 + other.exp2
        m = max(abs(a), abs(b), abs(c), abs(d))
        while m > 2.0 ** 500:
            a *= 2.0 ** -500
            b *= 2.0 ** -500
            c *= 2.0 ** -500
            d *= 2.0 ** -500
            m *= 2.0 ** -500
            e += 500
        return SL2Matrix(a, b, c, d, e)

    def inv(self) -> "SL2Matrix":
        """Inverse assuming det == 1 (exponent negated)."""
        return SL2Matrix(self.d, -self.b, -self.c, self.a, -self.exp2)

    def power(self, n: int) -> "SL2Matrix":
        if n < 0:
            return self.inv().power(-n)
        acc = SL2Matrix.identity()
        base = self
        while n:
            if n & 1:
                acc = base @ acc
            base = base @ base if n > 1 else base
            n >>= 1
        return acc

    def apply(self, vec) -> np.ndarray:
        v = np.asarray(vec, dtype=float)
        s = math.ldexp(1.0, self.exp2) if self.exp2 else 1.0
        return s * np.array([self.a * v[0] + self.b * v[1],
                             self.c * v[0] + self.d * v[1]])


def _spectral_norm(a, b, c, d):
    m = max(abs(a), abs(b), abs(c), abs(d))
    if m == 0.0:
        return 0.0
    a, b, c, d = a / m, b / m, c / m, d / m
    f = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = f * f - 4.0 * det * det
    if disc < 0.0:
        disc = 0.0
    return m * math.sqrt(0.5 * (f + math.sqrt(disc)))


def transfer_matrix(V: Potential, E: float, s: float, t: float,
                    settings: PropagationSettings = DEFAULT_SETTINGS) -> SL2Matrix:
    """A_E mapping solution data at s to solution data at t (t < s allowed)."""
    tbl = V.compile()
    m, exp2, _, status = _kernel.propagate(
        tbl, float(E), float(s), float(t), settings.rel_tol,
        settings.abs_tol, settings.max_step)
    if status != _kernel.STATUS_OK:
        raise PropagationError(
            f"step controller failed near x={s}..{t} at E={E}; "
            "loosen tolerances or reduce max_step")
    return SL2Matrix.from_array(m, exp2)


def monodromy(V: Potential, E: float, base: float = 0.0,
              settings: PropagationSettings = DEFAULT_SETTINGS) -> SL2Matrix:
    """Transfer matrix over one full period starting at `base`.

    The trace is independent of `base` (all monodromies are conjugate).
    base == 0 uses the span fast path (matrix powers over repeated blocks).
    """
    if base == 0.0:
        M, exp2, _, status = _kernel.monodromy_many(
            V.compile(), np.array([float(E)]), settings.rel_tol,
            settings.abs_tol, settings.max_step)
        if status[0] != _kernel.STATUS_OK:
            raise PropagationError(f"monodromy propagation failed at E={E}")
        return SL2Matrix.from_array(M[0], int(exp2[0]))
    return transfer_matrix(V, E, base, base + V.period, settings)


def monodromy_with_phase(V: Potential, E: float,
                         settings: PropagationSettings = DEFAULT_SETTINGS
                         ) -> tuple[SL2Matrix, float]:
    """Monodromy at base 0 plus the Pruefer phase swept over one period.

    The phase starts from the Dirichlet condition (y', y) = (1, 0); its
    value at the period counts solution zeros, which is what the band
    scanner uses to certify that no thin band slipped between grid points.
    """
    M, exp2, phi, status = _kernel.monodromy_many(
        V.compile(), np.array([float(E)]), settings.rel_tol,
        settings.abs_tol, settings.max_step, want_pruefer=True)
    if status[0] != _kernel.STATUS_OK:
        raise PropagationError(f"monodromy propagation failed at E={E}")
    return SL2Matrix.from_array(M[0], int(exp2[0])), float(phi[0])


def monodromy_batch(V: Potential, Es, want_pruefer: bool = False,
                    settings: PropagationSettings = DEFAULT_SETTINGS):
    """Vector version used by the band scanner; returns raw kernel output."""
    return _kernel.monodromy_many(V.compile(), np.asarray(Es, dtype=float),
                                  settings.rel_tol, settings.abs_tol,
                                  settings.max_step, want_pruefer)
