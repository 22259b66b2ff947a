"""Periodic potentials on the line and the block-concatenation builder.

Every potential is an immutable value object: it knows its period, a cached
sup bound over one period, how to evaluate itself (with periodic extension),
and how to flatten itself into the segment table consumed by the propagation
kernel.  Construction helpers (`make_connector`, `concatenate_blocks`) build
the glued periodic potentials used by the thin-spectrum pipeline.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Potential",
    "Constant",
    "CosineSeries",
    "Samples",
    "CosinePerturbation",
    "Concatenation",
    "BlockLayout",
    "Connector",
    "ProgramTable",
    "ConstructionError",
    "make_connector",
    "concatenate_blocks",
    "from_json",
    "to_json",
    "load_potential",
]

TWO_PI = 2.0 * math.pi


class ConstructionError(ValueError):
    """A potential construction violated one of its preconditions."""


# ---------------------------------------------------------------------------
# segment table (kernel input)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProgramTable:
    """Flattened piecewise description of one period of a potential.

    Segment i covers [bounds[i], bounds[i+1]) in fundamental-domain
    coordinates and evaluates as

        c0[i] + c1[i]*u + sum_k amp[k]*cos(freq[k]*u + phase[k])

    over its harmonic slice hptr[i]:hptr[i+1], plus, for kind[i] == 1,
    linear interpolation of the sample slice sptr[i]:sptr[i+1] evaluated at
    (u - sref[i]) mod sper[i].  `spans` lists (start, sub_period, repeats)
    runs whose transfer matrix may be computed as a matrix power of a single
    sub-period propagation.
    """

    period: float
    bounds: np.ndarray      # float64[m+1]
    kind: np.ndarray        # int32[m]
    c0: np.ndarray          # float64[m]
    c1: np.ndarray          # float64[m]
    hptr: np.ndarray        # int32[m+1]
    hamp: np.ndarray        # float64[nh]
    hfreq: np.ndarray       # float64[nh]
    hphase: np.ndarray      # float64[nh]
    sptr: np.ndarray        # int32[m+1]
    sx: np.ndarray          # float64[ns]
    sv: np.ndarray          # float64[ns]
    sper: np.ndarray        # float64[m]
    sref: np.ndarray        # float64[m]
    span_start: np.ndarray  # float64[k]
    span_period: np.ndarray # float64[k]
    span_reps: np.ndarray   # int64[k]

    def eval(self, x):
        """Vectorised evaluation through the table (mirrors the kernel)."""
        x = np.asarray(x, dtype=float)
        u = np.mod(x, self.period)
        idx = np.clip(np.searchsorted(self.bounds, u, side="right") - 1,
                      0, len(self.kind) - 1)
        out = self.c0[idx] + self.c1[idx] * u
        flat_u = np.atleast_1d(u).ravel()
        flat_i = np.atleast_1d(idx).ravel()
        add = np.zeros_like(flat_u)
        for n, (ui, si) in enumerate(zip(flat_u, flat_i)):
            lo, hi = self.hptr[si], self.hptr[si + 1]
            if hi > lo:
                add[n] += np.sum(self.hamp[lo:hi]
                                 * np.cos(self.hfreq[lo:hi] * ui
                                          + self.hphase[lo:hi]))
            lo, hi = self.sptr[si], self.sptr[si + 1]
            if hi > lo:
                w = math.fmod(ui - self.sref[si], self.sper[si])
                if w < 0.0:
                    w += self.sper[si]
                add[n] += _interp_slice(self.sx[lo:hi], self.sv[lo:hi],
                                        self.sper[si], w)
        return (out + add.reshape(np.shape(out))) if out.shape else \
            float(out + add[0])


def _interp_slice(xs, vs, period, w):
    """Periodic linear interpolation of one sample slice at local w."""
    j = bisect.bisect_right(xs, w) - 1
    if j < 0:
        x0, x1 = xs[-1] - period, xs[0]
        v0, v1 = vs[-1], vs[0]
    elif j >= len(xs) - 1:
        x0, x1 = xs[-1], xs[0] + period
        v0, v1 = vs[-1], vs[0]
    else:
        x0, x1 = xs[j], xs[j + 1]
        v0, v1 = vs[j], vs[j + 1]
    if x1 == x0:
        return v0
    t = (w - x0) / (x1 - x0)
    return v0 + t * (v1 - v0)


@dataclass
class _SegDraft:
    lo: float
    hi: float
    c0: float = 0.0
    c1: float = 0.0
    harms: list = field(default_factory=list)   # (freq, amp, phase)
    samples: tuple | None = None                # (xs, vs, period, ref)


def _assemble(period: float, drafts: list[_SegDraft],
              spans: list[tuple[float, float, int]]) -> ProgramTable:
    drafts.sort(key=lambda s: s.lo)
    m = len(drafts)
    tol = 1e-9 * max(1.0, period)
    for d, nxt in zip(drafts, drafts[1:]):
        if abs(d.hi - nxt.lo) > tol:
            raise ConstructionError("segments do not tile the period")
    if abs(drafts[0].lo) > tol or abs(drafts[-1].hi - period) > tol:
        raise ConstructionError("segments do not cover [0, period]")
    bounds = np.empty(m + 1)
    kind = np.zeros(m, dtype=np.int32)
    c0 = np.empty(m)
    c1 = np.empty(m)
    hptr = np.zeros(m + 1, dtype=np.int32)
    sptr = np.zeros(m + 1, dtype=np.int32)
    sper = np.zeros(m)
    sref = np.zeros(m)
    hamp, hfreq, hphase = [], [], []
    sx, sv = [], []
    for i, d in enumerate(drafts):
        bounds[i] = d.lo
        c0[i], c1[i] = d.c0, d.c1
        for f, a, p in d.harms:
            if a != 0.0:
                hfreq.append(f)
                hamp.append(a)
                hphase.append(p)
        hptr[i + 1] = len(hamp)
        if d.samples is not None:
            xs, vs, sp, ref = d.samples
            kind[i] = 1
            sx.extend(xs)
            sv.extend(vs)
            sper[i] = sp
            sref[i] = ref
        sptr[i + 1] = len(sx)
    bounds[m] = period
    return ProgramTable(
        period=period,
        bounds=bounds,
        kind=kind,
        c0=c0,
        c1=c1,
        hptr=hptr,
        hamp=np.asarray(hamp, dtype=float),
        hfreq=np.asarray(hfreq, dtype=float),
        hphase=np.asarray(hphase, dtype=float),
        sptr=sptr,
        sx=np.asarray(sx, dtype=float),
        sv=np.asarray(sv, dtype=float),
        sper=sper,
        sref=sref,
        span_start=np.asarray([s[0] for s in spans], dtype=float),
        span_period=np.asarray([s[1] for s in spans], dtype=float),
        span_reps=np.asarray([s[2] for s in spans], dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# potential classes
# ---------------------------------------------------------------------------

class Potential:
    """Base class: a bounded continuous periodic function on the line."""

    period: float
    sup_bound: float

    # -- evaluation ---------------------------------------------------------

    def eval(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.eval(x)

    # -- algebra ------------------------------------------------------------

    def scale(self, lam: float) -> "Potential":
        """Coupling scaling: returns lam*V.  Rejects lam <= 0."""
        if not lam > 0.0:
            raise ValueError(f"coupling constant must be positive, got {lam}")
        return self._scaled(lam)

    def shift(self, c: float) -> "Potential":
        """Energy shift: V + c, so sigma(H_{V+c}) = sigma(H_V) + c."""
        return self._shifted(float(c))

    def _scaled(self, lam):
        raise NotImplementedError

    def _shifted(self, c):
        raise NotImplementedError

    # -- kernel interface ---------------------------------------------------

    def compile(self) -> ProgramTable:
        if getattr(self, "_table", None) is None:
            drafts: list[_SegDraft] = []
            self._emit(0.0, self.period, drafts)
            object.__setattr__(self, "_table",
                               _assemble(self.period, drafts, self._spans()))
        return self._table

    def _emit(self, a: float, b: float, out: list[_SegDraft]) -> None:
        """Append segment drafts covering absolute coordinates [a, b]."""
        raise NotImplementedError

    def _spans(self):
        return [(0.0, self.period, 1)]

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        raise NotImplementedError


def _frozen(cls):
    return dataclass(frozen=True, eq=False)(cls)


@_frozen
class Constant(Potential):
    """V == value everywhere; the period is a bookkeeping convention."""

    value: float
    period: float = 1.0
    _table: ProgramTable | None = field(default=None, repr=False, compare=False)

    @property
    def sup_bound(self):
        return abs(self.value)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.value)
        return out if out.shape else float(self.value)

    def _scaled(self, lam):
        return Constant(self.value * lam, self.period)

    def _shifted(self, c):
        return Constant(self.value + c, self.period)

    def _emit(self, a, b, out):
        out.append(_SegDraft(a, b, c0=self.value))

    def to_dict(self):
        return {"kind": "constant", "value": self.value, "period": self.period}


@_frozen
class CosineSeries(Potential):
    """V(x) = mean + sum_k coeffs[k-1] * cos(2 pi k x / period)."""

    period: float
    coeffs: tuple
    mean: float = 0.0
    _table: ProgramTable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.period > 0.0:
            raise ValueError("period must be positive")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def sup_bound(self):
        # safe over-estimate; exact sup needs a grid search
        return abs(self.mean) + sum(abs(c) for c in self.coeffs)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, float(self.mean))
        for k, a in enumerate(self.coeffs, start=1):
            if a != 0.0:
                out = out + a * np.cos(TWO_PI * k * x / self.period)
        return out if out.shape else float(out)

    def tightened_sup(self, n: int = 4096) -> float:
        """Grid-refined sup estimate (never used for lemma constants)."""
        xs = np.linspace(0.0, self.period, n, endpoint=False)
        return float(np.max(np.abs(self.eval(xs))))

    def _scaled(self, lam):
        return CosineSeries(self.period, tuple(lam * c for c in self.coeffs),
                            lam * self.mean)

    def _shifted(self, c):
        return CosineSeries(self.period, self.coeffs, self.mean + c)

    def _emit(self, a, b, out):
        harms = [(TWO_PI * k / self.period, c, 0.0)
                 for k, c in enumerate(self.coeffs, start=1) if c != 0.0]
        out.append(_SegDraft(a, b, c0=self.mean, harms=harms))

    def to_dict(self):
        return {"kind": "cosine_series", "period": self.period,
                "coeffs": list(self.coeffs), "mean": self.mean}


@_frozen
class Samples(Potential):
    """Piecewise-linear periodic interpolation of (xs, vs) on [0, period)."""

    period: float
    xs: tuple
    vs: tuple
    _table: ProgramTable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        vs = tuple(float(v) for v in self.vs)
        if len(xs) != len(vs) or len(xs) < 2:
            raise ValueError("need at least two samples with matching values")
        if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
            raise ValueError("sample abscissae must be strictly increasing")
        if xs[0] < 0.0 or xs[-1] >= self.period:
            raise ValueError("samples must lie in [0, period)")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "vs", vs)

    @property
    def sup_bound(self):
        return max(abs(v) for v in self.vs)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        u = np.mod(x, self.period)
        xs = np.asarray((self.xs[-1] - self.period,) + self.xs
                        + (self.xs[0] + self.period,))
        vs = np.asarray((self.vs[-1],) + self.vs + (self.vs[0],))
        out = np.interp(u, xs, vs)
        return out if out.shape else float(out)

    def _scaled(self, lam):
        return Samples(self.period, self.xs, tuple(lam * v for v in self.vs))

    def _shifted(self, c):
        return Samples(self.period, self.xs, tuple(v + c for v in self.vs))

    def _emit(self, a, b, out):
        out.append(_SegDraft(a, b, samples=(self.xs, self.vs, self.period, 0.0)))

    def to_dict(self):
        return {"kind": "samples", "period": self.period,
                "xs": list(self.xs), "vs": list(self.vs)}


@_frozen
class CosinePerturbation(Potential):
    """base + offset + sum of cos terms on a (super-)period of the base.

    `terms` is a tuple of (k, amp, phase) with frequencies 2 pi k / period.
    The period must be an integer multiple of the base period, which is how
    the gap-opening and cover-family perturbations promote a T-periodic
    potential to the T' = N'T viewpoint.
    """

    base: Potential
    period: float
    terms: tuple  # ((k, amp, phase), ...)
    offset: float = 0.0
    _table: ProgramTable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        ratio = self.period / self.base.period
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError("period must be an integer multiple of the base period")
        object.__setattr__(self, "terms",
                           tuple((int(k), float(a), float(p))
                                 for k, a, p in self.terms))

    @property
    def sup_bound(self):
        return (self.base.sup_bound + abs(self.offset)
                + sum(abs(a) for _, a, _ in self.terms))

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.base.eval(x), dtype=float) + self.offset
        for k, a, p in self.terms:
            if a != 0.0:
                out = out + a * np.cos(TWO_PI * k * x / self.period + p)
        return out if out.shape else float(out)

    def _scaled(self, lam):
        return CosinePerturbation(self.base.scale(lam), self.period,
                                  tuple((k, lam * a, p) for k, a, p in self.terms),
                                  lam * self.offset)

    def _shifted(self, c):
        return CosinePerturbation(self.base, self.period, self.terms,
                                  self.offset + c)

    def _emit(self, a, b, out):
        sub: list[_SegDraft] = []
        _emit_tiled(self.base, a, b, sub)
        extra = [(TWO_PI * k / self.period, amp, ph)
                 for k, amp, ph in self.terms if amp != 0.0]
        for seg in sub:
            seg.c0 += self.offset
            seg.harms.extend(extra)
        out.extend(sub)

    def to_dict(self):
        return {"kind": "cosine_add", "base": self.base.to_dict(),
                "period": self.period,
                "terms": [[k, a, p] for k, a, p in self.terms],
                "offset": self.offset}


def _emit_tiled(pot: Potential, a: float, b: float, out: list[_SegDraft]):
    """Emit `pot` over [a, b], tiling by its period when the span is longer.

    Tile boundaries must be commensurate with the potential's period (all
    construction anchors are), so formulas stay exact in absolute x.
    """
    P = pot.period
    if b - a <= P * (1.0 + 1e-12):
        pot._emit(a, b, out)
        return
    n0 = math.floor(a / P + 1e-9)
    x = a
    k = n0
    while x < b - 1e-12 * max(1.0, abs(b)):
        hi = min((k + 1) * P, b)
        sub: list[_SegDraft] = []
        pot._emit(0.0, min(hi - k * P, P), sub)
        off = k * P
        for seg in sub:
            lo_t, hi_t = seg.lo + off, seg.hi + off
            if hi_t <= x + 1e-15:
                continue
            # translate ramp/sample references into the tile
            out.append(_SegDraft(max(lo_t, x), min(hi_t, hi),
                                 c0=seg.c0 - seg.c1 * off, c1=seg.c1,
                                 harms=list(seg.harms),
                                 samples=None if seg.samples is None else
                                 (seg.samples[0], seg.samples[1],
                                  seg.samples[2], seg.samples[3] + off)))
        x = hi
        k += 1


# ---------------------------------------------------------------------------
# block layout / connectors / concatenation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockLayout:
    """Geometry of the block-concatenation: anchors s_j = j*(repeats+1)*T'."""

    block_period: float            # T'
    repeats: int                   # copies of each block (Ntilde + 1)
    blocks: tuple                  # (W_1, ..., W_l), each T'-periodic
    connector_width: float         # T'
    anchors: tuple                 # (s_0, ..., s_l)
    total_period: float            # Ttilde = N*T

    def __post_init__(self):
        Tp = self.block_period
        step = (self.repeats + 1) * Tp
        want = tuple(j * step for j in range(len(self.blocks) + 1))
        got = tuple(self.anchors)
        if len(got) != len(want) or any(
                abs(g - w) > 1e-9 * max(1.0, w) for g, w in zip(got, want)):
            raise ConstructionError(
                f"anchors must be s_j = j*(repeats+1)*block_period, got {got}")
        if self.total_period < got[-1] - 1e-9:
            raise ConstructionError("total_period smaller than the last anchor")
        for W in self.blocks:
            if abs(W.period - Tp) > 1e-9 * Tp:
                raise ConstructionError("every block must be block_period-periodic")

    @classmethod
    def build(cls, blocks, block_period, repeats, total_period):
        step = (repeats + 1) * block_period
        anchors = tuple(j * step for j in range(len(blocks) + 1))
        return cls(block_period=block_period, repeats=repeats,
                   blocks=tuple(blocks), connector_width=block_period,
                   anchors=anchors, total_period=total_period)

    def to_dict(self):
        return {"block_period": self.block_period, "repeats": self.repeats,
                "connector_width": self.connector_width,
                "anchors": list(self.anchors),
                "total_period": self.total_period}


@dataclass(frozen=True)
class Connector:
    """phi = base + linear ramp interpolating the endpoint mismatches."""

    a: float
    b: float
    d_left: float    # phi(a) - base(a)
    d_right: float   # phi(b) - base(b)

    def ramp(self, x):
        t = (np.asarray(x, dtype=float) - self.a) / (self.b - self.a)
        return self.d_left + t * (self.d_right - self.d_left)


def make_connector(left_value: float, right_value: float, base: Potential,
                   interval, epsilon: float) -> Connector:
    """Continuous bridge on [a, b] with prescribed endpoint values.

    Stays within epsilon of `base` in sup norm; endpoint mismatches at or
    above epsilon would break the construction and raise.
    """
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ConstructionError("connector interval must have positive length")
    d_left = float(left_value) - float(base.eval(a))
    d_right = float(right_value) - float(base.eval(b))
    if abs(d_left) >= epsilon or abs(d_right) >= epsilon:
        raise ConstructionError(
            f"connector endpoint mismatch ({d_left:.3g}, {d_right:.3g}) "
            f"not below epsilon={epsilon:.3g}")
    return Connector(a, b, d_left, d_right)


@_frozen
class Concatenation(Potential):
    """The glued T-tilde-periodic potential of the thin-spectrum pipeline."""

    layout: BlockLayout
    base: Potential
    epsilon: float
    connectors: tuple
    _table: ProgramTable | None = field(default=None, repr=False, compare=False)

    @property
    def period(self):
        return self.layout.total_period

    @property
    def sup_bound(self):
        return max(max(W.sup_bound for W in self.layout.blocks),
                   self.base.sup_bound + self.epsilon)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        u = np.atleast_1d(np.mod(x, self.period)).ravel()
        out = np.empty_like(u)
        L = self.layout
        step = (L.repeats + 1) * L.block_period
        for n, ui in enumerate(u):
            j = min(int(ui // step), len(L.blocks) - 1)
            if ui > L.anchors[j + 1] - L.connector_width - 1e-15:
                phi = self.connectors[j]
                out[n] = float(self.base.eval(ui)) + float(phi.ramp(ui))
            else:
                out[n] = float(L.blocks[j].eval(ui))
        out = out.reshape(shape)
        return out if shape else float(out)

    def _scaled(self, lam):
        L = self.layout
        new_layout = BlockLayout(L.block_period, L.repeats,
                                 tuple(W.scale(lam) for W in L.blocks),
                                 L.connector_width, L.anchors, L.total_period)
        new_conn = tuple(Connector(c.a, c.b, lam * c.d_left, lam * c.d_right)
                         for c in self.connectors)
        return Concatenation(new_layout, self.base.scale(lam),
                             lam * self.epsilon, new_conn)

    def _shifted(self, c):
        L = self.layout
        new_layout = BlockLayout(L.block_period, L.repeats,
                                 tuple(W.shift(c) for W in L.blocks),
                                 L.connector_width, L.anchors, L.total_period)
        return Concatenation(new_layout, self.base.shift(c),
                             self.epsilon, self.connectors)

    def _emit(self, a, b, out):
        if abs(a) > 1e-12 or abs(b - self.period) > 1e-9 * self.period:
            raise ConstructionError(
                "concatenations can only be emitted over a full period")
        L = self.layout
        for j, W in enumerate(L.blocks):
            lo = L.anchors[j]
            hi = L.anchors[j + 1] - L.connector_width
            _emit_tiled(W, lo, hi, out)
            phi = self.connectors[j]
            sub: list[_SegDraft] = []
            _emit_tiled(self.base, phi.a, phi.b, sub)
            slope = (phi.d_right - phi.d_left) / (phi.b - phi.a)
            for seg in sub:
                seg.c0 += phi.d_left - slope * phi.a
                seg.c1 += slope
            out.extend(sub)

    def _spans(self):
        L = self.layout
        spans = []
        for j in range(len(L.blocks)):
            lo = L.anchors[j]
            hi = L.anchors[j + 1] - L.connector_width
            spans.append((lo, L.block_period, L.repeats))
            phi = self.connectors[j]
            spans.append((phi.a, phi.b - phi.a, 1))
        return spans

    def to_dict(self):
        return {"kind": "concatenation", "layout": self.layout.to_dict(),
                "blocks": [W.to_dict() for W in self.layout.blocks],
                "base": self.base.to_dict(), "epsilon": self.epsilon}


def concatenate_blocks(layout: BlockLayout, base: Potential,
                       epsilon: float) -> Concatenation:
    """Glue the layout's blocks with base-hugging connectors.

    Returns the T-tilde-periodic potential equal to W_j on
    [s_{j-1}, s_j - T'], bridged by connectors on [s_j - T', s_j] (the last
    connector runs to the end of the period), continuous, and within epsilon
    of `base` in sup norm provided every block is.
    """
    L = layout
    blocks = L.blocks
    ell = len(blocks)
    if ell == 0:
        raise ConstructionError("need at least one block")
    for j, W in enumerate(blocks):
        d = _sup_distance(W, base)
        if d >= epsilon:
            raise ConstructionError(
                f"block {j} is not epsilon-close to the base "
                f"(sup distance {d:.3g} >= {epsilon:.3g})")
    connectors = []
    for j in range(ell):
        a = L.anchors[j + 1] - L.connector_width
        b = L.anchors[j + 1] if j < ell - 1 else L.total_period
        left = float(blocks[j].eval(a))
        nxt = blocks[j + 1] if j < ell - 1 else blocks[0]
        right = float(nxt.eval(b))
        connectors.append(make_connector(left, right, base, (a, b), epsilon))
    return Concatenation(layout=L, base=base, epsilon=epsilon,
                         connectors=tuple(connectors))


def _sup_distance(W: Potential, base: Potential, n: int = 2048) -> float:
    """Dense-grid sup distance over one block period."""
    xs = np.linspace(0.0, W.period, n, endpoint=False)
    return float(np.max(np.abs(np.asarray(W.eval(xs))
                               - np.asarray(base.eval(xs)))))


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------

def from_json(doc: dict) -> Potential:
    kind = doc.get("kind")
    if kind == "constant":
        return Constant(float(doc["value"]), float(doc.get("period", 1.0)))
    if kind == "cosine_series":
        return CosineSeries(float(doc["period"]),
                            tuple(doc.get("coeffs", ())),
                            float(doc.get("mean", 0.0)))
    if kind == "samples":
        return Samples(float(doc["period"]), tuple(doc["xs"]), tuple(doc["vs"]))
    if kind == "cosine_add":
        return CosinePerturbation(from_json(doc["base"]), float(doc["period"]),
                                  tuple((k, a, p) for k, a, p in doc["terms"]),
                                  float(doc.get("offset", 0.0)))
    if kind == "concatenation":
        base = from_json(doc["base"])
        lay = doc["layout"]
        blocks = tuple(from_json(b) for b in doc["blocks"])
        layout = BlockLayout(block_period=float(lay["block_period"]),
                             repeats=int(lay["repeats"]),
                             blocks=blocks,
                             connector_width=float(lay["connector_width"]),
                             anchors=tuple(lay["anchors"]),
                             total_period=float(lay["total_period"]))
        return concatenate_blocks(layout, base, float(doc["epsilon"]))
    raise ValueError(f"unknown potential kind {kind!r}")


def to_json(pot: Potential) -> str:
    return json.dumps(pot.to_dict())


def load_potential(path: str) -> Potential:
    with open(path) as fh:
        return from_json(json.load(fh))
