"""Positive bounded weight sequences with structured tails.

A weight sequence is a finite prefix followed by a structured tail:
constant, periodic, or two alternating values in blocks of doubling length.
The structure is what makes the asymptotic window quantities of the
associated shift operators available in closed form:

  r1 = lim_n sup_k (w_k ... w_{k+n-1})^{1/n}   (outer radius)
  r2 = lim_n inf_k (w_k ... w_{k+n-1})^{1/n}   (inner radius)
  r3 = liminf_n (w_1 ... w_n)^{1/n}            (leading-window radius)

All window products are accumulated in log space so that long windows never
overflow.  Values are immutable after construction and every operation here
is a pure function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

__all__ = [
    "ConstantTail",
    "PeriodicTail",
    "TwoValueDoublingBlocks",
    "WeightSequence",
    "SpectralProfile",
    "window_product",
    "log_window_product",
    "spectral_profile",
    "estimate_profile",
    "kappa_forward_power",
    "log_kappa_forward_power",
]


def _check_positive(values, what: str) -> None:
    for v in values:
        if not (float(v) > 0.0 and math.isfinite(float(v))):
            raise ValueError(f"{what} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class ConstantTail:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        _check_positive([self.value], "tail value")

    def to_dict(self) -> dict:
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True)
class PeriodicTail:
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("periodic tail needs at least one value")
        _check_positive(vals, "tail values")
        object.__setattr__(self, "values", vals)

    def to_dict(self) -> dict:
        return {"kind": "periodic", "values": list(self.values)}


@dataclass(frozen=True)
class TwoValueDoublingBlocks:
    """Alternating blocks of a's and b's with lengths 1, 2, 4, 8, ...

    The first block (length 1) holds ``a``.  Blocks of both values grow
    without bound, which makes the sup- and inf-window radii split:
    r1 = max(a, b) and r2 = min(a, b).
    """

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        _check_positive([self.a, self.b], "block values")

    def to_dict(self) -> dict:
        return {"kind": "blocks", "a": self.a, "b": self.b}


Tail = Union[ConstantTail, PeriodicTail, TwoValueDoublingBlocks]


def _tail_from_dict(d: dict) -> Tail:
    kind = d.get("kind")
    if kind == "constant":
        return ConstantTail(d["value"])
    if kind == "periodic":
        return PeriodicTail(tuple(d["values"]))
    if kind == "blocks":
        return TwoValueDoublingBlocks(d["a"], d["b"])
    raise ValueError(f"unknown tail kind {kind!r}")


@dataclass(frozen=True)
class WeightSequence:
    """Finite prefix plus structured tail; 1-based total index access."""

    prefix: tuple[float, ...]
    tail: Tail

    def __post_init__(self):
        pref = tuple(float(v) for v in self.prefix)
        _check_positive(pref, "prefix values")
        object.__setattr__(self, "prefix", pref)
        if not isinstance(self.tail, (ConstantTail, PeriodicTail, TwoValueDoublingBlocks)):
            raise TypeError(f"unsupported tail {self.tail!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c: float, prefix=()) -> "WeightSequence":
        return cls(tuple(prefix), ConstantTail(c))

    @classmethod
    def periodic(cls, values, prefix=()) -> "WeightSequence":
        return cls(tuple(prefix), PeriodicTail(tuple(values)))

    @classmethod
    def doubling_blocks(cls, a: float, b: float, prefix=()) -> "WeightSequence":
        return cls(tuple(prefix), TwoValueDoublingBlocks(a, b))

    # -- indexing ----------------------------------------------------------

    def value(self, k: int) -> float:
        """w_k for k >= 1; total and deterministic."""
        if k < 1:
            raise IndexError("weight index starts at 1")
        p = len(self.prefix)
        if k <= p:
            return self.prefix[k - 1]
        j = k - p  # 1-based position inside the tail
        t = self.tail
        if isinstance(t, ConstantTail):
            return t.value
        if isinstance(t, PeriodicTail):
            return t.values[(j - 1) % len(t.values)]
        block = j.bit_length() - 1  # block m spans positions 2^m .. 2^(m+1)-1
        return t.a if block % 2 == 0 else t.b

    def values_array(self, n: int) -> np.ndarray:
        """First n weights as a float array."""
        if n <= 0:
            return np.empty(0)
        p = len(self.prefix)
        out = np.empty(n)
        head = min(p, n)
        out[:head] = self.prefix[:head]
        m = n - head
        if m <= 0:
            return out
        t = self.tail
        if isinstance(t, ConstantTail):
            out[head:] = t.value
        elif isinstance(t, PeriodicTail):
            reps = -(-m // len(t.values))
            out[head:] = np.tile(np.asarray(t.values), reps)[:m]
        else:
            j = np.arange(1, m + 1, dtype=float)
            block = np.floor(np.log2(j)).astype(int)
            out[head:] = np.where(block % 2 == 0, t.a, t.b)
        return out

    def upper_bound(self) -> float:
        t = self.tail
        if isinstance(t, ConstantTail):
            tail_max = t.value
        elif isinstance(t, PeriodicTail):
            tail_max = max(t.values)
        else:
            tail_max = max(t.a, t.b)
        return max((*self.prefix, tail_max))

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {"prefix": list(self.prefix), "tail": self.tail.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "WeightSequence":
        return cls(tuple(d.get("prefix", ())), _tail_from_dict(d["tail"]))


@lru_cache(maxsize=128)
def _cumlogs_pow2(w: WeightSequence, n_pow2: int) -> np.ndarray:
    # entry i holds log(w_1 ... w_i); entry 0 is 0; treat as read-only
    out = np.empty(n_pow2 + 1)
    out[0] = 0.0
    np.cumsum(np.log(w.values_array(n_pow2)), out=out[1:])
    return out


def _cumlogs(w: WeightSequence, n: int) -> np.ndarray:
    size = 1 << max(6, int(n - 1).bit_length())
    return _cumlogs_pow2(w, size)


def _cumprods(w: WeightSequence, n: int) -> np.ndarray:
    # plain float products; exact for power-of-two weights, used where
    # round-trip identities must hold to the last bit
    out = np.empty(n + 1)
    out[0] = 1.0
    np.cumprod(w.values_array(n), out=out[1:])
    return out


def log_window_product(w: WeightSequence, k: int, n: int) -> float:
    """log(w_k * ... * w_{k+n-1}) for k, n >= 1."""
    if k < 1 or n < 1:
        raise ValueError("window indices must be >= 1")
    cs = _cumlogs(w, k + n - 1)
    return float(cs[k + n - 1] - cs[k - 1])


def window_product(w: WeightSequence, k: int, n: int) -> float:
    return math.exp(log_window_product(w, k, n))


def _log_windows(w: WeightSequence, n: int, k_max: int) -> np.ndarray:
    """log window products of length n for k = 1..k_max, vectorized."""
    cs = _cumlogs(w, k_max + n)
    return cs[n : n + k_max] - cs[:k_max]


def log_kappa_forward_power(w: WeightSequence, n: int) -> float:
    """log inf_k (w_k ... w_{k+n-1}); exact for every structured tail.

    Any window either overlaps the prefix (start k <= len(prefix)) or lies
    entirely in the tail, where the infimum has a closed form: the constant
    value, the minimum over the period phases, or min(a, b)^n for doubling
    blocks (blocks of the minimal value eventually exceed any window length,
    and mixed windows can only be larger).
    """
    if n < 1:
        raise ValueError("power must be >= 1")
    p = len(w.prefix)
    t = w.tail
    if isinstance(t, ConstantTail):
        scan_to = p + 1
        tail_inf = n * math.log(t.value)
    elif isinstance(t, PeriodicTail):
        scan_to = p + len(t.values)
        tail_inf = math.inf  # phases covered by the scan
    else:
        scan_to = p
        tail_inf = n * math.log(min(t.a, t.b))
    best = tail_inf
    if scan_to >= 1:
        best = min(best, float(_log_windows(w, n, scan_to).min()))
    return best


def kappa_forward_power(w: WeightSequence, n: int) -> float:
    """inf_k of the length-n window product (may overflow to inf for huge n)."""
    return math.exp(log_kappa_forward_power(w, n))


EXACT = "EXACT"
ESTIMATED = "ESTIMATED"


@dataclass(frozen=True)
class SpectralProfile:
    """The radii (r1, r2, r3) of a weight sequence with an exactness marker."""

    r1: float
    r2: float
    r3: float
    exactness: str = EXACT
    window_size: int | None = None
    spread: float | None = None

    def __post_init__(self):
        slack = 1e-9 * max(1.0, self.r1)
        if self.exactness == ESTIMATED and self.spread is not None:
            slack += 4.0 * self.spread
        if not (-slack <= self.r3 - self.r2 and -slack <= self.r1 - self.r3):
            raise ValueError(
                f"radius ordering violated: r2={self.r2} r3={self.r3} r1={self.r1}"
            )

    @property
    def exact(self) -> bool:
        return self.exactness == EXACT

    def to_dict(self) -> dict:
        d = {"r1": self.r1, "r2": self.r2, "r3": self.r3, "exactness": self.exactness}
        if not self.exact:
            d["windowSize"] = self.window_size
            d["spread"] = self.spread
        return d


def spectral_profile(w: WeightSequence) -> SpectralProfile:
    """Closed-form radii.

    A finite prefix contributes O(1) to every cumulative log sum, so it
    vanishes in all three n-th-root limits; only the tail matters.  For
    doubling blocks the leading-window radius comes from the running log
    mean at ends of minimal-value blocks, where the value split is exactly
    one third max-blocks, two thirds min-blocks.
    """
    t = w.tail
    if isinstance(t, ConstantTail):
        c = t.value
        return SpectralProfile(c, c, c)
    if isinstance(t, PeriodicTail):
        g = math.exp(sum(math.log(v) for v in t.values) / len(t.values))
        return SpectralProfile(g, g, g)
    hi, lo = max(t.a, t.b), min(t.a, t.b)
    r3 = math.exp(math.log(hi) / 3.0 + 2.0 * math.log(lo) / 3.0)
    return SpectralProfile(hi, lo, r3)


def estimate_profile(
    w: WeightSequence,
    n_max: int = 128,
    k_max: int = 4096,
    run_len: int = 4096,
) -> SpectralProfile:
    """Numeric window-sweep estimate of (r1, r2, r3).

    r1 is estimated as min over n of sup_k and r2 as max over n of inf_k of
    the n-th-root window means (both one-sided approximations of their
    limits), r3 as the minimum running mean over the last seven eighths of
    the run.  The spread between the half-budget and full-budget values is
    reported; a spread above the caller's tolerance signals non-convergence
    at this budget.
    """
    log_r1 = math.inf
    log_r2 = -math.inf
    log_r1_half = log_r2_half = None
    for n in range(1, n_max + 1):
        means = _log_windows(w, n, k_max) / n
        log_r1 = min(log_r1, float(means.max()))
        log_r2 = max(log_r2, float(means.min()))
        if n == n_max // 2:
            log_r1_half, log_r2_half = log_r1, log_r2

    cs = _cumlogs(w, run_len)
    running = cs[1 : run_len + 1] / np.arange(1, run_len + 1)
    log_r3 = float(running[run_len // 8 :].min())
    log_r3_half = float(running[run_len // 16 : run_len // 2].min())

    r1, r2 = math.exp(log_r1), math.exp(log_r2)
    r3 = math.exp(max(log_r2, min(log_r3, log_r1)))
    spread = max(
        abs(r1 - math.exp(log_r1_half)),
        abs(r2 - math.exp(log_r2_half)),
        abs(r3 - math.exp(log_r3_half)),
    )
    return SpectralProfile(
        r1, r2, r3, exactness=ESTIMATED, window_size=n_max, spread=float(spread)
    )
