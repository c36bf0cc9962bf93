"""Admissible weight sequences for weighted analytic sequence spaces.

A weight is a sequence of positive reals w_0 = 1, w_1, w_2, ... subject to
two growth conditions: a doubling bound C^-1 w_k <= w_{k+t} <= C w_k for
0 <= t <= k+1, and consecutive ratios w_{k+1}/w_k -> 1.  Three kinds are
supported:

* ``power``:   w_k = (k+1)**alpha, the standard scale of spaces,
* ``table``:   explicit values plus a tail rule for indices past the table,
* ``dilated``: w_k = base_{stride*k}, used to reduce 1 - z^d problems to d = 1.

Both conditions are limits or all-k statements, so admissibility is checked
by sampling up to a configurable index rather than proven symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AdmissibilityError

DEFAULT_K_TEST = 4096

_TAIL_RULES = ("constant", "power")


@dataclass(frozen=True)
class Weight:
    """Immutable positive weight sequence with w_0 = 1.

    Use the :func:`power_weight`, :func:`table_weight` and :func:`dilate`
    constructors rather than instantiating directly.
    """

    kind: str
    alpha: float | None = None
    values_table: tuple[float, ...] | None = None
    tail: str = "constant"
    base: "Weight | None" = None
    stride: int = 1
    declared_doubling: float | None = field(default=None, compare=False)

    def at_indices(self, idx) -> np.ndarray:
        """Weight values at an integer index array (vectorized)."""
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size and idx.min() < 0:
            raise ValueError("weight index must be >= 0")
        if self.kind == "power":
            return (idx + 1.0) ** self.alpha
        if self.kind == "dilated":
            return self.base.at_indices(idx * self.stride)
        vals = np.asarray(self.values_table, dtype=float)
        length = len(vals)
        out = np.empty(idx.shape, dtype=float)
        inside = idx < length
        out[inside] = vals[idx[inside]]
        if not inside.all():
            k = idx[~inside]
            if self.tail == "constant":
                out[~inside] = vals[-1]
            else:
                out[~inside] = vals[-1] * ((k + 1.0) / length) ** self._tail_alpha()
        return out

    def _tail_alpha(self) -> float:
        vals = self.values_table
        length = len(vals)
        return math.log(vals[-1] / vals[-2]) / math.log(length / (length - 1))

    def at(self, k: int) -> float:
        return float(self.at_indices(np.array([k]))[0])

    def values_up_to(self, last_index: int) -> np.ndarray:
        """Values w_0 .. w_last as an array of length last_index + 1."""
        return self.at_indices(np.arange(last_index + 1))

    @property
    def doubling_constant(self) -> float:
        return doubling_constant_for(self)

    def pointwise_power(self, exponent: float) -> "Weight":
        """The weight k -> w_k**exponent (w_0 stays 1)."""
        if self.kind == "power":
            return power_weight(self.alpha * exponent)
        if self.kind == "dilated":
            return Weight(kind="dilated", base=self.base.pointwise_power(exponent),
                          stride=self.stride)
        vals = tuple(v ** exponent for v in self.values_table)
        return Weight(kind="table", values_table=vals, tail=self.tail)

    def __repr__(self) -> str:
        if self.kind == "power":
            return f"Weight(power, alpha={self.alpha})"
        if self.kind == "dilated":
            return f"Weight(dilated, stride={self.stride}, base={self.base!r})"
        return f"Weight(table, len={len(self.values_table)}, tail={self.tail!r})"


def power_weight(alpha: float) -> Weight:
    """The weight w_k = (k+1)**alpha."""
    return Weight(kind="power", alpha=float(alpha))


def table_weight(values, tail: str = "constant",
                 declared_doubling: float | None = None) -> Weight:
    """Weight from explicit values with a tail rule past the table.

    ``tail="constant"`` freezes the last value; ``tail="power"`` extrapolates
    with the exponent implied by the last two values (needs >= 2 entries).
    An optional declared doubling constant is validated lazily by
    :func:`doubling_constant_for`.
    """
    vals = tuple(float(v) for v in values)
    if not vals:
        raise ValueError("table weight needs at least one value")
    if any(v <= 0 for v in vals):
        raise ValueError("weight values must be strictly positive")
    if abs(vals[0] - 1.0) > 1e-12:
        raise ValueError("weight must start at w_0 = 1")
    if tail not in _TAIL_RULES:
        raise ValueError(f"unknown tail rule {tail!r}; expected one of {_TAIL_RULES}")
    if tail == "power" and len(vals) < 2:
        raise ValueError("power tail needs at least two table values")
    if declared_doubling is not None and declared_doubling <= 0:
        raise ValueError("doubling constant must be positive")
    return Weight(kind="table", values_table=vals, tail=tail,
                  declared_doubling=declared_doubling)


def weight_at(w: Weight, k: int) -> float:
    """Value w_k (total for k >= 0)."""
    return w.at(k)


def dilate(w: Weight, d: int) -> Weight:
    """The dilated weight t -> w_{d t}.  Note w~_0 = w_0 = 1 automatically."""
    if d < 1:
        raise ValueError("dilation factor must be a positive integer")
    if d == 1:
        return w
    if w.kind == "dilated":
        return Weight(kind="dilated", base=w.base, stride=w.stride * d)
    return Weight(kind="dilated", base=w, stride=d)


def _empirical_doubling(w: Weight, k_max: int) -> float:
    """Max over k <= k_max, 0 <= t <= k+1 of the two-sided ratio w_{k+t}/w_k."""
    vals = w.values_up_to(2 * k_max + 1)
    worst = 1.0
    for k in range(k_max + 1):
        window = vals[k:2 * k + 2]
        hi = window.max() / vals[k]
        lo = vals[k] / window.min()
        worst = max(worst, hi, lo)
    return worst


@lru_cache(maxsize=256)
def _doubling_cached(w: Weight) -> float:
    if w.kind == "power":
        return 2.0 ** abs(w.alpha)
    if w.kind == "table":
        k_max = max(256, 2 * len(w.values_table))
    else:
        k_max = 512
    empirical = _empirical_doubling(w, k_max)
    if w.declared_doubling is not None and empirical > w.declared_doubling * (1 + 1e-12):
        raise AdmissibilityError(
            f"weight violates its declared doubling constant "
            f"{w.declared_doubling} on the explicit range (observed {empirical:.6g})")
    return w.declared_doubling if w.declared_doubling is not None else empirical


def doubling_constant_for(w: Weight) -> float:
    """A valid doubling constant C for the weight.

    Power weights get the sharp 2**|alpha|; table and dilated weights get the
    empirical maximum over their explicit / sampled range.  A table weight
    whose values violate its declared constant raises AdmissibilityError.
    """
    return _doubling_cached(w)


def verify_admissibility(w: Weight, k_test: int = DEFAULT_K_TEST) -> dict:
    """Sampled check of the two weight conditions up to index ``k_test``.

    Checks positivity, w_0 = 1, the doubling bound against
    ``doubling_constant_for(w)`` (indices k <= 1024 exhaustively, then a
    geometric subsample), and that the consecutive-ratio deviation
    |w_{k+1}/w_k - 1| is small near k_test and not growing along a geometric
    tail.  Raises AdmissibilityError on failure; returns diagnostics on
    success.  The cutoff is configurable because the ratio condition is a
    limit and no finite check can certify it.
    """
    if k_test < 16:
        raise ValueError("k_test too small to be meaningful")
    vals = w.values_up_to(2 * k_test + 1)
    if vals.min() <= 0 or not np.isfinite(vals).all():
        raise AdmissibilityError("weight values must be finite and positive")
    if abs(vals[0] - 1.0) > 1e-12:
        raise AdmissibilityError("w_0 must equal 1")

    c = doubling_constant_for(w)
    slack = 1 + 1e-12
    ks = list(range(min(k_test, 1024) + 1))
    k = 1024
    while k < k_test:
        k = min(2 * k, k_test)
        ks.append(k)
    worst = 0.0
    for k in ks:
        window = vals[k:2 * k + 2]
        hi = window.max() / vals[k]
        lo = vals[k] / window.min()
        worst = max(worst, hi, lo)
        if hi > c * slack or lo > c * slack:
            raise AdmissibilityError(
                f"doubling bound violated at k={k}: ratio {max(hi, lo):.6g} > C={c:.6g}")

    def ratio_dev(k0: int) -> float:
        lo, hi = max(1, k0 // 2), k0
        r = vals[lo + 1:hi + 1] / vals[lo:hi]
        return float(np.abs(r - 1).max())

    dev_mid = ratio_dev(k_test // 4)
    dev_end = ratio_dev(k_test)
    if dev_end > 0.2:
        raise AdmissibilityError(
            f"consecutive ratios stay {dev_end:.3g} away from 1 near k={k_test}")
    if dev_end > dev_mid * 1.1 + 1e-12:
        raise AdmissibilityError(
            f"consecutive-ratio deviation grows along the tail "
            f"({dev_mid:.3g} -> {dev_end:.3g}); limit condition looks violated")
    return {"doubling_constant": c, "max_doubling_ratio": worst,
            "ratio_dev_mid": dev_mid, "ratio_dev_end": dev_end, "k_test": k_test}


def weight_from_config(spec: dict) -> Weight:
    """Build a weight from its JSON form.

    ``{"kind": "power", "alpha": 0.5}`` or
    ``{"kind": "table", "values": [...], "tail": "power"}`` with an optional
    ``"doubling_constant"`` entry for table weights.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("weight config must be an object with a 'kind' entry")
    kind = spec["kind"]
    if kind == "power":
        return power_weight(float(spec["alpha"]))
    if kind == "table":
        return table_weight(spec["values"], tail=spec.get("tail", "constant"),
                            declared_doubling=spec.get("doubling_constant"))
    raise ValueError(f"unknown weight kind {kind!r}")
