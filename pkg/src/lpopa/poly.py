"""Complex polynomial arithmetic, circle-root specifications and signed powers.

Polynomials are finite complex coefficient sequences indexed by degree, with
structural trailing zeros trimmed.  The zero polynomial has degree ``None``.
All arithmetic is exact in the coefficient model up to floating rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import InexactDivisionError

# Degree cap bounds memory in sweeps; anything larger is almost surely a bug.
MAX_DEGREE = 1 << 16

TWO_PI = 2.0 * math.pi


def signed_power(z: complex, s: float) -> complex:
    """The signed power r**s * exp(-i*theta) of z = r*exp(i*theta); 0 maps to 0.

    s = 1 is plain complex conjugation.  Computed from the modulus/argument
    decomposition; the negated-argument convention is not a holomorphic
    branch, so exp-of-log of the complex value would be wrong.
    """
    if s < 0:
        raise ValueError("signed power needs s >= 0")
    z = complex(z)
    if z == 0:
        return 0j
    theta = math.atan2(z.imag, z.real)
    return abs(z) ** s * complex(math.cos(theta), -math.sin(theta))


def signed_powers(values, s: float) -> np.ndarray:
    """Vectorized :func:`signed_power` over a complex array."""
    if s < 0:
        raise ValueError("signed power needs s >= 0")
    a = np.asarray(values, dtype=np.complex128)
    out = np.zeros_like(a)
    mask = a != 0
    am = a[mask]
    out[mask] = np.abs(am) ** s * np.exp(-1j * np.angle(am))
    return out


class Poly:
    """Immutable complex polynomial; ``coeffs[k]`` multiplies z**k."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1].copy() if nz.size else np.empty(0, dtype=np.complex128)
        if c.size > MAX_DEGREE + 1:
            raise ValueError(f"degree {c.size - 1} exceeds cap {MAX_DEGREE}")
        c.flags.writeable = False
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int | None:
        """Index of the last nonzero coefficient; None for the zero polynomial."""
        return None if self._c.size == 0 else self._c.size - 1

    @property
    def is_zero(self) -> bool:
        return self._c.size == 0

    def coeff(self, k: int) -> complex:
        """Coefficient of z**k (0 beyond the stored degree)."""
        if 0 <= k < self._c.size:
            return complex(self._c[k])
        return 0j

    def padded(self, length: int) -> np.ndarray:
        """Coefficients zero-padded (or identical) to the requested length."""
        if length < self._c.size:
            raise ValueError("padded length below polynomial size")
        out = np.zeros(length, dtype=np.complex128)
        out[: self._c.size] = self._c
        return out

    def __call__(self, z: complex) -> complex:
        val = 0j
        for c in self._c[::-1]:
            val = val * z + c
        return complex(val)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(self._c.size, other._c.size)
        return Poly(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        n = max(self._c.size, other._c.size)
        return Poly(self.padded(n) - other.padded(n))

    def __rsub__(self, other):
        return _as_poly(other).__sub__(self)

    def __neg__(self):
        return Poly(-self._c)

    def __mul__(self, other):
        if np.isscalar(other):
            return Poly(self._c * other)
        other = _as_poly(other)
        if self.is_zero or other.is_zero:
            return Poly()
        return Poly(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        if self.is_zero:
            return "Poly(0)"
        return f"Poly(degree={self.degree}, coeffs={np.array2string(self._c, precision=6)})"


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if np.isscalar(x):
        return Poly([x])
    return Poly(x)


ONE = Poly([1.0])


def monomial(k: int, c: complex = 1.0) -> Poly:
    """c * z**k."""
    coeffs = np.zeros(k + 1, dtype=np.complex128)
    coeffs[k] = c
    return Poly(coeffs)


def poly_divmod(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Long division num = q*den + r with deg r < deg den.

    The remainder is recomputed as num - q*den so it reflects the actual
    floating-point defect of the quotient.
    """
    if den.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero or num.degree < den.degree:
        return Poly(), num
    work = np.array(num.coeffs)
    dc = den.coeffs
    dd = den.degree
    lead = dc[-1]
    q = np.zeros(num.degree - dd + 1, dtype=np.complex128)
    for k in range(q.size - 1, -1, -1):
        q[k] = work[k + dd] / lead
        work[k: k + dd + 1] -= q[k] * dc
    quotient = Poly(q)
    return quotient, num - quotient * den


def _lstsq_div(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Division with the quotient chosen to minimize the remainder 2-norm.

    More stable than long division when the divisor's leading coefficient is
    small; for exactly divisible inputs the remainder is at rounding level
    regardless of root locations.
    """
    if den.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero or num.degree < den.degree:
        return Poly(), num
    cols = num.degree - den.degree + 1
    system = np.zeros((num.degree + 1, cols), dtype=np.complex128)
    for j in range(cols):
        system[j: j + den.degree + 1, j] = den.coeffs
    q = np.linalg.lstsq(system, num.coeffs, rcond=None)[0]
    quotient = Poly(q)
    return quotient, num - quotient * den


def exact_div(num: Poly, den: Poly, tol: float = 1e-9) -> Poly:
    """Quotient num/den, accepted only when the remainder is negligible.

    The remainder must satisfy max|r| <= tol * max|num| in the coefficient
    sup norm; otherwise InexactDivisionError is raised (a large remainder
    signals that den genuinely does not divide num).  Long division is tried
    first and the least-squares quotient is used as a fallback, so the check
    is robust to divisors with small leading coefficients.
    """
    scale = float(np.abs(num.coeffs).max()) if not num.is_zero else 0.0
    limit = tol * max(scale, 1e-300)
    q, r = poly_divmod(num, den)
    if r.is_zero or float(np.abs(r.coeffs).max()) <= limit:
        return q
    q2, r2 = _lstsq_div(num, den)
    if r2.is_zero or float(np.abs(r2.coeffs).max()) <= limit:
        return q2
    rmax = float(np.abs(r.coeffs).max())
    rel = rmax / max(scale, 1e-300)
    raise InexactDivisionError(
        f"remainder {rmax:.3e} exceeds {tol:.1e} * |num| (relative {rel:.3e})",
        remainder=r, relative=rel)


def eval_derivative(p: Poly, z0: complex, order: int = 0) -> complex:
    """Value of the order-th derivative at z0 (order 0 is plain evaluation)."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    c = p.coeffs
    if order >= c.size:
        return 0j
    d = np.array(c[order:])
    # falling factorial k! / (k - order)! for k = order, order+1, ...
    for i in range(1, order + 1):
        d *= np.arange(i, d.size + i)
    val = 0j
    for ck in d[::-1]:
        val = val * z0 + ck
    return complex(val)


@dataclass(frozen=True)
class CircleZeroSpec:
    """Zero set on the unit circle: (angle, multiplicity) pairs plus a leading coefficient.

    Roots are specified by angle so |z_i| = 1 holds by construction; a
    floating root value would drift off the circle.  Angles are normalized
    into [0, 2*pi) and must be pairwise distinct.
    """

    roots: tuple[tuple[float, int], ...]
    leading_coefficient: complex = 1.0 + 0j

    def __post_init__(self):
        norm = []
        for angle, mult in self.roots:
            if int(mult) != mult or mult < 1:
                raise ValueError("multiplicity must be a positive integer")
            norm.append((float(angle) % TWO_PI, int(mult)))
        if len({a for a, _ in norm}) != len(norm):
            raise ValueError("duplicate root angles")
        if complex(self.leading_coefficient) == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "roots", tuple(norm))
        object.__setattr__(self, "leading_coefficient", complex(self.leading_coefficient))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    @property
    def max_multiplicity(self) -> int:
        return max(m for _, m in self.roots)

    @property
    def simple(self) -> bool:
        return self.max_multiplicity == 1

    def points(self) -> np.ndarray:
        """The root values exp(i*theta_i) in spec order."""
        return np.exp(1j * np.array([a for a, _ in self.roots]))

    def with_simple_roots(self) -> "CircleZeroSpec":
        """Same zero set, all multiplicities reduced to 1, leading 1."""
        return CircleZeroSpec(tuple((a, 1) for a, _ in self.roots))


def expand(spec: CircleZeroSpec) -> Poly:
    """Coefficient expansion of leading * prod (z - exp(i*theta_i))**b_i."""
    c = np.array([spec.leading_coefficient], dtype=np.complex128)
    for angle, mult in spec.roots:
        root = complex(math.cos(angle), math.sin(angle))
        factor = np.array([-root, 1.0], dtype=np.complex128)
        for _ in range(mult):
            c = np.convolve(c, factor)
    return Poly(c)


_ANGLE_RE = re.compile(r"^([+-]?\d*\.?\d*)\s*pi\s*(?:/\s*(\d+\.?\d*))?$")


def parse_angle(text: str) -> float:
    """Parse an angle given as a rational multiple of pi, normalized to [0, 2*pi).

    Accepts forms like ``0``, ``pi``, ``2pi``, ``pi/2``, ``3pi/4``, ``-pi/3``,
    or a plain float literal.
    """
    s = text.strip().lower().replace(" ", "")
    m = _ANGLE_RE.match(s)
    if m:
        num = m.group(1)
        if num in ("", "+"):
            coeff = 1.0
        elif num == "-":
            coeff = -1.0
        else:
            coeff = float(num)
        angle = coeff * math.pi
        if m.group(2):
            angle /= float(m.group(2))
    else:
        try:
            angle = float(s)
        except ValueError:
            raise ValueError(f"cannot parse angle {text!r}") from None
    return angle % TWO_PI


def poly_from_config(spec: dict):
    """Build a problem polynomial from its JSON form.

    ``{"coeffs": [[re, im], ...]}`` yields a Poly;
    ``{"circle_roots": [{"angle": "pi/2", "mult": 2}, ...]}`` (with optional
    ``"leading": [re, im]``) yields a CircleZeroSpec.
    """
    if not isinstance(spec, dict):
        raise ValueError("polynomial config must be an object")
    if ("coeffs" in spec) == ("circle_roots" in spec):
        raise ValueError("exactly one of 'coeffs' or 'circle_roots' is required")
    if "coeffs" in spec:
        return Poly([complex(re_, im) for re_, im in spec["coeffs"]])
    roots = tuple((parse_angle(str(r["angle"])), int(r.get("mult", 1)))
                  for r in spec["circle_roots"])
    leading = spec.get("leading")
    lead = complex(leading[0], leading[1]) if leading is not None else 1.0 + 0j
    return CircleZeroSpec(roots, leading_coefficient=lead)
