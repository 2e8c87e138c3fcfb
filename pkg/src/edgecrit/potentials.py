"""Real polynomial potentials and the two-parameter deformation family.

Coefficients are stored as exact rationals (ascending degree) so that all
downstream polynomial algebra (derivatives, Laurent expansions, endpoint
data) is exact; conversion to floating point happens only at evaluation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ConfigError

CoeffLike = Union[int, str, float, Fraction]


def _to_fraction(c: CoeffLike) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)  # exact binary value; callers wanting decimals pass strings
    raise ConfigError(f"cannot interpret polynomial coefficient {c!r}")


class Polynomial:
    """Real polynomial with exact rational coefficients, ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[CoeffLike]):
        cs = [_to_fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    # -- basic queries ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __repr__(self) -> str:
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # -- evaluation ------------------------------------------------------

    def __call__(self, x):
        """Horner evaluation; works for float, Fraction, mpmath, complex."""
        acc = 0 * x + 0  # promote to x's type
        for c in reversed(self.coeffs):
            if isinstance(x, float):
                acc = acc * x + float(c)
            else:
                acc = acc * x + c
        return acc

    def eval_exact(self, x: CoeffLike) -> Fraction:
        xf = _to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * xf + c
        return acc

    def float_coeffs(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    # -- algebra ---------------------------------------------------------

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0])
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    def scale(self, c: CoeffLike) -> "Polynomial":
        cf = _to_fraction(c)
        return Polynomial([cf * a for a in self.coeffs])

    def shift(self, c: CoeffLike) -> "Polynomial":
        """Taylor shift: returns q with q(w) = p(w + c), exact."""
        cf = _to_fraction(c)
        # synthetic division repeated: coefficients of p(w+c)
        cs = list(self.coeffs)
        n = len(cs)
        out = [Fraction(0)] * n
        for k in range(n):
            # Horner at w + c, collecting Taylor coefficients
            acc = Fraction(0)
            for j in range(n - 1, k - 1, -1):
                acc = acc * cf + cs[j] * _binom(j, k)
            out[k] = acc
        return Polynomial(out)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, arr: Sequence[CoeffLike]) -> "Polynomial":
        return cls(arr)


def _binom(n: int, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return out


class DeformedFamily:
    """Deformation family v0 + s*v1 + t*v2 of a base potential.

    The base potential must have even degree >= 4 with positive leading
    coefficient; this guarantees the weight e^{-n(v0+s v1+t v2)} stays
    confining for small (s, t) and is a necessary condition for a
    5/2-vanishing edge in the polynomial class.
    """

    __slots__ = ("v0", "v1", "v2", "confinement_checked")

    def __init__(self, v0: Polynomial, v1: Polynomial, v2: Polynomial,
                 check_confinement: bool = True):
        if check_confinement:
            deg = v0.degree
            if deg < 4 or deg % 2 != 0 or v0.coeffs[-1] <= 0:
                raise ConfigError(
                    "base potential must have even degree >= 4 with positive "
                    f"leading coefficient, got degree {deg} with leading "
                    f"coefficient {v0.coeffs[-1]}")
        self.v0 = v0
        self.v1 = v1
        self.v2 = v2
        self.confinement_checked = check_confinement

    def eval(self, s: float, t: float, x):
        return self.v0(x) + s * self.v1(x) + t * self.v2(x)

    def eval_prime(self, s: float, t: float, x):
        return (self.v0.derivative()(x) + s * self.v1.derivative()(x)
                + t * self.v2.derivative()(x))

    def combined(self, s: CoeffLike, t: CoeffLike) -> Polynomial:
        """Exact combined polynomial v0 + s v1 + t v2 (s, t as exact values)."""
        return self.v0 + self.v1.scale(s) + self.v2.scale(t)

    def to_json(self) -> dict:
        return {"v0": self.v0.to_json(), "v1": self.v1.to_json(),
                "v2": self.v2.to_json()}

    @classmethod
    def from_json(cls, obj: dict, check_confinement: bool = True) -> "DeformedFamily":
        unknown = set(obj) - {"v0", "v1", "v2"}
        if unknown:
            raise ConfigError(f"unknown family keys: {sorted(unknown)}")
        return cls(Polynomial.from_json(obj["v0"]),
                   Polynomial.from_json(obj.get("v1", [0])),
                   Polynomial.from_json(obj.get("v2", [0])),
                   check_confinement=check_confinement)


def build_example_family() -> DeformedFamily:
    """Quartic family with a 5/2-vanishing right edge at x = 2.

    v0(x) = x^4/20 - 4x^3/15 + x^2/5 + 8x/5, v1(x) = x, v2(x) = x^3 - 6x.
    """
    v0 = Polynomial([0, Fraction(8, 5), Fraction(1, 5), Fraction(-4, 15), Fraction(1, 20)])
    v1 = Polynomial([0, 1])
    v2 = Polynomial([0, -6, 0, 1])
    return DeformedFamily(v0, v1, v2)


def eval_deformed(f: DeformedFamily, s: float, t: float, x: float) -> float:
    """Value of the deformed potential at x."""
    return f.eval(s, t, x)


def eval_deformed_prime(f: DeformedFamily, s: float, t: float, x: float) -> float:
    """Derivative of the deformed potential at x."""
    return f.eval_prime(s, t, x)
