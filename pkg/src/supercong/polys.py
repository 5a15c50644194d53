"""Dense exact univariate arithmetic: Laurent polynomials, rational
functions, and quotient-ring residues.

Coefficients are duck typed over an exact field.  Plain ``fractions.Fraction``
coefficients cover the rational lane; ``paramfield.ParamRational`` coefficients
cover the fraction-field lane over Q(a).  The integers 0 and 1 act as the
additive and multiplicative identities for either coefficient type, which
keeps one implementation serving both lanes.

Polynomials are immutable after construction and safe to share across
workers.  Storage is dense: every modulus in this project has degree below
roughly three times the largest checked index, where dense wins on
simplicity.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class NonUnitDenominator(ArithmeticError):
    """A denominator shares a factor with the modulus.

    Raised by residue reduction when the congruence under check is not
    well posed at this modulus.  Carries the offending gcd so callers can
    report the obstruction rather than silently skipping it.
    """

    def __init__(self, gcd: "LaurentPoly"):
        super().__init__(f"denominator shares factor {gcd} with the modulus")
        self.gcd = gcd


class LaurentPoly:
    """c_0 q^low + c_1 q^(low+1) + ... with exact field coefficients.

    Invariants: the first and last stored coefficients are nonzero unless
    the polynomial is zero; the zero polynomial stores no coefficients and
    has ``low == 0``.
    """

    __slots__ = ("low", "coeffs")

    def __init__(self, coeffs: Iterable = (), low: int = 0):
        coeffs = list(coeffs)
        lead = len(coeffs)
        while lead and coeffs[lead - 1] == 0:
            lead -= 1
        del coeffs[lead:]
        trail = 0
        while trail < len(coeffs) and coeffs[trail] == 0:
            trail += 1
        if trail:
            coeffs = coeffs[trail:]
            low += trail
        self.low = low if coeffs else 0
        self.coeffs = tuple(coeffs)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls((Fraction(1),))

    @classmethod
    def monomial(cls, coeff, exponent: int = 0) -> "LaurentPoly":
        return cls((coeff,), exponent)

    @classmethod
    def from_int_coeffs(cls, coeffs: Sequence[int], low: int = 0) -> "LaurentPoly":
        return cls([Fraction(c) for c in coeffs], low)

    # -- structure ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Top exponent.  Undefined (raises) for the zero polynomial."""
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return self.low + len(self.coeffs) - 1

    @property
    def span(self) -> int:
        """Degree spread: top exponent minus bottom exponent; -1 for zero."""
        return len(self.coeffs) - 1

    @property
    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coefficient(self, exponent: int):
        i = exponent - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def poly_part(self) -> "LaurentPoly":
        """The same coefficients anchored at exponent 0."""
        return LaurentPoly(self.coeffs, 0)

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by q^k."""
        if self.is_zero:
            return self
        return LaurentPoly(self.coeffs, self.low + k)

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        low = min(self.low, other.low)
        top = max(self.low + len(self.coeffs), other.low + len(other.coeffs))
        out = [0] * (top - low)
        for i, c in enumerate(self.coeffs):
            out[self.low - low + i] = c
        for i, c in enumerate(other.coeffs):
            out[other.low - low + i] = out[other.low - low + i] + c
        return LaurentPoly(out, low)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly([-c for c in self.coeffs], self.low)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            if self.is_zero or other.is_zero:
                return LaurentPoly()
            out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return LaurentPoly(out, self.low + other.low)
        # scalar from the coefficient field
        return LaurentPoly([c * other for c in self.coeffs], self.low)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "LaurentPoly":
        return LaurentPoly([a * c for a in self.coeffs], self.low)

    def monic(self) -> "LaurentPoly":
        if self.is_zero:
            return self
        lead = self.leading
        if lead == 1:
            return self
        return LaurentPoly([c / lead for c in self.coeffs], self.low)

    def __call__(self, x):
        """Evaluate at a scalar (Horner on the polynomial part)."""
        if self.is_zero:
            return 0
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if self.low:
            acc = acc * x ** self.low
        return acc

    # -- comparisons ----------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.low == other.low and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.is_zero
            return self.low == 0 and len(self.coeffs) == 1 and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        return hash((self.low, self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            text = str(c)
            if " " in text or "/" in text:
                text = f"({text})"
            e = self.low + i
            if e == 0:
                parts.append(text)
            elif e == 1:
                parts.append(f"{text}*q")
            else:
                parts.append(f"{text}*q^{e}")
        return " + ".join(parts)


def poly_divrem(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Division with remainder: a = q*b + r, r zero or span(r) < span(b).

    Plain inputs divide classically.  For Laurent inputs, b's monomial
    content (a unit) moves into the quotient and any remaining negative
    anchor of a is factored out front, so reconstruction a = q*b + r is
    exact over the coefficient field either way.
    """
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    if a.is_zero:
        return LaurentPoly(), LaurentPoly()
    beta = b.low
    div = b.coeffs
    anchor = min(a.low - beta, 0)
    offset = a.low - beta - anchor
    rem = [0] * offset + list(a.coeffs)
    lead = div[-1]
    n, m = len(rem), len(div)
    if n < m:
        return LaurentPoly(), a
    quo = [0] * (n - m + 1)
    for i in range(n - m, -1, -1):
        c = rem[i + m - 1]
        if c == 0:
            continue
        factor = c / lead
        quo[i] = factor
        for j in range(m):
            rem[i + j] = rem[i + j] - factor * div[j]
    return (
        LaurentPoly(quo, anchor),
        LaurentPoly(rem[: m - 1], anchor + beta),
    )


def _has_field_extension_coeffs(p: LaurentPoly) -> bool:
    return any(not isinstance(c, (int, Fraction)) for c in p.coeffs)


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Monic gcd of the polynomial parts (q is a unit, so monomial content
    is ignored).

    Fraction coefficients run the plain Euclidean algorithm; Q(a)
    coefficients are routed through the primitive pseudo-remainder sequence
    (the fraction-field Euclid swells catastrophically there).
    """
    if a.is_zero and b.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    if _has_field_extension_coeffs(a) or _has_field_extension_coeffs(b):
        from .paramfield import param_poly_gcd

        return param_poly_gcd(a, b)
    x, y = a.poly_part(), b.poly_part()
    while not y.is_zero:
        _, r = poly_divrem(x, y)
        x, y = y, r.poly_part()
    return x.monic()


def poly_gcdex(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly, LaurentPoly]:
    """Extended Euclid on plain polynomials: returns (g, u, v) with
    u*a + v*b = g and g monic."""
    if a.low < 0 or b.low < 0:
        raise ValueError("extended gcd expects plain polynomials")
    r0, r1 = a, b
    u0, u1 = LaurentPoly.one(), LaurentPoly.zero()
    v0, v1 = LaurentPoly.zero(), LaurentPoly.one()
    while not r1.is_zero:
        q, r = poly_divrem(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if r0.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    lead = r0.leading
    inv = 1 / lead if not isinstance(lead, Fraction) else Fraction(1) / lead
    return r0.scale(inv), u0.scale(inv), v0.scale(inv)


class RationalFunction:
    """Reduced quotient of Laurent polynomials.

    Normal form: den is a plain polynomial (lowest exponent 0) with leading
    coefficient 1, gcd(num, den) = 1, and all monomial content lives in num.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly = None, *, reduce: bool = True):
        if den is None:
            den = LaurentPoly.one()
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            self.num = LaurentPoly()
            self.den = LaurentPoly.one()
            return
        num = num.shift(-den.low)
        den = den.poly_part()
        if reduce and den.span > 0:
            g = poly_gcd(num, den)
            if g.span > 0:
                num, num_r = poly_divrem(num, g)
                den, den_r = poly_divrem(den, g)
                assert num_r.is_zero and den_r.is_zero
        lead = den.leading
        if lead != 1:
            num = num.scale(1 / lead if not isinstance(lead, Fraction) else Fraction(1) / lead)
            den = den.monic()
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "RationalFunction":
        return cls(p, LaurentPoly.one(), reduce=False)

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls(LaurentPoly(), LaurentPoly.one(), reduce=False)

    @classmethod
    def one(cls) -> "RationalFunction":
        return cls(LaurentPoly.one(), LaurentPoly.one(), reduce=False)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, reduce=False)

    def __mul__(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return RationalFunction(self.num * other.num, self.den * other.den)
        if isinstance(other, LaurentPoly):
            return RationalFunction(self.num * other, self.den)
        return RationalFunction(self.num * other, self.den)

    def __rmul__(self, other) -> "RationalFunction":
        return self.__mul__(other)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, LaurentPoly)):
            return self == RationalFunction(
                other if isinstance(other, LaurentPoly) else LaurentPoly.monomial(Fraction(other)),
            )
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __repr__(self) -> str:
        if self.den == LaurentPoly.one():
            return repr(self.num)
        return f"({self.num!r}) / ({self.den!r})"


class Residue:
    """Element of F[q]/(M(q)) with a fully reduced representative.

    Two residues combine only when their moduli are identical; the modulus
    must be a plain nonzero polynomial with nonzero constant term (all the
    cyclotomic-product moduli used here qualify), which makes q itself a
    unit and lets Laurent numerators reduce cleanly.
    """

    __slots__ = ("modulus", "value")

    def __init__(self, modulus: LaurentPoly, value: LaurentPoly, *, _reduced: bool = False):
        if modulus.is_zero or modulus.low != 0 or modulus.span < 1:
            raise ValueError("modulus must be a plain nonconstant polynomial")
        self.modulus = modulus
        if _reduced:
            self.value = value
        else:
            self.value = _reduce_laurent(value, modulus)

    @classmethod
    def of(cls, value: LaurentPoly, modulus: LaurentPoly) -> "Residue":
        return cls(modulus, value)

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero

    def _check(self, other: "Residue") -> None:
        if self.modulus != other.modulus:
            raise ValueError("residue arithmetic across distinct moduli")

    def __add__(self, other: "Residue") -> "Residue":
        self._check(other)
        return Residue(self.modulus, self.value + other.value)

    def __sub__(self, other: "Residue") -> "Residue":
        self._check(other)
        return Residue(self.modulus, self.value - other.value)

    def __mul__(self, other) -> "Residue":
        if isinstance(other, Residue):
            self._check(other)
            return Residue(self.modulus, self.value * other.value)
        return Residue(self.modulus, self.value * other)

    def __rmul__(self, other) -> "Residue":
        return self.__mul__(other)

    def inverse(self) -> "Residue":
        if self.value.is_zero:
            raise NonUnitDenominator(self.modulus)
        g, u, _ = poly_gcdex(self.value.poly_part(), self.modulus)
        if g.span != 0:
            raise NonUnitDenominator(g)
        # g is the monic constant 1, so u * value.poly_part() == 1 (mod M)
        inv = u
        if self.value.low:
            inv = inv * _q_power_residue(self.modulus, -self.value.low)
        return Residue(self.modulus, inv)

    def __pow__(self, n: int) -> "Residue":
        if n < 0:
            return self.inverse() ** (-n)
        result = Residue(self.modulus, LaurentPoly.one(), _reduced=True)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Residue):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.modulus, self.value))

    def __repr__(self) -> str:
        return f"[{self.value!r}] mod ({self.modulus!r})"


def _reduce_laurent(p: LaurentPoly, m: LaurentPoly) -> LaurentPoly:
    """Representative of p in F[q]/(m); negative exponents go through q^-1."""
    if p.is_zero:
        return p
    _, r = poly_divrem(p.poly_part(), m)
    if p.low > 0:
        _, r = poly_divrem(r.shift(p.low), m)
    elif p.low < 0:
        _, r = poly_divrem(r * _q_power_residue(m, p.low), m)
    return r


def _q_power_residue(m: LaurentPoly, k: int) -> LaurentPoly:
    """q^k reduced mod m, valid for negative k when m(0) != 0."""
    if k >= 0:
        _, r = poly_divrem(LaurentPoly.monomial(Fraction(1), k), m)
        return r
    c0 = m.coefficient(0)
    if c0 == 0:
        raise NonUnitDenominator(LaurentPoly.monomial(Fraction(1), 1))
    # m = c0 + q*t(q)  =>  q * (-t/c0) == 1 (mod m)
    tail = LaurentPoly(m.coeffs[1:], 0)
    inv_q = tail.scale(-(1 / c0 if not isinstance(c0, Fraction) else Fraction(1) / c0))
    acc = LaurentPoly.one()
    for _ in range(-k):
        _, acc = poly_divrem(acc * inv_q, m)
    return acc


def residue_reduce(p: RationalFunction, m: LaurentPoly) -> Residue:
    """Unique residue r with r = num(p) * den(p)^-1 in F[q]/(m).

    Raises NonUnitDenominator when gcd(den(p), m) != 1: the congruence is
    not well posed at this modulus and the caller must report that.
    """
    den = Residue(m, p.den)
    den_inv = den.inverse()  # raises NonUnitDenominator on shared factors
    return Residue(m, p.num) * den_inv


def bivariate_residue_reduce(p: RationalFunction, m: LaurentPoly) -> Residue:
    """residue_reduce for coefficients in Q(a): extended Euclid runs over
    the fraction field, so the same code path applies."""
    return residue_reduce(p, m)
