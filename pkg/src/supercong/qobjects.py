"""q-objects and the declarative statement specs built from them.

Covers the construction side of the verification engine: cyclotomic
polynomials, q-integers, q-shifted factorials, and the compilation of
declarative summand / closed-form / modulus specs (as shipped in the JSON
registry) into exact polynomials and rational functions.

The statement catalog is data, not code: one spec record per labeled
statement, so adding a conjecture is a registry edit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .exprs import ExpressionError, eval_bool, eval_fraction, eval_int
from .paramfield import ParamRational
from .polys import LaurentPoly, RationalFunction, poly_divrem


class DegenerateFactor(ArithmeticError):
    """A denominator factor evaluated to the zero polynomial.

    Happens when a Pochhammer factor in a denominator reaches exponent 0
    (the factor 1 - q^0), e.g. under an unlucky parameter specialization.
    The statement is undefined there, which is reported, never skipped.
    """


class SpecError(ValueError):
    """A statement spec is malformed or instantiated outside its domain."""


# ---------------------------------------------------------------------------
# basic q-objects
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic(n: int) -> LaurentPoly:
    """The n-th cyclotomic polynomial, by exact division of q^n - 1 by the
    product of the cyclotomics of the proper divisors.

    Memoized; the cache is only ever appended to, so concurrent readers are
    safe under the interpreter's atomic dict operations.
    """
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    q_n_minus_1 = LaurentPoly.from_int_coeffs([-1] + [0] * (n - 1) + [1])
    if n == 1:
        return q_n_minus_1
    divisor = LaurentPoly.one()
    for d in range(1, n):
        if n % d == 0:
            divisor = divisor * cyclotomic(d)
    quotient, remainder = poly_divrem(q_n_minus_1, divisor)
    assert remainder.is_zero, "cyclotomic recursion must divide exactly"
    return quotient


def q_integer(n: int) -> LaurentPoly:
    """[n] = 1 + q + ... + q^(n-1)."""
    if n < 1:
        raise ValueError("q-integer index must be positive")
    return LaurentPoly.from_int_coeffs([1] * n)


def q_bracket(t: int) -> LaurentPoly:
    """[t] = (1 - q^t)/(1 - q) for any integer t.

    For t < 0 this is the Laurent value -q^t [-t]; [0] = 0.  Needed because
    prefactors like [6k - 1] start at [-1] = -1/q when k = 0.
    """
    if t > 0:
        return q_integer(t)
    if t == 0:
        return LaurentPoly.zero()
    return LaurentPoly.from_int_coeffs([-1] * (-t), t)


def one_minus_q_power(e: int) -> LaurentPoly:
    """1 - q^e as an exact Laurent polynomial (zero when e == 0)."""
    if e == 0:
        return LaurentPoly.zero()
    if e > 0:
        return LaurentPoly.from_int_coeffs([1] + [0] * (e - 1) + [-1])
    return LaurentPoly.from_int_coeffs([-1] + [0] * (-e - 1) + [1], e)


def q_pochhammer(c: int, s: int, k: int) -> LaurentPoly:
    """(q^c; q^s)_k = prod_{j=0}^{k-1} (1 - q^{c+js}); empty product for k=0.

    c may be negative (Laurent), s must be positive.
    """
    if s < 1:
        raise ValueError("pochhammer step must be positive")
    if k < 0:
        raise ValueError("pochhammer length must be nonnegative")
    out = LaurentPoly.one()
    for j in range(k):
        out = out * one_minus_q_power(c + j * s)
    return out


_PARAM_A = ParamRational.generator()


def _one_plus_coeff_q_power(coeff: ParamRational, e: int) -> LaurentPoly:
    """1 + coeff * q^e over Q(a) coefficients."""
    if e == 0:
        return LaurentPoly((1 + coeff,))
    if e > 0:
        return LaurentPoly([1] + [0] * (e - 1) + [coeff], 0)
    return LaurentPoly([coeff] + [0] * (-e - 1) + [1], e)


def param_pochhammer(c: int, s: int, k: int, kind: str) -> LaurentPoly:
    """(a q^c; q^s)_k or (q^c / a; q^s)_k with ParamRational coefficients."""
    if kind == "aq":
        coeff = -_PARAM_A
    elif kind == "q_div_a":
        coeff = -(ParamRational.const(1) / _PARAM_A)
    else:
        raise SpecError(f"unknown parametric factor kind {kind!r}")
    out = LaurentPoly((ParamRational.const(1),))
    for j in range(k):
        out = out * _one_plus_coeff_q_power(coeff, c + j * s)
    return out


# ---------------------------------------------------------------------------
# declarative statement specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PochFactor:
    """One q-shifted factorial in a summand: (base q^exp; q^step)_k^power.

    ``param`` is "" for a plain factor, "aq" for (a q^exp; q^step)_k, and
    "q_div_a" for (q^exp / a; q^step)_k.  ``exp`` and ``step`` are registry
    expressions in d.
    """

    exp: str
    step: str
    side: str          # "num" | "den"
    power: int = 1
    param: str = ""

    def __post_init__(self):
        if self.side not in ("num", "den"):
            raise SpecError(f"factor side must be num/den, got {self.side!r}")
        if self.power < 1:
            raise SpecError("factor power must be >= 1")
        if self.param not in ("", "aq", "q_div_a"):
            raise SpecError(f"unknown param marker {self.param!r}")


@dataclass(frozen=True)
class SummandSpec:
    """The k-th term of a truncated sum: [m k + r] * (factors) * q^{e(k)}
    with e(k) = alpha k^2 + beta k + gamma (expressions in d)."""

    prefactor_m: str
    prefactor_r: str
    q_exp: tuple[str, str, str]
    factors: tuple[PochFactor, ...]


@dataclass(frozen=True)
class ClosedLen:
    """(q^exp; q^step)_{length}: one factor of a closed-form ratio."""

    exp: str
    step: str
    length: str


@dataclass(frozen=True)
class ClosedFormBranch:
    when: str                       # condition in n (and d); "True" for single branch
    kind: str                       # "ratio" | "zero"
    num: tuple[ClosedLen, ...] = ()
    den: tuple[ClosedLen, ...] = ()
    n_multiplier: bool = False
    q_shift: str = "0"
    sign: int = 1


@dataclass(frozen=True)
class ModulusFactor:
    kind: str                       # "cyclotomic" | "q_integer" | "one_minus_a_qn" | "a_minus_qn"
    power: int = 1


@dataclass(frozen=True)
class ModulusSpec:
    factors: tuple[ModulusFactor, ...]

    def parametric_kinds(self) -> tuple[str, ...]:
        return tuple(f.kind for f in self.factors if f.kind in ("one_minus_a_qn", "a_minus_qn"))

    def cyclotomic_power(self) -> int:
        return sum(f.power for f in self.factors if f.kind == "cyclotomic")

    def has_q_integer(self) -> bool:
        return any(f.kind == "q_integer" for f in self.factors)


# ---------------------------------------------------------------------------
# compiled (concrete) forms for a fixed n, d
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConcreteFactor:
    c: int
    s: int
    power: int
    param: str

    def exponent_at(self, j: int) -> int:
        return self.c + j * self.s


@dataclass(frozen=True)
class ConcreteSummand:
    m: int
    r: int
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    num: tuple[ConcreteFactor, ...]
    den: tuple[ConcreteFactor, ...]

    def exponent(self, k: int) -> int:
        e = self.alpha * k * k + self.beta * k + self.gamma
        if e.denominator != 1:
            raise SpecError(f"non-integral q-exponent {e} at k={k}")
        return e.numerator

    def prefactor_index(self, k: int) -> int:
        return self.m * k + self.r


def concretize_summand(spec: SummandSpec, d: Optional[int]) -> ConcreteSummand:
    try:
        return _concretize_summand(spec, d)
    except ExpressionError as exc:
        raise SpecError(str(exc)) from exc


def _concretize_summand(spec: SummandSpec, d: Optional[int]) -> ConcreteSummand:
    names = {"d": d}
    num, den = [], []
    for f in spec.factors:
        cf = ConcreteFactor(
            c=eval_int(f.exp, **names),
            s=eval_int(f.step, **names),
            power=f.power,
            param=f.param,
        )
        if cf.s < 1:
            raise SpecError(f"factor step {cf.s} must be positive")
        (num if f.side == "num" else den).append(cf)
    return ConcreteSummand(
        m=eval_int(spec.prefactor_m, **names),
        r=eval_int(spec.prefactor_r, **names),
        alpha=eval_fraction(spec.q_exp[0], **names),
        beta=eval_fraction(spec.q_exp[1], **names),
        gamma=eval_fraction(spec.q_exp[2], **names),
        num=tuple(num),
        den=tuple(den),
    )


@dataclass(frozen=True)
class ConcreteClosedForm:
    kind: str                        # "ratio" | "zero"
    sign: int = 1
    shift: int = 0
    n_multiplier: bool = False
    num: tuple[tuple[int, int, int], ...] = ()   # (c, s, length)
    den: tuple[tuple[int, int, int], ...] = ()


def concretize_closed_form(
    branches: tuple[ClosedFormBranch, ...], n: int, d: Optional[int]
) -> ConcreteClosedForm:
    try:
        return _concretize_closed_form(branches, n, d)
    except ExpressionError as exc:
        raise SpecError(str(exc)) from exc


def _concretize_closed_form(
    branches: tuple[ClosedFormBranch, ...], n: int, d: Optional[int]
) -> ConcreteClosedForm:
    names = {"n": n, "d": d}
    for branch in branches:
        if branch.when == "True" or eval_bool(branch.when, **names):
            if branch.kind == "zero":
                return ConcreteClosedForm(kind="zero")
            num = tuple(
                (eval_int(f.exp, **names), eval_int(f.step, **names), eval_int(f.length, **names))
                for f in branch.num
            )
            den = tuple(
                (eval_int(f.exp, **names), eval_int(f.step, **names), eval_int(f.length, **names))
                for f in branch.den
            )
            for c, s, length in num + den:
                if length < 0:
                    raise SpecError(f"negative closed-form length {length}")
                if s < 1:
                    raise SpecError("closed-form step must be positive")
            return ConcreteClosedForm(
                kind="ratio",
                sign=branch.sign,
                shift=eval_int(branch.q_shift, **names),
                n_multiplier=branch.n_multiplier,
                num=num,
                den=den,
            )
    raise SpecError(f"no closed-form branch applies at n={n}, d={d}")


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _materialize_factor(cf: ConcreteFactor, k: int, n: int, a_mode: Optional[str]) -> LaurentPoly:
    if cf.param == "":
        return q_pochhammer(cf.c, cf.s, k) ** cf.power
    if a_mode == "symbolic":
        return param_pochhammer(cf.c, cf.s, k, "aq" if cf.param == "aq" else "q_div_a") ** cf.power
    if a_mode == "qn":
        shift = n if cf.param == "aq" else -n
    elif a_mode == "q-n":
        shift = -n if cf.param == "aq" else n
    else:
        raise SpecError("parametric factor in a non-parametric build")
    return q_pochhammer(cf.c + shift, cf.s, k) ** cf.power


def build_summand(
    spec: SummandSpec,
    k: int,
    n: int,
    d: Optional[int] = None,
    a_mode: Optional[str] = None,
) -> RationalFunction:
    """The exact k-th term as a reduced rational function.

    a_mode selects how parametric factors are treated: None (must be absent),
    "symbolic" (coefficients in Q(a)), or "qn"/"q-n" (specialize a to q^{+n}
    or q^{-n}).  Raises DegenerateFactor if a denominator factor vanishes
    identically.
    """
    concrete = concretize_summand(spec, d)
    return build_concrete_summand(concrete, k, n, a_mode)


def build_concrete_summand(
    concrete: ConcreteSummand, k: int, n: int, a_mode: Optional[str] = None
) -> RationalFunction:
    num = q_bracket(concrete.prefactor_index(k))
    if num.is_zero:
        return RationalFunction.zero()
    for cf in concrete.num:
        num = num * _materialize_factor(cf, k, n, a_mode)
        if num.is_zero:
            return RationalFunction.zero()
    den = LaurentPoly.one()
    for cf in concrete.den:
        factor = _materialize_factor(cf, k, n, a_mode)
        if factor.is_zero:
            raise DegenerateFactor(
                f"denominator factor (q^{cf.c}; q^{cf.s})_{k} vanishes"
            )
        den = den * factor
    num = num.shift(concrete.exponent(k))
    return RationalFunction(num, den)


def build_closed_form(
    branches: tuple[ClosedFormBranch, ...], n: int, d: Optional[int] = None
) -> RationalFunction:
    """The exact right-hand side for the (n, d) instance: either 0 or
    sign * (ratio of q-shifted factorials) * [n]^{0,1} * q^{shift}."""
    concrete = concretize_closed_form(branches, n, d)
    return build_concrete_closed_form(concrete, n)


def build_concrete_closed_form(concrete: ConcreteClosedForm, n: int) -> RationalFunction:
    if concrete.kind == "zero":
        return RationalFunction.zero()
    num = LaurentPoly.one()
    for c, s, length in concrete.num:
        num = num * q_pochhammer(c, s, length)
    den = LaurentPoly.one()
    for c, s, length in concrete.den:
        factor = q_pochhammer(c, s, length)
        if factor.is_zero:
            raise DegenerateFactor(f"closed-form denominator (q^{c}; q^{s})_{length} vanishes")
        den = den * factor
    if concrete.n_multiplier:
        num = num * q_integer(n)
    num = num.shift(concrete.shift)
    if concrete.sign < 0:
        num = -num
    return RationalFunction(num, den)


def modulus_support(spec: ModulusSpec, n: int) -> dict[int, int]:
    """Cyclotomic index -> multiplicity for the univariate part of the
    modulus.  [n] contributes every divisor of n above 1 exactly once."""
    if n < 2:
        raise SpecError("modulus requires n >= 2")
    support: dict[int, int] = {}
    for f in spec.factors:
        if f.kind == "cyclotomic":
            support[n] = support.get(n, 0) + f.power
        elif f.kind == "q_integer":
            for m in range(2, n + 1):
                if n % m == 0:
                    support[m] = support.get(m, 0) + f.power
        elif f.kind in ("one_minus_a_qn", "a_minus_qn"):
            continue
        else:
            raise SpecError(f"unknown modulus factor kind {f.kind!r}")
    return support


def modulus_from_support(support: dict[int, int]) -> LaurentPoly:
    out = LaurentPoly.one()
    for m in sorted(support):
        out = out * cyclotomic(m) ** support[m]
    return out


def build_modulus(spec: ModulusSpec, n: int) -> LaurentPoly:
    """The product polynomial of all non-parametric modulus factors.

    Parametric factors never materialize as univariate moduli; the engine
    checks them by specialization instead.
    """
    if spec.parametric_kinds():
        raise SpecError("parametric modulus factors cannot be materialized")
    return modulus_from_support(modulus_support(spec, n))


def validate_summand_exponents(spec: SummandSpec, d: Optional[int], k_max: int = 40) -> None:
    """The q-exponent e(k) must be an integer for every k; checked at load."""
    concrete = concretize_summand(spec, d)
    for k in range(k_max + 1):
        concrete.exponent(k)  # raises SpecError on non-integrality
