"""Exact symbolic scalars: rational functions over Q extended by exponentials.

A value is a fraction N/D where N and D are finite sums of terms

    coeff * x1^k1 * ... * xm^km * exp(a1*x1 + ... + am*xm)

with exact rational ``coeff``, non-negative integer powers ``ki`` and rational
exponent coefficients ``ai``.  Exponential factors are units: they are stored
as Laurent-style monomials in the atoms exp(xi) (rational exponents allowed)
and are normalized out of denominators, so D is always exponential-free.
Exp atoms are treated as algebraically independent of their base variables,
which is valid generically because exp is transcendental.

Every Expr is canonical on construction: gcd-reduced, denominator monic,
terms in a fixed total (lexicographic) order.  Two Exprs are equal iff their
representations are identical, and the printer is deterministic, so equal
values always print the same string and ``parse_expr(format(e)) == e``.

No floating point is used anywhere; coefficients are ``fractions.Fraction``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Mapping, Union

from .errors import (
    ExprDivisionError,
    FractionalExpExponentError,
    NonLinearExpArgumentError,
    ParseError,
    SingularPointError,
    UnboundSymbolError,
    UndeclaredVariableError,
    UnsupportedExprError,
)

Rat = Fraction
Scalar = Union[int, Fraction]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Variable:
    """A named symbol: either a base coordinate or a jet derivative.

    Jet variables carry the index of their dependent variable and the
    derivative order; they behave as independent symbols in all scalar
    arithmetic (only the jet module gives them differential meaning).
    """

    name: str
    kind: str = "base"
    dep: int = -1
    order: int = 0

    def __post_init__(self):
        if not _NAME_RE.fullmatch(self.name) or self.name == "exp":
            raise ValueError(f"bad variable name {self.name!r}")
        if self.kind == "base":
            if self.dep != -1 or self.order != 0:
                raise ValueError("base variables carry no jet data")
        elif self.kind == "jet":
            if self.dep < 0 or self.order < 1:
                raise ValueError("jet variables need dep >= 0 and order >= 1")
        else:
            raise ValueError(f"unknown variable kind {self.kind!r}")

    @property
    def is_base(self) -> bool:
        return self.kind == "base"

    def key(self):
        return (self.name, self.kind, self.dep, self.order)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ExpAtom:
    """The unit exp(var) of a single base variable, used as a binding key."""

    var: Variable

    def __post_init__(self):
        if not self.var.is_base:
            raise ValueError("exp atoms exist for base variables only")

    def __str__(self) -> str:
        return f"exp({self.var.name})"


# ---------------------------------------------------------------------------
# Term representation.
#
# Pows: tuple of (Variable, int exponent > 0), sorted by Variable.key().
# Emo:  tuple of (Variable, Fraction exponent != 0), sorted; base vars only.
# Key:  (Pows, Emo).  A term dict maps Key -> Fraction coefficient.
# ---------------------------------------------------------------------------

_ONE_KEY = ((), ())


def _pairs(d) -> tuple:
    return tuple(sorted(((v, e) for v, e in d.items() if e), key=lambda p: p[0].key()))


def _pairs_add(a, b) -> tuple:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        s = out.get(v, 0) + e
        if s:
            out[v] = s
        else:
            out.pop(v, None)
    return _pairs(out)


def _pairs_neg(a) -> tuple:
    return tuple((v, -e) for v, e in a)


def _pairs_cmp(a, b) -> int:
    """Lexicographic compare of exponent vectors over the ascending variable
    universe (missing exponent = 0).  Multiplicative total order."""
    ia = ib = 0
    while ia < len(a) or ib < len(b):
        va = a[ia][0] if ia < len(a) else None
        vb = b[ib][0] if ib < len(b) else None
        if va is not None and (vb is None or va.key() < vb.key()):
            ea, eb = a[ia][1], 0
            ia += 1
        elif vb is not None and (va is None or vb.key() < va.key()):
            ea, eb = 0, b[ib][1]
            ib += 1
        else:
            ea, eb = a[ia][1], b[ib][1]
            ia += 1
            ib += 1
        if ea != eb:
            return 1 if ea > eb else -1
    return 0


def _key_cmp(k1, k2) -> int:
    c = _pairs_cmp(k1[0], k2[0])
    if c:
        return c
    return _pairs_cmp(k1[1], k2[1])


def _term_mul_key(k1, k2):
    return (_pairs_add(k1[0], k2[0]), _pairs_add(k1[1], k2[1]))


def _padd(p: dict, q: dict) -> dict:
    out = dict(p)
    for k, c in q.items():
        s = out.get(k, 0) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _pneg(p: dict) -> dict:
    return {k: -c for k, c in p.items()}


def _pscale(p: dict, c: Fraction) -> dict:
    if not c:
        return {}
    return {k: cc * c for k, cc in p.items()}


def _pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            k = _term_mul_key(k1, k2)
            s = out.get(k, 0) + c1 * c2
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def _pmul_term(p: dict, key, c: Fraction) -> dict:
    return {_term_mul_key(k, key): cc * c for k, cc in p.items()}


def _lead(p: dict):
    it = iter(p)
    best = next(it)
    for k in it:
        if _key_cmp(k, best) > 0:
            best = k
    return best


def _is_const(p: dict) -> bool:
    return not p or (len(p) == 1 and _ONE_KEY in p)


# ---------------------------------------------------------------------------
# Exact multivariate polynomial gcd over Q (exponential-free term dicts).
# Recursive primitive pseudo-remainder sequences; results are normalized to
# leading coefficient 1 in the global term order, which makes them canonical.
# ---------------------------------------------------------------------------


def _pow_gcd(p: dict) -> tuple:
    """Monomial content of p: entrywise minimum of the power vectors."""
    first = True
    content: dict = {}
    for (pows, _emo) in p:
        cur = dict(pows)
        if first:
            content = cur
            first = False
        else:
            content = {v: min(e, cur.get(v, 0)) for v, e in content.items() if cur.get(v, 0)}
        if not content:
            break
    return _pairs(content)


def _shift_pows(p: dict, shift: tuple) -> dict:
    """Divide every term of p by the monomial `shift` (exact by construction)."""
    if not shift:
        return p
    neg = _pairs_neg(shift)
    return {(_pairs_add(pows, neg), emo): c for (pows, emo), c in p.items()}


def _pdiv_exact(p: dict, d: dict) -> dict | None:
    """Exact division p/d for exponential-free dicts; None when not exact."""
    if not p:
        return {}
    ld = _lead(d)
    ldpows = dict(ld[0])
    ldc = d[ld]
    q: dict = {}
    r = dict(p)
    while r:
        lr = _lead(r)
        diff = dict(lr[0])
        ok = True
        for v, e in ldpows.items():
            ne = diff.get(v, 0) - e
            if ne < 0:
                ok = False
                break
            if ne:
                diff[v] = ne
            else:
                diff.pop(v, None)
        if not ok:
            return None
        qkey = (_pairs(diff), ())
        c = r[lr] / ldc
        q[qkey] = q.get(qkey, 0) + c
        r = _padd(r, _pneg(_pmul_term(d, qkey, c)))
    return q


def _vars_of(p: dict) -> set:
    vs = set()
    for (pows, _emo) in p:
        for v, _e in pows:
            vs.add(v)
    return vs


def _as_univar(p: dict, v: Variable) -> dict:
    out: dict = {}
    for (pows, emo), c in p.items():
        d = dict(pows)
        deg = d.pop(v, 0)
        key = (_pairs(d), emo)
        coeff = out.setdefault(deg, {})
        coeff[key] = coeff.get(key, 0) + c
    return out


def _from_univar(u: dict, v: Variable) -> dict:
    out: dict = {}
    for deg, coeff in u.items():
        for (pows, emo), c in coeff.items():
            if deg:
                pows = _pairs_add(pows, ((v, deg),))
            out[(pows, emo)] = out.get((pows, emo), 0) + c
    return out


def _gcd_many(polys) -> dict:
    g: dict = {}
    for p in polys:
        g = poly_gcd(g, p)
        if _is_const(g) and g:
            break
    return g


def _primitive(u: dict) -> dict:
    """Primitive part of a univariate-view polynomial (coeffs are polys)."""
    u = {d: c for d, c in u.items() if c}
    if not u:
        return {}
    cont = _gcd_many(u.values())
    if _is_const(cont):
        return u
    return {d: _pdiv_exact(c, cont) for d, c in u.items()}


def _prem(a: dict, b: dict) -> dict:
    """Pseudo-remainder of univariate-view polynomials."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r:
        dr = max(r)
        if dr < db:
            break
        t = r[dr]
        nr: dict = {}
        for d, c in r.items():
            nr[d] = _pmul(lb, c)
        for d, c in b.items():
            dd = d + dr - db
            nr[dd] = _padd(nr.get(dd, {}), _pneg(_pmul(t, c)))
        r = {d: c for d, c in nr.items() if c}
    return r


def _monic(p: dict) -> dict:
    if not p:
        return p
    lc = p[_lead(p)]
    if lc == 1:
        return p
    return _pscale(p, Fraction(1) / lc)


def poly_gcd(p: dict, q: dict) -> dict:
    """Gcd of exponential-free term dicts, monic in the global term order."""
    if not p:
        return _monic(dict(q))
    if not q:
        return _monic(dict(p))
    mp, mq = _pow_gcd(p), _pow_gcd(q)
    m = _pairs({v: min(e, dict(mq).get(v, 0)) for v, e in mp if dict(mq).get(v, 0)})
    ph = _shift_pows(p, mp)
    qh = _shift_pows(q, mq)
    if len(ph) == 1 or len(qh) == 1 or _is_const(ph) or _is_const(qh):
        core: dict = {_ONE_KEY: Fraction(1)}
    else:
        vs = _vars_of(ph) | _vars_of(qh)
        v = max(vs, key=lambda w: w.key())
        a = _as_univar(ph, v)
        b = _as_univar(qh, v)
        if max(a) < max(b):
            a, b = b, a
        conta = _gcd_many(a.values())
        contb = _gcd_many(b.values())
        cont = poly_gcd(conta, contb)
        a = {d: _pdiv_exact(c, conta) for d, c in a.items()}
        b = {d: _pdiv_exact(c, contb) for d, c in b.items()}
        while b:
            r = _prem(a, b)
            a, b = b, _primitive(r)
        core = _pmul(cont, _from_univar(a, v))
    if m:
        core = _pmul_term(core, (m, ()), Fraction(1))
    return _monic(core)


def poly_lcm(p: dict, q: dict) -> dict:
    if not p or not q:
        return {}
    g = poly_gcd(p, q)
    return _monic(_pmul(p, _pdiv_exact(q, g)))


# ---------------------------------------------------------------------------
# Expr
# ---------------------------------------------------------------------------


def _freeze(p: dict) -> tuple:
    return tuple(
        sorted(p.items(), key=cmp_to_key(lambda a, b: _key_cmp(a[0], b[0])), reverse=True)
    )


def _make(num: dict, den: dict) -> "Expr":
    num = {k: c for k, c in num.items() if c}
    den = {k: c for k, c in den.items() if c}
    if not den:
        raise ExprDivisionError("division by zero expression")
    if any(k[1] for k in den):
        emos = {k[1] for k in den}
        if len(emos) != 1:
            raise UnsupportedExprError(
                "denominator mixes terms with different exponential factors"
            )
        (emo,) = emos
        den = {(k[0], ()): c for k, c in den.items()}
        neg = _pairs_neg(emo)
        num = {(k[0], _pairs_add(k[1], neg)): c for k, c in num.items()}
    if not num:
        return Expr((), ((_ONE_KEY, Fraction(1)),))
    if not (len(den) == 1 and _ONE_KEY in den):
        if len(den) == 1:
            # monomial denominator: cancel the shared monomial content
            (dkey,) = den
            dpows = dict(dkey[0])
            shared: dict = {v: e for v, e in dpows.items()}
            for (pows, _emo) in num:
                cur = dict(pows)
                shared = {v: min(e, cur.get(v, 0)) for v, e in shared.items() if cur.get(v, 0)}
                if not shared:
                    break
            if shared:
                shift = _pairs(shared)
                num = _shift_pows(num, shift)
                den = _shift_pows(den, shift)
        else:
            groups: dict = {}
            for (pows, emo), c in num.items():
                groups.setdefault(emo, {})[(pows, ())] = c
            g = _gcd_many(list(groups.values()) + [den])
            if not _is_const(g):
                den = _pdiv_exact(den, g)
                num = {}
                for emo, poly in groups.items():
                    for (pows, _e), c in _pdiv_exact(poly, g).items():
                        num[(pows, emo)] = c
    lc = den[_lead(den)]
    if lc != 1:
        inv = Fraction(1) / lc
        num = _pscale(num, inv)
        den = _pscale(den, inv)
    return Expr(_freeze(num), _freeze(den))


def _coerce(x) -> "Expr":
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Expr.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Expr")


@dataclass(frozen=True)
class Expr:
    """Canonical rational-exponential expression.  Immutable and hashable."""

    num_terms: tuple
    den_terms: tuple

    # -- constructors -------------------------------------------------------

    @staticmethod
    def const(c: Scalar) -> "Expr":
        c = Fraction(c)
        return _make({_ONE_KEY: c} if c else {}, {_ONE_KEY: Fraction(1)})

    @staticmethod
    def zero() -> "Expr":
        return Expr.const(0)

    @staticmethod
    def one() -> "Expr":
        return Expr.const(1)

    @staticmethod
    def var(v: Variable) -> "Expr":
        return _make({(((v, 1),), ()): Fraction(1)}, {_ONE_KEY: Fraction(1)})

    @staticmethod
    def exp_linear(form: Mapping[Variable, Scalar]) -> "Expr":
        pairs = {}
        for v, c in form.items():
            c = Fraction(c)
            if not v.is_base:
                raise UnsupportedExprError("exp arguments may involve base variables only")
            if c:
                pairs[v] = c
        return _make({((), _pairs(pairs)): Fraction(1)}, {_ONE_KEY: Fraction(1)})

    # -- structure ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.num_terms

    @property
    def is_one(self) -> bool:
        return self == _EXPR_ONE

    def is_constant(self) -> bool:
        return (not self.num_terms or (len(self.num_terms) == 1 and self.num_terms[0][0] == _ONE_KEY)) and self.den_terms == ((_ONE_KEY, Fraction(1)),)

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise UnsupportedExprError(f"{self} is not a rational constant")
        return self.num_terms[0][1] if self.num_terms else Fraction(0)

    def variables(self) -> set:
        vs = set()
        for terms in (self.num_terms, self.den_terms):
            for (pows, emo), _c in terms:
                for v, _e in pows:
                    vs.add(v)
                for v, _e in emo:
                    vs.add(v)
        return vs

    def exp_variables(self) -> set:
        vs = set()
        for (pows, emo), _c in self.num_terms:
            for v, _e in emo:
                vs.add(v)
        return vs

    def exp_exponents_integral(self) -> bool:
        return all(
            Fraction(e).denominator == 1
            for (_p, emo), _c in self.num_terms
            for _v, e in emo
        )

    def _num(self) -> dict:
        return dict(self.num_terms)

    def _den(self) -> dict:
        return dict(self.den_terms)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = _coerce(other)
        if self.den_terms == other.den_terms:
            return _make(_padd(self._num(), other._num()), self._den())
        n = _padd(_pmul(self._num(), other._den()), _pmul(other._num(), self._den()))
        return _make(n, _pmul(self._den(), other._den()))

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(tuple((k, -c) for k, c in self.num_terms), self.den_terms)

    def __sub__(self, other) -> "Expr":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Expr":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Expr":
        other = _coerce(other)
        return _make(_pmul(self._num(), other._num()), _pmul(self._den(), other._den()))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Expr":
        other = _coerce(other)
        if other.is_zero:
            raise ExprDivisionError("division by zero expression")
        return _make(_pmul(self._num(), other._den()), _pmul(self._den(), other._num()))

    def __rtruediv__(self, other) -> "Expr":
        return _coerce(other) / self

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n == 0:
            return Expr.one()
        base = self if n > 0 else Expr.one() / self
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    # -- calculus -----------------------------------------------------------

    def differentiate(self, v: Variable) -> "Expr":
        dn = _pdiff(self._num(), v)
        if self.den_terms == ((_ONE_KEY, Fraction(1)),):
            return _make(dn, {_ONE_KEY: Fraction(1)})
        dd = _pdiff(self._den(), v)
        n = _padd(_pmul(dn, self._den()), _pneg(_pmul(self._num(), dd)))
        return _make(n, _pmul(self._den(), self._den()))

    def substitute(self, bindings: Mapping) -> "Expr":
        binds = {}
        for k, val in bindings.items():
            if not isinstance(k, (Variable, ExpAtom)):
                raise TypeError("bindings are keyed by Variable or ExpAtom")
            binds[k] = _coerce(val)
        n = _subst_poly(self._num(), binds)
        d = _subst_poly(self._den(), binds)
        if d.is_zero:
            raise SingularPointError("substitution produced a zero denominator")
        return n / d

    def eval_at(
        self,
        point: Mapping[Variable, Scalar],
        exp_values: Mapping[Variable, Scalar] | None = None,
    ) -> Fraction:
        """Exact rational value; exp atoms take the given nonzero stand-in values."""
        exp_values = exp_values or {}
        den = _eval_poly(self._den(), point, exp_values)
        if den == 0:
            raise SingularPointError("denominator vanished at the sample point")
        return _eval_poly(self._num(), point, exp_values) / den

    # -- printing -----------------------------------------------------------

    def format(self) -> str:
        num_s = _format_sum(self.num_terms)
        if self.den_terms == ((_ONE_KEY, Fraction(1)),):
            return num_s
        return f"({num_s})/({_format_sum(self.den_terms)})"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Expr({self.format()!r})"


_EXPR_ONE = Expr(((_ONE_KEY, Fraction(1)),), ((_ONE_KEY, Fraction(1)),))


def _pdiff(p: dict, v: Variable) -> dict:
    out: dict = {}
    for (pows, emo), c in p.items():
        pd = dict(pows)
        k = pd.get(v, 0)
        if k:
            if k == 1:
                pd.pop(v)
            else:
                pd[v] = k - 1
            key = (_pairs(pd), emo)
            out[key] = out.get(key, 0) + c * k
        for w, q in emo:
            if w == v:
                key = (pows, emo)
                out[key] = out.get(key, 0) + c * q
                break
    return {k: c for k, c in out.items() if c}


def linear_form(e: Expr) -> dict | None:
    """Extract {var: coeff} when e is a homogeneous linear form in base
    variables with rational coefficients (no constant term); else None."""
    if e.den_terms != ((_ONE_KEY, Fraction(1)),):
        return None
    out = {}
    for (pows, emo), c in e.num_terms:
        if emo or len(pows) != 1:
            return None
        (v, k) = pows[0]
        if k != 1 or not v.is_base:
            return None
        out[v] = c
    return out


def _subst_poly(p: dict, binds: Mapping) -> Expr:
    acc = Expr.zero()
    for (pows, emo), c in p.items():
        t = Expr.const(c)
        for v, k in pows:
            b = binds.get(v)
            t = t * (b if b is not None else Expr.var(v)) ** k
        left: dict = {}
        for v, q in emo:
            atom = binds.get(ExpAtom(v))
            if atom is not None:
                if Fraction(q).denominator != 1:
                    raise FractionalExpExponentError(
                        f"exp({v}) carries non-integer exponent {q}; cannot substitute"
                    )
                t = t * atom ** int(q)
                continue
            b = binds.get(v)
            if b is not None:
                lf = linear_form(b)
                if lf is None:
                    raise UnsupportedExprError(
                        f"cannot substitute {v} -> {b} inside exp: not a linear form"
                    )
                for w, cw in lf.items():
                    left[w] = left.get(w, 0) + q * cw
            else:
                left[v] = left.get(v, 0) + q
        if left:
            t = t * Expr.exp_linear(left)
        acc = acc + t
    return acc


def _iroot(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    lo, hi = 1, 1 << ((n.bit_length() + k - 1) // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo if lo**k == n else None


def _frac_pow(base: Fraction, q: Fraction) -> Fraction:
    if q.denominator == 1:
        return base ** int(q)
    if base == 0:
        raise SingularPointError("0 raised to a fractional power")
    k = q.denominator
    sign = 1
    num, den = base.numerator, base.denominator
    if num < 0:
        if k % 2 == 0:
            raise UnsupportedExprError(f"no exact rational {k}-th root of {base}")
        sign, num = -1, -num
    rn, rd = _iroot(num, k), _iroot(den, k)
    if rn is None or rd is None:
        raise UnsupportedExprError(f"no exact rational {k}-th root of {base}")
    return Fraction(sign * rn, rd) ** q.numerator


def _eval_poly(p: dict, point: Mapping, exp_values: Mapping) -> Fraction:
    total = Fraction(0)
    for (pows, emo), c in p.items():
        val = Fraction(c)
        for v, k in pows:
            if v not in point:
                raise UnboundSymbolError(f"no value for variable {v}")
            val *= Fraction(point[v]) ** k
        for v, q in emo:
            if v not in exp_values:
                raise UnboundSymbolError(f"no value for exp({v})")
            ev = Fraction(exp_values[v])
            if ev == 0:
                raise UnboundSymbolError(f"exp({v}) must be bound to a nonzero rational")
            val *= _frac_pow(ev, Fraction(q))
        total += val
    return total


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _format_linear(emo) -> str:
    parts = []
    for i, (v, q) in enumerate(emo):
        q = Fraction(q)
        mag = abs(q)
        body = v.name if mag == 1 else f"{mag}*{v.name}"
        if i == 0:
            parts.append(body if q > 0 else f"-{body}")
        else:
            parts.append((" + " if q > 0 else " - ") + body)
    return "".join(parts)


def _format_term(key, coeff_abs: Fraction) -> str:
    pows, emo = key
    factors = []
    if coeff_abs != 1 or (not pows and not emo):
        factors.append(str(coeff_abs))
    for v, k in pows:
        factors.append(v.name if k == 1 else f"{v.name}^{k}")
    if emo:
        factors.append(f"exp({_format_linear(emo)})")
    return "*".join(factors)


def _format_sum(terms) -> str:
    if not terms:
        return "0"
    out = []
    for i, (key, c) in enumerate(terms):
        body = _format_term(key, abs(c))
        if i == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append((" + " if c > 0 else " - ") + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# Parser: recursive descent over
#   expr   := term (('+'|'-') term)*
#   term   := unary (('*'|'/') unary)*
#   unary  := ('-'|'+') unary | power
#   power  := atom ['^' ['-'] INT]
#   atom   := INT | IDENT | 'exp' '(' expr ')' | '(' expr ')'
# Rationals are written p/q (division); exp arguments must canonicalize to a
# linear form in base variables with rational coefficients.
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])")


class _Parser:
    def __init__(self, text: str, lookup: Mapping[str, Variable]):
        self.text = text
        self.lookup = lookup
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, val, _pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                e = e + t if val == "+" else e - t
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                t = self.unary()
                if val == "*":
                    e = e * t
                else:
                    if t.is_zero:
                        raise ParseError("division by syntactic zero", pos)
                    e = e / t
            else:
                return e

    def unary(self) -> Expr:
        kind, val, _pos = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            e = self.unary()
            return e if val == "+" else -e
        return self.power()

    def power(self) -> Expr:
        e = self.atom()
        kind, val, _pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val, pos = self.peek()
            if kind == "op" and val == "-":
                self.take()
                sign = -1
                kind, val, pos = self.peek()
            if kind != "int":
                raise ParseError("expected an integer exponent after ^", pos)
            self.take()
            n = sign * int(val)
            if n < 0 and e.is_zero:
                raise ParseError("division by syntactic zero", pos)
            e = e**n
        return e

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "int":
            return Expr.const(int(val))
        if kind == "name":
            if val == "exp":
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                lf = linear_form(arg)
                if lf is None:
                    raise NonLinearExpArgumentError(
                        "exp(...) argument must be a linear form in base variables", pos
                    )
                return Expr.exp_linear(lf)
            v = self.lookup.get(val)
            if v is None:
                raise UndeclaredVariableError(f"undeclared identifier {val!r}", pos)
            return Expr.var(v)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)


def parse_expr(text: str, variables: Iterable[Variable]) -> Expr:
    """Parse `text` against the declared variables; returns a canonical Expr."""
    lookup: dict[str, Variable] = {}
    for v in variables:
        if v.name in lookup and lookup[v.name] != v:
            raise ParseError(f"duplicate variable name {v.name!r}")
        lookup[v.name] = v
    p = _Parser(text, lookup)
    e = p.expr()
    kind, val, pos = p.peek()
    if kind is not None:
        raise ParseError(f"trailing input {val!r}", pos)
    return e


# ---------------------------------------------------------------------------
# Gcd/lcm on Exprs (exponential-free polynomials with denominator 1), used by
# the exact linear algebra over vector-field coefficients.
# ---------------------------------------------------------------------------


def _as_polydict(e: Expr) -> dict:
    if e.den_terms != ((_ONE_KEY, Fraction(1)),):
        raise UnsupportedExprError("polynomial expected (denominator 1)")
    if any(emo for (_p, emo), _c in e.num_terms):
        raise UnsupportedExprError("exponential-free polynomial expected")
    return e._num()


def expr_gcd(a: Expr, b: Expr) -> Expr:
    return _make(poly_gcd(_as_polydict(a), _as_polydict(b)), {_ONE_KEY: Fraction(1)})


def expr_lcm(a: Expr, b: Expr) -> Expr:
    return _make(poly_lcm(_as_polydict(a), _as_polydict(b)), {_ONE_KEY: Fraction(1)})


def denominator_expr(e: Expr) -> Expr:
    return Expr(e.den_terms, ((_ONE_KEY, Fraction(1)),))


def numerator_expr(e: Expr) -> Expr:
    return Expr(e.num_terms, ((_ONE_KEY, Fraction(1)),))
