"""Canonical realizations of sl(n+1, R) as vector fields on R^n, the
sl(3) two-parameter scan, Serre-relation verification, and the maximal
abelian ad-nilpotent chains of type A_n.

Form 1 emits the root vectors ending in X_{-alpha_n} = exp(-x_n) d/dx_n (the
list used for the sl(4) linearization); form 2 is the mirrored list starting
with X_{alpha_i} = exp(x_i)(d/dx_i - d/dx_{i+1}).  For n = 1 both coincide
with {exp(x) d/dx, exp(-x) d/dx}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import (
    DEFAULT_SEED,
    LieBasis,
    RootDatum,
    ad_eigenvalue,
    generic_rank,
    type_a_sign,
)
from .errors import LievecError, NotEigenvectorError, UnsupportedFieldError
from .expr import Expr, Variable
from .fields import Chart, VectorField, chart, lie_bracket, zero_field

_LETTERS = "abcdefghijklm"


def root_letters(i: int, j: int) -> str:
    """Label for the root alpha_i + ... + alpha_j (0-based, inclusive)."""
    return "".join(_LETTERS[k] for k in range(i, j + 1))


@dataclass(frozen=True)
class Realization:
    """Simple root vectors (and negatives) of sl(n+1, R) on R^n."""

    n: int
    form: int
    chart: Chart
    pos: tuple[VectorField, ...]
    neg: tuple[VectorField, ...]

    @property
    def pos_names(self) -> tuple[str, ...]:
        return tuple(f"X{_LETTERS[i]}" for i in range(self.n))

    @property
    def neg_names(self) -> tuple[str, ...]:
        return tuple(f"Xn{_LETTERS[i]}" for i in range(self.n))

    def generators(self) -> list[VectorField]:
        return list(self.pos) + list(self.neg)

    def generator_names(self) -> list[str]:
        return list(self.pos_names) + list(self.neg_names)

    def named_generators(self) -> list[tuple[str, VectorField]]:
        return list(zip(self.generator_names(), self.generators()))

    def cartan_fields(self) -> list[VectorField]:
        """H_i = [X_{alpha_i}, X_{-alpha_i}] for each simple root."""
        return [lie_bracket(p, m) for p, m in zip(self.pos, self.neg)]

    def cartan_names(self) -> list[str]:
        return [f"H{_LETTERS[i]}" for i in range(self.n)]


def _exp_direction(ch: Chart, sign: int, i: int, minus_j: int | None) -> VectorField:
    """exp(sign * x_i) * (d_i - d_j), with the second term optional."""
    coeffs = [Expr.zero() for _ in ch.variables]
    emo = Expr.exp_linear({ch.variables[i]: sign})
    coeffs[i] = emo
    if minus_j is not None:
        coeffs[minus_j] = -emo
    return VectorField(ch, tuple(coeffs))


def realize_sl(n_plus_1: int, form: int = 1) -> Realization:
    """The two point-equivalent families of simple root vectors; emitted
    verbatim.  Chart names are x, y, z for n <= 3 and x1..xn beyond."""
    if n_plus_1 < 2:
        raise ValueError("need n_plus_1 >= 2")
    if form not in (1, 2):
        raise ValueError("form must be 1 or 2")
    n = n_plus_1 - 1
    names = ["x", "y", "z"][:n] if n <= 3 else [f"x{i+1}" for i in range(n)]
    ch = chart(names)
    pos: list[VectorField] = []
    neg: list[VectorField] = []
    if n == 1:
        pos.append(_exp_direction(ch, 1, 0, None))
        neg.append(_exp_direction(ch, -1, 0, None))
    elif form == 1:
        pos.append(_exp_direction(ch, 1, 0, None))
        for i in range(1, n):
            pos.append(_exp_direction(ch, 1, i, i - 1))
        for i in range(n - 1):
            neg.append(_exp_direction(ch, -1, i, i + 1))
        neg.append(_exp_direction(ch, -1, n - 1, None))
    else:
        for i in range(n - 1):
            pos.append(_exp_direction(ch, 1, i, i + 1))
        pos.append(_exp_direction(ch, 1, n - 1, None))
        neg.append(_exp_direction(ch, -1, 0, None))
        for i in range(1, n):
            neg.append(_exp_direction(ch, -1, i, i - 1))
    return Realization(n=n, form=form, chart=ch, pos=tuple(pos), neg=tuple(neg))


@dataclass(frozen=True)
class SerreReport:
    """Pass/fail per commutation relation, plus the ad-eigenvalue table."""

    entries: tuple[tuple[str, bool, str], ...]
    cartan_table: tuple[tuple[Fraction, ...], ...] | None
    cartan_sign: int | None

    @property
    def passed(self) -> bool:
        return all(ok for _r, ok, _d in self.entries)

    def lines(self) -> list[str]:
        return [f"{'pass' if ok else 'FAIL'}  {rel}{(': ' + d) if d else ''}" for rel, ok, d in self.entries]


def verify_serre(R: Realization) -> SerreReport:
    """Exact checks of the defining relations on the simple root vectors:
    [X_i, X_-j] = 0 for i != j, [X_i, X_j] = 0 for |i-j| >= 2, the H_i
    pairwise commute, and the ad table is the A_n Cartan matrix up to one
    global sign."""
    entries: list[tuple[str, bool, str]] = []
    n = R.n
    pn, nn = R.pos_names, R.neg_names

    def check(rel: str, field: VectorField):
        ok = field.is_zero
        entries.append((rel, ok, "" if ok else f"residual {field}"))

    for i in range(n):
        for j in range(n):
            if i != j:
                check(f"[{pn[i]},{nn[j]}] = 0", lie_bracket(R.pos[i], R.neg[j]))
    for i in range(n):
        for j in range(i + 2, n):
            check(f"[{pn[i]},{pn[j]}] = 0", lie_bracket(R.pos[i], R.pos[j]))
            check(f"[{nn[i]},{nn[j]}] = 0", lie_bracket(R.neg[i], R.neg[j]))
    cartan = R.cartan_fields()
    for i in range(n):
        if cartan[i].is_zero:
            entries.append((f"H{_LETTERS[i]} != 0", False, "bracket vanished"))
    for i in range(n):
        for j in range(i + 1, n):
            check(f"[H{_LETTERS[i]},H{_LETTERS[j]}] = 0", lie_bracket(cartan[i], cartan[j]))
    table: list[tuple[Fraction, ...]] | None = []
    try:
        for i in range(n):
            row = tuple(ad_eigenvalue(cartan[i], R.pos[j]) for j in range(n))
            table.append(row)
        sign = type_a_sign(table)
        entries.append(
            (
                "ad table has the A_n Cartan pattern up to a global sign",
                sign is not None,
                f"sign {sign:+d}" if sign is not None else f"table {table}",
            )
        )
    except NotEigenvectorError as err:
        entries.append(("simple vectors are ad-eigenvectors of the H_i", False, str(err)))
        table, sign = None, None
    return SerreReport(
        entries=tuple(entries),
        cartan_table=tuple(table) if table is not None else None,
        cartan_sign=sign,
    )


# ---------------------------------------------------------------------------
# The sl(3) parameter scan (Proposition 1)
# ---------------------------------------------------------------------------


def _coeff_poly(e: Expr, u: Variable, v: Variable) -> dict[tuple[int, int], Fraction]:
    """Coefficients of a polynomial in the two scan parameters, after
    stripping the single shared exponential factor."""
    out: dict[tuple[int, int], Fraction] = {}
    for (pows, _emo), c in e.num_terms:
        du = dv = 0
        for var, k in pows:
            if var == u:
                du = k
            elif var == v:
                dv = k
            else:
                raise UnsupportedFieldError("unexpected variable in scan constraint")
        out[(du, dv)] = out.get((du, dv), 0) + c
    return {k: c for k, c in out.items() if c}


def _uni_coeffs(p: dict, axis: int) -> dict[int, dict[int, Fraction]]:
    """View a bivariate coefficient dict as univariate in `axis`."""
    out: dict[int, dict[int, Fraction]] = {}
    for (du, dv), c in p.items():
        d = (du, dv)[axis]
        o = (du, dv)[1 - axis]
        out.setdefault(d, {})[o] = c
    return out


def _uni_gcd(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    """Monic gcd of univariate polynomials with Fraction coefficients."""

    def norm(p):
        p = {d: c for d, c in p.items() if c}
        if not p:
            return p
        lc = p[max(p)]
        return {d: c / lc for d, c in p.items()}

    a, b = norm(a), norm(b)
    while b:
        da, db = max(a), max(b)
        if da < db:
            a, b = b, a
            continue
        r = dict(a)
        while r and max(r) >= db:
            dr = max(r)
            f = r[dr] / b[db]
            for d, c in b.items():
                dd = d + dr - db
                s = r.get(dd, Fraction(0)) - f * c
                if s:
                    r[dd] = s
                else:
                    r.pop(dd, None)
        a, b = b, norm(r)
    return norm(a)


def _rational_roots(p: dict[int, Fraction]) -> list[Fraction] | None:
    """All rational roots with multiplicity; None when a nonconstant factor
    without rational roots remains (completeness certificate fails)."""
    p = {d: c for d, c in p.items() if c}
    if not p:
        return None
    low = min(p)
    roots = [Fraction(0)] * low
    p = {d - low: c for d, c in p.items()}
    # clear to integer coefficients
    from math import gcd, lcm

    denls = lcm(*[c.denominator for c in p.values()]) if p else 1
    ip = {d: int(c * denls) for d, c in p.items()}
    while max(ip) > 0:
        lead, const = ip[max(ip)], ip.get(0, 0)
        if const == 0:
            roots.append(Fraction(0))
            ip = {d - 1: c for d, c in ip.items() if d >= 1}
            continue
        found = None
        for pnum in _divisors(abs(const)):
            for qden in _divisors(abs(lead)):
                for sign in (1, -1):
                    cand = Fraction(sign * pnum, qden)
                    if _uni_eval(ip, cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            return None
        roots.append(found)
        ip = _uni_deflate(ip, found)
    return roots


def _divisors(n: int) -> list[int]:
    out = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(out + [n // d for d in out]))


def _uni_eval(p: dict[int, int], x: Fraction) -> Fraction:
    return sum((Fraction(c) * x**d for d, c in p.items()), Fraction(0))


def _uni_deflate(p: dict[int, int], root: Fraction) -> dict[int, int]:
    """Exact synthetic division by (x - root); returns integer-cleared quotient."""
    deg = max(p)
    coeffs = [Fraction(p.get(d, 0)) for d in range(deg, -1, -1)]
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + root * out[-1])
    rem = coeffs[-1] + root * out[-1]
    if rem != 0:
        raise LievecError("deflation by a non-root")
    from math import lcm

    denls = lcm(*[c.denominator for c in out]) if out else 1
    return {len(out) - 1 - i: int(c * denls) for i, c in enumerate(out)}


def _resultant(a: dict, b: dict, axis: int) -> dict[int, Fraction]:
    """Resultant eliminating the `axis` parameter from two bivariate
    coefficient dicts; returned univariate in the other parameter."""
    ua, ub = _uni_coeffs(a, axis), _uni_coeffs(b, axis)
    da, db = max(ua), max(ub)
    size = da + db
    rows: list[list[dict[int, Fraction]]] = []
    for sh in range(db):
        rows.append([ua.get(da - (c - sh), {}) if 0 <= c - sh <= da else {} for c in range(size)])
    for sh in range(da):
        rows.append([ub.get(db - (c - sh), {}) if 0 <= c - sh <= db else {} for c in range(size)])
    return _det_poly(rows)


def _poly1_mul(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for da, ca in a.items():
        for db, cb in b.items():
            d = da + db
            s = out.get(d, Fraction(0)) + ca * cb
            if s:
                out[d] = s
            else:
                out.pop(d, None)
    return out


def _poly1_sub(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    out = dict(a)
    for d, c in b.items():
        s = out.get(d, Fraction(0)) - c
        if s:
            out[d] = s
        else:
            out.pop(d, None)
    return out


def _det_poly(rows: list[list[dict[int, Fraction]]]) -> dict[int, Fraction]:
    n = len(rows)
    if n == 0:
        return {0: Fraction(1)}
    if n == 1:
        return dict(rows[0][0])
    out: dict[int, Fraction] = {}
    for j in range(n):
        entry = rows[0][j]
        if not entry:
            continue
        minor = [[rows[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = _poly1_mul(entry, _det_poly(minor))
        if j % 2:
            out = _poly1_sub(out, term)
        else:
            out = _poly1_sub(out, {d: -c for d, c in term.items()})
    return out


def sl3_parameter_scan() -> list[tuple[Fraction, Fraction]]:
    """All parameter pairs (lambda, mu) for which
    X_a = exp(x)(dx + lambda dy), X_b = exp(y)(mu dx + dy) make the sl(3)
    commutation pattern close: [X_{a+b}, X_a] = 0 = [X_{a+b}, X_b] with
    [X_a, X_b] != 0.  The constraint polynomials factor over Q; the solver
    certifies that no irrational branch was dropped."""
    ch = chart("x y", params="lam mu")
    lam, mu = ch.var("lam"), ch.var("mu")
    Xa = VectorField(ch, (ch.parse("exp(x)"), ch.parse("lam*exp(x)")))
    Xb = VectorField(ch, (ch.parse("mu*exp(y)"), ch.parse("exp(y)")))
    Xab = lie_bracket(Xa, Xb)
    eqs: list[dict[tuple[int, int], Fraction]] = []
    for f in (lie_bracket(Xab, Xa), lie_bracket(Xab, Xb)):
        for comp in f.coeffs:
            if not comp.is_zero:
                eqs.append(_coeff_poly(comp, lam, mu))
    # candidate lambda values: rational roots of the first nonzero resultant
    # eliminating mu; completeness requires the resultant to split over Q.
    res = None
    for i in range(len(eqs)):
        for j in range(i + 1, len(eqs)):
            r = _resultant(eqs[i], eqs[j], axis=1)
            if r:
                res = r
                break
        if res:
            break
    if res is None:
        raise LievecError("scan system is degenerate: all resultants vanish")
    lam_roots = _rational_roots(res)
    if lam_roots is None:
        raise LievecError("scan resultant does not split over Q")
    solutions: set[tuple[Fraction, Fraction]] = set()
    for l0 in sorted(set(lam_roots)):
        # substitute lambda and intersect the univariate systems in mu
        sub: list[dict[int, Fraction]] = []
        inconsistent = False
        for e in eqs:
            uni: dict[int, Fraction] = {}
            for (du, dv), c in e.items():
                uni[dv] = uni.get(dv, Fraction(0)) + c * l0**du
            uni = {d: c for d, c in uni.items() if c}
            if uni and max(uni) == 0:
                inconsistent = True
                break
            if uni:
                sub.append(uni)
        if inconsistent:
            continue
        if not sub:
            raise LievecError("scan has a positive-dimensional solution branch")
        g = sub[0]
        for p in sub[1:]:
            g = _uni_gcd(g, p)
        if not g:
            raise LievecError("scan has a positive-dimensional solution branch")
        if max(g) == 0:
            continue
        mu_roots = _rational_roots(g)
        if mu_roots is None:
            raise LievecError("scan gcd does not split over Q")
        for m0 in set(mu_roots):
            if all(_biv_eval(e, l0, m0) == 0 for e in eqs):
                solutions.add((l0, m0))
    # nondegeneracy: [X_a, X_b] must not vanish
    out = []
    for l0, m0 in sorted(solutions):
        vals = [comp.substitute({lam: Expr.const(l0), mu: Expr.const(m0)}) for comp in Xab.coeffs]
        if any(not v.is_zero for v in vals):
            out.append((l0, m0))
    return out


def _biv_eval(p: dict[tuple[int, int], Fraction], l0: Fraction, m0: Fraction) -> Fraction:
    return sum((c * l0**du * m0**dv for (du, dv), c in p.items()), Fraction(0))


# ---------------------------------------------------------------------------
# Abelian chains of type A_n
# ---------------------------------------------------------------------------


def abelian_chain(
    datum: RootDatum,
    end: str = "right",
    trials: int = 5,
    seed: int = DEFAULT_SEED,
) -> list[tuple[str, VectorField]]:
    """Root vectors for the roots whose support contains the chosen end node
    of the A_n diagram: right -> {a_i + ... + a_n}, left -> {a_1 + ... + a_i}.
    Built by bracketing the simple vectors, so the fields carry the natural
    normalization; pairwise commutativity and full generic rank are verified."""
    if end not in ("right", "left"):
        raise ValueError("end must be 'right' or 'left'")
    if type_a_sign(datum.cartan_matrix) is None:
        raise LievecError("root datum is not of type A_n (chain order)")
    simple = [datum.basis.field(s) for s in datum.simple_names]
    n = len(simple)
    chain: list[tuple[str, VectorField]] = []
    if end == "right":
        tail = simple[n - 1]
        chain.append((f"X{root_letters(n - 1, n - 1)}", tail))
        for i in range(n - 2, -1, -1):
            tail = lie_bracket(simple[i], tail)
            chain.append((f"X{root_letters(i, n - 1)}", tail))
        chain.reverse()
    else:
        head = simple[0]
        chain.append((f"X{root_letters(0, 0)}", head))
        for i in range(1, n):
            head = lie_bracket(simple[i], head)
            chain.append((f"X{root_letters(0, i)}", head))
    fields = [f for _n, f in chain]
    for i in range(n):
        if fields[i].is_zero:
            raise LievecError(f"chain vector {chain[i][0]} vanished; datum is not A_n-split")
        for j in range(i + 1, n):
            if not lie_bracket(fields[i], fields[j]).is_zero:
                raise LievecError(
                    f"chain is not abelian: [{chain[i][0]}, {chain[j][0]}] != 0"
                )
    r = generic_rank(fields, trials=trials, seed=seed)
    if r != n:
        raise LievecError(f"chain has generic rank {r}, expected {n}")
    return chain
