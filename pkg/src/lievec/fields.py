"""Vector fields on a chart: directional derivative, Lie bracket, and
pushforward under invertible point maps.

A PointMap stores BOTH directions as substitution bindings.  Keys are either
plain variables (u -> F(x, y)) or exp atoms (exp(x) -> G(u, v)); the latter
make exponential coordinate changes invertible without a log primitive, the
way "exp(z) = -1/w" inverts w = -exp(-z).  Because the representation is
symmetric, `inverse_map()` is a data swap, and pushing a field through an
"inverse-exponential" map is as exact as through a polynomial one.

All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    ChartMismatchError,
    MapVerificationError,
    UnsupportedMapError,
)
from .expr import ExpAtom, Expr, Scalar, Variable, parse_expr

BindingKey = Union[Variable, ExpAtom]


@dataclass(frozen=True)
class Chart:
    """An ordered tuple of coordinate variables, plus symbolic parameters.

    Parameters (constants like the k in y'' = k) take part in expressions but
    are not coordinate directions.
    """

    variables: tuple[Variable, ...]
    params: tuple[Variable, ...] = ()

    def __post_init__(self):
        if not self.variables:
            raise ValueError("a chart needs at least one variable")
        names = [v.name for v in self.variables + self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate names in chart: {names}")
        for p in self.params:
            if not p.is_base:
                raise ValueError("parameters must be base variables")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def var(self, name: str) -> Variable:
        for v in self.variables + self.params:
            if v.name == name:
                return v
        raise KeyError(f"no variable {name!r} in chart")

    def allowed(self) -> frozenset:
        return frozenset(self.variables) | frozenset(self.params)

    def parse(self, text: str) -> Expr:
        return parse_expr(text, self.variables + self.params)

    def check_expr(self, e: Expr, what: str = "expression"):
        extra = e.variables() - self.allowed()
        if extra:
            names = sorted(v.name for v in extra)
            raise ChartMismatchError(f"{what} uses variables {names} outside the chart")

    def __str__(self) -> str:
        return "(" + ", ".join(v.name for v in self.variables) + ")"


def chart(names: str | Sequence[str], params: str | Sequence[str] = ()) -> Chart:
    """Build a chart of base variables from names ('x y z' or a sequence)."""
    if isinstance(names, str):
        names = names.split()
    if isinstance(params, str):
        params = params.split()
    return Chart(tuple(Variable(n) for n in names), tuple(Variable(n) for n in params))


@dataclass(frozen=True)
class VectorField:
    """One Expr coefficient per chart direction."""

    chart: Chart
    coeffs: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.chart.dim:
            raise ValueError("coefficient count does not match the chart dimension")
        for c in self.coeffs:
            self.chart.check_expr(c, "field coefficient")

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def __add__(self, other: "VectorField") -> "VectorField":
        _same_chart(self, other)
        return VectorField(self.chart, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        _same_chart(self, other)
        return VectorField(self.chart, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, tuple(-c for c in self.coeffs))

    def scale(self, s: Expr | Scalar) -> "VectorField":
        return VectorField(self.chart, tuple(c * s for c in self.coeffs))

    def __str__(self) -> str:
        parts = [
            f"({c})*D[{v.name}]"
            for v, c in zip(self.chart.variables, self.coeffs)
            if not c.is_zero
        ]
        return " + ".join(parts) if parts else "0"


def _same_chart(x: VectorField, y: VectorField):
    if x.chart != y.chart:
        raise ChartMismatchError(f"fields live on different charts {x.chart} vs {y.chart}")


def zero_field(ch: Chart) -> VectorField:
    return VectorField(ch, tuple(Expr.zero() for _ in ch.variables))


def constant_field(ch: Chart, coeffs: Sequence[Scalar]) -> VectorField:
    return VectorField(ch, tuple(Expr.const(c) for c in coeffs))


def field_from_components(ch: Chart, comps: Mapping[str, Expr | str]) -> VectorField:
    """Build a field from {variable name: coefficient (Expr or source text)}."""
    lookup = {}
    for name, c in comps.items():
        lookup[name] = ch.parse(c) if isinstance(c, str) else c
    return VectorField(ch, tuple(lookup.get(v.name, Expr.zero()) for v in ch.variables))


def apply_field(X: VectorField, f: Expr) -> Expr:
    """Directional derivative X(f) = sum_i X_i * df/dx_i."""
    X.chart.check_expr(f, "function")
    out = Expr.zero()
    for v, c in zip(X.chart.variables, X.coeffs):
        if not c.is_zero:
            out = out + c * f.differentiate(v)
    return out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y], componentwise X(Y_k) - Y(X_k)."""
    _same_chart(X, Y)
    comps = tuple(
        apply_field(X, yk) - apply_field(Y, xk) for xk, yk in zip(X.coeffs, Y.coeffs)
    )
    return VectorField(X.chart, comps)


# ---------------------------------------------------------------------------
# Point maps
# ---------------------------------------------------------------------------


def _binding_order(ch: Chart):
    pos = {v: i for i, v in enumerate(ch.variables)}

    def order(item):
        key = item[0]
        if isinstance(key, ExpAtom):
            return (1, pos.get(key.var, len(pos)))
        return (0, pos.get(key, len(pos)))

    return order


def _key_expr(key: BindingKey) -> Expr:
    if isinstance(key, ExpAtom):
        return Expr.exp_linear({key.var: 1})
    return Expr.var(key)


def _key_str(key: BindingKey) -> str:
    return str(key)


@dataclass(frozen=True)
class PointMap:
    """Invertible coordinate change with explicit bindings both ways.

    forward: target keys (Variable or ExpAtom over the target chart) bound to
    expressions in source coordinates; inverse: source keys bound to target
    expressions.  Construction verifies that the two compositions are the
    identity on every bound key; the engine never inverts symbolically.
    """

    source: Chart
    target: Chart
    forward: tuple[tuple[BindingKey, Expr], ...]
    inverse: tuple[tuple[BindingKey, Expr], ...]

    @property
    def forward_bindings(self) -> dict:
        return dict(self.forward)

    @property
    def inverse_bindings(self) -> dict:
        return dict(self.inverse)

    def inverse_map(self) -> "PointMap":
        return PointMap(self.target, self.source, self.inverse, self.forward)

    def forward_components(self) -> dict[Variable, Expr] | None:
        """Per-variable forward expressions when every target variable has a
        plain binding; None otherwise (exp-atom style map)."""
        fb = self.forward_bindings
        comps = {}
        for v in self.target.variables:
            e = fb.get(v)
            if e is None:
                return None
            comps[v] = e
        return comps

    def verify(self):
        fb, ib = self.forward_bindings, self.inverse_bindings
        for key, e in self.forward:
            back = e.substitute(ib)
            if back != _key_expr(key):
                raise MapVerificationError(
                    f"inverse(forward({key})) = {back}, expected {_key_expr(key)}"
                )
        for key, e in self.inverse:
            back = e.substitute(fb)
            if back != _key_expr(key):
                raise MapVerificationError(
                    f"forward(inverse({key})) = {back}, expected {_key_expr(key)}"
                )

    def __str__(self) -> str:
        fw = ", ".join(f"{_key_str(k)} = {e}" for k, e in self.forward)
        return f"{self.source} -> {self.target}: {fw}"


def point_map(
    source: Chart,
    target: Chart,
    forward: Mapping[BindingKey, Expr | Scalar],
    inverse: Mapping[BindingKey, Expr | Scalar],
    verify: bool = True,
) -> PointMap:
    def norm(bindings: Mapping, value_chart: Chart, key_chart: Chart):
        out = []
        for key, e in bindings.items():
            kv = key.var if isinstance(key, ExpAtom) else key
            if kv not in key_chart.variables:
                raise UnsupportedMapError(f"binding key {key} is not a {key_chart} coordinate")
            if not isinstance(e, Expr):
                e = Expr.const(e)
            value_chart.check_expr(e, f"binding for {key}")
            out.append((key, e))
        out.sort(key=_binding_order(key_chart))
        return tuple(out)

    m = PointMap(source, target, norm(forward, source, target), norm(inverse, target, source))
    if verify:
        m.verify()
    return m


def identity_map(ch: Chart) -> PointMap:
    fwd = {v: Expr.var(v) for v in ch.variables}
    return point_map(ch, ch, fwd, dict(fwd), verify=False)


def pushforward(X: VectorField, m: PointMap) -> VectorField:
    """Image of X under m, exact.  For a plain binding u = F the component is
    X(F) written in target coordinates; for exp(u) = G it is X(G)/G, since
    Z(exp u) = Z_u * exp(u)."""
    if X.chart != m.source:
        raise ChartMismatchError("field is not on the source chart of the map")
    fb = m.forward_bindings
    ib = m.inverse_bindings
    comps = []
    for v in m.target.variables:
        if v in fb:
            val = apply_field(X, fb[v])
        elif ExpAtom(v) in fb:
            g = fb[ExpAtom(v)]
            val = apply_field(X, g) / g
        else:
            raise UnsupportedMapError(f"map defines neither {v.name} nor exp({v.name})")
        comps.append(val.substitute(ib))
    Z = VectorField(m.target, tuple(comps))
    return Z


def compose(first: PointMap, second: PointMap) -> PointMap:
    """second o first, mapping first.source to second.target."""
    if first.target != second.source:
        raise ChartMismatchError("maps do not compose: chart mismatch")
    fb1 = first.forward_bindings
    ib2 = second.inverse_bindings
    fwd = {k: e.substitute(fb1) for k, e in second.forward}
    inv = {k: e.substitute(ib2) for k, e in first.inverse}
    return point_map(first.source, second.target, fwd, inv)
