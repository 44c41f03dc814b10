"""Finite-dimensional Lie algebras of vector fields: bracket closure,
structure constants, adjoint eigenvalues, root decomposition, generic rank.

Linear independence over Q is decided exactly on coefficient-monomial
matrices; when components carry polynomial denominators they are cleared by
a common (lcm) denominator per direction first.  Generic rank is the one
sampling-based operation: exact rational evaluation at seeded random rational
points, resampling on singular points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as _int_gcd
from typing import Sequence

from .errors import (
    ChartMismatchError,
    NotClosedError,
    NotEigenvectorError,
    NotInSpanError,
    RankSamplingError,
    RootDecompositionError,
    SingularPointError,
)
from .expr import Expr, denominator_expr, expr_lcm
from .fields import Chart, VectorField, lie_bracket
from .linalg import SparseEchelon, rat_rank, rat_solve_unique

DEFAULT_SEED = 12345
_MAX_RETRIES = 25


@dataclass(frozen=True)
class LieBasis:
    """Named, Q-linearly-independent vector fields on a shared chart."""

    chart: Chart
    names: tuple[str, ...]
    fields: tuple[VectorField, ...]

    def __post_init__(self):
        if len(self.names) != len(self.fields):
            raise ValueError("names/fields length mismatch")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate basis names")
        for f in self.fields:
            if f.chart != self.chart:
                raise ChartMismatchError("basis fields must share one chart")

    def __len__(self) -> int:
        return len(self.fields)

    @property
    def dim(self) -> int:
        return len(self.fields)

    def field(self, name: str) -> VectorField:
        return self.fields[self.names.index(name)]

    def named(self) -> list[tuple[str, VectorField]]:
        return list(zip(self.names, self.fields))


def lie_basis(named_fields: Sequence[tuple[str, VectorField]]) -> LieBasis:
    names = tuple(n for n, _f in named_fields)
    fields = tuple(f for _n, f in named_fields)
    b = LieBasis(fields[0].chart, names, fields)
    if not independent_over_q(fields):
        raise NotInSpanError("fields are linearly dependent over Q")
    return b


# ---------------------------------------------------------------------------
# Coefficient-monomial rows
# ---------------------------------------------------------------------------


def _term_to_expr(key, c: Fraction) -> Expr:
    pows, emo = key
    e = Expr.const(c)
    for v, k in pows:
        e = e * Expr.var(v) ** k
    if emo:
        e = e * Expr.exp_linear(dict(emo))
    return e


def _field_rows(fields: Sequence[VectorField]) -> tuple[list[dict], list[Expr]]:
    """Sparse Q-rows with one column per (direction, monomial), after
    clearing each direction's denominators by their exact lcm.  Returns the
    rows and the per-direction denominators."""
    ch = fields[0].chart
    dens: list[Expr] = []
    for i in range(ch.dim):
        d = Expr.one()
        for f in fields:
            df = denominator_expr(f.coeffs[i])
            if df != Expr.one():
                d = expr_lcm(d, df)
        dens.append(d)
    rows: list[dict] = []
    for f in fields:
        if f.chart != ch:
            raise ChartMismatchError("fields must share one chart")
        row: dict = {}
        for i, c in enumerate(f.coeffs):
            scaled = c * dens[i]
            if denominator_expr(scaled) != Expr.one():
                raise NotInSpanError("common denominator failed to clear a coefficient")
            for key, coeff in scaled.num_terms:
                row[(i, key)] = coeff
        rows.append(row)
    return rows, dens


def _is_polynomial_field(f: VectorField) -> bool:
    return all(denominator_expr(c) == Expr.one() for c in f.coeffs)


class _IndependenceTracker:
    """Incremental independence testing.  Fields whose coefficients all have
    denominator 1 stream into one sparse echelon (their monomial rows are
    absolute); once a field with a real denominator shows up, every further
    test falls back to batch re-elimination with common denominators."""

    def __init__(self):
        self.fields: list[VectorField] = []
        self._ech: SparseEchelon | None = SparseEchelon()

    def _direct_row(self, f: VectorField) -> dict:
        row: dict = {}
        for i, c in enumerate(f.coeffs):
            for key, coeff in c.num_terms:
                row[(i, key)] = coeff
        return row

    def try_add(self, f: VectorField) -> bool:
        if f.is_zero:
            return False
        if self._ech is not None and _is_polynomial_field(f):
            if self._ech.insert(self._direct_row(f)):
                self.fields.append(f)
                return True
            return False
        self._ech = None
        rows, _dens = _field_rows(self.fields + [f])
        ech = SparseEchelon()
        ok = True
        for row in rows:
            ok = ech.insert(row)
        if ok:
            self.fields.append(f)
        return ok


def independent_over_q(fields: Sequence[VectorField]) -> bool:
    t = _IndependenceTracker()
    return all(t.try_add(f) for f in fields)


def express_in_basis(X: VectorField, basis: LieBasis) -> tuple[Fraction, ...]:
    """Exact coordinates of X in the basis, found by matching canonical
    monomials of every component; NotInSpanError carries the residual."""
    if X.chart != basis.chart:
        raise ChartMismatchError("field is not on the basis chart")
    rows, dens = _field_rows(list(basis.fields) + [X])
    cols: dict = {}
    for row in rows:
        for c in row:
            cols.setdefault(c, len(cols))
    n = len(basis)
    mat = [[Fraction(0)] * n for _ in range(len(cols))]
    rhs = [Fraction(0)] * len(cols)
    for j, row in enumerate(rows[:-1]):
        for c, v in row.items():
            mat[cols[c]][j] = v
    for c, v in rows[-1].items():
        rhs[cols[c]] = v
    try:
        return tuple(rat_solve_unique(mat, rhs))
    except Exception:
        # Reduce X's row against the basis rows to exhibit the residual.
        ech = SparseEchelon()
        for row in rows[:-1]:
            ech.insert(row)
        leftover, _combo = ech.reduce(rows[-1])
        index_to_col = {idx: c for c, idx in ech._col_index.items()}
        comps = [Expr.zero() for _ in X.chart.variables]
        for idx, v in leftover.items():
            i, key = index_to_col[idx]
            comps[i] = comps[i] + _term_to_expr(key, v) / dens[i]
        residual = VectorField(X.chart, tuple(comps))
        raise NotInSpanError(
            "field is not in the span of the basis", residual=residual
        ) from None


def closure_generate(
    generators: Sequence[VectorField],
    max_dim: int,
    names: Sequence[str] | None = None,
) -> LieBasis:
    """Close the generators under bracket, adjoining independent results
    until stable; errors when the dimension budget is exceeded."""
    if not generators:
        raise ValueError("need at least one generator")
    ch = generators[0].chart
    if max_dim < len(generators):
        raise ValueError("max_dim must be at least the generator count")
    if names is None:
        names = [f"G{i+1}" for i in range(len(generators))]
    tracker = _IndependenceTracker()
    basis_names: list[str] = []
    for g, nm in zip(generators, names):
        if tracker.try_add(g):
            basis_names.append(nm)
    if not tracker.fields:
        raise NotInSpanError("all generators are zero")
    frontier = list(range(len(tracker.fields)))
    while frontier:
        new_frontier: list[int] = []
        for i in frontier:
            j = 0
            while j < len(tracker.fields):
                if i != j:
                    z = lie_bracket(tracker.fields[i], tracker.fields[j])
                    if tracker.try_add(z):
                        basis_names.append(f"[{basis_names[i]},{basis_names[j]}]")
                        new_frontier.append(len(tracker.fields) - 1)
                        if len(tracker.fields) > max_dim:
                            raise NotClosedError(
                                f"closure exceeds the dimension budget {max_dim}"
                            )
                j += 1
        frontier = new_frontier
    return LieBasis(ch, tuple(basis_names), tuple(tracker.fields))


@dataclass(frozen=True)
class StructureConstants:
    """Rational tensor c[i][j][k] with [X_i, X_j] = sum_k c[i][j][k] X_k."""

    names: tuple[str, ...]
    tensor: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def entry(self, i: int, j: int, k: int) -> Fraction:
        return self.tensor[i][j][k]

    def nonzero_triples(self) -> list[tuple[int, int, int, Fraction]]:
        n = len(self.names)
        return [
            (i, j, k, self.tensor[i][j][k])
            for i in range(n)
            for j in range(n)
            for k in range(n)
            if self.tensor[i][j][k]
        ]

    def verify_antisymmetry(self) -> bool:
        n = len(self.names)
        return all(
            self.tensor[i][j][k] == -self.tensor[j][i][k]
            for i in range(n)
            for j in range(i, n)
            for k in range(n)
        )

    def verify_jacobi(self) -> bool:
        n = len(self.names)
        c = self.tensor
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for l in range(n):
                        s = Fraction(0)
                        for m in range(n):
                            s += (
                                c[i][j][m] * c[m][k][l]
                                + c[j][k][m] * c[m][i][l]
                                + c[k][i][m] * c[m][j][l]
                            )
                        if s:
                            return False
        return True


def structure_constants(basis: LieBasis) -> StructureConstants:
    """Full antisymmetric tensor; brackets escaping the span raise, and
    antisymmetry plus the Jacobi identity are re-verified on the tensor."""
    n = len(basis)
    zero = tuple(Fraction(0) for _ in range(n))
    tensor = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            z = lie_bracket(basis.fields[i], basis.fields[j])
            if z.is_zero:
                continue
            try:
                coeffs = express_in_basis(z, basis)
            except NotInSpanError as err:
                raise NotInSpanError(
                    f"[{basis.names[i]}, {basis.names[j]}] escapes the span; basis not closed",
                    residual=err.residual,
                ) from err
            tensor[i][j] = coeffs
            tensor[j][i] = tuple(-c for c in coeffs)
    sc = StructureConstants(basis.names, tuple(tuple(row) for row in tensor))
    if not sc.verify_antisymmetry() or not sc.verify_jacobi():
        raise NotClosedError("structure constants violate antisymmetry or Jacobi")
    return sc


def ad_eigenvalue(H: VectorField, X: VectorField) -> Fraction:
    """The exact lambda with [H, X] = lambda * X; raises when X is not an
    eigenvector (or is zero)."""
    if X.is_zero:
        raise NotEigenvectorError("the zero field is not an eigenvector")
    z = lie_bracket(H, X)
    lam = None
    for zc, xc in zip(z.coeffs, X.coeffs):
        if xc.is_zero:
            if not zc.is_zero:
                raise NotEigenvectorError("bracket is not proportional to the field")
            continue
        cand = zc / xc
        if not cand.is_constant():
            raise NotEigenvectorError("bracket/field ratio is not constant")
        lam_c = cand.as_fraction()
        if lam is None:
            lam = lam_c
        elif lam != lam_c:
            raise NotEigenvectorError("bracket is not proportional to the field")
    return lam if lam is not None else Fraction(0)


@dataclass(frozen=True)
class RootDatum:
    """Roots of a split basis: eigenvalue rows under the Cartan fields,
    integer coordinates in the caller-designated simple-root lattice, and the
    Cartan matrix c[i][j] = alpha_j(H_i)."""

    basis: LieBasis
    cartan_names: tuple[str, ...]
    cartan_fields: tuple[VectorField, ...]
    simple_names: tuple[str, ...]
    eigen: tuple[tuple[str, tuple[Fraction, ...]], ...]  # non-Cartan members
    roots: tuple[tuple[str, tuple[int, ...]], ...]
    cartan_matrix: tuple[tuple[Fraction, ...], ...]

    def root_of(self, name: str) -> tuple[int, ...]:
        return dict(self.roots)[name]

    def name_of_root(self, root: Sequence[int]) -> str:
        inv = {r: n for n, r in self.roots}
        return inv[tuple(root)]

    def positive_roots(self) -> list[tuple[int, ...]]:
        out = []
        for _n, r in self.roots:
            nz = [c for c in r if c]
            if nz and nz[0] > 0:
                out.append(r)
        return sorted(out)

    @property
    def rank(self) -> int:
        return len(self.simple_names)


def root_decomposition(
    basis: LieBasis,
    cartan: Sequence[VectorField],
    simple: Sequence[str],
    cartan_names: Sequence[str] | None = None,
) -> RootDatum:
    """Simultaneous ad-eigendecomposition of the basis under the given
    commuting Cartan fields; the caller designates the simple root vectors."""
    for a in range(len(cartan)):
        for b in range(a + 1, len(cartan)):
            if not lie_bracket(cartan[a], cartan[b]).is_zero:
                raise RootDecompositionError("cartan fields do not commute")
    if cartan_names is None:
        cartan_names = [f"H{i+1}" for i in range(len(cartan))]
    eigen: list[tuple[str, tuple[Fraction, ...]]] = []
    for name, f in basis.named():
        try:
            t = tuple(ad_eigenvalue(H, f) for H in cartan)
        except NotEigenvectorError as err:
            raise RootDecompositionError(
                f"ad action is not diagonal on basis element {name}"
            ) from err
        if any(t):
            eigen.append((name, t))
    eig_map = dict(eigen)
    for s in simple:
        if s not in eig_map:
            raise RootDecompositionError(f"designated simple vector {s} has zero root")
    simple_rows = [eig_map[s] for s in simple]
    n = len(simple)
    roots: list[tuple[str, tuple[int, ...]]] = []
    seen: dict[tuple[int, ...], str] = {}
    for name, t in eigen:
        mat = [[simple_rows[j][i] for j in range(n)] for i in range(len(cartan))]
        sol = rat_solve_unique(mat, list(t))
        coords = []
        for c in sol:
            if c.denominator != 1:
                raise RootDecompositionError(
                    f"root of {name} has non-integral coordinate {c} in the simple lattice"
                )
            coords.append(int(c))
        r = tuple(coords)
        if r in seen:
            raise RootDecompositionError(
                f"root multiplicity > 1: {name} and {seen[r]} share {r}"
            )
        seen[r] = name
        roots.append((name, r))
    cmatrix = tuple(tuple(eig_map[s][i] for s in simple) for i in range(len(cartan)))
    return RootDatum(
        basis=basis,
        cartan_names=tuple(cartan_names),
        cartan_fields=tuple(cartan),
        simple_names=tuple(simple),
        eigen=tuple(eigen),
        roots=tuple(roots),
        cartan_matrix=cmatrix,
    )


def type_a_sign(cartan_matrix: Sequence[Sequence[Fraction]]) -> int | None:
    """+1/-1 when the matrix is exactly +/- the A_n Cartan matrix in the
    given (chain) order; None otherwise."""
    n = len(cartan_matrix)
    if n == 0 or any(len(row) != n for row in cartan_matrix):
        return None
    for sign in (1, -1):
        if all(
            cartan_matrix[i][j] == sign * (2 if i == j else (-1 if abs(i - j) == 1 else 0))
            for i in range(n)
            for j in range(n)
        ):
            return sign
    return None


# ---------------------------------------------------------------------------
# Generic rank
# ---------------------------------------------------------------------------


def generic_rank(
    fields: Sequence[VectorField],
    trials: int = 5,
    seed: int = DEFAULT_SEED,
) -> int:
    """Max exact rank of the N x k coefficient matrix over `trials` seeded
    random rational sample points.  Exp atoms are sampled as independent
    nonzero rationals (valid generically: exp values are algebraically
    independent of their base points); sampling resamples on singular points,
    up to 25 retries per trial."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not fields:
        return 0
    ch = fields[0].chart
    for f in fields:
        if f.chart != ch:
            raise ChartMismatchError("fields must share one chart")
    vars_seen: set = set()
    exp_seen: set = set()
    exp_lcm: dict = {}
    for f in fields:
        for c in f.coeffs:
            vars_seen |= c.variables()
            exp_seen |= c.exp_variables()
            for (_p, emo), _c in c.num_terms:
                for v, q in emo:
                    d = Fraction(q).denominator
                    exp_lcm[v] = exp_lcm.get(v, 1) * d // _int_gcd(exp_lcm.get(v, 1), d)
    rng = random.Random(seed)
    best = 0
    cap = min(ch.dim, len(fields))
    for _trial in range(trials):
        for _attempt in range(_MAX_RETRIES):
            point = {v: Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for v in vars_seen}
            exp_vals = {}
            for v in exp_seen:
                base = Fraction(rng.choice([i for i in range(-6, 7) if i]))
                exp_vals[v] = base ** exp_lcm.get(v, 1)
            try:
                rows = [[c.eval_at(point, exp_vals) for c in f.coeffs] for f in fields]
            except SingularPointError:
                continue
            best = max(best, rat_rank(rows))
            break
        else:
            raise RankSamplingError("all sample points hit singularities")
        if best == cap:
            break
    return best
