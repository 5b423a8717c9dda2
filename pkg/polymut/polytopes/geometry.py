from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import cdd
import sympy

from polymut.exceptions import EmptyPolytopeError, UnboundedError, ValidationError
from polymut.logger import get_logger
from polymut.polytopes.common import (
	Vector,
	as_fraction,
	as_vector,
	clear_denominators,
	dot,
	format_vector,
	lcm_all,
)

_logger = get_logger("geometry")

NUMBER_TYPE = "fraction"

IntVector = Tuple[int, ...]


@dataclass(frozen=True)
class HalfSpace:
	"""normal . x <= bound, integral and gcd-reduced."""

	normal: IntVector
	bound: int

	def holds(self, x: Sequence[Any]) -> bool:
		return dot(self.normal, x) <= self.bound

	def as_row(self) -> List[int]:
		return [*self.normal, self.bound]


@dataclass(frozen=True)
class AffineEquation:
	"""normal . x == bound, integral, gcd-reduced, leading nonzero entry positive."""

	normal: IntVector
	bound: int

	def holds(self, x: Sequence[Any]) -> bool:
		return dot(self.normal, x) == self.bound

	def as_row(self) -> List[int]:
		return [*self.normal, self.bound]


def _integral_row(normal: Sequence[Any], bound: Any) -> IntVector:
	values = [as_fraction(v) for v in normal]
	if not any(values):
		raise ValidationError("Constraint normal must be nonzero.")
	return clear_denominators([*values, as_fraction(bound)])


def halfspace(normal: Sequence[Any], bound: Any) -> HalfSpace:
	row = _integral_row(normal, bound)
	return HalfSpace(tuple(row[:-1]), row[-1])


def equation(normal: Sequence[Any], bound: Any) -> AffineEquation:
	row = _integral_row(normal, bound)
	lead = next(v for v in row[:-1] if v)
	if lead < 0:
		row = tuple(-v for v in row)
	return AffineEquation(tuple(row[:-1]), row[-1])


def _dedupe(items: Iterable[Any]) -> Tuple[Any, ...]:
	return tuple(dict.fromkeys(items))


class Polytope:
	"""Exact rational polytope given by an H-representation, with lazily cached vertices."""

	def __init__(
		self,
		ambient: Sequence[str] | int,
		inequalities: Iterable[HalfSpace] = (),
		equations: Iterable[AffineEquation] = (),
	) -> None:
		if isinstance(ambient, int):
			ambient = [f"x{i + 1}" for i in range(ambient)]
		self.ambient: Tuple[str, ...] = tuple(str(a) for a in ambient)
		self.inequalities: Tuple[HalfSpace, ...] = _dedupe(inequalities)
		self.equations: Tuple[AffineEquation, ...] = _dedupe(equations)
		for c in (*self.inequalities, *self.equations):
			if len(c.normal) != len(self.ambient):
				raise ValidationError(
					f"Constraint has {len(c.normal)} coefficients, ambient dimension is {len(self.ambient)}."
				)
		self._lock = threading.Lock()
		self._vertices: Optional[Tuple[Vector, ...]] = None
		self._dim: Optional[int] = None
		self._plan: Optional[_CountPlan] = None

	@property
	def ambient_dim(self) -> int:
		return len(self.ambient)

	def vertices(self) -> Tuple[Vector, ...]:
		return enumerate_vertices(self)

	def is_empty(self) -> bool:
		return not enumerate_vertices(self)

	def __getstate__(self) -> Dict[str, Any]:
		state = dict(self.__dict__)
		state.pop("_lock", None)
		return state

	def __setstate__(self, state: Dict[str, Any]) -> None:
		self.__dict__.update(state)
		self._lock = threading.Lock()

	def __repr__(self) -> str:
		return (
			f"Polytope(ambient_dim={self.ambient_dim}, inequalities={len(self.inequalities)}, "
			f"equations={len(self.equations)})"
		)


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
	return sum(x * y for x, y in zip(a, b))


def _cdd_convert(
	rows: Sequence[Sequence[Any]], linear: Sequence[Sequence[Any]], rep_type: cdd.RepType
) -> Tuple[List[Vector], frozenset]:
	"""Convert between H- and V-representations with cddlib in exact rational arithmetic.

	H-rows are [b, -a] for a . x <= b; V-rows are [1, *point] or [0, *ray].
	Returns the rows of the other representation and the indices of its linearity set.
	"""
	mat = cdd.Matrix([list(r) for r in rows], number_type=NUMBER_TYPE)
	if linear:
		mat.extend([list(r) for r in linear], linear=True)
	mat.rep_type = rep_type
	poly = cdd.Polyhedron(mat)
	if rep_type == cdd.RepType.INEQUALITY:
		out = poly.get_generators()
	else:
		out = poly.get_inequalities()
	return [as_vector(out[i]) for i in range(out.row_size)], frozenset(out.lin_set)


@dataclass(frozen=True)
class _Affine:
	"""x = origin + sum_j t_j * basis[j]; t_j is the coordinate x[free[j]]."""

	free: Tuple[int, ...]
	origin: Vector
	basis: Tuple[Vector, ...]

	def lift(self, t: Sequence[Any]) -> Vector:
		out = list(self.origin)
		for tj, column in zip(t, self.basis):
			if tj:
				for c, v in enumerate(column):
					if v:
						out[c] += tj * v
		return tuple(out)

	def pivots(self) -> Tuple[int, ...]:
		free = set(self.free)
		return tuple(c for c in range(len(self.origin)) if c not in free)


def _sym(value: Any) -> sympy.Rational:
	q = as_fraction(value)
	return sympy.Rational(q.numerator, q.denominator)


def _solve_equations(rows: Sequence[Sequence[Any]], dim: int) -> Optional[_Affine]:
	"""Parametrize {x : rows} with pivots on the highest-index coordinates; None if inconsistent."""
	zero = Fraction(0)
	if not rows:
		identity = tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim))
		return _Affine(tuple(range(dim)), tuple(zero for _ in range(dim)), identity)
	order = list(reversed(range(dim)))
	matrix = sympy.Matrix([[_sym(row[c]) for c in order] + [_sym(row[dim])] for row in rows])
	reduced, pivot_cols = matrix.rref()
	if dim in pivot_cols:
		return None
	pivot_coords = [order[c] for c in pivot_cols]
	free = tuple(c for c in range(dim) if c not in set(pivot_coords))
	origin = [zero] * dim
	for r, coord in enumerate(pivot_coords):
		origin[coord] = as_fraction(reduced[r, dim])
	basis = []
	for f in free:
		column = [zero] * dim
		column[f] = Fraction(1)
		for r, coord in enumerate(pivot_coords):
			column[coord] = -as_fraction(reduced[r, order.index(f)])
		basis.append(tuple(column))
	return _Affine(free, tuple(origin), tuple(basis))


def enumerate_vertices(polytope: Polytope) -> Tuple[Vector, ...]:
	"""Exact vertex set, sorted lexicographically; empty for an infeasible system."""
	cached = polytope._vertices
	if cached is not None:
		return cached
	with polytope._lock:
		if polytope._vertices is None:
			polytope._vertices = _compute_vertices(polytope)
		return polytope._vertices


def _h_row(normal: Sequence[int], bound: int) -> List[int]:
	return [bound, *(-a for a in normal)]


def _compute_vertices(polytope: Polytope) -> Tuple[Vector, ...]:
	dim = polytope.ambient_dim
	if dim == 0:
		return ((),)
	rows = [[1] + [0] * dim] + [_h_row(h.normal, h.bound) for h in polytope.inequalities]
	linear = [_h_row(e.normal, e.bound) for e in polytope.equations]
	generators, lines = _cdd_convert(rows, linear, cdd.RepType.INEQUALITY)
	points = [g for i, g in enumerate(generators) if i not in lines and g[0] != 0]
	if not points:
		return ()
	if lines or len(points) < len(generators):
		raise UnboundedError(
			"Polytope is unbounded: a recession direction exists.", details={"ambient_dim": dim}
		)
	out = sorted({tuple(c / g[0] for c in g[1:]) for g in points})
	_logger.debug("vertex enumeration: %s constraints, %s vertices", len(rows) + len(linear) - 1, len(out))
	return tuple(out)


def _rank(rows: Sequence[Sequence[Any]]) -> int:
	if not rows:
		return 0
	return int(sympy.Matrix([[_sym(v) for v in row] for row in rows]).rank())


def hull(points: Iterable[Sequence[Any]], ambient: Sequence[str] | int | None = None) -> Polytope:
	"""H-representation of the convex hull of finitely many rational points."""
	pts = sorted({as_vector(p) for p in points})
	if not pts:
		raise ValidationError("Convex hull needs at least one point.")
	dim = len(pts[0])
	if any(len(p) != dim for p in pts):
		raise ValidationError("All points must have the same dimension.")
	base = pts[0]
	diffs = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
	if diffs:
		null = sympy.Matrix([[_sym(v) for v in row] for row in diffs]).nullspace()
		normals = [[as_fraction(v) for v in vec] for vec in null]
	else:
		normals = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
	eqs = [equation(n, dot(n, base)) for n in normals]
	inequalities: List[HalfSpace] = []
	if len(eqs) < dim:
		facets, lines = _cdd_convert([[1, *p] for p in pts], [], cdd.RepType.GENERATOR)
		for i, row in enumerate(facets):
			normal = [-v for v in row[1:]]
			if i in lines or not any(normal):
				continue
			inequalities.append(halfspace(normal, row[0]))
	out = Polytope(dim if ambient is None else ambient, inequalities, eqs)
	eq_normals = [e.normal for e in out.equations]
	out._vertices = tuple(p for p in pts if _is_extreme(p, out.inequalities, eq_normals, dim))
	return out


def _is_extreme(
	point: Vector, inequalities: Sequence[HalfSpace], eq_normals: Sequence[Sequence[int]], dim: int
) -> bool:
	if len(eq_normals) == dim:
		return True
	tight = [h.normal for h in inequalities if dot(h.normal, point) == h.bound]
	return _rank([*tight, *eq_normals]) == dim


def contains(polytope: Polytope, x: Sequence[Any]) -> bool:
	point = as_vector(x)
	if len(point) != polytope.ambient_dim:
		raise ValidationError(f"Point has {len(point)} coordinates, ambient dimension is {polytope.ambient_dim}.")
	if not all(e.holds(point) for e in polytope.equations):
		return False
	return all(h.holds(point) for h in polytope.inequalities)


def _check_same_ambient(p: Polytope, q: Polytope) -> None:
	if p.ambient_dim != q.ambient_dim:
		raise ValidationError(f"Ambient dimensions differ: {p.ambient_dim} vs {q.ambient_dim}.")


def polytopes_equal(p: Polytope, q: Polytope) -> bool:
	_check_same_ambient(p, q)
	return enumerate_vertices(p) == enumerate_vertices(q)


def intersect(polytope: Polytope, equations: Iterable[AffineEquation]) -> Polytope:
	return Polytope(polytope.ambient, polytope.inequalities, (*polytope.equations, *equations))


def restrict(polytope: Polytope, inequalities: Iterable[HalfSpace]) -> Polytope:
	return Polytope(polytope.ambient, (*polytope.inequalities, *inequalities), polytope.equations)


def denominator(polytope: Polytope) -> int:
	verts = enumerate_vertices(polytope)
	if not verts:
		raise EmptyPolytopeError("The denominator of an empty polytope is undefined.")
	return lcm_all(c.denominator for v in verts for c in v)


def dimension(polytope: Polytope) -> int:
	if polytope._dim is None:
		verts = enumerate_vertices(polytope)
		if not verts:
			polytope._dim = -1
		else:
			polytope._dim = _rank([[a - b for a, b in zip(v, verts[0])] for v in verts[1:]])
	return polytope._dim


def dilate(polytope: Polytope, k: int) -> Polytope:
	if isinstance(k, bool) or not isinstance(k, int) or k < 1:
		raise ValidationError(f"Dilation factor must be a positive integer, got {k!r}.")
	out = Polytope(
		polytope.ambient,
		[HalfSpace(h.normal, h.bound * k) for h in polytope.inequalities],
		[AffineEquation(e.normal, e.bound * k) for e in polytope.equations],
	)
	if polytope._vertices is not None:
		out._vertices = tuple(tuple(c * k for c in v) for v in polytope._vertices)
	return out


@dataclass(frozen=True)
class _Level:
	"""Bounds on t_i given t_1..t_{i-1}; rows are (a_i, a_prefix, b) meaning a_i t_i + a_prefix . t <= n b."""

	upper: Tuple[Tuple[int, IntVector, int], ...]
	lower: Tuple[Tuple[int, IntVector, int], ...]
	pinned: Tuple[Tuple[int, IntVector, int], ...]


@dataclass(frozen=True)
class _CountPlan:
	"""Picklable description of a lattice-point enumeration in free coordinates."""

	empty: bool
	levels: Tuple[_Level, ...]
	# pivot coordinates as (den, constant*den, integer coefficients*den) over the free coordinates
	pivots: Tuple[Tuple[int, int, IntVector], ...]
	last_level_closed: bool


def _level_rows(polytope: Polytope, level: int) -> _Level:
	upper, lower, pinned = [], [], []
	for h in polytope.inequalities:
		a = h.normal[level]
		if a > 0:
			upper.append((a, h.normal[:level], h.bound))
		elif a < 0:
			lower.append((a, h.normal[:level], h.bound))
	for e in polytope.equations:
		if e.normal[level]:
			pinned.append((e.normal[level], e.normal[:level], e.bound))
	return _Level(tuple(upper), tuple(lower), tuple(pinned))


def _build_plan(polytope: Polytope) -> _CountPlan:
	verts = enumerate_vertices(polytope)
	if not verts:
		return _CountPlan(True, (), (), False)
	affine = _solve_equations([e.as_row() for e in polytope.equations], polytope.ambient_dim)
	free = affine.free
	levels = []
	for i in range(1, len(free) + 1):
		projected = hull([tuple(v[c] for c in free[:i]) for v in verts])
		levels.append(_level_rows(projected, i - 1))
	pivots = []
	for c in affine.pivots():
		coeffs = [column[c] for column in affine.basis]
		den = lcm_all([affine.origin[c].denominator, *(q.denominator for q in coeffs)])
		if den == 1:
			continue
		pivots.append((den, int(affine.origin[c] * den), tuple(int(q * den) for q in coeffs)))
	closed = bool(free) and all(coeffs[-1] % den == 0 for den, _, coeffs in pivots)
	return _CountPlan(False, tuple(levels), tuple(pivots), closed)


def count_plan(polytope: Polytope) -> _CountPlan:
	if polytope._plan is None:
		plan = _build_plan(polytope)
		with polytope._lock:
			if polytope._plan is None:
				polytope._plan = plan
	return polytope._plan


def _pivots_integral(plan: _CountPlan, n: int, t: Sequence[int]) -> bool:
	for den, const, coeffs in plan.pivots:
		if (n * const + _idot(coeffs, t)) % den:
			return False
	return True


def _bounds(level: _Level, n: int, prefix: Sequence[int]) -> Optional[Tuple[int, int]]:
	lo: Optional[int] = None
	hi: Optional[int] = None
	for a, rest, b in level.upper:
		value = (n * b - _idot(rest, prefix)) // a
		hi = value if hi is None or value < hi else hi
	for a, rest, b in level.lower:
		value = -((-(n * b - _idot(rest, prefix))) // a)
		lo = value if lo is None or value > lo else lo
	for a, rest, b in level.pinned:
		rhs = n * b - _idot(rest, prefix)
		if rhs % a:
			return None
		value = rhs // a
		hi = value if hi is None or value < hi else hi
		lo = value if lo is None or value > lo else lo
	if lo is None or hi is None:
		raise UnboundedError("Projection level has no finite bound.")
	if lo > hi:
		return None
	return lo, hi


def _count_from(plan: _CountPlan, n: int, prefix: List[int]) -> int:
	depth = len(prefix)
	span = _bounds(plan.levels[depth], n, prefix)
	if span is None:
		return 0
	lo, hi = span
	if depth == len(plan.levels) - 1:
		if plan.last_level_closed:
			return hi - lo + 1 if _pivots_integral(plan, n, [*prefix, lo]) else 0
		return sum(1 for v in range(lo, hi + 1) if _pivots_integral(plan, n, [*prefix, v]))
	total = 0
	for v in range(lo, hi + 1):
		prefix.append(v)
		total += _count_from(plan, n, prefix)
		prefix.pop()
	return total


def count_with_plan(plan: _CountPlan, n: int) -> int:
	if plan.empty:
		return 0
	if n == 0:
		return 1
	if not plan.levels:
		return 1 if _pivots_integral(plan, n, []) else 0
	return _count_from(plan, n, [])


def count_lattice_points(polytope: Polytope, n: int) -> int:
	"""|nP cap Z^N| by depth-first search over the free coordinates with exact projected bounds."""
	if isinstance(n, bool) or not isinstance(n, int) or n < 0:
		raise ValidationError(f"Dilate must be a nonnegative integer, got {n!r}.")
	return count_with_plan(count_plan(polytope), n)


def count_lattice_points_naive(polytope: Polytope, n: int, *, limit: int = 10**6) -> int:
	if isinstance(n, bool) or not isinstance(n, int) or n < 0:
		raise ValidationError(f"Dilate must be a nonnegative integer, got {n!r}.")
	verts = enumerate_vertices(polytope)
	if not verts:
		return 0
	ranges = []
	size = 1
	for c in range(polytope.ambient_dim):
		lo = min(v[c] for v in verts) * n
		hi = max(v[c] for v in verts) * n
		span = range(-((-lo.numerator) // lo.denominator), hi.numerator // hi.denominator + 1)
		size *= len(span)
		ranges.append(span)
	if size > limit:
		raise ValidationError(f"Bounding box has {size} candidates, above the limit {limit}.")
	eqs = [(e.normal, e.bound * n) for e in polytope.equations]
	ineqs = [(h.normal, h.bound * n) for h in polytope.inequalities]
	total = 0
	for x in itertools.product(*ranges):
		if all(_idot(a, x) == b for a, b in eqs) and all(_idot(a, x) <= b for a, b in ineqs):
			total += 1
	return total


def to_json(polytope: Polytope) -> Dict[str, Any]:
	return {
		"ambient": list(polytope.ambient),
		"inequalities": [h.as_row() for h in polytope.inequalities],
		"equations": [e.as_row() for e in polytope.equations],
		"vertices": [format_vector(v) for v in enumerate_vertices(polytope)],
	}


def _json_rows(payload: Dict[str, Any], key: str) -> List[List[Any]]:
	rows = payload.get(key) or []
	if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
		raise ValidationError(f"Polytope JSON '{key}' must be a list of rows.", details={"key": key})
	return rows


def from_json(payload: Dict[str, Any]) -> Polytope:
	"""Rebuild from the H-representation; a vertex-only payload is rebuilt as a hull."""
	if not isinstance(payload, dict):
		raise ValidationError("Polytope JSON must be an object.")
	ambient = payload.get("ambient")
	if ambient is not None and (isinstance(ambient, bool) or not isinstance(ambient, (int, list))):
		raise ValidationError("Polytope JSON 'ambient' must be a list of labels or an integer.")
	ineq_rows = _json_rows(payload, "inequalities")
	eq_rows = _json_rows(payload, "equations")
	if not ineq_rows and not eq_rows:
		points = _json_rows(payload, "vertices")
		if not points:
			raise ValidationError("Polytope JSON needs constraints or vertices.")
		return hull(points, ambient=ambient)
	widths = {len(row) for row in (*ineq_rows, *eq_rows)}
	if len(widths) != 1 or min(widths) < 2:
		raise ValidationError(
			"Constraint rows must share one length of at least two.", details={"lengths": sorted(widths)}
		)
	if not ambient:
		ambient = widths.pop() - 1
	return Polytope(
		ambient,
		[halfspace(row[:-1], row[-1]) for row in ineq_rows],
		[equation(row[:-1], row[-1]) for row in eq_rows],
	)
