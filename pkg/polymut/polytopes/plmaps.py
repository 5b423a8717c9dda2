from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import sympy

from polymut.exceptions import EmptyPolytopeError, MutationCheckError, NotConvexError, ValidationError
from polymut.logger import append_jsonl, get_logger
from polymut.polytopes.common import Vector, as_vector, dot, format_vector, gcd_all
from polymut.polytopes.geometry import (
	AffineEquation,
	HalfSpace,
	Polytope,
	denominator,
	enumerate_vertices,
	equation,
	halfspace,
	hull,
	polytopes_equal,
	restrict,
)
from polymut.polytopes.poset import Box, UpSet, YoungDiagram, corner_flag, flag_boxes, is_linear_extension
from polymut.polytopes.posetpoly import chain_order_polytope, restricted_chain_order, restriction_hyperplanes
from polymut.settings import get_config

_logger = get_logger("plmaps")


@dataclass(frozen=True)
class TropicalMap:
	"""x -> x - min_{f in F}(x . f) * w, with F in the orthogonal complement of w."""

	w: Tuple[int, ...]
	F: Tuple[Tuple[int, ...], ...]

	kind = "tropical"

	def __post_init__(self) -> None:
		w = tuple(int(v) for v in self.w)
		factors = tuple(dict.fromkeys(tuple(int(v) for v in f) for f in self.F))
		if not any(w):
			raise ValidationError("Tropical direction w must be nonzero.")
		if gcd_all(w) != 1:
			raise ValidationError(f"Tropical direction {list(w)} is not primitive.")
		if not factors:
			raise ValidationError("Tropical factor F must have at least one vertex.")
		for f in factors:
			if len(f) != len(w):
				raise ValidationError(f"Factor vertex {list(f)} has the wrong dimension.")
			if dot(f, w) != 0:
				raise ValidationError(f"Factor vertex {list(f)} is not orthogonal to w={list(w)}.")
		object.__setattr__(self, "w", w)
		object.__setattr__(self, "F", factors)

	def as_dict(self) -> Dict[str, Any]:
		return {"kind": self.kind, "w": list(self.w), "F": [list(f) for f in self.F]}


@dataclass(frozen=True)
class UnimodularMap:
	"""x -> M x + offset with det M = +-1."""

	matrix: Tuple[Tuple[int, ...], ...]
	offset: Tuple[int, ...] = ()
	_inverse: Tuple[Tuple[int, ...], ...] = field(default=(), repr=False, compare=False)

	kind = "unimodular"

	def __post_init__(self) -> None:
		rows = tuple(tuple(int(v) for v in row) for row in self.matrix)
		size = len(rows)
		if any(len(row) != size for row in rows):
			raise ValidationError("Unimodular map needs a square matrix.")
		offset = tuple(int(v) for v in self.offset) or tuple([0] * size)
		if len(offset) != size:
			raise ValidationError("Offset dimension does not match the matrix.")
		mat = sympy.Matrix(rows) if size else sympy.zeros(0, 0)
		det = int(mat.det()) if size else 1
		if det not in (1, -1):
			raise ValidationError(f"Matrix determinant is {det}, expected +-1.")
		inverse = tuple(tuple(int(v) for v in mat.inv().row(i)) for i in range(size)) if size else ()
		object.__setattr__(self, "matrix", rows)
		object.__setattr__(self, "offset", offset)
		object.__setattr__(self, "_inverse", inverse)

	@property
	def inverse(self) -> Tuple[Tuple[int, ...], ...]:
		return self._inverse

	def as_dict(self) -> Dict[str, Any]:
		return {"kind": self.kind, "matrix": [list(r) for r in self.matrix], "offset": list(self.offset)}


MapStep = Union[TropicalMap, UnimodularMap]


def apply_tropical(m: TropicalMap, x: Sequence[Any]) -> Vector:
	point = as_vector(x)
	if len(point) != len(m.w):
		raise ValidationError(f"Point has {len(point)} coordinates, map acts on {len(m.w)}.")
	low = min(dot(point, f) for f in m.F)
	return tuple(p - low * w for p, w in zip(point, m.w))


def apply_unimodular(m: UnimodularMap, x: Sequence[Any]) -> Vector:
	point = as_vector(x)
	if len(point) != len(m.matrix):
		raise ValidationError(f"Point has {len(point)} coordinates, map acts on {len(m.matrix)}.")
	return tuple(dot(row, point) + o for row, o in zip(m.matrix, m.offset))


def apply_step(m: MapStep, x: Sequence[Any]) -> Vector:
	if isinstance(m, TropicalMap):
		return apply_tropical(m, x)
	return apply_unimodular(m, x)


def _row_times_inverse(m: UnimodularMap, normal: Sequence[int]) -> List[int]:
	size = len(m.matrix)
	return [sum(normal[r] * m.inverse[r][c] for r in range(size)) for c in range(size)]


def image_equation(m: UnimodularMap, eq: AffineEquation) -> AffineEquation:
	"""The equation cutting out the image of {a . x = b}."""
	normal = _row_times_inverse(m, eq.normal)
	return equation(normal, eq.bound + dot(normal, m.offset))


def image_halfspace(m: UnimodularMap, h: HalfSpace) -> HalfSpace:
	normal = _row_times_inverse(m, h.normal)
	return halfspace(normal, h.bound + dot(normal, m.offset))


def image_polytope(m: UnimodularMap, polytope: Polytope) -> Polytope:
	out = Polytope(
		polytope.ambient,
		[image_halfspace(m, h) for h in polytope.inequalities],
		[image_equation(m, e) for e in polytope.equations],
	)
	out._vertices = tuple(sorted(apply_unimodular(m, v) for v in enumerate_vertices(polytope)))
	return out


def preserves_equation(m: TropicalMap, eq: AffineEquation) -> bool:
	return dot(eq.normal, m.w) == 0


def fixes_polytope(m: TropicalMap, polytope: Polytope) -> bool:
	"""True when the map is the identity on the polytope: 0 is in F and min_f x . f vanishes on every vertex."""
	zero = tuple([0] * len(m.w))
	if zero not in m.F:
		return False
	return all(min(dot(v, f) for f in m.F) == 0 for v in enumerate_vertices(polytope))


def _box_vector(diagram: YoungDiagram, entries: Dict[Tuple[int, int], int]) -> Tuple[int, ...]:
	row = [0] * diagram.size
	for box, value in entries.items():
		if box in diagram:
			row[diagram.position(box)] += value
	return tuple(row)


def _check_box(diagram: YoungDiagram, r: Tuple[int, int]) -> Box:
	box = Box(*r)
	if box not in diagram:
		raise ValidationError(f"Box {tuple(box)} is not in the diagram {diagram.label()}.")
	return box


def i_max(r: Tuple[int, int]) -> int:
	return min(r) - 1


def phi_step(diagram: YoungDiagram, r: Tuple[int, int], i: int) -> TropicalMap:
	a, b = _check_box(diagram, r)
	if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i <= i_max((a, b)):
		raise ValidationError(f"Step index {i!r} outside 0..{i_max((a, b))} for box {(a, b)}.")
	w = _box_vector(diagram, {(a - i - 1, b - i - 1): 1, (a - i, b - i): -1})
	factors = (
		_box_vector(diagram, {(a - i - 1, b - i): 1}),
		_box_vector(diagram, {(a - i, b - i - 1): 1}),
	)
	return TropicalMap(w, factors)


def psi_map(diagram: YoungDiagram, r: Tuple[int, int]) -> UnimodularMap:
	box = _check_box(diagram, r)
	ell = box.diagonal
	rows = []
	for p in diagram.boxes:
		if p.diagonal != ell or box.lt(p):
			rows.append(_box_vector(diagram, {p: 1}))
		elif p == box:
			rows.append(_box_vector(diagram, {p: 1, p.shifted(-1, 0): -1, p.shifted(0, -1): -1}))
		else:
			rows.append(_box_vector(diagram, {p: -1, p.shifted(-1, 0): 1, p.shifted(0, -1): 1}))
	return UnimodularMap(tuple(rows))


def chi_decomposition(diagram: YoungDiagram, r: Tuple[int, int]) -> List[MapStep]:
	box = _check_box(diagram, r)
	steps: List[MapStep] = [phi_step(diagram, box, i) for i in range(i_max(box) + 1)]
	steps.append(psi_map(diagram, box))
	return steps


def _reader(diagram: YoungDiagram, point: Vector):
	def value(box: Box) -> Fraction:
		if box in diagram:
			return point[diagram.position(box)]
		return Fraction(0)

	return value


def _check_point(diagram: YoungDiagram, x: Sequence[Any]) -> Vector:
	point = as_vector(x)
	if len(point) != diagram.size:
		raise ValidationError(f"Point has {len(point)} coordinates, diagram has {diagram.size} boxes.")
	return point


def chi_r(diagram: YoungDiagram, r: Tuple[int, int], x: Sequence[Any]) -> Vector:
	box = _check_box(diagram, r)
	point = _check_point(diagram, x)
	value = _reader(diagram, point)
	out = list(point)
	for p in diagram.boxes:
		if p.diagonal != box.diagonal or box.lt(p):
			continue
		above = max(value(p.shifted(-1, 0)), value(p.shifted(0, -1)))
		if p == box:
			out[diagram.position(p)] = point[diagram.position(p)] - above
		else:
			below = min(value(p.shifted(1, 0)), value(p.shifted(0, 1)))
			out[diagram.position(p)] = above + below - point[diagram.position(p)]
	return tuple(out)


def chi_r_inverse(diagram: YoungDiagram, r: Tuple[int, int], x: Sequence[Any]) -> Vector:
	box = _check_box(diagram, r)
	point = _check_point(diagram, x)
	value = _reader(diagram, point)
	out = list(point)
	for p in diagram.boxes:
		if p.diagonal != box.diagonal or box.lt(p):
			continue
		above = max(value(p.shifted(-1, 0)), value(p.shifted(0, -1)))
		if p == box:
			out[diagram.position(p)] = point[diagram.position(p)] + above
		else:
			below = min(value(p.shifted(1, 0)), value(p.shifted(0, 1)))
			out[diagram.position(p)] = above + below - point[diagram.position(p)]
	return tuple(out)


def _check_extension(diagram: YoungDiagram, order: Sequence[Tuple[int, int]]) -> List[Box]:
	boxes = [Box(*b) for b in order]
	if not is_linear_extension(diagram, boxes):
		raise ValidationError(f"{[tuple(b) for b in boxes]} is not a linear extension of {diagram.label()}.")
	return boxes


def xi(diagram: YoungDiagram, linear_extension: Sequence[Tuple[int, int]], x: Sequence[Any]) -> Vector:
	"""Transfer map: chi of the last box of the extension is applied first."""
	point = _check_point(diagram, x)
	for r in reversed(_check_extension(diagram, linear_extension)):
		point = chi_r(diagram, r, point)
	return point


def xi_inverse(diagram: YoungDiagram, linear_extension: Sequence[Tuple[int, int]], y: Sequence[Any]) -> Vector:
	point = _check_point(diagram, y)
	for r in _check_extension(diagram, linear_extension):
		point = chi_r_inverse(diagram, r, point)
	return point


@dataclass(frozen=True)
class MutationCheck:
	verified: bool
	regions: int
	witness: Optional[Dict[str, Any]] = None

	@property
	def code(self) -> str:
		return "OK" if self.verified else NotConvexError.code

	def as_dict(self) -> Dict[str, Any]:
		out: Dict[str, Any] = {"verified": self.verified, "code": self.code, "regions": self.regions}
		if self.witness:
			out["witness"] = self.witness
		return out


def _region(m: TropicalMap, v: Tuple[int, ...]) -> List[HalfSpace]:
	"""U_v = {x : x . v <= x . f for all f in F}."""
	return [halfspace([a - b for a, b in zip(v, f)], 0) for f in m.F if f != v]


def mutate(polytope: Polytope, m: TropicalMap, *, require_convex: bool = False) -> Tuple[Polytope, MutationCheck]:
	"""Image under a tropical map, certified region by region: image cap U_v must equal the image of P cap U_v."""
	if len(m.w) != polytope.ambient_dim:
		raise ValidationError(f"Map acts on {len(m.w)} coordinates, polytope has {polytope.ambient_dim}.")
	if not enumerate_vertices(polytope):
		raise EmptyPolytopeError("Cannot mutate an empty polytope.")
	pieces = []
	for v in m.F:
		region = _region(m, v)
		pts = [apply_tropical(m, p) for p in enumerate_vertices(restrict(polytope, region))]
		pieces.append((v, region, pts))
	image = hull([p for _, _, pts in pieces for p in pts], ambient=polytope.ambient)
	witness: Optional[Dict[str, Any]] = None
	for v, region, pts in pieces:
		actual = enumerate_vertices(restrict(image, region))
		expected = enumerate_vertices(hull(pts, ambient=polytope.ambient)) if pts else ()
		if actual == expected:
			continue
		extra = [p for p in actual if p not in set(expected)] or [p for p in expected if p not in set(actual)]
		witness = {"region": list(v), "point": format_vector(extra[0]) if extra else []}
		break
	check = MutationCheck(witness is None, len(m.F), witness)
	if witness is not None:
		_logger.warning("tropical map is not a mutation of the polytope: %s", witness)
		if require_convex:
			raise NotConvexError("Image is not convex.", details={"map": m.as_dict(), **witness})
	return image, check


@dataclass
class TraceStep:
	index: int
	corner: Box
	map: MapStep
	verified: bool
	vertex_count: int
	denominator: int
	upset: Optional[str] = None
	polytope: Optional[Polytope] = None
	counts: Optional[List[int]] = None

	@property
	def kind(self) -> str:
		return self.map.kind

	def as_dict(self) -> Dict[str, Any]:
		out: Dict[str, Any] = {
			"index": self.index,
			"corner": list(self.corner),
			**self.map.as_dict(),
			"verified": self.verified,
			"vertex_count": self.vertex_count,
			"denominator": self.denominator,
		}
		if self.upset is not None:
			out["upset"] = self.upset
		if self.counts is not None:
			out["counts"] = self.counts
		return out


@dataclass
class MutationTrace:
	diagram: YoungDiagram
	dvector: Optional[Tuple[int, ...]]
	k: int
	flag: List[UpSet]
	start: Polytope
	end: Polytope
	steps: List[TraceStep] = field(default_factory=list)
	check_dilates: int = 0

	def polytopes(self) -> List[Polytope]:
		missing = [s.index for s in self.steps if s.polytope is None]
		if missing:
			raise ValidationError("Intermediate polytopes were not kept for this trace.")
		return [self.start, *(s.polytope for s in self.steps)]

	def as_dict(self) -> Dict[str, Any]:
		return {
			"partition": list(self.diagram.partition),
			"d": list(self.dvector) if self.dvector is not None else None,
			"k": self.k,
			"flag": [c.label() for c in self.flag],
			"start_vertex_count": len(enumerate_vertices(self.start)),
			"start_denominator": denominator(self.start),
			"check_dilates": self.check_dilates,
			"steps": [s.as_dict() for s in self.steps],
		}


def lattice_intermediates(trace: MutationTrace) -> List[int]:
	"""Indices of steps whose output is a lattice polytope, excluding the final polytope."""
	return [s.index for s in trace.steps[:-1] if s.denominator == 1]


def _build(diagram: YoungDiagram, upset: UpSet, dvector: Optional[Sequence[int]], k: int) -> Polytope:
	if dvector is None:
		return chain_order_polytope(diagram, upset, k)
	return restricted_chain_order(diagram, upset, dvector, k)


def _fail(message: str, step: Dict[str, Any], **details: Any) -> MutationCheckError:
	_logger.warning("%s at step %s", message, step)
	return MutationCheckError(message, details={"step": step, **details})


def mutation_sequence(
	diagram: YoungDiagram,
	dvector: Optional[Sequence[int]],
	k: int,
	flag: Optional[List[UpSet]] = None,
	*,
	check_dilates: Optional[int] = None,
	keep_intermediates: Optional[bool] = None,
	flag_order: Optional[str] = None,
) -> MutationTrace:
	"""Walk a maximal flag from the order side to the chain side, verifying every step."""
	from polymut.polytopes.ehrhart import lattice_counts

	cfg = get_config()
	if flag is None:
		flag = corner_flag(diagram, flag_order or cfg.flag_order)
	if any(c.diagram != diagram for c in flag):
		raise ValidationError("Flag members belong to a different diagram.")
	added = flag_boxes(flag)
	keep = cfg.keep_intermediates if keep_intermediates is None else keep_intermediates
	dilates = cfg.check_dilates if check_dilates is None else max(0, int(check_dilates))
	current = _build(diagram, flag[0], dvector, k)
	if not enumerate_vertices(current):
		raise EmptyPolytopeError("The starting polytope is empty; there is nothing to mutate.")
	trace = MutationTrace(
		diagram,
		tuple(dvector) if dvector is not None else None,
		k,
		list(flag),
		current,
		current,
		check_dilates=dilates,
	)
	reference = lattice_counts(current, range(dilates + 1)) if dilates else None

	def record(m: MapStep, corner: Box, polytope: Polytope, verified: bool, upset: Optional[str] = None) -> None:
		counts = None
		if reference is not None:
			counts = lattice_counts(polytope, range(dilates + 1))
			if counts != reference:
				raise _fail(
					"Lattice-point counts changed along the sequence",
					{"index": len(trace.steps), **m.as_dict()},
					expected=reference,
					actual=counts,
				)
		trace.steps.append(
			TraceStep(
				index=len(trace.steps),
				corner=corner,
				map=m,
				verified=verified,
				vertex_count=len(enumerate_vertices(polytope)),
				denominator=denominator(polytope),
				upset=upset,
				polytope=polytope if keep else None,
				counts=counts,
			)
		)

	for block, r in enumerate(added):
		before, after = flag[block], flag[block + 1]
		family = restriction_hyperplanes(diagram, before, dvector) if dvector is not None else None
		steps = chi_decomposition(diagram, r)
		for m in steps[:-1]:
			if family is not None:
				moved = [ell for ell, eq in family.by_diagonal if not preserves_equation(m, eq)]
				if moved and not fixes_polytope(m, current):
					raise _fail("Tropical step moves restriction hyperplanes", m.as_dict(), diagonals=moved)
			image, check = mutate(current, m)
			if not check.verified:
				raise _fail(
					"Tropical step is not a combinatorial mutation",
					m.as_dict(),
					witness=check.witness,
					corner=list(r),
				)
			current = image
			record(m, r, current, True)
		psi = steps[-1]
		if family is not None:
			target = restriction_hyperplanes(diagram, after, dvector)
			wrong = [ell for ell, eq in family.by_diagonal if image_equation(psi, eq) != target.get(ell)]
			if wrong:
				raise _fail("Unimodular step does not carry hyperplanes onto the next family", psi.as_dict(), diagonals=wrong)
		current = image_polytope(psi, current)
		expected = _build(diagram, after, dvector, k)
		if not polytopes_equal(current, expected):
			got, want = set(enumerate_vertices(current)), set(enumerate_vertices(expected))
			extra = sorted(got ^ want)
			raise _fail(
				"Polytope after the block differs from the independent construction",
				{"corner": list(r), "upset": after.label()},
				witness=format_vector(extra[0]) if extra else [],
			)
		record(psi, r, current, True, upset=after.label())
		_logger.debug("block %s (corner %s) done, %s steps so far", block, r.label(), len(trace.steps))
	trace.end = current
	append_jsonl(
		"mutation",
		{
			"partition": list(diagram.partition),
			"d": list(dvector) if dvector is not None else None,
			"k": k,
			"steps": len(trace.steps),
			"check_dilates": dilates,
		},
	)
	return trace
