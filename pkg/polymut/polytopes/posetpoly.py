from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from polymut.exceptions import ValidationError
from polymut.logger import get_logger
from polymut.polytopes.common import Vector, coerce_text, parse_int_list
from polymut.polytopes.geometry import AffineEquation, HalfSpace, Polytope, equation, halfspace, intersect
from polymut.polytopes.poset import (
	Box,
	UpSet,
	YoungDiagram,
	all_up_sets,
	antichains,
	corners,
	empty_up_set,
	full_up_set,
	is_up_set,
	parse_partition,
	parse_up_set,
	restriction_sets,
	validate_dvector,
)

_logger = get_logger("posetpoly")


def box_ambient(diagram: YoungDiagram) -> List[str]:
	return [b.label() for b in diagram.boxes]


def _unit(diagram: YoungDiagram, coeffs: Dict[Box, int]) -> List[int]:
	row = [0] * diagram.size
	for box, value in coeffs.items():
		row[diagram.position(box)] += value
	return row


def saturated_paths(diagram: YoungDiagram, start: Box) -> List[Tuple[Box, ...]]:
	"""Down/right lattice paths from start to a corner of the diagram."""
	start = Box(*start)
	if start not in diagram:
		raise ValidationError(f"{start.label()} is not a box of {diagram.label()}.")
	ends = corners(diagram)
	out: List[Tuple[Box, ...]] = []

	def _walk(path: Tuple[Box, ...]) -> None:
		last = path[-1]
		if last in ends:
			out.append(path)
			return
		for nxt in (last.shifted(0, 1), last.shifted(1, 0)):
			if nxt in diagram:
				_walk(path + (nxt,))

	_walk((start,))
	return out


def _check_upset(diagram: YoungDiagram, upset: UpSet) -> None:
	if upset.diagram != diagram or not is_up_set(diagram, upset.members):
		raise ValidationError(f"{upset.label()} is not an up-set of {diagram.label()}.")


def _check_dilate(k: int) -> int:
	if isinstance(k, bool) or not isinstance(k, int) or k < 1:
		raise ValidationError(f"k must be a positive integer, got {k!r}.")
	return k


def chain_order_polytope(diagram: YoungDiagram, upset: UpSet, k: int = 1) -> Polytope:
	"""k-th dilate of the chain-order polytope: box bounds, order inside the complement, mixed chains."""
	_check_upset(diagram, upset)
	_check_dilate(k)
	inside = upset.members
	rows: List[HalfSpace] = []
	for b in diagram.boxes:
		rows.append(halfspace(_unit(diagram, {b: -1}), 0))
		rows.append(halfspace(_unit(diagram, {b: 1}), k))
	for p in diagram.boxes:
		if p in inside:
			continue
		for q in (p.shifted(0, 1), p.shifted(1, 0)):
			if q not in diagram:
				continue
			if q not in inside:
				rows.append(halfspace(_unit(diagram, {p: 1, q: -1}), 0))
				continue
			for path in saturated_paths(diagram, q):
				rows.append(halfspace(_unit(diagram, {p: 1, **{c: 1 for c in path}}), k))
	if len(inside) == diagram.size:
		for path in saturated_paths(diagram, Box(1, 1)):
			rows.append(halfspace(_unit(diagram, {c: 1 for c in path}), k))
	return Polytope(box_ambient(diagram), rows)


def order_polytope(diagram: YoungDiagram, k: int = 1) -> Polytope:
	return chain_order_polytope(diagram, empty_up_set(diagram), k)


def chain_polytope(diagram: YoungDiagram, k: int = 1) -> Polytope:
	return chain_order_polytope(diagram, full_up_set(diagram), k)


@dataclass(frozen=True)
class HyperplaneFamily:
	upset: UpSet
	dvector: Tuple[int, ...]
	by_diagonal: Tuple[Tuple[int, AffineEquation], ...]

	def equations(self) -> List[AffineEquation]:
		return [eq for _, eq in self.by_diagonal]

	def get(self, ell: int) -> AffineEquation:
		for key, eq in self.by_diagonal:
			if key == ell:
				return eq
		raise ValidationError(f"No hyperplane for diagonal {ell}.")


def restriction_hyperplanes(diagram: YoungDiagram, upset: UpSet, dvector: Sequence[int]) -> HyperplaneFamily:
	_check_upset(diagram, upset)
	values = validate_dvector(diagram, dvector)
	family = []
	for position, ell in enumerate(reversed(diagram.diags())):
		sets = restriction_sets(diagram, upset, ell)
		coeffs: Dict[Box, int] = {}
		for s in sets.Sbar:
			coeffs[s] = coeffs.get(s, 0) + 1
		for t in sets.Tbar:
			coeffs[t] = coeffs.get(t, 0) - 1
		for u in sets.R:
			if u in upset.members:
				coeffs[u] = coeffs.get(u, 0) + 1
		family.append((ell, equation(_unit(diagram, coeffs), values[position])))
	return HyperplaneFamily(upset, values, tuple(family))


def restricted_chain_order(diagram: YoungDiagram, upset: UpSet, dvector: Sequence[int], k: int) -> Polytope:
	base = chain_order_polytope(diagram, upset, k)
	return intersect(base, restriction_hyperplanes(diagram, upset, dvector).equations())


def stanley_vertex_oracle(diagram: YoungDiagram, kind: str) -> List[Vector]:
	"""Characteristic vectors of up-sets (order) or antichains (chain)."""
	if kind == "order":
		families = [u.members for u in all_up_sets(diagram)]
	elif kind == "chain":
		families = antichains(diagram)
	else:
		raise ValidationError(f"Unknown oracle kind {kind!r}; expected 'order' or 'chain'.")
	return sorted(tuple(Fraction(int(b in fam)) for b in diagram.boxes) for fam in families)


def _gt_label(row: int, idx: int) -> str:
	return f"g{row},{idx}"


def gt_polytope(shape: Sequence[int], content: Sequence[int]) -> Polytope:
	"""Gelfand-Tsetlin patterns with top row shape and row sums given by partial sums of content."""
	alpha = [int(a) for a in shape]
	beta = [int(b) for b in content]
	if not alpha:
		raise ValidationError("GT shape must be nonempty.")
	if any(x < y for x, y in zip(alpha, alpha[1:])):
		raise ValidationError(f"GT shape must be weakly decreasing, got {alpha}.")
	if len(beta) != len(alpha):
		raise ValidationError(f"GT content needs {len(alpha)} entries, got {len(beta)}.")
	if sum(beta) != sum(alpha):
		raise ValidationError(f"GT content sums to {sum(beta)}, shape sums to {sum(alpha)}.")
	n = len(alpha)
	labels = [(j, i) for j in range(1, n) for i in range(1, j + 1)]
	position = {key: idx for idx, key in enumerate(labels)}
	size = len(labels)

	def entry(j: int, i: int) -> Tuple[Dict[int, int], int]:
		# linear form (coefficients, constant) of x^{(j)}_i
		if j == n:
			return {}, alpha[i - 1]
		return {position[(j, i)]: 1}, 0

	rows: List[HalfSpace] = []

	def leq(small: Tuple[Dict[int, int], int], big: Tuple[Dict[int, int], int]) -> None:
		normal = [0] * size
		for c, v in small[0].items():
			normal[c] += v
		for c, v in big[0].items():
			normal[c] -= v
		bound = big[1] - small[1]
		if any(normal):
			rows.append(halfspace(normal, bound))
		elif bound < 0:
			rows.append(halfspace([1] * size, -1))
			rows.append(halfspace([-1] * size, 0))

	for j in range(1, n):
		for i in range(1, j + 1):
			leq(entry(j, i), entry(j + 1, i))
			leq(entry(j + 1, i + 1), entry(j, i))
	eqs = []
	for j in range(1, n):
		normal = [0] * size
		for i in range(1, j + 1):
			normal[position[(j, i)]] = 1
		eqs.append(equation(normal, sum(beta[:j])))
	return Polytope([_gt_label(j, i) for j, i in labels] or 0, rows, eqs)


@dataclass(frozen=True)
class GTParameters:
	shape: Tuple[int, ...]
	content: Tuple[int, ...]
	derived_last: bool = True


def gt_parameters(diagram: YoungDiagram, dvector: Sequence[int], k: int) -> GTParameters:
	"""Shape (k^m1, 0^m2) and content for a rectangular diagram; the last content entry is forced by the sum."""
	if len(set(diagram.partition)) != 1:
		raise ValidationError(f"GT parameters need a rectangular diagram, got {diagram.label()}.")
	values = validate_dvector(diagram, dvector)
	_check_dilate(k)
	m1, m2 = diagram.m1, diagram.m2
	content = [values[0]]
	for position in range(1, m2):
		content.append(values[position] - values[position - 1])
	for position in range(m2, m1 + m2 - 1):
		content.append(k + values[position] - values[position - 1])
	shape = tuple([k] * m1 + [0] * m2)
	content.append(sum(shape) - sum(content))
	return GTParameters(shape, tuple(content))


@dataclass(frozen=True)
class PolytopeSpec:
	diagram: YoungDiagram
	upset: UpSet
	dvector: Optional[Tuple[int, ...]] = None
	dilate: int = 1
	restricted: bool = False

	def __post_init__(self) -> None:
		_check_upset(self.diagram, self.upset)
		_check_dilate(self.dilate)
		if self.restricted and self.dvector is None:
			raise ValidationError("A restricted polytope needs a d-vector.")
		if self.dvector is not None:
			object.__setattr__(self, "dvector", validate_dvector(self.diagram, self.dvector))

	def build(self) -> Polytope:
		if self.restricted:
			return restricted_chain_order(self.diagram, self.upset, self.dvector, self.dilate)
		return chain_order_polytope(self.diagram, self.upset, self.dilate)

	def as_dict(self) -> Dict[str, Any]:
		return {
			"partition": list(self.diagram.partition),
			"upset": self.upset.label(),
			"d": list(self.dvector) if self.dvector is not None else None,
			"k": self.dilate,
			"restricted": self.restricted,
		}


_SPEC_KEYS = {"partition", "upset", "d", "k"}


def make_spec(
	partition: Any, upset: Any = None, dvector: Any = None, k: Any = None
) -> PolytopeSpec:
	diagram = partition if isinstance(partition, YoungDiagram) else parse_partition(coerce_text(partition))
	if isinstance(upset, UpSet):
		members = upset
	else:
		members = parse_up_set(diagram, coerce_text(upset or "empty"))
	values: Optional[Tuple[int, ...]] = None
	if dvector not in (None, ""):
		values = tuple(dvector) if isinstance(dvector, (list, tuple)) else tuple(parse_int_list(dvector))
	dilate = 1
	if k not in (None, ""):
		try:
			dilate = int(k)
		except (TypeError, ValueError):
			raise ValidationError(f"k must be an integer, got {k!r}.")
	return PolytopeSpec(diagram, members, values, dilate, values is not None)


def parse_spec(text: str) -> PolytopeSpec:
	"""Parse 'partition=4,4,3 upset=empty d=1,2,3,2,2,1 k=2'."""
	fields: Dict[str, str] = {}
	for token in coerce_text(text).split():
		key, sep, value = token.partition("=")
		key = key.strip().lower()
		if not sep or key not in _SPEC_KEYS:
			raise ValidationError(f"Bad spec token {token!r}; expected one of {sorted(_SPEC_KEYS)} as key=value.")
		fields[key] = value.strip()
	if "partition" not in fields:
		raise ValidationError("Spec needs partition=...")
	return make_spec(fields["partition"], fields.get("upset"), fields.get("d"), fields.get("k"))
