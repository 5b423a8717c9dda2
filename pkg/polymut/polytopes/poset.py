from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Sequence, Tuple

from sympy.utilities.iterables import partitions

from polymut.exceptions import ValidationError
from polymut.polytopes.common import coerce_text, parse_int_list
from polymut.settings import FLAG_ORDERS


class Box(NamedTuple):
	row: int
	col: int

	@property
	def diagonal(self) -> int:
		return self.row - self.col

	def le(self, other: Tuple[int, int]) -> bool:
		return self.row <= other[0] and self.col <= other[1]

	def lt(self, other: Tuple[int, int]) -> bool:
		return self.le(other) and (self.row, self.col) != (other[0], other[1])

	def shifted(self, drow: int, dcol: int) -> "Box":
		return Box(self.row + drow, self.col + dcol)

	def label(self) -> str:
		return f"{self.row},{self.col}"


@dataclass(frozen=True)
class YoungDiagram:
	"""Finite down-set of N^2; coordinates of R^lambda are the boxes in row-major order."""

	partition: Tuple[int, ...]
	boxes: Tuple[Box, ...] = field(init=False, repr=False, compare=False)
	_positions: Dict[Box, int] = field(init=False, repr=False, compare=False)

	def __post_init__(self) -> None:
		parts = tuple(int(p) for p in self.partition)
		_validate_partition(parts)
		boxes = tuple(Box(i + 1, j + 1) for i, length in enumerate(parts) for j in range(length))
		object.__setattr__(self, "partition", parts)
		object.__setattr__(self, "boxes", boxes)
		object.__setattr__(self, "_positions", {b: n for n, b in enumerate(boxes)})

	@property
	def m1(self) -> int:
		return len(self.partition)

	@property
	def m2(self) -> int:
		return self.partition[0]

	@property
	def size(self) -> int:
		return len(self.boxes)

	def __len__(self) -> int:
		return len(self.boxes)

	def __contains__(self, item: object) -> bool:
		if not isinstance(item, tuple) or len(item) != 2:
			return False
		i, j = item
		return 1 <= i <= self.m1 and 1 <= j <= self.partition[i - 1]

	def position(self, box: Tuple[int, int]) -> int:
		try:
			return self._positions[Box(*box)]
		except KeyError:
			raise ValidationError(f"Box {tuple(box)} is not in the diagram {self.label()}.")

	def diags(self) -> range:
		return range(1 - self.m2, self.m1)

	def label(self) -> str:
		return ",".join(str(p) for p in self.partition)


def _validate_partition(parts: Sequence[int]) -> None:
	if not parts:
		raise ValidationError("A partition needs at least one part.")
	for part in parts:
		if part < 1:
			raise ValidationError(f"Partition parts must be positive, got {list(parts)}.")
	for prev, nxt in zip(parts, parts[1:]):
		if nxt > prev:
			raise ValidationError(f"Partition parts must be weakly decreasing, got {list(parts)}.")


def from_partition(parts: Iterable[int]) -> YoungDiagram:
	values = list(parts)
	for part in values:
		if isinstance(part, bool) or not isinstance(part, int):
			raise ValidationError(f"Partition parts must be integers, got {part!r}.")
	return YoungDiagram(tuple(values))


def diagrams_up_to(size: int) -> List[YoungDiagram]:
	"""Every Young diagram with between 1 and size boxes, smallest first."""
	if isinstance(size, bool) or not isinstance(size, int) or size < 1:
		raise ValidationError(f"size must be a positive integer, got {size!r}.")
	out: List[YoungDiagram] = []
	for n in range(1, size + 1):
		shapes = [sorted((p for p, m in parts.items() for _ in range(m)), reverse=True) for parts in partitions(n)]
		out.extend(from_partition(s) for s in sorted(shapes, reverse=True))
	return out


def parse_partition(text: str) -> YoungDiagram:
	return from_partition(parse_int_list(text))


def maximal_elements(subset: Iterable[Tuple[int, int]]) -> FrozenSet[Box]:
	items = [Box(*b) for b in subset]
	return frozenset(x for x in items if not any(x.lt(y) for y in items))


def minimal_elements(subset: Iterable[Tuple[int, int]]) -> FrozenSet[Box]:
	items = [Box(*b) for b in subset]
	return frozenset(x for x in items if not any(y.lt(x) for y in items))


def corners(diagram: YoungDiagram) -> FrozenSet[Box]:
	return frozenset(
		b for b in diagram.boxes if b.shifted(1, 0) not in diagram and b.shifted(0, 1) not in diagram
	)


def _check_diagonal(diagram: YoungDiagram, ell: int) -> int:
	if isinstance(ell, bool) or not isinstance(ell, int):
		raise ValidationError(f"Diagonal index must be an integer, got {ell!r}.")
	if ell not in diagram.diags():
		raise ValidationError(
			f"Diagonal {ell} is outside diags({diagram.label()}) = [{1 - diagram.m2}, {diagram.m1 - 1}]."
		)
	return ell


def diagonal(diagram: YoungDiagram, ell: int) -> Tuple[Box, ...]:
	_check_diagonal(diagram, ell)
	return tuple(b for b in diagram.boxes if b.diagonal == ell)


def diagonal_max(diagram: YoungDiagram, ell: int) -> Box:
	return diagonal(diagram, ell)[-1]


def diagonal_lengths(diagram: YoungDiagram) -> Tuple[int, ...]:
	"""Diagonal lengths in d-vector order (d_{m1-1}, ..., d_{1-m2})."""
	return tuple(len(diagonal(diagram, ell)) for ell in reversed(diagram.diags()))


def d_position(diagram: YoungDiagram, ell: int) -> int:
	_check_diagonal(diagram, ell)
	return diagram.m1 - 1 - ell


def validate_dvector(diagram: YoungDiagram, dvector: Sequence[int]) -> Tuple[int, ...]:
	values = tuple(dvector)
	expected = diagram.m1 + diagram.m2 - 1
	if len(values) != expected:
		raise ValidationError(
			f"d-vector for {diagram.label()} needs {expected} entries (d_{diagram.m1 - 1} .. d_{1 - diagram.m2}), got {len(values)}."
		)
	for v in values:
		if isinstance(v, bool) or not isinstance(v, int) or v < 0:
			raise ValidationError(f"d-vector entries must be nonnegative integers, got {list(values)}.")
	return values


def parse_dvector(diagram: YoungDiagram, text: str) -> Tuple[int, ...]:
	return validate_dvector(diagram, parse_int_list(text))


def d_value(diagram: YoungDiagram, dvector: Sequence[int], ell: int) -> int:
	return dvector[d_position(diagram, ell)]


@dataclass(frozen=True)
class UpSet:
	diagram: YoungDiagram
	members: FrozenSet[Box]

	def __contains__(self, item: object) -> bool:
		return item in self.members

	def __len__(self) -> int:
		return len(self.members)

	def complement(self) -> Tuple[Box, ...]:
		return tuple(b for b in self.diagram.boxes if b not in self.members)

	def generators(self) -> Tuple[Box, ...]:
		return tuple(sorted(minimal_elements(self.members)))

	def label(self) -> str:
		if not self.members:
			return "empty"
		if len(self.members) == self.diagram.size:
			return "full"
		return ";".join(b.label() for b in self.generators())


def is_up_set(diagram: YoungDiagram, subset: Iterable[Tuple[int, int]]) -> bool:
	members = {Box(*b) for b in subset}
	stray = sorted(b for b in members if b not in diagram)
	if stray:
		raise ValidationError(f"Boxes {[tuple(b) for b in stray]} are not in the diagram {diagram.label()}.")
	for b in members:
		for nxt in (b.shifted(1, 0), b.shifted(0, 1)):
			if nxt in diagram and nxt not in members:
				return False
	return True


def make_up_set(diagram: YoungDiagram, members: Iterable[Tuple[int, int]]) -> UpSet:
	boxes = frozenset(Box(*b) for b in members)
	if not is_up_set(diagram, boxes):
		raise ValidationError(f"{sorted(tuple(b) for b in boxes)} is not an up-set of {diagram.label()}.")
	return UpSet(diagram, boxes)


def up_set_closure(diagram: YoungDiagram, generators: Iterable[Tuple[int, int]]) -> UpSet:
	gens = [Box(*g) for g in generators]
	stray = [tuple(g) for g in gens if g not in diagram]
	if stray:
		raise ValidationError(f"Generators {stray} are not in the diagram {diagram.label()}.")
	return UpSet(diagram, frozenset(b for b in diagram.boxes if any(g.le(b) for g in gens)))


def empty_up_set(diagram: YoungDiagram) -> UpSet:
	return UpSet(diagram, frozenset())


def full_up_set(diagram: YoungDiagram) -> UpSet:
	return UpSet(diagram, frozenset(diagram.boxes))


def parse_up_set(diagram: YoungDiagram, text: str) -> UpSet:
	raw = coerce_text(text).strip().lower()
	if raw in {"", "empty", "none"}:
		return empty_up_set(diagram)
	if raw in {"full", "all"}:
		return full_up_set(diagram)
	gens: List[Box] = []
	for chunk in raw.split(";"):
		values = parse_int_list(chunk)
		if len(values) != 2:
			raise ValidationError(f"Up-set generator {chunk!r} must look like 'row,col'.")
		gens.append(Box(values[0], values[1]))
	return up_set_closure(diagram, gens)


def all_up_sets(diagram: YoungDiagram) -> List[UpSet]:
	"""Every up-set, as complements of the sub-diagrams mu contained in lambda."""
	out: List[UpSet] = []

	def _rows(i: int, cap: int, prefix: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
		if i == diagram.m1:
			yield prefix
			return
		for length in range(min(cap, diagram.partition[i]), -1, -1):
			yield from _rows(i + 1, length, prefix + (length,))

	for mu in _rows(0, diagram.m2, ()):
		members = frozenset(b for b in diagram.boxes if b.col > mu[b.row - 1])
		out.append(UpSet(diagram, members))
	return out


def antichains(diagram: YoungDiagram) -> List[FrozenSet[Box]]:
	boxes = diagram.boxes
	out: List[FrozenSet[Box]] = []

	def _walk(start: int, chosen: Tuple[Box, ...]) -> None:
		out.append(frozenset(chosen))
		for n in range(start, len(boxes)):
			b = boxes[n]
			if all(not b.le(c) and not c.le(b) for c in chosen):
				_walk(n + 1, chosen + (b,))

	_walk(0, ())
	return out


def _pick_corner(candidates: List[Box], order: str) -> Box:
	if order == "lexmin":
		return min(candidates)
	if order == "colmax":
		return max(candidates, key=lambda b: (b.col, b.row))
	return max(candidates)


def corner_flag(diagram: YoungDiagram, order: str = "lexmax") -> List[UpSet]:
	"""Maximal flag of up-sets, adding one corner of the complement at a time."""
	if order not in FLAG_ORDERS:
		raise ValidationError(f"Unknown flag order {order!r}; expected one of {list(FLAG_ORDERS)}.")
	members: set[Box] = set()
	flag = [UpSet(diagram, frozenset())]
	while len(members) < diagram.size:
		candidates = [
			b
			for b in diagram.boxes
			if b not in members
			and all(nxt in members or nxt not in diagram for nxt in (b.shifted(1, 0), b.shifted(0, 1)))
		]
		members.add(_pick_corner(candidates, order))
		flag.append(UpSet(diagram, frozenset(members)))
	return flag


def flag_boxes(flag: Sequence[UpSet]) -> List[Box]:
	"""The box added at each step of a maximal flag."""
	if not flag or flag[0].members:
		raise ValidationError("A flag must start at the empty up-set.")
	out: List[Box] = []
	for prev, nxt in zip(flag, flag[1:]):
		added = nxt.members - prev.members
		if len(added) != 1 or not prev.members <= nxt.members:
			raise ValidationError("Consecutive flag members must differ by exactly one box.")
		(box,) = added
		if not is_up_set(nxt.diagram, nxt.members):
			raise ValidationError(f"Flag member {nxt.label()} is not an up-set.")
		out.append(box)
	if len(flag[-1].members) != flag[-1].diagram.size:
		raise ValidationError("A maximal flag must end at the full diagram.")
	return out


def is_linear_extension(diagram: YoungDiagram, order: Sequence[Tuple[int, int]]) -> bool:
	seq = [Box(*b) for b in order]
	if len(seq) != diagram.size or set(seq) != set(diagram.boxes):
		return False
	seen: set[Box] = set()
	for b in seq:
		for prev in (b.shifted(-1, 0), b.shifted(0, -1)):
			if prev in diagram and prev not in seen:
				return False
		seen.add(b)
	return True


def linear_extensions(diagram: YoungDiagram, limit: int = 100) -> List[Tuple[Box, ...]]:
	out: List[Tuple[Box, ...]] = []

	def _walk(prefix: Tuple[Box, ...], placed: FrozenSet[Box]) -> None:
		if len(out) >= limit:
			return
		if len(prefix) == diagram.size:
			out.append(prefix)
			return
		for b in diagram.boxes:
			if b in placed:
				continue
			if all(p in placed or p not in diagram for p in (b.shifted(-1, 0), b.shifted(0, -1))):
				_walk(prefix + (b,), placed | {b})

	_walk((), frozenset())
	return out


@dataclass(frozen=True)
class RestrictionSets:
	ell: int
	r_ell: Box
	R: FrozenSet[Box]
	S: FrozenSet[Box]
	Sbar: FrozenSet[Box]
	T: FrozenSet[Box]
	Tbar: FrozenSet[Box]


def _diagonal_tails(anchors: Iterable[Box], first_shift: int) -> FrozenSet[Box]:
	out: set[Box] = set()
	for a in anchors:
		i = first_shift
		while a.row - i >= 1 and a.col - i >= 1:
			out.add(a.shifted(-i, -i))
			i += 1
	return frozenset(out)


def restriction_sets(diagram: YoungDiagram, upset: UpSet, ell: int) -> RestrictionSets:
	if not is_up_set(diagram, upset.members):
		raise ValidationError(f"{upset.label()} is not an up-set of {diagram.label()}.")
	r = diagonal_max(diagram, ell)
	rect = frozenset(p for p in diagram.boxes if p.le(r))
	outside = [p for p in rect if p not in upset.members]
	inside = [p for p in rect if p in upset.members]
	s = maximal_elements(outside)
	t = minimal_elements(inside)
	return RestrictionSets(
		ell=ell,
		r_ell=r,
		R=rect,
		S=s,
		Sbar=_diagonal_tails(s, 0),
		T=t,
		Tbar=_diagonal_tails(t, 1),
	)


@dataclass(frozen=True)
class DiagonalDeletion:
	source: YoungDiagram
	ell: int
	partner_ell: int
	diagram: YoungDiagram
	dvector: Tuple[int, ...]
	# origin[n] is the box of the source diagram that becomes box n of the new diagram
	origin: Tuple[Box, ...]
	partner: Dict[Box, Box]
	source_dvector: Tuple[int, ...] = ()

	@property
	def relation(self) -> str:
		"""'equal' when the paired d entries agree, 'empty' when the partner entry is smaller."""
		if not self.source_dvector:
			return "unknown"
		mine = d_value(self.source, self.source_dvector, self.ell)
		other = d_value(self.source, self.source_dvector, self.partner_ell)
		if mine == other:
			return "equal"
		if other < mine:
			return "empty"
		return "unrelated"


def _deletion_partner(diagram: YoungDiagram, ell: int) -> int:
	length = len(diagonal(diagram, ell))
	options = [ell + 1] if ell > 0 else [ell - 1] if ell < 0 else [1, -1]
	tried: List[str] = []
	for other in options:
		if other not in diagram.diags():
			tried.append(f"{other} (outside diags)")
			continue
		other_length = len(diagonal(diagram, other))
		if other_length == length:
			return other
		tried.append(f"{other} (length {other_length})")
	raise ValidationError(
		f"Diagonal {ell} of {diagram.label()} has length {length} and no adjacent equal-length partner: {', '.join(tried)}."
	)


def delete_diagonal(diagram: YoungDiagram, dvector: Sequence[int], ell: int) -> DiagonalDeletion:
	values = validate_dvector(diagram, dvector)
	_check_diagonal(diagram, ell)
	other = _deletion_partner(diagram, ell)
	moved: Dict[Box, Box] = {}
	partner: Dict[Box, Box] = {}
	for b in diagram.boxes:
		if b.diagonal == ell:
			partner[b] = b.shifted(1, 0) if other > ell else b.shifted(0, 1)
			continue
		if other > ell:
			moved[b if b.diagonal < ell else b.shifted(-1, 0)] = b
		else:
			moved[b if b.diagonal > ell else b.shifted(0, -1)] = b
	rows: Dict[int, int] = {}
	for b in moved:
		rows[b.row] = rows.get(b.row, 0) + 1
	parts = [rows[i] for i in range(1, len(rows) + 1) if i in rows]
	try:
		reduced = from_partition(parts)
	except ValidationError:
		reduced = None
	if reduced is None or set(reduced.boxes) != set(moved):
		raise ValidationError(f"Removing diagonal {ell} from {diagram.label()} does not leave a Young diagram.")
	position = d_position(diagram, ell)
	return DiagonalDeletion(
		source=diagram,
		ell=ell,
		partner_ell=other,
		diagram=reduced,
		dvector=values[:position] + values[position + 1 :],
		origin=tuple(moved[b] for b in reduced.boxes),
		partner=partner,
		source_dvector=values,
	)


def project_deleted(deletion: DiagonalDeletion, point: Sequence) -> Tuple:
	src = deletion.source
	if len(point) != src.size:
		raise ValidationError(f"Point has {len(point)} coordinates, expected {src.size}.")
	return tuple(point[src.position(b)] for b in deletion.origin)


def lift_deleted(deletion: DiagonalDeletion, point: Sequence) -> Tuple:
	src = deletion.source
	if len(point) != deletion.diagram.size:
		raise ValidationError(f"Point has {len(point)} coordinates, expected {deletion.diagram.size}.")
	values: Dict[Box, object] = {b: point[n] for n, b in enumerate(deletion.origin)}
	for removed, mate in deletion.partner.items():
		values[removed] = values[mate]
	return tuple(values[b] for b in src.boxes)
