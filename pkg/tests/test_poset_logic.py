from __future__ import annotations

import unittest

from polymut.exceptions import ValidationError
from polymut.polytopes.poset import (
	Box,
	all_up_sets,
	antichains,
	corner_flag,
	corners,
	d_value,
	delete_diagonal,
	diagonal,
	diagonal_lengths,
	diagrams_up_to,
	flag_boxes,
	from_partition,
	is_linear_extension,
	is_up_set,
	lift_deleted,
	linear_extensions,
	make_up_set,
	parse_dvector,
	parse_partition,
	parse_up_set,
	project_deleted,
	restriction_sets,
	validate_dvector,
)


class PosetLogicTests(unittest.TestCase):
	def test_partition_boxes_are_row_major(self):
		diagram = parse_partition("4,4,3")
		self.assertEqual(diagram.size, 11)
		self.assertEqual((diagram.m1, diagram.m2), (3, 4))
		self.assertEqual(diagram.boxes[:5], (Box(1, 1), Box(1, 2), Box(1, 3), Box(1, 4), Box(2, 1)))
		self.assertEqual(diagram.position((3, 3)), 10)
		self.assertEqual(list(diagram.diags()), [-3, -2, -1, 0, 1, 2])

	def test_bad_partitions_are_rejected(self):
		for text in ("3,4", "2,0", "", "a,b"):
			with self.assertRaises(ValidationError):
				parse_partition(text)

	def test_diagrams_up_to_lists_every_partition(self):
		shapes = [d.partition for d in diagrams_up_to(3)]
		self.assertEqual(shapes, [(1,), (2,), (1, 1), (3,), (2, 1), (1, 1, 1)])
		sizes = [d.size for d in diagrams_up_to(9)]
		self.assertEqual([sizes.count(n) for n in range(1, 10)], [1, 2, 3, 5, 7, 11, 15, 22, 30])
		with self.assertRaises(ValidationError):
			diagrams_up_to(0)

	def test_diagonal_lengths_follow_d_vector_order(self):
		diagram = from_partition([4, 4, 3])
		self.assertEqual(diagonal_lengths(diagram), (1, 2, 3, 2, 2, 1))
		self.assertEqual(diagonal(diagram, -1), (Box(1, 2), Box(2, 3)))
		self.assertEqual(d_value(diagram, (1, 2, 3, 2, 2, 1), 0), 3)
		with self.assertRaises(ValidationError):
			diagonal(diagram, 3)

	def test_corners_are_maximal_boxes(self):
		self.assertEqual(corners(from_partition([4, 4, 3])), {Box(2, 4), Box(3, 3)})

	def test_dvector_length_and_sign_are_checked(self):
		diagram = from_partition([2, 2])
		self.assertEqual(parse_dvector(diagram, "1,2,1"), (1, 2, 1))
		with self.assertRaises(ValidationError):
			validate_dvector(diagram, (1, 2))
		with self.assertRaises(ValidationError):
			validate_dvector(diagram, (1, -1, 1))

	def test_up_set_parsing_closes_generators(self):
		diagram = from_partition([3, 2])
		upset = parse_up_set(diagram, "1,2;2,2")
		self.assertEqual(upset.members, {Box(1, 2), Box(1, 3), Box(2, 2)})
		self.assertEqual(upset.label(), "1,2")
		self.assertEqual(upset.complement(), (Box(1, 1), Box(2, 1)))
		self.assertEqual(parse_up_set(diagram, "empty").label(), "empty")
		self.assertEqual(parse_up_set(diagram, "full").label(), "full")

	def test_non_up_sets_are_rejected(self):
		diagram = from_partition([2, 2])
		self.assertFalse(is_up_set(diagram, [(1, 2)]))
		with self.assertRaises(ValidationError):
			make_up_set(diagram, [(1, 2)])
		with self.assertRaises(ValidationError):
			is_up_set(diagram, [(3, 1)])

	def test_up_sets_and_antichains_have_equal_counts(self):
		for parts in ([2, 1], [2, 2], [3, 2], [3, 3, 1]):
			diagram = from_partition(parts)
			ups = all_up_sets(diagram)
			self.assertTrue(all(is_up_set(diagram, u.members) for u in ups))
			self.assertEqual(len({u.members for u in ups}), len(ups))
			self.assertEqual(len(ups), len(antichains(diagram)))
		self.assertEqual(len(all_up_sets(from_partition([3, 2]))), 9)

	def test_lexmax_corner_flag_on_square(self):
		diagram = from_partition([2, 2])
		flag = corner_flag(diagram)
		self.assertEqual(len(flag), 5)
		self.assertEqual(flag_boxes(flag), [Box(2, 2), Box(2, 1), Box(1, 2), Box(1, 1)])
		self.assertEqual(flag_boxes(corner_flag(diagram, "lexmin"))[1], Box(1, 2))
		with self.assertRaises(ValidationError):
			corner_flag(diagram, "random")

	def test_flag_with_gap_is_rejected(self):
		diagram = from_partition([2, 2])
		flag = corner_flag(diagram)
		with self.assertRaises(ValidationError):
			flag_boxes([flag[0], flag[2], flag[3], flag[4]])

	def test_linear_extensions(self):
		diagram = from_partition([2, 2])
		self.assertEqual(len(linear_extensions(diagram)), 2)
		self.assertTrue(is_linear_extension(diagram, [(1, 1), (1, 2), (2, 1), (2, 2)]))
		self.assertFalse(is_linear_extension(diagram, [(1, 2), (1, 1), (2, 1), (2, 2)]))
		self.assertEqual(len(linear_extensions(from_partition([3, 3, 3]), limit=7)), 7)

	def test_restriction_sets_for_empty_up_set(self):
		diagram = from_partition([2, 2])
		empty = parse_up_set(diagram, "empty")
		sets = restriction_sets(diagram, empty, 0)
		self.assertEqual(sets.r_ell, Box(2, 2))
		self.assertEqual(sets.S, {Box(2, 2)})
		self.assertEqual(sets.Sbar, {Box(1, 1), Box(2, 2)})
		self.assertEqual(sets.T, frozenset())
		self.assertEqual(sets.Tbar, frozenset())

	def test_restriction_sets_with_corner_in_up_set(self):
		diagram = from_partition([2, 2])
		upset = parse_up_set(diagram, "2,2")
		sets = restriction_sets(diagram, upset, 0)
		self.assertEqual(sets.S, {Box(1, 2), Box(2, 1)})
		self.assertEqual(sets.Sbar, {Box(1, 2), Box(2, 1)})
		self.assertEqual(sets.T, {Box(2, 2)})
		self.assertEqual(sets.Tbar, {Box(1, 1)})

	def test_delete_diagonal_pairs_with_outer_neighbour(self):
		diagram = from_partition([4, 4, 3])
		deletion = delete_diagonal(diagram, (1, 2, 3, 2, 2, 1), -1)
		self.assertEqual(deletion.partner_ell, -2)
		self.assertEqual(deletion.diagram.partition, (3, 3, 3))
		self.assertEqual(deletion.dvector, (1, 2, 3, 2, 1))
		self.assertEqual(deletion.relation, "equal")
		self.assertEqual(deletion.partner[Box(1, 2)], Box(1, 3))
		self.assertEqual(delete_diagonal(diagram, (1, 2, 3, 2, 1, 1), -1).relation, "empty")

	def test_delete_diagonal_projection_and_lift_are_inverse(self):
		diagram = from_partition([4, 4, 3])
		deletion = delete_diagonal(diagram, (1, 2, 3, 2, 2, 1), -1)
		reduced = tuple(range(9))
		lifted = lift_deleted(deletion, reduced)
		self.assertEqual(len(lifted), 11)
		self.assertEqual(project_deleted(deletion, lifted), reduced)
		# box (1,2) copies its partner (1,3), which became (1,2) after the shift
		self.assertEqual(lifted[diagram.position((1, 2))], lifted[diagram.position((1, 3))])

	def test_delete_diagonal_without_partner_fails(self):
		diagram = from_partition([4, 4, 3])
		with self.assertRaises(ValidationError):
			delete_diagonal(diagram, (1, 2, 3, 2, 2, 1), 0)
		with self.assertRaises(ValidationError):
			delete_diagonal(diagram, (1, 2, 3, 2, 2, 1), 2)


if __name__ == "__main__":
	unittest.main()
