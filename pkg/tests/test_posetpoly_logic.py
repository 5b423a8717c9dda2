from __future__ import annotations

import unittest

from polymut.exceptions import ValidationError
from polymut.polytopes.ehrhart import ehrhart_equal
from polymut.polytopes.geometry import count_lattice_points, dimension, enumerate_vertices, hull
from polymut.polytopes.poset import (
	Box,
	UpSet,
	all_up_sets,
	delete_diagonal,
	diagonal_lengths,
	diagrams_up_to,
	from_partition,
	lift_deleted,
	parse_up_set,
	project_deleted,
)
from polymut.polytopes.posetpoly import (
	chain_order_polytope,
	chain_polytope,
	gt_parameters,
	gt_polytope,
	make_spec,
	order_polytope,
	parse_spec,
	restricted_chain_order,
	restriction_hyperplanes,
	saturated_paths,
	stanley_vertex_oracle,
)


class PosetPolytopeLogicTests(unittest.TestCase):
	def test_saturated_paths_end_in_corners(self):
		diagram = from_partition([3, 2])
		paths = saturated_paths(diagram, (1, 1))
		self.assertEqual(len(paths), 3)
		self.assertTrue(all(p[0] == (1, 1) for p in paths))
		self.assertEqual({p[-1] for p in paths}, {(1, 3), (2, 2)})
		self.assertEqual(saturated_paths(diagram, Box(2, 2)), [(Box(2, 2),)])
		self.assertEqual(saturated_paths(diagram, (1, 2))[0][-1].label(), "1,3")
		with self.assertRaises(ValidationError):
			saturated_paths(diagram, (3, 1))

	def test_order_and_chain_vertices_match_the_oracle(self):
		for diagram in diagrams_up_to(8):
			with self.subTest(partition=diagram.partition):
				self.assertEqual(list(enumerate_vertices(order_polytope(diagram))), stanley_vertex_oracle(diagram, "order"))
				self.assertEqual(list(enumerate_vertices(chain_polytope(diagram))), stanley_vertex_oracle(diagram, "chain"))

	def test_every_chain_order_polytope_has_the_same_vertex_count(self):
		for diagram in diagrams_up_to(6):
			upsets = all_up_sets(diagram)
			for upset in upsets:
				with self.subTest(partition=diagram.partition, upset=upset.label()):
					polytope = chain_order_polytope(diagram, upset)
					self.assertEqual(len(enumerate_vertices(polytope)), len(upsets))
					self.assertEqual(dimension(polytope), diagram.size)

	def test_dilated_chain_order_counts_agree(self):
		diagram = from_partition([2, 2])
		order2 = order_polytope(diagram, k=2)
		chain2 = chain_polytope(diagram, k=2)
		self.assertEqual(count_lattice_points(order2, 1), count_lattice_points(order_polytope(diagram), 2))
		self.assertEqual(count_lattice_points(order2, 1), count_lattice_points(chain2, 1))

	def test_non_up_set_is_rejected(self):
		diagram = from_partition([2, 2])
		with self.assertRaises(ValidationError):
			chain_order_polytope(diagram, UpSet(diagram, frozenset({(1, 1)})))
		with self.assertRaises(ValidationError):
			order_polytope(diagram, k=0)

	def test_restriction_hyperplanes_on_square(self):
		diagram = from_partition([2, 2])
		family = restriction_hyperplanes(diagram, parse_up_set(diagram, "empty"), (1, 2, 1))
		self.assertEqual([ell for ell, _ in family.by_diagonal], [1, 0, -1])
		self.assertEqual(family.get(1).as_row(), [0, 0, 1, 0, 1])
		self.assertEqual(family.get(0).as_row(), [1, 0, 0, 1, 2])
		self.assertEqual(family.get(-1).as_row(), [0, 1, 0, 0, 1])
		full = restriction_hyperplanes(diagram, parse_up_set(diagram, "2,2"), (1, 2, 1))
		self.assertEqual(full.get(0).as_row(), [1, -1, -1, -1, -2])
		with self.assertRaises(ValidationError):
			family.get(5)

	def test_restricted_square_is_a_segment(self):
		diagram = from_partition([2, 2])
		polytope = restricted_chain_order(diagram, parse_up_set(diagram, "empty"), (1, 2, 1), 2)
		self.assertEqual(enumerate_vertices(polytope), ((0, 1, 1, 2), (1, 1, 1, 1)))
		self.assertEqual([count_lattice_points(polytope, n) for n in range(4)], [1, 2, 3, 4])

	def test_restricted_order_polytope_is_empty_below_a_smaller_partner(self):
		for parts, d, ell in (([2, 2, 2], (1, 1, 2, 1), 0), ([4, 4, 3], (1, 2, 3, 2, 1, 1), -1)):
			diagram = from_partition(parts)
			with self.subTest(partition=parts, d=d):
				self.assertEqual(delete_diagonal(diagram, d, ell).relation, "empty")
				polytope = restricted_chain_order(diagram, parse_up_set(diagram, "empty"), d, 2)
				self.assertEqual(enumerate_vertices(polytope), ())
				self.assertEqual(count_lattice_points(polytope, 2), 0)

	def test_deleted_diagonal_projection_keeps_lattice_points(self):
		diagram = from_partition([4, 4, 3])
		d = (1, 2, 3, 2, 2, 1)
		deletion = delete_diagonal(diagram, d, -1)
		source = restricted_chain_order(diagram, parse_up_set(diagram, "empty"), d, 2)
		reduced = restricted_chain_order(
			deletion.diagram, parse_up_set(deletion.diagram, "empty"), deletion.dvector, 2
		)
		for v in enumerate_vertices(source):
			self.assertEqual(lift_deleted(deletion, project_deleted(deletion, v)), v)
		projected = hull(project_deleted(deletion, v) for v in enumerate_vertices(source))
		for n in range(5):
			with self.subTest(n=n):
				count = count_lattice_points(source, n)
				self.assertEqual(count_lattice_points(projected, n), count)
				self.assertEqual(count_lattice_points(reduced, n), count)

	def test_diagonal_length_restriction_is_a_single_lattice_point(self):
		diagram = from_partition([3, 2])
		d = diagonal_lengths(diagram)
		empty = restricted_chain_order(diagram, parse_up_set(diagram, "empty"), d, 1)
		self.assertEqual(enumerate_vertices(empty), (tuple([1] * diagram.size),))
		for upset in all_up_sets(diagram):
			polytope = restricted_chain_order(diagram, upset, d, 1)
			with self.subTest(upset=upset.label()):
				verts = enumerate_vertices(polytope)
				self.assertEqual(len(verts), 1)
				self.assertTrue(all(c.denominator == 1 for c in verts[0]))

	def test_gt_polytope_counts_kostka_numbers(self):
		self.assertEqual(count_lattice_points(gt_polytope((2, 1, 0), (1, 1, 1)), 1), 2)
		self.assertEqual(count_lattice_points(gt_polytope((2, 2, 0, 0), (1, 1, 1, 1)), 1), 2)
		with self.assertRaises(ValidationError):
			gt_polytope((1, 2), (1, 2))
		with self.assertRaises(ValidationError):
			gt_polytope((2, 1), (1, 1))

	def test_gt_parameters_for_rectangles(self):
		square = from_partition([2, 2])
		params = gt_parameters(square, (1, 1, 1), 1)
		self.assertEqual(params.shape, (1, 1, 0, 0))
		self.assertEqual(params.content, (1, 0, 1, 0))
		self.assertTrue(params.derived_last)
		self.assertEqual(gt_parameters(square, (1, 2, 1), 2).content, (1, 1, 1, 1))
		with self.assertRaises(ValidationError):
			gt_parameters(from_partition([3, 2]), (1, 1, 1, 1), 1)

	def test_rectangle_is_ehrhart_equal_to_its_gt_polytope(self):
		square = from_partition([2, 2])
		for d, k in (((1, 1, 1), 1), ((1, 2, 1), 2)):
			params = gt_parameters(square, d, k)
			restricted = restricted_chain_order(square, parse_up_set(square, "empty"), d, k)
			with self.subTest(d=d, k=k):
				self.assertTrue(ehrhart_equal(restricted, gt_polytope(params.shape, params.content), 3))

	def test_spec_strings(self):
		spec = parse_spec("partition=4,4,3 upset=empty d=1,2,3,2,2,1 k=2")
		self.assertTrue(spec.restricted)
		self.assertEqual(spec.dilate, 2)
		self.assertEqual(spec.as_dict()["d"], [1, 2, 3, 2, 2, 1])
		plain = make_spec("3,2", "1,2")
		self.assertFalse(plain.restricted)
		self.assertEqual(plain.as_dict()["upset"], "1,2")
		self.assertEqual(len(enumerate_vertices(plain.build())), 9)

	def test_bad_spec_strings(self):
		for text in ("partition=4,4,3 bogus=1", "upset=empty", "partition=2,2 d=1,1", "partition=2,2 k=x"):
			with self.subTest(text=text):
				with self.assertRaises(ValidationError):
					parse_spec(text)


if __name__ == "__main__":
	unittest.main()
