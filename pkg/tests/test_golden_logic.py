from __future__ import annotations

import copy
import os
import unittest
from unittest.mock import patch

from polymut.exceptions import GoldenMismatchError, ValidationError
from polymut.polytopes.golden import example_ids, load_golden, verify_example, verify_examples

SLOW = os.environ.get("POLYMUT_SLOW_TESTS") == "1"


def _altered(example_id: str, key: str, value):
	data = copy.deepcopy(load_golden())
	data[example_id][key] = value
	return {example_id: data[example_id]}


class GoldenExampleLogicTests(unittest.TestCase):
	def test_fixture_ids(self):
		self.assertEqual(
			example_ids(),
			[
				"quadrilateral-mutation",
				"chain-order-3-2",
				"restricted-4-4-3-k2",
				"restricted-4-4-3-k3",
				"restricted-4-4-3-2-k3",
			],
		)
		self.assertNotIn("restricted-4-4-3-2-k3", example_ids(include_slow=False))

	def test_fast_examples_pass(self):
		for example_id in example_ids(include_slow=False):
			with self.subTest(example=example_id):
				report = verify_example(example_id)
				failed = [c for c in report["checks"] if not c["ok"]]
				self.assertEqual(failed, [])
				self.assertEqual(report["status"], "PASS")

	def test_restricted_example_checks_the_deletion(self):
		report = verify_example("restricted-4-4-3-k2")
		names = [c["check"] for c in report["checks"]]
		self.assertIn("deleted_partition", names)
		self.assertIn("deleted_ehrhart_equal", names)
		self.assertIn("h_star", names)

	@unittest.skipUnless(SLOW, "set POLYMUT_SLOW_TESTS=1")
	def test_six_dimensional_example_passes(self):
		self.assertTrue(verify_example("restricted-4-4-3-2-k3")["ok"])

	def test_unknown_example_is_invalid(self):
		with self.assertRaises(ValidationError):
			verify_example("nope")

	def test_mismatch_is_reported_and_raised_when_strict(self):
		altered = _altered("quadrilateral-mutation", "image_vertices", [["-1", "0"], ["0", "-1"], ["1", "2"]])
		with patch("polymut.polytopes.golden.load_golden", return_value=altered):
			summary = verify_examples()
			self.assertFalse(summary["ok"])
			self.assertEqual(summary["status"], "FAIL")
			vertex_check = summary["examples"][0]["checks"][0]
			self.assertEqual(vertex_check["missing"], [["1/1", "2/1"]])
			self.assertEqual(vertex_check["unexpected"], [["1/1", "1/1"]])
			with self.assertRaises(GoldenMismatchError) as ctx:
				verify_examples(strict=True)
		self.assertEqual(ctx.exception.details["failed"], ["quadrilateral-mutation"])
		self.assertEqual(ctx.exception.as_payload()["error"], "FAIL")

	def test_wrong_h_star_fails_only_that_check(self):
		altered = _altered("restricted-4-4-3-k2", "h_star", [1, 1, 0, 0, 0])
		with patch("polymut.polytopes.golden.load_golden", return_value=altered):
			report = verify_example("restricted-4-4-3-k2")
		self.assertEqual([c["check"] for c in report["checks"] if not c["ok"]], ["h_star"])


if __name__ == "__main__":
	unittest.main()
