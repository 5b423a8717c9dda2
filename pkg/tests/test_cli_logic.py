from __future__ import annotations

import io
import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from polymut.api import render, run


def _run(*argv: str):
	with patch("sys.stdout", new_callable=io.StringIO) as out:
		code = run(list(argv))
	text = out.getvalue()
	return code, text


def _run_json(*argv: str):
	code, text = _run(*argv)
	return code, json.loads(text)


class CliLogicTests(unittest.TestCase):
	def test_period_of_a_single_box(self):
		code, payload = _run_json("period", "--partition", "1")
		self.assertEqual(code, 0)
		self.assertEqual(
			{k: payload[k] for k in ("ok", "denominator", "period", "collapse")},
			{"ok": True, "denominator": 1, "period": 1, "collapse": False},
		)
		self.assertEqual(payload["spec"]["partition"], [1])
		code, payload = _run_json("vertices", "--partition", "1", "--upset", "empty", "--d", "1", "--k", "1")
		self.assertEqual(code, 0)
		self.assertEqual(payload["vertices"], [["1/1"]])
		self.assertEqual(payload["dimension"], 0)

	def test_bad_input_exits_with_two(self):
		code, payload = _run_json("vertices", "--partition", "3,4")
		self.assertEqual(code, 2)
		self.assertEqual(payload["error"], "INVALID")
		self.assertFalse(payload["ok"])
		code, payload = _run_json("frobnicate")
		self.assertEqual(code, 2)
		self.assertIn("usage", payload["details"])
		code, _ = _run_json("vertices")
		self.assertEqual(code, 2)

	def test_vertices_and_counts(self):
		code, payload = _run_json("vertices", "--spec", "partition=3,2 upset=1,2;2,2")
		self.assertEqual(code, 0)
		self.assertEqual(payload["count"], 9)
		self.assertEqual(payload["dimension"], 5)
		code, payload = _run_json("count", "--partition", "2,2", "--n", "0,1,2,3")
		self.assertEqual([c["count"] for c in payload["counts"]], [1, 6, 20, 50])

	def test_spec_and_partition_clash(self):
		code, payload = _run_json("vertices", "--spec", "partition=2,2", "--partition", "2,2")
		self.assertEqual(code, 2)

	def test_hstar_of_a_periodic_polytope_is_refused(self):
		with tempfile.TemporaryDirectory() as tmp:
			path = Path(tmp) / "triangle.json"
			path.write_text(json.dumps({"vertices": [["0", "0"], ["1/2", "0"], ["0", "1/2"]]}), encoding="utf-8")
			code, payload = _run_json("hstar", "--polytope", str(path))
			self.assertEqual(code, 2)
			self.assertEqual(payload["error"], "PERIOD_NOT_ONE")
			code, payload = _run_json("hstar", "--polytope", str(path), "--dilate", "2")
			self.assertEqual(code, 0)
			self.assertEqual(payload["h_star"], [1, 0, 0])

	def test_malformed_polytope_file_is_invalid_input(self):
		with tempfile.TemporaryDirectory() as tmp:
			path = Path(tmp) / "rows.json"
			for body in ({"inequalities": [1, 2]}, {"inequalities": [[1, 0, 1], [1]]}, [1, 2]):
				path.write_text(json.dumps(body), encoding="utf-8")
				with self.subTest(body=body):
					code, payload = _run_json("vertices", "--polytope", str(path))
					self.assertEqual(code, 2)
					self.assertEqual(payload["error"], "INVALID")

	def test_verify_single_example(self):
		code, payload = _run_json("verify-examples", "--example", "quadrilateral-mutation")
		self.assertEqual(code, 0)
		self.assertEqual(payload["status"], "PASS")
		code, _ = _run_json("verify-examples", "--example", "missing")
		self.assertEqual(code, 2)

	def test_report_written_to_file(self):
		with tempfile.TemporaryDirectory() as tmp:
			target = Path(tmp) / "nested" / "report.json"
			code, text = _run("vertices", "--partition", "2,2", "--out", str(target))
			self.assertEqual(code, 0)
			self.assertEqual(text, "")
			self.assertEqual(json.loads(target.read_text(encoding="utf-8"))["count"], 6)

	def test_table_format(self):
		code, text = _run("vertices", "--partition", "2,2", "--format", "table")
		self.assertEqual(code, 0)
		self.assertIn("count: 6", text.splitlines())
		self.assertIn("ok: true", text.splitlines())
		self.assertEqual(render({"a": [1, 2], "b": {"c": None}}, "table"), "a: 1 2\nb:\n  c: null\n")

	def test_mutation_sequence_on_the_square(self):
		code, payload = _run_json("mutate-seq", "--partition", "2,2", "--check-dilates", "2")
		self.assertEqual(code, 0)
		self.assertTrue(payload["all_verified"])
		steps = payload["trace"]["steps"]
		self.assertEqual(len(steps), 9)
		self.assertEqual(steps[0]["counts"], [1, 6, 20])
		self.assertEqual(payload["trace"]["flag"][0], "empty")
		code, _ = _run_json("mutate-seq", "--partition", "2,2", "--upset", "2,2")
		self.assertEqual(code, 2)

	def test_delete_diagonal(self):
		code, payload = _run_json(
			"delete-diagonal", "--partition", "4,4,3", "--d", "1,2,3,2,2,1", "--k", "2", "--ell", "-1", "--compare", "4"
		)
		self.assertEqual(code, 0)
		self.assertEqual(payload["partition"], [3, 3, 3])
		self.assertEqual(payload["d"], [1, 2, 3, 2, 1])
		self.assertEqual(payload["relation"], "equal")
		self.assertTrue(payload["ehrhart_equal"])
		# dilates up to denominator * (dimension + 1) are always compared
		self.assertEqual(payload["ehrhart_equal_up_to"], 10)
		code, _ = _run_json("delete-diagonal", "--partition", "4,4,3", "--ell", "-1")
		self.assertEqual(code, 2)

	def test_output_is_deterministic(self):
		first = _run("ehrhart", "--partition", "2,2")
		second = _run("ehrhart", "--partition", "2,2")
		self.assertEqual(first, second)
		self.assertEqual(json.loads(first[1])["h_star"], [1, 1, 0, 0, 0])


if __name__ == "__main__":
	unittest.main()
