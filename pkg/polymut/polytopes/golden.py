from __future__ import annotations

import json
from functools import cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from polymut.exceptions import GoldenMismatchError, ValidationError
from polymut.logger import append_jsonl, get_logger
from polymut.polytopes.common import as_vector, format_vector
from polymut.polytopes.ehrhart import ehrhart_equal, fit_quasi_polynomial, h_star, minimal_period, period_report
from polymut.polytopes.geometry import Polytope, dimension, enumerate_vertices, hull
from polymut.polytopes.plmaps import TropicalMap, mutate
from polymut.polytopes.poset import delete_diagonal, from_partition, parse_up_set
from polymut.polytopes.posetpoly import chain_order_polytope, restricted_chain_order

_logger = get_logger("golden")

FIXTURE_PATH = Path(__file__).resolve().parent.parent / "fixtures" / "golden_examples.json"


@cache
def load_golden() -> Dict[str, Dict[str, Any]]:
	with FIXTURE_PATH.open("r", encoding="utf-8") as handle:
		return json.load(handle)


def example_ids(*, include_slow: bool = True) -> List[str]:
	data = load_golden()
	return [key for key, value in data.items() if include_slow or not value.get("slow")]


def _vertex_key(points: Iterable[Sequence[Any]]) -> List[Tuple[str, ...]]:
	return sorted(tuple(format_vector(as_vector(p))) for p in points)


def _check(name: str, expected: Any, actual: Any) -> Dict[str, Any]:
	return {"check": name, "ok": expected == actual, "expected": expected, "actual": actual}


def _vertex_check(expected_points: Iterable[Sequence[Any]], polytope: Polytope) -> Dict[str, Any]:
	want = _vertex_key(expected_points)
	got = _vertex_key(enumerate_vertices(polytope))
	out = {"check": "vertices", "ok": want == got, "count": len(got)}
	if want != got:
		out["missing"] = [list(v) for v in want if v not in set(got)]
		out["unexpected"] = [list(v) for v in got if v not in set(want)]
	return out


def _columns(matrix: Sequence[Sequence[Any]]) -> List[List[Any]]:
	return [list(col) for col in zip(*matrix)]


def _verify_mutation(data: Dict[str, Any]) -> List[Dict[str, Any]]:
	source = hull(data["points"])
	m = TropicalMap(tuple(data["map"]["w"]), tuple(tuple(f) for f in data["map"]["F"]))
	image, record = mutate(source, m)
	checks = [
		_vertex_check(data["image_vertices"], image),
		_check("mutation_verified", True, record.verified),
		_check("period", data["period"], period_report(source).as_dict()),
		_check("image_period", data["image_period"], period_report(image).as_dict()),
	]
	n_max = int(data["ehrhart_equal_up_to"])
	checks.append(_check("ehrhart_equal", True, ehrhart_equal(source, image, n_max)))
	return checks


def _verify_chain_order(data: Dict[str, Any]) -> List[Dict[str, Any]]:
	diagram = from_partition(data["partition"])
	polytope = chain_order_polytope(diagram, parse_up_set(diagram, data["upset"]))
	return [_vertex_check(data["vertices"], polytope)]


def _verify_restricted(data: Dict[str, Any]) -> List[Dict[str, Any]]:
	diagram = from_partition(data["partition"])
	upset = parse_up_set(diagram, data["upset"])
	polytope = restricted_chain_order(diagram, upset, data["d"], int(data["k"]))
	points = data.get("vertices") or _columns(data["vertex_matrix"])
	checks = [_vertex_check(points, polytope), _check("dimension", data["dimension"], dimension(polytope))]
	q = fit_quasi_polynomial(polytope)
	s = minimal_period(q)
	checks.append(_check("period", data["period"], {"denominator": q.modulus, "period": s, "collapse": s != q.modulus}))
	checks.append(_check("polynomial", [format_vector(as_vector(data["polynomial"]))] * q.modulus, q.descending()))
	checks.append(_check("h_star", list(data["h_star"]), list(h_star(q).entries) if s == 1 else None))
	deletion = data.get("delete_diagonal")
	if deletion:
		reduced = delete_diagonal(diagram, data["d"], int(deletion["ell"]))
		checks.append(_check("deleted_partition", list(deletion["partition"]), list(reduced.diagram.partition)))
		checks.append(_check("deleted_d", list(deletion["d"]), list(reduced.dvector)))
		other = restricted_chain_order(
			reduced.diagram, parse_up_set(reduced.diagram, "empty"), reduced.dvector, int(data["k"])
		)
		n_max = int(deletion["ehrhart_equal_up_to"])
		checks.append(_check("deleted_ehrhart_equal", True, ehrhart_equal(polytope, other, n_max)))
	return checks


def verify_example(example_id: str) -> Dict[str, Any]:
	data = load_golden().get(example_id)
	if data is None:
		raise ValidationError(f"Unknown example {example_id!r}; expected one of {example_ids()}.")
	if "points" in data:
		checks = _verify_mutation(data)
	elif "d" in data:
		checks = _verify_restricted(data)
	else:
		checks = _verify_chain_order(data)
	ok = all(c["ok"] for c in checks)
	report = {"example": example_id, "ok": ok, "status": "PASS" if ok else "FAIL", "checks": checks}
	if not ok:
		_logger.warning("golden example %s failed: %s", example_id, [c["check"] for c in checks if not c["ok"]])
	append_jsonl("golden", {"example": example_id, "ok": ok})
	return report


def verify_examples(ids: Optional[Sequence[str]] = None, *, include_slow: bool = True, strict: bool = False) -> Dict[str, Any]:
	selected = list(ids) if ids else example_ids(include_slow=include_slow)
	reports = [verify_example(i) for i in selected]
	ok = all(r["ok"] for r in reports)
	summary = {"ok": ok, "status": "PASS" if ok else "FAIL", "examples": reports}
	if strict and not ok:
		raise GoldenMismatchError(
			"Golden examples do not match.",
			details={"failed": [r["example"] for r in reports if not r["ok"]], "examples": reports},
		)
	return summary
