from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from polymut import __version__
from polymut.exceptions import PolymutError, ValidationError, VerificationError
from polymut.logger import get_logger
from polymut.polytopes.common import format_vector, parse_int_list
from polymut.polytopes.ehrhart import (
	ehrhart_check_bound,
	ehrhart_equal,
	ehrhart_report,
	fit_quasi_polynomial,
	h_star,
	lattice_counts,
	period_report,
)
from polymut.polytopes.geometry import (
	Polytope,
	denominator,
	dilate,
	dimension,
	enumerate_vertices,
	from_json,
	to_json,
)
from polymut.polytopes.golden import example_ids, verify_examples
from polymut.polytopes.plmaps import lattice_intermediates, mutation_sequence
from polymut.polytopes.poset import delete_diagonal, empty_up_set
from polymut.polytopes.posetpoly import PolytopeSpec, make_spec, parse_spec, restricted_chain_order
from polymut.settings import FLAG_ORDERS

_logger = get_logger("api")


class _Parser(argparse.ArgumentParser):
	def error(self, message: str) -> None:  # type: ignore[override]
		raise ValidationError(message, details={"usage": self.format_usage().strip()})


def _add_polytope_flags(parser: argparse.ArgumentParser) -> None:
	parser.add_argument("--spec", help='e.g. "partition=4,4,3 upset=empty d=1,2,3,2,2,1 k=2"')
	parser.add_argument("--polytope", type=Path, help="polytope JSON file instead of a spec")
	parser.add_argument("--partition", help="weakly decreasing parts, e.g. 4,4,3")
	parser.add_argument("--upset", help='"empty", "full" or generators like "3,4;2,5"')
	parser.add_argument("--d", dest="dvector", help="restriction vector d_{m1-1},...,d_{1-m2}")
	parser.add_argument("--k", help="dilation inside the construction (default 1)")
	parser.add_argument("--dilate", type=int, default=1, help="scale the finished polytope")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
	parser.add_argument("--format", choices=("json", "table"), default="json")
	parser.add_argument("--out", type=Path, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
	parser = _Parser(prog="polymut", description="Chain-order polytopes of Young diagrams and their mutations.")
	parser.add_argument("--version", action="version", version=f"polymut {__version__}")
	sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
	sub.required = True

	for name, text in (
		("build", "constraints and vertices as polytope JSON"),
		("vertices", "sorted vertex list with dimension and denominator"),
		("ehrhart", "Ehrhart quasi-polynomial, period and h*-vector"),
		("period", "denominator, minimal period and collapse flag"),
		("hstar", "h*-vector of a polytope with polynomial Ehrhart function"),
	):
		p = sub.add_parser(name, help=text)
		_add_polytope_flags(p)
		_add_output_flags(p)

	p = sub.add_parser("count", help="lattice points in dilates")
	_add_polytope_flags(p)
	p.add_argument("--n", default="0,1,2,3", help="comma-separated dilation factors")
	_add_output_flags(p)

	p = sub.add_parser("mutate-seq", help="verified mutation sequence from the order side to the chain side")
	_add_polytope_flags(p)
	p.add_argument("--check-dilates", type=int, default=None, help="compare counts for dilates 0..N at every step")
	p.add_argument("--flag-order", choices=FLAG_ORDERS, default=None)
	_add_output_flags(p)

	p = sub.add_parser("delete-diagonal", help="remove a diagonal whose d entry matches its partner")
	_add_polytope_flags(p)
	p.add_argument("--ell", type=int, required=True, help="diagonal index")
	p.add_argument("--compare", type=int, default=0, help="compare Ehrhart counts for dilates 0..N")
	_add_output_flags(p)

	p = sub.add_parser("verify-examples", help="replay the embedded worked examples")
	group = p.add_mutually_exclusive_group(required=True)
	group.add_argument("--example", action="append", choices=example_ids())
	group.add_argument("--all", action="store_true")
	p.add_argument("--skip-slow", action="store_true", help="skip examples marked slow")
	_add_output_flags(p)
	return parser


def _resolve_spec(args: argparse.Namespace) -> PolytopeSpec:
	if args.spec:
		if args.partition:
			raise ValidationError("--spec and --partition are mutually exclusive.")
		return parse_spec(args.spec)
	if not args.partition:
		raise ValidationError("One of --spec, --partition or --polytope is required.")
	return make_spec(args.partition, args.upset, args.dvector, args.k)


def _resolve_polytope(args: argparse.Namespace) -> tuple[Optional[PolytopeSpec], Polytope]:
	if args.polytope:
		if args.spec or args.partition:
			raise ValidationError("--polytope cannot be combined with --spec or --partition.")
		try:
			payload = json.loads(args.polytope.read_text(encoding="utf-8"))
		except (OSError, json.JSONDecodeError) as exc:
			raise ValidationError(f"--polytope: cannot read {args.polytope}: {exc}")
		polytope = from_json(payload)
		spec = None
	else:
		spec = _resolve_spec(args)
		polytope = spec.build()
	if args.dilate != 1:
		polytope = dilate(polytope, args.dilate)
	return spec, polytope


def _header(spec: Optional[PolytopeSpec], args: argparse.Namespace) -> Dict[str, Any]:
	out: Dict[str, Any] = {"ok": True}
	if spec is not None:
		out["spec"] = spec.as_dict()
	if args.dilate != 1:
		out["dilate"] = args.dilate
	return out


def _cmd_build(args: argparse.Namespace) -> Dict[str, Any]:
	spec, polytope = _resolve_polytope(args)
	payload = to_json(polytope)
	payload["vertices"] = [format_vector(v) for v in sorted(enumerate_vertices(polytope))]
	return {**_header(spec, args), "polytope": payload}


def _cmd_vertices(args: argparse.Namespace) -> Dict[str, Any]:
	spec, polytope = _resolve_polytope(args)
	points = sorted(enumerate_vertices(polytope))
	out = {**_header(spec, args), "count": len(points), "vertices": [format_vector(v) for v in points]}
	if points:
		out["dimension"] = dimension(polytope)
		out["denominator"] = denominator(polytope)
	return out


def _cmd_count(args: argparse.Namespace) -> Dict[str, Any]:
	spec, polytope = _resolve_polytope(args)
	ns = parse_int_list(args.n)
	counts = lattice_counts(polytope, ns)
	return {**_header(spec, args), "counts": [{"n": n, "count": c} for n, c in zip(ns, counts)]}


def _cmd_ehrhart(args: argparse.Namespace) -> Dict[str, Any]:
	spec, polytope = _resolve_polytope(args)
	return {**_header(spec, args), **ehrhart_report(polytope)}


def _cmd_period(args: argparse.Namespace) -> Dict[str, Any]:
	spec, polytope = _resolve_polytope(args)
	return {**_header(spec, args), **period_report(polytope).as_dict()}


def _cmd_hstar(args: argparse.Namespace) -> Dict[str, Any]:
	spec, polytope = _resolve_polytope(args)
	h = h_star(fit_quasi_polynomial(polytope))
	return {**_header(spec, args), "h_star": list(h.entries), "degree": h.degree}


def _cmd_mutate_seq(args: argparse.Namespace) -> Dict[str, Any]:
	if args.polytope or args.dilate != 1:
		raise ValidationError("mutate-seq builds its own polytopes; use --spec or --partition and --k.")
	spec = _resolve_spec(args)
	if spec.upset.members:
		raise ValidationError("mutate-seq starts from the empty up-set; drop --upset.")
	trace = mutation_sequence(
		spec.diagram,
		spec.dvector,
		spec.dilate,
		check_dilates=args.check_dilates,
		keep_intermediates=False,
		flag_order=args.flag_order,
	)
	return {
		**_header(spec, args),
		"trace": trace.as_dict(),
		"all_verified": all(s.verified for s in trace.steps),
		"lattice_intermediates": lattice_intermediates(trace),
	}


def _cmd_delete_diagonal(args: argparse.Namespace) -> Dict[str, Any]:
	if args.polytope:
		raise ValidationError("delete-diagonal needs a restricted spec, not --polytope.")
	spec = _resolve_spec(args)
	if spec.dvector is None:
		raise ValidationError("delete-diagonal needs --d.")
	deletion = delete_diagonal(spec.diagram, spec.dvector, args.ell)
	out = {
		**_header(spec, args),
		"ell": deletion.ell,
		"partner": deletion.partner_ell,
		"relation": deletion.relation,
		"partition": list(deletion.diagram.partition),
		"d": list(deletion.dvector),
	}
	if args.compare > 0:
		source = spec.build()
		reduced = restricted_chain_order(
			deletion.diagram, empty_up_set(deletion.diagram), deletion.dvector, spec.dilate
		)
		out["ehrhart_equal_up_to"] = max(args.compare, ehrhart_check_bound(source, reduced))
		out["ehrhart_equal"] = ehrhart_equal(source, reduced, args.compare)
		if not out["ehrhart_equal"]:
			raise VerificationError("Deleting the diagonal changed the lattice-point counts.", details=out)
	return out


def _cmd_verify_examples(args: argparse.Namespace) -> Dict[str, Any]:
	ids = None if args.all else args.example
	return verify_examples(ids, include_slow=not args.skip_slow, strict=True)


COMMANDS: Dict[str, Callable[[argparse.Namespace], Dict[str, Any]]] = {
	"build": _cmd_build,
	"vertices": _cmd_vertices,
	"count": _cmd_count,
	"ehrhart": _cmd_ehrhart,
	"period": _cmd_period,
	"hstar": _cmd_hstar,
	"mutate-seq": _cmd_mutate_seq,
	"delete-diagonal": _cmd_delete_diagonal,
	"verify-examples": _cmd_verify_examples,
}


def _table_lines(payload: Dict[str, Any], indent: str = "") -> List[str]:
	lines: List[str] = []
	for key in sorted(payload):
		value = payload[key]
		if isinstance(value, dict):
			lines.append(f"{indent}{key}:")
			lines.extend(_table_lines(value, indent + "  "))
		elif isinstance(value, list) and value and isinstance(value[0], (list, dict)):
			lines.append(f"{indent}{key}:")
			for item in value:
				if isinstance(item, dict):
					lines.append(f"{indent}  -")
					lines.extend(_table_lines(item, indent + "    "))
				else:
					lines.append(f"{indent}  " + " ".join(str(v) for v in item))
		elif isinstance(value, list):
			lines.append(f"{indent}{key}: " + " ".join(str(v) for v in value))
		else:
			lines.append(f"{indent}{key}: {json.dumps(value) if value is None or isinstance(value, bool) else value}")
	return lines


def render(payload: Dict[str, Any], fmt: str = "json") -> str:
	if fmt == "table":
		return "\n".join(_table_lines(payload)) + "\n"
	return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def _emit(text: str, out: Optional[Path]) -> None:
	if out is None:
		sys.stdout.write(text)
		return
	out.parent.mkdir(parents=True, exist_ok=True)
	out.write_text(text, encoding="utf-8")


def run(argv: Optional[Sequence[str]] = None) -> int:
	"""Execute one subcommand; 0 on success, 1 on a failed verification, 2 on bad input."""
	parser = build_parser()
	fmt, out = "json", None
	try:
		args = parser.parse_args(list(argv) if argv is not None else None)
		fmt, out = args.format, args.out
		payload = COMMANDS[args.command](args)
		status = 0
	except SystemExit as exc:
		# --help / --version
		return int(exc.code or 0)
	except ValidationError as exc:
		payload, status = exc.as_payload(), 2
	except VerificationError as exc:
		_logger.warning("verification failed: %s", exc.message)
		payload, status = exc.as_payload(), 1
	except PolymutError as exc:
		payload, status = exc.as_payload(), 1
	try:
		_emit(render(payload, fmt), out)
	except OSError as exc:
		sys.stderr.write(f"polymut: cannot write {out}: {exc}\n")
		return 2
	return status


def main() -> None:
	sys.exit(run())
