from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Iterable, List, Sequence, Tuple

from polymut.exceptions import ValidationError

Vector = Tuple[Fraction, ...]


def coerce_text(value: Any) -> str:
	if value is None:
		return ""
	if isinstance(value, str):
		return value
	return str(value)


def as_fraction(value: Any) -> Fraction:
	if isinstance(value, Fraction):
		return value
	if isinstance(value, bool):
		raise ValidationError(f"Not a rational number: {value!r}")
	if isinstance(value, int):
		return Fraction(value)
	numerator = getattr(value, "p", None)
	denominator = getattr(value, "q", None)
	if isinstance(numerator, int) and isinstance(denominator, int):
		# sympy Rational / Integer
		return Fraction(numerator, denominator)
	text = coerce_text(value).strip()
	if not text:
		raise ValidationError("Empty rational literal.")
	try:
		return Fraction(text)
	except (ValueError, ZeroDivisionError):
		raise ValidationError(f"Not a rational number: {text!r}")


def as_vector(values: Iterable[Any]) -> Vector:
	return tuple(as_fraction(v) for v in values)


def format_rational(value: Any) -> str:
	q = as_fraction(value)
	return f"{q.numerator}/{q.denominator}"


def format_vector(values: Iterable[Any]) -> List[str]:
	return [format_rational(v) for v in values]


def dot(a: Sequence[Any], b: Sequence[Any]) -> Any:
	if len(a) != len(b):
		raise ValidationError(f"Dimension mismatch: {len(a)} vs {len(b)}.")
	return sum((x * y for x, y in zip(a, b)), 0)


def gcd_all(values: Iterable[int]) -> int:
	out = 0
	for v in values:
		out = math.gcd(out, int(v))
	return out


def lcm_all(values: Iterable[int]) -> int:
	out = 1
	for v in values:
		out = math.lcm(out, int(v))
	return out


def clear_denominators(values: Sequence[Any]) -> Tuple[int, ...]:
	"""Smallest positive integer multiple of a rational vector, gcd-reduced."""
	fracs = [as_fraction(v) for v in values]
	scale = lcm_all(f.denominator for f in fracs)
	ints = [int(f * scale) for f in fracs]
	g = gcd_all(ints)
	if g > 1:
		ints = [v // g for v in ints]
	return tuple(ints)


def parse_int_list(value: Any, *, sep: str = ",") -> List[int]:
	text = coerce_text(value).strip()
	if not text:
		raise ValidationError("Expected a comma-separated list of integers.")
	out: List[int] = []
	for part in text.split(sep):
		part = part.strip()
		try:
			out.append(int(part))
		except ValueError:
			raise ValidationError(f"Not an integer: {part!r} in {text!r}")
	return out
