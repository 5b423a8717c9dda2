from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Poly, Rational, binomial, interpolate
from sympy.abc import t, x

from polymut.exceptions import EmptyPolytopeError, FitVerificationError, PeriodNotOneError, ValidationError
from polymut.logger import append_jsonl, get_logger
from polymut.polytopes.common import as_fraction, format_rational
from polymut.polytopes.geometry import (
	Polytope,
	count_plan,
	count_with_plan,
	denominator,
	dimension,
	enumerate_vertices,
)
from polymut.settings import get_config

_logger = get_logger("ehrhart")


@dataclass(frozen=True)
class QuasiPolynomial:
	"""constituents[r][i] is the coefficient of n**i for n = r mod modulus."""

	degree: int
	modulus: int
	constituents: Tuple[Tuple[Fraction, ...], ...]

	def evaluate(self, n: int) -> Fraction:
		coeffs = self.constituents[n % self.modulus]
		return sum((c * n**i for i, c in enumerate(coeffs)), Fraction(0))

	def leading(self) -> Fraction:
		return self.constituents[0][self.degree]

	def descending(self) -> List[List[str]]:
		return [[format_rational(c) for c in reversed(coeffs)] for coeffs in self.constituents]


@dataclass(frozen=True)
class PeriodReport:
	denominator: int
	period: int
	collapse: bool

	def as_dict(self) -> Dict[str, Any]:
		return {"denominator": self.denominator, "period": self.period, "collapse": self.collapse}


@dataclass(frozen=True)
class HStarVector:
	entries: Tuple[int, ...]

	@property
	def degree(self) -> int:
		return hstar_degree(self)


def lattice_counts(polytope: Polytope, ns: Iterable[int], threads: Optional[int] = None) -> List[int]:
	"""L_P(n) for each requested dilate, fanned out over processes when threads > 1."""
	dilates = [int(n) for n in ns]
	if any(n < 0 for n in dilates):
		raise ValidationError("Dilates must be nonnegative.")
	plan = count_plan(polytope)
	workers = get_config().threads if threads is None else max(1, int(threads))
	if workers > 1 and len(dilates) > 1:
		with ProcessPoolExecutor(max_workers=min(workers, len(dilates))) as pool:
			counts = list(pool.map(count_with_plan, [plan] * len(dilates), dilates))
	else:
		counts = [count_with_plan(plan, n) for n in dilates]
	_logger.debug("counted dilates %s: %s", dilates, counts)
	return counts


def fit_from_counts(counts: Sequence[int], degree: int, modulus: int) -> QuasiPolynomial:
	"""Interpolate each residue class on degree+1 samples and check one extra sample per class."""
	need = modulus * (degree + 2)
	if len(counts) < need:
		raise ValidationError(f"Fitting degree {degree} with modulus {modulus} needs {need} counts, got {len(counts)}.")
	constituents = []
	for r in range(modulus):
		samples = [(r + j * modulus, counts[r + j * modulus]) for j in range(degree + 1)]
		poly = Poly(interpolate(samples, t), t, domain="QQ")
		coeffs = [as_fraction(c) for c in reversed(poly.all_coeffs())]
		coeffs += [Fraction(0)] * (degree + 1 - len(coeffs))
		constituents.append(tuple(coeffs[: degree + 1]))
	q = QuasiPolynomial(degree, modulus, tuple(constituents))
	for n in range(min(len(counts), need)):
		if q.evaluate(n) != counts[n]:
			raise FitVerificationError(
				"Fitted quasi-polynomial disagrees with a counted dilate.",
				details={"n": n, "count": counts[n], "fitted": format_rational(q.evaluate(n))},
			)
	return q


def fit_quasi_polynomial(polytope: Polytope, threads: Optional[int] = None) -> QuasiPolynomial:
	if not enumerate_vertices(polytope):
		raise EmptyPolytopeError("The Ehrhart function of an empty polytope is zero.")
	degree = dimension(polytope)
	modulus = denominator(polytope)
	counts = lattice_counts(polytope, range(modulus * (degree + 2)), threads)
	return fit_from_counts(counts, degree, modulus)


def minimal_period(q: QuasiPolynomial) -> int:
	for s in range(1, q.modulus + 1):
		if q.modulus % s:
			continue
		if all(q.constituents[r] == q.constituents[r % s] for r in range(q.modulus)):
			return s
	return q.modulus


def period_report(polytope: Polytope, threads: Optional[int] = None) -> PeriodReport:
	q = fit_quasi_polynomial(polytope, threads)
	s = minimal_period(q)
	return PeriodReport(q.modulus, s, s != q.modulus)


@cache
def _eulerian_number(n: int, k: int) -> int:
	return int(sum((-1) ** i * binomial(n + 1, i) * (k + 1 - i) ** n for i in range(k + 1)))


@cache
def _eulerian_poly(n: int) -> Poly:
	if n == 0:
		return Poly(1, x)
	return Poly(sum(_eulerian_number(n, k - 1) * x**k for k in range(1, n + 1)), x)


def h_star(q: QuasiPolynomial) -> HStarVector:
	"""Numerator of the Ehrhart series over (1 - x)**(d + 1), from the monomial coefficients."""
	if minimal_period(q) != 1:
		raise PeriodNotOneError(
			"h*-vector needs a polynomial Ehrhart function.", details={"modulus": q.modulus}
		)
	d = q.degree
	coeffs = q.constituents[0]
	total = Poly(0, x)
	for i in range(d + 1):
		if not coeffs[i]:
			continue
		c = Poly(Rational(coeffs[i].numerator, coeffs[i].denominator), x, domain="QQ")
		total += c * _eulerian_poly(i) * Poly((1 - x) ** (d - i), x)
	values = [as_fraction(c) for c in reversed(total.all_coeffs())]
	values += [Fraction(0)] * (d + 1 - len(values))
	if any(v.denominator != 1 for v in values):
		raise FitVerificationError("h*-vector has non-integral entries.", details={"h_star": [str(v) for v in values]})
	return HStarVector(tuple(int(v) for v in values[: d + 1]))


def hstar_degree(h: HStarVector | Sequence[int]) -> int:
	entries = h.entries if isinstance(h, HStarVector) else tuple(h)
	nonzero = [i for i, v in enumerate(entries) if v]
	return nonzero[-1] if nonzero else 0


def ehrhart_check_bound(p: Polytope, q: Polytope) -> int:
	"""Dilate up to which equal counts determine equal Ehrhart quasi-polynomials."""
	sizes = [(denominator(poly), dimension(poly)) for poly in (p, q) if enumerate_vertices(poly)]
	if not sizes:
		return 0
	return max(den for den, _ in sizes) * (max(dim for _, dim in sizes) + 1)


def ehrhart_equal(p: Polytope, q: Polytope, n_max: int, threads: Optional[int] = None) -> bool:
	"""Compare lattice counts on dilates 0..N, N raised to ehrhart_check_bound when smaller."""
	if isinstance(n_max, bool) or not isinstance(n_max, int) or n_max < 0:
		raise ValidationError(f"n_max must be a non-negative integer, got {n_max!r}.")
	bound = ehrhart_check_bound(p, q)
	if n_max < bound:
		_logger.debug("ehrhart_equal: raising n_max from %s to %s", n_max, bound)
		n_max = bound
	dilates = range(n_max + 1)
	return lattice_counts(p, dilates, threads) == lattice_counts(q, dilates, threads)


def ehrhart_report(polytope: Polytope, threads: Optional[int] = None) -> Dict[str, Any]:
	q = fit_quasi_polynomial(polytope, threads)
	s = minimal_period(q)
	hs = h_star(q) if s == 1 else None
	report = {
		"denominator": q.modulus,
		"period": s,
		"collapse": s != q.modulus,
		"degree": q.degree,
		"constituents": q.descending(),
		"h_star": list(hs.entries) if hs is not None else None,
	}
	if hs is not None:
		report["h_star_degree"] = hs.degree
	append_jsonl("ehrhart", report)
	return report
