from __future__ import annotations

from typing import Any, Dict


class PolymutError(Exception):
	code = "ERROR"

	def __init__(self, message: str = "", *, details: Dict[str, Any] | None = None) -> None:
		super().__init__(message)
		self.message = str(message or "")
		self.details: Dict[str, Any] = dict(details or {})

	def as_payload(self) -> Dict[str, Any]:
		payload: Dict[str, Any] = {"ok": False, "error": self.code, "message": self.message}
		if self.details:
			payload["details"] = self.details
		return payload


class ValidationError(PolymutError):
	code = "INVALID"


class UnboundedError(ValidationError):
	code = "UNBOUNDED"


class EmptyPolytopeError(ValidationError):
	code = "EMPTY"


class PeriodNotOneError(ValidationError):
	code = "PERIOD_NOT_ONE"


class VerificationError(PolymutError):
	code = "VERIFICATION_FAILED"


class NotConvexError(VerificationError):
	code = "NOT_CONVEX"


class FitVerificationError(VerificationError):
	code = "VERIFICATION_FAILED"


class MutationCheckError(VerificationError):
	code = "MUTATION_CHECK_FAILED"


class GoldenMismatchError(VerificationError):
	code = "FAIL"
