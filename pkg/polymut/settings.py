from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Mapping

FLAG_ORDERS = ("lexmax", "lexmin", "colmax")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass(frozen=True)
class PolymutConfig:
	threads: int
	log_dir: str
	log_level: str
	keep_intermediates: bool
	flag_order: str
	check_dilates: int


def _coerce_bool(value: Any, default: bool) -> bool:
	if value is None:
		return default
	text = str(value).strip().lower()
	if text in {"1", "true", "yes", "on"}:
		return True
	if text in {"0", "false", "no", "off"}:
		return False
	return default


def _coerce_int(value: Any, default: int) -> int:
	try:
		return int(str(value).strip())
	except Exception:
		return default


def normalize_flag_order(value: Any) -> str:
	raw = str(value or "").strip().lower()
	if raw in FLAG_ORDERS:
		return raw
	return "lexmax"


def normalize_log_level(value: Any) -> str:
	raw = str(value or "").strip().upper()
	if raw == "WARN":
		raw = "WARNING"
	if raw in LOG_LEVELS:
		return raw
	return "WARNING"


def get_config(environ: Mapping[str, str] | None = None) -> PolymutConfig:
	env = os.environ if environ is None else environ
	threads = _coerce_int(env.get("POLYMUT_THREADS"), 1)
	if threads < 1:
		threads = 1
	if threads > 64:
		threads = 64
	check_dilates = _coerce_int(env.get("POLYMUT_CHECK_DILATES"), 0)
	if check_dilates < 0:
		check_dilates = 0
	return PolymutConfig(
		threads=threads,
		log_dir=str(env.get("POLYMUT_LOG_DIR") or "").strip(),
		log_level=normalize_log_level(env.get("POLYMUT_LOG_LEVEL")),
		keep_intermediates=_coerce_bool(env.get("POLYMUT_KEEP_INTERMEDIATES"), True),
		flag_order=normalize_flag_order(env.get("POLYMUT_FLAG_ORDER")),
		check_dilates=check_dilates,
	)
