from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict

from polymut.settings import get_config

_ROOT = "polymut"
_configured: set[str] = set()


def get_logger(module: str, *, file_count: int = 20) -> logging.Logger:
	name = f"{_ROOT}.{module}" if module else _ROOT
	logger = logging.getLogger(name)
	if name in _configured:
		return logger
	_configured.add(name)
	cfg = get_config()
	logger.setLevel(cfg.log_level)
	if cfg.log_dir:
		try:
			path = Path(cfg.log_dir) / f"polymut_{module or 'main'}.log"
			path.parent.mkdir(parents=True, exist_ok=True)
			handler = RotatingFileHandler(path, maxBytes=1_000_000, backupCount=file_count, encoding="utf-8")
			handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
			logger.addHandler(handler)
		except OSError:
			pass
	return logger


def append_jsonl(kind: str, payload: Dict[str, Any]) -> None:
	"""Persist one diagnostic record as a JSON line; silently skipped without a log dir."""
	cfg = get_config()
	if not cfg.log_dir:
		return
	record = dict(payload or {})
	record["kind"] = kind
	record["logged_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
	try:
		line = json.dumps(record, ensure_ascii=True, sort_keys=True, default=str)
	except Exception:
		return
	try:
		path = Path(cfg.log_dir) / f"polymut_{kind}.log"
		path.parent.mkdir(parents=True, exist_ok=True)
		with path.open("a", encoding="utf-8") as handle:
			handle.write(line + "\n")
	except OSError:
		return
