# primindex/services/export.py
"""JSON / CSV / text rendering shared by the commands. Nothing here computes."""

from __future__ import annotations

import csv
import json
import logging
import re
from pathlib import Path
from typing import IO, Any, Iterable, Optional, Sequence

from pydantic import BaseModel

from primindex.config import get_settings
from primindex.services.index import CERTIFICATE_SCHEMA_VERSION, IndexCertificate

logger = logging.getLogger(__name__)


def to_json(payload: Any, indent: Optional[int] = 2) -> str:
    if isinstance(payload, BaseModel):
        return payload.model_dump_json(indent=indent)
    if isinstance(payload, (list, tuple)) and payload and all(isinstance(p, BaseModel) for p in payload):
        return json.dumps([p.model_dump(mode="json") for p in payload], indent=indent)
    return json.dumps(payload, indent=indent, sort_keys=True)


def json_line(payload: Any) -> str:
    return to_json(payload, indent=None)


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_") or "word"


def certificate_path(cert: IndexCertificate, directory: Optional[Path] = None) -> Path:
    directory = directory or get_settings().output_dir
    return Path(directory) / f"{cert.kind}_{_slug(cert.word)}_r{cert.rank}.json"


def write_json(payload: Any, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(payload) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], stream: IO[str]) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow(row)
        count += 1
    return count


def certificate_schema() -> dict:
    schema = IndexCertificate.model_json_schema()
    schema["$schema"] = "https://json-schema.org/draft/2020-12/schema"
    schema["version"] = CERTIFICATE_SCHEMA_VERSION
    return schema


def certificate_summary(cert: IndexCertificate) -> str:
    lines = [
        f"{cert.kind} index of {cert.word} in F_{cert.rank}: {cert.index}",
        f"  cover perms: {cert.cover.perms}",
        f"  basis: {', '.join(cert.basis)}",
        f"  rewritten: {cert.rewritten}",
        f"  evidence: {cert.evidence.path} on {cert.evidence.word}"
        + (f" (generator {cert.evidence.generator})" if cert.evidence.generator else ""),
        f"  re-verified with reversed order: {'yes' if cert.reverified else 'NO'}",
    ]
    for record in cert.lower_bound_log:
        lines.append(
            f"  degree {record.degree}: {record.covers_examined} covers, {record.containing} containing,"
            " all rejected"
        )
    if cert.discrepancy:
        lines.append(
            f"  DISCREPANCY: claimed {cert.discrepancy.claimed}, computed {cert.discrepancy.computed}"
        )
    return "\n".join(lines)
