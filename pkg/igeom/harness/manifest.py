"""Run manifests: what ran, with which seed, and the digest of every file it wrote."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from sqlalchemy import create_engine
from sqlalchemy.orm import Session

from db import Base, RunOutput, RunRecord
from logging_config import register_log_translations

logger = logging.getLogger(__name__)

register_log_translations(
    {
        "Manifest written: %s": {
            "ru": "Манифест записан: %s",
        },
        "Run registered as #%d in %s": {
            "ru": "Прогон зарегистрирован как #%d в %s",
        },
        "Run registry unavailable (%s); manifest kept on disk only": {
            "ru": "Реестр прогонов недоступен (%s); манифест сохранён только на диске",
        },
    }
)

MANIFEST_NAME = "manifest.json"


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1024 * 1024), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class OutputEntry:
    path: str
    kind: str
    sha256: str


@dataclass
class RunManifest:
    experiment: str
    config_hash: str
    seed: int
    tool_version: str
    started_at: str
    out_dir: str
    config: Dict[str, Any]
    outputs: List[OutputEntry] = field(default_factory=list)
    passed: Optional[bool] = None
    summary: Dict[str, Any] = field(default_factory=dict)
    finished_at: Optional[str] = None

    @classmethod
    def start(cls, experiment: str, config_hash: str, seed: int, tool_version: str, out_dir: Path, config: Dict[str, Any]):
        return cls(
            experiment=experiment,
            config_hash=config_hash,
            seed=seed,
            tool_version=tool_version,
            started_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            out_dir=str(out_dir),
            config=config,
        )

    def add_output(self, path: Path, kind: Optional[str] = None) -> OutputEntry:
        path = Path(path)
        entry = OutputEntry(
            path=path.relative_to(self.out_dir).as_posix() if path.is_relative_to(self.out_dir) else str(path),
            kind=kind or path.suffix.lstrip(".") or "file",
            sha256=sha256_file(path),
        )
        self.outputs.append(entry)
        return entry

    def digests(self) -> Dict[str, str]:
        return {entry.path: entry.sha256 for entry in self.outputs}

    def finish(self, passed: Optional[bool], summary: Dict[str, Any]) -> None:
        self.passed = passed
        self.summary = summary
        self.finished_at = datetime.now(timezone.utc).isoformat(timespec="seconds")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "configHash": self.config_hash,
            "seed": self.seed,
            "toolVersion": self.tool_version,
            "startedAt": self.started_at,
            "finishedAt": self.finished_at,
            "config": self.config,
            "outputs": [{"path": e.path, "kind": e.kind, "sha256": e.sha256} for e in self.outputs],
            "pass": self.passed,
            "summary": self.summary,
        }

    def write(self) -> Path:
        path = Path(self.out_dir) / MANIFEST_NAME
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
        logger.info("Manifest written: %s", path)
        return path


def read_manifest(path: str | Path) -> Dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _parse_time(value: Optional[str]) -> Optional[datetime]:
    return datetime.fromisoformat(value).replace(tzinfo=None) if value else None


def record_manifest(manifest: RunManifest, database_url: Optional[str]) -> Optional[int]:
    """Mirror the manifest into the run registry; ``None`` when the registry is off or unreachable."""

    if not database_url:
        return None
    try:
        url_path = database_url.split("///", 1)[1] if database_url.startswith("sqlite:///") else None
        if url_path:
            Path(url_path).parent.mkdir(parents=True, exist_ok=True)
        engine = create_engine(database_url)
        Base.metadata.create_all(engine)
        with Session(engine) as session:
            record = RunRecord(
                experiment=manifest.experiment,
                config_hash=manifest.config_hash,
                seed=manifest.seed,
                tool_version=manifest.tool_version,
                out_dir=manifest.out_dir,
                started_at=_parse_time(manifest.started_at),
                finished_at=_parse_time(manifest.finished_at),
                passed=manifest.passed,
                summary=json.dumps(manifest.summary, sort_keys=True),
            )
            record.outputs = [RunOutput(path=e.path, kind=e.kind, sha256=e.sha256) for e in manifest.outputs]
            session.add(record)
            session.commit()
            run_id = record.id
        engine.dispose()
    except Exception as exc:  # the manifest on disk is authoritative
        logger.warning("Run registry unavailable (%s); manifest kept on disk only", exc)
        return None
    logger.info("Run registered as #%d in %s", run_id, database_url)
    return run_id
