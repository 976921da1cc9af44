"""Console logging for lab runs.

The CLI logs through rich when it is installed; process-pool workers log
plain lines tagged with their pid. Log templates are written in English and
translated on the way out (``LOG_LANGUAGE``, Russian is bundled by the
modules that log).
"""

from __future__ import annotations

import logging
import os
from typing import Dict, Mapping, Optional

try:  # rich console output when installed
    from rich.console import Console
    from rich.logging import RichHandler
except ImportError:  # pragma: no cover - rich is optional at runtime
    RichHandler = None  # type: ignore[assignment]
    Console = None  # type: ignore[assignment]

DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
PLAIN_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
WORKER_FORMAT = "%(asctime)s | %(process)d | %(name)s | %(message)s"

BASE_LANGUAGE = "en"

# third-party loggers that drown experiment progress at INFO
LIBRARY_LEVELS: Dict[str, str] = {
    "sqlalchemy.engine": "WARNING",
    "PIL": "WARNING",
    "concurrent.futures": "WARNING",
    "hypothesis": "WARNING",
}


class LogCatalogue:
    """English log templates and their translations, keyed by template."""

    def __init__(self, languages: tuple[str, ...] = (BASE_LANGUAGE, "ru")) -> None:
        self._messages: Dict[str, Dict[str, str]] = {}
        self._languages = set(languages)
        self.language = BASE_LANGUAGE

    def add(self, translations: Mapping[str, Mapping[str, str]]) -> None:
        for template, localized in translations.items():
            bucket = self._messages.setdefault(template, {})
            for language, message in localized.items():
                code = language.strip().lower()
                if code:
                    bucket[code] = message
                    self._languages.add(code)

    def use(self, language: Optional[str]) -> None:
        code = (language or "").strip().lower()
        self.language = code if code in self._languages else BASE_LANGUAGE

    def languages(self) -> tuple[str, ...]:
        return tuple(sorted(self._languages))

    def render(self, template: str) -> str:
        return self._messages.get(template, {}).get(self.language, template)


_CATALOGUE = LogCatalogue()


class _TranslatingFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        if isinstance(record.msg, str):
            record.msg = _CATALOGUE.render(record.msg)
        return True


def _level(value: str | int | None, fallback: int) -> int:
    if value is None or value == "":
        return fallback
    if isinstance(value, int):
        return value
    name = value.strip().upper()
    if name.isdigit():
        return int(name)
    return getattr(logging, name, fallback)


def register_log_translations(translations: Mapping[str, Mapping[str, str]]) -> None:
    """Add translations for English templates.

    Placeholders (``%s``, ``%d``, ``%.3g``) must be kept in every language since
    interpolation happens after translation.
    """

    _CATALOGUE.add(translations)


def set_log_language(language: Optional[str]) -> None:
    _CATALOGUE.use(language)


def get_log_language() -> str:
    return _CATALOGUE.language


def available_log_languages() -> tuple[str, ...]:
    return _CATALOGUE.languages()


def get_default_log_language() -> str:
    return BASE_LANGUAGE


def _console_handler() -> logging.Handler:
    if RichHandler is None:
        handler: logging.Handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT, DATE_FORMAT))
        return handler
    handler = RichHandler(
        console=Console(stderr=True, soft_wrap=False),
        rich_tracebacks=True,
        show_path=False,
        log_time_format=DATE_FORMAT,
    )
    handler.setFormatter(logging.Formatter("%(name)s | %(message)s"))
    return handler


def setup_logging(
    *,
    level: str | int | None = None,
    language: Optional[str] = None,
    module_levels: Optional[Mapping[str, str | int]] = None,
) -> None:
    """Configure root logging for a CLI run.

    ``level`` falls back to ``LOG_LEVEL`` then INFO, ``language`` to
    ``LOG_LANGUAGE``. ``module_levels`` overrides :data:`LIBRARY_LEVELS`.
    """

    set_log_language(language or os.getenv("LOG_LANGUAGE"))
    handler = _console_handler()
    handler.addFilter(_TranslatingFilter())
    logging.basicConfig(level=_level(level or os.getenv("LOG_LEVEL"), logging.INFO), handlers=[handler], force=True)
    logging.captureWarnings(True)

    levels: Dict[str, str | int] = {**LIBRARY_LEVELS, "sqlalchemy.engine": os.getenv("SQL_LOG_LEVEL", "WARNING")}
    levels.update(module_levels or {})
    for name, value in levels.items():
        logging.getLogger(name).setLevel(_level(value, logging.WARNING))


def configure_worker_logging(level: str | int | None, language: Optional[str]) -> None:
    """Plain stderr logging inside a pool worker; one rich console per run is enough."""

    set_log_language(language)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(WORKER_FORMAT, DATE_FORMAT))
    handler.addFilter(_TranslatingFilter())
    logging.basicConfig(level=_level(level, logging.WARNING), handlers=[handler], force=True)


__all__ = [
    "LIBRARY_LEVELS",
    "LogCatalogue",
    "available_log_languages",
    "configure_worker_logging",
    "get_default_log_language",
    "get_log_language",
    "register_log_translations",
    "set_log_language",
    "setup_logging",
]
