import logging

import pytest

from logging_config import LogCatalogue, _level, _TranslatingFilter, register_log_translations, set_log_language


@pytest.fixture(autouse=True)
def _english_afterwards():
    yield
    set_log_language("en")


def test_catalogue_falls_back_to_the_template():
    catalogue = LogCatalogue()
    catalogue.add({"Wrote %s": {"ru": "Записан %s"}})
    assert catalogue.render("Wrote %s") == "Wrote %s"
    catalogue.use("RU ")
    assert catalogue.render("Wrote %s") == "Записан %s"
    assert catalogue.render("Unknown %d") == "Unknown %d"
    catalogue.use("xx")
    assert catalogue.language == "en"


def test_filter_translates_before_interpolation():
    register_log_translations({"Sampled %d fields": {"ru": "Сэмплировано полей: %d"}})
    set_log_language("ru")
    record = logging.LogRecord("igeom", logging.INFO, __file__, 1, "Sampled %d fields", (3,), None)
    assert _TranslatingFilter().filter(record)
    assert record.getMessage() == "Сэмплировано полей: 3"


@pytest.mark.parametrize(
    "value, expected",
    [(None, logging.INFO), ("debug", logging.DEBUG), (" warning ", logging.WARNING), ("15", 15), ("nope", logging.INFO)],
)
def test_level_names(value, expected):
    assert _level(value, logging.INFO) == expected
