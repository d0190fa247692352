import logging
import sys

import colorlog
import pytest

from core.config import LOG_CONFIG
from core.utils import configurar_logging


@pytest.fixture
def raiz_restaurada():
    raiz = logging.getLogger()
    handlers, nivel = list(raiz.handlers), raiz.level
    yield raiz
    for handler in list(raiz.handlers):
        raiz.removeHandler(handler)
        handler.close()
    for handler in handlers:
        raiz.addHandler(handler)
    raiz.setLevel(nivel)


def test_configurar_logging_console_e_arquivo(raiz_restaurada, tmp_path, monkeypatch):
    monkeypatch.setitem(LOG_CONFIG, "console", True)
    arquivo = tmp_path / "logs" / "dualchain.log"

    raiz = configurar_logging("debug", str(arquivo))

    assert raiz is raiz_restaurada
    assert raiz.level == logging.DEBUG
    console, em_arquivo = raiz.handlers
    assert isinstance(console, colorlog.StreamHandler)
    assert console.stream is sys.stdout
    assert isinstance(em_arquivo, logging.FileHandler)
    assert em_arquivo.formatter._fmt == "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    logging.getLogger("dualidade.teste").info("pipeline pronto")
    em_arquivo.flush()
    assert "dualidade.teste - INFO - pipeline pronto" in arquivo.read_text(encoding="utf-8")


def test_configurar_logging_sem_arquivo_substitui_handlers(raiz_restaurada, monkeypatch):
    monkeypatch.setitem(LOG_CONFIG, "console", True)
    monkeypatch.setitem(LOG_CONFIG, "arquivo", None)

    configurar_logging("warning")
    raiz = configurar_logging("info")

    assert len(raiz.handlers) == 1
    assert raiz.level == logging.INFO
