"""
Fixtures compartilhadas: as cadeias de referência e um gerador semeado.
"""

import numpy as np
import pytest

from core.config import SIMULACAO_CONFIG
from core.kernel import validate_kernel
from dualidade.chains import BDParams, reflected_walk


@pytest.fixture(autouse=True)
def sem_barra_progresso(monkeypatch):
    monkeypatch.setitem(SIMULACAO_CONFIG, "barra_progresso", False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def cadeia_a():
    """Cadeia de dois estados, π = (0.4, 0.6)."""
    return validate_kernel(np.array([[0.7, 0.3], [0.2, 0.8]]), demand="stochastic")


@pytest.fixture
def cadeia_b():
    """Nascimento e morte em {0,1,2}, π = (1/6, 1/3, 1/2)."""
    return BDParams.from_rates(p=[0.2, 0.3, 0.0], q=[0.0, 0.1, 0.2])


@pytest.fixture
def passeio():
    """Passeio refletido com p = q = 1/2 em {0,1,2}."""
    return reflected_walk(2, 0.5)
