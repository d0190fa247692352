import json
import os

import numpy as np
import pytest

from core.erros import ConfigParse
from core.utils import ler_matriz_csv
from dualidade.cli import parse_config, run, verify
from main import main

CADEIA_A = {"kind": "dense", "matrix": [[0.7, 0.3], [0.2, 0.8]]}
NAO_MONOTONA = {"kind": "dense", "matrix": [[0.2, 0.8], [0.9, 0.1]]}


@pytest.fixture
def escrever(tmp_path):
    def _escrever(dados, nome="config.json"):
        caminho = tmp_path / nome
        caminho.write_text(dados if isinstance(dados, str) else json.dumps(dados), encoding="utf-8")
        return str(caminho)
    return _escrever


@pytest.fixture
def saida(tmp_path):
    return str(tmp_path / "out")


def _resumo(saida, comando):
    with open(os.path.join(saida, f"{comando}.json"), encoding="utf-8") as f:
        return json.load(f)


def test_build_grava_matriz_com_ida_e_volta(escrever, saida):
    resultado = run("build", escrever(CADEIA_A), saida=saida)
    assert resultado.codigo == 0
    assert resultado.resumo["ida_e_volta"]
    np.testing.assert_array_equal(ler_matriz_csv(os.path.join(saida, "build_P.csv")),
                                  np.array(CADEIA_A["matrix"]))
    assert _resumo(saida, "build")["pi"] == pytest.approx([0.4, 0.6])


def test_dual_siegmund_cadeia_a(escrever, saida):
    resultado = run("dual", escrever(CADEIA_A), saida=saida)
    assert resultado.codigo == 0
    assert resultado.resumo["feasible"]
    assert resultado.resumo["leak0"] == pytest.approx(0.3)
    np.testing.assert_allclose(ler_matriz_csv(os.path.join(saida, "dual_P_hat.csv")),
                               [[0.5, 0.2], [0.0, 1.0]], atol=1e-15)
    assert _resumo(saida, "dual")["codigo"] == 0


def test_dual_ultrametrico_acima_do_limiar(escrever, saida):
    config = dict(CADEIA_A, dual={"family": "ultrametric", "k": 0, "alpha": 3.5})
    resultado = run("dual", escrever(config), saida=saida)
    assert resultado.codigo == 2
    assert resultado.resumo["feasible"]
    assert resultado.resumo["rigidez"]["massa_linha_zero"] == pytest.approx(1.4)
    assert resultado.resumo["rigidez"]["limiar_alpha"] == pytest.approx(1.5)
    assert not resultado.resumo["rigidez"]["admissible"]


def test_verify_cadeia_a(escrever, saida):
    resultado = run("verify", escrever(CADEIA_A), saida=saida)
    assert resultado.codigo == 0, resultado.resumo["checks"]
    checks = resultado.resumo["checks"]
    assert next(iter(checks)) == "siegmund_feasible"
    assert all(v is not False for v in checks.values())
    assert checks["absorption_agreement"]
    assert os.path.exists(os.path.join(saida, "verify_checks.csv"))


def test_verify_cadeia_nao_monotona():
    checagens, detalhes, codigo = verify(parse_config(NAO_MONOTONA))
    assert codigo == 2
    assert checagens["siegmund_feasible"] is False
    assert all(v is None for chave, v in checagens.items() if chave != "siegmund_feasible")
    assert "dual" in detalhes


def test_ssd_cadeia_a(escrever, saida):
    resultado = run("ssd", escrever(CADEIA_A), saida=saida, n_max=30)
    assert resultado.codigo == 0
    assert resultado.resumo["sharpness"]["witness"]["d"] == 1
    assert os.path.join(saida, "ssd_sharpness.csv") in resultado.arquivos


def test_plotdata_phi_profile(escrever, saida):
    resultado = run("plotdata", escrever(CADEIA_A), saida=saida, series="phi_profile")
    assert resultado.codigo == 0
    with open(os.path.join(saida, "plotdata_phi_profile.csv"), encoding="utf-8") as f:
        linhas = f.read().splitlines()
    assert linhas[0] == "n,series,value"
    valores = [float(linha.split(",")[2]) for linha in linhas[1:]]
    assert valores == pytest.approx([0.4, 1.0], abs=1e-15)


def test_plotdata_serie_desconhecida(escrever, saida):
    resultado = run("plotdata", escrever(CADEIA_A), saida=saida, series="histograma")
    assert resultado.codigo == 1
    assert resultado.erro.startswith("UnknownSeries")


def test_comando_desconhecido(escrever, saida):
    resultado = run("invert", escrever(CADEIA_A), saida=saida)
    assert resultado.codigo == 1
    assert resultado.erro.startswith("UnknownCommand")
    assert not os.path.exists(os.path.join(saida, "invert.json"))


@pytest.mark.parametrize("conteudo", [
    {"kind": "triangular", "N": 3},
    {"kind": "dense", "matrix": [[0.5, 0.6], [0.2, 0.8]]},
    {"kind": "moran_mutation", "N": 4, "a1": "0.3", "a2": 0.2},
    "{\"kind\": \"dense\", ",
])
def test_configuracao_invalida(escrever, saida, conteudo):
    resultado = run("build", escrever(conteudo), saida=saida)
    assert resultado.codigo == 1
    assert resultado.erro.startswith("ConfigParse")


def test_parse_config_aponta_a_chave():
    with pytest.raises(ConfigParse, match="config.dual.family"):
        parse_config(dict(CADEIA_A, dual={"family": "fourier"}))
    with pytest.raises(ConfigParse, match="config.options.n_max"):
        parse_config(dict(CADEIA_A, options={"n_max": -3}))


def test_semente_fora_de_u64(escrever, saida):
    resultado = run("simulate", escrever(CADEIA_A), saida=saida, seed=2 ** 64, trials=10)
    assert resultado.codigo == 1
    assert "seed" in resultado.erro


def test_cutoff_moran(escrever, saida):
    config = {"kind": "moran_mutation", "N": 10, "a1": 0.5, "a2": 0.5, "options": {"N_list": [10, 100]}}
    resultado = run("cutoff", escrever(config), saida=saida)
    assert resultado.codigo == 0
    with open(os.path.join(saida, "cutoff_table.csv"), encoding="utf-8") as f:
        cabecalho = f.readline().strip().split(",")
    assert cabecalho[-1] == "N_H_N"


def test_cutoff_exige_mutacao(escrever, saida):
    resultado = run("cutoff", escrever(CADEIA_A), saida=saida)
    assert resultado.codigo == 1


def test_main_devolve_codigo(escrever, saida):
    assert main(["dual", "--config", escrever(CADEIA_A), "--out", saida]) == 0
    assert main(["verify", "--config", escrever(NAO_MONOTONA), "--out", saida]) == 2
