"""
Utilitários para o dualchain.

Este módulo contém funções auxiliares usadas pelos módulos numéricos e pela
linha de comando: configuração de logging, normas, formatação de números e
escrita atômica de arquivos JSON e CSV.
"""

import csv
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
from datetime import datetime

import colorlog
import numpy as np

from core.config import CLI_CONFIG, LOG_CONFIG

logger = logging.getLogger(__name__)


def configurar_logging(nivel=None, arquivo=None):
    """Configura o logging do sistema com saída colorida no console.

    Args:
        nivel (str): Nível de log (padrão: LOG_CONFIG["nivel"])
        arquivo (str): Arquivo de log opcional (padrão: LOG_CONFIG["arquivo"])

    Returns:
        logging.Logger: O logger raiz configurado
    """
    nivel = (nivel or LOG_CONFIG["nivel"]).upper()
    arquivo = arquivo or LOG_CONFIG["arquivo"]

    raiz = logging.getLogger()
    raiz.setLevel(nivel)
    for handler in list(raiz.handlers):
        raiz.removeHandler(handler)

    if LOG_CONFIG["console"]:
        console = colorlog.StreamHandler(sys.stdout)
        console.setFormatter(colorlog.ColoredFormatter(
            "%(log_color)s" + LOG_CONFIG["formato"],
            log_colors={
                "DEBUG": "cyan",
                "INFO": "green",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "red,bg_white",
            },
        ))
        raiz.addHandler(console)

    if arquivo:
        os.makedirs(os.path.dirname(os.path.abspath(arquivo)), exist_ok=True)
        handler_arquivo = logging.FileHandler(arquivo, encoding="utf-8")
        handler_arquivo.setFormatter(logging.Formatter(LOG_CONFIG["formato"]))
        raiz.addHandler(handler_arquivo)

    return raiz


def gerar_timestamp():
    """Gera um timestamp formatado.

    Returns:
        str: Timestamp no formato ISO
    """
    return datetime.now().isoformat()


def norma_max(matriz):
    """Maior valor absoluto das entradas (0.0 para arrays vazios)."""
    matriz = np.asarray(matriz, dtype=float)
    if matriz.size == 0:
        return 0.0
    return float(np.max(np.abs(matriz)))


def hash_matriz(matriz):
    """Resumo SHA-256 dos bytes de uma matriz float64."""
    dados = np.ascontiguousarray(np.asarray(matriz, dtype=np.float64))
    resumo = hashlib.sha256()
    resumo.update(str(dados.shape).encode())
    resumo.update(dados.tobytes())
    return resumo.hexdigest()


def formatar_numero(valor, digitos=None):
    """Formata um número com dígitos significativos suficientes para ida e volta.

    Args:
        valor: Número a formatar
        digitos (int): Dígitos significativos (padrão: CLI_CONFIG["digitos"])

    Returns:
        str: Representação decimal
    """
    digitos = digitos or CLI_CONFIG["digitos"]
    if isinstance(valor, (bool, np.bool_)):
        return str(int(valor))
    if isinstance(valor, (int, np.integer)):
        return str(int(valor))
    if isinstance(valor, str):
        return valor
    return format(float(valor), f".{digitos}g")


def _escrever_atomico(caminho, conteudo):
    """Escreve texto em um arquivo temporário e renomeia sobre o destino."""
    diretorio = os.path.dirname(os.path.abspath(caminho))
    os.makedirs(diretorio, exist_ok=True)
    descritor, temporario = tempfile.mkstemp(dir=diretorio, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(descritor, "w", encoding="utf-8", newline="") as f:
            f.write(conteudo)
        os.replace(temporario, caminho)
    except Exception:
        if os.path.exists(temporario):
            os.remove(temporario)
        raise
    logger.debug(f"Arquivo gravado: {caminho}")
    return caminho


def _para_json(obj):
    """Converte tipos numpy em tipos nativos para serialização."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"Objeto não serializável: {type(obj).__name__}")


def escrever_json(caminho, dados):
    """Grava um dicionário em JSON de forma atômica.

    Args:
        caminho (str): Arquivo de destino
        dados (dict): Conteúdo

    Returns:
        str: O caminho gravado
    """
    conteudo = json.dumps(dados, ensure_ascii=False, indent=2, default=_para_json)
    return _escrever_atomico(caminho, conteudo + "\n")


def escrever_csv(caminho, cabecalho, linhas):
    """Grava uma tabela CSV (uma linha de cabeçalho) de forma atômica.

    Args:
        caminho (str): Arquivo de destino
        cabecalho (list): Nomes das colunas
        linhas (iterable): Linhas da tabela

    Returns:
        str: O caminho gravado
    """
    buffer = io.StringIO()
    escritor = csv.writer(buffer, lineterminator="\n")
    escritor.writerow(cabecalho)
    for linha in linhas:
        escritor.writerow([formatar_numero(v) for v in linha])
    return _escrever_atomico(caminho, buffer.getvalue())


def escrever_matriz_csv(caminho, matriz, prefixo="y"):
    """Grava uma matriz densa como CSV com colunas y0..yN."""
    matriz = np.asarray(matriz, dtype=float)
    cabecalho = [f"{prefixo}{j}" for j in range(matriz.shape[1])]
    return escrever_csv(caminho, cabecalho, matriz.tolist())


def ler_matriz_csv(caminho):
    """Lê de volta uma matriz gravada por escrever_matriz_csv.

    Returns:
        np.ndarray: Matriz float64
    """
    with open(caminho, encoding="utf-8", newline="") as f:
        leitor = csv.reader(f)
        next(leitor)
        linhas = [[float(v) for v in linha] for linha in leitor if linha]
    return np.array(linhas, dtype=np.float64)
