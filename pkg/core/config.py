"""
Configurações para o dualchain.

Este módulo contém as configurações globais do sistema: tolerâncias numéricas,
parâmetros de absorção e simulação, opções da linha de comando e de log.
Variáveis de ambiente (ou um arquivo .env) podem sobrescrever o número de
trabalhadores e o nível de log.
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Tolerâncias numéricas usadas por todos os módulos
TOLERANCIAS = {
    # Entradas em [-negativo, 0) são consideradas ruído e zeradas
    "negativo": 1e-12,

    # Distância máxima de uma soma de linha até 1 para ser considerada estocástica
    "estocastico": 1e-9,

    # Resíduo máximo de sistemas lineares e identidades matriciais
    "residuo": 1e-10,

    # Resíduo máximo da dualidade dinâmica (potências de P)
    "dinamico": 1e-9,

    # Número de condição acima do qual H é recusada
    "condicao_maxima": 1e12,

    # Distância mínima entre autovalores para usar a fórmula de frações parciais
    "lacuna_autovalores": 1e-8,

    # Precisão exigida dos espectros de nascimento e morte
    "espectro": 1e-10,
}

# Configurações dos tempos de absorção
ABSORCAO_CONFIG = {
    # Massa de cauda abaixo da qual a distribuição é considerada completa
    "cauda_alvo": 1e-12,

    # Limite superior para o horizonte n_max
    "n_max_limite": 10**6,

    # Massa de cauda tolerada quando o horizonte é imposto pelo usuário
    "cauda_tolerada": 1e-9,

    # Número de passos da verificação dinâmica da dualidade
    "passos_dinamicos": 20,

    # Iterações e tolerância da média de Cesàro
    "iteracoes_cesaro": 10**4,
    "tolerancia_cesaro": 1e-3,
}

# Configurações da simulação de Monte Carlo
SIMULACAO_CONFIG = {
    # Número padrão de trajetórias
    "trials": 100_000,

    # Semente mestre padrão
    "seed": 20240601,

    # Número máximo de trabalhadores (DUALCHAIN_THREADS)
    "trabalhadores": max(1, int(os.getenv("DUALCHAIN_THREADS", os.cpu_count() or 1))),

    # Trajetórias por bloco de trabalho
    "tamanho_bloco": 8192,

    # Mínimo de ocorrências para testar uma célula condicional
    "min_ocorrencias": 100,

    # Número de erros padrão aceitos nas comparações estatísticas
    "erros_padrao": 3.0,

    # Se deve mostrar barra de progresso
    "barra_progresso": True,
}

# Configurações da linha de comando
CLI_CONFIG = {
    # Diretório padrão de saída
    "saida": "resultados",

    # Dígitos significativos nos arquivos CSV
    "digitos": 17,

    # Comandos reconhecidos
    "comandos": ("build", "dual", "intertwine", "spectrum", "ssd",
                 "simulate", "cutoff", "verify", "plotdata"),

    # Séries aceitas pelo plotdata
    "series": ("sep_vs_survival", "absorption_pmf", "spectrum", "phi_profile"),

    # Horizonte padrão das tabelas de separação
    "n_max_padrao": 50,
}

# Configurações de log
LOG_CONFIG = {
    # Nível de log
    "nivel": os.getenv("DUALCHAIN_LOG_LEVEL", "INFO"),

    # Formato do log
    "formato": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",

    # Caminho para o arquivo de log (None desativa)
    "arquivo": os.getenv("DUALCHAIN_LOG_FILE"),

    # Se deve mostrar logs no console
    "console": True,
}
