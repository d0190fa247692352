"""
Módulo de Linha de Comando - Configurações de cadeias, comandos e relatórios.

Lê uma configuração JSON de cadeia, executa o pipeline pedido e grava as
tabelas numéricas em CSV (17 dígitos significativos) e um resumo em JSON.
Os códigos de saída seguem o contrato: 0 em sucesso, 2 em inviabilidade e 1
em erro ou verificação reprovada.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from typing_extensions import Literal

from core.config import ABSORCAO_CONFIG, CLI_CONFIG, SIMULACAO_CONFIG, TOLERANCIAS
from core.erros import (
    ConfigParse,
    ErroDualidade,
    ErroInviabilidade,
    ErroValidacao,
    ErroVerificacao,
    LinkNotStochastic,
    NotIrreducible,
    PhiNotPositive,
    UnknownCommand,
    UnknownSeries,
)
from core.kernel import Kernel, classify, stationary, validate_kernel
from core.utils import escrever_csv, escrever_json, escrever_matriz_csv, gerar_timestamp, ler_matriz_csv, norma_max
from dualidade.chains import (
    BDParams,
    BiasFunction,
    bd_kernel,
    bd_params_from_kernel,
    bernoulli_laplace_bias,
    moran_kernel,
    mutation_bias,
    reflected_walk,
    wright_fisher_kernel,
)
from dualidade.coupling import coupling_from_pipeline, empirical_report, exact_joint, simulate
from dualidade.duals import (
    DualFamily,
    DualReport,
    dual_function,
    dual_via_solve,
    hypergeometric_moran_dual,
    is_monotone,
    siegmund_dual,
    ultrametric_dual,
    ultrametric_rigidity_check,
    verify_duality,
)
from dualidade.intertwine import IntertwiningResult, constant_column_check, intertwining_pipeline
from dualidade.spectral import (
    Spectrum,
    bd_spectrum,
    bernoulli_laplace_weights,
    isolate_roots,
    monotonicity_spectrum_checks,
    moran_mutation_spectrum,
    orthopoly_oracle,
    reflected_walk_spectrum,
    spectral_weights,
)
from dualidade.ssd import (
    absorption_exact,
    absorption_recurrence,
    absorption_spectral,
    admissible_initials,
    cutoff_report,
    moran_mutation_family,
    verify_sharpness,
)

logger = logging.getLogger(__name__)

ChainKind = Literal["dense", "bd", "moran", "moran_mutation", "bernoulli_laplace",
                    "wright_fisher", "reflected_walk"]
TIPOS = ("dense", "bd", "moran", "moran_mutation", "bernoulli_laplace", "wright_fisher", "reflected_walk")
FAMILIAS = tuple(f.value for f in DualFamily if f != DualFamily.CUSTOM)


@dataclass
class ChainConfig:
    """Configuração validada de uma cadeia, do dual e das opções de comando."""

    kind: ChainKind
    N: int
    kernel: Kernel
    params: Optional[BDParams] = None
    bias: Optional[BiasFunction] = None
    a1: Optional[float] = None
    a2: Optional[float] = None
    dual: Dict[str, Any] = field(default_factory=lambda: {"family": "siegmund"})
    options: Dict[str, Any] = field(default_factory=dict)
    origem: Optional[str] = None

    @property
    def family(self) -> str:
        return self.dual["family"]

    def to_dict(self) -> Dict[str, Any]:
        dual = {k: (np.asarray(v).tolist() if k == "R" else v) for k, v in self.dual.items()}
        return {
            "kind": self.kind,
            "N": self.N,
            "a1": self.a1,
            "a2": self.a2,
            "dual": dual,
            "options": self.options,
            "origem": self.origem,
        }


@dataclass
class ResultadoComando:
    """Resultado de um comando: código de saída, resumo e arquivos gravados."""

    comando: str
    codigo: int
    resumo: Dict[str, Any] = field(default_factory=dict)
    arquivos: List[str] = field(default_factory=list)
    erro: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "comando": self.comando,
            "codigo": self.codigo,
            "erro": self.erro,
            "arquivos": self.arquivos,
            "resumo": self.resumo,
        }


def _numero(dados: Dict[str, Any], chave: str, caminho: str, padrao=None) -> float:
    valor = dados.get(chave, padrao)
    if valor is None:
        raise ConfigParse(f"{caminho}.{chave}: chave ausente")
    if isinstance(valor, bool) or not isinstance(valor, (int, float)):
        raise ConfigParse(f"{caminho}.{chave}: esperado número, recebido {valor!r}")
    return float(valor)


def _inteiro(dados: Dict[str, Any], chave: str, caminho: str, padrao=None) -> int:
    valor = _numero(dados, chave, caminho, padrao)
    if valor != int(valor):
        raise ConfigParse(f"{caminho}.{chave}: esperado inteiro, recebido {valor!r}")
    return int(valor)


def _lista(dados: Dict[str, Any], chave: str, caminho: str) -> np.ndarray:
    valor = dados.get(chave)
    if not isinstance(valor, list):
        raise ConfigParse(f"{caminho}.{chave}: esperada lista")
    try:
        return np.asarray(valor, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ConfigParse(f"{caminho}.{chave}: {e}")


def _vies(dados: Dict[str, Any], N: int) -> Tuple[BiasFunction, Optional[float], Optional[float]]:
    if "bias" in dados:
        valores = _lista(dados, "bias", "config")
        if valores.size != N + 1:
            raise ConfigParse(f"config.bias: esperados {N + 1} valores, recebidos {valores.size}")
        return BiasFunction(values=valores), None, None
    a1 = _numero(dados, "a1", "config")
    a2 = _numero(dados, "a2", "config")
    return mutation_bias(a1, a2, N), a1, a2


def _dual(dados: Dict[str, Any]) -> Dict[str, Any]:
    dual = dados.get("dual", {"family": "siegmund"})
    if not isinstance(dual, dict):
        raise ConfigParse("config.dual: esperado objeto")
    familia = dual.get("family", "siegmund")
    if familia not in FAMILIAS:
        raise ConfigParse(f"config.dual.family: {familia!r} não é uma de {FAMILIAS}")
    saida: Dict[str, Any] = {"family": familia}
    if familia == "ultrametric":
        saida["k"] = _inteiro(dual, "k", "config.dual")
        saida["alpha"] = _numero(dual, "alpha", "config.dual", 0.0)
        saida["beta"] = _numero(dual, "beta", "config.dual", 0.0)
    elif familia == "potential":
        saida["R"] = _lista(dual, "R", "config.dual")
    return saida


def _opcoes(dados: Dict[str, Any]) -> Dict[str, Any]:
    opcoes = dados.get("options", {})
    if not isinstance(opcoes, dict):
        raise ConfigParse("config.options: esperado objeto")
    saida: Dict[str, Any] = {}
    for chave in ("n_max", "trials", "seed", "n", "start"):
        if chave in opcoes:
            saida[chave] = _inteiro(opcoes, chave, "config.options")
            if saida[chave] < 0:
                raise ConfigParse(f"config.options.{chave}: valor negativo")
    if "N_list" in opcoes:
        valores = opcoes["N_list"]
        if not isinstance(valores, list) or not all(isinstance(v, int) and v >= 1 for v in valores):
            raise ConfigParse("config.options.N_list: esperada lista de inteiros positivos")
        saida["N_list"] = list(valores)
    if "series" in opcoes:
        saida["series"] = str(opcoes["series"])
    return saida


def parse_config(dados: Dict[str, Any], origem: Optional[str] = None) -> ChainConfig:
    """Valida um dicionário de configuração e constrói a cadeia.

    Args:
        dados: Conteúdo JSON já decodificado
        origem: Caminho do arquivo (para mensagens)

    Returns:
        ChainConfig: Configuração com o núcleo construído

    Raises:
        ConfigParse: com o caminho da chave problemática
    """
    if not isinstance(dados, dict):
        raise ConfigParse("config: esperado objeto JSON")
    tipo = dados.get("kind")
    if tipo not in TIPOS:
        raise ConfigParse(f"config.kind: {tipo!r} não é um de {TIPOS}")

    params = None
    vies = None
    a1 = a2 = None
    try:
        if tipo == "dense":
            matriz = dados.get("matrix")
            if not isinstance(matriz, list):
                raise ConfigParse("config.matrix: esperada lista de linhas")
            kernel = validate_kernel(np.asarray(matriz, dtype=np.float64), demand="stochastic")
            N = kernel.N
            try:
                params = bd_params_from_kernel(kernel)
            except ErroValidacao:
                params = None
        else:
            if tipo == "bd":
                p = _lista(dados, "p", "config")
                q = _lista(dados, "q", "config")
                r = _lista(dados, "r", "config") if "r" in dados else None
                params = BDParams.from_rates(p, q, r)
                N = params.N
            else:
                N = _inteiro(dados, "N", "config")
                if N < 1:
                    raise ConfigParse("config.N: precisa ser >= 1")
                if tipo == "moran":
                    vies, a1, a2 = _vies(dados, N)
                    params = moran_kernel(N, vies)
                elif tipo == "moran_mutation":
                    a1 = _numero(dados, "a1", "config")
                    a2 = _numero(dados, "a2", "config")
                    vies = mutation_bias(a1, a2, N)
                    params = moran_kernel(N, vies)
                elif tipo == "bernoulli_laplace":
                    a1 = a2 = 1.0
                    vies = bernoulli_laplace_bias(N)
                    params = moran_kernel(N, vies)
                elif tipo == "reflected_walk":
                    params = reflected_walk(N, _numero(dados, "p", "config"))
                else:
                    vies, a1, a2 = _vies(dados, N)
            kernel = wright_fisher_kernel(N, vies) if tipo == "wright_fisher" else bd_kernel(params)
    except ConfigParse:
        raise
    except ErroValidacao as e:
        raise ConfigParse(f"config ({tipo}): {type(e).__name__}: {e}")

    config = ChainConfig(kind=tipo, N=N, kernel=kernel, params=params, bias=vies, a1=a1, a2=a2,
                         dual=_dual(dados), options=_opcoes(dados), origem=origem)
    logger.info(f"Configuração carregada: {tipo}, N={N}, dual {config.family}")
    return config


def load_config(caminho: str) -> ChainConfig:
    """Lê e valida um arquivo de configuração JSON."""
    try:
        with open(caminho, encoding="utf-8") as f:
            dados = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigParse(f"{caminho}: linha {e.lineno}, coluna {e.colno}: {e.msg}")
    except OSError as e:
        raise ConfigParse(f"{caminho}: {e}")
    return parse_config(dados, origem=caminho)


def build_dual(config: ChainConfig) -> DualReport:
    """Constrói o dual pedido pela configuração."""
    familia = config.family
    P = config.kernel
    if familia == "siegmund":
        return siegmund_dual(P)
    if familia == "ultrametric":
        return ultrametric_dual(P, config.dual["k"], config.dual["alpha"], config.dual["beta"])
    if familia == "hypergeometric" and config.kind in ("moran_mutation", "bernoulli_laplace"):
        return hypergeometric_moran_dual(config.N, config.a1, config.a2)
    if familia == "potential":
        return dual_via_solve(P, dual_function(DualFamily.POTENTIAL, R=config.dual["R"]))
    return dual_via_solve(P, dual_function(familia, config.N))


def _pipeline(config: ChainConfig) -> Tuple[DualReport, IntertwiningResult]:
    relatorio = build_dual(config).exigir_viavel()
    resultado = intertwining_pipeline(config.kernel, relatorio.H, relatorio.P_hat)
    return relatorio, resultado


def _inicial(config: ChainConfig, opcoes: Dict[str, Any]) -> np.ndarray:
    inicio = opcoes.get("start", 0)
    if inicio > config.N:
        raise ConfigParse(f"config.options.start: {inicio} > N = {config.N}")
    pi0 = np.zeros(config.N + 1)
    pi0[inicio] = 1.0
    return pi0


def _espectro(config: ChainConfig) -> Optional[Spectrum]:
    if config.params is None or not config.params.irreducible:
        return None
    if config.kind in ("moran_mutation", "bernoulli_laplace"):
        return moran_mutation_spectrum(config.N, config.a1, config.a2)
    return bd_spectrum(config.params)


def _relativo(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def absorption_agreement(config: ChainConfig, resultado: IntertwiningResult,
                         pi_tilde0: np.ndarray, partial: int, exata) -> Optional[Dict[str, Any]]:
    """Concordância das rotas exata, espectral e de recorrência para T̃.

    Só se aplica quando P̃ é de nascimento e morte, π̃_0 é um ponto na
    extremidade oposta a ∂̃ e o espectro de P é conhecido.
    """
    try:
        params_til = bd_params_from_kernel(resultado.P_tilde)
    except ErroValidacao:
        return None
    inicio = int(np.argmax(pi_tilde0))
    if pi_tilde0[inicio] < 1.0 - TOLERANCIAS["negativo"] or {inicio, partial} != {0, config.N}:
        return None
    espectro = _espectro(config)
    if espectro is None:
        return None

    espectral = absorption_spectral(espectro)
    recorrencia = absorption_recurrence(params_til, target=partial, start=inicio)
    rotas = {"matrix-power": exata, "spectral": espectral, "recurrence": recorrencia}
    tamanho = min(r.pmf.size for r in rotas.values())
    desvio_pmf = max(norma_max(a.pmf[:tamanho] - b.pmf[:tamanho])
                     for a in rotas.values() for b in rotas.values())
    desvio_media = max(_relativo(r.mean, espectral.mean) for r in rotas.values())
    desvio_variancia = max(_relativo(r.variance, espectral.variance) for r in rotas.values())
    relatorio = {
        "rotas": {nome: r.to_dict() for nome, r in rotas.items()},
        "desvio_pmf": desvio_pmf,
        "desvio_relativo_media": desvio_media,
        "desvio_relativo_variancia": desvio_variancia,
        "concorda": desvio_pmf <= TOLERANCIAS["dinamico"] and desvio_media <= 1e-8
        and desvio_variancia <= 1e-8,
        "variancia_dentro_do_limite": bool(espectral.extras.get("variancia_dentro_do_limite", True)),
    }
    if not relatorio["concorda"]:
        logger.error(f"Rotas de absorção discordam: pmf {desvio_pmf:.3e}, média {desvio_media:.3e}")
    return relatorio


class _Saida:
    """Diretório de saída com registro dos arquivos gravados."""

    def __init__(self, diretorio: str, comando: str):
        self.diretorio = diretorio
        self.comando = comando
        self.arquivos: List[str] = []

    def caminho(self, nome: str, extensao: str) -> str:
        return os.path.join(self.diretorio, f"{self.comando}_{nome}.{extensao}")

    def matriz(self, nome: str, matriz) -> str:
        caminho = escrever_matriz_csv(self.caminho(nome, "csv"), matriz)
        self.arquivos.append(caminho)
        return caminho

    def tabela(self, nome: str, cabecalho: List[str], linhas) -> str:
        caminho = escrever_csv(self.caminho(nome, "csv"), cabecalho, linhas)
        self.arquivos.append(caminho)
        return caminho

    def resumo(self, dados: Dict[str, Any]) -> str:
        caminho = escrever_json(os.path.join(self.diretorio, f"{self.comando}.json"), dados)
        self.arquivos.append(caminho)
        return caminho


def comando_build(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    caminho = saida.matriz("P", config.kernel.entries)
    ida_e_volta = bool(np.array_equal(ler_matriz_csv(caminho), config.kernel.entries))
    decomposicao = classify(config.kernel)
    resumo: Dict[str, Any] = {
        "config": config.to_dict(),
        "kind_kernel": config.kernel.kind.value,
        "classes": decomposicao.to_dict(),
        "monotone": is_monotone(config.kernel),
        "ida_e_volta": ida_e_volta,
    }
    if decomposicao.irreducible:
        resumo["pi"] = stationary(config.kernel)
    if config.params is not None:
        resumo["params"] = config.params.to_dict()
    if config.bias is not None:
        resumo["bias"] = config.bias.to_dict()
    return resumo, 0 if ida_e_volta else 1


def comando_dual(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    relatorio = build_dual(config)
    saida.matriz("P_hat", relatorio.P_hat)
    resumo: Dict[str, Any] = {
        "config": config.to_dict(),
        "dual": relatorio.to_dict(),
        "feasible": relatorio.feasible,
        "leak0": float(relatorio.mass_leaks[0]),
    }
    if relatorio.feasible:
        resumo["duality"] = verify_duality(config.kernel, relatorio.H.H, relatorio.P_hat,
                                           opcoes.get("n_max"))
    if config.family == "ultrametric" and config.params is not None:
        resumo["rigidez"] = ultrametric_rigidity_check(
            config.params, config.dual["k"], config.dual["alpha"], config.dual["beta"])
    if not relatorio.admissible:
        logger.warning(f"Dual {config.family} inviável: {list(relatorio.violated_conditions)}")
        return resumo, 2
    return resumo, 0


def comando_intertwine(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    _, resultado = _pipeline(config)
    saida.matriz("Lambda", resultado.Lambda)
    saida.matriz("P_tilde", resultado.P_tilde)
    saida.matriz("K", resultado.K)
    resumo = {"config": config.to_dict(), "intertwining": resultado.to_dict(), "ok": resultado.ok}
    return resumo, 0 if resultado.ok else 1


def comando_spectrum(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    if config.params is None or not config.params.irreducible:
        raise NotIrreducible("O comando spectrum exige uma cadeia de nascimento e morte irredutível")
    params = config.params
    espectro = spectral_weights(params)
    raizes = isolate_roots(params)

    malha = np.linspace(-1.0, 1.0, 4 * (config.N + 1) + 1)
    escala = max(norma_max(orthopoly_oracle(params, malha)[1]), 1.0)
    residuo_raizes = norma_max(orthopoly_oracle(params, espectro.eigenvalues)[1]) / escala
    desvio_oraculo = norma_max(raizes - espectro.eigenvalues) if raizes.size == espectro.eigenvalues.size else np.inf

    verificacoes: Dict[str, bool] = {
        "raizes_do_resto": residuo_raizes <= 1e-8,
        "oraculo_isolamento": desvio_oraculo <= 1e-8,
    }
    fechado: Optional[Spectrum] = None
    if config.kind in ("moran_mutation", "bernoulli_laplace"):
        fechado = moran_mutation_spectrum(config.N, config.a1, config.a2)
        verificacoes["lacuna"] = abs(espectro.gap - (config.a1 + config.a2) / config.N) <= 1e-12
    if config.kind == "bernoulli_laplace":
        fechado = bernoulli_laplace_weights(config.N)
        verificacoes["pesos_fechados"] = norma_max(fechado.weights - espectro.weights) <= 1e-10
    if config.kind == "reflected_walk":
        fechado = reflected_walk_spectrum(config.N, float(params.p[0]))
    if fechado is not None:
        verificacoes["forma_fechada"] = norma_max(fechado.eigenvalues - espectro.eigenvalues) <= 1e-10

    monotonia = monotonicity_spectrum_checks(params)
    verificacoes["implicacoes_monotonia"] = monotonia["ok"]

    saida.tabela("spectrum", ["k", "eigenvalue", "weight"],
                 [[k, t, w] for k, (t, w) in enumerate(zip(espectro.eigenvalues, espectro.weights))])
    resumo = {
        "config": config.to_dict(),
        "spectrum": espectro.to_dict(),
        "residuo_raizes": residuo_raizes,
        "desvio_oraculo": desvio_oraculo,
        "monotonia": monotonia,
        "checks": verificacoes,
    }
    return resumo, 0 if all(verificacoes.values()) else 1


def _ssd(config: ChainConfig, opcoes: Dict[str, Any]):
    relatorio, resultado = _pipeline(config)
    pi0 = _inicial(config, opcoes)
    inicio = admissible_initials(resultado.Lambda, pi0, resultado.pi, siegmund=config.family == "siegmund")
    n_max = opcoes.get("n_max", CLI_CONFIG["n_max_padrao"])
    nitidez = verify_sharpness(resultado.P_rev, resultado.P_tilde, resultado.Lambda, pi0,
                               inicio.pi_tilde_0, n_max, pi=resultado.pi, H=resultado.H)
    exata = absorption_exact(resultado.P_tilde, inicio.pi_tilde_0, nitidez.partial)
    return relatorio, resultado, inicio, nitidez, exata


def comando_ssd(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    _, resultado, inicio, nitidez, exata = _ssd(config, opcoes)
    concordancia = absorption_agreement(config, resultado, inicio.pi_tilde_0, nitidez.partial, exata)

    saida.tabela("sharpness", ["n", "separation", "survival", "total_variation"],
                 [[n, s, v, t] for n, (s, v, t) in enumerate(
                     zip(nitidez.separation, nitidez.survival, nitidez.total_variation))])
    saida.tabela("absorption_pmf", ["n", "pmf", "survival"],
                 [[n, p, s] for n, (p, s) in enumerate(zip(exata.pmf, exata.survival))])
    resumo = {
        "config": config.to_dict(),
        "admissible_start": inicio.to_dict(),
        "sharpness": nitidez.to_dict(),
        "absorption": exata.to_dict(),
        "agreement": concordancia,
    }
    ok = nitidez.bound_holds and (nitidez.witness is None or nitidez.sharp)
    if concordancia is not None:
        ok = ok and concordancia["concorda"] and concordancia["variancia_dentro_do_limite"]
    return resumo, 0 if ok else 1


def comando_simulate(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    _, resultado = _pipeline(config)
    pi0 = _inicial(config, opcoes)
    inicio = admissible_initials(resultado.Lambda, pi0, resultado.pi)
    n = opcoes.get("n", opcoes.get("n_max", ABSORCAO_CONFIG["passos_dinamicos"]))
    produto = coupling_from_pipeline(resultado)

    conjunta = exact_joint(produto, inicio.pi_tilde_0, n, pi=resultado.pi)
    lote = simulate(produto, inicio.pi_tilde_0, n, trials=opcoes.get("trials"), seed=opcoes.get("seed"))
    sobrevivencia = media = variancia = None
    if lote.partial is not None:
        sobrevivencia = absorption_exact(resultado.P_tilde, inicio.pi_tilde_0, lote.partial, n_max=n).survival
        completa = absorption_exact(resultado.P_tilde, inicio.pi_tilde_0, lote.partial)
        media, variancia = completa.mean, completa.variance
    empirico = empirical_report(lote, produto, inicio.pi_tilde_0, sobrevivencia, media, variancia)

    saida.tabela("cells", ["x_tilde", "x", "hits", "frequency", "expected"],
                 [[c["x_tilde"], c["x"], c["ocorrencias"], c["frequencia"], c["esperado"]]
                  for c in empirico["celulas"]])
    resumo = {
        "config": config.to_dict(),
        "coupling": produto.to_dict(),
        "exact_joint": conjunta.to_dict(),
        "batch": lote.to_dict(),
        "empirical": empirico,
    }
    return resumo, 0 if conjunta.ok and empirico["ok"] else 1


def _numero_harmonico(N: int) -> float:
    return float(np.sum(1.0 / np.arange(1, N + 1)))


def comando_cutoff(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    if config.a1 is None or config.a2 is None:
        raise ErroValidacao("O comando cutoff exige uma família de Moran com mutação (a1, a2)")
    a = config.a1 + config.a2
    tamanhos = opcoes.get("N_list", [config.N])
    relatorio = cutoff_report(moran_mutation_family(config.a1, config.a2), tamanhos, a=a)

    cabecalho = ["N", "mean", "variance", "var_over_mean2", "gap_times_mean", "assintota", "razao_assintota"]
    unitario = abs(a - 1.0) <= 1e-12
    if unitario:
        cabecalho.append("N_H_N")
    linhas = []
    for linha in relatorio["linhas"]:
        valores = [linha.get(chave) for chave in cabecalho[:7]]
        if unitario:
            linha["N_H_N"] = linha["N"] * _numero_harmonico(linha["N"])
            valores.append(linha["N_H_N"])
        linhas.append(["" if v is None else v for v in valores])
    saida.tabela("table", cabecalho, linhas)
    return {"config": config.to_dict(), "cutoff": relatorio}, 0


def _series(config: ChainConfig, opcoes: Dict[str, Any], serie: str) -> List[List[Any]]:
    if serie == "spectrum":
        if config.params is None or not config.params.irreducible:
            raise NotIrreducible("A série spectrum exige uma cadeia de nascimento e morte irredutível")
        espectro = spectral_weights(config.params)
        return ([[k, "eigenvalue", t] for k, t in enumerate(espectro.eigenvalues)]
                + [[k, "weight", w] for k, w in enumerate(espectro.weights)])
    if serie == "phi_profile":
        _, resultado = _pipeline(config)
        return [[x, "phi", v] for x, v in enumerate(resultado.phi)]
    if serie == "sep_vs_survival":
        _, _, _, nitidez, _ = _ssd(config, opcoes)
        linhas = []
        for n, (s, v, t) in enumerate(zip(nitidez.separation, nitidez.survival, nitidez.total_variation)):
            linhas += [[n, "separation", s], [n, "survival", v], [n, "total_variation", t]]
        return linhas
    _, _, _, _, exata = _ssd(config, opcoes)
    return [[n, "pmf", p] for n, p in enumerate(exata.pmf)]


def comando_plotdata(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    serie = opcoes.get("series")
    if serie not in CLI_CONFIG["series"]:
        raise UnknownSeries(f"Série {serie!r} não é uma de {CLI_CONFIG['series']}")
    linhas = _series(config, opcoes, serie)
    saida.tabela(serie, ["n", "series", "value"], linhas)
    return {"config": config.to_dict(), "series": serie, "linhas": len(linhas)}, 0


def verify(config: ChainConfig, opcoes: Optional[Dict[str, Any]] = None) -> Tuple[Dict[str, Optional[bool]], Dict[str, Any], int]:
    """Executa a cadeia de verificações dualidade -> entrelaçamento -> nitidez -> absorção.

    Cada etapa só roda se a anterior foi bem-sucedida; chaves não executadas
    ficam com None. Nenhuma chave é aprovada quando uma asserção falhou.

    Returns:
        tuple: (checagens, detalhes, código de saída)
    """
    opcoes = opcoes or {}
    chave_dual = "siegmund_feasible" if config.family == "siegmund" else "dual_feasible"
    checagens: Dict[str, Optional[bool]] = {chave: None for chave in (
        chave_dual, "duality_static", "duality_dynamic", "constant_column_absorbing",
        "phi_positive", "phi_harmonic", "link_stochastic", "intertwining_relation", "k_duality",
        "link_row_stationary", "class_constants", "spectrum_equivalence", "admissible_start",
        "separation_bound", "sharp_separation", "witness_state", "absorption_agreement",
        "variance_bound",
    )}
    detalhes: Dict[str, Any] = {}

    def concluir(codigo: int):
        falhou = any(v is False for v in checagens.values())
        if codigo == 0 and falhou:
            codigo = 1
        return checagens, detalhes, codigo

    relatorio = build_dual(config)
    detalhes["dual"] = relatorio.to_dict()
    checagens[chave_dual] = relatorio.admissible
    if not relatorio.admissible:
        logger.warning(f"Dual {config.family} inviável: verificações seguintes ignoradas")
        return concluir(2)

    dualidade = verify_duality(config.kernel, relatorio.H.H, relatorio.P_hat, opcoes.get("n_max"))
    detalhes["duality"] = dualidade
    checagens["duality_static"] = dualidade["static"] <= TOLERANCIAS["residuo"]
    checagens["duality_dynamic"] = dualidade["dynamic"] <= TOLERANCIAS["dinamico"]
    try:
        detalhes["constant_columns"] = constant_column_check(relatorio.H.H, relatorio.P_hat)
        checagens["constant_column_absorbing"] = True
    except ErroVerificacao:
        checagens["constant_column_absorbing"] = False

    try:
        resultado = intertwining_pipeline(config.kernel, relatorio.H, relatorio.P_hat)
    except PhiNotPositive:
        checagens["phi_positive"] = False
        return concluir(1)
    except LinkNotStochastic:
        checagens["phi_positive"] = True
        checagens["link_stochastic"] = False
        return concluir(1)
    detalhes["intertwining"] = resultado.to_dict()
    checks = resultado.checks
    checagens["phi_positive"] = True
    checagens["link_stochastic"] = True
    checagens["phi_harmonic"] = checks["phi_harmonico"] and checks["relacao_ponderada"]
    checagens["intertwining_relation"] = checks["entrelacamento"]
    checagens["k_duality"] = checks["k_dualidade"]
    checagens["link_row_stationary"] = checks["linha_elo_estacionaria"] and checks["absorventes_coincidem"]
    checagens["class_constants"] = all(checks.get(chave, True) for chave in (
        "constantes_classe", "decomposicao_phi", "doob", "phi_constante",
        "substocastico_redutivel", "classe_estocastica"))
    checagens["spectrum_equivalence"] = checks["espectro"]

    try:
        _, _, inicio, nitidez, exata = _ssd(config, opcoes)
    except ErroInviabilidade as e:
        detalhes["admissible_start"] = str(e)
        checagens["admissible_start"] = False
        return concluir(2)
    checagens["admissible_start"] = True
    detalhes["sharpness"] = nitidez.to_dict()
    checagens["separation_bound"] = nitidez.bound_holds
    if nitidez.witness is not None:
        checagens["sharp_separation"] = nitidez.sharp
        checagens["witness_state"] = nitidez.witness.condicao_par is not False \
            and nitidez.witness.condicao_H is not False

    concordancia = absorption_agreement(config, resultado, inicio.pi_tilde_0, nitidez.partial, exata)
    detalhes["absorption"] = exata.to_dict()
    if concordancia is not None:
        detalhes["agreement"] = concordancia
        checagens["absorption_agreement"] = concordancia["concorda"]
        checagens["variance_bound"] = concordancia["variancia_dentro_do_limite"]
    return concluir(0)


def comando_verify(config: ChainConfig, opcoes: Dict[str, Any], saida: _Saida) -> Tuple[Dict[str, Any], int]:
    checagens, detalhes, codigo = verify(config, opcoes)
    resumo = {"config": config.to_dict(), "checks": checagens, "detalhes": detalhes}
    saida.tabela("checks", ["check", "status"],
                 [[chave, "skipped" if v is None else ("pass" if v else "fail")]
                  for chave, v in checagens.items()])
    return resumo, codigo


COMANDOS: Dict[str, Callable[[ChainConfig, Dict[str, Any], _Saida], Tuple[Dict[str, Any], int]]] = {
    "build": comando_build,
    "dual": comando_dual,
    "intertwine": comando_intertwine,
    "spectrum": comando_spectrum,
    "ssd": comando_ssd,
    "simulate": comando_simulate,
    "cutoff": comando_cutoff,
    "verify": comando_verify,
    "plotdata": comando_plotdata,
}


def run(comando: str, config_path: str, saida: Optional[str] = None, seed: Optional[int] = None,
        n_max: Optional[int] = None, trials: Optional[int] = None,
        series: Optional[str] = None) -> ResultadoComando:
    """Executa um comando sobre um arquivo de configuração.

    Args:
        comando: Um de CLI_CONFIG["comandos"]
        config_path: Caminho da configuração JSON
        saida: Diretório de saída (padrão: CLI_CONFIG["saida"])
        seed, n_max, trials, series: Sobrescrevem as opções da configuração

    Returns:
        ResultadoComando: Código de saída (0, 1 ou 2), resumo e arquivos
    """
    diretorio = saida or CLI_CONFIG["saida"]
    registro = _Saida(diretorio, comando)
    resultado = ResultadoComando(comando=comando, codigo=1)
    try:
        if comando not in COMANDOS:
            raise UnknownCommand(f"Comando {comando!r} não é um de {CLI_CONFIG['comandos']}")
        config = load_config(config_path)
        opcoes = dict(config.options)
        for chave, valor in (("seed", seed), ("n_max", n_max), ("trials", trials), ("series", series)):
            if valor is not None:
                opcoes[chave] = valor
        if opcoes.get("seed", 0) < 0 or opcoes.get("seed", 0) >= 2 ** 64:
            raise ConfigParse(f"seed fora de [0, 2^64): {opcoes['seed']}")
        opcoes.setdefault("seed", SIMULACAO_CONFIG["seed"])

        resumo, codigo = COMANDOS[comando](config, opcoes, registro)
        resultado.resumo = resumo
        resultado.codigo = codigo
    except ErroInviabilidade as e:
        resultado.codigo = 2
        resultado.erro = f"{type(e).__name__}: {e}"
        logger.warning(f"Inviável: {resultado.erro}")
    except ErroDualidade as e:
        resultado.codigo = 1
        resultado.erro = f"{type(e).__name__}: {e}"
        logger.error(f"Erro em {comando}: {resultado.erro}")

    resultado.resumo = {"timestamp": gerar_timestamp(), "codigo": resultado.codigo,
                        "erro": resultado.erro, **resultado.resumo}
    if comando in COMANDOS:
        registro.resumo(resultado.resumo)
    resultado.arquivos = registro.arquivos
    return resultado
