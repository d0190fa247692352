"""
Módulo de Acoplamento - Processo conjunto (X_n, X̃_n) no espaço produto.

O núcleo P̄((x,x̃),(y,ỹ)) = P(x,y)P̃(x̃,ỹ)Λ(ỹ,y)/(ΛP)(x̃,y) mantém a lei
condicional P(X_n = x | X̃_n = x̃) = Λ(x̃,x) em todo passo. Este módulo
constrói P̄, propaga a lei conjunta exatamente e simula trajetórias com
geradores baseados em contador (um subfluxo Philox por trajetória), de modo
que o resultado não depende do número de trabalhadores.
"""

import asyncio
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from core.config import SIMULACAO_CONFIG, TOLERANCIAS
from core.erros import (
    ErroValidacao,
    ErroVerificacao,
    IntertwiningResidualTooLarge,
    NonProductInitial,
)
from core.kernel import as_matrix, classify, evolve, reachable_from, stationary
from core.utils import hash_matriz, norma_max

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProductKernel:
    """P̄ sobre pares (x, x̃), indexados por x·ñ + x̃."""

    entries: np.ndarray
    P: np.ndarray
    P_tilde: np.ndarray
    Lambda: np.ndarray
    reachable: np.ndarray

    @property
    def n(self) -> int:
        return int(self.P.shape[0])

    @property
    def n_tilde(self) -> int:
        return int(self.P_tilde.shape[0])

    @property
    def hash(self) -> str:
        return hash_matriz(self.entries)

    def indice(self, x: int, x_til: int) -> int:
        return x * self.n_tilde + x_til

    def par(self, indice: int) -> Tuple[int, int]:
        return divmod(int(indice), self.n_tilde)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "n_tilde": self.n_tilde,
            "pares_alcancaveis": [list(self.par(i)) for i in self.reachable],
            "hash": self.hash,
        }


@dataclass
class TrajectoryBatch:
    """Trajetórias pareadas reproduzíveis a partir de (semente, trials, n, hash)."""

    seed: int
    trials: int
    length: int
    X: np.ndarray
    X_tilde: np.ndarray
    absorption_times: np.ndarray
    kernel_hash: str
    partial: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        absorvidas = self.absorption_times >= 0
        return {
            "seed": self.seed,
            "trials": self.trials,
            "length": self.length,
            "kernel_hash": self.kernel_hash,
            "partial": self.partial,
            "fracao_absorvida": float(absorvidas.mean()) if self.trials else 0.0,
        }


@dataclass
class JointReport:
    """Lei conjunta exata e desvios das identidades do acoplamento."""

    joint: np.ndarray
    desvio_condicional: float
    desvio_marginal_X: float
    desvio_marginal_X_tilde: float
    desvio_absorcao: Optional[float] = None
    partial: Optional[int] = None
    desvios_por_passo: List[float] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        tol = TOLERANCIAS["residuo"]
        desvios = [self.desvio_condicional, self.desvio_marginal_X, self.desvio_marginal_X_tilde]
        if self.desvio_absorcao is not None:
            desvios.append(self.desvio_absorcao)
        return all(d <= tol for d in desvios)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "desvio_condicional": self.desvio_condicional,
            "desvio_marginal_X": self.desvio_marginal_X,
            "desvio_marginal_X_tilde": self.desvio_marginal_X_tilde,
            "desvio_absorcao": self.desvio_absorcao,
            "partial": self.partial,
            "ok": self.ok,
        }


def coupling_kernel(P, P_tilde, Lambda) -> ProductKernel:
    """Constrói P̄ a partir do par entrelaçado (P, P̃) e do elo Λ.

    Células com (ΛP)(x̃,y) = 0 valem 0. Os pares alcançáveis partem do suporte
    {Λ(x̃,x) > 0} de toda lei inicial admissível.

    Args:
        P: Cadeia observável (⃖P no pipeline)
        P_tilde: Cadeia entrelaçada
        Lambda: Elo com P̃Λ = ΛP

    Returns:
        ProductKernel: Núcleo produto estocástico nos pares alcançáveis

    Raises:
        IntertwiningResidualTooLarge: quando P̃Λ difere de ΛP
    """
    matriz = as_matrix(P)
    entrelacado = as_matrix(P_tilde)
    elo = np.asarray(Lambda, dtype=np.float64)
    if elo.shape != (entrelacado.shape[0], matriz.shape[0]):
        raise ErroValidacao(f"Elo de formato {elo.shape} incompatível")

    elo_P = elo @ matriz
    residuo = norma_max(entrelacado @ elo - elo_P)
    if residuo > TOLERANCIAS["residuo"]:
        raise IntertwiningResidualTooLarge(f"‖P̃Λ - ΛP‖∞ = {residuo:.3e}")

    numerador = np.einsum("xy,ab,by->xayb", matriz, entrelacado, elo)
    denominador = elo_P[None, :, :, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        produto = np.where(denominador > 0, numerador / denominador, 0.0)
    n, n_til = matriz.shape[0], entrelacado.shape[0]
    entradas = produto.reshape(n * n_til, n * n_til)

    suporte = [x * n_til + a for x in range(n) for a in range(n_til) if elo[a, x] > 0]
    alcancaveis = reachable_from(entradas, suporte)
    somas = entradas[alcancaveis].sum(axis=1)
    desvio = norma_max(somas - 1.0)
    if desvio > TOLERANCIAS["estocastico"]:
        logger.error(f"P̄ não estocástico nos pares alcançáveis (desvio {desvio:.3e})")
        raise ErroVerificacao(f"Somas de linha de P̄ a {desvio:.3e} de 1")

    for array in (entradas, matriz, entrelacado, elo, alcancaveis):
        array.setflags(write=False)
    logger.info(f"Núcleo produto {n}x{n_til}: {alcancaveis.size} pares alcançáveis")
    return ProductKernel(entries=entradas, P=matriz, P_tilde=entrelacado,
                         Lambda=elo, reachable=alcancaveis)


def coupling_from_pipeline(resultado) -> ProductKernel:
    """P̄ para o resultado do pipeline de entrelaçamento, acoplando (⃖P, P̃, Λ)."""
    return coupling_kernel(resultado.P_rev, resultado.P_tilde, resultado.Lambda)


def _lei_inicial(produto: ProductKernel, inicial) -> Tuple[np.ndarray, np.ndarray]:
    """Devolve (π̃_0, lei conjunta [x, x̃]) a partir de π̃_0 ou de uma lei conjunta."""
    inicial = np.asarray(inicial, dtype=np.float64)
    elo = produto.Lambda
    if inicial.ndim == 1:
        if inicial.shape[0] != produto.n_tilde:
            raise ErroValidacao(f"π̃_0 de tamanho {inicial.shape[0]} para ñ = {produto.n_tilde}")
        return inicial, (inicial[:, None] * elo).T

    if inicial.shape != (produto.n, produto.n_tilde):
        raise ErroValidacao(f"Lei conjunta de formato {inicial.shape} incompatível")
    marginal = inicial.sum(axis=0)
    desvio = norma_max(inicial - (marginal[:, None] * elo).T)
    if desvio > TOLERANCIAS["residuo"]:
        raise NonProductInitial(f"Lei inicial difere de π̃_0(x̃)Λ(x̃,x) em {desvio:.3e}")
    return marginal, inicial


def _absorvente(P_tilde: np.ndarray) -> Optional[int]:
    absorventes = classify(P_tilde).absorbing_states
    return absorventes[0] if len(absorventes) == 1 else None


def exact_joint(produto: ProductKernel, inicial, n: int, pi=None) -> JointReport:
    """Propaga a lei conjunta exatamente por n passos.

    Em cada passo confere P(X_k = · | X̃_k = x̃) = Λ(x̃,·) para todo x̃ com
    massa positiva, as duas marginais contra evolve, e que X_k tem lei π
    condicionada à absorção de X̃ em ∂̃ exatamente no passo k.

    Args:
        produto: Núcleo P̄
        inicial: π̃_0 ou lei conjunta de forma produto
        n: Horizonte
        pi: Distribuição estacionária de P (calculada se omitida)

    Returns:
        JointReport: Leis conjuntas (n+1, n_X, ñ) e desvios máximos
    """
    pi_til0, conjunta = _lei_inicial(produto, inicial)
    elo = produto.Lambda
    pi0 = pi_til0 @ elo
    partial = _absorvente(produto.P_tilde)
    if partial is not None and pi is None:
        pi = stationary(produto.P)

    marginais_X = evolve(pi0, produto.P, n, history=True)
    marginais_X_til = evolve(pi_til0, produto.P_tilde, n, history=True)

    v = conjunta.reshape(-1)
    leis = np.empty((n + 1, produto.n, produto.n_tilde))
    desvios: List[float] = []
    desvio_X = desvio_X_til = 0.0
    desvio_absorcao = 0.0 if partial is not None else None
    for passo in range(n + 1):
        if passo > 0:
            v = v @ produto.entries
        atual = v.reshape(produto.n, produto.n_tilde)
        leis[passo] = atual

        marginal = atual.sum(axis=0)
        positivos = marginal > 1e-14
        condicional = atual[:, positivos] / marginal[positivos]
        desvios.append(norma_max(condicional.T - elo[positivos]))
        desvio_X = max(desvio_X, norma_max(atual.sum(axis=1) - marginais_X[passo]))
        desvio_X_til = max(desvio_X_til, norma_max(marginal - marginais_X_til[passo]))

        if partial is not None and passo > 0:
            novo = atual[:, partial] - leis[passo - 1][:, partial] @ produto.P
            massa = novo.sum()
            if massa > 1e-14:
                desvio_absorcao = max(desvio_absorcao, norma_max(novo / massa - pi))

    relatorio = JointReport(
        joint=leis, desvio_condicional=max(desvios), desvio_marginal_X=desvio_X,
        desvio_marginal_X_tilde=desvio_X_til, desvio_absorcao=desvio_absorcao,
        partial=partial, desvios_por_passo=desvios,
    )
    if relatorio.ok:
        logger.debug(f"Lei conjunta exata: desvio condicional {relatorio.desvio_condicional:.3e}")
    else:
        logger.error(f"Identidades do acoplamento violadas: {relatorio.to_dict()}")
    return relatorio


def _fluxo(seed: int, trajetoria: int) -> np.random.Generator:
    """Subfluxo independente da trajetória: Philox com contador i·2^128."""
    return np.random.Generator(np.random.Philox(key=seed, counter=trajetoria << 128))


def _acumuladas(matriz: np.ndarray) -> np.ndarray:
    acumuladas = np.cumsum(matriz, axis=-1)
    acumuladas[..., -1] = 1.0
    return acumuladas


def _simular_bloco(acum_inicial: np.ndarray, acum_produto: np.ndarray, seed: int,
                   inicio: int, fim: int, n: int) -> np.ndarray:
    """Estados produto (fim-inicio, n+1) usando n+1 uniformes por trajetória."""
    uniformes = np.stack([_fluxo(seed, i).random(n + 1) for i in range(inicio, fim)])
    estados = np.empty((fim - inicio, n + 1), dtype=np.int64)
    estados[:, 0] = (acum_inicial[None, :] < uniformes[:, :1]).sum(axis=1)
    for passo in range(1, n + 1):
        linhas = acum_produto[estados[:, passo - 1]]
        estados[:, passo] = (linhas < uniformes[:, passo:passo + 1]).sum(axis=1)
    return estados


async def _simular_paralelo(acum_inicial, acum_produto, seed, trials, n, trabalhadores, bloco):
    limites = [(i, min(i + bloco, trials)) for i in range(0, trials, bloco)]
    semaforo = asyncio.Semaphore(trabalhadores)
    resultados: List[Optional[np.ndarray]] = [None] * len(limites)

    async def executar(k, inicio, fim):
        async with semaforo:
            resultados[k] = await asyncio.to_thread(
                _simular_bloco, acum_inicial, acum_produto, seed, inicio, fim, n)

    tarefas = [executar(k, inicio, fim) for k, (inicio, fim) in enumerate(limites)]
    with tqdm(total=len(tarefas), desc="simulação", disable=not SIMULACAO_CONFIG["barra_progresso"]) as barra:
        for tarefa in asyncio.as_completed(tarefas):
            await tarefa
            barra.update(1)
    return np.concatenate(resultados, axis=0)


def simulate(produto: ProductKernel, inicial, n: int, trials: Optional[int] = None,
             seed: Optional[int] = None, trabalhadores: Optional[int] = None) -> TrajectoryBatch:
    """Simula trajetórias pareadas de P̄.

    Cada trajetória i usa o subfluxo Philox de contador i·2^128 sob a chave
    seed e consome exatamente n+1 uniformes, então o lote é idêntico para
    qualquer número de trabalhadores.

    Args:
        produto: Núcleo P̄
        inicial: π̃_0 ou lei conjunta de forma produto
        n: Comprimento das trajetórias
        trials: Número de trajetórias (padrão: SIMULACAO_CONFIG)
        seed: Semente mestre (padrão: SIMULACAO_CONFIG)
        trabalhadores: Limite de threads (padrão: DUALCHAIN_THREADS)

    Returns:
        TrajectoryBatch: Trajetórias e tempos de absorção de X̃ (-1 se não absorvida)
    """
    trials = SIMULACAO_CONFIG["trials"] if trials is None else int(trials)
    seed = SIMULACAO_CONFIG["seed"] if seed is None else int(seed)
    trabalhadores = trabalhadores or SIMULACAO_CONFIG["trabalhadores"]
    if trials < 1:
        raise ErroValidacao(f"trials = {trials} precisa ser >= 1")
    if seed < 0:
        raise ErroValidacao(f"Semente negativa: {seed}")

    _, conjunta = _lei_inicial(produto, inicial)
    acum_inicial = _acumuladas(conjunta.reshape(-1))
    acum_produto = _acumuladas(produto.entries)

    logger.info(f"Simulando {trials} trajetórias de comprimento {n} (semente {seed}, {trabalhadores} trabalhadores)")
    estados = asyncio.run(_simular_paralelo(
        acum_inicial, acum_produto, seed, trials, n, trabalhadores, SIMULACAO_CONFIG["tamanho_bloco"]))

    X, X_til = np.divmod(estados, produto.n_tilde)
    partial = _absorvente(produto.P_tilde)
    tempos = np.full(trials, -1, dtype=np.int64)
    if partial is not None:
        em_partial = X_til == partial
        atingiu = em_partial.any(axis=1)
        tempos[atingiu] = np.argmax(em_partial[atingiu], axis=1)

    return TrajectoryBatch(seed=seed, trials=trials, length=n, X=X, X_tilde=X_til,
                           absorption_times=tempos, kernel_hash=produto.hash, partial=partial)


def empirical_report(lote: TrajectoryBatch, produto: ProductKernel, inicial,
                     sobrevivencia_exata=None, media_exata: Optional[float] = None,
                     variancia_exata: Optional[float] = None) -> Dict[str, Any]:
    """Compara as frequências do lote com Λ e com a lei exata de T̃.

    Células condicionais com menos de SIMULACAO_CONFIG["min_ocorrencias"]
    ocorrências são listadas e ficam fora da verificação.

    Returns:
        dict: Células, z-scores da sobrevivência, média de T̃ e o flag ok
    """
    k = SIMULACAO_CONFIG["erros_padrao"]
    minimo = SIMULACAO_CONFIG["min_ocorrencias"]
    elo = produto.Lambda
    finais_X = lote.X[:, -1]
    finais_X_til = lote.X_tilde[:, -1]

    celulas = []
    excluidas = []
    for a in range(produto.n_tilde):
        ocorrencias = int(np.sum(finais_X_til == a))
        if ocorrencias < minimo:
            excluidas.append({"x_tilde": a, "ocorrencias": ocorrencias})
            continue
        contagens = np.bincount(finais_X[finais_X_til == a], minlength=produto.n)
        for x in range(produto.n):
            esperado = float(elo[a, x])
            frequencia = contagens[x] / ocorrencias
            erro_padrao = math.sqrt(esperado * (1.0 - esperado) / ocorrencias)
            dentro = abs(frequencia - esperado) <= k * erro_padrao + 1e-12
            celulas.append({"x_tilde": a, "x": x, "ocorrencias": ocorrencias,
                            "frequencia": float(frequencia), "esperado": esperado, "ok": bool(dentro)})

    relatorio: Dict[str, Any] = {
        "celulas": celulas,
        "celulas_excluidas": excluidas,
        "celulas_ok": all(c["ok"] for c in celulas),
        "kernel_hash": lote.kernel_hash,
    }

    if lote.partial is not None and sobrevivencia_exata is not None:
        tempos = lote.absorption_times
        horizonte = min(lote.length, len(sobrevivencia_exata) - 1)
        z_scores = []
        for m in range(horizonte + 1):
            empirica = float(np.mean((tempos > m) | (tempos < 0)))
            exata = float(sobrevivencia_exata[m])
            erro_padrao = math.sqrt(max(exata * (1.0 - exata), 0.0) / lote.trials)
            z_scores.append(0.0 if erro_padrao == 0 else (empirica - exata) / erro_padrao)
        relatorio["z_sobrevivencia"] = z_scores
        relatorio["sobrevivencia_ok"] = bool(np.all(np.abs(z_scores) <= k))

        censuradas = int(np.sum(tempos < 0))
        relatorio["censuradas"] = censuradas
        if censuradas == 0:
            media = float(tempos.mean())
            relatorio["media_T"] = media
            if media_exata is not None and variancia_exata is not None:
                erro_padrao = math.sqrt(variancia_exata / lote.trials)
                relatorio["media_exata"] = media_exata
                relatorio["media_ok"] = abs(media - media_exata) <= k * erro_padrao + 1e-12

    flags = [v for chave, v in relatorio.items() if chave.endswith("_ok")]
    relatorio["ok"] = all(flags)
    if excluidas:
        logger.info(f"Células com poucas ocorrências fora da verificação: {excluidas}")
    if not relatorio["ok"]:
        logger.warning("Frequências empíricas fora de 3 erros padrão")
    return relatorio
