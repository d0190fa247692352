"""
Módulo de Núcleos - Representação e análise de núcleos de Markov finitos.

Este módulo implementa a validação de núcleos (matrizes não negativas com
somas de linha até 1), a decomposição em classes comunicantes, distribuições
estacionárias, reversão temporal, evolução de distribuições, probabilidades
de atingimento e verificação de harmonicidade.

Todos os valores são imutáveis depois de construídos: os arrays internos são
marcados como somente leitura.
"""

import heapq
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg as sla

from core.config import TOLERANCIAS
from core.erros import (
    DimensionMismatch,
    ErroValidacao,
    InvalidProbVector,
    NegativeEntry,
    NonFiniteEntry,
    NonSquare,
    NotIrreducible,
    NotStochastic,
    RowSumExceedsOne,
    SingularSystem,
    ZeroStationaryEntry,
)
from core.utils import norma_max

logger = logging.getLogger(__name__)


def _somente_leitura(array):
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


class KernelKind(str, Enum):
    """Classificação de um núcleo pelas somas de linha."""

    STOCHASTIC = "stochastic"
    SUBSTOCHASTIC = "strictly-substochastic"
    GENERAL = "general-nonnegative"


@dataclass(frozen=True)
class Kernel:
    """Núcleo não negativo nos estados 0..N."""

    entries: np.ndarray
    kind: KernelKind

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def N(self) -> int:
        return self.n - 1

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "kind": self.kind.value, "entries": self.entries.tolist()}


@dataclass(frozen=True)
class ClassDecomposition:
    """Classes comunicantes em ordem topológica.

    Transições só vão de uma classe para ela mesma ou para classes
    posteriores na lista.
    """

    classes: Tuple[Tuple[int, ...], ...]
    stochastic_classes: Tuple[Tuple[int, ...], ...]
    absorbing_states: Tuple[int, ...]

    @property
    def irreducible(self) -> bool:
        return len(self.classes) == 1

    def class_of(self, estado: int) -> int:
        """Índice da classe que contém o estado."""
        for indice, classe in enumerate(self.classes):
            if estado in classe:
                return indice
        raise ErroValidacao(f"Estado {estado} fora do espaço de estados")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "classes": [list(c) for c in self.classes],
            "stochastic_classes": [list(c) for c in self.stochastic_classes],
            "absorbing_states": list(self.absorbing_states),
        }


def as_matrix(objeto) -> np.ndarray:
    """Extrai uma matriz quadrada float64 de um Kernel, relatório ou array."""
    if isinstance(objeto, Kernel):
        return objeto.entries
    matriz = np.asarray(objeto, dtype=np.float64)
    if matriz.ndim != 2 or matriz.shape[0] != matriz.shape[1] or matriz.shape[0] == 0:
        raise NonSquare(f"Matriz de formato {matriz.shape} não é quadrada")
    return matriz


def _tipo_por_somas(somas: np.ndarray) -> KernelKind:
    eps = TOLERANCIAS["estocastico"]
    if np.all(np.abs(somas - 1.0) <= eps):
        return KernelKind.STOCHASTIC
    if np.all(somas <= 1.0 + eps) and np.any(somas < 1.0 - eps):
        return KernelKind.SUBSTOCHASTIC
    return KernelKind.GENERAL


def validate_kernel(matrix, demand: Optional[Union[KernelKind, str]] = None) -> Kernel:
    """Valida uma matriz e constrói o Kernel correspondente.

    Args:
        matrix: Matriz quadrada não negativa (aceita ruído até -1e-12)
        demand: Tipo exigido: "stochastic" exige somas iguais a 1,
            "substochastic" exige somas até 1 (padrão: nenhum)

    Returns:
        Kernel: Núcleo com entradas truncadas em zero e tipo determinado

    Raises:
        NonSquare, NonFiniteEntry, NegativeEntry, RowSumExceedsOne, NotStochastic
    """
    if isinstance(matrix, Kernel) and demand is None:
        return matrix
    matriz = np.array(as_matrix(matrix), dtype=np.float64, copy=True)

    if not np.all(np.isfinite(matriz)):
        x, y = np.argwhere(~np.isfinite(matriz))[0]
        raise NonFiniteEntry(f"Entrada ({x},{y}) não é finita")

    eps_neg = TOLERANCIAS["negativo"]
    if matriz.min() < -eps_neg:
        x, y = np.unravel_index(np.argmin(matriz), matriz.shape)
        raise NegativeEntry(f"Entrada ({x},{y}) = {matriz[x, y]:.3e} é negativa")
    matriz[matriz < 0] = 0.0

    somas = matriz.sum(axis=1)
    tipo = _tipo_por_somas(somas)

    if demand is not None:
        exigido = str(getattr(demand, "value", demand))
        eps = TOLERANCIAS["estocastico"]
        if exigido in ("stochastic", "strictly-substochastic", "substochastic"):
            excesso = np.flatnonzero(somas > 1.0 + eps)
            if excesso.size:
                x = int(excesso[0])
                raise RowSumExceedsOne(f"Linha {x} soma {somas[x]:.12g} > 1")
        if exigido == "stochastic" and tipo != KernelKind.STOCHASTIC:
            x = int(np.argmax(np.abs(somas - 1.0)))
            raise NotStochastic(f"Linha {x} soma {somas[x]:.12g} != 1")

    return Kernel(entries=_somente_leitura(matriz), kind=tipo)


def validate_prob_vector(vetor, n: Optional[int] = None) -> np.ndarray:
    """Valida um vetor de probabilidade (entradas >= 0, soma 1)."""
    v = np.array(vetor, dtype=np.float64, copy=True).ravel()
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"Vetor de tamanho {v.shape[0]}, esperado {n}")
    if not np.all(np.isfinite(v)) or v.min(initial=0.0) < -TOLERANCIAS["negativo"]:
        raise InvalidProbVector("Vetor de probabilidade com entrada negativa ou não finita")
    v[v < 0] = 0.0
    if abs(v.sum() - 1.0) > TOLERANCIAS["estocastico"]:
        raise InvalidProbVector(f"Vetor de probabilidade soma {v.sum():.12g}")
    return v


def _vizinhos(matriz: np.ndarray) -> List[List[int]]:
    positivos = matriz > TOLERANCIAS["negativo"]
    return [np.flatnonzero(linha).tolist() for linha in positivos]


def _componentes_fortes(vizinhos: List[List[int]]) -> List[List[int]]:
    """Tarjan iterativo sobre o grafo de positividade."""
    n = len(vizinhos)
    indice = [-1] * n
    baixo = [0] * n
    na_pilha = [False] * n
    pilha: List[int] = []
    componentes: List[List[int]] = []
    contador = 0

    for raiz in range(n):
        if indice[raiz] >= 0:
            continue
        indice[raiz] = baixo[raiz] = contador
        contador += 1
        pilha.append(raiz)
        na_pilha[raiz] = True
        trabalho = [(raiz, iter(vizinhos[raiz]))]

        while trabalho:
            v, restantes = trabalho[-1]
            desceu = False
            for w in restantes:
                if indice[w] < 0:
                    indice[w] = baixo[w] = contador
                    contador += 1
                    pilha.append(w)
                    na_pilha[w] = True
                    trabalho.append((w, iter(vizinhos[w])))
                    desceu = True
                    break
                if na_pilha[w]:
                    baixo[v] = min(baixo[v], indice[w])
            if desceu:
                continue

            trabalho.pop()
            if trabalho:
                pai = trabalho[-1][0]
                baixo[pai] = min(baixo[pai], baixo[v])
            if baixo[v] == indice[v]:
                componente = []
                while True:
                    w = pilha.pop()
                    na_pilha[w] = False
                    componente.append(w)
                    if w == v:
                        break
                componentes.append(sorted(componente))

    return componentes


def _ordem_topologica(componentes: List[List[int]], vizinhos: List[List[int]]) -> List[List[int]]:
    """Kahn com desempate pelo menor estado de cada classe."""
    rotulo = {}
    for c, componente in enumerate(componentes):
        for x in componente:
            rotulo[x] = c

    sucessores = [set() for _ in componentes]
    for x, destinos in enumerate(vizinhos):
        for y in destinos:
            if rotulo[x] != rotulo[y]:
                sucessores[rotulo[x]].add(rotulo[y])

    grau = [0] * len(componentes)
    for destinos in sucessores:
        for c in destinos:
            grau[c] += 1

    fila = [(componentes[c][0], c) for c in range(len(componentes)) if grau[c] == 0]
    heapq.heapify(fila)
    ordem = []
    while fila:
        _, c = heapq.heappop(fila)
        ordem.append(componentes[c])
        for d in sucessores[c]:
            grau[d] -= 1
            if grau[d] == 0:
                heapq.heappush(fila, (componentes[d][0], d))
    return ordem


def classify(P) -> ClassDecomposition:
    """Decompõe os estados em classes comunicantes.

    Args:
        P: Kernel (ou matriz) a decompor

    Returns:
        ClassDecomposition: Classes em ordem topológica, St(P) e estados absorventes
    """
    matriz = validate_kernel(P).entries
    eps = TOLERANCIAS["estocastico"]
    vizinhos = _vizinhos(matriz)
    classes = _ordem_topologica(_componentes_fortes(vizinhos), vizinhos)

    estocasticas = []
    absorventes = []
    for classe in classes:
        bloco = matriz[np.ix_(classe, classe)]
        if np.all(np.abs(bloco.sum(axis=1) - 1.0) <= eps):
            estocasticas.append(tuple(classe))
        if len(classe) == 1:
            a = classe[0]
            if abs(matriz[a, a] - 1.0) <= eps and matriz[a].sum() - matriz[a, a] <= eps:
                absorventes.append(a)

    logger.debug(f"{len(classes)} classes, {len(estocasticas)} estocásticas, absorventes={absorventes}")
    return ClassDecomposition(
        classes=tuple(tuple(c) for c in classes),
        stochastic_classes=tuple(estocasticas),
        absorbing_states=tuple(absorventes),
    )


def reachable_from(P, states: Iterable[int], reverse: bool = False) -> np.ndarray:
    """Estados alcançáveis a partir de um conjunto pelo grafo de positividade.

    Args:
        P: Kernel ou matriz
        states: Estados de partida
        reverse: Se True, devolve os estados que alcançam o conjunto

    Returns:
        np.ndarray: Índices ordenados (inclui os estados de partida)
    """
    matriz = as_matrix(P)
    if reverse:
        matriz = matriz.T
    vizinhos = _vizinhos(matriz)
    visitados = set(int(s) for s in states)
    fila = deque(visitados)
    while fila:
        x = fila.popleft()
        for y in vizinhos[x]:
            if y not in visitados:
                visitados.add(y)
                fila.append(y)
    return np.array(sorted(visitados), dtype=np.int64)


def stationary(P) -> np.ndarray:
    """Distribuição estacionária de um núcleo estocástico irredutível.

    Resolve (P' - I)π = 0 por LU com a última equação trocada pela
    normalização.

    Args:
        P: Kernel estocástico irredutível

    Returns:
        np.ndarray: π com π'P = π', soma 1 e entradas positivas

    Raises:
        NotStochastic, NotIrreducible, SingularSystem
    """
    kernel = validate_kernel(P, demand="stochastic")
    if not classify(kernel).irreducible:
        raise NotIrreducible("Núcleo não é irredutível")

    n = kernel.n
    sistema = kernel.entries.T - np.eye(n)
    sistema[-1, :] = 1.0
    lado_direito = np.zeros(n)
    lado_direito[-1] = 1.0
    try:
        pi = sla.solve(sistema, lado_direito)
    except (sla.LinAlgError, ValueError) as e:
        raise SingularSystem(f"Sistema de balanço singular: {e}")

    pi = pi / pi.sum()
    residuo = norma_max(pi @ kernel.entries - pi)
    if residuo > TOLERANCIAS["residuo"]:
        logger.warning(f"Resíduo estacionário {residuo:.3e} acima da tolerância")
    else:
        logger.debug(f"Resíduo estacionário {residuo:.3e}")
    if pi.min() <= 0:
        raise SingularSystem(f"Distribuição estacionária com entrada não positiva ({pi.min():.3e})")
    return pi


def stationary_power(P, iterations: int = 5000, cesaro: bool = False,
                     tol: float = 1e-12) -> np.ndarray:
    """Oráculo de iteração de potências para stationary.

    Args:
        P: Kernel estocástico
        iterations: Número máximo de iterações
        cesaro: Se True, devolve a média de Cesàro das iteradas (cadeias periódicas)
        tol: Critério de parada da iteração simples

    Returns:
        np.ndarray: Aproximação de π
    """
    matriz = validate_kernel(P, demand="stochastic").entries
    n = matriz.shape[0]
    v = np.full(n, 1.0 / n)
    if cesaro:
        soma = np.zeros(n)
        for _ in range(iterations):
            soma += v
            v = v @ matriz
        return soma / iterations

    for i in range(iterations):
        proximo = v @ matriz
        if norma_max(proximo - v) <= tol:
            return proximo
        v = proximo
    logger.warning(f"Iteração de potências não convergiu em {iterations} passos")
    return v


def cumulative(pi) -> np.ndarray:
    """Distribuição acumulada π^c(x) = Σ_{y<=x} π(y)."""
    return np.cumsum(np.asarray(pi, dtype=np.float64))


def reversal(P, pi=None) -> Kernel:
    """Reversão temporal ⃖P(x,y) = π(y)P(y,x)/π(x).

    Args:
        P: Kernel estocástico irredutível
        pi: Sua distribuição estacionária (calculada se omitida)

    Returns:
        Kernel: O núcleo revertido
    """
    matriz = validate_kernel(P).entries
    pi = stationary(P) if pi is None else np.asarray(pi, dtype=np.float64)
    if pi.shape[0] != matriz.shape[0]:
        raise DimensionMismatch(f"π de tamanho {pi.shape[0]} para núcleo {matriz.shape[0]}")
    if np.any(pi <= 0):
        raise ZeroStationaryEntry(f"π({int(np.argmin(pi))}) = 0")
    revertido = (matriz.T * pi[None, :]) / pi[:, None]
    return validate_kernel(revertido)


def evolve(pi0, P, n: int, history: bool = False) -> np.ndarray:
    """Evolui uma distribuição: π_n' = π_0' P^n.

    Args:
        pi0: Distribuição inicial
        P: Kernel (subestocástico permitido)
        n: Número de passos (>= 0)
        history: Se True, devolve a matriz (n+1) x |E| com π_0..π_n

    Returns:
        np.ndarray: π_n, ou a sequência inteira
    """
    if n < 0:
        raise ErroValidacao(f"Número de passos negativo: {n}")
    matriz = as_matrix(P)
    v = np.array(pi0, dtype=np.float64, copy=True)
    if v.shape[0] != matriz.shape[0]:
        raise DimensionMismatch(f"Vetor de tamanho {v.shape[0]} para núcleo {matriz.shape[0]}")
    if not history:
        for _ in range(n):
            v = v @ matriz
        return v

    trajetoria = np.empty((n + 1, v.shape[0]))
    trajetoria[0] = v
    for passo in range(1, n + 1):
        trajetoria[passo] = trajetoria[passo - 1] @ matriz
    return trajetoria


def hitting_probabilities(P, target: Iterable[int]) -> np.ndarray:
    """Probabilidade de atingir o alvo antes da morte, x -> P_x(T_alvo < ∞).

    Estados que não alcançam o alvo recebem 0; os demais resolvem
    (I - P_TT)h = P_{T,alvo}1 sobre os transientes T.

    Args:
        P: Kernel subestocástico
        target: Conjunto alvo não vazio

    Returns:
        np.ndarray: Vetor em [0,1], igual a 1 no alvo
    """
    matriz = validate_kernel(P, demand="substochastic").entries
    n = matriz.shape[0]
    alvo = sorted(set(int(t) for t in target))
    if not alvo:
        raise ErroValidacao("Conjunto alvo vazio")
    if alvo[0] < 0 or alvo[-1] >= n:
        raise DimensionMismatch(f"Alvo {alvo} fora de 0..{n - 1}")

    h = np.zeros(n)
    h[alvo] = 1.0
    conjunto_alvo = set(alvo)
    transientes = [x for x in reachable_from(matriz, alvo, reverse=True) if x not in conjunto_alvo]
    if not transientes:
        return h

    T = np.array(transientes)
    sistema = np.eye(T.size) - matriz[np.ix_(T, T)]
    lado_direito = matriz[np.ix_(T, alvo)].sum(axis=1)
    try:
        solucao = sla.solve(sistema, lado_direito)
    except (sla.LinAlgError, ValueError) as e:
        raise SingularSystem(f"Sistema de atingimento singular: {e}")

    residuo = norma_max(sistema @ solucao - lado_direito)
    if residuo > TOLERANCIAS["residuo"]:
        raise SingularSystem(f"Resíduo do sistema de atingimento {residuo:.3e}")
    h[T] = np.clip(solucao, 0.0, 1.0)
    return h


def check_harmonic(P, h) -> float:
    """Resíduo de harmonicidade ‖Ph - h‖∞.

    Args:
        P: Kernel
        h: Vetor não negativo

    Returns:
        float: O resíduo
    """
    matriz = as_matrix(P)
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 1 or h.shape[0] != matriz.shape[0]:
        raise DimensionMismatch(f"Vetor de formato {h.shape} para núcleo {matriz.shape[0]}")
    if h.min(initial=0.0) < -TOLERANCIAS["negativo"]:
        raise ErroValidacao("Função harmônica com entrada negativa")
    return norma_max(matriz @ h - h)
