"""
Módulo de Duais - Funções duais e construção de núcleos duais.

Este módulo implementa as famílias de funções duais (Siegmund, ultramétrica
generalizada, hipergeométrica, Vandermonde e potencial) e os construtores de
núcleos duais P̂ com H P̂' = P H, cada um com sua verificação de viabilidade.

As operações de construção devolvem um DualReport. Um relatório inviável não
levanta exceção por si só; DualReport.exigir_viavel() levanta o erro de
inviabilidade correspondente.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg as sla
from scipy.special import gammaln

from core.config import ABSORCAO_CONFIG, TOLERANCIAS
from core.erros import (
    DimensionMismatch,
    ErroValidacao,
    InfeasibleNegativeEntry,
    InvalidUltrametricParams,
    NotAdmissible,
    NotMonotone,
    PotentialHasStochasticClass,
    PreconditionViolated,
    SingularH,
    TrivialDualFunction,
)
from core.kernel import Kernel, KernelKind, as_matrix, classify, validate_kernel
from core.utils import norma_max
from dualidade.chains import BDParams, bd_kernel, moran_kernel, mutation_bias

logger = logging.getLogger(__name__)


class DualFamily(str, Enum):
    """Famílias de funções duais."""

    SIEGMUND = "siegmund"
    ULTRAMETRIC = "ultrametric"
    HYPERGEOMETRIC = "hypergeometric"
    VANDERMONDE = "vandermonde"
    POTENTIAL = "potential"
    CUSTOM = "custom"


@dataclass(frozen=True)
class DualFunction:
    """Função dual H não negativa, com inversa fechada quando disponível."""

    H: np.ndarray
    family: DualFamily = DualFamily.CUSTOM
    params: Dict[str, Any] = field(default_factory=dict)
    inverse: Optional[np.ndarray] = None

    def __post_init__(self):
        H = np.array(as_matrix(self.H), dtype=np.float64, copy=True)
        if H.min() < -TOLERANCIAS["negativo"]:
            raise InfeasibleNegativeEntry("Função dual com entrada negativa")
        linhas_nulas = np.flatnonzero(~np.any(H > 0, axis=1))
        colunas_nulas = np.flatnonzero(~np.any(H > 0, axis=0))
        if linhas_nulas.size or colunas_nulas.size:
            raise TrivialDualFunction(
                f"H trivial: linhas nulas {linhas_nulas.tolist()}, colunas nulas {colunas_nulas.tolist()}")
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

        if self.inverse is not None:
            inversa = np.array(self.inverse, dtype=np.float64, copy=True)
            residuo = norma_max(H @ inversa - np.eye(H.shape[0]))
            if residuo > TOLERANCIAS["residuo"]:
                raise SingularH(f"Inversa fechada inconsistente (resíduo {residuo:.3e})")
            inversa.setflags(write=False)
            object.__setattr__(self, "inverse", inversa)

    @property
    def N(self) -> int:
        return int(self.H.shape[0] - 1)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.H
        return self.H.astype(dtype)

    def to_dict(self) -> Dict[str, Any]:
        params = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.params.items()}
        return {"family": self.family.value, "params": params, "N": self.N}


@dataclass(frozen=True)
class DualReport:
    """Resultado da construção de um dual P̂ de P por H."""

    P_hat: np.ndarray
    feasible: bool
    residual: float
    mass_leaks: np.ndarray
    substochastic: bool
    H: Optional[DualFunction] = None
    violated_conditions: Tuple[str, ...] = ()
    notas: Dict[str, Any] = field(default_factory=dict)
    erro: Optional[type] = field(default=None, repr=False, compare=False)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.P_hat
        return self.P_hat.astype(dtype)

    @property
    def admissible(self) -> bool:
        """Não negativo e subestocástico: um núcleo de verdade."""
        return self.feasible and self.substochastic

    def kernel(self) -> Kernel:
        """O dual como Kernel (exige viabilidade)."""
        self.exigir_viavel()
        return validate_kernel(self.P_hat)

    def exigir_viavel(self, subestocastico: bool = True) -> "DualReport":
        """Levanta o erro de inviabilidade correspondente, se houver.

        Args:
            subestocastico: Se True, também exige somas de linha <= 1

        Returns:
            DualReport: O próprio relatório, quando viável
        """
        if not self.feasible:
            classe = self.erro or InfeasibleNegativeEntry
            raise classe("; ".join(self.violated_conditions) or "Dual inviável")
        if subestocastico and not self.substochastic:
            raise NotAdmissible("; ".join(self.violated_conditions) or "Dual com soma de linha > 1")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feasible": self.feasible,
            "substochastic": self.substochastic,
            "residual": self.residual,
            "mass_leaks": self.mass_leaks.tolist(),
            "violated_conditions": list(self.violated_conditions),
            "family": self.H.family.value if self.H is not None else None,
            **self.notas,
        }


def _limpar(matriz: np.ndarray) -> np.ndarray:
    """Zera as entradas em [-εneg, 0)."""
    matriz = np.array(matriz, dtype=np.float64, copy=True)
    matriz[(matriz < 0) & (matriz >= -TOLERANCIAS["negativo"])] = 0.0
    return matriz


def _residuo_dualidade(P: np.ndarray, H: np.ndarray, P_hat: np.ndarray) -> float:
    return norma_max(H @ P_hat.T - P @ H)


def _relatorio(P: np.ndarray, Hf: DualFunction, P_hat: np.ndarray,
               violacoes: List[str], erro: type, notas: Dict[str, Any]) -> DualReport:
    P_hat = _limpar(P_hat)
    P_hat.setflags(write=False)
    negativas = np.argwhere(P_hat < 0)
    violacoes = list(violacoes)
    for x, y in negativas[:10]:
        violacoes.append(f"entrada negativa P̂({x},{y}) = {P_hat[x, y]:.6g}")
    viavel = negativas.size == 0 and not any(v.startswith("monotonia") for v in violacoes)

    somas = P_hat.sum(axis=1)
    subestocastico = bool(np.all(somas <= 1.0 + TOLERANCIAS["estocastico"]))
    for y in np.flatnonzero(somas > 1.0 + TOLERANCIAS["estocastico"])[:10]:
        violacoes.append(f"soma da linha {y} = {somas[y]:.12g} > 1")

    residuo = _residuo_dualidade(P, Hf.H, P_hat)
    logger.debug(f"Dual {Hf.family.value}: viável={viavel}, resíduo {residuo:.3e}")
    return DualReport(
        P_hat=P_hat,
        feasible=bool(viavel),
        residual=residuo,
        mass_leaks=1.0 - somas,
        substochastic=subestocastico,
        H=Hf,
        violated_conditions=tuple(violacoes),
        notas=notas,
        erro=None if viavel else erro,
    )


def _inversa_ultrametrica(N: int, k: int, alpha: float, beta: float) -> np.ndarray:
    gama = np.where(np.arange(N + 1) <= k, alpha, beta)
    inversa = np.diag(1.0 / (1.0 + gama))
    inversa[np.arange(N), np.arange(1, N + 1)] = -1.0 / (1.0 + gama[:-1])
    inversa[k, k + 1] = -1.0 / ((1.0 + alpha) * (1.0 + beta))
    return inversa


def hypergeometric_matrix(N: int) -> np.ndarray:
    """H(x,y) = C(N-x,y)/C(N,y) para x + y <= N, calculada por log-gama."""
    x = np.arange(N + 1)[:, None]
    y = np.arange(N + 1)[None, :]
    suporte = x + y <= N
    resto = np.where(suporte, N - x - y, 0)
    log_h = gammaln(N - x + 1) + gammaln(N - y + 1) - gammaln(resto + 1) - gammaln(N + 1)
    return np.where(suporte, np.exp(log_h), 0.0)


def dual_function(family: Union[DualFamily, str], N: Optional[int] = None, k: int = 0,
                  alpha: float = 0.0, beta: float = 0.0, R=None) -> DualFunction:
    """Constrói uma função dual da família pedida.

    Args:
        family: siegmund, ultrametric, hypergeometric, vandermonde ou potential
        N: Maior estado (deduzido de R para a família potential)
        k: Índice de corte da família ultramétrica (C = {0..k})
        alpha: Peso do bloco C
        beta: Peso do bloco C'
        R: Núcleo subestocástico da família potential

    Returns:
        DualFunction: H com família, parâmetros e inversa fechada quando houver
    """
    familia = DualFamily(family)

    if familia == DualFamily.POTENTIAL:
        if R is None:
            raise PreconditionViolated("A família potential exige R")
        nucleo = validate_kernel(R, demand="substochastic")
        decomposicao = classify(nucleo)
        if decomposicao.stochastic_classes:
            raise PotentialHasStochasticClass(
                f"R tem classes estocásticas {[list(c) for c in decomposicao.stochastic_classes]}")
        n = nucleo.n
        inversa = np.eye(n) - nucleo.entries
        H = sla.solve(inversa, np.eye(n))
        return DualFunction(H=H, family=familia, params={"R": nucleo.entries}, inverse=inversa)

    if N is None or N < 0:
        raise DimensionMismatch(f"N inválido: {N}")
    n = N + 1

    if familia == DualFamily.SIEGMUND:
        H = np.triu(np.ones((n, n)))
        inversa = np.eye(n) - np.eye(n, k=1)
        return DualFunction(H=H, family=familia, inverse=inversa)

    if familia == DualFamily.ULTRAMETRIC:
        if not (0 <= k < N) or not (np.isfinite(alpha) and np.isfinite(beta)) \
                or alpha < 0 or beta < 0:
            raise InvalidUltrametricParams(f"Parâmetros inválidos: N={N}, k={k}, α={alpha}, β={beta}")
        H = np.triu(np.ones((n, n)))
        H[:k + 1, :k + 1] += alpha * np.triu(np.ones((k + 1, k + 1)))
        H[k + 1:, k + 1:] += beta * np.triu(np.ones((N - k, N - k)))
        return DualFunction(
            H=H, family=familia,
            params={"k": int(k), "alpha": float(alpha), "beta": float(beta)},
            inverse=_inversa_ultrametrica(N, k, alpha, beta),
        )

    if familia == DualFamily.HYPERGEOMETRIC:
        return DualFunction(H=hypergeometric_matrix(N), family=familia)

    if familia == DualFamily.VANDERMONDE:
        if N == 0:
            return DualFunction(H=np.ones((1, 1)), family=familia)
        H = np.power.outer(np.arange(n) / N, np.arange(n))
        return DualFunction(H=H, family=familia)

    raise PreconditionViolated(f"Família {familia.value} exige a matriz H explícita")


def violacoes_monotonia(P) -> List[Tuple[int, int]]:
    """Pares (x, y) em que Σ_{z<=y} P(x+1,z) > Σ_{z<=y} P(x,z)."""
    acumulada = np.cumsum(as_matrix(P), axis=1)
    excesso = acumulada[1:] - acumulada[:-1]
    return [(int(x), int(y)) for x, y in np.argwhere(excesso > TOLERANCIAS["negativo"])]


def _eh_tridiagonal(matriz: np.ndarray) -> bool:
    return norma_max(np.triu(matriz, 2)) + norma_max(np.tril(matriz, -2)) <= TOLERANCIAS["negativo"]


def is_monotone(P) -> bool:
    """Monotonicidade estocástica: linhas acumuladas não crescentes em x.

    Para núcleos tridiagonais confere também p_x + q_{x+1} <= 1.
    """
    matriz = validate_kernel(P, demand="stochastic").entries
    monotono = not violacoes_monotonia(matriz)
    if _eh_tridiagonal(matriz) and matriz.shape[0] > 1:
        somas = np.diag(matriz, 1) + np.diag(matriz, -1)
        monotono_bd = bool(np.all(somas <= 1.0 + TOLERANCIAS["negativo"]))
        if monotono_bd != monotono:
            logger.warning("Critérios de monotonicidade acumulado e tridiagonal discordam")
    return monotono


def _siegmund_acumulado(matriz: np.ndarray) -> np.ndarray:
    """P̂(y,x) = Σ_{z<=y} (P(x,z) - P(x+1,z)), com a linha N de P sozinha."""
    acumulada = np.cumsum(matriz, axis=1)
    diferencas = acumulada.copy()
    diferencas[:-1] -= acumulada[1:]
    return diferencas.T


def siegmund_dual_bd(params: BDParams) -> Kernel:
    """Dual de Siegmund de uma cadeia de nascimento e morte em forma fechada.

    P̂(x,x-1) = p_x, P̂(x,x) = 1 - p_x - q_{x+1} e P̂(x,x+1) = q_{x+1}.
    """
    N = params.N
    q_seguinte = np.append(params.q[1:], 0.0)
    excesso = np.flatnonzero(params.p + q_seguinte > 1.0 + TOLERANCIAS["negativo"])
    if excesso.size:
        x = int(excesso[0])
        raise NotMonotone(f"p_{x} + q_{x + 1} = {params.p[x] + q_seguinte[x]:.12g} > 1")
    matriz = np.diag(1.0 - params.p - q_seguinte)
    if N > 0:
        matriz[np.arange(1, N + 1), np.arange(N)] = params.p[1:]
        matriz[np.arange(N), np.arange(1, N + 1)] = params.q[1:]
    return validate_kernel(matriz)


def siegmund_dual(P) -> DualReport:
    """Dual de Siegmund P̂ de um núcleo estocástico.

    Viável se e somente se P é monótono. O relatório registra o vazamento de
    massa em 0 (1 - P(0,0)), a absorção da linha N e, para entrada tridiagonal,
    a concordância com a forma fechada.

    Args:
        P: Kernel estocástico

    Returns:
        DualReport: P̂ com diagnósticos
    """
    kernel = validate_kernel(P, demand="stochastic")
    matriz = kernel.entries
    N = kernel.N
    Hf = dual_function(DualFamily.SIEGMUND, N)
    P_hat = _siegmund_acumulado(matriz)

    violacoes = [f"monotonia em ({x},{y})" for x, y in violacoes_monotonia(matriz)]
    notas: Dict[str, Any] = {
        "vazamento_zero": float(1.0 - matriz[0, 0]),
        "linha_N_absorvente": bool(norma_max(P_hat[N] - np.eye(N + 1)[N]) <= TOLERANCIAS["negativo"]),
        "estocastico": bool(abs(matriz[0, 0] - 1.0) <= TOLERANCIAS["estocastico"]),
        "residuo_somas_linha": norma_max(P_hat.sum(axis=1) - np.cumsum(matriz[0])),
    }
    if N >= 1:
        notas["residuo_penultima_linha"] = float(abs(P_hat[N - 1, N] - (1.0 - matriz[N, N])))

    if not violacoes and _eh_tridiagonal(matriz) and N >= 1:
        fechado = siegmund_dual_bd(BDParams(
            p=np.append(np.diag(matriz, 1), 0.0),
            q=np.insert(np.diag(matriz, -1), 0, 0.0),
            r=np.diag(matriz),
            absorvente=True,
        )).entries
        notas["residuo_forma_fechada"] = norma_max(fechado - P_hat)

    relatorio = _relatorio(matriz, Hf, P_hat, violacoes, NotMonotone, notas)
    if not relatorio.feasible:
        logger.info(f"Dual de Siegmund inviável: {len(violacoes)} violações de monotonicidade")
    return relatorio


def ultrametric_dual(P, k: int, alpha: float, beta: float) -> DualReport:
    """Dual de P pela função ultramétrica generalizada H_{α,β}.

    Com F a acumulada das linhas de P e G = PH:
    G(x,y) = (1+α)F(x,y) para y <= k e G(x,y) = (1+β)F(x,y) - βF(x,k) para y > k.
    As linhas de P̂' são diferenças de linhas consecutivas de G, com o caso
    especial x = k, onde os blocos C e C' se encontram.

    Args:
        P: Kernel estocástico
        k: Corte (0 <= k < N)
        alpha: Peso do bloco C = {0..k}
        beta: Peso do bloco C' = {k+1..N}

    Returns:
        DualReport: P̂ com o perfil de massa das linhas e a massa de bloco
    """
    kernel = validate_kernel(P, demand="stochastic")
    matriz = kernel.entries
    N = kernel.N
    Hf = dual_function(DualFamily.ULTRAMETRIC, N, k=k, alpha=alpha, beta=beta)
    gama = np.where(np.arange(N + 1) <= k, alpha, beta)

    F = np.cumsum(matriz, axis=1)
    G = np.empty_like(F)
    G[:, :k + 1] = (1.0 + alpha) * F[:, :k + 1]
    G[:, k + 1:] = (1.0 + beta) * F[:, k + 1:] - beta * F[:, [k]]

    transposta = np.empty_like(G)
    transposta[:-1] = (G[:-1] - G[1:]) / (1.0 + gama[:-1, None])
    transposta[k] = G[k] / (1.0 + alpha) - G[k + 1] / ((1.0 + alpha) * (1.0 + beta))
    transposta[N] = G[N] / (1.0 + beta)
    P_hat = transposta.T

    massa_bloco = F[:, k]
    constante = bool(np.ptp(massa_bloco) <= TOLERANCIAS["estocastico"])
    massa_linhas = P_hat.sum(axis=1)
    notas = {
        "k": int(k),
        "alpha": float(alpha),
        "beta": float(beta),
        "massa_bloco": float(massa_bloco[0]) if constante else None,
        "massa_critica": (1.0 + beta) / (1.0 + alpha + beta),
        "perfil_massa": massa_linhas.tolist(),
        "linhas_conservativas": [int(y) for y in np.flatnonzero(
            np.abs(massa_linhas - 1.0) <= TOLERANCIAS["estocastico"])],
        "residuo_inversa_fechada": norma_max(P_hat - (Hf.inverse @ matriz @ Hf.H).T),
    }
    return _relatorio(matriz, Hf, P_hat, [], InfeasibleNegativeEntry, notas)


def ultrametric_rigidity_check(params: BDParams, k: int, alpha: float, beta: float) -> Dict[str, Any]:
    """Rigidez da família ultramétrica para cadeias de nascimento e morte irredutíveis.

    Um dual admissível (não negativo e subestocástico) exige β = 0 e P
    monótono; para k >= 1 exige α = 0; para k = 0 exige α <= p_0/q_1, com
    a linha 0 de P̂ conservativa exatamente na igualdade. Para N >= 2 as
    linhas y >= 1 ainda perdem (α/(1+α))(1 - F(1,y)), então P̂ só é
    estocástico no limiar quando N = 1.

    Com β > 0 a testemunha negativa é a entrada (min(k+2, N), k-1) para
    k >= 1 e (min(3, N), 1) para k = 0. A coluna k-1 de P̂ vale -βp_k/(1+α)
    em toda linha y >= k+1, e para k = 0 a linha N repete a linha 3 porque
    p_N = 0; por isso o corte em N preserva o valor esperado.

    Returns:
        dict: Flags, testemunha negativa e o resultado das implicações
    """
    if not params.irreducible:
        raise PreconditionViolated("A rigidez exige uma cadeia irredutível")
    P = bd_kernel(params)
    relatorio = ultrametric_dual(P, k, alpha, beta)
    N = params.N
    tol = 1e-9

    testemunha = None
    valor_esperado = None
    if k >= 1:
        # k = N-1 cai na linha N, ainda dentro de y >= k+1
        testemunha = (min(k + 2, N), k - 1)
        valor_esperado = -beta * params.p[k] / (1.0 + alpha)
    elif N >= 2:
        testemunha = (min(3, N), 1)
        valor_esperado = -beta * params.q[1] / (1.0 + beta)

    limiar = params.p[0] / params.q[1] if k == 0 else 0.0
    somas = relatorio.P_hat.sum(axis=1)
    estocastico = bool(np.all(np.abs(somas - 1.0) <= TOLERANCIAS["residuo"]))
    monotono = is_monotone(P)
    admissivel = relatorio.admissible

    implicacoes = {
        "beta_nulo": (not admissivel) or beta <= tol,
        "monotono": (not admissivel) or monotono,
        "alpha_nulo_k_positivo": (not admissivel) or k == 0 or alpha <= tol,
        "alpha_limiar_k_zero": (not admissivel) or k >= 1 or alpha <= limiar + tol,
    }
    if k == 0 and beta <= tol:
        implicacoes["linha_zero_no_limiar"] = (abs(somas[0] - 1.0) <= tol) == (abs(alpha - limiar) <= tol)

    resultado = {
        "feasible": relatorio.feasible,
        "substochastic": relatorio.substochastic,
        "admissible": admissivel,
        "stochastic": estocastico,
        "monotone": monotono,
        "limiar_alpha": limiar,
        "massa_linha_zero": float(somas[0]),
        "testemunha": testemunha,
        "valor_testemunha": float(relatorio.P_hat[testemunha]) if testemunha else None,
        "valor_esperado": valor_esperado,
        "implicacoes": implicacoes,
        "ok": all(implicacoes.values()),
        "report": relatorio,
    }
    if not resultado["ok"]:
        logger.error(f"Rigidez ultramétrica violada: {implicacoes}")
    return resultado


def _triangular(H: np.ndarray) -> Optional[str]:
    eps = TOLERANCIAS["negativo"]
    if norma_max(np.tril(H, -1)) <= eps:
        return "superior"
    if norma_max(np.triu(H, 1)) <= eps:
        return "inferior"
    if norma_max(np.tril(H[:, ::-1], -1)) <= eps:
        return "anti"
    return None


def dual_via_solve(P, H) -> DualReport:
    """Resolve H P̂' = P H coluna a coluna.

    Usa substituição triangular quando H é triangular (ou triangular depois
    de inverter a ordem das colunas) e LU densa nos demais casos.

    Args:
        P: Kernel
        H: DualFunction ou matriz

    Returns:
        DualReport: P̂ com viabilidade (mínimo >= -εneg) e subestocasticidade
    """
    matriz = validate_kernel(P).entries
    Hf = H if isinstance(H, DualFunction) else DualFunction(H=H)
    Hm = Hf.H
    if Hm.shape != matriz.shape:
        raise DimensionMismatch(f"H {Hm.shape} e P {matriz.shape} com formatos diferentes")

    condicao = np.linalg.cond(Hm, 1)
    if not np.isfinite(condicao) or condicao > TOLERANCIAS["condicao_maxima"]:
        raise SingularH(f"Número de condição de H = {condicao:.3e}")

    G = matriz @ Hm
    forma = _triangular(Hm)
    if forma == "superior":
        transposta = sla.solve_triangular(Hm, G, lower=False)
    elif forma == "inferior":
        transposta = sla.solve_triangular(Hm, G, lower=True)
    elif forma == "anti":
        transposta = sla.solve_triangular(Hm[:, ::-1], G, lower=False)[::-1]
    else:
        transposta = sla.solve(Hm, G)

    notas = {"condicao": float(condicao), "solver": forma or "lu"}
    return _relatorio(matriz, Hf, transposta.T, [], InfeasibleNegativeEntry, notas)


def hypergeometric_moran_dual(N: int, a1: float, a2: float) -> DualReport:
    """Dual hipergeométrico do modelo de Moran com viés de mutação, em forma fechada.

    P̂ é bidiagonal inferior com P̂(y,y) = 1 - (y/N)(a + (1-a)(y-1)/N) e
    P̂(y,y-1) = (y/N)(a2 + (1-a)(y-1)/N), a = a1 + a2; as somas de linha
    valem 1 - (y/N)a1.
    """
    P = bd_kernel(moran_kernel(N, mutation_bias(a1, a2, N))).entries
    Hf = dual_function(DualFamily.HYPERGEOMETRIC, N)
    a = a1 + a2
    y = np.arange(N + 1)
    P_hat = np.diag(1.0 - (y / N) * (a + (1.0 - a) * (y - 1) / N))
    P_hat[y[1:], y[1:] - 1] = (y[1:] / N) * (a2 + (1.0 - a) * (y[1:] - 1) / N)
    notas = {
        "residuo_somas_linha": norma_max(P_hat.sum(axis=1) - (1.0 - (y / N) * a1)),
        "a1": float(a1),
        "a2": float(a2),
    }
    return _relatorio(P, Hf, P_hat, [], InfeasibleNegativeEntry, notas)


def verify_duality(P, H, P_hat, n_max: Optional[int] = None) -> Dict[str, Any]:
    """Resíduos estático e dinâmico de uma dualidade.

    Estático: ‖H P̂' - P H‖∞. Dinâmico: max_{n<=n_max} ‖P^n H - H (P̂')^n‖∞.
    Confere também a relação simétrica P̂ H' = H' P'.

    Returns:
        dict: static, dynamic, symmetric e ok
    """
    matriz = as_matrix(P)
    Hm = as_matrix(H)
    dual = as_matrix(P_hat)
    if not (matriz.shape == Hm.shape == dual.shape):
        raise DimensionMismatch(f"Formatos {matriz.shape}, {Hm.shape}, {dual.shape}")
    n_max = ABSORCAO_CONFIG["passos_dinamicos"] if n_max is None else n_max

    estatico = _residuo_dualidade(matriz, Hm, dual)
    simetrico = norma_max(dual @ Hm.T - Hm.T @ matriz.T)
    esquerda = Hm.copy()
    direita = Hm.copy()
    dinamico = 0.0
    for _ in range(n_max):
        esquerda = matriz @ esquerda
        direita = direita @ dual.T
        dinamico = max(dinamico, norma_max(esquerda - direita))

    ok = estatico <= TOLERANCIAS["dinamico"] and dinamico <= TOLERANCIAS["dinamico"]
    logger.debug(f"Dualidade: estático {estatico:.3e}, dinâmico {dinamico:.3e}")
    return {"static": estatico, "dynamic": dinamico, "symmetric": simetrico, "ok": ok}


def potential_constant_kernel_check(R) -> DualReport:
    """Dual potencial do núcleo constante uniforme.

    Com H = (I - R)^-1 e P = 11'/(N+1), P̂' = (1/n)((I - R)1)(1'H), que é
    não negativo sempre que R é subestocástico sem classes estocásticas.

    Args:
        R: Núcleo estritamente subestocástico com R' subestocástico

    Returns:
        DualReport: P̂ e os flags de não negatividade
    """
    try:
        nucleo = validate_kernel(R, demand="substochastic")
    except ErroValidacao as e:
        raise PreconditionViolated(f"R inválido: {e}")
    if nucleo.kind == KernelKind.STOCHASTIC:
        raise PreconditionViolated("R é estocástico")
    if np.any(nucleo.entries.sum(axis=0) > 1.0 + TOLERANCIAS["estocastico"]):
        raise PreconditionViolated("R' não é subestocástico")
    if classify(nucleo).stochastic_classes:
        raise PreconditionViolated("R tem classes estocásticas")

    Hf = dual_function(DualFamily.POTENTIAL, R=nucleo)
    n = nucleo.n
    P = np.full((n, n), 1.0 / n)
    transposta = np.outer(1.0 - nucleo.entries.sum(axis=1), Hf.H.sum(axis=0)) / n
    P_hat = transposta.T
    notas = {
        "nao_negativo": bool(P_hat.min() >= -TOLERANCIAS["negativo"]),
        "massa_colunas_nao_negativa": bool(P_hat.sum(axis=1).min() >= -TOLERANCIAS["negativo"]),
    }
    return _relatorio(P, Hf, P_hat, [], InfeasibleNegativeEntry, notas)
