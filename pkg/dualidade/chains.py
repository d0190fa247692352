"""
Módulo de Cadeias - Construtores de cadeias de nascimento e morte.

Este módulo implementa cadeias de nascimento e morte (BD), modelos de Moran
com função de viés arbitrária (incluindo o viés de mutação e o modelo de
Bernoulli-Laplace), o passeio refletido, núcleos de Wright-Fisher e a análise
de absorção em dois lados pela função de escala.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy import stats

from core.config import ABSORCAO_CONFIG, TOLERANCIAS
from core.erros import (
    DimensionMismatch,
    ErroValidacao,
    ErroVerificacao,
    InvalidBoundary,
    InvalidProbVector,
    NotDoublyAbsorbing,
    NotIrreducible,
    RowSumError,
)
from core.kernel import Kernel, stationary, validate_kernel
from core.utils import norma_max

logger = logging.getLogger(__name__)


def _vetor_somente_leitura(valores):
    vetor = np.array(valores, dtype=np.float64, copy=True).ravel()
    vetor.setflags(write=False)
    return vetor


@dataclass(frozen=True)
class BDParams:
    """Parâmetros de uma cadeia de nascimento e morte nos estados 0..N.

    p, q e r são as probabilidades de nascimento, morte e permanência.
    Com absorvente=False o interior precisa ter p_x, q_x > 0.
    """

    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    absorvente: bool = False

    def __post_init__(self):
        for nome in ("p", "q", "r"):
            object.__setattr__(self, nome, _vetor_somente_leitura(getattr(self, nome)))

        if not (self.p.shape == self.q.shape == self.r.shape) or self.p.size == 0:
            raise DimensionMismatch(
                f"p, q, r com tamanhos {self.p.size}, {self.q.size}, {self.r.size}")

        eps = TOLERANCIAS["estocastico"]
        for nome in ("p", "q", "r"):
            valores = getattr(self, nome)
            if not np.all(np.isfinite(valores)) or np.any(valores < -TOLERANCIAS["negativo"]) \
                    or np.any(valores > 1.0 + eps):
                raise InvalidProbVector(f"{nome} fora de [0,1]: {valores.tolist()}")

        if self.q[0] > TOLERANCIAS["negativo"]:
            raise InvalidBoundary(f"q_0 = {self.q[0]} deve ser 0")
        if self.p[-1] > TOLERANCIAS["negativo"]:
            raise InvalidBoundary(f"p_N = {self.p[-1]} deve ser 0")

        somas = self.p + self.q + self.r
        ruins = np.flatnonzero(np.abs(somas - 1.0) > eps)
        if ruins.size:
            x = int(ruins[0])
            raise RowSumError(f"p_{x}+q_{x}+r_{x} = {somas[x]:.12g} != 1")

        if not self.absorvente:
            interior = slice(1, self.N)
            if np.any(self.p[interior] <= 0) or np.any(self.q[interior] <= 0):
                raise NotIrreducible("Probabilidades interiores nulas sem variante absorvente")

    @classmethod
    def from_rates(cls, p, q, r=None, absorvente: bool = False) -> "BDParams":
        """Constrói os parâmetros completando r = 1 - p - q quando omitido."""
        p = np.asarray(p, dtype=np.float64)
        q = np.asarray(q, dtype=np.float64)
        if r is None:
            r = 1.0 - p - q
        return cls(p=p, q=q, r=r, absorvente=absorvente)

    @property
    def N(self) -> int:
        return int(self.p.size - 1)

    @property
    def irreducible(self) -> bool:
        return bool(np.all(self.p[:-1] > 0) and np.all(self.q[1:] > 0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "p": self.p.tolist(),
            "q": self.q.tolist(),
            "r": self.r.tolist(),
            "absorvente": self.absorvente,
        }


@dataclass(frozen=True)
class BiasFunction:
    """Função de viés amostrada na grade x/N, x = 0..N."""

    values: np.ndarray

    def __post_init__(self):
        valores = _vetor_somente_leitura(self.values)
        if valores.size < 2:
            raise DimensionMismatch("A tabela de viés precisa de N >= 1")
        if not np.all(np.isfinite(valores)) or valores.min() < 0 or valores.max() > 1:
            raise InvalidProbVector(f"Viés fora de [0,1]: {valores.tolist()}")
        object.__setattr__(self, "values", valores)

    @classmethod
    def from_callable(cls, funcao: Callable[[np.ndarray], np.ndarray], N: int) -> "BiasFunction":
        grade = np.arange(N + 1) / N
        return cls(values=np.asarray(funcao(grade), dtype=np.float64) * np.ones(N + 1))

    @property
    def N(self) -> int:
        return int(self.values.size - 1)

    @property
    def nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) >= -TOLERANCIAS["negativo"]))

    @property
    def positive_at_zero(self) -> bool:
        return bool(self.values[0] > 0)

    @property
    def below_one_at_one(self) -> bool:
        return bool(self.values[-1] < 1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "values": self.values.tolist(),
            "nondecreasing": self.nondecreasing,
            "positive_at_zero": self.positive_at_zero,
            "below_one_at_one": self.below_one_at_one,
        }


@dataclass(frozen=True)
class ScaleProfile:
    """Função de escala e probabilidades de absorção em 0."""

    eta: np.ndarray
    phi: np.ndarray
    pi_hat_star: np.ndarray
    residual: float
    extras: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta": self.eta.tolist(),
            "phi": self.phi.tolist(),
            "pi_hat_star": self.pi_hat_star.tolist(),
            "residual": self.residual,
            **self.extras,
        }


def bd_kernel(params: BDParams) -> Kernel:
    """Monta o núcleo tridiagonal de uma cadeia de nascimento e morte.

    Args:
        params: Parâmetros (p, q, r)

    Returns:
        Kernel: Núcleo estocástico tridiagonal
    """
    n = params.N + 1
    matriz = np.diag(params.r.copy())
    if n > 1:
        matriz[np.arange(n - 1), np.arange(1, n)] = params.p[:-1]
        matriz[np.arange(1, n), np.arange(n - 1)] = params.q[1:]
    return validate_kernel(matriz, demand="stochastic")


def bd_stationary(params: BDParams) -> np.ndarray:
    """Distribuição estacionária pela fórmula de produto π(y) ∝ Π_{z<y} p_z/q_{z+1}.

    O produto é acumulado em escala logarítmica.
    """
    if not params.irreducible:
        raise NotIrreducible("Cadeia de nascimento e morte redutível (p_x ou q_x nulos)")
    if params.N == 0:
        return np.ones(1)
    log_razoes = np.log(params.p[:-1]) - np.log(params.q[1:])
    log_pi = np.concatenate(([0.0], np.cumsum(log_razoes)))
    pi = np.exp(log_pi - log_pi.max())
    return pi / pi.sum()


def mutation_bias(a1: float, a2: float, N: int) -> BiasFunction:
    """Viés de mutação p(u) = (1 - a2)u + a1(1 - u)."""
    for nome, valor in (("a1", a1), ("a2", a2)):
        if not 0.0 <= valor <= 1.0:
            raise InvalidProbVector(f"{nome} = {valor} fora de [0,1]")
    u = np.arange(N + 1) / N
    return BiasFunction(values=np.clip((1.0 - a2) * u + a1 * (1.0 - u), 0.0, 1.0))


def bernoulli_laplace_bias(N: int) -> BiasFunction:
    """Viés p(u) = 1 - u do modelo de troca de calor de Bernoulli-Laplace."""
    return mutation_bias(1.0, 1.0, N)


def complement_bias(bias: BiasFunction) -> BiasFunction:
    """Viés da cadeia rotulada N - X: p̄(u) = 1 - p(1 - u)."""
    return BiasFunction(values=1.0 - bias.values[::-1])


def moran_kernel(N: int, bias: BiasFunction) -> BDParams:
    """Parâmetros do modelo de Moran com viés p.

    q_x = (x/N)q(x/N), p_x = (1 - x/N)p(x/N) e r_x = (x/N)p(x/N) + (1 - x/N)q(x/N).

    Args:
        N: Tamanho da população
        bias: Função de viés na grade x/N

    Returns:
        BDParams: Parâmetros da cadeia (variante absorvente quando o viés zera no interior)
    """
    if bias.N != N:
        raise DimensionMismatch(f"Viés tabelado para N={bias.N}, pedido N={N}")
    u = np.arange(N + 1) / N
    vies = bias.values
    p = (1.0 - u) * vies
    q = u * (1.0 - vies)
    r = u * vies + (1.0 - u) * (1.0 - vies)
    interior_positivo = bool(np.all(p[1:N] > 0) and np.all(q[1:N] > 0))
    return BDParams(p=p, q=q, r=r, absorvente=not interior_positivo)


def moran_complement(N: int, bias: BiasFunction) -> BDParams:
    """Modelo de Moran da cadeia complementar N - X."""
    return moran_kernel(N, complement_bias(bias))


def reflected_walk(N: int, p: float) -> BDParams:
    """Passeio aleatório refletido em {0..N}: retém q em 0 e p em N."""
    if N < 1:
        raise DimensionMismatch("O passeio refletido precisa de N >= 1")
    if not 0.0 < p < 1.0:
        raise InvalidProbVector(f"p = {p} fora de (0,1)")
    q = 1.0 - p
    nascimentos = np.full(N + 1, p)
    nascimentos[-1] = 0.0
    mortes = np.full(N + 1, q)
    mortes[0] = 0.0
    permanencias = np.zeros(N + 1)
    permanencias[0] = q
    permanencias[-1] = p
    return BDParams(p=nascimentos, q=mortes, r=permanencias)


def wright_fisher_kernel(N: int, bias: BiasFunction) -> Kernel:
    """Núcleo de Wright-Fisher P(x,y) = C(N,y) p(x/N)^y (1 - p(x/N))^(N-y).

    Args:
        N: Tamanho da população
        bias: Função de viés na grade x/N

    Returns:
        Kernel: Núcleo estocástico com linhas binomiais
    """
    if bias.N != N:
        raise DimensionMismatch(f"Viés tabelado para N={bias.N}, pedido N={N}")
    y = np.arange(N + 1)
    matriz = stats.binom.pmf(y[None, :], N, bias.values[:, None])
    return validate_kernel(matriz, demand="stochastic")


def bd_params_from_kernel(kernel) -> BDParams:
    """Lê de volta os parâmetros de um núcleo tridiagonal estocástico.

    Usado para passar P̃ às recorrências de absorção.
    """
    matriz = validate_kernel(kernel, demand="stochastic").entries
    n = matriz.shape[0]
    fora = np.abs(np.triu(matriz, 2)) + np.abs(np.tril(matriz, -2))
    if norma_max(fora) > TOLERANCIAS["negativo"]:
        raise ErroValidacao("Núcleo não é tridiagonal")
    p = np.zeros(n)
    q = np.zeros(n)
    p[:-1] = np.diag(matriz, 1)
    q[1:] = np.diag(matriz, -1)
    r = 1.0 - p - q
    interior_positivo = bool(np.all(p[1:n - 1] > 0) and np.all(q[1:n - 1] > 0))
    return BDParams(p=p, q=q, r=np.clip(r, 0.0, 1.0), absorvente=not interior_positivo)


def absorption_profile(params: BDParams) -> ScaleProfile:
    """Probabilidades de absorção em 0 de uma cadeia duplamente absorvente.

    Calcula η(x) = Σ_{y<x} Π_{z=1..y} q_z/p_z e φ(x) = 1 - η(x)/η(N), e
    confere com φ(x) = 1 - Σ_{y<x} π̂_*(y), onde π̂_* é a distribuição
    estacionária do dual de Siegmund restrito a {0..N-1}.

    Args:
        params: Cadeia com r_0 = r_N = 1 e interior positivo

    Returns:
        ScaleProfile: η, φ, π̂_* e o resíduo entre as duas expressões
    """
    from dualidade.duals import siegmund_dual_bd

    eps = TOLERANCIAS["estocastico"]
    N = params.N
    if N < 1 or abs(params.r[0] - 1.0) > eps or abs(params.r[-1] - 1.0) > eps:
        raise NotDoublyAbsorbing("A variante absorvente exige r_0 = r_N = 1")
    if np.any(params.p[1:N] <= 0) or np.any(params.q[1:N] <= 0):
        raise NotDoublyAbsorbing("Interior com probabilidade nula")

    razoes = params.q[1:N] / params.p[1:N]
    produtos = np.concatenate(([1.0], np.cumprod(razoes)))
    eta = np.concatenate(([0.0], np.cumsum(produtos)))
    phi = 1.0 - eta / eta[-1]

    dual = siegmund_dual_bd(params).entries
    pi_hat_star = stationary(dual[:N, :N])
    phi_dual = 1.0 - np.concatenate(([0.0], np.cumsum(pi_hat_star)))

    residuo = norma_max(phi - phi_dual)
    logger.debug(f"Perfil de absorção N={N}: resíduo {residuo:.3e}")
    if residuo > TOLERANCIAS["residuo"]:
        logger.error(f"As duas expressões de φ diferem em {residuo:.3e}")
        raise ErroVerificacao(f"Perfil de absorção inconsistente (resíduo {residuo:.3e})")

    return ScaleProfile(eta=eta, phi=phi, pi_hat_star=pi_hat_star, residual=residuo)


def left_absorption_identity(params: BDParams, n_max: Optional[int] = None) -> float:
    """Confere P_x(X_n <= 0) = P_0(x <= X̂_n) por potências exatas.

    Args:
        params: Cadeia monótona com p_0 = 0
        n_max: Horizonte (padrão: ABSORCAO_CONFIG["passos_dinamicos"])

    Returns:
        float: Maior resíduo sobre x e n <= n_max
    """
    from dualidade.duals import siegmund_dual_bd

    if params.p[0] > TOLERANCIAS["negativo"]:
        raise InvalidBoundary(f"A identidade exige p_0 = 0 (p_0 = {params.p[0]})")
    n_max = ABSORCAO_CONFIG["passos_dinamicos"] if n_max is None else n_max

    P = bd_kernel(params).entries
    P_hat = siegmund_dual_bd(params).entries
    n = P.shape[0]

    coluna = np.zeros(n)
    coluna[0] = 1.0
    linha = coluna.copy()
    maior = 0.0
    for _ in range(n_max + 1):
        cauda = np.cumsum(linha[::-1])[::-1]
        maior = max(maior, norma_max(coluna - cauda))
        coluna = P @ coluna
        linha = linha @ P_hat
    logger.debug(f"Identidade de absorção à esquerda: resíduo {maior:.3e}")
    return maior


def moran_half_holding_check(N: int, bias: BiasFunction) -> Dict[str, Any]:
    """Critério de autovalores positivos do modelo de Moran.

    Para N par e viés não decrescente com p(1/2) = 1/2 vale min r_x >= 1/2,
    pois r_x - 1/2 = (1 - 2u)(1 - 2p(u))/2.
    """
    params = moran_kernel(N, bias)
    u = np.arange(N + 1) / N
    identidade = 0.5 * (1.0 - 2.0 * u) * (1.0 - 2.0 * bias.values)
    residuo = norma_max(params.r - 0.5 - identidade)
    aplicavel = (N % 2 == 0 and bias.nondecreasing
                 and abs(bias.values[N // 2] - 0.5) <= TOLERANCIAS["negativo"])
    minimo = float(params.r.min())
    return {
        "aplicavel": aplicavel,
        "min_r": minimo,
        "residuo_identidade": residuo,
        "ok": (not aplicavel) or minimo >= 0.5 - TOLERANCIAS["negativo"],
    }
