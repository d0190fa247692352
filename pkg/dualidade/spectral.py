"""
Módulo Espectral - Espectros de cadeias de nascimento e morte.

Este módulo calcula o espectro de uma cadeia BD pelo problema tridiagonal
simétrico equivalente, os pesos espectrais, os polinômios ortogonais da
recorrência de três termos (usados como oráculo independente), os espectros
fechados do modelo de Moran com mutação, do modelo de Bernoulli-Laplace e do
passeio refletido, e as implicações entre monotonicidade e sinal do espectro.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.linalg as sla
from scipy import optimize
from scipy.special import comb

from core.config import TOLERANCIAS
from core.erros import ErroVerificacao, NotIrreducible, RepeatedEigenvalue, ZeroBirthProbability
from dualidade.chains import BDParams, bd_kernel, bd_stationary
from dualidade.duals import is_monotone

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Spectrum:
    """Autovalores t_0 = 1 > t_1 > ... > t_N e pesos espectrais opcionais."""

    eigenvalues: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        autovalores = np.sort(np.asarray(self.eigenvalues, dtype=np.float64))[::-1].copy()
        autovalores.setflags(write=False)
        object.__setattr__(self, "eigenvalues", autovalores)
        if self.weights is not None:
            pesos = np.array(self.weights, dtype=np.float64, copy=True)
            if pesos.shape != autovalores.shape:
                raise ErroVerificacao("Pesos e autovalores com tamanhos diferentes")
            pesos.setflags(write=False)
            object.__setattr__(self, "weights", pesos)

    @property
    def gap(self) -> float:
        if self.eigenvalues.size < 2:
            return 1.0
        return float(1.0 - self.eigenvalues[1])

    @property
    def simple(self) -> bool:
        return bool(np.all(np.diff(self.eigenvalues) < 0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "weights": None if self.weights is None else self.weights.tolist(),
            "gap": self.gap,
        }


def _tridiagonal_simetrica(params: BDParams) -> Tuple[np.ndarray, np.ndarray]:
    if not params.irreducible:
        raise NotIrreducible("O espectro exige uma cadeia irredutível")
    return params.r.copy(), np.sqrt(params.p[:-1] * params.q[1:])


def bd_spectrum(params: BDParams) -> Spectrum:
    """Espectro pela matriz simétrica Q = D_π^{1/2} P D_π^{-1/2}.

    Q é tridiagonal com diagonal r_x e fora da diagonal √(p_x q_{x+1}).
    """
    diagonal, fora = _tridiagonal_simetrica(params)
    if diagonal.size == 1:
        return Spectrum(eigenvalues=diagonal)
    autovalores = sla.eigh_tridiagonal(diagonal, fora, eigvals_only=True)
    espectro = Spectrum(eigenvalues=autovalores)
    if abs(espectro.eigenvalues[0] - 1.0) > TOLERANCIAS["espectro"]:
        logger.warning(f"Maior autovalor {espectro.eigenvalues[0]:.15g} difere de 1")
    return espectro


def spectral_weights(params: BDParams) -> Spectrum:
    """Espectro com pesos μ_k = (primeira componente do k-ésimo autovetor de Q)².

    Confere μ_0 = π(0) e Σμ_k = 1.
    """
    diagonal, fora = _tridiagonal_simetrica(params)
    if diagonal.size == 1:
        return Spectrum(eigenvalues=diagonal, weights=np.ones(1))
    autovalores, autovetores = sla.eigh_tridiagonal(diagonal, fora)
    ordem = np.argsort(autovalores)[::-1]
    pesos = autovetores[0, ordem] ** 2

    pi0 = bd_stationary(params)[0]
    if abs(pesos.sum() - 1.0) > TOLERANCIAS["estocastico"] or abs(pesos[0] - pi0) > TOLERANCIAS["estocastico"]:
        logger.error(f"Pesos espectrais inconsistentes: soma {pesos.sum():.12g}, μ_0 {pesos[0]:.12g}, π(0) {pi0:.12g}")
        raise ErroVerificacao("Pesos espectrais inconsistentes")
    return Spectrum(eigenvalues=autovalores[ordem], weights=pesos)


def orthopoly_oracle(params: BDParams, t) -> Tuple[np.ndarray, np.ndarray]:
    """Polinômios q_0(t)..q_N(t) da recorrência de três termos e R_{N+1}(t).

    t q_y = p_y q_{y+1} + r_y q_y + q_y^morte q_{y-1}, com q_0 = 1, e
    R_{N+1}(t) = (t - r_N) q_N - q_N^morte q_{N-1}, cujos zeros são o espectro.

    Args:
        params: Cadeia com p_y > 0 para y < N
        t: Ponto (ou array de pontos)

    Returns:
        tuple: (matriz (N+1, ...) com os q_y(t), R_{N+1}(t))
    """
    N = params.N
    zeros = np.flatnonzero(params.p[:-1] <= 0)
    if zeros.size:
        raise ZeroBirthProbability(f"p_{int(zeros[0])} = 0")
    t = np.asarray(t, dtype=np.float64)
    polinomios = np.empty((N + 1,) + t.shape)
    polinomios[0] = 1.0
    anterior = np.zeros_like(t)
    for y in range(N):
        polinomios[y + 1] = ((t - params.r[y]) * polinomios[y] - params.q[y] * anterior) / params.p[y]
        anterior = polinomios[y]
    resto = (t - params.r[N]) * polinomios[N] - params.q[N] * anterior
    return polinomios, resto


def isolate_roots(params: BDParams, max_refinos: int = 12) -> np.ndarray:
    """Isola as N+1 raízes de R_{N+1} em [-1-1e-9, 1+1e-9] por mudança de sinal.

    Começa com 4(N+1) painéis e dobra a malha até encontrar N+1 raízes; cada
    intervalo é refinado com brentq.

    Returns:
        np.ndarray: Raízes em ordem decrescente
    """
    N = params.N
    alvo = N + 1

    def resto(t):
        return float(orthopoly_oracle(params, t)[1])

    paineis = 4 * alvo
    for _ in range(max_refinos + 1):
        malha = np.linspace(-1.0 - 1e-9, 1.0 + 1e-9, paineis + 1)
        valores = orthopoly_oracle(params, malha)[1]
        raizes = []
        for i in range(paineis):
            a, b = malha[i], malha[i + 1]
            fa, fb = valores[i], valores[i + 1]
            if fa == 0.0:
                raizes.append(a)
            elif fa * fb < 0:
                raizes.append(optimize.brentq(resto, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))
        if valores[-1] == 0.0:
            raizes.append(malha[-1])
        if len(raizes) == alvo:
            return np.sort(np.array(raizes))[::-1]
        paineis *= 2
    logger.warning(f"Isolamento de raízes encontrou {len(raizes)} de {alvo}")
    return np.sort(np.array(raizes))[::-1]


def monotonicity_spectrum_checks(params: BDParams) -> Dict[str, Any]:
    """Implicações entre espectro e monotonicidade.

    Espectro não negativo implica monotonicidade; min r_x > 1/2 implica menor
    autovalor positivo. As recíprocas que falham são apenas relatadas.
    """
    espectro = bd_spectrum(params)
    minimo = float(espectro.eigenvalues[-1])
    monotono = is_monotone(bd_kernel(params))
    nao_negativo = minimo >= -TOLERANCIAS["negativo"]
    min_r = float(params.r.min())

    implicacoes = {
        "nao_negativo_implica_monotono": (not nao_negativo) or monotono,
        "meia_permanencia_implica_positivo": (min_r <= 0.5) or minimo > 0,
    }
    relatorio = {
        "menor_autovalor": minimo,
        "monotone": monotono,
        "espectro_nao_negativo": nao_negativo,
        "min_r": min_r,
        "meia_permanencia": min_r >= 0.5,
        "reciproca_falha": monotono and not nao_negativo,
        "implicacoes": implicacoes,
        "ok": all(implicacoes.values()),
    }
    if not relatorio["ok"]:
        logger.error(f"Implicações espectrais violadas: {implicacoes}")
    return relatorio


def moran_mutation_spectrum(N: int, a1: float, a2: float) -> Spectrum:
    """t_k = 1 - (k/N)(a + (k-1)(1-a)/N), a = a1 + a2; lacuna a/N."""
    a = a1 + a2
    k = np.arange(N + 1)
    autovalores = 1.0 - (k / N) * (a + (k - 1) * (1.0 - a) / N)
    espectro = Spectrum(eigenvalues=autovalores)
    if not espectro.simple:
        raise RepeatedEigenvalue(f"Espectro de Moran com autovalores repetidos (a1={a1}, a2={a2})")
    return espectro


def bernoulli_laplace_weights(N: int) -> Spectrum:
    """Espectro e pesos do modelo de Bernoulli-Laplace.

    t_k = 1 - k(2N+1-k)/N² e μ_k = (2N+1-2k)/(2N+1-k)·C(N,k)/C(2N-k,N).
    """
    k = np.arange(N + 1)
    autovalores = 1.0 - k * (2 * N + 1 - k) / N ** 2
    pesos = (2 * N + 1 - 2 * k) / (2 * N + 1 - k) * comb(N, k) / comb(2 * N - k, N)
    return Spectrum(eigenvalues=autovalores, weights=pesos)


def reflected_walk_spectrum(N: int, p: float) -> Spectrum:
    """{1} ∪ {2√(pq) cos(kπ/(N+1)) : k = 1..N}."""
    k = np.arange(1, N + 1)
    autovalores = 2.0 * np.sqrt(p * (1.0 - p)) * np.cos(k * np.pi / (N + 1))
    return Spectrum(eigenvalues=np.concatenate(([1.0], autovalores)))
