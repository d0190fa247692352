"""
Módulo de Entrelaçamento - Da dualidade ao entrelaçamento.

Dada uma dualidade H P̂' = P H com P estocástico irredutível, este módulo
constrói φ = H'π, o elo Λ = D_φ^-1 H' D_π, o núcleo entrelaçado
P̃ = D_φ^-1 P̂ D_φ e K = H D_φ^-1, e confere as identidades que os ligam:
harmonicidade de φ, estocasticidade de Λ e P̃, P̃Λ = Λ⃖P, a dualidade por K,
a decomposição de φ pelas classes estocásticas de P̂, a transformada de Doob,
as linhas do elo nos estados absorventes e a igualdade dos espectros.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from core.config import ABSORCAO_CONFIG, TOLERANCIAS
from core.erros import (
    DualityResidualTooLarge,
    ErroVerificacao,
    IntertwiningResidualTooLarge,
    LinkNotStochastic,
    NotAbsorbing,
    PhiNotPositive,
    SizeMismatch,
    ZeroStationaryEntry,
)
from core.kernel import (
    KernelKind,
    as_matrix,
    check_harmonic,
    classify,
    hitting_probabilities,
    reversal,
    stationary,
    validate_kernel,
)
from core.utils import norma_max
from dualidade.duals import DualFunction, verify_duality

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntertwiningResult:
    """Resultado do pipeline de entrelaçamento."""

    pi: np.ndarray
    P_rev: np.ndarray
    phi: np.ndarray
    Lambda: np.ndarray
    P_tilde: np.ndarray
    K: np.ndarray
    H: np.ndarray
    P_hat: np.ndarray
    diagnostics: Dict[str, float] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    class_constants: Tuple[Tuple[Tuple[int, ...], float], ...] = ()
    absorbing_states: Tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pi": self.pi.tolist(),
            "phi": self.phi.tolist(),
            "Lambda": self.Lambda.tolist(),
            "P_tilde": self.P_tilde.tolist(),
            "diagnostics": self.diagnostics,
            "checks": self.checks,
            "class_constants": [{"classe": list(c), "c": v} for c, v in self.class_constants],
            "absorbing_states": list(self.absorbing_states),
        }


def link_row_check(Lambda, pi, absorvente: int, P_tilde=None) -> float:
    """Resíduo ‖e_ã'Λ - π'‖∞ para um estado absorvente ã de P̃.

    Args:
        Lambda: Elo estocástico
        pi: Distribuição estacionária de P
        absorvente: Estado ã
        P_tilde: Núcleo entrelaçado (se dado, confere que ã é absorvente)

    Returns:
        float: O resíduo
    """
    elo = as_matrix(Lambda)
    if P_tilde is not None:
        matriz = as_matrix(P_tilde)
        linha = np.zeros(matriz.shape[0])
        linha[absorvente] = 1.0
        if norma_max(matriz[absorvente] - linha) > TOLERANCIAS["estocastico"]:
            raise NotAbsorbing(f"Estado {absorvente} não é absorvente em P̃")
    return norma_max(elo[absorvente] - np.asarray(pi, dtype=np.float64))


def constant_column_check(H, P_hat=None) -> List[Tuple[int, float]]:
    """Colunas constantes e positivas de H: H e_â = c1.

    Quando P̂ é dado, cada â encontrado precisa ser absorvente em P̂.

    Returns:
        list: Pares (â, c)
    """
    Hm = as_matrix(H)
    escala = max(1.0, norma_max(Hm))
    encontrados = []
    for coluna in range(Hm.shape[1]):
        valores = Hm[:, coluna]
        if valores.min() > 0 and np.ptp(valores) <= TOLERANCIAS["negativo"] * escala:
            encontrados.append((coluna, float(valores.mean())))

    if P_hat is not None:
        dual = as_matrix(P_hat)
        for coluna, _ in encontrados:
            linha = np.zeros(dual.shape[0])
            linha[coluna] = 1.0
            if norma_max(dual[coluna] - linha) > TOLERANCIAS["estocastico"]:
                logger.error(f"Coluna constante {coluna} sem estado absorvente em P̂")
                raise ErroVerificacao(f"Estado {coluna} deveria ser absorvente em P̂")
    return encontrados


def spectrum_equivalence(P, P_tilde, m_max: Optional[int] = None) -> Dict[str, Any]:
    """Compara os traços de P^m e P̃^m para m = 1..m_max.

    Traços iguais até m = n determinam o mesmo polinômio característico.
    """
    A = as_matrix(P)
    B = as_matrix(P_tilde)
    if A.shape != B.shape:
        raise SizeMismatch(f"Tamanhos {A.shape} e {B.shape}")
    n = A.shape[0]
    m_max = n if m_max is None else m_max

    potencia_a = np.eye(n)
    potencia_b = np.eye(n)
    tracos_a, tracos_b = [], []
    for _ in range(m_max):
        potencia_a = potencia_a @ A
        potencia_b = potencia_b @ B
        tracos_a.append(float(np.trace(potencia_a)))
        tracos_b.append(float(np.trace(potencia_b)))

    desvio = float(np.max(np.abs(np.subtract(tracos_a, tracos_b)))) if m_max else 0.0
    return {
        "tracos_P": tracos_a,
        "tracos_P_tilde": tracos_b,
        "max_desvio": desvio,
        "ok": desvio <= 1e-8 * n,
    }


def _decomposicao_phi(P_hat: np.ndarray, phi: np.ndarray, checks: Dict[str, bool],
                      diagnostics: Dict[str, float]):
    """Constantes de classe e reconstrução de φ por probabilidades de atingimento."""
    decomposicao = classify(P_hat)
    tipo = validate_kernel(P_hat).kind
    tol = TOLERANCIAS["residuo"]

    checks["substocastico_redutivel"] = tipo != KernelKind.SUBSTOCHASTIC or not decomposicao.irreducible
    checks["classe_estocastica"] = bool(decomposicao.stochastic_classes)

    constantes = []
    reconstruido = np.zeros_like(phi)
    desvio_classes = 0.0
    atingimentos = []
    for classe in decomposicao.stochastic_classes:
        valores = phi[list(classe)]
        c = float(valores.mean())
        desvio_classes = max(desvio_classes, float(np.max(np.abs(valores - c))))
        h = hitting_probabilities(P_hat, classe)
        atingimentos.append(h)
        reconstruido += c * h
        constantes.append((tuple(classe), c))

    diagnostics["constantes_classe"] = desvio_classes
    diagnostics["decomposicao_phi"] = norma_max(reconstruido - phi)
    checks["constantes_classe"] = desvio_classes <= tol
    checks["decomposicao_phi"] = diagnostics["decomposicao_phi"] <= TOLERANCIAS["dinamico"]

    if len(atingimentos) == 1:
        h = atingimentos[0]
        c = constantes[0][1]
        diagnostics["razao_phi_atingimento"] = norma_max(phi / c - h)
        doob = P_hat * h[None, :] / h[:, None]
        diagnostics["doob"] = norma_max(doob - P_hat * phi[None, :] / phi[:, None])
        checks["doob"] = (diagnostics["razao_phi_atingimento"] <= TOLERANCIAS["dinamico"]
                          and diagnostics["doob"] <= TOLERANCIAS["dinamico"])

    if tipo == KernelKind.STOCHASTIC and decomposicao.irreducible:
        checks["phi_constante"] = bool(np.ptp(phi) <= tol * max(1.0, phi.max()))

    return decomposicao, tuple(constantes)


def intertwining_pipeline(P, H, P_hat, n_dinamico: Optional[int] = None,
                          exigir: bool = False) -> IntertwiningResult:
    """Constrói φ, Λ, P̃ e K a partir de uma dualidade e confere as identidades.

    Só a dualidade, a positividade de φ e as somas de linha de Λ e P̃
    interrompem o pipeline. As demais identidades são registradas em
    `checks` e no log; quem decide é o chamador, por `resultado.ok` ou
    com `exigir=True`.

    Args:
        P: Kernel estocástico irredutível
        H: Função dual (DualFunction ou matriz)
        P_hat: Dual de P por H (DualReport, Kernel ou matriz)
        n_dinamico: Passos da verificação dinâmica da dualidade
        exigir: Se True, levanta IntertwiningResidualTooLarge quando alguma
            checagem registrada falha

    Returns:
        IntertwiningResult: Objetos do pipeline, resíduos e checagens

    Raises:
        DualityResidualTooLarge, PhiNotPositive, LinkNotStochastic
        IntertwiningResidualTooLarge: Só com exigir=True
    """
    kernel = validate_kernel(P, demand="stochastic")
    matriz = kernel.entries
    Hm = np.asarray(as_matrix(H), dtype=np.float64)
    dual = validate_kernel(as_matrix(P_hat), demand="substochastic").entries
    tol = TOLERANCIAS["residuo"]

    dualidade = verify_duality(matriz, Hm, dual, n_dinamico)
    if not dualidade["ok"]:
        raise DualityResidualTooLarge(
            f"Resíduos de dualidade {dualidade['static']:.3e} / {dualidade['dynamic']:.3e}")

    pi = stationary(kernel)
    P_rev = reversal(kernel, pi).entries

    phi = Hm.T @ pi
    if phi.min() <= 0:
        raise PhiNotPositive(f"φ({int(np.argmin(phi))}) = {phi.min():.3e}")

    Lambda = (Hm.T * pi[None, :]) / phi[:, None]
    P_tilde = dual * phi[None, :] / phi[:, None]
    K = Hm / phi[None, :]

    diagnostics: Dict[str, float] = {
        "dualidade_estatica": dualidade["static"],
        "dualidade_dinamica": dualidade["dynamic"],
    }
    ponderada = Hm.T * pi[None, :]
    diagnostics["relacao_ponderada"] = norma_max(dual @ ponderada - ponderada @ P_rev)
    diagnostics["harmonico"] = check_harmonic(dual, phi)
    diagnostics["soma_elo"] = norma_max(Lambda.sum(axis=1) - 1.0)
    diagnostics["soma_P_tilde"] = norma_max(P_tilde.sum(axis=1) - 1.0)
    diagnostics["entrelacamento"] = norma_max(P_tilde @ Lambda - Lambda @ P_rev)
    diagnostics["k_dualidade"] = norma_max(K @ P_tilde.T - matriz @ K)

    if diagnostics["soma_elo"] > TOLERANCIAS["estocastico"] \
            or diagnostics["soma_P_tilde"] > TOLERANCIAS["estocastico"]:
        raise LinkNotStochastic(
            f"Somas de linha de Λ/P̃ fora de 1 ({diagnostics['soma_elo']:.3e}, "
            f"{diagnostics['soma_P_tilde']:.3e})")

    checks: Dict[str, bool] = {
        "relacao_ponderada": diagnostics["relacao_ponderada"] <= tol,
        "phi_harmonico": diagnostics["harmonico"] <= tol,
        "entrelacamento": diagnostics["entrelacamento"] <= tol,
        "k_dualidade": diagnostics["k_dualidade"] <= tol,
    }

    decomposicao, constantes = _decomposicao_phi(dual, phi, checks, diagnostics)

    absorventes = decomposicao.absorbing_states
    checks["absorventes_coincidem"] = classify(P_tilde).absorbing_states == absorventes
    maior_linha = 0.0
    for a in absorventes:
        maior_linha = max(maior_linha, link_row_check(Lambda, pi, a, P_tilde))
    diagnostics["linha_elo_estacionaria"] = maior_linha
    checks["linha_elo_estacionaria"] = maior_linha <= tol

    espectro = spectrum_equivalence(matriz, P_tilde)
    diagnostics["espectro"] = espectro["max_desvio"]
    checks["espectro"] = espectro["ok"]

    falhas = [nome for nome, ok in checks.items() if not ok]
    if falhas:
        logger.error(f"Pipeline de entrelaçamento com falhas: {falhas}")
        if exigir:
            raise IntertwiningResidualTooLarge(f"Checagens reprovadas: {', '.join(falhas)}")
    else:
        logger.info(f"Pipeline de entrelaçamento concluído (n={kernel.n})")

    for array in (pi, phi, Lambda, P_tilde, K):
        array.setflags(write=False)

    return IntertwiningResult(
        pi=pi, P_rev=P_rev, phi=phi, Lambda=Lambda, P_tilde=P_tilde, K=K,
        H=Hm, P_hat=dual, diagnostics=diagnostics, checks=checks,
        class_constants=constantes, absorbing_states=absorventes,
    )


def duality_from_intertwining(P_tilde, Lambda, pi, P) -> Tuple[DualFunction, np.ndarray]:
    """Volta do entrelaçamento para a dualidade: H = D_π^-1 Λ' e P̂ = P̃.

    Args:
        P_tilde: Núcleo entrelaçado
        Lambda: Elo com P̃Λ = Λ⃖P
        pi: Distribuição estacionária de P
        P: O núcleo original

    Returns:
        tuple: (DualFunction H, P̂)
    """
    pi = np.asarray(pi, dtype=np.float64)
    if np.any(pi <= 0):
        raise ZeroStationaryEntry(f"π({int(np.argmin(pi))}) = 0")
    matriz = validate_kernel(P, demand="stochastic").entries
    entrelacado = as_matrix(P_tilde)
    elo = as_matrix(Lambda)
    P_rev = reversal(matriz, pi).entries

    residuo = norma_max(entrelacado @ elo - elo @ P_rev)
    if residuo > TOLERANCIAS["residuo"]:
        raise IntertwiningResidualTooLarge(f"‖P̃Λ - Λ⃖P‖ = {residuo:.3e}")

    Hf = DualFunction(H=elo.T / pi[:, None])
    dualidade = verify_duality(matriz, Hf.H, entrelacado)
    if not dualidade["ok"]:
        raise DualityResidualTooLarge(f"Dualidade reconstruída com resíduo {dualidade['static']:.3e}")
    phi = Hf.H.T @ pi
    if norma_max(phi - 1.0) > TOLERANCIAS["residuo"]:
        raise ErroVerificacao(f"φ reconstruído difere de 1 em {norma_max(phi - 1.0):.3e}")
    return Hf, np.array(entrelacado, copy=True)


def cesaro_limit_check(P, H, phi, k: Optional[int] = None) -> float:
    """Desvio de (1/k) Σ_{n<k} P^n H em relação a 1φ'."""
    matriz = as_matrix(P)
    Hm = as_matrix(H)
    k = int(ABSORCAO_CONFIG["iteracoes_cesaro"]) if k is None else k
    termo = Hm.copy()
    soma = np.zeros_like(Hm)
    for _ in range(k):
        soma += termo
        termo = matriz @ termo
    limite = np.outer(np.ones(matriz.shape[0]), np.asarray(phi, dtype=np.float64))
    return norma_max(soma / k - limite)


def harmonic_from_absorbing_check(P, H, P_hat) -> Dict[int, float]:
    """Para cada x_0 absorvente de P, resíduo de harmonicidade de H(x_0,·) em P̂."""
    Hm = as_matrix(H)
    return {int(x0): check_harmonic(P_hat, Hm[x0]) for x0 in classify(P).absorbing_states}


def scale_invariance_check(P, H, P_hat, fatores: Iterable[float] = (0.5, 2.0, 10.0)) -> float:
    """Maior desvio de Λ e P̃ quando H é trocada por cH."""
    Hm = as_matrix(H)
    base = intertwining_pipeline(P, Hm, P_hat)
    maior = 0.0
    for c in fatores:
        escalado = intertwining_pipeline(P, c * Hm, P_hat)
        maior = max(maior, norma_max(escalado.Lambda - base.Lambda),
                    norma_max(escalado.P_tilde - base.P_tilde))
    return maior
