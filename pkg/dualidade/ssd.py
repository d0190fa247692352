"""
Módulo de Tempos Estacionários Fortes - Separação, nitidez e tempos de absorção.

Este módulo implementa:
- distância de separação e variação total;
- condições iniciais admissíveis para o par entrelaçado (π̃_0'Λ = π_0');
- estados testemunha e a verificação de nitidez sep(π_n,π) = P(T̃ > n);
- a lei do tempo de absorção T̃ por três caminhos independentes (potências
  exatas, fatoração espectral da função geradora e recorrências de
  nascimento e morte);
- o relatório de cutoff ao longo de uma família de cadeias.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg as sla
from scipy import signal
from tqdm import tqdm

from core.config import ABSORCAO_CONFIG, SIMULACAO_CONFIG, TOLERANCIAS
from core.erros import (
    ErroValidacao,
    ErroVerificacao,
    NotAbsorbing,
    NotAdmissible,
    RepeatedEigenvalue,
    TruncationTooCoarse,
    ZeroPiEntry,
    ZeroUpProbability,
)
from core.kernel import as_matrix, classify, cumulative, evolve, stationary, validate_prob_vector
from core.utils import norma_max
from dualidade.chains import BDParams
from dualidade.spectral import Spectrum, moran_mutation_spectrum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AbsorptionStats:
    """Lei do tempo de absorção T̃ em n = 0..n_max."""

    pmf: np.ndarray
    survival: np.ndarray
    mean: float
    variance: float
    source: str
    truncation: float
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return int(self.pmf.size - 1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "source": self.source,
            "mean": self.mean,
            "variance": self.variance,
            "n_max": self.n_max,
            "truncation": self.truncation,
            **{k: v for k, v in self.extras.items() if not isinstance(v, np.ndarray)},
        }


@dataclass(frozen=True)
class AdmissibleStart:
    """Solução de π̃_0'Λ = π_0' e estrutura do elo."""

    pi_tilde_0: np.ndarray
    residual: float
    pi_Lambda: Optional[np.ndarray] = None
    point_pairs: Tuple[Tuple[int, int], ...] = ()
    extras: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pi_tilde_0": self.pi_tilde_0.tolist(),
            "residual": self.residual,
            "pi_Lambda": None if self.pi_Lambda is None else self.pi_Lambda.tolist(),
            "point_pairs": [list(par) for par in self.point_pairs],
            **self.extras,
        }


@dataclass(frozen=True)
class SharpnessWitness:
    """Estado testemunha d com Λe_d = π(d)e_∂̃."""

    d: int
    partial: int
    candidatos: Tuple[int, ...] = ()
    condicao_H: Optional[bool] = None
    condicao_par: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "partial": self.partial,
            "candidatos": list(self.candidatos),
            "condicao_H": self.condicao_H,
            "condicao_par": self.condicao_par,
        }


@dataclass(frozen=True)
class SharpnessReport:
    """Tabela de sep(π_n,π) contra P(T̃ > n)."""

    separation: np.ndarray
    survival: np.ndarray
    total_variation: np.ndarray
    max_gap: float
    witness: Optional[SharpnessWitness]
    admissibility_residual: float
    partial: int

    @property
    def bound_holds(self) -> bool:
        return bool(np.all(self.separation <= self.survival + TOLERANCIAS["dinamico"]))

    @property
    def sharp(self) -> bool:
        return self.witness is not None and self.max_gap <= TOLERANCIAS["dinamico"]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_gap": self.max_gap,
            "bound_holds": self.bound_holds,
            "sharp": self.sharp,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "admissibility_residual": self.admissibility_residual,
            "partial": self.partial,
        }


def total_variation(mu, pi) -> float:
    """‖μ - π‖_TV = ½Σ|μ - π|."""
    return 0.5 * float(np.abs(np.asarray(mu, dtype=np.float64) - np.asarray(pi, dtype=np.float64)).sum())


def separation(mu, pi) -> float:
    """sep(μ,π) = max_y (1 - μ(y)/π(y)).

    Args:
        mu: Distribuição (pode ter massa < 1)
        pi: Distribuição estacionária com entradas positivas

    Returns:
        float: A separação, sempre >= variação total
    """
    mu = np.asarray(mu, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    if np.any(pi <= 0):
        raise ZeroPiEntry(f"π({int(np.argmin(pi))}) = 0")
    sep = float(np.max(1.0 - mu / pi))
    vt = total_variation(mu, pi)
    if sep < vt - TOLERANCIAS["residuo"]:
        raise ErroVerificacao(f"Separação {sep:.12g} menor que variação total {vt:.12g}")
    return sep


def admissible_initials(Lambda, pi0, pi=None, siegmund: bool = False) -> AdmissibleStart:
    """Resolve π̃_0'Λ = π_0' com π̃_0 >= 0.

    Args:
        Lambda: Elo estocástico
        pi0: Distribuição inicial de X
        pi: Distribuição estacionária (necessária para a forma fechada de Siegmund)
        siegmund: Se True, confere a forma fechada
            π̃_0(x) = π^c(x)(π_0(x)/π(x) - π_0(x+1)/π(x+1))

    Returns:
        AdmissibleStart: π̃_0, resíduo, π_Λ e pares de pontos

    Raises:
        NotAdmissible: quando não há solução não negativa
    """
    elo = as_matrix(Lambda)
    pi0 = validate_prob_vector(pi0, elo.shape[0])
    n = elo.shape[0]

    try:
        solucao = sla.solve(elo.T, pi0)
    except (sla.LinAlgError, ValueError):
        solucao = np.linalg.lstsq(elo.T, pi0, rcond=None)[0]
    residuo = norma_max(solucao @ elo - pi0)
    if residuo > TOLERANCIAS["residuo"] or solucao.min() < -TOLERANCIAS["residuo"]:
        raise NotAdmissible(
            f"Sem π̃_0 não negativo (mínimo {solucao.min():.3e}, resíduo {residuo:.3e})")
    solucao = np.clip(solucao, 0.0, None)

    extras: Dict[str, Any] = {}
    if siegmund:
        if pi is None:
            raise ErroValidacao("A forma fechada de Siegmund exige π")
        pi = np.asarray(pi, dtype=np.float64)
        razoes = np.append(pi0 / pi, 0.0)
        fechado = cumulative(pi) * (razoes[:-1] - razoes[1:])
        extras["razao_nao_crescente"] = bool(np.all(np.diff(razoes[:-1]) <= TOLERANCIAS["negativo"]))
        extras["residuo_forma_fechada"] = norma_max(fechado - solucao)

    autovalores, autovetores = sla.eig(elo.T)
    indice = int(np.argmin(np.abs(autovalores - 1.0)))
    pi_lambda = None
    if abs(autovalores[indice] - 1.0) <= TOLERANCIAS["estocastico"]:
        vetor = np.real(autovetores[:, indice])
        vetor = vetor / vetor.sum()
        if vetor.min() >= -TOLERANCIAS["estocastico"]:
            pi_lambda = np.clip(vetor, 0.0, None)

    pares = []
    for b_til in range(n):
        b = int(np.argmax(elo[b_til]))
        if abs(elo[b_til, b] - 1.0) <= TOLERANCIAS["negativo"]:
            pares.append((b_til, b))

    return AdmissibleStart(
        pi_tilde_0=solucao, residual=residuo, pi_Lambda=pi_lambda,
        point_pairs=tuple(pares), extras=extras,
    )


def sharpness_conditions(H, Lambda, pi, partial: int) -> Optional[SharpnessWitness]:
    """Procura d com Λe_d = π(d)e_∂̃.

    Também confere a condição equivalente na linha d de H (suportada só em ∂̃)
    e a condição de par e_∂̃'Λ = π'.

    Returns:
        SharpnessWitness ou None
    """
    elo = as_matrix(Lambda)
    pi = np.asarray(pi, dtype=np.float64)
    n = elo.shape[0]
    alvo = np.zeros(n)
    alvo[partial] = 1.0

    candidatos = [d for d in range(n)
                  if norma_max(elo[:, d] - pi[d] * alvo) <= TOLERANCIAS["residuo"]]
    if not candidatos:
        return None
    d = candidatos[-1]

    condicao_H = None
    if H is not None:
        linha = as_matrix(H)[d]
        condicao_H = bool(linha[partial] > 0 and
                          norma_max(np.delete(linha, partial)) <= TOLERANCIAS["negativo"])
    condicao_par = bool(norma_max(elo[partial] - pi) <= TOLERANCIAS["residuo"])
    if len(candidatos) > 1:
        logger.info(f"Testemunha degenerada: candidatos {candidatos}")
    return SharpnessWitness(d=d, partial=partial, candidatos=tuple(candidatos),
                            condicao_H=condicao_H, condicao_par=condicao_par)


def _absorvente_unico(P_tilde: np.ndarray) -> int:
    absorventes = classify(P_tilde).absorbing_states
    if len(absorventes) != 1:
        raise NotAbsorbing(f"P̃ precisa de um único estado absorvente (tem {list(absorventes)})")
    return absorventes[0]


def verify_sharpness(P, P_tilde, Lambda, pi0, pi_tilde0, n_max: Optional[int] = None,
                     partial: Optional[int] = None, pi=None, H=None) -> SharpnessReport:
    """Compara sep(π_n,π) com P(T̃_∂̃ > n) para n = 0..n_max.

    P é a cadeia entrelaçada com P̃ (⃖P no pipeline). A desigualdade
    sep <= sobrevivência vale sempre; a igualdade vale quando há testemunha.

    Returns:
        SharpnessReport: Tabela, maior diferença e testemunha
    """
    matriz = as_matrix(P)
    entrelacado = as_matrix(P_tilde)
    elo = as_matrix(Lambda)
    n_max = ABSORCAO_CONFIG["passos_dinamicos"] if n_max is None else n_max
    pi0 = np.asarray(pi0, dtype=np.float64)
    pi_tilde0 = np.asarray(pi_tilde0, dtype=np.float64)

    residuo = norma_max(pi_tilde0 @ elo - pi0)
    if residuo > TOLERANCIAS["residuo"]:
        raise NotAdmissible(f"π̃_0'Λ difere de π_0' em {residuo:.3e}")
    partial = _absorvente_unico(entrelacado) if partial is None else partial
    pi = stationary(matriz) if pi is None else np.asarray(pi, dtype=np.float64)

    historia = evolve(pi0, matriz, n_max, history=True)
    historia_dual = evolve(pi_tilde0, entrelacado, n_max, history=True)
    separacoes = np.array([separation(linha, pi) for linha in historia])
    variacoes = np.array([total_variation(linha, pi) for linha in historia])
    sobrevivencia = 1.0 - historia_dual[:, partial]

    testemunha = sharpness_conditions(H, elo, pi, partial)
    diferenca = float(np.max(np.abs(separacoes - sobrevivencia)))
    relatorio = SharpnessReport(
        separation=separacoes, survival=sobrevivencia, total_variation=variacoes,
        max_gap=diferenca, witness=testemunha, admissibility_residual=residuo,
        partial=int(partial),
    )
    if not relatorio.bound_holds:
        logger.error("Separação acima da sobrevivência do tempo dual")
    if testemunha is not None and not relatorio.sharp:
        logger.error(f"Testemunha {testemunha.d} sem igualdade (diferença {diferenca:.3e})")
    return relatorio


def _momentos_com_cauda(pmf: np.ndarray, sobrevivencia: np.ndarray) -> Tuple[float, float, float]:
    """Média e variância da pmf truncada com extrapolação geométrica da cauda."""
    n = np.arange(pmf.size)
    media = float(n @ pmf)
    segundo = float((n * n) @ pmf)
    cauda = float(sobrevivencia[-1])
    rho = 0.0
    if cauda > 0 and pmf.size >= 2 and sobrevivencia[-2] > 0:
        rho = min(float(sobrevivencia[-1] / sobrevivencia[-2]), 1.0 - 1e-12)
        n_max = pmf.size - 1
        media += cauda * (n_max + 1.0 / (1.0 - rho))
        segundo += cauda * (n_max ** 2 + 2.0 * n_max / (1.0 - rho) + (1.0 + rho) / (1.0 - rho) ** 2)
    return media, segundo - media ** 2, rho


def _horizonte_inicial(media: float, variancia: float) -> int:
    return int(math.ceil(media + 10.0 * math.sqrt(max(variancia, 0.0)) + 10))


def absorption_exact(P_tilde, start, partial: int, n_max: Optional[int] = None) -> AbsorptionStats:
    """Lei de T̃_∂̃ por propagação exata do vetor de estados.

    Sem n_max, itera até a sobrevivência cair abaixo de
    ABSORCAO_CONFIG["cauda_alvo"] (limitado a n_max_limite).

    Args:
        P_tilde: Núcleo com ∂̃ absorvente
        start: Distribuição inicial
        partial: Estado absorvente ∂̃
        n_max: Horizonte fixo (opcional)

    Returns:
        AbsorptionStats: pmf, sobrevivência e momentos
    """
    matriz = as_matrix(P_tilde)
    linha = np.zeros(matriz.shape[0])
    linha[partial] = 1.0
    if norma_max(matriz[partial] - linha) > TOLERANCIAS["estocastico"]:
        raise NotAbsorbing(f"Estado {partial} não é absorvente")

    v = np.asarray(start, dtype=np.float64).copy()
    automatico = n_max is None
    limite = int(ABSORCAO_CONFIG["n_max_limite"]) if automatico else int(n_max)
    absorvido = [float(v[partial])]
    while len(absorvido) <= limite:
        if automatico and 1.0 - absorvido[-1] <= ABSORCAO_CONFIG["cauda_alvo"]:
            break
        v = v @ matriz
        absorvido.append(float(v[partial]))

    absorvido = np.array(absorvido)
    pmf = np.diff(absorvido, prepend=0.0)
    sobrevivencia = 1.0 - absorvido
    cauda = float(sobrevivencia[-1])
    if cauda > ABSORCAO_CONFIG["cauda_tolerada"]:
        if automatico:
            raise TruncationTooCoarse(f"Cauda {cauda:.3e} ainda acima da tolerância em n={limite}")
        logger.warning(f"Horizonte n={limite} deixa cauda {cauda:.3e}; momentos extrapolados")

    media, variancia, rho = _momentos_com_cauda(pmf, sobrevivencia)
    return AbsorptionStats(
        pmf=pmf, survival=sobrevivencia, mean=media, variance=variancia,
        source="matrix-power", truncation=cauda, extras={"rho_cauda": rho},
    )


def _autovalores_subdominantes(espectro: Spectrum) -> np.ndarray:
    t = espectro.eigenvalues
    if abs(t[0] - 1.0) > TOLERANCIAS["espectro"]:
        raise ErroValidacao(f"t_0 = {t[0]:.15g} difere de 1")
    resto = t[1:]
    if resto.size and (resto.max() >= 1.0 or resto.min() <= -1.0):
        raise ErroValidacao("Autovalores subdominantes precisam estar em (-1, 1)")
    return resto


def spectral_moments(espectro: Spectrum) -> Tuple[float, float]:
    """E(T̃) = Σ 1/(1-t_k) e Var(T̃) = Σ t_k/(1-t_k)² para k >= 1."""
    t = _autovalores_subdominantes(espectro)
    return float(np.sum(1.0 / (1.0 - t))), float(np.sum(t / (1.0 - t) ** 2))


def _convolucao_geometrica(t: np.ndarray, tamanho: int) -> np.ndarray:
    """Coeficientes de Π (1-t)s/(1-ts) até s^(tamanho-1), via filtro recursivo."""
    pmf = np.zeros(tamanho)
    pmf[0] = 1.0
    for tk in t:
        pmf = signal.lfilter([0.0, 1.0 - tk], [1.0, -tk], pmf)
    return pmf


def absorption_spectral(espectro: Spectrum, n_max: Optional[int] = None) -> AbsorptionStats:
    """Lei de T̃ pela fatoração espectral da função geradora.

    A função geradora é Π_{k>=1} (1-t_k)s/(1-t_k s). A pmf é obtida pelos
    coeficientes da série (válida para autovalores de qualquer sinal); a cauda
    usa frações parciais quando os autovalores estão bem separados e, com
    autovalores negativos, confere a decomposição em geométricas e Bernoullis.

    Returns:
        AbsorptionStats: pmf, sobrevivência, média e variância fechadas
    """
    t = _autovalores_subdominantes(espectro)
    media, variancia = spectral_moments(espectro)
    extras: Dict[str, Any] = {}
    if t.size:
        limite_variancia = media / (1.0 - t[0])
        extras["limite_variancia"] = limite_variancia
        extras["variancia_dentro_do_limite"] = variancia <= limite_variancia * (1 + 1e-12)
        if not extras["variancia_dentro_do_limite"]:
            logger.error(f"Var {variancia:.6g} acima de E/(1-t_1) = {limite_variancia:.6g}")

    automatico = n_max is None
    if automatico:
        n_max = _horizonte_inicial(media, variancia)
    while True:
        pmf = _convolucao_geometrica(t, n_max + 1)
        sobrevivencia = 1.0 - np.cumsum(pmf)
        if not automatico or sobrevivencia[-1] <= ABSORCAO_CONFIG["cauda_alvo"] \
                or n_max >= ABSORCAO_CONFIG["n_max_limite"]:
            break
        n_max = min(2 * n_max, int(ABSORCAO_CONFIG["n_max_limite"]))

    extras["cauda"] = "pmf"
    if t.size >= 1:
        lacuna = float(np.min(np.abs(np.diff(t)))) if t.size > 1 else np.inf
        try:
            if lacuna < TOLERANCIAS["lacuna_autovalores"]:
                raise RepeatedEigenvalue(f"Lacuna mínima {lacuna:.3e}")
            diferencas = t[:, None] - t[None, :]
            np.fill_diagonal(diferencas, 1.0)
            fatores = (1.0 - t)[None, :] / diferencas
            np.fill_diagonal(fatores, 1.0)
            coeficientes = np.prod(fatores, axis=1)
            if np.sum(np.abs(coeficientes)) > 1e6:
                raise RepeatedEigenvalue("Coeficientes de frações parciais mal condicionados")
            n = np.arange(max(t.size - 1, 0), n_max + 1)
            cauda_formula = (coeficientes[None, :] * np.power(t[None, :], n[:, None])).sum(axis=1)
            extras["residuo_fracoes_parciais"] = norma_max(cauda_formula - sobrevivencia[n])
            sobrevivencia[n] = cauda_formula
            extras["cauda"] = "fracoes_parciais"
        except RepeatedEigenvalue as e:
            logger.warning(f"Cauda espectral pela pmf: {e}")

    negativos = t[t < 0]
    if negativos.size:
        beta = -negativos / (1.0 - negativos)
        lei_bernoulli = np.ones(1)
        for b in beta:
            lei_bernoulli = np.convolve(lei_bernoulli, [1.0 - b, b])
        esquerda = np.convolve(pmf, lei_bernoulli)[:n_max + 1]
        geometricas = _convolucao_geometrica(t[t >= 0], n_max + 1)
        direita = np.zeros(n_max + 1)
        m = negativos.size
        direita[m:] = geometricas[:n_max + 1 - m]
        extras["residuo_decomposicao"] = norma_max(esquerda - direita)
        extras["autovalores_negativos"] = int(m)

    return AbsorptionStats(
        pmf=pmf, survival=sobrevivencia, mean=media, variance=variancia,
        source="spectral", truncation=float(max(sobrevivencia[-1], 0.0)), extras=extras,
    )


def _refletir(params: BDParams) -> BDParams:
    return BDParams(p=params.q[::-1], q=params.p[::-1], r=params.r[::-1], absorvente=True)


def absorption_recurrence(params: BDParams, target: int = None, start: int = 0,
                          n_max: Optional[int] = None) -> AbsorptionStats:
    """Lei de T̃ como soma dos tempos de passagem S_y de y para y+1.

    E(S_y) = (1 + q_y E(S_{y-1}))/p_y e E(S_y²) vem da recorrência dos
    segundos momentos; a pmf de S_y tem função geradora racional
    G_y = p_y s B_{y-1} / (B_{y-1} - r_y s B_{y-1} - q_y s A_{y-1}).
    Alvo 0 é tratado refletindo x -> N - x.

    Args:
        params: Cadeia de nascimento e morte com p_y > 0 para y < alvo
        target: N (padrão) ou 0
        start: Estado inicial
        n_max: Horizonte da pmf (automático se omitido)

    Returns:
        AbsorptionStats: pmf, momentos e, em extras, médias, variâncias e A_y por passo
    """
    N = params.N
    target = N if target is None else target
    if target == 0 and N > 0:
        return absorption_recurrence(_refletir(params), target=N, start=N - start, n_max=n_max)
    if target != N:
        raise ErroValidacao(f"Alvo {target} precisa ser 0 ou N")

    passos = range(start, N)
    zeros = [y for y in passos if params.p[y] <= 0]
    if zeros:
        raise ZeroUpProbability(f"p̃_{zeros[0]} = 0")

    medias = np.zeros(N)
    segundos = np.zeros(N)
    numeradores: List[np.ndarray] = []
    denominadores: List[np.ndarray] = []
    media_anterior = 0.0
    segundo_anterior = 0.0
    numerador = np.zeros(1)
    denominador = np.ones(1)
    for y in range(N):
        p, q, r = params.p[y], params.q[y], params.r[y]
        if p <= 0:
            if y >= start:
                raise ZeroUpProbability(f"p̃_{y} = 0")
            medias[y] = segundos[y] = np.inf
            numerador, denominador = np.zeros(1), np.ones(1)
            media_anterior = segundo_anterior = 0.0
            numeradores.append(numerador)
            denominadores.append(denominador)
            continue
        media = (1.0 + q * media_anterior) / p
        segundo = (2.0 * media - 1.0 + q * (segundo_anterior + 2.0 * media_anterior * media)) / p
        medias[y], segundos[y] = media, segundo

        s_den = np.concatenate(([0.0], denominador))
        s_num = np.concatenate(([0.0], numerador))
        novo_num = p * s_den
        novo_den = np.zeros(max(denominador.size, s_den.size, s_num.size))
        novo_den[:denominador.size] += denominador
        novo_den[:s_den.size] -= r * s_den
        novo_den[:s_num.size] -= q * s_num
        numerador, denominador = novo_num, novo_den
        numeradores.append(numerador)
        denominadores.append(denominador)
        media_anterior, segundo_anterior = media, segundo

    variancias = segundos - medias ** 2
    coef_A = np.zeros(N)
    for y in range(N):
        anterior = variancias[y - 1] if y > 0 else 0.0
        coef_A[y] = variancias[y] - (params.q[y] / params.p[y]) * anterior if params.p[y] > 0 else np.nan

    media_total = float(medias[start:].sum())
    variancia_total = float(variancias[start:].sum())

    automatico = n_max is None
    if automatico:
        n_max = _horizonte_inicial(media_total, variancia_total)
    while True:
        pmf = np.zeros(n_max + 1)
        pmf[0] = 1.0
        for y in passos:
            pmf = signal.lfilter(numeradores[y], denominadores[y], pmf)
        sobrevivencia = 1.0 - np.cumsum(pmf)
        if not automatico or sobrevivencia[-1] <= ABSORCAO_CONFIG["cauda_alvo"] \
                or n_max >= ABSORCAO_CONFIG["n_max_limite"]:
            break
        n_max = min(2 * n_max, int(ABSORCAO_CONFIG["n_max_limite"]))

    extras = {
        "medias_passo": medias[start:].tolist(),
        "variancias_passo": variancias[start:].tolist(),
        "coeficientes_A": coef_A[start:].tolist(),
    }
    return AbsorptionStats(
        pmf=pmf, survival=sobrevivencia, mean=media_total, variance=variancia_total,
        source="recurrence", truncation=float(max(sobrevivencia[-1], 0.0)), extras=extras,
    )


def moran_mutation_family(a1: float, a2: float) -> Callable[[int], Spectrum]:
    """Gerador de espectros da família de Moran com mutação."""
    def gerador(N: int) -> Spectrum:
        return moran_mutation_spectrum(N, a1, a2)
    return gerador


def cutoff_report(family: Callable[[int], Spectrum], N_list: Iterable[int],
                  a: Optional[float] = None) -> Dict[str, Any]:
    """Tabela de E, Var, Var/E² e (1-t_1)E ao longo de uma família.

    Args:
        family: N -> Spectrum
        N_list: Tamanhos da varredura
        a: Taxa total de mutação (para a assíntota N(log N + log a)/a)

    Returns:
        dict: linhas da tabela e o flag de cutoff
    """
    linhas = []
    for N in tqdm(list(N_list), desc="cutoff", disable=not SIMULACAO_CONFIG["barra_progresso"]):
        espectro = family(N)
        media, variancia = spectral_moments(espectro)
        linha = {
            "N": int(N),
            "mean": media,
            "variance": variancia,
            "var_over_mean2": variancia / media ** 2 if media > 0 else 0.0,
            "gap_times_mean": espectro.gap * media,
        }
        if a is not None and a > 0:
            assintota = N * (math.log(N) + math.log(a)) / a
            linha["assintota"] = assintota
            linha["razao_assintota"] = media / assintota if assintota > 0 else None
        linhas.append(linha)

    produtos = [linha["gap_times_mean"] for linha in linhas]
    cresce = len(produtos) > 1 and all(b > a_ * (1 + 1e-9) for a_, b in zip(produtos, produtos[1:]))
    logger.info(f"Relatório de cutoff: {len(linhas)} tamanhos, cutoff={cresce}")
    return {"linhas": linhas, "cutoff": cresce}
