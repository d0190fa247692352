import numpy as np
import pytest

from core.config import ABSORCAO_CONFIG
from core.erros import ErroValidacao, NotAbsorbing, NotAdmissible, TruncationTooCoarse, ZeroPiEntry, ZeroUpProbability
from dualidade.chains import BDParams, bd_kernel, bd_params_from_kernel, moran_kernel, mutation_bias
from dualidade.duals import hypergeometric_moran_dual, siegmund_dual
from dualidade.intertwine import intertwining_pipeline
from dualidade.spectral import Spectrum, bd_spectrum, moran_mutation_spectrum, reflected_walk_spectrum
from dualidade.ssd import (
    absorption_exact,
    absorption_recurrence,
    absorption_spectral,
    admissible_initials,
    cutoff_report,
    moran_mutation_family,
    separation,
    sharpness_conditions,
    spectral_moments,
    total_variation,
    verify_sharpness,
)
from tests.geradores import bd_monotona


def _pipeline(P):
    dual = siegmund_dual(P)
    return intertwining_pipeline(P, dual.H, dual.P_hat)


def _delta(n, x):
    v = np.zeros(n)
    v[x] = 1.0
    return v


def test_separation_e_variacao_total():
    assert separation([0.5, 0.5], [0.4, 0.6]) == pytest.approx(1 / 6)
    assert total_variation([0.5, 0.5], [0.4, 0.6]) == pytest.approx(0.1)
    assert separation([1.0, 0.0], [0.4, 0.6]) == pytest.approx(1.0)
    with pytest.raises(ZeroPiEntry):
        separation([0.5, 0.5], [1.0, 0.0])


def test_nitidez_cadeia_a(cadeia_a):
    resultado = _pipeline(cadeia_a)
    inicio = admissible_initials(resultado.Lambda, [1.0, 0.0])
    np.testing.assert_allclose(inicio.pi_tilde_0, [1.0, 0.0], atol=1e-14)
    relatorio = verify_sharpness(resultado.P_rev, resultado.P_tilde, resultado.Lambda,
                                 [1.0, 0.0], inicio.pi_tilde_0, n_max=30, H=resultado.H)
    np.testing.assert_allclose(relatorio.separation, 0.5 ** np.arange(31), atol=1e-12)
    np.testing.assert_allclose(relatorio.survival, 0.5 ** np.arange(31), atol=1e-12)
    assert relatorio.witness.d == 1
    assert relatorio.witness.partial == 1
    assert relatorio.witness.condicao_par
    assert relatorio.sharp
    assert relatorio.to_dict()["witness"]["d"] == 1


def test_nitidez_em_cadeias_bd_monotonas(rng):
    for _ in range(20):
        params = bd_monotona(rng, int(rng.integers(1, 31)))
        resultado = _pipeline(bd_kernel(params))
        pi0 = _delta(params.N + 1, 0)
        inicio = admissible_initials(resultado.Lambda, pi0)
        relatorio = verify_sharpness(resultado.P_rev, resultado.P_tilde, resultado.Lambda,
                                     pi0, inicio.pi_tilde_0, n_max=200, pi=resultado.pi)
        assert relatorio.bound_holds
        assert relatorio.witness is not None and relatorio.witness.d == params.N
        assert relatorio.max_gap <= 1e-9


def test_desigualdade_sem_testemunha(cadeia_b):
    resultado = _pipeline(bd_kernel(cadeia_b))
    pi0 = np.full(3, 1 / 3)
    inicio = admissible_initials(resultado.Lambda, pi0, pi=resultado.pi, siegmund=True)
    np.testing.assert_allclose(inicio.pi_tilde_0, [1 / 6, 1 / 6, 2 / 3], atol=1e-12)
    assert inicio.extras["razao_nao_crescente"]
    assert inicio.extras["residuo_forma_fechada"] <= 1e-12
    relatorio = verify_sharpness(resultado.P_rev, resultado.P_tilde, resultado.Lambda,
                                 pi0, inicio.pi_tilde_0, n_max=50)
    assert relatorio.bound_holds
    assert np.all(relatorio.separation >= relatorio.total_variation - 1e-12)


def test_inicial_nao_admissivel(cadeia_b):
    resultado = _pipeline(bd_kernel(cadeia_b))
    with pytest.raises(NotAdmissible):
        admissible_initials(resultado.Lambda, [0.0, 0.0, 1.0])


def test_sharpness_conditions_sem_testemunha():
    Lambda = np.array([[0.5, 0.5], [0.5, 0.5]])
    assert sharpness_conditions(None, Lambda, [0.5, 0.5], 1) is None


def test_tres_caminhos_cadeia_b(cadeia_b):
    resultado = _pipeline(bd_kernel(cadeia_b))
    exata = absorption_exact(resultado.P_tilde, [1.0, 0.0, 0.0], partial=2)
    espectral = absorption_spectral(bd_spectrum(cadeia_b))
    recorrencia = absorption_recurrence(bd_params_from_kernel(resultado.P_tilde))

    for estatistica in (exata, espectral, recorrencia):
        assert estatistica.mean == pytest.approx(20 / 3, abs=1e-9)
        assert estatistica.variance == pytest.approx(190 / 9, abs=1e-8)

    comum = min(exata.pmf.size, espectral.pmf.size, recorrencia.pmf.size)
    np.testing.assert_allclose(espectral.pmf[:comum], exata.pmf[:comum], atol=1e-12)
    np.testing.assert_allclose(recorrencia.pmf[:comum], exata.pmf[:comum], atol=1e-12)
    np.testing.assert_allclose(recorrencia.extras["medias_passo"], [10 / 3, 10 / 3])
    np.testing.assert_allclose(recorrencia.extras["variancias_passo"], [70 / 9, 40 / 3])
    assert espectral.extras["cauda"] == "fracoes_parciais"
    assert espectral.extras["residuo_fracoes_parciais"] <= 1e-12
    assert espectral.extras["variancia_dentro_do_limite"]


def test_horizonte_fixo_extrapola_cauda():
    P_tilde = np.array([[0.5, 0.5], [0.0, 1.0]])
    estatistica = absorption_exact(P_tilde, [1.0, 0.0], partial=1, n_max=5)
    assert estatistica.truncation == pytest.approx(1 / 32)
    assert estatistica.mean == pytest.approx(2.0, abs=1e-12)
    assert estatistica.variance == pytest.approx(2.0, abs=1e-12)


def test_truncamento_automatico_insuficiente(monkeypatch):
    monkeypatch.setitem(ABSORCAO_CONFIG, "n_max_limite", 10)
    with pytest.raises(TruncationTooCoarse):
        absorption_exact(np.array([[0.5, 0.5], [0.0, 1.0]]), [1.0, 0.0], partial=1)


def test_absorcao_exige_estado_absorvente(cadeia_a):
    with pytest.raises(NotAbsorbing):
        absorption_exact(cadeia_a, [1.0, 0.0], partial=0)
    dois_absorventes = np.array([[1.0, 0.0, 0.0], [0.5, 0.0, 0.5], [0.0, 0.0, 1.0]])
    with pytest.raises(NotAbsorbing):
        verify_sharpness(dois_absorventes, dois_absorventes, np.eye(3), [0.0, 1.0, 0.0],
                         [0.0, 1.0, 0.0], pi=[0.2, 0.6, 0.2])


def test_passeio_refletido_decomposicao_com_autovalor_negativo():
    espectral = absorption_spectral(reflected_walk_spectrum(2, 0.5))
    assert espectral.mean == pytest.approx(1 / 0.5 + 1 / 1.5)
    assert espectral.variance == pytest.approx(2.0 - 0.5 / 2.25)
    assert espectral.extras["autovalores_negativos"] == 1
    assert espectral.extras["residuo_decomposicao"] <= 1e-12
    assert espectral.pmf.min() >= -1e-15


def test_spectral_moments_moran_a1():
    N = 10
    media, _ = spectral_moments(moran_mutation_spectrum(N, 0.5, 0.5))
    assert media == pytest.approx(N * sum(1 / k for k in range(1, N + 1)))


def test_moran_dual_hipergeometrico_identidade_em_lei():
    N, a1, a2 = 5, 0.3, 0.2
    P = bd_kernel(moran_kernel(N, mutation_bias(a1, a2, N)))
    dual = hypergeometric_moran_dual(N, a1, a2)
    resultado = intertwining_pipeline(P, dual.H, dual.P_hat)
    assert resultado.absorbing_states == (0,)

    pi0 = _delta(N + 1, 0)
    inicio = admissible_initials(resultado.Lambda, pi0)
    np.testing.assert_allclose(inicio.pi_tilde_0, _delta(N + 1, N), atol=1e-12)

    exata = absorption_exact(resultado.P_tilde, inicio.pi_tilde_0, partial=0)
    espectral = absorption_spectral(moran_mutation_spectrum(N, a1, a2))
    recorrencia = absorption_recurrence(bd_params_from_kernel(resultado.P_tilde), target=0, start=N)
    comum = min(exata.pmf.size, espectral.pmf.size, recorrencia.pmf.size)
    np.testing.assert_allclose(exata.pmf[:comum], espectral.pmf[:comum], atol=1e-12)
    np.testing.assert_allclose(recorrencia.pmf[:comum], espectral.pmf[:comum], atol=1e-12)
    assert exata.mean == pytest.approx(espectral.mean, rel=1e-9)

    relatorio = verify_sharpness(resultado.P_rev, resultado.P_tilde, resultado.Lambda,
                                 pi0, inicio.pi_tilde_0, n_max=100, H=resultado.H)
    assert relatorio.witness.d == N
    assert relatorio.witness.partial == 0
    assert relatorio.witness.condicao_H
    assert relatorio.sharp


def test_recorrencia_exige_subida_positiva():
    params = BDParams(p=np.array([0.5, 0.0, 0.0]), q=np.array([0.0, 0.5, 0.0]),
                      r=np.array([0.5, 0.5, 1.0]), absorvente=True)
    with pytest.raises(ZeroUpProbability):
        absorption_recurrence(params)


def test_cutoff_moran_a1():
    relatorio = cutoff_report(moran_mutation_family(0.5, 0.5), [10, 100, 1000], a=1.0)
    assert relatorio["cutoff"]
    for linha in relatorio["linhas"]:
        N = linha["N"]
        assert linha["mean"] == pytest.approx(N * sum(1 / k for k in range(1, N + 1)), rel=1e-12)
        assert linha["gap_times_mean"] == pytest.approx(linha["mean"] / N)
    assert relatorio["linhas"][-1]["var_over_mean2"] < 0.05


def test_spectrum_fora_do_intervalo():
    with pytest.raises(ErroValidacao):
        spectral_moments(Spectrum(eigenvalues=[1.0, 1.0]))
