import numpy as np
import pytest

from core.erros import NotIrreducible, ZeroBirthProbability
from dualidade.chains import (
    BDParams,
    bd_kernel,
    bernoulli_laplace_bias,
    moran_kernel,
    mutation_bias,
    reflected_walk,
)
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
from tests.geradores import bd_monotona, bd_qualquer


def test_passeio_refletido(passeio):
    np.testing.assert_allclose(bd_spectrum(passeio).eigenvalues, [1.0, 0.5, -0.5], atol=1e-14)
    np.testing.assert_allclose(reflected_walk_spectrum(2, 0.5).eigenvalues, [1.0, 0.5, -0.5], atol=1e-15)


@pytest.mark.parametrize("N, p", [(1, 0.3), (2, 0.3), (7, 0.6), (20, 0.45)])
def test_passeio_refletido_forma_fechada(N, p):
    np.testing.assert_allclose(
        bd_spectrum(reflected_walk(N, p)).eigenvalues,
        reflected_walk_spectrum(N, p).eigenvalues,
        atol=1e-12,
    )


def test_espectro_cadeia_b(cadeia_b):
    espectro = bd_spectrum(cadeia_b)
    assert espectro.eigenvalues[0] == pytest.approx(1.0, abs=1e-14)
    assert espectro.eigenvalues[1:].sum() == pytest.approx(1.2, abs=1e-14)
    assert np.prod(espectro.eigenvalues[1:]) == pytest.approx(0.32, abs=1e-14)
    assert espectro.simple


def test_pesos_espectrais_cadeia_b(cadeia_b):
    espectro = spectral_weights(cadeia_b)
    assert espectro.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert espectro.weights[0] == pytest.approx(1 / 6, abs=1e-12)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_bernoulli_laplace(N):
    fechado = bernoulli_laplace_weights(N)
    numerico = spectral_weights(moran_kernel(N, bernoulli_laplace_bias(N)))
    np.testing.assert_allclose(numerico.eigenvalues, fechado.eigenvalues, atol=1e-12)
    np.testing.assert_allclose(numerico.weights, fechado.weights, atol=1e-12)


def test_bernoulli_laplace_n2():
    espectro = bernoulli_laplace_weights(2)
    np.testing.assert_allclose(espectro.eigenvalues, [1.0, 0.0, -0.5])
    np.testing.assert_allclose(espectro.weights, [1 / 6, 1 / 2, 1 / 3])


@pytest.mark.parametrize("N", [5, 20, 50])
def test_moran_forma_fechada_concorda_com_autovalores(N, rng):
    a1, a2 = rng.uniform(0.05, 0.95, 2)
    fechado = moran_mutation_spectrum(N, a1, a2)
    numerico = bd_spectrum(moran_kernel(N, mutation_bias(a1, a2, N)))
    np.testing.assert_allclose(numerico.eigenvalues, fechado.eigenvalues, atol=1e-10)
    assert fechado.gap == pytest.approx((a1 + a2) / N)


def test_raizes_ortogonais_cadeia_b(cadeia_b):
    raizes = isolate_roots(cadeia_b)
    np.testing.assert_allclose(raizes, bd_spectrum(cadeia_b).eigenvalues, atol=1e-10)


def test_raizes_ortogonais_em_cadeias_aleatorias(rng):
    for _ in range(20):
        params = bd_monotona(rng, int(rng.integers(1, 9)), minimo=0.1)
        np.testing.assert_allclose(isolate_roots(params), bd_spectrum(params).eigenvalues, atol=1e-9)


def test_polinomios_sao_autovetores(cadeia_b):
    espectro = bd_spectrum(cadeia_b)
    polinomios, resto = orthopoly_oracle(cadeia_b, espectro.eigenvalues)
    np.testing.assert_allclose(resto, 0.0, atol=1e-12)
    P = bd_kernel(cadeia_b).entries
    np.testing.assert_allclose(P @ polinomios, polinomios * espectro.eigenvalues[None, :], atol=1e-12)
    np.testing.assert_allclose(polinomios[:, 0], 1.0, atol=1e-12)


def test_polinomios_exigem_nascimentos_positivos():
    absorvente = BDParams(p=np.array([0.0, 0.5, 0.0]), q=np.array([0.0, 0.5, 0.0]),
                          r=np.array([1.0, 0.0, 1.0]), absorvente=True)
    with pytest.raises(ZeroBirthProbability):
        orthopoly_oracle(absorvente, 0.5)
    with pytest.raises(NotIrreducible):
        bd_spectrum(absorvente)


def test_implicacoes_de_monotonicidade(rng):
    for _ in range(200):
        relatorio = monotonicity_spectrum_checks(bd_qualquer(rng, int(rng.integers(1, 20))))
        assert relatorio["ok"], relatorio["implicacoes"]


def test_passeio_e_monotono_com_espectro_negativo(passeio):
    relatorio = monotonicity_spectrum_checks(passeio)
    assert relatorio["monotone"]
    assert relatorio["menor_autovalor"] == pytest.approx(-0.5)
    assert relatorio["reciproca_falha"]


def test_moran_meia_permanencia_tem_espectro_positivo():
    relatorio = monotonicity_spectrum_checks(moran_kernel(9, mutation_bias(0.1, 0.1, 9)))
    assert relatorio["min_r"] > 0.5
    assert relatorio["menor_autovalor"] > 0
    assert relatorio["ok"]


def test_spectrum_ordena_e_calcula_lacuna():
    espectro = Spectrum(eigenvalues=[0.2, 1.0, -0.3])
    np.testing.assert_allclose(espectro.eigenvalues, [1.0, 0.2, -0.3])
    assert espectro.gap == pytest.approx(0.8)
    assert not Spectrum(eigenvalues=[1.0, 0.5, 0.5]).simple
