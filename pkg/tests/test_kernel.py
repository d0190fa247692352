import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.erros import (
    NegativeEntry,
    NonFiniteEntry,
    NonSquare,
    NotIrreducible,
    NotStochastic,
    RowSumExceedsOne,
)
from core.kernel import (
    KernelKind,
    check_harmonic,
    classify,
    cumulative,
    evolve,
    hitting_probabilities,
    reachable_from,
    reversal,
    stationary,
    stationary_power,
    validate_kernel,
)
from tests.geradores import nucleo_estocastico


def test_validate_kernel_classifica_somas():
    assert validate_kernel([[0.5, 0.5], [0.0, 1.0]]).kind == KernelKind.STOCHASTIC
    assert validate_kernel([[0.5, 0.2], [0.0, 1.0]]).kind == KernelKind.SUBSTOCHASTIC
    assert validate_kernel([[0.9, 0.2], [0.0, 1.0]]).kind == KernelKind.GENERAL


def test_validate_kernel_trunca_ruido_negativo():
    kernel = validate_kernel([[1.0 + 1e-13, -1e-13], [0.0, 1.0]])
    assert kernel.entries.min() == 0.0
    assert not kernel.entries.flags.writeable


@pytest.mark.parametrize("matriz, erro, demanda", [
    ([[0.5, 0.5]], NonSquare, None),
    ([[0.5, np.nan], [0.0, 1.0]], NonFiniteEntry, None),
    ([[1.1, -0.1], [0.0, 1.0]], NegativeEntry, None),
    ([[0.9, 0.2], [0.0, 1.0]], RowSumExceedsOne, "substochastic"),
    ([[0.5, 0.2], [0.0, 1.0]], NotStochastic, "stochastic"),
])
def test_validate_kernel_erros(matriz, erro, demanda):
    with pytest.raises(erro):
        validate_kernel(matriz, demand=demanda)


def test_stationary_cadeia_a(cadeia_a):
    np.testing.assert_allclose(stationary(cadeia_a), [0.4, 0.6], atol=1e-14)


def test_stationary_exige_irredutivel():
    with pytest.raises(NotIrreducible):
        stationary([[1.0, 0.0], [0.5, 0.5]])


def test_stationary_power_cesaro_em_cadeia_periodica():
    pi = stationary_power([[0.0, 1.0], [1.0, 0.0]], iterations=10_000, cesaro=True)
    np.testing.assert_allclose(pi, [0.5, 0.5], atol=1e-4)


def test_stationary_power_concorda_com_lu(cadeia_a):
    np.testing.assert_allclose(stationary_power(cadeia_a), stationary(cadeia_a), atol=1e-10)


def test_cumulative():
    np.testing.assert_allclose(cumulative([0.2, 0.3, 0.5]), [0.2, 0.5, 1.0])


def test_reversal_de_cadeia_de_dois_estados_e_ela_mesma(cadeia_a):
    np.testing.assert_allclose(reversal(cadeia_a).entries, cadeia_a.entries, atol=1e-15)


def test_reversal_de_ciclo_inverte_o_sentido():
    ciclo = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    np.testing.assert_allclose(reversal(ciclo).entries, ciclo.T)


def test_classify_ordem_topologica_e_absorventes():
    matriz = [[1.0, 0.0, 0.0], [0.5, 0.0, 0.5], [0.0, 0.0, 1.0]]
    decomposicao = classify(matriz)
    assert decomposicao.classes[0] == (1,)
    assert set(decomposicao.absorbing_states) == {0, 2}
    assert set(decomposicao.stochastic_classes) == {(0,), (2,)}
    assert not decomposicao.irreducible
    assert decomposicao.class_of(1) == 0


def test_classify_classe_nao_estocastica():
    decomposicao = classify([[0.5, 0.2], [0.3, 0.7]])
    assert decomposicao.irreducible
    assert decomposicao.stochastic_classes == ()


def test_reachable_from():
    matriz = [[0.5, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.5, 0.5]]
    np.testing.assert_array_equal(reachable_from(matriz, [0]), [0, 1])
    np.testing.assert_array_equal(reachable_from(matriz, [1], reverse=True), [0, 1, 2])


def test_evolve_historico(cadeia_a):
    historico = evolve([1.0, 0.0], cadeia_a, 3, history=True)
    assert historico.shape == (4, 2)
    np.testing.assert_allclose(historico[1], [0.7, 0.3])
    np.testing.assert_allclose(historico[-1], evolve([1.0, 0.0], cadeia_a, 3))


def test_hitting_probabilities_ruina_do_jogador():
    ruina = [[1.0, 0.0, 0.0], [0.5, 0.0, 0.5], [0.0, 0.0, 1.0]]
    np.testing.assert_allclose(hitting_probabilities(ruina, [0]), [1.0, 0.5, 0.0])


def test_hitting_probabilities_com_vazamento():
    vazante = [[1.0, 0.0], [0.3, 0.2]]
    np.testing.assert_allclose(hitting_probabilities(vazante, [0]), [1.0, 0.375])


def test_check_harmonic_constante(cadeia_a):
    assert check_harmonic(cadeia_a, np.ones(2)) <= 1e-15


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
def test_stationary_residuo_em_nucleos_aleatorios(n, semente):
    matriz = nucleo_estocastico(np.random.default_rng(semente), n)
    pi = stationary(matriz)
    assert pi.min() > 0
    assert abs(pi.sum() - 1.0) <= 1e-12
    np.testing.assert_allclose(pi @ matriz, pi, atol=1e-10)
