import numpy as np
import pytest

from core.erros import (
    DimensionMismatch,
    InvalidBoundary,
    InvalidProbVector,
    NotDoublyAbsorbing,
    NotIrreducible,
    RowSumError,
)
from core.kernel import stationary
from dualidade.chains import (
    BDParams,
    BiasFunction,
    absorption_profile,
    bd_kernel,
    bd_params_from_kernel,
    bd_stationary,
    bernoulli_laplace_bias,
    complement_bias,
    left_absorption_identity,
    moran_complement,
    moran_half_holding_check,
    moran_kernel,
    mutation_bias,
    reflected_walk,
    wright_fisher_kernel,
)
from dualidade.duals import is_monotone
from tests.geradores import bd_monotona


def test_bd_kernel_cadeia_b(cadeia_b):
    esperado = [[0.8, 0.2, 0.0], [0.1, 0.6, 0.3], [0.0, 0.2, 0.8]]
    np.testing.assert_allclose(bd_kernel(cadeia_b).entries, esperado, atol=1e-15)


def test_bd_stationary_cadeia_b(cadeia_b):
    np.testing.assert_allclose(bd_stationary(cadeia_b), [1 / 6, 1 / 3, 1 / 2], atol=1e-14)


def test_bd_stationary_concorda_com_lu(rng):
    for _ in range(20):
        params = bd_monotona(rng, int(rng.integers(1, 30)))
        np.testing.assert_allclose(bd_stationary(params), stationary(bd_kernel(params)), atol=1e-12)


@pytest.mark.parametrize("p, q, erro", [
    ([0.2, 0.3], [0.0, 0.1, 0.2], DimensionMismatch),
    ([0.2, 0.3, 0.1], [0.0, 0.1, 0.2], InvalidBoundary),
    ([0.2, 0.3, 0.0], [0.1, 0.1, 0.2], InvalidBoundary),
    ([0.2, 1.3, 0.0], [0.0, 0.1, 0.2], InvalidProbVector),
    ([0.2, 0.0, 0.0], [0.0, 0.1, 0.2], NotIrreducible),
])
def test_bd_params_validacao(p, q, erro):
    with pytest.raises(erro):
        BDParams.from_rates(p, q)


def test_bd_params_soma_de_linha():
    with pytest.raises(RowSumError):
        BDParams(p=np.array([0.2, 0.0]), q=np.array([0.0, 0.1]), r=np.array([0.7, 0.9]))


def test_mutation_bias_e_moran_mutacao():
    vies = mutation_bias(0.3, 0.2, 2)
    np.testing.assert_allclose(vies.values, [0.3, 0.55, 0.8])
    params = moran_kernel(2, vies)
    np.testing.assert_allclose(params.p, [0.3, 0.275, 0.0])
    np.testing.assert_allclose(params.q, [0.0, 0.225, 0.2])
    assert params.irreducible


def test_moran_com_vies_nulo_no_interior_vira_absorvente():
    params = moran_kernel(4, BiasFunction(values=np.array([0.0, 0.0, 0.5, 1.0, 1.0])))
    assert params.absorvente
    assert params.r[0] == 1.0 and params.r[-1] == 1.0


def test_moran_monotono_para_vies_nao_decrescente(rng):
    for _ in range(200):
        N = int(rng.integers(1, 101))
        vies = BiasFunction(values=np.sort(rng.uniform(size=N + 1)))
        assert is_monotone(bd_kernel(moran_kernel(N, vies)))


def test_complemento_reflete_a_cadeia():
    vies = mutation_bias(0.3, 0.2, 4)
    original = bd_kernel(moran_kernel(4, vies)).entries
    complementar = bd_kernel(moran_complement(4, vies)).entries
    np.testing.assert_allclose(complementar, original[::-1, ::-1], atol=1e-15)
    np.testing.assert_allclose(complement_bias(complement_bias(vies)).values, vies.values)


def test_bernoulli_laplace_bias():
    np.testing.assert_allclose(bernoulli_laplace_bias(4).values, [1.0, 0.75, 0.5, 0.25, 0.0])


def test_reflected_walk():
    params = reflected_walk(2, 0.5)
    esperado = [[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]]
    np.testing.assert_allclose(bd_kernel(params).entries, esperado)
    with pytest.raises(InvalidProbVector):
        reflected_walk(2, 1.0)


def test_wright_fisher_linhas_binomiais():
    kernel = wright_fisher_kernel(2, mutation_bias(0.3, 0.2, 2))
    np.testing.assert_allclose(kernel.entries[0], [0.49, 0.42, 0.09])
    np.testing.assert_allclose(kernel.entries.sum(axis=1), 1.0)
    assert is_monotone(kernel)


def test_bd_params_from_kernel_ida_e_volta(cadeia_b):
    lido = bd_params_from_kernel(bd_kernel(cadeia_b))
    np.testing.assert_allclose(lido.p, cadeia_b.p)
    np.testing.assert_allclose(lido.q, cadeia_b.q)
    np.testing.assert_allclose(lido.r, cadeia_b.r)


def test_absorption_profile_ruina_do_jogador():
    params = BDParams(p=np.array([0.0, 0.5, 0.0]), q=np.array([0.0, 0.5, 0.0]),
                      r=np.array([1.0, 0.0, 1.0]), absorvente=True)
    perfil = absorption_profile(params)
    assert perfil.phi[1] == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(perfil.phi, [1.0, 0.5, 0.0], atol=1e-14)


def test_absorption_profile_duas_expressoes_concordam(rng):
    for _ in range(100):
        N = int(rng.integers(2, 30))
        p = rng.uniform(0.05, 0.5, N + 1)
        q = rng.uniform(0.05, 0.5, N + 1)
        p[0] = p[N] = q[0] = q[N] = 0.0
        params = BDParams.from_rates(p, q, absorvente=True)
        assert absorption_profile(params).residual <= 1e-10


def test_absorption_profile_exige_extremos_absorventes(cadeia_b):
    with pytest.raises(NotDoublyAbsorbing):
        absorption_profile(cadeia_b)


def test_left_absorption_identity(rng):
    for _ in range(10):
        N = int(rng.integers(2, 15))
        p = rng.uniform(0.05, 0.5, N + 1)
        q = rng.uniform(0.05, 0.5, N + 1)
        p[0] = p[N] = q[0] = 0.0
        params = BDParams.from_rates(p, q)
        assert left_absorption_identity(params, n_max=50) <= 1e-10


def test_left_absorption_identity_exige_p0_nulo(cadeia_b):
    with pytest.raises(InvalidBoundary):
        left_absorption_identity(cadeia_b)


def test_moran_half_holding_check():
    relatorio = moran_half_holding_check(4, mutation_bias(0.5, 0.5, 4))
    assert relatorio["aplicavel"]
    assert relatorio["ok"]
    assert relatorio["min_r"] >= 0.5
    assert relatorio["residuo_identidade"] <= 1e-15
