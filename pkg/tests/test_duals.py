import numpy as np
import pytest

from core.erros import (
    InvalidUltrametricParams,
    NotAdmissible,
    NotMonotone,
    PotentialHasStochasticClass,
    PreconditionViolated,
    SingularH,
    TrivialDualFunction,
)
from core.kernel import cumulative, stationary
from dualidade.chains import BDParams, bd_kernel, moran_kernel, mutation_bias, wright_fisher_kernel
from dualidade.duals import (
    DualFamily,
    DualFunction,
    dual_function,
    dual_via_solve,
    hypergeometric_matrix,
    hypergeometric_moran_dual,
    is_monotone,
    potential_constant_kernel_check,
    siegmund_dual,
    siegmund_dual_bd,
    ultrametric_dual,
    ultrametric_rigidity_check,
    verify_duality,
    violacoes_monotonia,
)
from tests.geradores import bd_monotona, nucleo_monotono

NAO_MONOTONA = np.array([[0.2, 0.8], [0.9, 0.1]])

# Cadeia de quatro estados com massa de bloco constante 0.6 em C = {0, 1}
BLOCO = np.array([
    [0.4, 0.2, 0.3, 0.1],
    [0.3, 0.3, 0.2, 0.2],
    [0.2, 0.4, 0.2, 0.2],
    [0.1, 0.5, 0.1, 0.3],
])


def test_siegmund_cadeia_a(cadeia_a):
    relatorio = siegmund_dual(cadeia_a)
    np.testing.assert_allclose(relatorio.P_hat, [[0.5, 0.2], [0.0, 1.0]], atol=1e-15)
    assert relatorio.feasible
    assert relatorio.notas["vazamento_zero"] == pytest.approx(0.3)
    assert relatorio.mass_leaks[0] == pytest.approx(0.3)
    assert relatorio.notas["linha_N_absorvente"]
    assert relatorio.residual <= 1e-14


def test_siegmund_cadeia_b(cadeia_b):
    relatorio = siegmund_dual(bd_kernel(cadeia_b))
    esperado = [[0.7, 0.1, 0.0], [0.3, 0.5, 0.2], [0.0, 0.0, 1.0]]
    np.testing.assert_allclose(relatorio.P_hat, esperado, atol=1e-15)
    assert relatorio.notas["residuo_forma_fechada"] <= 1e-15
    np.testing.assert_allclose(siegmund_dual_bd(cadeia_b).entries, esperado, atol=1e-15)


def test_siegmund_cadeia_nao_monotona():
    relatorio = siegmund_dual(NAO_MONOTONA)
    assert not relatorio.feasible
    assert not is_monotone(NAO_MONOTONA)
    assert violacoes_monotonia(NAO_MONOTONA) == [(0, 0)]
    with pytest.raises(NotMonotone):
        relatorio.exigir_viavel()


def test_siegmund_identidades_em_nucleos_aleatorios(rng):
    for _ in range(200):
        n = int(rng.integers(1, 31))
        P = nucleo_monotono(rng, n)
        relatorio = siegmund_dual(P)
        assert relatorio.feasible
        verificacao = verify_duality(P, relatorio.H, relatorio.P_hat, n_max=20)
        assert verificacao["static"] <= 1e-10
        assert verificacao["dynamic"] <= 1e-9
        assert relatorio.mass_leaks[0] == pytest.approx(1.0 - P[0, 0], abs=1e-12)
        if n > 1:
            assert relatorio.notas["residuo_penultima_linha"] <= 1e-12


def test_siegmund_bd_rejeita_nao_monotona():
    params = BDParams.from_rates([0.6, 0.5, 0.0], [0.0, 0.45, 0.5])
    with pytest.raises(NotMonotone):
        siegmund_dual_bd(params)


def test_dual_function_siegmund_inversa():
    Hf = dual_function("siegmund", 3)
    np.testing.assert_allclose(Hf.H @ Hf.inverse, np.eye(4))
    assert Hf.family == DualFamily.SIEGMUND


def test_dual_function_ultrametric_parametros_invalidos():
    with pytest.raises(InvalidUltrametricParams):
        dual_function("ultrametric", 3, k=3, alpha=1.0)
    with pytest.raises(InvalidUltrametricParams):
        dual_function("ultrametric", 3, k=1, alpha=-1.0)


def test_dual_function_ultrametric_inversa_fechada():
    Hf = dual_function("ultrametric", 4, k=1, alpha=0.7, beta=0.3)
    assert Hf.inverse[1, 2] == pytest.approx(-1.0 / (1.7 * 1.3))
    np.testing.assert_allclose(Hf.H @ Hf.inverse, np.eye(5), atol=1e-12)


def test_dual_function_trivial():
    with pytest.raises(TrivialDualFunction):
        DualFunction(H=np.array([[1.0, 0.0], [1.0, 0.0]]))


def test_potential_exige_r_sem_classe_estocastica():
    with pytest.raises(PotentialHasStochasticClass):
        dual_function("potential", R=np.array([[1.0, 0.0], [0.5, 0.2]]))


def test_ultrametric_k0_cadeia_a(cadeia_a):
    estocastico = ultrametric_dual(cadeia_a, 0, 1.5, 0.0)
    np.testing.assert_allclose(estocastico.P_hat, [[0.5, 0.5], [0.0, 1.0]], atol=1e-14)
    vazante = ultrametric_dual(cadeia_a, 0, 1.0, 0.0)
    np.testing.assert_allclose(vazante.P_hat, [[0.5, 0.4], [0.0, 1.0]], atol=1e-14)
    np.testing.assert_allclose(vazante.mass_leaks, [0.1, 0.0], atol=1e-14)
    excessivo = ultrametric_dual(cadeia_a, 0, 3.5, 0.0)
    assert excessivo.feasible and not excessivo.substochastic
    assert excessivo.P_hat[0].sum() == pytest.approx(1.4)
    with pytest.raises(NotAdmissible):
        excessivo.exigir_viavel()


def test_ultrametric_bloco_constante():
    relatorio = ultrametric_dual(BLOCO, 1, 1.0, 0.5)
    esperado = [
        [0.1, 1 / 6, 2 / 15, 2 / 15],
        [0.0, 0.2, 0.0, 0.8],
        [0.075, 0.15, 0.1, 0.5],
        [0.0, 0.2, 0.0, 0.8],
    ]
    np.testing.assert_allclose(relatorio.P_hat, esperado, atol=1e-14)
    assert relatorio.admissible
    assert relatorio.notas["massa_bloco"] == pytest.approx(0.6)
    assert relatorio.notas["massa_critica"] == pytest.approx(0.6)
    assert relatorio.notas["linhas_conservativas"] == [1, 3]
    assert relatorio.notas["residuo_inversa_fechada"] <= 1e-14
    assert relatorio.residual <= 1e-14


def test_rigidez_limiar_k0_cadeia_a():
    params = BDParams.from_rates([0.3, 0.0], [0.0, 0.2])
    for alpha, estocastico, admissivel in ((1.5, True, True), (1.0, False, True), (3.5, False, False)):
        resultado = ultrametric_rigidity_check(params, 0, alpha, 0.0)
        assert resultado["limiar_alpha"] == pytest.approx(1.5)
        assert resultado["stochastic"] == estocastico
        assert resultado["admissible"] == admissivel
        assert resultado["ok"]


def test_rigidez_cadeia_b_k1_nao_admissivel(cadeia_b):
    resultado = ultrametric_rigidity_check(cadeia_b, 1, 0.5, 0.0)
    assert resultado["feasible"]
    assert not resultado["substochastic"]
    assert not resultado["admissible"]
    assert resultado["report"].P_hat[1].sum() == pytest.approx(1.1)


def test_rigidez_testemunha_negativa_k0(cadeia_b):
    resultado = ultrametric_rigidity_check(cadeia_b, 0, 0.0, 0.5)
    assert resultado["testemunha"] == (2, 1)
    assert resultado["valor_testemunha"] == pytest.approx(-1 / 30)
    assert resultado["valor_esperado"] == pytest.approx(-1 / 30)
    assert not resultado["feasible"]


def test_rigidez_testemunha_no_ultimo_corte():
    params = BDParams.from_rates(p=[0.2, 0.3, 0.4, 0.0], q=[0.0, 0.1, 0.2, 0.3])
    resultado = ultrametric_rigidity_check(params, 2, 0.5, 1.0)
    assert resultado["testemunha"] == (3, 1)
    assert resultado["valor_esperado"] == pytest.approx(-0.4 / 1.5)
    assert resultado["valor_testemunha"] == pytest.approx(-0.4 / 1.5, abs=1e-12)
    # mesma coluna, linha k+1
    assert resultado["report"].P_hat[3, 1] == resultado["valor_testemunha"]
    assert not resultado["admissible"]
    assert resultado["ok"]


def test_rigidez_beta_positivo_sempre_inviavel(rng):
    for _ in range(50):
        N = int(rng.integers(3, 12))
        params = bd_monotona(rng, N)
        k = int(rng.integers(0, N))
        alpha = float(rng.uniform(0.0, 2.0))
        beta = float(rng.uniform(0.01, 2.0))
        resultado = ultrametric_rigidity_check(params, k, alpha, beta)
        assert not resultado["admissible"]
        assert resultado["valor_testemunha"] == pytest.approx(resultado["valor_esperado"], abs=1e-12)
        assert resultado["valor_testemunha"] < 0
        assert resultado["ok"]


def test_rigidez_k_positivo_exige_alpha_nulo(rng):
    for _ in range(30):
        N = int(rng.integers(3, 12))
        params = bd_monotona(rng, N)
        k = int(rng.integers(1, N))
        resultado = ultrametric_rigidity_check(params, k, float(rng.uniform(0.05, 2.0)), 0.0)
        assert not resultado["admissible"]
        assert resultado["ok"]


def test_rigidez_no_limiar_so_a_linha_zero_conserva(rng):
    for _ in range(30):
        params = bd_monotona(rng, int(rng.integers(2, 12)))
        limiar = params.p[0] / params.q[1]
        resultado = ultrametric_rigidity_check(params, 0, limiar, 0.0)
        assert resultado["admissible"]
        assert resultado["massa_linha_zero"] == pytest.approx(1.0, abs=1e-12)
        assert not resultado["stochastic"]
        massa_1 = resultado["report"].P_hat[1].sum()
        assert massa_1 == pytest.approx(1.0 - limiar * params.p[1] / (1.0 + limiar), abs=1e-12)
        assert resultado["ok"]


def test_hipergeometrica_pequena():
    np.testing.assert_allclose(hypergeometric_matrix(2), [[1.0, 1.0, 1.0], [1.0, 0.5, 0.0], [1.0, 0.0, 0.0]])


def test_dual_hipergeometrico_moran():
    relatorio = hypergeometric_moran_dual(2, 0.3, 0.2)
    esperado = [[1.0, 0.0, 0.0], [0.1, 0.75, 0.0], [0.0, 0.45, 0.25]]
    np.testing.assert_allclose(relatorio.P_hat, esperado, atol=1e-15)
    assert relatorio.notas["residuo_somas_linha"] <= 1e-15
    assert relatorio.residual <= 1e-14
    assert relatorio.admissible


def test_dual_hipergeometrico_concorda_com_solve():
    for N in (2, 5, 8):
        P = bd_kernel(moran_kernel(N, mutation_bias(0.3, 0.2, N)))
        fechado = hypergeometric_moran_dual(N, 0.3, 0.2)
        resolvido = dual_via_solve(P, dual_function("hypergeometric", N))
        np.testing.assert_allclose(resolvido.P_hat, fechado.P_hat, atol=1e-9)


def test_dual_hipergeometrico_wright_fisher():
    P = wright_fisher_kernel(2, mutation_bias(0.3, 0.2, 2))
    relatorio = dual_via_solve(P, dual_function("hypergeometric", 2))
    esperado = [[1.0, 0.0, 0.0], [0.2, 0.5, 0.0], [0.04, 0.325, 0.125]]
    np.testing.assert_allclose(relatorio.P_hat, esperado, atol=1e-12)
    assert relatorio.notas["solver"] == "anti"


def test_dual_via_solve_siegmund_concorda(rng):
    for _ in range(20):
        P = nucleo_monotono(rng, int(rng.integers(2, 15)))
        resolvido = dual_via_solve(P, dual_function("siegmund", P.shape[0] - 1))
        np.testing.assert_allclose(resolvido.P_hat, siegmund_dual(P).P_hat, atol=1e-12)
        assert resolvido.notas["solver"] == "superior"


def test_dual_via_solve_h_singular(cadeia_a):
    with pytest.raises(SingularH):
        dual_via_solve(cadeia_a, np.ones((2, 2)))


def test_potential_nucleo_constante():
    R = np.array([[0.2, 0.3, 0.0], [0.1, 0.2, 0.3], [0.0, 0.1, 0.4]])
    relatorio = potential_constant_kernel_check(R)
    assert relatorio.feasible
    assert relatorio.notas["nao_negativo"]
    assert relatorio.residual <= 1e-12


def test_potential_nucleo_constante_rejeita_estocastico():
    with pytest.raises(PreconditionViolated):
        potential_constant_kernel_check(np.array([[0.5, 0.5], [0.5, 0.5]]))


def test_verify_duality_simetrica(cadeia_b):
    P = bd_kernel(cadeia_b)
    relatorio = siegmund_dual(P)
    verificacao = verify_duality(P, relatorio.H, relatorio.P_hat)
    assert verificacao["ok"]
    assert verificacao["symmetric"] <= 1e-14


def test_phi_siegmund_e_acumulada(cadeia_b):
    P = bd_kernel(cadeia_b)
    pi = stationary(P)
    H = dual_function("siegmund", 2).H
    np.testing.assert_allclose(H.T @ pi, cumulative(pi), atol=1e-12)
