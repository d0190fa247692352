"""
Hierarquia de exceções do dualchain.

Toda exceção do pacote deriva de ErroDualidade. As condições de inviabilidade
(um dual que não é um núcleo, uma condição inicial não admissível) derivam de
ErroInviabilidade, que a linha de comando traduz no código de saída 2.
"""


class ErroDualidade(Exception):
    """Erro base do sistema."""


class ErroValidacao(ErroDualidade):
    """Entrada que não satisfaz as pré-condições de uma operação."""


class ErroNumerico(ErroDualidade):
    """Falha numérica (sistema singular, truncamento insuficiente)."""


class ErroVerificacao(ErroDualidade):
    """Uma identidade verificada ficou acima da tolerância."""


class ErroInviabilidade(ErroDualidade):
    """A construção pedida não existe para os dados fornecidos."""


# Validação de núcleos e vetores
class NonSquare(ErroValidacao):
    pass


class NegativeEntry(ErroValidacao):
    pass


class NonFiniteEntry(ErroValidacao):
    pass


class RowSumExceedsOne(ErroValidacao):
    pass


class NotStochastic(ErroValidacao):
    pass


class NotIrreducible(ErroValidacao):
    pass


class DimensionMismatch(ErroValidacao):
    pass


class SizeMismatch(DimensionMismatch):
    pass


class ZeroStationaryEntry(ErroValidacao):
    pass


class ZeroPiEntry(ErroValidacao):
    pass


class InvalidProbVector(ErroValidacao):
    pass


# Cadeias de nascimento e morte
class InvalidBoundary(ErroValidacao):
    pass


class RowSumError(ErroValidacao):
    pass


class NotDoublyAbsorbing(ErroValidacao):
    pass


class ZeroBirthProbability(ErroValidacao):
    pass


class ZeroUpProbability(ErroValidacao):
    pass


class NotAbsorbing(ErroValidacao):
    pass


# Funções duais
class InvalidUltrametricParams(ErroValidacao):
    pass


class TrivialDualFunction(ErroValidacao):
    pass


class PreconditionViolated(ErroValidacao):
    pass


class NonProductInitial(ErroValidacao):
    pass


# Numéricos
class SingularSystem(ErroNumerico):
    pass


class SingularH(ErroNumerico):
    pass


class RepeatedEigenvalue(ErroNumerico):
    pass


class TruncationTooCoarse(ErroNumerico):
    pass


# Verificações
class DualityResidualTooLarge(ErroVerificacao):
    pass


class IntertwiningResidualTooLarge(ErroVerificacao):
    pass


class PhiNotPositive(ErroVerificacao):
    pass


class LinkNotStochastic(ErroVerificacao):
    pass


# Inviabilidade
class NotMonotone(ErroInviabilidade):
    pass


class InfeasibleNegativeEntry(ErroInviabilidade):
    pass


class PotentialHasStochasticClass(ErroInviabilidade):
    pass


class NotAdmissible(ErroInviabilidade):
    pass


# Linha de comando
class ConfigParse(ErroDualidade):
    pass


class UnknownCommand(ErroDualidade):
    pass


class UnknownSeries(ErroDualidade):
    pass
