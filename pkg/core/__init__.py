"""
Módulo Core - Núcleos de transição, configuração, erros e utilitários.
"""

from .kernel import (
    ClassDecomposition,
    Kernel,
    KernelKind,
    classify,
    cumulative,
    evolve,
    reversal,
    stationary,
    validate_kernel,
)

__all__ = [
    'ClassDecomposition', 'Kernel', 'KernelKind', 'classify', 'cumulative', 'evolve',
    'reversal', 'stationary', 'validate_kernel',
]
