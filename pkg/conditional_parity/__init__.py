"""
Conditional Parity
------------------

Testes de paridade condicional (KCI), regras de decisão randomizadas não
discriminatórias e verificações de justiça contrafactual em SEM tabulares.
"""

from .config import (
    VERSION,
    KCI_CONFIG,
    NUMERIC_CONFIG,
    RANDOMIZATION_CONFIG,
    SAT_CONFIG,
    SEM_CONFIG,
    LOG_CONFIG,
    CLI_CONFIG
)
from .core.dataset import DataColumn, Dataset
from .core.kernels import GramMatrix, KernelSpec, center, gram, joint_gram
from .core.cp_test import KciConfig, KciResult, EpsilonCpResult, kci_test, epsilon_cp_discrete
from .core.randomization import (
    CostSpec,
    MarkovKernelPair,
    SatModelParams,
    estimate_conditional_pmfs,
    solve_eo_kernels,
    gaussian_randomizer
)
from .core.sem import SemGraph, build_sem, d_separated, check_eco_structural, check_cf
from .core.debias import BiasSubspace, estimate_bias_subspace, project_out

__version__ = VERSION
