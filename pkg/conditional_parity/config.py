"""
Arquivo de configuração dos testes de paridade condicional e da randomização
"""
import os
from dotenv import load_dotenv

# Carrega variáveis de ambiente (.env opcional)
load_dotenv()


def get_env_value(key: str, default: str = '') -> str:
    """Retorna valor do ambiente com tratamento de string"""
    value = os.getenv(key, default)
    if isinstance(value, str):
        return value.strip().strip('"\'')
    return value


# Versão semântica exposta por --version
VERSION = "1.0.0"

# Teste de independência condicional por kernels
KCI_CONFIG = {
    'lambda': float(get_env_value('CP_KCI_LAMBDA', '1e-3')),
    'null_method': get_env_value('CP_KCI_NULL', 'gamma'),
    'mc_reps': int(get_env_value('CP_MC_REPS', '5000')),
    'eig_keep_ratio': 1e-10,   # mantém autovalores >= ratio * máximo
    'min_samples': 10,
    'max_samples': 5000,       # matrizes densas O(n^3)
}

# Tolerâncias numéricas compartilhadas
NUMERIC_CONFIG = {
    'symmetry_tol': 1e-12,     # relativo a max|entrada|
    'psd_tol': 1e-8,           # relativo ao traço
    'eig_tol': 1e-10,
}

# Programa linear e kernels de Markov
RANDOMIZATION_CONFIG = {
    'k': 20,
    'k1': 20,
    'alpha': 1.0,
    'lp_tol': 1e-9,
    'lp_max_iter': 50000,
    'stochastic_tol': 1e-8,
}

# Exemplo do SAT (habilidade latente z, nota s)
SAT_CONFIG = {
    'mu_z': 1.0,
    'tau_z': 1.0,
    'sigma_s': 1.0,
    'mu_s': 1.0,               # = (sigma_s^2 / tau_z^2) * mu_z
    'p_location': 0.5,
    'p_scale': 0.5,            # p_z(z) = 1 / (1 + exp(-(z - 0.5) / 0.5))
    'n': 50000,
    'quadrature_points': 64,
}

# Modelos de equações estruturais tabulares
SEM_CONFIG = {
    'enumeration_limit': int(get_env_value('CP_ENUM_LIMIT', '1000000')),
    'cf_samples': int(get_env_value('CP_CF_SAMPLES', '100000')),
    'pmf_tol': 1e-12,
}

# Configurações de logs
LOG_CONFIG = {
    'level': get_env_value('CP_LOG_LEVEL', 'warning'),
    'file': get_env_value('CP_LOG_FILE', ''),
    'dir': get_env_value('CP_LOG_DIR', ''),     # arquivo padrão conditional_parity.log
    'max_size': 10485760,  # 10MB
    'backup_count': 5,
}

# Linha de comando
CLI_CONFIG = {
    'default_seed': 0,
    'json_indent': True,
    'debias_rank': 1,
}
