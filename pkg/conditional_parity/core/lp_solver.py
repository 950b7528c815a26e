"""
Simplex primal denso em duas fases (regra de Bland) para os programas lineares da randomização
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy import linalg

from ..config import RANDOMIZATION_CONFIG
from ..utils.debug_logger import debug_logger
from ..utils.error_handler import DimensionError, DomainError

logger = logging.getLogger(__name__)

STATUS_OPTIMAL = 'optimal'
STATUS_INFEASIBLE = 'infeasible'
STATUS_UNBOUNDED = 'unbounded'
STATUS_NUMERICAL = 'numerical_error'


def _as_matrix(values, n_cols: int, name: str) -> np.ndarray:
    if values is None:
        return np.zeros((0, n_cols))
    arr = np.array(values, dtype=float)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, n_cols)
    if arr.ndim != 2 or arr.shape[1] != n_cols:
        raise DimensionError(f"{name}: esperado (m, {n_cols}), recebeu {arr.shape}", "lp_shape")
    return arr


def _as_vector(values, length: int, name: str) -> np.ndarray:
    if values is None:
        values = np.zeros(length)
    arr = np.array(values, dtype=float).ravel()
    if arr.shape[0] != length:
        raise DimensionError(f"{name}: esperado comprimento {length}, recebeu {arr.shape[0]}", "lp_shape")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: valores não finitos", "lp_not_finite")
    return arr


@dataclass
class LpProblem:
    """min c·x s.t. A_eq x = b_eq, A_ub x <= b_ub, lo <= x <= hi"""
    c: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    bounds: Optional[Sequence[Tuple[float, float]]] = None

    def __post_init__(self):
        self.c = _as_vector(self.c, len(np.ravel(self.c)), 'c')
        n = self.c.shape[0]
        self.A_eq = _as_matrix(self.A_eq, n, 'A_eq')
        self.b_eq = _as_vector(self.b_eq, self.A_eq.shape[0], 'b_eq')
        self.A_ub = _as_matrix(self.A_ub, n, 'A_ub')
        self.b_ub = _as_vector(self.b_ub, self.A_ub.shape[0], 'b_ub')
        if self.bounds is None:
            bounds = np.column_stack([np.zeros(n), np.full(n, np.inf)])
        else:
            bounds = np.array([(lo, np.inf if hi is None else hi) for lo, hi in self.bounds],
                              dtype=float).reshape(-1, 2)
        if bounds.shape[0] != n:
            raise DimensionError(f"bounds: esperado {n} pares, recebeu {bounds.shape[0]}", "lp_shape")
        if not np.all(np.isfinite(bounds[:, 0])):
            raise DomainError("Limites inferiores devem ser finitos", "lp_bounds")
        if np.any(bounds[:, 1] < bounds[:, 0]):
            raise DomainError("Limite superior menor que o inferior", "lp_bounds")
        self.bounds = bounds

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    def violation(self, x: np.ndarray) -> float:
        """Maior violação das restrições (igualdades, desigualdades e limites) em x"""
        parts = [0.0]
        if self.A_eq.shape[0]:
            parts.append(np.max(np.abs(self.A_eq @ x - self.b_eq)))
        if self.A_ub.shape[0]:
            parts.append(np.max(self.A_ub @ x - self.b_ub))
        parts.append(np.max(self.bounds[:, 0] - x, initial=0.0))
        finite = np.isfinite(self.bounds[:, 1])
        if finite.any():
            parts.append(np.max(x[finite] - self.bounds[finite, 1]))
        return float(max(max(parts), 0.0))

    def rhs_scale(self) -> float:
        """1 + ‖b‖∞ usado nas tolerâncias de viabilidade"""
        b = np.concatenate([self.b_eq, self.b_ub])
        return 1.0 + (float(np.max(np.abs(b))) if b.size else 0.0)


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    status: str
    max_violation: float
    iterations: int = 0
    messages: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OPTIMAL

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': self.status,
            'objective': self.objective,
            'max_violation': self.max_violation,
            'iterations': self.iterations,
        }


class _Tableau:
    """Tableau denso [A | b] com linha de custos reduzidos ao final"""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: List[int], tol: float):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.basis = list(basis)
        self.tol = tol
        self.iterations = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def set_costs(self, c: np.ndarray) -> None:
        n = self.T.shape[1] - 1
        row = np.zeros(n + 1)
        row[:c.shape[0]] = c
        cb = row[self.basis]
        row[:n] -= cb @ self.T[:self.m, :n]
        row[n] = -(cb @ self.T[:self.m, n])
        self.T[-1] = row

    def pivot(self, r: int, e: int) -> None:
        T = self.T
        T[r] /= T[r, e]
        col = T[:, e].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[np.abs(T) < self.tol * 1e-3] = 0.0
        self.basis[r] = e
        self.iterations += 1

    def run(self, n_allowed: int, max_iter: int) -> str:
        """Pivoteia até a otimalidade; entrada e saída pelo menor índice (Bland)"""
        T, tol = self.T, self.tol
        while True:
            if self.iterations >= max_iter:
                raise DomainError(f"Simplex excedeu {max_iter} iterações", "lp_max_iter")
            costs = T[-1, :n_allowed]
            entering = np.flatnonzero(costs < -tol)
            if entering.size == 0:
                return STATUS_OPTIMAL
            e = int(entering[0])
            col = T[:self.m, e]
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                return STATUS_UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + tol * (1.0 + abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, e)


def _independent_rows(A: np.ndarray, b: np.ndarray, tol: float) -> Tuple[np.ndarray, bool]:
    """Linhas linearmente independentes de A (QR com pivotamento) e consistência de [A | b]"""
    if A.shape[0] == 0:
        return np.arange(0), True

    def rank_of(M: np.ndarray) -> Tuple[int, np.ndarray]:
        _, R, piv = linalg.qr(M.T, mode='economic', pivoting=True)
        diag = np.abs(np.diag(R))
        if diag.size == 0 or diag[0] == 0.0:
            return 0, piv
        return int(np.sum(diag > tol * diag[0] * max(M.shape))), piv

    rank, piv = rank_of(A)
    rank_aug, _ = rank_of(np.column_stack([A, b]))
    return np.sort(piv[:rank]), rank_aug == rank


def solve(p: LpProblem, tol: Optional[float] = None, max_iter: Optional[int] = None) -> LpSolution:
    """Resolve o LP; status infeasible/unbounded são resultados, não exceções"""
    tol = RANDOMIZATION_CONFIG['lp_tol'] if tol is None else tol
    max_iter = RANDOMIZATION_CONFIG['lp_max_iter'] if max_iter is None else max_iter
    n = p.n_vars
    lo, hi = p.bounds[:, 0], p.bounds[:, 1]
    frozen = hi == lo
    free = np.flatnonzero(~frozen)
    nf = free.size

    # Forma padrão em x' = x - lo (variáveis congeladas entram no lado direito)
    A_eq, A_ub = p.A_eq[:, free], p.A_ub[:, free]
    b_eq = p.b_eq - p.A_eq @ lo
    b_ub = p.b_ub - p.A_ub @ lo
    capped = np.flatnonzero(np.isfinite(hi[free]))
    A_cap = np.zeros((capped.size, nf))
    A_cap[np.arange(capped.size), capped] = 1.0
    b_cap = (hi - lo)[free][capped]

    m_ub = A_ub.shape[0] + capped.size
    A_ineq = np.vstack([A_ub, A_cap])
    b_ineq = np.concatenate([b_ub, b_cap])
    A_std = np.block([
        [A_eq, np.zeros((A_eq.shape[0], m_ub))],
        [A_ineq, np.eye(m_ub)],
    ]) if (A_eq.shape[0] + m_ub) else np.zeros((0, nf))
    b_std = np.concatenate([b_eq, b_ineq])
    c_std = np.concatenate([p.c[free], np.zeros(m_ub)])
    n_std = c_std.shape[0]

    scale = p.rhs_scale()
    keep, consistent = _independent_rows(A_std, b_std, tol)
    if not consistent:
        return _failure(n, STATUS_INFEASIBLE, 0, "Restrições de igualdade inconsistentes")
    A_std, b_std = A_std[keep], b_std[keep]
    flip = b_std < 0
    A_std[flip] *= -1.0
    b_std[flip] *= -1.0
    m = A_std.shape[0]

    # Fase 1: artificiais em todas as linhas
    tab = _Tableau(np.hstack([A_std, np.eye(m)]), b_std, list(range(n_std, n_std + m)), tol)
    tab.set_costs(np.concatenate([np.zeros(n_std), np.ones(m)]))
    tab.run(n_std + m, max_iter)
    infeasibility = -tab.T[-1, -1]
    if infeasibility > 1e-8 * scale:
        debug_logger.log_event('lp_infeasible', 'Fase 1 terminou com artificiais positivas',
                               {'infeasibility': float(infeasibility), 'iterations': tab.iterations})
        return _failure(n, STATUS_INFEASIBLE, tab.iterations, f"inviabilidade {infeasibility:.3g}")

    # Artificiais remanescentes na base: pivoteia para fora ou descarta a linha
    drop = []
    for r in range(m):
        if tab.basis[r] < n_std:
            continue
        candidates = np.flatnonzero(np.abs(tab.T[r, :n_std]) > tol)
        if candidates.size:
            tab.pivot(r, int(candidates[0]))
        else:
            drop.append(r)
    if drop:
        rows = [r for r in range(m) if r not in drop]
        tab.T = tab.T[rows + [m]]
        tab.basis = [tab.basis[r] for r in rows]
        A_std, b_std = A_std[rows], b_std[rows]

    # Fase 2 sem colunas artificiais
    tab.T = np.hstack([tab.T[:, :n_std], tab.T[:, -1:]])
    tab.set_costs(c_std)
    status = tab.run(n_std, max_iter)
    if status == STATUS_UNBOUNDED:
        return _failure(n, STATUS_UNBOUNDED, tab.iterations, "objetivo ilimitado")

    # Polimento: resolve B x_B = b na forma padrão original
    x_std = np.zeros(n_std)
    if tab.basis:
        B = A_std[:, tab.basis]
        try:
            x_std[tab.basis] = np.linalg.solve(B, b_std)
        except np.linalg.LinAlgError:
            x_std[tab.basis] = tab.T[:-1, -1]
    x_std = np.clip(x_std, 0.0, None)

    x = lo.copy()
    x[free] += x_std[:nf]
    objective = float(p.c @ x)
    violation = p.violation(x)
    if violation > 1e-8 * scale:
        # base ótima no tableau, mas o ponto polido não é viável: não é um ótimo
        message = f"violação {violation:.3g} acima de {1e-8 * scale:.3g}"
        logger.warning(f"Solução do LP descartada: {message}")
        debug_logger.log_event('lp_numerical_error', 'Ponto final do simplex inviável',
                               {'max_violation': violation, 'iterations': tab.iterations})
        return LpSolution(x=x, objective=objective, status=STATUS_NUMERICAL,
                          max_violation=violation, iterations=tab.iterations, messages=[message])
    debug_logger.log_event('lp_solved', 'LP resolvido', {
        'n_vars': n, 'rows': int(A_std.shape[0]), 'iterations': tab.iterations,
        'objective': objective, 'max_violation': violation,
    })
    return LpSolution(x=x, objective=objective, status=STATUS_OPTIMAL,
                      max_violation=violation, iterations=tab.iterations)


def _failure(n: int, status: str, iterations: int, message: str) -> LpSolution:
    logger.info(f"LP {status}: {message}")
    objective = np.inf if status == STATUS_INFEASIBLE else -np.inf
    return LpSolution(x=np.full(n, np.nan), objective=objective, status=status,
                      max_violation=np.inf, iterations=iterations, messages=[message])
