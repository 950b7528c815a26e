"""
Modelos de equações estruturais tabulares (SEM): amostragem, intervenções,
d-separação, certificados de ECO e verificação de justiça contrafactual
"""
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import logging

import networkx as nx
import numpy as np
import pandas as pd

from .cp_test import EpsilonCpResult, total_variation
from ..config import SEM_CONFIG
from ..utils.data_validator import data_validator
from ..utils.debug_logger import debug_logger
from ..utils.error_handler import DimensionError, DomainError, UsageError

logger = logging.getLogger(__name__)

ROLE_NAMES = ('protected', 'outcome', 'prediction', 'evidence', 'other')
Mechanism = Union[Mapping[Tuple, Any], Callable[..., Any]]


@dataclass(frozen=True, eq=False)
class SemNode:
    """
    Nó de um SEM finito.

    Exógeno: pmf sobre o domínio. Endógeno: tabela de códigos com um eixo
    por pai (tamanho do domínio do pai), isto é, valor = table[códigos dos pais].
    """
    name: str
    domain: Tuple
    parents: Tuple[str, ...] = ()
    pmf: Optional[np.ndarray] = None
    table: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.domain) == 0:
            raise DomainError(f"Nó '{self.name}' com domínio vazio", "sem_domain")
        if len(set(map(domain_key, self.domain))) != len(self.domain):
            raise DomainError(f"Nó '{self.name}' com valores repetidos no domínio", "sem_domain")
        if self.is_exogenous:
            pmf = np.array(self.pmf, dtype=float)
            data_validator.validate_pmf(pmf, tol=SEM_CONFIG['pmf_tol'], name=f"pmf de '{self.name}'")
            if pmf.shape != (len(self.domain),):
                raise DimensionError(f"pmf de '{self.name}' com {pmf.size} valores, domínio com "
                                     f"{len(self.domain)}", "sem_pmf_shape")
            pmf.setflags(write=False)
            object.__setattr__(self, 'pmf', pmf)
        else:
            table = np.array(self.table, dtype=np.int64)
            if table.ndim != len(self.parents):
                raise DimensionError(f"Tabela de '{self.name}' deve ter um eixo por pai", "sem_table_shape")
            if table.size and (table.min() < 0 or table.max() >= len(self.domain)):
                raise DomainError(f"Tabela de '{self.name}' com valor fora do domínio", "sem_table_value")
            table.setflags(write=False)
            object.__setattr__(self, 'table', table)

    @property
    def is_exogenous(self) -> bool:
        return self.pmf is not None

    @property
    def size(self) -> int:
        return len(self.domain)

    def code(self, value: Any) -> int:
        return _code_in(self.domain, value, self.name)

    def labels(self, codes: np.ndarray) -> np.ndarray:
        return np.asarray(self.domain)[codes]


def domain_key(value: Any) -> Tuple[str, Any]:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return ('bool', value)
    if isinstance(value, (int, float)):
        return ('num', float(value))
    return ('str', str(value))


def _code_in(domain: Sequence, value: Any, name: str) -> int:
    """Índice do valor no domínio (aceita também a forma textual, vinda da linha de comando)"""
    key = domain_key(value)
    for i, v in enumerate(domain):
        if domain_key(v) == key:
            return i
    text = str(value)
    for i, v in enumerate(domain):
        if str(v) == text:
            return i
    try:
        number = float(text)
    except ValueError:
        number = None
    if number is not None:
        for i, v in enumerate(domain):
            if isinstance(v, (int, float)) and not isinstance(v, bool) and float(v) == number:
                return i
    raise DomainError(f"Valor {value!r} fora do domínio de '{name}'", "sem_bad_value",
                      {'node': name, 'value': str(value)})


def exogenous(name: str, domain: Sequence, pmf: Sequence[float]) -> SemNode:
    return SemNode(name=name, domain=tuple(domain), pmf=np.asarray(pmf, dtype=float))


def endogenous(name: str, domain: Sequence, parents: Sequence[str],
               parent_nodes: Mapping[str, SemNode], mechanism: Mechanism) -> SemNode:
    """
    Constrói a tabela avaliando o mecanismo em cada combinação de valores dos pais.
    O mecanismo é uma função dos valores dos pais ou um dicionário tupla -> valor.
    """
    domain = tuple(domain)
    missing = [p for p in parents if p not in parent_nodes]
    if missing:
        raise DomainError(f"Pais desconhecidos de '{name}': {missing}", "sem_unknown_parent")
    shape = tuple(parent_nodes[p].size for p in parents)
    table = np.empty(shape, dtype=np.int64)
    lookup = None
    if not callable(mechanism):
        lookup = {tuple(domain_key(v) for v in key): value for key, value in mechanism.items()}
    for index in np.ndindex(*shape):
        values = tuple(parent_nodes[p].domain[i] for p, i in zip(parents, index))
        if lookup is None:
            result = mechanism(*values)
        else:
            key = tuple(domain_key(v) for v in values)
            if key not in lookup:
                raise DomainError(f"Tabela de '{name}' sem entrada para {values}", "sem_table_partial")
            result = lookup[key]
        table[index] = _code_in(domain, result, name)
    return SemNode(name=name, domain=domain, parents=tuple(parents), table=table)


@dataclass(frozen=True, eq=False)
class SemGraph:
    """DAG de nós tabulares com papéis opcionais (protected, outcome, prediction, evidence, other)"""
    nodes: Dict[str, SemNode]
    roles: Dict[str, Any] = field(default_factory=dict)
    graph: nx.DiGraph = field(init=False, repr=False)
    order: Tuple[str, ...] = field(init=False, repr=False)

    def __post_init__(self):
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for node in self.nodes.values():
            for parent in node.parents:
                if parent not in self.nodes:
                    raise DomainError(f"Pai '{parent}' de '{node.name}' não existe", "sem_unknown_parent")
                graph.add_edge(parent, node.name)
            if not node.is_exogenous:
                expected = tuple(self.nodes[p].size for p in node.parents)
                if node.table.shape != expected:
                    raise DimensionError(f"Tabela de '{node.name}' não cobre os domínios dos pais",
                                         "sem_table_partial")
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise DomainError(f"O grafo tem ciclo: {cycle}", "sem_cycle")
        unknown = [r for r in self.roles if r not in ROLE_NAMES]
        if unknown:
            raise DomainError(f"Papéis desconhecidos: {unknown}", "sem_roles")
        for role, value in self.roles.items():
            for name in _as_list(value):
                if name not in self.nodes:
                    raise DomainError(f"Papel '{role}' aponta para nó inexistente '{name}'", "sem_roles")
        object.__setattr__(self, 'graph', graph)
        object.__setattr__(self, 'order', tuple(nx.lexicographical_topological_sort(graph)))

    def __getitem__(self, name: str) -> SemNode:
        self.require(name)
        return self.nodes[name]

    def require(self, *names: str) -> None:
        missing = [n for n in names if n not in self.nodes]
        if missing:
            raise DomainError(f"Nós inexistentes: {missing}", "sem_unknown_node")

    def role(self, role: str, override: Optional[str] = None) -> str:
        """Nó de um papel; o argumento explícito tem precedência"""
        name = override or self.roles.get(role)
        if isinstance(name, list):
            name = name[0] if len(name) == 1 else None
        if not name:
            raise UsageError(f"Papel '{role}' não definido no modelo", "missing_role")
        self.require(name)
        return name

    def children(self, name: str) -> List[str]:
        return sorted(self.graph.successors(name))

    @property
    def state_space(self) -> int:
        """Número de configurações exógenas enumeradas por joint_pmf"""
        return int(np.prod([n.size for n in self.nodes.values() if n.is_exogenous], dtype=float))


def _as_list(value: Any) -> List[str]:
    if value is None:
        return []
    return [value] if isinstance(value, str) else list(value)


def build_sem(spec: Mapping[str, Mapping[str, Any]], roles: Optional[Mapping[str, Any]] = None) -> SemGraph:
    """
    Monta um SemGraph a partir de {nome: {'domain', 'pmf'}} ou
    {nome: {'domain', 'parents', 'mechanism'}} em qualquer ordem.
    """
    pending = dict(spec)
    built: Dict[str, SemNode] = {}
    while pending:
        progress = False
        for name in list(pending):
            entry = pending[name]
            parents = tuple(entry.get('parents', ()))
            if 'pmf' in entry and not parents:
                built[name] = exogenous(name, entry['domain'], entry['pmf'])
            elif all(p in built for p in parents):
                built[name] = endogenous(name, entry['domain'], parents, built, entry['mechanism'])
            else:
                continue
            del pending[name]
            progress = True
        if not progress:
            raise DomainError(f"Dependências circulares ou pais inexistentes: {sorted(pending)}", "sem_cycle")
    ordered = {name: built[name] for name in spec}
    return SemGraph(nodes=ordered, roles=dict(roles or {}))


# ---------------------------------------------------------------------------
# Amostragem, intervenção e distribuição conjunta
# ---------------------------------------------------------------------------

def _sample_codes(sem: SemGraph, n: int, rng: np.random.Generator) -> Dict[str, np.ndarray]:
    codes: Dict[str, np.ndarray] = {}
    for name in sem.order:
        node = sem.nodes[name]
        if node.is_exogenous:
            codes[name] = rng.choice(node.size, size=n, p=node.pmf)
        else:
            codes[name] = node.table[tuple(codes[p] for p in node.parents)] if node.parents \
                else np.full(n, int(node.table), dtype=np.int64)
    return codes


def sample(sem: SemGraph, n: int, seed: int) -> pd.DataFrame:
    """Amostragem ancestral na ordem topológica (determinística dado o seed)"""
    if n < 1:
        raise DomainError(f"n deve ser >= 1 (recebeu {n})", "bad_n")
    codes = _sample_codes(sem, n, np.random.default_rng(seed))
    return pd.DataFrame({name: sem.nodes[name].labels(codes[name]) for name in sem.nodes})


def intervene(sem: SemGraph, node: str, value: Any = None,
              distribution: Optional[Union[Mapping[Any, float], Sequence[float]]] = None) -> SemGraph:
    """
    Cirurgia no grafo: remove as arestas que entram em `node`, que passa a
    exógeno com massa pontual (value) ou com a pmf dada (distribution).
    """
    target = sem[node]
    if (value is None) == (distribution is None):
        raise DomainError("Informe exatamente um de value ou distribution", "sem_bad_action")
    if value is not None:
        pmf = np.zeros(target.size)
        pmf[target.code(value)] = 1.0
    else:
        pmf = _pmf_over(target, distribution)
    nodes = dict(sem.nodes)
    nodes[node] = SemNode(name=node, domain=target.domain, pmf=pmf)
    debug_logger.log_event('sem_intervene', f"Intervenção em {node}",
                           {'node': node, 'removed_parents': list(target.parents)})
    return SemGraph(nodes=nodes, roles=dict(sem.roles))


def _pmf_over(node: SemNode, distribution) -> np.ndarray:
    if distribution is None:
        return np.full(node.size, 1.0 / node.size)
    if isinstance(distribution, Mapping):
        pmf = np.zeros(node.size)
        for value, p in distribution.items():
            pmf[node.code(value)] = float(p)
    else:
        pmf = np.asarray(distribution, dtype=float)
        if pmf.shape != (node.size,):
            raise DimensionError(f"Distribuição com {pmf.size} valores para domínio de {node.size}",
                                 "sem_pmf_shape")
    data_validator.validate_pmf(pmf, tol=1e-9, name=f"distribuição de '{node.name}'")
    return pmf


@dataclass
class JointPmf:
    """Distribuição conjunta exata: uma linha de códigos por configuração com probabilidade positiva"""
    sem: SemGraph
    names: Tuple[str, ...]
    codes: np.ndarray
    probs: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return self.codes[:, self.names.index(name)]

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        """Tabela densa de probabilidades com um eixo por nó pedido"""
        self.sem.require(*names)
        shape = tuple(self.sem.nodes[n].size for n in names)
        table = np.zeros(shape)
        if not names:
            return np.asarray(self.probs.sum())
        index = tuple(self.column(n) for n in names)
        np.add.at(table, index, self.probs)
        return table

    def to_dict(self) -> Dict[Tuple, float]:
        """{tupla de valores na ordem de `names`: probabilidade}"""
        labels = [self.sem.nodes[n].labels(self.codes[:, i]) for i, n in enumerate(self.names)]
        return {tuple(v.item() if isinstance(v, np.generic) else v for v in row): float(p)
                for row, p in zip(zip(*labels), self.probs)}


def joint_pmf(sem: SemGraph, limit: Optional[int] = None) -> JointPmf:
    """Enumera as configurações exógenas e propaga as tabelas na ordem topológica"""
    limit = SEM_CONFIG['enumeration_limit'] if limit is None else limit
    if sem.state_space > limit:
        raise DomainError(f"Espaço de estados grande demais ({sem.state_space} > {limit})",
                          "state_space_too_large", {'size': sem.state_space})
    exo = [n for n in sem.order if sem.nodes[n].is_exogenous]
    sizes = tuple(sem.nodes[n].size for n in exo)
    grid = np.indices(sizes).reshape(len(exo), -1).T if exo else np.zeros((1, 0), dtype=np.int64)
    probs = np.ones(grid.shape[0])
    for j, name in enumerate(exo):
        probs *= sem.nodes[name].pmf[grid[:, j]]
    support = probs > 0
    grid, probs = grid[support], probs[support]

    names = tuple(sem.order)
    codes = np.empty((grid.shape[0], len(names)), dtype=np.int64)
    position = {name: i for i, name in enumerate(names)}
    for j, name in enumerate(exo):
        codes[:, position[name]] = grid[:, j]
    for name in names:
        node = sem.nodes[name]
        if node.is_exogenous:
            continue
        if node.parents:
            codes[:, position[name]] = node.table[tuple(codes[:, position[p]] for p in node.parents)]
        else:
            codes[:, position[name]] = int(node.table)
    return JointPmf(sem=sem, names=names, codes=codes, probs=probs)


def conditional_mutual_information(sem: SemGraph, X: Iterable[str], Y: Iterable[str],
                                   Z: Iterable[str] = ()) -> float:
    """I(X; Y | Z) em nats, a partir da conjunta exata"""
    X, Y, Z = list(X), list(Y), list(Z)
    _check_disjoint(sem, X, Y, Z)
    table = joint_pmf(sem).marginal(X + Y + Z)
    size = lambda names: int(np.prod([sem.nodes[n].size for n in names], dtype=np.int64))
    p = table.reshape(size(X), size(Y), size(Z))
    p_xz = p.sum(axis=1, keepdims=True)
    p_yz = p.sum(axis=0, keepdims=True)
    p_z = p.sum(axis=(0, 1), keepdims=True)
    positive = p > 0
    ratio = (p * p_z)[positive] / (p_xz * p_yz)[positive]
    return float(max(np.sum(p[positive] * np.log(ratio)), 0.0))


# ---------------------------------------------------------------------------
# Consultas estruturais
# ---------------------------------------------------------------------------

def _check_disjoint(sem: SemGraph, *sets: Sequence[str]) -> None:
    for group in sets:
        sem.require(*group)
    for lhs, rhs in combinations(sets, 2):
        overlap = set(lhs) & set(rhs)
        if overlap:
            raise DomainError(f"Conjuntos de nós sobrepostos: {sorted(overlap)}", "sem_overlap")


def d_separated(sem: SemGraph, X: Iterable[str], Y: Iterable[str], Z: Iterable[str] = ()) -> bool:
    """
    X ⊥ Y | Z no grafo: busca de trilhas ativas (bola de Bayes). Uma trilha
    passa por um colisor apenas se ele ou um descendente está em Z.
    """
    X, Y, Z = set(X), set(Y), set(Z)
    _check_disjoint(sem, sorted(X), sorted(Y), sorted(Z))
    graph = sem.graph
    observed_ancestors = set(Z)
    for node in Z:
        observed_ancestors |= nx.ancestors(graph, node)

    queue = deque((x, 'up') for x in sorted(X))
    visited = set()
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node not in Z and node in Y:
            return False
        if direction == 'up' and node not in Z:
            # chegou de um filho
            queue.extend((p, 'up') for p in graph.predecessors(node))
            queue.extend((c, 'down') for c in graph.successors(node))
        elif direction == 'down':
            # chegou de um pai
            if node not in Z:
                queue.extend((c, 'down') for c in graph.successors(node))
            if node in observed_ancestors:
                queue.extend((p, 'up') for p in graph.predecessors(node))
    return True


def directed_paths(sem: SemGraph, source: str, target: str) -> List[List[str]]:
    """Todos os caminhos dirigidos de source a target, em ordem lexicográfica"""
    sem.require(source, target)
    if source == target:
        return [[source]]
    return sorted(nx.all_simple_paths(sem.graph, source, target))


def check_eco_structural(sem: SemGraph, a: Optional[str] = None, yhat: Optional[str] = None,
                         y: Optional[Union[str, Sequence[str]]] = None) -> bool:
    """
    Certificado suficiente de ECO: todo caminho dirigido de a até ŷ passa por y.
    Falso significa apenas que o certificado não se aplica.
    """
    a = sem.role('protected', a)
    yhat = sem.role('prediction', yhat)
    outcome = _as_list(y) or _as_list(sem.roles.get('outcome'))
    if not outcome:
        raise UsageError("Papel 'outcome' não definido no modelo", "missing_role")
    sem.require(*outcome)
    blockers = set(outcome)
    paths = directed_paths(sem, a, yhat)
    unblocked = [p for p in paths if not blockers & set(p[1:-1])]
    debug_logger.log_event('eco_structural', 'Caminhos de porta da frente analisados',
                           {'paths': paths, 'unblocked': unblocked})
    return not unblocked


def _epsilon_from_table(table: np.ndarray, strata_labels: Sequence, a_labels: Sequence,
                        tol: float) -> EpsilonCpResult:
    """table[estrato, a, valor]: probabilidades conjuntas; compara L(valor | estrato, a) entre a"""
    per_stratum: Dict[Any, float] = {}
    skipped: List[Any] = []
    best = (-1.0, None)
    for s, stratum in enumerate(strata_labels):
        mass = table[s].sum(axis=1)
        if np.any(mass <= tol):
            if mass.sum() > tol:
                skipped.append(stratum)
            continue
        conditionals = table[s] / mass[:, np.newaxis]
        worst = 0.0
        for i, j in combinations(range(len(a_labels)), 2):
            tv = total_variation(conditionals[i], conditionals[j])
            worst = max(worst, tv)
            if tv > best[0]:
                best = (tv, (stratum, a_labels[i], a_labels[j]))
        per_stratum[stratum] = worst
    epsilon = max(per_stratum.values()) if per_stratum else 0.0
    return EpsilonCpResult(epsilon_hat=epsilon, worst_pair=best[1],
                           per_stratum=per_stratum, skipped_strata=skipped)


def _plain(value: Any) -> Any:
    return value.item() if isinstance(value, np.generic) else value


def check_eco(sem: SemGraph, a: Optional[str] = None, yhat: Optional[str] = None,
              y: Optional[str] = None, P_a=None) -> EpsilonCpResult:
    """ε de odds iguais de ŷ dado y no SEM modificado (a ~ P_a), calculado na conjunta exata"""
    a = sem.role('protected', a)
    yhat = sem.role('prediction', yhat)
    y = sem.role('outcome', y)
    modified = intervene(sem, a, distribution=_pmf_over(sem[a], P_a))
    table = joint_pmf(modified).marginal([y, a, yhat])
    result = _epsilon_from_table(table, [_plain(v) for v in sem[y].domain],
                                 [_plain(v) for v in sem[a].domain], SEM_CONFIG['pmf_tol'])
    if not result.per_stratum:
        logger.warning("Nenhum estrato de y tem todos os grupos de a; ECO vale trivialmente")
    return result


# ---------------------------------------------------------------------------
# Contrafactuais por rede gêmea
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EvidenceSpec:
    """Evidência observada no mundo factual: nó -> valor"""
    assignments: Dict[str, Any]

    def codes(self, sem: SemGraph) -> Dict[str, int]:
        return {name: sem[name].code(value) for name, value in self.assignments.items()}

    def label(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in sorted(self.assignments.items()))


def _fresh_name(sem_nodes: Mapping[str, Any], name: str) -> str:
    candidate = f"{name}*"
    while candidate in sem_nodes:
        candidate += "*"
    return candidate


def twin_network(sem: SemGraph, node: str, P_a=None) -> Tuple[SemGraph, Dict[str, str]]:
    """
    Rede gêmea: nós exógenos compartilhados, cópias contrafactuais dos
    descendentes de `node` e uma cópia exógena nova de `node` com pmf P_a.
    Devolve o grafo e o mapa nó factual -> nó contrafactual.
    """
    target = sem[node]
    descendants = nx.descendants(sem.graph, node)
    nodes = dict(sem.nodes)
    mapping = {name: name for name in sem.nodes}
    mapping[node] = _fresh_name(nodes, node)
    nodes[mapping[node]] = SemNode(name=mapping[node], domain=target.domain, pmf=_pmf_over(target, P_a))
    for name in sem.order:
        if name not in descendants:
            continue
        original = sem.nodes[name]
        copy = _fresh_name(nodes, name)
        mapping[name] = copy
        nodes[copy] = SemNode(name=copy, domain=original.domain,
                              parents=tuple(mapping[p] for p in original.parents),
                              table=original.table)
    return SemGraph(nodes=nodes, roles={}), mapping


def counterfactual_pmf(sem: SemGraph, target: str, node: str, evidence: EvidenceSpec,
                       P_a=None, n_samples: Optional[int] = None, seed: int = 0) -> Dict[Any, np.ndarray]:
    """
    L(target_a | e, a_a = a') para cada a' com massa positiva em P_a.

    Exato pela conjunta da rede gêmea quando enumerável; senão por amostragem
    (n_samples linhas, padrão SEM_CONFIG['cf_samples']).
    """
    sem.require(target, node, *evidence.assignments)
    twin, mapping = twin_network(sem, node, P_a)
    cf_node, cf_target = mapping[node], mapping[target]
    observed = evidence.codes(sem)
    size_target = sem[target].size

    if twin.state_space <= SEM_CONFIG['enumeration_limit']:
        joint = joint_pmf(twin)
        weights = joint.probs
        columns = {name: joint.column(name) for name in [cf_node, cf_target, *observed]}
        exact = True
    else:
        n_samples = n_samples or SEM_CONFIG['cf_samples']
        if n_samples < 10_000:
            raise DomainError("Amostragem contrafactual exige n >= 10000", "cf_samples")
        columns = _sample_codes(twin, n_samples, np.random.default_rng(seed))
        weights = np.full(n_samples, 1.0 / n_samples)
        exact = False
        logger.info(f"Rede gêmea com {twin.state_space} estados: usando {n_samples} amostras")

    mask = np.ones(weights.shape[0], dtype=bool)
    for name, code in observed.items():
        mask &= columns[name] == code
    evidence_mass = weights[mask].sum()
    if evidence_mass <= SEM_CONFIG['pmf_tol']:
        raise DomainError(f"Evidência {evidence.label()} tem probabilidade zero",
                          "evidence_zero_probability")

    result: Dict[Any, np.ndarray] = {}
    for code, value in enumerate(sem[node].domain):
        selected = mask & (columns[cf_node] == code)
        mass = weights[selected].sum()
        if mass <= SEM_CONFIG['pmf_tol']:
            continue
        counts = np.bincount(columns[cf_target][selected], weights=weights[selected], minlength=size_target)
        result[_plain(value)] = counts / mass
    debug_logger.log_event('counterfactual_pmf', 'Distribuições contrafactuais calculadas', {
        'target': target, 'node': node, 'evidence': evidence.label(), 'exact': exact,
        'evidence_mass': float(evidence_mass),
    })
    return result


def check_cf(sem: SemGraph, yhat: Optional[str] = None, a: Optional[str] = None,
             evidence: Optional[EvidenceSpec] = None, P_a=None, seed: int = 0) -> EpsilonCpResult:
    """Maior TV entre L(ŷ_a | e, a_a = a') para pares a' (justiça contrafactual se 0)"""
    yhat = sem.role('prediction', yhat)
    a = sem.role('protected', a)
    if evidence is None:
        raise UsageError("check_cf exige evidência", "missing_evidence")
    pmfs = counterfactual_pmf(sem, yhat, a, evidence, P_a, seed=seed)
    label = evidence.label()
    worst, pair = 0.0, None
    for lhs, rhs in combinations(pmfs, 2):
        tv = total_variation(pmfs[lhs], pmfs[rhs])
        if pair is None or tv > worst:
            worst, pair = tv, (label, lhs, rhs)
    return EpsilonCpResult(epsilon_hat=worst, worst_pair=pair, per_stratum={label: worst})
