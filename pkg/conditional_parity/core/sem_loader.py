"""
Leitura de arquivos de SEM (formato JSON) com erros por número de linha.

O arquivo é composto com o pyyaml para manter a posição de cada nó e
validado com pydantic antes da montagem do SemGraph.

Formato:
    {
      "description": "opcional",
      "nodes": {
        "u": {"domain": [0, 1], "pmf": [0.5, 0.5]},
        "y": {"domain": [0, 1], "parents": ["u"],
              "table": [{"parents": [0], "value": 0}, {"parents": [1], "value": 1}]}
      },
      "roles": {"protected": "a", "outcome": "y", "prediction": "yhat",
                "evidence": ["z"], "other": []},
      "evidence": {"z": 1}
    }
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .sem import EvidenceSpec, SemGraph, domain_key, build_sem
from ..config import SEM_CONFIG
from ..utils.debug_logger import debug_logger
from ..utils.error_handler import DomainError, InputParseError, SemSchemaError

logger = logging.getLogger(__name__)

Scalar = Union[int, float, str]


class TableRowSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    parents: List[Scalar]
    value: Scalar


class NodeSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    domain: List[Scalar] = Field(min_length=1)
    pmf: Optional[List[float]] = None
    parents: List[str] = Field(default_factory=list)
    table: Optional[List[TableRowSpec]] = None

    @model_validator(mode='after')
    def check_kind(self) -> 'NodeSpec':
        if self.pmf is not None and (self.parents or self.table is not None):
            raise ValueError("nó exógeno (com pmf) não pode ter parents nem table")
        if self.pmf is None and self.table is None:
            raise ValueError("informe pmf (exógeno) ou table (endógeno)")
        return self


class RolesSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    protected: Optional[str] = None
    outcome: Optional[str] = None
    prediction: Optional[str] = None
    evidence: List[str] = Field(default_factory=list)
    other: List[str] = Field(default_factory=list)


class SemFileSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    description: Optional[str] = None
    nodes: Dict[str, NodeSpec] = Field(min_length=1)
    roles: RolesSpec = Field(default_factory=RolesSpec)
    evidence: Dict[str, Scalar] = Field(default_factory=dict)


@dataclass
class SemModelFile:
    sem: SemGraph
    evidence: Optional[EvidenceSpec]
    description: Optional[str]
    source: str


def _line_of(root: yaml.Node, path: Sequence[Any]) -> int:
    """Linha (a partir de 1) do nó mais profundo alcançável pelo caminho"""
    node, line = root, root.start_mark.line + 1
    for part in path:
        if isinstance(node, yaml.MappingNode):
            match = next(((k, v) for k, v in node.value if k.value == str(part)), None)
            if match is None:
                break
            node, line = match[1], match[0].start_mark.line + 1
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            node = node.value[part]
            line = node.start_mark.line + 1
        else:
            break
    return line


class _Problems:
    def __init__(self, root: yaml.Node):
        self.root = root
        self.items: List[Dict[str, Any]] = []

    def add(self, path: Sequence[Any], message: str) -> None:
        self.items.append({'line': _line_of(self.root, path), 'message': message})

    def __bool__(self) -> bool:
        return bool(self.items)


def _compose(text: str, source: str) -> Tuple[yaml.Node, Any]:
    loader = yaml.SafeLoader(text)
    try:
        root = loader.get_single_node()
        if root is None:
            raise SemSchemaError(f"{source}: arquivo vazio", [{'line': 1, 'message': 'arquivo vazio'}])
        data = loader.construct_document(root)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        line = mark.line + 1 if mark else 1
        raise SemSchemaError(f"{source}: sintaxe inválida", [{'line': line, 'message': str(e.problem)}])
    finally:
        loader.dispose()
    return root, data


def _semantic_checks(spec: SemFileSpec, problems: _Problems) -> None:
    nodes = spec.nodes
    keyset = lambda values: [domain_key(v) for v in values]
    for name, node in nodes.items():
        keys = keyset(node.domain)
        if len(set(keys)) != len(keys):
            problems.add(('nodes', name, 'domain'), f"'{name}': valores repetidos no domínio")
        if node.pmf is not None:
            pmf = np.asarray(node.pmf, dtype=float)
            if pmf.size != len(node.domain):
                problems.add(('nodes', name, 'pmf'),
                             f"'{name}': pmf com {pmf.size} valores para domínio de {len(node.domain)}")
            elif np.any(pmf < 0) or abs(pmf.sum() - 1.0) > SEM_CONFIG['pmf_tol']:
                problems.add(('nodes', name, 'pmf'), f"'{name}': pmf deve ser não negativa e somar 1")
            continue

        unknown = [(i, p) for i, p in enumerate(node.parents) if p not in nodes]
        for i, parent in unknown:
            problems.add(('nodes', name, 'parents', i), f"'{name}': pai inexistente '{parent}'")
        if unknown:
            continue
        parent_keys = [set(keyset(nodes[p].domain)) for p in node.parents]
        seen = set()
        for r, row in enumerate(node.table or []):
            path = ('nodes', name, 'table', r)
            if len(row.parents) != len(node.parents):
                problems.add(path, f"'{name}': linha com {len(row.parents)} valores de pais, "
                                   f"esperado {len(node.parents)}")
                continue
            combo = tuple(keyset(row.parents))
            bad = [node.parents[i] for i, k in enumerate(combo) if k not in parent_keys[i]]
            if bad:
                problems.add(path, f"'{name}': valor fora do domínio dos pais {bad}")
            if domain_key(row.value) not in set(keyset(node.domain)):
                problems.add(path + ('value',), f"'{name}': valor {row.value!r} fora do domínio")
            if combo in seen:
                problems.add(path, f"'{name}': combinação de pais repetida {row.parents}")
            seen.add(combo)
        expected = int(np.prod([len(nodes[p].domain) for p in node.parents], dtype=np.int64))
        if len(seen) < expected:
            problems.add(('nodes', name, 'table'),
                         f"'{name}': tabela cobre {len(seen)} de {expected} combinações dos pais")

    for role in ('protected', 'outcome', 'prediction'):
        value = getattr(spec.roles, role)
        if value is not None and value not in nodes:
            problems.add(('roles', role), f"papel '{role}' aponta para nó inexistente '{value}'")
    for role in ('evidence', 'other'):
        for i, value in enumerate(getattr(spec.roles, role)):
            if value not in nodes:
                problems.add(('roles', role, i), f"papel '{role}' aponta para nó inexistente '{value}'")
    for name, value in spec.evidence.items():
        if name not in nodes:
            problems.add(('evidence', name), f"evidência em nó inexistente '{name}'")
        elif domain_key(value) not in set(keyset(nodes[name].domain)):
            problems.add(('evidence', name), f"evidência {name}={value!r} fora do domínio")


def _roles_dict(roles: RolesSpec) -> Dict[str, Any]:
    return {k: v for k, v in roles.model_dump().items() if v}


def load_sem_text(text: str, source: str = '<texto>') -> SemModelFile:
    root, data = _compose(text, source)
    problems = _Problems(root)
    try:
        spec = SemFileSpec.model_validate(data)
    except ValidationError as e:
        for error in e.errors():
            loc = error['loc']
            where = '.'.join(str(p) for p in loc) or '<raiz>'
            problems.add(loc, f"{where}: {error['msg']}")
        raise SemSchemaError(f"{source}: modelo inválido", problems.items)

    _semantic_checks(spec, problems)
    if problems:
        raise SemSchemaError(f"{source}: modelo inválido", problems.items)

    entries: Dict[str, Dict[str, Any]] = {}
    for name, node in spec.nodes.items():
        if node.pmf is not None:
            entries[name] = {'domain': node.domain, 'pmf': node.pmf}
        else:
            entries[name] = {'domain': node.domain, 'parents': node.parents,
                             'mechanism': {tuple(row.parents): row.value for row in node.table}}
    try:
        sem = build_sem(entries, roles=_roles_dict(spec.roles))
    except DomainError as e:
        raise SemSchemaError(f"{source}: modelo inválido",
                             [{'line': _line_of(root, ('nodes',)), 'message': str(e)}])

    evidence = EvidenceSpec(assignments=dict(spec.evidence)) if spec.evidence else None
    debug_logger.log_event('sem_loaded', f"Modelo {source} carregado", {
        'nodes': list(sem.nodes), 'roles': sem.roles, 'state_space': sem.state_space,
    })
    return SemModelFile(sem=sem, evidence=evidence, description=spec.description, source=source)


def load_sem(path: Union[str, Path]) -> SemModelFile:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except FileNotFoundError:
        raise InputParseError(f"Arquivo não encontrado: {path}", "sem_not_found")
    except UnicodeDecodeError as e:
        raise InputParseError(f"{path}: não é UTF-8 ({e})", "sem_encoding")
    return load_sem_text(text, str(path))
