"""
Formato dos relatórios JSON emitidos pelos comandos
"""
from typing import Any, Dict, List, Optional

import orjson
from pydantic import BaseModel, ConfigDict, Field

from .config import VERSION

ORJSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


class Report(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    version: str = VERSION

    def to_json(self) -> bytes:
        return orjson.dumps(self.model_dump(mode='python'), option=ORJSON_OPTIONS) + b"\n"


class SweepPoint(BaseModel):
    threshold: Optional[float] = None
    statistic: float
    p_value: float
    n: int
    method: str
    hs_norm: float
    conditional: bool
    n_weights: int


class TestReport(Report):
    __test__ = False

    input: str
    x: List[str]
    a: str
    z: Optional[List[str]] = None
    statistic: float
    p_value: float
    n: int
    method: str
    threshold: Optional[float] = None
    config: Dict[str, Any]
    sweep: Optional[List[SweepPoint]] = None


class StratumRow(BaseModel):
    stratum: Any
    tv: float


class AuditReport(Report):
    input: str
    mode: str
    x: str
    a: str
    y: Optional[str] = None
    z: Optional[str] = None
    epsilon_hat: float
    worst_pair: Optional[List[Any]] = None
    per_stratum: List[StratumRow]
    skipped_strata: List[Any] = Field(default_factory=list)


class RandomizeArtifact(Report):
    input: str
    s: str
    a: str
    y: str
    k: int
    k1: int
    alpha: float
    seed: int
    K0: List[List[float]]
    K1: List[List[float]]
    bin_edges: List[float]
    parity_residual: float
    objective: float
    outputs: Dict[str, str]


class BrierRowModel(BaseModel):
    decision: str
    group: int
    expected: float
    sample: Optional[float] = None


class SatReport(Report):
    params: Dict[str, float]
    n: int
    seed: int
    k: int
    k1: int
    parity_residual: float
    objective: float
    brier: List[BrierRowModel]
    outputs: Dict[str, str]


class DebiasReport(Report):
    input: str
    pairs: str
    rank: int
    dim: int
    rows: int
    columns: List[str]
    basis: List[List[float]]
    explained_variance: List[float]
    max_inner_product: float
    out: str


class SemReport(Report):
    model: str
    check: str
    verdict: bool
    details: Dict[str, Any] = Field(default_factory=dict)


REPORT_MODELS = {
    'test': TestReport,
    'audit': AuditReport,
    'randomize': RandomizeArtifact,
    'simulate-sat': SatReport,
    'debias': DebiasReport,
    'sem': SemReport,
}


def json_schemas() -> Dict[str, Any]:
    return {name: model.model_json_schema() for name, model in REPORT_MODELS.items()}
