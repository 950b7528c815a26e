"""
Linha de comando: testes de paridade, auditorias, randomização, exemplo do SAT,
remoção de viés e verificações em SEM.

Relatórios JSON vão para stdout; logs e tabelas (--pretty) vão para stderr.
"""
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence
import argparse
import logging
import sys

import numpy as np
import orjson

from .config import CLI_CONFIG, KCI_CONFIG, LOG_CONFIG, RANDOMIZATION_CONFIG, SEM_CONFIG, VERSION
from .core.audit import parity_audit
from .core.cp_test import KciConfig, kci_test
from .core.dataset import DataColumn, Dataset
from .core.debias import estimate_bias_subspace, project_out
from .core.randomization import (CostSpec, SatModelParams, apply_kernels, estimate_conditional_pmfs,
                                 expected_curves, sat_brier_table, simulate_sat_model,
                                 solve_eo_kernels)
from .core.sem import (EvidenceSpec, check_cf, check_eco, check_eco_structural,
                       conditional_mutual_information, d_separated, directed_paths)
from .core.sem_loader import load_sem
from .reports import (ORJSON_OPTIONS, AuditReport, BrierRowModel, DebiasReport, RandomizeArtifact,
                      SatReport, SemReport, SweepPoint, TestReport, json_schemas)
from .ui.display import Display
from .utils.data_validator import data_validator
from .utils.debug_logger import debug_logger
from .utils.error_handler import ConfigError, DomainError, UsageError, handle_errors
from .utils.log_config import setup_logging

logger = logging.getLogger(__name__)

CF_TOLERANCE = 1e-10


# ---------------------------------------------------------------------------
# Conversão de flags
# ---------------------------------------------------------------------------

def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed inválido: {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed deve ser um inteiro sem sinal de 64 bits")
    return value


def _names(text: Optional[str]) -> List[str]:
    return [part.strip() for part in (text or '').split(',') if part.strip()]


def _floats(text: Optional[str], flag: str) -> List[float]:
    try:
        return [float(part) for part in _names(text)]
    except ValueError:
        raise UsageError(f"{flag}: esperado lista de números, recebeu {text!r}", "bad_flag")


def _assignments(text: Optional[str], flag: str) -> Dict[str, str]:
    """'z=1.95,a=1' -> {'z': '1.95', 'a': '1'}"""
    result = {}
    for part in _names(text):
        key, sep, value = part.partition('=')
        if not sep or not key.strip():
            raise UsageError(f"{flag}: esperado nome=valor, recebeu {part!r}", "bad_flag")
        result[key.strip()] = value.strip()
    return result


def _config(model_cls, **values):
    """Modelos montados a partir de flags: valor inválido é erro de uso"""
    try:
        return data_validator.build_model(model_cls, **{k: v for k, v in values.items() if v is not None})
    except ConfigError as e:
        raise UsageError(str(e), e.error_code, e.details)


def _feature(data: Dataset, names: Sequence[str]) -> DataColumn:
    if not names:
        raise UsageError("Lista de colunas vazia", "missing_column")
    if len(names) == 1:
        return data[names[0]]
    return DataColumn.continuous(data.matrix(names), name=','.join(names))


def _emit(report, args: argparse.Namespace, show: Optional[Callable[[Dict[str, Any]], None]] = None) -> int:
    sys.stdout.buffer.write(report.to_json())
    sys.stdout.flush()
    if args.pretty and show is not None:
        show(report.model_dump(mode='python'))
    return 0


def _write_json(path: Path, report) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(report.to_json())


# ---------------------------------------------------------------------------
# Comandos
# ---------------------------------------------------------------------------

@handle_errors
def cmd_test(args: argparse.Namespace) -> int:
    """Teste KCI de x ⊥ a | z, opcionalmente varrendo limiares de a"""
    data = Dataset.from_csv(args.input, categorical=_names(args.categorical))
    x_names, z_names = _names(args.x), _names(args.z)
    x = _feature(data, x_names)
    z = _feature(data, z_names) if z_names else None
    a_col = data[args.a]

    thresholds: List[Optional[float]] = _floats(args.binarize_at, '--binarize-at') or [None]
    cfg = _config(KciConfig, lam=args.lambda_, null_method=args.null, mc_reps=args.mc_reps, seed=args.seed)

    sweep = []
    for threshold in thresholds:
        a = a_col if threshold is None else a_col.binarize(threshold)
        result = kci_test(x, a, z, cfg)
        sweep.append(SweepPoint(threshold=threshold, **result.to_dict()))

    first = sweep[0]
    report = TestReport(
        command='test', input=str(args.input), x=x_names, a=args.a, z=z_names or None,
        statistic=first.statistic, p_value=first.p_value, n=first.n, method=first.method,
        threshold=first.threshold, config=cfg.model_dump(by_alias=True),
        sweep=sweep if len(sweep) > 1 else None,
    )
    return _emit(report, args, Display().show_test)


@handle_errors
def cmd_audit(args: argparse.Namespace) -> int:
    data = Dataset.from_csv(args.input)
    result = parity_audit(data, args.x, args.a, mode=args.mode, y=args.y, z=args.z)
    report = AuditReport(command='audit', input=str(args.input), mode=args.mode,
                         x=args.x, a=args.a, y=args.y, z=args.z, **result.to_dict())
    return _emit(report, args, Display().show_audit)


@handle_errors
def cmd_randomize(args: argparse.Namespace) -> int:
    """Ajusta o par de kernels e aplica a saída randomizada à amostra"""
    data = Dataset.from_csv(args.input)
    s_col = data[args.s]
    if s_col.kind != 'continuous' or s_col.values.ndim != 1:
        raise DomainError(f"Coluna '{args.s}' deve ser numérica", "not_numeric")
    a = data[args.a].labels()
    y = data[args.y].labels()

    pmfs = estimate_conditional_pmfs(s_col.values, a, y, args.k)
    cost = _config(CostSpec, alpha=args.alpha)
    pair = solve_eo_kernels(pmfs, args.k1, cost)
    outputs = apply_kernels(pair, pmfs.sample_bins, a, args.seed)

    out = Path(args.out)
    stem = out.parent / out.stem
    csv_path = Path(f"{stem}_randomized.csv")
    curves_path = Path(f"{stem}_curves.tsv")
    out.parent.mkdir(parents=True, exist_ok=True)

    frame = data.frame.copy()
    frame['score_bin'] = pmfs.sample_bins + 1
    frame['randomized_score'] = outputs + 1
    frame.to_csv(csv_path, index=False, lineterminator='\n')
    expected_curves(pair).to_csv(curves_path, sep='\t', index=False, lineterminator='\n',
                                 float_format='%.12g')

    artifact = RandomizeArtifact(
        command='randomize', input=str(args.input), s=args.s, a=args.a, y=args.y,
        k=args.k, k1=pair.shape[1], alpha=cost.alpha, seed=args.seed,
        K0=pair.K0.tolist(), K1=pair.K1.tolist(), bin_edges=pmfs.bin_edges.tolist(),
        parity_residual=pair.parity_residual, objective=pair.objective,
        outputs={'artifact': str(out), 'randomized_csv': str(csv_path), 'curves_tsv': str(curves_path)},
    )
    _write_json(out, artifact)
    logger.info(f"Kernels gravados em {out}")
    return _emit(artifact, args, Display().show_kernels)


@handle_errors
def cmd_simulate_sat(args: argparse.Namespace) -> int:
    """Amostra o modelo do SAT, ajusta os kernels e compara o Brier das três decisões"""
    if args.n < 1:
        raise UsageError(f"--n deve ser >= 1 (recebeu {args.n})", "bad_n")
    params = _config(SatModelParams, mu_z=args.mu_z, tau_z=args.tau_z, mu_s=args.mu_s,
                     sigma_s=args.sigma_s)
    operation = debug_logger.start_operation('simulate_sat', {'n': args.n, 'seed': args.seed})
    sample = simulate_sat_model(params, args.n, args.seed)
    pmfs = estimate_conditional_pmfs(sample.s, sample.a, sample.y, args.k)
    pair = solve_eo_kernels(pmfs, args.k1)
    rows, frame = sat_brier_table(params, sample, pmfs, pair, args.seed)
    debug_logger.end_operation(operation, 'success', {'objective': pair.objective})

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        'samples_csv': out / 'sat_samples.csv',
        'curves_tsv': out / 'sat_curves.tsv',
        'brier_tsv': out / 'sat_brier.tsv',
        'report': out / 'sat_report.json',
    }
    frame.to_csv(paths['samples_csv'], index=False, lineterminator='\n')
    expected_curves(pair).to_csv(paths['curves_tsv'], sep='\t', index=False, lineterminator='\n',
                                 float_format='%.12g')
    brier = [BrierRowModel(**row.to_dict()) for row in rows]
    with open(paths['brier_tsv'], 'w', encoding='utf-8', newline='\n') as handle:
        handle.write("decision\tgroup\texpected\tsample\n")
        for row in brier:
            sample_value = '' if row.sample is None else f"{row.sample:.12g}"
            handle.write(f"{row.decision}\t{row.group}\t{row.expected:.12g}\t{sample_value}\n")

    report = SatReport(
        command='simulate-sat', params=params.model_dump(), n=args.n, seed=args.seed,
        k=args.k, k1=pair.shape[1], parity_residual=pair.parity_residual,
        objective=pair.objective, brier=brier,
        outputs={name: str(path) for name, path in paths.items()},
    )
    _write_json(paths['report'], report)
    return _emit(report, args, lambda r: Display().show_brier(r['brier']))


@handle_errors
def cmd_debias(args: argparse.Namespace) -> int:
    """Remove o subespaço estimado dos pares v_<col>/w_<col> de cada linha do --input"""
    data = Dataset.from_csv(args.input)
    columns = _names(args.columns) or [
        name for name, col in data.columns.items() if col.kind == 'continuous' and col.values.ndim == 1
    ]
    if not columns:
        raise UsageError("Nenhuma coluna numérica para projetar", "missing_column")
    vectors = data.matrix(columns)

    pair_data = Dataset.from_csv(args.pairs)
    left = pair_data.matrix([f"v_{c}" for c in columns])
    right = pair_data.matrix([f"w_{c}" for c in columns])
    subspace = estimate_bias_subspace(np.stack([left, right], axis=1), args.rank)
    projected = project_out(vectors, subspace)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    frame = data.frame.copy()
    for j, name in enumerate(columns):
        frame[name] = projected[:, j]
    frame.to_csv(out, index=False, lineterminator='\n', float_format='%.17g')

    residual = float(np.max(np.abs(projected @ subspace.basis))) if subspace.r and projected.size else 0.0
    report = DebiasReport(
        command='debias', input=str(args.input), pairs=str(args.pairs), rank=subspace.r,
        dim=subspace.dim, rows=data.n_rows, columns=columns, basis=subspace.basis.T.tolist(),
        explained_variance=subspace.explained_variance.tolist(),
        max_inner_product=residual, out=str(out),
    )
    return _emit(report, args, Display().show_debias)


def _sem_dsep(sem, args) -> Dict[str, Any]:
    x = _names(args.x) or [sem.role('protected')]
    y = _names(args.y) or [sem.role('prediction')]
    given = _names(args.given) if args.given is not None else [sem.role('outcome')]
    details: Dict[str, Any] = {'x': x, 'y': y, 'given': given,
                               'verdict': d_separated(sem, x, y, given)}
    if sem.state_space <= SEM_CONFIG['enumeration_limit']:
        details['conditional_mutual_information'] = conditional_mutual_information(sem, x, y, given)
    return details


def _sem_eco(sem, args) -> Dict[str, Any]:
    a = sem.role('protected', args.a)
    yhat = sem.role('prediction', args.yhat)
    outcome = sem.role('outcome', args.outcome)
    details: Dict[str, Any] = {
        'protected': a, 'prediction': yhat, 'outcome': outcome,
        'verdict': check_eco_structural(sem, a, yhat, outcome),
        'paths': directed_paths(sem, a, yhat),
    }
    if sem.state_space <= SEM_CONFIG['enumeration_limit']:
        exact = check_eco(sem, a, yhat, outcome, _intervention(args))
        details['epsilon_hat'] = exact.epsilon_hat
        details['skipped_strata'] = exact.skipped_strata
    return details


def _sem_cf(sem, args, model) -> Dict[str, Any]:
    assignments = _assignments(args.evidence, '--evidence')
    evidence = EvidenceSpec(assignments=assignments) if assignments else model.evidence
    if evidence is None:
        raise UsageError("check cf exige --evidence ou 'evidence' no modelo", "missing_evidence")
    result = check_cf(sem, args.yhat, args.a, evidence, _intervention(args), seed=args.seed)
    return {
        'evidence': evidence.label(),
        'epsilon_hat': result.epsilon_hat,
        'worst_pair': list(result.worst_pair) if result.worst_pair else None,
        'verdict': result.epsilon_hat <= CF_TOLERANCE,
    }


def _intervention(args) -> Optional[Dict[str, float]]:
    raw = _assignments(args.intervention, '--intervention')
    if not raw:
        return None
    try:
        return {key: float(value) for key, value in raw.items()}
    except ValueError:
        raise UsageError(f"--intervention: probabilidades inválidas {args.intervention!r}", "bad_flag")


@handle_errors
def cmd_sem(args: argparse.Namespace) -> int:
    """Verificações em SEM tabular: d-separação, ECO e justiça contrafactual"""
    model = load_sem(args.model)
    sem = model.sem
    if args.check == 'dsep':
        details = _sem_dsep(sem, args)
    elif args.check == 'eco':
        details = _sem_eco(sem, args)
    else:
        details = _sem_cf(sem, args, model)
    verdict = bool(details.pop('verdict'))
    report = SemReport(command='sem', model=str(args.model), check=args.check,
                       verdict=verdict, details=details)
    return _emit(report, args, Display().show_sem)


@handle_errors
def cmd_schema(args: argparse.Namespace) -> int:
    sys.stdout.buffer.write(orjson.dumps(json_schemas(), option=ORJSON_OPTIONS) + b"\n")
    sys.stdout.flush()
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=_seed, default=CLI_CONFIG['default_seed'],
                        help='semente (inteiro sem sinal de 64 bits)')
    common.add_argument('--log-level', default=None, help='debug, info, warning, error')
    common.add_argument('--log-file', default=None, help='arquivo de log JSON com rotação')
    common.add_argument('--pretty', action='store_true', help='tabelas legíveis em stderr')

    parser = argparse.ArgumentParser(
        prog='conditional-parity',
        description='Testes e correções de paridade condicional',
    )
    parser.add_argument('--version', action='version', version=VERSION)
    commands = parser.add_subparsers(dest='command', required=True)

    test = commands.add_parser('test', parents=[common], help='teste KCI de x ⊥ a | z')
    test.add_argument('--input', required=True)
    test.add_argument('--x', required=True, help='coluna(s) separadas por vírgula')
    test.add_argument('--a', required=True)
    test.add_argument('--z', default=None, help='coluna(s) de condicionamento')
    test.add_argument('--lambda', dest='lambda_', type=float, default=KCI_CONFIG['lambda'])
    test.add_argument('--null', choices=['gamma', 'mc'], default=None)
    test.add_argument('--mc-reps', type=int, default=None)
    test.add_argument('--binarize-at', default=None, help='limiar(es) para a, separados por vírgula')
    test.add_argument('--categorical', default=None, help='colunas forçadas a categóricas')
    test.set_defaults(handler=cmd_test)

    audit = commands.add_parser('audit', parents=[common], help='ε de paridade discreta')
    audit.add_argument('--input', required=True)
    audit.add_argument('--x', required=True)
    audit.add_argument('--a', required=True)
    audit.add_argument('--y', default=None)
    audit.add_argument('--z', default=None)
    audit.add_argument('--mode', choices=['dp', 'eo', 'eopp', 'cp'], default='dp')
    audit.set_defaults(handler=cmd_audit)

    randomize = commands.add_parser('randomize', parents=[common], help='kernels de Markov por LP')
    randomize.add_argument('--input', required=True)
    randomize.add_argument('--s', required=True)
    randomize.add_argument('--a', required=True)
    randomize.add_argument('--y', required=True)
    randomize.add_argument('--k', type=int, default=RANDOMIZATION_CONFIG['k'])
    randomize.add_argument('--k1', type=int, default=RANDOMIZATION_CONFIG['k1'])
    randomize.add_argument('--alpha', type=float, default=None)
    randomize.add_argument('--out', required=True, help='artefato JSON dos kernels')
    randomize.set_defaults(handler=cmd_randomize)

    sat = commands.add_parser('simulate-sat', parents=[common], help='exemplo do SAT e score de Brier')
    sat.add_argument('--n', type=int, default=50000)
    sat.add_argument('--mu-z', type=float, default=None)
    sat.add_argument('--tau-z', type=float, default=None)
    sat.add_argument('--mu-s', type=float, default=None)
    sat.add_argument('--sigma-s', type=float, default=None)
    sat.add_argument('--k', type=int, default=RANDOMIZATION_CONFIG['k'])
    sat.add_argument('--k1', type=int, default=RANDOMIZATION_CONFIG['k1'])
    sat.add_argument('--out', required=True, help='diretório de saída')
    sat.set_defaults(handler=cmd_simulate_sat)

    debias = commands.add_parser('debias', parents=[common], help='remove o subespaço de viés')
    debias.add_argument('--input', required=True)
    debias.add_argument('--pairs', required=True, help='CSV com colunas v_<col> e w_<col>')
    debias.add_argument('--columns', default=None, help='colunas a projetar (padrão: numéricas)')
    debias.add_argument('--rank', type=int, default=CLI_CONFIG['debias_rank'])
    debias.add_argument('--out', required=True)
    debias.set_defaults(handler=cmd_debias)

    sem = commands.add_parser('sem', parents=[common], help='verificações em SEM tabular')
    sem.add_argument('--model', required=True)
    sem.add_argument('--check', choices=['eco', 'cf', 'dsep'], required=True)
    sem.add_argument('--a', default=None, help='substitui o papel protected')
    sem.add_argument('--yhat', default=None, help='substitui o papel prediction')
    sem.add_argument('--outcome', default=None, help='substitui o papel outcome')
    sem.add_argument('--x', default=None, help='dsep: conjunto X')
    sem.add_argument('--y', default=None, help='dsep: conjunto Y')
    sem.add_argument('--given', default=None, help='dsep: conjunto Z (vazio com --given "")')
    sem.add_argument('--evidence', default=None, help='cf: nó=valor,...')
    sem.add_argument('--intervention', default=None, help='P_a como valor=prob,...')
    sem.set_defaults(handler=cmd_sem)

    schema = commands.add_parser('schema', parents=[common], help='JSON Schema dos relatórios')
    schema.set_defaults(handler=cmd_schema)
    return parser


def _log_file(args: argparse.Namespace) -> Optional[str]:
    if args.log_file:
        return args.log_file
    if LOG_CONFIG['file']:
        return LOG_CONFIG['file']
    if LOG_CONFIG['dir']:
        return str(Path(LOG_CONFIG['dir']) / 'conditional_parity.log')
    return None


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Executa um comando e devolve o código de saída"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse sai com 2 em flags inválidas e 0 em --help/--version
        return int(e.code or 0)

    if getattr(args, 'null', None) == 'mc':
        args.null = 'montecarlo'
    setup_logging(level=args.log_level or LOG_CONFIG['level'], log_file=_log_file(args),
                  max_bytes=LOG_CONFIG['max_size'], backup_count=LOG_CONFIG['backup_count'])
    debug_logger.log_event('command', f"Comando {args.command}", {'argv': list(argv or sys.argv[1:])})
    code = args.handler(args)
    logger.debug(f"Comando {args.command} terminou com código {code}")
    return code
