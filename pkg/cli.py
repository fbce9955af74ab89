"""
FairPath command line.

    python cli.py discover --graph model.txt --data data.csv \
        --protected Race:c-,c+ --decision Loan:e-,e+ --redlining Zip
    python cli.py remove   ... --out-model repaired.txt --out-data fair.csv
    python cli.py audit    --graph repaired.txt --data test.csv ...
    python cli.py metrics  --graph model.txt --data data.csv --compare fair.csv ...

Exit codes are listed in exit_codes.py.
"""
import argparse
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, List, Optional, Tuple

from causal_model import CausalGraph, CausalModel, Designation
from config import Config
from dataset import SAMPLING_METHODS, Dataset, estimate_cpts, load_csv, write_csv
from discovery import check_tau, pse_dd
from errors import FairPathError, InvalidQuery, SolverFailure
from exit_codes import ExitCodes
from logger import print_summary, setup_logging
from metrics import audit_predictions, chi_square_utility, dataset_risk_difference
from model_file import read_model_file, write_model_file
from path_effects import PathQuery
from removal import RemovalMode, pse_dr

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Settings of one command run, built from the parsed flags."""
    command: str
    graph: Path
    protected: Designation
    decision: Designation
    redlining: FrozenSet[str] = frozenset()
    data: Optional[Path] = None
    compare: Optional[Path] = None
    tau: float = Config.TAU
    seed: int = Config.SEED
    alpha: float = Config.SMOOTHING_ALPHA
    n: Optional[int] = None
    mode: RemovalMode = RemovalMode.BOTH
    sampling: str = 'ancestral'
    out_model: Optional[Path] = None
    out_data: Optional[Path] = None
    out_report: Optional[Path] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        redlining = frozenset(name.strip() for name in (getattr(args, 'redlining', None) or '').split(',') if name.strip())
        config = cls(
            command=args.command,
            graph=Path(args.graph),
            protected=Designation.parse(args.protected),
            decision=Designation.parse(args.decision),
            redlining=redlining,
            data=Path(args.data) if args.data else None,
            compare=Path(args.compare) if getattr(args, 'compare', None) else None,
            tau=Config.TAU if args.tau is None else args.tau,
            seed=Config.SEED if args.seed is None else args.seed,
            alpha=Config.SMOOTHING_ALPHA if args.alpha is None else args.alpha,
            n=getattr(args, 'n', None),
            mode=RemovalMode(getattr(args, 'mode', None) or 'both'),
            sampling=getattr(args, 'sampling', None) or 'ancestral',
            out_model=Path(args.out_model) if getattr(args, 'out_model', None) else None,
            out_data=Path(args.out_data) if getattr(args, 'out_data', None) else None,
            out_report=Path(args.out_report) if args.out_report else None,
        )
        config.validate()
        return config

    def validate(self):
        check_tau(self.tau, '--tau')
        if not self.alpha >= 0:
            raise InvalidQuery(f"--alpha must be non-negative, got {self.alpha}")
        if self.n is not None and self.n < 1:
            raise InvalidQuery(f"--n must be at least 1, got {self.n}")

    def queries(self) -> Tuple[PathQuery, PathQuery]:
        """(direct query, redlining query)."""
        if not self.redlining:
            raise InvalidQuery("--redlining is required")
        return (PathQuery.direct(self.protected, self.decision),
                PathQuery.through(self.protected, self.decision, self.redlining))


def _load(config: RunConfig) -> Tuple[CausalGraph, Optional[CausalModel], Optional[Dataset]]:
    graph, model = read_model_file(config.graph)
    dataset = load_csv(config.data, graph.variables) if config.data else None
    return graph, model, dataset


def _load_model(config: RunConfig) -> Tuple[CausalModel, Optional[Dataset]]:
    """CPTs from the model file when present, otherwise estimated from --data."""
    graph, model, dataset = _load(config)
    if model is None:
        if dataset is None:
            raise InvalidQuery(f"{config.graph} holds no CPTs and no --data was given")
        model = estimate_cpts(dataset, graph, config.alpha)
    return model, dataset


def _emit_report(config: RunConfig, title: str, text: str, summary: dict):
    if config.out_report:
        config.out_report.parent.mkdir(parents=True, exist_ok=True)
        config.out_report.write_text(text)
        logger.info(f"Wrote report to {config.out_report}")
        print_summary(title, summary)
    else:
        print(text, end='')


def cmd_discover(config: RunConfig) -> int:
    """Run discovery and write the report."""
    model, _ = _load_model(config)
    direct, indirect = config.queries()
    report = pse_dd(model, direct, indirect, config.tau)
    code = ExitCodes.for_report(report)
    _emit_report(config, "DISCRIMINATION DISCOVERY", report.to_text(),
                 {**report.to_dict(), 'result': ExitCodes.get_description(code)})
    return code


def cmd_remove(config: RunConfig) -> int:
    """Repair the decision CPT, then write the model, the regenerated data and the report."""
    model, dataset = _load_model(config)
    direct, indirect = config.queries()
    n = config.n if config.n is not None else (len(dataset) if dataset is not None else None)
    if n is None:
        raise InvalidQuery("--n is required when no --data is given")

    result, data = pse_dr(model, direct, indirect, n, config.tau, config.seed, config.mode, config.sampling)
    if config.out_model:
        write_model_file(result.repaired_model, config.out_model)
    if config.out_data:
        write_csv(data, config.out_data)
    _emit_report(config, "DISCRIMINATION REMOVAL", result.to_text(), {
        **result.post_effects.to_dict(),
        'objective_value': result.objective_value,
        'removed_arcs': sorted(result.removed_arcs),
        'rows_generated': len(data),
    })
    return ExitCodes.SUCCESS


def cmd_audit(config: RunConfig) -> int:
    """Audit the argmax predictions of a (repaired) model on test data."""
    graph, model, test = _load(config)
    if model is None:
        raise InvalidQuery(f"{config.graph} must hold a model with CPTs")
    if test is None:
        raise InvalidQuery("--data (test rows) is required")
    direct, indirect = config.queries()
    report = audit_predictions(model, test, direct, indirect, config.tau, config.alpha)
    code = ExitCodes.for_report(report)
    _emit_report(config, "PREDICTION AUDIT", report.to_text(),
                 {**report.to_dict(), 'result': ExitCodes.get_description(code)})
    return code


def cmd_metrics(config: RunConfig) -> int:
    """Chi-square utility and dataset risk differences."""
    graph, _, original = _load(config)
    if original is None:
        raise InvalidQuery("--data is required")
    rows = {'risk_difference': dataset_risk_difference(original, config.protected, config.decision)}
    if config.compare:
        modified = load_csv(config.compare, graph.variables)
        rows['risk_difference_compare'] = dataset_risk_difference(modified, config.protected, config.decision)
        rows['chi_square'] = chi_square_utility(original, modified)
    text = ''.join(f"{key}: {value!r}\n" for key, value in rows.items())
    _emit_report(config, "DATA METRICS", text, rows)
    return ExitCodes.SUCCESS


COMMANDS = {
    'discover': cmd_discover,
    'remove': cmd_remove,
    'audit': cmd_audit,
    'metrics': cmd_metrics,
}


def _add_common(parser: argparse.ArgumentParser, redlining: bool = True):
    parser.add_argument('--graph', required=True, help="Model file (graph, optionally with CPTs)")
    parser.add_argument('--data', help="CSV dataset")
    parser.add_argument('--protected', required=True, help="Protected attribute as NAME:NEG,POS")
    parser.add_argument('--decision', required=True, help="Decision attribute as NAME:NEG,POS")
    if redlining:
        parser.add_argument('--redlining', required=True, help="Comma-separated redlining attributes")
    parser.add_argument('--tau', type=float, help=f"Discrimination threshold (default {Config.TAU})")
    parser.add_argument('--seed', type=int, help=f"Random seed (default {Config.SEED})")
    parser.add_argument('--alpha', type=float, help=f"CPT smoothing (default {Config.SMOOTHING_ALPHA})")
    parser.add_argument('--out-report', help="Write the report here instead of stdout")
    parser.add_argument('--log-level', help=f"Logging level (default {Config.LOG_LEVEL})")


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fairpath',
                                     description="Discover and remove direct and indirect discrimination")
    subparsers = parser.add_subparsers(dest='command', required=True)

    discover = subparsers.add_parser('discover', help="Compute path-specific effects and judge them")
    _add_common(discover)

    remove = subparsers.add_parser('remove', help="Repair the decision CPT and regenerate data")
    _add_common(remove)
    remove.add_argument('--out-model', help="Repaired model file")
    remove.add_argument('--out-data', help="Regenerated dataset CSV")
    remove.add_argument('--n', type=int, help="Rows to generate (default: rows in --data)")
    remove.add_argument('--mode', choices=[mode.value for mode in RemovalMode], default='both',
                        help="Which effect constraints to enforce")
    remove.add_argument('--sampling', choices=list(SAMPLING_METHODS), default='ancestral',
                        help="Dataset generation method")

    audit = subparsers.add_parser('audit', help="Audit predictions of a repaired model on test data")
    _add_common(audit)

    metrics = subparsers.add_parser('metrics', help="Data utility and risk differences")
    _add_common(metrics, redlining=False)
    metrics.add_argument('--compare', help="Modified dataset to compare with --data")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which is reserved for discrimination
        return ExitCodes.SUCCESS if exc.code in (0, None) else ExitCodes.ERROR

    setup_logging(args.log_level or Config.LOG_LEVEL, Config.LOG_FILE)
    try:
        Config.validate()
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except SolverFailure as exc:
        logger.error(f"Solver failure: {exc}")
        return ExitCodes.SOLVER_FAILURE
    except (FairPathError, OSError, ValueError) as exc:
        logger.error(f"Error: {exc}")
        return ExitCodes.ERROR


if __name__ == '__main__':
    raise SystemExit(main())
