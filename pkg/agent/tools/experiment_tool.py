# agent/tools/experiment_tool.py
from pydantic import ValidationError

from agent.adk_base import Tool
from agent.tools.common import add_input, count_type, load_input, resolve_seed, tau_type
from config.settings import load_settings
from core.errors import UsageError
from core.experiment import SweepConfig, load_sweep_config, read_sweep_file, run_sweep, write_report
from logs.logger import get_logger, kv

logger = get_logger(__name__)


class ExperimentTool(Tool):
    name = "experiment"
    help = "tf-idf threshold sweep against random edge removal; writes CSV series and report.json"

    def configure(self, parser):
        add_input(parser)
        parser.add_argument("--config", help="KEY=value sweep config (THRESHOLDS, REPLICATES, MASTER_SEED, ...)")
        parser.add_argument("--replicates", type=count_type, default=None)
        parser.add_argument("--workers", type=count_type, default=None)
        parser.add_argument("--max-threshold", type=tau_type, default=None)
        parser.add_argument("--unweighted", action="store_true", help="run Louvain on unweighted projections")

    def run(self, args) -> int:
        settings = load_settings(workers=args.workers)
        from_file = read_sweep_file(args.config) if args.config else {}
        overrides = {
            "replicates": args.replicates,
            "workers": args.workers if args.workers is not None or from_file.get("WORKERS") else settings.workers,
            "max_threshold": args.max_threshold,
            "use_weights": False if args.unweighted else None,
        }
        if args.seed is not None or not from_file.get("MASTER_SEED"):
            overrides["master_seed"] = resolve_seed(args)
        if args.config:
            config = load_sweep_config(args.config, **overrides)
        else:
            try:
                config = SweepConfig(**{k: v for k, v in overrides.items() if v is not None})
            except ValidationError as e:
                raise UsageError(f"invalid sweep option: {e.errors()[0]['msg']}") from e

        report = run_sweep(load_input(args), config)
        paths = write_report(report, args.output or "sweep")
        for path in paths:
            print(path)
        logger.info(kv("experiment done", seed=config.master_seed, rows=len(report.rows)))
        return 0
