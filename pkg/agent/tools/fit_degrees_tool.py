# agent/tools/fit_degrees_tool.py
import json

from agent.adk_base import Tool
from agent.tools.common import add_input, load_input, output_stream
from config.settings import load_settings
from core.distfit import best_fit
from core.graph import SIDES, degree_sequence


class FitDegreesTool(Tool):
    name = "fit-degrees"
    help = "fit exponential / power-law / lognormal / stretched-exponential models to a degree sequence"

    def configure(self, parser):
        add_input(parser)
        parser.add_argument("--side", choices=SIDES, default="users")
        parser.add_argument("--significance", type=float, default=None,
                            help="p-value below which a comparison counts (default 0.1)")
        parser.add_argument("--min-tail-fraction", type=float, default=None,
                            help="smallest share of the sample an xmin candidate must keep (default 0.5)")

    def run(self, args) -> int:
        settings = load_settings(significance=args.significance, min_tail_fraction=args.min_tail_fraction)
        degrees = degree_sequence(load_input(args), args.side)
        result = best_fit(degrees, significance=settings.significance,
                          min_tail_fraction=settings.min_tail_fraction)
        with output_stream(args) as out:
            json.dump({"side": args.side, **result.to_dict()}, out, indent=2, sort_keys=True)
            out.write("\n")
        return 0
