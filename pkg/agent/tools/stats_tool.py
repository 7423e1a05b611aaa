# agent/tools/stats_tool.py
from agent.adk_base import Tool
from agent.tools.common import add_input, load_input, output_stream
from core.graph import stats_row


def _fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class StatsTool(Tool):
    name = "stats"
    help = "sizes, average degrees and density of a user-object network"

    def configure(self, parser):
        add_input(parser)
        parser.add_argument("--projections", action="store_true",
                            help="also project on both sides and report edge counts and densities")

    def run(self, args) -> int:
        graph = load_input(args)
        row = stats_row(graph, projections=args.projections)
        with output_stream(args) as out:
            for key, value in row.items():
                out.write(f"{key}\t{_fmt(value)}\n")
        return 0
