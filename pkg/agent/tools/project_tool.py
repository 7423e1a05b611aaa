# agent/tools/project_tool.py
from agent.adk_base import Tool
from agent.tools.common import add_input, load_input, output_stream
from core.graph import SIDES
from core.ingest import write_projected_edge_list
from core.projection import METHODS, project


class ProjectTool(Tool):
    name = "project"
    help = "one-mode projection weighted by the number of shared neighbours"

    def configure(self, parser):
        add_input(parser, "tf-idf dump or edge list")
        parser.add_argument("--side", choices=SIDES, default="users")
        parser.add_argument("--method", choices=sorted(METHODS), default="sparse")

    def run(self, args) -> int:
        projected = project(load_input(args), args.side, method=args.method)
        with output_stream(args) as out:
            write_projected_edge_list(projected, out)
        return 0
