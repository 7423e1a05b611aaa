# agent/tools/top_objects_tool.py
from agent.adk_base import Tool
from agent.tools.common import add_input, count_type, load_input, output_stream
from core.graph import top_objects


class TopObjectsTool(Tool):
    name = "top-objects"
    help = "most popular objects by degree, with the share of users reached"

    def configure(self, parser):
        add_input(parser)
        parser.add_argument("-k", "--top", type=count_type, default=10, help="number of objects (default 10)")

    def run(self, args) -> int:
        ranked = top_objects(load_input(args), args.top)
        with output_stream(args) as out:
            out.write("object\tdegree\tuser_fraction\n")
            for label, degree, fraction in ranked:
                out.write(f"{label}\t{degree}\t{fraction!r}\n")
        return 0
