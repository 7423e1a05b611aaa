# agent/tools/filter_tool.py
from agent.adk_base import Tool
from agent.tools.common import add_input, load_input, output_stream, tau_type
from core.ingest import write_edge_list, write_tfidf_dump
from core.weighting import filter_by_threshold
from logs.logger import get_logger

logger = get_logger(__name__)


class FilterTool(Tool):
    name = "filter"
    help = "drop edges whose weight is below --tau, then isolated nodes"

    def configure(self, parser):
        add_input(parser, "tf-idf dump or edge list")
        parser.add_argument("--tau", type=tau_type, required=True, help="edges with weight < tau are removed")

    def run(self, args) -> int:
        graph = load_input(args)
        if graph.tfidf is None:
            logger.warning("input has no tf-idf columns; filtering its weights as they are")
        result = filter_by_threshold(graph, args.tau)
        with output_stream(args) as out:
            if result.graph.tfidf is not None:
                write_tfidf_dump(result.graph, out)
            else:
                write_edge_list(result.graph, out)
        return 0
