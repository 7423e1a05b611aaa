# agent/tools/communities_tool.py
from agent.adk_base import Tool
from agent.tools.common import output_stream, resolve_seed
from core.community import louvain
from core.ingest import read_projected_edge_list, write_partition
from logs.logger import get_logger, kv

logger = get_logger(__name__)


class CommunitiesTool(Tool):
    name = "communities"
    help = "Louvain communities of a projected edge list"

    def configure(self, parser):
        parser.add_argument("input", help="projected edge list (as written by `project`)")
        parser.add_argument("--unweighted", action="store_true", help="treat every projected edge as weight 1")

    def run(self, args) -> int:
        seed = resolve_seed(args)
        graph = read_projected_edge_list(args.input)
        result = louvain(graph, seed, use_weights=not args.unweighted)
        logger.info(kv("communities", count=result.partition.community_count,
                       modularity=result.modularity, levels=result.levels, seed=seed))
        with output_stream(args) as out:
            write_partition(result.partition.nodes, result.partition.assignment, out, result.modularity)
        return 0
