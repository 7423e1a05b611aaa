# agent/tools/southern_women_tool.py
from agent.adk_base import Tool
from agent.tools.common import log_base_type, output_stream, resolve_seed, tau_type
from core.community import louvain
from core.projection import project
from core.weighting import filter_by_threshold, tfidf_reweight
from data.southern_women import N_WOMEN, WOMEN, southern_women, woman_label

SOUTHERN_WOMEN_TAU = 1.0
SOUTHERN_WOMEN_LOG_BASE = 2.0


def southern_women_groups(seed, tau: float = SOUTHERN_WOMEN_TAU, log_base: float = SOUTHERN_WOMEN_LOG_BASE):
    weighted = tfidf_reweight(southern_women(), log_base=log_base)
    filtered = filter_by_threshold(weighted, tau).graph
    if filtered.is_empty():
        return [], [woman_label(i) for i in range(N_WOMEN)], None
    result = louvain(project(filtered, "users"), seed)
    groups = sorted((sorted(g, key=int) for g in result.partition.groups()), key=lambda g: int(g[0]))
    pruned = [woman_label(i) for i in range(N_WOMEN) if woman_label(i) not in filtered.users]
    return groups, pruned, result.modularity


class SouthernWomenTool(Tool):
    name = "southern-women"
    help = "tf-idf, filter, project and Louvain on the built-in Southern Women network"

    def configure(self, parser):
        parser.add_argument("--tau", type=tau_type, default=SOUTHERN_WOMEN_TAU)
        parser.add_argument("--log-base", type=log_base_type, default=SOUTHERN_WOMEN_LOG_BASE)
        parser.add_argument("--names", action="store_true", help="print first names next to the numbers")

    def run(self, args) -> int:
        groups, pruned, q = southern_women_groups(resolve_seed(args), args.tau, args.log_base)

        def show(label: str) -> str:
            return f"{label}:{WOMEN[int(label) - 1]}" if args.names else label

        with output_stream(args) as out:
            out.write(f"# tau={args.tau!r} log_base={args.log_base!r} modularity={q!r}\n")
            for i, group in enumerate(groups, start=1):
                out.write(f"group {i}\t{' '.join(show(w) for w in group)}\n")
            out.write(f"isolated\t{' '.join(show(w) for w in pruned)}\n")
        return 0
