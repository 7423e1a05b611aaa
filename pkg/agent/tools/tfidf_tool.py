# agent/tools/tfidf_tool.py
from agent.adk_base import Tool
from agent.tools.common import add_input, load_input, log_base_type, output_stream
from config.settings import load_settings
from core.ingest import write_tfidf_dump
from core.weighting import NORMALIZERS, tfidf_reweight


class TfidfTool(Tool):
    name = "tfidf"
    help = "reweight edges by tf-idf and dump user, object, w_old, f, idf, w_new"

    def configure(self, parser):
        add_input(parser)
        parser.add_argument("--log-base", type=log_base_type, default=None, help="logarithm base of the idf (default e)")
        parser.add_argument("--normalizer", choices=sorted(NORMALIZERS), default="max")

    def run(self, args) -> int:
        settings = load_settings(log_base=args.log_base)
        graph = tfidf_reweight(load_input(args), log_base=settings.log_base, normalizer=args.normalizer)
        with output_stream(args) as out:
            write_tfidf_dump(graph, out)
        return 0
