# agent/pipeline_agent.py
import argparse
import sys

from agent.adk_base import Agent
from agent.tools.communities_tool import CommunitiesTool
from agent.tools.experiment_tool import ExperimentTool
from agent.tools.filter_tool import FilterTool
from agent.tools.fit_degrees_tool import FitDegreesTool
from agent.tools.project_tool import ProjectTool
from agent.tools.southern_women_tool import SouthernWomenTool
from agent.tools.stats_tool import StatsTool
from agent.tools.tfidf_tool import TfidfTool
from agent.tools.top_objects_tool import TopObjectsTool
from config.settings import LOG_LEVELS, load_settings
from core import __version__
from core.errors import BipartiteError, UsageError
from logs.logger import configure_logging, get_logger

logger = get_logger(__name__)

PROG = "bipartite"


class _Parser(argparse.ArgumentParser):
    """Raise instead of exiting so usage errors share the error path."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _delimiter(text: str) -> str | None:
    named = {"tab": "\t", "comma": ",", "space": " ", "whitespace": None}
    if text in named:
        return named[text]
    text = text.encode("utf-8").decode("unicode_escape")
    if len(text.encode("utf-8")) != 1:
        raise argparse.ArgumentTypeError("delimiter must be one byte, or tab / comma / space / whitespace")
    return text


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be >= 0")
    return value


class PipelineAgent(Agent):
    def __init__(self):
        super().__init__([
            StatsTool(),
            TopObjectsTool(),
            FitDegreesTool(),
            TfidfTool(),
            FilterTool(),
            ProjectTool(),
            CommunitiesTool(),
            ExperimentTool(),
            SouthernWomenTool(),
        ])

    def build_parser(self) -> argparse.ArgumentParser:
        common = _Parser(add_help=False)
        common.add_argument("--seed", type=_seed, default=None, help="master seed for every random stream")
        common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, default=None,
                            help="default from BIPARTITE_LOG_LEVEL, else INFO")
        common.add_argument("--delimiter", type=_delimiter, default=argparse.SUPPRESS,
                            help="input field separator: one byte, or tab / comma / space / whitespace "
                                 "(default from BIPARTITE_DELIMITER, else tab)")
        common.add_argument("--has-header", action="store_true", help="skip the first data line of the input")
        common.add_argument("--weight-column", type=int, default=None,
                            help="0-based column holding the weight (default: third column if present)")
        common.add_argument("--min-rating", type=float, default=None,
                            help="drop input records whose weight is below this value")
        common.add_argument("-o", "--output", default=None, help="output file (directory for experiment)")

        parser = _Parser(prog=PROG, description="User-object network analysis with tf-idf edge filtering.")
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        commands = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
        commands.required = True
        for name, tool in self.tools.items():
            sub = commands.add_parser(name, help=tool.help, description=tool.help, parents=[common])
            tool.configure(sub)
        return parser

    def run(self, argv: list[str] | None = None) -> int:
        try:
            args = self.build_parser().parse_args(argv)
            settings = load_settings(log_level=args.log_level)
            configure_logging(settings.log_level)
            if not hasattr(args, "delimiter"):
                try:
                    args.delimiter = _delimiter(settings.delimiter)
                except argparse.ArgumentTypeError as e:
                    raise UsageError(f"BIPARTITE_DELIMITER: {e}") from None
            if args.weight_column is not None and args.weight_column < 2:
                raise UsageError("--weight-column must be 2 or more (columns 0 and 1 are user and object)")
            return self.tools[args.command].run(args)
        except BipartiteError as e:
            print(f"error: {e.category}: {e}", file=sys.stderr)
            logger.debug("failure", exc_info=True)
            return e.exit_code
        except KeyboardInterrupt:
            print("error: usage: interrupted", file=sys.stderr)
            return 130
