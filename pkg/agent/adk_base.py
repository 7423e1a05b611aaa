# agent/adk_base.py
import argparse


class Tool:
    """One subcommand: declares its arguments and runs on the parsed namespace."""

    name: str = ""
    help: str = ""

    def configure(self, parser: argparse.ArgumentParser) -> None:
        pass

    def run(self, args: argparse.Namespace) -> int:
        raise NotImplementedError("Tool must implement the run() method.")


class Agent:
    def __init__(self, tools: list):
        self.tools = {tool.name or tool.__class__.__name__: tool for tool in tools}

    def run(self, argv: list[str] | None = None) -> int:
        raise NotImplementedError("Agent must implement the run() method.")
