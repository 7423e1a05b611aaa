# run.py
import sys

from agent.pipeline_agent import PipelineAgent


def main(argv=None) -> int:
    return PipelineAgent().run(argv)


if __name__ == "__main__":
    sys.exit(main())
