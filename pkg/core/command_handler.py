"""
Command Handler for Tropiscope
Dispatches subcommands to the pipeline and maps outcomes to exit codes
"""

import logging
import sys
from typing import Callable, Dict

from core.config import RunConfig
from core.exceptions import TropiscopeError
from core.pipeline import Tropiscope
from limitset.verdict import ALGEBRAIC_CONSISTENT, INCONCLUSIVE, NOT_ALGEBRAIC

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CODES = {
    ALGEBRAIC_CONSISTENT: 0,
    NOT_ALGEBRAIC: 10,
    INCONCLUSIVE: 20,
}

COMMANDS = ("classify", "limitset", "phase", "render", "certify")


class CommandHandler:
    """Runs one subcommand and returns its exit code"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.handlers: Dict[str, Callable[[Tropiscope], int]] = {
            "classify": self._handle_classify,
            "limitset": self._handle_limitset,
            "phase": self._handle_phase,
            "render": self._handle_render,
            "certify": self._handle_certify,
        }

    def handle_command(self, command: str) -> int:
        """Handle a subcommand and return the process exit code"""
        if command not in self.handlers:
            self.logger.error(f"Unknown command '{command}'")
            return EXIT_ERROR
        try:
            pipeline = Tropiscope(self.config)
            return self.handlers[command](pipeline)
        except TropiscopeError as e:
            self.logger.error(f"{command} failed: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_ERROR
        except Exception as e:
            self.logger.error(f"Unexpected error in {command}: {e}", exc_info=True)
            print(f"error: {e}", file=sys.stderr)
            return EXIT_ERROR

    def _handle_classify(self, pipeline: Tropiscope) -> int:
        verdict = pipeline.classify()
        print(f"{verdict.decision} (dimension estimate {verdict.dim_estimate})")
        return EXIT_CODES[verdict.decision]

    def _handle_limitset(self, pipeline: Tropiscope) -> int:
        report = pipeline.limitset()
        print(f"{len(report['estimate']['cells'])} cells")
        return EXIT_OK

    def _handle_phase(self, pipeline: Tropiscope) -> int:
        report = pipeline.phase()
        print(f"closure dimension {report['closure_dimension']}, {len(report['circles'])} circles")
        return EXIT_OK

    def _handle_render(self, pipeline: Tropiscope) -> int:
        report = pipeline.render()
        print(", ".join(report["figures"]))
        return EXIT_OK

    def _handle_certify(self, pipeline: Tropiscope) -> int:
        certificate = pipeline.certify()
        print(f"compact={certificate.compact} compact_in_span={certificate.compact_in_span} "
              f"violations={certificate.violation_count}")
        return EXIT_OK
