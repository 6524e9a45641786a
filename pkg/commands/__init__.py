"""
Command handlers for the Mather Hull CLI

Each module exposes HELP, add_arguments(parser) and run(cfg) -> exit code.
"""
from commands import critical, flow, solve, sweep, verify

COMMANDS = {
    "solve": solve,
    "flow": flow,
    "critical": critical,
    "verify": verify,
    "sweep": sweep,
}
