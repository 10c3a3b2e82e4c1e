import argparse
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

from chordwalk.commands import eigenstate, evolve, limiting, spectrum, trap, verify
from chordwalk.core.config import settings
from chordwalk.schemas.run import RunRequest

logger = logging.getLogger(__name__)

HANDLERS: dict[str, Callable[[RunRequest], int]] = {
    "spectrum": spectrum.cmd_spectrum,
    "eigenstate": eigenstate.cmd_eigenstate,
    "evolve": evolve.cmd_evolve,
    "limiting": limiting.cmd_limiting,
    "trap": trap.cmd_trap,
    "verify": verify.cmd_verify,
}

HELP = {
    "spectrum": spectrum.HELP,
    "eigenstate": eigenstate.HELP,
    "evolve": evolve.HELP,
    "limiting": limiting.HELP,
    "trap": trap.HELP,
    "verify": verify.HELP,
}


def add_common_args(parser: argparse.ArgumentParser) -> None:
    # every default is None so a --config file can fill what the command line leaves out
    parser.add_argument("--n", type=int, default=None, help="number of nodes N")
    parser.add_argument("--m", type=str, default=None, help="chord endpoint m, or 'none' for the bare cycle")
    parser.add_argument("--m-list", dest="m_list", type=str, default=None, help="comma-separated m sweep, one output file each")
    parser.add_argument("--start", type=str, default=None, help="comma-separated start nodes (default 1)")
    parser.add_argument("--t-max", dest="t_max", type=float, default=None)
    parser.add_argument("--dt", type=float, default=None)
    parser.add_argument("--points", type=int, default=None, help="time samples for evolve")
    parser.add_argument("--sample-every", dest="sample_every", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None, help="trap strength Γ")
    parser.add_argument("--solver", choices=["dense", "chebyshev", "both"], default=None)
    parser.add_argument("--format", choices=["csv", "json"], default=None)
    parser.add_argument("--out", type=str, default=None, help="output path (stdout when omitted)")
    parser.add_argument("--config", type=str, default=None, help="key=value file of defaults")
    parser.add_argument("--quick", action="store_true", default=None, help="verify: reduced sizes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chordwalk",
        description="Continuous-time quantum walks on a cycle with one chord",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        add_common_args(sub.add_parser(name, help=HELP[name]))
    return parser


def dispatch(req: RunRequest) -> int:
    handler = HANDLERS[req.command]
    if not req.m_list:
        return handler(req)

    logger.info(f"[CLI] {req.command}: sweeping m over {req.m_list}")
    with ThreadPoolExecutor(max_workers=settings.MAX_WORKERS) as pool:
        codes = list(pool.map(handler, [req.for_m(m) for m in req.m_list]))
    return max(codes)
