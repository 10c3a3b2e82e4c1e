"""
chordwalk
─────────
Command-line entry point. Builds a RunRequest from Settings defaults, an
optional --config key=value file and the command line (in that order of
precedence, lowest first), then hands it to the command router.

Exit codes: 0 success, 1 failed verify check or solver failure,
2 invalid request, 3 spectrum solvers disagree.

Usage:
    chordwalk spectrum --n 100 --m 21 --solver both
    chordwalk trap --n 100 --m 11 --gamma 1 --t-max 1000 --format json --out trap.json
    python -m chordwalk verify --quick
"""

import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from chordwalk.commands.router import build_parser, dispatch
from chordwalk.core.config import settings
from chordwalk.core.errors import ChordWalkError, DomainError
from chordwalk.schemas.run import RunRequest

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_INVALID = 2


def load_config_file(path: Path) -> dict:
    """Read `key = value` lines; '#' starts a comment and '-' in keys becomes '_'."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value, got '{raw.strip()}'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT, stream=sys.stderr)
    args = build_parser().parse_args(argv)

    fields = {}
    try:
        if args.config:
            fields.update(load_config_file(Path(args.config)))
        fields.update({k: v for k, v in vars(args).items() if v is not None and k != "config"})
        req = RunRequest.model_validate(fields)
    except (ValidationError, DomainError, OSError) as exc:
        logger.error(f"[CLI] invalid request: {exc}")
        return EXIT_INVALID

    try:
        return dispatch(req)
    except DomainError as exc:
        logger.error(f"[CLI] {req.command}: {exc}")
        return EXIT_INVALID
    except ChordWalkError as exc:
        logger.error(f"[CLI] {req.command} failed: {type(exc).__name__}: {exc}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
