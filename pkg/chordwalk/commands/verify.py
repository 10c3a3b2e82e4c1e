import sys

from chordwalk.schemas.run import RunRequest
from chordwalk.services.verify import run_checks

HELP = "Run the invariant suite and print a pass/fail summary"


def cmd_verify(req: RunRequest) -> int:
    results = run_checks(quick=req.quick)
    for r in results:
        sys.stdout.write(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}\n")
    failed = sum(1 for r in results if not r.passed)
    sys.stdout.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return 1 if failed else 0
