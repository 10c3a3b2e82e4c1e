import logging

import numpy as np

from chordwalk.commands.output import emit, request_echo
from chordwalk.core.config import settings
from chordwalk.schemas.run import OutputMeta, RunRequest
from chordwalk.services.spectral import graph_spectrum, spectrum_difference

logger = logging.getLogger(__name__)

HELP = "Laplacian eigenvalues in ascending order"
EXIT_DISAGREEMENT = 3


def cmd_spectrum(req: RunRequest) -> int:
    g = req.graph
    solver = req.resolved_solver
    meta = OutputMeta(command="spectrum", request=request_echo(req), graph=g.label(), solver=solver)

    if solver != "both":
        spec = graph_spectrum(g, solver)
        meta.source = spec.source
        meta.fallbacks = [f"{i}: {reason}" for i, reason in spec.fallbacks]
        emit(req, {"index": np.arange(1, spec.size + 1), "eigenvalue": spec.eigenvalues}, meta)
        return 0

    dense = graph_spectrum(g, "dense")
    exact = graph_spectrum(g, "chebyshev")
    delta = np.abs(exact.eigenvalues - dense.eigenvalues)
    worst = spectrum_difference(exact, dense)
    meta.source = f"{exact.source}+{dense.source}"
    meta.fallbacks = [f"{i}: {reason}" for i, reason in exact.fallbacks]
    meta.extra = {"max_delta": worst}
    emit(
        req,
        {
            "index": np.arange(1, exact.size + 1),
            "eigenvalue": exact.eigenvalues,
            "dense": dense.eigenvalues,
            "delta": delta,
        },
        meta,
    )
    if worst > settings.SOLVER_AGREEMENT:
        logger.error(f"[CLI] {g.label()}: solvers disagree by {worst:.3e} (limit {settings.SOLVER_AGREEMENT:.1e})")
        return EXIT_DISAGREEMENT
    return 0
