import numpy as np

from chordwalk.commands.output import emit, request_echo
from chordwalk.schemas.run import OutputMeta, RunRequest
from chordwalk.services.dynamics import limiting_approximation, limiting_distribution, localization_lower_bound
from chordwalk.services.spectral import graph_spectrum, largest_eigenstate

HELP = "Long-time averaged distribution χ_{k,j} with its analytic approximation"


def cmd_limiting(req: RunRequest) -> int:
    g = req.graph
    solver = "dense" if req.resolved_solver == "both" else req.resolved_solver
    spec = graph_spectrum(g, solver)
    nodes = np.arange(1, g.n + 1)
    largest = None if g.is_cycle else largest_eigenstate(g.n, g.m)

    columns = {"k": nodes}
    for j in req.starts():
        chi = limiting_distribution(spec, j)
        columns[f"chi_{j}"] = chi.values
        if largest is not None:
            columns[f"approx_{j}"] = [limiting_approximation(g.n, g.m, j, int(k), largest) for k in nodes]
            columns[f"bound_{j}"] = [localization_lower_bound(g.n, g.m, j, int(k)) for k in nodes]

    meta = OutputMeta(
        command="limiting",
        request=request_echo(req),
        graph=g.label(),
        solver=solver,
        source=spec.source,
    )
    emit(req, columns, meta)
    return 0
