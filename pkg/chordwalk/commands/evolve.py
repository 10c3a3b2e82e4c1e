import numpy as np

from chordwalk.commands.output import emit, request_echo
from chordwalk.schemas.run import OutputMeta, RunRequest
from chordwalk.services.dynamics import transition_probabilities
from chordwalk.services.spectral import graph_spectrum

HELP = "Return probabilities π_{j,j}(t) on a uniform time grid"
DEFAULT_T_MAX = 50.0


def cmd_evolve(req: RunRequest) -> int:
    g = req.graph
    solver = "dense" if req.resolved_solver == "both" else req.resolved_solver
    spec = graph_spectrum(g, solver)
    times = np.linspace(0.0, req.t_max or DEFAULT_T_MAX, req.points)

    columns = {"t": times}
    for j in req.starts():
        series = transition_probabilities(spec, j, times)
        columns[f"pi_{j}_{j}"] = series.return_probability
        columns[f"norm_{j}"] = series.norms

    meta = OutputMeta(
        command="evolve",
        request=request_echo(req),
        graph=g.label(),
        solver=solver,
        source=spec.source,
    )
    emit(req, columns, meta)
    return 0
