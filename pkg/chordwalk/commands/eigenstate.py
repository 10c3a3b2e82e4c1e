import numpy as np

from chordwalk.commands.output import emit, request_echo
from chordwalk.schemas.run import OutputMeta, RunRequest
from chordwalk.services.graph import shortest_chord_distance
from chordwalk.services.spectral import decay_prediction, largest_eigenstate

HELP = "Components of the largest-eigenvalue eigenstate with the exponential-decay prediction"


def cmd_eigenstate(req: RunRequest) -> int:
    g = req.graph
    state = largest_eigenstate(g.n, g.m)
    components = state.components * np.sign(state.component(g.m))
    peak = abs(state.component(g.m))
    nodes = np.arange(1, g.n + 1)

    meta = OutputMeta(
        command="eigenstate",
        request=request_echo(req),
        graph=g.label(),
        source="determinant-equation",
        extra={"eigenvalue": state.energy, "root": state.x, "peak": peak},
    )
    emit(
        req,
        {
            "j": nodes,
            "component": components,
            "magnitude": np.abs(components),
            "distance": [shortest_chord_distance(g, int(j)) for j in nodes],
            "prediction": [decay_prediction(g, int(j), peak) for j in nodes],
        },
        meta,
    )
    return 0
