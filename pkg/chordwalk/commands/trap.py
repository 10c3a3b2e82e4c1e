from chordwalk.commands.output import emit, request_echo
from chordwalk.schemas.run import OutputMeta, RunRequest
from chordwalk.services.trapping import TrapConfig, survival_approximation, survival_probability

HELP = "Survival probability Π_M(t) with a trap at node 1"


def cmd_trap(req: RunRequest) -> int:
    cfg = TrapConfig(graph=req.graph, gamma=req.gamma)
    result = survival_probability(cfg, t_max=req.t_max, dt=req.dt, sample_every=req.sample_every)
    approx = survival_approximation(result.gammas, cfg.graph.n, len(cfg.traps), result.times)

    meta = OutputMeta(
        command="trap",
        request=request_echo(req),
        graph=cfg.graph.label(),
        source=result.method,
        sign_convention=result.sign_convention,
        extra={
            "plateau": result.plateau,
            "converged": result.converged,
            "predicted_plateau": result.predicted_plateau,
            "zero_gamma_count": result.zero_gamma_count,
            "max_norm_increase": result.max_norm_increase,
        },
    )
    emit(req, {"t": result.times, "survival": result.survival, "approximation": approx}, meta)
    return 0
