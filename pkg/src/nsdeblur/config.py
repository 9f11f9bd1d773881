"""Solver configuration and per-run reports shared by the kernel-shape
and image optimizers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STOP_EPS = "eps_reached"
STOP_INCREASE = "residual_increased"
STOP_CAP = "iter_cap"
STOP_GATE = "lambda_gate_failed"

#: Smallest regularization weight tried before a run is declared gated out.
LAMBDA_FLOOR = 1e-5


@dataclass
class OptimizerConfig:
    """Knobs for the iterative optimizers.

    delta_t   relaxation (step) parameter of the image schemas
    lambda0   initial / maximum regularization weight
    q         number of leading iterations the contraction gate inspects
    theta     required contraction factor over those iterations
    eps       stop tolerance on the (mean or summed) squared step
    max_iters iteration cap
    alpha     scale constant inside the dynamic-weight seed formula
    """

    delta_t: float = 0.1
    lambda0: float = 0.01
    q: int = 3
    theta: float = 10.0
    eps: float = 1e-8
    max_iters: int = 20
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")
        if self.lambda0 <= 0:
            raise ValueError("lambda0 must be positive")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.theta < 1:
            raise ValueError("theta must be >= 1")
        if self.q < 1:
            raise ValueError("q must be >= 1")


@dataclass
class RunReport:
    """Per-iteration trace of one optimizer run.

    ``residual_trace[t]`` is the squared step size of iteration t+1 (mean
    over pixels for image runs, summed over taps for kernel runs);
    ``lambda_trace[t]`` the regularization weight used (mean pointwise
    weight for the curved-space schema).  ``convergence_ratio_max`` is the
    largest consecutive residual ratio after ``transition_iter``.
    """

    iterations: int
    residual_trace: np.ndarray
    lambda_trace: np.ndarray
    stop_reason: str
    convergence_ratio_max: float
    transition_iter: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.stop_reason == STOP_EPS


def make_report(residuals, lambdas, stop_reason: str,
                transition_iter: int = 0, extras: dict | None = None
                ) -> RunReport:
    """Assemble a report, deriving the post-transition ratio maximum."""
    res = np.asarray(residuals, dtype=np.float64)
    lam = np.asarray(lambdas, dtype=np.float64)
    if res.shape != lam.shape:
        raise ValueError("residual and lambda traces must have equal length")
    ratio_max = 0.0
    for t in range(max(transition_iter, 0), res.size - 1):
        if res[t] > 0:
            ratio_max = max(ratio_max, res[t + 1] / res[t])
    return RunReport(iterations=int(res.size), residual_trace=res,
                     lambda_trace=lam, stop_reason=stop_reason,
                     convergence_ratio_max=ratio_max,
                     transition_iter=transition_iter,
                     extras=extras or {})


def format_report(report: RunReport) -> str:
    """Plain-text iteration table: header, one line per iteration
    "k residual lambda", stop-reason trailer."""
    lines = ["k residual lambda"]
    for t in range(report.iterations):
        lines.append(f"{t + 1} {report.residual_trace[t]:.17g} "
                     f"{report.lambda_trace[t]:.17g}")
    lines.append(f"stop_reason: {report.stop_reason}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> RunReport:
    """Inverse of :func:`format_report`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split() != ["k", "residual", "lambda"]:
        raise ValueError("malformed report: missing header")
    if not lines[-1].startswith("stop_reason:"):
        raise ValueError("malformed report: missing stop_reason trailer")
    stop = lines[-1].split(":", 1)[1].strip()
    res, lam = [], []
    for ln in lines[1:-1]:
        _, r, l = ln.split()
        res.append(float(r))
        lam.append(float(l))
    return make_report(res, lam, stop)
