import logging
from dataclasses import dataclass, field

import numpy as np

from utill.gen import make_rng
from .autodiff import ExpressionGraph

logger = logging.getLogger(__name__)


@dataclass
class ParamCheck:
    name: str
    max_rel_error: float
    passed: bool


@dataclass
class GradCheckReport:
    tolerance: float
    step: float
    params: dict[str, ParamCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.params.values())

    @property
    def max_rel_error(self) -> float:
        return max((p.max_rel_error for p in self.params.values()), default=0.0)

    def __repr__(self):
        worst = ', '.join(f'{p.name}={p.max_rel_error:.2e}' for p in self.params.values())
        return f'<GradCheckReport> passed={self.passed} [{worst}]'


def _value(graph: ExpressionGraph, output) -> float:
    (value,) = graph.evaluate(outputs=[output]).values()
    return float(value[0, 0])


def _margin(graph: ExpressionGraph) -> float:
    return min((n.op.margin(*(p.value for p in n.parents)) for n in graph.kinked()), default=np.inf)


def _clear_kinks(graph: ExpressionGraph, output, step: float, seed: int, max_tries: int):
    """jitter the parameters until every rectifier input and argmax gap is clear of its kink"""
    rng = make_rng(seed, 'jitter')
    for _ in range(max_tries):
        graph.evaluate(outputs=[output])
        if _margin(graph) >= 10 * step:
            return
        for leaf in graph.params.values():
            leaf.value = leaf.value + rng.normal(scale=1e-3, size=leaf.value.shape)
    graph.evaluate(outputs=[output])
    logger.debug('kink margin %.3g still below %.3g after %d jitters', _margin(graph), 10 * step, max_tries)


def finite_difference_check(graph: ExpressionGraph, output, inputs: dict | None = None,
                            step: float = 1e-5, tolerance: float = 1e-4, wrt=None,
                            abs_floor: float = 1e-6, perturb: bool = True, seed: int = 0,
                            max_tries: int = 20) -> GradCheckReport:
    """
    Compare reverse-mode gradients against central differences for every entry
    of every parameter leaf. Rectifier masks and argmax selections are pinned at
    the checked point so the finite difference stays on one smooth piece.
    """
    if step <= 0:
        raise ValueError('step must be positive')
    graph.bind(inputs)
    if perturb:
        _clear_kinks(graph, output, step, seed, max_tries)
    else:
        graph.evaluate(outputs=[output])
    kinked = graph.kinked()
    for n in kinked:
        n.op.pin(*(p.value for p in n.parents))
    report = GradCheckReport(tolerance, step)
    try:
        analytic = graph.gradients(output, wrt=wrt)
        for name, grad in analytic.items():
            leaf = graph.leaves[name]
            base = leaf.value.copy()
            numeric = np.zeros_like(base)
            for idx in np.ndindex(base.shape):
                bumped = base.copy()
                bumped[idx] += step
                leaf.value = bumped
                hi = _value(graph, output)
                bumped[idx] = base[idx] - step
                leaf.value = bumped
                lo = _value(graph, output)
                numeric[idx] = (hi - lo) / (2 * step)
            leaf.value = base
            denom = np.maximum(np.maximum(np.abs(grad), np.abs(numeric)), abs_floor)
            err = float((np.abs(grad - numeric) / denom).max()) if grad.size else 0.0
            report.params[name] = ParamCheck(name, err, err <= tolerance)
    finally:
        for n in kinked:
            n.op.pinned = None
        graph.evaluate(outputs=[output])
    logger.debug('%r', report)
    return report
