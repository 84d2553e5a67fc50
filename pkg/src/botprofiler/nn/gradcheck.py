"""Central finite-difference verification of analytic gradients.

The checker only ever calls the loss function forward, so it is independent
of every backward pass it validates.
"""

from __future__ import annotations

import numpy as np

from ..errors import ToleranceExceeded


def grad_check(
    params: dict[str, np.ndarray],
    loss_and_grads,
    tolerance: float,
    n_samples: int = 200,
    step: float = 1e-5,
    rng: np.random.Generator | None = None,
) -> float:
    """Compare analytic gradients against central differences.

    params: live arrays the loss function reads (perturbed in place).
    loss_and_grads: () -> (loss, grads dict keyed like params).
    Checks at most n_samples randomly chosen coordinates across all
    parameters; raises ToleranceExceeded naming the worst coordinate if the
    max relative error passes the tolerance, else returns it.
    """
    rng = rng or np.random.default_rng(0)
    _, analytic = loss_and_grads()

    coords = []
    for name in sorted(params):
        coords.extend((name, i) for i in range(params[name].size))
    if len(coords) > n_samples:
        picked = rng.choice(len(coords), size=n_samples, replace=False)
        coords = [coords[i] for i in sorted(picked)]

    worst = (0.0, None, 0.0, 0.0)  # rel_err, coordinate, analytic, numeric
    for name, idx in coords:
        flat = params[name].reshape(-1)
        orig = flat[idx]
        flat[idx] = orig + step
        loss_plus = loss_and_grads()[0]
        flat[idx] = orig - step
        loss_minus = loss_and_grads()[0]
        flat[idx] = orig
        numeric = (loss_plus - loss_minus) / (2.0 * step)
        a = float(analytic[name].reshape(-1)[idx])
        rel = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
        if rel > worst[0]:
            worst = (rel, f"{name}[{idx}]", a, numeric)

    rel, coord, a, numeric = worst
    if rel > tolerance:
        raise ToleranceExceeded(
            f"gradient check failed at {coord}: analytic={a:.6e} "
            f"numeric={numeric:.6e} rel_err={rel:.3e} tol={tolerance:.1e}"
        )
    return rel
