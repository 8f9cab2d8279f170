"""Fixed-step integration of the network dynamics."""

from ..dynamics import network_rhs


def rk4_step(lam, gamma, u, stack, alpha, dt):
    """Advance the network state by one classical 4-stage Runge-Kutta step,
    with the coupling input ``u`` held over the step.

    Parameter ``lam``, ``gamma`` (array[float]):
        Network state, shape ``(N, m)``.

    Parameter ``u`` (array[float]):
        Held coupling inputs, shape ``(N, m)``.

    Parameter ``stack`` (:class:`.CostStack`):
        Node costs.

    Parameter ``alpha`` (float):
        Dual gradient gain.

    Parameter ``dt`` (float):
        Step [s].

    Returns → tuple[array[float], array[float]]:
        Updated state.

    Raises → :class:`.DomainError`:
        If a stage evaluates :math:`h_i` outside its dual domain. The error
        names the offending node.
    """
    k1, _ = network_rhs(lam, gamma, u, stack, alpha)
    # The integral state rate is -u at every stage
    g2 = gamma - 0.5 * dt * u
    k2, _ = network_rhs(lam + 0.5 * dt * k1, g2, u, stack, alpha)
    k3, _ = network_rhs(lam + 0.5 * dt * k2, g2, u, stack, alpha)
    k4, _ = network_rhs(lam + dt * k3, gamma - dt * u, u, stack, alpha)

    lam_next = lam + (dt / 6.) * (k1 + 2. * k2 + 2. * k3 + k4)
    gamma_next = gamma - dt * u
    return lam_next, gamma_next
