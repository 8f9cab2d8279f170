"""Storage functions and numerical passivity diagnostics.

The node subsystem maps the coupling input :math:`u_i` to the multiplier
error :math:`\\Delta\\lambda_i = \\lambda_i - \\lambda^*`. With the storage
function

.. math::

   V_i = \\frac{\\eta_i}{2} \\|z_i\\|^2 - \\Delta\\lambda_i^T \\Delta\\gamma_i
   + \\alpha \\left(J_i(\\lambda^*) - J_i(\\lambda_i)
   + (h_i(\\lambda^*) - d_i)^T \\Delta\\lambda_i\\right),
   \\quad z_i = \\dot\\lambda_i, \\quad \\eta_i = 2 l_i / \\alpha,

it satisfies :math:`\\dot V_i \\le \\Delta\\lambda_i^T u_i + (l_i^2/\\alpha^2)
\\|u_i\\|^2`. The functions of this module evaluate the storage and measure,
on recorded trajectories, how far the dissipation inequalities are from being
violated (a nonpositive residual means the inequality holds).

Trajectory integrals are evaluated over integrator steps with the step input
held, which is how the integrator applies it: input terms are integrated
exactly and state terms with the trapezoidal rule.
"""

import attr
import numpy as np

from .node import node_rhs
from ..util.exceptions import SchedulingError


def optimal_eta(l, alpha):
    """Storage coefficient :math:`\\eta_i = 2 l_i / \\alpha` minimising the
    passivity shortage."""
    return 2. * np.asarray(l, dtype=float) / alpha


@attr.s(frozen=True)
class PassivityProbe:
    """Storage evaluation of one node at one time.

    .. rubric:: Constructor arguments / instance attributes

    ``eta`` (float):
        Storage coefficient :math:`2 l_i / \\alpha`.

    ``kappa`` (float):
        Sampled storage coefficient :math:`T_s / 2` [s]; 0 without sampling.

    ``z`` (array[float]):
        Multiplier rate :math:`\\dot\\lambda_i`.

    ``V`` (float):
        Storage value.

    ``Vbar`` (float or None):
        Sampled storage value :math:`(V + \\kappa \\|z\\|^2) / T_s`; ``None``
        without sampling.
    """
    eta = attr.ib(converter=float)
    kappa = attr.ib(converter=float)
    z = attr.ib()
    V = attr.ib(converter=float)
    Vbar = attr.ib(default=None)


def _storage(z, dlam, dgamma, j_star, j, grad_j_star, eta, alpha):
    return (0.5 * eta * np.sum(z ** 2, axis=-1)
            - np.sum(dlam * dgamma, axis=-1)
            + alpha * (j_star - j + np.sum(grad_j_star * dlam, axis=-1)))


def storage_value(state, equilibrium, cost, alpha):
    """Storage :math:`V_i` of a node.

    Parameter ``state`` (:class:`.NodeState`):
        Node state.

    Parameter ``equilibrium`` (tuple):
        Pair :math:`(\\lambda^*, \\gamma^*_i)`.

    Parameter ``cost`` (:class:`.CostSpec`):
        Node cost.

    Parameter ``alpha`` (float):
        Dual gradient gain.

    Returns → float

    Raises → :class:`.DomainError`:
        If :math:`\\lambda_i` or :math:`\\lambda^*` lies outside the dual domain.
    """
    return probe(state, equilibrium, cost, alpha).V


def probe(state, equilibrium, cost, alpha, ts=0.):
    """Evaluate the storage of a node and return a :class:`PassivityProbe`.
    Arguments are those of :func:`storage_value`, plus the sampling period
    ``ts`` used for the sampled storage."""
    lam_star, gamma_star = (np.asarray(x, dtype=float) for x in equilibrium)
    dual = cost.dual()
    z, _ = node_rhs(state, np.zeros(state.dim), cost, alpha)
    eta = float(optimal_eta(cost.lipschitz, alpha))
    v = float(_storage(
        z,
        state.lam - lam_star,
        state.gamma - gamma_star,
        dual.value(lam_star),
        dual.value(state.lam),
        dual.gradient(lam_star),
        eta, alpha
    ))

    if ts > 0.:
        kappa = 0.5 * ts
        vbar = (v + kappa * float(z @ z)) / ts
    else:
        kappa, vbar = 0., None
    return PassivityProbe(eta=eta, kappa=kappa, z=z, V=v, Vbar=vbar)


def storage_values(lam, gamma, lam_star, gamma_star, stack, alpha, x=None):
    """Vectorised storage evaluation over all nodes.

    Parameter ``lam``, ``gamma`` (array[float]):
        Network state, shape ``(N, m)``.

    Parameter ``lam_star`` (array[float]):
        Optimal multiplier, shape ``(m,)``.

    Parameter ``gamma_star`` (array[float]):
        Equilibrium integral states, shape ``(N, m)``.

    Parameter ``stack`` (:class:`.CostStack`):
        Node costs.

    Parameter ``x`` (array[float] or None):
        Already computed :math:`h_i(\\lambda_i)` values, if available.

    Returns → tuple[array[float], array[float]]:
        Storage values, shape ``(N,)``, and multiplier rates :math:`z`,
        shape ``(N, m)``.
    """
    if x is None:
        x = stack.inverse_gradient(lam)
    lam_star_all = np.broadcast_to(lam_star, lam.shape)
    x_star = stack.inverse_gradient(lam_star_all)

    z = -alpha * (x - stack.demand) - gamma
    v = _storage(
        z,
        lam - lam_star_all,
        gamma - gamma_star,
        stack.dual_value(lam_star_all, x_star),
        stack.dual_value(lam, x),
        x_star - stack.demand,
        optimal_eta(stack.lipschitz, alpha),
        alpha
    )
    return v, z


# -- Trajectory diagnostics ----------------------------------------------------

def _node_series(traj, node):
    rec = traj.ra.at_node(node)
    t = rec.t.values
    if len(t) < 2:
        raise ValueError(f"dissipation checks need at least 2 recorded "
                         f"points, got {len(t)}")
    return (
        t,
        rec["lambda"].values - traj["lambda_star"].values,
        rec["u"].values,
        rec["z"].values,
        rec["V"].values,
        float(traj["lipschitz"].values[node]),
        float(traj.attrs["alpha"]),
    )


def sample_indices(t, ts):
    """Indices of the recorded times which are sampling instants
    :math:`k T_s`.

    Raises → :class:`.SchedulingError`:
        If a sampling instant within the recorded range is missing.
    """
    ratio = np.asarray(t, dtype=float) / ts
    on_grid = np.abs(ratio - np.round(ratio)) <= 1e-9 * np.maximum(1., np.abs(ratio))
    idx = np.flatnonzero(on_grid)
    expected = int(np.floor((t[-1] - t[0]) / ts + 1e-9)) + 1
    if len(idx) != expected or not len(idx) or idx[0] != 0:
        raise SchedulingError(f"trajectory is not aligned to the sampling grid "
                              f"(ts = {ts:g} s)")
    return idx


def _interval_integrals(t, dlam, u, z, idx):
    # Per interval [idx[k], idx[k+1]]: ∫ Δλᵀu, ∫ ‖u‖², ∫ ‖z‖²
    h = np.diff(t)
    step_supply = h * np.sum(u[:-1] * 0.5 * (dlam[:-1] + dlam[1:]), axis=-1)
    step_uu = h * np.sum(u[:-1] ** 2, axis=-1)
    zz = np.sum(z ** 2, axis=-1)
    step_zz = h * 0.5 * (zz[:-1] + zz[1:])

    def per_interval(values):
        cum = np.concatenate(([0.], np.cumsum(values)))
        return cum[idx[1:]] - cum[idx[:-1]]

    return per_interval(step_supply), per_interval(step_uu), per_interval(step_zz)


def ifp_residual_continuous(traj, node):
    """Largest violation of the integrated dissipation inequality

    .. math::

       V_i(t_2) - V_i(t_1) \\le \\int_{t_1}^{t_2} \\Delta\\lambda_i^T u_i
       + \\frac{l_i^2}{\\alpha^2} \\|u_i\\|^2 \\, \\mathrm{d}t

    over consecutive recorded points.

    Parameter ``traj`` (:class:`~xarray.Dataset`):
        Recorded trajectory.

    Parameter ``node`` (int):
        Node index.

    Returns → float:
        Residual; nonpositive up to quadrature error when the inequality holds.
    """
    t, dlam, u, z, v, l, alpha = _node_series(traj, node)
    idx = np.arange(len(t))
    supply, uu, _ = _interval_integrals(t, dlam, u, z, idx)
    residual = np.diff(v) - supply - (l ** 2 / alpha ** 2) * uu
    return float(residual.max())


def ifp_residual_sampled(traj, node, ts=None):
    """Largest violation of the sampled dissipation inequality

    .. math::

       \\bar V_i(k+1) - \\bar V_i(k) \\le \\Delta\\bar\\lambda_i(k)^T
       \\bar u_i(k) + \\left(\\frac{l_i^2}{\\alpha^2}
       + T_s \\frac{l_i}{\\alpha}\\right) \\|\\bar u_i(k)\\|^2

    with :math:`\\bar V_i = (V_i + (T_s/2) \\|z_i\\|^2) / T_s`, over
    consecutive sampling instants.

    Parameter ``ts`` (float or None):
        Sampling period [s]. If ``None``, the trajectory's ``ts`` attribute
        is used.

    Raises → :class:`.SchedulingError`:
        If the trajectory is not recorded at every sampling instant.
    """
    t, dlam, u, z, v, l, alpha = _node_series(traj, node)
    if ts is None:
        ts = float(traj.attrs["ts"])
    idx = sample_indices(t, ts)
    if len(idx) < 2:
        raise ValueError("sampled dissipation check needs at least 2 "
                         "sampling instants")

    vbar = (v[idx] + 0.5 * ts * np.sum(z[idx] ** 2, axis=-1)) / ts
    ubar = u[idx[:-1]]
    supply = (np.sum(dlam[idx[:-1]] * ubar, axis=-1)
              + (l ** 2 / alpha ** 2 + ts * l / alpha) * np.sum(ubar ** 2, axis=-1))
    return float((np.diff(vbar) - supply).max())


def z_gain_check(traj, node, ts=None):
    """Largest violation of the rate gain inequality

    .. math::

       \\frac{l_i}{\\alpha} \\left(\\|z_i(t_2)\\|^2 - \\|z_i(t_1)\\|^2\\right)
       \\le \\frac{l_i^2}{\\alpha^2} \\int_{t_1}^{t_2} \\|u_i\\|^2 \\, \\mathrm{d}t
       - \\int_{t_1}^{t_2} \\|z_i\\|^2 \\, \\mathrm{d}t

    over sampling intervals, or over consecutive recorded points if ``ts`` is
    0 or the trajectory has no sampling period.
    """
    t, dlam, u, z, _, l, alpha = _node_series(traj, node)
    if ts is None:
        ts = float(traj.attrs.get("ts", 0.))
    idx = sample_indices(t, ts) if ts > 0. else np.arange(len(t))
    _, uu, zz = _interval_integrals(t, dlam, u, z, idx)
    zn = np.sum(z[idx] ** 2, axis=-1)
    residual = (l / alpha) * np.diff(zn) - (l ** 2 / alpha ** 2) * uu + zz
    return float(residual.max())
