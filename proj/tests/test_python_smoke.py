"""Smoke test of the python bindings against closed-form values."""

import math
import os
import sys

sys.path.insert(0, os.environ["NBSCATTER_CORE_DIR"])

import numpy as np  # noqa: E402

import _core as nb  # noqa: E402


def main():
    sys2 = nb.MassSystem([1.0, 1.0], 2)
    q = np.array([-1.0, 0.0, 1.0, 0.0])
    assert abs(nb.potential(q, sys2) - 0.5) < 1e-14

    # blow-up round trip
    xi = np.array([0.3, -0.1, -0.3, 0.1])
    x = nb.to_blowup(q, xi, sys2)
    q2, xi2 = nb.from_blowup(x, sys2)
    assert np.allclose(q, q2) and np.allclose(xi, xi2)
    assert abs(nb.blowup_energy(x, sys2) - nb.energy(q, xi, sys2)) < 1e-13

    # kepler pipeline: integrate from perihelion, recover the closed-form
    # scattering parameters
    orb = nb.KeplerOrbit.from_energy(2.0, 2.0, 2.0, 2.0)
    ksys = nb.kepler_system(orb)
    q0, xi0 = nb.kepler_state(orb, 0.0)
    opts = nb.IntegrateOptions()
    opts.max_step = 0.05
    opts.detect_convergence = True
    opts.convergence_sign = 1
    traj = nb.integrate(nb.to_blowup(q0, xi0, ksys), 0.0, 20.0, ksys, opts)
    assert traj.termination == nb.Termination.Converged
    eq = nb.detect_equilibrium(traj, ksys, nb.ToleranceSet())
    assert eq is not None
    mp = nb.extract_manifold_params(traj, eq, ksys)
    cp = nb.chazy_from_manifold(mp, ksys)
    ks = nb.kepler_scattering(orb)
    A_expect = nb.kepler_embed(orb, ks.Ap)
    assert ksys.norm(cp.A - A_expect) < 1e-6
    assert abs(mp.rho1 - 1.0) < 1e-6

    # first-order scattering formula: quadrature vs planar closed form
    sys3 = nb.MassSystem([1.0, 1.0, 1.0], 2)
    s0 = np.zeros(6)
    r = 1.0 / math.sqrt(3.0)
    for i in range(3):
        ang = math.pi / 2 + 2.0 * math.pi * i / 3.0
        s0[2 * i] = r * math.cos(ang)
        s0[2 * i + 1] = r * math.sin(ang)
    eta = nb.perp(s0, sys3)
    eta = eta / sys3.norm(eta)
    dq = nb.delta_A(s0, 2.0, eta, 1e-3, sys3)
    dp = nb.delta_A_planar(s0, 2.0, 1e-3, sys3)
    assert sys3.norm(dq - dp) < 1e-9

    # kernel of the integrated hessian
    rep = nb.dbar_kernel(s0, sys3)
    assert rep.dimension == 3 and not rep.collinear

    print("python smoke test passed")


if __name__ == "__main__":
    main()
