"""
Radial points of the Hamiltonian flow at the horizons
=====================================================

On the conormal bundle of a horizon the Hamiltonian vector field of the
reduced symbol is radial, with rate -2 kappa xi1.  Trajectories launched
slightly off the bundle approach it (sink) or leave it (source) at rate
2 |kappa|, with opposite behavior at the two horizons.
"""

import math

from kdsmodes.geometry import SpacetimeParams
from kdsmodes.microlocal import (CotangentPoint, conormal_check, default_conormal_samples,
                                 flow_bicharacteristic, radial_point_check)

params = SpacetimeParams(a=0.1, m=1.0, Lambda=0.02)

for which in ("event", "cosmological"):
    rep = radial_point_check(params, which, default_conormal_samples(32))
    cn = conormal_check(params, which)
    print(f"{which}: kappa_chart = {rep.kappa_chart:+.10f}")
    print(f"  H_p on N*: base {rep.max_base:.1e}, angular fiber {rep.max_angular_fiber:.1e}, "
          f"radial rel. error {rep.max_rel_error:.1e}")
    print(f"  characteristic set: min p/|xi_ang|^2 = {cn.angular_min_ratio:.4f}")
    print(f"  xi_r > 0 is a {rep.classification_for_xi_r(1.0)}, xi_r < 0 a {rep.classification_for_xi_r(-1.0)}")

    # two decades of the rescaled flow, started 1e-4 r_h off the horizon
    T = 2.0 * math.log(10.0) / (2.0 * abs(rep.kappa_chart))
    r_h = params.roots.radius(which)
    for sign in (1.0, -1.0):
        b = flow_bicharacteristic(params, which, CotangentPoint((1e-4 * r_h, 0.3, 1.0), (sign, 1e-3, 1e-3)), T)
        print(f"  xi1 = {sign:+.0f}: x1 rate {b.x1_rate:+.5f} (2|kappa| = {2 * abs(rep.kappa_chart):.5f}), "
              f"{b.classification}, p drift {b.p_drift:.1e}")
