"""Vanishing-sigma scan, low-pressure rough-composition design.

At p << p1 the singular friction makes the Maxwell-Stefan mobility
negligible, so fine-scale composition roughness relaxes only through the
sigma * I regularization channel; its relaxation time then scales like
1/sigma and the regularization flux like sqrt(sigma).  A small smooth
composition tilt rides along to give the final-field Cauchy gaps a clean,
sigma-ordered signal.
"""

import sys
import time

import numpy as np

from msmix import sim1d, thermo, transport
from msmix.gibbs import LogLaw


def main():
    n_cells = int(sys.argv[1]) if len(sys.argv) > 1 else 64
    t_end = float(sys.argv[2]) if len(sys.argv) > 2 else 0.05
    p_base = 0.01
    sp = thermo.SpeciesSet(m=[1.0, 2.0], laws=(LogLaw(0.0, 1.0, 1.0), LogLaw(0.0, 1.0, 1.0)), p0=1.0)
    model = transport.FrictionModel(species=sp, f_c=1.0, p1=0.25, switch_width=0.5)

    def y2(x):
        zig = 0.6 * np.sign(np.sin(2 * np.pi * 16 * x))
        tilt = 0.1 * np.exp(-((x - 0.5) / 0.15) ** 2)
        return 0.3 * np.exp(zig + tilt)

    def r2(x):
        return p_base * y2(x)

    def r1(x):
        return p_base * (1.0 - y2(x))

    sigs = np.array([1e-2, 1e-3, 1e-4])
    finals, jt, wg = [], [], []
    for sig in sigs:
        cfg = sim1d.SimConfig(species=sp, friction=model, grid=sim1d.Grid1D(1.0, n_cells),
                              sigma_reg=float(sig), eta_shear=0.01, t_end=t_end,
                              audit_mode="track", floor_density=1e-14)
        t0 = time.time()
        st, led = sim1d.run(cfg, [r1, r2])
        jt.append(np.sqrt(led.jtilde_l2_sq))
        wg.append(led.wgrad_l2_sq)
        finals.append(st.rho)
        print(f"  sigma={sig:g}: {time.time()-t0:.1f}s steps={st.step_index} "
              f"jtilde={jt[-1]:.4g} wgrad2={wg[-1]:.4g} floors={led.floor_activations} "
              f"maxv={np.abs(st.v).max():.2e} excess={led.audit_max_excess:.2e}")
    slope = np.polyfit(np.log(sigs), np.log(jt), 1)[0]
    gaps = [float(np.abs(finals[i] - finals[i + 1]).sum() / n_cells) for i in range(2)]
    print(f"zigzag@{n_cells}: slope={slope:.3f} gaps={gaps[0]:.3e},{gaps[1]:.3e} "
          f"ratio={gaps[1]/max(gaps[0],1e-300):.3f} wg-ratios={wg[1]/wg[0]:.3f},{wg[2]/wg[1]:.3f}")


if __name__ == "__main__":
    main()
