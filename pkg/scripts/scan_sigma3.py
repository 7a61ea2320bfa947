"""Vanishing-sigma scan, dilute-species design.

A trace species (x2 ~ 1e-6) has Maxwell-Stefan mobility proportional to its
own density, so the relaxation of roughness in its composition field is
carried almost entirely by the sigma * I regularization channel; the
harvested regularization-flux norm then saturates the sqrt(sigma) bound.
A small smooth tilt stays frozen on the run's time scale and provides the
sigma-ordered Cauchy gaps of the final fields.
"""

import sys
import time

import numpy as np

from msmix import sim1d, thermo, transport
from msmix.gibbs import LogLaw


def main():
    n_cells = int(sys.argv[1]) if len(sys.argv) > 1 else 64
    t_end = float(sys.argv[2]) if len(sys.argv) > 2 else 1e-4
    sp = thermo.SpeciesSet(m=[1.0, 2.0], laws=(LogLaw(0.0, 1.0, 1.0), LogLaw(0.0, 1.0, 1.0)), p0=1.0)
    model = transport.FrictionModel(species=sp, f_c=1.0, p1=0.25, switch_width=0.5)

    def r2(x):
        zig = 0.7 * np.sign(np.sin(2 * np.pi * 16 * x))
        tilt = 0.25 * np.exp(-((x - 0.5) / 0.18) ** 2)
        return 1e-6 * np.exp(zig + tilt)

    def r1(x):
        return 1.0 - r2(x)

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
    print(f"dilute@{n_cells}: slope={slope:.3f} gaps={gaps[0]:.3e},{gaps[1]:.3e} "
          f"ratio={gaps[1]/max(gaps[0],1e-300):.3f} wg-ratios={wg[1]/wg[0]:.3f},{wg[2]/wg[1]:.3f}")


if __name__ == "__main__":
    main()
