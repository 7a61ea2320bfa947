"""Scenario scan for the vanishing-regularization study.

Runs a candidate scenario at sigma in {1e-2, 1e-3, 1e-4} and reports the
log-log slope of ||jtilde||_L2 vs sigma, the L1 Cauchy gaps of the final
fields, and the w-gradient ratios.
"""

import sys
import time

import numpy as np

from msmix import sim1d, thermo, transport
from msmix.gibbs import LogLaw


def scenario(name, n_cells):
    sp = thermo.SpeciesSet(m=[1.0, 2.0], laws=(LogLaw(0.0, 1.0, 1.0), LogLaw(0.0, 1.0, 1.0)), p0=1.0)
    model = transport.FrictionModel(species=sp, f_c=1.0, p1=0.25, switch_width=0.5)
    wd = 2.5 / n_cells
    if name == "trace":
        # uniform total density, species 2 nearly absent on the right
        def r2(x):
            return np.exp(np.log(0.5) + (np.log(5e-10) - np.log(0.5)) * 0.5 * (1 + np.tanh((x - 0.5) / wd)))

        def r1(x):
            return 1.0 - r2(x)

        t_end = 0.06
    elif name == "expansion":
        def r1(x):
            return np.exp(np.log(0.7) + (np.log(0.01) - np.log(0.7)) * 0.5 * (1 + np.tanh((x - 0.5) / wd)))

        def r2(x):
            return np.exp(np.log(0.3) + (np.log(0.04) - np.log(0.3)) * 0.5 * (1 + np.tanh((x - 0.5) / wd)))

        t_end = 0.08
    elif name == "advected":
        # density contrast drives a rightward flow; species 2 vanishes rightward
        def r2(x):
            return np.exp(np.log(0.45) + (np.log(2e-9) - np.log(0.45)) * 0.5 * (1 + np.tanh((x - 0.45) / wd)))

        def r1(x):
            tot = np.exp(np.log(1.0) + (np.log(0.35) - np.log(1.0)) * 0.5 * (1 + np.tanh((x - 0.55) / wd)))
            return tot - r2(x)

        t_end = 0.25
    else:
        raise SystemExit(f"unknown scenario {name}")
    return sp, model, (r1, r2), t_end


def main():
    name = sys.argv[1] if len(sys.argv) > 1 else "trace"
    n_cells = int(sys.argv[2]) if len(sys.argv) > 2 else 64
    sp, model, profiles, t_end = scenario(name, n_cells)
    sigs = np.array([1e-2, 1e-3, 1e-4])
    finals, jt, wg = [], [], []
    for sig in sigs:
        cfg = sim1d.SimConfig(species=sp, friction=model, grid=sim1d.Grid1D(1.0, n_cells),
                              sigma_reg=float(sig), eta_shear=0.02, t_end=t_end,
                              audit_mode="track", floor_density=1e-13)
        t0 = time.time()
        st, led = sim1d.run(cfg, list(profiles))
        jt.append(np.sqrt(led.jtilde_l2_sq))
        wg.append(led.wgrad_l2_sq)
        finals.append(st.rho)
        print(f"  sigma={sig:g}: {time.time()-t0:.1f}s steps={st.step_index} "
              f"jtilde={jt[-1]:.4g} wgrad2={wg[-1]:.4g} floors={led.floor_activations} "
              f"maxv={np.abs(st.v).max():.3f} excess={led.audit_max_excess:.2e}")
    slope = np.polyfit(np.log(sigs), np.log(jt), 1)[0]
    gaps = [float(np.abs(finals[i] - finals[i + 1]).sum() / n_cells) for i in range(2)]
    print(f"{name}@{n_cells}: slope={slope:.3f} gaps={gaps[0]:.3e},{gaps[1]:.3e} "
          f"ratio={gaps[1]/max(gaps[0],1e-300):.3f} wg-ratios={wg[1]/wg[0]:.3f},{wg[2]/wg[1]:.3f}")


if __name__ == "__main__":
    main()
