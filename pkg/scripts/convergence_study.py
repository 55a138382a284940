"""Discretisation studies: stencil order of the ODE residual and the
Bethe-Peierls ratio against the channel-exponent detuning."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from efimov import ansatz3d, core, hyperradial as hr


@dataclass(frozen=True)
class StudyConfig:
    eta_star: float = 0.5
    steps: tuple[float, ...] = (0.04, 0.02, 0.01, 0.005, 0.0025)
    detunings: tuple[float, ...] = field(default=(0.0, 1e-4, 1e-3, 1e-2, 5e-2))


def residual_orders(cfg: StudyConfig, s) -> list[tuple[float, float]]:
    e = core.lossy_energy(0, core.ModelParams(cfg.eta_star), s)
    out = []
    for h in cfg.steps:
        r = np.linspace(0.5, 5.0, int(round(4.5 / h)) + 1)
        out.append((h, hr.ode_residual(hr.radial_wavefunction(e, r, s), s)))
    return out


def contact_ratios(cfg: StudyConfig, s) -> list[tuple[float, float]]:
    e = core.lossless_energy(0, s)
    out = []
    for d in cfg.detunings:
        trial = core.ChannelExponent((1 + d) * s.magnitude)
        _, ratio = ansatz3d.bethe_peierls_check((0.1, -0.2, 0.05), (0.7, 0.4, -0.3), e, trial)
        out.append((d, ratio))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eta", type=float, default=StudyConfig.eta_star)
    cfg = StudyConfig(eta_star=parser.parse_args().eta)
    s = core.channel_exponent()
    print("h        residual     ratio to previous")
    prev = None
    for h, res in residual_orders(cfg, s):
        print(f"{h:<8g} {res:.3e}    {'' if prev is None else f'{prev / res:.2f}'}")
        prev = res
    print("\ndetuning  constant-term ratio")
    for d, ratio in contact_ratios(cfg, s):
        print(f"{d:<9g} {ratio:.3e}")


if __name__ == "__main__":
    main()
