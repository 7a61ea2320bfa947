"""Scenario configuration files.

Line-oriented ``key = value`` entries under ``[section]`` headers (the
INI subset understood by :mod:`configparser`).  Every key is validated
against the owning type before anything runs; unknown sections or keys are
rejected.  See ``configs/`` in the repository for shipped examples.
"""

import configparser
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .gibbs import BlendedLaw, LogLaw
from .sim1d import Grid1D, SimConfig
from .thermo import SpeciesSet
from .transport import FrictionModel

_KNOWN_KEYS = {
    "species": {"n", "masses", "p0", "law_kinds", "g0", "vbar0", "alpha", "m0", "m1"},
    "friction": {"f_c", "p1", "switch_width", "constant"},
    "sim": {"length", "n_cells", "cfl", "t_end", "sigma_reg", "eta_shear",
            "eta_bulk", "floor_density", "output_every", "audit_mode", "track_wgrad"},
    "forcing": {"b"},
    "init": {"kind", "rho", "v", "rho_left", "rho_right", "ramp_width",
             "rho_base", "rho_amplitude", "center", "width"},
    "output": {"csv"},
}
_REQUIRED_SECTIONS = ("species", "friction", "sim", "init")


@dataclass(frozen=True)
class Scenario:
    cfg: SimConfig
    rho_profiles: tuple
    v_profile: object
    csv_path: str
    raw: dict


def _floats(text, n=None, name=""):
    try:
        vals = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse numbers in '{name} = {text}'") from exc
    if n is not None:
        if len(vals) == 1:
            vals = vals * n
        if len(vals) != n:
            raise ConfigError(f"'{name}' needs {n} values, got {len(vals)}")
    return vals


def parse_file(path, overrides=()):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    data = {s: dict(parser.items(s)) for s in parser.sections()}
    for spec in overrides:
        if "=" not in spec or "." not in spec.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got '{spec}'")
        target, value = spec.split("=", 1)
        section, key = target.strip().split(".", 1)
        data.setdefault(section.strip(), {})[key.strip()] = value.strip()
    return build_scenario(data)


def build_scenario(data):
    for section in _REQUIRED_SECTIONS:
        if section not in data:
            raise ConfigError(f"missing required section [{section}]")
    for section, entries in data.items():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(entries) - _KNOWN_KEYS[section]
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")

    sp = _species(data["species"])
    fr = data["friction"]
    try:
        model = FrictionModel(
            species=sp,
            f_c=float(fr.get("f_c", 1.0)),
            p1=float(fr.get("p1", 0.25 * sp.p0)),
            switch_width=float(fr.get("switch_width", 0.5)),
            constant=fr.get("constant", "false").lower() in ("1", "true", "yes"),
        )
        sim = data["sim"]
        cfg = SimConfig(
            species=sp,
            friction=model,
            grid=Grid1D(length=float(sim.get("length", 1.0)), n_cells=int(sim.get("n_cells", 128))),
            sigma_reg=float(sim.get("sigma_reg", 1e-3)),
            eta_shear=float(sim.get("eta_shear", 0.05)),
            eta_bulk=float(sim.get("eta_bulk", 0.0)),
            body_force=np.array(_floats(data.get("forcing", {}).get("b", "0"), sp.n_species, "b")),
            cfl=float(sim.get("cfl", 0.4)),
            t_end=float(sim.get("t_end", 0.1)),
            output_every=float(sim.get("output_every", 0.0)),
            floor_density=float(sim.get("floor_density", 1e-12)),
            audit_mode=sim.get("audit_mode", "strict"),
            track_wgrad=sim.get("track_wgrad", "true").lower() in ("1", "true", "yes"),
        )
    except (ValueError, ConfigError) as exc:
        raise ConfigError(str(exc)) from exc

    rho_profiles, v_profile = _profiles(data["init"], sp.n_species)
    csv_path = data.get("output", {}).get("csv", "")
    return Scenario(cfg=cfg, rho_profiles=rho_profiles, v_profile=v_profile,
                    csv_path=csv_path, raw=data)


def _species(entries):
    try:
        n = int(entries["n"])
    except KeyError:
        raise ConfigError("[species] must set n")
    except ValueError as exc:
        raise ConfigError(f"bad species count: {exc}") from exc
    masses = _floats(entries.get("masses", "1.0"), n, "masses")
    p0 = float(entries.get("p0", 1.0))
    kinds = [k.strip().lower() for k in entries.get("law_kinds", "log").replace(",", " ").split()]
    if len(kinds) == 1:
        kinds = kinds * n
    if len(kinds) != n:
        raise ConfigError(f"law_kinds needs {n} entries")
    g0 = _floats(entries.get("g0", "0.0"), n, "g0")
    vbar0 = _floats(entries.get("vbar0", "1.0"), n, "vbar0")
    alpha = _floats(entries.get("alpha", "1.4"), n, "alpha")
    m0 = _floats(entries.get("m0", str(2.0 * p0)), n, "m0")
    m1 = _floats(entries.get("m1", str(20.0 * p0)), n, "m1")
    laws = []
    for j, kind in enumerate(kinds):
        try:
            if kind == "log":
                laws.append(LogLaw(g0=g0[j], vbar0=vbar0[j], p0=p0))
            elif kind == "blended":
                laws.append(BlendedLaw(vbar0=vbar0[j], p0=p0, alpha=alpha[j], m0=m0[j], m1=m1[j]))
            else:
                raise ConfigError(f"unknown law kind '{kind}'")
        except ValueError as exc:
            raise ConfigError(f"species {j + 1}: {exc}") from exc
    try:
        return SpeciesSet(m=np.array(masses), laws=tuple(laws), p0=p0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _profiles(entries, n):
    kind = entries.get("kind", "uniform").strip().lower()
    v_profile = None
    if "v" in entries:
        v0 = _floats(entries["v"], 1, "v")[0]
        v_profile = lambda x: np.full_like(x, v0)

    if kind == "uniform":
        rho = _floats(entries.get("rho", "1.0"), n, "rho")
        profiles = [(lambda x, r=r: np.full_like(x, r)) for r in rho]
    elif kind == "step":
        left = _floats(entries.get("rho_left", "1.0"), n, "rho_left")
        right = _floats(entries.get("rho_right", "1.0"), n, "rho_right")
        width = float(entries.get("ramp_width", 0.0))
        centre = float(entries.get("center", 0.5))

        def make(lo, hi):
            if width > 0.0:
                # geometric ramp keeps strong contrasts positive
                def f(x, lo=lo, hi=hi):
                    blend = 0.5 * (1.0 + np.tanh((x - centre) / width))
                    return np.exp(np.log(lo) + (np.log(hi) - np.log(lo)) * blend)
            else:
                def f(x, lo=lo, hi=hi):
                    return np.where(x < centre, lo, hi)
            return f

        profiles = [make(left[j], right[j]) for j in range(n)]
    elif kind == "gaussian":
        base = _floats(entries.get("rho_base", "0.5"), n, "rho_base")
        amp = _floats(entries.get("rho_amplitude", "0.1"), n, "rho_amplitude")
        centre = float(entries.get("center", 0.5))
        width = float(entries.get("width", 0.1))
        profiles = [
            (lambda x, b=base[j], a=amp[j]: b + a * np.exp(-((x - centre) / width) ** 2))
            for j in range(n)
        ]
    else:
        raise ConfigError(f"unknown init kind '{kind}'")
    return tuple(profiles), v_profile


def serialize(data):
    """Render the section dictionary back to config text (round-trippable)."""
    lines = []
    for section in sorted(data):
        lines.append(f"[{section}]")
        for key in sorted(data[section]):
            lines.append(f"{key} = {data[section][key]}")
        lines.append("")
    return "\n".join(lines)
