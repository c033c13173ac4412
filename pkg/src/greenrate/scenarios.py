"""Scenario model: parse, validate, and run batch sweeps to CSV.

Scenario files are TOML.  All quantities are in reduced units: frequencies
in the scenario's reference frequency omega_ref, lengths in the reference
wavelength lambda_ref = 2*pi*c/omega_ref.  For SI output the scenario must
state omega_ref_si (rad/s) so the runner can convert.

A scenario holds one geometry (bulk, halfspace, layers, or sphere), named
materials, a dipole configuration, exactly one sweep variable, and an
output block.  Optional variants rerun the sweep with dotted-key overrides
(e.g. "materials.medium.gamma" = 1e-3) and add one column group per
variant.

Every kernel evaluation first produces the raw pair (environment quantity,
reference quantity), where the reference is the same configuration with the
embedding medium (source layer, sphere exterior, or vacuum for bulk runs)
filling all space.  Normalizations are applied on top: the default
free_space_ratio is the dimensionless environment/reference ratio the
figure scenarios plot.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import bulk as bulkmod
from . import layered, rates, sphere
from .constants import C_REDUCED, C_SI, EPS0_SI, HBAR_SI
from .engine import Bulk
from .errors import ConvergenceError, ScenarioError
from .media import Constant, DrudeLorentz, Tabulated, evaluate, wavenumber
from .quadrature import QuadratureSpec

_EX = np.array([1.0, 0.0, 0.0])
_EY = np.array([0.0, 1.0, 0.0])
_EZ = np.array([0.0, 0.0, 1.0])

KINDS = ("bulk", "halfspace", "layers", "sphere")
KERNELS = ("transfer", "decay", "both", "spectrum", "total_rate")
NORMALIZATIONS = ("free_space_ratio", "paper_fig3_units", "SI")
SWEEP_VARS = ("omega", "rx", "z", "d_cavity")
PARTS = ("full", "propagating", "evanescent")

_PRESET_INFO = {
    "fig_into": "half-space, z dipoles: transfer and decay kernels vs omega for three damping values",
    "fig_intR": "half-space: transfer kernel vs lateral distance at the surface-wave frequency",
    "fig_intz": "half-space: transfer kernel vs molecule-surface distance, split by wave type",
    "fig_barnes1": "4- and 5-layer cavities: orientation-averaged decay and transfer vs cavity length",
    "fig_barnes2": "5-layer cavity: transfer vs cavity length for several lateral offsets",
    "fig_sph": "microsphere, radial dipoles at diametral points: transfer kernel vs omega",
}


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def load_scenario_text(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"TOML parse error: {exc}") from exc


def load_scenario(path: str) -> dict:
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ScenarioError(f"{path}: TOML parse error: {exc}") from exc


def list_presets() -> dict:
    return dict(_PRESET_INFO)


def preset_text(name: str) -> str:
    if name not in _PRESET_INFO:
        raise ScenarioError(
            f"unknown preset {name!r}; available: {', '.join(sorted(_PRESET_INFO))}"
        )
    from importlib import resources

    return (resources.files("greenrate") / "presets" / f"{name}.toml").read_text()


def _apply_overrides(data: dict, overrides: dict) -> dict:
    out = copy.deepcopy(data)
    for dotted, value in overrides.items():
        node = out
        parts = dotted.split(".")
        for key in parts[:-1]:
            node = node.setdefault(key, {})
        node[parts[-1]] = copy.deepcopy(value)
    return out


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def _build_material(name: str, spec: dict):
    model = spec.get("model")
    if model == "constant":
        return Constant(complex(spec.get("eps_re", 1.0), spec.get("eps_im", 0.0)))
    if model == "drude_lorentz":
        return DrudeLorentz(
            omega_p=float(spec["omega_p"]),
            omega_t=float(spec["omega_t"]),
            gamma=float(spec["gamma"]),
        )
    if model == "tabulated":
        pts = list(
            zip(
                spec["omega"],
                (complex(r, i) for r, i in zip(spec["eps_re"], spec["eps_im"])),
            )
        )
        return Tabulated(pts)
    raise ScenarioError(f"material {name!r}: unknown model {model!r}")


def _materials(data: dict) -> dict:
    out = {}
    for name, spec in data.get("materials", {}).items():
        try:
            out[name] = _build_material(name, spec)
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"material {name!r}: {exc}") from exc
    return out


def _thickness(raw, d_cavity):
    if raw in ("inf", "INF", math.inf):
        return math.inf
    if raw == "d":
        if d_cavity is None:
            raise ScenarioError("stack thickness 'd' requires a d_cavity sweep value")
        return float(d_cavity)
    return float(raw)


def _build_stack(data: dict, mats: dict, d_cavity=None) -> layered.LayeredStack:
    geo = data["geometry"]
    if data["scenario"]["kind"] == "halfspace":
        entries = [[geo["upper"], "inf"], [geo["lower"], "inf"]]
        source = 0
    else:
        entries = geo["stack"]
        source = int(geo["source_layer"])
    layers = []
    for mat_name, thick in entries:
        if mat_name not in mats:
            raise ScenarioError(f"geometry references undefined material {mat_name!r}")
        layers.append(layered.Layer(mats[mat_name], _thickness(thick, d_cavity)))
    return layered.LayeredStack(layers=tuple(layers), source_layer=source)


def _build_sphere(data: dict, mats: dict) -> sphere.SphereGeometry:
    geo = data["geometry"]
    for key in ("outside", "inside"):
        if geo.get(key) not in mats:
            raise ScenarioError(f"geometry references undefined material {geo.get(key)!r}")
    return sphere.SphereGeometry(
        radius=float(geo["radius"]),
        outside=mats[geo["outside"]],
        inside=mats[geo["inside"]],
    )


def _planar_positions(data, stack, sweep_var, value):
    dip = data.get("dipoles", {})
    d_j = stack.source_thickness

    def resolve(spec, offset):
        base = d_j / 2.0 if spec == "mid" else float(spec)
        return base + float(offset)

    z_a = resolve(dip.get("z_a", "mid"), dip.get("z_a_offset", 0.0))
    z_b = resolve(dip.get("z_b", "mid"), dip.get("z_b_offset", 0.0))
    rx = float(dip.get("rx", 0.0))
    if sweep_var == "z":
        z_a = z_b = float(value)
    elif sweep_var == "rx":
        rx = float(value)
    return layered.InLayerPositions(z_a=z_a, z_b=z_b, rx=rx)


def _orientations(data):
    name = data.get("dipoles", {}).get("orientation", "z")
    if name == "z":
        return _EZ
    if name == "x":
        return _EX
    if name == "isotropic":
        return None
    raise ScenarioError(f"unknown orientation {name!r} (use z, x, or isotropic)")


def _sweep_values(data) -> np.ndarray:
    sw = data["sweep"]
    n = int(sw["points"])
    if n == 1:
        return np.array([float(sw["start"])])
    if sw.get("scale", "linear") == "log":
        return np.geomspace(float(sw["start"]), float(sw["stop"]), n)
    return np.linspace(float(sw["start"]), float(sw["stop"]), n)


def _line_set(spec: dict) -> rates.LineSet:
    lines = tuple(zip(spec["centers"], spec["weights"]))
    return rates.LineSet(
        lines=lines,
        width=float(spec["width"]),
        allow_unnormalized=bool(spec.get("allow_unnormalized", False)),
    )


def _qspec(data, rel_tol=None):
    tol = data.get("tolerances", {})
    return QuadratureSpec(
        rel_tol=float(rel_tol if rel_tol is not None else tol.get("rel_tol", 1e-8)),
        abs_tol=float(tol.get("abs_tol", 1e-12)),
        max_subdivisions=int(tol.get("max_subdivisions", 2000)),
    )


# ---------------------------------------------------------------------------
# Raw point evaluation: (environment quantity, reference quantity, error)
#
# transfer quantities are |projected coupling|^2 (or the isotropic average
# sum |G_ij|^2/9); decay quantities are the coincidence Im projection.
# ---------------------------------------------------------------------------

def _raw_transfer(data, mats, omega, sweep_var, value, part, spec):
    kind = data["scenario"]["kind"]
    if kind in ("halfspace", "layers"):
        d_cav = value if sweep_var == "d_cavity" else None
        stack = _build_stack(data, mats, d_cavity=d_cav)
        pos = _planar_positions(data, stack, sweep_var, value)
        stack.validate_positions(pos)
        if data["geometry"].get("method", "exact") == "asymptotic":
            eps1 = complex(evaluate(stack.layers[0].material, omega))
            eps2 = complex(evaluate(stack.layers[1].material, omega))
            res = layered.interface_asymptotic(
                eps1.real, eps2, pos.z_a, pos.z_b, pos.rx, omega
            )
            g_refl, err = res.tensor, 0.0
        else:
            res = layered.refl_green(stack, pos, omega, part=part, spec=spec)
            g_refl, err = res.tensor, res.error
        eps_src = complex(evaluate(stack.layers[stack.source_layer].material, omega))
        r_b = np.array([pos.rx, 0.0, pos.rz])
        if not np.any(r_b):
            raise ScenarioError("transfer output needs distinct donor/acceptor positions")
        g_bulk = bulkmod.bulk_tensor(r_b, np.zeros(3), eps_src, omega)
        d_hat = _orientations(data)
        if d_hat is None:
            tot = float(np.sum(np.abs(g_bulk + g_refl) ** 2)) / 9.0
            ref = float(np.sum(np.abs(g_bulk) ** 2)) / 9.0
        else:
            tot = abs(complex(d_hat @ (g_bulk + g_refl) @ d_hat)) ** 2
            ref = abs(complex(d_hat @ g_bulk @ d_hat)) ** 2
        return tot, ref, err

    if kind == "sphere":
        geom = _build_sphere(data, mats)
        dip = data["dipoles"]
        r_a, r_b = float(dip["r_a"]), float(dip["r_b"])
        theta = float(dip.get("theta_b", math.pi))
        pos = sphere.SpherePositions(r_a=r_a, r_b=r_b, theta_b=theta)
        family = dip.get("orientation", "radial")
        if family == "radial":
            refl = sphere.sphere_refl_radial(omega, geom, pos)
            da = _EZ
            db = np.array([math.sin(theta), 0.0, math.cos(theta)])
        elif family == "tangential":
            refl = sphere.sphere_refl_tangential(omega, geom, pos)
            da = db = _EY
        else:
            raise ScenarioError(
                f"sphere orientation must be radial|tangential, got {family!r}"
            )
        eps_out = complex(evaluate(geom.outside, omega))
        va = np.array([0.0, 0.0, r_a])
        vb = r_b * np.array([math.sin(theta), 0.0, math.cos(theta)])
        proj_bulk = complex(db @ bulkmod.bulk_tensor(vb, va, eps_out, omega) @ da)
        return abs(proj_bulk + refl) ** 2, abs(proj_bulk) ** 2, 0.0

    # bulk: reference is the same pair in vacuum
    geo = data["geometry"]
    dip = data.get("dipoles", {})
    rx = float(value) if sweep_var == "rx" else float(dip.get("rx", 1.0))
    da = np.asarray(dip.get("orientation_a", [0, 0, 1]), dtype=float)
    db = np.asarray(dip.get("orientation_b", [0, 0, 1]), dtype=float)
    eps = complex(evaluate(mats[geo["medium"]], omega))
    r_vec = np.array([rx, 0.0, 0.0])
    g = bulkmod.bulk_tensor(r_vec, np.zeros(3), eps, omega)
    g_ref = bulkmod.bulk_tensor(r_vec, np.zeros(3), 1.0 + 0j, omega)
    return abs(complex(db @ g @ da)) ** 2, abs(complex(db @ g_ref @ da)) ** 2, 0.0


def _raw_decay(data, mats, omega, sweep_var, value, spec):
    kind = data["scenario"]["kind"]
    if kind in ("halfspace", "layers"):
        d_cav = value if sweep_var == "d_cavity" else None
        stack = _build_stack(data, mats, d_cavity=d_cav)
        pos = _planar_positions(data, stack, sweep_var, value)
        pos_c = layered.InLayerPositions(z_a=pos.z_a, z_b=pos.z_a, rx=0.0)
        stack.validate_positions(pos_c)
        refl = layered.refl_green(stack, pos_c, omega, spec=spec)
        eps_src = complex(evaluate(stack.layers[stack.source_layer].material, omega))
        im_free = bulkmod.bulk_coincidence_im(eps_src, omega)
        d_hat = _orientations(data)
        if d_hat is None:
            im_refl = float(np.trace(refl.tensor).imag) / 3.0
        else:
            im_refl = float((d_hat @ refl.tensor @ d_hat).imag)
        return im_free + im_refl, im_free, refl.error

    if kind == "sphere":
        geom = _build_sphere(data, mats)
        dip = data["dipoles"]
        r_a = float(dip["r_a"])
        pos = sphere.SpherePositions(r_a=r_a, r_b=r_a, theta_b=0.0)
        family = dip.get("orientation", "radial")
        series = (
            sphere.sphere_refl_radial(omega, geom, pos)
            if family == "radial"
            else sphere.sphere_refl_tangential(omega, geom, pos)
        )
        eps_out = complex(evaluate(geom.outside, omega))
        im_free = bulkmod.bulk_coincidence_im(eps_out, omega)
        return im_free + series.imag, im_free, 0.0

    eps = complex(evaluate(mats[data["geometry"]["medium"]], omega))
    return (
        bulkmod.bulk_coincidence_im(eps, omega),
        bulkmod.bulk_coincidence_im(1.0 + 0j, omega),
        0.0,
    )


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def _si_scales(data):
    om_ref = data["scenario"].get("omega_ref_si")
    if om_ref is None:
        raise ScenarioError("normalization 'SI' requires scenario.omega_ref_si (rad/s)")
    om_ref = float(om_ref)
    return om_ref, 2.0 * math.pi * C_SI / om_ref


def _norm_transfer(data, tot, ref, omega):
    norm = data["output"].get("normalization", "free_space_ratio")
    if norm == "free_space_ratio":
        return tot / ref
    if norm == "paper_fig3_units":
        # kernel in units (|d_A d_B| omega^3/(hbar eps0 c^3))^2 / (8 pi)
        return 16.0 * math.pi**2 * C_REDUCED**2 * tot / omega**2
    om_ref, lam_ref = _si_scales(data)
    dip = data.get("dipoles", {})
    mag_a = float(dip.get("mag_a_si", 1.0))
    mag_b = float(dip.get("mag_b_si", 1.0))
    return rates.transfer_kernel(
        math.sqrt(tot) / lam_ref,
        mag_a,
        mag_b,
        omega * om_ref,
        hbar=HBAR_SI,
        eps0=EPS0_SI,
        c=C_SI,
    )


def _norm_decay(data, tot, ref, omega):
    norm = data["output"].get("normalization", "free_space_ratio")
    if norm == "free_space_ratio":
        return tot / ref
    if norm == "paper_fig3_units":
        raise ScenarioError("paper_fig3_units applies to the transfer kernel only")
    om_ref, lam_ref = _si_scales(data)
    mag_a = float(data.get("dipoles", {}).get("mag_a_si", 1.0))
    return rates.decay_kernel(
        tot / lam_ref, mag_a, omega * om_ref, hbar=HBAR_SI, eps0=EPS0_SI, c=C_SI
    )


def _eval_point(data, mats, kernel, part, sweep_var, value, rel_tol):
    omega = float(value) if sweep_var == "omega" else float(data["scenario"]["omega"])
    spec = _qspec(data, rel_tol)
    if kernel == "transfer":
        tot, ref, err = _raw_transfer(data, mats, omega, sweep_var, value, part, spec)
        return _norm_transfer(data, tot, ref, omega), err
    if kernel == "decay":
        tot, ref, err = _raw_decay(data, mats, omega, sweep_var, value, spec)
        return _norm_decay(data, tot, ref, omega), err
    raise ScenarioError(f"unsupported kernel {kernel!r}")


# ---------------------------------------------------------------------------
# Spectrum and total-rate outputs
# ---------------------------------------------------------------------------

def _spectrum_column(variant_data, mats, omega_grid):
    dip = variant_data.get("dipoles", {})
    kind = variant_data["scenario"]["kind"]
    if kind == "bulk":
        geometry = Bulk(mats[variant_data["geometry"]["medium"]])
    elif kind in ("halfspace", "layers"):
        geometry = _build_stack(variant_data, mats)
    else:
        raise ScenarioError("spectrum output supports bulk and planar geometries")
    mol = _line_set(variant_data["spectra"]["emission"])
    r_a = np.asarray(dip.get("position_a", [0.0, 0.0, 0.0]), dtype=float)
    r_obs = np.asarray(dip["observation"], dtype=float)
    d_hat = _orientations(variant_data)
    if d_hat is None:
        raise ScenarioError("spectrum output needs a fixed dipole orientation")
    mag = float(dip.get("mag_a", 1.0))
    return rates.emission_spectrum(omega_grid, mol, r_obs, r_a, mag * d_hat, geometry)


def _total_rate_point(data, mats, sweep_var, value, rel_tol):
    """Total-rate ratio: overlap rate in the environment over the reference.

    With [spectra.absorption] present this is the transfer rate (kernel
    folded with emission and absorption); otherwise the donor decay rate
    (kernel folded with emission only).
    """
    spectra = data["spectra"]
    emission = _line_set(spectra["emission"])
    absorption = _line_set(spectra["absorption"]) if "absorption" in spectra else None
    kernel = "transfer" if absorption is not None else "decay"
    raw = _raw_transfer if kernel == "transfer" else _raw_decay

    sets = [s for s in (emission, absorption) if s is not None]
    width = max(s.width for s in sets)
    centers = np.concatenate([s.centers for s in sets])
    lo = max(1e-9, float(centers.min()) - 15 * width)
    hi = float(centers.max()) + 15 * width
    n = int(data["output"].get("curve_points", 121))
    grid = np.linspace(lo, hi, n)

    spec = _qspec(data, rel_tol)
    tot = np.empty(n)
    ref = np.empty(n)
    err_max = 0.0
    for i, om in enumerate(grid):
        if kernel == "transfer":
            t, r, err = raw(data, mats, float(om), sweep_var, value, "full", spec)
            pref = (float(om) ** 2 / C_REDUCED**2) ** 2  # omega-dependence of the kernel
        else:
            t, r, err = raw(data, mats, float(om), sweep_var, value, spec)
            pref = float(om) ** 2 / C_REDUCED**2
        tot[i], ref[i] = pref * t, pref * r
        err_max = max(err_max, err)

    curve_t = rates.KernelCurve(grid, tot)
    curve_r = rates.KernelCurve(grid, ref)
    if kernel == "transfer":
        w_t = rates.total_transfer_rate(curve_t, emission, absorption)
        w_r = rates.total_transfer_rate(curve_r, emission, absorption)
    else:
        w_t = rates.total_decay_rate(curve_t, emission)
        w_r = rates.total_decay_rate(curve_r, emission)
    norm = data["output"].get("normalization", "free_space_ratio")
    if norm != "free_space_ratio":
        raise ScenarioError("total_rate output supports free_space_ratio normalization")
    return w_t / w_r, err_max


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_scenario(data: dict) -> list:
    """Schema plus physics validation without running sweeps.

    Returns the list of violations (empty for a well-formed scenario).
    """
    v = []
    sc = data.get("scenario")
    if not isinstance(sc, dict):
        return ["missing [scenario] table"]
    kind = sc.get("kind")
    if kind not in KINDS:
        return [f"scenario.kind must be one of {KINDS}, got {kind!r}"]

    try:
        mats = _materials(data)
    except ScenarioError as exc:
        return [str(exc)]
    for name, spec in data.get("materials", {}).items():
        if spec.get("model") == "drude_lorentz" and float(spec.get("gamma", 0.0)) <= 0:
            v.append(
                f"material {name!r}: gamma must be > 0 (positive material loss keeps "
                "guided-mode poles off the integration path)"
            )

    sweep = data.get("sweep")
    if not isinstance(sweep, dict):
        v.append("missing [sweep] table")
        return v
    var = sweep.get("variable")
    if var not in SWEEP_VARS:
        v.append(f"sweep.variable must be one of {SWEEP_VARS}, got {var!r}")
        return v
    if "start" not in sweep or "points" not in sweep:
        v.append("sweep.start and sweep.points are required")
        return v
    if int(sweep["points"]) > 1 and "stop" not in sweep:
        v.append("sweep.stop is required for multi-point sweeps")
        return v
    if float(sweep["start"]) <= 0 and var in ("omega", "z", "d_cavity"):
        v.append(f"sweep over {var} must stay positive")
    if sweep.get("scale", "linear") not in ("linear", "log"):
        v.append("sweep.scale must be linear|log")
    if sweep.get("scale") == "log" and float(sweep["start"]) <= 0:
        v.append("log sweeps need start > 0")

    out = data.get("output", {})
    kernel = out.get("kernel", "transfer")
    if kernel not in KERNELS:
        v.append(f"output.kernel must be one of {KERNELS}, got {kernel!r}")
        return v
    norm = out.get("normalization", "free_space_ratio")
    if norm not in NORMALIZATIONS:
        v.append(f"output.normalization must be one of {NORMALIZATIONS}, got {norm!r}")
    if norm == "paper_fig3_units" and kernel != "transfer":
        v.append("paper_fig3_units normalization applies to the transfer kernel only")
    if norm == "SI" and "omega_ref_si" not in sc:
        v.append("SI normalization requires scenario.omega_ref_si (rad/s)")
    for part in out.get("parts", ["full"]):
        if part not in PARTS:
            v.append(f"output.parts entries must be in {PARTS}, got {part!r}")
    if out.get("parts") and kind not in ("halfspace", "layers"):
        v.append("output.parts (wave-type split) applies to planar geometries only")
    if kernel == "spectrum" and var != "omega":
        v.append("spectrum output sweeps the observation frequency: sweep.variable must be omega")
    if kernel == "total_rate" and var == "omega":
        v.append("total_rate output integrates over omega: sweep a geometry variable instead")
    if kernel in ("spectrum", "total_rate") and "spectra" not in data:
        v.append(f"{kernel} output requires a [spectra] section")
    if var != "omega" and kernel != "total_rate" and "omega" not in sc:
        v.append("scenario.omega is required when the sweep variable is not omega")

    geo = data.get("geometry", {})
    try:
        if kind in ("halfspace", "layers"):
            d_probe = float(sweep["start"]) if var == "d_cavity" else None
            stack = _build_stack(data, mats, d_cavity=d_probe)
            pos = _planar_positions(data, stack, var, float(sweep["start"]))
            stack.validate_positions(pos)
            if geo.get("method", "exact") == "asymptotic":
                if kind != "halfspace":
                    v.append("asymptotic method is defined for half-space geometries only")
                else:
                    om_max = (
                        max(float(sweep["start"]), float(sweep.get("stop", sweep["start"])))
                        if var == "omega"
                        else float(sc["omega"])
                    )
                    k1 = abs(complex(wavenumber(mats[geo["upper"]], om_max)))
                    if k1 * (pos.z_a + pos.z_b) >= 0.5 or k1 * pos.rx >= 0.5:
                        v.append(
                            "asymptotic method outside its validity bounds: "
                            "k1*(z_a+z_b) and k1*rx must stay below 0.5"
                        )
        elif kind == "sphere":
            geom = _build_sphere(data, mats)
            dip = data.get("dipoles", {})
            for key in ("r_a", "r_b"):
                if float(dip.get(key, 0.0)) <= geom.radius:
                    v.append(
                        f"dipoles.{key} = {dip.get(key)!r} lies inside the sphere "
                        f"(radius {geom.radius}): both dipoles must satisfy r > radius"
                    )
            th = float(dip.get("theta_b", math.pi))
            if not 0.0 <= th <= math.pi:
                v.append("dipoles.theta_b must lie in [0, pi]")
        elif kind == "bulk":
            if geo.get("medium") not in mats:
                v.append(f"geometry.medium {geo.get('medium')!r} is not a defined material")
    except (ScenarioError, ValueError) as exc:
        v.append(str(exc))

    for variant in data.get("variants", []):
        label = variant.get("label")
        if not label:
            v.append("every [[variants]] entry needs a label")
            continue
        if variant.get("overrides"):
            patched = _apply_overrides(data, variant["overrides"])
            patched.pop("variants", None)
            v.extend(f"variant {label!r}: {msg}" for msg in validate_scenario(patched))
    return v


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    columns: list
    sweep_name: str
    sweep_values: np.ndarray
    table: np.ndarray  # (n_points, n_columns)
    err_max: float
    header: list = field(default_factory=list)
    summary: str = ""


def _variant_datas(data):
    variants = data.get("variants") or [{"label": None, "overrides": {}}]
    out = []
    for variant in variants:
        patched = _apply_overrides(data, variant.get("overrides", {}))
        patched.pop("variants", None)
        out.append((variant.get("label"), patched))
    return out


def _column_plan(data):
    """[(column name, variant label, kernel, part)] in output order."""
    kernel = data["output"].get("kernel", "transfer")
    kernels = ["transfer", "decay"] if kernel == "both" else [kernel]
    parts = data["output"].get("parts", ["full"])
    cols = []
    for label, _ in _variant_datas(data):
        for kern in kernels:
            for part in parts if kern == "transfer" else ["full"]:
                name = kern
                if part != "full":
                    name += f"_{part}"
                if label:
                    name += f"_{label}"
                cols.append((name, label, kern, part))
    return cols


def _point_task(args):
    data, kernel, part, sweep_var, value, rel_tol = args
    mats = _materials(data)
    try:
        if kernel == "total_rate":
            return _total_rate_point(data, mats, sweep_var, value, rel_tol)
        return _eval_point(data, mats, kernel, part, sweep_var, value, rel_tol)
    except ConvergenceError as exc:
        raise ConvergenceError(
            f"at sweep point {sweep_var} = {value:g} ({kernel}): {exc}",
            value=exc.value,
            estimate=exc.estimate,
        ) from exc


def run_scenario(data: dict, rel_tol=None, workers: int = 1) -> RunResult:
    """Run all sweep columns; output order is deterministic regardless of workers."""
    violations = validate_scenario(data)
    if violations:
        raise ScenarioError("invalid scenario:\n  " + "\n  ".join(violations))

    sweep_var = data["sweep"]["variable"]
    values = _sweep_values(data)
    cols = _column_plan(data)
    variant_map = dict(_variant_datas(data))

    if data["output"].get("kernel") == "spectrum":
        table = np.empty((len(values), len(cols)))
        for ci, (_, label, _, _) in enumerate(cols):
            vdata = variant_map[label]
            table[:, ci] = _spectrum_column(vdata, _materials(vdata), values)
        return _finish(data, cols, sweep_var, values, table, 0.0)

    tasks = []
    for _, label, kern, part in cols:
        vdata = variant_map[label]
        for value in values:
            tasks.append((vdata, kern, part, sweep_var, float(value), rel_tol))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_point_task, tasks, chunksize=4))
    else:
        results = [_point_task(t) for t in tasks]

    table = np.empty((len(values), len(cols)))
    err_max = 0.0
    idx = 0
    for ci in range(len(cols)):
        for ri in range(len(values)):
            val, err = results[idx]
            table[ri, ci] = val
            err_max = max(err_max, err)
            idx += 1
    return _finish(data, cols, sweep_var, values, table, err_max)


def _scenario_hash(data: dict) -> str:
    blob = json.dumps(data, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _finish(data, cols, sweep_var, values, table, err_max):
    name = data["scenario"].get("name", "unnamed")
    norm = data["output"].get("normalization", "free_space_ratio")
    header = [
        f"# greenrate scenario: {name}",
        f"# scenario_hash: {_scenario_hash(data)}",
        "# units: omega in omega_ref; lengths in lambda_ref = 2*pi*c/omega_ref",
        f"# normalization: {norm}",
        f"# sweep: {sweep_var} ({data['sweep'].get('scale', 'linear')}, {len(values)} points)",
        f"# quadrature_error_max: {err_max:.3e}",
        "# columns: " + ",".join([sweep_var] + [c[0] for c in cols]),
    ]
    lines = [f"scenario {name!r}: {len(values)} sweep points, {len(cols)} columns"]
    for ci, (cname, _, _, _) in enumerate(cols):
        col = table[:, ci]
        imax = int(np.argmax(col))
        lines.append(
            f"  {cname}: max {col[imax]:.6g} at {sweep_var} = {values[imax]:.6g}, "
            f"min {col.min():.6g}"
        )
        if data["output"].get("report_slope") and len(values) > 2:
            mask = (values > 0) & (col > 0)
            if mask.sum() > 2:
                slope = np.polyfit(np.log(values[mask]), np.log(col[mask]), 1)[0]
                lines.append(f"    log-log slope: {slope:.3f}")
    lines.append(f"  quadrature error bound (max over points): {err_max:.3e}")
    return RunResult(
        columns=[c[0] for c in cols],
        sweep_name=sweep_var,
        sweep_values=values,
        table=table,
        err_max=err_max,
        header=header,
        summary="\n".join(lines),
    )


def write_csv(result: RunResult, fh):
    for line in result.header:
        fh.write(line + "\n")
    fh.write(",".join([result.sweep_name] + result.columns) + "\n")
    for ri, val in enumerate(result.sweep_values):
        cells = [format(val, ".12e")] + [format(x, ".12e") for x in result.table[ri]]
        fh.write(",".join(cells) + "\n")
