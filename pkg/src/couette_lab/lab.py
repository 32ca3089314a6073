"""Experiment drivers: decay fits, threshold sweep, inviscid-damping
integral, superposition/stability diagnostics, and the inequality
verification suite, with manifest persistence.

Config files are flat ``key = value`` text (see CONFIG_KEYS).  Every
driver returns a RunManifest that serializes to one JSON file plus one
CSV per time series.  Randomized suites are seeded and reductions use
fixed summation order, so identical config + seed reproduces the series
byte for byte.
"""

from __future__ import annotations

import datetime
import json
import os
import time as _time
from dataclasses import dataclass, field as dfield, asdict

import numpy as np

from couette_lab.grid import (Field, Grid, PHYSICAL, make_grid, to_physical,
                              to_spectral, derivative, l2_norm, linf_norm,
                              compute_E0)
from couette_lab.multipliers import (WeightSpec, SpaceTimeAccumulator,
                                     accumulate, multiplier_M, multiplier_M1,
                                     weight, dyadic_times, chi_j)
from couette_lab.elliptic import (HelmholtzSolver, jk_matrix,
                                  jk_operator_norm, poisson_solve,
                                  green_solve, check_psi_inequalities)
from couette_lab.linear import (make_linear_state, propagate_omega_L,
                                linear_fields, compute_Er, phi_functional)
from couette_lab.stepping import KModeStepper, StrangStepper, CflError
from couette_lab.pseudospectral import dealiased_product
from couette_lab.dynamics import (make_sim_state, make_error_state,
                                  step_full, step_error, evolve_omega2,
                                  default_dt)

__all__ = [
    "SimConfig",
    "RunManifest",
    "parse_config",
    "config_to_text",
    "fit_power_law",
    "run_linear_decay",
    "run_simulate",
    "run_threshold_sweep",
    "run_inviscid_damping",
    "run_superposition",
    "run_self_convergence",
    "verify_inequality_suite",
    "CONSTANT_CATALOG",
]

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class SimConfig:
    nu: float = 1e-2
    theta: float = 1.0 / 32.0
    L_x: float = 40.0 * np.pi
    n_x: int = 128
    n_y: int = 48
    T_final: float = 0.0          # 0 -> driver default
    dt: float = 0.0               # 0 -> policy min(0.5/k_max, 0.1)
    amp: float = 0.01
    sigma: float = 10.0
    y_profile: str = "cos-half"
    sample_every: int = 5
    seed: int = 0
    mode: str = "full"            # 'full' or 'linear' (inviscid driver)
    label: str = ""

    def __post_init__(self):
        if not (0.0 < self.nu < 1.0):
            raise ValueError(f"nu must lie in (0,1), got {self.nu}")
        if not (0.0 <= self.theta < 1.0 / 16.0):
            raise ValueError(f"theta must lie in [0,1/16), got {self.theta}")
        if self.amp < 0:
            raise ValueError("amp must be non-negative")
        if self.y_profile != "cos-half":
            raise ValueError(f"unknown y_profile {self.y_profile!r}")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")

    @property
    def weight_spec(self) -> WeightSpec:
        return WeightSpec(nu=self.nu, theta=self.theta)


CONFIG_KEYS = {
    "nu": float, "theta": float, "L_x": float, "n_x": int, "n_y": int,
    "T_final": float, "dt": float, "amp": float, "sigma": float,
    "y_profile": str, "sample_every": int, "seed": int, "mode": str,
    "label": str,
}


def parse_config(text: str) -> SimConfig:
    """Flat key = value lines; '#' starts a comment."""
    kwargs = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {ln}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {ln}: unknown config key {key!r}")
        kwargs[key] = CONFIG_KEYS[key](val)
    return SimConfig(**kwargs)


def config_to_text(cfg: SimConfig) -> str:
    return "\n".join(f"{k} = {getattr(cfg, k)}" for k in CONFIG_KEYS) + "\n"


def build_grid(cfg: SimConfig) -> Grid:
    return make_grid(cfg.L_x, cfg.n_x, cfg.n_y)


def initial_vorticity(cfg: SimConfig, grid: Grid) -> Field:
    """Canonical profile: A exp(-(x-L_x/2)^2/(2 sigma^2)) cos(pi y/2)."""
    x = grid.x_nodes - 0.5 * grid.L_x
    gx = np.exp(-x ** 2 / (2.0 * cfg.sigma ** 2))
    gy = np.cos(0.5 * np.pi * grid.y_nodes)
    data = cfg.amp * np.outer(gx, gy).astype(complex)
    return Field(data=data, frame=PHYSICAL, grid=grid)


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

@dataclass
class RunManifest:
    kind: str
    config: dict
    schema_version: int = SCHEMA_VERSION
    created_at: str = ""
    resolution: dict = dfield(default_factory=dict)
    time: list = dfield(default_factory=list)
    series: dict = dfield(default_factory=dict)
    fits: dict = dfield(default_factory=dict)
    constants: dict = dfield(default_factory=dict)
    extra: dict = dfield(default_factory=dict)
    flags: list = dfield(default_factory=list)
    passed: bool = True
    wall_clock_s: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, outdir: str, name: str) -> str:
        os.makedirs(outdir, exist_ok=True)
        path = os.path.join(outdir, f"{name}.json")
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
        for col, values in self.series.items():
            cpath = os.path.join(outdir, f"{name}__{col}.csv")
            with open(cpath, "w") as fh:
                fh.write(f"time,{col}\n")
                for t, v in zip(self.time, values):
                    fh.write(f"{t!r},{v!r}\n")
        return path


def _new_manifest(kind: str, cfg: SimConfig, grid: Grid | None) -> RunManifest:
    m = RunManifest(kind=kind, config=asdict(cfg),
                    created_at=datetime.datetime.now(
                        datetime.timezone.utc).isoformat())
    if grid is not None:
        guard = grid.k_min <= cfg.nu
        m.resolution = {"k_min": grid.k_min, "k_max": grid.k_max,
                        "guard_k_min_le_nu": bool(guard)}
        if not guard:
            m.flags.append("resolution: k_min > nu (long-wave regime "
                           "truncated; recorded, not fatal)")
    return m


# ---------------------------------------------------------------------------
# power-law fits
# ---------------------------------------------------------------------------

def fit_power_law(series, window) -> tuple[float, float, float]:
    """Least squares of log(value) on log(t) inside [t_lo, t_hi].

    Returns (slope, intercept, rms log residual)."""
    t_lo, t_hi = window
    ts = np.array([t for t, v in series])
    vs = np.array([v for t, v in series])
    mask = (ts >= t_lo) & (ts <= t_hi)
    if np.count_nonzero(mask) < 8:
        raise ValueError(
            f"need >= 8 samples in window [{t_lo}, {t_hi}], "
            f"got {np.count_nonzero(mask)}")
    ts, vs = ts[mask], vs[mask]
    if np.any(vs <= 0) or np.any(ts <= 0):
        raise ValueError("power-law fit requires positive times and values")
    lt, lv = np.log(ts), np.log(vs)
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = float(np.sqrt(np.mean((lv - (slope * lt + intercept)) ** 2)))
    return float(slope), float(intercept), resid


# ---------------------------------------------------------------------------
# linear decay driver (closed-form omega_L)
# ---------------------------------------------------------------------------

def _weighted(f: Field, t: float, spec: WeightSpec) -> Field:
    fs = to_spectral(f)
    w = weight(t, fs.grid.k_values, spec)
    return fs.with_data(w[:, None] * fs.data)


def run_linear_decay(cfg: SimConfig, n_samples: int = 100) -> RunManifest:
    t0 = _time.perf_counter()
    grid = build_grid(cfg)
    man = _new_manifest("linear-decay", cfg, grid)
    omega_in = initial_vorticity(cfg, grid)
    spec = cfg.weight_spec
    T_final = cfg.T_final or 200.0 * cfg.nu ** (-1.0 / 3.0)

    names = ["l2_omega", "l2_dx_omega", "l2_shifted_grad",
             "linf_u1", "linf_u2", "l2_Er"]
    names += ["w_" + n for n in names]
    series = {n: [] for n in names}

    times = np.concatenate([[0.0], np.geomspace(0.1, T_final, n_samples)])
    man.time = [float(t) for t in times]

    if cfg.amp == 0.0:
        for n in names:
            series[n] = [0.0] * len(times)
        man.series = series
        man.extra["E0"] = 0.0
        man.wall_clock_s = _time.perf_counter() - t0
        return man

    E0 = compute_E0(omega_in)
    lin = make_linear_state(omega_in, cfg.nu)
    g = grid

    def sample(t: float, prefix: str, wgt: np.ndarray | None):
        wL, (u1, u2), er = linear_fields(lin, t)
        if wgt is not None:
            wL = wL.with_data(wgt[:, None] * wL.data)
            u1 = u1.with_data(wgt[:, None] * u1.data)
            u2 = u2.with_data(wgt[:, None] * u2.data)
            er = er.with_data(wgt[:, None] * er.data)
        dx = derivative(wL, "x", 1)
        shifted = wL.with_data(
            wL.data @ g.D_y.T + t * (dx.data))
        series[prefix + "l2_omega"].append(l2_norm(wL))
        series[prefix + "l2_dx_omega"].append(l2_norm(dx))
        series[prefix + "l2_shifted_grad"].append(l2_norm(shifted))
        series[prefix + "linf_u1"].append(linf_norm(u1))
        series[prefix + "linf_u2"].append(linf_norm(u2))
        series[prefix + "l2_Er"].append(l2_norm(er))

    for t in times:
        sample(float(t), "", None)
        sample(float(t), "w_", weight(float(t), g.k_values, spec))

    man.series = series
    man.extra["E0"] = E0
    # Fits over the documented window.  Every decay envelope carries the
    # same exact viscous factor e^{-nu t}; its log-log slope contribution
    # (-nu t, about -0.3 over the window at nu=1e-3) would swamp the
    # algebraic exponents the fits target, so the factor is divided out
    # before fitting and the raw slope is recorded alongside.
    window = (5.0 * cfg.nu ** (-1.0 / 3.0), 0.5 * T_final)
    man.extra["fit_window"] = list(window)
    man.extra["fit_compensation"] = "exp(+nu t)"
    comp = np.exp(cfg.nu * times)
    for name in ["l2_omega", "l2_dx_omega", "l2_shifted_grad",
                 "linf_u1", "linf_u2", "l2_Er"]:
        try:
            vals = np.asarray(series[name]) * comp
            s, b, r = fit_power_law(list(zip(man.time, vals)), window)
            s_raw, _, _ = fit_power_law(
                list(zip(man.time, series[name])), window)
            man.fits[name] = {"slope": s, "slope_raw": s_raw,
                              "intercept": b, "residual": r,
                              "window": list(window)}
        except ValueError as exc:
            man.flags.append(f"fit {name}: {exc}")
    man.wall_clock_s = _time.perf_counter() - t0
    return man


# ---------------------------------------------------------------------------
# full nonlinear simulation driver
# ---------------------------------------------------------------------------

MAX_DT_HALVINGS = 8


def run_simulate(cfg: SimConfig, T_final: float | None = None,
                 stop_ratio: float | None = None,
                 with_accumulator: bool = False,
                 half_time: float | None = None):
    """Step the full vorticity equation to T_final.

    Returns a dict with sampled times/norms, status ('ok'|'blowup'),
    the final state, the growth ratio history, and (optionally) a
    space-time accumulator fed at sample times.
    """
    grid = build_grid(cfg)
    omega_in = initial_vorticity(cfg, grid)
    T = T_final if T_final is not None else (
        cfg.T_final or 50.0 * cfg.nu ** (-1.0 / 3.0))
    dt0 = cfg.dt or default_dt(grid)
    st = make_sim_state(omega_in, cfg.nu, dt=dt0)
    spec = cfg.weight_spec
    norm0 = l2_norm(st.omega)
    acc = SpaceTimeAccumulator(spec) if with_accumulator else None
    out = {"time": [], "l2_omega": [], "w_l2_omega": [], "status": "ok",
           "halvings": 0, "half_snapshot": None}

    def record(state):
        t = state.t
        n = l2_norm(state.omega)
        out["time"].append(t)
        out["l2_omega"].append(n)
        out["w_l2_omega"].append(l2_norm(_weighted(state.omega, t, spec)))
        if acc is not None:
            accumulate(acc, t, state.omega, state.solver)

    record(st)
    step_count = 0
    halvings = 0
    while st.t < T - 1e-12:
        try:
            new = step_full(st)
        except CflError:
            if halvings >= MAX_DT_HALVINGS:
                out["status"] = "blowup"
                break
            halvings += 1
            st.dt = 0.5 * st.dt
            st._stepper = None
            continue
        st = new
        step_count += 1
        if not np.all(np.isfinite(st.omega.data)):
            out["status"] = "blowup"
            break
        if step_count % cfg.sample_every == 0 or st.t >= T - 1e-12:
            record(st)
            if (half_time is not None and out["half_snapshot"] is None
                    and st.t >= half_time - 1e-9):
                out["half_snapshot"] = {
                    "t": st.t,
                    "acc": dict(acc.integrals) if acc else None,
                    "w_m1": acc.components()["w_m1_inv_lap_l2l2"]
                    if acc else None,
                }
            if stop_ratio is not None and norm0 > 0 and \
                    out["l2_omega"][-1] > stop_ratio * norm0:
                out["status"] = "growth-exceeded"
                break
    out["halvings"] = halvings
    out["state"] = st
    out["acc"] = acc
    out["norm0"] = norm0
    out["grid"] = grid
    out["omega_in"] = omega_in
    return out


# ---------------------------------------------------------------------------
# threshold sweep
# ---------------------------------------------------------------------------

G_STAB = 10.0
G_UNST = 100.0


def _classify(cfg: SimConfig, A: float) -> tuple[str, float]:
    """Run the classifier at amplitude A; returns (class, sup ratio)."""
    c = SimConfig(**{**asdict(cfg), "amp": A})
    res = run_simulate(c, stop_ratio=G_UNST)
    if res["status"] in ("blowup", "growth-exceeded"):
        return "unstable", float("inf")
    ratio = max(res["l2_omega"]) / res["norm0"] if res["norm0"] else 0.0
    if ratio <= G_STAB:
        return "stable", ratio
    return "unstable", ratio


def _sweep_point(cfg_dict: dict, nu: float, n_bisect: int):
    """Bracket and bisect the stability boundary at one viscosity.

    Top-level so a process pool can run sweep points independently."""
    c = SimConfig(**{**cfg_dict, "nu": nu, "T_final": 0.0})
    grid = build_grid(c)
    guard = grid.k_min <= nu
    flags = []
    history = []
    if not guard:
        flags.append(f"nu={nu}: k_min={grid.k_min:.4g} > nu "
                     "(resolution guard)")
    A_lo, A_hi = 0.02 * nu ** (1.0 / 3.0), 2.0
    cls_lo, r_lo = _classify(c, A_lo)
    cls_hi, r_hi = _classify(c, A_hi)
    history.append((nu, A_lo, cls_lo, r_lo))
    history.append((nu, A_hi, cls_hi, r_hi))
    widen = 0
    while cls_lo != "stable" and widen < 3:
        A_lo *= 0.25
        cls_lo, r_lo = _classify(c, A_lo)
        history.append((nu, A_lo, cls_lo, r_lo))
        widen += 1
    while cls_hi != "unstable" and widen < 6:
        A_hi *= 4.0
        cls_hi, r_hi = _classify(c, A_hi)
        history.append((nu, A_hi, cls_hi, r_hi))
        widen += 1
    if cls_lo != "stable" or cls_hi != "unstable":
        flags.append(f"nu={nu}: bisection not bracketed "
                     f"(lo={cls_lo}, hi={cls_hi})")
        row = {"nu": nu, "A_star": None, "guard": guard}
    else:
        for _ in range(n_bisect):
            A_mid = float(np.sqrt(A_lo * A_hi))
            cls_mid, r_mid = _classify(c, A_mid)
            history.append((nu, A_mid, cls_mid, r_mid))
            if cls_mid == "stable":
                A_lo = A_mid
            else:
                A_hi = A_mid
        row = {"nu": nu, "A_star": float(np.sqrt(A_lo * A_hi)),
               "A_stable": A_lo, "A_unstable": A_hi, "guard": guard}
    # monotonicity audit of the classifier history
    hs = sorted((a, cl) for (_n, a, cl, _r) in history)
    top_stable = max((a for a, cl in hs if cl == "stable"), default=None)
    low_unstable = min((a for a, cl in hs if cl != "stable"), default=None)
    if top_stable is not None and low_unstable is not None \
            and top_stable > low_unstable:
        flags.append(f"nu={nu}: classifier non-monotone in A")
    return row, history, flags


def _sweep_point_star(args):
    return _sweep_point(*args)


def worker_count() -> int:
    return max(1, int(os.environ.get("COUETTE_LAB_WORKERS", "1")))


def run_threshold_sweep(cfg: SimConfig, nu_list=None,
                        n_bisect: int = 8) -> RunManifest:
    t0 = _time.perf_counter()
    nu_list = list(nu_list or [1e-2, 3e-3, 1e-3])
    man = _new_manifest("threshold", cfg, None)
    rows = []
    history = []
    jobs = [(asdict(cfg), nu, n_bisect) for nu in nu_list]
    if worker_count() > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=worker_count()) as pool:
            outputs = list(pool.map(_sweep_point_star, jobs))
    else:
        outputs = [_sweep_point(*j) for j in jobs]
    for row, hist, flags in outputs:  # merged in nu_list (job key) order
        rows.append(row)
        history.extend(hist)
        man.flags.extend(flags)
    good = [(r["nu"], r["A_star"]) for r in rows if r["A_star"]]
    man.extra["threshold"] = {"rows": rows, "history": [
        {"nu": n, "A": a, "class": c,
         "ratio": (r if np.isfinite(r) else None)}
        for (n, a, c, r) in history]}
    if len(good) >= 2:
        lg_nu = np.log([n for n, _ in good])
        lg_a = np.log([a for _, a in good])
        gamma, b = np.polyfit(lg_nu, lg_a, 1)
        man.extra["threshold"]["gamma"] = float(gamma)
        man.extra["threshold"]["intercept"] = float(np.exp(b))
    else:
        man.flags.append("fewer than 2 bracketed points; no gamma fit")
        man.passed = False
    man.extra["threshold"]["caveat"] = (
        "desk-scale resolution: the unstable class is a numerical "
        "observation at fixed grid, not an asymptotic statement")
    man.wall_clock_s = _time.perf_counter() - t0
    return man


# ---------------------------------------------------------------------------
# inviscid damping integral
# ---------------------------------------------------------------------------

def run_inviscid_damping(cfg: SimConfig) -> RunManifest:
    t0 = _time.perf_counter()
    grid = build_grid(cfg)
    man = _new_manifest("inviscid", cfg, grid)
    T = cfg.T_final or 50.0 * cfg.nu ** (-1.0 / 3.0)
    spec = cfg.weight_spec
    omega_in = initial_vorticity(cfg, grid)
    if cfg.amp == 0.0:
        man.extra["ratio_T"] = 0.0
        man.extra["ratio_half"] = 0.0
        man.extra["E0"] = 0.0
        return man
    E0 = compute_E0(omega_in)

    if cfg.mode == "linear":
        # closed-form omega_L only
        lin = make_linear_state(omega_in, cfg.nu)
        acc = SpaceTimeAccumulator(spec)
        times = np.linspace(0.0, T, 400)
        half_val = None
        man.time = [float(t) for t in times]
        vals = []
        for t in times:
            wL = propagate_omega_L(lin, float(t))
            accumulate(acc, float(t), wL, lin.solver)
            v = acc.components()["w_m1_inv_lap_l2l2"]
            vals.append(v)
            if half_val is None and t >= 0.5 * T - 1e-9:
                half_val = v
        man.series = {"w_m1_u_l2l2": vals}
        final = vals[-1]
    else:
        res = run_simulate(cfg, T_final=T, with_accumulator=True,
                           half_time=0.5 * T)
        if res["status"] != "ok":
            man.flags.append(f"simulation status: {res['status']}")
            man.passed = False
        man.time = res["time"]
        comps = res["acc"].components()
        final = comps["w_m1_inv_lap_l2l2"]
        half_val = (res["half_snapshot"] or {}).get("w_m1")
        man.series = {"l2_omega": res["l2_omega"],
                      "w_l2_omega": res["w_l2_omega"]}

    man.extra["E0"] = E0
    man.extra["ratio_T"] = final / E0
    man.extra["ratio_half"] = (half_val / E0) if half_val else None
    if half_val:
        man.extra["tail_increase"] = (final - half_val) / half_val
    man.wall_clock_s = _time.perf_counter() - t0
    return man


# ---------------------------------------------------------------------------
# superposition / decomposition diagnostics
# ---------------------------------------------------------------------------

def run_superposition(cfg: SimConfig, j_max: int | None = None,
                      dt: float | None = None) -> RunManifest:
    """Stable error-equation run with companions; records the
    decomposition gaps at every sample time."""
    t0 = _time.perf_counter()
    grid = build_grid(cfg)
    man = _new_manifest("superposition", cfg, grid)
    T = cfg.T_final or 20.0 * cfg.nu ** (-1.0 / 3.0)
    if j_max is None:
        j_max = 1
        while 2.0 ** j_max * cfg.nu ** (-1.0 / 3.0) < T:
            j_max += 1
    part = dyadic_times(cfg.nu, j_max)
    omega_in = initial_vorticity(cfg, grid)
    E0 = compute_E0(omega_in)
    lin = make_linear_state(omega_in, cfg.nu)
    st = make_error_state(lin, part)
    dt = dt or default_dt(grid)

    times, gap_sum, gap_decomp, l2_e, l2_2 = [], [], [], [], []
    sample_counter = [0]

    def hook(state):
        sample_counter[0] += 1
        if sample_counter[0] % cfg.sample_every:
            return
        we, w2 = state.omega_e, state.omega2
        sum2j = np.zeros_like(we.data)
        for f in state.omega2j.values():
            sum2j = sum2j + f.data
        ref = max(l2_norm(we), E0)
        times.append(state.t)
        l2_e.append(l2_norm(we))
        l2_2.append(l2_norm(w2))
        gap_sum.append(l2_norm(w2.with_data(sum2j - w2.data))
                       / max(l2_norm(w2), 1e-300))
        # w_e - (w_1 + sum_j w_2j) with w_1 = w_e - w_2
        gap_decomp.append(
            l2_norm(we.with_data(we.data - (we.data - w2.data) - sum2j))
            / ref)

    st = evolve_omega2(st, part, dt, T, sample_hook=hook)
    man.time = times
    man.series = {"l2_omega_e": l2_e, "l2_omega_2": l2_2,
                  "gap_sum2j_vs_omega2": gap_sum,
                  "gap_decomposition": gap_decomp}
    man.extra["E0"] = E0
    man.extra["max_gap_sum"] = max(gap_sum) if gap_sum else 0.0
    man.extra["max_gap_decomp"] = max(gap_decomp) if gap_decomp else 0.0
    man.extra["partition_T"] = [float(x) for x in part.T]
    man.wall_clock_s = _time.perf_counter() - t0
    return man


# ---------------------------------------------------------------------------
# scheme self-convergence
# ---------------------------------------------------------------------------

def run_self_convergence(cfg: SimConfig, T: float = 5.0,
                         dt0: float = 0.1) -> RunManifest:
    """Richardson dt-halving on a smooth run; ratio ~ 4 at second order."""
    t0 = _time.perf_counter()
    grid = build_grid(cfg)
    man = _new_manifest("self-convergence", cfg, grid)
    omega_in = initial_vorticity(cfg, grid)

    def final_state(dt):
        st = make_sim_state(omega_in, cfg.nu, dt=dt)
        n = int(round(T / dt))
        for _ in range(n):
            st = step_full(st)
        return st.omega

    w1 = final_state(dt0)
    w2 = final_state(dt0 / 2)
    w4 = final_state(dt0 / 4)
    e12 = l2_norm(w1.with_data(w1.data - w2.data))
    e24 = l2_norm(w2.with_data(w2.data - w4.data))
    ratio = e12 / e24 if e24 > 0 else float("inf")
    man.extra["error_coarse"] = e12
    man.extra["error_fine"] = e24
    man.extra["ratio"] = ratio
    man.extra["order"] = float(np.log2(ratio)) if np.isfinite(ratio) else None
    man.wall_clock_s = _time.perf_counter() - t0
    return man


# ---------------------------------------------------------------------------
# inequality verification suite
# ---------------------------------------------------------------------------

# Historical constants: measured on the reference configuration and
# frozen; a suite entry passes when its measured constant is at most
# 1.5x the recorded value.  Re-baseline only deliberately.
CONSTANT_CATALOG = {
    "poisson": 1e-8,
    "jk_symmetry": 1e-8,
    "jk_norm": 1.6,
    "phi_slack": 1e-10,
    "phi_comparator": 1.0,
    "enhan1": 0.9,
    "enhan2": 1.1,
    "psi_decay": 1.3,
    "fX": 0.7,
    "fY": 0.3,
    "fg": 0.8,
    "ErL2": 0.005,
    "weight_submult": 1.05,
}

SUITE_IDS = tuple(CONSTANT_CATALOG)


def _rand_profile(rng, y, n_modes=6):
    """Random smooth y-profile vanishing at the walls."""
    c = rng.standard_normal(n_modes) / (1.0 + np.arange(n_modes)) ** 2
    out = np.zeros_like(y, dtype=complex)
    for n, cn in enumerate(c, start=1):
        out += cn * np.sin(0.5 * n * np.pi * (y + 1.0))
    return out


def _rand_field(rng, grid, kx_modes=6):
    """Random smooth real field vanishing at the walls."""
    data = np.zeros((grid.n_x, grid.n_y))
    x = grid.x_nodes
    for m in range(kx_modes):
        k = 2.0 * np.pi * m / grid.L_x
        amp = rng.standard_normal(2) / (1.0 + m) ** 2
        prof = np.real(_rand_profile(rng, grid.y_nodes))
        data += np.outer(amp[0] * np.cos(k * x) + amp[1] * np.sin(k * x),
                         prof)
    return Field(data=data.astype(complex), frame=PHYSICAL, grid=grid)


def _mode_grid(n_y):
    # 1D y-operations piggyback on a minimal grid
    return make_grid(2.0 * np.pi, 8, n_y)


def _resolved_ny(k, nu, t_end):
    """y-resolution needed to track the tilted oscillation e^{-ikyt}."""
    t_dead = (69.0 / (nu * k * k + 1e-300)) ** (1.0 / 3.0)
    horizon = min(t_end, t_dead)
    return int(min(320, max(64, 1.3 * abs(k) * horizon + 48)))


def _homogeneous_sweep(k, nu, t_end, dt, f0_fn, sample_cb, stop_frac=1e-10):
    """Step one homogeneous mode, calling sample_cb(t, f, grid, norm0)."""
    grid = _mode_grid(_resolved_ny(k, nu, t_end))
    y = grid.y_nodes
    f = f0_fn(y).astype(complex)
    f[0] = f[-1] = 0.0
    w = grid.w_quad

    def nrm(v):
        return float(np.sqrt(np.sum(np.abs(v) ** 2 * w)))

    norm0 = nrm(f)
    stepper = KModeStepper(grid, k, nu, dt)
    t = 0.0
    sample_cb(t, f, grid, norm0)
    n_steps = int(np.ceil(t_end / dt))
    every = max(1, n_steps // 400)
    for i in range(1, n_steps + 1):
        f = stepper.step(f)
        t = i * dt
        if i % every == 0 or i == n_steps:
            sample_cb(t, f, grid, norm0)
            if nrm(f) < stop_frac * norm0:
                break
    return f


def _suite_enhan(seed, combos, t_end=2000.0):
    rng = np.random.default_rng(seed)
    c1 = c2 = 0.0
    for (k, nu) in combos:
        dt = min(0.1, 0.25 * (3e-8 / (nu * k * k + 1e-300)) ** (1.0 / 3.0))
        dt = max(dt, 1e-3)
        coeffs = rng.standard_normal(4)

        def f0(y, coeffs=coeffs):
            out = np.zeros_like(y, dtype=complex)
            for n, cn in enumerate(coeffs, start=1):
                out += cn / n ** 2 * np.sin(0.5 * n * np.pi * (y + 1.0))
            return out

        ratios = {"e1": [0.0], "e2": [0.0]}

        def cb(t, f, grid, norm0, k=k, nu=nu, ratios=ratios):
            w = grid.w_quad
            n = float(np.sqrt(np.sum(np.abs(f) ** 2 * w)))
            env2 = (1.0 + nu * t + nu * k * k * t ** 3) ** (-0.5)
            ratios["e2"].append(n / (env2 * norm0))
            if t > 0:
                env1 = (nu * t) ** (-0.5) * (1.0 + t) ** (-1.0)
                ratios["e1"].append(abs(k) * n / (env1 * norm0))

        _homogeneous_sweep(k, nu, t_end, dt, f0, cb)
        c1 = max(c1, max(ratios["e1"]))
        c2 = max(c2, max(ratios["e2"]))
    return c1, c2


def _suite_phi(combos, t_end_cap=200.0):
    worst_slack = 0.0
    comparator_ok = True
    for (k, nu) in combos:
        dt = min(0.1, 0.5 * (3e-8 / (nu * k * k + 1e-300)) ** (1.0 / 3.0))
        dt = max(dt, 2e-3)
        t_dead = (69.0 / (nu * k * k + 1e-300)) ** (1.0 / 3.0)
        t_end = min(t_end_cap, max(20.0, t_dead))
        grid = _mode_grid(_resolved_ny(k, nu, t_end))
        y = grid.y_nodes
        f = np.cos(0.5 * np.pi * y).astype(complex)
        stepper = KModeStepper(grid, k, nu, dt)
        phi_prev, comp = phi_functional(grid, f, k, 0.0, nu)
        if phi_prev < comp - 1e-12 * phi_prev:
            comparator_ok = False
        t = 0.0
        n_steps = int(np.ceil(t_end / dt))
        for i in range(1, n_steps + 1):
            f = stepper.step(f)
            t = i * dt
            phi, comp = phi_functional(grid, f, k, t, nu)
            slack = (phi - phi_prev) / max(phi, 1e-300)
            worst_slack = max(worst_slack, slack)
            if phi < comp - 1e-12 * max(phi, 1.0):
                comparator_ok = False
            phi_prev = phi
    return worst_slack, comparator_ok


def _suite_poisson(n_y=64):
    grid = _mode_grid(n_y)
    y = grid.y_nodes
    w = (np.pi ** 2 + 1.0) * np.sin(np.pi * y)
    psi = poisson_solve(grid, w, 1.0)
    exact = -np.sin(np.pi * y)
    rel = (np.sqrt(np.sum(np.abs(psi - exact) ** 2 * grid.w_quad))
           / np.sqrt(np.sum(exact ** 2 * grid.w_quad)))
    # Green's-function quadrature path
    worst_green = 0.0
    rng = np.random.default_rng(7)
    for k in (1e-3, 1e-2, 1e-1, 1.0, 10.0):
        f = np.real(_rand_profile(rng, y))
        direct = poisson_solve(grid, f, k)
        viaG = green_solve(grid, f, k)
        err = (np.sqrt(np.sum(np.abs(direct - viaG) ** 2 * grid.w_quad))
               / max(np.sqrt(np.sum(np.abs(direct) ** 2 * grid.w_quad)),
                     1e-300))
        worst_green = max(worst_green, err)
    return float(rel), float(worst_green)


def _suite_jk(seed, n_y=64, ks=(1e-3, 1e-2, 1e-1, 1.0, 10.0), n_pairs=20):
    grid = _mode_grid(n_y)
    rng = np.random.default_rng(seed)
    w = grid.w_quad
    sym = 0.0
    norm_c = 0.0
    for k in ks:
        J = jk_matrix(grid, k)
        for _ in range(n_pairs // len(ks) + 1):
            f = _rand_profile(rng, grid.y_nodes)
            g = _rand_profile(rng, grid.y_nodes)
            lhs = np.sum((J @ f) * np.conj(g) * w)
            rhs = np.sum(f * np.conj(J @ g) * w)
            nf = np.sqrt(np.sum(np.abs(f) ** 2 * w))
            ng = np.sqrt(np.sum(np.abs(g) ** 2 * w))
            sym = max(sym, abs(lhs - rhs) / (nf * ng))
        norm_c = max(norm_c, jk_operator_norm(grid, k) / min(1.0, abs(k)))
    return float(sym), float(norm_c)


def _suite_psi(seed, ks=(0.1, 0.5, 2.0, 5.0), ts=(0.0, 1.0, 10.0, 100.0)):
    grid = _mode_grid(96)
    rng = np.random.default_rng(seed)
    profiles = [np.sin(np.pi * grid.y_nodes).astype(complex),
                _rand_profile(rng, grid.y_nodes)]
    worst = 0.0
    for k in ks:
        for t in ts:
            for p in profiles:
                rep = check_psi_inequalities(grid, p, k, t)
                for row in rep.values():
                    if row["ratio"] is not None:
                        worst = max(worst, row["ratio"])
    return float(worst)


def _suite_fx_fy(seed, nu=1e-2, t_end=50.0, dt=0.02, n_runs=3):
    grid = make_grid(4.0 * np.pi, 32, 48)
    solver = HelmholtzSolver(grid)
    spec = WeightSpec(nu=nu, theta=0.0)
    rng = np.random.default_rng(seed)
    cX = cY = 0.0
    for _ in range(n_runs):
        f0 = to_spectral(_rand_field(rng, grid))
        g0 = to_spectral(_rand_field(rng, grid))
        stepper = StrangStepper(grid, nu, dt)

        def genv(t):
            return np.cos(0.3 * t) * np.exp(-0.05 * t)

        acc = SpaceTimeAccumulator(spec)
        accumulate(acc, 0.0, f0, solver)
        f = f0.data
        l1l2_g = 0.0
        int_glap = 0.0
        g_prev = abs(genv(0.0)) * l2_norm(g0)
        psi_g = solver.solve_field(g0)
        glap2_base = (l2_norm(derivative(psi_g, "y", 1)) ** 2
                      + l2_norm(psi_g.with_data(
                          grid.k_values[:, None] * psi_g.data)) ** 2)
        glap_prev = genv(0.0) ** 2 * glap2_base
        t = 0.0
        n_steps = int(round(t_end / dt))
        for i in range(1, n_steps + 1):
            tm = t + 0.5 * dt
            f = stepper.step(f, t, lambda w, _t: genv(tm) * g0.data)
            t = i * dt
            g_cur = abs(genv(t)) * l2_norm(g0)
            glap_cur = genv(t) ** 2 * glap2_base
            l1l2_g += 0.5 * dt * (g_prev + g_cur)
            int_glap += 0.5 * dt * (glap_prev + glap_cur)
            g_prev, glap_prev = g_cur, glap_cur
            if i % 5 == 0:
                accumulate(acc, t, f0.with_data(f), solver)
        f0n = l2_norm(f0)
        cX = max(cX, acc.x_norm() / (f0n + l1l2_g))
        cY = max(cY, acc.y_norm() ** 2 / (f0n ** 2 + int_glap / nu))
    return float(cX), float(cY)


def _suite_fg(seed, nu=1e-3, theta=1.0 / 32.0,
              ts=(0.0, 10.0, 100.0, 1000.0), n_pairs=5):
    grid = make_grid(4.0 * np.pi, 64, 48)
    spec = WeightSpec(nu=nu, theta=theta)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        f = to_spectral(_rand_field(rng, grid))
        g = to_spectral(_rand_field(rng, grid))
        prod = dealiased_product(f, g)
        for t in ts:
            wk = weight(t, grid.k_values, spec)
            lhs = l2_norm(prod.with_data(wk[:, None] * prod.data))
            rf = l2_norm(f.with_data(wk[:, None] * f.data))
            rg = linf_norm(g.with_data(wk[:, None] * g.data))
            if rf * rg > 0:
                worst = max(worst, lhs / (rf * rg))
    return float(worst)


def _suite_erl2(nu=1e-3, theta=1.0 / 32.0):
    cfg = SimConfig(nu=nu, theta=theta, L_x=8.0 * np.pi / nu, n_x=2048,
                    n_y=64, amp=1.0, sigma=8.0)
    grid = build_grid(cfg)
    omega_in = initial_vorticity(cfg, grid)
    E0 = compute_E0(omega_in)
    lin = make_linear_state(omega_in, nu)
    spec = cfg.weight_spec
    worst = 0.0
    for t in np.geomspace(0.1, 100.0 * nu ** (-1.0 / 3.0), 25):
        er = compute_Er(lin, float(t))
        wk = weight(float(t), grid.k_values, spec)
        lhs = l2_norm(er.with_data(wk[:, None] * er.data))
        nut3 = 1.0 + nu * t ** 3
        rhs = (((1.0 + t) ** (-1.0) * nut3 ** (-0.25) * E0
                + nu * nut3 ** (-0.25)
                + nu ** (2.0 / 3.0) * nut3 ** (-5.0 / 12.0))
               * np.exp(-nu * t) * E0)
        worst = max(worst, lhs / rhs)
    return float(worst)


def _suite_weight(nu=1e-3, theta=1.0 / 32.0):
    spec = WeightSpec(nu=nu, theta=theta)
    ks = np.linspace(-8.0, 8.0, 33)
    ls = np.linspace(-8.0, 8.0, 33)
    worst = 0.0
    for t in (1.0, nu ** (-1.0 / 3.0), nu ** (-1.0), 10.0 / nu):
        wk = weight(t, ks[:, None], spec)
        wl = weight(t, ls[None, :], spec)
        wkl = weight(t, ks[:, None] - ls[None, :], spec)
        worst = max(worst, float(np.max(wk / (wkl * wl))))
    return float(worst)


def verify_inequality_suite(cfg: SimConfig, suite=None,
                            seed: int | None = None) -> RunManifest:
    t0 = _time.perf_counter()
    suite = list(suite or SUITE_IDS)
    seed = cfg.seed if seed is None else seed
    unknown = [s for s in suite if s not in CONSTANT_CATALOG]
    if unknown:
        raise ValueError(f"unknown suite ids: {unknown}")
    man = _new_manifest("verify", cfg, None)
    combos = [(k, nu) for k in (0.01, 0.1, 1.0, 10.0)
              for nu in (1e-2, 1e-4)]
    results: dict[str, float] = {}

    if "poisson" in suite:
        rel, green = _suite_poisson()
        results["poisson"] = max(rel, green)
    if "jk_symmetry" in suite or "jk_norm" in suite:
        sym, nc = _suite_jk(seed)
        if "jk_symmetry" in suite:
            results["jk_symmetry"] = sym
        if "jk_norm" in suite:
            results["jk_norm"] = nc
    if "phi_slack" in suite or "phi_comparator" in suite:
        slack, comp_ok = _suite_phi(combos)
        if "phi_slack" in suite:
            results["phi_slack"] = max(slack, 0.0)
        if "phi_comparator" in suite:
            results["phi_comparator"] = 1.0 if comp_ok else float("inf")
    if "enhan1" in suite or "enhan2" in suite:
        c1, c2 = _suite_enhan(seed, combos)
        if "enhan1" in suite:
            results["enhan1"] = c1
        if "enhan2" in suite:
            results["enhan2"] = c2
    if "psi_decay" in suite:
        results["psi_decay"] = _suite_psi(seed)
    if "fX" in suite or "fY" in suite:
        cx, cy = _suite_fx_fy(seed)
        if "fX" in suite:
            results["fX"] = cx
        if "fY" in suite:
            results["fY"] = cy
    if "fg" in suite:
        results["fg"] = _suite_fg(seed)
    if "ErL2" in suite:
        results["ErL2"] = _suite_erl2()
    if "weight_submult" in suite:
        results["weight_submult"] = _suite_weight()

    man.constants = results
    verdicts = {}
    ok = True
    for name, val in results.items():
        bound = 1.5 * CONSTANT_CATALOG[name]
        passed = bool(np.isfinite(val) and val <= bound)
        verdicts[name] = {"measured": val, "bound": bound, "pass": passed}
        ok = ok and passed
    man.extra["verdicts"] = verdicts
    man.passed = ok
    man.wall_clock_s = _time.perf_counter() - t0
    return man
