"""Randomized checks of the Coulomb-type inequalities, positivity and a_pm expansion bounds.

Every check uses the same discretized Coulomb kernel as the solver.  Trial
fields are complex Gaussian momentum samples with envelope (1 + |p|^2)^-1 and
the outer third of the lattice zeroed (band limiting), which keeps the
Nyquist-scale artifacts of the discrete kernel out of the gated ratios.
Full-band ratios are reported alongside but not gated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import ALPHA_FS, GAMMA_H, GAMMA_K, GAMMA_T, Z_MAX_EXISTENCE, Z_MIN_EXISTENCE
from .coulomb import coulomb_kernel, density_current, oracle_pair_energy, pair_energy
from .dirac import a_minus, a_plus, fw_symbol
from .grid import SpectralGrid, mom_dot, random_momentum_coefficients, to_position

DEFAULT_GRID = SpectralGrid(16, 10.0)
DEFAULT_SLACK = 1e-6
BAND_NOTE = "trial fields band-limited: modes with |m| > (2/3)(N/2) zeroed, envelope (1+|p|^2)^-1"
DEFAULT_EPS = (1.0, 0.1, 0.01, 0.001)


@dataclass
class InequalityReport:
    name: str
    trials: int
    worst_ratio: float
    violations: int
    slack: float
    notes: str = BAND_NOTE
    reported: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "worst_ratio": self.worst_ratio,
            "violations": self.violations,
            "slack": self.slack,
            "notes": self.notes,
            "reported": dict(self.reported),
        }


class _Accumulator:
    def __init__(self, slack):
        self.slack = slack
        self.worst = 0.0
        self.violations = 0

    def add(self, lhs, rhs):
        if rhs > 0:
            self.worst = max(self.worst, float(lhs / rhs))
        if lhs > rhs * (1.0 + self.slack) + self.slack * 1e-6:
            self.violations += 1


def _trial(grid, rng, components=4, band=True):
    return random_momentum_coefficients(grid, components, rng, decay=2.0, band_limit=2.0 / 3.0 if band else None)


def _weighted(x, grid, weight):
    return mom_dot(x, x, grid, weight=weight)


# ---- single-field ratios ---------------------------------------------------------------------


def coulomb_expectation(psi_hat: np.ndarray, grid: SpectralGrid, zero_mode: str = "madelung") -> float:
    """int K(y) |psi(y)|^2 dy with the shared kernel K centered at the origin."""
    K = coulomb_kernel(grid, zero_mode).position_kernel
    psi = to_position(psi_hat, grid)
    return float(np.sum(K * np.sum(np.abs(psi) ** 2, axis=0)) * grid.cell_volume)


def hardy_terms(psi_hat, grid, zero_mode="madelung"):
    """(|K psi|_{L^2}, gamma_H |sqrt(-Delta+1) psi|_{L^2}, gamma_H |grad psi|_{L^2})."""
    K = coulomb_kernel(grid, zero_mode).position_kernel
    psi = to_position(psi_hat, grid)
    lhs = np.sqrt(np.sum(np.abs(K * psi) ** 2) * grid.cell_volume)
    return (
        float(lhs),
        GAMMA_H * np.sqrt(_weighted(psi_hat, grid, grid.p2 + 1.0)),
        GAMMA_H * np.sqrt(_weighted(psi_hat, grid, grid.p2)),
    )


def kato_terms(psi_hat, grid, zero_mode="madelung"):
    """(int K |psi|^2, gamma_K |psi|^2_{H^1/2}, gamma_K |(-Delta)^{1/4} psi|^2)."""
    return (
        coulomb_expectation(psi_hat, grid, zero_mode),
        GAMMA_K * _weighted(psi_hat, grid, grid.lam),
        GAMMA_K * _weighted(psi_hat, grid, grid.pnorm),
    )


def spectral_projection(psi_hat, grid, sign):
    sym = fw_symbol(grid)
    g = sym.forward(psi_hat)
    if sign > 0:
        g[2:] = 0.0
    else:
        g[:2] = 0.0
    return sym.inverse(g)


def tix_terms(psi_hat, grid, sign, zero_mode="madelung"):
    chi = spectral_projection(psi_hat, grid, sign)
    return coulomb_expectation(chi, grid, zero_mode), GAMMA_T * _weighted(chi, grid, grid.lam)


# ---- suites ----------------------------------------------------------------------------------


def check_hardy(n_trials: int = 1000, seed: int = 0, grid: SpectralGrid = DEFAULT_GRID,
                slack: float = DEFAULT_SLACK, zero_mode: str = "madelung") -> InequalityReport:
    """|K psi| <= gamma_H |sqrt(-Delta+1) psi|; the |grad psi| form is reported only.

    On a periodic box the constant mode has zero gradient but nonzero K psi, so
    the gradient form cannot hold for fields with a zero-mode component.
    """
    rng = np.random.default_rng(seed)
    acc = _Accumulator(slack)
    worst_grad = 0.0
    worst_full = 0.0
    for _ in range(n_trials):
        lhs, rhs, rhs_grad = hardy_terms(_trial(grid, rng), grid, zero_mode)
        acc.add(lhs, rhs)
        worst_grad = max(worst_grad, lhs / rhs_grad if rhs_grad > 0 else np.inf)
        lf, rf, _ = hardy_terms(_trial(grid, rng, band=False), grid, zero_mode)
        worst_full = max(worst_full, lf / rf)
    return InequalityReport("hardy", n_trials, acc.worst, acc.violations, slack,
                            reported={"worst_ratio_gradient_form": worst_grad, "worst_ratio_full_band": worst_full})


def check_kato(n_trials: int = 1000, seed: int = 0, grid: SpectralGrid = DEFAULT_GRID,
               slack: float = DEFAULT_SLACK, zero_mode: str = "madelung") -> InequalityReport:
    """int K |psi|^2 <= gamma_K |psi|^2_{H^1/2}.

    The (-Delta)^{1/4} middle bound has the smaller denominator, so its ratio is
    never below the gated one; it is reported and its ordering counted.
    """
    rng = np.random.default_rng(seed)
    acc = _Accumulator(slack)
    worst_mid = 0.0
    order_ok = 0
    worst_full = 0.0
    for _ in range(n_trials):
        lhs, rhs, rhs_mid = kato_terms(_trial(grid, rng), grid, zero_mode)
        acc.add(lhs, rhs)
        r_mid = lhs / rhs_mid if rhs_mid > 0 else np.inf
        worst_mid = max(worst_mid, r_mid)
        order_ok += r_mid >= lhs / rhs
        lf, rf, _ = kato_terms(_trial(grid, rng, band=False), grid, zero_mode)
        worst_full = max(worst_full, lf / rf)
    return InequalityReport("kato", n_trials, acc.worst, acc.violations, slack,
                            reported={"worst_ratio_middle_bound": worst_mid,
                                      "middle_ratio_dominates": int(order_ok),
                                      "worst_ratio_full_band": worst_full})


def check_tix(n_trials: int = 1000, seed: int = 0, grid: SpectralGrid = DEFAULT_GRID,
              slack: float = DEFAULT_SLACK, zero_mode: str = "madelung") -> InequalityReport:
    """int K |Lambda_pm psi|^2 <= gamma_T |Lambda_pm psi|^2_{H^1/2}, both signs."""
    rng = np.random.default_rng(seed)
    acc = _Accumulator(slack)
    worst = {+1: 0.0, -1: 0.0}
    for _ in range(n_trials):
        psi = _trial(grid, rng)
        for sign in (+1, -1):
            lhs, rhs = tix_terms(psi, grid, sign, zero_mode)
            acc.add(lhs, rhs)
            if rhs > 0:
                worst[sign] = max(worst[sign], lhs / rhs)
    return InequalityReport("tix", n_trials, acc.worst, acc.violations, slack,
                            reported={"worst_ratio_plus": worst[1], "worst_ratio_minus": worst[-1],
                                      "gamma_T": GAMMA_T, "gamma_K": GAMMA_K})


def convolution_terms(rho, psi_hat, grid, gamma, zero_mode="madelung"):
    """(pair_energy(rho, |psi|^2), gamma |rho|_{L^1} |psi|^2_{H^1/2})."""
    kernel = coulomb_kernel(grid, zero_mode)
    psi = to_position(psi_hat, grid)
    dens = np.sum(np.abs(psi) ** 2, axis=0)
    lhs = pair_energy(rho, dens, kernel)
    rhs = gamma * np.sum(np.abs(rho)) * grid.cell_volume * _weighted(psi_hat, grid, grid.lam)
    return lhs, rhs


def check_convolution_bounds(n_trials: int = 1000, seed: int = 0, grid: SpectralGrid = DEFAULT_GRID,
                             slack: float = DEFAULT_SLACK, zero_mode: str = "madelung") -> InequalityReport:
    """Kato bound for a smeared charge, plus its Lambda_pm version with gamma_T."""
    rng = np.random.default_rng(seed)
    acc = _Accumulator(slack)
    worst = {"kato": 0.0, "plus": 0.0, "minus": 0.0}
    for _ in range(n_trials):
        src = to_position(_trial(grid, rng, components=2), grid)
        rho = np.sum(np.abs(src) ** 2, axis=0)
        psi = _trial(grid, rng)
        for key, chi, gamma in (
            ("kato", psi, GAMMA_K),
            ("plus", spectral_projection(psi, grid, +1), GAMMA_T),
            ("minus", spectral_projection(psi, grid, -1), GAMMA_T),
        ):
            lhs, rhs = convolution_terms(rho, chi, grid, gamma, zero_mode)
            acc.add(lhs, rhs)
            if rhs > 0:
                worst[key] = max(worst[key], lhs / rhs)
    return InequalityReport("convolution", n_trials, acc.worst, acc.violations, slack,
                            reported={f"worst_ratio_{k}": v for k, v in worst.items()})


def self_energies(psi_hat, grid, zero_mode="madelung"):
    """(D_rho, D_J) spectrally, and the pointwise max of |J| - rho."""
    kernel = coulomb_kernel(grid, zero_mode)
    dc = density_current(to_position(psi_hat, grid))
    pot = kernel.convolve(dc)
    d_rho = float(np.sum(dc[0] * pot[0]) * grid.cell_volume)
    d_j = float(np.sum(dc[1:] * pot[1:]) * grid.cell_volume)
    excess = float(np.max(np.sqrt(np.sum(dc[1:] ** 2, axis=0)) - dc[0]))
    return d_rho, d_j, excess


def oracle_current_energy(psi_hat, grid, zero_mode="madelung") -> float:
    kernel = coulomb_kernel(grid, zero_mode)
    dc = density_current(to_position(psi_hat, grid))
    return sum(oracle_pair_energy(dc[k], dc[k], kernel) for k in (1, 2, 3))


def check_positivity(n_trials: int = 1000, seed: int = 0, grid: SpectralGrid = DEFAULT_GRID,
                     tol: float = 1e-10, oracle_grid: SpectralGrid | None = None,
                     oracle_trials: int = 3, oracle_rtol: float = 1e-10,
                     zero_mode: str = "madelung") -> InequalityReport:
    """D_J >= 0, D_rho - D_J >= 0 and |J| <= rho pointwise; D_J also against the brute-force oracle.

    worst_ratio is the largest of -D_J/D_rho, (D_J - D_rho)/D_rho and (|J| - rho)/max rho.
    """
    rng = np.random.default_rng(seed)
    worst = -np.inf
    violations = 0
    for _ in range(n_trials):
        psi = _trial(grid, rng)
        d_rho, d_j, excess = self_energies(psi, grid, zero_mode)
        scale = max(d_rho, 1e-300)
        worst = max(worst, -d_j / scale, (d_j - d_rho) / scale, excess)
        violations += (d_j < -tol) + (d_rho - d_j < -tol) + (excess > tol)
    og = oracle_grid or SpectralGrid(8, grid.box_length)
    orng = np.random.default_rng([seed, 1])
    worst_rel = 0.0
    for _ in range(oracle_trials):
        psi = _trial(og, orng)
        _, d_j, _ = self_energies(psi, og, zero_mode)
        ref = oracle_current_energy(psi, og, zero_mode)
        rel = abs(d_j - ref) / max(abs(ref), 1e-300)
        worst_rel = max(worst_rel, rel)
        violations += rel > oracle_rtol
    return InequalityReport("positivity", n_trials, float(worst), int(violations), tol,
                            reported={"oracle_grid": og.n, "oracle_trials": oracle_trials,
                                      "oracle_worst_relative_error": worst_rel})


def apm_deviation(lam: np.ndarray) -> np.ndarray:
    """a_+ - 1 without cancellation: -(lam - 1) / (2 lam (a_+ + 1))."""
    ap = a_plus(lam)
    return -((lam * lam - 1.0) / (lam + 1.0)) / (2.0 * lam * (ap + 1.0))


def check_apm_expansion(eps_list=DEFAULT_EPS, p_samples: SpectralGrid | np.ndarray = DEFAULT_GRID,
                        slack: float = DEFAULT_SLACK) -> InequalityReport:
    """|a_+(eps p) - 1| <= eps^2 |p|^2 and |a_-(eps p)| <= eps |p| on lattice momenta.

    Also records the ratio |a_+(eps p) - 1| / (eps |p|)^2 at the two smallest eps;
    its stability (limit 1/8) confirms the O(eps^2) behaviour.
    """
    p = p_samples.pnorm.ravel() if isinstance(p_samples, SpectralGrid) else np.asarray(p_samples, float).ravel()
    p = p[p > 0]
    acc = _Accumulator(slack)
    ratios = {}
    for eps in eps_list:
        x = eps * p
        lam = np.sqrt(x * x + 1.0)
        dev = np.abs(apm_deviation(lam))
        am = a_minus(lam)
        if eps == 0:
            continue
        for lhs, rhs in ((dev, x * x), (am, x)):
            r = lhs / rhs
            acc.worst = max(acc.worst, float(r.max()))
            acc.violations += int(np.sum(lhs > rhs * (1.0 + slack)))
        ratios[eps] = dev / (x * x)
    reported = {}
    small = sorted(e for e in ratios if e > 0)[:2]
    if len(small) == 2:
        drift = np.max(np.abs(ratios[small[0]] - ratios[small[1]]) / ratios[small[1]])
        reported["ratio_drift_smallest_eps"] = float(drift)
        reported["ratio_limit"] = float(np.mean(ratios[small[0]]))
    return InequalityReport("apm", len(p) * len(eps_list), acc.worst, acc.violations, slack,
                            notes="lattice momenta of the default grid", reported=reported)


@dataclass(frozen=True)
class CouplingReport:
    Z: int
    alpha_fs: float
    z_alpha_gamma_T: float
    z1_alpha_gamma_T: float
    concavity_margin: float
    one_minus_2_alpha_gamma_T: float
    flags: tuple

    @property
    def admissible(self) -> bool:
        return not self.flags

    def as_dict(self) -> dict:
        return {
            "Z": self.Z,
            "alpha_fs": self.alpha_fs,
            "Z_alpha_gamma_T": self.z_alpha_gamma_T,
            "Z1_alpha_gamma_T": self.z1_alpha_gamma_T,
            "one_minus_8_alpha_gamma_T": self.concavity_margin,
            "one_minus_2_alpha_gamma_T": self.one_minus_2_alpha_gamma_T,
            "flags": list(self.flags),
        }


def check_coupling_constants(Z: int, alpha: float = ALPHA_FS) -> CouplingReport:
    zt = Z * alpha * GAMMA_T
    z1t = (Z + 1) * alpha * GAMMA_T
    flags = []
    if not 0 < zt < 1:
        flags.append("Z*alpha*gamma_T outside (0, 1)")
    if z1t > 1:
        flags.append("(Z+1)*alpha*gamma_T exceeds 1")
    if not Z_MIN_EXISTENCE <= Z <= Z_MAX_EXISTENCE:
        flags.append(f"Z outside existence range {Z_MIN_EXISTENCE}..{Z_MAX_EXISTENCE}")
    return CouplingReport(int(Z), float(alpha), zt, z1t, 1 - 8 * alpha * GAMMA_T, 1 - 2 * alpha * GAMMA_T, tuple(flags))


SUITES = {
    "hardy": check_hardy,
    "kato": check_kato,
    "tix": check_tix,
    "convolution": check_convolution_bounds,
    "positivity": check_positivity,
    "apm": None,
}


def run_suite(names, n_trials: int, seed: int) -> list[InequalityReport]:
    out = []
    for name in names:
        if name == "apm":
            out.append(check_apm_expansion())
        else:
            out.append(SUITES[name](n_trials, seed))
    return out


__all__ = [
    "CouplingReport",
    "InequalityReport",
    "SUITES",
    "check_apm_expansion",
    "check_convolution_bounds",
    "check_coupling_constants",
    "check_hardy",
    "check_kato",
    "check_positivity",
    "check_tix",
    "run_suite",
]

