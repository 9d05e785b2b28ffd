"""Desk-scale experiment scenarios wiring the library modules together.

Each scenario is a pure function of (config, seed): it returns a report
object plus append-only result rows, and re-running it reproduces every
value except wall_time.

Estimator policy, applied uniformly: greedy packings are lower bounds and
greedy covers upper bounds, and no inequality is reported as verified unless
the bound directions support it. Orbit dimension headlines come from the
exact commutant multiplicity count of the constructed microstates (at fixed
k the microstate orbit is a smooth manifold whose dimension is k^2 minus the
squared eigenvalue multiplicities), extrapolated in 1/k across the k grid;
sampled packing slopes and neighborhood-volume bounds ride along as
diagnostics, since point samples of size ~2000/k cannot resolve exponents of
order k^2 on their own. The scenario refuses to distill a single dimension
number without the per-k trend next to it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..algebra import (
    FiniteDimAlgebra,
    commutant_unitary_dim,
    delta0_fd,
    plan_representation,
    represent,
    standard_generators,
)
from ..errors import EpsTooLargeError, NonInjectiveMapError, SingletonOrbitError
from ..matrixcore import MatrixTuple, hs_distance
from ..metricgeom import PointCloud, constrained_cover_sum, fit_log_slope, packing_number
from ..microstates import (
    MicrostateSpec,
    build_quantile_microstate,
    freeness_defect,
    is_microstate,
    orbit_point_at_distance,
    orbit_sample,
    product_orbit_sample,
)
from ..rmtformulas import (
    chi_single,
    hausdorff_entropy_constant,
    log_energy,
    log_energy_quadrature,
    mehta_constant_log,
    orbit_volume_lower_bound,
    selberg_box_log,
    selberg_box_quadrature_log,
)
from ..spectral import SpectralMeasure, build_quantile_plan, delta0_single
from .config import ScenarioConfig
from .results import ResultRow


def _now() -> float:
    return time.perf_counter()


def _extrapolate_in_inverse_k(k_grid, values):
    """Least-squares intercept of values against 1/k; (estimate, stderr)."""
    if len(values) == 1:
        return float(values[0]), 0.0
    x = [1.0 / k for k in k_grid]
    slope, intercept, stderr, _ = fit_log_slope(x, values)
    # stderr of the intercept under the same linear model
    xa = np.asarray(x)
    n = xa.size
    resid = np.asarray(values) - (slope * xa + intercept)
    dof = max(n - 2, 1)
    sxx = float(np.sum((xa - xa.mean()) ** 2))
    se_int = math.sqrt(float(np.sum(resid**2)) / dof * (1.0 / n + xa.mean() ** 2 / sxx))
    return float(intercept), se_int


def _window_slope(eps_grid, counts, n_points):
    """Empirical packing slope over the informative scales (1 < count < N).

    Saturated scales (count at 1 or at the sample ceiling) carry no exponent
    information; returns nan when fewer than two scales remain.
    """
    xs, ys = [], []
    for e, c in zip(eps_grid, counts):
        if 1 < c < n_points:
            xs.append(abs(math.log(e)))
            ys.append(math.log(c))
    if len(xs) < 2:
        return float("nan")
    slope, _, _, _ = fit_log_slope(xs, ys)
    return slope


def _adaptive_window_scales(cloud: PointCloud, num: int = 8) -> list[float]:
    """Scales placed at pairwise-distance quantiles of the sample.

    High-dimensional orbit clouds concentrate their distances in a narrow
    band, so fixed log grids straddle the packing transition; quantile
    placement guarantees informative counts for the diagnostic slope.
    """
    d = cloud.distance_matrix()
    iu = np.triu_indices(cloud.size, k=1)
    pair = np.sort(d[iu])
    if pair.size == 0 or pair[-1] <= 0:
        return []
    qs = np.geomspace(2.0 / pair.size, 0.9, num)
    scales = []
    for q in qs:
        v = float(pair[min(int(q * pair.size), pair.size - 1)]) / 2.0
        if v > 0 and (not scales or v > scales[-1] * 1.0001):
            scales.append(v)
    return scales[::-1]


def _empirical_orbit_slope(cloud: PointCloud) -> float:
    """Packing slope of the sampled orbit over its own informative window.

    A concentration-limited diagnostic: point samples of size ~2000/k see
    only part of an exponent of order k^2, so this reads as a loose lower
    signal, reported next to the exact orbit dimension rather than asserted
    against it.
    """
    scales = _adaptive_window_scales(cloud)
    if len(scales) < 2:
        return float("nan")
    counts = [packing_number(cloud, e) for e in scales]
    return _window_slope(scales, counts, cloud.size)


@dataclass
class OrbitKCell:
    k: int
    exact_alpha: float
    counts: list[int]
    normalized_log_counts: list[float]
    empirical_slope: float
    vb_slope: float = float("nan")
    membership_ok: bool = True


@dataclass
class SingleDimReport:
    target: float
    estimate: float
    stderr: float
    gap: float
    cells: list[OrbitKCell]
    rows: list[ResultRow] = field(default_factory=list)
    tables: dict = field(default_factory=dict)


def _orbit_cells_for_measure(
    mu: SpectralMeasure, config: ScenarioConfig, scenario: str, seed_offset: int = 0
):
    """Per-k exact orbit dimensions plus sampled packing diagnostics."""
    cells, rows, tables = [], [], {}
    for ki, k in enumerate(config.k_grid):
        t0 = _now()
        ms = build_quantile_microstate(mu, k, config.tau)
        exact_alpha = ms.orbit_dimension() / k**2
        base = ms.as_tuple()

        counts = []
        norm_logs = []
        emp_slope = float("nan")
        membership_ok = True
        if exact_alpha > 0.0:
            sample = orbit_sample(
                base, config.orbit_count(k), config.seed + seed_offset + 1000 * ki
            )
            spec = MicrostateSpec.from_measure(
                mu, R=config.R, m=config.m, k=k, gamma=config.gamma
            )
            membership_ok = is_microstate(sample.points[0], spec).ok
            cloud = PointCloud.from_tuples(sample.points)
            for e in config.eps_grid:
                counts.append(packing_number(cloud, e))
            norm_logs = [math.log(c) / k**2 for c in counts]
            emp_slope = _window_slope(config.eps_grid, counts, cloud.size)
            if math.isnan(emp_slope):
                emp_slope = _empirical_orbit_slope(cloud)
        else:
            counts = [1 for _ in config.eps_grid]
            norm_logs = [0.0 for _ in config.eps_grid]
            emp_slope = 0.0

        vb_slope = float("nan")
        if not ms.plan.degenerate:
            try:
                bound = orbit_volume_lower_bound(ms.plan, sorted(ms.a_diag))
                if not bound.degenerate:
                    vb_slope = (bound.p_k**2 - bound.beta * k**2) / k**2
            except ValueError:
                pass

        wall = _now() - t0
        cell = OrbitKCell(
            k=k,
            exact_alpha=exact_alpha,
            counts=counts,
            normalized_log_counts=norm_logs,
            empirical_slope=emp_slope,
            vb_slope=vb_slope,
            membership_ok=membership_ok,
        )
        cells.append(cell)
        rows.append(
            ResultRow(scenario, k, float("nan"), "exact_orbit_alpha", exact_alpha,
                      seed=config.seed, wall_time=wall)
        )
        for e, c, nl in zip(config.eps_grid, counts, norm_logs):
            rows.append(ResultRow(scenario, k, e, "packing_count", c,
                                  seed=config.seed, wall_time=0.0))
            rows.append(ResultRow(scenario, k, e, "norm_log_packing", nl,
                                  seed=config.seed, wall_time=0.0))
        rows.append(ResultRow(scenario, k, float("nan"), "empirical_window_slope",
                              emp_slope, seed=config.seed, wall_time=0.0))
        if not math.isnan(vb_slope):
            rows.append(ResultRow(scenario, k, float("nan"), "volume_bound_slope",
                                  vb_slope, seed=config.seed, wall_time=0.0))
        tables[f"k{k}"] = [
            (abs(math.log(e)), nl) for e, nl in zip(config.eps_grid, norm_logs)
        ]
    return cells, rows, tables


def run_single_selfadjoint_dimension(config: ScenarioConfig) -> SingleDimReport:
    """Dimension scenario for one selfadjoint given by its spectral measure."""
    mu = config.measure
    if mu is None:
        raise ValueError("dim-single needs a measure")
    target = delta0_single(mu)
    cells, rows, tables = _orbit_cells_for_measure(mu, config, "dim-single")
    estimate, stderr = _extrapolate_in_inverse_k(
        config.k_grid, [c.exact_alpha for c in cells]
    )
    rows.append(ResultRow("dim-single", 0, float("nan"), "estimate", estimate,
                          stderr=stderr, seed=config.seed))
    rows.append(ResultRow("dim-single", 0, float("nan"), "target", target,
                          seed=config.seed))
    return SingleDimReport(
        target=target,
        estimate=estimate,
        stderr=stderr,
        gap=estimate - target,
        cells=cells,
        rows=rows,
        tables=tables,
    )


@dataclass
class AlgebraDimReport:
    target: float
    estimate: float
    stderr: float
    gap: float
    exact_ratios: list[float]
    trace_errors: list[float]
    empirical_slopes: list[float]
    rows: list[ResultRow] = field(default_factory=list)
    tables: dict = field(default_factory=dict)


def run_fd_algebra_dimension(config: ScenarioConfig) -> AlgebraDimReport:
    """Exact commutant dimension ratios plus sampled orbit diagnostics."""
    algebra = config.algebra
    if algebra is None:
        raise ValueError("dim-algebra needs an algebra")
    target = delta0_fd(algebra)
    generators = standard_generators(algebra)

    ratios, terrs, slopes, rows, tables = [], [], [], [], {}
    for ki, k in enumerate(config.k_grid):
        t0 = _now()
        plan = plan_representation(algebra, k, config.representation_eps)
        ratio = (k * k - commutant_unitary_dim(plan)) / (k * k)
        ratios.append(ratio)
        terrs.append(plan.trace_error)

        images = [represent(plan, algebra, gen) for gen in generators]
        base = MatrixTuple(images)
        sample = orbit_sample(base, config.orbit_count(k), config.seed + 77 * ki)
        cloud = PointCloud.from_tuples(sample.points)
        counts = [packing_number(cloud, e) for e in config.eps_grid]
        emp = _window_slope(config.eps_grid, counts, cloud.size)
        if math.isnan(emp):
            emp = _empirical_orbit_slope(cloud)
        slopes.append(emp)

        wall = _now() - t0
        rows.append(ResultRow("dim-algebra", k, float("nan"), "exact_dim_ratio",
                              ratio, seed=config.seed, wall_time=wall))
        rows.append(ResultRow("dim-algebra", k, float("nan"), "trace_error",
                              plan.trace_error, seed=config.seed))
        for e, c in zip(config.eps_grid, counts):
            rows.append(ResultRow("dim-algebra", k, e, "packing_count", c,
                                  seed=config.seed))
        rows.append(ResultRow("dim-algebra", k, float("nan"),
                              "empirical_window_slope", emp, seed=config.seed))
        tables[f"k{k}"] = [
            (abs(math.log(e)), math.log(c) / k**2)
            for e, c in zip(config.eps_grid, counts)
        ]

    estimate, stderr = _extrapolate_in_inverse_k(config.k_grid, ratios)
    rows.append(ResultRow("dim-algebra", 0, float("nan"), "estimate", estimate,
                          stderr=stderr, seed=config.seed))
    rows.append(ResultRow("dim-algebra", 0, float("nan"), "target", target,
                          seed=config.seed))
    return AlgebraDimReport(
        target=target,
        estimate=estimate,
        stderr=stderr,
        gap=estimate - target,
        exact_ratios=ratios,
        trace_errors=terrs,
        empirical_slopes=slopes,
        rows=rows,
        tables=tables,
    )


@dataclass
class AdditivityReport:
    joint_target: float
    joint_estimate: float
    marginal_estimates: list[float]
    rotated_pass_rate: float
    unrotated_fail_rate: float
    filter_pass_rates: list[float]
    subadditivity_holds: bool
    rows: list[ResultRow] = field(default_factory=list)


def run_additivity(config: ScenarioConfig) -> AdditivityReport:
    """Freeness pass rates and joint-versus-marginal dimension accounting.

    The joint exponent uses the product-orbit manifold dimension (the sum of
    the factor orbit dimensions); the sampled clouds provide the freeness
    filter F_k and the subadditive packing comparison at matched scales
    (joint at 4*eps*sqrt(n) against the product of marginals at eps), whose
    bound directions make the inequality exact on the estimators.
    """
    measures = config.all_measures()
    if len(measures) < 1:
        raise ValueError("additivity needs at least one measure")
    n = len(measures)
    rows: list[ResultRow] = []

    marginal_alphas_per_k = []  # [k][i]
    joint_alphas = []
    for k in config.k_grid:
        per = []
        for mu in measures:
            ms = build_quantile_microstate(mu, k, config.tau)
            per.append(ms.orbit_dimension() / k**2)
        marginal_alphas_per_k.append(per)
        joint_alphas.append(sum(per))
        rows.append(ResultRow("additivity", k, float("nan"), "joint_exact_alpha",
                              joint_alphas[-1], seed=config.seed))

    marginal_estimates = []
    for i in range(n):
        est, _ = _extrapolate_in_inverse_k(
            config.k_grid, [per[i] for per in marginal_alphas_per_k]
        )
        marginal_estimates.append(est)
    joint_estimate, _ = _extrapolate_in_inverse_k(config.k_grid, joint_alphas)
    joint_target = sum(delta0_single(mu) for mu in measures)

    # freeness pass rates at the dedicated size
    kf = config.freeness_k
    bases = [build_quantile_microstate(mu, kf, config.tau).as_tuple()
             for mu in measures]
    passes = 0
    if n >= 2:
        joined = product_orbit_sample(bases, config.freeness_trials, config.seed + 5)
        for tup in joined:
            groups = _split_groups(tup, [b.arity for b in bases])
            if freeness_defect(groups, config.m) < config.gamma:
                passes += 1
        rotated_rate = passes / config.freeness_trials
        base0 = bases[0]
        unrot_defect = freeness_defect([base0, base0], config.m)
        unrotated_fail = 1.0 if unrot_defect >= config.gamma else 0.0
    else:
        rotated_rate = 1.0
        unrotated_fail = float("nan")
    rows.append(ResultRow("additivity", kf, float("nan"), "rotated_pass_rate",
                          rotated_rate, seed=config.seed))
    rows.append(ResultRow("additivity", kf, float("nan"), "unrotated_fail_rate",
                          unrotated_fail, seed=config.seed))

    # freeness-filtered joint clouds and the subadditive packing comparison
    filter_rates = []
    subadd_ok = True
    for ki, k in enumerate(config.k_grid):
        bases_k = [build_quantile_microstate(mu, k, config.tau).as_tuple()
                   for mu in measures]
        count = config.orbit_count(k)
        joined = product_orbit_sample(bases_k, count, config.seed + 13 * ki)
        if n >= 2:
            kept = [
                tup for tup in joined
                if freeness_defect(_split_groups(tup, [b.arity for b in bases_k]),
                                   config.m) < config.gamma
            ]
        else:
            kept = joined
        rate = len(kept) / len(joined)
        filter_rates.append(rate)
        rows.append(ResultRow("additivity", k, float("nan"), "filter_pass_rate",
                              rate, seed=config.seed))

        joint_cloud = PointCloud.from_tuples(joined)
        marg_clouds = [
            PointCloud.from_tuples(
                [MatrixTuple(_split_groups(t, [b.arity for b in bases_k])[i].components)
                 for t in joined]
            )
            for i in range(n)
        ]
        for e in config.eps_grid:
            joint_p = packing_number(joint_cloud, 4.0 * e * math.sqrt(n))
            prod_log = sum(math.log(packing_number(c, e)) for c in marg_clouds)
            ok = math.log(joint_p) <= prod_log + 1e-12
            subadd_ok = subadd_ok and ok
            rows.append(ResultRow("additivity", k, e, "subadd_joint_packing",
                                  joint_p, seed=config.seed))
            rows.append(ResultRow("additivity", k, e, "subadd_marginal_log_product",
                                  prod_log, seed=config.seed))

    rows.append(ResultRow("additivity", 0, float("nan"), "joint_estimate",
                          joint_estimate, seed=config.seed))
    rows.append(ResultRow("additivity", 0, float("nan"), "joint_target",
                          joint_target, seed=config.seed))
    return AdditivityReport(
        joint_target=joint_target,
        joint_estimate=joint_estimate,
        marginal_estimates=marginal_estimates,
        rotated_pass_rate=rotated_rate,
        unrotated_fail_rate=unrotated_fail,
        filter_pass_rates=filter_rates,
        subadditivity_holds=subadd_ok,
        rows=rows,
    )


def _split_groups(joined: MatrixTuple, arities: list[int]) -> list[MatrixTuple]:
    groups = []
    pos = 0
    for a in arities:
        groups.append(MatrixTuple(joined.components[pos : pos + a]))
        pos += a
    return groups


def _polynomial_apply(coeffs, values):
    out = np.zeros_like(np.asarray(values, dtype=float))
    for power, c in enumerate(coeffs):
        out = out + c * np.asarray(values, dtype=float) ** power
    return out


def check_injective_on(coeffs, lo: float, hi: float, samples: int = 4097) -> float:
    """Reject non-injective polynomials; returns the Lipschitz bound max|f'|."""
    ts = np.linspace(lo, hi, samples)
    vals = _polynomial_apply(coeffs, ts)
    diffs = np.diff(vals)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise NonInjectiveMapError(
            f"polynomial is not injective on [{lo}, {hi}]"
        )
    dcoeffs = [c * p for p, c in enumerate(coeffs)][1:]
    if dcoeffs:
        lip = float(np.max(np.abs(_polynomial_apply(dcoeffs, ts))))
    else:
        lip = 0.0
    return max(lip, 1e-12)


@dataclass
class InvarianceReport:
    estimate_identity: float
    estimate_image: float
    difference: float
    lipschitz: float
    constrained_delta: float
    rows: list[ResultRow] = field(default_factory=list)


def run_invariance(config: ScenarioConfig) -> InvarianceReport:
    """Dimension agreement between a generator and its polynomial image.

    A spectrum-injective polynomial preserves eigenvalue multiplicities, so
    the exact orbit dimensions agree identically; the sampled diagnostics and
    the constrained covers at delta = L * sqrt(gamma) exercise the estimator
    path on both orbits.
    """
    mu = config.measure
    if mu is None:
        raise ValueError("invariance needs a measure")
    lip = check_injective_on(config.polynomial, mu.support_lo, mu.support_hi)
    delta = lip * math.sqrt(config.cover_gamma)
    rows: list[ResultRow] = []

    alphas_id, alphas_img = [], []
    for ki, k in enumerate(config.k_grid):
        ms = build_quantile_microstate(mu, k, config.tau)
        alphas_id.append(ms.orbit_dimension() / k**2)

        img_vals = _polynomial_apply(config.polynomial, ms.y_diag)
        counts: dict[float, int] = {}
        for v in img_vals:
            counts[float(v)] = counts.get(float(v), 0) + 1
        img_dim = k * k - sum(m * m for m in counts.values())
        alphas_img.append(img_dim / k**2)

        rows.append(ResultRow("invariance", k, float("nan"), "alpha_identity",
                              alphas_id[-1], seed=config.seed))
        rows.append(ResultRow("invariance", k, float("nan"), "alpha_image",
                              alphas_img[-1], seed=config.seed))

        base = ms.as_tuple()
        img_base = MatrixTuple([np.diag(img_vals).astype(np.complex128)])
        for tag, b in (("identity", base), ("image", img_base)):
            sample = orbit_sample(b, config.orbit_count(k),
                                  config.seed + 31 * ki + (0 if tag == "identity" else 7))
            cloud = PointCloud.from_tuples(sample.points)
            counts_p = [packing_number(cloud, e) for e in config.eps_grid]
            emp = _window_slope(config.eps_grid, counts_p, cloud.size)
            if math.isnan(emp):
                emp = _empirical_orbit_slope(cloud)
            rows.append(ResultRow("invariance", k, float("nan"),
                                  f"empirical_slope_{tag}", emp, seed=config.seed))
            for e in config.eps_grid:
                if e > delta:
                    val = constrained_cover_sum(
                        cloud, delta, e, 1.0,
                        restarts=config.restarts, seed=config.seed,
                    )
                    rows.append(ResultRow("invariance", k, e,
                                          f"constrained_cover_{tag}", val,
                                          seed=config.seed))

    est_id, _ = _extrapolate_in_inverse_k(config.k_grid, alphas_id)
    est_img, _ = _extrapolate_in_inverse_k(config.k_grid, alphas_img)
    rows.append(ResultRow("invariance", 0, float("nan"), "estimate_identity",
                          est_id, seed=config.seed))
    rows.append(ResultRow("invariance", 0, float("nan"), "estimate_image",
                          est_img, seed=config.seed))
    return InvarianceReport(
        estimate_identity=est_id,
        estimate_image=est_img,
        difference=abs(est_id - est_img),
        lipschitz=lip,
        constrained_delta=delta,
        rows=rows,
    )


@dataclass
class BallDiameterReport:
    cells: int
    successes: int
    eps_too_large: int
    success_rate: float
    worst_error: float
    rows: list[ResultRow] = field(default_factory=list)


def run_ball_diameter_check(config: ScenarioConfig) -> BallDiameterReport:
    """Exact-distance reachability on orbit points across an eps grid."""
    mu = config.measure
    if mu is None:
        raise ValueError("ball-diameter needs a measure")
    if len(mu.atoms) <= 1 and mu.diffuse_mass <= 0.0:
        raise SingletonOrbitError("scalar measure: orbit is one point")
    k = config.k_grid[0]
    ms = build_quantile_microstate(mu, k, config.tau)
    base = ms.as_tuple()

    per_eps = max(1, config.ball_cells // len(config.eps_grid))
    sample = orbit_sample(base, per_eps, config.seed + 3)
    rows: list[ResultRow] = []
    successes = too_large = attempted = 0
    worst = 0.0
    for ei, e in enumerate(config.eps_grid):
        for xi, x in enumerate(sample.points):
            if attempted >= config.ball_cells:
                break
            attempted += 1
            t0 = _now()
            try:
                y = orbit_point_at_distance(x, e, config.seed + 911 * ei + xi)
                err = abs(hs_distance(x, y) - e)
                worst = max(worst, err)
                ok = err <= 1e-9
                successes += int(ok)
                rows.append(ResultRow("ball-diameter", k, e, "distance_error",
                                      err, seed=config.seed, wall_time=_now() - t0))
            except EpsTooLargeError:
                too_large += 1
                rows.append(ResultRow("ball-diameter", k, e, "eps_too_large",
                                      1.0, seed=config.seed, wall_time=_now() - t0))
    bisected = attempted - too_large
    rate = successes / bisected if bisected else 0.0
    rows.append(ResultRow("ball-diameter", k, float("nan"), "success_rate",
                          rate, seed=config.seed))
    return BallDiameterReport(
        cells=attempted,
        successes=successes,
        eps_too_large=too_large,
        success_rate=rate,
        worst_error=worst,
        rows=rows,
    )


@dataclass
class FormulaCheck:
    name: str
    value: float
    reference: float
    tolerance: float
    relative: bool

    @property
    def error(self) -> float:
        err = abs(self.value - self.reference)
        if self.relative:
            err /= max(abs(self.reference), 1e-300)
        return err

    @property
    def ok(self) -> bool:
        return self.error < self.tolerance


@dataclass
class FormulaSuiteReport:
    checks: list[FormulaCheck]
    all_ok: bool
    rows: list[ResultRow] = field(default_factory=list)


def _mehta_box_volume_mc(trials: int, seed: int) -> float:
    """Monte Carlo entry-Lebesgue volume of 2x2 selfadjoints with spectrum in [0, 1].

    Samples the entry coordinates (d1, d2, Re x12, Im x12) uniformly in a
    bounding box and hit-tests the closed-form 2x2 eigenvalues; an oracle
    independent of the eigenvalue-density constant it calibrates.
    """
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    box = np.array([[0.0, 1.0], [0.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]])
    widths = box[:, 1] - box[:, 0]
    vol_box = float(np.prod(widths))
    hits = 0
    chunk = 200_000
    done = 0
    while done < trials:
        count = min(chunk, trials - done)
        draws = box[:, 0] + rng.random((count, 4)) * widths
        d1, d2, u, v = draws.T
        mean = 0.5 * (d1 + d2)
        rad = np.sqrt(0.25 * (d1 - d2) ** 2 + u * u + v * v)
        lam_lo, lam_hi = mean - rad, mean + rad
        hits += int(np.sum((lam_lo >= 0.0) & (lam_hi <= 1.0)))
        done += count
    return vol_box * hits / trials


def run_formula_suite(seed: int = 20240101, mc_trials: int = 1_000_000) -> FormulaSuiteReport:
    """All closed-form constants against their independent oracles."""
    checks = []
    for p in (2, 3):
        checks.append(FormulaCheck(
            name=f"selberg_box_log(p={p}) vs quadrature",
            value=selberg_box_log(p, 1.0),
            reference=selberg_box_quadrature_log(p, 1.0),
            tolerance=1e-6,
            relative=True,
        ))
    checks.append(FormulaCheck(
        name="selberg scaling p=2 eps=0.5",
        value=selberg_box_log(2, 0.5) - selberg_box_log(2, 1.0),
        reference=4.0 * math.log(0.5),
        tolerance=1e-12,
        relative=False,
    ))
    # D_2 * integral over the ordered box = pi/24; the independent MC measures
    # the entry-Lebesgue volume, which carries the 2! unordered-tuples factor
    checks.append(FormulaCheck(
        name="mehta 2x2 spectrum-box volume vs Monte Carlo",
        value=math.exp(mehta_constant_log(2)) / 12.0,
        reference=_mehta_box_volume_mc(mc_trials, seed) / 2.0,
        tolerance=0.02,
        relative=True,
    ))
    uniform = SpectralMeasure.uniform(0.0, 1.0)
    checks.append(FormulaCheck(
        name="chi_single(uniform[0,1]) energy vs quadrature",
        value=log_energy(uniform),
        reference=log_energy_quadrature(uniform),
        tolerance=1e-4,
        relative=False,
    ))
    checks.append(FormulaCheck(
        name="chi_single(uniform[0,1]) closed form",
        value=chi_single(uniform),
        reference=-0.75 + 0.5 * math.log(2.0 * math.pi),
        tolerance=1e-12,
        relative=False,
    ))
    for nn in (1, 2, 4):
        checks.append(FormulaCheck(
            name=f"entropy-constant doubling identity n={nn}",
            value=hausdorff_entropy_constant(2 * nn) - 2 * hausdorff_entropy_constant(nn),
            reference=nn * math.log(2.0),
            tolerance=1e-12,
            relative=False,
        ))
    rows = [
        ResultRow("formulas", 0, float("nan"), c.name, c.value,
                  stderr=c.error, seed=seed)
        for c in checks
    ]
    return FormulaSuiteReport(checks=checks, all_ok=all(c.ok for c in checks), rows=rows)
