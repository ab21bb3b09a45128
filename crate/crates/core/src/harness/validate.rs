//! Self-check suite behind `beamsim validate`.
//!
//! Every check reports a measured value against a pinned tolerance. The
//! statistical checks use tolerances several standard errors wide, so the
//! verdict does not depend on the seed.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{self, PowerModelParams};
use crate::beamform::{
    digital_svd_beamformer, hybrid_double_rf, hybrid_lemma2, hybrid_mixed, hybrid_mixed_from_svd,
    mu_zf_digital, quantize_rf_with, select_phase_shifters, PhaseDistance, PhaseResolution,
    SelectionPolicy,
};
use crate::channel::{draw_channel, ChannelModel, ChannelRealization};
use crate::error::Result;
use crate::numerics::matrix::dot_conj;
use crate::numerics::reference::{erf_series, gram_eigenvalues};
use crate::numerics::stats::{ks_statistic, mean, rayleigh_cdf};
use crate::numerics::{erf, sample_complex_gaussian, thin_svd, ComplexMatrix, SeededRng};
use crate::rate::{achievable_rate, capacity_p2p, db_to_linear, sum_rate_mu, waterfill};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub measured: f64,
    /// Largest value accepted.
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub strict: bool,
    pub seed: u64,
    pub passed: bool,
    pub failures: usize,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidateOptions {
    /// Full-size statistical suites (slower).
    pub strict: bool,
    pub seed: u64,
    /// Rounding metric for the quantization checks; `Linear` is the
    /// deliberate fault used to show the bound check has teeth.
    pub phase_distance: PhaseDistance,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            strict: false,
            seed: 7,
            phase_distance: PhaseDistance::Circular,
        }
    }
}

fn check(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: measured.is_finite() && measured <= tolerance,
        measured,
        tolerance,
        detail: detail.into(),
    }
}

fn failed(name: &str, err: impl std::fmt::Display) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: false,
        measured: f64::NAN,
        tolerance: f64::NAN,
        detail: format!("error: {err}"),
    }
}

fn run(name: &str, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| failed(name, e))
}

fn random_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_vec(rows, cols, sample_complex_gaussian(rng, rows * cols))
        .expect("sizes match")
}

fn rayleigh(seed: u64, stream: u64, n_r: usize, n_t: usize) -> Result<ChannelRealization> {
    draw_channel(
        &ChannelModel::rayleigh(n_t, n_r),
        &mut SeededRng::new(seed, stream),
    )
}

fn unitarity_error(q: &ComplexMatrix) -> f64 {
    let g = q.adjoint_matmul(q);
    let n = g.rows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((g[(r, c)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

// (rows, cols, m); the last two take the Krylov path.
const SVD_CASES: [(usize, usize, usize); 6] = [
    (8, 6, 6),
    (6, 8, 6),
    (16, 16, 16),
    (12, 20, 5),
    (64, 64, 4),
    (160, 128, 8),
];

fn svd_unitarity(seed: u64) -> Result<CheckResult> {
    let mut rng = SeededRng::new(seed, 1);
    let mut worst: f64 = 0.0;
    for (rows, cols, m) in SVD_CASES {
        let a = random_matrix(&mut rng, rows, cols);
        let s = thin_svd(&a, m)?;
        worst = worst.max(unitarity_error(&s.u)).max(unitarity_error(&s.v));
    }
    Ok(check(
        "svd_unitarity",
        worst,
        1e-10,
        "max |Q^H Q - I| over U and V",
    ))
}

fn svd_reconstruction(seed: u64) -> Result<CheckResult> {
    let mut rng = SeededRng::new(seed, 2);
    let mut worst: f64 = 0.0;
    for (rows, cols, _) in SVD_CASES {
        let a = random_matrix(&mut rng, rows, cols);
        let full = thin_svd(&a, rows.min(cols))?;
        let rel = a.sub(&full.reconstruct()).frobenius_norm() / a.frobenius_norm();
        worst = worst.max(rel / 1e-8);
    }
    // Truncated: residual bounded by the first dropped singular value.
    for (rows, cols, m) in SVD_CASES {
        let a = random_matrix(&mut rng, rows, cols);
        let full = thin_svd(&a, rows.min(cols))?;
        if m == rows.min(cols) {
            continue;
        }
        let t = thin_svd(&a, m)?;
        let resid = a.sub(&t.reconstruct()).frobenius_norm();
        let bound = full.sigma[m] * (1.0 + 1e-8) * (rows.min(cols) as f64).sqrt();
        worst = worst.max(resid / bound);
    }
    Ok(check(
        "svd_reconstruction",
        worst,
        1.0,
        "residual divided by its allowed bound (full: 1e-8 |A|; truncated: sigma_(m+1) sqrt(min dim))",
    ))
}

fn svd_oracle(seed: u64) -> Result<CheckResult> {
    let mut rng = SeededRng::new(seed, 3);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let (rows, cols) = if i % 2 == 0 { (8, 6) } else { (5, 9) };
        let a = random_matrix(&mut rng, rows, cols);
        let s = thin_svd(&a, rows.min(cols))?;
        let eig = gram_eigenvalues(&a);
        for (j, sigma) in s.sigma.iter().enumerate() {
            let want = eig[j].max(0.0).sqrt();
            worst = worst.max((sigma - want).abs() / want.max(1e-300));
        }
    }
    Ok(check(
        "svd_oracle",
        worst,
        1e-8,
        "relative singular value error against the Gram-matrix Jacobi oracle, 100 instances",
    ))
}

fn erf_accuracy() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for i in 0..=1200 {
        let x = -6.0 + i as f64 * 0.01;
        let want = if x.abs() <= 4.0 {
            erf_series(x)
        } else {
            x.signum()
        };
        worst = worst.max((erf(x) - want).abs());
        if erf(-x) != -erf(x) || erf(x).abs() > 1.0 {
            worst = f64::INFINITY;
        }
    }
    Ok(check(
        "erf_accuracy",
        worst,
        1e-7,
        "|erf - series| on [-6, 6]; oddness exact",
    ))
}

fn waterfill_kkt(seed: u64) -> Result<CheckResult> {
    let mut rng = SeededRng::new(seed, 4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = 1 + (rng.next_u64() % 8) as usize;
        let gains: Vec<f64> = (0..n)
            .map(|_| rng.uniform_range(0.0, 5.0).powi(3))
            .collect();
        let rho = db_to_linear(rng.uniform_range(-20.0, 40.0));
        let budget = rng.uniform_range(0.1, 4.0);
        let p = waterfill(&gains, rho, budget)?;
        let inv: Vec<f64> = gains.iter().map(|g| 1.0 / (rho * g)).collect();
        let active: Vec<usize> = (0..n).filter(|&i| p[i] > 0.0).collect();
        let level = mean(&active.iter().map(|&i| p[i] + inv[i]).collect::<Vec<_>>());
        for i in 0..n {
            let r = if p[i] > 0.0 {
                (p[i] + inv[i] - level).abs()
            } else {
                (level - inv[i]).max(0.0)
            };
            worst = worst.max(r);
        }
        worst = worst.max((p.iter().sum::<f64>() - budget).abs() * 1e3);
    }
    Ok(check(
        "waterfill_kkt",
        worst,
        1e-9,
        "water-level spread and shut-off violations over 1000 instances",
    ))
}

fn phase_matching(seed: u64) -> Result<CheckResult> {
    let chan = rayleigh(seed, 5, 24, 32)?;
    let k = 4;
    let bf = hybrid_lemma2(&chan, k, db_to_linear(20.0))?;
    let v = chan.svd(k)?.v;
    let n = chan.n_t();
    let scale = (n as f64).sqrt();
    let mut rng = SeededRng::new(seed, 6);
    let mut worst = f64::NEG_INFINITY;
    for col in 0..k {
        let vk = v.column(col);
        let f = bf.f_rf.column(col);
        let own = dot_conj(&vk, &f).norm();
        let own_dist: f64 = f
            .iter()
            .zip(&vk)
            .map(|(a, b)| (a / scale - b).norm_sqr())
            .sum();
        for cand in 0..1000 {
            let g: Vec<Complex64> = if cand % 2 == 0 {
                (0..n)
                    .map(|_| Complex64::from_polar(1.0, rng.uniform_range(-3.2, 3.2)))
                    .collect()
            } else {
                f.iter()
                    .map(|z| z * Complex64::from_polar(1.0, rng.uniform_range(-0.3, 0.3)))
                    .collect()
            };
            let corr = dot_conj(&vk, &g).norm();
            let dist: f64 = g
                .iter()
                .zip(&vk)
                .map(|(a, b)| (a / scale - b).norm_sqr())
                .sum();
            worst = worst.max(corr - own).max(own_dist - dist);
        }
    }
    Ok(check(
        "phase_matching_optimality",
        worst,
        1e-12,
        "largest gain of 1000 unit-modulus candidates per column over the phase-matched one",
    ))
}

fn gauge_invariance(seed: u64) -> Result<CheckResult> {
    let rho = db_to_linear(25.0);
    let mut rng = SeededRng::new(seed, 7);
    let mut worst: f64 = 0.0;
    for trial in 0..5 {
        let chan = rayleigh(seed, 100 + trial, 16, 16)?;
        let k = 3;
        let svd = chan.svd(k)?;
        let mut rotated = svd.clone();
        for c in 0..k {
            let w = Complex64::from_polar(1.0, rng.uniform_range(-3.2, 3.2));
            let vc: Vec<Complex64> = svd.v.column(c).iter().map(|z| z * w).collect();
            let uc: Vec<Complex64> = svd.u.column(c).iter().map(|z| z * w).collect();
            rotated.v.set_column(c, &vc);
            rotated.u.set_column(c, &uc);
        }
        for m in [k, k + 1, 2 * k] {
            let a = achievable_rate(&chan, &hybrid_mixed_from_svd(&chan, &svd, k, m, rho)?, rho)?;
            let b = achievable_rate(
                &chan,
                &hybrid_mixed_from_svd(&chan, &rotated, k, m, rho)?,
                rho,
            )?;
            worst = worst.max((a.rate_bits - b.rate_bits).abs());
        }
    }
    Ok(check(
        "gauge_invariance",
        worst,
        1e-9,
        "rate change under unit-phase rotation of singular-vector pairs",
    ))
}

fn closed_form_web() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for k in 1..=16 {
        let l3 = analytic::gap_lemma3(k)?;
        worst = worst
            .max((analytic::gap_general(k, k)? - l3).abs())
            .max(analytic::gap_general(k, 2 * k)?.abs())
            .max((analytic::gap_selection(k, 0.0)? - l3).abs())
            .max((2.0 * analytic::gap_multiuser(k)? - l3).abs());
    }
    let mut prev = f64::INFINITY;
    for i in 0..=400 {
        let e = analytic::expected_v_tilde(i as f64 * 0.01)?;
        if e >= prev {
            worst = f64::INFINITY;
        }
        prev = e;
    }
    let mut prev = f64::INFINITY;
    for bits in 1..=16 {
        let b = analytic::quant_gap_bound(4, bits)?;
        if b >= prev || b < 0.0 {
            worst = f64::INFINITY;
        }
        prev = b;
    }
    Ok(check(
        "closed_form_web",
        worst,
        1e-12,
        "identities between the gap formulas; monotone expected_v_tilde and quantization bound",
    ))
}

fn rate_invariants(seed: u64) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let k = 3;
    for trial in 0..5 {
        let chan = rayleigh(seed, 200 + trial, 16, 20)?;
        let rho = db_to_linear(30.0);
        let c = capacity_p2p(&chan, k, rho)?.rate_bits;
        for bf in [
            digital_svd_beamformer(&chan, k, rho)?,
            hybrid_double_rf(&chan, k, rho)?,
        ] {
            worst = worst.max((achievable_rate(&chan, &bf, rho)?.rate_bits - c).abs());
        }
        let lemma2 = hybrid_lemma2(&chan, k, rho)?;
        let mut others = vec![
            lemma2.clone(),
            hybrid_mixed(&chan, k, k + 1, rho)?,
            quantize_rf_with(
                &chan,
                &lemma2,
                PhaseResolution::digital(2)?,
                rho,
                PhaseDistance::Circular,
            )?,
        ];
        if let Ok(bf) = select_phase_shifters(&chan, k, rho, SelectionPolicy::new(25.0)?) {
            others.push(bf);
        }
        for bf in &others {
            let r = achievable_rate(&chan, bf, rho)?.rate_bits;
            worst = worst.max(r - c);
        }
        // Doubling gamma_t through a sqrt(2) baseband scale is neutral.
        let mut scaled = lemma2.clone();
        scaled.f_b = scaled.f_b.scale(2f64.sqrt());
        scaled.gamma_t *= 2.0;
        worst = worst.max(
            (achievable_rate(&chan, &scaled, rho)?.rate_bits
                - achievable_rate(&chan, &lemma2, rho)?.rate_bits)
                .abs(),
        );
        // Nondecreasing in SNR.
        let mut prev = f64::NEG_INFINITY;
        for db in (0..=8).map(|i| 5.0 * i as f64) {
            let rho = db_to_linear(db);
            let r = achievable_rate(&chan, &hybrid_lemma2(&chan, k, rho)?, rho)?.rate_bits;
            worst = worst.max(prev - r);
            prev = r;
        }
        // Exact ZF: every user sees rho / (K gamma_t).
        let mu = rayleigh(seed, 300 + trial, 4, 32)?;
        let zf = mu_zf_digital(&mu, 4, rho)?;
        let want = 4.0 * (1.0 + rho / (4.0 * zf.gamma_t)).log2();
        worst = worst.max((sum_rate_mu(&mu, &zf, rho)?.rate_bits - want).abs());
    }
    Ok(check(
        "rate_invariants",
        worst,
        1e-9,
        "digital and double-RF equal capacity; capacity bounds hybrids; scale neutrality; SNR monotonicity; ZF closed form",
    ))
}

fn power_model() -> Result<CheckResult> {
    let p = |beta_percent, p_s_mw| PowerModelParams {
        p_ps_mw: 111.0,
        p_s_mw,
        m: 4,
        n_t: 64,
        beta_percent,
    };
    let full = analytic::rf_power_consumption(&p(0.0, 0.0))?;
    let half = analytic::rf_power_consumption(&p(50.0, 1.0))?;
    let worst = (full - 28.416).abs().max((half - 14.464).abs());
    Ok(check(
        "power_model",
        worst,
        1e-12,
        format!("{full} W all shifters on, {half} W with half switched off"),
    ))
}

fn singular_vector_law(seed: u64, n: usize, trials: usize, tol: f64) -> Result<CheckResult> {
    let name = format!("singular_vector_law_n{n}");
    let k = 4;
    let mut samples = Vec::with_capacity(n * k * trials);
    for t in 0..trials {
        let chan = rayleigh(seed, 10_000 + t as u64, n, n)?;
        let v = chan.svd(k)?.v;
        let scale = (n as f64).sqrt();
        samples.extend(
            v.leading_columns(k)
                .as_slice()
                .iter()
                .map(|z| scale * z.norm()),
        );
    }
    let ks = ks_statistic(&samples, |x| {
        rayleigh_cdf(x, std::f64::consts::FRAC_1_SQRT_2)
    })?;
    Ok(check(
        &name,
        ks,
        tol,
        format!("KS distance, {} pooled samples", samples.len()),
    ))
}

fn quantization_bound(seed: u64, trials: usize, metric: PhaseDistance) -> Result<CheckResult> {
    let rho = db_to_linear(34.0);
    let k = 4;
    let mut worst = f64::NEG_INFINITY;
    let mut detail = Vec::new();
    for bits in [2u32, 3, 4] {
        let mut loss = Vec::with_capacity(trials);
        for t in 0..trials {
            let chan = rayleigh(seed, 20_000 + t as u64, 64, 64)?;
            let analog = hybrid_lemma2(&chan, k, rho)?;
            let q = quantize_rf_with(&chan, &analog, PhaseResolution::digital(bits)?, rho, metric)?;
            loss.push(
                achievable_rate(&chan, &analog, rho)?.rate_bits
                    - achievable_rate(&chan, &q, rho)?.rate_bits,
            );
        }
        let bound = analytic::quant_gap_bound(k, bits)?;
        let m = mean(&loss);
        detail.push(format!("B={bits}: {m:.3} vs bound {bound:.3}"));
        worst = worst.max(m - bound);
    }
    Ok(check(
        "quantization_bound",
        worst,
        0.5,
        format!("largest mean loss minus bound; {}", detail.join(", ")),
    ))
}

fn lemma3_gap(seed: u64, trials: usize) -> Result<CheckResult> {
    let rho = db_to_linear(34.0);
    let mut gaps = Vec::with_capacity(trials);
    for t in 0..trials {
        let chan = rayleigh(seed, 30_000 + t as u64, 64, 64)?;
        let c = capacity_p2p(&chan, 4, rho)?.rate_bits;
        gaps.push(c - achievable_rate(&chan, &hybrid_lemma2(&chan, 4, rho)?, rho)?.rate_bits);
    }
    let g = mean(&gaps);
    Ok(check(
        "phase_matched_gap_n64",
        (g - analytic::gap_lemma3(4)?).abs(),
        0.3,
        format!("mean gap {g:.4} over {trials} trials"),
    ))
}

/// Runs the suite with the given options.
pub fn validate_with(opts: ValidateOptions) -> ValidationReport {
    let seed = opts.seed;
    let (law_trials, quant_trials) = if opts.strict { (500, 500) } else { (60, 60) };
    let mut checks = vec![
        run("svd_unitarity", || svd_unitarity(seed)),
        run("svd_reconstruction", || svd_reconstruction(seed)),
        run("svd_oracle", || svd_oracle(seed)),
        run("erf_accuracy", erf_accuracy),
        run("waterfill_kkt", || waterfill_kkt(seed)),
        run("phase_matching_optimality", || phase_matching(seed)),
        run("gauge_invariance", || gauge_invariance(seed)),
        run("closed_form_web", closed_form_web),
        run("rate_invariants", || rate_invariants(seed)),
        run("power_model", power_model),
        run("singular_vector_law_n64", || {
            singular_vector_law(seed, 64, law_trials, 0.08)
        }),
        run("quantization_bound", || {
            quantization_bound(seed, quant_trials, opts.phase_distance)
        }),
    ];
    if opts.strict {
        checks.push(run("singular_vector_law_n256", || {
            singular_vector_law(seed, 256, 200, 0.05)
        }));
        checks.push(run("phase_matched_gap_n64", || lemma3_gap(seed, 500)));
    }
    let failures = checks.iter().filter(|c| !c.passed).count();
    ValidationReport {
        strict: opts.strict,
        seed,
        passed: failures == 0,
        failures,
        checks,
    }
}

/// Default suite; `strict` adds the full-size statistical checks.
pub fn validate(strict: bool) -> ValidationReport {
    validate_with(ValidateOptions {
        strict,
        ..ValidateOptions::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_and_power_pass() {
        assert!(closed_form_web().unwrap().passed);
        assert!(power_model().unwrap().passed);
        assert!(erf_accuracy().unwrap().passed);
    }

    #[test]
    fn failed_check_is_not_passed() {
        let c = check("x", f64::NAN, 1.0, "");
        assert!(!c.passed);
    }
}
