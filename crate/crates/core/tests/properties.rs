use std::f64::consts::PI;

use proptest::prelude::*;

use beamsim::analytic;
use beamsim::beamform::{
    hybrid_double_rf, hybrid_lemma2, hybrid_mixed, hybrid_mixed_from_svd, quantize_phase,
    quantize_rf, PhaseResolution,
};
use beamsim::channel::{ChannelModel, ChannelRealization};
use beamsim::harness::{
    parse_config_str, serialize_config, ExperimentConfig, Measure, RhoDb, Scheme,
};
use beamsim::numerics::{thin_svd, ComplexMatrix};
use beamsim::rate::{achievable_rate, capacity_p2p, waterfill};
use beamsim::Complex64;

fn matrix(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (2..=max, 2..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), r * c).prop_map(move |v| {
            ComplexMatrix::from_vec(
                r,
                c,
                v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
            )
            .unwrap()
        })
    })
}

fn channel(n: usize) -> impl Strategy<Value = ChannelRealization> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n).prop_map(move |v| {
        let h = ComplexMatrix::from_vec(
            n,
            n,
            v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
        )
        .unwrap();
        ChannelRealization::from_matrix(h).unwrap()
    })
}

fn orthonormality(q: &ComplexMatrix) -> f64 {
    let g = q.adjoint_matmul(q);
    g.sub(&ComplexMatrix::identity(g.rows())).frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_invariants(a in matrix(16), frac in 0.0..1.0f64) {
        let min = a.rows().min(a.cols());
        let m = 1 + ((min - 1) as f64 * frac) as usize;
        let s = thin_svd(&a, m).unwrap();
        prop_assert!(orthonormality(&s.u) <= 1e-10);
        prop_assert!(orthonormality(&s.v) <= 1e-10);
        prop_assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.sigma.iter().all(|&x| x >= 0.0));
        let full = thin_svd(&a, min).unwrap();
        let resid = a.sub(&full.reconstruct()).frobenius_norm();
        prop_assert!(resid <= 1e-8 * a.frobenius_norm());
        if m < min {
            let trunc = a.sub(&s.reconstruct()).frobenius_norm();
            prop_assert!(trunc <= full.sigma[m] * (1.0 + 1e-8) * (min as f64).sqrt());
        }
    }

    #[test]
    fn waterfill_kkt(gains in prop::collection::vec(0.0..50.0f64, 1..10), rho in 0.01..1e4f64, budget in 0.1..10.0f64) {
        prop_assume!(gains.iter().any(|&g| g > 0.0));
        let p = waterfill(&gains, rho, budget).unwrap();
        prop_assert!((p.iter().sum::<f64>() - budget).abs() <= 1e-12 * budget.max(1.0));
        let levels: Vec<f64> = (0..p.len()).filter(|&i| p[i] > 0.0).map(|i| p[i] + 1.0 / (rho * gains[i])).collect();
        let mu = levels[0];
        for l in &levels {
            prop_assert!((l - mu).abs() <= 1e-9 * mu.max(1.0));
        }
        for i in 0..p.len() {
            prop_assert!(p[i] >= 0.0);
            if p[i] == 0.0 && gains[i] > 0.0 {
                prop_assert!(1.0 / (rho * gains[i]) >= mu - 1e-9 * mu.max(1.0));
            }
        }
    }

    #[test]
    fn quantized_phase_on_grid_and_close(theta in -10.0..10.0f64, bits in 1u32..=8) {
        let q = quantize_phase(theta, bits);
        let step = 2.0 * PI / (1u64 << bits) as f64;
        let idx = q / step;
        prop_assert!((idx - idx.round()).abs() < 1e-9 && (0.0..2.0 * PI).contains(&q));
        let d = (theta - q).rem_euclid(2.0 * PI);
        let circ = d.min(2.0 * PI - d);
        prop_assert!(circ <= step / 2.0 + 1e-12);
    }

    #[test]
    fn capacity_bounds_every_design(chan in channel(6), k in 1usize..=3, db in -5.0..35.0f64) {
        let rho = 10f64.powf(db / 10.0);
        let c = capacity_p2p(&chan, k, rho).unwrap().rate_bits;
        prop_assert!(c >= 0.0);
        let l2 = hybrid_lemma2(&chan, k, rho).unwrap();
        let designs = [
            l2.clone(),
            hybrid_mixed(&chan, k, k + 1, rho).unwrap(),
            quantize_rf(&chan, &l2, PhaseResolution::digital(2).unwrap(), rho).unwrap(),
        ];
        for bf in &designs {
            bf.check_invariants().unwrap();
            let r = achievable_rate(&chan, bf, rho).unwrap();
            prop_assert!(r.rate_bits >= 0.0);
            prop_assert!(r.rate_bits <= c + 1e-9);
        }
        let exact = achievable_rate(&chan, &hybrid_double_rf(&chan, k, rho).unwrap(), rho).unwrap();
        prop_assert!((exact.rate_bits - c).abs() <= 1e-9);
    }

    #[test]
    fn rates_ignore_singular_vector_phases(chan in channel(5), phases in prop::collection::vec(-PI..PI, 3)) {
        let k = 3;
        let rho = 100.0;
        let svd = chan.svd(k).unwrap();
        let mut rot = svd.clone();
        for (col, ph) in phases.iter().enumerate() {
            let w = Complex64::from_polar(1.0, *ph);
            let v: Vec<Complex64> = svd.v.column(col).iter().map(|z| z * w).collect();
            let u: Vec<Complex64> = svd.u.column(col).iter().map(|z| z * w).collect();
            rot.v.set_column(col, &v);
            rot.u.set_column(col, &u);
        }
        for m in [k, 2 * k] {
            let a = achievable_rate(&chan, &hybrid_mixed_from_svd(&chan, &svd, k, m, rho).unwrap(), rho).unwrap();
            let b = achievable_rate(&chan, &hybrid_mixed_from_svd(&chan, &rot, k, m, rho).unwrap(), rho).unwrap();
            prop_assert!((a.rate_bits - b.rate_bits).abs() <= 1e-9);
        }
    }

    #[test]
    fn rate_nondecreasing_in_snr(chan in channel(6)) {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=8 {
            let rho = 10f64.powf(0.5 * i as f64);
            let r = achievable_rate(&chan, &hybrid_lemma2(&chan, 2, rho).unwrap(), rho).unwrap().rate_bits;
            prop_assert!(r >= prev - 1e-9);
            prev = r;
        }
    }

    #[test]
    fn closed_form_web(k in 1usize..40, beta in 0.0..99.0f64) {
        let l3 = analytic::gap_lemma3(k).unwrap();
        prop_assert!((analytic::gap_general(k, k).unwrap() - l3).abs() <= 1e-12);
        prop_assert!(analytic::gap_general(k, 2 * k).unwrap().abs() <= 1e-12);
        prop_assert!((analytic::gap_selection(k, 0.0).unwrap() - l3).abs() <= 1e-12);
        prop_assert!((2.0 * analytic::gap_multiuser(k).unwrap() - l3).abs() <= 1e-12);
        prop_assert!(analytic::gap_selection(k, beta).unwrap().is_finite());
    }

    #[test]
    fn config_round_trip(
        scheme_idx in 0usize..8,
        bits in 1u32..=16,
        beta in 0.0..99.0f64,
        n in 8usize..64,
        seed in any::<u64>(),
        trials in 1usize..1000,
        rho in prop::collection::vec(-20.0..50.0f64, 1..4),
    ) {
        let k = 2;
        let (scheme, m, n_r) = match scheme_idx {
            0 => (Scheme::Digital, k, n),
            1 => (Scheme::Lemma2, k, n),
            2 => (Scheme::DoubleRf, 2 * k, n),
            3 => (Scheme::Mixed, k + 1, n),
            4 => (Scheme::Quantized(bits), k, n),
            5 => (Scheme::Selection(beta), k, n),
            6 => (Scheme::MuZfHybrid, k, k),
            _ => (Scheme::MuZfDigital, k, k),
        };
        let cfg = ExperimentConfig {
            name: format!("p{scheme_idx}"),
            scheme,
            k,
            m,
            rho_db: if rho.len() == 1 { RhoDb::One(rho[0]) } else { RhoDb::Many(rho) },
            trials,
            master_seed: seed,
            measure: Measure::Rate,
            workers: 0,
            channel: ChannelModel::rayleigh(n, n_r),
            sweep: None,
        };
        let text = serialize_config(&cfg).unwrap();
        prop_assert_eq!(parse_config_str(&text).unwrap(), cfg);
    }
}
