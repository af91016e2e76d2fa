use ctreserve_core::analytics::{histogram, mean_sd, quantiles, summarize, BinSpec};
use ctreserve_core::chain_ladder::{dev_factors, mack_msep, sigma2, ultimates_and_reserve};
use ctreserve_core::{from_ct, to_ct, DevParams, Triangle, YearDynamics};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn triangle() -> impl Strategy<Value = Triangle> {
    (4usize..=10).prop_flat_map(|n| {
        prop::collection::vec((1e3f64..1e7, prop::collection::vec(0.8f64..3.0, n - 1)), n).prop_map(
            move |rows| {
                let rows = rows
                    .into_iter()
                    .enumerate()
                    .map(|(i, (start, steps))| {
                        let mut c = start;
                        let mut row = vec![c];
                        for f in &steps[..n - i - 1] {
                            c *= f;
                            row.push(c);
                        }
                        row
                    })
                    .collect();
                Triangle::new("random", rows).unwrap()
            },
        )
    })
}

/// Column sums and variance estimates written out directly from the cells.
fn naive_estimates(t: &Triangle) -> (Vec<f64>, Vec<f64>) {
    let n = t.n();
    let mut f = Vec::new();
    let mut s2 = Vec::new();
    for j in 1..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 1..=n - j {
            num += t.cell(i, j + 1);
            den += t.cell(i, j);
        }
        let fj = num / den;
        f.push(fj);
        if j <= n - 2 {
            let mut acc = 0.0;
            for i in 1..=n - j {
                let c = t.cell(i, j);
                let d = t.cell(i, j + 1) / c - fj;
                acc += c * d * d;
            }
            s2.push(acc / (n - j - 1) as f64);
        }
    }
    (f, s2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn estimators_match_naive_sums(t in triangle()) {
        let (f, s2) = naive_estimates(&t);
        let got_f = dev_factors(&t);
        let got_s2 = sigma2(&t, &got_f);
        for (a, b) in got_f.iter().zip(&f) {
            prop_assert!(rel(*a, *b) <= 1e-12);
        }
        for (a, b) in got_s2.iter().zip(&s2) {
            prop_assert!(rel(*a, *b) <= 1e-12);
        }
    }

    #[test]
    fn scaling_the_triangle(t in triangle(), k in 1e-3f64..1e3) {
        let scaled = t.scaled(k).unwrap();
        let p = DevParams::estimate(&t).unwrap();
        let q = DevParams::estimate(&scaled).unwrap();
        for (a, b) in p.factors().iter().zip(q.factors()) {
            prop_assert!(rel(*a, *b) <= 1e-12);
        }
        for (a, b) in p.sigma2().iter().zip(q.sigma2()) {
            prop_assert!(rel(a * k, *b) <= 1e-10);
        }
        let r = ultimates_and_reserve(&t, p.factors()).total;
        let r_k = ultimates_and_reserve(&scaled, q.factors()).total;
        prop_assert!(rel(r * k, r_k) <= 1e-10);
        let m = mack_msep(&t, &p).total;
        let m_k = mack_msep(&scaled, &q).total;
        prop_assert!(rel(m * k * k, m_k) <= 1e-9);
    }

    #[test]
    fn ct_round_trip(
        raw in prop::collection::vec((-0.5f64..2.0, 1e-6f64..1e6), 2..10),
        tiny in prop::collection::vec(-1e-8f64..1e-8, 2),
    ) {
        let mut factors: Vec<f64> = raw.iter().map(|&(f, _)| f.exp()).collect();
        let mut s2: Vec<f64> = raw.iter().map(|&(_, s)| s).collect();
        factors.push(tiny[0].exp());
        factors.push((tiny[1] * 1e-6).exp());
        s2.push(3.0);
        s2.push(0.25);
        let p = DevParams::new(factors, s2).unwrap();
        let back = from_ct(&to_ct(&p)).unwrap();
        for (a, b) in p.factors().iter().zip(back.factors()) {
            prop_assert!(rel(*a, *b) <= 1e-12);
        }
        for (a, b) in p.sigma2().iter().zip(back.sigma2()) {
            prop_assert!(rel(*a, *b) <= 1e-12);
        }
    }

    #[test]
    fn laplace_branching(
        f in -0.5f64..1.5,
        s2 in 1e-2f64..1e5,
        u1 in 0.0f64..1.0,
        u2 in 0.0f64..1.0,
        dt in 0.05f64..=1.0,
        u in 0.0f64..1.0,
    ) {
        let y = YearDynamics::new(f, s2);
        let law = y.transition_law(1.0, dt).unwrap();
        let beta = law.beta;
        let z = -beta * 0.999 + u * 4.0 * beta;
        // keep |log L| below 300 for the largest starting value
        let scale = 300.0 / (law.lambda * (z / (beta + z)).abs()).max(1e-300);
        let (c1, c2) = (u1 * scale.min(1e9), u2 * scale.min(1e9));
        let l1 = y.laplace(z, c1, dt).unwrap();
        let l2 = y.laplace(z, c2, dt).unwrap();
        let l12 = y.laplace(z, c1 + c2, dt).unwrap();
        prop_assert!(rel(l1 * l2, l12) <= 1e-12, "{} {}", l1 * l2, l12);
    }

    #[test]
    fn law_moments_match_conditional_moments(
        f in -0.5f64..1.5,
        s2 in 1e-4f64..1e6,
        c in 1e-3f64..1e8,
        dt in 0.01f64..=1.0,
    ) {
        let y = YearDynamics::new(f, s2);
        let law = y.transition_law(c, dt).unwrap();
        let (m, v) = y.cond_moments(c, dt).unwrap();
        prop_assert!(rel(law.lambda / law.beta, m) <= 1e-12);
        prop_assert!(rel(2.0 * law.lambda / (law.beta * law.beta), v) <= 1e-12);
        prop_assert!(rel(law.prob_zero(), y.prob_zero(c, dt).unwrap()) <= 1e-12);
    }

    #[test]
    fn quantiles_monotone_and_equivariant(
        xs in prop::collection::vec(-1e6f64..1e6, 1..300),
        a in 1e-3f64..1e3,
        b in -1e6f64..1e6,
    ) {
        let probs: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        let q = quantiles(&xs, &probs).unwrap();
        prop_assert!(q.windows(2).all(|w| w[0] <= w[1]));
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(q[0] == lo && q[20] == hi);
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let qy = quantiles(&ys, &probs).unwrap();
        for (qx, qy) in q.iter().zip(&qy) {
            prop_assert!((a * qx + b - qy).abs() <= 1e-9 * (a * 1e6 + b.abs()));
        }
    }

    #[test]
    fn histogram_conserves_mass(xs in prop::collection::vec(-1e3f64..1e3, 1..500), k in 1usize..200) {
        let h = histogram(&xs, &BinSpec::Count(k)).unwrap();
        prop_assert_eq!(h.counts.len(), k);
        prop_assert_eq!(h.total(), xs.len() as u64);
        prop_assert!(h.edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sd_matches_welford(xs in prop::collection::vec(0.0f64..1e7, 2..500)) {
        let (mut mean, mut m2) = (0.0, 0.0);
        for (k, &x) in xs.iter().enumerate() {
            let d = x - mean;
            mean += d / (k + 1) as f64;
            m2 += d * (x - mean);
        }
        let var = m2 / (xs.len() - 1) as f64;
        let (m, sd) = mean_sd(&xs);
        prop_assert!(rel(m, mean) <= 1e-12);
        if var > 1e-6 * mean * mean {
            prop_assert!(rel(sd * sd, var) <= 1e-12);
        }
        let r_hat = mean.max(1.0);
        let s = summarize(&xs, r_hat, &[0.5]).unwrap();
        prop_assert_eq!(s.sd, sd);
        prop_assert!(s.min <= s.quantiles[0].1 && s.quantiles[0].1 <= s.max);
    }
}

#[test]
fn small_rate_branch_is_continuous() {
    let edge = 1e-8f64;
    let p = |f: f64| DevParams::new(vec![f.exp(), 1.1, 1.05], vec![2.0, 1.0, 0.5]).unwrap();
    for f0 in [edge, -edge] {
        let below = f0 * (1.0 - 1e-9);
        let above = f0 * (1.0 + 1e-9);
        let a = to_ct(&p(below)).diffusion()[0];
        let b = to_ct(&p(above)).diffusion()[0];
        assert!(rel(a, b) <= 1e-12, "{a} {b}");
    }
    for f in [0.0, 1e-14, -1e-14, 1e-9, 5e-8] {
        let q = p(f);
        let back = from_ct(&to_ct(&q)).unwrap();
        assert!(rel(back.factor(1), q.factor(1)) <= 1e-12);
        assert!(rel(back.variance(1), q.variance(1)) <= 1e-12);
    }
}
