use ctreserve_core::analytics::mean_sd;
use ctreserve_core::{
    Bootstrap, BootstrapConfig, Dataset, DevParams, Method, NegativePolicy, TsParamMode,
};

fn parameter_draws(b: &Bootstrap, m: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = b.point_estimates().n();
    let mut factors = vec![Vec::with_capacity(m as usize); n - 1];
    let mut sigma2 = vec![Vec::with_capacity(m as usize); n - 1];
    for index in 0..m {
        let p = b.replicate_parameters(index);
        for j in 0..n - 1 {
            factors[j].push(p.factors[j]);
            sigma2[j].push(p.sigma2[j]);
        }
    }
    (factors, sigma2)
}

#[test]
fn ct_factor_draws_are_unbiased() {
    let m = 40_000;
    for d in Dataset::ALL {
        let t = d.triangle();
        let b = Bootstrap::new(&t, BootstrapConfig::new(Method::ContinuousTime, m, 17)).unwrap();
        let (factors, _) = parameter_draws(&b, m);
        let p = DevParams::estimate(&t).unwrap();
        for (j, f) in factors.iter().enumerate() {
            let (mean, sd) = mean_sd(f);
            let se = sd / (m as f64).sqrt();
            assert!(
                (mean - p.factors()[j]).abs() <= 4.0 * se,
                "{d} j = {}: {mean} vs {}",
                j + 1,
                p.factors()[j]
            );
        }
    }
}

/// Direct draws and Gaussian re-simulation give the same parameter law.
#[test]
fn ts_parameter_modes_agree() {
    let m = 40_000;
    let t = Dataset::TaylorAshe.triangle();
    let run = |mode, seed| {
        let cfg = BootstrapConfig {
            ts_param_mode: mode,
            ..BootstrapConfig::new(Method::TimeSeries, m, seed)
        };
        parameter_draws(&Bootstrap::new(&t, cfg).unwrap(), m)
    };
    let (fd, sd) = run(TsParamMode::Direct, 1);
    let (fr, sr) = run(TsParamMode::Resample, 2);
    let close = |a: &[f64], b: &[f64], what: &str| {
        let (ma, sa) = mean_sd(a);
        let (mb, sb) = mean_sd(b);
        let se = ((sa * sa + sb * sb) / m as f64).sqrt();
        assert!((ma - mb).abs() <= 4.5 * se, "{what} mean {ma} vs {mb}");
        let sq = |x: &[f64], mean: f64| x.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>();
        let (va, sva) = mean_sd(&sq(a, ma));
        let (vb, svb) = mean_sd(&sq(b, mb));
        let se_v = ((sva * sva + svb * svb) / m as f64).sqrt();
        assert!((va - vb).abs() <= 4.5 * se_v, "{what} variance {va} vs {vb}");
    };
    for j in 0..fd.len() {
        close(&fd[j], &fr[j], &format!("F_{}", j + 1));
        close(&sd[j], &sr[j], &format!("Sigma2_{}", j + 1));
    }

    let sd_pct = |mode, seed| {
        let cfg = BootstrapConfig {
            ts_param_mode: mode,
            ..BootstrapConfig::new(Method::TimeSeries, 100_000, seed)
        };
        let b = Bootstrap::new(&t, cfg).unwrap();
        let r = b.run();
        100.0 * mean_sd(&r.samples).1 / b.reserve()
    };
    let a = sd_pct(TsParamMode::Direct, 3);
    let b = sd_pct(TsParamMode::Resample, 4);
    assert!((a - b).abs() < 0.5, "{a} vs {b}");
}

#[test]
fn drop_policy_removes_whole_replicates() {
    let t = Dataset::Mortgage.triangle();
    let m = 20_000;
    let clamp = Bootstrap::new(&t, BootstrapConfig::new(Method::MackResidual, m, 5)).unwrap().run();
    let cfg = BootstrapConfig {
        neg_policy: NegativePolicy::DropReplicate,
        ..BootstrapConfig::new(Method::MackResidual, m, 5)
    };
    let drop = Bootstrap::new(&t, cfg).unwrap().run();
    assert_eq!(drop.dropped, clamp.negative_replicates);
    assert_eq!(drop.samples.len() as u64 + drop.dropped, m);
    assert_eq!(drop.zero_clamped, 0);
    assert!(clamp.zero_clamped >= clamp.negative_replicates);
    assert!(drop.samples.iter().all(|r| r.is_finite()));
}

#[test]
fn ct_never_projects_negative_cells() {
    let t = Dataset::Mortgage.triangle();
    let r = Bootstrap::new(&t, BootstrapConfig::new(Method::ContinuousTime, 20_000, 8)).unwrap().run();
    assert_eq!(r.negative_replicates, 0);
    assert_eq!(r.zero_clamped, 0);
    assert_eq!(r.dropped, 0);
    let latest: f64 = t.latest_diagonal().iter().skip(1).map(|&(_, c)| c).sum();
    assert!(r.samples.iter().all(|&x| x >= -latest));
}
