// One-off calibration studies whose quantiles get frozen into tests.
use bmcd::distributions::{DurationDistribution, GeomMixParams, HdeGpdParams};
use bmcd::diagnostics::{gof_test, DMaxRule};
use bmcd::estimation::{em_fit_geommix, EmOptions};
use bmcd::seeding::rng_from_seed;

fn pct(sorted: &[f64], p: f64) -> f64 {
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

fn main() {
    // EM recovery pre-study: 200 replicates, n = 5000, true (0.4, 0.7, 0.15)
    let truth = GeomMixParams::new(0.4, 0.7, 0.15).unwrap();
    let (mut pis, mut p1s, mut p2s) = (Vec::new(), Vec::new(), Vec::new());
    for rep in 0..200u64 {
        let mut rng = rng_from_seed(50_000 + rep);
        let data: Vec<u32> = (0..5000).map(|_| truth.sample(&mut rng)).collect();
        let fit = em_fit_geommix(&data, &EmOptions::default(), 90_000 + rep).unwrap();
        pis.push(fit.params.pi);
        p1s.push(fit.params.p1);
        p2s.push(fit.params.p2);
    }
    for (name, v) in [("pi", &mut pis), ("p1", &mut p1s), ("p2", &mut p2s)] {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "EM {name}: 2.5% {:.4} 50% {:.4} 97.5% {:.4} min {:.4} max {:.4}",
            pct(v, 0.025), pct(v, 0.5), pct(v, 0.975), v[0], v[v.len() - 1]
        );
    }

    // GOF calibration: 1000 samples of size 2000, true params, d_max = 10
    let law = HdeGpdParams::new(0.25, 1.0, 8.0, 0.2).unwrap();
    let mut pvals = Vec::new();
    let mut stats = Vec::new();
    let t0 = std::time::Instant::now();
    let mut rng = rng_from_seed(314_000);
    for _ in 0..1000 {
        let sample: Vec<u32> = (0..2000).map(|_| law.sample(&mut rng)).collect();
        match gof_test(&sample, &law, DMaxRule::Fixed(10), 20) {
            Ok(r) => {
                pvals.push(r.p_value);
                stats.push(r.statistic);
            }
            Err(e) => println!("GOF error: {e}"),
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    pvals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = pvals.len() as f64;
    let mut ks = 0.0_f64;
    for (i, p) in pvals.iter().enumerate() {
        ks = ks.max((p - i as f64 / n).abs()).max((p - (i + 1) as f64 / n).abs());
    }
    let mean_stat = stats.iter().sum::<f64>() / stats.len() as f64;
    println!("GOF calibration: n={} KS={ks:.4} mean_stat={mean_stat:.3} elapsed={elapsed:.2}s", pvals.len());
}
