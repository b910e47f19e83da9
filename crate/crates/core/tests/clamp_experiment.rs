//! Throwaway experiment: clamping policy vs leakage windows.
use snt_core::solver::slab::{run_slab, SlabProblem};

#[test]
#[ignore]
fn clamp_policy_windows() {
    for zero in [true, false] {
        let mut prob = SlabProblem::homogeneous(80, 40, 1.0, 0.1, 5.0, 0.10, 1000.0, (0.0, 50.0), 0.125, 100.0).unwrap();
        prob.zero_negatives = zero;
        let mut lws = vec![];
        let mut rws = vec![];
        for seed in 0..10u64 {
            let r = run_slab(&prob, 1000 + seed).unwrap();
            lws.push(r.window_total("left_leakage", 49.0, 50.0).unwrap());
            rws.push(r.window_total("right_leakage", 49.0, 50.0).unwrap());
        }
        let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        let sd = |v: &Vec<f64>| {
            let m = mean(v);
            (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        };
        println!(
            "zero_negatives={zero}: left {:.2} +- {:.2}, right {:.2} +- {:.2}",
            mean(&lws), sd(&lws), mean(&rws), sd(&rws)
        );
    }
}

#[test]
#[ignore]
fn long_run_balance_approaches_influx() {
    // Keep the influx on to t = 400: removal must converge to 1000/s.
    let prob = SlabProblem::homogeneous(80, 40, 1.0, 0.1, 5.0, 0.10, 1000.0, (0.0, 400.0), 0.125, 400.0).unwrap();
    let r = snt_core::solver::slab::run_slab_deterministic(&prob).unwrap();
    let left = r.observable("left_leakage").unwrap();
    let right = r.observable("right_leakage").unwrap();
    let capture = r.observable("capture_rate").unwrap();
    for &t in &[50.0, 100.0, 200.0, 399.875] {
        let k = r.times.iter().position(|&x| (x - t).abs() < 1e-6).unwrap();
        println!("t={t}: removal {:.2}", left[k] + right[k] + capture[k]);
    }
}

#[test]
#[ignore]
fn energy_policy_windows() {
    use snt_core::solver::energy::{run_energy, two_band_benchmark};
    use snt_core::mc::mc_energy_run;
    for zero in [true, false] {
        let mut prob = two_band_benchmark(0.02, 2.0).unwrap();
        prob.zero_negatives = zero;
        let mut lows = vec![];
        let mut highs = vec![];
        for seed in 0..100u64 {
            let r = run_energy(&prob, 3000 + seed).unwrap();
            lows.push(r.final_value("n_low").unwrap());
            highs.push(r.final_value("n_high").unwrap());
        }
        let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        let sd = |v: &Vec<f64>| {
            let m = mean(v);
            (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        };
        println!(
            "sde zero={zero}: low {:.2} +- {:.2}, high {:.2} +- {:.2}",
            mean(&lows), sd(&lows), mean(&highs), sd(&highs)
        );
    }
    let prob = two_band_benchmark(0.02, 2.0).unwrap();
    let mut lows = vec![];
    let mut highs = vec![];
    for seed in 0..100u64 {
        let r = mc_energy_run(&prob, 0.02, 9000 + seed).unwrap();
        lows.push(r.final_value("n_low").unwrap());
        highs.push(r.final_value("n_high").unwrap());
    }
    let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let sd = |v: &Vec<f64>| {
        let m = mean(v);
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    println!(
        "mc: low {:.2} +- {:.2}, high {:.2} +- {:.2}",
        mean(&lows), sd(&lows), mean(&highs), sd(&highs)
    );
}

#[test]
#[ignore]
fn mc_slab_ensemble_means() {
    let prob = SlabProblem::homogeneous(80, 40, 1.0, 0.1, 5.0, 0.10, 1000.0, (0.0, 50.0), 0.125, 100.0).unwrap();
    let mut lws = vec![];
    let mut rws = vec![];
    for seed in 0..100u64 {
        let r = snt_core::mc::mc_slab_run(&prob, 0.1, 1.0, 500 + seed).unwrap();
        lws.push(r.window_total("left_leakage", 49.0, 50.0).unwrap());
        rws.push(r.window_total("right_leakage", 49.0, 50.0).unwrap());
    }
    let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let sd = |v: &Vec<f64>| {
        let m = mean(v);
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    println!("mc slab: left {:.2} +- {:.2}, right {:.2} +- {:.2}", mean(&lws), sd(&lws), mean(&rws), sd(&rws));
}

#[test]
#[ignore]
fn deterministic_resolution_study() {
    for (i, j, dt) in [
        (80usize, 40usize, 0.125f64),
        (80, 40, 0.0625),
        (160, 40, 0.0625),
        (160, 80, 0.0625),
        (320, 80, 0.03125),
        (320, 160, 0.03125),
        (640, 160, 0.015625),
    ] {
        let prob = SlabProblem::homogeneous(i, j, 1.0, 0.1, 5.0, 0.10, 1000.0, (0.0, 50.0), dt, 100.0).unwrap();
        let r = snt_core::solver::slab::run_slab_deterministic(&prob).unwrap();
        let lw = r.window_total("left_leakage", 49.0, 50.0).unwrap();
        let rw = r.window_total("right_leakage", 49.0, 50.0).unwrap();
        println!("I={i:>4} J={j:>4} dt={dt:<8}: left {lw:.2}, right {rw:.2}");
    }
}
