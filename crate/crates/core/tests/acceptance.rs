//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use bitdensity::baseline::unquantized_threshold;
use bitdensity::detector::{
    detection_probability, detection_probability_bsc, linear_grid, optimal_c, BscChannel,
    DetectorParams,
};
use bitdensity::numerics::q_function;
use bitdensity::scenarios::{
    db_to_linear, run_monte_carlo, run_monte_carlo_multi, DetectorSelection, GaussianScenario,
    MimoScenario, Scenario, WsnScenario,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

const PF_GRID: [f64; 3] = [0.01, 0.05, 0.1];

fn threshold_parameters() -> Outcome {
    let rows = [(320, 44, 0.026), (1280, 159, 0.5989), (2560, 307, 0.7024)];
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (n, gamma, zeta) in rows {
        let p = DetectorParams::new(n, 0.05, 1.6).unwrap();
        let z = p.zeta().value();
        ok &= p.gamma() == gamma && (z - zeta).abs() <= 5e-4;
        detail.push(format!("n={n}: gamma={} zeta={z:.4}", p.gamma()));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    Outcome::new(ok, format!("{} in {elapsed:.2?}", detail.join(", ")))
}

fn unquantized_thresholds() -> Outcome {
    let rows = [(320, 1088.2), (1280, 4093.0), (2560, 8036.5)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (dof, expect) in rows {
        let thr = unquantized_threshold(0.05, dof, 6.0).unwrap();
        ok &= ((thr - expect) / expect).abs() <= 1e-3;
        detail.push(format!("dof={dof}: {thr:.1}"));
    }
    Outcome::new(ok, detail.join(", "))
}

fn false_alarm_calibration() -> Outcome {
    const TRIALS: u64 = 1_000_000;
    let families: [(&str, Scenario); 3] = [
        (
            "gaussian",
            GaussianScenario::new(1.0, 1.0, 200).unwrap().into(),
        ),
        (
            "mimo",
            MimoScenario::symmetric(32, 1, 5, 5, 1.0, 1.0, 1, true)
                .unwrap()
                .into(),
        ),
        (
            "wsn",
            WsnScenario::new(20, db_to_linear(-4.0), 1, true)
                .unwrap()
                .into(),
        ),
    ];
    let sels: Vec<_> = PF_GRID
        .iter()
        .map(|&p| DetectorSelection::new(p, 1.6))
        .collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for (seed, (name, scenario)) in families.iter().enumerate() {
        let reports = run_monte_carlo_multi(scenario, &sels, TRIALS, 100 + seed as u64).unwrap();
        for r in reports {
            ok &= r.empirical_pf.agrees_with(r.p_f, TRIALS);
            detail.push(format!("{name}@{}={:.5}", r.p_f, r.empirical_pf.value));
        }
    }
    Outcome::new(ok, detail.join(" "))
}

fn gaussian_theory_vs_simulation() -> Outcome {
    const TRIALS: u64 = 1_000_000;
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, dv) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let s: Scenario = GaussianScenario::new(1.0, dv, 200).unwrap().into();
        let r = run_monte_carlo(
            &s,
            &DetectorSelection::new(0.05, 1.6),
            TRIALS,
            200 + i as u64,
        )
        .unwrap();
        let theory = detection_probability(200, 0.05, 1.6, r.alpha)
            .unwrap()
            .value();
        ok &= r.theory_exact && (r.theory_pd - theory).abs() < 1e-12;
        ok &= r.empirical_pd.agrees_with(theory, TRIALS);
        detail.push(format!(
            "dvar={dv}: sim={:.6} theory={theory:.6}",
            r.empirical_pd.value
        ));
    }
    Outcome::new(ok, detail.join(", "))
}

fn limits() -> Outcome {
    let strong = detection_probability(200, 0.05, 1.6, 1e-12)
        .unwrap()
        .value();
    let narrow = detection_probability(200, 0.05, 1e-4, 0.7).unwrap().value();
    let ok = strong >= 1.0 - 1e-6 && (narrow - 0.05).abs() <= 1e-3;
    Outcome::new(
        ok,
        format!("P_D(alpha=1e-12)={strong:.9}, P_D(c=1e-4)={narrow:.6}"),
    )
}

fn optimal_window() -> Outcome {
    let grid = linear_grid(0.1, 4.0, 0.01).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for p_f in [0.05, 0.01] {
        for alpha in [0.8, 0.85, 0.9] {
            let c = optimal_c(200, p_f, alpha, &grid).unwrap();
            ok &= (1.4..=1.8).contains(&c);
            detail.push(format!("({p_f},{alpha})->{c:.2}"));
        }
    }
    Outcome::new(ok, detail.join(" "))
}

fn wsn_endpoints() -> Outcome {
    const TRIALS: u64 = 100_000;
    let snr = db_to_linear(-4.0);
    let sel = DetectorSelection::new(0.05, 1.6);
    let mut ok = true;
    let mut detail = Vec::new();
    for (tau, target, exact) in [(1, 0.35, true), (4, 0.80, false)] {
        let s: Scenario = WsnScenario::new(20, snr, tau, true).unwrap().into();
        let r = run_monte_carlo(&s, &sel, TRIALS, 300 + tau as u64).unwrap();
        ok &= (r.empirical_pd.value - target).abs() <= 0.05 && r.theory_exact == exact;
        if exact {
            ok &= r.empirical_pd.agrees_with(r.theory_pd, TRIALS);
        }
        detail.push(format!(
            "tau={tau}: sim={:.4} theory={:.4}{}",
            r.empirical_pd.value,
            r.theory_pd,
            if exact { "" } else { " (approximate)" }
        ));
    }
    Outcome::new(ok, detail.join(", "))
}

fn mimo_gap() -> Outcome {
    const TRIALS: u64 = 20_000;
    let dbs = [-12.0, -10.0, -8.0, -6.0, -4.0, -2.0, 0.0, 2.0, 4.0];
    let sel = DetectorSelection::new(0.05, 1.6).with_baseline();
    let mut ok = true;
    let mut informational = true;
    let mut detail = Vec::new();
    let mut gap_at_zero = Vec::new();
    for m in [32, 128, 256] {
        let mut gaps = Vec::new();
        for (i, db) in dbs.iter().enumerate() {
            let s: Scenario = MimoScenario::symmetric(m, 1, 5, 5, 1.0, db_to_linear(*db), 1, true)
                .unwrap()
                .into();
            let r = run_monte_carlo(&s, &sel, TRIALS, 400 + (m * 16 + i) as u64).unwrap();
            let b = r.baseline.unwrap();
            let gap = b.empirical_pd.value - r.empirical_pd.value;
            // Standard deviation of the paired difference, bounded by the
            // unpaired one.
            let sd = (b.empirical_pd.ci + r.empirical_pd.ci) / 3.0;
            ok &= gap >= -3.0 * sd - 1e-3;
            gaps.push((gap, sd));
        }
        let peak = gaps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .map(|(i, _)| i)
            .unwrap();
        for w in gaps[peak..].windows(2) {
            ok &= w[1].0 <= w[0].0 + 3.0 * (w[0].1 + w[1].1);
        }
        let peak_gap = gaps[peak].0;
        informational &= (0.05..=0.15).contains(&peak_gap);
        let zero = dbs.iter().position(|&d| d == 0.0).unwrap();
        gap_at_zero.push(gaps[zero]);
        detail.push(format!(
            "M={m}: peak gap {:.1} pp at {} dB, {:.1} pp at 0 dB",
            100.0 * peak_gap,
            dbs[peak],
            100.0 * gaps[zero].0
        ));
    }
    for w in gap_at_zero.windows(2) {
        ok &= w[1].0 <= w[0].0 + 3.0 * (w[0].1 + w[1].1);
    }
    detail.push(format!(
        "peak within 10 +- 5 pp: {}",
        if informational {
            "yes"
        } else {
            "no (informational)"
        }
    ));
    Outcome::new(ok, detail.join("; "))
}

/// P(reject) by summing over every length-n bit sequence.
fn enumerate(params: &DetectorParams, theta: f64) -> f64 {
    let n = params.n();
    let (gamma, zeta) = (params.gamma(), params.zeta().value());
    (0u32..1 << n)
        .map(|seq| {
            let k = seq.count_ones() as usize;
            let weight = theta.powi(k as i32) * (1.0 - theta).powi((n - k) as i32);
            let reject = if k > gamma {
                1.0
            } else if k == gamma {
                zeta
            } else {
                0.0
            };
            weight * reject
        })
        .sum()
}

fn small_n_enumeration() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=12 {
        for p_f in [0.01, 0.05, 0.1, 0.5, 0.9] {
            for c in [0.5, 1.0, 1.6, 2.5] {
                let p = DetectorParams::new(n, p_f, c).unwrap();
                let theta0 = 2.0 * q_function(c).unwrap();
                worst =
                    worst.max((enumerate(&p, theta0) - p.false_alarm_probability().value()).abs());
                worst = worst.max((enumerate(&p, theta0) - p_f).abs());
                for alpha in [0.3, 0.7, 0.95] {
                    let theta1 = 2.0 * q_function(alpha * c).unwrap();
                    let pd = detection_probability(n, p_f, c, alpha).unwrap().value();
                    worst = worst.max((enumerate(&p, theta1) - pd).abs());
                }
            }
        }
    }
    Outcome::new(worst <= 1e-12, format!("max deviation {worst:.2e}"))
}

fn bsc() -> Outcome {
    const TRIALS: u64 = 1_000_000;
    let (n, p_f, c) = (200, 0.05, 1.6);
    let mut ok = true;
    let mut worst_clean = 0.0f64;
    let mut worst_useless = 0.0f64;
    for alpha in [0.3, 0.7, 0.9, 0.99] {
        let clean = detection_probability_bsc(n, p_f, c, alpha, BscChannel::new(0.0).unwrap())
            .unwrap()
            .value();
        let direct = detection_probability(n, p_f, c, alpha).unwrap().value();
        worst_clean = worst_clean.max((clean - direct).abs());
        let useless = detection_probability_bsc(n, p_f, c, alpha, BscChannel::new(0.5).unwrap())
            .unwrap()
            .value();
        worst_useless = worst_useless.max((useless - p_f).abs());
    }
    ok &= worst_clean <= 1e-12 && worst_useless <= 1e-12;

    let ch = BscChannel::new(0.1).unwrap();
    let s: Scenario = GaussianScenario::new(1.0, 0.5, n).unwrap().into();
    let r = run_monte_carlo(
        &s,
        &DetectorSelection::new(p_f, c).with_bsc(ch),
        TRIALS,
        500,
    )
    .unwrap();
    let theory = detection_probability_bsc(n, p_f, c, r.alpha, ch)
        .unwrap()
        .value();
    ok &= r.empirical_pd.agrees_with(theory, TRIALS) && r.empirical_pf.agrees_with(p_f, TRIALS);
    Outcome::new(
        ok,
        format!(
            "eps=0 dev {worst_clean:.1e}, eps=0.5 dev {worst_useless:.1e}, eps=0.1 sim={:.5} theory={theory:.5} pf={:.5}",
            r.empirical_pd.value, r.empirical_pf.value
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("thresholds and randomization weights", threshold_parameters),
        ("unquantized energy thresholds", unquantized_thresholds),
        ("false-alarm calibration", false_alarm_calibration),
        (
            "closed-form P_D vs simulation",
            gaussian_theory_vs_simulation,
        ),
        ("limits in alpha and c", limits),
        ("optimal window width", optimal_window),
        ("sensor network endpoints", wsn_endpoints),
        ("massive MIMO gap to energy detector", mimo_gap),
        ("small-n enumeration", small_n_enumeration),
        ("binary symmetric channel", bsc),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        failures += usize::from(!out.pass);
        println!(
            "criterion {:>2} {}: {name}: {} [{:.1?}]",
            i + 1,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
