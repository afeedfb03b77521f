// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torus_consensus::optimal::{closed_form_optimal, dirichlet_kernel, oracle_optimal};
use torus_consensus::sim::{run, run_with, RunOptions};
use torus_consensus::spectra::{verify_eigenpair, EigenIndex};
use torus_consensus::tradeoff::{frontier, min_power_given_time, min_time_given_power, power};
use torus_consensus::{Error, Norm, TopologySpec};

const AGREEMENT_TOL: f64 = 1e-9;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn spec(dims: &[usize], r: usize) -> TopologySpec {
    TopologySpec::new(dims.to_vec(), r, Norm::PerAxis).unwrap()
}

#[derive(Default)]
struct Tally {
    total: usize,
    bad: usize,
    bad_r: std::collections::BTreeMap<usize, usize>,
    max_dh: f64,
    max_dg: f64,
    example: Option<String>,
}

impl Tally {
    fn check(&mut self, s: &TopologySpec) {
        let closed = closed_form_optimal(s).unwrap();
        let oracle = oracle_optimal(s).unwrap();
        let dh = (closed.h - oracle.h).abs();
        let dg = (closed.gamma - oracle.gamma).abs();
        self.total += 1;
        self.max_dh = self.max_dh.max(dh);
        self.max_dg = self.max_dg.max(dg);
        if dh > AGREEMENT_TOL || dg > AGREEMENT_TOL {
            self.bad += 1;
            *self.bad_r.entry(s.r()).or_default() += 1;
            self.example.get_or_insert_with(|| {
                format!(
                    "{s}: h {:.6} vs {:.6}, gamma {:.6} vs {:.6}",
                    closed.h, oracle.h, closed.gamma, oracle.gamma
                )
            });
        }
    }

    fn summary(&self, name: &str) -> String {
        let by_r: Vec<String> = self
            .bad_r
            .iter()
            .map(|(r, c)| format!("r{r}:{c}"))
            .collect();
        format!(
            "{name} {}/{} disagree (max |dh| {:.2e}, max |dgamma| {:.2e}) [{}]{}",
            self.bad,
            self.total,
            self.max_dh,
            self.max_dg,
            by_r.join(" "),
            self.example
                .as_ref()
                .map(|e| format!(" e.g. {e}"))
                .unwrap_or_default()
        )
    }
}

fn criterion_1() -> Outcome {
    let mut cycles = Tally::default();
    for r in 1..=20 {
        for n in 2 * (2 * r + 1)..=400 {
            cycles.check(&spec(&[n], r));
        }
    }
    let mut tori = Tally::default();
    for r in 1..=9 {
        let lo = 2 * (2 * r + 1);
        for parity in [0, 1] {
            let ks: Vec<usize> = (lo..=40).filter(|k| k % 2 == parity).collect();
            for &a in &ks {
                for &b in &ks {
                    tori.check(&spec(&[a, b], r));
                }
            }
        }
    }
    let even = [16, 18, 20, 22, 24, 26];
    let odd = [15, 17, 19, 21, 23, 25, 27];
    let mut mtori = Tally::default();
    for m in 3..=6 {
        for r in 1..=5 {
            mtori.check(&spec(&even[..m], r));
            mtori.check(&spec(&odd[..m], r));
            mtori.check(&spec(&odd[odd.len() - m..], r));
        }
    }
    let r1_bad = [&cycles, &tori, &mtori]
        .iter()
        .map(|t| t.bad_r.get(&1).copied().unwrap_or(0))
        .sum::<usize>();
    let bad = cycles.bad + tori.bad + mtori.bad;
    Outcome::new(
        bad == 0,
        format!(
            "closed form vs enumeration within 1e-9; r=1 subset disagreements: {r1_bad}\n    {}\n    {}\n    {}",
            cycles.summary("cycles:"),
            tori.summary("2-D tori:"),
            mtori.summary("m-D tori:")
        ),
    )
}

fn criterion_2() -> Outcome {
    let cycle = spec(&[400], 1);
    let torus = spec(&[1000, 1000], 1);
    let hc = closed_form_optimal(&cycle).unwrap().h;
    let ho = oracle_optimal(&cycle).unwrap().h;
    let tc = closed_form_optimal(&torus).unwrap().h;
    let started = Instant::now();
    let to = oracle_optimal(&torus).unwrap().h;
    let secs = started.elapsed().as_secs_f64();
    let pass = [hc, ho].iter().all(|h| (h - 0.5).abs() <= 0.001)
        && [tc, to].iter().all(|h| (h - 0.25).abs() <= 0.001);
    Outcome::new(
        pass,
        format!(
            "cycle n=400 h closed {hc:.9} oracle {ho:.9}; torus 1000x1000 h closed {tc:.9} oracle {to:.9} ({secs:.2}s enumeration)"
        ),
    )
}

fn criterion_3() -> Outcome {
    let c4 = oracle_optimal(&spec(&[4], 1)).unwrap();
    let k5 = oracle_optimal(&spec(&[5], 2)).unwrap();
    let t44 = oracle_optimal(&spec(&[4, 4], 1)).unwrap();
    let c4c = closed_form_optimal(&spec(&[4], 1)).unwrap();
    let t44c = closed_form_optimal(&spec(&[4, 4], 1)).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let pass = close(c4.h, 1.0 / 3.0)
        && close(c4.gamma, 1.0 / 3.0)
        && close(c4c.h, 1.0 / 3.0)
        && close(c4c.gamma, 1.0 / 3.0)
        && close(k5.h, 0.2)
        && k5.gamma == 0.0
        && k5.convergence_time == 0.0
        && close(t44.h, 0.2)
        && close(t44.gamma, 0.6)
        && close(t44c.h, 0.2)
        && close(t44c.gamma, 0.6);
    Outcome::new(
        pass,
        format!(
            "C4 h={:.15} g={:.15}; K5 h={:.15} g={} T={}; 4x4 h={:.15} g={:.15}",
            c4.h, c4.gamma, k5.h, k5.gamma, k5.convergence_time, t44.h, t44.gamma
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let norms = [Norm::PerAxis, Norm::L1, Norm::LInf];
    let mut worst = 0.0f64;
    let mut per_norm = [0usize; 3];
    for i in 0..200 {
        let ni = i % 3;
        let m = 1 + (i / 3) % 4;
        let r = rng.gen_range(1..=if m <= 2 { 3 } else { 1 });
        let cap = match m {
            1 => 64,
            2 => 20,
            3 => 9,
            _ => 6,
        };
        let dims: Vec<usize> = (0..m)
            .map(|_| rng.gen_range(2 * r + 1..=cap.max(2 * r + 1)))
            .collect();
        let s = TopologySpec::new(dims.clone(), r, norms[ni]).unwrap();
        let comps: Vec<usize> = dims.iter().map(|&k| rng.gen_range(0..k)).collect();
        let idx = EigenIndex::new(&s, comps).unwrap();
        worst = worst.max(verify_eigenpair(&s, &idx).unwrap());
        per_norm[ni] += 1;
    }
    Outcome::new(
        worst <= 1e-9,
        format!(
            "200 samples (peraxis {}, l1 {}, linf {}), max residual {worst:.2e}",
            per_norm[0], per_norm[1], per_norm[2]
        ),
    )
}

fn criterion_5() -> Outcome {
    let eps = 1e-6;
    let cases = [
        spec(&[100], 1),
        spec(&[20, 20], 1),
        spec(&[20, 20], 2),
        spec(&[20, 20], 3),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for s in &cases {
        let opt = oracle_optimal(s).unwrap();
        let rep = run(s, opt.h, 7, eps).unwrap();
        let worst_ratio = rep
            .error_trace
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .fold(0.0f64, f64::max);
        let fitted = rep.fitted_contraction.unwrap_or(f64::NAN);
        let rel = (fitted - opt.gamma).abs() / opt.gamma;
        let bound = 1.1 * opt.convergence_time * (1.0 / eps).ln();
        let ok = rep.avg_residual <= 1e-10
            && worst_ratio <= opt.gamma + 1e-12
            && rel <= 0.02
            && (rep.iterations as f64) <= bound;
        pass &= ok;
        lines.push(format!(
            "{s}: {} iters <= {bound:.1}, mean drift {:.1e}, max ratio - gamma {:+.2e}, fitted rel {rel:.2e}",
            rep.iterations, rep.avg_residual, worst_ratio - opt.gamma
        ));
    }
    let constant = run_with(
        &cases[0],
        oracle_optimal(&cases[0]).unwrap().h,
        0,
        &RunOptions {
            initial: Some(vec![3.5; 100]),
            ..RunOptions::default()
        },
    )
    .unwrap();
    pass &= constant.iterations == 0;
    let divergent = run(&cases[0], 0.9, 7, eps);
    pass &= matches!(divergent, Err(Error::NoConvergence(_)));
    lines.push(format!(
        "constant start: {} iters; h=0.9: {}",
        constant.iterations,
        if divergent.is_err() {
            "NoConvergence"
        } else {
            "converged"
        }
    ));
    Outcome::new(pass, lines.join("\n    "))
}

fn strictly(xs: &[f64], increasing: bool) -> bool {
    xs.windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

fn criterion_6() -> Outcome {
    let t_n: Vec<f64> = (6..=400)
        .step_by(2)
        .map(|n| oracle_optimal(&spec(&[n], 1)).unwrap().convergence_time)
        .collect();
    let t_r: Vec<f64> = (1..=20)
        .map(|r| oracle_optimal(&spec(&[400], r)).unwrap().convergence_time)
        .collect();
    let dims = [16, 18, 20, 22, 24, 26];
    let mut m_ok = true;
    let mut m_desc = Vec::new();
    for r in 1..=5 {
        let t_m: Vec<f64> = (1..=dims.len())
            .map(|m| {
                oracle_optimal(&spec(&dims[..m], r))
                    .unwrap()
                    .convergence_time
            })
            .collect();
        m_ok &= strictly(&t_m, true);
        m_desc.push(format!("r{r} {:.2}->{:.2}", t_m[0], t_m[t_m.len() - 1]));
    }
    let n_ok = strictly(&t_n, true);
    let r_ok = strictly(&t_r, false);
    Outcome::new(
        n_ok && r_ok && m_ok,
        format!(
            "T(n) increasing {n_ok} ({:.3}->{:.1}); T(r) decreasing {r_ok} ({:.1}->{:.2}); T(m) increasing {m_ok} ({})",
            t_n[0],
            t_n[t_n.len() - 1],
            t_r[0],
            t_r[19],
            m_desc.join(", ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tau = std::f64::consts::TAU;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let r = rng.gen_range(1..=50);
        let x = rng.gen_range(1e-6..tau - 1e-6);
        let direct = 1.0 + 2.0 * (1..=r).map(|j| (j as f64 * x).cos()).sum::<f64>();
        worst = worst.max((dirichlet_kernel(r, x) - direct).abs());
    }
    Outcome::new(
        worst <= 1e-12,
        format!("1000 samples, max |kernel - sum| {worst:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let cycle = spec(&[400], 1);
    let mut notes = Vec::new();
    let unit = power(10, 100, 2.0).unwrap() == 1.0;
    notes.push(format!("power(10,100,2)==1 {unit}"));
    let boundary = min_time_given_power(&cycle, 20, 0.0025, 2.0)
        .map(|r| r.r_star)
        .ok()
        == Some(1);
    let slack = min_time_given_power(&cycle, 20, 1e9, 2.0)
        .map(|r| r.r_star)
        .ok()
        == Some(20);
    let no_power = matches!(
        min_time_given_power(&cycle, 20, 0.0, 2.0),
        Err(Error::Infeasible(_))
    );
    let f = frontier(&cycle, 20, 2.0).unwrap();
    let loose = min_power_given_time(&cycle, 20, f[0].convergence_time, 2.0)
        .map(|r| r.r_star)
        .ok()
        == Some(1);
    let at5 = min_power_given_time(&cycle, 20, f[4].convergence_time, 2.0)
        .map(|r| r.r_star)
        .ok()
        == Some(5);
    let tight = matches!(
        min_power_given_time(&cycle, 20, f[19].convergence_time * (1.0 - 1e-9), 2.0),
        Err(Error::Infeasible(_))
    );
    let consistent = [0.0025, 0.01, 0.2, 1.0].iter().all(|&p| {
        let a = min_time_given_power(&cycle, 20, p, 2.0).unwrap();
        min_power_given_time(&cycle, 20, a.time_at_r, 2.0)
            .unwrap()
            .r_star
            <= a.r_star
    });
    notes.push(format!(
        "P-budget boundary {boundary} slack {slack} infeasible {no_power}; T-budget T(1) {loose} T(5) {at5} infeasible {tight}; consistent {consistent}"
    ));
    Outcome::new(
        unit && boundary && slack && no_power && loose && at5 && tight && consistent,
        notes.join("; "),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 closed-form/oracle agreement grid", criterion_1),
        ("2 limit values", criterion_2),
        ("3 exact small cases", criterion_3),
        ("4 eigenpair oracle", criterion_4),
        ("5 simulation validation", criterion_5),
        ("6 monotonic trends", criterion_6),
        ("7 Dirichlet identity", criterion_7),
        ("8 trade-off consistency", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let started = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {verdict} ({:.1}s) {}",
            started.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
