//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! A criterion whose statement does not hold mathematically is printed as
//! FAIL together with the measured facts; those facts are asserted, so the
//! run only exits non-zero on an unexpected outcome.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use dehnlab::area::{area_exact_z2, area_oracle, OracleConfig};
use dehnlab::binomial::central_binomial;
use dehnlab::cogrowth::{
    bartholdi_transform, diffusive_constant, f_recurrence, g_series_z2, sharp_constant,
    sharp_ratio, sharp_ratio_report,
};
use dehnlab::combing::GeodesicCombing;
use dehnlab::counting::{
    closed_walk_closed_form_z2, closed_walk_series, sample_words, sampled_tail_zr, tail_report_1d,
    walk_counts_upto, CountOptions,
};
use dehnlab::dehnstats::{
    bound_fit, closed_word_stats, dehn_from_stats, h_inequality_scan, lazy_mean_from_stats,
    mean_from_stats, nv_asymptotics_report, osmean_sampled, relation_from_stats, smean_from_stats,
    smean_sampled, BoundFit, DehnReport, EnumOptions, SampleOptions,
};
use dehnlab::presentation::AbelianPresentation;
use dehnlab::words::{enumerate_words, free_reduce, length_a, Word};
use dehnlab::Execution;

const SEED: u64 = 20_240_601;
const TREND_NS: [u64; 5] = [64, 128, 256, 512, 1024];
const TREND_SAMPLES: u64 = 10_000;
const TAIL_SAMPLES: u64 = 1_000_000;

enum Verdict {
    Pass(String),
    /// The statement fails; the detail records what holds instead.
    Fail(String),
}

struct Suite {
    unexpected: Vec<u32>,
    known: Vec<u32>,
    passed: u32,
}

impl Suite {
    fn run(
        &mut self,
        id: u32,
        title: &str,
        limit: Duration,
        known_fail: bool,
        f: impl FnOnce() -> Verdict,
    ) {
        let start = Instant::now();
        let verdict = f();
        let took = start.elapsed();
        let timing = format!("{:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs());
        let (ok, detail) = match verdict {
            Verdict::Pass(d) if took <= limit => (true, d),
            Verdict::Pass(d) => (false, format!("{d}; over time")),
            Verdict::Fail(d) => (false, d),
        };
        println!(
            "criterion {id:>2}: {} {title} [{detail}] ({timing})",
            if ok { "PASS" } else { "FAIL" }
        );
        if ok {
            self.passed += 1;
        } else if known_fail {
            self.known.push(id);
        } else {
            self.unexpected.push(id);
        }
    }
}

fn z2() -> AbelianPresentation {
    AbelianPresentation::builtin("z2").unwrap()
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn cogrowth_triple() -> Verdict {
    let n = 12usize;
    let rec = f_recurrence(n);
    let bart = bartholdi_transform(&g_series_z2(2 * n), 2, 2 * n).unwrap();
    let dp = closed_walk_series(&z2(), 2 * n as u64, true, &CountOptions::default()).unwrap();
    for (k, d) in dp.iter().enumerate() {
        let d = BigInt::from(d.clone());
        if rec.coeff(k) != d || bart.coeff(k) != d {
            return Verdict::Fail(format!("disagreement at length {k}"));
        }
    }
    if rec.coeff(2) != BigInt::from(0) || rec.coeff(4) != BigInt::from(8) {
        return Verdict::Fail("f2 or f4 wrong".into());
    }
    Verdict::Pass(format!(
        "exact, lengths 0..={}; f2=0, f4=8, f24={}",
        2 * n,
        rec.coeff(24)
    ))
}

fn closed_walks() -> Verdict {
    let p = z2();
    let opts = CountOptions::default();
    let g = closed_walk_series(&p, 24, false, &opts).unwrap();
    for n in 0..=12u64 {
        let c = central_binomial(n);
        if g[2 * n as usize] != &c * &c || g[2 * n as usize] != closed_walk_closed_form_z2(2 * n) {
            return Verdict::Fail(format!("N_e({}) mismatch", 2 * n));
        }
    }
    let tables = walk_counts_upto(&p, 14, &opts).unwrap();
    for t in &tables {
        if t.total() != BigUint::from(4u32).pow(t.length as u32) {
            return Verdict::Fail(format!("mass at n={}", t.length));
        }
    }
    Verdict::Pass(format!(
        "exact; g2={}, g4={}, g24={}; mass 4^n for n<=14",
        g[2], g[4], g[24]
    ))
}

fn area_engines() -> Verdict {
    let p = z2();
    let cfg = OracleConfig::default();
    let check = |w: &Word| -> bool {
        let oracle = area_oracle(&p, w, &cfg).unwrap();
        oracle.value() == Some(area_exact_z2(w).unwrap())
    };
    let mut exhaustive = 0u64;
    for m in 0..=8 {
        for w in enumerate_words(2, m, 1 << 20).unwrap() {
            if p.is_identity(&w).unwrap() {
                exhaustive += 1;
                if !check(&w) {
                    return Verdict::Fail(format!("disagreement on {w}"));
                }
            }
        }
    }
    let mut random = 0u64;
    for (len, seed) in [(10usize, SEED), (12, SEED + 1)] {
        let closed = sample_words(2, len, u64::MAX, seed)
            .filter(|w| p.is_identity(w).unwrap())
            .take(500);
        for w in closed {
            random += 1;
            if !check(&w) {
                return Verdict::Fail(format!("disagreement on {w}"));
            }
        }
    }
    Verdict::Pass(format!(
        "0 disagreements; {exhaustive} closed words of length <=8, {random} random of length 10 and 12"
    ))
}

fn mean_anchors() -> Verdict {
    let stats = closed_word_stats(&z2(), 12, &EnumOptions::default()).unwrap();
    let d = dehn_from_stats(&stats);
    let checks = [
        ("D(2)", d[2].value.exact().cloned(), q(0, 1)),
        ("D(4)", d[4].value.exact().cloned(), q(1, 1)),
        (
            "smean(2)",
            smean_from_stats(&stats[2]).value.exact().cloned(),
            q(0, 1),
        ),
        (
            "smean(4)",
            smean_from_stats(&stats[4]).value.exact().cloned(),
            q(2, 9),
        ),
        (
            "mean(4)",
            mean_from_stats(&stats[..=4]).value.exact().cloned(),
            q(8, 41),
        ),
        (
            "lazy(4)",
            lazy_mean_from_stats(&stats[..=4]).value.exact().cloned(),
            q(8, 61),
        ),
    ];
    for (name, got, want) in checks {
        if got.as_ref() != Some(&want) {
            return Verdict::Fail(format!("{name} = {got:?}, expected {want}"));
        }
    }
    let rows = relation_from_stats(&stats);
    if let Some(r) = rows.iter().find(|r| r.holds != Some(true)) {
        return Verdict::Fail(format!("mean <= max smean fails at n={}", r.n));
    }
    Verdict::Pass(format!(
        "exact rationals; mean <= max smean for all n<=12; D(12)={}, smean(12)={}",
        d[12].value,
        smean_from_stats(&stats[12]).value
    ))
}

fn stirling() -> Verdict {
    let rows = nv_asymptotics_report(1000);
    // the closed form used here is pinned against the DP in criterion 2
    let (mut worst, mut worst_at) = (0.0f64, 0);
    for r in rows.iter().filter(|r| r.two_n >= 200 && r.two_n % 200 == 0) {
        let dev = (r.stirling_ratio - 1.0).abs();
        if dev > worst {
            (worst, worst_at) = (dev, r.two_n);
        }
        if dev >= 0.01 {
            return Verdict::Fail(format!("2n={}: ratio {}", r.two_n, r.stirling_ratio));
        }
    }
    Verdict::Pass(format!(
        "tolerance 0.01; worst deviation {worst:.5} at 2n={worst_at}"
    ))
}

fn sharp() -> Verdict {
    let rows = sharp_ratio_report(500);
    let at = |two_n: usize| rows.iter().find(|r| r.two_n == two_n).unwrap().ratio;
    let (r100, r1000) = (at(100), at(1000));
    let stated = sharp_constant();
    let observed = diffusive_constant();
    // measured behaviour, asserted
    let dp = closed_walk_series(&z2(), 100, true, &CountOptions::default()).unwrap();
    assert_eq!(
        BigInt::from(dp[100].clone()),
        rows[49].f,
        "recurrence against DP at 2n=100"
    );
    assert!((sharp_ratio(&rows[49].f, 100) - r100).abs() < 1e-15);
    assert!(
        (r1000 / observed - 1.0).abs() < 0.002,
        "ratio {r1000} vs 4/(3 pi)"
    );
    assert!((r1000 - observed).abs() < (r100 - observed).abs());
    let off = (r1000 / stated - 1.0) * 100.0;
    let detail = format!(
        "tolerance 5%: ratio(1000)={r1000:.6} is {off:.0}% above {stated:.6}; \
         it converges to 4/(3 pi)={observed:.6} (within 0.2% at 1000, closer than at 100: {r100:.6}); \
         the stated constant is smaller by the factor sqrt(3)+1"
    );
    if (r1000 / stated - 1.0).abs() < 0.05 && (r1000 - stated).abs() < (r100 - stated).abs() {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn tails(seed: u64) -> (bool, String) {
    let mut worst: f64 = 0.0;
    for n in (4..=1000).step_by(4) {
        for c in [1.0, 1.5, 2.0, 3.0] {
            let r = tail_report_1d(n, c);
            worst = worst.max(r.fraction / r.bound_value);
            if !r.holds {
                return (false, format!("1-d tail exceeds bound at n={n}, c={c}"));
            }
        }
    }
    let mc = sampled_tail_zr(2, 1000, 2.0, TAIL_SAMPLES, seed, Execution::default()).unwrap();
    let dehnlab::counting::TailCount::Sampled { hits, ci_high, .. } = mc.exceed else {
        unreachable!()
    };
    let detail = format!(
        "1-d: max fraction/bound {worst:.3} over 1000 cases; Z^2 n=1000 c=2: {hits}/{TAIL_SAMPLES} hits, \
         95% upper {ci_high:.2e} <= bound {:.2e}",
        mc.bound_value
    );
    (mc.holds, detail)
}

struct Trend {
    osmean: BoundFit,
    smean: BoundFit,
    reports: Vec<DehnReport>,
}

fn trend(seed: u64, exec: Execution, ns: &[u64]) -> Trend {
    let p = z2();
    let c = GeodesicCombing::default_for(&p);
    let opts = SampleOptions {
        exec,
        ..SampleOptions::default()
    };
    let os: Vec<DehnReport> = ns
        .iter()
        .map(|&n| osmean_sampled(&p, &c, n, TREND_SAMPLES, seed, &opts).unwrap())
        .collect();
    let sm: Vec<DehnReport> = ns
        .iter()
        .map(|&n| smean_sampled(&p, n, TREND_SAMPLES, seed, &opts).unwrap())
        .collect();
    Trend {
        osmean: bound_fit(&os, 1.96),
        smean: bound_fit(&sm, 1.96),
        reports: os.into_iter().chain(sm).collect(),
    }
}

fn trend_gate(t: &Trend) -> bool {
    t.osmean.slope.as_ref().is_some_and(|s| s.no_growth)
        && t.smean.slope.as_ref().is_some_and(|s| s.no_growth)
}

fn describe(fit: &BoundFit) -> String {
    let vals: Vec<String> = fit
        .rows
        .iter()
        .map(|r| format!("{:.4}", r.normalized))
        .collect();
    let s = fit.slope.as_ref().unwrap();
    format!(
        "normalized [{}], slope {:.5} CI [{:.5}, {:.5}]",
        vals.join(", "),
        s.slope,
        s.ci_low,
        s.ci_high
    )
}

fn h_threshold() -> Verdict {
    let scan = h_inequality_scan(1_000_000);
    // measured behaviour, asserted
    assert_eq!(scan.failures, vec![2, 3, 5, 7, 9, 11, 13]);
    assert_eq!(scan.relaxed_failures, (2..=14).collect::<Vec<_>>());
    let holds_above = scan.failures.iter().all(|&n| n < 15);
    let fails_at_14 = scan.failures.contains(&14);
    let detail = format!(
        "ceil(n/2) form holds on 15..=10^6 ({}) but also at n=14; its failures are {:?}; \
         with ceil(n/2) relaxed to (n+1)/2 the threshold is exactly 15",
        if holds_above { "yes" } else { "no" },
        scan.failures
    );
    if holds_above && fails_at_14 {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn lengths() -> Verdict {
    use rand::{Rng, SeedableRng};
    let w: Word = "a1 a1 A1 a1 a1 a1".parse().unwrap();
    let f = free_reduce(&w).unwrap().len();
    let z10 = AbelianPresentation::builtin("z10").unwrap();
    let z5 = AbelianPresentation::builtin("z/5").unwrap();
    let got = (
        length_a(&w),
        f,
        z10.word_length(&w).unwrap(),
        z5.word_length(&w).unwrap(),
    );
    if got != (6, 4, 4, 1) {
        return Verdict::Fail(format!("lengths {got:?}"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED);
    let groups = ["z2", "z3", "z10", "zxz2", "z1", "z/5"];
    for name in groups {
        let p = AbelianPresentation::builtin(name).unwrap();
        let r = p.rank() as i16;
        for _ in 0..10_000 {
            let len = rng.random_range(0..=24);
            let signed: Vec<i16> = (0..len)
                .map(|_| {
                    let g = rng.random_range(1..=r);
                    if rng.random_bool(0.5) {
                        g
                    } else {
                        -g
                    }
                })
                .collect();
            let w = Word::from_signed(&signed).unwrap();
            let a = length_a(&w);
            let f = free_reduce(&w).unwrap().len();
            let g = p.word_length(&w).unwrap() as usize;
            if !(a >= f && f >= g) {
                return Verdict::Fail(format!("{name}: {w} gives ({a}, {f}, {g})"));
            }
        }
    }
    Verdict::Pass(format!(
        "(6,4,4) and 1; hierarchy on 10^4 random words for each of {groups:?}"
    ))
}

fn determinism() -> Verdict {
    let (_, first) = tails(SEED);
    let (_, again) = tails(SEED);
    if first != again {
        return Verdict::Fail("tail run differs on repeat".into());
    }
    let a = trend(SEED, Execution::default(), &TREND_NS);
    let b = trend(SEED, Execution::default(), &TREND_NS);
    let seq = trend(SEED, Execution::Sequential, &TREND_NS[..2]);
    if format!("{:?}", a.reports) != format!("{:?}", b.reports) {
        return Verdict::Fail("trend run differs on repeat".into());
    }
    // osmean rows come first, then smean rows
    if format!("{:?}", &seq.reports[..2]) != format!("{:?}", &a.reports[..2])
        || format!("{:?}", &seq.reports[2..]) != format!("{:?}", &a.reports[5..7])
    {
        return Verdict::Fail("sequential and parallel runs differ".into());
    }
    let trials = 20u64;
    let mut passed = 0;
    for k in 1..=trials {
        let seed = SEED.wrapping_add(1000 * k);
        let (tail_ok, _) = tails(seed);
        let t = trend(seed, Execution::default(), &TREND_NS);
        passed += u64::from(tail_ok && trend_gate(&t));
    }
    let detail = format!(
        "same seed byte-identical (tail, trend, sequential vs parallel); {passed}/{trials} other seeds pass, need 95%"
    );
    if passed * 100 >= 95 * trials {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn main() -> ExitCode {
    // this binary is run by `cargo test` with the default test arguments
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut s = Suite {
        unexpected: Vec::new(),
        known: Vec::new(),
        passed: 0,
    };
    s.run(
        1,
        "cogrowth triple agreement on Z^2, 2n<=24",
        secs(10),
        false,
        cogrowth_triple,
    );
    s.run(
        2,
        "closed walks C(2n,n)^2 and mass conservation",
        secs(30),
        false,
        closed_walks,
    );
    s.run(
        3,
        "winding area equals search oracle",
        secs(300),
        false,
        area_engines,
    );
    s.run(
        4,
        "exact mean Dehn anchors on Z^2",
        secs(600),
        false,
        mean_anchors,
    );
    s.run(
        5,
        "closed walk Stirling asymptotics, 2n in 200..=2000",
        secs(60),
        false,
        stirling,
    );
    s.run(
        6,
        "non-backtracking ratio against 4/(3(sqrt3+1)pi)",
        secs(60),
        true,
        sharp,
    );
    s.run(
        7,
        "tail bounds, exact 1-d and sampled Z^2",
        secs(120),
        false,
        || {
            let (ok, d) = tails(SEED);
            if ok {
                Verdict::Pass(d)
            } else {
                Verdict::Fail(d)
            }
        },
    );
    s.run(
        8,
        "sampled osmean and smean show no growth over n(ln n)^2",
        secs(600),
        false,
        || {
            let t = trend(SEED, Execution::default(), &TREND_NS);
            let d = format!(
                "{} samples per n; osmean {}; smean {}",
                TREND_SAMPLES,
                describe(&t.osmean),
                describe(&t.smean)
            );
            if trend_gate(&t) {
                Verdict::Pass(d)
            } else {
                Verdict::Fail(d)
            }
        },
    );
    s.run(9, "h-inequality threshold 15", secs(1), true, h_threshold);
    s.run(
        10,
        "length hierarchy and the aaa^-1aaa example",
        secs(30),
        false,
        lengths,
    );
    s.run(
        11,
        "determinism and seed robustness",
        secs(3600),
        false,
        determinism,
    );
    println!(
        "acceptance: {} passed, {} failed as stated {:?}, {} unexpected {:?}",
        s.passed,
        s.known.len(),
        s.known,
        s.unexpected.len(),
        s.unexpected
    );
    if s.unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
