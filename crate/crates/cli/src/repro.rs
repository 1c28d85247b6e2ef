use anyhow::Result;
use clap::ValueEnum;
use freecurrents::carrier_lp::{build_polytope, carried_witness, max_mass};
use freecurrents::currents::{
    check_kolmogorov, counting_current, linear_combination, normalize, rational_current, sup_distance, CheckMode,
};
use freecurrents::fixtures::{tribonacci, tribonacci_inverse};
use freecurrents::laminations::{is_sublanguage, language_of_leaf, support, LeafDescription};
use freecurrents::pushforward::{push_general, push_positive};
use freecurrents::rational::{self, int, ratio, Rational};
use freecurrents::spectral::{attracting_current, eigen_residual, growth_rate, north_south_probe, pf_eigen, transition_matrix};
use freecurrents::{random, Letter, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::Output;
use crate::Global;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Tribonacci,
    Pushforward,
    Eigen,
    LpDecay,
    Carried,
    Noncontinuity,
    Noninjectivity,
    Counting,
    Kolmogorov,
    Northsouth,
    All,
}

#[derive(Serialize)]
struct Verdict {
    criterion: usize,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct Report {
    experiment: &'static str,
    parameters: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    verdicts: Vec<Verdict>,
}

impl Report {
    fn new(experiment: &'static str, columns: &[&'static str]) -> Report {
        Report { experiment, parameters: Vec::new(), columns: columns.to_vec(), rows: Vec::new(), verdicts: Vec::new() }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.push((key.to_string(), value.to_string()));
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn verdict(&mut self, criterion: usize, outcome: Result<String, String>) {
        let (pass, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.verdicts.push(Verdict { criterion, pass, detail });
    }

    fn tsv(&self) -> String {
        let mut out = format!("# experiment\t{}\n", self.experiment);
        for (k, v) in &self.parameters {
            out.push_str(&format!("# {k}\t{v}\n"));
        }
        if !self.columns.is_empty() {
            out.push_str(&self.columns.join("\t"));
            out.push('\n');
        }
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        for v in &self.verdicts {
            out.push_str(&format!("VERDICT\t{}\t{}\t{}\n", v.criterion, if v.pass { "PASS" } else { "FAIL" }, v.detail));
        }
        out
    }
}

fn check(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

fn w(s: &str, rank: usize) -> Word {
    Word::parse(s, rank).expect("literal word")
}

fn tribonacci_report() -> Report {
    let mut r = Report::new("tribonacci", &["quantity", "value"]);
    r.param("automorphism", "a->ab b->ac c->a");
    let forward = transition_matrix(&tribonacci()).and_then(|m| pf_eigen(&m));
    match forward {
        Ok(pf) => {
            let l = pf.lambda;
            let poly = (l * l * l - l * l - l - 1.0).abs();
            r.row(vec!["forward lambda".into(), format!("{l:.10}")]);
            r.row(vec!["|l^3-l^2-l-1|".into(), format!("{poly:.3e}")]);
            r.verdict(1, check(poly <= 1e-9 && format!("{l:.2}") == "1.84", format!("lambda = {l:.4}")));
        }
        Err(e) => r.verdict(1, Err(e.to_string())),
    }
    match growth_rate(&tribonacci_inverse(), Letter::new(1, true), 40) {
        Ok(g) => {
            r.row(vec!["inverse growth estimate".into(), format!("{:.6}", g.estimate)]);
            r.row(vec!["inverse final length".into(), g.lengths.last().expect("nonempty").to_string()]);
            r.verdict(2, check((1.38..=1.41).contains(&g.estimate), format!("estimate = {:.4} in [1.38, 1.41]", g.estimate)));
        }
        Err(e) => r.verdict(2, Err(e.to_string())),
    }
    r
}

fn pushforward_report(seed: u64, budget: usize) -> Report {
    let mut r = Report::new("pushforward", &["word", "push_positive exact", "undecided/mass"]);
    r.param("seed", seed);
    r.param("budget", budget);
    let (alpha, inverse) = (tribonacci(), tribonacci_inverse());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = rational::zero();
    let mut failures = Vec::new();
    for _ in 0..200 {
        let len = rng.gen_range(1..=8);
        let word = random::cyclically_reduced_word(&mut rng, 3, len);
        let outcome = (|| -> freecurrents::Result<(bool, Rational, bool)> {
            let mu = rational_current(&word, 12)?;
            let exact = push_positive(&alpha, &mu, 3)?.table == *rational_current(&alpha.apply(&word)?, 3)?.table();
            let intervals = push_general(&inverse, &mu, 3, budget)?;
            let oracle = rational_current(&inverse.apply(&word)?, 3)?;
            let mass = oracle.level_sum(1);
            let mut fraction = rational::zero();
            let mut contained = true;
            for v in Word::all_up_to(3, 3) {
                let c = intervals.get(&v);
                contained &= c.contains(&oracle.value(&v));
                fraction = fraction.max(&c.undecided / &mass);
            }
            Ok((exact, fraction, contained))
        })();
        match outcome {
            Ok((exact, fraction, contained)) => {
                if !exact || !contained {
                    failures.push(word.to_string());
                }
                r.row(vec![word.to_string(), exact.to_string(), format!("{:.3e}", rational::to_f64(&fraction))]);
                worst = worst.max(fraction);
            }
            Err(e) => failures.push(format!("{word} ({e})")),
        }
    }
    let ok = failures.is_empty() && worst <= ratio(1, 1000);
    let detail = if failures.is_empty() {
        format!("200 words; worst undecided/mass = {:.3e}", rational::to_f64(&worst))
    } else {
        format!("mismatches on {}", failures.join(", "))
    };
    r.verdict(3, check(ok, detail));
    r
}

fn eigen_report() -> Report {
    let mut r = Report::new("eigen", &["n", "length", "residual"]);
    let alpha = tribonacci();
    r.param("depth", 2);
    let outcome = (|| -> freecurrents::Result<Vec<f64>> {
        let lambda = pf_eigen(&transition_matrix(&alpha)?)?.lambda;
        let mut residuals = Vec::new();
        for n in [10, 15, 20] {
            let mu = attracting_current(&alpha, 2, n)?;
            let res = rational::to_f64(&eigen_residual(&alpha, mu.current.table(), lambda, 2)?);
            r.row(vec![n.to_string(), mu.length.to_string(), format!("{res:.3e}")]);
            residuals.push(res);
        }
        Ok(residuals)
    })();
    r.verdict(
        4,
        match outcome {
            Ok(res) => {
                let monotone = res.windows(2).all(|p| p[1] <= p[0] + 1e-6);
                check(monotone && res[2] <= 1e-3, format!("residual at n = 20: {:.3e}", res[2]))
            }
            Err(e) => Err(e.to_string()),
        },
    );
    r
}

fn lp_decay_report() -> Report {
    let mut r = Report::new("lp-decay", &["D", "max value(b)", "1/(2D)"]);
    r.param("language", "...aaab.aaa...");
    let mut ok = true;
    for depth in 2..=6usize {
        let value = LeafDescription::eventually_periodic(&w("a", 2), &w("b", 2), &w("a", 2))
            .and_then(|leaf| language_of_leaf(&leaf, depth))
            .and_then(|lang| build_polytope(&lang))
            .and_then(|p| max_mass(&p, &w("b", 2)));
        let expected = ratio(1, 2 * depth as i64);
        match value {
            Ok(v) => {
                ok &= v.value == expected;
                r.row(vec![depth.to_string(), fmt(&v.value), fmt(&expected)]);
            }
            Err(e) => {
                ok = false;
                r.row(vec![depth.to_string(), format!("error: {e}"), fmt(&expected)]);
            }
        }
    }
    r.verdict(5, check(ok, "max value(b) = 1/(2D) exactly for D = 2..6".into()));
    r
}

fn carried_report(seed: u64) -> Report {
    let mut r = Report::new("carried", &["language", "rank", "depth", "words", "witness carried"]);
    r.param("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for i in 0..100 {
        let rank = rng.gen_range(2..=3);
        let depth = rng.gen_range(1..=4);
        let outcome = random::language(&mut rng, rank, depth).and_then(|lang| {
            let witness = carried_witness(&lang)?;
            Ok((lang.len(), is_sublanguage(&support(&witness), &lang)?))
        });
        let (size, carried) = match outcome {
            Ok((size, carried)) => (size.to_string(), carried.to_string()),
            Err(e) => ("-".into(), format!("error: {e}")),
        };
        if carried != "true" {
            bad += 1;
        }
        r.row(vec![i.to_string(), rank.to_string(), depth.to_string(), size, carried]);
    }
    r.verdict(6, check(bad == 0, format!("{} of 100 witnesses carried", 100 - bad)));
    r
}

fn noncontinuity_report() -> Report {
    let mut r = Report::new("noncontinuity", &["n", "distance to mu_b", "support size", "strictly contains L(b)"]);
    r.param("depth", 2);
    let b = rational_current(&w("b", 2), 2).expect("small current");
    let lb = support(&b);
    let mut ok = true;
    let mut first = None;
    for n in 2..=10i64 {
        let word = w(&format!("a{}", "b".repeat(n as usize)), 2);
        let mu = linear_combination(&[(ratio(1, n), &rational_current(&word, 2).expect("small current"))])
            .expect("positive coefficient");
        let d = sup_distance(&mu, &b, 2).expect("equal ranks");
        let s = support(&mu);
        let strict = is_sublanguage(&lb, &s).unwrap_or(false) && !is_sublanguage(&s, &lb).unwrap_or(true);
        ok &= d == ratio(1, n) && strict && first.as_ref().is_none_or(|f| *f == s);
        r.row(vec![n.to_string(), fmt(&d), s.len().to_string(), strict.to_string()]);
        first.get_or_insert(s);
    }
    r.verdict(7, check(ok, "distance 1/n -> 0 with a constant support strictly containing L(b)".into()));
    r
}

fn noninjectivity_report() -> Report {
    let mut r = Report::new("noninjectivity", &["depth", "distance", "supports equal"]);
    r.param("weights", "1/4, 1/2");
    let mut ok = true;
    for depth in 1..=5 {
        let a = rational_current(&w("a", 2), depth).expect("small current");
        let b = rational_current(&w("b", 2), depth).expect("small current");
        let mix = |l: Rational| {
            normalize(&linear_combination(&[(l.clone(), &a), (int(1) - l, &b)]).expect("convex")).expect("nonzero")
        };
        let (p, q) = (mix(ratio(1, 4)), mix(ratio(1, 2)));
        let d = sup_distance(&p, &q, depth).expect("equal ranks");
        let same = support(&p) == support(&q);
        ok &= d > int(0) && same;
        r.row(vec![depth.to_string(), fmt(&d), same.to_string()]);
    }
    r.verdict(8, check(ok, "distinct normalized currents with equal supports at depths 1..5".into()));
    r
}

fn counting_report(seed: u64) -> Report {
    let mut r = Report::new("counting", &["|Z|", "depth", "max defect", "bound", "level-1 mass"]);
    r.param("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    for _ in 0..100 {
        let rank = rng.gen_range(2..=3);
        let len = 2 * rng.gen_range(1..=20) + 1;
        let z = random::reduced_word(&mut rng, rank, len);
        let depth = len.min(5);
        let bound = ratio(1, len as i64);
        match counting_current(&z, depth)
            .and_then(|m| Ok((check_kolmogorov(m.values(), rank, depth, &CheckMode::Tolerance(bound.clone()))?, m)))
        {
            Ok((report, m)) => {
                ok &= report.is_valid() && m.level_sum(1) == int(1);
                r.row(vec![len.to_string(), depth.to_string(), fmt(&report.max_defect), fmt(&bound), fmt(&m.level_sum(1))]);
            }
            Err(e) => {
                ok = false;
                r.row(vec![len.to_string(), depth.to_string(), format!("error: {e}"), fmt(&bound), "-".into()]);
            }
        }
    }
    r.verdict(9, check(ok, "100 windows within 1/(2n+1), level-1 mass 1".into()));
    r
}

fn kolmogorov_report(seed: u64) -> Report {
    let mut r = Report::new("kolmogorov", &["kind", "currents", "valid"]);
    r.param("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut valid = [0usize; 2];
    for i in 0..500 {
        let rank = rng.gen_range(1..=3);
        let depth = rng.gen_range(1..=5);
        let mu = if i % 2 == 0 {
            random::rational(&mut rng, rank, depth, 8)
        } else {
            random::combination(&mut rng, rank, depth, 4)
        };
        let Ok(mu) = mu else { continue };
        let symmetric = mu.values().iter().all(|(v, x)| mu.value(&v.inverse()) == *x);
        let level = mu.level_sum(1);
        let flat = (2..=depth).all(|k| mu.level_sum(k) == level);
        if mu.check(&CheckMode::Exact).is_valid() && symmetric && flat {
            valid[i % 2] += 1;
        }
    }
    r.row(vec!["rational".into(), "250".into(), valid[0].to_string()]);
    r.row(vec!["combination".into(), "250".into(), valid[1].to_string()]);
    r.verdict(10, check(valid == [250, 250], format!("{} of 500 currents exact, symmetric, level-constant", valid[0] + valid[1])));
    r
}

fn northsouth_report() -> Report {
    let mut r = Report::new("northsouth", &["seed", "seed", "distance"]);
    r.param("depth", 2);
    r.param("n", 15);
    let seeds = [w("a", 3), w("b", 3), w("ab", 3)];
    match north_south_probe(&tribonacci(), &seeds, 2, 15) {
        Ok(probe) => {
            for (i, j, d) in &probe.pairwise {
                r.row(vec![seeds[*i].to_string(), seeds[*j].to_string(), format!("{:.3e}", rational::to_f64(d))]);
            }
            let d = rational::to_f64(&probe.max_distance());
            r.verdict(11, check(d <= 1e-3, format!("max pairwise distance {d:.3e}")));
        }
        Err(e) => r.verdict(11, Err(e.to_string())),
    }
    r
}

pub fn run(suite: Suite, g: &Global) -> Result<Output> {
    let reports: Vec<Report> = match suite {
        Suite::Tribonacci => vec![tribonacci_report()],
        Suite::Pushforward => vec![pushforward_report(g.seed, g.budget)],
        Suite::Eigen => vec![eigen_report()],
        Suite::LpDecay => vec![lp_decay_report()],
        Suite::Carried => vec![carried_report(g.seed)],
        Suite::Noncontinuity => vec![noncontinuity_report()],
        Suite::Noninjectivity => vec![noninjectivity_report()],
        Suite::Counting => vec![counting_report(g.seed)],
        Suite::Kolmogorov => vec![kolmogorov_report(g.seed)],
        Suite::Northsouth => vec![northsouth_report()],
        Suite::All => vec![
            tribonacci_report(),
            pushforward_report(g.seed, g.budget),
            eigen_report(),
            lp_decay_report(),
            carried_report(g.seed),
            noncontinuity_report(),
            noninjectivity_report(),
            counting_report(g.seed),
            kolmogorov_report(g.seed),
            northsouth_report(),
        ],
    };
    let failed = reports.iter().flat_map(|r| &r.verdicts).any(|v| !v.pass);
    let tsv = reports.iter().map(Report::tsv).collect::<Vec<_>>().join("\n");
    let json = json!({ "reports": reports });
    Ok(Output::new(tsv, json).failing_if(failed))
}
