use anyhow::{anyhow, bail, Context, Result};
use clap::Subcommand;
use freecurrents::carrier_lp::{build_polytope, carried_witness, full_support_margin, max_mass};
use freecurrents::currents::{
    check_kolmogorov, counting_current, linear_combination, rational_current, sup_distance, to_json, CheckMode,
    TruncatedCurrent,
};
use freecurrents::laminations::{
    is_sublanguage, language_of_leaf, limit_language, support, LeafDescription, LimitLanguage,
};
use freecurrents::pushforward::{push_general, push_positive};
use freecurrents::rational::{self, Rational};
use freecurrents::spectral::{
    attracting_current, eigen_residual, growth_rate, north_south_probe, pf_eigen, transition_matrix,
};
use freecurrents::{Automorphism, Letter, Word};
use serde_json::{json, Value};

use crate::input;
use crate::output::{self, Output};
use crate::Global;

#[derive(Subcommand)]
pub enum WordCmd {
    /// Freely reduce a word.
    Reduce {
        #[arg(long)]
        input: String,
    },
    Invert {
        #[arg(long)]
        input: String,
    },
    /// Image of a word under an automorphism.
    Apply {
        #[arg(long)]
        auto: String,
        #[arg(long)]
        input: String,
    },
    /// Overlapping occurrences of a pattern.
    Occurrences {
        #[arg(long)]
        input: String,
        #[arg(long)]
        pattern: String,
        /// Count in the cyclic reduction of the input, read cyclically.
        #[arg(long)]
        cyclic: bool,
    },
}

#[derive(Subcommand)]
pub enum AutoCmd {
    /// Parse an automorphism file and check its inverse.
    Verify {
        #[arg(long)]
        auto: String,
    },
    /// `auto ∘ with`: apply `with` first.
    Compose {
        #[arg(long)]
        auto: String,
        #[arg(long)]
        with: String,
    },
    /// Two-letter and certified cancellation constants.
    Bcc {
        #[arg(long)]
        auto: String,
    },
}

#[derive(Subcommand)]
pub enum CurrentCmd {
    /// Counting current of a word.
    Rational {
        #[arg(long)]
        word: String,
    },
    /// Kolmogorov validation; exits 1 when a violation is found.
    Check {
        #[arg(long)]
        current: String,
        /// Overrides the file's tolerance.
        #[arg(long)]
        tolerance: Option<String>,
    },
    /// Nonnegative combination, terms given as `COEFFICIENT:FILE`.
    Combine {
        #[arg(long = "term", required = true)]
        terms: Vec<String>,
    },
    /// Pushforward, exact for positive automorphisms and certified intervals
    /// otherwise.
    Push {
        #[arg(long)]
        auto: String,
        #[arg(long)]
        current: String,
        /// Interval output even when the automorphism is positive.
        #[arg(long)]
        general: bool,
    },
    Support {
        #[arg(long)]
        current: String,
    },
    Distance {
        #[arg(long)]
        current: String,
        #[arg(long)]
        other: String,
    },
    /// Window frequencies of an odd-length reduced word.
    Counting {
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand)]
pub enum LangCmd {
    /// Language of a leaf description file.
    Leaf {
        #[arg(long)]
        leaf: String,
    },
    /// Language of the fixed point of a positive automorphism.
    Substitution {
        #[arg(long)]
        auto: String,
        /// Seed letter; the first prolongable letter when omitted.
        #[arg(long)]
        letter: Option<char>,
    },
    Sublanguage {
        #[arg(long)]
        language: String,
        #[arg(long)]
        other: String,
    },
    Limit {
        #[arg(long = "language", required = true)]
        languages: Vec<String>,
    },
}

#[derive(Subcommand)]
pub enum LpCmd {
    /// Exact maximum of one word's value over carried currents.
    MaxMass {
        #[arg(long)]
        language_file: String,
        #[arg(long)]
        target: String,
    },
    /// Largest uniform lower bound over the whole language.
    FullSupport {
        #[arg(long)]
        language_file: String,
    },
    Witness {
        #[arg(long)]
        language_file: String,
    },
}

#[derive(Subcommand)]
pub enum SpectralCmd {
    /// Perron-Frobenius data of the transition matrix.
    Pf {
        #[arg(long)]
        auto: String,
    },
    /// Length ratios of iterated images of a letter.
    Growth {
        #[arg(long)]
        auto: String,
        #[arg(long, default_value_t = 'a')]
        letter: char,
        #[arg(long, default_value_t = 40)]
        n: usize,
    },
    /// Factor frequencies of an iterated letter.
    Attract {
        #[arg(long)]
        auto: String,
        #[arg(long, default_value_t = 15)]
        n: usize,
    },
    /// Pairwise distances of normalized iterated currents.
    Northsouth {
        #[arg(long)]
        auto: String,
        /// Comma-separated words.
        #[arg(long, value_delimiter = ',', default_value = "a,b,ab")]
        seeds: Vec<String>,
        #[arg(long, default_value_t = 15)]
        n: usize,
    },
}

fn depth(g: &Global) -> Result<usize> {
    g.depth.ok_or_else(|| anyhow!("--depth is required"))
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

fn letter(c: char, rank: usize) -> Result<Letter> {
    let x = Letter::from_char(c).ok_or_else(|| anyhow!("{c:?} is not a letter"))?;
    if x.generator() > rank {
        bail!("letter {c} exceeds rank {rank}");
    }
    Ok(x)
}

fn current_json(mu: &TruncatedCurrent) -> Value {
    serde_json::to_value(to_json(mu.table(), None)).expect("serializable")
}

pub fn word(cmd: &WordCmd, g: &Global) -> Result<Output> {
    match cmd {
        WordCmd::Reduce { input } => {
            let (w, changed) = Word::parse_reducing(input, input::rank_of(g.rank, &[input]))?;
            Ok(Output::new(format!("{w}"), json!({ "input": input, "reduced": w.to_string(), "changed": changed })))
        }
        WordCmd::Invert { input } => {
            let w = Word::parse(input, input::rank_of(g.rank, &[input]))?;
            Ok(Output::new(w.inverse().to_string(), json!({ "input": input, "inverse": w.inverse().to_string() })))
        }
        WordCmd::Apply { auto, input } => {
            let alpha = input::automorphism(auto)?;
            let image = alpha.apply(&Word::parse(input, alpha.rank())?)?;
            Ok(Output::new(image.to_string(), json!({ "input": input, "image": image.to_string() })))
        }
        WordCmd::Occurrences { input, pattern, cyclic } => {
            let rank = input::rank_of(g.rank, &[input, pattern]);
            let w = Word::parse(input, rank)?;
            let p = Word::parse(pattern, rank)?;
            let count = if *cyclic { w.cyclic_reduce()?.0.occurrences(&p)? } else { w.occurrences(&p)? };
            Ok(Output::new(count.to_string(), json!({ "input": input, "pattern": pattern, "cyclic": cyclic, "count": count })))
        }
    }
}

fn automorphism_json(alpha: &Automorphism) -> Value {
    let table = |images: &[Word]| -> Value {
        Letter::alphabet(alpha.rank())
            .filter(|x| x.is_positive())
            .zip(images)
            .map(|(x, w)| (x.to_char().to_string(), Value::String(w.to_string())))
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    let mut out = json!({ "rank": alpha.rank(), "images": table(alpha.images()) });
    if let Some(inv) = alpha.inverse_images() {
        out["inverse_images"] = table(inv);
    }
    out
}

pub fn auto(cmd: &AutoCmd, _g: &Global) -> Result<Output> {
    match cmd {
        AutoCmd::Verify { auto } => {
            let alpha = input::automorphism(auto)?;
            let bound = alpha.cancellation_bound().map(|b| b.to_string()).unwrap_or_else(|_| "unknown".into());
            let rows = vec![
                ("rank", alpha.rank().to_string()),
                ("positive", alpha.is_positive().to_string()),
                ("inverse", if alpha.inverse_images().is_some() { "verified" } else { "absent" }.to_string()),
                ("bounded_cancellation", alpha.bounded_cancellation().to_string()),
                ("cancellation_bound", bound),
            ];
            let images: Vec<(String, String)> = Letter::alphabet(alpha.rank())
                .filter(|x| x.is_positive())
                .zip(alpha.images())
                .map(|(x, w)| (x.to_string(), w.to_string()))
                .collect();
            let mut out = output::pairs(&rows);
            for (x, w) in &images {
                out.tsv.push_str(&format!("image\t{x}\t{w}\n"));
            }
            out.json["automorphism"] = automorphism_json(&alpha);
            Ok(out)
        }
        AutoCmd::Compose { auto, with } => {
            let composed = input::automorphism(auto)?.compose(&input::automorphism(with)?)?;
            Ok(Output::new(composed.to_toml(), automorphism_json(&composed)))
        }
        AutoCmd::Bcc { auto } => {
            let alpha = input::automorphism(auto)?;
            Ok(output::pairs(&[
                ("bounded_cancellation", alpha.bounded_cancellation().to_string()),
                ("cancellation_bound", alpha.cancellation_bound()?.to_string()),
            ]))
        }
    }
}

pub fn current(cmd: &CurrentCmd, g: &Global) -> Result<Output> {
    match cmd {
        CurrentCmd::Rational { word } => {
            let w = Word::parse(word, input::rank_of(g.rank, &[word]))?;
            Ok(output::current(rational_current(&w, depth(g)?)?.table(), None))
        }
        CurrentCmd::Check { current, tolerance } => {
            let (table, file_tolerance) = input::current(current)?;
            let mode = match tolerance.as_deref().map(rational::parse).transpose()?.or(file_tolerance) {
                Some(eps) => CheckMode::Tolerance(eps),
                None => CheckMode::Exact,
            };
            let report = check_kolmogorov(table.values(), table.rank(), table.depth(), &mode)?;
            let mut out = output::pairs(&[("valid", report.is_valid().to_string()), ("max_defect", fmt(&report.max_defect))]);
            let mut violations = Vec::new();
            for v in &report.violations {
                let side = serde_json::to_value(v.side).expect("serializable");
                let side = side.as_str().unwrap_or_default().to_string();
                out.tsv.push_str(&format!("violation\t{}\t{side}\t{}\n", v.word, fmt(&v.defect)));
                violations.push(json!({ "word": v.word.to_string(), "side": side, "defect": fmt(&v.defect) }));
            }
            out.json["violations"] = violations.into();
            Ok(out.failing_if(!report.is_valid()))
        }
        CurrentCmd::Combine { terms } => {
            let mut parsed = Vec::new();
            for term in terms {
                let (c, path) = term.split_once(':').ok_or_else(|| anyhow!("term {term:?} is not COEFFICIENT:FILE"))?;
                parsed.push((rational::parse(c)?, input::exact_current(path)?));
            }
            let refs: Vec<(Rational, &TruncatedCurrent)> = parsed.iter().map(|(c, m)| (c.clone(), m)).collect();
            Ok(output::current(linear_combination(&refs)?.table(), None))
        }
        CurrentCmd::Push { auto, current, general } => {
            let alpha = input::automorphism(auto)?;
            let (mu, tolerance) = input::current(current)?;
            let out_depth = g.depth.unwrap_or(mu.depth());
            if alpha.is_positive() && !general && tolerance.is_none() {
                let pushed = push_positive(&alpha, &mu, out_depth)?;
                return Ok(output::current(&pushed.into_current()?.into_table(), None));
            }
            let table = push_general(&alpha, &mu, out_depth, g.budget)?;
            let tsv = format!("rank={}\ndepth={}\n{}", table.rank, table.depth, table.to_lines());
            let values: Vec<Value> =
                table.values.iter().map(|(w, c)| json!([w.to_string(), fmt(&c.lower), fmt(&c.undecided)])).collect();
            Ok(Output::new(tsv, json!({ "rank": table.rank, "depth": table.depth, "values": values })))
        }
        CurrentCmd::Support { current } => Ok(output::language(&support(&input::exact_current(current)?))),
        CurrentCmd::Distance { current, other } => {
            let (a, _) = input::current(current)?;
            let (b, _) = input::current(other)?;
            let d = sup_distance(&a, &b, g.depth.unwrap_or(a.depth().min(b.depth())))?;
            Ok(output::pairs(&[("distance", fmt(&d))]))
        }
        CurrentCmd::Counting { word } => {
            let z = Word::parse(word, input::rank_of(g.rank, &[word]))?;
            let m = counting_current(&z, depth(g)?)?;
            Ok(output::current(m.table(), Some(m.tolerance())))
        }
    }
}

pub fn lang(cmd: &LangCmd, g: &Global) -> Result<Output> {
    match cmd {
        LangCmd::Leaf { leaf } => {
            let description = LeafDescription::from_toml(&input::read(leaf)?).with_context(|| format!("parsing {leaf}"))?;
            Ok(output::language(&language_of_leaf(&description, depth(g)?)?))
        }
        LangCmd::Substitution { auto, letter: seed } => {
            let alpha = input::automorphism(auto)?;
            let description = match seed {
                Some(c) => LeafDescription::substitution(&alpha, letter(*c, alpha.rank())?)?,
                None => LeafDescription::substitution_any_seed(&alpha)?,
            };
            Ok(output::language(&language_of_leaf(&description, depth(g)?)?))
        }
        LangCmd::Sublanguage { language, other } => {
            let verdict = is_sublanguage(&input::language(language)?, &input::language(other)?)?;
            Ok(output::pairs(&[("sublanguage", verdict.to_string())]))
        }
        LangCmd::Limit { languages } => {
            let seq = languages.iter().map(|p| input::language(p)).collect::<Result<Vec<_>>>()?;
            let d = g.depth.unwrap_or_else(|| seq.iter().map(|l| l.depth()).min().unwrap_or(0));
            match limit_language(&seq, d)? {
                LimitLanguage::Stabilized { language, since } => {
                    let mut out = output::language(&language);
                    out.tsv = format!("# stabilized since {since}\n{}", out.tsv);
                    out.json["stabilized_since"] = since.into();
                    Ok(out)
                }
                LimitLanguage::NotStabilized { last_change } => {
                    Ok(output::pairs(&[("stabilized", "false".into()), ("last_change", last_change.to_string())]))
                }
            }
        }
    }
}

pub fn lp(cmd: &LpCmd, g: &Global) -> Result<Output> {
    let load = |path: &str| -> Result<_> {
        let lang = input::language(path)?;
        Ok(match g.depth {
            Some(d) => lang.restrict(d)?,
            None => lang,
        })
    };
    match cmd {
        LpCmd::MaxMass { language_file, target } => {
            let lang = load(language_file)?;
            let target = Word::parse(target, lang.rank())?;
            let r = max_mass(&build_polytope(&lang)?, &target)?;
            let tsv = format!("objective\t{}\n# witness\n{}", fmt(&r.value), freecurrents::currents::to_dump(r.witness.table(), None));
            Ok(Output::new(tsv, json!({ "objective": fmt(&r.value), "witness": current_json(&r.witness) })))
        }
        LpCmd::FullSupport { language_file } => {
            let t = full_support_margin(&build_polytope(&load(language_file)?)?)?;
            Ok(output::pairs(&[("margin", fmt(&t)), ("full_support", (t > rational::zero()).to_string())]))
        }
        LpCmd::Witness { language_file } => Ok(output::current(carried_witness(&load(language_file)?)?.table(), None)),
    }
}

fn f(x: f64) -> String {
    format!("{x:.12}")
}

pub fn spectral(cmd: &SpectralCmd, g: &Global) -> Result<Output> {
    match cmd {
        SpectralCmd::Pf { auto } => {
            let alpha = input::automorphism(auto)?;
            let pf = pf_eigen(&transition_matrix(&alpha)?)?;
            let mut tsv = format!(
                "# alpha={auto}\tlambda={}\tresidual={:.3e}\titerations={}\ngenerator\tright\tleft\n",
                f(pf.lambda),
                pf.residual,
                pf.iterations
            );
            let mut rows = Vec::new();
            for (i, x) in Letter::alphabet(alpha.rank()).filter(|x| x.is_positive()).enumerate() {
                tsv.push_str(&format!("{x}\t{}\t{}\n", f(pf.right[i]), f(pf.left[i])));
                rows.push(json!({ "generator": x.to_string(), "right": pf.right[i], "left": pf.left[i] }));
            }
            let json = json!({
                "alpha": auto, "lambda": pf.lambda, "residual": pf.residual, "iterations": pf.iterations, "rows": rows
            });
            Ok(Output::new(tsv, json))
        }
        SpectralCmd::Growth { auto, letter: seed, n } => {
            let alpha = input::automorphism(auto)?;
            let est = growth_rate(&alpha, letter(*seed, alpha.rank())?, *n)?;
            let mut tsv = format!(
                "# alpha={auto}\tletter={seed}\tn={n}\testimate={}\tcollapsed={}\nk\tlength\tratio\n",
                f(est.estimate),
                est.collapsed
            );
            for (k, len) in est.lengths.iter().enumerate() {
                let ratio = k.checked_sub(1).map(|i| f(est.ratios[i])).unwrap_or_else(|| "-".into());
                tsv.push_str(&format!("{k}\t{len}\t{ratio}\n"));
            }
            let json = json!({
                "alpha": auto, "letter": seed.to_string(), "n": n, "estimate": est.estimate,
                "collapsed": est.collapsed, "lengths": est.lengths, "ratios": est.ratios
            });
            Ok(Output::new(tsv, json))
        }
        SpectralCmd::Attract { auto, n } => {
            let alpha = input::automorphism(auto)?;
            let d = g.depth.unwrap_or(2);
            let att = attracting_current(&alpha, d, *n)?;
            let lambda = pf_eigen(&transition_matrix(&alpha)?)?.lambda;
            let residual = eigen_residual(&alpha, att.current.table(), lambda, d)?;
            let header = format!(
                "# alpha={auto}\tdepth={d}\tn={n}\tseed={}\tlength={}\teigen_residual={:.3e}\n",
                att.seed,
                att.length,
                rational::to_f64(&residual)
            );
            let mut out = output::current(att.current.table(), Some(att.current.tolerance()));
            out.tsv = header + &out.tsv;
            out.json = json!({
                "alpha": auto, "depth": d, "n": n, "seed": att.seed.to_string(), "length": att.length,
                "eigen_residual": fmt(&residual), "current": out.json
            });
            Ok(out)
        }
        SpectralCmd::Northsouth { auto, seeds, n } => {
            let alpha = input::automorphism(auto)?;
            let d = g.depth.unwrap_or(2);
            let words = seeds.iter().map(|s| Word::parse(s, alpha.rank())).collect::<freecurrents::Result<Vec<_>>>()?;
            let probe = north_south_probe(&alpha, &words, d, *n)?;
            let mut tsv = format!(
                "# alpha={auto}\tdepth={d}\tn={n}\tmax_distance={:.3e}\nseed\tseed\tdistance\n",
                rational::to_f64(&probe.max_distance())
            );
            let mut rows = Vec::new();
            for (i, j, dist) in &probe.pairwise {
                tsv.push_str(&format!("{}\t{}\t{:.6e}\n", words[*i], words[*j], rational::to_f64(dist)));
                rows.push(json!([words[*i].to_string(), words[*j].to_string(), fmt(dist)]));
            }
            Ok(Output::new(tsv, json!({ "alpha": auto, "depth": d, "n": n, "pairwise": rows })))
        }
    }
}
