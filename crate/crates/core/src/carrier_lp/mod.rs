//! Exact linear programs over the currents carried by a laminary language.

mod simplex;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

pub use simplex::{solve, Solution, StandardForm};

use crate::currents::{CurrentTable, TruncatedCurrent};
use crate::error::{Error, Result};
use crate::free_group::{Letter, Word};
use crate::laminations::LaminaryLanguage;
use crate::rational::{self, Rational};

/// Normalized depth-`L` currents whose support lies in a language. One
/// variable per class `{w, w⁻¹}`; the left Kolmogorov equation of `w` is the
/// right equation of `w⁻¹`, so only right equations are kept.
#[derive(Clone, Debug)]
pub struct KolmogorovPolytope {
    language: LaminaryLanguage,
    classes: Vec<Word>,
    index: HashMap<Word, usize>,
    /// `value(w) − Σ_y value(wy) = 0`, as `(variable, ±1)` lists.
    equations: Vec<Vec<(usize, i64)>>,
}

fn class_of(w: &Word) -> Word {
    let inv = w.inverse();
    if inv < *w {
        inv
    } else {
        w.clone()
    }
}

impl KolmogorovPolytope {
    pub fn language(&self) -> &LaminaryLanguage {
        &self.language
    }

    /// Class representatives, the lesser of `w` and `w⁻¹`.
    pub fn classes(&self) -> &[Word] {
        &self.classes
    }

    pub fn equations(&self) -> &[Vec<(usize, i64)>] {
        &self.equations
    }

    pub fn variable(&self, w: &Word) -> Option<usize> {
        self.index.get(&class_of(w)).copied()
    }

    fn standard_form(&self, extra_columns: usize) -> StandardForm {
        let rows: Vec<Vec<(usize, Rational)>> = self
            .equations
            .iter()
            .map(|r| r.iter().map(|&(j, c)| (j, rational::int(c))).collect())
            .chain(std::iter::once(self.normalization()))
            .collect();
        let mut rhs = vec![Rational::zero(); rows.len()];
        *rhs.last_mut().expect("normalization row") = Rational::one();
        StandardForm { columns: self.classes.len() + extra_columns, rows, rhs, objective: Vec::new() }
    }

    /// `Σ_{|w|=1} value(w) = 1`, each class counted for both orientations.
    fn normalization(&self) -> Vec<(usize, Rational)> {
        self.classes.iter().enumerate().filter(|(_, w)| w.len() == 1).map(|(j, _)| (j, rational::int(2))).collect()
    }

    /// Turns a vertex into a current and re-checks it exactly.
    fn current_from(&self, x: &[Rational]) -> Result<TruncatedCurrent> {
        let mut values = BTreeMap::new();
        for (w, v) in self.classes.iter().zip(x) {
            if !v.is_zero() {
                values.insert(w.inverse(), v.clone());
                values.insert(w.clone(), v.clone());
            }
        }
        TruncatedCurrent::new(CurrentTable::new(self.language.rank(), self.language.depth(), values)?)
    }
}

pub fn build_polytope(language: &LaminaryLanguage) -> Result<KolmogorovPolytope> {
    if language.is_empty() {
        return Err(Error::EmptyInput("the language has no words"));
    }
    let classes: Vec<Word> = language.words().iter().map(class_of).collect::<BTreeSet<_>>().into_iter().collect();
    let index: HashMap<Word, usize> = classes.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut equations = BTreeSet::new();
    for w in language.words().iter().filter(|w| w.len() < language.depth()) {
        let mut row = vec![(index[&class_of(w)], 1i64)];
        for y in Letter::alphabet(language.rank()) {
            if let Some(v) = w.extend_right(y).filter(|v| language.contains(v)) {
                row.push((index[&class_of(&v)], -1));
            }
        }
        row.sort_unstable();
        equations.insert(row);
    }
    Ok(KolmogorovPolytope { language: language.clone(), classes, index, equations: equations.into_iter().collect() })
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub value: Rational,
    pub witness: TruncatedCurrent,
}

/// The exact maximum of `value(target)` with an optimal vertex.
pub fn max_mass(polytope: &KolmogorovPolytope, target: &Word) -> Result<LpResult> {
    let j = polytope.variable(target).filter(|_| polytope.language.contains(target)).ok_or_else(|| Error::TargetAbsent(target.clone()))?;
    let mut lp = polytope.standard_form(0);
    lp.objective = vec![(j, Rational::one())];
    let sol = solve(&lp)?;
    Ok(LpResult { value: sol.objective, witness: polytope.current_from(&sol.x)? })
}

/// The largest `t` such that some point has every variable `≥ t`; positive
/// exactly when some normalized current has full support in the language.
pub fn full_support_margin(polytope: &KolmogorovPolytope) -> Result<Rational> {
    // x = t·1 + s with s ≥ 0; column `n` is t.
    let n = polytope.classes.len();
    let mut lp = polytope.standard_form(1);
    for row in lp.rows.iter_mut() {
        let total: Rational = row.iter().map(|(_, c)| c).sum();
        if !total.is_zero() {
            row.push((n, total));
        }
    }
    lp.objective = vec![(n, Rational::one())];
    Ok(solve(&lp)?.objective)
}

/// Some vertex of the polytope as a current carried by the language.
pub fn carried_witness(language: &LaminaryLanguage) -> Result<TruncatedCurrent> {
    let polytope = build_polytope(language)?;
    let sol = solve(&polytope.standard_form(0))?;
    polytope.current_from(&sol.x)
}
