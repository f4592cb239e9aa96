//! Double ramification cycles relative to the zero and infinity divisors.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{default_samples, polynomial_class, EngineConfig, RPolyClass, TopData};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::orbifold::{admissible, age, BundleRep, Sector};
use crate::taut::TautClass;

/// Absolute markings (sectors of age zero) and relative markings with
/// positive rational contact orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DRProblem {
    pub g: u32,
    pub rep: BundleRep,
    pub absolute: Vec<Sector>,
    pub mu0: Vec<(Sector, Rational)>,
    pub mu_inf: Vec<(Sector, Rational)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Zero,
    Infinity,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Zero => "zero",
            Branch::Infinity => "infinity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub items: Vec<CheckItem>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.items.iter().any(|i| i.name == name && !i.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.items {
            writeln!(f, "[{}] {}: {}", if i.pass { "pass" } else { "FAIL" }, i.name, i.detail)?;
        }
        Ok(())
    }
}

impl DRProblem {
    pub fn n(&self) -> usize {
        self.absolute.len() + self.mu0.len() + self.mu_inf.len()
    }

    fn sum_zero(&self) -> Rational {
        self.mu0.iter().map(|(_, m)| m).sum()
    }

    fn sum_inf(&self) -> Rational {
        self.mu_inf.iter().map(|(_, m)| m).sum()
    }

    /// Leg sectors and the admissible vector for `branch`: absolute legs
    /// first, then zero contacts, then infinity contacts.
    pub fn top_data(&self, branch: Branch) -> Result<TopData> {
        let sectors: Vec<Sector> = self
            .absolute
            .iter()
            .copied()
            .chain(self.mu0.iter().map(|(s, _)| *s))
            .chain(self.mu_inf.iter().map(|(s, _)| *s))
            .collect();
        let lifts_zero: Vec<Rational> = self
            .absolute
            .iter()
            .map(|_| Rational::zero())
            .chain(self.mu0.iter().map(|(_, m)| m.clone()))
            .chain(self.mu_inf.iter().map(|(_, m)| -m))
            .collect();
        match branch {
            Branch::Zero => TopData::new(self.g, self.rep, sectors, lifts_zero),
            Branch::Infinity => {
                TopData::new(self.g, self.rep.dual(), sectors, lifts_zero.iter().map(|a| -a).collect())
            }
        }
    }
}

/// Itemized check of every constraint on the problem data.
pub fn validate_dr_problem(p: &DRProblem) -> ValidationReport {
    let mut items = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        items.push(CheckItem { name: name.to_string(), pass, detail })
    };
    let rep_ok = p.rep.validate().is_ok();
    push("target", rep_ok, format!("m = {}, s = {}", p.rep.m, p.rep.s));
    let n = p.n() as i64;
    push("stability", 2 * p.g as i64 - 2 + n > 0, format!("2g - 2 + n = {}", 2 * p.g as i64 - 2 + n));
    if !rep_ok {
        return ValidationReport { items };
    }
    let in_range = |s: &Sector| s.0 < p.rep.m;
    let all_sectors = p.absolute.iter().chain(p.mu0.iter().map(|(s, _)| s)).chain(p.mu_inf.iter().map(|(s, _)| s));
    let bad: Vec<u32> = all_sectors.filter(|s| !in_range(s)).map(|s| s.0).collect();
    push("sectors", bad.is_empty(), format!("out of range: {bad:?}"));
    if !bad.is_empty() {
        return ValidationReport { items };
    }
    for (i, s) in p.absolute.iter().enumerate() {
        let a = age(p.rep, *s);
        push(&format!("absolute[{i}]"), a.is_zero(), format!("age of sector {} is {a}", s.0));
    }
    for (i, (s, mu)) in p.mu0.iter().enumerate() {
        push(&format!("zero[{i}].positive"), !mu.is_negative() && !mu.is_zero(), format!("mu = {mu}"));
        push(
            &format!("zero[{i}].admissible"),
            admissible(p.rep, *s, mu),
            format!("frac({mu}) vs age {}", age(p.rep, *s)),
        );
    }
    let dual = p.rep.dual();
    for (i, (s, mu)) in p.mu_inf.iter().enumerate() {
        push(&format!("infinity[{i}].positive"), !mu.is_negative() && !mu.is_zero(), format!("mu = {mu}"));
        push(
            &format!("infinity[{i}].admissible"),
            admissible(dual, *s, mu),
            format!("frac({mu}) vs dual age {}", age(dual, *s)),
        );
    }
    let (z, inf) = (p.sum_zero(), p.sum_inf());
    push("balance", z == inf, format!("|mu_0| = {z}, |mu_inf| = {inf}"));
    ValidationReport { items }
}

/// Degree-`g` part of the branch output as polynomials in `r`, without sign
/// normalization. The infinity branch carries a global minus sign. `samples` replaces the
/// default sample range when given.
fn raw_rpoly(p: &DRProblem, branch: Branch, config: &EngineConfig, samples: Option<&[u64]>) -> Result<RPolyClass> {
    let report = validate_dr_problem(p);
    if report.failed("balance") {
        return Err(Error::UnbalancedContacts { zero: p.sum_zero(), infinity: p.sum_inf() });
    }
    if !report.all_pass() {
        return Err(Error::InvalidInput(report.to_string()));
    }
    let data = p.top_data(branch)?;
    let c = match samples {
        Some(s) => polynomial_class(&data, p.g, s)?,
        None => polynomial_class(&data, p.g, &default_samples(&data, p.g, config))?,
    };
    let c = c.homogeneous_part(p.g);
    Ok(match branch {
        Branch::Zero => c,
        Branch::Infinity => c.scale(&Rational::from(-1)),
    })
}

/// `[r c_g]_{r^0}` for the branch, without sign normalization.
pub fn dr_cycle_raw(p: &DRProblem, branch: Branch, config: &EngineConfig) -> Result<TautClass> {
    Ok(raw_rpoly(p, branch, config, None)?.constant_term())
}

/// Per-branch sign constants making genus-zero cycles equal to the
/// fundamental class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalization {
    pub zero: i64,
    pub infinity: i64,
}

impl Normalization {
    pub fn of(&self, branch: Branch) -> i64 {
        match branch {
            Branch::Zero => self.zero,
            Branch::Infinity => self.infinity,
        }
    }
}

/// Determined once by evaluating a genus-zero reference problem.
pub fn normalization() -> Result<Normalization> {
    static NORM: OnceLock<std::result::Result<Normalization, Error>> = OnceLock::new();
    NORM.get_or_init(|| {
        let p = DRProblem {
            g: 0,
            rep: BundleRep::trivial(),
            absolute: vec![Sector(0)],
            mu0: vec![(Sector(0), Rational::one())],
            mu_inf: vec![(Sector(0), Rational::one())],
        };
        let sign = |branch| -> Result<i64> {
            let c = dr_cycle_raw(&p, branch, &EngineConfig::default())?;
            let terms: Vec<_> = c.terms().collect();
            match terms.as_slice() {
                [(k, v)] if k.graph.num_edges() == 0 && v.abs().is_one() => {
                    Ok(if v.is_negative() { -1 } else { 1 })
                }
                _ => Err(Error::InvalidInput(format!("genus-zero self-test produced {c}"))),
            }
        };
        Ok(Normalization { zero: sign(Branch::Zero)?, infinity: sign(Branch::Infinity)? })
    })
    .clone()
}

pub fn dr_cycle(p: &DRProblem, branch: Branch) -> Result<TautClass> {
    dr_cycle_with(p, branch, &EngineConfig::default())
}

/// Normalized DR cycle: the raw branch output times its sign constant.
pub fn dr_cycle_with(p: &DRProblem, branch: Branch, config: &EngineConfig) -> Result<TautClass> {
    Ok(dr_polynomial_class(p, branch, config, None)?.constant_term())
}

/// Normalized branch output with every coefficient kept as a polynomial in
/// `r`; its constant term is the DR cycle.
pub fn dr_polynomial_class(
    p: &DRProblem,
    branch: Branch,
    config: &EngineConfig,
    samples: Option<&[u64]>,
) -> Result<RPolyClass> {
    let raw = raw_rpoly(p, branch, config, samples)?;
    let norm = normalization()?;
    Ok(raw.scale(&Rational::from(norm.of(branch))))
}
