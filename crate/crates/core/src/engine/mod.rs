//! Graph-sum evaluators for the Chern classes of the root-gerbe bundle, their
//! polynomial dependence on `r`, the direct constant-term formula, and the
//! double ramification cycle built from them.

mod at_r;
mod dr;
mod leading;
mod rpoly;

use serde::{Deserialize, Serialize};

pub use at_r::class_at_r;
pub use dr::{
    dr_cycle, dr_cycle_raw, dr_cycle_with, dr_polynomial_class, normalization, validate_dr_problem, Branch, CheckItem,
    DRProblem, Normalization, ValidationReport,
};
pub use leading::{leading_term_class, leading_term_class_with, weight_power_sum, WeightSumMethod};
pub use rpoly::{default_samples, polynomial_class, polynomial_class_with, RPolyClass, RPolyTermJson};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::orbifold::{admissible, age, BundleRep, Sector};
use crate::taut::Ambient;

/// Topological data on the base together with an admissible lift per leg.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopData {
    pub g: u32,
    pub rep: BundleRep,
    pub leg_sectors: Vec<Sector>,
    pub lifts: Vec<Rational>,
}

impl TopData {
    pub fn new(g: u32, rep: BundleRep, leg_sectors: Vec<Sector>, lifts: Vec<Rational>) -> Result<Self> {
        let data = TopData { g, rep, leg_sectors, lifts };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        self.rep.validate()?;
        let n = self.leg_sectors.len() as i64;
        if 2 * self.g as i64 - 2 + n <= 0 {
            return Err(Error::Unstable(2 * self.g as i64 - 2 + n));
        }
        if self.lifts.len() != self.leg_sectors.len() {
            return Err(Error::InvalidInput(format!(
                "{} lifts for {} legs",
                self.lifts.len(),
                self.leg_sectors.len()
            )));
        }
        for (s, a) in self.leg_sectors.iter().zip(&self.lifts) {
            self.rep.check_sector(*s)?;
            if !admissible(self.rep, *s, a) {
                return Err(Error::NotAdmissible { sector: s.0, a: a.clone(), age: age(self.rep, *s) });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.leg_sectors.len()
    }

    pub fn ambient(&self) -> Ambient {
        Ambient { g: self.g, n: self.n(), m: self.rep.m }
    }

    pub fn dim(&self) -> u32 {
        3 * self.g + self.n() as u32 - 3
    }

    pub(crate) fn check_degree(&self, d: u32) -> Result<()> {
        if d > self.dim() {
            return Err(Error::DegreeOutOfRange { degree: d, dim: self.dim() });
        }
        Ok(())
    }
}

/// Tunables of the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Multiplier `c` in the working bound `r > c (max|a_i| + m)(2g + 1)`.
    pub rbound_factor: u64,
    /// Samples beyond the interpolation degree, used only for verification.
    pub surplus_samples: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { rbound_factor: 4, surplus_samples: 2 }
    }
}

/// Smallest `r` inside the working range: `r > c (max|a_i| + m)(2g + 1)`
/// and `r > sum|a_i| + m`.
pub fn working_bound(data: &TopData, config: &EngineConfig) -> u64 {
    let m = Rational::from(data.rep.m as i64);
    let max_a = data.lifts.iter().map(Rational::abs).max().unwrap_or_default();
    let sum_a: Rational = data.lifts.iter().map(Rational::abs).sum();
    let heuristic =
        (max_a + &m) * Rational::from(config.rbound_factor as i64) * Rational::from(2 * data.g as i64 + 1);
    let b = heuristic.max(sum_a + m);
    let floor = b.floor();
    u64::try_from(floor).expect("bound fits in u64") + 1
}
