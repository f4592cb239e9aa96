//! Problem files: JSON input describing a DR problem or a bare set of legs
//! with explicit lifts.

use std::path::Path;

use orbidr_core::{BundleRep, DRProblem, Rational, Sector, TopData};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub m: u32,
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsoluteLeg {
    pub sector: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Contact {
    pub sector: u32,
    pub contact: Rational,
}

/// A leg with its lift given directly, bypassing the contact-order form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftedLeg {
    pub sector: u32,
    pub lift: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BranchChoice {
    Zero,
    Infinity,
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_samples: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub target: Target,
    pub genus: u32,
    #[serde(default)]
    pub absolute: Vec<AbsoluteLeg>,
    #[serde(default)]
    pub relative_zero: Vec<Contact>,
    #[serde(default)]
    pub relative_infinity: Vec<Contact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legs: Option<Vec<LiftedLeg>>,
    #[serde(default)]
    pub options: Options,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        let p: ProblemFile =
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        if p.legs.is_some() && !(p.absolute.is_empty() && p.relative_zero.is_empty() && p.relative_infinity.is_empty())
        {
            return Err(Failure::input("\"legs\" cannot be combined with absolute or relative markings".into()));
        }
        Ok(p)
    }

    pub fn rep(&self) -> BundleRep {
        BundleRep { m: self.target.m, s: self.target.s }
    }

    pub fn dr_problem(&self) -> Result<DRProblem, Failure> {
        if self.legs.is_some() {
            return Err(Failure::input("a DR problem needs absolute/relative markings, not \"legs\"".into()));
        }
        let contacts = |cs: &[Contact]| cs.iter().map(|c| (Sector(c.sector), c.contact.clone())).collect();
        Ok(DRProblem {
            g: self.genus,
            rep: self.rep(),
            absolute: self.absolute.iter().map(|a| Sector(a.sector)).collect(),
            mu0: contacts(&self.relative_zero),
            mu_inf: contacts(&self.relative_infinity),
        })
    }

    /// Topological data with lifts: the explicit legs if given, otherwise the
    /// lifts of the chosen branch.
    pub fn top_data(&self, branch: orbidr_core::Branch) -> Result<TopData, Failure> {
        match &self.legs {
            Some(legs) => Ok(TopData::new(
                self.genus,
                self.rep(),
                legs.iter().map(|l| Sector(l.sector)).collect(),
                legs.iter().map(|l| l.lift.clone()).collect(),
            )?),
            None => Ok(self.dr_problem()?.top_data(branch)?),
        }
    }
}
