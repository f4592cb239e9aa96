//! Interpolation of the graph sum in `r`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{class_at_r, working_bound, EngineConfig, TopData};
use crate::error::{Error, Result};
use crate::exact::{lagrange_interpolate, Rational, UniPoly};
use crate::taut::{Ambient, TautClass, TermJson, TermKey};

/// Per-term coefficients as polynomials in `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RPolyClass {
    ambient: Ambient,
    samples: Vec<u64>,
    terms: BTreeMap<TermKey, UniPoly>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RPolyTermJson {
    #[serde(flatten)]
    pub term: TermJson,
    /// Coefficients of `r^0, r^1, ...`.
    pub rpoly: Vec<Rational>,
}

impl RPolyClass {
    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn samples(&self) -> &[u64] {
        &self.samples
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &UniPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &TermKey) -> UniPoly {
        self.terms.get(&key.clone().canonical()).cloned().unwrap_or_else(UniPoly::zero)
    }

    /// Largest degree in `r` over all terms.
    pub fn max_degree(&self) -> Option<usize> {
        self.terms.values().filter_map(UniPoly::degree).max()
    }

    /// The `r^0` coefficient of every term.
    pub fn constant_term(&self) -> TautClass {
        let mut c = TautClass::zero(self.ambient);
        for (k, p) in &self.terms {
            c.add_term(k.clone(), p.coeff(0));
        }
        c
    }

    pub fn scale(&self, c: &Rational) -> RPolyClass {
        let terms = if c.is_zero() {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(k, p)| (k.clone(), p.scale(c))).collect()
        };
        RPolyClass { ambient: self.ambient, samples: self.samples.clone(), terms }
    }

    /// Terms of class degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> RPolyClass {
        let terms = self.terms.iter().filter(|(k, _)| k.degree() == d).map(|(k, p)| (k.clone(), p.clone())).collect();
        RPolyClass { ambient: self.ambient, samples: self.samples.clone(), terms }
    }

    pub fn eval(&self, r: u64) -> TautClass {
        let rq = Rational::from(r as i64);
        let mut c = TautClass::zero(self.ambient);
        for (k, p) in &self.terms {
            c.add_term(k.clone(), p.eval(&rq));
        }
        c
    }

    pub fn to_json(&self) -> Vec<RPolyTermJson> {
        self.terms
            .iter()
            .map(|(k, p)| RPolyTermJson { term: TermJson::new(k, p.coeff(0)), rpoly: p.coeffs().to_vec() })
            .collect()
    }
}

/// `2d + 1 + surplus` consecutive values of `r` starting at the working bound.
pub fn default_samples(data: &TopData, d: u32, config: &EngineConfig) -> Vec<u64> {
    let start = working_bound(data, config);
    (start..start + 2 * d as u64 + 1 + config.surplus_samples as u64).collect()
}

pub fn polynomial_class(data: &TopData, d: u32, r_samples: &[u64]) -> Result<RPolyClass> {
    polynomial_class_with(data, d, r_samples, 2)
}

/// Interpolates every term coefficient with degree bound `2d` and checks all
/// samples beyond the first `2d + 1`; at least `min_surplus` of them.
pub fn polynomial_class_with(data: &TopData, d: u32, r_samples: &[u64], min_surplus: usize) -> Result<RPolyClass> {
    data.validate()?;
    data.check_degree(d)?;
    let bound = 2 * d as usize;
    if r_samples.len() < bound + 1 + min_surplus {
        return Err(Error::InvalidInput(format!(
            "degree {d} needs at least {} r-samples, got {}",
            bound + 1 + min_surplus,
            r_samples.len()
        )));
    }
    let classes = r_samples
        .par_iter()
        .map(|&r| class_at_r(data, d, r))
        .collect::<Result<Vec<_>>>()?;
    let keys: BTreeSet<&TermKey> = classes.iter().flat_map(|c| c.terms().map(|(k, _)| k)).collect();
    let lookup: Vec<BTreeMap<&TermKey, &Rational>> =
        classes.iter().map(|c| c.terms().collect()).collect();
    let mut terms = BTreeMap::new();
    for key in keys {
        let samples: Vec<(i64, Rational)> = r_samples
            .iter()
            .zip(&lookup)
            .map(|(&r, l)| (r as i64, l.get(key).map(|c| (*c).clone()).unwrap_or_default()))
            .collect();
        let p = lagrange_interpolate(&samples, bound)?;
        if !p.is_zero() {
            terms.insert(key.clone(), p);
        }
    }
    Ok(RPolyClass { ambient: data.ambient(), samples: r_samples.to_vec(), terms })
}
