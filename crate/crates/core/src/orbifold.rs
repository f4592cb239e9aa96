//! Sectors and characters of the cyclic gerbe `B Z_m`, ages, and lifts of
//! sectors to the `r`-th root gerbe.
//!
//! For a cyclic group twisted sectors and conjugacy classes coincide and the
//! inverse of a sector `g` is `-g mod m`. A character is `rho(g) =
//! exp(2 pi i g s / m)`; its age at `g` is `frac(g s / m)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational_mod, Rational};

/// Character `rho(g) = exp(2 pi i g s / m)` of `Z_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleRep {
    pub m: u32,
    pub s: u32,
}

/// Element of `Z_m`, `0 <= g < m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sector(pub u32);

impl Sector {
    pub fn inverse(self, m: u32) -> Sector {
        Sector((m - self.0 % m) % m)
    }
}

impl BundleRep {
    pub fn new(m: u32, s: u32) -> Result<Self> {
        let rep = BundleRep { m, s };
        rep.validate()?;
        Ok(rep)
    }

    /// Smooth point target.
    pub fn trivial() -> Self {
        BundleRep { m: 1, s: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidInput("group order m must be positive".into()));
        }
        if self.s >= self.m {
            return Err(Error::InvalidInput(format!(
                "character exponent s = {} must lie in [0, {})",
                self.s, self.m
            )));
        }
        Ok(())
    }

    pub fn check_sector(&self, sec: Sector) -> Result<()> {
        if sec.0 >= self.m {
            return Err(Error::InvalidInput(format!("sector {} outside Z_{}", sec.0, self.m)));
        }
        Ok(())
    }

    /// The dual character `rho_bar = rho^{-1}`.
    pub fn dual(&self) -> BundleRep {
        BundleRep { m: self.m, s: (self.m - self.s) % self.m }
    }
}

/// `age_g(L) = frac(g s / m)`.
pub fn age(rep: BundleRep, sec: Sector) -> Rational {
    let num = (sec.0 as u64 * rep.s as u64) % rep.m as u64;
    Rational::new(num as i64, rep.m as i64)
}

/// `frac(a) == age(rep, sec)`.
pub fn admissible(rep: BundleRep, sec: Sector, a: &Rational) -> bool {
    a.fract_pos() == age(rep, sec)
}

fn require_admissible(rep: BundleRep, sec: Sector, a: &Rational) -> Result<()> {
    if admissible(rep, sec, a) {
        Ok(())
    } else {
        Err(Error::NotAdmissible { sector: sec.0, a: a.clone(), age: age(rep, sec) })
    }
}

/// A sector of the root gerbe: the base sector together with a rational lift
/// `a`, standing for the root of unity `exp(2 pi i a / r)`.
///
/// Two lifts are equal when their bases agree and `[a]_r` agrees.
#[derive(Debug, Clone)]
pub struct LiftedSector {
    pub base: Sector,
    pub a: Rational,
    pub r: u64,
}

impl LiftedSector {
    /// `[a]_r / r`.
    pub fn age(&self) -> Rational {
        rational_mod(&self.a, self.r) / Rational::from(self.r as i64)
    }

    pub fn residue(&self) -> Rational {
        rational_mod(&self.a, self.r)
    }
}

impl PartialEq for LiftedSector {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.r == other.r && self.residue() == other.residue()
    }
}

impl Eq for LiftedSector {}

pub fn lift(rep: BundleRep, sec: Sector, a: &Rational, r: u64) -> Result<LiftedSector> {
    require_admissible(rep, sec, a)?;
    if r == 0 {
        return Err(Error::InvalidInput("root order r must be positive".into()));
    }
    Ok(LiftedSector { base: sec, a: a.clone(), r })
}

/// Fixed weight of a leg carrying the lift `a`: `floor([a]_r)`.
pub fn leg_weight(rep: BundleRep, sec: Sector, a: &Rational, r: u64) -> Result<u64> {
    let l = lift(rep, sec, a, r)?;
    let w = l.residue().floor();
    Ok(u64::try_from(w).expect("residue is in [0, r)"))
}
