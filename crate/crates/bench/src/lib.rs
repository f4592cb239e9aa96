//! Fixtures shared by the benchmarks.

use orbidr_core::{Branch, BundleRep, DRProblem, Rational, Sector, TopData};

fn contacts(sector: u32, values: &[&str]) -> Vec<(Sector, Rational)> {
    values.iter().map(|v| (Sector(sector), v.parse().unwrap())).collect()
}

/// Genus 1 with a `B Z_3` target and three legs.
pub fn genus_one_m3() -> DRProblem {
    DRProblem {
        g: 1,
        rep: BundleRep { m: 3, s: 1 },
        absolute: vec![],
        mu0: contacts(1, &["1/3", "1/3"]),
        mu_inf: contacts(1, &["2/3"]),
    }
}

/// Genus 2 with a `B Z_3` target, the largest case in the acceptance matrix.
pub fn genus_two_m3() -> DRProblem {
    DRProblem {
        g: 2,
        rep: BundleRep { m: 3, s: 1 },
        absolute: vec![],
        mu0: contacts(1, &["1/3", "1/3"]),
        mu_inf: contacts(1, &["2/3"]),
    }
}

/// Genus 2 with a trivial target and two contact points.
pub fn genus_two_smooth() -> DRProblem {
    DRProblem {
        g: 2,
        rep: BundleRep::trivial(),
        absolute: vec![],
        mu0: contacts(0, &["3"]),
        mu_inf: contacts(0, &["3"]),
    }
}

pub fn top_data(p: &DRProblem) -> TopData {
    p.top_data(Branch::Zero).expect("fixture problems are valid")
}
