use crate::error::{Error, Result};

use super::{Rational, UniPoly};

/// Exact Lagrange interpolation.
///
/// Fits the unique polynomial of degree `<= degree_bound` through the first
/// `degree_bound + 1` samples and checks every remaining sample against it.
/// A disagreeing surplus sample yields [`Error::NotPolynomial`].
pub fn lagrange_interpolate(samples: &[(i64, Rational)], degree_bound: usize) -> Result<UniPoly> {
    let need = degree_bound + 1;
    if samples.len() < need {
        return Err(Error::InvalidInput(format!(
            "interpolation needs {need} samples, got {}",
            samples.len()
        )));
    }
    for (i, (ri, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(rj, _)| rj == ri) {
            return Err(Error::InvalidInput(format!("repeated sample point r = {ri}")));
        }
    }
    let (fit, surplus) = samples.split_at(need);

    // Newton divided differences, then expand the Newton form.
    let xs: Vec<Rational> = fit.iter().map(|(r, _)| Rational::from(*r)).collect();
    let mut table: Vec<Rational> = fit.iter().map(|(_, v)| v.clone()).collect();
    for level in 1..need {
        for i in (level..need).rev() {
            table[i] = (&table[i] - &table[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut poly = UniPoly::zero();
    for i in (0..need).rev() {
        let factor = UniPoly::from_coeffs(vec![-&xs[i], Rational::one()]);
        poly = &(&poly * &factor) + &UniPoly::constant(table[i].clone());
    }

    for (r, v) in surplus {
        if poly.eval(&Rational::from(*r)) != *v {
            return Err(Error::NotPolynomial { r: *r });
        }
    }
    Ok(poly)
}
