//! Independent reference implementations in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Least-squares polynomial coefficients in `(t - t0) / (t1 - t0)`, solved
/// exactly from the normal equations by Gaussian elimination.
pub fn poly_normal_equations(points: &[(f64, f64)], degree: usize, domain: (f64, f64)) -> Vec<f64> {
    let n = degree + 1;
    let (t0, t1) = (q(domain.0), q(domain.1));
    let span = &t1 - &t0;
    let xs: Vec<BigRational> = points.iter().map(|p| (q(p.0) - &t0) / &span).collect();
    let ys: Vec<BigRational> = points.iter().map(|p| q(p.1)).collect();

    // Power sums.
    let mut powers: Vec<Vec<BigRational>> = Vec::with_capacity(xs.len());
    for x in &xs {
        let mut row = vec![BigRational::from_integer(BigInt::from(1))];
        for k in 1..2 * n {
            let next = &row[k - 1] * x;
            row.push(next);
        }
        powers.push(row);
    }
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n)
                .map(|j| powers.iter().fold(BigRational::zero(), |acc, p| acc + &p[i + j]))
                .collect();
            row.push(
                powers
                    .iter()
                    .zip(&ys)
                    .fold(BigRational::zero(), |acc, (p, y)| acc + &p[i] * y),
            );
            row
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .expect("non-singular system");
        m.swap(col, pivot);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                let pivot_row = m[col].clone();
                for (dst, src) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                    *dst -= &f * src;
                }
            }
        }
    }
    (0..n)
        .map(|i| (&m[i][n] / &m[i][i]).to_f64().unwrap())
        .collect()
}

/// Exact arithmetic mean, converted once at the end.
pub fn mean(v: &[f64]) -> f64 {
    let s = v.iter().fold(BigRational::zero(), |acc, x| acc + q(*x));
    (s / BigRational::from_integer(BigInt::from(v.len()))).to_f64().unwrap()
}

/// Exact sum of |a - b| / ((a + b) / 2) over adjacent pairs, times 100/(n-1).
/// Accumulated as an unreduced fraction; only the final quotient is rounded.
pub fn npvi(v: &[f64]) -> f64 {
    let mut num = BigInt::zero();
    let mut den = BigInt::from(1);
    for w in v.windows(2) {
        let (a, b) = (q(w[0]), q(w[1]));
        // 2|a - b| / (a + b) as an integer fraction.
        let t = (&a - &b).abs() * BigInt::from(2) / (&a + &b);
        num = num * t.denom() + t.numer() * &den;
        den *= t.denom();
    }
    let r = BigRational::new(num * BigInt::from(100), den * BigInt::from(v.len() - 1));
    r.to_f64().unwrap()
}

/// Exact mean |a - b| over adjacent pairs.
pub fn rpvi(v: &[f64]) -> f64 {
    let s = v
        .windows(2)
        .fold(BigRational::zero(), |acc, w| acc + (q(w[0]) - q(w[1])).abs());
    (s / BigRational::from_integer(BigInt::from(v.len() - 1)))
        .to_f64()
        .unwrap()
}

/// Exact sum of squared deviations from the mean.
pub fn sum_sq_dev(v: &[f64]) -> f64 {
    let n = BigRational::from_integer(BigInt::from(v.len()));
    let m = v.iter().fold(BigRational::zero(), |acc, x| acc + q(*x)) / n;
    v.iter()
        .fold(BigRational::zero(), |acc, x| {
            let d = q(*x) - &m;
            acc + &d * &d
        })
        .to_f64()
        .unwrap()
}
