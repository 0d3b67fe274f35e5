//! Exact rational evaluation of the RL cell moments.
//!
//! Every moment is a rational with denominator dividing `D = F_4(n) F_2(n)`,
//! `F_k(n) = n (n-1) ... (n-k+1)`. Numerators are kept as integers and only
//! the final quotient is taken in floating point, so moments that are equal
//! as rationals (such as `Var[N_11]` and `Var[N_12]` with two classes) are
//! equal as floats.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::spatial::PairCounts;

/// Covariance numerators over a shared denominator.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExactCovariance {
    pub numerators: DMatrix<BigInt>,
    pub denominator: BigInt,
}

fn falling(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, t| acc * BigInt::from(n as i64 - t as i64))
}

/// Numerator of the probability that distinct points carry `classes`, over
/// `F_len(n)`.
fn pattern_numerator(sizes: &[usize], classes: &[usize]) -> BigInt {
    let mut seen = vec![0i64; sizes.len()];
    let mut num = BigInt::from(1);
    for &c in classes {
        let avail = sizes[c] as i64 - seen[c];
        if avail <= 0 {
            return BigInt::zero();
        }
        num *= avail;
        seen[c] += 1;
    }
    num
}

pub(crate) fn ratio(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    num.to_f64().expect("finite numerator") / den.to_f64().expect("finite denominator")
}

/// Cell means and covariances under RL; `n >= 4` so that `D > 0`.
pub(crate) fn exact_cell_moments(sizes: &[usize], pairs: PairCounts) -> (Vec<f64>, DMatrix<f64>, ExactCovariance) {
    let m = sizes.len();
    let cells = m * m;
    let n = pairs.n;
    let (bn, br, bq) = (BigInt::from(n), BigInt::from(pairs.r), BigInt::from(pairs.q));
    let f2 = falling(n, 2);
    let f3 = falling(n, 3);
    let f4 = falling(n, 4);
    let den = &f4 * &f2;
    // multipliers taking each probability's denominator to `den`
    let to2 = &den / &f2;
    let to3 = &den / &f3;
    let to4 = f2.clone();
    let to22 = BigInt::from((n - 2) * (n - 3));
    let disjoint = &bn * &bn - BigInt::from(3) * &bn - &bq + &br;
    let n_minus_r = &bn - &br;

    let a2: Vec<BigInt> = (0..cells).map(|a| pattern_numerator(sizes, &[a / m, a % m])).collect();
    let expected: Vec<f64> = a2.iter().map(|x| ratio(&(x * &bn), &f2)).collect();

    let mut numerators = DMatrix::<BigInt>::from_element(cells, cells, BigInt::zero());
    let mut cov = DMatrix::<f64>::zeros(cells, cells);
    for a in 0..cells {
        let (i, j) = (a / m, a % m);
        for b in a..cells {
            let (k, l) = (b / m, b % m);
            let mut v = BigInt::zero();
            if i == k && j == l {
                v += &bn * &a2[a] * &to2;
            }
            if i == l && j == k {
                v += &br * &a2[a] * &to2;
            }
            if j == l {
                v += &bq * pattern_numerator(sizes, &[i, k, j]) * &to3;
            }
            if j == k {
                v += &n_minus_r * pattern_numerator(sizes, &[i, j, l]) * &to3;
            }
            if i == l {
                v += &n_minus_r * pattern_numerator(sizes, &[k, i, j]) * &to3;
            }
            v += &disjoint * pattern_numerator(sizes, &[i, j, k, l]) * &to4;
            v -= &bn * &bn * &a2[a] * &a2[b] * &to22;
            cov[(a, b)] = ratio(&v, &den);
            cov[(b, a)] = cov[(a, b)];
            numerators[(b, a)] = v.clone();
            numerators[(a, b)] = v;
        }
    }
    (
        expected,
        cov,
        ExactCovariance {
            numerators,
            denominator: den,
        },
    )
}

/// `A Sigma A^T` for an integer matrix `A` scaled by `1 / scale`.
pub(crate) fn congruence(exact: &ExactCovariance, a: &DMatrix<BigInt>, scale: &BigInt) -> DMatrix<f64> {
    let d = a.nrows();
    let s = &exact.numerators;
    let inner = s.ncols();
    // A S, then (A S) A^T
    let mut left = DMatrix::<BigInt>::from_element(d, inner, BigInt::zero());
    for r in 0..d {
        for c in 0..inner {
            let mut acc = BigInt::zero();
            for t in 0..inner {
                if !a[(r, t)].is_zero() && !s[(t, c)].is_zero() {
                    acc += &a[(r, t)] * &s[(t, c)];
                }
            }
            left[(r, c)] = acc;
        }
    }
    let den = &exact.denominator * scale * scale;
    let mut out = DMatrix::<f64>::zeros(d, d);
    for r in 0..d {
        for c in r..d {
            let mut acc = BigInt::zero();
            for t in 0..inner {
                if !a[(c, t)].is_zero() && !left[(r, t)].is_zero() {
                    acc += &left[(r, t)] * &a[(c, t)];
                }
            }
            out[(r, c)] = ratio(&acc, &den);
            out[(c, r)] = out[(r, c)];
        }
    }
    out
}

/// `c2 p2 + c3 p3 + c4 p4 - c22 p2^2` for `n_cases` cases among `n` points,
/// with `p_r` the probability that `r` given distinct points are all cases.
pub(crate) fn case_pattern_sum(n: usize, n_cases: usize, c2: i128, c3: i128, c4: i128, c22: i128) -> f64 {
    let sizes = [n_cases, n - n_cases];
    if n < 4 {
        // no four distinct points, so c4 = 0 and p4 never enters
        let p = |r: usize| ratio(&pattern_numerator(&sizes, &vec![0; r]), &falling(n, r));
        return c2 as f64 * p(2) + c3 as f64 * p(3) - c22 as f64 * p(2) * p(2);
    }
    let f2 = falling(n, 2);
    let f3 = falling(n, 3);
    let f4 = falling(n, 4);
    let den = &f4 * &f2;
    let a2 = pattern_numerator(&sizes, &[0, 0]);
    let v = BigInt::from(c2) * &a2 * (&den / &f2)
        + BigInt::from(c3) * pattern_numerator(&sizes, &[0, 0, 0]) * (&den / &f3)
        + BigInt::from(c4) * pattern_numerator(&sizes, &[0, 0, 0, 0]) * &f2
        - BigInt::from(c22) * &a2 * &a2 * BigInt::from((n - 2) * (n - 3));
    ratio(&v, &den)
}
