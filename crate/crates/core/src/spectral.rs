//! Jacobi operators with letter-valued coefficients along the one-sided
//! word: transfer-matrix cocycles, Lyapunov estimates and finite sections.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::letters::{Alphabet, Letter};
use crate::words::Subshift;

/// Letter-indexed off-diagonal `p` (nonzero) and diagonal `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMap {
    p: Vec<BigRational>,
    q: Vec<BigRational>,
    pf: Vec<f64>,
    qf: Vec<f64>,
}

fn parse_number(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n.trim().parse().ok()?, d)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if whole.is_empty() && frac.is_empty() {
            return None;
        }
        let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
        BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32))
    } else {
        BigRational::from_integer(body.parse().ok()?)
    };
    Some(if neg { -value } else { value })
}

/// Parses `a=0,x=1,y=2,z=3` or `const=1` against `alphabet`. Later entries
/// override earlier ones, so `const=0,z=1` is allowed.
fn parse_table(text: &str, alphabet: &Alphabet, what: &str) -> Result<Vec<BigRational>> {
    let mut values: Vec<Option<BigRational>> = vec![None; alphabet.len()];
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{what}: expected letter=value, got `{item}`")))?;
        let value = parse_number(value)
            .ok_or_else(|| Error::Parse(format!("{what}: bad number in `{item}`")))?;
        let key = key.trim();
        if key == "const" {
            values.iter_mut().for_each(|v| *v = Some(value.clone()));
        } else {
            let letter = alphabet
                .lookup(key)
                .ok_or_else(|| Error::Parse(format!("{what}: unknown letter `{key}`")))?;
            values[letter.0 as usize] = Some(value);
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "{what}: no value for letter `{}`",
                    alphabet.name(Letter(i as u8))
                ))
            })
        })
        .collect()
}

impl CoefficientMap {
    pub fn new(p: Vec<BigRational>, q: Vec<BigRational>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::InvalidArgument(
                "p and q cover different alphabets".into(),
            ));
        }
        if p.iter().any(Zero::is_zero) {
            return Err(Error::InvalidArgument(
                "off-diagonal p must be nonzero".into(),
            ));
        }
        let to_f =
            |v: &Vec<BigRational>| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(CoefficientMap {
            pf: to_f(&p),
            qf: to_f(&q),
            p,
            q,
        })
    }

    pub fn parse(alphabet: &Alphabet, p: &str, q: &str) -> Result<Self> {
        Self::new(
            parse_table(p, alphabet, "p")?,
            parse_table(q, alphabet, "q")?,
        )
    }

    /// Schrödinger case `p = 1` with the given diagonal.
    pub fn schrodinger(q: &[f64]) -> Self {
        let exact = q
            .iter()
            .map(|&v| BigRational::from_float(v).expect("finite diagonal"))
            .collect();
        Self::new(vec![BigRational::from_integer(1.into()); q.len()], exact).expect("p is one")
    }

    pub fn p(&self, letter: u8) -> f64 {
        self.pf[letter as usize]
    }

    pub fn q(&self, letter: u8) -> f64 {
        self.qf[letter as usize]
    }

    pub fn p_exact(&self, letter: u8) -> &BigRational {
        &self.p[letter as usize]
    }

    pub fn q_exact(&self, letter: u8) -> &BigRational {
        &self.q[letter as usize]
    }

    /// `max |p|` and the range of `q`.
    pub fn bounds(&self) -> (f64, f64, f64) {
        let pmax = self.pf.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let qmin = self.qf.iter().copied().fold(f64::INFINITY, f64::min);
        let qmax = self.qf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (pmax, qmin, qmax)
    }

    /// A warning when every eventual letter carries the same `(p, q)`, in
    /// which case the coefficient sequence is eventually constant.
    pub fn degeneracy_warning(&self, sub: &Subshift) -> Option<String> {
        let ev: Vec<usize> = sub
            .coding()
            .eventual_alphabet()
            .iter()
            .map(|l| l.0 as usize)
            .collect();
        let first = ev[0];
        let same = ev
            .iter()
            .all(|&i| self.p[i] == self.p[first] && self.q[i] == self.q[first]);
        same.then(|| {
            "warning: all eventual letters share one (p, q) pair; the coefficient sequence is not aperiodic".to_string()
        })
    }
}

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Operator (spectral) norm.
pub fn norm(m: &Mat2) -> f64 {
    let [[a, b], [c, d]] = *m;
    let s = a * a + b * b + c * c + d * d;
    let dt = a * d - b * c;
    let disc = (s * s - 4.0 * dt * dt).max(0.0).sqrt();
    ((s + disc) / 2.0).sqrt()
}

/// The transfer matrix at a position whose next two letters are `b1, b2`.
pub fn transfer_matrix(coeff: &CoefficientMap, energy: f64, b1: u8, b2: u8) -> Mat2 {
    let p2 = coeff.p(b2);
    [[(energy - coeff.q(b1)) / p2, -coeff.p(b1) / p2], [1.0, 0.0]]
}

pub type ExactMat2 = [[BigRational; 2]; 2];

pub fn transfer_matrix_exact(
    coeff: &CoefficientMap,
    energy: &BigRational,
    b1: u8,
    b2: u8,
) -> ExactMat2 {
    let p2 = coeff.p_exact(b2);
    [
        [(energy - coeff.q_exact(b1)) / p2, -coeff.p_exact(b1) / p2],
        [BigRational::from_integer(1.into()), BigRational::zero()],
    ]
}

pub fn det_exact(m: &ExactMat2) -> BigRational {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

/// `M(S^{n-1} w) ... M(w)` with `w` the word shifted by `start`.
pub fn cocycle_from(
    sub: &Subshift,
    coeff: &CoefficientMap,
    energy: f64,
    start: usize,
    n: usize,
) -> Result<Mat2> {
    if n == 0 {
        return Ok(IDENTITY);
    }
    let word = sub.word_prefix(start + n + 2)?;
    Ok(word[start..].windows(3).take(n).fold(IDENTITY, |acc, w| {
        mul(&transfer_matrix(coeff, energy, w[1], w[2]), &acc)
    }))
}

pub fn transfer_cocycle(
    sub: &Subshift,
    coeff: &CoefficientMap,
    energy: f64,
    n: usize,
) -> Result<Mat2> {
    cocycle_from(sub, coeff, energy, 0, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    pub n: usize,
    pub value: f64,
    /// `(m, (1/m) ln ||M(m)||)` at `m = n/4, n/2, n`.
    pub samples: Vec<(usize, f64)>,
}

const RENORMALIZE_EVERY: usize = 32;

/// `(1/n) ln ||M(n)||`, factoring the norm out of the running product
/// every few steps.
pub fn lyapunov_estimate(
    sub: &Subshift,
    coeff: &CoefficientMap,
    energy: f64,
    n: usize,
) -> Result<LyapunovEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("lyapunov needs n >= 1".into()));
    }
    let word = sub.word_prefix(n + 2)?;
    let marks = [(n / 4).max(1), (n / 2).max(1), n];
    let mut samples = Vec::with_capacity(3);
    let mut acc = IDENTITY;
    let mut log_scale = 0.0;
    for (step, w) in word.windows(3).take(n).enumerate() {
        acc = mul(&transfer_matrix(coeff, energy, w[1], w[2]), &acc);
        let done = step + 1;
        if done % RENORMALIZE_EVERY == 0 {
            let s = norm(&acc);
            log_scale += s.ln();
            acc.iter_mut().flatten().for_each(|x| *x /= s);
        }
        for &m in &marks {
            if m == done && samples.last().map(|&(k, _)| k) != Some(m) {
                samples.push((m, (log_scale + norm(&acc).ln()) / m as f64));
            }
        }
    }
    if !samples.iter().all(|(_, v)| v.is_finite()) {
        return Err(Error::Overflow(format!("cocycle norm at energy {energy}")));
    }
    Ok(LyapunovEstimate {
        energy,
        n,
        value: samples.last().expect("n >= 1").1,
        samples,
    })
}

/// Estimates on `steps` evenly spaced energies in `[lo, hi]`.
pub fn lyapunov_grid(
    sub: &Subshift,
    coeff: &CoefficientMap,
    lo: f64,
    hi: f64,
    steps: usize,
    n: usize,
) -> Result<Vec<LyapunovEstimate>> {
    // Materialize the word once so workers only read the cache.
    sub.word_prefix(n + 2)?;
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let e = if steps == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            };
            lyapunov_estimate(sub, coeff, e, n)
        })
        .collect()
}

/// Diagonal and off-diagonal of the section on positions `0..size`:
/// `J[k][k] = q(w_k)` and `J[k][k+1] = p(w_{k+1})`.
pub fn finite_section(
    sub: &Subshift,
    coeff: &CoefficientMap,
    size: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let word = sub.word_prefix(size)?;
    let diag = word.iter().map(|&b| coeff.q(b)).collect();
    let off = word.iter().skip(1).map(|&b| coeff.p(b)).collect();
    Ok((diag, off))
}

/// Number of eigenvalues below `x` (Sturm sequence of the `LDL^T` pivots).
pub fn count_below(diag: &[f64], off_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut pivot = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off_sq[i - 1] / pivot };
        pivot = d - x - coupling;
        if pivot == 0.0 {
            pivot = -f64::EPSILON * (d.abs() + x.abs() + 1.0);
        }
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a symmetric tridiagonal matrix, ascending, by bisection.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    let off_sq: Vec<f64> = off.iter().map(|v| v * v).collect();
    // Gershgorin interval.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + off.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = 1e-9 * (hi - lo).abs().max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    (0..n)
        .into_par_iter()
        .map(|j| {
            // Smallest x with more than j eigenvalues below it.
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(diag, &off_sq, mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumApproximation {
    pub size: usize,
    pub eigenvalues: Vec<f64>,
    pub delta: f64,
    pub cover: Vec<(f64, f64)>,
    pub cover_length: f64,
}

/// Union of `[e - delta, e + delta]` over sorted `eigenvalues`.
pub fn cover(eigenvalues: &[f64], delta: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &e in eigenvalues {
        match out.last_mut() {
            Some(last) if e - delta <= last.1 => last.1 = last.1.max(e + delta),
            _ => out.push((e - delta, e + delta)),
        }
    }
    out
}

pub fn cover_length(intervals: &[(f64, f64)]) -> f64 {
    intervals.iter().map(|(a, b)| b - a).sum()
}

pub fn finite_section_spectrum(
    sub: &Subshift,
    coeff: &CoefficientMap,
    size: usize,
    delta: f64,
) -> Result<SpectrumApproximation> {
    if size < 2 {
        return Err(Error::InvalidArgument(format!(
            "section size {size} is below 2"
        )));
    }
    let (diag, off) = finite_section(sub, coeff, size)?;
    let eigenvalues = tridiagonal_eigenvalues(&diag, &off);
    let cover = cover(&eigenvalues, delta);
    Ok(SpectrumApproximation {
        size,
        delta,
        cover_length: cover_length(&cover),
        cover,
        eigenvalues,
    })
}
