//! Real trigonometric polynomials
//! `V(theta) = a_0 + sum_{k=1}^N (a_k cos 2 pi k theta + b_k sin 2 pi k theta)`.
//!
//! The complex coefficients are `V^(0) = a_0`, `V^(k) = (a_k - i b_k)/2` and
//! `V^(-k) = conj V^(k)`, so real values are structural.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    #[serde(rename = "N")]
    degree: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPoly {
    /// `cos = [a_0..a_N]`, `sin = [b_1..b_N]`.
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.is_empty() || sin.len() + 1 != cos.len() {
            return Err(Error::Config(format!(
                "trigonometric polynomial needs N+1 cosine and N sine coefficients, got {} and {}",
                cos.len(),
                sin.len()
            )));
        }
        Ok(TrigPoly {
            degree: sin.len(),
            cos,
            sin,
        })
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly {
            degree: 0,
            cos: vec![c],
            sin: Vec::new(),
        }
    }

    /// From `V^(0..=N)`; `V^(0)` must be real.
    pub fn from_hats(hats: &[Complex64]) -> Result<Self> {
        let Some(h0) = hats.first() else {
            return Err(Error::Config("empty coefficient list".into()));
        };
        let cos = std::iter::once(h0.re)
            .chain(hats[1..].iter().map(|h| 2.0 * h.re))
            .collect();
        let sin = hats[1..].iter().map(|h| -2.0 * h.im).collect();
        TrigPoly::new(cos, sin)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cos(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin(&self) -> &[f64] {
        &self.sin
    }

    /// `V^(0)`, the mean over a period.
    pub fn mean(&self) -> f64 {
        self.cos[0]
    }

    pub fn hat(&self, k: i64) -> Complex64 {
        let a = k.unsigned_abs() as usize;
        if a > self.degree {
            return Complex64::new(0.0, 0.0);
        }
        if a == 0 {
            return Complex64::new(self.cos[0], 0.0);
        }
        let h = Complex64::new(self.cos[a] / 2.0, -self.sin[a - 1] / 2.0);
        if k > 0 {
            h
        } else {
            h.conj()
        }
    }

    /// `V(theta)` using powers of `e(theta)`.
    pub fn eval(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(1.0, TAU * theta);
        let mut w = z;
        let mut s = self.cos[0];
        for k in 1..=self.degree {
            s += self.cos[k] * w.re + self.sin[k - 1] * w.im;
            w *= z;
        }
        s
    }

    /// `V(theta)` with one `cos`/`sin` call per frequency.
    pub fn eval_direct(&self, theta: f64) -> f64 {
        let mut s = self.cos[0];
        for k in 1..=self.degree {
            let x = TAU * k as f64 * theta;
            s += self.cos[k] * x.cos() + self.sin[k - 1] * x.sin();
        }
        s
    }

    /// `V(theta)` as `sum_k V^(k) e(k theta)`.
    pub fn eval_fourier(&self, theta: f64) -> f64 {
        let n = self.degree as i64;
        (-n..=n)
            .map(|k| self.hat(k) * Complex64::from_polar(1.0, TAU * k as f64 * theta))
            .sum::<Complex64>()
            .re
    }

    fn hats(&self) -> Vec<Complex64> {
        (0..=self.degree as i64).map(|k| self.hat(k)).collect()
    }

    /// `theta -> V(theta - c)`.
    pub fn shift(&self, c: f64) -> Self {
        let hats: Vec<Complex64> = self
            .hats()
            .into_iter()
            .enumerate()
            .map(|(k, h)| h * Complex64::from_polar(1.0, -TAU * k as f64 * c))
            .collect();
        TrigPoly::from_hats(&hats).expect("nonempty")
    }

    /// `theta -> V(-theta)`.
    pub fn reflect(&self) -> Self {
        TrigPoly {
            degree: self.degree,
            cos: self.cos.clone(),
            sin: self.sin.iter().map(|b| -b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        TrigPoly {
            degree: self.degree,
            cos: self.cos.iter().map(|a| a * s).collect(),
            sin: self.sin.iter().map(|b| b * s).collect(),
        }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut p = self.clone();
        p.cos[0] += c;
        p
    }

    pub fn add(&self, other: &TrigPoly) -> Self {
        let n = self.degree.max(other.degree);
        let cos = (0..=n)
            .map(|k| self.cos.get(k).unwrap_or(&0.0) + other.cos.get(k).unwrap_or(&0.0))
            .collect();
        let sin = (0..n)
            .map(|k| self.sin.get(k).unwrap_or(&0.0) + other.sin.get(k).unwrap_or(&0.0))
            .collect();
        TrigPoly::new(cos, sin).expect("consistent lengths")
    }

    /// Largest `|b_k|`; zero for a cosine polynomial.
    pub fn odd_part_norm(&self) -> f64 {
        self.sin.iter().fold(0.0, |m, b| m.max(b.abs()))
    }

    /// Coefficient table `k,cos,sin` with `sin` empty at `k = 0`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,cos,sin\n");
        s.push_str(&format!("0,{:e},\n", self.cos[0]));
        for k in 1..=self.degree {
            s.push_str(&format!("{k},{:e},{:e}\n", self.cos[k], self.sin[k - 1]));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TrigPoly {
        TrigPoly::new(vec![0.3, -1.0, 0.25, 0.125], vec![0.5, -0.75, 0.2]).unwrap()
    }

    #[test]
    fn evaluation_routes_agree() {
        let p = sample();
        for i in 0..50 {
            let t = i as f64 / 37.0 - 0.4;
            let v = p.eval(t);
            assert!((v - p.eval_direct(t)).abs() < 1e-12);
            assert!((v - p.eval_fourier(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_and_reflect() {
        let p = sample();
        let s = p.shift(0.17);
        let r = p.reflect();
        for i in 0..20 {
            let t = i as f64 / 20.0;
            assert!((s.eval(t) - p.eval(t - 0.17)).abs() < 1e-12);
            assert!((r.eval(t) - p.eval(-t)).abs() < 1e-12);
        }
    }

    #[test]
    fn serializes_as_n_cos_sin() {
        let p = TrigPoly::new(vec![1.0, 0.5], vec![0.25]).unwrap();
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"N":1,"cos":[1.0,0.5],"sin":[0.25]}"#);
        let back: TrigPoly = serde_json::from_str(&j).unwrap();
        assert_eq!(back, p);
        assert!(TrigPoly::new(vec![1.0], vec![0.5]).is_err());
    }

    #[test]
    fn hats_are_conjugate_symmetric() {
        let p = sample();
        for k in 1..=3 {
            assert_eq!(p.hat(-k), p.hat(k).conj());
        }
        assert_eq!(p.hat(4), Complex64::new(0.0, 0.0));
        assert_eq!(TrigPoly::from_hats(&p.hats()).unwrap(), p);
    }
}
