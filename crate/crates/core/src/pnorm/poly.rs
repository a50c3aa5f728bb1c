use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::superop::SuperOperator;

pub const MAX_DEGREE: usize = 32;
const CIRCLE_SAMPLES: usize = 1 << 14;

/// Polynomial a_0 + a_1 z + … with complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl TryFrom<Vec<C64>> for Polynomial {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        Polynomial::new(v)
    }
}

impl From<Polynomial> for Vec<C64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid("non-finite polynomial coefficient".into()));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::Invalid(format!("degree {} exceeds {MAX_DEGREE}", coeffs.len() - 1)));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial { coeffs: vec![ZERO] };
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
        Polynomial { coeffs }
    }

    /// P(X) for a square matrix, by Horner.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() {
            return Err(Error::NotSquare(x.cols(), x.rows()));
        }
        let n = x.rows();
        let mut acc = ComplexMatrix::zeros(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.matmul(x);
            acc.axpy(c, &ComplexMatrix::identity(n));
        }
        Ok(acc)
    }

    /// P(T) = Σ a_k T^k for a map M_n → M_n.
    pub fn apply_map(&self, t: &SuperOperator) -> Result<SuperOperator> {
        if !t.is_square() {
            return Err(Error::NotSquare(t.in_dim(), t.out_dim()));
        }
        let n = t.in_dim();
        let mut acc = SuperOperator::zero(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.compose(t)?.add(&SuperOperator::identity(n).scale(c))?;
        }
        Ok(acc)
    }

    /// sup_{|z|=1} |P(z)|: dense sampling, then Newton steps on d|P(e^{iθ})|²/dθ
    /// from the best few samples.
    pub fn sup_on_circle(&self) -> f64 {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let at = |theta: f64| C64::from_polar(1.0, theta);
        let mut samples: Vec<(f64, f64)> = (0..CIRCLE_SAMPLES)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / CIRCLE_SAMPLES as f64;
                (self.eval(at(theta)).norm(), theta)
            })
            .collect();
        samples.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
        let mut best = samples[0].0;
        for &(_, theta0) in samples.iter().take(8) {
            let mut theta = theta0;
            for _ in 0..20 {
                let z = at(theta);
                let g = self.eval(z);
                let g1 = C64::new(0.0, 1.0) * z * d1.eval(z);
                let g2 = -z * d1.eval(z) - z * z * d2.eval(z);
                let f1 = 2.0 * (g.conj() * g1).re;
                let f2 = 2.0 * (g1.norm_sqr() + (g.conj() * g2).re);
                if f2 >= 0.0 {
                    break;
                }
                let step = f1 / f2;
                theta -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            best = best.max(self.eval(at(theta)).norm());
        }
        best
    }
}
