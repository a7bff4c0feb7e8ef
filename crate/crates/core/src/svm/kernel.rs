use serde::{Deserialize, Serialize};

use super::SvmError;

/// Kernel function and its shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// x·y
    Dot,
    /// (x·y + 1)^degree
    Polynomial { degree: u32 },
    /// exp(−γ‖x−y‖²)
    Radial { gamma: f64 },
    /// (Σᵢ exp(−γ(xᵢ−yᵢ)²))^degree
    Anova { gamma: f64, degree: u32 },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Anova {
            gamma: 2.0,
            degree: 5,
        }
    }
}

impl KernelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Dot => "dot",
            KernelSpec::Polynomial { .. } => "polynomial",
            KernelSpec::Radial { .. } => "radial",
            KernelSpec::Anova { .. } => "anova",
        }
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        let bad = |m: String| Err(SvmError::InvalidConfig(m));
        match *self {
            KernelSpec::Dot => Ok(()),
            KernelSpec::Polynomial { degree } if degree == 0 => bad("polynomial degree must be >= 1".into()),
            KernelSpec::Radial { gamma } | KernelSpec::Anova { gamma, .. } if !(gamma > 0.0 && gamma.is_finite()) => {
                bad(format!("gamma must be positive, got {gamma}"))
            }
            KernelSpec::Anova { degree, .. } if degree == 0 => bad("anova degree must be >= 1".into()),
            _ => Ok(()),
        }
    }

    /// Kernel value; errors on length mismatch or empty inputs.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64, SvmError> {
        if x.len() != y.len() || x.is_empty() {
            return Err(SvmError::Dimension {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Dot => dot(x, y),
            KernelSpec::Polynomial { degree } => (dot(x, y) + 1.0).powi(degree as i32),
            KernelSpec::Radial { gamma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
            KernelSpec::Anova { gamma, degree } => {
                let s: f64 = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (-gamma * (a - b) * (a - b)).exp())
                    .sum();
                s.powi(degree as i32)
            }
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
