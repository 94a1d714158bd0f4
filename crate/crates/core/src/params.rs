use crate::error::{Result, SimError};

/// How cell coefficients are averaged onto faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceMean {
    #[default]
    Arithmetic,
    /// Better behaved when θ^β degenerates at cold spots.
    Harmonic,
}

impl FaceMean {
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            FaceMean::Arithmetic => 0.5 * (a + b),
            FaceMean::Harmonic => {
                let s = a + b;
                if s == 0.0 {
                    0.0
                } else {
                    2.0 * a * b / s
                }
            }
        }
    }
}

/// Physical and numerical constants of a run.
///
/// The default coefficients `nu = gas_r = c_v = kappa_tilde = 1` give the
/// normalized system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Interface thickness ε.
    pub epsilon: f64,
    /// Conductivity exponent β in κ(θ) = κ̃ θ^β.
    pub beta: f64,
    pub nu: f64,
    pub gas_r: f64,
    pub c_v: f64,
    pub kappa_tilde: f64,
    pub cfl: f64,
    pub t_final: f64,
    /// v or θ at or below this value aborts the run.
    pub positivity_floor: f64,
    pub face_mean: FaceMean,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            beta: 1.0,
            nu: 1.0,
            gas_r: 1.0,
            c_v: 1.0,
            kappa_tilde: 1.0,
            cfl: 0.4,
            t_final: 1.0,
            positivity_floor: 1e-10,
            face_mean: FaceMean::Arithmetic,
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(SimError::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        positive("epsilon", self.epsilon)?;
        positive("beta", self.beta)?;
        positive("nu", self.nu)?;
        positive("gas_r", self.gas_r)?;
        positive("c_v", self.c_v)?;
        positive("kappa_tilde", self.kappa_tilde)?;
        positive("positivity_floor", self.positivity_floor)?;
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(SimError::InvalidParameter {
                name: "cfl",
                reason: format!("must lie in (0, 1), got {}", self.cfl),
            });
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(SimError::InvalidParameter {
                name: "t_final",
                reason: format!("must be finite and >= 0, got {}", self.t_final),
            });
        }
        Ok(())
    }

    /// Adiabatic exponent γ = 1 + R/c_v.
    pub fn gamma(&self) -> f64 {
        1.0 + self.gas_r / self.c_v
    }

    /// κ(θ) = κ̃ θ^β.
    #[inline]
    pub fn conductivity(&self, theta: f64) -> f64 {
        self.kappa_tilde * theta.powf(self.beta)
    }
}
