use crate::error::{Result, SolverError};

/// Coefficients of the dispersive equation
/// `u_t + alpha u_x + beta u u_x - gamma G u_xx - delta u_xxx = 0`.
///
/// `delta = 0` selects the Benjamin-Ono limit, `gamma = 0` the KdV limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl EquationParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    /// Benjamin-Ono limit: no third-derivative term.
    pub fn is_bo(&self) -> bool {
        self.delta == 0.0 && self.gamma != 0.0
    }

    /// KdV limit: no nonlocal term.
    pub fn is_kdv(&self) -> bool {
        self.gamma == 0.0 && self.delta != 0.0
    }

    /// The literature's normalized dispersion ratio
    /// `gamma / (2 sqrt(delta (alpha - c_s)))`, used to label runs.
    pub fn gamma_tilde(&self, c_s: f64) -> Result<f64> {
        if self.alpha - c_s <= 0.0 {
            return Err(SolverError::Domain(format!(
                "gamma_tilde requires alpha - c_s > 0, got {}",
                self.alpha - c_s
            )));
        }
        if self.delta <= 0.0 {
            return Err(SolverError::Domain(format!(
                "gamma_tilde requires delta > 0, got {}",
                self.delta
            )));
        }
        Ok(self.gamma / (2.0 * (self.delta * (self.alpha - c_s)).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_flags() {
        let bo = EquationParams::new(0.0, 1.0, 1.0, 0.0);
        assert!(bo.is_bo());
        assert!(!bo.is_kdv());
        let kdv = EquationParams::new(1.0, 1.0, 0.0, 1.0);
        assert!(kdv.is_kdv());
        assert!(!kdv.is_bo());
    }

    #[test]
    fn gamma_tilde_zero_gamma() {
        let p = EquationParams::new(1.0, 1.0, 0.0, 1.0);
        assert_eq!(p.gamma_tilde(0.5).unwrap(), 0.0);
    }

    #[test]
    fn gamma_tilde_direct_formula() {
        // alpha=1, delta=1, c_s=0.75, gamma=1 -> 1/(2 sqrt(0.25)) = 1
        let p = EquationParams::new(1.0, 1.0, 1.0, 1.0);
        assert!((p.gamma_tilde(0.75).unwrap() - 1.0).abs() < 1e-15);

        // alpha=1, delta=1, c_s=0.45, gamma=0.5 -> 0.5/(2 sqrt(0.55))
        let p = EquationParams::new(1.0, 1.0, 0.5, 1.0);
        let expected = 0.5 / (2.0 * 0.55f64.sqrt());
        assert!((p.gamma_tilde(0.45).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn gamma_tilde_domain_errors() {
        let p = EquationParams::new(1.0, 1.0, 1.0, 1.0);
        assert!(p.gamma_tilde(1.0).is_err());
        assert!(p.gamma_tilde(1.5).is_err());
        let p = EquationParams::new(1.0, 1.0, 1.0, 0.0);
        assert!(p.gamma_tilde(0.5).is_err());
    }
}
