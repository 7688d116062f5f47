//! Environment (diffusion/dissipation) coefficients and their
//! validation.
//!
//! Natural units hbar = m = k = 1 throughout; temperature enters only
//! through theta = omega/(2T) or directly as the value coth(theta).

use num_complex::Complex64 as C64;

use crate::error::{DiffusionConstraint, Error, Result};

/// Bath temperature for the thermal constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    /// T = 0, i.e. coth(theta) = 1 exactly.
    Zero,
    /// theta = omega/(2T) > 0.
    Theta(f64),
    /// The coth(theta) value itself, >= 1.
    CothFactor(f64),
}

impl Temperature {
    pub fn coth_factor(&self) -> Result<f64> {
        match *self {
            Temperature::Zero => Ok(1.0),
            Temperature::Theta(theta) => {
                if !(theta > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "theta must be positive, got {theta}"
                    )));
                }
                Ok(1.0 / theta.tanh())
            }
            Temperature::CothFactor(c) => {
                if !(c >= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "coth factor must be >= 1, got {c}"
                    )));
                }
                Ok(c)
            }
        }
    }
}

/// Validated diffusion/dissipation data with the derived D1, D2.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentCoefficients {
    pub omega: f64,
    pub lambda: f64,
    pub d_qq: f64,
    pub d_pp: f64,
    pub d_pq: f64,
    /// D1 = omega D_qq - D_pp/omega + 2i D_pq.
    pub d1: C64,
    /// D2 = omega D_qq + D_pp/omega; always >= lambda for admissible input.
    pub d2: f64,
    /// coth(omega/2T); present only for thermally constructed coefficients.
    pub coth_factor: Option<f64>,
}

impl EnvironmentCoefficients {
    /// Construct from the raw diffusion coefficients, enforcing the three
    /// fundamental constraints and D2 >= lambda.
    pub fn from_diffusion(
        omega: f64,
        lambda: f64,
        d_qq: f64,
        d_pp: f64,
        d_pq: f64,
    ) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !(d_pp > 0.0) {
            return Err(Error::ConstraintViolation {
                constraint: DiffusionConstraint::PositiveDpp,
                detail: format!("D_pp = {d_pp}"),
            });
        }
        if !(d_qq > 0.0) {
            return Err(Error::ConstraintViolation {
                constraint: DiffusionConstraint::PositiveDqq,
                detail: format!("D_qq = {d_qq}"),
            });
        }
        let lhs = d_pp * d_qq - d_pq * d_pq;
        let rhs = lambda * lambda / 4.0;
        if lhs < rhs {
            return Err(Error::ConstraintViolation {
                constraint: DiffusionConstraint::GeneralizedUncertainty,
                detail: format!("{lhs:.6e} < {rhs:.6e}"),
            });
        }
        let d1 = C64::new(omega * d_qq - d_pp / omega, 2.0 * d_pq);
        let d2 = omega * d_qq + d_pp / omega;
        // the constraints imply d2 >= lambda mathematically; guard against
        // pathological rounding anyway
        if d2 < lambda * (1.0 - 1e-12) {
            return Err(Error::NonContractive { d2, lambda });
        }
        Ok(Self {
            omega,
            lambda,
            d_qq,
            d_pp,
            d_pq,
            d1,
            d2,
            coth_factor: None,
        })
    }

    /// Construct from microscopic couplings V_j = a_j p + b_j q:
    /// D_qq = (1/2) sum |a_j|^2, D_pp = (1/2) sum |b_j|^2,
    /// D_pq = -(1/2) Re sum a_j* b_j, lambda = -Im sum a_j* b_j.
    pub fn from_environment_couplings(omega: f64, pairs: &[(C64, C64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one coupling pair is required".into(),
            ));
        }
        let d_qq = 0.5 * pairs.iter().map(|(a, _)| a.norm_sqr()).sum::<f64>();
        let d_pp = 0.5 * pairs.iter().map(|(_, b)| b.norm_sqr()).sum::<f64>();
        let cross: C64 = pairs.iter().map(|(a, b)| a.conj() * b).sum();
        let d_pq = -0.5 * cross.re;
        let lambda = -cross.im;
        if lambda <= 0.0 {
            return Err(Error::NonDissipative { lambda });
        }
        Self::from_diffusion(omega, lambda, d_qq, d_pp, d_pq)
    }

    /// Thermal-bath coefficients: D_pp = (lambda/2) omega coth(theta),
    /// D_qq = (lambda/2) coth(theta)/omega, D_pq = 0, which make D1 = 0 and
    /// D2 = lambda coth(theta) exactly.
    pub fn thermal(omega: f64, lambda: f64, temperature: Temperature) -> Result<Self> {
        let coth = temperature.coth_factor()?;
        if !(omega > 0.0) || !(lambda > 0.0) {
            return Err(Error::InvalidParameter(
                "omega and lambda must be positive".into(),
            ));
        }
        let d_pp = 0.5 * lambda * omega * coth;
        let d_qq = 0.5 * lambda * coth / omega;
        let mut env = Self::from_diffusion(omega, lambda, d_qq, d_pp, 0.0)?;
        // the cancellations in D1 and the sum in D2 are exact identities
        // for thermal input; store them without round-off
        env.d1 = C64::new(0.0, 0.0);
        env.d2 = lambda * coth;
        env.coth_factor = Some(coth);
        Ok(env)
    }

    /// The geometric steady-state ratio (D2 - lambda)/(D2 + lambda),
    /// clamped at zero (T = 0 gives exactly zero).
    pub fn steady_ratio(&self) -> f64 {
        ((self.d2 - self.lambda) / (self.d2 + self.lambda)).max(0.0)
    }

    /// Margins of the three admissibility constraints, positive = satisfied.
    pub fn constraint_margins(&self) -> [f64; 3] {
        [
            self.d_pp,
            self.d_qq,
            self.d_pp * self.d_qq - self.d_pq * self.d_pq - self.lambda * self.lambda / 4.0,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_coefficients_from_symmetric_diffusion() {
        let env = EnvironmentCoefficients::from_diffusion(1.0, 0.1, 0.1, 0.1, 0.0).unwrap();
        assert_eq!(env.d1, C64::new(0.0, 0.0));
        assert!((env.d2 - 0.2).abs() < 1e-15);
        assert!(env.coth_factor.is_none());
    }

    #[test]
    fn rejects_uncertainty_violation() {
        match EnvironmentCoefficients::from_diffusion(1.0, 0.1, 0.01, 0.01, 0.0) {
            Err(Error::ConstraintViolation { constraint, .. }) => {
                assert_eq!(constraint, DiffusionConstraint::GeneralizedUncertainty)
            }
            other => panic!("expected constraint violation, got {other:?}"),
        }
    }

    #[test]
    fn matched_diffusion_makes_d1_vanish() {
        // D_pp = omega^2 D_qq and D_pq = 0 force D1 = 0
        let x = 0.37;
        let env = EnvironmentCoefficients::from_diffusion(2.0, 0.1, x, 4.0 * x, 0.0).unwrap();
        assert!(env.d1.norm() < 1e-15);
    }

    #[test]
    fn d1_vanishes_iff_matched() {
        let env =
            EnvironmentCoefficients::from_diffusion(2.0, 0.1, 0.3, 4.0 * 0.3, 0.0).unwrap();
        assert_eq!(env.d1, C64::new(0.0, 0.0));
        let skew = EnvironmentCoefficients::from_diffusion(2.0, 0.1, 0.3, 1.3, 0.1).unwrap();
        assert!(skew.d1.re.abs() > 1e-3);
        assert!((skew.d1.im - 0.2).abs() < 1e-15);
    }

    #[test]
    fn coupling_sign_convention() {
        // a = 1, b = -i gives lambda = -Im(a* b) = 1
        let pairs = [(C64::new(1.0, 0.0), C64::new(0.0, -1.0))];
        let env = EnvironmentCoefficients::from_environment_couplings(1.0, &pairs).unwrap();
        assert!((env.lambda - 1.0).abs() < 1e-15);
        assert!((env.d_qq - 0.5).abs() < 1e-15);
        assert!((env.d_pp - 0.5).abs() < 1e-15);
        assert_eq!(env.d_pq, 0.0);
        // b = +i flips the sign and is non-dissipative
        let bad = [(C64::new(1.0, 0.0), C64::new(0.0, 1.0))];
        match EnvironmentCoefficients::from_environment_couplings(1.0, &bad) {
            Err(Error::NonDissipative { lambda }) => assert!((lambda + 1.0).abs() < 1e-15),
            other => panic!("expected NonDissipative, got {other:?}"),
        }
    }

    #[test]
    fn zero_b_couplings_are_non_dissipative() {
        let pairs = [
            (C64::new(1.0, 0.2), C64::new(0.0, 0.0)),
            (C64::new(0.3, -0.1), C64::new(0.0, 0.0)),
        ];
        assert!(matches!(
            EnvironmentCoefficients::from_environment_couplings(1.0, &pairs),
            Err(Error::NonDissipative { .. })
        ));
    }

    #[test]
    fn duplicated_pair_doubles_coefficients() {
        let one = [(C64::new(1.0, 0.0), C64::new(0.0, -1.0))];
        let two = [
            (C64::new(1.0, 0.0), C64::new(0.0, -1.0)),
            (C64::new(1.0, 0.0), C64::new(0.0, -1.0)),
        ];
        let e1 = EnvironmentCoefficients::from_environment_couplings(1.0, &one).unwrap();
        let e2 = EnvironmentCoefficients::from_environment_couplings(1.0, &two).unwrap();
        assert!((e2.d_qq - 2.0 * e1.d_qq).abs() < 1e-15);
        assert!((e2.d_pp - 2.0 * e1.d_pp).abs() < 1e-15);
        assert!((e2.lambda - 2.0 * e1.lambda).abs() < 1e-15);
    }

    #[test]
    fn global_phase_leaves_couplings_invariant() {
        let base = [
            (C64::new(0.8, 0.1), C64::new(0.2, -0.9)),
            (C64::new(0.1, -0.3), C64::new(0.4, -0.2)),
        ];
        let e1 = EnvironmentCoefficients::from_environment_couplings(1.0, &base).unwrap();
        let phase = C64::from_polar(1.0, 0.7312);
        let rotated: Vec<(C64, C64)> =
            base.iter().map(|(a, b)| (phase * a, phase * b)).collect();
        let e2 = EnvironmentCoefficients::from_environment_couplings(1.0, &rotated).unwrap();
        assert!((e1.d_qq - e2.d_qq).abs() < 1e-14);
        assert!((e1.d_pp - e2.d_pp).abs() < 1e-14);
        assert!((e1.d_pq - e2.d_pq).abs() < 1e-14);
        assert!((e1.lambda - e2.lambda).abs() < 1e-14);
    }

    #[test]
    fn thermal_reduction() {
        // coth(theta) = 2 at theta = arccoth(2) = ln(3)/2
        let theta = 0.5 * 3.0f64.ln();
        let env =
            EnvironmentCoefficients::thermal(1.0, 0.1, Temperature::Theta(theta)).unwrap();
        let coth = env.coth_factor.unwrap();
        assert!((coth - 2.0).abs() < 1e-12);
        assert!((env.d_pp - 0.1 * coth / 2.0).abs() < 1e-15);
        assert!((env.d_qq - 0.1 * coth / 2.0).abs() < 1e-15);
        assert_eq!(env.d1, C64::new(0.0, 0.0));
        assert!((env.d2 - 0.1 * coth).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_has_d2_equal_lambda() {
        let env = EnvironmentCoefficients::thermal(1.0, 0.1, Temperature::Zero).unwrap();
        assert_eq!(env.coth_factor, Some(1.0));
        assert_eq!(env.d2, 0.1);
        assert_eq!(env.steady_ratio(), 0.0);
        // constraint (iii) is saturated at T = 0
        let margins = env.constraint_margins();
        assert!(margins[2].abs() < 1e-16);
    }

    #[test]
    fn thermal_always_satisfies_constraints() {
        for &coth in &[1.0, 1.1, 2.0, 5.0, 40.0] {
            let env = EnvironmentCoefficients::thermal(
                0.7,
                0.25,
                Temperature::CothFactor(coth),
            )
            .unwrap();
            for m in env.constraint_margins() {
                assert!(m >= -1e-16);
            }
            assert!(env.d2 >= env.lambda);
        }
    }
}
