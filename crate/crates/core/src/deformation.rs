//! Deformation functions f(n) and the box bracket [n].
//!
//! The deformed ladder operators are built from a deformation function f
//! acting on the number operator, with f(0) = 1 and f -> 1 as the
//! deformation parameter tau -> 0. The q-deformations come in a real
//! flavor (q = e^tau, [n] = sinh(n tau)/sinh(tau)), a phase flavor
//! (q = e^{i tau}, [n] = sin(n tau)/sin(tau)) and a small-tau Taylor
//! truncation [n] = n - (tau^2/6)(n - n^3). A table kind supports
//! arbitrary tabulated f with f(n) = 1 past the last entry.

use crate::error::{Error, Result};

/// Below this tau the sinh/sin ratios are evaluated through the Taylor
/// form; both branches agree to >= 10 digits at the crossover.
const SMALL_TAU: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum DeformationSpec {
    /// f(n) = 1: the ordinary oscillator.
    Identity,
    /// q = e^tau with real tau >= 0.
    QReal { tau: f64 },
    /// q = e^{i tau}; valid only while [n] stays positive over the
    /// requested range.
    QPhase { tau: f64 },
    /// Lowest-order Taylor truncation of the real-q bracket.
    QTaylor { tau: f64 },
    /// Tabulated f(0..=L); f(n) = 1 for n past the table.
    Table { f: Vec<f64> },
}

fn check_tau(tau: f64) -> Result<f64> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "deformation parameter tau must be finite and nonnegative, got {tau}"
        )));
    }
    Ok(tau)
}

/// [n] in the Taylor form, with `tau_sq` signed (negative encodes the
/// phase case).
pub fn taylor_box(n: usize, tau_sq: f64) -> f64 {
    let nf = n as f64;
    nf - (tau_sq / 6.0) * (nf - nf * nf * nf)
}

impl DeformationSpec {
    pub fn identity() -> Self {
        Self::Identity
    }

    pub fn q_real(tau: f64) -> Result<Self> {
        Ok(Self::QReal { tau: check_tau(tau)? })
    }

    pub fn q_phase(tau: f64) -> Result<Self> {
        Ok(Self::QPhase { tau: check_tau(tau)? })
    }

    pub fn q_taylor(tau: f64) -> Result<Self> {
        Ok(Self::QTaylor { tau: check_tau(tau)? })
    }

    pub fn table(f: Vec<f64>) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::InvalidTable("table must not be empty".into()));
        }
        if f[0] != 1.0 {
            return Err(Error::InvalidTable(format!(
                "f(0) must equal 1, got {}",
                f[0]
            )));
        }
        for (n, &v) in f.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidTable(format!(
                    "table entry f({n}) = {v} must be finite and positive"
                )));
            }
        }
        Ok(Self::Table { f })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Identity => "none",
            Self::QReal { .. } => "q-real",
            Self::QPhase { .. } => "q-phase",
            Self::QTaylor { .. } => "q-taylor",
            Self::Table { .. } => "table",
        }
    }

    /// The box bracket [n]. [0] = 0; may be nonpositive for the phase
    /// case (callers validate through [`Self::eval_f`]).
    pub fn eval_box(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Self::Identity => nf,
            Self::QReal { tau } => {
                if *tau < SMALL_TAU {
                    taylor_box(n, tau * tau)
                } else {
                    (nf * tau).sinh() / tau.sinh()
                }
            }
            Self::QPhase { tau } => {
                if *tau < SMALL_TAU {
                    taylor_box(n, -(tau * tau))
                } else {
                    (nf * tau).sin() / tau.sin()
                }
            }
            Self::QTaylor { tau } => taylor_box(n, tau * tau),
            Self::Table { .. } => {
                // table defines f directly; the bracket follows from
                // [n] = n f(n)^2
                nf * self.table_f(n) * self.table_f(n)
            }
        }
    }

    fn table_f(&self, n: usize) -> f64 {
        match self {
            Self::Table { f } => f.get(n).copied().unwrap_or(1.0),
            _ => unreachable!(),
        }
    }

    /// f(n) = sqrt([n]/n), with f(0) = 1 by convention.
    pub fn eval_f(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(1.0);
        }
        match self {
            Self::Identity => Ok(1.0),
            Self::Table { .. } => Ok(self.table_f(n)),
            _ => {
                let b = self.eval_box(n);
                if b <= 0.0 {
                    return Err(Error::NegativeBracket { n, value: b });
                }
                Ok((b / n as f64).sqrt())
            }
        }
    }

    /// Check that f is evaluable for every n in 0..=n_max.
    pub fn validate_up_to(&self, n_max: usize) -> Result<()> {
        for n in 0..=n_max {
            self.eval_f(n)?;
        }
        Ok(())
    }

    /// Signed tau^2 for the closed-form moment machinery: positive for
    /// the real and Taylor kinds, negative for the phase kind, zero for
    /// the identity, and `None` for tables (no tau semantics).
    pub fn tau_sq_signed(&self) -> Option<f64> {
        match self {
            Self::Identity => Some(0.0),
            Self::QReal { tau } | Self::QTaylor { tau } => Some(tau * tau),
            Self::QPhase { tau } => Some(-(tau * tau)),
            Self::Table { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TAU_02: f64 = 0.4472135954999579; // tau^2 = 0.2

    #[test]
    fn identity_is_one_everywhere() {
        let spec = DeformationSpec::identity();
        assert_eq!(spec.eval_f(5).unwrap(), 1.0);
        assert_eq!(spec.eval_box(5), 5.0);
    }

    #[test]
    fn q_real_at_zero_tau_is_undeformed() {
        let spec = DeformationSpec::q_real(0.0).unwrap();
        assert_eq!(spec.eval_f(7).unwrap(), 1.0);
        assert_eq!(spec.eval_box(7), 7.0);
    }

    #[test]
    fn q_real_bracket_two_is_twice_cosh_tau() {
        // [2] = sinh(2 tau)/sinh(tau) = 2 cosh(tau)
        let spec = DeformationSpec::q_real(TAU_02).unwrap();
        let expected = 2.0 * TAU_02.cosh();
        assert!((spec.eval_box(2) - expected).abs() < 1e-14);
        let f2 = spec.eval_f(2).unwrap();
        assert!((f2 - (expected / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn taylor_bracket_matches_arithmetic() {
        // [2] = 2 - (0.2/6)(2 - 8) = 2.2
        let spec = DeformationSpec::q_taylor(TAU_02).unwrap();
        assert!((spec.eval_box(2) - 2.2).abs() < 1e-14);
    }

    #[test]
    fn bracket_zero_and_one_for_all_analytic_kinds() {
        let specs = [
            DeformationSpec::identity(),
            DeformationSpec::q_real(0.3).unwrap(),
            DeformationSpec::q_phase(0.3).unwrap(),
            DeformationSpec::q_taylor(0.3).unwrap(),
        ];
        for spec in &specs {
            assert_eq!(spec.eval_box(0), 0.0, "{}", spec.kind_name());
            assert!(
                (spec.eval_box(1) - 1.0).abs() < 1e-15,
                "{}",
                spec.kind_name()
            );
        }
    }

    #[test]
    fn bracket_equals_n_times_f_squared() {
        let specs = [
            DeformationSpec::identity(),
            DeformationSpec::q_real(0.45).unwrap(),
            DeformationSpec::q_phase(0.2).unwrap(),
            DeformationSpec::q_taylor(0.45).unwrap(),
            DeformationSpec::table(vec![1.0, 1.2, 0.9, 1.05]).unwrap(),
        ];
        for spec in &specs {
            for n in 0..12 {
                let f = spec.eval_f(n).unwrap();
                let box_n = spec.eval_box(n);
                assert!(
                    (box_n - n as f64 * f * f).abs() < 1e-12 * (1.0 + box_n.abs()),
                    "{} at n={n}",
                    spec.kind_name()
                );
            }
        }
    }

    #[test]
    fn small_tau_branches_agree_at_crossover() {
        for &n in &[1usize, 3, 7, 10] {
            let just_below = DeformationSpec::QReal { tau: 0.999e-6 };
            let just_above = DeformationSpec::QReal { tau: 1.001e-6 };
            let lo = just_below.eval_box(n);
            let hi = just_above.eval_box(n);
            assert!((lo - hi).abs() < 1e-10 * n as f64);
        }
    }

    #[test]
    fn f_tends_to_one_as_tau_vanishes() {
        for &tau in &[1e-4, 1e-6] {
            let spec = DeformationSpec::q_real(tau).unwrap();
            for n in 1..=10 {
                let f = spec.eval_f(n).unwrap();
                assert!(
                    (f - 1.0).abs() < 1e-7,
                    "tau={tau} n={n} f={f}"
                );
            }
        }
    }

    // Regression bound on the Taylor remainder of the real-q bracket,
    // measured once over tau <= 0.1, n <= 10 (observed max coefficient
    // 8.34e-3) and frozen with margin.
    const TAYLOR_REMAINDER_C: f64 = 0.012;

    #[test]
    fn taylor_remainder_is_fourth_order() {
        for &tau in &[0.01, 0.02, 0.05, 0.08, 0.1] {
            let exact = DeformationSpec::q_real(tau).unwrap();
            for n in 1..=10usize {
                let diff = (exact.eval_box(n) - taylor_box(n, tau * tau)).abs();
                let bound = TAYLOR_REMAINDER_C * tau.powi(4) * (n as f64).powi(5);
                assert!(
                    diff <= bound,
                    "tau={tau} n={n}: remainder {diff} > bound {bound}"
                );
            }
        }
    }

    #[test]
    fn phase_bracket_is_real_bracket_with_negated_tau_sq() {
        // term-by-term in the Taylor form
        for n in 0..12 {
            let plus = taylor_box(n, 0.2);
            let minus = taylor_box(n, -0.2);
            let nf = n as f64;
            let correction = (0.2 / 6.0) * (nf - nf * nf * nf);
            assert!((plus - (nf - correction)).abs() < 1e-12);
            assert!((minus - (nf + correction)).abs() < 1e-12);
        }
        // and the sin-form bracket matches its own Taylor form to fourth order
        for &tau in &[0.05, 0.1] {
            let phase = DeformationSpec::q_phase(tau).unwrap();
            for n in 1..=10usize {
                let diff = (phase.eval_box(n) - taylor_box(n, -(tau * tau))).abs();
                let bound = TAYLOR_REMAINDER_C * tau.powi(4) * (n as f64).powi(5);
                assert!(diff <= bound, "tau={tau} n={n}: {diff} > {bound}");
            }
        }
    }

    #[test]
    fn phase_bracket_turns_negative_for_large_tau() {
        // tau = 1: [4] = sin(4)/sin(1) < 0
        let spec = DeformationSpec::q_phase(1.0).unwrap();
        assert!(spec.eval_box(4) < 0.0);
        match spec.validate_up_to(7) {
            Err(Error::NegativeBracket { n, .. }) => assert_eq!(n, 4),
            other => panic!("expected NegativeBracket, got {other:?}"),
        }
    }

    #[test]
    fn table_pads_with_one_and_rejects_bad_entries() {
        let spec = DeformationSpec::table(vec![1.0, 1.3, 0.8]).unwrap();
        assert_eq!(spec.eval_f(1).unwrap(), 1.3);
        assert_eq!(spec.eval_f(9).unwrap(), 1.0);
        assert!(DeformationSpec::table(vec![]).is_err());
        assert!(DeformationSpec::table(vec![1.0, 0.0]).is_err());
        assert!(DeformationSpec::table(vec![1.0, -0.5]).is_err());
        assert!(DeformationSpec::table(vec![0.9, 1.0]).is_err());
    }

    #[test]
    fn negative_tau_rejected() {
        assert!(DeformationSpec::q_real(-0.1).is_err());
        assert!(DeformationSpec::q_phase(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn q_real_bracket_consistency(tau in 0.0f64..0.8, n in 0usize..16) {
            let spec = DeformationSpec::q_real(tau).unwrap();
            let f = spec.eval_f(n).unwrap();
            let b = spec.eval_box(n);
            // [n] = n f(n)^2 and the real-q bracket dominates n
            prop_assert!((b - n as f64 * f * f).abs() < 1e-11 * (1.0 + b));
            prop_assert!(b >= n as f64 - 1e-12 * (1.0 + b));
        }
    }
}
