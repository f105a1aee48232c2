//! Moment constants C_j and the reduced-energy shape constants.

use super::bubbles::Family;
use super::radial::RadialProfile;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, composite_gl, log1p_pow, pow_ratio};

/// Moment constant
/// C_j = 8(1+a)^2 int_0^inf t^{1+2a} (y-1)/(y+1)^3 f_j(t) dt, y = t^{2(1+a)},
/// by adaptive quadrature in log space to absolute 1e-9. For j = 2 the solved
/// omega1 is required to assemble f_2.
pub fn moment_constant(family: Family, j: usize, omega1: Option<&RadialProfile>) -> Result<f64> {
    if j == 2 && omega1.is_none() {
        return Err(Error::invalid("moment_constant with j=2 needs omega1"));
    }
    let c = 2.0 * family.ap1();
    let f = |r: f64| -> f64 {
        match j {
            1 => family.f1(r),
            2 => family.f2(r, &|s| omega1.unwrap().eval(s)),
            _ => panic!("moment order must be 1 or 2"),
        }
    };
    let integrand = |t: f64| {
        let r = t.exp();
        // 8(1+a)^2 y (y-1)/(y+1)^3 in stable form
        let lead = (8.0 * family.ap1() * family.ap1())
            * (c * t - 2.0 * log1p_pow(r, c)).exp()
            * pow_ratio(r, c);
        lead * f(r)
    };
    // pre-split into panels: the integrand vanishes at r = 1 and at both
    // ends, which can fool a single adaptive pass into accepting zero
    let tw = (52.0 / c).max(21.0);
    let cuts = [-tw, -8.0, -2.0, -0.5, 0.5, 2.0, 8.0, tw];
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_simpson(&integrand, w[0], w[1], 2e-10)?;
    }
    Ok(total)
}

/// Closed form of C_1 = 12(1+a) - 4(1+a) log 8(1+a)^2 (used as an oracle).
pub fn moment_c1_closed(family: Family) -> f64 {
    let ap1 = family.ap1();
    12.0 * ap1 - 4.0 * ap1 * family.lconst()
}

/// Shape constants of the reduced-energy expansion:
///   K  = 1/(8 pi (1+a)) int_{R^2} [ W_a u1 - Lap omega_1 ] dz
///   Kt = 1/(8 pi)       int_{R^2} [ W_0 v1 - Lap omegat_1 ] dz
/// with the Laplacians rewritten through the ODE, so the radial integrand is
/// W (u1 + omega_1 - u1^2/2) r. Integration runs to `r_max` on the profile and
/// an exact power-log tail (using the far-field form of omega_1) is added; the
/// neglected remainder is estimated and must stay below 1e-5.
pub fn shape_constants(
    alpha: f64,
    omega1: &RadialProfile,
    omega1_tilde: &RadialProfile,
    r_max: f64,
) -> Result<(f64, f64)> {
    let k = shape_constant_one(Family::Henon { alpha }, omega1, r_max)?;
    let kt = shape_constant_one(Family::Standard, omega1_tilde, r_max)?;
    Ok((k, kt))
}

fn shape_constant_one(family: Family, omega1: &RadialProfile, r_max: f64) -> Result<f64> {
    assert_eq!(omega1.family, family, "profile family mismatch");
    let ap1 = family.ap1();
    let bracket = |r: f64| {
        let u = family.u1(r);
        u + omega1.eval(r) - 0.5 * u * u
    };
    // int_0^{r_max} W(r) bracket(r) r dr / (4(1+a)), log-space composite GL
    let body = composite_gl(
        |t: f64| {
            let r = t.exp();
            family.weight(r) * bracket(r) * r * r
        },
        (1e-9f64).ln(),
        r_max.ln(),
        1600,
        8,
    ) / (4.0 * ap1);
    // exact tail with omega_1 replaced by its far-field asymptote: in the
    // variable w = 1 + y the tail integrand is w^{-2} (-2 L^2(w) + b L(w) + c)
    // with L(w) = log w, b = 2 log 8(1+a)^2 - 2 + C_1/(2(1+a)),
    // c = log 8(1+a)^2 - log^2 8(1+a)^2 / 2
    let big_l = family.lconst();
    let c1 = omega1.far_coeff;
    let w0 = 1.0 + (2.0 * ap1 * r_max.ln()).exp();
    let b = 2.0 * big_l - 2.0 + c1 / (2.0 * ap1);
    let c = big_l - 0.5 * big_l * big_l;
    let ik = |k: usize| -> f64 {
        // int_{w0}^inf w^{-2} (log w)^k dw
        crate::numeric::power_log_tail(w0, 2.0, k)
    };
    let tail = -2.0 * ik(2) + b * ik(1) + c * ik(0);
    // remainder estimate: the omega_1 asymptote is off by O(r^{-(1+a)} log r)
    let est = 8.0 * ap1 * ap1
        * (c1.abs() + 10.0)
        * (crate::numeric::power_log_tail(r_max, 2.0 + 3.0 * ap1 - 1.0, 1)
            + crate::numeric::power_log_tail(r_max, 2.0 + 3.0 * ap1 - 1.0, 0));
    if est > 1e-5 {
        return Err(Error::numerical(
            "shape constant",
            format!("tail estimate {est:.2e} exceeds 1e-5; increase r_max"),
        ));
    }
    Ok(body + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::solve_radial_correction;
    use std::sync::Arc;

    // frozen ground truth, computed independently from the closed-form
    // omega_1 route with adaptive quadrature at 1e-13
    const C2_STANDARD: f64 = -4.978542334336;
    const C2_HENON_05: f64 = -26.783262845686;
    const C2_HENON_M05: f64 = 2.425388333284;
    const C2_HENON_15: f64 = -103.919009895709;
    const K_TILDE: f64 = -0.841116916642; // = 2 log 8 - 5

    #[test]
    fn c1_matches_printed_closed_form() {
        for &alpha in &[-0.5, 0.5, 1.5] {
            let fam = Family::Henon { alpha };
            let got = moment_constant(fam, 1, None).unwrap();
            assert!(
                (got - moment_c1_closed(fam)).abs() < 1e-6,
                "alpha={alpha}: {got} vs {}",
                moment_c1_closed(fam)
            );
        }
        let got = moment_constant(Family::Standard, 1, None).unwrap();
        assert!((got - (12.0 - 4.0 * 8.0f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn c2_matches_frozen_ground_truth() {
        for (alpha, want) in [(-0.5, C2_HENON_M05), (0.5, C2_HENON_05), (1.5, C2_HENON_15)] {
            let fam = Family::Henon { alpha };
            let om1 = solve_radial_correction(fam, 1, None).unwrap();
            let got = moment_constant(fam, 2, Some(&om1)).unwrap();
            assert!((got - want).abs() < 1e-5, "alpha={alpha}: {got} vs {want}");
        }
        let om1 = solve_radial_correction(Family::Standard, 1, None).unwrap();
        let got = moment_constant(Family::Standard, 2, Some(&om1)).unwrap();
        assert!((got - C2_STANDARD).abs() < 1e-5, "{got}");
    }

    #[test]
    fn far_field_coefficient_equals_moment_constant() {
        for fam in [Family::Standard, Family::Henon { alpha: 0.5 }] {
            let om1 = Arc::new(solve_radial_correction(fam, 1, None).unwrap());
            let c1 = moment_constant(fam, 1, None).unwrap();
            assert!((om1.far_coeff - c1).abs() < 1e-5, "{fam:?}");
            let om2 = solve_radial_correction(fam, 2, Some(om1.clone())).unwrap();
            let c2 = moment_constant(fam, 2, Some(&om1)).unwrap();
            assert!((om2.far_coeff - c2).abs() < 1e-5, "{fam:?}");
        }
    }

    #[test]
    fn shape_constants_ground_truth_and_offset_identity() {
        let omt1 = solve_radial_correction(Family::Standard, 1, None).unwrap();
        for &alpha in &[0.5f64, 1.5] {
            let om1 = solve_radial_correction(Family::Henon { alpha }, 1, None).unwrap();
            let (k, kt) = shape_constants(alpha, &om1, &omt1, 1e5).unwrap();
            assert!((kt - K_TILDE).abs() < 1e-5, "Kt = {kt}");
            // K(alpha) = K_tilde + 4 log(1+alpha)
            assert!(
                (k - (K_TILDE + 4.0 * (1.0 + alpha).ln())).abs() < 1e-5,
                "alpha={alpha}: K = {k}"
            );
        }
    }

    #[test]
    fn shape_constant_stable_under_larger_cutoff() {
        let omt1 = solve_radial_correction(Family::Standard, 1, None).unwrap();
        let om1 = solve_radial_correction(Family::Henon { alpha: 0.5 }, 1, None).unwrap();
        let (k1, kt1) = shape_constants(0.5, &om1, &omt1, 1e5).unwrap();
        let (k2, kt2) = shape_constants(0.5, &om1, &omt1, 1e6).unwrap();
        assert!((k1 - k2).abs() < 1e-5, "{k1} vs {k2}");
        assert!((kt1 - kt2).abs() < 1e-5);
    }

    #[test]
    fn shape_constant_continuity_in_alpha() {
        let omt1 = solve_radial_correction(Family::Standard, 1, None).unwrap();
        let a = solve_radial_correction(Family::Henon { alpha: 0.5 }, 1, None).unwrap();
        let b = solve_radial_correction(Family::Henon { alpha: 0.5001 }, 1, None).unwrap();
        let (ka, _) = shape_constants(0.5, &a, &omt1, 1e5).unwrap();
        let (kb, _) = shape_constants(0.5001, &b, &omt1, 1e5).unwrap();
        assert!((ka - kb).abs() < 1e-3, "{ka} vs {kb}");
    }
}
