//! Second, independently written transcription of every closed-form
//! constant, used only to cross-check the production ladder. All quantities
//! are carried as natural logs with each formula inlined as an explicit
//! linear combination of input logs, so the two implementations share no
//! evaluation structure.

#[derive(Debug, Clone)]
pub struct Point {
    pub nu: f64,
    pub l: f64,
    pub alpha: f64,
    pub a_tilde: f64,
    pub beta: f64,
    pub b_tilde: f64,
    pub eta: f64,
    pub h: f64,
    pub m: f64,
    pub f_norm: f64,
    pub ft_norm: f64,
    pub c3: f64,
    pub c4: f64,
    pub c6: f64,
    pub c42_5: f64,
    pub c10: f64,
    pub c6beta: f64,
    pub c_inf: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone)]
pub struct OracleValues {
    pub ln_k: f64,
    pub ln_m1: f64,
    pub ln_m2: f64,
    pub ln_m3: f64,
    pub ln_m4: f64,
    pub ln_k2: Option<f64>,
    pub ln_m5: Option<f64>,
    pub ln_m6: Option<f64>,
    pub ln_m7: Option<f64>,
    pub ln_m8: Option<f64>,
    pub a0_branch: bool,
    pub ln_a_value: f64,
    pub ln_coef_alpha: f64,
    pub ln_coef_ab: f64,
    pub ln_q_cor43: Option<f64>,
    pub ln_z3: Option<f64>,
    pub ln_z5: Option<f64>,
    pub ln_z2_coeff: Option<f64>,
    pub ln_z4_coeff: Option<f64>,
    pub ln_z6_coeff: Option<f64>,
    pub ln_b: Option<f64>,
    pub ln_c: Option<f64>,
    pub ln_d: Option<f64>,
    pub ln_h: Option<f64>,
    pub ln_ztilde1: Option<f64>,
    pub ln_ctilde: Option<f64>,
    pub ln_dtilde: Option<f64>,
}

fn lse2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn lse(terms: &[f64]) -> f64 {
    terms.iter().copied().fold(f64::NEG_INFINITY, lse2)
}

pub fn evaluate(p: &Point) -> OracleValues {
    let al = p.alpha;
    let be = p.beta;
    let ln_nu = p.nu.ln();
    let ln_l = p.l.ln();
    let ln_m = p.m.ln();
    let ln_at = p.a_tilde.ln();
    let ln_eta = p.eta.ln();
    let ln2 = std::f64::consts::LN_2;
    // dimensional damping coefficients
    let ln_a = ln_at + (2.0 * al - 2.0) * ln_l - (2.0 * al - 1.0) * ln_nu;
    let ln_b_dim = p.b_tilde.ln() + (2.0 * be - 2.0) * ln_l - (2.0 * be - 1.0) * ln_nu;
    let ln_fsq = 2.0 * p.f_norm.ln();
    let ln_ftsq = 2.0 * p.ft_norm.ln();
    let ln_c3 = p.c3.ln();
    let ln_c4 = p.c4.ln();
    let ln_c6 = p.c6.ln();
    let ln_c425 = p.c42_5.ln();
    let ln_c10 = p.c10.ln();
    let ln_c6b = p.c6beta.ln();
    let ln_ci = p.c_inf.ln();
    let ln_kap = p.kappa.ln();

    // K = (l^2/nu) F + 4 nu^{(al+1)/al} / (a^{1/al} l^{(2-al)/al})
    let ln_k = lse2(
        2.0 * ln_l - ln_nu + ln_fsq,
        (4f64).ln() + (al + 1.0) / al * ln_nu - ln_a / al - (2.0 - al) / al * ln_l,
    );

    // M1 = l^2 M + l^2 K / nu
    let ln_m1 = lse2(2.0 * ln_l + ln_m, 2.0 * ln_l + ln_k - ln_nu);

    // Mtilde = max(T1, T2)
    let t1 = -al / (al - 1.0) * ln_nu - ln_a / (al - 1.0)
        + lse2(
            4.0 * ln_l - 3.0 * ln_nu + ln_fsq,
            (4f64).ln() + (3.0 * al - 2.0) / al * ln_l - (al - 1.0) / al * ln_nu - ln_a / al,
        );
    let t2 = lse2(
        ln_l * 2.0 - (2f64).ln() - (2.0 * al - 1.0) / (al - 1.0) * ln_nu - ln_a / (al - 1.0)
            + ln_m,
        ln_k + lse2(
            (1.5f64).ln() - ln_nu,
            (1.5f64).ln() + 2.0 * ln_l - (3.0 * al - 2.0) / (al - 1.0) * ln_nu
                - ln_a / (al - 1.0),
        ),
    );
    let ln_mt = t1.max(t2);

    // M2 = (l^2/nu^2) F + M + Mtilde
    let ln_m2 = lse(&[2.0 * ln_l - 2.0 * ln_nu + ln_fsq, ln_m, ln_mt]);

    // M3 = 2 M2 / (nu^{(2al-1)/(al-1)} a^{1/(al-1)}) + 4 F / nu^2
    let ln_m3 = lse2(
        ln2 + ln_m2 - (2.0 * al - 1.0) / (al - 1.0) * ln_nu - ln_a / (al - 1.0),
        (4f64).ln() + ln_fsq - 2.0 * ln_nu,
    );

    // M4 = 2 l^2 F / (a nu) + 2^{(1+al)/al} nu^{(al+1)/al} l^{(al-2)/al} / a^{(1+al)/al}
    let ln_m4 = lse2(
        ln2 + 2.0 * ln_l + ln_fsq - ln_a - ln_nu,
        (1.0 + al) / al * ln2 + (al + 1.0) / al * ln_nu + (al - 2.0) / al * ln_l
            - (1.0 + al) / al * ln_a,
    );

    // The higher ladder only exists for 1 < alpha < 2.
    let (ln_k2, ln_m5, ln_m6, ln_m7, ln_m8) = if al < 2.0 {
        // shared bracket pieces of M5/M6: 4 l^2 M2^3 / nu^3, 2 nu M2, l^2 nu M3
        let br1 = (4f64).ln() + 2.0 * ln_l + 3.0 * ln_m2 - 3.0 * ln_nu;
        let br2 = ln2 + ln_nu + ln_m2;
        let br3 = 2.0 * ln_l + ln_nu + ln_m3;
        let ln_m5 = lse(&[
            ln_nu - ln_a - 2.0 * ln_l + ln_m1,
            ln_m4,
            ln_nu + (al + 1.0).ln() - ln_a + ln_m2,
            (2.0 * al + 2.0).ln() + 2.0 * ln_l - ln_a - ln_nu + ln_fsq,
            (4f64).ln() + 2.0 * ln_ci + (2.0 * al + 2.0).ln() - ln_a
                + lse(&[br1, br2, br3, ln_m1 + ln_m2 - 2.0 * ln_l - ln_nu]),
        ]);
        let ln_m6 = lse(&[
            ln_nu + ln_m2,
            ln_a - (al + 1.0).ln() + ln_m5,
            ln2 + 2.0 * ln_l - ln_nu + ln_fsq,
            (8f64).ln() + 2.0 * ln_ci
                + lse(&[br1, br2, br3, ln_m1 + ln_m2 - ln_l - ln_nu]),
        ]);
        let c36 = ln_c3 + ln_c6;
        let ln_k2 = lse(&[
            ln_nu - (4f64).ln() - 2.0 * ln_l,
            (54f64).ln() + 4.0 * c36 - 3.0 * ln_nu + 2.0 * ln_m2,
            (3f64).ln() + 4.0 / 3.0 * c36 - ln_nu / 3.0 - 4.0 / 3.0 * ln_l
                + 2.0 / 3.0 * ln_m2,
            ln2 + 2.0 * c36 - ln_nu - ln_l + ln_m2,
            c36 - 1.5 * ln_l + 0.5 * ln_m2,
        ]);
        let ln_m7 = lse2(
            ln_m6
                + lse(&[
                    (1.5f64).ln() + ln_nu - 2.0 * ln_l,
                    (108f64).ln() + 4.0 * c36 - 3.0 * ln_nu + 2.0 * ln_m2,
                    (6f64).ln() + 4.0 / 3.0 * c36 - ln_nu / 3.0 - 4.0 / 3.0 * ln_l
                        + 2.0 / 3.0 * ln_m2,
                    (4f64).ln() + 2.0 * c36 - ln_nu - ln_l + ln_m2,
                    ln2 + c36 - 1.5 * ln_l + 0.5 * ln_m2,
                ]),
            ln2 + 4.0 * ln_l - 2.0 * ln_nu + ln_ftsq,
        );
        let two_minus = 2.0 - al;
        let ln_m8 = lse(&[
            ln2 + ln_m7 - ln_nu,
            10.0 * ln2 + 8.0 * ln_c4 - 4.0 * ln_nu
                + lse2(
                    0.5 * ln_m1 + 1.5 * ln_m2,
                    2.0 * ln_m1 - 3.0 * ln_l,
                )
                + 0.5 * ln_m2,
            4.0 * al / two_minus * ln2 + 2.0 / two_minus * ln_a + ln_m5 / two_minus
                + 2.0 * al / two_minus * ln_ci
                - 2.0 / two_minus * ln_nu
                + al / (2.0 * two_minus) * ln_m2,
            al * ln2 + ln_a + 0.5 * ln_m5 + al * ln_ci - ln_nu - 1.5 * al * ln_l
                + al / 2.0 * ln_m1,
            ln2 + p.f_norm.ln() - ln_nu,
        ]);
        (Some(ln_k2), Some(ln_m5), Some(ln_m6), Some(ln_m7), Some(ln_m8))
    } else {
        (None, None, None, None, None)
    };

    // L2 theorem constants.
    let mx = al.max(be);
    let ln_poly5 = 5.0 * lse2(ln_m2, ln_m1 - 2.0 * ln_l);
    let (a0_branch, ln_a_value, ln_coef_alpha, ln_coef_ab) = if al < 2.0 && be < 2.0 {
        let ln_a0 = 2.0 * ln_l
            + lse2(ln_eta + 2.0 * ln_l, ln2 + ln_nu)
            - 2.0 * ln_eta
            - 7.0 * ln_nu
            + ln_poly5;
        let ca = lse2(
            (32f64).ln() + 2.0 * ln_at + 2.0 * ln_nu - ln_eta - 4.0 * ln_l + ln_m1,
            (64f64).ln() + 2.0 * ln_at + 12.0 * ln_c6 - 2.0 * (2.0 - mx).ln() + ln_a0,
        );
        let cb = lse2(
            ln2 + 2.0 * ln_nu - ln_eta - 4.0 * ln_l + ln_m1,
            ln2 + 10.0 * ln_c6 + ln_a0,
        );
        (true, ln_a0, ca, cb)
    } else {
        let ln_a1 = 8.0 * ln_l - 10.0 * ln_nu
            + lse2(-ln_nu, ln2 - ln_eta - 2.0 * ln_l)
            + lse(&[
                7.0 * ln_m2 - ln_nu,
                2.0 * ln2 - ln_eta - (3.0 * al - 2.0) / (al - 1.0) * ln_nu
                    - ln_a / (al - 1.0)
                    + 7.0 * ln_m2,
                3.0 * ln2 - ln_eta - 2.0 * ln_nu + ln_fsq + 6.0 * ln_m2,
                ln2 - ln_eta - 16.0 * ln_l + 7.0 * ln_m1,
            ]);
        let ca = lse2(
            9.0 * ln2 + 2.0 * ln_at + 2.0 * ln_nu - 2.0 * ln_eta - 4.0 * ln_l + ln_m1,
            22.0 * ln2 + 2.0 * ln_at + 2.0 * ln_c6 + 14.0 * ln_c425 - 2.0 * (3.0 - mx).ln()
                + ln_a1,
        );
        let cb = lse2(
            5.0 * ln2 + 2.0 * ln_nu - 2.0 * ln_eta - 4.0 * ln_l + ln_m1,
            16.0 * ln2 + 14.0 * ln_c425 + ln_a1,
        );
        (false, ln_a1, ca, cb)
    };

    // H1 theorem constants (exponents both in (1, 2)).
    let h1 = if al < 2.0 && be < 2.0 {
        let ln_q = lse(&[
            2.0 * ln2 + ln_m2 - ln_nu,
            4.0 * ln2 - ln_eta - (3.0 * al - 2.0) / (al - 1.0) * ln_nu - ln_a / (al - 1.0)
                + ln_m2,
            5.0 * ln2 - ln_eta - 2.0 * ln_nu + ln_fsq,
        ]);
        let ln_z3 = lse2(
            (64f64).ln() + 2.0 * ln_at - 2.0 + ln_nu - 4.0 * ln_l + ln_m1,
            15.0 * ln2 + 2.0 * ln_at + lse2(12.0 * ln_c6, 10.0 * ln_c10)
                - 2.0 * (2.0 - mx).ln()
                + 2.0 * ln_l
                - 7.0 * ln_nu
                + ln_poly5,
        );
        let ln_z5 = lse2(
            (6f64).ln() + ln_nu - 4.0 * ln_l + ln_m1,
            12.0 * ln2 + lse2(10.0 * ln_c6, 10.0 * ln_c10) + 2.0 * ln_l - 7.0 * ln_nu
                + ln_poly5,
        );
        let ln_z2c = 12.0 * ln2 + 2.0 * ln_kap + 2.0 * ln_c6 + 4.0 * be * ln_c6b + ln_l - ln_nu;
        let ln_z4c = 14.0 * ln2 + 2.0 * ln_at + 10.0 * ln_c10 - 2.0 * (2.0 - mx).ln()
            + 4.0 * ln_l
            - 7.0 * ln_nu
            + 4.0 * ln_m2;
        let ln_z6c = 11.0 * ln2 + 10.0 * ln_c10 + 4.0 * ln_l - 7.0 * ln_nu + 4.0 * ln_m2;

        // ln B is itself the (possibly astronomically large) exponent.
        let ln_b = (13.0 * ln2 + 2.0 * ln_kap + 2.0 * ln_c6 + 4.0 * be * ln_c6b + ln_l
            - 2.0 * ln_nu
            + ln_m2)
            .exp();

        let bracket_a = lse2(3.0 * ln2 - ln_eta + ln_z3, ln_z4c + ln_q);
        let bracket_b = lse2(3.0 * ln2 - ln_eta + ln_z5, ln_z6c + ln_q);
        let ln_c = ln2 + ln_b + bracket_a;
        let ln_d = ln2 + ln_b + bracket_b;

        let d_alpha = (al - be).abs();
        let d_ab = (p.a_tilde - p.b_tilde).abs();
        let ln_h = lse(&[
            ln_m2,
            ln_m1 - 2.0 * ln_l,
            ln_b + lse(&[
                2.0 * ln2 + ln_m,
                ln2 + 2.0 * d_alpha.ln() + bracket_a,
                ln2 + 2.0 * d_ab.ln() + bracket_b,
            ]),
        ]);

        // Ztilde1, term by term.
        let two_minus = 2.0 - be;
        let big = lse2(
            (1.0 + be) / two_minus * ln_m2,
            (1.0 + be) / two_minus * (2.0 * ln2 + ln_h),
        );
        let ln_ztilde1 = lse(&[
            (432f64).ln() + 4.0 * ln_ci - 3.0 * ln_nu + 2.0 * ln_m2,
            2.0 * ln2 + 2.0 * ln_ci - ln_nu + ln_m2,
            (32f64).ln() + 2.0 * ln_c6 + 2.0 * ln_c3 - ln_nu - ln_l + ln_h,
            (27648f64).ln() + 4.0 * ln_c6 + 4.0 * ln_c3 - 3.0 * ln_nu + 2.0 * ln_h,
            (4.0 * be + 11.0) * ln2 + 2.0 * ln_kap + 2.0 * ln_c6 + 4.0 * be * ln_c6b
                + 2.0 * ln_b_dim
                - ln_nu
                - (6.0 * be - 2.0) * ln_l
                + lse2(
                    2.0 * be * ln_m1,
                    2.0 * be * (2.0 * ln2 + 2.0 * ln_l + ln_h),
                ),
            (24.0 - 9.0 * be) / two_minus * ln2 + 2.0 * ln_kap + 2.0 * ln_c6
                + 4.0 * be * ln_c6b
                + 2.0 / two_minus * ln_b_dim
                - (be - 1.0) / two_minus * ln_l
                - ln_nu
                + big,
            (7.0 * be + 7.0) / two_minus * ln2 + 2.0 / two_minus * ln_kap
                + 2.0 / two_minus * ln_c6
                + 4.0 * be / two_minus * ln_c6b
                + 2.0 / two_minus * ln_b_dim
                - be / two_minus * ln_nu
                + (be - 1.0) / two_minus * ln_h
                + big,
            ln_nu - ln2 - 2.0 * ln_l,
        ]);

        // Ctilde/Dtilde need M8, which needs alpha < 2 (already true here).
        let m8 = ln_m8.expect("alpha < 2");
        let ln_ctilde = ln2 + ln_b - ln_eta + lse2(3.0 * ln2 + ln_z3, ln_z4c + 2.0 * m8);
        let ln_dtilde = ln2 + ln_b - ln_eta + lse2(3.0 * ln2 + ln_z5, ln_z6c + 2.0 * m8);

        Some((
            ln_q, ln_z3, ln_z5, ln_z2c, ln_z4c, ln_z6c, ln_b, ln_c, ln_d, ln_h, ln_ztilde1,
            ln_ctilde, ln_dtilde,
        ))
    } else {
        None
    };

    let (
        ln_q_cor43,
        ln_z3,
        ln_z5,
        ln_z2_coeff,
        ln_z4_coeff,
        ln_z6_coeff,
        ln_b,
        ln_c,
        ln_d,
        ln_h,
        ln_ztilde1,
        ln_ctilde,
        ln_dtilde,
    ) = match h1 {
        Some(v) => (
            Some(v.0),
            Some(v.1),
            Some(v.2),
            Some(v.3),
            Some(v.4),
            Some(v.5),
            Some(v.6),
            Some(v.7),
            Some(v.8),
            Some(v.9),
            Some(v.10),
            Some(v.11),
            Some(v.12),
        ),
        None => (
            None, None, None, None, None, None, None, None, None, None, None, None, None,
        ),
    };

    OracleValues {
        ln_k,
        ln_m1,
        ln_m2,
        ln_m3,
        ln_m4,
        ln_k2,
        ln_m5,
        ln_m6,
        ln_m7,
        ln_m8,
        a0_branch,
        ln_a_value,
        ln_coef_alpha,
        ln_coef_ab,
        ln_q_cor43,
        ln_z3,
        ln_z5,
        ln_z2_coeff,
        ln_z4_coeff,
        ln_z6_coeff,
        ln_b,
        ln_c,
        ln_d,
        ln_h,
        ln_ztilde1,
        ln_ctilde,
        ln_dtilde,
    }
}
