//! Special functions for p-value computation: log-gamma, regularized
//! incomplete gamma, complementary error function, and the Kolmogorov
//! distribution tail. Series/continued-fraction implementations in double
//! precision, validated against tabulated values to 1e-10.

/// Natural log of the gamma function (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x), by series expansion.
fn igam_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..1000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x), by continued fraction
/// (modified Lentz).
fn igamc_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn igamc(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "igamc domain: a > 0, x >= 0");
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        (1.0 - igam_series(a, x)).clamp(0.0, 1.0)
    } else {
        igamc_cf(a, x).clamp(0.0, 1.0)
    }
}

/// Regularized lower incomplete gamma P(a, x).
pub fn igam(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "igam domain: a > 0, x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        igam_series(a, x).clamp(0.0, 1.0)
    } else {
        (1.0 - igamc_cf(a, x)).clamp(0.0, 1.0)
    }
}

/// Complementary error function, via erfc(x) = Q(1/2, x^2) for x >= 0.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x == 0.0 {
        1.0
    } else {
        igamc(0.5, x * x)
    }
}

/// Chi-square upper-tail p-value: Q(dof/2, x/2).
pub fn chisq_pvalue(x: f64, dof: u32) -> f64 {
    assert!(x >= 0.0 && dof >= 1, "chi-square domain: x >= 0, dof >= 1");
    igamc(dof as f64 / 2.0, x / 2.0)
}

/// Upper tail of a Poisson(lambda): P(X >= k).
pub fn poisson_upper_tail(k: u64, lambda: f64) -> f64 {
    if k == 0 {
        1.0
    } else {
        igam(k as f64, lambda)
    }
}

/// Kolmogorov distribution complement Q_KS(lambda) = P(K > lambda).
///
/// Two series are used: the theta-function form for small lambda (where
/// the alternating sum converges slowly) and the alternating sum
/// elsewhere.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // F(lambda) = sqrt(2*pi)/lambda * sum exp(-(2j-1)^2 pi^2 / (8 lambda^2))
        let pi = std::f64::consts::PI;
        let t = pi * pi / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for j in 1..100u32 {
            let odd = (2 * j - 1) as f64;
            let term = (-odd * odd * t).exp();
            sum += term;
            if term < 1e-300 {
                break;
            }
        }
        let f = (2.0 * pi).sqrt() / lambda * sum;
        (1.0 - f).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for j in 1..100u32 {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * lambda * lambda).exp();
            sum += if j % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Two-sided KS uniformity test over values in [0, 1]. Returns the
/// p-value of the hypothesis that the inputs are U(0, 1), using the
/// asymptotic distribution with the standard small-sample correction.
pub fn ks_uniform(pvalues: &[f64]) -> Option<f64> {
    if pvalues.is_empty() {
        return None;
    }
    let mut sorted = pvalues.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("p-values are not NaN"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &p) in sorted.iter().enumerate() {
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((p - lo).abs()).max((hi - p).abs());
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    Some(kolmogorov_q(lambda))
}
