//! Riemann-Siegel theta and Z functions, and Gram points.

use std::f64::consts::{FRAC_PI_8, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::TWO_PI;

/// Coefficients of the Stirling tail of theta: (1 - 2^(1-2k)) |B_2k| / (4k (2k-1)).
const THETA_TAIL: [f64; 5] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
];

/// Below this height Z is evaluated through zeta itself; the truncated
/// Riemann-Siegel series is only good to a few 1e-6 there.
const EULER_MACLAURIN_BELOW: f64 = 100.0;

pub(crate) fn theta_unchecked(t: f64) -> f64 {
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let tail = THETA_TAIL.iter().rev().fold(0.0, |acc, &c| acc * inv2 + c) * inv;
    0.5 * t * (t / TWO_PI).ln() - 0.5 * t - FRAC_PI_8 + tail
}

/// Derivative of theta, used for Newton steps.
fn theta_prime(t: f64) -> f64 {
    0.5 * (t / TWO_PI).ln() - 1.0 / (48.0 * t * t)
}

/// The Riemann-Siegel theta function from its asymptotic expansion.
/// Accurate to better than 1e-12 for t > 10.
pub fn riemann_siegel_theta(t: f64) -> Result<f64> {
    if !(t > 10.0) || !t.is_finite() {
        return Err(Error::domain(format!("theta needs t > 10, got {t}")));
    }
    Ok(theta_unchecked(t))
}

fn log_sqrt_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=2048u32)
            .map(|n| {
                let n = f64::from(n);
                (n.ln(), 1.0 / n.sqrt())
            })
            .collect()
    })
}

fn horner(coeffs: &[f64], w: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * w + c)
}

pub(crate) fn riemann_siegel_unchecked(t: f64) -> f64 {
    let a = (t / TWO_PI).sqrt();
    let n = a.floor() as usize;
    let th = theta_unchecked(t);
    let table = log_sqrt_table();
    let mut main = 0.0;
    for k in 1..=n {
        let (ln_k, inv_sqrt) = match table.get(k - 1) {
            Some(&entry) => entry,
            None => {
                let kf = k as f64;
                (kf.ln(), 1.0 / kf.sqrt())
            }
        };
        main += (th - t * ln_k).cos() * inv_sqrt;
    }
    main *= 2.0;

    let w = a - n as f64 - 0.5;
    let inv_a = 1.0 / a;
    let remainder = [&C0[..], &C1[..], &C2[..], &C3[..], &C4[..]]
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * inv_a + horner(c, w));
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    main + sign * remainder / a.sqrt()
}

/// Hardy's Z function by the Riemann-Siegel formula with the C0..C4
/// remainder terms.
pub fn riemann_siegel_z(t: f64) -> Result<f64> {
    if !(t >= 10.0) || !t.is_finite() {
        return Err(Error::domain(format!("Z needs t >= 10, got {t}")));
    }
    Ok(riemann_siegel_unchecked(t))
}

/// Bernoulli numbers B_2 .. B_24.
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// zeta(1/2 + it) by Euler-Maclaurin summation. Meant for moderate t only:
/// the cost grows linearly with t.
fn zeta_critical_line(t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let big_n = t.ceil() as usize + 30;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..big_n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = big_n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp();
    sum += n_pow * nf / (s - 1.0) + n_pow * 0.5;
    // Tail corrections B_2k/(2k)! * s(s+1)...(s+2k-2) * N^(-s-2k+1).
    let mut rising = s;
    let mut power = n_pow / nf;
    let mut factorial = 2.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        sum += rising * power * (b / factorial);
        let j = 2 * k + 1;
        rising *= (s + j as f64) * (s + (j + 1) as f64);
        power /= nf * nf;
        factorial *= ((j + 2) * (j + 3)) as f64;
    }
    sum
}

/// Z(t) as used by the zero scan: exact summation below t = 100, the
/// Riemann-Siegel formula above.
pub fn z_function(t: f64) -> f64 {
    if t < EULER_MACLAURIN_BELOW {
        let phase = Complex64::from_polar(1.0, theta_unchecked(t));
        (phase * zeta_critical_line(t)).re
    } else {
        riemann_siegel_unchecked(t)
    }
}

/// Principal branch of the Lambert W function for x >= 0.
fn lambert_w(x: f64) -> f64 {
    let mut w = if x < 1.0 {
        x
    } else {
        x.ln() - x.ln().ln().max(0.0)
    };
    for _ in 0..50 {
        let ew = w.exp();
        let step = (w * ew - x) / (ew * (w + 1.0));
        w -= step;
        if step.abs() < 1e-15 * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// The Gram point g_k, the solution of theta(g_k) = k*pi.
pub fn gram_point(k: u64) -> f64 {
    gram_point_f(k as f64)
}

pub(crate) fn gram_point_f(k: f64) -> f64 {
    let target = k * PI;
    let shifted = k + 0.125;
    let mut t = TWO_PI * shifted / lambert_w(shifted / std::f64::consts::E);
    // theta is increasing past t = 2*pi, so [lo, hi] stays a valid bracket.
    let mut lo = 10.0_f64;
    let mut hi = f64::INFINITY;
    for _ in 0..100 {
        let f = theta_unchecked(t) - target;
        if f > 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
        let mut next = t - f / theta_prime(t);
        if !(next > lo && next < hi) {
            next = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * t
            };
        }
        if (next - t).abs() <= 1e-12 * t.max(1.0) {
            return next;
        }
        t = next;
    }
    t
}


// Taylor coefficients in w = p - 1/2 of the Riemann-Siegel remainder terms,
// generated by tools/rs_coefficients.py.
#[allow(clippy::excessive_precision)]
mod coefficients {
    pub(super) const C0: [f64; 47] = [
        3.8268343236508977173e-1,
        0.0,
        1.7489618723100817974,
        0.0,
        2.1180252076854963732,
        0.0,
        -8.7072166705114807392e-1,
        0.0,
        -3.4733112243465167073,
        0.0,
        -1.6626947308999324496,
        0.0,
        1.2167312889192321345,
        0.0,
        1.3014304161007975773,
        0.0,
        3.0511021827361672421e-2,
        0.0,
        -3.7558030515450952428e-1,
        0.0,
        -1.0857844165640659744e-1,
        0.0,
        5.1832902999549623376e-2,
        0.0,
        2.999948061990227592e-2,
        0.0,
        -2.275939670612564226e-3,
        0.0,
        -4.3826474165803383059e-3,
        0.0,
        -4.0642301837298469931e-4,
        0.0,
        4.0060977854221139279e-4,
        0.0,
        8.9710579913888412978e-5,
        0.0,
        -2.3025650027239107116e-5,
        0.0,
        -9.3800066019067924847e-6,
        0.0,
        6.3235149476091075042e-7,
        0.0,
        6.5510228192315016662e-7,
        0.0,
        2.2105237455526972587e-8,
        0.0,
        -3.322316176445628835e-8,
    ];
    pub(super) const C1: [f64; 48] = [
        0.0,
        -5.365020525675069406e-2,
        0.0,
        1.102781874108148244e-1,
        0.0,
        1.2317200154315226313,
        0.0,
        1.2634964862799457884,
        0.0,
        -1.6951089975595030184,
        0.0,
        -2.999871196765010089,
        0.0,
        -1.0819944959899208643e-1,
        0.0,
        1.9407662946212712688,
        0.0,
        7.8384235615006865329e-1,
        0.0,
        -5.0548296679003659188e-1,
        0.0,
        -3.8450723496057974051e-1,
        0.0,
        3.7472646465315320676e-2,
        0.0,
        9.0920266109731763173e-2,
        0.0,
        1.0449237550064509218e-2,
        0.0,
        -1.2582979651583416497e-2,
        0.0,
        -3.3995037211512740851e-3,
        0.0,
        1.0410950537714891268e-3,
        0.0,
        5.0109490511184868604e-4,
        0.0,
        -3.9563596690031815595e-5,
        0.0,
        -4.7624592453571896387e-5,
        0.0,
        -1.8539355338085132273e-6,
        0.0,
        3.193691808006897204e-6,
        0.0,
        4.0907807608506066327e-7,
        0.0,
        -1.5446624332576632128e-7,
    ];
    pub(super) const C2: [f64; 51] = [
        5.1885428302931684938e-3,
        0.0,
        1.2378633552253898413e-3,
        0.0,
        -1.8137505725166997411e-1,
        0.0,
        1.4291492748532126541e-1,
        0.0,
        1.3303391766687565325,
        0.0,
        3.5224723534037336775e-1,
        0.0,
        -2.4210015958919507238,
        0.0,
        -1.6760787022538108853,
        0.0,
        1.3689416723328372184,
        0.0,
        1.5539019430222983221,
        0.0,
        -1.722164273472998052e-1,
        0.0,
        -6.359068055045430989e-1,
        0.0,
        -9.9116498730412081054e-2,
        0.0,
        1.4033480067387008951e-1,
        0.0,
        4.7823520198272922364e-2,
        0.0,
        -1.7356040641479780798e-2,
        0.0,
        -1.0225012534028591844e-2,
        0.0,
        9.2741491597948878994e-4,
        0.0,
        1.3572194372373385345e-3,
        0.0,
        6.41369012029388009e-5,
        0.0,
        -1.2300805698196629883e-4,
        0.0,
        -1.8313507404789202555e-5,
        0.0,
        7.8216286043226273085e-6,
        0.0,
        2.0087542484759945503e-6,
        0.0,
        -3.3532765393185713791e-7,
        0.0,
        -1.4616020917418232e-7,
    ];
    pub(super) const C3: [f64; 52] = [
        0.0,
        -2.6794321814389138085e-3,
        0.0,
        2.9953721091035149637e-2,
        0.0,
        -4.2570172541828697985e-2,
        0.0,
        -2.8997965779803887507e-1,
        0.0,
        4.8888319992354459725e-1,
        0.0,
        1.2308558763957460812,
        0.0,
        -8.2975607085274087042e-1,
        0.0,
        -2.2497635366665668665,
        0.0,
        7.8451399610054713794e-2,
        0.0,
        1.7467492800868894004,
        0.0,
        4.5968080979749935109e-1,
        0.0,
        -6.6193534710397749464e-1,
        0.0,
        -3.1590441036173634579e-1,
        0.0,
        1.2844792545207495989e-1,
        0.0,
        1.0073382716626152301e-1,
        0.0,
        -9.5301838488252677595e-3,
        0.0,
        -1.9264421687514088898e-2,
        0.0,
        -1.2464637158769291712e-3,
        0.0,
        2.424396964110308574e-3,
        0.0,
        4.3764769774185701828e-4,
        0.0,
        -2.0714032687001791276e-4,
        0.0,
        -6.2743445041865155604e-5,
        0.0,
        1.1575343814595669368e-5,
        0.0,
        5.883854924540380228e-6,
        0.0,
        -3.1246774006962363476e-7,
        0.0,
        -4.0240657754967411403e-7,
    ];
    pub(super) const C4: [f64; 79] = [
        4.6483389361763381854e-4,
        0.0,
        -4.0226429461361883039e-3,
        0.0,
        3.8471770517961268836e-3,
        0.0,
        6.5811751358094860021e-2,
        0.0,
        -1.9604124343694449118e-1,
        0.0,
        -2.0854053686358853244e-1,
        0.0,
        9.5077541851417509458e-1,
        0.0,
        5.3415353129148739761e-1,
        0.0,
        -1.6763494411763400796,
        0.0,
        -1.0767471578751289928,
        0.0,
        1.2353393016565969853,
        0.0,
        1.0257825340057275772,
        0.0,
        -4.0124095793988544379e-1,
        0.0,
        -5.036663995108303448e-1,
        0.0,
        3.5734877955027449858e-2,
        0.0,
        1.4431763086785416624e-1,
        0.0,
        1.5091527417903469417e-2,
        0.0,
        -2.6098874779194361318e-2,
        0.0,
        -6.126628379519261749e-3,
        0.0,
        3.0775031298708411848e-3,
        0.0,
        1.1562478934088752316e-3,
        0.0,
        -2.2775966758472127517e-4,
        0.0,
        -1.4189637118181445573e-4,
        0.0,
        7.4648603079556281417e-6,
        0.0,
        1.2479701645401802854e-5,
        0.0,
        4.8639451821956874134e-7,
        0.0,
        -8.2102374580653942269e-7,
        0.0,
        -9.223268936247987727e-8,
        0.0,
        4.1034384227871738973e-8,
        0.0,
        7.6347524174186012239e-9,
        0.0,
        -2.8842881647959612899e-9,
        0.0,
        -3.1233527554180695936e-8,
        0.0,
        -6.9632983227035025922e-7,
        0.0,
        -1.5598650226548652414e-5,
        0.0,
        -3.4621090256663233422e-4,
        0.0,
        -7.6174971828683223102e-3,
        0.0,
        -1.6622589362489448393e-1,
        0.0,
        -3.59899572295765352,
        0.0,
        -7.7344292423024671401e+1,
        0.0,
        -1.6504232847758903657e+3,
    ];
}
use coefficients::{C0, C1, C2, C3, C4};
