//! Modified Bessel functions of the second kind K₀, K₁ (plus K₂, K₃ by upward
//! recurrence), accurate to ~1e-15 relative over (0, ∞).
//!
//! For x ≤ 2 the classical ascending series are used:
//!   K₀(x) = −(ln(x/2) + γ)·I₀(x) + Σ_{k≥1} H_k (x²/4)^k / (k!)²
//!   K₁(x) = 1/x + ln(x/2)·I₁(x) − (x/4)·Σ_{k≥0} (H_k + H_{k+1} − 2γ) (x²/4)^k / (k!(k+1)!)
//! For x > 2, Chebyshev fits of √x·eˣ·K_ν(x) in t = 4/x − 1 (27 terms, fit
//! residual below 3e-19) are evaluated by the Clenshaw recurrence.

use crate::constants::EULER_GAMMA;

/// Chebyshev coefficients of √x·eˣ·K₀(x) in t = 4/x − 1, x ∈ [2, ∞).
/// Convention: f(t) = c[0]/2 + Σ_{k≥1} c[k]·T_k(t).
const K0_CHEB: [f64; 27] = [
    2.440_303_082_065_955_4,
    -0.031_448_101_311_964_5,
    1.569_883_885_730_053_4e-3,
    -1.284_954_958_162_780_3e-4,
    1.394_981_371_887_65e-5,
    -1.831_755_522_719_119_5e-6,
    2.766_813_639_445_015e-7,
    -4.660_489_897_687_947_7e-8,
    8.574_034_017_414_226e-9,
    -1.697_534_509_389_061_5e-9,
    3.577_397_281_400_328_4e-10,
    -7.957_489_244_477_397e-11,
    1.855_949_114_954_926_5e-11,
    -4.514_597_883_374_518_5e-12,
    1.140_340_588_207_342_6e-12,
    -2.980_096_923_148_138_7e-13,
    8.032_890_775_067_389e-14,
    -2.227_513_326_743_830_5e-14,
    6.340_076_476_214_495e-15,
    -1.848_593_377_763_063_2e-15,
    5.512_055_995_364_053e-16,
    -1.678_231_115_328_942_2e-16,
    5.210_391_506_334_065e-17,
    -1.647_579_881_804_586_7e-17,
    5.300_414_907_371_605_5e-18,
    -1.733_120_765_470_374_5e-18,
    5.753_747_571_637_798_5e-19,
];

/// Chebyshev coefficients of √x·eˣ·K₁(x) in t = 4/x − 1, x ∈ [2, ∞).
const K1_CHEB: [f64; 27] = [
    2.720_626_190_484_442_7,
    0.103_923_736_576_817_24,
    -2.857_816_859_622_779_4e-3,
    1.952_155_184_713_516_3e-4,
    -1.936_197_974_166_083e-5,
    2.406_484_947_837_217e-6,
    -3.501_960_603_087_812_5e-7,
    5.741_084_125_450_049e-8,
    -1.034_576_246_567_809_7e-8,
    2.015_049_755_197_034_6e-9,
    -4.190_354_759_341_925_6e-10,
    9.218_315_187_605_314e-11,
    -2.129_967_838_427_791e-11,
    5.139_639_673_482_343e-12,
    -1.289_173_960_949_821_2e-12,
    3.348_419_666_052_201_3e-13,
    -8.976_705_182_009_106e-14,
    2.477_154_424_216_995e-14,
    -7.019_837_089_149_079e-15,
    2.038_703_166_072_871_8e-15,
    -6.057_047_266_364_41e-16,
    1.838_093_564_190_632_2e-16,
    -5.689_462_561_270_325_7e-17,
    1.794_050_291_237_591_7e-17,
    -5.756_724_416_534_871_4e-18,
    1.877_811_474_987_962_6e-18,
    -6.220_193_196_268_905e-19,
];

/// Clenshaw evaluation of c[0]/2 + Σ_{k≥1} c[k]·T_k(t).
fn cheb_eval(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0f64;
    let mut b2 = 0.0f64;
    for &ck in c[1..].iter().rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + 0.5 * c[0]
}

/// Ascending-series K₀ for 0 < x ≤ 2.
fn k0_small(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut i0 = 1.0; // I₀ partial sum
    let mut s = 0.0; // Σ H_k q^k/(k!)²
    let mut term = 1.0;
    let mut h = 0.0;
    let mut k = 0.0f64;
    loop {
        k += 1.0;
        term *= q / (k * k);
        h += 1.0 / k;
        i0 += term;
        s += term * h;
        if term * (h + 1.0) <= 1e-17 * (i0 + s) {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + s
}

/// Ascending-series K₁ for 0 < x ≤ 2.
fn k1_small(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut i1s = 1.0; // Σ q^k/(k!(k+1)!), so I₁ = (x/2)·i1s
    let mut term = 1.0;
    let mut h2 = 1.0 - 2.0 * EULER_GAMMA; // H_0 + H_1 − 2γ
    let mut s = h2;
    let mut k = 0.0f64;
    loop {
        k += 1.0;
        term *= q / (k * (k + 1.0));
        h2 += 1.0 / k + 1.0 / (k + 1.0);
        i1s += term;
        s += term * h2;
        if term * (h2.abs() + 1.0) <= 1e-17 * (i1s + s.abs()) {
            break;
        }
    }
    let i1 = 0.5 * x * i1s;
    1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * s
}

/// Modified Bessel function K₀(x), x > 0.
pub fn k0(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "k0 requires finite x > 0");
    if x <= 2.0 {
        k0_small(x)
    } else {
        cheb_eval(&K0_CHEB, 4.0 / x - 1.0) * (-x).exp() / x.sqrt()
    }
}

/// Modified Bessel function K₁(x), x > 0.
pub fn k1(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "k1 requires finite x > 0");
    if x <= 2.0 {
        k1_small(x)
    } else {
        cheb_eval(&K1_CHEB, 4.0 / x - 1.0) * (-x).exp() / x.sqrt()
    }
}

/// K₂(x) = K₀(x) + 2K₁(x)/x (upward recurrence, stable for K).
pub fn k2(x: f64) -> f64 {
    k0(x) + 2.0 * k1(x) / x
}

/// K₃(x) = K₁(x) + 4K₂(x)/x.
pub fn k3(x: f64) -> f64 {
    k1(x) + 4.0 * k2(x) / x
}
