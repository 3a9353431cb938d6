//! Inlinable cosine for the O(n²) characteristic-function sums.
//!
//! Cody-Waite reduction by π/2 (33-bit leading part, so `k·PIO2_HI` is exact
//! for |k| < 2²⁰) and the fdlibm kernels on [−π/4, π/4]. Arguments beyond
//! [`REDUCE_LIMIT`] go to libm.

#![allow(clippy::excessive_precision)] // fdlibm constants as published

use core::f64::consts::FRAC_2_PI;

const PIO2_HI: f64 = 1.570_796_326_734_125_614_17;
const PIO2_LO: f64 = 6.077_100_506_506_192_249_32e-11;
const REDUCE_LIMIT: f64 = 1.0e6;
/// 1.5·2⁵²: adding and subtracting it rounds to the nearest integer.
const ROUND_MAGIC: f64 = 6_755_399_441_055_744.0;

const C1: f64 = 4.166_666_666_666_660_190_37e-02;
const C2: f64 = -1.388_888_888_887_410_957_47e-03;
const C3: f64 = 2.480_158_728_947_672_941_18e-05;
const C4: f64 = -2.755_731_435_139_066_330_35e-07;
const C5: f64 = 2.087_572_321_298_174_827_9e-09;
const C6: f64 = -1.135_964_755_778_819_482_76e-11;

const S1: f64 = -1.666_666_666_666_663_243_48e-01;
const S2: f64 = 8.333_333_333_322_489_461_28e-03;
const S3: f64 = -1.984_126_982_985_794_931_17e-04;
const S4: f64 = 2.755_731_370_707_006_767_69e-06;
const S5: f64 = -2.505_076_025_340_686_255_97e-08;
const S6: f64 = 1.589_690_995_211_550_070_5e-10;

#[inline(always)]
fn kernel_cos(r: f64) -> f64 {
    let z = r * r;
    let p = z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6)))));
    let hz = 0.5 * z;
    let w = 1.0 - hz;
    w + (((1.0 - w) - hz) + z * p)
}

#[inline(always)]
fn kernel_sin(r: f64) -> f64 {
    let z = r * r;
    let v = z * r;
    let p = S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)));
    r + v * (S1 + z * p)
}

/// Reduced-range cosine; valid for |x| < [`REDUCE_LIMIT`]. Quadrant selection
/// is done on the bit patterns so the loop body has no branches.
#[inline(always)]
fn cos_reduced(x: f64) -> f64 {
    let shifted = x * FRAC_2_PI + ROUND_MAGIC;
    let quadrant = shifted.to_bits();
    let k = shifted - ROUND_MAGIC;
    let r = (x - k * PIO2_HI) - k * PIO2_LO;
    let (c, s) = (kernel_cos(r).to_bits(), kernel_sin(r).to_bits());
    let use_sin = 0u64.wrapping_sub(quadrant & 1);
    let negate = (quadrant.wrapping_add(1) & 2) << 62;
    f64::from_bits(((c & !use_sin) | (s & use_sin)) ^ negate)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    if x.abs() < REDUCE_LIMIT {
        cos_reduced(x)
    } else {
        libm::cos(x)
    }
}

/// `Σ cos(y·eₖ)` with four interleaved partial sums. `e_max` must bound
/// `|eₖ|`; it selects the branch-free path when no argument needs libm.
#[inline]
pub(crate) fn sum_cos_scaled(y: f64, e: &[f64], e_max: f64) -> f64 {
    if (y * e_max).abs() < REDUCE_LIMIT {
        sum4(y, e, cos_reduced)
    } else {
        sum4(y, e, cos)
    }
}

#[inline(always)]
fn sum4(y: f64, e: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut chunks = e.chunks_exact(4);
    for c in &mut chunks {
        acc[0] += f(y * c[0]);
        acc[1] += f(y * c[1]);
        acc[2] += f(y * c[2]);
        acc[3] += f(y * c[3]);
    }
    let mut tail = 0.0;
    for &v in chunks.remainder() {
        tail += f(y * v);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Largest |v|; NaN propagates as +∞.
pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}
