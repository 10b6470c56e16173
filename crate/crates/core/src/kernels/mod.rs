//! State-vector kernels for a diagonal cost Hamiltonian and a transverse-field
//! mixer.
//!
//! A flip-symmetric state (`psi[k] == psi[!k]`) can be stored as its lower
//! half scaled by `sqrt(2)`. The top qubit then pairs amplitude `j` with
//! `len - 1 - j` (the `mirror` kernels) and every norm, expectation and inner
//! product computed on the half equals the full-space value.
//!
//! [`seq`] and [`par`] expose the same functions. Reductions are summed per
//! fixed-size chunk and the chunk partials folded in index order, so both
//! variants return bit-identical results regardless of thread count. The
//! crate-level functions re-exported here dispatch to [`par`] when the
//! `parallel` feature is enabled and to [`seq`] otherwise.

use num_complex::Complex64;

pub mod seq;
#[cfg(feature = "parallel")]
pub mod par;

#[cfg(feature = "parallel")]
pub use par::*;
#[cfg(not(feature = "parallel"))]
pub use seq::*;

/// Amplitudes per reduction chunk.
pub const CHUNK: usize = 1 << 12;

/// Low qubits rotated together inside one cache-resident block.
pub const BLOCK_BITS: usize = 12;

#[inline]
fn rotate_pair(a: &mut Complex64, b: &mut Complex64, c: f64, s: f64) {
    // [[c, -i s], [-i s, c]]
    let (ar, ai, br, bi) = (a.re, a.im, b.re, b.im);
    a.re = c * ar + s * bi;
    a.im = c * ai - s * br;
    b.re = c * br + s * ai;
    b.im = c * bi - s * ar;
}

#[inline]
fn rotate_halves(lo: &mut [Complex64], hi: &mut [Complex64], c: f64, s: f64) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        rotate_pair(a, b, c, s);
    }
}

#[inline]
fn rotate_stride<const S: usize>(block: &mut [Complex64], c: f64, s: f64) {
    for pair in block.chunks_exact_mut(2 * S) {
        let (lo, hi) = pair.split_at_mut(S);
        for k in 0..S {
            rotate_pair(&mut lo[k], &mut hi[k], c, s);
        }
    }
}

/// Applies the rotation on qubits `0..bits` within one block of `2^bits` amplitudes.
#[inline]
fn rotate_block_low(block: &mut [Complex64], bits: usize, c: f64, s: f64) {
    for q in 0..bits {
        match q {
            0 => rotate_stride::<1>(block, c, s),
            1 => rotate_stride::<2>(block, c, s),
            2 => rotate_stride::<4>(block, c, s),
            3 => rotate_stride::<8>(block, c, s),
            _ => {
                let stride = 1usize << q;
                for pair in block.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = pair.split_at_mut(stride);
                    rotate_halves(lo, hi, c, s);
                }
            }
        }
    }
}

/// Pair contribution `conj(la) pb + conj(lb) pa` to `<lam|X_q|psi>`, taken
/// before rotating both pairs.
#[inline]
fn rotate_pair_inner(
    pa: &mut Complex64,
    pb: &mut Complex64,
    la: &mut Complex64,
    lb: &mut Complex64,
    c: f64,
    s: f64,
) -> Complex64 {
    let inner = la.conj() * *pb + lb.conj() * *pa;
    rotate_pair(pa, pb, c, s);
    rotate_pair(la, lb, c, s);
    inner
}

#[inline]
fn rotate_halves_pair(
    plo: &mut [Complex64],
    phi: &mut [Complex64],
    llo: &mut [Complex64],
    lhi: &mut [Complex64],
    c: f64,
    s: f64,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (((pa, pb), la), lb) in plo.iter_mut().zip(phi.iter_mut()).zip(llo.iter_mut()).zip(lhi.iter_mut()) {
        acc += rotate_pair_inner(pa, pb, la, lb, c, s);
    }
    acc
}

/// Pairs `lo[t]` with `hi[len - 1 - t]`.
#[inline]
fn mirror_halves(lo: &mut [Complex64], hi: &mut [Complex64], c: f64, s: f64) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut().rev()) {
        rotate_pair(a, b, c, s);
    }
}

#[inline]
fn mirror_halves_pair(
    plo: &mut [Complex64],
    phi: &mut [Complex64],
    llo: &mut [Complex64],
    lhi: &mut [Complex64],
    c: f64,
    s: f64,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (((pa, pb), la), lb) in plo
        .iter_mut()
        .zip(phi.iter_mut().rev())
        .zip(llo.iter_mut())
        .zip(lhi.iter_mut().rev())
    {
        acc += rotate_pair_inner(pa, pb, la, lb, c, s);
    }
    acc
}

#[inline]
fn rotate_block_low_pair(
    psi: &mut [Complex64],
    lam: &mut [Complex64],
    bits: usize,
    c: f64,
    s: f64,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for q in 0..bits {
        let stride = 1usize << q;
        for (p, l) in psi.chunks_exact_mut(2 * stride).zip(lam.chunks_exact_mut(2 * stride)) {
            let (plo, phi) = p.split_at_mut(stride);
            let (llo, lhi) = l.split_at_mut(stride);
            acc += rotate_halves_pair(plo, phi, llo, lhi, c, s);
        }
    }
    acc
}

// Cody-Waite split of pi/2: the first part has 33 significant bits.
const PIO2_HI: f64 = 1.570_796_326_734_125_6;
const PIO2_LO: f64 = 6.077_100_506_506_192e-11;
const SINCOS_FAST_LIMIT: f64 = 1e5;
const ROUND_SHIFTER: f64 = 6_755_399_441_055_744.0;

/// `(sin x, cos x)` by quadrant reduction and minimax polynomials on
/// `[-pi/4, pi/4]`; within a few ulp of libm for `|x| < 1e5`, libm beyond.
#[inline]
pub fn sincos(x: f64) -> (f64, f64) {
    if !(x.abs() < SINCOS_FAST_LIMIT) {
        return x.sin_cos();
    }
    // round-to-nearest via the 1.5 * 2^52 shifter; no libm call without SSE4.1
    let k = (x * std::f64::consts::FRAC_2_PI + ROUND_SHIFTER) - ROUND_SHIFTER;
    let r = (x - k * PIO2_HI) - k * PIO2_LO;
    let z = r * r;
    let sp = -1.666_666_666_666_663_2e-1
        + z * (8.333_333_333_322_49e-3
            + z * (-1.984_126_982_985_795e-4
                + z * (2.755_731_370_707_007e-6 + z * (-2.505_076_025_340_686e-8 + z * 1.589_690_995_211_55e-10))));
    let sin_r = r + r * z * sp;
    let cp = 4.166_666_666_666_660_2e-2
        + z * (-1.388_888_888_887_411e-3
            + z * (2.480_158_728_947_673e-5
                + z * (-2.755_731_435_139_066_3e-7 + z * (2.087_572_321_298_175e-9 + z * -1.135_964_755_778_819_5e-11))));
    let cos_r = 1.0 - 0.5 * z + z * z * cp;
    // branch-free quadrant selection
    let q = k as i64 as u64;
    let swap = (q & 1).wrapping_neg();
    let (sr, cr) = (sin_r.to_bits(), cos_r.to_bits());
    let sin_bits = (cr & swap) | (sr & !swap);
    let cos_bits = (sr & swap) | (cr & !swap);
    let sin_sign = (q & 2) << 62;
    let cos_sign = (q.wrapping_add(1) & 2) << 62;
    (f64::from_bits(sin_bits ^ sin_sign), f64::from_bits(cos_bits ^ cos_sign))
}

#[inline]
fn phase_chunk(amps: &mut [Complex64], diag: &[f64], gamma: f64) {
    for (a, &d) in amps.iter_mut().zip(diag) {
        let (s, c) = sincos(-gamma * d);
        *a *= Complex64::new(c, s);
    }
}

/// Rotates both vectors by the same phases and returns `sum conj(lam) d psi`
/// over the chunk. The sum is phase-invariant.
#[inline]
fn phase_pair_chunk(
    psi: &mut [Complex64],
    lam: &mut [Complex64],
    diag: &[f64],
    gamma: f64,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((p, l), &d) in psi.iter_mut().zip(lam.iter_mut()).zip(diag) {
        acc += l.conj() * *p * d;
        let (s, c) = sincos(-gamma * d);
        let f = Complex64::new(c, s);
        *p *= f;
        *l *= f;
    }
    acc
}

#[inline]
fn expectation_chunk(amps: &[Complex64], diag: &[f64]) -> f64 {
    amps.iter().zip(diag).map(|(a, &d)| a.norm_sqr() * d).sum()
}

#[inline]
fn apply_diag_chunk(out: &mut [Complex64], amps: &[Complex64], diag: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((o, a), &d) in out.iter_mut().zip(amps).zip(diag) {
        acc += a.norm_sqr() * d;
        *o = a * d;
    }
    acc
}

#[inline]
fn norm_chunk(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// `sum_{k in chunk} conj(lam_k) sum_q psi_{k xor 2^q}`.
#[inline]
fn mixer_inner_chunk(start: usize, lam: &[Complex64], psi: &[Complex64], n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (off, l) in lam.iter().enumerate() {
        let k = start + off;
        let mut flipped = Complex64::new(0.0, 0.0);
        for q in 0..n {
            flipped += psi[k ^ (1 << q)];
        }
        acc += l.conj() * flipped;
    }
    acc
}

fn fold<T: std::iter::Sum<T>>(partials: Vec<T>) -> T {
    partials.into_iter().sum()
}

/// Partial sums of the fused adjoint mixer, folded in a fixed order: the
/// low-qubit block partials first, then each high qubit's chunk partials.
fn fold_mixer_partials(low: Vec<Complex64>, high: Vec<Vec<Complex64>>) -> Complex64 {
    let mut total = fold(low);
    for h in high {
        total += fold(h);
    }
    total
}

pub(crate) fn qubits_of(len: usize) -> usize {
    debug_assert!(len.is_power_of_two());
    len.trailing_zeros() as usize
}
