//! Single-threaded kernels.

use num_complex::Complex64;

use super::*;

/// Sets every amplitude to `2^(-n/2)`.
pub fn fill_uniform(amps: &mut [Complex64]) {
    let v = Complex64::new(1.0 / (amps.len() as f64).sqrt(), 0.0);
    amps.iter_mut().for_each(|a| *a = v);
}

/// `amps[k] *= exp(-i gamma diag[k])`.
pub fn apply_cost_phase(amps: &mut [Complex64], diag: &[f64], gamma: f64) {
    for (a, d) in amps.chunks_mut(CHUNK).zip(diag.chunks(CHUNK)) {
        phase_chunk(a, d, gamma);
    }
}

/// Applies `exp(-i gamma H_C)` to both vectors and returns `<lam|H_C|psi>`.
pub fn apply_cost_phase_pair(
    psi: &mut [Complex64],
    lam: &mut [Complex64],
    diag: &[f64],
    gamma: f64,
) -> Complex64 {
    fold(
        psi.chunks_mut(CHUNK)
            .zip(lam.chunks_mut(CHUNK))
            .zip(diag.chunks(CHUNK))
            .map(|((p, l), d)| phase_pair_chunk(p, l, d, gamma))
            .collect(),
    )
}

/// Applies `exp(-i beta X)` to every qubit.
pub fn apply_mixer(amps: &mut [Complex64], beta: f64) {
    let n = qubits_of(amps.len());
    let (s, c) = sincos(beta);
    let low = n.min(BLOCK_BITS);
    for block in amps.chunks_mut(1 << low) {
        rotate_block_low(block, low, c, s);
    }
    for q in low..n {
        let stride = 1usize << q;
        for pair in amps.chunks_mut(2 * stride) {
            let (lo, hi) = pair.split_at_mut(stride);
            rotate_halves(lo, hi, c, s);
        }
    }
}

/// Applies `exp(-i beta X)` to every qubit of both vectors and returns
/// `<lam|H_M|psi>` of the inputs.
pub fn apply_mixer_pair(psi: &mut [Complex64], lam: &mut [Complex64], beta: f64) -> Complex64 {
    let n = qubits_of(psi.len());
    let (s, c) = sincos(beta);
    let low = n.min(BLOCK_BITS);
    let low_partials = psi
        .chunks_mut(1 << low)
        .zip(lam.chunks_mut(1 << low))
        .map(|(p, l)| rotate_block_low_pair(p, l, low, c, s))
        .collect();
    let mut high = Vec::with_capacity(n - low);
    for q in low..n {
        let stride = 1usize << q;
        let mut partials = Vec::new();
        for (p, l) in psi.chunks_mut(2 * stride).zip(lam.chunks_mut(2 * stride)) {
            let (plo, phi) = p.split_at_mut(stride);
            let (llo, lhi) = l.split_at_mut(stride);
            for (((a, b), c2), d) in plo
                .chunks_mut(CHUNK)
                .zip(phi.chunks_mut(CHUNK))
                .zip(llo.chunks_mut(CHUNK))
                .zip(lhi.chunks_mut(CHUNK))
            {
                partials.push(rotate_halves_pair(a, b, c2, d, c, s));
            }
        }
        high.push(partials);
    }
    fold_mixer_partials(low_partials, high)
}

/// Top-qubit rotation of a flip-reduced state.
pub fn apply_mirror_mixer(amps: &mut [Complex64], beta: f64) {
    let (s, c) = sincos(beta);
    let (lo, hi) = amps.split_at_mut(amps.len() / 2);
    for (a, b) in lo.chunks_mut(CHUNK).zip(hi.rchunks_mut(CHUNK)) {
        mirror_halves(a, b, c, s);
    }
}

/// [`apply_mirror_mixer`] on both vectors, returning the top qubit's
/// `<lam|X|psi>` of the inputs.
pub fn apply_mirror_mixer_pair(psi: &mut [Complex64], lam: &mut [Complex64], beta: f64) -> Complex64 {
    let (s, c) = sincos(beta);
    let half = psi.len() / 2;
    let (plo, phi) = psi.split_at_mut(half);
    let (llo, lhi) = lam.split_at_mut(half);
    fold(
        plo.chunks_mut(CHUNK)
            .zip(phi.rchunks_mut(CHUNK))
            .zip(llo.chunks_mut(CHUNK))
            .zip(lhi.rchunks_mut(CHUNK))
            .map(|(((a, b), c2), d)| mirror_halves_pair(a, b, c2, d, c, s))
            .collect(),
    )
}

/// `sum_k |amps_k|^2 diag_k`.
pub fn expectation(amps: &[Complex64], diag: &[f64]) -> f64 {
    fold(
        amps.chunks(CHUNK)
            .zip(diag.chunks(CHUNK))
            .map(|(a, d)| expectation_chunk(a, d))
            .collect(),
    )
}

/// Writes `out = H_C amps` and returns `<amps|H_C|amps>`.
pub fn apply_diag(out: &mut [Complex64], amps: &[Complex64], diag: &[f64]) -> f64 {
    fold(
        out.chunks_mut(CHUNK)
            .zip(amps.chunks(CHUNK))
            .zip(diag.chunks(CHUNK))
            .map(|((o, a), d)| apply_diag_chunk(o, a, d))
            .collect(),
    )
}

/// `<lam|H_M|psi>` with `H_M = sum_q X_q`.
pub fn mixer_inner(lam: &[Complex64], psi: &[Complex64]) -> Complex64 {
    let n = qubits_of(psi.len());
    fold(
        lam.chunks(CHUNK)
            .enumerate()
            .map(|(c, l)| mixer_inner_chunk(c * CHUNK, l, psi, n))
            .collect(),
    )
}

pub fn norm_sqr(amps: &[Complex64]) -> f64 {
    fold(amps.chunks(CHUNK).map(norm_chunk).collect())
}
