//! Rayon kernels. Same signatures and bit-identical results as [`super::seq`].

use num_complex::Complex64;
use rayon::prelude::*;

use super::*;

pub fn fill_uniform(amps: &mut [Complex64]) {
    let v = Complex64::new(1.0 / (amps.len() as f64).sqrt(), 0.0);
    amps.par_iter_mut().for_each(|a| *a = v);
}

pub fn apply_cost_phase(amps: &mut [Complex64], diag: &[f64], gamma: f64) {
    amps.par_chunks_mut(CHUNK)
        .zip(diag.par_chunks(CHUNK))
        .for_each(|(a, d)| phase_chunk(a, d, gamma));
}

pub fn apply_cost_phase_pair(
    psi: &mut [Complex64],
    lam: &mut [Complex64],
    diag: &[f64],
    gamma: f64,
) -> Complex64 {
    fold(
        psi.par_chunks_mut(CHUNK)
            .zip(lam.par_chunks_mut(CHUNK))
            .zip(diag.par_chunks(CHUNK))
            .map(|((p, l), d)| phase_pair_chunk(p, l, d, gamma))
            .collect(),
    )
}

pub fn apply_mixer(amps: &mut [Complex64], beta: f64) {
    let n = qubits_of(amps.len());
    let (s, c) = sincos(beta);
    let low = n.min(BLOCK_BITS);
    amps.par_chunks_mut(1 << low)
        .for_each(|block| rotate_block_low(block, low, c, s));
    for q in low..n {
        let stride = 1usize << q;
        amps.par_chunks_mut(2 * stride).for_each(|pair| {
            let (lo, hi) = pair.split_at_mut(stride);
            lo.par_chunks_mut(CHUNK)
                .zip(hi.par_chunks_mut(CHUNK))
                .for_each(|(l, h)| rotate_halves(l, h, c, s));
        });
    }
}

pub fn apply_mixer_pair(psi: &mut [Complex64], lam: &mut [Complex64], beta: f64) -> Complex64 {
    let n = qubits_of(psi.len());
    let (s, c) = sincos(beta);
    let low = n.min(BLOCK_BITS);
    let low_partials = psi
        .par_chunks_mut(1 << low)
        .zip(lam.par_chunks_mut(1 << low))
        .map(|(p, l)| rotate_block_low_pair(p, l, low, c, s))
        .collect();
    let mut high = Vec::with_capacity(n - low);
    for q in low..n {
        let stride = 1usize << q;
        let partials: Vec<Vec<Complex64>> = psi
            .par_chunks_mut(2 * stride)
            .zip(lam.par_chunks_mut(2 * stride))
            .map(|(p, l)| {
                let (plo, phi) = p.split_at_mut(stride);
                let (llo, lhi) = l.split_at_mut(stride);
                plo.par_chunks_mut(CHUNK)
                    .zip(phi.par_chunks_mut(CHUNK))
                    .zip(llo.par_chunks_mut(CHUNK))
                    .zip(lhi.par_chunks_mut(CHUNK))
                    .map(|(((a, b), c2), d)| rotate_halves_pair(a, b, c2, d, c, s))
                    .collect()
            })
            .collect();
        high.push(partials.concat());
    }
    fold_mixer_partials(low_partials, high)
}

pub fn apply_mirror_mixer(amps: &mut [Complex64], beta: f64) {
    let (s, c) = sincos(beta);
    let (lo, hi) = amps.split_at_mut(amps.len() / 2);
    lo.par_chunks_mut(CHUNK)
        .zip(hi.par_rchunks_mut(CHUNK))
        .for_each(|(a, b)| mirror_halves(a, b, c, s));
}

pub fn apply_mirror_mixer_pair(psi: &mut [Complex64], lam: &mut [Complex64], beta: f64) -> Complex64 {
    let (s, c) = sincos(beta);
    let half = psi.len() / 2;
    let (plo, phi) = psi.split_at_mut(half);
    let (llo, lhi) = lam.split_at_mut(half);
    fold(
        plo.par_chunks_mut(CHUNK)
            .zip(phi.par_rchunks_mut(CHUNK))
            .zip(llo.par_chunks_mut(CHUNK))
            .zip(lhi.par_rchunks_mut(CHUNK))
            .map(|(((a, b), c2), d)| mirror_halves_pair(a, b, c2, d, c, s))
            .collect(),
    )
}

pub fn expectation(amps: &[Complex64], diag: &[f64]) -> f64 {
    fold(
        amps.par_chunks(CHUNK)
            .zip(diag.par_chunks(CHUNK))
            .map(|(a, d)| expectation_chunk(a, d))
            .collect(),
    )
}

pub fn apply_diag(out: &mut [Complex64], amps: &[Complex64], diag: &[f64]) -> f64 {
    fold(
        out.par_chunks_mut(CHUNK)
            .zip(amps.par_chunks(CHUNK))
            .zip(diag.par_chunks(CHUNK))
            .map(|((o, a), d)| apply_diag_chunk(o, a, d))
            .collect(),
    )
}

pub fn mixer_inner(lam: &[Complex64], psi: &[Complex64]) -> Complex64 {
    let n = qubits_of(psi.len());
    fold(
        lam.par_chunks(CHUNK)
            .enumerate()
            .map(|(c, l)| mixer_inner_chunk(c * CHUNK, l, psi, n))
            .collect(),
    )
}

pub fn norm_sqr(amps: &[Complex64]) -> f64 {
    fold(amps.par_chunks(CHUNK).map(norm_chunk).collect())
}
