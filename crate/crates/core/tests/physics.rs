//! Cross-checks against independent reference implementations written here:
//! a dense matrix-exponential circuit, shot sampling, a brute-force
//! fine-grid peak search and direct per-configuration cost evaluation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ris_qaoa::coupling::{build_model, normalize, CouplingModelSpec, IsingInstance, ModelId};
use ris_qaoa::geometry::{build_geometry, ArrayGeometry, Direction, ScenarioConfig};
use ris_qaoa::ising::{build_cost_diagonal, cost_of_index, Bitstring};
use ris_qaoa::oracle::{exhaustive_search, gray_code_costs};
use ris_qaoa::qaoa::{apply_circuit, expectation, sample_counts, QaoaParams};
use ris_qaoa::validator::{compute_pattern, find_peak, pointing_error, GridSpec};

fn hamiltonian(model: ModelId, size: usize) -> IsingInstance {
    let g = build_geometry(&ScenarioConfig::square(size)).unwrap();
    normalize(&build_model(&g, &CouplingModelSpec::new(model)).unwrap().instance)
        .unwrap()
        .into_hamiltonian()
}

type Matrix = Vec<Vec<Complex64>>;

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `exp(-i beta sum_q X_q)` by scaling and squaring of a Taylor series.
fn dense_mixer(n: usize, beta: f64) -> Matrix {
    let dim = 1 << n;
    let zero = Complex64::new(0.0, 0.0);
    let squarings = 8;
    let scale = beta / f64::from(1 << squarings);
    let mut gen = vec![vec![zero; dim]; dim];
    for (k, row) in gen.iter_mut().enumerate() {
        for q in 0..n {
            row[k ^ (1 << q)] += Complex64::new(0.0, -scale);
        }
    }
    let mut result: Matrix = (0..dim).map(|i| (0..dim).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { zero }).collect()).collect();
    let mut term = result.clone();
    for k in 1..30 {
        term = matmul(&term, &gen).into_iter().map(|r| r.into_iter().map(|v| v / k as f64).collect()).collect();
        for i in 0..dim {
            for j in 0..dim {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

#[test]
fn circuit_matches_dense_matrix_exponential() {
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let edges: Vec<_> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, rng.random_range(-1.0..1.0)))
        .collect();
    let inst = IsingInstance::from_edges(n, &edges).unwrap();
    // x^T J x over the full symmetric matrix
    let costs: Vec<f64> = (0..1usize << n)
        .map(|k| {
            let x: Vec<f64> = (0..n).map(|i| if k >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| inst.coupling(i, j) * x[i] * x[j]).sum()
        })
        .collect();
    let params = QaoaParams::new(vec![0.7, -1.3, 2.1], vec![0.4, 1.9, -0.6]).unwrap();

    let dim = 1 << n;
    let mut psi = vec![Complex64::new(0.25, 0.0); dim];
    for (&g, &b) in params.gamma.iter().zip(&params.beta) {
        for (a, &c) in psi.iter_mut().zip(&costs) {
            *a *= Complex64::cis(-g * c);
        }
        let u = dense_mixer(n, b);
        psi = (0..dim).map(|i| (0..dim).map(|j| u[i][j] * psi[j]).sum()).collect();
    }

    let diag = build_cost_diagonal(&inst).unwrap();
    for (k, &c) in costs.iter().enumerate() {
        assert!((diag.values()[k] - c).abs() < 1e-14);
    }
    let state = apply_circuit(&diag, &params).unwrap();
    let worst = state.amplitudes().iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-12, "max amplitude deviation {worst}");
}

#[test]
fn sampled_mean_agrees_with_exact_expectation() {
    let diag = build_cost_diagonal(&hamiltonian(ModelId::FarField, 3)).unwrap();
    let params = QaoaParams::new(vec![1.1, 1.6, 2.0], vec![0.6, 0.4, 0.2]).unwrap();
    let state = apply_circuit(&diag, &params).unwrap();
    let exact = expectation(&state, &diag).unwrap();
    let second: f64 = state.amplitudes().iter().zip(diag.values()).map(|(a, c)| a.norm_sqr() * c * c).sum();
    let shots = 1_000_000;
    let counts = sample_counts(&state, shots, 2024);
    assert_eq!(counts.iter().sum::<u64>(), shots as u64);
    let mean: f64 = counts.iter().zip(diag.values()).map(|(&n, c)| n as f64 * c).sum::<f64>() / shots as f64;
    let std_err = ((second - exact * exact) / shots as f64).sqrt();
    assert!((mean - exact).abs() < 3.0 * std_err, "mean {mean} exact {exact} se {std_err}");
}

fn fine_peak(geom: &ArrayGeometry, bits: &Bitstring, step: f64) -> Direction {
    let phases = bits.phases();
    let mut best = (f64::NEG_INFINITY, Direction::new(0.0, 0.0));
    let (nt, np) = ((90.0 / step) as usize, (360.0 / step) as usize);
    for it in 0..=nt {
        let t = it as f64 * step;
        let tr = t.to_radians();
        for ip in 0..np {
            let p = ip as f64 * step;
            let pr = p.to_radians();
            let af: Complex64 = geom
                .coords
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| {
                    let geo = geom.wavenumber * (x * tr.sin() * pr.cos() + y * tr.sin() * pr.sin());
                    Complex64::cis(phases[i] - geom.phi_in[i] + geo)
                })
                .sum();
            let power = af.norm_sqr() * tr.cos().powi(2);
            if power > best.0 {
                best = (power, Direction::new(t, p));
            }
        }
    }
    best.1
}

#[test]
fn grid_peak_agrees_with_tenfold_refinement() {
    let geom = build_geometry(&ScenarioConfig::square(3)).unwrap();
    let oracle = exhaustive_search(&hamiltonian(ModelId::IdealPhase, 3)).unwrap();
    let bits = &oracle.optimal_set()[0];
    let coarse = GridSpec { theta_step_deg: 1.0, phi_step_deg: 1.0, ..Default::default() };
    let found = find_peak(&compute_pattern(&geom, bits, 0.0, &coarse).unwrap());
    let reference = fine_peak(&geom, bits, 0.1);
    let gap = pointing_error(found, reference);
    assert!(gap <= 1.0, "coarse {found:?} vs fine {reference:?}: {gap} deg");
}

#[test]
fn gray_walk_spot_checks_at_sixteen_qubits() {
    let inst = hamiltonian(ModelId::FarField, 4);
    let walked = gray_code_costs(&inst, 16).unwrap();
    let scale = walked.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100_000 {
        let idx = rng.random_range(0..1u64 << 16);
        let direct = cost_of_index(&inst, idx);
        assert!((walked[idx as usize] - direct).abs() <= 1e-12 * scale, "index {idx}");
    }
}
