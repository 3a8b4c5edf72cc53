//! Cross-checks the Jacobi eigensolver against nalgebra's symmetric eigensolver.

use dsm_core::linops::{condition_number, sym_eigen};
use dsm_core::problems::{gen_hilbert, gen_random_symmetric};
use dsm_core::SymmetricOperator;
use nalgebra::DMatrix;

fn reference_eigenvalues(a: &SymmetricOperator) -> Vec<f64> {
    let n = a.n();
    let m = DMatrix::from_row_slice(n, n, a.as_slice());
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn compare(a: &SymmetricOperator) -> f64 {
    let ours = sym_eigen(a).unwrap().eigenvalues;
    let theirs = reference_eigenvalues(a);
    let scale = theirs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    ours.iter()
        .zip(&theirs)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

#[test]
fn hilbert_matches_reference() {
    for n in [3, 6, 10] {
        let a = gen_hilbert(n).unwrap();
        assert!(compare(&a) < 1e-13, "hilbert({n})");
    }
}

#[test]
fn hilbert_smallest_eigenvalues_agree_relatively() {
    let a = gen_hilbert(6).unwrap();
    let ours = sym_eigen(&a).unwrap().eigenvalues;
    let theirs = reference_eigenvalues(&a);
    assert!(
        (ours[0] / theirs[0] - 1.0).abs() < 1e-6,
        "{} vs {}",
        ours[0],
        theirs[0]
    );
    let kappa = condition_number(&a, 1e-12).unwrap().value();
    assert!((kappa - theirs[5] / theirs[0]).abs() / kappa < 1e-6);
}

#[test]
fn random_matrices_match_reference() {
    for seed in 0..8 {
        let a = gen_random_symmetric(5 + seed as usize * 3, seed).unwrap();
        assert!(compare(&a) < 1e-12, "seed {seed}");
    }
}
