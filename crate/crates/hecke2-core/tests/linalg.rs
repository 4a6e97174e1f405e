//! Randomized consistency tests for the bit-packed GF(2) linear algebra.

use hecke2_core::bits;
use hecke2_core::matrix::{
    echelon_span, in_span, kernel_columns, reduce_mod, solve_columns, BitMatrix,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> BitMatrix {
    let mut m = BitMatrix::zero(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(0.4) {
                m.set(i, j, true);
            }
        }
    }
    m
}

fn random_vec(rng: &mut StdRng, bits_len: usize) -> Vec<u64> {
    let mut v = bits::zero_vec(bits_len.max(1));
    for i in 0..bits_len {
        if rng.gen_bool(0.5) {
            bits::set(&mut v, i);
        }
    }
    v
}

#[test]
fn identity_and_zero() {
    let mut rng = StdRng::seed_from_u64(1);
    let id = BitMatrix::identity(40);
    for _ in 0..20 {
        let rhs = random_vec(&mut rng, 40);
        assert_eq!(id.solve(&rhs), Some(rhs.clone()));
        assert_eq!(id.mat_vec(&rhs), rhs);
    }
    assert!(id.kernel_basis().is_empty());

    let z = BitMatrix::zero(8, 8);
    assert_eq!(z.kernel_basis().len(), 8);
    let mut rhs = bits::zero_vec(8);
    bits::set(&mut rhs, 3);
    assert_eq!(z.solve(&rhs), None);
    assert!(z.solve(&bits::zero_vec(8)).is_some());
}

#[test]
fn rank_nullity() {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..500 {
        let rows = rng.gen_range(1..40);
        let cols = rng.gen_range(1..40);
        let m = random_matrix(&mut rng, rows, cols);
        let rank = m.echelonize().rank();
        assert_eq!(rank + m.kernel_basis().len(), cols);
        assert!(rank <= rows.min(cols));
    }
}

#[test]
fn solve_consistency() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..500 {
        let rows = rng.gen_range(1..48);
        let cols = rng.gen_range(1..48);
        let m = random_matrix(&mut rng, rows, cols);
        let x = random_vec(&mut rng, cols);
        let b = m.mat_vec(&x);
        let y = m.solve(&b).expect("constructed system must be solvable");
        assert_eq!(m.mat_vec(&y), b);
    }
}

#[test]
fn kernel_annihilates() {
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..200 {
        let rows = rng.gen_range(1..32);
        let cols = rng.gen_range(1..32);
        let m = random_matrix(&mut rng, rows, cols);
        for k in m.kernel_basis() {
            assert!(!bits::is_zero(&k), "kernel basis contains zero");
            assert!(bits::is_zero(&m.mat_vec(&k)), "kernel vector not killed");
        }
    }
}

#[test]
fn column_api_matches_matrix_api() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..100 {
        let rows = rng.gen_range(1..32);
        let cols = rng.gen_range(1..32);
        let m = random_matrix(&mut rng, rows, cols);
        let col_list: Vec<Vec<u64>> = (0..cols).map(|j| m.column(j)).collect();
        let rhs = m.mat_vec(&random_vec(&mut rng, cols));
        assert_eq!(m.solve(&rhs), solve_columns(&col_list, rows, &rhs));
        assert_eq!(m.kernel_basis(), kernel_columns(&col_list, rows));
    }
}

#[test]
fn echelon_span_properties() {
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..200 {
        let nbits = rng.gen_range(1..96);
        let vecs: Vec<Vec<u64>> = (0..rng.gen_range(0..20))
            .map(|_| random_vec(&mut rng, nbits))
            .collect();
        let basis = echelon_span(&vecs, nbits);
        // Stable under re-echelonization and contains every input vector.
        assert_eq!(echelon_span(&basis, nbits), basis);
        for v in &vecs {
            assert!(in_span(v, &basis));
            let mut w = v.clone();
            reduce_mod(&mut w, &basis);
            assert!(bits::is_zero(&w));
        }
        // Pivots are strictly ascending and unique to their vector.
        let pivots: Vec<usize> = basis
            .iter()
            .map(|b| bits::lowest_set(b).expect("basis vector is nonzero"))
            .collect();
        assert!(pivots.windows(2).all(|w| w[0] < w[1]));
        for (i, b) in basis.iter().enumerate() {
            for (j, &p) in pivots.iter().enumerate() {
                assert_eq!(bits::get(b, p), i == j, "pivot not cleared elsewhere");
            }
        }
    }
}
