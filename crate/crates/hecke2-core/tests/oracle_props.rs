//! Randomized cross-checks of the packed kernel against the dense
//! byte-per-coefficient reference implementations. Seeds are fixed so
//! failures reproduce.

use hecke2_core::hecke::apply_tp;
use hecke2_core::oracle::DenseSeries;
use hecke2_core::series::BitSeries;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const PRIMES: [usize; 5] = [3, 5, 7, 11, 13];

fn random_series(rng: &mut StdRng, prec: usize) -> BitSeries {
    let density = rng.gen_range(0.01..0.6);
    BitSeries::from_exponents((0..prec).filter(|_| rng.gen_bool(density)), prec)
}

fn assert_same(a: &BitSeries, b: &BitSeries, what: &str) {
    assert_eq!(a.prec(), b.prec(), "{what}: precision mismatch");
    assert!(a.agree(b), "{what}: coefficient mismatch");
}

#[test]
fn mul_matches_oracle() {
    let mut rng = StdRng::seed_from_u64(0x6d756c);
    for case in 0..1000 {
        let na = rng.gen_range(1..1500);
        let nb = rng.gen_range(1..1500);
        let a = random_series(&mut rng, na);
        let b = random_series(&mut rng, nb);
        let fast = a.mul(&b);
        let slow = DenseSeries::from_bits(&a)
            .unwrap()
            .mul(&DenseSeries::from_bits(&b).unwrap())
            .to_bits();
        assert_same(&fast, &slow, &format!("mul case {case}"));
    }
}

#[test]
fn square_matches_oracle() {
    let mut rng = StdRng::seed_from_u64(0x737172);
    for case in 0..300 {
        let na = rng.gen_range(1..1500);
        let a = random_series(&mut rng, na);
        let fast = a.square();
        let slow = {
            let d = DenseSeries::from_bits(&a).unwrap();
            d.mul(&d)
        };
        // The Frobenius fast path justifies 2*prec, more than the generic
        // product contract prec+val; compare on the common prefix.
        assert!(
            fast.prec() >= slow.prec() && fast.agree(&slow.to_bits()),
            "square case {case}"
        );
    }
}

#[test]
fn tp_matches_oracle() {
    let mut rng = StdRng::seed_from_u64(0x7470);
    for case in 0..1000 {
        let p = PRIMES[case % PRIMES.len()];
        let nf = rng.gen_range(p..4000);
        let f = random_series(&mut rng, nf);
        let fast = apply_tp(&f, p);
        let slow = DenseSeries::from_bits(&f).unwrap().tp(p).to_bits();
        assert_same(&fast, &slow, &format!("T_{p} case {case}"));
    }
}

#[test]
fn u_matches_oracle() {
    let mut rng = StdRng::seed_from_u64(0x756c);
    for case in 0..500 {
        let l = PRIMES[case % PRIMES.len()];
        let nf = rng.gen_range(l..4000);
        let f = random_series(&mut rng, nf);
        let fast = hecke2_core::hecke::apply_u(&f, l);
        let slow = DenseSeries::from_bits(&f).unwrap().u(l).to_bits();
        assert_same(&fast, &slow, &format!("U_{l} case {case}"));
    }
}

#[test]
fn tp_commute() {
    let mut rng = StdRng::seed_from_u64(0x636f6d);
    for case in 0..200 {
        let p = PRIMES[case % PRIMES.len()];
        let q = PRIMES[(case / PRIMES.len()) % PRIMES.len()];
        let nf = rng.gen_range(400..4000);
        let f = random_series(&mut rng, nf);
        let pq = apply_tp(&apply_tp(&f, p), q);
        let qp = apply_tp(&apply_tp(&f, q), p);
        assert!(pq.agree(&qp), "T_{p} T_{q} != T_{q} T_{p}, case {case}");
    }
}

#[test]
fn tp_linear() {
    let mut rng = StdRng::seed_from_u64(0x6c696e);
    for case in 0..200 {
        let p = PRIMES[case % PRIMES.len()];
        let n = rng.gen_range(p..3000);
        let f = random_series(&mut rng, n);
        let g = random_series(&mut rng, n);
        let lhs = apply_tp(&f.add(&g), p);
        let rhs = apply_tp(&f, p).add(&apply_tp(&g, p));
        assert!(lhs.agree(&rhs), "T_{p} not additive, case {case}");
    }
}

#[test]
fn tp_frobenius() {
    // T_p(f^2) = (T_p f)^2 in characteristic 2.
    let mut rng = StdRng::seed_from_u64(0x66726f);
    for case in 0..200 {
        let p = PRIMES[case % PRIMES.len()];
        let nf = rng.gen_range(p..2000);
        let f = random_series(&mut rng, nf);
        let lhs = apply_tp(&f.square(), p);
        let rhs = apply_tp(&f, p).square();
        assert!(lhs.agree(&rhs), "T_{p} Frobenius mismatch, case {case}");
    }
}

#[test]
fn precision_soundness_doubled() {
    // Every operation computed at precision N must be the truncation of the
    // same operation at precision 2N.
    let mut rng = StdRng::seed_from_u64(0x646f7562);
    for case in 0..100 {
        let n = rng.gen_range(64..1024);
        let exps_a: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.2)).collect();
        let exps_b: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.2)).collect();
        let (a1, a2) = (
            BitSeries::from_exponents(exps_a.iter().copied(), n),
            BitSeries::from_exponents(exps_a.iter().copied(), 2 * n),
        );
        let (b1, b2) = (
            BitSeries::from_exponents(exps_b.iter().copied(), n),
            BitSeries::from_exponents(exps_b.iter().copied(), 2 * n),
        );
        let m1 = a1.mul(&b1);
        let m2 = a2.mul(&b2);
        assert!(
            m2.prec() >= m1.prec() && m1.agree(&m2),
            "mul precision soundness, case {case}"
        );
        for p in PRIMES {
            if p >= n {
                continue;
            }
            let t1 = apply_tp(&a1, p);
            let t2 = apply_tp(&a2, p);
            assert!(
                t2.prec() >= t1.prec() && t1.agree(&t2),
                "T_{p} precision soundness, case {case}"
            );
        }
    }
    let f1 = BitSeries::theta_f(2048);
    let f2 = BitSeries::theta_f(4096);
    assert!(f1.agree(&f2), "theta series depends on requested precision");
}
