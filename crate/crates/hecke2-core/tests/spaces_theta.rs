//! Worked examples for the space chunks, the trace map, the filtration and
//! the truncated operator algebra.

use hecke2_core::hecke::{apply_tp, nilpotency_index_series, Level};
use hecke2_core::series::BitSeries;
use hecke2_core::spaces::{
    build_context, kernel_subchunk, modd_space, n1_chunk, pow, split_w, v_chunk, w_chunk,
    w_crossing_swaps, FiltrationPosition, Label,
};
use hecke2_core::theta::{ChunkAction, TAmbient, TSeries};
use hecke2_core::{bits, Error};

fn k_labels(labels: &[Label]) -> Vec<u32> {
    labels
        .iter()
        .map(|l| match l {
            Label::K(k) => *k,
            other => panic!("unexpected label {other:?}"),
        })
        .collect()
}

#[test]
fn v_chunk_labels_and_decompose() {
    let ctx = build_context(Level::Three, 2048).unwrap();
    let v = v_chunk(&ctx, 7).unwrap();
    assert_eq!(k_labels(&v.labels), vec![1, 3, 5, 7]);
    let f3 = pow(&ctx.f, 3, 2048).unwrap();
    let sel = v.decompose(&f3).unwrap();
    assert_eq!(
        bits::iter_ones(&sel).collect::<Vec<_>>(),
        vec![v.label_index(Label::K(3)).unwrap()]
    );
    assert!(v.contains(&ctx.f.add(&pow(&ctx.f, 5, 2048).unwrap())));
    assert!(!v.contains(&BitSeries::monomial(2, 2048)));
    let round = v.expand(&sel, 2048).unwrap();
    assert!(round.agree(&f3));
}

#[test]
fn w_chunk_labels() {
    let ctx3 = build_context(Level::Three, 2048).unwrap();
    let w3 = w_chunk(&ctx3, 13).unwrap();
    assert_eq!(k_labels(&w3.labels), vec![1, 5, 7, 11, 13]);

    let ctx5 = build_context(Level::Five, 2048).unwrap();
    let w5 = w_chunk(&ctx5, 13).unwrap();
    assert_eq!(k_labels(&w5.labels), vec![1, 3, 7, 9, 11, 13]);
    // D_3 = D^8 / G holds as series, not just as a label.
    let d8 = pow(ctx5.d(), 8, 2048).unwrap();
    let d3 = w5.gen(w5.label_index(Label::K(3)).unwrap());
    assert!(d3.mul(ctx5.g()).agree(&d8));
}

#[test]
fn w_split_and_crossing() {
    let ctx3 = build_context(Level::Three, 2048).unwrap();
    let w3 = w_chunk(&ctx3, 13).unwrap();
    let (a, b) = split_w(&w3, Level::Three);
    assert_eq!(k_labels(&a.iter().map(|&i| w3.labels[i]).collect::<Vec<_>>()), vec![1, 7, 13]);
    assert_eq!(k_labels(&b.iter().map(|&i| w3.labels[i]).collect::<Vec<_>>()), vec![5, 11]);
    assert!(w_crossing_swaps(Level::Three, 5));
    assert!(!w_crossing_swaps(Level::Three, 7));
    assert!(w_crossing_swaps(Level::Three, 11));
    assert!(!w_crossing_swaps(Level::Three, 13));
    assert!(!w_crossing_swaps(Level::Five, 3));
    assert!(!w_crossing_swaps(Level::Five, 7));
    assert!(w_crossing_swaps(Level::Five, 11));
    assert!(w_crossing_swaps(Level::Five, 13));
}

#[test]
fn trace_and_filtration() {
    let ctx = build_context(Level::Three, 2048).unwrap();
    let m = modd_space(&ctx, 7).unwrap();
    let n1 = n1_chunk(&ctx, 7).unwrap();
    let f3 = pow(&ctx.f, 3, 2048).unwrap();
    // F^3 = F^imax G^0 traces to G; lower i traces to zero.
    assert!(m.trace(&f3).unwrap().agree(ctx.g()));
    assert!(m.trace(&ctx.f).unwrap().is_zero());
    assert!(m.trace(ctx.g()).unwrap().is_zero());
    assert_eq!(
        hecke2_core::spaces::filtration_check(&m, &n1, ctx.g()).unwrap(),
        FiltrationPosition::InN1
    );
    assert_eq!(
        hecke2_core::spaces::filtration_check(&m, &n1, &ctx.f).unwrap(),
        FiltrationPosition::InN2NotN1
    );
    assert_eq!(
        hecke2_core::spaces::filtration_check(&m, &n1, &f3).unwrap(),
        FiltrationPosition::OutsideN2
    );
}

#[test]
fn zg2_roundtrip() {
    let ctx = build_context(Level::Three, 2048).unwrap();
    let m = modd_space(&ctx, 9).unwrap();
    let f3 = pow(&ctx.f, 3, 2048).unwrap();
    let elt = f3.add(ctx.g());
    let coords = m.zg2_decompose(&elt).unwrap();
    let back = m.zg2_expand(&ctx, &coords).unwrap();
    assert!(back.agree(&elt));
}

#[test]
fn kernel_subchunk_is_killed() {
    let ctx = build_context(Level::Three, 2048).unwrap();
    let v = v_chunk(&ctx, 7).unwrap();
    let sub = kernel_subchunk(&ctx, &v, 3).unwrap();
    assert!(!sub.is_empty(), "T_3 kernel on V is nonzero (it contains F)");
    assert!(sub.contains(&ctx.f));
    for i in 0..sub.len() {
        assert!(apply_tp(sub.gen(i), 3).is_zero());
    }
}

#[test]
fn action_matrix_matches_series_iteration() {
    let ctx = build_context(Level::Three, 4096).unwrap();
    let v = v_chunk(&ctx, 7).unwrap();
    let act = ChunkAction::build(&v, &[5, 7, 13]).unwrap();
    assert_eq!(act.dim, v.len());
    for &p in &[5u32, 7, 13] {
        for gi in 0..v.len() {
            let mut e = bits::zero_vec(act.dim);
            bits::set(&mut e, gi);
            let by_matrix = act.nilpotency_index(p, &e, 64).unwrap();
            let by_series = nilpotency_index_series(v.gen(gi), p as usize, 64).unwrap();
            assert_eq!(by_matrix, by_series, "p={p}, generator {gi}");
        }
    }
}

#[test]
fn tseries_arithmetic_and_display() {
    let amb = TAmbient::new(&[3, 5], 3);
    let t3 = TSeries::var(&amb, 3);
    let t5 = TSeries::var(&amb, 5);
    assert_eq!(t3.to_string(), "t3");
    assert!(t3.add(&t3).unwrap().is_zero());
    let prod = t3.mul(&t5).unwrap();
    assert_eq!(prod.to_string(), "t3*t5");
    assert_eq!(prod, TSeries::monomial(&amb, &[3, 5]).unwrap());
    assert_eq!(t3.mul(&t3).unwrap().to_string(), "t3^2");
    // The ambient is O/m^3: degrees 0..2, so degree-3 products vanish.
    assert!(prod.mul(&t3).unwrap().is_zero());
    // Leading form picks the lowest homogeneous part.
    let mixed = t3.add(&prod).unwrap();
    let (deg, lf) = mixed.leading_form().unwrap();
    assert_eq!((deg, lf.to_string().as_str()), (1, "t3"));
    // Elements of different ambients do not combine.
    let other = TAmbient::new(&[3, 7], 3);
    assert_eq!(t3.add(&TSeries::var(&other, 3)), Err(Error::AmbientMismatch));
}
