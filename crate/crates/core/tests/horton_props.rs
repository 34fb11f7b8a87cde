use hortonlab::horton::{
    check_shift_property, verify_strong_horton, zeta1_by_series, zeta1_by_series_exact,
    zeta1_geometric_closed_form, zeta_by_recursion, zeta_by_recursion_exact,
};
use hortonlab::{Error, TokunagaSequence};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn families() -> Vec<TokunagaSequence> {
    let mut out = vec![TokunagaSequence::none()];
    for a in [0.5, 1.0, 2.0] {
        for c in [0.5, 1.0, 2.0] {
            out.push(TokunagaSequence::geometric(a, c).unwrap());
            out.push(TokunagaSequence::differentiated(a, c).unwrap());
            out.push(TokunagaSequence::shallow(a, c).unwrap());
            out.push(TokunagaSequence::explicit(vec![a, 0.0, c]).unwrap());
        }
    }
    out
}

#[test]
fn recursion_agrees_with_series() {
    for seq in families() {
        let series = zeta1_by_series(&seq, 25).unwrap();
        for k in 1..=25 {
            let rec = zeta_by_recursion(&seq, k).unwrap();
            assert!(
                rel(rec.zeta[0], series[k as usize - 1]) < 1e-10,
                "{seq:?} K={k}"
            );
        }
    }
}

#[test]
fn geometric_closed_form_agrees() {
    for a in [0.5, 1.0, 2.0] {
        for c in [0.5, 1.0, 2.0, 3.0] {
            let seq = TokunagaSequence::geometric(a, c).unwrap();
            let series = zeta1_by_series(&seq, 26).unwrap();
            for k in 0..25 {
                let closed = zeta1_geometric_closed_form(a, c, k).unwrap();
                assert!(rel(closed, series[k as usize]) < 1e-9, "a={a} c={c} K={k}");
            }
        }
    }
    for k in 0..20 {
        let expected = (2.0 * 4f64.powi(k as i32) + 1.0) / 3.0;
        assert!(rel(zeta1_geometric_closed_form(1.0, 2.0, k).unwrap(), expected) < 1e-12);
    }
}

#[test]
fn exact_modes_agree() {
    let integer = [
        TokunagaSequence::none(),
        TokunagaSequence::geometric(1.0, 2.0).unwrap(),
        TokunagaSequence::geometric(3.0, 1.0).unwrap(),
        TokunagaSequence::differentiated(1.0, 1.0).unwrap(),
        TokunagaSequence::shallow(2.0, 5.0).unwrap(),
        TokunagaSequence::explicit(vec![1.0, 0.0, 4.0]).unwrap(),
    ];
    for seq in integer {
        let series = zeta1_by_series_exact(&seq, 25).unwrap();
        for k in 1..=25 {
            let rec = zeta_by_recursion_exact(&seq, k).unwrap();
            assert_eq!(rec[0], series[k as usize - 1], "{seq:?} K={k}");
            assert_eq!(*rec.last().unwrap(), 1);
        }
    }
    let g = TokunagaSequence::geometric(1.0, 2.0).unwrap();
    let exact = zeta1_by_series_exact(&g, 25).unwrap();
    for (k, v) in exact.iter().enumerate() {
        assert_eq!(*v, (2 * 4u128.pow(k as u32) + 1) / 3);
    }
}

#[test]
fn exact_mode_rejects_fractional_terms() {
    let seq = TokunagaSequence::geometric(0.5, 2.0).unwrap();
    assert!(matches!(
        zeta_by_recursion_exact(&seq, 4),
        Err(Error::NonIntegerSequence { .. })
    ));
}

#[test]
fn exact_mode_reports_overflow() {
    let seq = TokunagaSequence::geometric(1.0, 2.0).unwrap();
    assert!(matches!(
        zeta1_by_series_exact(&seq, 80),
        Err(Error::Overflow { .. })
    ));
}

#[test]
fn float_mode_reports_overflow() {
    let seq = TokunagaSequence::geometric(1.0, 2.0).unwrap();
    assert!(zeta_by_recursion(&seq, 500).is_ok());
    assert!(matches!(
        zeta_by_recursion(&seq, 600),
        Err(Error::Overflow { .. })
    ));
}

#[test]
fn table_invariants() {
    for seq in families() {
        let t1 = seq.term(1);
        for k in 1..=20u32 {
            let t = zeta_by_recursion(&seq, k).unwrap();
            assert_eq!(t.zeta[k as usize - 1], 1.0);
            assert_eq!(t.xi[0], 1.0);
            for w in t.zeta.windows(2) {
                assert!(w[0] >= 2.0 * w[1]);
            }
            for w in t.xi.windows(2) {
                let q = w[1] / w[0];
                assert!(q > 0.0 && q <= 0.5);
            }
            assert!(t.zeta[0] >= (t1 + 2.0).powi(k as i32 - 1) * (1.0 - 1e-12));
        }
    }
}

#[test]
fn shift_property_across_families() {
    for seq in families() {
        assert!(check_shift_property(&seq, 15).unwrap(), "{seq:?}");
    }
}

#[test]
fn geometric_ratio_convergence() {
    let seq = TokunagaSequence::geometric(1.0, 2.0).unwrap();
    let rep = verify_strong_horton(&seq, 30, 6).unwrap();
    assert!(!rep.diverged);
    assert_eq!(rep.r_theory, Some(4.0));
    let errors: Vec<f64> = rep.ratio_sequence.iter().map(|r| (r - 4.0).abs()).collect();
    for k in 5..errors.len() {
        if errors[k - 1] > 1e-14 {
            assert!(errors[k] < errors[k - 1], "K={}", k + 1);
        } else {
            assert!(errors[k] <= 1e-14);
        }
    }
    // In integers the gap 4 - N[K+1]/N[K] = (4 N[K] - N[K+1]) / N[K] shrinks for every K.
    let exact = zeta1_by_series_exact(&seq, 31).unwrap();
    let gaps: Vec<(u128, u128)> = exact.windows(2).map(|w| (4 * w[0] - w[1], w[0])).collect();
    for g in gaps.windows(2) {
        assert!(g[1].0 * g[0].1 < g[0].0 * g[1].1);
    }
    assert!(errors[29 - 1] < 1e-8);
    assert!(rep.per_j_errors.iter().all(|&(_, e)| e < 1e-6));
}

#[test]
fn no_side_branching_is_exact() {
    let rep = verify_strong_horton(&TokunagaSequence::none(), 10, 6).unwrap();
    assert_eq!(rep.r_estimate, 2.0);
    assert!(rep.ratio_sequence.iter().all(|&r| r == 2.0));
    assert!(rep.per_j_errors.iter().all(|&(_, e)| e == 0.0));
    assert!(!rep.diverged);
}

#[test]
fn factorial_head_diverges() {
    let terms: Vec<f64> = (1..=14u32)
        .map(|j| (1..=j).map(f64::from).product())
        .collect();
    let seq = TokunagaSequence::explicit(terms).unwrap();
    let rep = verify_strong_horton(&seq, 15, 6).unwrap();
    let exact = zeta1_by_series_exact(&seq, 15).unwrap();
    assert_eq!(&exact[..8], &[1, 3, 11, 45, 199, 945, 4847, 27225]);
    assert_eq!(exact[14], 152_352_139_007);
    let r5 = rep.ratio_sequence[4];
    let r14 = rep.ratio_sequence[13];
    assert!((r5 - 945.0 / 199.0).abs() < 1e-12);
    assert!((r14 - 152_352_139_007.0 / 11_666_613_753.0).abs() < 1e-9);
    assert!(r14 / r5 > 2.5);
    assert!(rep.diverged);
}

proptest! {
    #[test]
    fn oracles_agree_on_random_parameters(a in 0.01f64..5.0, c in 0.01f64..5.0, k in 1u32..=25) {
        let seq = TokunagaSequence::geometric(a, c).unwrap();
        let rec = zeta_by_recursion(&seq, k).unwrap().zeta[0];
        let series = zeta1_by_series(&seq, k).unwrap()[k as usize - 1];
        let closed = zeta1_geometric_closed_form(a, c, k - 1).unwrap();
        prop_assert!(rel(rec, series) < 1e-10);
        prop_assert!(rel(closed, series) < 1e-9);
    }
}
