use num_complex::Complex64;
use proptest::prelude::*;

use dsa_preamble::correlation::{autocorr_vector, default_tolerance, is_gcp, is_golay_mate, xcorr};
use dsa_preamble::dsa::{apply_mask, RbMask};
use dsa_preamble::envelope::{average_power, instantaneous_power, pmepr, spectral_power};
use dsa_preamble::families::{build_family, verify_family};
use dsa_preamble::seqcore::{
    boolean_to_phases, gdj_mates, gdj_quadratic, psi, BooleanFunction, ComplexSequence,
    FamilyDescriptor, FamilyKind, PhaseSequence,
};

fn unimodular(max_len: usize) -> impl Strategy<Value = ComplexSequence> {
    prop::collection::vec(0.0..std::f64::consts::TAU, 1..=max_len).prop_map(|angles| {
        ComplexSequence::new(
            angles
                .into_iter()
                .map(|t| Complex64::from_polar(1.0, t))
                .collect(),
        )
        .unwrap()
    })
}

/// Unimodular with some entries zeroed, at a length divisible by four.
fn chunked(max_quarter: usize) -> impl Strategy<Value = ComplexSequence> {
    (1..=max_quarter)
        .prop_flat_map(|h| {
            prop::collection::vec((0.0..std::f64::consts::TAU, any::<bool>()), 4 * h)
        })
        .prop_map(|v| {
            let mut values: Vec<Complex64> = v
                .into_iter()
                .map(|(t, on)| {
                    if on {
                        Complex64::from_polar(1.0, t)
                    } else {
                        Complex64::default()
                    }
                })
                .collect();
            values[0] = Complex64::new(1.0, 0.0);
            ComplexSequence::new(values).unwrap()
        })
}

fn permutation(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=m).collect::<Vec<_>>()).prop_shuffle()
}

/// Any GDJ descriptor with `m` in range and `q` from the list.
fn gdj_descriptor(
    ms: std::ops::RangeInclusive<usize>,
    qs: &'static [u32],
) -> impl Strategy<Value = FamilyDescriptor> {
    (ms, prop::sample::select(qs)).prop_flat_map(|(m, q)| {
        (permutation(m), prop::collection::vec(0..q, m), 0..q).prop_map(move |(pi, ck, c)| {
            FamilyDescriptor::new(FamilyKind::PlainGdj, q, pi, ck, c).unwrap()
        })
    })
}

/// A Family X or Y descriptor: the last two permutation slots are pinned.
fn family_descriptor(kind: FamilyKind) -> impl Strategy<Value = FamilyDescriptor> {
    (3usize..=7, prop::sample::select(&[2u32, 4, 6, 8][..])).prop_flat_map(move |(m, q)| {
        let free: Vec<usize> = (1..=m - 2).collect();
        (
            Just(free).prop_shuffle(),
            prop::collection::vec(0..q, m),
            0..q,
        )
            .prop_map(move |(mut pi, ck, c)| {
                match kind {
                    FamilyKind::FamilyY => pi.extend([m, m - 1]),
                    _ => pi.extend([m - 1, m]),
                }
                FamilyDescriptor::new(kind, q, pi, ck, c).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_unimodular(q in (1u32..=8).prop_map(|k| 2 * k), raw in prop::collection::vec(0u32..1000, 1..64)) {
        let phases = PhaseSequence::new(q, raw.iter().map(|p| p % q).collect()).unwrap();
        for v in psi(&phases).values() {
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_variable_reads_its_bit(m in 1usize..=12, k in 0usize..12) {
        let k = k % m + 1;
        let f = BooleanFunction::zero(2, m).unwrap().with_term(&[k], 1).unwrap();
        let phases = boolean_to_phases(&f);
        for (i, &p) in phases.values().iter().enumerate() {
            prop_assert_eq!(p as usize, i >> (k - 1) & 1);
        }
    }

    #[test]
    fn autocorrelation_is_conjugate_symmetric(a in unimodular(40), tau in 0isize..40) {
        let tau = tau % a.len() as isize;
        let fwd = xcorr(&a, &a, tau).unwrap();
        let back = xcorr(&a, &a, -tau).unwrap();
        prop_assert!((fwd.conj() - back).norm() < 1e-9);
    }

    #[test]
    fn zero_shift_is_energy(a in chunked(16)) {
        let r0 = autocorr_vector(&a).at(0);
        prop_assert!((r0.re - a.support_len() as f64).abs() < 1e-9);
        prop_assert!(r0.im.abs() < 1e-9);
        prop_assert!((average_power(&a) - a.support_len() as f64).abs() < 1e-9);
    }

    #[test]
    fn gdj_pairs_are_golay_and_mated(d in gdj_descriptor(2..=8, &[2, 4, 8])) {
        let a = gdj_quadratic(&d);
        let (b, c, dd) = gdj_mates(&d, &a).unwrap();
        let [a, b, c, dd] = [a, b, c, dd].map(|f| psi(&boolean_to_phases(&f)));
        let tol = default_tolerance(a.len());
        prop_assert!(is_gcp(&a, &b, tol).unwrap().holds);
        prop_assert!(is_gcp(&c, &dd, tol).unwrap().holds);
        prop_assert!(is_golay_mate((&a, &b), (&c, &dd), tol).unwrap().holds);
    }

    #[test]
    fn correlation_and_spectral_forms_agree(a in chunked(16), t in 0.0f64..1.0) {
        let l = a.len() as f64;
        prop_assert!((instantaneous_power(&a, t) - spectral_power(&a, t)).abs() <= 1e-9 * l * l);
    }

    #[test]
    fn mask_algebra(a in chunked(8), s in 1u8..=15, r in 1u8..=15) {
        let ms = RbMask::new(s).unwrap();
        let mr = RbMask::new(r).unwrap();
        let once = apply_mask(&a, ms).unwrap();
        prop_assert_eq!(&apply_mask(&once, ms).unwrap(), &once);
        let both = apply_mask(&once, mr).unwrap();
        match RbMask::new(s & r) {
            Ok(m) => prop_assert_eq!(both, apply_mask(&a, m).unwrap()),
            Err(_) => prop_assert_eq!(both.support_len(), 0),
        }
        match ms.complement() {
            Some(c) => {
                let rest = apply_mask(&a, c).unwrap();
                let sum: Vec<Complex64> = once.values().iter().zip(rest.values()).map(|(x, y)| x + y).collect();
                prop_assert_eq!(sum.as_slice(), a.values());
                let split = average_power(&once) + average_power(&rest);
                prop_assert!((split - average_power(&a)).abs() < 1e-9);
            }
            None => prop_assert_eq!(&once, &a),
        }
    }

    #[test]
    fn single_block_equals_compacted(a in chunked(8), block in 0usize..4) {
        let h = a.len() / 4;
        let masked = apply_mask(&a, RbMask::new(1 << block).unwrap()).unwrap();
        prop_assume!(masked.support_len() > 0);
        let compact = ComplexSequence::new(masked.values()[block * h..(block + 1) * h].to_vec()).unwrap();
        let full = pmepr(&masked, 16, false).unwrap().pmepr;
        let small = pmepr(&compact, 64, false).unwrap().pmepr;
        prop_assert!((full - small).abs() < 1e-9, "{} vs {}", full, small);
    }

    #[test]
    fn refinement_never_lowers_the_peak(a in chunked(16)) {
        let grid = pmepr(&a, 8, false).unwrap().pmepr;
        let refined = pmepr(&a, 8, true).unwrap().pmepr;
        prop_assert!(refined >= grid - 1e-12);
    }

    #[test]
    fn gdj_sequences_have_pmepr_at_most_two(d in gdj_descriptor(2..=7, &[2, 4, 6, 8])) {
        let inst = build_family(&d).unwrap();
        for m in [&inst.a, &inst.b, &inst.d, &inst.e] {
            let p = pmepr(&m.sequence, 32, true).unwrap().pmepr;
            prop_assert!(p <= 2.0 + 1e-3, "{}", p);
        }
    }

    #[test]
    fn family_x_clauses_hold(d in family_descriptor(FamilyKind::FamilyX)) {
        let inst = build_family(&d).unwrap();
        let verdicts = verify_family(&inst, default_tolerance(inst.len())).unwrap();
        prop_assert_eq!(verdicts.len(), 14);
        for v in verdicts {
            prop_assert!(v.holds, "{:?}", v);
        }
    }

    #[test]
    fn family_y_clauses_hold(d in family_descriptor(FamilyKind::FamilyY)) {
        let inst = build_family(&d).unwrap();
        let verdicts = verify_family(&inst, default_tolerance(inst.len())).unwrap();
        prop_assert_eq!(verdicts.len(), 14);
        for v in verdicts {
            prop_assert!(v.holds, "{:?}", v);
        }
    }

    #[test]
    fn descriptor_json_round_trips(d in family_descriptor(FamilyKind::FamilyY)) {
        let text = serde_json::to_string(&d).unwrap();
        let back: FamilyDescriptor = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, d);
    }
}
