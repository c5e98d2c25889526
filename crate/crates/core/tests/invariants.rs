//! Property tests for cross-module invariants.

use dihedral_g2::charlib::{turn_to_complex, CharField, MultChar};
use dihedral_g2::g2::{roots, weyl_group, Weight};
use dihedral_g2::packets::{matches_matrix_model, model_matrix_for, satake_g2, satake_g2_from_q1_inducing, PlaceData};
use dihedral_g2::padic::{hilbert_oracle, hilbert_symbol, is_norm, ExtKind, PAdicField, QuadExt};
use num_rational::Ratio;
use num_traits::Zero;
use proptest::prelude::*;

fn field(i: usize) -> PAdicField {
    PAdicField::with_default_precision([3, 5, 7, 11][i]).unwrap()
}

fn elt(f: PAdicField, n: i64, v: i64) -> dihedral_g2::padic::PadicNumber {
    f.int(n).mul(&f.int(f.p() as i64).pow(v).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn hilbert_matches_oracle(i in 0usize..3, a in 1i64..300, b in 1i64..300, sa in any::<bool>(), va in -2i64..3, vb in -2i64..3) {
        let f = field(i);
        let x = elt(f, if sa { -a } else { a }, va);
        let y = elt(f, b, vb);
        prop_assert_eq!(hilbert_symbol(&x, &y).unwrap(), hilbert_oracle(&x, &y).unwrap());
    }

    #[test]
    fn norms_are_hilbert_kernel(i in 0usize..4, k in 0usize..3, a in 1i64..300, v in -2i64..3) {
        let f = field(i);
        let ext = QuadExt::new(f, ExtKind::all()[k]);
        let x = elt(f, a, v);
        let d = f.int(ext.d());
        prop_assert_eq!(is_norm(&x, &ext).unwrap(), hilbert_symbol(&x, &d).unwrap() == 1);
    }

    #[test]
    fn weyl_preserves_form_and_roots(m in -8i64..8, k in -8i64..8, m2 in -8i64..8, k2 in -8i64..8) {
        let (a, b) = (Weight::new(m, k), Weight::new(m2, k2));
        let rs = roots();
        for w in weyl_group() {
            prop_assert_eq!(w.act(a).form(w.act(b)), a.form(b));
            prop_assert!(rs.iter().all(|r| rs.contains(&w.act(*r))));
        }
    }

    #[test]
    fn split_satake_invariants(i in 0usize..4, num in 0i64..24) {
        let chi = MultChar::unramified(CharField::Base(field(i)), Ratio::new(num, 24), Ratio::zero());
        let pd = PlaceData::split_standard(chi).unwrap();
        let sp = satake_g2(&pd).unwrap();
        prop_assert!(sp.is_inversion_closed());
        prop_assert!(sp.contains_one());
        prop_assert!((sp.product() - 1.0).norm() < 1e-9);
        prop_assert_eq!(&sp, &satake_g2_from_q1_inducing(&pd).unwrap());
        prop_assert!(matches_matrix_model(&sp, &model_matrix_for(&pd).unwrap(), 1e-9));
    }

    #[test]
    fn turns_are_unit_complex(n in -50i64..50, d in 1i64..50) {
        prop_assert!((turn_to_complex(Ratio::new(n, d)).norm() - 1.0).abs() < 1e-12);
    }
}
