//! Frozen values from hand computations (Gauss sums, discriminants, root sums).

use dihedral_g2::charlib::{legendre_char, turn_to_complex, AddChar, CharField, MultChar};
use dihedral_g2::cubic::{disc_cubic, BinaryCubic};
use dihedral_g2::epsilon::{epsilon_direct, epsilon_half};
use dihedral_g2::g2::{weyl_group, Parabolic};
use dihedral_g2::packets::{satake_g2, PlaceData};
use dihedral_g2::padic::{hilbert_symbol, ExtKind, PAdicField, QuadExt};
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;

fn f(p: u64) -> PAdicField {
    PAdicField::with_default_precision(p).unwrap()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-9
}

#[test]
fn quadratic_gauss_sums() {
    // sum (x/p) e(x/p) = sqrt(p) for p = 1 mod 4 and i sqrt(p) for p = 3 mod 4
    for (p, want) in [(3, Complex64::i()), (5, Complex64::new(1.0, 0.0)), (7, Complex64::i()), (13, Complex64::new(1.0, 0.0))] {
        let chi = legendre_char(f(p), Ratio::zero()).unwrap();
        let psi = AddChar::standard(f(p), 0);
        let e = epsilon_half(&chi, &psi).unwrap().value();
        assert!(close(e, want), "p={p}: {e}");
        assert!(close(epsilon_direct(&chi, &psi).unwrap(), want));
    }
}

#[test]
fn unramified_epsilon_under_level_shift() {
    // psi_n(x) = psi_0(p^-n x), so eps(1/2, chi, psi_n) = chi(p^-n) eps(1/2, chi, psi_0) = chi(p)^-n
    let chi = MultChar::unramified(CharField::Base(f(5)), Ratio::new(1, 3), Ratio::zero());
    for n in -2..=2i64 {
        let e = epsilon_half(&chi, &AddChar::standard(f(5), n)).unwrap().value();
        assert!(close(e, turn_to_complex(Ratio::new(-n, 3))), "n={n}: {e}");
    }
}

#[test]
fn hilbert_values() {
    for p in [3u64, 5, 7, 11] {
        let fp = f(p);
        let (u, pp) = (fp.int(fp.u() as i64), fp.int(p as i64));
        assert_eq!(hilbert_symbol(&u, &pp).unwrap(), -1);
        let minus_one_square = p % 4 == 1;
        assert_eq!(hilbert_symbol(&pp, &pp).unwrap(), if minus_one_square { 1 } else { -1 });
        assert_eq!(hilbert_symbol(&u, &u).unwrap(), 1);
    }
}

#[test]
fn non_norm_representatives() {
    let l = |p, k| QuadExt::new(f(p), k).lambda0();
    assert_eq!(l(5, ExtKind::Unramified), 5);
    assert_eq!(l(5, ExtKind::RamifiedUp), 2);
    assert_eq!(l(3, ExtKind::RamifiedP), 2);
    assert_eq!(l(7, ExtKind::Unramified), 7);
}

#[test]
fn discriminants() {
    let d = |c| disc_cubic(&BinaryCubic::from_ints(f(5), c)).as_rational().cloned().unwrap();
    let r = |n: i64| BigRational::from_integer(n.into());
    assert_eq!(d([1, 0, -1, 0]), r(4));
    assert_eq!(d([1, 0, 0, 1]), r(-27));
    assert_eq!(d([0, 1, 1, 0]), r(1));
    assert_eq!(d([1, 0, 0, -2]), r(-108));
}

#[test]
fn g2_counts() {
    assert_eq!(weyl_group().len(), 12);
    assert_eq!(Parabolic::Q1.modulus_exponents(), (5, 0));
    assert_eq!(Parabolic::Q2.modulus_exponents(), (3, 3));
    assert_eq!(Parabolic::B.modulus_exponents(), (4, 2));
}

#[test]
fn split_satake_p7() {
    let chi = MultChar::unramified(CharField::Base(f(7)), Ratio::new(1, 3), Ratio::zero());
    let got = satake_g2(&PlaceData::split_standard(chi).unwrap()).unwrap().complex();
    let a = turn_to_complex(Ratio::new(1, 3));
    let s = 7f64.sqrt();
    let want = [a * s, a / s, a.inv() * s, a.inv() / s, a * a, Complex64::new(1.0, 0.0), (a * a).inv()];
    for w in want {
        assert!(got.iter().any(|g| close(*g, w)), "{w} missing from {got:?}");
    }
    assert_eq!(got.len(), 7);
}
