//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use num_traits::{Signed, Zero};
use tiltlab::chern::ChernCharacter;
use tiltlab::exactform::{RationalVector, SymmetricForm};
use tiltlab::nsgeom::{DivisorClass, Kodaira, NSLattice, SurfaceModel};
use tiltlab::rational::{int, ratio};
use tiltlab::stabkit::{classify_torsion_pair, MockObject, StabilityPoint, TorsionClass};
use tiltlab::Rational;

pub fn q(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

/// `u^T G v` by explicit summation.
pub fn bilinear(g: &[Vec<Rational>], u: &[Rational], v: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (i, ui) in u.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            acc += ui * &g[i][j] * vj;
        }
    }
    acc
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let m = b[0].len();
    (0..n).map(|i| (0..m).map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

pub fn transpose(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// `P^T G P`.
pub fn congruent(g: &[Vec<Rational>], p: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    mat_mul(&mat_mul(&transpose(p), g), p)
}

/// Characteristic polynomial coefficients `c_0..c_n` (`c_n = 1`) by
/// Faddeev-LeVerrier.
pub fn char_poly(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = int(1);
    let mut m = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let trace: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -trace / int(k as i64);
    }
    c
}

fn sign_changes(coeffs: impl Iterator<Item = Rational>) -> usize {
    let signs: Vec<bool> = coeffs.filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `(n_plus, n_minus, n_zero)` of a symmetric matrix from the sign pattern
/// of its characteristic polynomial. Exact for real-rooted polynomials.
pub fn descartes_signature(g: &[Vec<Rational>]) -> (usize, usize, usize) {
    if g.is_empty() {
        return (0, 0, 0);
    }
    let c = char_poly(g);
    let zero = c.iter().take_while(|x| x.is_zero()).count();
    let plus = sign_changes(c.iter().cloned());
    let minus = sign_changes(c.iter().enumerate().map(|(i, x)| if i % 2 == 1 { -x } else { x.clone() }));
    (plus, minus, zero)
}

/// Gram matrix `P^T diag(a, -b_1, .., -b_k) P` for a unit upper-triangular
/// integer `P`: always of hyperbolic signature.
pub fn hyperbolic_gram(a: i64, negs: &[i64], upper: &[i64]) -> Vec<Vec<Rational>> {
    let n = negs.len() + 1;
    let mut d = vec![vec![Rational::zero(); n]; n];
    d[0][0] = int(a);
    for (i, b) in negs.iter().enumerate() {
        d[i + 1][i + 1] = int(-b);
    }
    let mut p = vec![vec![Rational::zero(); n]; n];
    let mut it = upper.iter().cycle();
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = int(1);
        for x in row.iter_mut().skip(i + 1) {
            *x = int(*it.next().unwrap_or(&0));
        }
    }
    congruent(&d, &p)
}

pub fn lattice_of(gram: Vec<Vec<Rational>>) -> Arc<NSLattice> {
    NSLattice::new(SymmetricForm::new(gram).unwrap()).unwrap()
}

pub fn class(lat: &Arc<NSLattice>, coords: &[Rational]) -> DivisorClass {
    DivisorClass::new(lat, RationalVector::new(coords.to_vec())).unwrap()
}

/// A class with positive square: the first basis vector of the diagonal
/// form pushed through `P^{-1}` is awkward, so search small integer vectors.
pub fn positive_class(lat: &Arc<NSLattice>) -> DivisorClass {
    let rho = lat.rank();
    let g = lat.form().gram();
    let mut v = vec![0i64; rho];
    loop {
        let coords: Vec<Rational> = v.iter().map(|&x| int(x)).collect();
        if bilinear(g, &coords, &coords).is_positive() {
            return class(lat, &coords);
        }
        // odometer over [-3, 3]^rho
        let mut i = 0;
        loop {
            v[i] += 1;
            if v[i] <= 3 {
                break;
            }
            v[i] = -3;
            i += 1;
            assert!(i < rho, "no positive class in the search box");
        }
    }
}

/// `P^1 x P^1`: hyperbolic plane, `K = (-2, -2)`, effective cone generated by the rulings.
pub fn p1xp1() -> SurfaceModel {
    let lat = NSLattice::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
    SurfaceModel {
        char_p: 2,
        kodaira: Kodaira::MinusInfinity,
        quasi_elliptic: false,
        minimal: true,
        k2_min: 8,
        chi_o_min: 1,
        canonical: DivisorClass::from_ints(&lat, &[-2, -2]).unwrap(),
        ample_h: DivisorClass::from_ints(&lat, &[1, 1]).unwrap(),
        effective_generators: Some(vec![
            DivisorClass::from_ints(&lat, &[1, 0]).unwrap(),
            DivisorClass::from_ints(&lat, &[0, 1]).unwrap(),
        ]),
        bd_candidates: None,
        lattice: lat,
    }
}

/// Quasi-elliptic surface in characteristic 3 with the given `chi(O)`.
pub fn quasi_elliptic(chi: i64) -> SurfaceModel {
    let lat = NSLattice::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
    SurfaceModel {
        char_p: 3,
        kodaira: Kodaira::One,
        quasi_elliptic: true,
        minimal: true,
        k2_min: 0,
        chi_o_min: chi,
        canonical: DivisorClass::from_ints(&lat, &[1, 0]).unwrap(),
        ample_h: DivisorClass::from_ints(&lat, &[1, 1]).unwrap(),
        effective_generators: None,
        bd_candidates: None,
        lattice: lat,
    }
}

/// Degree-2 K3 surface: `rho = 1`, constant zero.
pub fn k3_degree_two() -> SurfaceModel {
    let lat = NSLattice::from_ints(&[&[2]]).unwrap();
    SurfaceModel {
        char_p: 3,
        kodaira: Kodaira::Zero,
        quasi_elliptic: false,
        minimal: true,
        k2_min: 0,
        chi_o_min: 2,
        canonical: DivisorClass::zero(&lat),
        ample_h: DivisorClass::from_ints(&lat, &[1]).unwrap(),
        effective_generators: None,
        bd_candidates: None,
        lattice: lat,
    }
}

/// Workspace-level directory of example configs.
pub fn configs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// A random valid mock object at `pt`: factors are drawn first and then
/// filed on the side of the torsion pair their slope dictates. Positive-rank
/// factors get `ch2` at or below the corrected Bogomolov bound.
pub fn random_mock(rng: &mut impl rand::Rng, pt: &StabilityPoint) -> MockObject {
    let lat = pt.h.lattice().clone();
    let mut shifted = Vec::new();
    let mut upper = Vec::new();
    let count = rng.gen_range(1..=4);
    while shifted.len() + upper.len() < count {
        let r: i64 = rng.gen_range(0..=3);
        let coords: Vec<Rational> =
            (0..lat.rank()).map(|_| ratio(rng.gen_range(-8..=8), rng.gen_range(1..=3))).collect();
        let ch1 = class(&lat, &coords);
        if r == 0 {
            let deg = pt.h.pair(&ch1).unwrap();
            let ch = if deg.is_positive() {
                ChernCharacter::new(0, ch1, ratio(rng.gen_range(-9..=9), 2))
            } else if deg.is_negative() {
                ChernCharacter::new(0, ch1.neg(), ratio(rng.gen_range(-9..=9), 2))
            } else {
                ChernCharacter::new(0, DivisorClass::zero(&lat), int(rng.gen_range(1..=5)))
            };
            upper.push(ch);
            continue;
        }
        let bound = (ch1.square() + &pt.c_s * int(r * r)) / int(2 * r);
        let ch = ChernCharacter::new(r, ch1, bound - ratio(rng.gen_range(0..=12), 3));
        match classify_torsion_pair(&ch, pt).unwrap() {
            TorsionClass::T => upper.push(ch),
            TorsionClass::F | TorsionClass::BoundaryF => shifted.push(ch),
        }
    }
    MockObject::new(pt, shifted, upper).unwrap()
}
