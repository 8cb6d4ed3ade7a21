//! Neron-Severi lattices, divisor classes and numerical surface models,
//! together with the correction constants built from them.
//!
//! Characteristic `p` is validated and carried along but enters no formula.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactform::{RationalVector, Signature, SymmetricForm};
use crate::rational::{binomial, int, Rational};

/// Intersection lattice of a surface. Construction checks the Hodge index
/// signature `(1, rank - 1, 0)` and integrality of the Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NSLattice {
    form: SymmetricForm,
}

impl NSLattice {
    pub fn new(form: SymmetricForm) -> Result<Arc<Self>> {
        let rho = form.dim();
        if rho == 0 {
            return Err(Error::InvalidLattice("rank must be at least 1".into()));
        }
        if form.gram().iter().flatten().any(|x| !x.is_integer()) {
            return Err(Error::InvalidLattice("intersection numbers must be integers".into()));
        }
        let sig = form.signature();
        if sig != Signature::new(1, rho - 1, 0) {
            return Err(Error::InvalidLattice(format!(
                "signature {sig} violates the Hodge index theorem (expected (1,{},0))",
                rho - 1
            )));
        }
        Ok(Arc::new(Self { form }))
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Arc<Self>> {
        Self::new(SymmetricForm::from_ints(rows)?)
    }

    pub fn rank(&self) -> usize {
        self.form.dim()
    }

    pub fn form(&self) -> &SymmetricForm {
        &self.form
    }
}

/// A rational class in a fixed lattice.
#[derive(Clone, Debug)]
pub struct DivisorClass {
    lattice: Arc<NSLattice>,
    coords: RationalVector,
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        same_lattice(&self.lattice, &other.lattice) && self.coords == other.coords
    }
}

impl Eq for DivisorClass {}

fn same_lattice(a: &Arc<NSLattice>, b: &Arc<NSLattice>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl DivisorClass {
    pub fn new(lattice: &Arc<NSLattice>, coords: RationalVector) -> Result<Self> {
        if coords.dim() != lattice.rank() {
            return Err(Error::DimensionMismatch { expected: lattice.rank(), found: coords.dim() });
        }
        Ok(Self { lattice: Arc::clone(lattice), coords })
    }

    pub fn from_ints(lattice: &Arc<NSLattice>, coords: &[i64]) -> Result<Self> {
        Self::new(lattice, RationalVector::from_ints(coords))
    }

    pub fn zero(lattice: &Arc<NSLattice>) -> Self {
        Self { lattice: Arc::clone(lattice), coords: RationalVector::zeros(lattice.rank()) }
    }

    pub fn lattice(&self) -> &Arc<NSLattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &RationalVector {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        same_lattice(&self.lattice, &other.lattice)
    }

    fn check_lattice(&self, other: &Self) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    /// Intersection number `self . other`.
    pub fn pair(&self, other: &Self) -> Result<Rational> {
        self.check_lattice(other)?;
        self.lattice.form.pair(&self.coords, &other.coords)
    }

    pub fn square(&self) -> Rational {
        self.lattice.form.evaluate(&self.coords).expect("class dimension checked at construction")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        Ok(Self { lattice: Arc::clone(&self.lattice), coords: &self.coords + &other.coords })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        Ok(Self { lattice: Arc::clone(&self.lattice), coords: &self.coords - &other.coords })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self { lattice: Arc::clone(&self.lattice), coords: self.coords.scale(k) }
    }

    pub fn neg(&self) -> Self {
        Self { lattice: Arc::clone(&self.lattice), coords: -&self.coords }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.coords.fmt(f)
    }
}

/// `H . v = 0  =>  v^2 <= 0`. Holds on every valid lattice when `H^2 > 0`;
/// exposed so it can be asserted.
pub fn hodge_index_check(h: &DivisorClass, v: &DivisorClass) -> Result<bool> {
    if !h.square().is_positive() {
        return Err(Error::Precondition("hodge_index_check needs H^2 > 0".into()));
    }
    Ok(!h.pair(v)?.is_zero() || !v.square().is_positive())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kodaira {
    MinusInfinity,
    Zero,
    One,
    Two,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kodaira::MinusInfinity => "minus_infinity",
            Kodaira::Zero => "0",
            Kodaira::One => "1",
            Kodaira::Two => "2",
        })
    }
}

/// Numerical description of a smooth projective surface.
///
/// `k2_min` and `chi_o_min` refer to the minimal model of the birational
/// class and are inputs; they are not derivable from the lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    pub char_p: u64,
    pub kodaira: Kodaira,
    pub quasi_elliptic: bool,
    /// Whether this model is itself the minimal model (then `K^2 = k2_min`).
    pub minimal: bool,
    pub k2_min: i64,
    pub chi_o_min: i64,
    pub lattice: Arc<NSLattice>,
    pub canonical: DivisorClass,
    pub ample_h: DivisorClass,
    pub effective_generators: Option<Vec<DivisorClass>>,
    pub bd_candidates: Option<Vec<DivisorClass>>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl SurfaceModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if !is_prime(self.char_p) {
            return bad(format!("characteristic {} is not prime", self.char_p));
        }
        if self.quasi_elliptic && self.kodaira != Kodaira::One {
            return bad("quasi-elliptic surfaces have Kodaira dimension 1".into());
        }
        if self.quasi_elliptic && !matches!(self.char_p, 2 | 3) {
            return bad("quasi-elliptic surfaces exist only in characteristic 2 or 3".into());
        }
        let classes = [("canonical", &self.canonical), ("ample_H", &self.ample_h)];
        for (name, c) in classes {
            if !same_lattice(c.lattice(), &self.lattice) {
                return bad(format!("{name} is not a class of the model's lattice"));
            }
        }
        for (name, list) in
            [("effective_generators", &self.effective_generators), ("bd_candidates", &self.bd_candidates)]
        {
            if list.iter().flatten().any(|c| !same_lattice(c.lattice(), &self.lattice)) {
                return bad(format!("{name} contains a class of another lattice"));
            }
        }
        if !self.ample_h.square().is_positive() {
            return bad("ample_H must satisfy H^2 > 0".into());
        }
        if self.minimal && self.canonical.square() != int(self.k2_min) {
            return bad(format!(
                "K^2 = {} disagrees with K2_min = {} on a model declared minimal",
                self.canonical.square(),
                self.k2_min
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DConstant {
    pub value: Rational,
    /// True when the value is the `5 K^2` bound from the very ample `5K`
    /// rather than a minimum over supplied candidates.
    pub fallback: bool,
}

/// `min { K.H : H candidate, H^2 >= K.H }` over the supplied candidates,
/// falling back to `5 K^2` (realized by `H = 5K`) when none is admissible.
pub fn d_constant(s: &SurfaceModel) -> Result<DConstant> {
    if s.kodaira != Kodaira::Two {
        return Err(Error::Precondition("d constant is defined only for Kodaira dimension 2".into()));
    }
    let mut best: Option<Rational> = None;
    for h in s.bd_candidates.iter().flatten() {
        let kh = s.canonical.pair(h)?;
        if h.square() >= kh && best.as_ref().is_none_or(|b| &kh < b) {
            best = Some(kh);
        }
    }
    match best {
        Some(value) => Ok(DConstant { value, fallback: false }),
        None if s.k2_min > 0 => Ok(DConstant { value: int(5 * s.k2_min), fallback: true }),
        None => Err(Error::Precondition("no admissible candidate and K2_min <= 0 leaves no fallback".into())),
    }
}

/// The surface constant: `d - chi + 2` for general type, `2 - chi` for
/// quasi-elliptic surfaces, `0` otherwise. Not clamped at zero.
pub fn c_constant(s: &SurfaceModel) -> Result<Rational> {
    s.validate()?;
    Ok(match s.kodaira {
        Kodaira::Two => d_constant(s)?.value - int(s.chi_o_min) + int(2),
        Kodaira::One if s.quasi_elliptic => int(2 - s.chi_o_min),
        _ => Rational::zero(),
    })
}

/// Upper bound `5 K^2 - chi + 2` for general type surfaces (zero otherwise),
/// valid whatever candidates are supplied.
pub fn c_constant_canonical_bound(s: &SurfaceModel) -> Result<Rational> {
    s.validate()?;
    Ok(match s.kodaira {
        Kodaira::Two => int(5 * s.k2_min - s.chi_o_min + 2),
        _ => c_constant(s)?,
    })
}

/// Closed form of the constant for a smooth degree-`d` surface in `P^3`.
pub fn hypersurface_constant(d: i64) -> Result<Rational> {
    if d < 5 {
        return Err(Error::Precondition(format!("degree {d} < 5 is not of general type")));
    }
    let d = int(d);
    let five_sixths = Rational::new(5.into(), 6.into());
    let eighty_five_sixths = Rational::new(85.into(), 6.into());
    Ok(five_sixths * &d * &d * &d - int(7) * &d * &d + eighty_five_sixths * &d + int(2))
}

/// The numerical model of a smooth degree-`d` surface in `P^3`:
/// `NS = Z[H]`, `H^2 = d`, `K = (d - 4) H`, `chi = 1 + C(d-1, 3)`, with
/// candidates `mH` for `1 <= m <= d`.
pub fn hypersurface_surface(d: i64, char_p: u64) -> Result<SurfaceModel> {
    if d < 1 {
        return Err(Error::Precondition("degree must be positive".into()));
    }
    let lattice = NSLattice::from_ints(&[&[d]])?;
    let h = DivisorClass::from_ints(&lattice, &[1])?;
    let k = DivisorClass::from_ints(&lattice, &[d - 4])?;
    let chi = binomial(d - 1, 3) + Rational::one();
    let kodaira = match d {
        1..=3 => Kodaira::MinusInfinity,
        4 => Kodaira::Zero,
        _ => Kodaira::Two,
    };
    let model = SurfaceModel {
        char_p,
        kodaira,
        quasi_elliptic: false,
        minimal: d >= 4,
        k2_min: d * (d - 4) * (d - 4),
        chi_o_min: chi.to_integer().try_into().expect("chi fits in i64"),
        canonical: k,
        ample_h: h,
        effective_generators: None,
        bd_candidates: Some((1..=d).map(|m| DivisorClass::from_ints(&lattice, &[m])).collect::<Result<_>>()?),
        lattice,
    };
    model.validate()?;
    Ok(model)
}

/// Constant attached to a polarized variety of dimension >= 3 through the
/// invariants of its general linear-section surface.
pub fn higher_dim_constant(kappa_fiber: i64, k2_r: i64, chi_r: i64) -> Rational {
    if kappa_fiber <= 0 {
        Rational::zero()
    } else {
        int(5 * k2_r - chi_r + 2)
    }
}

/// Blow-up of a surface at `l` points, modelled on `NS(S) + Z^l` with
/// exceptional block `-Id(l)` orthogonal to the pulled-back lattice.
#[derive(Clone, Debug)]
pub struct BlowupModel {
    pub base: SurfaceModel,
    pub points: usize,
    pub lattice: Arc<NSLattice>,
}

pub fn make_blowup(s: &SurfaceModel, l: usize) -> Result<BlowupModel> {
    let minus_id = SymmetricForm::diagonal(vec![int(-1); l]);
    let lattice = if l == 0 { Arc::clone(&s.lattice) } else { NSLattice::new(s.lattice.form().direct_sum(&minus_id))? };
    Ok(BlowupModel { base: s.clone(), points: l, lattice })
}

impl BlowupModel {
    pub fn base_rank(&self) -> usize {
        self.base.lattice.rank()
    }

    pub fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass> {
        if !d.same_lattice(&DivisorClass::zero(&self.base.lattice)) {
            return Err(Error::LatticeMismatch);
        }
        let mut coords = d.coords().coords().to_vec();
        coords.resize(self.lattice.rank(), Rational::zero());
        DivisorClass::new(&self.lattice, RationalVector::new(coords))
    }

    /// Exceptional curve `E_i`, `0 <= i < points`.
    pub fn exceptional(&self, i: usize) -> DivisorClass {
        assert!(i < self.points, "exceptional index out of range");
        DivisorClass::new(&self.lattice, RationalVector::unit(self.lattice.rank(), self.base_rank() + i))
            .expect("rank matches")
    }

    /// Splits a class as `psi^* M + sum a_i E_i`.
    pub fn decompose(&self, d: &DivisorClass) -> Result<(DivisorClass, Vec<Rational>)> {
        if !d.same_lattice(&DivisorClass::zero(&self.lattice)) {
            return Err(Error::LatticeMismatch);
        }
        let c = d.coords().coords();
        let rho = self.base_rank();
        let m = DivisorClass::new(&self.base.lattice, RationalVector::new(c[..rho].to_vec()))?;
        Ok((m, c[rho..].to_vec()))
    }

    /// The blown-up surface as a model in its own right. Minimal-model data
    /// are inherited; canonical becomes `psi^* K + sum E_i`.
    pub fn as_surface(&self) -> Result<SurfaceModel> {
        let pull_all = |v: &Option<Vec<DivisorClass>>| -> Result<Option<Vec<DivisorClass>>> {
            v.as_ref().map(|xs| xs.iter().map(|x| self.pullback(x)).collect()).transpose()
        };
        let mut canonical = self.pullback(&self.base.canonical)?;
        for i in 0..self.points {
            canonical = canonical.add(&self.exceptional(i))?;
        }
        Ok(SurfaceModel {
            char_p: self.base.char_p,
            kodaira: self.base.kodaira,
            quasi_elliptic: self.base.quasi_elliptic,
            minimal: self.base.minimal && self.points == 0,
            k2_min: self.base.k2_min,
            chi_o_min: self.base.chi_o_min,
            lattice: Arc::clone(&self.lattice),
            canonical,
            ample_h: self.pullback(&self.base.ample_h)?,
            effective_generators: pull_all(&self.base.effective_generators)?,
            bd_candidates: pull_all(&self.base.bd_candidates)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn quintic() -> SurfaceModel {
        hypersurface_surface(5, 5).unwrap()
    }

    fn general_type(gram: i64, k: i64, k2: i64, chi: i64, candidates: Option<Vec<i64>>) -> SurfaceModel {
        let lattice = NSLattice::from_ints(&[&[gram]]).unwrap();
        SurfaceModel {
            char_p: 7,
            kodaira: Kodaira::Two,
            quasi_elliptic: false,
            minimal: true,
            k2_min: k2,
            chi_o_min: chi,
            canonical: DivisorClass::from_ints(&lattice, &[k]).unwrap(),
            ample_h: DivisorClass::from_ints(&lattice, &[1]).unwrap(),
            effective_generators: None,
            bd_candidates: candidates
                .map(|ms| ms.iter().map(|&m| DivisorClass::from_ints(&lattice, &[m]).unwrap()).collect()),
            lattice,
        }
    }

    fn elliptic(quasi: bool, p: u64, chi: i64) -> SurfaceModel {
        let lattice = NSLattice::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        SurfaceModel {
            char_p: p,
            kodaira: Kodaira::One,
            quasi_elliptic: quasi,
            minimal: true,
            k2_min: 0,
            chi_o_min: chi,
            canonical: DivisorClass::from_ints(&lattice, &[1, 0]).unwrap(),
            ample_h: DivisorClass::from_ints(&lattice, &[1, 1]).unwrap(),
            effective_generators: None,
            bd_candidates: None,
            lattice,
        }
    }

    #[test]
    fn pair_examples() {
        let l = NSLattice::from_ints(&[&[5]]).unwrap();
        let h = DivisorClass::from_ints(&l, &[1]).unwrap();
        assert_eq!(h.pair(&h).unwrap(), int(5));
        assert_eq!(h.pair(&DivisorClass::zero(&l)).unwrap(), int(0));
        let hyp = NSLattice::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        let a = DivisorClass::from_ints(&hyp, &[1, 0]).unwrap();
        let b = DivisorClass::from_ints(&hyp, &[0, 1]).unwrap();
        assert_eq!(a.pair(&b).unwrap(), int(1));
        assert_eq!(a.pair(&h).unwrap_err(), Error::LatticeMismatch);
    }

    #[test]
    fn lattice_rejects_bad_signature_and_fractions() {
        assert!(NSLattice::from_ints(&[&[1, 0], &[0, 1]]).is_err());
        assert!(NSLattice::from_ints(&[&[-1]]).is_err());
        assert!(NSLattice::from_ints(&[&[1, 0], &[0, 0]]).is_err());
        let frac = SymmetricForm::new(vec![vec![ratio(1, 2)]]).unwrap();
        assert!(NSLattice::new(frac).is_err());
    }

    #[test]
    fn hodge_index_examples() {
        let l = NSLattice::from_ints(&[&[2]]).unwrap();
        let h = DivisorClass::from_ints(&l, &[1]).unwrap();
        assert!(hodge_index_check(&h, &DivisorClass::zero(&l)).unwrap());
        let hyp = NSLattice::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        let h = DivisorClass::from_ints(&hyp, &[1, 1]).unwrap();
        assert!(hodge_index_check(&h, &DivisorClass::from_ints(&hyp, &[1, -1]).unwrap()).unwrap());
        assert!(hodge_index_check(&h, &DivisorClass::from_ints(&hyp, &[1, 2]).unwrap()).unwrap());
        let iso = DivisorClass::from_ints(&hyp, &[1, 0]).unwrap();
        assert!(hodge_index_check(&iso, &h).is_err());
    }

    #[test]
    fn d_constant_examples() {
        let s = general_type(5, 1, 5, 5, Some((1..=10).collect()));
        assert_eq!(d_constant(&s).unwrap(), DConstant { value: int(5), fallback: false });

        let s = general_type(7, 3, 63, 21, Some((1..=10).collect()));
        assert_eq!(d_constant(&s).unwrap().value, int(63));

        let s = general_type(5, 1, 5, 5, None);
        assert_eq!(d_constant(&s).unwrap(), DConstant { value: int(25), fallback: true });
    }

    #[test]
    fn d_constant_falls_back_when_nothing_admissible() {
        // 7 m^2 >= 21 m fails for m = 1, 2.
        let s = general_type(7, 3, 63, 21, Some(vec![1, 2]));
        assert_eq!(d_constant(&s).unwrap(), DConstant { value: int(315), fallback: true });
    }

    #[test]
    fn d_constant_errors() {
        assert!(d_constant(&elliptic(false, 5, 0)).is_err());
        let mut s = general_type(5, 1, 5, 5, Some(vec![]));
        s.minimal = false;
        s.k2_min = 0;
        assert!(d_constant(&s).is_err());
    }

    #[test]
    fn c_constant_examples() {
        assert_eq!(c_constant(&quintic()).unwrap(), int(2));
        assert_eq!(c_constant(&elliptic(true, 3, 1)).unwrap(), int(1));
        assert_eq!(c_constant(&elliptic(false, 5, 1)).unwrap(), int(0));
        let mut k3 = elliptic(false, 5, 2);
        k3.kodaira = Kodaira::Zero;
        assert_eq!(c_constant(&k3).unwrap(), int(0));
    }

    #[test]
    fn c_constant_is_not_clamped() {
        assert_eq!(c_constant(&elliptic(true, 2, 5)).unwrap(), int(-3));
    }

    #[test]
    fn canonical_bound_dominates() {
        let s = quintic();
        assert_eq!(c_constant_canonical_bound(&s).unwrap(), int(22));
        assert!(c_constant_canonical_bound(&s).unwrap() >= c_constant(&s).unwrap());
    }

    #[test]
    fn model_validation() {
        assert!(matches!(c_constant(&elliptic(true, 5, 1)), Err(Error::InvalidModel(_))));
        let mut s = elliptic(true, 2, 1);
        s.kodaira = Kodaira::Two;
        assert!(s.validate().is_err());
        let mut s = quintic();
        s.char_p = 6;
        assert!(s.validate().is_err());
        let mut s = quintic();
        s.k2_min = 4;
        assert!(s.validate().is_err());
        s.minimal = false;
        assert!(s.validate().is_ok());
        let mut s = elliptic(false, 5, 1);
        s.ample_h = DivisorClass::from_ints(&s.lattice, &[1, 0]).unwrap();
        assert!(s.validate().is_err());
    }

    #[test]
    fn hypersurface_constant_examples() {
        assert_eq!(hypersurface_constant(5).unwrap(), int(2));
        assert_eq!(hypersurface_constant(6).unwrap(), int(15));
        assert_eq!(hypersurface_constant(7).unwrap(), int(44));
        assert!(hypersurface_constant(4).is_err());
    }

    #[test]
    fn hypersurface_constant_matches_synthesized_models() {
        for d in 5..=20 {
            let model = hypersurface_surface(d, 2).unwrap();
            assert_eq!(hypersurface_constant(d).unwrap(), c_constant(&model).unwrap(), "d = {d}");
        }
    }

    #[test]
    fn higher_dim_examples() {
        assert_eq!(higher_dim_constant(-1, 9, 9), int(0));
        assert_eq!(higher_dim_constant(2, 5, 5), int(22));
        assert_eq!(higher_dim_constant(1, 1, 3), int(4));
    }

    #[test]
    fn blowup_lattice_shape() {
        let s = quintic();
        let b0 = make_blowup(&s, 0).unwrap();
        assert_eq!(b0.lattice, s.lattice);
        let b = make_blowup(&s, 2).unwrap();
        assert_eq!(b.lattice.form(), &SymmetricForm::from_ints(&[&[5, 0, 0], &[0, -1, 0], &[0, 0, -1]]).unwrap());
        let (e1, e2) = (b.exceptional(0), b.exceptional(1));
        assert_eq!(e1.pair(&e2).unwrap(), int(0));
        assert_eq!(e1.square(), int(-1));
        let h = b.pullback(&s.ample_h).unwrap();
        assert_eq!(h.pair(&e1).unwrap(), int(0));
    }

    #[test]
    fn blowup_keeps_constant() {
        let s = quintic();
        for l in [0, 1, 2, 5] {
            let t = make_blowup(&s, l).unwrap().as_surface().unwrap();
            assert_eq!(c_constant(&t).unwrap(), c_constant(&s).unwrap());
        }
    }

    #[test]
    fn decompose_roundtrip() {
        let s = quintic();
        let b = make_blowup(&s, 2).unwrap();
        let d = DivisorClass::from_ints(&b.lattice, &[3, 1, -2]).unwrap();
        let (m, a) = b.decompose(&d).unwrap();
        assert_eq!(m, DivisorClass::from_ints(&s.lattice, &[3]).unwrap());
        assert_eq!(a, vec![int(1), int(-2)]);
    }
}
