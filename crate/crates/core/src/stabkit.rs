//! Tilt stability data on a surface: the central charge `Z_{H,B}`, the
//! torsion pair `(T_{H,B}, F_{H,B})`, numerical mock objects of the tilted
//! heart, and support-property certificates.
//!
//! Objects are lists of declared-semistable factors, since there is no
//! abelian category here. `H` and `B` are rational classes.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::chern::{delta, delta_tilde, slope, twist_b, ChernCharacter, Slope};
use crate::error::{Error, Result};
use crate::exactform::{
    definiteness_on_subspace, kernel_of_linear_map, Definiteness, RationalVector, Signature, SymmetricForm,
};
use crate::nsgeom::{c_constant, DivisorClass, SurfaceModel};
use crate::rational::{int, is_nonneg, Rational};

#[derive(Clone, Debug)]
pub struct StabilityPoint {
    pub surface: SurfaceModel,
    pub h: DivisorClass,
    pub b: DivisorClass,
    pub c_s: Rational,
    pub c_h: Rational,
}

impl StabilityPoint {
    /// Uses the surface constant for `c_s`.
    pub fn new(surface: &SurfaceModel, h: DivisorClass, b: DivisorClass, c_h: Rational) -> Result<Self> {
        let c_s = c_constant(surface)?;
        Self::with_constant(surface, h, b, c_s, c_h)
    }

    pub fn with_constant(
        surface: &SurfaceModel,
        h: DivisorClass,
        b: DivisorClass,
        c_s: Rational,
        c_h: Rational,
    ) -> Result<Self> {
        if !h.same_lattice(&surface.ample_h) || !b.same_lattice(&surface.ample_h) {
            return Err(Error::LatticeMismatch);
        }
        if !h.square().is_positive() {
            return Err(Error::Precondition("H must satisfy H^2 > 0".into()));
        }
        if c_h.is_negative() {
            return Err(Error::Precondition("C_H must be nonnegative".into()));
        }
        Ok(Self { surface: surface.clone(), h, b, c_s, c_h })
    }

    /// `H . B`, the slope threshold of the torsion pair.
    pub fn threshold(&self) -> Rational {
        self.h.pair(&self.b).expect("same lattice checked at construction")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Charge {
    pub re: Rational,
    pub im: Rational,
}

impl Charge {
    pub fn zero() -> Self {
        Self { re: Rational::zero(), im: Rational::zero() }
    }

    fn add(&self, other: &Self) -> Self {
        Self { re: &self.re + &other.re, im: &self.im + &other.im }
    }

    fn sub(&self, other: &Self) -> Self {
        Self { re: &self.re - &other.re, im: &self.im - &other.im }
    }

    /// Upper half-plane or the open negative real axis.
    pub fn in_allowed_region(&self) -> bool {
        self.im.is_positive() || (self.im.is_zero() && self.re.is_negative())
    }
}

/// `Z = -ch2^B + (C_S / (2 H^2) + 1/2) H^2 ch0 + i H.ch1^B`.
pub fn central_charge(pt: &StabilityPoint, ch: &ChernCharacter) -> Result<Charge> {
    let twisted = twist_b(ch, &pt.b)?;
    let h2 = pt.h.square();
    let coeff = &pt.c_s / (int(2) * &h2) + Rational::new(1.into(), 2.into());
    let re = -&twisted.ch2 + coeff * &h2 * twisted.rank();
    let im = pt.h.pair(&twisted.ch1)?;
    Ok(Charge { re, im })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsionClass {
    T,
    F,
    /// In `F` with `mu_H = H.B` exactly.
    BoundaryF,
}

impl fmt::Display for TorsionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorsionClass::T => "T",
            TorsionClass::F => "F",
            TorsionClass::BoundaryF => "boundary-F",
        })
    }
}

/// Side of the torsion pair a semistable class falls on.
pub fn classify_torsion_pair(ch: &ChernCharacter, pt: &StabilityPoint) -> Result<TorsionClass> {
    if ch.ch0 == 0 {
        return Ok(TorsionClass::T);
    }
    let Slope::Finite(mu) = slope(ch, &pt.h)? else { unreachable!("positive rank has finite slope") };
    let threshold = pt.threshold();
    Ok(if mu > threshold {
        TorsionClass::T
    } else if mu == threshold {
        TorsionClass::BoundaryF
    } else {
        TorsionClass::F
    })
}

/// Numerical stand-in for an object of the tilted heart: `F[1]` factors
/// and `T` factors, each declared semistable.
#[derive(Clone, Debug)]
pub struct MockObject {
    shifted: Vec<ChernCharacter>,
    torsion_or_big: Vec<ChernCharacter>,
}

impl MockObject {
    /// Validates the torsion-pair side of every factor and the corrected
    /// Bogomolov inequality on every positive-rank factor. Torsion factors
    /// must have `H.ch1 > 0`, or `ch1 = 0` and positive length.
    pub fn new(pt: &StabilityPoint, shifted: Vec<ChernCharacter>, torsion_or_big: Vec<ChernCharacter>) -> Result<Self> {
        if shifted.is_empty() && torsion_or_big.is_empty() {
            return Err(Error::Precondition("mock object has no factors".into()));
        }
        let malformed = |what: String| Err(Error::Precondition(format!("malformed object: {what}")));
        for (i, f) in shifted.iter().enumerate() {
            if f.ch0 <= 0 {
                return malformed(format!("F-factor {i} has ch0 <= 0"));
            }
            if classify_torsion_pair(f, pt)? == TorsionClass::T {
                return malformed(format!("F-factor {i} has slope above H.B"));
            }
        }
        for (i, t) in torsion_or_big.iter().enumerate() {
            if t.ch0 < 0 {
                return malformed(format!("T-factor {i} has negative rank"));
            }
            if t.ch0 == 0 {
                let deg = pt.h.pair(&t.ch1)?;
                let zero_dim = deg.is_zero() && t.ch1.is_zero() && t.ch2.is_positive();
                if !(deg.is_positive() || zero_dim) {
                    return malformed(format!("torsion factor {i} is not effective"));
                }
            } else if classify_torsion_pair(t, pt)? != TorsionClass::T {
                return malformed(format!("T-factor {i} has slope at most H.B"));
            }
        }
        for (i, f) in shifted.iter().chain(&torsion_or_big).enumerate() {
            if f.ch0 > 0 && !is_nonneg(&delta_tilde(f, &pt.c_s)) {
                return malformed(format!("factor {i} violates the corrected Bogomolov inequality"));
            }
        }
        Ok(Self { shifted, torsion_or_big })
    }

    pub fn shifted(&self) -> &[ChernCharacter] {
        &self.shifted
    }

    pub fn torsion_or_big(&self) -> &[ChernCharacter] {
        &self.torsion_or_big
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub z: Charge,
    pub in_allowed_region: bool,
}

/// Sums the charge over the object (shifted factors count negatively).
/// A result outside the allowed region would be a counterexample.
pub fn stability_function_check(obj: &MockObject, pt: &StabilityPoint) -> Result<StabilityReport> {
    let mut z = Charge::zero();
    for t in &obj.torsion_or_big {
        z = z.add(&central_charge(pt, t)?);
    }
    for f in &obj.shifted {
        z = z.sub(&central_charge(pt, f)?);
    }
    Ok(StabilityReport { in_allowed_region: z.in_allowed_region(), z })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLink {
    pub name: &'static str,
    pub lhs: Rational,
    pub relation: &'static str,
    pub rhs: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryVerdict {
    Certified,
    /// A link of the chain fails, so the chain does not apply to this class.
    NotApplicable(String),
    /// Every link holds yet `Re Z <= 0`.
    Violation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryTrace {
    pub delta: Rational,
    pub delta_tilde: Rational,
    /// `(H ch1^B)^2 - 2 H^2 ch0^B ch2^B`.
    pub delta_bar_hb: Rational,
    pub re_z: Rational,
    pub links: Vec<ChainLink>,
    /// `H^2 delta <= delta_bar_hb`: the comparison Hodge index gives when `H.ch1^B = 0`.
    pub scaled_hodge_link: ChainLink,
    pub verdict: BoundaryVerdict,
}

/// Audited trace of
/// `0 <= D~ <= delta_bar_{H,B} + C ch0^2 = ch0^B (-2 H^2 ch2^B + C ch0^B)`
/// for a class on the boundary `mu_H = H.B`, ending in `Re Z > 0`.
pub fn boundary_positivity_check(ch: &ChernCharacter, pt: &StabilityPoint) -> Result<BoundaryTrace> {
    if ch.ch0 <= 0 {
        return Err(Error::Precondition("boundary check needs ch0 > 0".into()));
    }
    let tw = twist_b(ch, &pt.b)?;
    if !pt.h.pair(&tw.ch1)?.is_zero() {
        return Err(Error::Precondition("class is not on the boundary: H.ch1^B != 0".into()));
    }
    let c = &pt.c_s;
    let r = tw.rank();
    let d = delta(ch);
    let dt = delta_tilde(ch, c);
    if dt.is_negative() {
        return Err(Error::Precondition("corrected discriminant is negative".into()));
    }
    let h2 = pt.h.square();
    let h_ch1 = pt.h.pair(&tw.ch1)?;
    let delta_bar_hb = &h_ch1 * &h_ch1 - int(2) * &h2 * &r * &tw.ch2;
    let middle = &delta_bar_hb + c * &r * &r;
    let product = &r * (-int(2) * &h2 * &tw.ch2 + c * &r);
    let re_z = central_charge(pt, ch)?.re;

    let link = |name, lhs: &Rational, relation, rhs: &Rational, holds| ChainLink {
        name,
        lhs: lhs.clone(),
        relation,
        rhs: rhs.clone(),
        holds,
    };
    let links = vec![
        link("bogomolov", &Rational::zero(), "<=", &dt, !dt.is_negative()),
        link("hodge", &dt, "<=", &middle, dt <= middle),
        link("expand", &middle, "=", &product, middle == product),
        link("positivity", &re_z, ">", &Rational::zero(), re_z.is_positive()),
    ];
    let scaled = &h2 * &d;
    let scaled_hodge_link = link("hodge-scaled", &scaled, "<=", &delta_bar_hb, scaled <= delta_bar_hb);

    let verdict = if let Some(bad) = links[..3].iter().find(|l| !l.holds) {
        BoundaryVerdict::NotApplicable(format!(
            "{} link fails: {} {} {} is false",
            bad.name,
            crate::rational::render(&bad.lhs),
            bad.relation,
            crate::rational::render(&bad.rhs)
        ))
    } else if links[3].holds {
        BoundaryVerdict::Certified
    } else {
        BoundaryVerdict::Violation
    };
    Ok(BoundaryTrace { delta: d, delta_tilde: dt, delta_bar_hb, re_z, links, scaled_hodge_link, verdict })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportCertificate {
    /// `Re Z` and `Im Z` as functionals on `(ch0, ch1, ch2)`.
    pub re_row: RationalVector,
    pub im_row: RationalVector,
    pub kernel_basis: Vec<RationalVector>,
    pub quadratic_form: SymmetricForm,
    pub restricted_signature: Signature,
    pub verdict: Definiteness,
}

/// Restricts `D + C_S ch0^2 + C_H (H.ch1^B)^2` to `ker Z` on
/// `Q^{rank + 2}` with coordinates `(ch0, ch1, ch2)`.
pub fn support_property_check(pt: &StabilityPoint) -> Result<SupportCertificate> {
    let lat = pt.h.lattice();
    let rho = lat.rank();
    let dim = rho + 2;
    let gram = lat.form();
    let gh = gram.apply(pt.h.coords())?;
    let gb = gram.apply(pt.b.coords())?;
    let h2 = pt.h.square();
    let half = Rational::new(1.into(), 2.into());

    let row = |first: Rational, middle: &RationalVector, last: Rational| {
        let mut c = Vec::with_capacity(dim);
        c.push(first);
        c.extend(middle.coords().iter().cloned());
        c.push(last);
        RationalVector::new(c)
    };
    let re_row = row(&half * (&pt.c_s + &h2 - pt.b.square()), &gb, int(-1));
    let im_row = row(-pt.threshold(), &gh, Rational::zero());
    let kernel_basis = kernel_of_linear_map(&[re_row.clone(), im_row.clone()], dim)?;

    let mut q = SymmetricForm::zero(dim).add(&embed_middle(gram, dim))?;
    let mut corner = vec![vec![Rational::zero(); dim]; dim];
    corner[0][0] = pt.c_s.clone();
    corner[0][dim - 1] = int(-1);
    corner[dim - 1][0] = int(-1);
    q = q.add(&SymmetricForm::new(corner)?)?;
    q = q.add(&SymmetricForm::outer_square(&im_row).scale(&pt.c_h))?;

    let (verdict, restricted_signature) = definiteness_on_subspace(&q, &kernel_basis)?;
    Ok(SupportCertificate { re_row, im_row, kernel_basis, quadratic_form: q, restricted_signature, verdict })
}

fn embed_middle(gram: &SymmetricForm, dim: usize) -> SymmetricForm {
    SymmetricForm::zero(1).direct_sum(gram).direct_sum(&SymmetricForm::zero(dim - 1 - gram.dim()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CHEstimate {
    pub value: Rational,
    /// False when no generators were supplied; the value then certifies nothing.
    pub verified: bool,
}

/// `max(0, max_D -D^2 / (H.D)^2)` over the surface's effective generators,
/// with `H` the model's ample class.
pub fn estimate_c_h(s: &SurfaceModel) -> Result<CHEstimate> {
    estimate_c_h_for(s, &s.ample_h)
}

/// As [`estimate_c_h`] for an arbitrary polarization. Only valid for the
/// supplied generators.
pub fn estimate_c_h_for(s: &SurfaceModel, h: &DivisorClass) -> Result<CHEstimate> {
    let Some(gens) = s.effective_generators.as_ref().filter(|g| !g.is_empty()) else {
        return Ok(CHEstimate { value: Rational::zero(), verified: false });
    };
    let mut value = Rational::zero();
    for (i, d) in gens.iter().enumerate() {
        let hd = h.pair(d)?;
        if !hd.is_positive() {
            return Err(Error::Precondition(format!("effective generator {i} has H.D <= 0")));
        }
        let ratio = -d.square() / (&hd * &hd);
        if ratio > value {
            value = ratio;
        }
    }
    Ok(CHEstimate { value, verified: true })
}
