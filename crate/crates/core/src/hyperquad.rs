//! Quadratic forms on blow-ups of hypersurfaces along codimension-two
//! linear sections, and the negativity of the discriminant form on the
//! kernel of the deformed charges `Z_t`.
//!
//! Classes are tracked only through their `H`-contracted numbers: a
//! divisor becomes `(b, a)` with `b = H^{n-1} M` and `a` the exceptional
//! coefficients. The exceptional pairings `H^n psi^*H^{n-2} E_i E_j` are
//! stored pre-scaled in `exc_gram`.

use num_traits::{Signed, Zero};

use crate::chern::{delta_bar, ReducedCharacter};
use crate::error::{Error, Result};
use crate::exactform::{
    definiteness_on_subspace, kernel_of_linear_map, Definiteness, RationalVector, Signature, SymmetricForm,
};
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypersurfaceModel {
    pub n: u32,
    pub d: i64,
    exc_gram: SymmetricForm,
}

impl HypersurfaceModel {
    /// Generic configuration: `psi^*H^{n-2} E_i^2 = -d`, distinct
    /// exceptional divisors orthogonal, so `exc_gram = diag(-d * H^n)`.
    pub fn new(n: u32, d: i64, l: usize) -> Result<Self> {
        Self::check_dims(n, d)?;
        let entry = -int(d) * int(d);
        Ok(Self { n, d, exc_gram: SymmetricForm::diagonal(vec![entry; l]) })
    }

    /// Model with user-supplied (already `H^n`-scaled) exceptional pairings.
    pub fn with_exc_gram(n: u32, d: i64, exc_gram: SymmetricForm) -> Result<Self> {
        Self::check_dims(n, d)?;
        Ok(Self { n, d, exc_gram })
    }

    fn check_dims(n: u32, d: i64) -> Result<()> {
        if n < 2 {
            return Err(Error::Precondition(format!("dimension n = {n} < 2")));
        }
        if d < 1 {
            return Err(Error::Precondition(format!("degree d = {d} < 1")));
        }
        Ok(())
    }

    pub fn l(&self) -> usize {
        self.exc_gram.dim()
    }

    /// `H^n`, the degree.
    pub fn hn(&self) -> Rational {
        int(self.d)
    }

    pub fn exc_gram(&self) -> &SymmetricForm {
        &self.exc_gram
    }

    /// The form `q_Y` on `(b, a)`-space: `1 (+) exc_gram`.
    pub fn q_form(&self) -> SymmetricForm {
        SymmetricForm::diagonal(vec![int(1)]).direct_sum(&self.exc_gram)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaVector {
    pub b: Rational,
    pub a: Vec<Rational>,
}

impl LambdaVector {
    pub fn new(b: Rational, a: Vec<Rational>) -> Self {
        Self { b, a }
    }

    pub fn zero(l: usize) -> Self {
        Self { b: Rational::zero(), a: vec![Rational::zero(); l] }
    }

    pub fn to_vector(&self) -> RationalVector {
        let mut c = Vec::with_capacity(1 + self.a.len());
        c.push(self.b.clone());
        c.extend(self.a.iter().cloned());
        RationalVector::new(c)
    }

    pub fn from_vector(v: &RationalVector) -> Self {
        let c = v.coords();
        Self { b: c[0].clone(), a: c[1..].to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedBlowupCharacter {
    pub ch0: i64,
    pub lambda1: LambdaVector,
    /// `psi^*H^{n-2} ch2`.
    pub h_ch2: Rational,
}

fn check_l(model: &HypersurfaceModel, v: &LambdaVector) -> Result<()> {
    if v.a.len() != model.l() {
        return Err(Error::DimensionMismatch { expected: model.l(), found: v.a.len() });
    }
    Ok(())
}

/// `q_Y(b, sum a_i E_i) = b^2 + H^n psi^*H^{n-2} (sum a_i E_i)^2`.
pub fn q_y(model: &HypersurfaceModel, v: &LambdaVector) -> Result<Rational> {
    check_l(model, v)?;
    model.q_form().evaluate(&v.to_vector())
}

/// `pr_H(psi^*M, sum a_i E_i) = (H^{n-1} M, sum a_i E_i)`, with
/// `H^{n-1} M` supplied as the number `m_deg`.
pub fn pr_h(m_deg: &Rational, a: &RationalVector) -> LambdaVector {
    LambdaVector::new(m_deg.clone(), a.coords().to_vec())
}

/// `pr_H` of `h_t = (t + 1) h - e` where `e` is the exceptional divisor
/// with index `e_index`.
pub fn hbar_t(model: &HypersurfaceModel, t: &Rational, e_index: usize) -> Result<LambdaVector> {
    if e_index >= model.l() {
        return Err(Error::Precondition("exceptional index out of range".into()));
    }
    let mut a = RationalVector::zeros(model.l());
    a = &a - &RationalVector::unit(model.l(), e_index);
    Ok(pr_h(&((t + int(1)) * model.hn()), &a))
}

/// `Q_{Y, psi^*H} = q_Y(ch1 bar) - 2 H^n ch0 psi^*H^{n-2} ch2`.
pub fn q_discriminant(model: &HypersurfaceModel, rc: &ReducedBlowupCharacter) -> Result<Rational> {
    Ok(q_y(model, &rc.lambda1)? - int(2) * model.hn() * int(rc.ch0) * &rc.h_ch2)
}

/// The same number through the reduced-character discriminant; only
/// meaningful without exceptional divisors.
pub fn q_discriminant_via_delta_bar(model: &HypersurfaceModel, rc: &ReducedBlowupCharacter) -> Result<Rational> {
    if model.l() != 0 {
        return Err(Error::Precondition("delta_bar comparison needs l = 0".into()));
    }
    Ok(delta_bar(&ReducedCharacter::new(model.hn(), rc.lambda1.b.clone(), rc.ch0, rc.h_ch2.clone())?))
}

/// `Z_t(r, b, a) = -(t + 1) b + fiber . a + i r`, with `fiber_i = h^{n-2} f E_i`.
pub fn z_t(
    model: &HypersurfaceModel,
    t: &Rational,
    r: i64,
    v: &LambdaVector,
    fiber_pairing: &RationalVector,
) -> Result<(Rational, Rational)> {
    check_l(model, v)?;
    if fiber_pairing.dim() != model.l() {
        return Err(Error::DimensionMismatch { expected: model.l(), found: fiber_pairing.dim() });
    }
    let re = -(t + int(1)) * &v.b + fiber_pairing.dot(&RationalVector::new(v.a.clone()))?;
    Ok((re, int(r)))
}

/// `-Re Z_t / Im Z_t`, or `None` when `Im Z_t = 0`.
pub fn mu_z_t(re: &Rational, im: &Rational) -> Option<Rational> {
    (!im.is_zero()).then(|| -re / im)
}

pub fn q_signature(model: &HypersurfaceModel) -> Signature {
    model.q_form().signature()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub q_signature: Signature,
    /// Basis of `ker Z_t` in `(r, b, a)` coordinates.
    pub kernel_basis: Vec<RationalVector>,
    pub restricted_signature: Signature,
    pub verdict: Definiteness,
    pub semidefinite: bool,
    pub definite: bool,
    /// The `q`-dual of `-H^n Re Z_t`, i.e. the class playing `pr_H(h_t)`;
    /// its kernel is `q`-orthogonal to it by construction.
    pub dual_class: LambdaVector,
    pub q_dual_class: Rational,
}

/// Restricts `Q = 0 (+) q_Y` on `(r, b, a)` to `ker Z_t` and classifies it.
pub fn kernel_negativity_check(
    model: &HypersurfaceModel,
    t: &Rational,
    fiber_pairing: &RationalVector,
) -> Result<KernelReport> {
    if t.is_negative() {
        return Err(Error::Precondition("t must be nonnegative".into()));
    }
    let l = model.l();
    if fiber_pairing.dim() != l {
        return Err(Error::DimensionMismatch { expected: l, found: fiber_pairing.dim() });
    }
    let q = model.q_form();
    let q_signature = q.signature();
    if q_signature.n_plus != 1 || q_signature.n_zero != 0 {
        return Err(Error::Precondition(format!("q_Y has signature {q_signature}; expected (1, l, 0)")));
    }

    let dim = 2 + l;
    let im_row = RationalVector::unit(dim, 0);
    let mut re = vec![Rational::zero(), -(t + int(1))];
    re.extend(fiber_pairing.coords().iter().cloned());
    let re_row = RationalVector::new(re);
    let kernel_basis = kernel_of_linear_map(&[im_row, re_row], dim)?;

    let ambient = SymmetricForm::zero(1).direct_sum(&q);
    let (verdict, restricted_signature) = definiteness_on_subspace(&ambient, &kernel_basis)?;

    // Solve q(w, .) = H^n * (-Re Z_t) on (b, a): w = H^n * q^{-1} l.
    let mut functional = vec![t + int(1)];
    functional.extend(fiber_pairing.coords().iter().map(|x| -x));
    let dual = solve_symmetric(&q, &RationalVector::new(functional))?.scale(&model.hn());
    let q_dual_class = q.evaluate(&dual)?;

    Ok(KernelReport {
        q_signature,
        kernel_basis,
        restricted_signature,
        semidefinite: verdict.is_semidefinite(),
        definite: verdict.is_definite(),
        verdict,
        dual_class: LambdaVector::from_vector(&dual),
        q_dual_class,
    })
}

/// Solves `G x = y` for a nondegenerate symmetric `G` by Gauss-Jordan.
fn solve_symmetric(g: &SymmetricForm, y: &RationalVector) -> Result<RationalVector> {
    let n = g.dim();
    let mut rows: Vec<RationalVector> = g
        .gram()
        .iter()
        .zip(y.coords())
        .map(|(row, yi)| {
            let mut r = row.clone();
            r.push(-yi.clone());
            RationalVector::new(r)
        })
        .collect();
    rows.push(RationalVector::zeros(n + 1));
    let ker = kernel_of_linear_map(&rows, n + 1)?;
    let sol = ker.iter().find(|v| !v[n].is_zero()).ok_or_else(|| Error::Precondition("q_Y is degenerate".into()))?;
    let scale = sol[n].recip();
    Ok(RationalVector::new(sol.coords()[..n].iter().map(|x| x * &scale).collect()))
}
