//! Chern characters `(ch0, ch1, ch2)` on a surface model and the
//! discriminants built from them.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::nsgeom::{BlowupModel, DivisorClass};
use crate::rational::{int, render, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernCharacter {
    pub ch0: i64,
    pub ch1: DivisorClass,
    pub ch2: Rational,
}

impl ChernCharacter {
    pub fn new(ch0: i64, ch1: DivisorClass, ch2: Rational) -> Self {
        Self { ch0, ch1, ch2 }
    }

    /// Character of the line bundle `O(D)`: `(1, D, D^2/2)`.
    pub fn line_bundle(d: &DivisorClass) -> Self {
        Self { ch0: 1, ch1: d.clone(), ch2: d.square() / int(2) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { ch0: self.ch0 + other.ch0, ch1: self.ch1.add(&other.ch1)?, ch2: &self.ch2 + &other.ch2 })
    }

    pub fn neg(&self) -> Self {
        Self { ch0: -self.ch0, ch1: self.ch1.neg(), ch2: -&self.ch2 }
    }

    pub fn rank(&self) -> Rational {
        int(self.ch0)
    }
}

impl fmt::Display for ChernCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.ch0, self.ch1, render(&self.ch2))
    }
}

/// `e^{-B} . ch`.
pub fn twist_b(ch: &ChernCharacter, b: &DivisorClass) -> Result<ChernCharacter> {
    let r = ch.rank();
    let ch1 = ch.ch1.sub(&b.scale(&r))?;
    let ch2 = &ch.ch2 - b.pair(&ch.ch1)? + &r * b.square() / int(2);
    Ok(ChernCharacter { ch0: ch.ch0, ch1, ch2 })
}

/// `ch . ch(O(D))`.
pub fn tensor_line_bundle(ch: &ChernCharacter, d: &DivisorClass) -> Result<ChernCharacter> {
    twist_b(ch, &d.neg())
}

/// `ch1^2 - 2 ch0 ch2`.
pub fn delta(ch: &ChernCharacter) -> Rational {
    ch.ch1.square() - int(2) * ch.rank() * &ch.ch2
}

/// `delta + C ch0^2`.
pub fn delta_tilde(ch: &ChernCharacter, c: &Rational) -> Rational {
    let r = ch.rank();
    delta(ch) + c * &r * &r
}

/// Numbers of a sheaf on a polarized `n`-fold after contracting with powers
/// of `H`: `H^n`, `H^{n-1} ch1`, `ch0`, `H^{n-2} ch2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedCharacter {
    pub hn: Rational,
    pub h_ch1: Rational,
    pub ch0: i64,
    pub h_ch2: Rational,
}

impl ReducedCharacter {
    pub fn new(hn: Rational, h_ch1: Rational, ch0: i64, h_ch2: Rational) -> Result<Self> {
        if !hn.is_positive() {
            return Err(Error::Precondition("H^n must be positive".into()));
        }
        Ok(Self { hn, h_ch1, ch0, h_ch2 })
    }

    /// Reduction of a surface character against the polarization `h`.
    pub fn of_surface(ch: &ChernCharacter, h: &DivisorClass) -> Result<Self> {
        Self::new(h.square(), h.pair(&ch.ch1)?, ch.ch0, ch.ch2.clone())
    }
}

/// `(H^{n-1} ch1)^2 - 2 H^n ch0 H^{n-2} ch2`.
pub fn delta_bar(rc: &ReducedCharacter) -> Rational {
    &rc.h_ch1 * &rc.h_ch1 - int(2) * &rc.hn * int(rc.ch0) * &rc.h_ch2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slope {
    Finite(Rational),
    PlusInfinity,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(q) => f.write_str(&render(q)),
            Slope::PlusInfinity => f.write_str("+inf"),
        }
    }
}

/// `(H . ch1) / ch0`; torsion classes with `H . ch1 > 0` have slope `+inf`.
pub fn slope(ch: &ChernCharacter, polarization: &DivisorClass) -> Result<Slope> {
    if polarization.is_zero() {
        return Err(Error::Precondition("polarization is numerically trivial".into()));
    }
    let deg = polarization.pair(&ch.ch1)?;
    if ch.ch0 != 0 {
        return Ok(Slope::Finite(deg / ch.rank()));
    }
    if deg.is_positive() {
        Ok(Slope::PlusInfinity)
    } else {
        Err(Error::Precondition(format!("torsion class with H.ch1 = {} has no slope", render(&deg))))
    }
}

/// Tensors by `O(-k_i E_i)` so that every exceptional coefficient lands in
/// `[0, ch0)`. Exceptional curves are processed in index order.
pub fn normalize_exceptional(ch: &ChernCharacter, blowup: &BlowupModel) -> Result<ChernCharacter> {
    if ch.ch0 <= 0 {
        return Err(Error::Precondition("normalization needs ch0 > 0".into()));
    }
    let r = ch.rank();
    let mut out = ch.clone();
    for i in 0..blowup.points {
        let (_, a) = blowup.decompose(&out.ch1)?;
        let k = (&a[i] / &r).floor();
        if !k.is_zero() {
            out = tensor_line_bundle(&out, &blowup.exceptional(i).scale(&-k))?;
        }
    }
    Ok(out)
}

/// Numerical class of `R psi_* E` for a blow-up at points:
/// `(ch0, M, ch2 + sum(a_i)/2)` where `ch1 = psi^* M + sum a_i E_i`.
///
/// With `assume_normalized` the coefficients must already satisfy
/// `0 <= a_i < ch0`; otherwise they are normalized first.
pub fn pushforward_blowup(
    ch: &ChernCharacter,
    blowup: &BlowupModel,
    assume_normalized: bool,
) -> Result<ChernCharacter> {
    if ch.ch0 <= 0 {
        return Err(Error::Precondition("pushforward needs ch0 > 0".into()));
    }
    let ch = if assume_normalized {
        let (_, a) = blowup.decompose(&ch.ch1)?;
        let r = ch.rank();
        if a.iter().any(|ai| ai.is_negative() || ai >= &r) {
            return Err(Error::Precondition("exceptional coefficients are not in [0, ch0)".into()));
        }
        ch.clone()
    } else {
        normalize_exceptional(ch, blowup)?
    };
    let (m, a) = blowup.decompose(&ch.ch1)?;
    let shift: Rational = a.iter().sum::<Rational>() / int(2);
    Ok(ChernCharacter { ch0: ch.ch0, ch1: m, ch2: &ch.ch2 + shift })
}

/// `Q_{Y, psi^*H}` on a point blow-up:
/// `(H.M)^2 + H^2 (sum a_i E_i)^2 - 2 H^2 ch0 ch2`.
/// Invariant under tensoring by `O(E_i)`.
pub fn blowup_q_value(ch: &ChernCharacter, blowup: &BlowupModel, h: &DivisorClass) -> Result<Rational> {
    let (m, _) = blowup.decompose(&ch.ch1)?;
    let exc = ch.ch1.sub(&blowup.pullback(&m)?)?;
    let h2 = h.square();
    let hm = h.pair(&m)?;
    Ok(&hm * &hm + &h2 * exc.square() - int(2) * &h2 * ch.rank() * &ch.ch2)
}
