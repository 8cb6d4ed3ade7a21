//! Checkers and exact identities around the corrected Bogomolov-Gieseker
//! inequality on surfaces.
//!
//! None of these decide semistability. A failed Bogomolov check certifies
//! that a class cannot be semistable; a passing one only says the class is
//! consistent with the inequality.

use num_traits::{Signed, Zero};

use crate::chern::{delta, delta_tilde, ChernCharacter};
use crate::error::{Error, Result};
use crate::nsgeom::{c_constant, DivisorClass, SurfaceModel};
use crate::rational::{int, is_nonneg, Rational};

pub const SEMISTABILITY_NOTE: &str =
    "necessary condition only: a failure rules out semistability, a pass does not certify it";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BgReport {
    pub constant: Rational,
    pub value: Rational,
    pub holds: bool,
}

/// Evaluates the corrected discriminant with the surface's constant.
pub fn check_bg(ch: &ChernCharacter, s: &SurfaceModel) -> Result<BgReport> {
    if ch.ch0 <= 0 {
        return Err(Error::Precondition("Bogomolov check needs ch0 > 0".into()));
    }
    let constant = c_constant(s)?;
    let value = delta_tilde(ch, &constant);
    Ok(BgReport { holds: is_nonneg(&value), constant, value })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrssReport {
    /// `D(E)/r` for `E = E1 + E2`.
    pub lhs: Rational,
    /// `D(E1)/r1 + D(E2)/r2`.
    pub rhs_sum: Rational,
    /// `(r1 r2 / r) (ch1(E1)/r1 - ch1(E2)/r2)^2`.
    pub defect: Rational,
    pub identity_holds: bool,
    /// `L . (ch1(E1)/r1 - ch1(E2)/r2)`, when a polarization was given.
    pub l_pairing: Option<Rational>,
    /// When the pairing above vanishes: whether `defect <= 0`, hence `lhs >= rhs_sum`.
    pub hodge_ordering: Option<bool>,
}

/// Convexity identity of the corrected discriminant along an extension
/// `0 -> E1 -> E -> E2 -> 0`.
pub fn strss_identity(
    e1: &ChernCharacter,
    e2: &ChernCharacter,
    c: &Rational,
    polarization: Option<&DivisorClass>,
) -> Result<StrssReport> {
    if e1.ch0 <= 0 || e2.ch0 <= 0 {
        return Err(Error::Precondition("both ranks must be positive".into()));
    }
    let e = e1.add(e2)?;
    let (r1, r2, r) = (e1.rank(), e2.rank(), e.rank());
    let lhs = delta_tilde(&e, c) / &r;
    let rhs_sum = delta_tilde(e1, c) / &r1 + delta_tilde(e2, c) / &r2;
    let diff = e1.ch1.scale(&r1.recip()).sub(&e2.ch1.scale(&r2.recip()))?;
    let defect = &r1 * &r2 / &r * diff.square();
    let identity_holds = lhs == &rhs_sum - &defect;
    let l_pairing = polarization.map(|l| l.pair(&diff)).transpose()?;
    let hodge_ordering = l_pairing.as_ref().filter(|p| p.is_zero()).map(|_| !defect.is_positive());
    Ok(StrssReport { lhs, rhs_sum, defect, identity_holds, l_pairing, hodge_ordering })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HNFactor {
    pub rank: i64,
    pub slope: Rational,
}

impl HNFactor {
    pub fn new(rank: i64, slope: Rational) -> Result<Self> {
        if rank < 1 {
            return Err(Error::Precondition("HN factor rank must be at least 1".into()));
        }
        Ok(Self { rank, slope })
    }

    pub fn degree(&self) -> Rational {
        int(self.rank) * &self.slope
    }
}

/// HN data with strictly decreasing slopes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HNProfile {
    factors: Vec<HNFactor>,
}

impl HNProfile {
    pub fn new(factors: Vec<HNFactor>) -> Result<Self> {
        if factors.iter().any(|f| f.rank < 1) {
            return Err(Error::Precondition("HN factor rank must be at least 1".into()));
        }
        if factors.windows(2).any(|w| w[0].slope <= w[1].slope) {
            return Err(Error::Precondition("HN slopes must be strictly decreasing".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[HNFactor] {
        &self.factors
    }

    pub fn total_rank(&self) -> i64 {
        self.factors.iter().map(|f| f.rank).sum()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Sorts by slope (descending) and merges equal slopes by adding ranks.
pub fn hn_merge(factors: Vec<HNFactor>) -> Result<HNProfile> {
    let mut sorted = factors;
    sorted.sort_by(|a, b| b.slope.cmp(&a.slope));
    let mut merged: Vec<HNFactor> = Vec::with_capacity(sorted.len());
    for f in sorted {
        match merged.last_mut() {
            Some(last) if last.slope == f.slope => last.rank += f.rank,
            _ => merged.push(f),
        }
    }
    HNProfile::new(merged)
}

/// Vertices `(sum r, sum r mu)` of the HN polygon, starting at the origin.
pub fn hn_polygon(profile: &HNProfile) -> Vec<(i64, Rational)> {
    let mut out = vec![(0, Rational::zero())];
    let (mut r, mut deg) = (0, Rational::zero());
    for f in profile.factors() {
        r += f.rank;
        deg += f.degree();
        out.push((r, deg.clone()));
    }
    out
}

fn pairwise_spread(factors: &[HNFactor]) -> Rational {
    let mut acc = Rational::zero();
    for (i, a) in factors.iter().enumerate() {
        for b in &factors[i + 1..] {
            let d = &a.slope - &b.slope;
            acc += int(a.rank * b.rank) * &d * &d;
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionBound {
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

/// `sum_{i<j} r_i r_j (mu_i - mu_j)^2 <= L^2 * corrected discriminant`.
pub fn check_restriction_bound(
    profile: &HNProfile,
    l2: &Rational,
    delta_tilde_e: &Rational,
) -> Result<RestrictionBound> {
    if !l2.is_positive() {
        return Err(Error::Precondition("L^2 must be positive".into()));
    }
    let lhs = pairwise_spread(profile.factors());
    let rhs = l2 * delta_tilde_e;
    Ok(RestrictionBound { holds: lhs <= rhs, lhs, rhs })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelReport {
    pub mean_slope: Rational,
    /// `sum r_i mu_i^2 - r mean^2`.
    pub lhs: Rational,
    /// `sum_{i<j} (r_i r_j / r)(mu_i - mu_j)^2`.
    pub rhs: Rational,
    /// `sum_i (sum_{j<=i} r_j (mu_j - mean)) (mu_i - mu_{i+1})`, `mu_{k+1} = 0`.
    pub abel: Rational,
    pub equal: bool,
}

/// Evaluates the weighted slope variance three ways. The factors need not
/// be sorted.
pub fn abel_summation_check(factors: &[HNFactor]) -> Result<AbelReport> {
    if factors.is_empty() {
        return Err(Error::Precondition("empty profile".into()));
    }
    let r = int(factors.iter().map(|f| f.rank).sum());
    let mean = factors.iter().map(HNFactor::degree).sum::<Rational>() / &r;
    let lhs = factors.iter().map(|f| f.degree() * &f.slope).sum::<Rational>() - &r * &mean * &mean;
    let rhs = pairwise_spread(factors) / &r;

    let mut abel = Rational::zero();
    let mut partial = Rational::zero();
    for (i, f) in factors.iter().enumerate() {
        partial += int(f.rank) * (&f.slope - &mean);
        let next = factors.get(i + 1).map_or_else(Rational::zero, |g| g.slope.clone());
        abel += &partial * (&f.slope - next);
    }
    Ok(AbelReport { equal: lhs == rhs && rhs == abel, mean_slope: mean, lhs, rhs, abel })
}

/// HN data of a restriction to a general curve of the pencil, after
/// aggregating exceptional coefficients as `b_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionData {
    pub profile: HNProfile,
    /// `d = L^2`.
    pub l2: Rational,
    pub b: Vec<Rational>,
    pub m_dot_l: Option<Vec<Rational>>,
}

impl RestrictionData {
    pub fn new(profile: HNProfile, l2: Rational, b: Vec<Rational>, m_dot_l: Option<Vec<Rational>>) -> Result<Self> {
        let k = profile.len();
        if b.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: b.len() });
        }
        if !l2.is_positive() {
            return Err(Error::Precondition("L^2 must be positive".into()));
        }
        if let Some(ml) = &m_dot_l {
            if ml.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: ml.len() });
            }
            for (i, ((f, bi), mi)) in profile.factors().iter().zip(&b).zip(ml).enumerate() {
                if int(f.rank) * &f.slope != mi + bi * &l2 {
                    return Err(Error::Precondition(format!("factor {i}: slope disagrees with (M_i.L + b_i d) / r_i")));
                }
            }
        }
        Ok(Self { profile, l2, b, m_dot_l })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSum {
    /// `sum_{j<=i} b_j d`.
    pub lhs: Rational,
    /// `sum_{j<=i} r_j (mu_j - mu_E)`.
    pub rhs: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReport {
    pub partial_sums: Vec<PartialSum>,
    pub all_partial_hold: bool,
    /// `sum_i d b_i mu_i`.
    pub weighted: Rational,
    /// `sum_{i<j} (r_i r_j / r)(mu_i - mu_j)^2`.
    pub pairwise: Rational,
    /// Final comparison `weighted >= pairwise`, evaluated only when every
    /// partial-sum inequality holds.
    pub final_holds: Option<bool>,
}

/// Replays the partial-sum inequalities coming from semistability of `E`
/// and, when they all hold, the bound they imply.
pub fn restriction_chain_check(data: &RestrictionData, mu_e: &Rational) -> ChainReport {
    let factors = data.profile.factors();
    let mut partial_sums = Vec::with_capacity(factors.len());
    let (mut lhs, mut rhs) = (Rational::zero(), Rational::zero());
    for (f, bi) in factors.iter().zip(&data.b) {
        lhs += bi * &data.l2;
        rhs += int(f.rank) * (&f.slope - mu_e);
        partial_sums.push(PartialSum { lhs: lhs.clone(), rhs: rhs.clone(), holds: lhs >= rhs });
    }
    let all_partial_hold = partial_sums.iter().all(|p| p.holds);
    let weighted = factors.iter().zip(&data.b).map(|(f, bi)| &data.l2 * bi * &f.slope).sum::<Rational>();
    let r = int(data.profile.total_rank().max(1));
    let pairwise = pairwise_spread(factors) / r;
    let final_holds = all_partial_hold.then(|| weighted >= pairwise);
    ChainReport { partial_sums, all_partial_hold, weighted, pairwise, final_holds }
}

/// `chi(O) ch0^2 - delta`, the Euler pairing `chi(E, E)`.
pub fn euler_pairing_self(ch: &ChernCharacter, chi_o: i64) -> Rational {
    let r = ch.rank();
    int(chi_o) * &r * &r - delta(ch)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KodairaBound {
    pub bound: Rational,
    pub l_squared: Rational,
    /// False means no line bundle with this `L^2` can have `H^1(L^{-1}) != 0`.
    pub consistent: bool,
}

/// Upper bound `4 C` on `L^2` for an ample `L` with `H^1(L^{-1}) != 0`.
pub fn kodaira_vanishing_bound(l: &DivisorClass, s: &SurfaceModel) -> Result<KodairaBound> {
    let l_squared = l.square();
    if !l_squared.is_positive() {
        return Err(Error::Precondition("L^2 must be positive".into()));
    }
    let bound = int(4) * c_constant(s)?;
    Ok(KodairaBound { consistent: l_squared <= bound, bound, l_squared })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WallOutcome {
    /// Slopes agree for `M_t = tM + (1-t)L` at this `t` in `(0, 1)`.
    Wall(Rational),
    NoWall,
    /// `L.delta = M.delta = 0`: the slopes agree along the whole segment.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallReport {
    pub outcome: WallOutcome,
    pub l_delta: Rational,
    pub m_delta: Rational,
}

/// Solves `M_t . (ch1(F)/r_F - ch1(E)/r_E) = 0` on the open segment.
pub fn polarization_wall(
    che: &ChernCharacter,
    chf: &ChernCharacter,
    l: &DivisorClass,
    m: &DivisorClass,
) -> Result<WallReport> {
    if che.ch0 <= 0 || chf.ch0 <= 0 {
        return Err(Error::Precondition("wall computation needs positive ranks".into()));
    }
    let d = chf.ch1.scale(&chf.rank().recip()).sub(&che.ch1.scale(&che.rank().recip()))?;
    let l_delta = l.pair(&d)?;
    let m_delta = m.pair(&d)?;
    // (1 - t) L.d + t M.d = 0
    let outcome = if l_delta.is_zero() && m_delta.is_zero() {
        WallOutcome::Degenerate
    } else if l_delta == m_delta {
        WallOutcome::NoWall
    } else {
        let t = &l_delta / (&l_delta - &m_delta);
        if t.is_positive() && t < int(1) {
            WallOutcome::Wall(t)
        } else {
            WallOutcome::NoWall
        }
    };
    Ok(WallReport { outcome, l_delta, m_delta })
}

/// `t M + (1 - t) L`.
pub fn polarization_segment(l: &DivisorClass, m: &DivisorClass, t: &Rational) -> Result<DivisorClass> {
    m.scale(t).add(&l.scale(&(int(1) - t)))
}
