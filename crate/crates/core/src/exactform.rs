//! Exact rational linear algebra: vectors, symmetric bilinear forms,
//! congruence diagonalization, nullspaces and definiteness on subspaces.
//!
//! Nothing in here uses floating point. Signatures come from a symmetric
//! (congruence) reduction, so by Sylvester's law they do not depend on the
//! pivot order; the order is still fixed (first nonzero in scan order) so
//! that the diagonalizing basis is reproducible.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{render, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Rational::zero(); dim])
    }

    /// The `i`-th standard basis vector of `Q^dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::from_integer(1.into());
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self(coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self(self.0.iter().map(|c| c * k).collect())
    }

    /// Plain coordinate dot product (no form involved).
    pub fn dot(&self, other: &Self) -> Result<Rational> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| f(a, b)).collect())
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: Self) -> RationalVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: Self) -> RationalVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(render).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A symmetric bilinear form on `Q^dim`, stored by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricForm {
    gram: Vec<Vec<Rational>>,
}

impl SymmetricForm {
    pub fn new(gram: Vec<Vec<Rational>>) -> Result<Self> {
        let n = gram.len();
        for row in &gram {
            check_dim(n, row.len())?;
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Precondition(format!("gram matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { gram })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Self { gram: vec![vec![Rational::zero(); dim]; dim] }
    }

    pub fn diagonal(entries: Vec<Rational>) -> Self {
        let mut form = Self::zero(entries.len());
        for (i, e) in entries.into_iter().enumerate() {
            form.gram[i][i] = e;
        }
        form
    }

    /// Orthogonal direct sum: block-diagonal Gram matrix.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.dim(), other.dim());
        let mut out = Self::zero(n + m);
        for i in 0..n {
            for j in 0..n {
                out.gram[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                out.gram[n + i][n + j] = other.gram[i][j].clone();
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.gram[i][j]
    }

    /// `u^T G v`.
    pub fn pair(&self, u: &RationalVector, v: &RationalVector) -> Result<Rational> {
        check_dim(self.dim(), u.dim())?;
        check_dim(self.dim(), v.dim())?;
        let mut acc = Rational::zero();
        for (i, ui) in u.coords().iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            let row: Rational = self.gram[i].iter().zip(v.coords()).map(|(g, vj)| g * vj).sum();
            acc += ui * row;
        }
        Ok(acc)
    }

    /// `v^T G v`.
    pub fn evaluate(&self, v: &RationalVector) -> Result<Rational> {
        self.pair(v, v)
    }

    /// `G v`, i.e. the linear functional `u -> u^T G v` as a coefficient row.
    pub fn apply(&self, v: &RationalVector) -> Result<RationalVector> {
        check_dim(self.dim(), v.dim())?;
        Ok(RationalVector::new(
            self.gram.iter().map(|row| row.iter().zip(v.coords()).map(|(g, x)| g * x).sum()).collect(),
        ))
    }

    /// Gram matrix of the form pulled back along the columns `basis`:
    /// entry `(i, j)` is `b_i^T G b_j`.
    pub fn restrict(&self, basis: &[RationalVector]) -> Result<SymmetricForm> {
        let applied: Vec<RationalVector> = basis.iter().map(|b| self.apply(b)).collect::<Result<_>>()?;
        let k = basis.len();
        let mut gram = vec![vec![Rational::zero(); k]; k];
        for i in 0..k {
            for j in i..k {
                let value = basis[i].dot(&applied[j])?;
                gram[j][i] = value.clone();
                gram[i][j] = value;
            }
        }
        Ok(SymmetricForm { gram })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let gram =
            self.gram.iter().zip(&other.gram).map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect()).collect();
        Ok(Self { gram })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self { gram: self.gram.iter().map(|r| r.iter().map(|a| a * k).collect()).collect() }
    }

    /// The rank-one form `(l . v)^2` for a linear functional with coefficient row `l`.
    pub fn outer_square(l: &RationalVector) -> Self {
        let c = l.coords();
        Self { gram: c.iter().map(|a| c.iter().map(|b| a * b).collect()).collect() }
    }

    pub fn signature(&self) -> Signature {
        self.diagonalize().signature()
    }

    /// Congruence reduction `P^T G P = D`. Returns `D`'s diagonal and the
    /// columns of `P`.
    pub fn diagonalize(&self) -> Diagonalization {
        let n = self.dim();
        let mut a = self.gram.clone();
        let mut basis: Vec<RationalVector> = (0..n).map(|i| RationalVector::unit(n, i)).collect();

        for k in 0..n {
            if a[k][k].is_zero() {
                if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                    swap_index(&mut a, &mut basis, i, k);
                } else if let Some((i, j)) = first_off_diagonal(&a, k) {
                    // Diagonal of the trailing block is zero but a[i][j] is not:
                    // x_i += x_j makes the new a[i][i] = 2 a[i][j].
                    add_index(&mut a, &mut basis, i, j);
                    swap_index(&mut a, &mut basis, i, k);
                } else {
                    break;
                }
            }
            let pivot = a[k][k].clone();
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &pivot;
                for j in 0..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
                for j in 0..n {
                    let t = &f * &a[j][k];
                    a[j][i] -= t;
                }
                let shifted = &basis[i] - &basis[k].scale(&f);
                basis[i] = shifted;
            }
        }

        Diagonalization { diagonal: (0..n).map(|i| a[i][i].clone()).collect(), basis }
    }
}

fn first_off_diagonal(a: &[Vec<Rational>], k: usize) -> Option<(usize, usize)> {
    let n = a.len();
    (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
}

fn swap_index(a: &mut [Vec<Rational>], basis: &mut [RationalVector], i: usize, k: usize) {
    if i == k {
        return;
    }
    a.swap(i, k);
    for row in a.iter_mut() {
        row.swap(i, k);
    }
    basis.swap(i, k);
}

fn add_index(a: &mut [Vec<Rational>], basis: &mut [RationalVector], i: usize, j: usize) {
    let n = a.len();
    for c in 0..n {
        let t = a[j][c].clone();
        a[i][c] += t;
    }
    for r in 0..n {
        let t = a[r][j].clone();
        a[r][i] += t;
    }
    basis[i] = &basis[i] + &basis[j];
}

#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub diagonal: Vec<Rational>,
    pub basis: Vec<RationalVector>,
}

impl Diagonalization {
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for d in &self.diagonal {
            if d.is_positive() {
                sig.n_plus += 1;
            } else if d.is_negative() {
                sig.n_minus += 1;
            } else {
                sig.n_zero += 1;
            }
        }
        sig
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn new(n_plus: usize, n_minus: usize, n_zero: usize) -> Self {
        Self { n_plus, n_minus, n_zero }
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n_plus, self.n_minus, self.n_zero)
    }
}

/// Rank of a list of row vectors of common length `dim`.
pub fn rank(rows: &[RationalVector], dim: usize) -> Result<usize> {
    Ok(dim - kernel_of_linear_map(rows, dim)?.len())
}

/// Exact basis of `{x : row . x = 0 for every row}` inside `Q^dim`.
///
/// The basis comes from the reduced row echelon form: one vector per free
/// column, with a `1` in that column.
pub fn kernel_of_linear_map(rows: &[RationalVector], dim: usize) -> Result<Vec<RationalVector>> {
    for r in rows {
        check_dim(dim, r.dim())?;
    }
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut next = 0;
    for col in 0..dim {
        let Some(p) = (next..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(p, next);
        let inv = m[next][col].recip();
        for x in m[next].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r == next || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..dim {
                let t = &f * &m[next][c];
                m[r][c] -= t;
            }
        }
        pivots.push(col);
        next += 1;
        if next == m.len() {
            break;
        }
    }

    let mut basis = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); dim];
        v[free] = Rational::from_integer(1.into());
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        basis.push(RationalVector::new(v));
    }
    Ok(basis)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Definiteness {
    NegDefinite,
    NegSemiDefinite,
    Other,
}

impl Definiteness {
    pub fn from_signature(sig: Signature) -> Self {
        if sig.n_plus == 0 && sig.n_zero == 0 {
            Definiteness::NegDefinite
        } else if sig.n_plus == 0 {
            Definiteness::NegSemiDefinite
        } else {
            Definiteness::Other
        }
    }

    pub fn is_semidefinite(self) -> bool {
        matches!(self, Definiteness::NegDefinite | Definiteness::NegSemiDefinite)
    }

    pub fn is_definite(self) -> bool {
        self == Definiteness::NegDefinite
    }
}

impl fmt::Display for Definiteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Definiteness::NegDefinite => "NegDefinite",
            Definiteness::NegSemiDefinite => "NegSemiDefinite",
            Definiteness::Other => "Indefinite/Other",
        })
    }
}

/// Classifies `form` restricted to the span of `basis`. The empty basis is
/// vacuously negative definite.
pub fn definiteness_on_subspace(form: &SymmetricForm, basis: &[RationalVector]) -> Result<(Definiteness, Signature)> {
    if rank(basis, form.dim())? != basis.len() {
        return Err(Error::DependentBasis);
    }
    let sig = form.restrict(basis)?.signature();
    Ok((Definiteness::from_signature(sig), sig))
}
