//! Exact scalars and small dense matrices over `Q` and `Z`.
//!
//! Everything downstream (Q-linear dependence, exponent lattices, monomial
//! maps) bottoms out here. Matrices are dense and row-major; the sizes we
//! meet are a dozen rows at most.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Integer {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from_int(n: Integer) -> Rational {
    BigRational::from_integer(n)
}

/// Parses `"3"`, `"-7"` or `"3/4"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Scales a rational vector by the lcm of its denominators and divides out
/// the gcd of the numerators, giving the primitive integer vector on the
/// same ray. The zero vector maps to itself.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Integer> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return scaled;
    }
    scaled.into_iter().map(|x| x / &g).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` is only consulted when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self> {
        let cols = rows.first().map_or(cols, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
            .collect();
        Self::from_rows(rows, cols).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = m.get(lead, c).recip();
            for j in 0..m.cols {
                let v = m.get(lead, j) * &inv;
                m.set(lead, j, v);
            }
            for r in 0..m.rows {
                if r == lead {
                    continue;
                }
                let f = m.get(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(r, j) - &f * m.get(lead, j);
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        let rank = pivots.len();
        Rref {
            matrix: m,
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = RatMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Rational::one());
        }
        let red = aug.rref();
        if red.pivots.iter().copied().take(n).ne(0..n) {
            return None;
        }
        let mut inv = RatMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.matrix.get(r, n + c).clone());
            }
        }
        Some(inv)
    }

    /// Basis of the right null space `{v : self * v = 0}`.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let Rref { matrix, pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -matrix.get(r, f).clone();
                }
                v
            })
            .collect()
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (i, x) in self.row(r).iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Basis of `{λ : Σ λᵢ vᵢ = 0}`. Empty iff the vectors are Q-linearly
/// independent.
pub fn q_linear_dependencies(vectors: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let len = first.len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::Dimension(
            "vectors passed to q_linear_dependencies differ in length".into(),
        ));
    }
    // columns are the input vectors
    let mut a = RatMatrix::zeros(len, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            a.set(i, j, x.clone());
        }
    }
    Ok(a.null_space())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Integer>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Integer::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Integer::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Integer>>, cols: usize) -> Result<Self> {
        let cols = rows.first().map_or(cols, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        Self::from_rows(rows, cols).expect("rectangular literal")
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.set(i, i, int(d));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Integer {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Integer) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Integer] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Integer>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.to_rational().rank()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<Integer> {
        if self.rows != self.cols {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Integer::one());
        }
        let mut m = self.clone();
        let mut sign = Integer::one();
        let mut prev = Integer::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !m.get(r, k).is_zero()) else {
                    return Ok(Integer::zero());
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        Ok(sign * m.get(n - 1, n - 1))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &Integer) {
        for c in 0..self.cols {
            let v = self.get(dst, c) + k * self.get(src, c);
            self.set(dst, c, v);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &Integer) {
        for r in 0..self.rows {
            let v = self.get(r, dst) + k * self.get(r, src);
            self.set(r, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (i, x) in self.row(r).iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `H = U·m`. Pivots of `H` are positive, entries above a pivot lie in
/// `[0, pivot)` and zero rows sit at the bottom.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut lead = 0;
    for c in 0..h.cols {
        if lead == h.rows {
            break;
        }
        loop {
            let pivot = (lead..h.rows)
                .filter(|&r| !h.get(r, c).is_zero())
                .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()));
            let Some(p) = pivot else { break };
            h.swap_rows(lead, p);
            u.swap_rows(lead, p);
            let mut done = true;
            for r in lead + 1..h.rows {
                if h.get(r, c).is_zero() {
                    continue;
                }
                let q = -h.get(r, c).div_floor(h.get(lead, c));
                h.add_row(r, lead, &q);
                u.add_row(r, lead, &q);
                if !h.get(r, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(lead, c).is_zero() {
            continue;
        }
        if h.get(lead, c).is_negative() {
            h.negate_row(lead);
            u.negate_row(lead);
        }
        for r in 0..lead {
            let q = -h.get(r, c).div_floor(h.get(lead, c));
            if !q.is_zero() {
                h.add_row(r, lead, &q);
                u.add_row(r, lead, &q);
            }
        }
        lead += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(S, U, V)` with `S = U·m·V` diagonal,
/// nonnegative, and each diagonal entry dividing the next.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let t_max = m.rows.min(m.cols);
    for t in 0..t_max {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for r in t..s.rows {
                for c in t..s.cols {
                    let x = s.get(r, c);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(br, bc)| x.abs() < s.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = best else {
                break;
            };
            s.swap_rows(t, pr);
            u.swap_rows(t, pr);
            s.swap_cols(t, pc);
            v.swap_cols(t, pc);

            let mut clean = true;
            for r in t + 1..s.rows {
                let q = -s.get(r, t).div_floor(s.get(t, t));
                if !q.is_zero() {
                    s.add_row(r, t, &q);
                    u.add_row(r, t, &q);
                }
                if !s.get(r, t).is_zero() {
                    clean = false;
                }
            }
            for c in t + 1..s.cols {
                let q = -s.get(t, c).div_floor(s.get(t, t));
                if !q.is_zero() {
                    s.add_col(c, t, &q);
                    v.add_col(c, t, &q);
                }
                if !s.get(t, c).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and retry
            let offending = (t + 1..s.rows).find(|&r| {
                (t + 1..s.cols).any(|c| !s.get(r, c).is_multiple_of(s.get(t, t)))
            });
            match offending {
                Some(r) => {
                    let one = Integer::one();
                    s.add_row(t, r, &one);
                    u.add_row(t, r, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    (s, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_inverse() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), RatMatrix::identity(2));
        assert!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn rref_identity_proportional_and_zero() {
        let id = RatMatrix::identity(2);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.rank, 2);

        let r = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r.matrix, RatMatrix::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);

        let z = RatMatrix::zeros(2, 2);
        assert_eq!(z.rref().matrix, z);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn dependencies_of_small_families() {
        let e = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]];
        assert!(q_linear_dependencies(&e).unwrap().is_empty());

        let p = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        let deps = q_linear_dependencies(&p).unwrap();
        assert_eq!(deps.len(), 1);
        let prim = primitive_integer_vector(&deps[0]);
        assert!(prim == vec![int(2), int(-1)] || prim == vec![int(-2), int(1)]);

        let three: Vec<Vec<Rational>> = [[1, 1, 0], [0, 1, 1], [1, 2, 1]]
            .iter()
            .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
            .collect();
        let deps = q_linear_dependencies(&three).unwrap();
        assert_eq!(deps.len(), 1);
        let prim = primitive_integer_vector(&deps[0]);
        assert!(prim == vec![int(1), int(1), int(-1)] || prim == vec![int(-1), int(-1), int(1)]);
    }

    #[test]
    fn dependencies_reject_ragged_input() {
        let bad = vec![vec![rat(1, 1)], vec![rat(1, 1), rat(2, 1)]];
        assert!(q_linear_dependencies(&bad).is_err());
    }

    #[test]
    fn hnf_examples() {
        let id = IntMatrix::identity(3);
        assert_eq!(hermite_normal_form(&id), (id.clone(), id.clone()));

        let m = IntMatrix::from_i64(&[&[2, 4], &[1, 3]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(u.mul(&m).unwrap(), h);
        assert_eq!(u.determinant().unwrap().abs(), int(1));
        assert_eq!(h, IntMatrix::from_i64(&[&[1, 1], &[0, 2]]));

        let z = IntMatrix::zeros(2, 3);
        let (h, u) = hermite_normal_form(&z);
        assert_eq!(h, z);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn snf_examples() {
        let id = IntMatrix::identity(2);
        assert_eq!(smith_normal_form(&id), (id.clone(), id.clone(), id.clone()));

        let (s, u, v) = smith_normal_form(&IntMatrix::diagonal(&[2, 3]));
        assert_eq!(s, IntMatrix::diagonal(&[1, 6]));
        assert_eq!(
            u.mul(&IntMatrix::diagonal(&[2, 3])).unwrap().mul(&v).unwrap(),
            s
        );

        let z = IntMatrix::zeros(1, 1);
        assert_eq!(smith_normal_form(&z).0, z);
    }

    #[test]
    fn bareiss_determinant() {
        let m = IntMatrix::from_i64(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        // expanded along the first row: 2(-6-20) + 1(-2-0) = -54
        assert_eq!(m.determinant().unwrap(), int(-54));
        let sing = IntMatrix::from_i64(&[&[0, 0], &[1, 2]]);
        assert_eq!(sing.determinant().unwrap(), int(0));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-4"), Some(rat(-4, 1)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
