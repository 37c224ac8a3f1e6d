//! Dense matrices and the two elimination routes: fraction-free Bareiss for
//! exact arithmetic and partial-pivoting Gauss for `f64`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }
}

impl<T> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Column vector view of a slice.
    pub fn column(values: Vec<T>) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    pub fn into_column(self) -> Vec<T> {
        assert_eq!(self.cols, 1);
        self.data
    }

    pub fn column_values(&self, j: usize) -> Vec<T>
    where
        T: Clone,
    {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A commutative ring without zero divisors where divisions known to be
/// exact can be carried out. Bareiss elimination only needs this much.
pub trait IntegralDomain: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / divisor`, where the caller guarantees the quotient is exact.
    fn div_exact(&self, divisor: &Self) -> Self;
}

impl IntegralDomain for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, divisor: &Self) -> Self {
        debug_assert!(Zero::is_zero(&(self % divisor)));
        self / divisor
    }
}

/// Result of running Bareiss elimination on a square block with extra
/// right-hand columns. `matrix` is upper triangular on the square block.
struct Eliminated<T> {
    matrix: Matrix<T>,
    swaps: usize,
}

/// Fraction-free elimination over the first `n` columns of `m` (which must
/// have at least `n` rows). Returns `None` when the leading block is singular.
fn bareiss<T: IntegralDomain>(mut m: Matrix<T>, n: usize) -> Option<Eliminated<T>> {
    let cols = m.cols();
    let mut prev = None::<T>;
    let mut swaps = 0;
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[(r, k)].is_zero())?;
        if pivot != k {
            m.swap_rows(pivot, k);
            swaps += 1;
        }
        for i in k + 1..n {
            for j in k + 1..cols {
                let cross = m[(k, k)].mul(&m[(i, j)]).sub(&m[(i, k)].mul(&m[(k, j)]));
                m[(i, j)] = match &prev {
                    Some(p) => cross.div_exact(p),
                    None => cross,
                };
            }
            m[(i, k)] = T::zero();
        }
        prev = Some(m[(k, k)].clone());
    }
    Some(Eliminated { matrix: m, swaps })
}

/// Determinant of a square matrix over an integral domain.
pub fn determinant<T: IntegralDomain>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return T::one();
    }
    match bareiss(m.clone(), n) {
        None => T::zero(),
        Some(e) => {
            let det = e.matrix[(n - 1, n - 1)].clone();
            if e.swaps % 2 == 1 {
                det.neg()
            } else {
                det
            }
        }
    }
}

/// Solves `a · x = b` over an integral domain without leaving it: returns
/// `(y, d)` with `x_i = y_i / d`, where `d = ±det a` and each `y_i` is the
/// matching Cramer numerator. `None` means `a` is singular.
pub fn solve_fraction_free<T: IntegralDomain>(a: &Matrix<T>, b: &[T]) -> Option<(Vec<T>, T)> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "coefficient matrix must be square");
    assert_eq!(n, b.len(), "right-hand side height mismatch");
    if n == 0 {
        return Some((Vec::new(), T::one()));
    }
    let augmented = Matrix::from_fn(n, n + 1, |i, j| if j < n { a[(i, j)].clone() } else { b[i].clone() });
    let upper = bareiss(augmented, n)?.matrix;
    let d = upper[(n - 1, n - 1)].clone();
    let mut y = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = d.mul(&upper[(i, n)]);
        for j in i + 1..n {
            acc = acc.sub(&upper[(i, j)].mul(&y[j]));
        }
        y[i] = acc.div_exact(&upper[(i, i)]);
    }
    Some((y, d))
}

/// Solves `a · X = b` exactly. Rows are scaled to integers, eliminated with
/// Bareiss, and back-substituted in rationals. `None` means `a` is singular.
pub fn solve_exact(a: &Matrix<BigRational>, b: &Matrix<BigRational>) -> Option<Matrix<BigRational>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "coefficient matrix must be square");
    assert_eq!(n, b.rows(), "right-hand side height mismatch");
    let extra = b.cols();

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let lcm = a
            .row(i)
            .iter()
            .chain(b.row(i))
            .fold(<BigInt as One>::one(), |acc, v| acc.lcm(v.denom()));
        let scale = |v: &BigRational| v.numer() * (&lcm / v.denom());
        rows.push(a.row(i).iter().chain(b.row(i)).map(scale).collect::<Vec<_>>());
    }
    let upper = bareiss(Matrix::from_rows(rows), n)?.matrix;

    let mut x = Matrix::filled(n, extra, BigRational::zero());
    for c in 0..extra {
        for i in (0..n).rev() {
            let mut acc = BigRational::from_integer(upper[(i, n + c)].clone());
            for j in i + 1..n {
                if !Zero::is_zero(&upper[(i, j)]) {
                    acc -= BigRational::from_integer(upper[(i, j)].clone()) * &x[(j, c)];
                }
            }
            x[(i, c)] = acc / BigRational::from_integer(upper[(i, i)].clone());
        }
    }
    Some(x)
}

/// Gaussian elimination with partial pivoting by magnitude. A pivot below
/// `1e-13` times the largest entry of `a` is treated as singular.
pub fn solve_f64(a: &Matrix<f64>, b: &Matrix<f64>) -> Option<Matrix<f64>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "coefficient matrix must be square");
    assert_eq!(n, b.rows(), "right-hand side height mismatch");
    let extra = b.cols();
    let width = n + extra;
    let mut m = Matrix::from_fn(n, width, |i, j| if j < n { a[(i, j)] } else { b[(i, j - n)] });
    let scale = (0..n)
        .flat_map(|i| a.row(i).iter().copied())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tiny = scale.max(f64::MIN_POSITIVE) * 1e-13;

    for k in 0..n {
        let pivot = (k..n).max_by(|&p, &q| m[(p, k)].abs().total_cmp(&m[(q, k)].abs()))?;
        if m[(pivot, k)].abs() <= tiny {
            return None;
        }
        m.swap_rows(pivot, k);
        for i in k + 1..n {
            let factor = m[(i, k)] / m[(k, k)];
            if factor == 0.0 {
                continue;
            }
            for j in k..width {
                m[(i, j)] -= factor * m[(k, j)];
            }
        }
    }
    let mut x = Matrix::filled(n, extra, 0.0);
    for c in 0..extra {
        for i in (0..n).rev() {
            let mut acc = m[(i, n + c)];
            for j in i + 1..n {
                acc -= m[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = acc / m[(i, i)];
        }
    }
    Some(x)
}

/// Strong connectivity of the directed graph `i -> j` whenever `edge(i, j)`.
pub fn strongly_connected(n: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    if n == 0 {
        return true;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let linked = if forward { edge(u, v) } else { edge(v, u) };
                if linked && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}
