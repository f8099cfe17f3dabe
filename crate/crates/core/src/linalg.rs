//! Small dense linear algebra for d×d coefficient matrices (d is expected to be ≤ 10).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("QR iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },
    #[error("matrix is singular to working precision")]
    Singular,
}

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn scalar(x: T) -> Self {
        Self { n: 1, data: vec![x] }
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Builds from row vectors; `None` unless the rows form a square array.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == n * n).then_some(Self { n, data })
    }

    /// Counter-clockwise rotation by `theta` scaled by `scale`.
    pub fn rotation(scale: T, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            n: 2,
            data: vec![scale * c, -scale * s, scale * s, scale * c],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.n);
        self.mul_into(rhs, &mut out);
        out
    }

    /// `out = self * rhs`; `out` must not alias either operand.
    pub fn mul_into(&self, rhs: &Self, out: &mut Self) {
        let n = self.n;
        debug_assert_eq!(rhs.n, n);
        out.n = n;
        out.data.resize(n * n, T::zero());
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc += self.data[i * n + k] * rhs.data[k * n + j];
                }
                out.data[i * n + j] = acc;
            }
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn mul_vec_into(&self, x: &[T], out: &mut [T]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let row = &self.data[i * n..(i + 1) * n];
            *o = row.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
    }

    /// `out = selfᵀ x`.
    pub fn tr_mul_vec_into(&self, x: &[T], out: &mut [T]) {
        let n = self.n;
        for (j, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = T::zero();
            for i in 0..n {
                acc += self.data[i * n + j] * x[i];
            }
            *o = acc;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, &x| if x.abs() > m { x.abs() } else { m })
    }

    /// Multiplies every entry by `2^exp`; exact in binary floating point barring
    /// overflow/underflow.
    pub fn scale_pow2(&mut self, exp: i32) {
        let f = T::of(2.0).powi(exp);
        for x in &mut self.data {
            *x *= f;
        }
    }

    /// Spectral norm estimate by `iters` steps of power iteration on `selfᵀ self`,
    /// warm-started (and updated) through `v`, which must be a nonzero vector.
    pub fn spectral_norm_warm(&self, iters: usize, v: &mut [T], scratch: &mut [T]) -> T {
        if self.n == 1 {
            return self.data[0].abs();
        }
        let mut sigma = T::zero();
        for _ in 0..iters {
            self.mul_vec_into(v, scratch);
            let av = norm(scratch);
            if av == T::zero() {
                // v in the kernel: fall back to a fresh start
                return self.power_fallback();
            }
            sigma = av;
            self.tr_mul_vec_into(scratch, v);
            let nv = norm(v);
            if nv == T::zero() {
                break;
            }
            for x in v.iter_mut() {
                *x /= nv;
            }
        }
        // one final product so sigma corresponds to the returned v
        self.mul_vec_into(v, scratch);
        sigma.max(norm(scratch))
    }

    fn power_fallback(&self) -> T {
        let mut v = vec![T::one() / T::of_usize(self.n).sqrt(); self.n];
        let mut w = vec![T::zero(); self.n];
        for i in 0..self.n {
            v[i] += T::of(0.01) * T::of_usize(i + 1);
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut sigma = T::zero();
        for _ in 0..50 {
            self.mul_vec_into(&v, &mut w);
            sigma = norm(&w);
            if sigma == T::zero() {
                return T::zero();
            }
            self.tr_mul_vec_into(&w, &mut v);
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
        }
        sigma
    }

    /// Spectral norm to near machine precision (power iteration run to convergence).
    pub fn spectral_norm(&self) -> T {
        if self.n == 1 {
            return self.data[0].abs();
        }
        let mut v = vec![T::zero(); self.n];
        let mut scratch = vec![T::zero(); self.n];
        // deterministic, generically non-degenerate start
        for (i, x) in v.iter_mut().enumerate() {
            *x = T::one() + T::of(0.137) * T::of_usize(i);
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut prev = T::zero();
        let mut sigma = T::zero();
        for _ in 0..200 {
            sigma = self.spectral_norm_warm(5, &mut v, &mut scratch);
            if (sigma - prev).abs() <= T::epsilon() * T::of(8.0) * sigma {
                break;
            }
            prev = sigma;
        }
        sigma
    }

    pub fn lu(&self) -> Lu<T> {
        Lu::new(self)
    }

    pub fn determinant(&self) -> T {
        self.lu().determinant()
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, LinalgError> {
        self.lu().solve(b)
    }

    /// All eigenvalues (balancing, Hessenberg reduction, shifted QR).
    pub fn eigenvalues(&self) -> Result<Vec<Eigenvalue<T>>, LinalgError> {
        eigenvalues(self)
    }

    pub fn spectral_radius(&self) -> Result<T, LinalgError> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|e| e.modulus())
            .fold(T::zero(), T::max))
    }

    /// Unit eigenvector for a real eigenvalue `lambda`, by inverse iteration.
    pub fn real_eigenvector(&self, lambda: T) -> Result<Vec<T>, LinalgError> {
        let n = self.n;
        if n == 1 {
            return Ok(vec![T::one()]);
        }
        let scale = self.max_abs().max(lambda.abs()).max(T::min_positive_value());
        let mut shift = lambda + scale * T::of(1e3) * T::epsilon();
        let mut shifted = self.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        let mut lu = shifted.lu();
        if lu.is_singular() {
            shift = lambda + scale * T::of(1e6) * T::epsilon();
            shifted = self.clone();
            for i in 0..n {
                shifted[(i, i)] -= shift;
            }
            lu = shifted.lu();
        }
        let mut v: Vec<T> = (0..n)
            .map(|i| T::one() + T::of(0.3171) * T::of_usize(i))
            .collect();
        for _ in 0..4 {
            let mut w = lu.solve(&v)?;
            let nw = norm(&w);
            if !nw.is_finite() || nw == T::zero() {
                return Err(LinalgError::Singular);
            }
            w.iter_mut().for_each(|x| *x /= nw);
            v = w;
        }
        Ok(v)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Real> Lu<T> {
    fn new(a: &Matrix<T>) -> Self {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                if lu[(i, k)].abs() > best {
                    best = lu[(i, k)].abs();
                    p = i;
                }
            }
            if best == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> T {
        if self.singular {
            return T::zero();
        }
        (0..self.lu.dim()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, LinalgError> {
        if self.singular {
            return Err(LinalgError::Singular);
        }
        let n = self.lu.dim();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Eigenvalue<T> {
    pub fn modulus(&self) -> T {
        self.re.hypot(self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == T::zero()
    }
}

fn eigenvalues<T: Real>(m: &Matrix<T>) -> Result<Vec<Eigenvalue<T>>, LinalgError> {
    let n = m.dim();
    if n == 1 {
        return Ok(vec![Eigenvalue {
            re: m[(0, 0)],
            im: T::zero(),
        }]);
    }
    // 1-based working copy keeps the classical index arithmetic readable
    let mut a = vec![vec![T::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = m[(i, j)];
        }
    }
    balance(&mut a, n);
    to_hessenberg(&mut a, n);
    for i in 1..=n {
        for j in 1..i.saturating_sub(1) {
            a[i][j] = T::zero();
        }
    }
    hessenberg_qr(&mut a, n)
}

fn balance<T: Real>(a: &mut [Vec<T>], n: usize) {
    let radix = T::of(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < T::of(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn to_hessenberg<T: Real>(a: &mut [Vec<T>], n: usize) {
    if n < 3 {
        return;
    }
    for m in 2..n {
        let mut x = T::zero();
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let tmp = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = tmp;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(i, m);
            }
        }
        if x != T::zero() {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != T::zero() {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        let v = a[m][j];
                        a[i][j] -= y * v;
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        let v = row[i];
                        row[m] += y * v;
                    }
                }
            }
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names)]
fn hessenberg_qr<T: Real>(a: &mut [Vec<T>], n: usize) -> Result<Vec<Eigenvalue<T>>, LinalgError> {
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let mut anorm = T::zero();
    for i in 1..=n {
        for j in (i.saturating_sub(1)).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = T::zero();
    let (mut p, mut q, mut r): (T, T, T);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = T::zero();
                    break;
                }
                l -= 1;
            }
            x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = T::zero();
                nn -= 1;
            } else {
                y = a[nu - 1][nu - 1];
                w = a[nu][nu - 1] * a[nu - 1][nu];
                if l == nu - 1 {
                    p = T::of(0.5) * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= T::zero() {
                        z = p + sign(z, p);
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != T::zero() {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = T::zero();
                        wi[nu] = T::zero();
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return Err(LinalgError::NoConvergence { index: nu });
                    }
                    if its == 10 || its == 20 || its == 40 {
                        t += x;
                        for i in 1..=nu {
                            a[i][i] -= x;
                        }
                        let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                        x = T::of(0.75) * s;
                        y = x;
                        w = T::of(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nu - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nu {
                        a[i][i - 2] = T::zero();
                        if i != m + 2 {
                            a[i][i - 3] = T::zero();
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = T::zero();
                            if k != nu - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != T::zero() {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nu - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nu < k + 3 { nu } else { k + 3 };
                            for row in a.iter_mut().take(mmin + 1).skip(l) {
                                p = x * row[k] + y * row[k + 1];
                                if k != nu - 1 {
                                    p += z * row[k + 2];
                                    row[k + 2] -= p * r;
                                }
                                row[k + 1] -= p * q;
                                row[k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 1 || l + 1 >= nn as usize {
                break;
            }
        }
    }
    Ok((1..=n)
        .map(|i| Eigenvalue {
            re: wr[i],
            im: wi[i],
        })
        .collect())
}

pub fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

pub fn norm<T: Real>(x: &[T]) -> T {
    match x.len() {
        1 => x[0].abs(),
        _ => dot(x, x).sqrt(),
    }
}

/// Normalizes in place and returns the previous norm (zero vectors are left untouched).
pub fn normalize<T: Real>(x: &mut [T]) -> T {
    let n = norm(x);
    if n > T::zero() {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

pub fn distance<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<T>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_moduli(m: &Matrix<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = m.eigenvalues().unwrap().iter().map(|e| e.modulus()).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    #[test]
    fn diagonal_eigenvalues() {
        let m = Matrix::diagonal(&[2.0, 0.5]);
        assert_eq!(sorted_moduli(&m), vec![2.0, 0.5]);
        assert!(m.eigenvalues().unwrap().iter().all(|e| e.is_real()));
    }

    #[test]
    fn rotation_has_complex_pair() {
        let m = Matrix::<f64>::rotation(0.25, 1.0);
        let ev = m.eigenvalues().unwrap();
        assert!(ev.iter().all(|e| !e.is_real()));
        for e in ev {
            assert!((e.modulus() - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_and_determinant_match_eigenvalues() {
        // companion-like non-symmetric 4×4
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, -1.0, 0.5],
            vec![0.3, -2.0, 4.0, 1.0],
            vec![2.5, 0.0, 1.0, -3.0],
            vec![-1.0, 1.0, 0.7, 0.2],
        ])
        .unwrap();
        let ev = m.eigenvalues().unwrap();
        let trace: f64 = ev.iter().map(|e| e.re).sum();
        assert!((trace - 0.2).abs() < 1e-10);
        // product of eigenvalues as complex numbers
        let (mut pr, mut pi) = (1.0, 0.0);
        for e in &ev {
            let nr = pr * e.re - pi * e.im;
            pi = pr * e.im + pi * e.re;
            pr = nr;
        }
        assert!((pr - m.determinant()).abs() < 1e-9 * m.determinant().abs().max(1.0));
        assert!(pi.abs() < 1e-9);
    }

    #[test]
    fn eigenvector_residual() {
        let m = Matrix::<f64>::from_rows(&[vec![3.0, 1.0, 0.0], vec![0.5, 2.0, 0.2], vec![0.0, 0.1, 0.5]]).unwrap();
        let ev = m.eigenvalues().unwrap();
        let top = ev
            .iter()
            .max_by(|a, b| a.modulus().partial_cmp(&b.modulus()).unwrap())
            .unwrap();
        let v = m.real_eigenvector(top.re).unwrap();
        let av = m.mul_vec(&v);
        let res: f64 = av.iter().zip(&v).map(|(a, b)| (a - top.re * b).powi(2)).sum::<f64>().sqrt();
        assert!(res < 1e-12 * top.re.abs());
    }

    #[test]
    fn spectral_norm_of_diagonal_and_orthogonal() {
        assert!((Matrix::<f64>::diagonal(&[-3.0, 0.5, 1.0]).spectral_norm() - 3.0).abs() < 1e-12);
        assert!((Matrix::<f64>::rotation(0.7, 2.0).spectral_norm() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn lu_solve_and_singular() {
        let m = Matrix::<f64>::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let x = m.solve(&[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
        assert!((m.determinant() - 10.0).abs() < 1e-12);
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(s.solve(&[1.0, 1.0]), Err(LinalgError::Singular));
    }

    #[test]
    fn works_in_single_precision() {
        let m: Matrix<f32> = Matrix::diagonal(&[2.0, 0.5]);
        assert!((m.spectral_radius().unwrap() - 2.0).abs() < 1e-6);
    }
}
