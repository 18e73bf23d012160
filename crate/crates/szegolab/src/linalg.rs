//! Dense linear algebra used by the oracles: Hermitian Cholesky and LU in
//! extended precision, plus a small complex `f64` solver for the minimax
//! iterations. None of this exploits Toeplitz structure — that is the point,
//! these routines cross-check the structured solver.

use crate::precision::{CFloat, PrecisionContext};
use num_complex::Complex64;
use rug::Float;

/// Row-major dense complex matrix at a fixed precision.
#[derive(Clone, Debug)]
pub struct CMatrix {
    pub n: usize,
    pub a: Vec<CFloat>,
}

impl CMatrix {
    pub fn zero(n: usize, prec: u32) -> Self {
        CMatrix {
            n,
            a: vec![CFloat::zero(prec); n * n],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &CFloat {
        &self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CFloat) {
        self.a[i * self.n + j] = v;
    }
}

#[derive(Debug)]
pub enum CholeskyOutcome {
    /// Full-rank factorization.
    Done,
    /// Pivot fell below the threshold at this index; factorization stopped.
    SingularAt(usize),
}

/// In-place lower Cholesky of a Hermitian positive (semi)definite matrix.
/// Returns the index of the first pivot at or below `threshold`, if any.
pub fn cholesky(m: &mut CMatrix, threshold: &Float) -> CholeskyOutcome {
    let n = m.n;
    for k in 0..n {
        let mut d = m.at(k, k).re.clone();
        for j in 0..k {
            d -= m.at(k, j).norm_sqr();
        }
        if d <= *threshold {
            return CholeskyOutcome::SingularAt(k);
        }
        let ld = d.sqrt();
        let idx = k * n + k;
        m.a[idx] = CFloat::from_real(ld.clone());
        for i in (k + 1)..n {
            let mut s = m.at(i, k).clone();
            for j in 0..k {
                let t = m.at(i, j).mul(&m.at(k, j).conj());
                s.sub_assign(&t);
            }
            m.a[i * n + k] = s.div_real(&ld);
        }
    }
    CholeskyOutcome::Done
}

/// Solves L L^H x = b given the Cholesky factor in the lower triangle.
pub fn cholesky_solve(l: &CMatrix, b: &[CFloat]) -> Vec<CFloat> {
    let n = l.n;
    let mut y: Vec<CFloat> = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            let t = l.at(i, j).mul(&y[j]);
            y[i].sub_assign(&t);
        }
        y[i] = y[i].div_real(&l.at(i, i).re);
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let t = l.at(j, i).conj().mul(&y[j]);
            y[i].sub_assign(&t);
        }
        y[i] = y[i].div_real(&l.at(i, i).re);
    }
    y
}

/// Determinant by LU with partial pivoting. For Hermitian input the result
/// is real up to rounding; callers take the real part.
pub fn lu_det(m: &CMatrix, ctx: PrecisionContext) -> CFloat {
    let n = m.n;
    let mut a = m.a.clone();
    let mut det = CFloat::one(ctx.bits());
    let mut sign_flips = 0usize;
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].norm_sqr();
        for i in (k + 1)..n {
            let v = a[i * n + k].norm_sqr();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            sign_flips += 1;
        }
        let pivot = a[k * n + k].clone();
        det = det.mul(&pivot);
        if pivot.norm_sqr().is_zero() {
            return CFloat::zero(ctx.bits());
        }
        for i in (k + 1)..n {
            let f = a[i * n + k].div(&pivot);
            for j in (k + 1)..n {
                let t = f.mul(&a[k * n + j]);
                a[i * n + j].sub_assign(&t);
            }
            a[i * n + k] = f;
        }
    }
    if sign_flips % 2 == 1 {
        det = det.neg();
    }
    det
}

/// Complex `f64` dense solve with partial pivoting (for the small KKT
/// systems of the minimax fit). Returns None on a vanishing pivot.
pub fn solve_c64(a: &mut [Vec<Complex64>], b: &mut [Complex64]) -> Option<Vec<Complex64>> {
    let n = b.len();
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k][k].norm_sqr();
        for i in (k + 1)..n {
            if a[i][k].norm_sqr() > best {
                best = a[i][k].norm_sqr();
                piv = i;
            }
        }
        if best == 0.0 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in (k + 1)..n {
                let akj = a[k][j];
                a[i][j] -= f * akj;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128)
    }

    #[test]
    fn cholesky_solves_small_hermitian() {
        let c = ctx();
        // [[2, i], [-i, 3]]
        let mut m = CMatrix::zero(2, c.bits());
        m.set(0, 0, c.complex(2.0, 0.0));
        m.set(0, 1, c.complex(0.0, 1.0));
        m.set(1, 0, c.complex(0.0, -1.0));
        m.set(1, 1, c.complex(3.0, 0.0));
        let b = vec![c.complex(1.0, 0.0), c.complex(0.0, 2.0)];
        let mut l = m.clone();
        assert!(matches!(
            cholesky(&mut l, &c.real(1e-30)),
            CholeskyOutcome::Done
        ));
        let x = cholesky_solve(&l, &b);
        // verify m x = b
        for i in 0..2 {
            let mut s = CFloat::zero(c.bits());
            for j in 0..2 {
                s.mul_add_assign(m.at(i, j), &x[j]);
            }
            assert!(s.dist(&b[i]).to_f64() < 1e-30);
        }
    }

    #[test]
    fn det_of_hermitian_product() {
        let c = ctx();
        let mut m = CMatrix::zero(2, c.bits());
        m.set(0, 0, c.complex(2.0, 0.0));
        m.set(0, 1, c.complex(0.0, 1.0));
        m.set(1, 0, c.complex(0.0, -1.0));
        m.set(1, 1, c.complex(3.0, 0.0));
        let d = lu_det(&m, c);
        assert!((d.re.to_f64() - 5.0).abs() < 1e-30);
        assert!(d.im.to_f64().abs() < 1e-30);
    }
}
