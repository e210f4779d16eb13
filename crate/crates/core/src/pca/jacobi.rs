use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const REL_TOL: f64 = 1e-12;

/// Dense square matrix, row-major. Symmetric by construction when filled
/// through [`SymMatrix::set_sym`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Rejects non-square or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
                m.data[i * n + j] = rows[i][j];
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn off_diagonal(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }
}

/// Eigenvalues in descending order with matching unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[j]` belongs to `values[j]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps rotate every off-diagonal pair in row order until the off-diagonal
/// Frobenius norm drops to `1e-12 * (||A||_F + 1)`. Results are sorted by
/// eigenvalue descending; equal eigenvalues are ordered by the position of
/// their vector's largest-magnitude entry, and that entry is made positive.
pub fn jacobi_eigen(m: &SymMatrix) -> Result<Eigen> {
    let n = m.order();
    let mut a = m.clone();
    let mut v = SymMatrix::identity(n);
    let tol = REL_TOL * (m.frobenius() + 1.0);

    let mut sweeps = 0;
    while a.off_diagonal() > tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|j| {
            let mut col: Vec<f64> = (0..n).map(|i| v.get(i, j)).collect();
            let lead = argmax_abs(&col);
            if col[lead] < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            (a.get(j, j), col)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    // Reorder runs of equal eigenvalues by their leading attribute index.
    let scale = pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end - 1].0 - pairs[end].0).abs() <= 1e-12 * scale {
            end += 1;
        }
        pairs[start..end].sort_by_key(|p| argmax_abs(&p.1));
        start = end;
    }

    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}

fn argmax_abs(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if x.abs() > xs[best].abs() {
            best = i;
        }
    }
    best
}

/// Annihilates `a[p][q]` with the rotation `A <- J^T A J`, accumulating
/// `V <- V J`.
fn rotate(a: &mut SymMatrix, v: &mut SymMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let n = a.order();
    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let app = a.get(p, p);
    let aqq = a.get(q, q);
    for k in 0..n {
        if k != p && k != q {
            let akp = a.get(k, p);
            let akq = a.get(k, q);
            a.set_sym(k, p, c * akp - s * akq);
            a.set_sym(k, q, s * akp + c * akq);
        }
    }
    a.set_sym(p, p, app - t * apq);
    a.set_sym(q, q, aqq + t * apq);
    a.set_sym(p, q, 0.0);

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.data[k * n + p] = c * vkp - s * vkq;
        v.data[k * n + q] = s * vkp + c * vkq;
    }
}
