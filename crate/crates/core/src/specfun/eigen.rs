//! Symmetric tridiagonal eigenproblem (implicit QL with Wilkinson shifts).

use crate::error::{domain, Error, Result};

const MAX_SWEEPS: usize = 60;

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSym {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl TridiagonalSym {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return domain("tridiagonal matrix must have dimension >= 1");
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return domain(format!(
                "off-diagonal length {} does not match dimension {}",
                off_diagonal.len(),
                diagonal.len()
            ));
        }
        if diagonal.iter().chain(&off_diagonal).any(|v| !v.is_finite()) {
            return domain("tridiagonal entries must be finite");
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }
}

/// Eigenvalues (ascending) and the first component of each unit eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub first_components: Vec<f64>,
}

impl TridiagEigen {
    /// Gauss weights for a measure of total mass `mass` whose Jacobi matrix
    /// was decomposed.
    pub fn weights(&self, mass: f64) -> Vec<f64> {
        self.first_components.iter().map(|z| mass * z * z).collect()
    }
}

pub fn eigen_tridiag(m: &TridiagonalSym) -> Result<TridiagEigen> {
    let n = m.dim();
    let mut d = m.diagonal.clone();
    let mut e = m.off_diagonal.clone();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Numerical(format!(
                    "tridiagonal QL did not converge for eigenvalue {l}"
                )));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut deflated = false;
            for i in (l..mm).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(TridiagEigen {
        values: order.iter().map(|&i| d[i]).collect(),
        first_components: order.iter().map(|&i| z[i]).collect(),
    })
}
