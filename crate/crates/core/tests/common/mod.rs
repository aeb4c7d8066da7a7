//! Test-only reference implementations that share no numerical code with the
//! library.

#![allow(dead_code)]

use nalgebra::DMatrix;

pub type Dense = Vec<Vec<f64>>;

pub fn to_dense(m: &DMatrix<f64>) -> Dense {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Cyclic Jacobi rotations; returns eigenvalues and eigenvectors as columns.
pub fn jacobi(mut a: Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut v: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    let mut c = vec![vec![0.0; p]; n];
    for i in 0..n {
        for k in 0..m {
            let aik = a[i][k];
            for j in 0..p {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn transpose(a: &Dense) -> Dense {
    (0..a[0].len())
        .map(|j| (0..a.len()).map(|i| a[i][j]).collect())
        .collect()
}

fn spectral(vals: &[f64], vecs: &Dense, f: impl Fn(f64) -> f64) -> Dense {
    let n = vals.len();
    let mut out = vec![vec![0.0; n]; n];
    for k in 0..n {
        let fk = f(vals[k]);
        for i in 0..n {
            for j in 0..n {
                out[i][j] += vecs[i][k] * fk * vecs[j][k];
            }
        }
    }
    out
}

fn sub(a: &Dense, rows: &[usize], cols: &[usize]) -> Dense {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| a[i][j]).collect())
        .collect()
}

/// Gauss–Jordan inverse with partial pivoting.
fn inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap();
        m.swap(c, p);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn single_mode(b: f64) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let xi = b / (1.0 + (1.0 - b * b).sqrt());
    -(1.0 - xi).ln() - xi * xi.ln() / (1.0 - xi)
}

/// Complete reimplementation of the reduction, built on [`jacobi`] and
/// Gauss–Jordan elimination only.
pub fn dense_entropy(k: &Dense, traced: &[bool]) -> f64 {
    let (kv, kw) = jacobi(k.clone());
    let omega = spectral(&kv, &kw, f64::sqrt);
    let t: Vec<usize> = (0..k.len()).filter(|&i| traced[i]).collect();
    let c: Vec<usize> = (0..k.len()).filter(|&i| !traced[i]).collect();
    let a = sub(&omega, &t, &t);
    let b = sub(&omega, &t, &c);
    let cc = sub(&omega, &c, &c);
    let mut beta = matmul(&transpose(&b), &matmul(&inverse(&a), &b));
    for row in beta.iter_mut() {
        for v in row.iter_mut() {
            *v *= 0.5;
        }
    }
    let gamma: Dense = cc
        .iter()
        .zip(&beta)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect();
    let inv_sqrt = spectral_from(&gamma, |g| 1.0 / g.sqrt());
    let bp = matmul(&inv_sqrt, &matmul(&beta, &inv_sqrt));
    let (vals, _) = jacobi(bp);
    vals.into_iter()
        .map(|b| single_mode(b.clamp(0.0, 1.0 - 1e-16)))
        .sum()
}

fn spectral_from(a: &Dense, f: impl Fn(f64) -> f64) -> Dense {
    let (v, w) = jacobi(a.clone());
    spectral(&v, &w, f)
}

/// Entropy from the two-point functions `X = ⟨φφ⟩ = ½Ω⁻¹` and
/// `P = ⟨ππ⟩ = ½Ω` restricted to one side: with `ν²` the eigenvalues of
/// `X_A P_A`, `S = Σ (ν+½)ln(ν+½) − (ν−½)ln(ν−½)`.
pub fn correlation_entropy(k: &DMatrix<f64>, region: &[bool]) -> f64 {
    let eig = k.clone().symmetric_eigen();
    let u = &eig.eigenvectors;
    let x = u * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 0.5 / v.sqrt())) * u.transpose();
    let p = u * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 0.5 * v.sqrt())) * u.transpose();
    let idx: Vec<usize> = (0..region.len()).filter(|&i| region[i]).collect();
    let xa = x.select_rows(&idx).select_columns(&idx);
    let pa = p.select_rows(&idx).select_columns(&idx);
    // X_A^{1/2} P_A X_A^{1/2} is symmetric and similar to X_A P_A.
    let xe = xa.symmetric_eigen();
    let xs = &xe.eigenvectors
        * DMatrix::from_diagonal(&xe.eigenvalues.map(f64::sqrt))
        * xe.eigenvectors.transpose();
    let m = &xs * pa * &xs;
    let m = (&m + m.transpose()) * 0.5;
    m.symmetric_eigenvalues()
        .iter()
        .map(|&v| {
            let nu = v.max(0.25).sqrt();
            let lo = nu - 0.5;
            let hi = (nu + 0.5) * (nu + 0.5).ln();
            if lo <= 1e-300 {
                hi
            } else {
                hi - lo * lo.ln()
            }
        })
        .sum()
}
