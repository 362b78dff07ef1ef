//! Spectra and spectral verdicts: Ramanujan checks for undirected graphs,
//! the Bass–Ihara transfer to non-backtracking spectra, the second modulus
//! of directed regular graphs, and exact deviation norms `‖A^n/d^n − J/m‖∞`.

use std::fmt::Write as _;

use nalgebra::linalg::SymmetricEigen;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graphs::{DartGraph, UGraph};
use crate::matrix::IntMatrix;

pub const DEFAULT_DENSE_LIMIT: usize = 2000;
pub const DEFAULT_EXACT_LIMIT: usize = 500;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square")]
    NotSquare,
    #[error("graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("graph or matrix is not regular")]
    Irregular,
    #[error("dimension {dim} exceeds the limit {limit}{hint}")]
    TooLarge {
        dim: usize,
        limit: usize,
        hint: &'static str,
    },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("eigenpair residual {residual:e} exceeds {bound:e}")]
    Residual { residual: f64, bound: f64 },
}

/// Eigenvalues of a symmetric integer matrix, descending. Every eigenpair
/// is checked against `‖Av − λv‖ ≤ 1e-10 · ‖A‖∞ · dim`.
pub fn eig_symmetric(a: &IntMatrix) -> Result<Vec<f64>, SpectralError> {
    if !a.is_symmetric() {
        return Err(SpectralError::NotSymmetric);
    }
    let n = a.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let eig = SymmetricEigen::new(a.to_f64());
    let bound = 1e-10 * (a.norm_inf().max(1) as f64) * n as f64;
    let coo = a.coo();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let mut av = vec![0.0; n];
        for &(r, c, x) in &coo {
            av[r] += x as f64 * v[c];
        }
        let residual = av
            .iter()
            .zip(v.iter())
            .map(|(p, q)| (p - lambda * q).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual > bound {
            return Err(SpectralError::Residual { residual, bound });
        }
    }
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

/// Eigenvalues of a general square integer matrix, sorted by descending real
/// part, then descending imaginary part.
pub fn eig_general(a: &IntMatrix, limit: usize) -> Result<Vec<Complex64>, SpectralError> {
    if !a.is_square() {
        return Err(SpectralError::NotSquare);
    }
    if a.rows() > limit {
        return Err(SpectralError::TooLarge {
            dim: a.rows(),
            limit,
            hint: "",
        });
    }
    eig_general_f64(a.to_f64())
}

/// Bounded Schur iteration; the unbounded one can stall on defective
/// matrices such as non-backtracking operators.
fn eig_general_f64(m: nalgebra::DMatrix<f64>) -> Result<Vec<Complex64>, SpectralError> {
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    let schur = [f64::EPSILON, 1e-13, 1e-11]
        .into_iter()
        .find_map(|eps| nalgebra::linalg::Schur::try_new(m.clone(), eps, 20_000))
        .ok_or(SpectralError::NoConvergence)?;
    let mut vals: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    sort_complex(&mut vals);
    Ok(vals)
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    /// Vertex degree `d + 1`.
    pub degree: usize,
    pub n_vertices: usize,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// The eigenvalue `d + 1`, and `−(d + 1)` for bipartite graphs.
    pub trivial: Vec<f64>,
    pub second_modulus: f64,
    /// `2√d`.
    pub bound: f64,
    /// `bound − second_modulus`.
    pub margin: f64,
    pub ramanujan: bool,
    pub bipartite: bool,
    pub tol: f64,
    /// A nontrivial eigenvalue exceeding the bound, if any.
    pub offending: Option<f64>,
}

impl SpectralReport {
    /// `index,re,im,modulus,classification`, trivial eigenvalues first-found.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,re,im,modulus,classification\n");
        let mut trivial = self.trivial.clone();
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            let class = match trivial.iter().position(|&t| (t - l).abs() <= 1e-6) {
                Some(p) => {
                    trivial.remove(p);
                    "trivial"
                }
                None => "nontrivial",
            };
            let _ = writeln!(s, "{i},{l:.12},0,{:.12},{class}", l.abs());
        }
        s
    }

    pub fn verdict_json(&self) -> serde_json::Value {
        serde_json::json!({
            "degree": self.degree,
            "n_vertices": self.n_vertices,
            "second_modulus": self.second_modulus,
            "bound": self.bound,
            "margin": self.margin,
            "ramanujan": self.ramanujan,
            "bipartite": self.bipartite,
        })
    }
}

/// Ramanujan verdict for a connected `(d+1)`-regular graph: all eigenvalues
/// other than `±(d+1)` satisfy `|λ| ≤ 2√d + tol`.
pub fn ramanujan_check(g: &UGraph, tol: f64) -> Result<SpectralReport, SpectralError> {
    let comps = g.components();
    if comps != 1 {
        return Err(SpectralError::Disconnected(comps));
    }
    let k = g.regular_degree().ok_or(SpectralError::Irregular)?;
    let bipartite = g.odd_cycle().is_none();
    let eigenvalues = eig_symmetric(&g.adjacency())?;
    let kf = k as f64;
    let mut rest = eigenvalues.clone();
    let mut trivial = Vec::new();
    // Largest is k (connected); smallest is −k iff bipartite.
    if let Some(first) = rest.first().copied() {
        trivial.push(first);
        rest.remove(0);
    }
    if bipartite {
        if let Some(last) = rest.pop() {
            trivial.push(last);
        }
    }
    debug_assert!(trivial.iter().all(|t| (t.abs() - kf).abs() < 1e-6));
    let bound = 2.0 * (kf - 1.0).max(0.0).sqrt();
    let worst = rest
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()));
    let second_modulus = worst.map_or(0.0, f64::abs);
    let ramanujan = second_modulus <= bound + tol;
    Ok(SpectralReport {
        degree: k,
        n_vertices: g.n_vertices(),
        eigenvalues,
        trivial,
        second_modulus,
        bound,
        margin: bound - second_modulus,
        ramanujan,
        bipartite,
        tol,
        offending: if ramanujan { None } else { worst },
    })
}

/// A value of the transferred spectrum and the graph eigenvalue it came
/// from (`None` for the `±1` block).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TransferredValue {
    pub value: Complex64,
    pub source: Option<f64>,
}

/// Roots of `x² − λx + d` for every `λ`, followed by `+1` and `−1`, each
/// `extra` times (`extra = |E| − |V|` gives the full count `2|E|`).
pub fn bass_ihara(spectrum: &[f64], d: f64, extra: usize) -> Vec<TransferredValue> {
    let mut out = Vec::with_capacity(2 * spectrum.len() + 2 * extra);
    for &l in spectrum {
        let disc = Complex64::new(l * l - 4.0 * d, 0.0).sqrt();
        for s in [1.0, -1.0] {
            out.push(TransferredValue {
                value: (Complex64::new(l, 0.0) + s * disc) / 2.0,
                source: Some(l),
            });
        }
    }
    for s in [1.0, -1.0] {
        for _ in 0..extra {
            out.push(TransferredValue {
                value: Complex64::new(s, 0.0),
                source: None,
            });
        }
    }
    out
}

/// Dense eigensolve of the non-backtracking matrix (validation only).
pub fn nb_spectrum_direct(h: &DartGraph, limit: usize) -> Result<Vec<Complex64>, SpectralError> {
    if h.len() > limit {
        return Err(SpectralError::TooLarge {
            dim: h.len(),
            limit,
            hint: "; use the Bass-Ihara transfer of the graph spectrum instead",
        });
    }
    eig_general(&h.matrix(), limit)
}

/// Largest distance from a point of `a` to the nearest point of `b`, taken
/// both ways.
pub fn set_mismatch(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Spectral radius of `A − (d/m) J` for a `d`-regular directed matrix.
pub fn second_modulus_directed(a: &IntMatrix, limit: usize) -> Result<f64, SpectralError> {
    if !a.is_square() {
        return Err(SpectralError::NotSquare);
    }
    let d = a.regular_degree().ok_or(SpectralError::Irregular)? as f64;
    let m = a.rows();
    if m > limit {
        return Err(SpectralError::TooLarge {
            dim: m,
            limit,
            hint: "",
        });
    }
    let shifted = a.to_f64().map(|x| x - d / m as f64);
    Ok(eig_general_f64(shifted)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Exact `max |A^n(i,j)/d^n − 1/m|` for `n = 0..=n_max`.
pub fn deviation_series(
    a: &IntMatrix,
    n_max: usize,
    limit: usize,
) -> Result<Vec<BigRational>, SpectralError> {
    if !a.is_square() {
        return Err(SpectralError::NotSquare);
    }
    let m = a.rows();
    if m > limit {
        return Err(SpectralError::TooLarge {
            dim: m,
            limit,
            hint: "",
        });
    }
    let d = a.regular_degree().ok_or(SpectralError::Irregular)?;
    // Column-wise nonzeros of A for P ← P·A.
    let mut cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); m];
    for (r, c, x) in a.coo() {
        cols[c].push((r, BigInt::from(x)));
    }
    let big_m = BigInt::from(m);
    let mut power: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut dn = BigInt::from(1);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            power = power
                .iter()
                .map(|row| {
                    cols.iter()
                        .map(|col| {
                            col.iter()
                                .fold(BigInt::zero(), |acc, (k, x)| acc + &row[*k] * x)
                        })
                        .collect()
                })
                .collect();
            dn *= d;
        }
        // |P/d^n − 1/m| = |m P − d^n| / (m d^n)
        let worst = power
            .iter()
            .flatten()
            .map(|p| (&big_m * p - &dn).abs())
            .max()
            .unwrap_or_default();
        out.push(BigRational::new(worst, &big_m * &dn));
    }
    Ok(out)
}

pub fn deviation_norm(a: &IntMatrix, n: usize, limit: usize) -> Result<BigRational, SpectralError> {
    Ok(deviation_series(a, n, limit)?
        .pop()
        .expect("series has n + 1 entries"))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
