//! Confined time-of-arrival kernels and their Nyström discretization.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::{self, BoxConfig, Parity};

/// Default node count of the midpoint Nyström rule.
pub const DEFAULT_NODES: usize = 2000;

fn check_inside(q: f64, qp: f64, bx: &BoxConfig) -> Result<()> {
    let lim = bx.l * (1.0 + 1e-12);
    if q.abs() > lim || qp.abs() > lim {
        return Err(Error::Domain(format!("kernel arguments ({q}, {qp}) outside [-l, l]")));
    }
    Ok(())
}

#[inline]
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Periodic kernel
/// `T_0(q, q') = (mu / 4 i hbar) [(q + q') sgn(q - q') - (q^2 - q'^2) / l]`, `sgn(0) = 0`.
pub fn kernel_t0(q: f64, qp: f64, bx: &BoxConfig) -> Result<Complex64> {
    check_inside(q, qp, bx)?;
    Ok(t0(q, qp, bx))
}

#[inline]
fn t0(q: f64, qp: f64, bx: &BoxConfig) -> Complex64 {
    let real = (q + qp) * sgn(q - qp) - (q * q - qp * qp) / bx.l;
    // 1/(4i) = -i/4
    Complex64::new(0.0, -bx.mu / (4.0 * bx.hbar) * real)
}

/// Kernel for `gamma != 0`:
/// `-mu (q + q') / (4 hbar sin(gamma)) (e^{i gamma} H(q - q') + e^{-i gamma} H(q' - q))`, `H(0) = 1/2`.
pub fn kernel_tgamma(q: f64, qp: f64, bx: &BoxConfig) -> Result<Complex64> {
    if bx.gamma == 0.0 {
        return Err(Error::Unsupported("gamma = 0 has its own kernel, use kernel_t0".into()));
    }
    check_inside(q, qp, bx)?;
    Ok(tgamma(q, qp, bx))
}

#[inline]
fn tgamma(q: f64, qp: f64, bx: &BoxConfig) -> Complex64 {
    let (s, c) = bx.gamma.sin_cos();
    let pre = -bx.mu * (q + qp) / (4.0 * bx.hbar * s);
    let phase = if q > qp {
        Complex64::new(c, s)
    } else if q < qp {
        Complex64::new(c, -s)
    } else {
        Complex64::new(c, 0.0)
    };
    phase * pre
}

/// Kernel matching the boundary phase of `bx`.
pub fn kernel(q: f64, qp: f64, bx: &BoxConfig) -> Result<Complex64> {
    if bx.gamma == 0.0 {
        kernel_t0(q, qp, bx)
    } else {
        kernel_tgamma(q, qp, bx)
    }
}

/// Symmetrically weighted Nyström matrix `M_ij = sqrt(w_i) T(q_i, q_j) sqrt(w_j)`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub entries: Mat<Complex64>,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// Largest `|M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                let d = self.entries[(i, j)] - self.entries[(j, i)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// `tr(M^2) = sum |M_ij|^2` for a Hermitian matrix.
    pub fn trace_of_square(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += self.entries[(i, j)].norm_sqr();
            }
        }
        acc
    }

    /// `<psi|M|psi>` for samples `psi` at the nodes (weights applied).
    pub fn quadratic_form(&self, psi: &[Complex64]) -> Result<Complex64> {
        let n = self.dim();
        if psi.len() != n {
            return Err(Error::Domain(format!("expected {n} samples, got {}", psi.len())));
        }
        let v: Vec<Complex64> = psi.iter().zip(&self.weights).map(|(p, w)| p * w.sqrt()).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let mut col = Complex64::new(0.0, 0.0);
            for i in 0..n {
                col += v[i].conj() * self.entries[(i, j)];
            }
            acc += col * v[j];
        }
        Ok(acc)
    }
}

/// Midpoint-rule Nyström matrix with `n_nodes` uniform nodes on `[-l, l]`.
pub fn nystrom(bx: &BoxConfig, n_nodes: usize) -> Result<KernelMatrix> {
    if n_nodes < 16 {
        return Err(Error::Domain(format!("need at least 16 nodes, got {n_nodes}")));
    }
    let h = 2.0 * bx.l / n_nodes as f64;
    let nodes: Vec<f64> = (0..n_nodes).map(|i| -bx.l + (i as f64 + 0.5) * h).collect();
    let weights = vec![h; n_nodes];
    let entries = if bx.gamma == 0.0 {
        Mat::from_fn(n_nodes, n_nodes, |i, j| t0(nodes[i], nodes[j], bx) * h)
    } else {
        Mat::from_fn(n_nodes, n_nodes, |i, j| tgamma(nodes[i], nodes[j], bx) * h)
    };
    Ok(KernelMatrix { nodes, weights, entries })
}

/// One eigenpair of the discretized operator; `vector` holds function
/// samples at the nodes, normalized in the discrete `L^2` sense.
#[derive(Debug, Clone)]
pub struct OracleEigen {
    pub value: f64,
    pub vector: Vec<Complex64>,
}

fn by_magnitude(values: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    idx.truncate(count);
    idx
}

/// The `count` eigenvalues of largest magnitude with eigenvectors.
pub fn oracle_spectrum(matrix: &KernelMatrix, count: usize) -> Result<Vec<OracleEigen>> {
    let n = matrix.dim();
    if count > n {
        return Err(Error::Domain(format!("count {count} exceeds dimension {n}")));
    }
    let evd = matrix
        .entries
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let u = evd.U();
    Ok(by_magnitude(&values, count)
        .into_iter()
        .map(|k| OracleEigen {
            value: values[k],
            vector: (0..n).map(|i| u[(i, k)] / matrix.weights[i].sqrt()).collect(),
        })
        .collect())
}

/// The `count` eigenvalues of largest magnitude, values only, sorted by
/// decreasing magnitude with each `+/-` pair listed positive first.
pub fn oracle_eigenvalues(matrix: &KernelMatrix, count: usize) -> Result<Vec<f64>> {
    let n = matrix.dim();
    if count > n {
        return Err(Error::Domain(format!("count {count} exceeds dimension {n}")));
    }
    let values = matrix
        .entries
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numeric(format!("eigensolver failed: {e:?}")))?;
    let mut out: Vec<f64> = by_magnitude(&values, count).into_iter().map(|k| values[k]).collect();
    out.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    for pair in out.chunks_mut(2) {
        if pair.len() == 2 && pair[0] < pair[1] {
            pair.swap(0, 1);
        }
    }
    Ok(out)
}

/// Midpoint-rule eigenvalues at `n_nodes` and `n_nodes / 2`, combined as
/// `(4 lambda_N - lambda_{N/2}) / 3` to cancel the `h^2` error term.
#[derive(Debug, Clone)]
pub struct Extrapolated {
    pub fine: Vec<f64>,
    pub coarse: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn richardson_eigenvalues(bx: &BoxConfig, n_nodes: usize, count: usize) -> Result<Extrapolated> {
    if n_nodes % 2 != 0 {
        return Err(Error::Domain("node count must be even for extrapolation".into()));
    }
    let fine = oracle_eigenvalues(&nystrom(bx, n_nodes)?, count)?;
    let coarse = oracle_eigenvalues(&nystrom(bx, n_nodes / 2)?, count)?;
    let values = fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
    Ok(Extrapolated { fine, coarse, values })
}

/// Analytic eigenvalues of largest magnitude, in the same order as
/// [`oracle_eigenvalues`].
pub fn analytic_top(bx: &BoxConfig, count: usize) -> Result<Vec<f64>> {
    let per = count / 2 + 2;
    let mut rhos: Vec<f64> = spectrum::odd_roots(per)?;
    rhos.extend(spectrum::even_roots(per)?);
    rhos.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(count);
    for rho in rhos {
        let tau = bx.tau_of_rho(rho);
        out.push(tau);
        out.push(-tau);
    }
    out.truncate(count);
    Ok(out)
}

/// One row of the analytic-versus-oracle comparison table.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonRow {
    pub rank: usize,
    pub analytic: f64,
    pub oracle: f64,
    pub rel_error: f64,
}

pub fn compare_with_analytic(bx: &BoxConfig, n_nodes: usize, count: usize) -> Result<Vec<ComparisonRow>> {
    spectrum::eigenvalues(bx, Parity::Odd, 1)?;
    let ext = richardson_eigenvalues(bx, n_nodes, count)?;
    let analytic = analytic_top(bx, count)?;
    Ok(analytic
        .iter()
        .zip(&ext.values)
        .enumerate()
        .map(|(k, (&a, &o))| ComparisonRow {
            rank: k + 1,
            analytic: a,
            oracle: o,
            rel_error: ((o - a) / a).abs(),
        })
        .collect())
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("rank,analytic,oracle,rel_error\n");
    for r in rows {
        out.push_str(&format!("{},{:.17e},{:.17e},{:.3e}\n", r.rank, r.analytic, r.oracle, r.rel_error));
    }
    out
}

/// Oracle spectrum export: `rank,eigenvalue`.
pub fn oracle_csv(values: &[f64]) -> String {
    let mut out = String::from("rank,eigenvalue\n");
    for (k, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{:.17e}\n", k + 1, v));
    }
    out
}

/// Eigenvector dump: `node,re,im`.
pub fn eigenvector_csv(nodes: &[f64], vector: &[Complex64]) -> String {
    let mut out = String::from("node,re,im\n");
    for (q, v) in nodes.iter().zip(vector) {
        out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", q, v.re, v.im));
    }
    out
}

/// Index of the largest-magnitude component (first one on ties).
pub fn peak_index(v: &[Complex64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[best].norm() * (1.0 + 1e-9) {
            best = i;
        }
    }
    best
}

/// Rotate `v` so that component `k` is real positive.
pub fn align_phase_at(v: &mut [Complex64], k: usize) {
    let big = v[k];
    if big.norm() > 0.0 {
        let rot = big.conj() / big.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use proptest::prelude::*;

    fn unit() -> BoxConfig {
        BoxConfig::periodic(1.0).unwrap()
    }

    proptest! {
        #[test]
        fn t0_hermitian_and_parity(q in -1.0f64..1.0, qp in -1.0f64..1.0) {
            let bx = unit();
            let a = kernel_t0(q, qp, &bx).unwrap();
            let b = kernel_t0(qp, q, &bx).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-15);
            let c = kernel_t0(-q, -qp, &bx).unwrap();
            prop_assert!((a - c).norm() <= 1e-15);
        }

        #[test]
        fn tgamma_hermitian(q in -1.0f64..1.0, qp in -1.0f64..1.0, g in 0.05f64..1.5) {
            let bx = BoxConfig::new(1.0, 1.0, 1.0, g).unwrap();
            let a = kernel_tgamma(q, qp, &bx).unwrap();
            let b = kernel_tgamma(qp, q, &bx).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-14 * a.norm().max(1.0));
        }

        #[test]
        fn tgamma_independent_of_l(q in -0.9f64..0.9, qp in -0.9f64..0.9, l in 1.0f64..20.0) {
            let a = kernel_tgamma(q, qp, &BoxConfig::new(1.0, 1.0, 1.0, 0.4).unwrap()).unwrap();
            let b = kernel_tgamma(q, qp, &BoxConfig::new(l, 1.0, 1.0, 0.4).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn t0_vanishes_on_diagonal() {
        let bx = unit();
        for &q in &[-1.0, -0.3, 0.0, 0.77] {
            assert_eq!(kernel_t0(q, q, &bx).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn tgamma_diagonal_and_dispatch() {
        let g = 0.3f64;
        let bx = BoxConfig::new(1.0, 1.0, 1.0, g).unwrap();
        let q = 0.4;
        let d = kernel_tgamma(q, q, &bx).unwrap();
        let expect = -2.0 * q * g.cos() / (4.0 * g.sin());
        assert!((d.re - expect).abs() < 1e-15 && d.im == 0.0);
        assert!(matches!(kernel_tgamma(0.1, 0.2, &unit()), Err(Error::Unsupported(_))));
        assert!(matches!(kernel_t0(1.5, 0.0, &unit()), Err(Error::Domain(_))));
    }

    #[test]
    fn nystrom_hermitian_and_real_spectrum() {
        let m = nystrom(&unit(), 200).unwrap();
        assert!(m.hermiticity_defect() <= 1e-14);
        let g = nystrom(&BoxConfig::new(1.0, 1.0, 1.0, 0.7).unwrap(), 64).unwrap();
        assert!(g.hermiticity_defect() <= 1e-14);
        assert!(nystrom(&unit(), 8).is_err());
    }

    #[test]
    fn quadratic_form_real() {
        let m = nystrom(&unit(), 300).unwrap();
        let psi: Vec<Complex64> = m
            .nodes
            .iter()
            .map(|&q| Complex64::new((3.0 * q).sin() + 0.2 * q * q, 0.0))
            .collect();
        let v = m.quadratic_form(&psi).unwrap();
        assert!(v.im.abs() <= 1e-12, "{v}");
    }

    #[test]
    fn spectrum_symmetric() {
        let m = nystrom(&unit(), 400).unwrap();
        let v = oracle_eigenvalues(&m, 20).unwrap();
        for pair in v.chunks(2) {
            assert!((pair[0] + pair[1]).abs() <= 1e-10, "{pair:?}");
        }
    }

    #[test]
    fn trace_of_square_matches_double_integral() {
        // oracle: Gauss-Legendre on the two triangles either side of the diagonal
        let bx = unit();
        let f = |q: f64, qp: f64| t0(q, qp, &bx).norm_sqr();
        let mut double = 0.0;
        let outer = quad::panel_rule(-1.0, 1.0, 16, 16);
        for &(q, w) in &outer {
            let below: f64 = quad::panels(-1.0, q, 4, 16, |qp| f(q, qp));
            let above: f64 = quad::panels(q, 1.0, 4, 16, |qp| f(q, qp));
            double += w * (below + above);
        }
        assert!((double - 7.0 / 90.0).abs() < 1e-13);
        // sgn(0) = 0 zeroes the diagonal while |T0|^2 tends to (2q/4)^2 next
        // to it, so the midpoint sum misses sum_i h^2 (q_i/2)^2 = O(h)
        let m = nystrom(&bx, 2000).unwrap();
        let h = m.weights[0];
        let diagonal: f64 = m.nodes.iter().map(|q| h * h * 0.25 * q * q).sum();
        let tr = m.trace_of_square();
        assert!(((tr + diagonal - double) / double).abs() <= 1e-6, "{tr} {diagonal} {double}");
        let coarse = nystrom(&bx, 1000).unwrap().trace_of_square();
        let ratio = (coarse - double) / (tr - double);
        assert!((ratio - 2.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn richardson_converges_to_analytic_on_small_grid() {
        let bx = unit();
        let ext = richardson_eigenvalues(&bx, 400, 6).unwrap();
        let exact = analytic_top(&bx, 6).unwrap();
        for ((v, f), a) in ext.values.iter().zip(&ext.fine).zip(&exact) {
            assert!(((v - a) / a).abs() < ((f - a) / a).abs());
            assert!(((v - a) / a).abs() < 1e-5);
        }
    }

    #[test]
    fn oracle_vectors_match_analytic_eigenfunctions() {
        let bx = unit();
        let m = nystrom(&bx, 800).unwrap();
        let top = oracle_spectrum(&m, 4).unwrap();
        let mut recs = spectrum::eigenvalues(&bx, Parity::Odd, 2).unwrap();
        recs.extend(spectrum::eigenvalues(&bx, Parity::Even, 2).unwrap());
        let h = m.weights[0];
        for eig in &top {
            let rec = recs
                .iter()
                .min_by(|a, b| (a.tau - eig.value).abs().total_cmp(&(b.tau - eig.value).abs()))
                .unwrap();
            let mut num = eig.vector.clone();
            let mut ana: Vec<Complex64> = m.nodes.iter().map(|&q| spectrum::eval(rec, &bx, q)).collect();
            let k = peak_index(&ana);
            align_phase_at(&mut num, k);
            align_phase_at(&mut ana, k);
            let diff: f64 = num.iter().zip(&ana).map(|(a, b)| (a - b).norm_sqr() * h).sum::<f64>().sqrt();
            assert!(diff <= 1e-2, "tau={} diff={diff}", rec.tau);
        }
    }

    #[test]
    fn csv_shapes() {
        assert_eq!(oracle_csv(&[1.0, -1.0]).lines().count(), 3);
        let e = eigenvector_csv(&[0.0], &[Complex64::new(1.0, 2.0)]);
        assert!(e.starts_with("node,re,im\n"));
    }
}
