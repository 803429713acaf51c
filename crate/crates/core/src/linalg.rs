//! Deterministic dense decompositions: thin Householder QR, one-sided
//! Jacobi SVD, and small solvers.
//!
//! Jacobi was chosen over bidiagonalization because it is simple to make
//! bit-reproducible (fixed cyclic pivot order, no shifts) and it delivers
//! singular values accurate to near machine precision, which the rest of the
//! crate leans on for spectral initialization, local-scale estimation, and
//! nuclear-norm projection.

use crate::error::{Error, Result};
use crate::mat::{dot, Mat};

/// Full singular value decomposition `A = U diag(s) V^T` with `U: m×p`,
/// `V: n×p`, `p = min(m, n)`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub singular_values: Vec<f64>,
    pub v: Mat,
}

impl Svd {
    /// Compute the full SVD by one-sided (Hestenes) Jacobi rotations with a
    /// fixed cyclic sweep order.
    pub fn compute(a: &Mat) -> Svd {
        let (m, n) = a.dims();
        if m < n {
            // Factor the transpose and swap the roles of U and V.
            let t = Svd::compute(&a.transpose());
            return Svd { u: t.v, singular_values: t.singular_values, v: t.u };
        }
        // Column-major working copy: cols[j] is the j-th column of A.
        let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
        let mut v: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            })
            .collect();

        const MAX_SWEEPS: usize = 60;
        const CONV_TOL: f64 = 1e-14;
        const ROT_TOL: f64 = 1e-15;
        for _ in 0..MAX_SWEEPS {
            let mut norms_sq: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();
            let mut max_ratio = 0.0_f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha = norms_sq[p];
                    let beta = norms_sq[q];
                    if alpha == 0.0 || beta == 0.0 {
                        continue;
                    }
                    let gamma = {
                        let (cp, cq) = pair_mut(&mut cols, p, q);
                        dot(cp, cq)
                    };
                    let denom = (alpha * beta).sqrt();
                    let ratio = gamma.abs() / denom;
                    max_ratio = max_ratio.max(ratio);
                    if ratio <= ROT_TOL {
                        continue;
                    }
                    // Rotation angle that zeroes the (p,q) entry of A^T A.
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    {
                        let (cp, cq) = pair_mut(&mut cols, p, q);
                        rotate(cp, cq, c, s);
                    }
                    {
                        let (vp, vq) = pair_mut(&mut v, p, q);
                        rotate(vp, vq, c, s);
                    }
                    norms_sq[p] = alpha - t * gamma;
                    norms_sq[q] = beta + t * gamma;
                }
            }
            if max_ratio <= CONV_TOL {
                break;
            }
        }

        // Extract singular values, sort descending (index tiebreak keeps the
        // whole decomposition deterministic), normalize U columns.
        let mut entries: Vec<(f64, usize)> = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (dot(c, c).sqrt(), j))
            .collect();
        entries.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

        let sigma_max = entries.first().map(|e| e.0).unwrap_or(0.0);
        // Below this, a column is numerically null: its direction is rotation
        // noise, so zero the value and rebuild the basis vector explicitly.
        let null_tol = sigma_max * (m.max(n) as f64) * 1e-15;

        let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut singular_values = Vec::with_capacity(n);
        let mut v_out = Mat::zeros(n, n);
        for (slot, &(sigma, j)) in entries.iter().enumerate() {
            for i in 0..n {
                v_out.set(i, slot, v[j][i]);
            }
            if sigma > null_tol && sigma > 0.0 {
                singular_values.push(sigma);
                u_cols.push(cols[j].iter().map(|&x| x / sigma).collect());
            } else {
                singular_values.push(0.0);
                u_cols.push(Vec::new()); // completed below
            }
        }
        complete_basis(&mut u_cols, m);

        let mut u = Mat::zeros(m, n);
        for (j, col) in u_cols.iter().enumerate() {
            for i in 0..m {
                u.set(i, j, col[i]);
            }
        }
        Svd { u, singular_values, v: v_out }
    }

    /// Truncate to the leading `k` singular triplets.
    pub fn truncate(&self, k: usize) -> (Mat, Vec<f64>, Mat) {
        let m = self.u.rows();
        let n = self.v.rows();
        let u = Mat::from_fn(m, k, |i, j| self.u.get(i, j));
        let v = Mat::from_fn(n, k, |i, j| self.v.get(i, j));
        (u, self.singular_values[..k].to_vec(), v)
    }

    /// Reconstruct `U diag(s) V^T`.
    pub fn reconstruct(&self) -> Mat {
        reconstruct(&self.u, &self.singular_values, &self.v)
    }
}

/// `U diag(s) V^T` for thin factors.
pub fn reconstruct(u: &Mat, s: &[f64], v: &Mat) -> Mat {
    let (m, k) = u.dims();
    let n = v.rows();
    let mut out = Mat::zeros(m, n);
    for (l, &sl) in s.iter().enumerate().take(k) {
        if sl == 0.0 {
            continue;
        }
        for i in 0..m {
            let uil = u.get(i, l) * sl;
            if uil == 0.0 {
                continue;
            }
            let row = out.row_mut(i);
            for j in 0..n {
                row[j] += uil * v.get(j, l);
            }
        }
    }
    out
}

/// Thin SVD: the best rank-`k` factors of `a`.
///
/// `U: m×k` and `V: n×k` have orthonormal columns; singular values are
/// descending. Errors if `k` exceeds `min(m, n)` or is zero.
pub fn thin_svd(a: &Mat, k: usize) -> Result<(Mat, Vec<f64>, Mat)> {
    let (m, n) = a.dims();
    if k == 0 || k > m.min(n) {
        return Err(Error::contract(format!(
            "thin_svd rank {k} out of range for {m}x{n} matrix"
        )));
    }
    Ok(Svd::compute(a).truncate(k))
}

/// SVD of the product `L R^T` without forming it at full cost: thin QR of
/// each factor, then a small Jacobi SVD of `R_L R_R^T`.
pub fn svd_of_product(l: &Mat, r: &Mat) -> Result<(Mat, Vec<f64>, Mat)> {
    let k = l.cols();
    if r.cols() != k {
        return Err(Error::contract("svd_of_product: factor ranks differ".into()));
    }
    let (ql, rl) = thin_qr(l);
    let (qr, rr) = thin_qr(r);
    let small = rl.matmul_transpose(&rr);
    let svd = Svd::compute(&small);
    let u = ql.matmul(&svd.u);
    let v = qr.matmul(&svd.v);
    Ok((u, svd.singular_values, v))
}

/// Thin Householder QR: `a = Q R` with `Q: m×k`, `R: k×k`, `k = min(m, n)`.
pub fn thin_qr(a: &Mat) -> (Mat, Mat) {
    let (m, n) = a.dims();
    let k = m.min(n);
    let mut work = a.clone();
    // Householder vectors stored below the diagonal; diag(R) kept aside.
    let mut r_diag = vec![0.0_f64; k];
    for col in 0..k {
        let mut norm_sq = 0.0;
        for i in col..m {
            let x = work.get(i, col);
            norm_sq += x * x;
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            r_diag[col] = 0.0;
            continue;
        }
        let head = work.get(col, col);
        let alpha = if head >= 0.0 { -norm } else { norm };
        // v = x - alpha e1, normalized so v[0] = 1.
        let v0 = head - alpha;
        r_diag[col] = alpha;
        if v0 == 0.0 {
            continue;
        }
        for i in (col + 1)..m {
            let val = work.get(i, col) / v0;
            work.set(i, col, val);
        }
        let tau = -v0 / alpha; // 2 / (v^T v) * v0^2 simplified for this scaling
        for j in (col + 1)..n {
            let mut s = work.get(col, j);
            for i in (col + 1)..m {
                s += work.get(i, col) * work.get(i, j);
            }
            s *= tau;
            work.set(col, j, work.get(col, j) - s);
            for i in (col + 1)..m {
                work.set(i, j, work.get(i, j) - s * work.get(i, col));
            }
        }
        work.set(col, col, v0); // keep v normalized later; v[0] scaled back below
    }

    // R from the upper triangle.
    let mut r_mat = Mat::zeros(k, n.min(a.cols()));
    for i in 0..k {
        r_mat.set(i, i, r_diag[i]);
        for j in (i + 1)..n {
            r_mat.set(i, j, work.get(i, j));
        }
    }

    // Accumulate Q by applying the reflectors to the identity.
    let mut q = Mat::zeros(m, k);
    for j in 0..k {
        q.set(j, j, 1.0);
    }
    for col in (0..k).rev() {
        if r_diag[col] == 0.0 {
            continue;
        }
        let v0 = work.get(col, col);
        if v0 == 0.0 {
            continue;
        }
        let tau = -v0 / r_diag[col];
        for j in 0..k {
            let mut s = q.get(col, j);
            for i in (col + 1)..m {
                s += work.get(i, col) * q.get(i, j);
            }
            s *= tau;
            q.set(col, j, q.get(col, j) - s);
            for i in (col + 1)..m {
                q.set(i, j, q.get(i, j) - s * work.get(i, col));
            }
        }
    }
    (q, r_mat)
}

/// Solve the symmetric positive-definite system `a x = b` in place via
/// Cholesky. `a` is `k×k` row-major, `b` length `k`. Fails on a
/// non-positive pivot.
pub fn cholesky_solve(a: &mut [f64], b: &mut [f64], k: usize) -> Result<()> {
    for j in 0..k {
        let mut sum = a[j * k + j];
        for p in 0..j {
            sum -= a[j * k + p] * a[j * k + p];
        }
        if sum <= 0.0 || !sum.is_finite() {
            return Err(Error::numerical(format!(
                "Cholesky pivot {sum:.3e} at index {j}: matrix not positive definite"
            )));
        }
        let ljj = sum.sqrt();
        a[j * k + j] = ljj;
        for i in (j + 1)..k {
            let mut s = a[i * k + j];
            for p in 0..j {
                s -= a[i * k + p] * a[j * k + p];
            }
            a[i * k + j] = s / ljj;
        }
    }
    for i in 0..k {
        let mut s = b[i];
        for j in 0..i {
            s -= a[i * k + j] * b[j];
        }
        b[i] = s / a[i * k + i];
    }
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in (i + 1)..k {
            s -= a[j * k + i] * b[j];
        }
        b[i] = s / a[i * k + i];
    }
    Ok(())
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let xp = c * *xi - s * *yi;
        let yq = s * *xi + c * *yi;
        *xi = xp;
        *yi = yq;
    }
}

fn pair_mut<T>(v: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// Fill empty slots with unit vectors orthonormal to the occupied columns.
fn complete_basis(cols: &mut [Vec<f64>], m: usize) {
    let occupied: Vec<usize> = (0..cols.len()).filter(|&j| !cols[j].is_empty()).collect();
    let mut done: Vec<usize> = occupied;
    for j in 0..cols.len() {
        if !cols[j].is_empty() {
            continue;
        }
        let mut chosen = None;
        for basis in 0..m {
            let mut cand = vec![0.0_f64; m];
            cand[basis] = 1.0;
            // Two rounds of Gram-Schmidt for stability.
            for _ in 0..2 {
                for &d in &done {
                    let proj = dot(&cand, &cols[d]);
                    for (ci, ui) in cand.iter_mut().zip(&cols[d]) {
                        *ci -= proj * ui;
                    }
                }
            }
            let norm = dot(&cand, &cand).sqrt();
            if norm > 0.5 {
                for ci in cand.iter_mut() {
                    *ci /= norm;
                }
                chosen = Some(cand);
                break;
            }
        }
        cols[j] = chosen.expect("orthonormal completion exists for m >= n");
        done.push(j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn rand_mat(rows: usize, cols: usize, seed: u64) -> Mat {
        let mut rng = crate::RandomSource::new(seed, 0).rng();
        Mat::from_fn(rows, cols, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    fn orthonormality_defect(q: &Mat) -> f64 {
        let k = q.cols();
        let mut worst = 0.0_f64;
        for a in 0..k {
            for b in 0..k {
                let mut s = 0.0;
                for i in 0..q.rows() {
                    s += q.get(i, a) * q.get(i, b);
                }
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - want).abs());
            }
        }
        worst
    }

    #[test]
    fn svd_identity_spectrum() {
        let svd = Svd::compute(&Mat::identity(3));
        for s in &svd.singular_values {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn svd_rank_one_closed_form() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [2.0, 1.0, -1.0];
        let a = Mat::from_fn(4, 3, |i, j| u[i] * v[j]);
        let (uu, s, vv) = thin_svd(&a, 1).unwrap();
        let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((s[0] - nu * nv).abs() < 1e-10 * nu * nv);
        let full = Svd::compute(&a);
        assert!(full.singular_values[1] < 1e-10 * full.singular_values[0]);
        let recon = reconstruct(&uu, &s, &vv);
        assert!(recon.sub(&a).frobenius_norm() < 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn svd_full_rank_exactness() {
        let a = rand_mat(20, 10, 7);
        let (u, s, v) = thin_svd(&a, 10).unwrap();
        let recon = reconstruct(&u, &s, &v);
        let rel = recon.sub(&a).frobenius_norm() / a.frobenius_norm();
        assert!(rel <= 1e-8, "relative reconstruction error {rel}");
        assert!(orthonormality_defect(&u) <= 1e-10);
        assert!(orthonormality_defect(&v) <= 1e-10);
    }

    #[test]
    fn svd_wide_matrix() {
        let a = rand_mat(6, 15, 3);
        let svd = Svd::compute(&a);
        assert_eq!(svd.u.dims(), (6, 6));
        assert_eq!(svd.v.dims(), (15, 6));
        let rel = svd.reconstruct().sub(&a).frobenius_norm() / a.frobenius_norm();
        assert!(rel <= 1e-10);
    }

    #[test]
    fn svd_orthonormality_random_sizes() {
        for (m, n, seed) in [(5, 5, 1), (12, 4, 2), (30, 18, 3), (9, 2, 4)] {
            let a = rand_mat(m, n, seed);
            let svd = Svd::compute(&a);
            assert!(orthonormality_defect(&svd.u) <= 1e-10, "{m}x{n}");
            assert!(orthonormality_defect(&svd.v) <= 1e-10, "{m}x{n}");
            let mut prev = f64::INFINITY;
            for &s in &svd.singular_values {
                assert!(s >= 0.0 && s <= prev);
                prev = s;
            }
        }
    }

    #[test]
    fn svd_best_rank_k_matches_truncation() {
        // Independent oracle: build a matrix with known singular structure,
        // then the best rank-k approximation is the truncated sum.
        let m = 8;
        let n = 6;
        let qa = thin_qr(&rand_mat(m, n, 11)).0;
        let qb = thin_qr(&rand_mat(n, n, 12)).0;
        let sig = [5.0, 3.0, 1.5, 0.7, 0.2, 0.05];
        let a = reconstruct(&qa, &sig, &qb);
        for k in [1, 2, 4] {
            let (u, s, v) = thin_svd(&a, k).unwrap();
            let best = reconstruct(&qa, &sig[..k].to_vec(), &qb);
            let err = reconstruct(&u, &s, &v).sub(&best).frobenius_norm();
            assert!(err <= 1e-8 * a.frobenius_norm(), "k={k} err={err}");
        }
    }

    #[test]
    fn thin_svd_rank_out_of_range() {
        let a = Mat::identity(3);
        assert!(thin_svd(&a, 4).is_err());
        assert!(thin_svd(&a, 0).is_err());
    }

    #[test]
    fn svd_zero_matrix_completes_basis() {
        let svd = Svd::compute(&Mat::zeros(5, 3));
        assert!(svd.singular_values.iter().all(|&s| s == 0.0));
        assert!(orthonormality_defect(&svd.u) <= 1e-12);
    }

    #[test]
    fn qr_reconstructs_and_is_orthonormal() {
        let a = rand_mat(10, 4, 21);
        let (q, r) = thin_qr(&a);
        assert!(orthonormality_defect(&q) <= 1e-12);
        let recon = q.matmul(&r);
        assert!(recon.sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
        // R upper triangular.
        for i in 0..r.rows() {
            for j in 0..i {
                assert_eq!(r.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn product_svd_matches_direct() {
        let l = rand_mat(12, 3, 31);
        let r = rand_mat(9, 3, 32);
        let direct = Svd::compute(&l.matmul_transpose(&r));
        let (u, s, v) = svd_of_product(&l, &r).unwrap();
        for i in 0..3 {
            assert!((s[i] - direct.singular_values[i]).abs() <= 1e-10 * (1.0 + direct.singular_values[i]));
        }
        let recon = reconstruct(&u, &s, &v);
        let full = l.matmul_transpose(&r);
        assert!(recon.sub(&full).frobenius_norm() <= 1e-9 * full.frobenius_norm());
    }

    #[test]
    fn cholesky_solves_spd() {
        let mut a = vec![4.0, 2.0, 2.0, 3.0];
        let mut b = vec![8.0, 7.0];
        cholesky_solve(&mut a, &mut b, 2).unwrap();
        assert!((4.0 * b[0] + 2.0 * b[1] - 8.0).abs() < 1e-12);
        assert!((2.0 * b[0] + 3.0 * b[1] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_singular() {
        let mut a = vec![1.0, 1.0, 1.0, 1.0];
        let mut b = vec![1.0, 1.0];
        assert!(cholesky_solve(&mut a, &mut b, 2).is_err());
    }
}
