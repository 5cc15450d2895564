//! Restarted GMRES with right preconditioning for complex systems.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_iterations: usize,
    /// Target for `‖b − A x‖ / ‖b‖`.
    pub tolerance: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            restart: 60,
            max_iterations: 600,
            tolerance: 1e-13,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solves `A x = b` as `(A M⁻¹) y = b`, `x = M⁻¹ y`, starting from `x = 0`.
pub fn gmres<A, P>(mut apply: A, mut precondition: P, b: &[C64], opts: GmresOptions) -> GmresOutcome
where
    A: FnMut(&[C64]) -> Vec<C64>,
    P: FnMut(&[C64]) -> Vec<C64>,
{
    let n = b.len();
    let bnorm = norm(b);
    let zero = C64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    if bnorm == 0.0 {
        return GmresOutcome { x, iterations: 0, relative_residual: 0.0, converged: true };
    }
    let mut r = b.to_vec();
    let mut total = 0;
    let mut rel = 1.0;
    while total < opts.max_iterations {
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= opts.tolerance {
            return GmresOutcome { x, iterations: total, relative_residual: rel, converged: true };
        }
        let m = opts.restart.min(opts.max_iterations - total);
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        let mut precond: Vec<Vec<C64>> = Vec::with_capacity(m);
        basis.push(r.iter().map(|z| z / beta).collect());
        // Hessenberg columns after Givens rotation, plus the rotations
        let mut h: Vec<Vec<C64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<C64> = Vec::with_capacity(m);
        let mut g = vec![zero; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..m {
            let z = precondition(&basis[k]);
            let mut w = apply(&z);
            precond.push(z);
            let mut col = vec![zero; k + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(v, &w);
                col[i] = hij;
                axpy(-hij, v, &mut w);
            }
            // one reorthogonalization pass keeps the basis clean near convergence
            for (i, v) in basis.iter().enumerate() {
                let corr = dot(v, &w);
                col[i] += corr;
                axpy(-corr, v, &mut w);
            }
            let wn = norm(&w);
            col[k + 1] = C64::new(wn, 0.0);
            for i in 0..k {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = cs[i] * a + sn[i] * bb;
                col[i + 1] = -sn[i].conj() * a + cs[i] * bb;
            }
            let (a, bb) = (col[k], col[k + 1]);
            let denom = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if denom == 0.0 {
                (1.0, zero)
            } else if a.norm() == 0.0 {
                (0.0, bb.conj() / bb.norm())
            } else {
                let c = a.norm() / denom;
                (c, (a / a.norm()) * bb.conj() / denom)
            };
            cs.push(c);
            sn.push(s);
            col[k] = c * a + s * bb;
            col[k + 1] = zero;
            g[k + 1] = -s.conj() * g[k];
            g[k] *= c;
            h.push(col);
            total += 1;
            k_used = k + 1;
            rel = g[k + 1].norm() / bnorm;
            if rel <= opts.tolerance || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|z| z / wn).collect());
        }
        // back-substitute the small triangular system
        let mut yk = vec![zero; k_used];
        for i in (0..k_used).rev() {
            let mut acc = g[i];
            for j in i + 1..k_used {
                acc -= h[j][i] * yk[j];
            }
            yk[i] = if h[i][i].norm() == 0.0 { zero } else { acc / h[i][i] };
        }
        for (j, coef) in yk.iter().enumerate() {
            axpy(*coef, &precond[j], &mut x);
        }
        let ax = apply(&x);
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let true_rel = norm(&r) / bnorm;
        if true_rel <= opts.tolerance {
            return GmresOutcome { x, iterations: total, relative_residual: true_rel, converged: true };
        }
        rel = true_rel;
    }
    GmresOutcome { x, iterations: total, relative_residual: rel, converged: false }
}
