//! One-dimensional Gauss rules on [0,1]: Legendre, and the rule for the
//! weight −ln x built by the modified Chebyshev algorithm.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of a rule on [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    /// Affine image on [a,b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule1d {
        let h = b - a;
        Rule1d {
            nodes: self.nodes.iter().map(|x| a + h * x).collect(),
            weights: self.weights.iter().map(|w| h * w).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Golub–Welsch for a monic three-term recurrence with diagonal `alpha`,
/// off-diagonal squares `beta[1..]` and total mass `beta[0]`.
fn golub_welsch(alpha: &[f64], beta: &[f64]) -> Rule1d {
    let n = alpha.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = alpha[k];
        if k + 1 < n {
            let off = beta[k + 1].sqrt();
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], beta[0] * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule1d { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// Legendre P_n and P_n′ on [−1,1].
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// n-point Gauss–Legendre on [0,1]. Eigenvalue nodes are polished by Newton
/// and weights recomputed from 2/((1−x²)P_n′²).
pub fn gauss_legendre(n: usize) -> Rule1d {
    assert!(n >= 1);
    let alpha = vec![0.0; n];
    let mut beta = vec![2.0; n];
    for (k, b) in beta.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        *b = kf * kf / (4.0 * kf * kf - 1.0);
    }
    let gw = golub_welsch(&alpha, &beta);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &gw.nodes {
        let mut x = x0;
        for _ in 0..3 {
            let (p, dp) = legendre(n, x);
            x -= p / dp;
        }
        let (_, dp) = legendre(n, x);
        nodes.push(0.5 * (x + 1.0));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    Rule1d { nodes, weights }
}

/// n-point Gauss rule for ∫₀¹ (−ln x) f(x) dx.
///
/// Modified moments against monic shifted Legendre polynomials are
/// ∫(−ln x)P*_k = (−1)^k/(k(k+1)) (k ≥ 1) and 1 (k = 0), scaled by (k!)²/(2k)!.
pub fn gauss_log(n: usize) -> Rule1d {
    assert!(n >= 1);
    let m = 2 * n;
    let mut mom = vec![0.0; m];
    let mut scale = 1.0;
    for (k, slot) in mom.iter_mut().enumerate() {
        if k > 0 {
            let kf = k as f64;
            scale *= kf * kf / ((2.0 * kf) * (2.0 * kf - 1.0));
        }
        let raw = if k == 0 {
            1.0
        } else {
            let kf = k as f64;
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            s / (kf * (kf + 1.0))
        };
        *slot = raw * scale;
    }
    let a = vec![0.5; m];
    let b: Vec<f64> = (0..m)
        .map(|l| {
            let lf = l as f64;
            if l == 0 { 0.0 } else { lf * lf / (4.0 * (4.0 * lf * lf - 1.0)) }
        })
        .collect();
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut sig_prev = vec![0.0; m + 1];
    let mut sig: Vec<f64> = mom.clone();
    sig.push(0.0);
    alpha[0] = a[0] + mom[1] / mom[0];
    beta[0] = mom[0];
    for k in 1..n {
        let mut next = vec![0.0; m + 1];
        for l in k..(m - k) {
            let lower = if l >= 1 { sig[l - 1] } else { 0.0 };
            next[l] = sig[l + 1] - (alpha[k - 1] - a[l]) * sig[l] - beta[k - 1] * sig_prev[l] + b[l] * lower;
        }
        alpha[k] = a[k] + next[k + 1] / next[k] - sig[k] / sig[k - 1];
        beta[k] = next[k] / sig[k - 1];
        sig_prev = sig;
        sig = next;
    }
    golub_welsch(&alpha, &beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(16);
        for k in 0..32 {
            let v = r.integrate(|x| x.powi(k));
            assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn log_rule_moments() {
        let r = gauss_log(16);
        for k in 0..32 {
            let v = r.integrate(|x| x.powi(k));
            let exact = 1.0 / ((k as f64 + 1.0) * (k as f64 + 1.0));
            assert!((v - exact).abs() < 1e-13 * exact.max(1e-3), "k={k} v={v}");
        }
        assert!(r.nodes.iter().all(|x| *x > 0.0 && *x < 1.0));
    }
}
