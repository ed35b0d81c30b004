//! Brute-force reference walk: explicit dense step matrices multiplied in
//! time order, built without touching the crate's layer code.

#![allow(dead_code)]

use qwalk::c64;

pub type Dense = Vec<Vec<c64>>;

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| c64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

/// Step matrix on `sites` modes. `full` selects the row pairing (0,1),(2,3),…;
/// otherwise (1,2),(3,4),… with the edges untouched. The phase multiplies the
/// `lower` (or upper) member of every pair before the coupler.
pub fn step_matrix(sites: usize, full: bool, phi: f64, lower: bool) -> Dense {
    let r = 1.0 / 2f64.sqrt();
    let mut coupler = identity(sites);
    let mut phase = identity(sites);
    // offset rows stop before the last mode so it passes through
    let last_upper = if full { sites - 2 } else { sites.saturating_sub(3) };
    let mut u = if full { 0 } else { 1 };
    while u <= last_upper && u + 1 < sites {
        let l = u + 1;
        coupler[u][u] = c64::new(r, 0.0);
        coupler[u][l] = c64::new(r, 0.0);
        coupler[l][u] = c64::new(r, 0.0);
        coupler[l][l] = c64::new(-r, 0.0);
        let arm = if lower { l } else { u };
        phase[arm][arm] = c64::new(phi.cos(), phi.sin());
        u += 2;
    }
    matmul(&coupler, &phase)
}

/// Time-ordered product U(n)…U(1) for every n, starting with the identity.
pub fn products(sites: usize, phases: &[f64], full_first: bool, lower: bool) -> Vec<Dense> {
    let mut out = vec![identity(sites)];
    for (i, &phi) in phases.iter().enumerate() {
        let step = i + 1;
        let full = (step % 2 == 1) == full_first;
        let next = matmul(&step_matrix(sites, full, phi, lower), out.last().unwrap());
        out.push(next);
    }
    out
}

/// Probabilities of column `mode` of each product (unit input at `mode`).
pub fn oracle_probabilities(sites: usize, phases: &[f64], mode: usize, full_first: bool, lower: bool) -> Vec<Vec<f64>> {
    products(sites, phases, full_first, lower)
        .iter()
        .map(|u| (0..sites).map(|i| u[i][mode].norm_sqr()).collect())
        .collect()
}

/// Two-injection averaged oracle distributions for modes `a`, `b` (zero-based).
pub fn oracle_pair(sites: usize, phases: &[f64], a: usize, b: usize, full_first: bool, lower: bool) -> Vec<Vec<f64>> {
    let pa = oracle_probabilities(sites, phases, a, full_first, lower);
    let pb = oracle_probabilities(sites, phases, b, full_first, lower);
    pa.iter()
        .zip(&pb)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect())
        .collect()
}

/// Position variance on the centred half-integer grid, computed as
/// E[x²] − E[x]².
pub fn oracle_variance(p: &[f64]) -> f64 {
    let c = (p.len() as f64 + 1.0) / 2.0;
    let xs: Vec<f64> = (1..=p.len()).map(|j| j as f64 - c).collect();
    let m: f64 = p.iter().zip(&xs).map(|(a, x)| a * x).sum();
    let m2: f64 = p.iter().zip(&xs).map(|(a, x)| a * x * x).sum();
    m2 - m * m
}
