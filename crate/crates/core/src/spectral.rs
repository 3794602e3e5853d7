//! Batch spectral computations: the regularised inverse `(L + J/n)^-1`,
//! effective resistance by several independent routes, biharmonic distance,
//! total resistance and the spectral quantities the bounds need.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{DenseMatrix, SymMatrix};
use crate::scalar::Scalar;

/// Hard cap on terms summed by [`resistance_series_truncated`].
pub const SERIES_ITERATION_CAP: usize = 100_000;

/// Eigen-data of `L`, `L_hat` and `A_hat` for a whole graph.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    /// Eigenvalues of `L`, ascending.
    pub sigma: Vec<T>,
    /// Eigenvalues of `L_hat`, ascending.
    pub lambda: Vec<T>,
    /// Eigenvalues of `A_hat`, descending, `mu[i] = 1 - lambda[i]`.
    pub mu: Vec<T>,
    /// Orthonormal eigenvectors of `L_hat` (and `A_hat`) as columns,
    /// ordered like `lambda`.
    pub z: DenseMatrix<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn of(g: &Graph) -> Self {
        let sigma = g.laplacian::<T>().eigh().values;
        let eig = g.normalized_laplacian::<T>().eigh();
        let mu = eig.values.iter().map(|&l| T::one() - l).collect();
        Self { sigma, lambda: eig.values, mu, z: eig.vectors }
    }

    /// `sigma_2`, meaningful for connected graphs.
    pub fn spectral_gap(&self) -> Option<T> {
        self.sigma.get(1).copied()
    }

    /// `max(|mu_2|, |mu_n|)`.
    pub fn mu_bound(&self) -> Option<T> {
        let n = self.mu.len();
        if n < 2 {
            return None;
        }
        Some(self.mu[1].abs().max(self.mu[n - 1].abs()))
    }
}

/// Checks both endpoints exist and share a component.
pub(crate) fn check_pair(g: &Graph, u: usize, v: usize) -> Result<()> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if !g.same_component(u, v) {
        return Err(Error::DifferentComponents { u, v });
    }
    Ok(())
}

pub(crate) fn require_connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected { components: g.component_count() })
    }
}

/// `(L_c + J/n_c)^-1` for a connected graph given as its own subgraph.
pub fn connected_regularized_inverse<T: Scalar>(g: &Graph) -> Result<SymMatrix<T>> {
    let n = g.n();
    let l = g.laplacian::<T>();
    let shift = T::one() / T::from_usize_lossy(n);
    SymMatrix::from_upper(n, |i, j| l.get(i, j) + shift).inverse_spd()
}

/// Block-diagonal regularised inverse: on each component `c` the block is
/// `(L_c + J/n_c)^-1`; entries across components are zero.
pub fn regularized_inverse<T: Scalar>(g: &Graph) -> Result<SymMatrix<T>> {
    let mut blocks = Vec::with_capacity(g.component_count());
    for c in 0..g.component_count() {
        let (sub, verts) = g.component_subgraph(c);
        blocks.push((verts, connected_regularized_inverse::<T>(&sub)?));
    }
    let mut out = DenseMatrix::zeros(g.n(), g.n());
    for (verts, m) in &blocks {
        for (a, &u) in verts.iter().enumerate() {
            for (b, &v) in verts.iter().enumerate() {
                out[(u, v)] = m.get(a, b);
            }
        }
    }
    Ok(SymMatrix::from_dense_upper(&out))
}

/// Pseudoinverse of `L` via eigendecomposition, dropping one zero
/// eigenvalue per component. Independent of the regularised-inverse route.
pub fn laplacian_pseudoinverse<T: Scalar>(g: &Graph) -> SymMatrix<T> {
    let eig = g.laplacian::<T>().eigh();
    let skip = g.component_count();
    let n = g.n();
    SymMatrix::from_upper(n, |i, j| {
        (skip..n).fold(T::zero(), |acc, k| acc + eig.vectors[(i, k)] * eig.vectors[(j, k)] / eig.values[k])
    })
}

/// Local view of the component containing a pair: subgraph plus local
/// indices of `u` and `v`.
fn pair_component(g: &Graph, u: usize, v: usize) -> (Graph, usize, usize) {
    let (sub, verts) = g.component_subgraph(g.component_of(u));
    let lu = verts.binary_search(&u).expect("vertex in its component");
    let lv = verts.binary_search(&v).expect("vertex in its component");
    (sub, lu, lv)
}

fn diff_form<T: Scalar>(m: &SymMatrix<T>, u: usize, v: usize) -> T {
    m.get(u, u) + m.get(v, v) - (m.get(u, v) + m.get(u, v))
}

/// `R_uv = M_uu + M_vv - 2 M_uv` with `M = (L + J/n_c)^-1`.
pub fn effective_resistance<T: Scalar>(g: &Graph, u: usize, v: usize) -> Result<T> {
    check_pair(g, u, v)?;
    if u == v {
        return Ok(T::zero());
    }
    let (sub, lu, lv) = pair_component(g, u, v);
    let m = connected_regularized_inverse::<T>(&sub)?;
    Ok(diff_form(&m, lu, lv))
}

/// Effective resistance through the normalised Laplacian:
/// `x^T L_hat^+ x` with `x = 1_u / sqrt(d_u) - 1_v / sqrt(d_v)`.
pub fn effective_resistance_normalized<T: Scalar>(g: &Graph, u: usize, v: usize) -> Result<T> {
    check_pair(g, u, v)?;
    if u == v {
        return Ok(T::zero());
    }
    let (sub, lu, lv) = pair_component(g, u, v);
    let eig = sub.normalized_laplacian::<T>().eigh();
    // connected component: exactly one zero eigenvalue, the first
    let pinv = {
        let n = sub.n();
        SymMatrix::from_upper(n, |i, j| {
            (1..n).fold(T::zero(), |acc, k| acc + eig.vectors[(i, k)] * eig.vectors[(j, k)] / eig.values[k])
        })
    };
    let mut x = vec![T::zero(); sub.n()];
    x[lu] = T::one() / T::from_usize_lossy(sub.degree(lu)).sqrt();
    x[lv] = -T::one() / T::from_usize_lossy(sub.degree(lv)).sqrt();
    Ok(pinv.quadratic_form(&x))
}

/// Squared biharmonic distance `||M (1_u - 1_v)||^2`.
pub fn biharmonic_distance_sq<T: Scalar>(g: &Graph, u: usize, v: usize) -> Result<T> {
    check_pair(g, u, v)?;
    if u == v {
        return Ok(T::zero());
    }
    let (sub, lu, lv) = pair_component(g, u, v);
    let m = connected_regularized_inverse::<T>(&sub)?;
    let w: Vec<T> = (0..sub.n()).map(|i| m.get(i, lu) - m.get(i, lv)).collect();
    Ok(w.iter().map(|&x| x * x).sum())
}

/// Sum of effective resistances over all pairs in the same component,
/// `sum_c (n_c tr M_c - n_c)`.
pub fn total_resistance<T: Scalar>(g: &Graph) -> Result<T> {
    let mut total = T::zero();
    for c in 0..g.component_count() {
        let (sub, _) = g.component_subgraph(c);
        let nc = T::from_usize_lossy(sub.n());
        let m = connected_regularized_inverse::<T>(&sub)?;
        total = total + nc * m.trace() - nc;
    }
    Ok(total)
}

/// `n_c * sum_{i >= 2} 1 / sigma_i` summed over components, from the
/// Laplacian spectrum of each component.
pub fn total_resistance_spectral<T: Scalar>(g: &Graph) -> T {
    (0..g.component_count())
        .map(|c| {
            let (sub, _) = g.component_subgraph(c);
            let sigma = sub.laplacian::<T>().eigh().values;
            let inv: T = sigma.iter().skip(1).map(|&s| T::one() / s).sum();
            T::from_usize_lossy(sub.n()) * inv
        })
        .sum()
}

/// Outcome of the truncated power series for `R_uv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEstimate<T> {
    pub value: T,
    /// Guaranteed bound on `|R_uv - value|`.
    pub tail_bound: T,
    /// Number of terms summed (powers `0..terms`).
    pub terms: usize,
}

/// `R_uv` as the partial sum over `i` of
/// `(A_hat^i)_uu / d_u + (A_hat^i)_vv / d_v - 2 (A_hat^i)_uv / sqrt(d_u d_v)`.
///
/// Stops once `2 mu^{i+1} / (d_min (1 - mu)) < tol`, with `mu` the
/// component's `max(|mu_2|, |mu_n|)`. Powers are applied as repeated sparse
/// mat-vecs against `1_u` and `1_v`.
pub fn resistance_series_truncated<T: Scalar>(g: &Graph, u: usize, v: usize, tol: T) -> Result<SeriesEstimate<T>> {
    check_pair(g, u, v)?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("series tolerance must be positive, got {tol}")));
    }
    if u == v {
        return Err(Error::InvalidPair { u, v, reason: "series needs distinct vertices" });
    }
    let (sub, lu, lv) = pair_component(g, u, v);
    if sub.is_bipartite()[0] {
        return Err(Error::Bipartite("the adjacency power series diverges (mu_n = -1)"));
    }
    let mu = Spectrum::<T>::of(&sub).mu_bound().expect("component has at least two vertices");
    let du = T::from_usize_lossy(sub.degree(lu));
    let dv = T::from_usize_lossy(sub.degree(lv));
    let dmin = du.min(dv);
    let cross = T::lit(2.0) / (du * dv).sqrt();
    let two = T::lit(2.0);

    let mut xu = vec![T::zero(); sub.n()];
    let mut xv = vec![T::zero(); sub.n()];
    xu[lu] = T::one();
    xv[lv] = T::one();
    let inv_sqrt = sub.inv_sqrt_degrees::<T>();

    let mut sum = T::zero();
    let mut mu_pow = mu; // mu^{i+1}
    for i in 0..SERIES_ITERATION_CAP {
        sum = sum + xu[lu] / du + xv[lv] / dv - cross * xv[lu];
        let tail = two * mu_pow / (dmin * (T::one() - mu));
        if tail < tol {
            return Ok(SeriesEstimate { value: sum, tail_bound: tail, terms: i + 1 });
        }
        xu = normalized_adjacency_apply(&sub, &inv_sqrt, &xu);
        xv = normalized_adjacency_apply(&sub, &inv_sqrt, &xv);
        mu_pow = mu_pow * mu;
    }
    Err(Error::SeriesCap { iterations: SERIES_ITERATION_CAP })
}

/// `A_hat x` using adjacency lists.
pub(crate) fn normalized_adjacency_apply<T: Scalar>(g: &Graph, inv_sqrt: &[T], x: &[T]) -> Vec<T> {
    (0..g.n())
        .map(|a| {
            let s = g.neighbors(a).iter().fold(T::zero(), |acc, &b| acc + inv_sqrt[b] * x[b]);
            inv_sqrt[a] * s
        })
        .collect()
}

/// `sigma_2` of a connected graph.
pub fn spectral_gap<T: Scalar>(g: &Graph) -> Result<T> {
    require_connected(g)?;
    if g.n() < 2 {
        return Err(Error::InvalidParameter("spectral gap needs at least two vertices".into()));
    }
    Ok(g.laplacian::<T>().eigh().values[1])
}

/// `max(|mu_2|, |mu_n|)` of the normalised adjacency.
pub fn mu_bound<T: Scalar>(g: &Graph) -> Result<T> {
    Spectrum::<T>::of(g)
        .mu_bound()
        .ok_or_else(|| Error::InvalidParameter("mu bound needs at least two vertices".into()))
}

/// Largest effective resistance over all vertex pairs of a connected graph.
pub fn rmax<T: Scalar>(g: &Graph) -> Result<T> {
    require_connected(g)?;
    let m = connected_regularized_inverse::<T>(g)?;
    let n = g.n();
    let mut best = T::zero();
    for u in 0..n {
        for v in u + 1..n {
            best = best.max(diff_form(&m, u, v));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn regularized_inverse_of_k2() {
        let m = regularized_inverse::<f64>(&Graph::complete(2)).unwrap();
        assert!(close(m.get(0, 0), 0.75, 1e-15));
        assert!(close(m.get(0, 1), 0.25, 1e-15));
        let p = laplacian_pseudoinverse::<f64>(&Graph::complete(2));
        assert!(close(p.get(0, 0), 0.25, 1e-15));
        assert!(close(p.get(1, 0), -0.25, 1e-15));
    }

    #[test]
    fn regularized_inverse_is_inverse() {
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]).unwrap();
        let m = regularized_inverse::<f64>(&g).unwrap();
        let l = g.laplacian::<f64>();
        let shifted = SymMatrix::from_upper(6, |i, j| l.get(i, j) + 1.0 / 6.0);
        let prod = m.as_dense().matmul(shifted.as_dense());
        assert!(prod.max_abs_diff(&DenseMatrix::identity(6)) < 1e-12);
    }

    #[test]
    fn block_diagonal_for_disconnected() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let m = regularized_inverse::<f64>(&g).unwrap();
        assert_eq!(m.get(0, 2), 0.0);
        assert!(close(m.get(2, 2), 0.75, 1e-15));
    }

    #[test]
    fn path_endpoint_resistance_is_length() {
        let g = Graph::path(7);
        assert!(close(effective_resistance::<f64>(&g, 0, 6).unwrap(), 6.0, 1e-12));
        assert!(close(effective_resistance_normalized::<f64>(&g, 0, 6).unwrap(), 6.0, 1e-10));
        assert!(close(rmax::<f64>(&g).unwrap(), 6.0, 1e-12));
    }

    #[test]
    fn parallel_paths() {
        // u = 0, v = 1; path 0-2-1 (length 2), path 0-3-4-5-6-1 (length 5)
        let g = Graph::new(7, [(0, 2), (2, 1), (0, 3), (3, 4), (4, 5), (5, 6), (6, 1)]).unwrap();
        let expect = 1.0 / (1.0 / 2.0 + 1.0 / 5.0);
        assert!(close(effective_resistance::<f64>(&g, 0, 1).unwrap(), expect, 1e-12));
        assert!(close(expect, 10.0 / 7.0, 1e-15));
    }

    #[test]
    fn cross_component_is_error() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(effective_resistance::<f64>(&g, 0, 3), Err(Error::DifferentComponents { u: 0, v: 3 }));
        assert!(biharmonic_distance_sq::<f64>(&g, 1, 2).is_err());
        assert!(effective_resistance_normalized::<f64>(&g, 1, 2).is_err());
    }

    #[test]
    fn biharmonic_examples() {
        let k2 = Graph::complete(2);
        assert!(close(biharmonic_distance_sq::<f64>(&k2, 0, 1).unwrap(), 0.5, 1e-15));
        assert_eq!(biharmonic_distance_sq::<f64>(&k2, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn total_resistance_examples() {
        assert!(close(total_resistance::<f64>(&Graph::path(5)).unwrap(), 20.0, 1e-12));
        assert!(close(total_resistance::<f64>(&Graph::complete(2)).unwrap(), 1.0, 1e-15));
        let two_k2 = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(close(total_resistance::<f64>(&two_k2).unwrap(), 2.0, 1e-14));
        let isolated = Graph::new(3, [(0, 1)]).unwrap();
        assert!(close(total_resistance::<f64>(&isolated).unwrap(), 1.0, 1e-14));
        assert!(close(total_resistance_spectral::<f64>(&Graph::path(5)), 20.0, 1e-10));
    }

    #[test]
    fn series_on_triangle() {
        let est = resistance_series_truncated::<f64>(&Graph::complete(3), 0, 1, 1e-6).unwrap();
        assert!(close(est.value, 2.0 / 3.0, 1e-6));
        assert!(est.tail_bound < 1e-6);
    }

    #[test]
    fn series_rejects_bipartite_and_bad_input() {
        let c4 = Graph::cycle(4);
        assert!(matches!(resistance_series_truncated::<f64>(&c4, 0, 1, 1e-6), Err(Error::Bipartite(_))));
        let k3 = Graph::complete(3);
        assert!(resistance_series_truncated::<f64>(&k3, 0, 0, 1e-6).is_err());
        assert!(resistance_series_truncated::<f64>(&k3, 0, 1, 0.0).is_err());
    }

    #[test]
    fn spectral_gap_examples() {
        assert!(close(spectral_gap::<f64>(&Graph::complete(2)).unwrap(), 2.0, 1e-14));
        assert!(close(spectral_gap::<f64>(&Graph::complete(5)).unwrap(), 5.0, 1e-12));
        assert!(close(mu_bound::<f64>(&Graph::cycle(4)).unwrap(), 1.0, 1e-12));
        let two_k2 = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(spectral_gap::<f64>(&two_k2), Err(Error::Disconnected { components: 2 })));
        assert!(rmax::<f64>(&two_k2).is_err());
    }

    #[test]
    fn rmax_sandwich_on_k2() {
        let g = Graph::complete(2);
        let r = rmax::<f64>(&g).unwrap();
        let s2 = spectral_gap::<f64>(&g).unwrap();
        assert!(close(r, 1.0, 1e-15));
        assert!(1.0 / (2.0 * s2) <= r && r <= 2.0 / s2);
    }

    #[test]
    fn spectrum_invariants_on_star() {
        let g = Graph::star(4);
        let s = Spectrum::<f64>::of(&g);
        assert!(s.sigma[0].abs() < 1e-12);
        let two_m = 2.0 * g.m() as f64;
        let z1 = s.z.column(0);
        let sign = z1[0].signum();
        for v in 0..g.n() {
            assert!(close(sign * z1[v], (g.degree(v) as f64 / two_m).sqrt(), 1e-10));
        }
        for (l, m) in s.lambda.iter().zip(&s.mu) {
            assert!(close(*m, 1.0 - l, 1e-15));
        }
        // star is bipartite, so the smallest mu is -1
        assert!(close(*s.mu.last().unwrap(), -1.0, 1e-10));
    }
}
