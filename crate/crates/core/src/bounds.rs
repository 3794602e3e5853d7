//! Closed-form upper bounds on message-passing Jacobians in terms of
//! normalised-adjacency powers, effective resistance, total resistance and
//! the spectral gap.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::spectral::{
    check_pair, effective_resistance, normalized_adjacency_apply, require_connected, spectral_gap, total_resistance,
    Spectrum,
};

/// Lipschitz constants, depth and spectral/degree parameters of a bound.
///
/// `mu`, `d_min` and `d_max` are derived from the graph when left `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams<T> {
    pub alpha: T,
    pub beta: T,
    pub r: usize,
    pub mu: Option<T>,
    pub d_min: Option<usize>,
    pub d_max: Option<usize>,
}

impl<T: Scalar> BoundParams<T> {
    pub fn new(alpha: T, beta: T, r: usize) -> Self {
        Self { alpha, beta, r, mu: None, d_min: None, d_max: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta >= T::one()) {
            return Err(Error::InvalidParameter(format!("beta must be at least 1, got {}", self.beta)));
        }
        if let Some(mu) = self.mu {
            if !(mu >= T::zero() && mu < T::one()) {
                return Err(Error::InvalidParameter(format!("mu must lie in [0, 1), got {mu}")));
            }
        }
        for d in [self.d_min, self.d_max].into_iter().flatten() {
            if d == 0 {
                return Err(Error::InvalidParameter("degree bounds must be positive".into()));
            }
        }
        Ok(())
    }

    /// `(2 alpha beta)^r`.
    pub fn depth_factor(&self) -> T {
        let base = T::lit(2.0) * self.alpha * self.beta;
        (0..self.r).fold(T::one(), |acc, _| acc * base)
    }
}

/// `(2 alpha beta)^r sum_{l=0}^{r} (A_hat^l)_uv`, by repeated sparse
/// mat-vecs against `1_v`.
pub fn jacobian_bound_adjacency<T: Scalar>(g: &Graph, u: usize, v: usize, p: &BoundParams<T>) -> Result<T> {
    p.validate()?;
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    Ok(p.depth_factor() * adjacency_power_sum(g, u, v, p.r))
}

/// `sum_{l=0}^{r} (A_hat^l)_uv`.
pub fn adjacency_power_sum<T: Scalar>(g: &Graph, u: usize, v: usize, r: usize) -> T {
    let inv_sqrt = g.inv_sqrt_degrees::<T>();
    let mut x = vec![T::zero(); g.n()];
    x[v] = T::one();
    let mut sum = x[u];
    for _ in 0..r {
        x = normalized_adjacency_apply(g, &inv_sqrt, &x);
        sum = sum + x[u];
    }
    sum
}

/// `r + 1 + mu^{r+1} / (1 - mu)`.
fn walk_term<T: Scalar>(r: usize, mu: T) -> T {
    let mu_pow = (0..=r).fold(T::one(), |acc, _| acc * mu);
    T::from_usize_lossy(r + 1) + mu_pow / (T::one() - mu)
}

fn resolve_mu<T: Scalar>(p: &BoundParams<T>, g: &Graph) -> Result<T> {
    let mu = match p.mu {
        Some(mu) => mu,
        None => Spectrum::<T>::of(g).mu_bound().expect("non-bipartite graphs have >= 3 vertices"),
    };
    if mu >= T::one() {
        return Err(Error::Bipartite("spectral bound mu reached 1"));
    }
    Ok(mu)
}

/// `(2 alpha beta)^r (d_max / 2) ((2 / d_min)(r + 1 + mu^{r+1} / (1 - mu)) - R_uv)`.
///
/// Degree bounds default to the degrees of `u` and `v`; `mu` defaults to
/// `max(|mu_2|, |mu_n|)` of their component. The raw value is returned even
/// when negative.
pub fn jacobian_bound_resistance<T: Scalar>(g: &Graph, u: usize, v: usize, p: &BoundParams<T>) -> Result<T> {
    p.validate()?;
    check_pair(g, u, v)?;
    let (sub, _) = g.component_subgraph(g.component_of(u));
    if sub.is_bipartite()[0] {
        return Err(Error::Bipartite("resistance bounds need a non-bipartite component"));
    }
    let mu = resolve_mu(p, &sub)?;
    let (du, dv) = (g.degree(u), g.degree(v));
    let d_min = T::from_usize_lossy(p.d_min.unwrap_or(du.min(dv)));
    let d_max = T::from_usize_lossy(p.d_max.unwrap_or(du.max(dv)));
    let r_uv = effective_resistance::<T>(g, u, v)?;
    let two = T::lit(2.0);
    Ok(p.depth_factor() * (d_max / two) * (two / d_min * walk_term(p.r, mu) - r_uv))
}

fn graph_bound<T: Scalar>(g: &Graph, p: &BoundParams<T>, subtracted: T, mu: T) -> T {
    let n = T::from_usize_lossy(g.n());
    let d_min = T::from_usize_lossy(p.d_min.unwrap_or(g.min_degree()));
    let d_max = T::from_usize_lossy(p.d_max.unwrap_or(g.max_degree()));
    p.depth_factor() * (d_max / T::lit(2.0)) * (n * (n - T::one()) / d_min * walk_term(p.r, mu) - subtracted)
}

fn check_whole_graph<T: Scalar>(g: &Graph, p: &BoundParams<T>) -> Result<T> {
    p.validate()?;
    require_connected(g)?;
    if g.is_bipartite().first().copied().unwrap_or(true) {
        return Err(Error::Bipartite("graph-level bounds need a non-bipartite graph"));
    }
    resolve_mu(p, g)
}

/// `(2 alpha beta)^r (d_max / 2) ((n (n - 1) / d_min)(r + 1 + mu^{r+1} / (1 - mu)) - R_tot)`
/// with global degree extremes.
pub fn total_jacobian_bound<T: Scalar>(g: &Graph, p: &BoundParams<T>) -> Result<T> {
    let mu = check_whole_graph(g, p)?;
    Ok(graph_bound(g, p, total_resistance::<T>(g)?, mu))
}

/// The total bound with `R_tot` replaced by `1 / (n sigma_2)`.
pub fn spectral_gap_jacobian_bound<T: Scalar>(g: &Graph, p: &BoundParams<T>) -> Result<T> {
    let mu = check_whole_graph(g, p)?;
    let sigma2 = spectral_gap::<T>(g)?;
    let n = T::from_usize_lossy(g.n());
    Ok(graph_bound(g, p, T::one() / (n * sigma2), mu))
}
