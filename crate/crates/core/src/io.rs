//! Text formats: plan JSON, typed edge lists, curve/spectrum/matrix CSV.
//!
//! Reals are written with 17 significant digits so that every `f64`
//! round-trips exactly.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::graph::Graph;
use crate::linalg::SymMatrix;
use crate::rewiring::RewirePlan;
use crate::scalar::Scalar;
use crate::spectral::Spectrum;

/// `%.17g`-style formatting: 17 significant digits, trailing zeros trimmed,
/// exponent form outside `[1e-4, 1e17)`.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        return format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Serialises a float as a raw JSON number with [`fmt_g17`]; non-finite
/// values become `null`.
pub fn serialize_g17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        RawValue::from_string(fmt_g17(*x)).map_err(serde::ser::Error::custom)?.serialize(s)
    } else {
        s.serialize_none()
    }
}

pub fn serialize_g17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_g17(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanEdgeJson {
    pub u: usize,
    pub v: usize,
    #[serde(serialize_with = "serialize_g17")]
    pub delta: f64,
    #[serde(serialize_with = "serialize_g17")]
    pub rtot_after: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanJson {
    pub input: String,
    pub method: String,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub edges: Vec<PlanEdgeJson>,
    #[serde(serialize_with = "serialize_g17")]
    pub rtot_initial: f64,
}

impl PlanJson {
    pub fn from_plan<T: Scalar>(input: &str, plan: &RewirePlan<T>) -> Self {
        Self {
            input: input.to_string(),
            method: plan.method.name().to_string(),
            k: plan.requested,
            seed: plan.seed,
            edges: plan
                .added
                .iter()
                .zip(&plan.rtot_trajectory[1..])
                .map(|(s, &after)| PlanEdgeJson { u: s.u, v: s.v, delta: s.delta.as_f64(), rtot_after: after.as_f64() })
                .collect(),
            rtot_initial: plan.rtot_initial().as_f64(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialises")
    }
}

/// Edge list of the rewired graph: `n=` header, original edges tagged `0`,
/// then added edges tagged `1` in insertion order.
pub fn rewired_edge_list<T: Scalar>(original: &Graph, plan: &RewirePlan<T>) -> String {
    let mut out = format!("n={}\n", original.n());
    for &(u, v) in original.edges() {
        out.push_str(&format!("{u} {v} 0\n"));
    }
    for s in &plan.added {
        out.push_str(&format!("{} {} 1\n", s.u, s.v));
    }
    out
}

pub fn curve_csv<T: Scalar>(curve: &[(usize, T)]) -> String {
    let mut out = String::from("edges_added,rtot\n");
    for &(i, r) in curve {
        out.push_str(&format!("{i},{}\n", fmt_g17(r.as_f64())));
    }
    out
}

pub fn mean_curve_csv<T: Scalar>(curve: &[(usize, T, usize)]) -> String {
    let mut out = String::from("edges_added,mean_rtot,graph_count\n");
    for &(i, r, c) in curve {
        out.push_str(&format!("{i},{},{c}\n", fmt_g17(r.as_f64())));
    }
    out
}

pub fn spectrum_csv<T: Scalar>(s: &Spectrum<T>) -> String {
    let mut out = String::from("index,sigma,lambda,mu\n");
    for i in 0..s.sigma.len() {
        out.push_str(&format!(
            "{i},{},{},{}\n",
            fmt_g17(s.sigma[i].as_f64()),
            fmt_g17(s.lambda[i].as_f64()),
            fmt_g17(s.mu[i].as_f64())
        ));
    }
    out
}

/// Dense row-major CSV, no header.
pub fn matrix_csv<T: Scalar>(m: &SymMatrix<T>) -> String {
    let mut out = String::new();
    for i in 0..m.order() {
        let row: Vec<String> = m.row(i).iter().map(|x| fmt_g17(x.as_f64())).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewiring::gtr;
    use proptest::prelude::*;

    #[test]
    fn g17_examples() {
        assert_eq!(fmt_g17(20.0), "20");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(90.0 / 11.0), "8.1818181818181817");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(0.0), "0");
    }

    proptest! {
        #[test]
        fn g17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn plan_json_shape() {
        let plan = gtr::<f64>(&Graph::path(5), 1).unwrap();
        let json = PlanJson::from_plan("p5.el", &plan).to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["method"], "gtr");
        assert_eq!(v["k"], 1);
        assert!(v.get("seed").is_none());
        assert_eq!(v["edges"][0]["u"], 0);
        assert_eq!(v["edges"][0]["v"], 4);
        assert!((v["rtot_initial"].as_f64().unwrap() - 20.0).abs() < 1e-12);
        assert!((v["edges"][0]["rtot_after"].as_f64().unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn typed_edge_list_round_trips() {
        let g = Graph::path(5);
        let plan = gtr::<f64>(&g, 2).unwrap();
        let text = rewired_edge_list(&g, &plan);
        assert!(text.ends_with("0 4 1\n0 2 1\n"));
        let back = Graph::from_edge_list(&text).unwrap();
        assert_eq!(back, g.with_edges(plan.edges()).unwrap());
    }

    #[test]
    fn csv_headers() {
        assert!(curve_csv(&[(0, 20.0f64)]).starts_with("edges_added,rtot\n0,20\n"));
        assert!(mean_curve_csv(&[(0, 2.0f64, 3)]).starts_with("edges_added,mean_rtot,graph_count\n0,2,3\n"));
        let s = Spectrum::<f64>::of(&Graph::complete(2));
        assert!(spectrum_csv(&s).starts_with("index,sigma,lambda,mu\n"));
        let m = SymMatrix::from_upper(2, |i, j| (i + j) as f64 / 4.0);
        assert_eq!(matrix_csv(&m), "0,0.25\n0.25,0.5\n");
    }
}
