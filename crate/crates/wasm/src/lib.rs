//! Browser-facing wrappers: thin JSON shims over the core library so a
//! static page can call it.  Results come back as JSON strings; numbers
//! that can exceed an f64 (the exact ball sizes) are sent as strings and
//! on a log scale.
//!
//! The [`api`] module is plain Rust and builds (and is tested) on any
//! target; the `#[wasm_bindgen]` exports wrap it on wasm32 only.

pub mod api {
    use num_traits::ToPrimitive;

    use permrd::ball::{
        chebyshev_ball_exact, chebyshev_ball_lower, chebyshev_ball_upper_bregman,
        kendall_ball_exact, kendall_ball_lower_quarter, kendall_ball_upper_binom,
    };
    use permrd::bounds::{bound_set, Basis, DistortionQuery};
    use permrd::codes::{covering_radius, BlockStructure, CoveringCode};
    use permrd::numutil::{lg_biguint, lg_ratio};
    use permrd::perm::Metric;
    use permrd::{Error, Result};

    /// Distance between two permutations in one-line `[a,b,c]` form.
    pub fn distance(metric: &str, p: &str, q: &str) -> Result<u64> {
        let metric: Metric = metric.parse()?;
        let p: permrd::Permutation = p.parse()?;
        let q: permrd::Permutation = q.parse()?;
        metric.distance(&p, &q)
    }

    /// Ball volumes for every radius: JSON rows of
    /// `{r, exact (string), lg_exact, lg_lower, lg_upper}`; the bound
    /// fields are null outside their derivation window.
    pub fn ball_table(metric: &str, n: usize) -> Result<String> {
        let metric: Metric = metric.parse()?;
        if n < 2 || n > 80 {
            return Err(Error::Domain("need 2 <= n <= 80".into()));
        }
        let mut rows = Vec::new();
        for r in 0..=metric.diameter(n) {
            let (exact, lg_lower, lg_upper) = match metric {
                Metric::Kendall => {
                    let exact = kendall_ball_exact(n, r);
                    let in_window = r >= 1 && r < n as u64;
                    (
                        exact,
                        in_window
                            .then(|| lg_ratio(&kendall_ball_lower_quarter(n, r).unwrap())),
                        in_window.then(|| lg_biguint(&kendall_ball_upper_binom(n, r))),
                    )
                }
                Metric::Chebyshev => {
                    let exact = chebyshev_ball_exact(n, r)?;
                    (
                        exact,
                        Some(lg_ratio(&chebyshev_ball_lower(n, r))),
                        Some(chebyshev_ball_upper_bregman(n, r).lg()),
                    )
                }
            };
            rows.push(serde_json::json!({
                "r": r,
                "exact": exact.to_string(),
                "lg_exact": lg_biguint(&exact),
                "lg_lower": lg_lower,
                "lg_upper": lg_upper,
            }));
        }
        Ok(serde_json::Value::Array(rows).to_string())
    }

    /// Certified rate window on the optimal cover size at every
    /// distortion: JSON rows of
    /// `{d, delta, lower_rate, upper_rate, lower_tag, upper_tag}`.
    pub fn rate_window(metric: &str, n: usize, basis: &str) -> Result<String> {
        let metric: Metric = metric.parse()?;
        let basis: Basis = basis.parse()?;
        if n < 2 || n > 30 {
            return Err(Error::Domain("need 2 <= n <= 30".into()));
        }
        let mut rows = Vec::new();
        for d in 1..=metric.diameter(n) {
            let q = DistortionQuery::new(metric, n, d)?;
            let set = bound_set(&q, basis)?;
            rows.push(serde_json::json!({
                "d": d,
                "delta": d as f64 / n as f64,
                "lower_rate": set.lower_rate.rate,
                "upper_rate": set.upper_rate.rate,
                "lower_tag": set.lower_tag,
                "upper_tag": set.upper_tag,
            }));
        }
        Ok(serde_json::Value::Array(rows).to_string())
    }

    /// The block construction at `(n, d)`: JSON
    /// `{size (string), lg_size, radius, words}`; the codeword list and
    /// the brute-force radius are included at desk scale only.
    pub fn construction(n: usize, d: u64) -> Result<String> {
        if n < 2 || n > 120 {
            return Err(Error::Domain("need 2 <= n <= 120".into()));
        }
        let bs = BlockStructure::new(n, d)?;
        let code = CoveringCode::from_blocks(bs);
        let size = code.size();
        let words: Option<Vec<String>> = (size.to_u64().is_some_and(|s| s <= 720))
            .then(|| code.iter().map(|w| w.to_string()).collect());
        let radius = if n <= 7 { Some(covering_radius(&code)?) } else { None };
        Ok(serde_json::json!({
            "size": size.to_string(),
            "lg_size": lg_biguint(&size),
            "radius": radius,
            "words": words,
        })
        .to_string())
    }
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn shim(e: permrd::Error) -> JsError {
        JsError::new(&e.to_string())
    }

    #[wasm_bindgen]
    pub fn distance(metric: &str, p: &str, q: &str) -> Result<u64, JsError> {
        crate::api::distance(metric, p, q).map_err(shim)
    }

    #[wasm_bindgen]
    pub fn ball_table(metric: &str, n: usize) -> Result<String, JsError> {
        crate::api::ball_table(metric, n).map_err(shim)
    }

    #[wasm_bindgen]
    pub fn rate_window(metric: &str, n: usize, basis: &str) -> Result<String, JsError> {
        crate::api::rate_window(metric, n, basis).map_err(shim)
    }

    #[wasm_bindgen]
    pub fn construction(n: usize, d: u64) -> Result<String, JsError> {
        crate::api::construction(n, d).map_err(shim)
    }
}
