//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export has a plain-Rust twin returning `Result<_, String>`, which is
//! what the native tests call.

use gvlab_core::arith::CoefficientSequence;
use gvlab_core::mellin::{eval_mellin, find_zeros, ComplexBox, MellinFunction};
use gvlab_core::real::parse_rational;
use gvlab_core::volterra::{solve, SolveOptions, VolterraProblem};
use gvlab_core::weights::WeightFunction;
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

/// Horizon cap, to keep the page responsive.
pub const MAX_HORIZON: u32 = 50_000;
pub const MAX_STEPS: u32 = 5_000;

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn weight(id: &str) -> Result<WeightFunction, String> {
    id.parse().map_err(text)
}

/// `n^exponent a(n)` for `n = 1..=N`, where `A_g(n) = n^{-β}`.
pub fn scaled_solution(
    weight_id: &str,
    beta: &str,
    n: u32,
    exponent: f64,
) -> Result<Vec<f64>, String> {
    if n == 0 || n > MAX_HORIZON {
        return Err(format!("N must lie in 1..={MAX_HORIZON}"));
    }
    let prob = VolterraProblem::canonical(
        weight(weight_id)?,
        parse_rational(beta).map_err(text)?,
        u64::from(n),
    )
    .map_err(text)?;
    let sol = solve(&prob, &SolveOptions::f64()).map_err(text)?;
    Ok(sol
        .a_f64()
        .iter()
        .enumerate()
        .map(|(i, a)| ((i + 1) as f64).powf(exponent) * a)
        .collect())
}

/// `|g*(re + i t)|` for `steps` values of `t` spread over `[0, im_max]`.
pub fn transform_on_line(
    weight_id: &str,
    re: f64,
    im_max: f64,
    steps: u32,
) -> Result<Vec<f64>, String> {
    if !(2..=MAX_STEPS).contains(&steps) {
        return Err(format!("steps must lie in 2..={MAX_STEPS}"));
    }
    let m = MellinFunction::for_weight(&weight(weight_id)?);
    (0..steps)
        .map(|k| {
            let t = im_max * f64::from(k) / f64::from(steps - 1);
            eval_mellin(&m, Complex64::new(re, t), 1e-8)
                .map(|v| v.norm())
                .map_err(text)
        })
        .collect()
}

/// Zeros of `g*` for `g = Φ_u` in a box, flattened as `[re0, im0, re1, im1, ...]`.
pub fn zeros_in_box(
    sequence_id: &str,
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
) -> Result<Vec<f64>, String> {
    let u: CoefficientSequence = sequence_id.parse().map_err(text)?;
    let bx = ComplexBox::new(re0, re1, im0, im1).map_err(text)?;
    let scan = find_zeros(&MellinFunction::bhf(u), &bx, 1e-10).map_err(text)?;
    Ok(scan
        .zeros
        .iter()
        .flat_map(|z| [z.location.re, z.location.im])
        .collect())
}

#[wasm_bindgen(js_name = solveScaled)]
pub fn solve_scaled(
    weight_id: &str,
    beta: &str,
    n: u32,
    exponent: f64,
) -> Result<Vec<f64>, JsError> {
    scaled_solution(weight_id, beta, n, exponent).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = mellinLine)]
pub fn mellin_line(weight_id: &str, re: f64, im_max: f64, steps: u32) -> Result<Vec<f64>, JsError> {
    transform_on_line(weight_id, re, im_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = mellinZeros)]
pub fn mellin_zeros(
    sequence_id: &str,
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
) -> Result<Vec<f64>, JsError> {
    zeros_in_box(sequence_id, re0, re1, im0, im1).map_err(|e| JsError::new(&e))
}
