//! WebAssembly bindings for the browser demo. Each export has a plain Rust
//! twin returning `Result<_, String>` so it can be tested natively.

use bplab::classgroup::{enumerate_class_group, FundamentalDiscriminant};
use bplab::measures::plancherel_measure;
use wasm_bindgen::prelude::*;

fn cli(args: &[String]) -> Result<String, String> {
    let argv = std::iter::once("bplab".to_string()).chain(args.iter().cloned());
    let out = bplab::cli::run(argv);
    if out.code == 0 {
        Ok(out.stdout)
    } else {
        Err(out.stderr.trim().trim_start_matches("error: ").to_string())
    }
}

/// Reduced forms, characters and `λ_p` for the listed primes, as JSON.
pub fn class_group_info(d: u32, primes: &str) -> Result<String, String> {
    let mut args = vec!["classgroup".into(), "info".into(), "--d".into(), d.to_string()];
    let primes: String = primes.chars().filter(|c| !c.is_whitespace()).collect();
    if !primes.is_empty() {
        args.extend(["--p".into(), primes]);
    }
    cli(&args)
}

/// `U^{l,m}` for the datum `(d, Λ, p)` with its coordinates in the U basis, as JSON.
pub fn sugano_expand(d: u32, char_index: u32, p: u32, l: u32, m: u32) -> Result<String, String> {
    let args: Vec<String> = [
        "sugano", "expand", "--d", &d.to_string(), "--char-index", &char_index.to_string(), "--p", &p.to_string(), "--l",
        &l.to_string(), "--m", &m.to_string(),
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cli(&args)
}

/// Density of `μ_p` on an `n × n` midpoint grid of `[0, π]²`, row-major in
/// `θ₂`, each point folded onto the ordered region.
pub fn plancherel_grid(d: u32, char_index: u32, p: u32, n: u32) -> Result<Vec<f64>, String> {
    if !(2..=400).contains(&n) {
        return Err(format!("grid size must be in 2..=400, got {n}"));
    }
    let g = enumerate_class_group(FundamentalDiscriminant::new(d as u64).map_err(|e| e.to_string())?);
    let chi = g
        .characters()
        .into_iter()
        .nth(char_index as usize)
        .ok_or_else(|| format!("character index {char_index} out of range"))?;
    let mu = plancherel_measure(&g, &chi, p as u64).map_err(|e| e.to_string())?;
    let h = std::f64::consts::PI / n as f64;
    let mut out = Vec::with_capacity((n * n) as usize);
    for j in 0..n {
        for i in 0..n {
            let (a, b) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            out.push(mu.density(a.min(b), a.max(b)).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

#[wasm_bindgen(js_name = classGroupInfo)]
pub fn class_group_info_js(d: u32, primes: &str) -> Result<String, JsError> {
    class_group_info(d, primes).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = suganoExpand)]
pub fn sugano_expand_js(d: u32, char_index: u32, p: u32, l: u32, m: u32) -> Result<String, JsError> {
    sugano_expand(d, char_index, p, l, m).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = plancherelGrid)]
pub fn plancherel_grid_js(d: u32, char_index: u32, p: u32, n: u32) -> Result<Vec<f64>, JsError> {
    plancherel_grid(d, char_index, p, n).map_err(|e| JsError::new(&e))
}
