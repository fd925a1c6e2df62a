//! Browser bindings for the jet expansion engine: expand, compare, and
//! sample Taylor approximation curves for plotting. All functions return
//! JSON strings so the page stays framework-free.

use num_rational::BigRational;
use serde_json::json;
use wasm_bindgen::prelude::*;

use taylorjet::expr::parse;
use taylorjet::jet::{push, Jet, PushMethod};
use taylorjet::Scalar;

fn err_json(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn parse_scalars<S: Scalar>(text: &str) -> Result<Vec<S>, String> {
    text.split(',')
        .map(|t| S::parse_literal(t.trim()).map_err(|e| format!("invalid value `{t}`: {e}")))
        .collect()
}

fn build_jet<S: Scalar>(point: &[S], jet: &str, order: usize) -> Result<Jet<S>, String> {
    let d = point.len();
    let mut coeffs = vec![point.to_vec()];
    let mut dirs: Vec<Vec<S>> = Vec::new();
    if jet.trim().is_empty() {
        if order >= 1 {
            dirs.push(vec![S::one(); d]);
        }
    } else {
        let groups: Vec<&str> = jet.split(';').collect();
        if groups.len() == 1 && d == 1 && groups[0].contains(',') {
            for v in parse_scalars::<S>(groups[0])? {
                dirs.push(vec![v]);
            }
        } else {
            for g in groups {
                let vals = parse_scalars::<S>(g)?;
                if vals.len() != d {
                    return Err(format!(
                        "direction `{g}` has {} components, expected {d}",
                        vals.len()
                    ));
                }
                dirs.push(vals);
            }
        }
        if dirs.len() > order {
            return Err(format!("{} directions given for order {order}", dirs.len()));
        }
    }
    dirs.resize(order, vec![S::zero(); d]);
    coeffs.extend(dirs);
    Ok(Jet::new(order, d, coeffs))
}

fn coeff_strings<S: Scalar>(j: &Jet<S>) -> Vec<Vec<String>> {
    j.coeffs()
        .iter()
        .map(|c| c.iter().map(|v| v.to_string()).collect())
        .collect()
}

fn expand_impl<S: Scalar>(
    expr: &str,
    point: &str,
    jet: &str,
    order: usize,
    method: PushMethod,
) -> Result<serde_json::Value, String> {
    let point = parse_scalars::<S>(point)?;
    let f = parse::<S>(expr)
        .map_err(|e| e.to_string())?
        .with_arity(point.len())
        .map_err(|_| "expression uses more variables than point values".to_string())?;
    if S::EXACT && method != PushMethod::Operational && !f.is_polynomial() {
        return Err("symbolic methods over rationals need a polynomial expression".into());
    }
    let j = build_jet(&point, jet, order)?;
    let pushed = push(&f, &j, method).map_err(|e| e.to_string())?;
    Ok(json!({
        "order": order,
        "method": method.name(),
        "coeffs": coeff_strings(&pushed),
    }))
}

/// Taylor-expand `expr` at `point` with the given direction jet.
/// `scalar` is `"rational"` or `"f64"`.
#[wasm_bindgen]
pub fn expand_json(
    expr: &str,
    point: &str,
    jet: &str,
    order: usize,
    method: &str,
    scalar: &str,
) -> String {
    let Some(method) = PushMethod::parse(method) else {
        return err_json(format!("unknown method `{method}`"));
    };
    let result = match scalar {
        "rational" => expand_impl::<BigRational>(expr, point, jet, order, method),
        "f64" => expand_impl::<f64>(expr, point, jet, order, method),
        other => Err(format!("unknown scalar kind `{other}`")),
    };
    match result {
        Ok(doc) => doc.to_string(),
        Err(e) => err_json(e),
    }
}

/// Run all five methods over exact rationals and report agreement; the
/// unweighted `bis` variant is informational.
#[wasm_bindgen]
pub fn compare_json(expr: &str, point: &str, jet: &str, order: usize) -> String {
    let inner = || -> Result<serde_json::Value, String> {
        let point = parse_scalars::<BigRational>(point)?;
        let f = parse::<BigRational>(expr)
            .map_err(|e| e.to_string())?
            .with_arity(point.len())
            .map_err(|_| "expression uses more variables than point values".to_string())?;
        if !f.is_polynomial() {
            return Err("exact comparison needs a polynomial; switch to the f64 scalar".into());
        }
        let j = build_jet(&point, jet, order)?;
        let mut methods = Vec::new();
        let mut reference: Option<Jet<BigRational>> = None;
        let mut agree = true;
        for method in PushMethod::EQUIVALENT {
            let out = push(&f, &j, method).map_err(|e| e.to_string())?;
            if let Some(r) = &reference {
                agree &= *r == out;
            } else {
                reference = Some(out.clone());
            }
            methods.push(json!({"method": method.name(), "coeffs": coeff_strings(&out)}));
        }
        let bis = push(&f, &j, PushMethod::Bis).map_err(|e| e.to_string())?;
        Ok(json!({
            "order": order,
            "agree": agree,
            "methods": methods,
            "bis": {"method": "bis", "informational": true, "coeffs": coeff_strings(&bis)},
        }))
    };
    match inner() {
        Ok(doc) => doc.to_string(),
        Err(e) => err_json(e),
    }
}

/// Sample a one-variable function and its truncated Taylor polynomials
/// around `x0` for every order up to `order`.
#[wasm_bindgen]
pub fn curve_json(
    expr: &str,
    x0: f64,
    order: usize,
    xmin: f64,
    xmax: f64,
    samples: usize,
) -> String {
    let inner = || -> Result<serde_json::Value, String> {
        if samples < 2 || xmin >= xmax {
            return Err("need at least two samples and xmin < xmax".into());
        }
        let f = parse::<f64>(expr)
            .map_err(|e| e.to_string())?
            .with_arity(1)
            .map_err(|_| "the curve view needs a one-variable expression".to_string())?;
        let j = Jet::new(
            order,
            1,
            (0..=order)
                .map(|k| vec![if k == 0 { x0 } else if k == 1 { 1.0 } else { 0.0 }])
                .collect(),
        );
        let pushed = push(&f, &j, PushMethod::Operational).map_err(|e| e.to_string())?;
        let coeffs: Vec<f64> = pushed.coeffs().iter().map(|c| c[0]).collect();

        let xs: Vec<f64> = (0..samples)
            .map(|i| xmin + (xmax - xmin) * i as f64 / (samples - 1) as f64)
            .collect();
        let fx: Vec<Option<f64>> = xs
            .iter()
            .map(|x| match f.eval(&[*x]) {
                Ok(v) if v[0].is_finite() => Some(v[0]),
                _ => None,
            })
            .collect();
        // truncated Taylor polynomials Σ_{k<=m} c_k (x-x0)^k for each m
        let taylor: Vec<Vec<f64>> = (0..=order)
            .map(|m| {
                xs.iter()
                    .map(|x| {
                        let dx = x - x0;
                        let mut acc = 0.0;
                        let mut pow = 1.0;
                        for c in coeffs.iter().take(m + 1) {
                            acc += c * pow;
                            pow *= dx;
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(json!({
            "x0": x0,
            "coeffs": coeffs,
            "xs": xs,
            "f": fx,
            "taylor": taylor,
        }))
    };
    match inner() {
        Ok(doc) => doc.to_string(),
        Err(e) => err_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_json_cubic() {
        let out = expand_json("x0^3", "1", "1,2", 2, "direct", "rational");
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["coeffs"], serde_json::json!([["1"], ["3"], ["9"]]));
    }

    #[test]
    fn compare_json_reports_agreement() {
        let out = compare_json("x0^3", "1", "1,2", 2);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["agree"], true);
        assert_eq!(doc["bis"]["coeffs"][2][0], "12");
    }

    #[test]
    fn curve_json_taylor_values() {
        let out = curve_json("exp(x0)", 0.0, 3, -1.0, 1.0, 21);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        let coeffs = doc["coeffs"].as_array().unwrap();
        assert!((coeffs[2].as_f64().unwrap() - 0.5).abs() < 1e-12);
        // the order-0 curve is constant at exp(0) = 1
        for v in doc["taylor"][0].as_array().unwrap() {
            assert_eq!(v.as_f64().unwrap(), 1.0);
        }
    }

    #[test]
    fn errors_are_json() {
        let out = expand_json("x0 +", "1", "", 1, "direct", "rational");
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(doc["error"].as_str().unwrap().contains("syntax error"));
    }
}
