use std::collections::BTreeMap;

use equiloc::builtins;
use equiloc::localization::{character as char_poly, rr_total};
use equiloc::model::{parse, ManifoldPresentation};
use equiloc::quantize::{main_formula_report, rr_invariant, MainFormulaReport};
use equiloc::witten::{decay_check, TestFunction, WittenCheckReport, WittenOptions};
use equiloc::zrational::LaurentPoly;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::{ExportArgs, Failure, Format, RunArgs, Source, WittenArgs};

/// Parse `5`, `1,2,3`, `0..8` or `0..=8` (ranges are inclusive).
pub fn parse_ms(spec: Option<&str>, default: &[u64]) -> Result<Vec<u64>, Failure> {
    let Some(spec) = spec else {
        return Ok(default.to_vec());
    };
    let bad = || Failure::Input(format!("cannot read m values from `{}`", spec));
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let b = b.trim_start_matches('=');
        let lo: u64 = a.trim().parse().map_err(|_| bad())?;
        let hi: u64 = b.trim().parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
        .collect()
}

/// Load the named builtin(s) or the input document.
pub fn load(source: &Source, allow_all: bool) -> Result<Vec<ManifoldPresentation>, Failure> {
    if let Some(path) = &source.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {}", path.display(), e)))?;
        return Ok(vec![parse(&text)?]);
    }
    let name = source.builtin.as_deref().unwrap_or_default();
    if name == "all" {
        if !allow_all {
            return Err(Failure::Input("`all` is only accepted by verify and export".into()));
        }
        return builtins::NAMES
            .iter()
            .map(|n| Ok(builtins::presentation(n)?))
            .collect();
    }
    Ok(vec![builtins::presentation(name)?])
}

fn single(source: &Source) -> Result<ManifoldPresentation, Failure> {
    Ok(load(source, false)?.remove(0))
}

pub fn rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn integer_json(q: &BigRational) -> Value {
    int_json(&q.to_integer())
}

fn int_json(i: &BigInt) -> Value {
    match i64::try_from(i) {
        Ok(v) => json!(v),
        Err(_) => json!(i.to_string()),
    }
}

pub fn laurent_json(p: &LaurentPoly) -> Value {
    let map: serde_json::Map<String, Value> = p
        .coeffs()
        .iter()
        .map(|(e, c)| (e.to_string(), integer_json(c)))
        .collect();
    Value::Object(map)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

pub fn rr(a: &RunArgs) -> Result<(), Failure> {
    let p = single(&a.source)?;
    let ms = parse_ms(a.m.as_deref(), &[0, 1, 2, 3, 4, 5])?;
    let mut rows = Vec::new();
    for m in ms {
        let inv = rr_invariant(&p, m)?;
        let tot = rr_total(&p, m)?;
        match a.format {
            Format::Text => println!("m={} rr_invariant={} rr_total={}", m, inv, tot),
            Format::Json => rows.push(json!({
                "m": m,
                "rr_invariant": int_json(&inv),
                "rr_total": int_json(&tot),
            })),
        }
    }
    if a.format == Format::Json {
        print_json(&Value::Array(rows));
    }
    Ok(())
}

pub fn character(a: &RunArgs) -> Result<(), Failure> {
    let p = single(&a.source)?;
    let ms = parse_ms(a.m.as_deref(), &[0, 1, 2])?;
    let single_m = ms.len() == 1;
    let mut rows = Vec::new();
    for m in ms {
        let chi = char_poly(&p, m)?;
        match a.format {
            Format::Text if single_m => println!("{}", chi),
            Format::Text => println!("m={}: {}", m, chi),
            Format::Json => rows.push(json!({ "m": m, "character": laurent_json(&chi) })),
        }
    }
    if a.format == Format::Json {
        print_json(&Value::Array(rows));
    }
    Ok(())
}

pub fn report_json(r: &MainFormulaReport) -> Value {
    json!({
        "m": r.m,
        "rr_invariant": int_json(&r.rr_invariant),
        "residue_terms": r.residue_terms.iter().map(|t| json!({
            "component": t.component,
            "classification": t.classification.as_str(),
            "value": rational(&t.value),
        })).collect::<Vec<_>>(),
        "exceptional_terms": r.exceptional_terms.iter().map(|t| json!({
            "component": t.component,
            "value": rational(&t.value),
        })).collect::<Vec<_>>(),
        "regular_term": {
            "value": rational(&r.regular_term.value),
            "tag": r.regular_term.tag.as_str(),
        },
        "balance": r.balance,
    })
}

fn report_text(r: &MainFormulaReport) -> String {
    let mut out = format!("m={} rr_invariant={}\n", r.m, r.rr_invariant);
    for t in &r.residue_terms {
        out += &format!(
            "  residue {} ({}) = {}\n",
            t.component,
            t.classification.as_str(),
            rational(&t.value)
        );
    }
    for t in &r.exceptional_terms {
        out += &format!("  exceptional {} = {}\n", t.component, rational(&t.value));
    }
    out += &format!(
        "  regular ({}) = {}\n",
        r.regular_term.tag.as_str(),
        rational(&r.regular_term.value)
    );
    out += &match r.balance {
        Some(b) => format!("  balance: {}", b),
        None => "  balance: n/a (diagnostic regular term)".to_string(),
    };
    out
}

pub fn main_formula(a: &RunArgs) -> Result<(), Failure> {
    let p = single(&a.source)?;
    let ms = parse_ms(a.m.as_deref(), &[0, 1, 2, 3])?;
    let mut rows = Vec::new();
    let mut unbalanced = Vec::new();
    for m in ms {
        let r = main_formula_report(&p, m)?;
        if r.balance == Some(false) {
            unbalanced.push(m);
        }
        match a.format {
            Format::Text => println!("{}", report_text(&r)),
            Format::Json => rows.push(report_json(&r)),
        }
    }
    if a.format == Format::Json {
        print_json(&Value::Array(rows));
    }
    if !unbalanced.is_empty() {
        return Err(Failure::Verification(format!("balance fails at m = {:?}", unbalanced)));
    }
    Ok(())
}

pub fn witten_json(r: &WittenCheckReport) -> Value {
    let pairs = |v: &[num_complex::Complex<f64>]| v.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>();
    json!({
        "m": r.ms,
        "lhs": pairs(&r.lhs),
        "rhs": pairs(&r.rhs),
        "differences": r.differences(),
        "exponent": r.exponent,
        "floor": r.floor,
        "regular_tag": r.regular_tag.as_str(),
    })
}

pub fn witten_report(p: &ManifoldPresentation, a: &WittenArgs) -> Result<WittenCheckReport, Failure> {
    let ms = parse_ms(a.run.m.as_deref(), &[8, 16, 32, 64])?;
    let phi = TestFunction::new(a.delta1, a.delta2, 2 * p.dim_m as usize + 2)?;
    let opts = WittenOptions::<f64> {
        tolerance: a.quad_tol,
        ..Default::default()
    };
    Ok(decay_check(p, &phi, &ms, &opts, a.drop_fixed)?)
}

pub fn witten_check(a: &WittenArgs) -> Result<(), Failure> {
    let p = single(&a.run.source)?;
    let r = witten_report(&p, a)?;
    match a.run.format {
        Format::Json => print_json(&witten_json(&r)),
        Format::Text => {
            for ((m, l), (rh, d)) in r.ms.iter().zip(&r.lhs).zip(r.rhs.iter().zip(r.differences())) {
                println!("m={} lhs={:.12} rhs={:.12} |diff|={:.3e}", m, l, rh, d);
            }
            println!(
                "decay exponent {:.3} (floor {:.0e}, regular term {})",
                r.exponent,
                r.floor,
                r.regular_tag.as_str()
            );
        }
    }
    if r.exponent > a.run.max_exponent {
        return Err(Failure::Verification(format!(
            "decay exponent {:.3} exceeds {}",
            r.exponent, a.run.max_exponent
        )));
    }
    Ok(())
}

pub fn export(a: &ExportArgs) -> Result<(), Failure> {
    let names: Vec<&str> = if a.builtin == "all" {
        builtins::NAMES.to_vec()
    } else {
        vec![a.builtin.as_str()]
    };
    let mut docs = BTreeMap::new();
    for n in names {
        docs.insert(n.to_string(), builtins::document(n)?);
    }
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::Input(format!("cannot create {}: {}", dir.display(), e)))?;
            for (n, d) in docs {
                let path = dir.join(format!("{}.json", n));
                std::fs::write(&path, d)
                    .map_err(|e| Failure::Input(format!("cannot write {}: {}", path.display(), e)))?;
            }
        }
        None => {
            for d in docs.values() {
                print!("{}", d);
            }
        }
    }
    Ok(())
}
