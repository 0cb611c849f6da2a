//! Fixed-point presentations of prequantized Hamiltonian circle manifolds:
//! data types, validation, the JSON document format and example builders.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::ring::{
    format_monomial, parse_monomial, parse_rational, qi, todd_from_roots, Generator, GradedElement,
    Monomial, RingSpec,
};

type GradedQ = GradedElement<BigRational>;

/// Normal-bundle summand on which the circle acts with a single weight.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalBlock {
    pub weight: i64,
    /// Roots `a` such that the fixed-point factor is `prod (1 - z^k e^a)`.
    pub chern_roots: Vec<GradedQ>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedComponent {
    pub name: String,
    pub dim_f: u32,
    pub moment: i64,
    pub ring: Arc<RingSpec>,
    pub todd: GradedQ,
    pub omega: GradedQ,
    pub blocks: Vec<NormalBlock>,
}

impl FixedComponent {
    /// Complex rank of the normal bundle.
    pub fn normal_rank(&self) -> u32 {
        self.blocks.iter().map(|b| b.chern_roots.len() as u32).sum()
    }

    /// Normal weights listed with multiplicity.
    pub fn weights(&self) -> Vec<i64> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat(b.weight).take(b.chern_roots.len()))
            .collect()
    }
}

/// Data on the regular part of the reduced space at level zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientData {
    pub ring: Arc<RingSpec>,
    pub omega0: GradedQ,
    pub kappa_todd: GradedQ,
}

impl QuotientData {
    /// `CP^n` with `omega0 = h` and its Todd class.
    pub fn projective(n: u32) -> Self {
        let ring = RingSpec::projective(n, "h");
        let h = if n > 0 { GradedQ::generator(&ring, 0) } else { GradedQ::zero(&ring) };
        let roots = vec![h.clone(); n as usize + 1];
        let kappa_todd = todd_from_roots(&ring, &roots).expect("degree-2 roots");
        QuotientData {
            ring,
            omega0: h,
            kappa_todd,
        }
    }

    /// Reduced space with no regular part, so the regular term vanishes.
    pub fn empty() -> Self {
        let ring = RingSpec::point();
        QuotientData {
            omega0: GradedQ::zero(&ring),
            kappa_todd: GradedQ::zero(&ring),
            ring,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPresentation {
    pub name: String,
    pub dim_m: u32,
    pub free_on_regular: bool,
    pub components: Vec<FixedComponent>,
    pub quotient: Option<QuotientData>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    NoComponents,
    OddDimension { what: String, value: u32 },
    WeightZero { component: String, block: usize },
    EmptyBlock { component: String, block: usize },
    DimensionMismatch { component: String, expected: u32, found: u32 },
    TruncationMismatch { component: String, dim_f: u32, truncation: u32 },
    RootDegree { component: String, block: usize },
    OmegaDegree { component: String },
    ToddNormalization { component: String },
    PointData { component: String },
    RingMismatch { component: String },
    Ring { owner: String, message: String },
    QuotientOmegaDegree,
    Schema(String),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Diagnostic::*;
        match self {
            NoComponents => write!(f, "NoComponents: presentation has no fixed components"),
            OddDimension { what, value } => write!(f, "OddDimension: {} = {} is not even", what, value),
            WeightZero { component, block } => {
                write!(f, "WeightZero: block {} of `{}` has weight 0", block, component)
            }
            EmptyBlock { component, block } => {
                write!(f, "EmptyBlock: block {} of `{}` has no Chern roots", block, component)
            }
            DimensionMismatch { component, expected, found } => write!(
                f,
                "DimensionMismatch: `{}` has dim_F + 2 rank = {}, expected dim_M = {}",
                component, found, expected
            ),
            TruncationMismatch { component, dim_f, truncation } => write!(
                f,
                "TruncationMismatch: `{}` has dim_F {} but ring truncation {}",
                component, dim_f, truncation
            ),
            RootDegree { component, block } => {
                write!(f, "RootDegree: block {} of `{}` has a root not of degree 2", block, component)
            }
            OmegaDegree { component } => write!(f, "OmegaDegree: omega of `{}` is not of pure degree 2", component),
            ToddNormalization { component } => {
                write!(f, "ToddNormalization: Todd class of `{}` does not start with 1", component)
            }
            PointData { component } => {
                write!(f, "PointData: point component `{}` must have todd = 1 and omega = 0", component)
            }
            RingMismatch { component } => write!(f, "RingMismatch: data of `{}` lives in another ring", component),
            Ring { owner, message } => write!(f, "Ring: {}: {}", owner, message),
            QuotientOmegaDegree => write!(f, "QuotientOmegaDegree: omega0 is not of pure degree 2"),
            Schema(msg) => write!(f, "Schema: {}", msg),
        }
    }
}

/// Every invariant violation; an empty list means the presentation is valid.
pub fn validate(p: &ManifoldPresentation) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if p.components.is_empty() {
        out.push(Diagnostic::NoComponents);
    }
    if p.dim_m == 0 || p.dim_m % 2 != 0 {
        out.push(Diagnostic::OddDimension {
            what: "dim_M".into(),
            value: p.dim_m,
        });
    }
    for c in &p.components {
        let name = c.name.clone();
        for msg in c.ring.check() {
            out.push(Diagnostic::Ring {
                owner: name.clone(),
                message: msg,
            });
        }
        if c.dim_f % 2 != 0 {
            out.push(Diagnostic::OddDimension {
                what: format!("dim_F of `{}`", name),
                value: c.dim_f,
            });
        }
        if c.dim_f != c.ring.truncation() {
            out.push(Diagnostic::TruncationMismatch {
                component: name.clone(),
                dim_f: c.dim_f,
                truncation: c.ring.truncation(),
            });
        }
        let found = c.dim_f + 2 * c.normal_rank();
        if found != p.dim_m {
            out.push(Diagnostic::DimensionMismatch {
                component: name.clone(),
                expected: p.dim_m,
                found,
            });
        }
        let in_ring = |e: &GradedQ| Arc::ptr_eq(e.ring(), &c.ring) || **e.ring() == *c.ring;
        if !in_ring(&c.todd) || !in_ring(&c.omega) {
            out.push(Diagnostic::RingMismatch { component: name.clone() });
        }
        if !c.omega.is_pure_degree(2) {
            out.push(Diagnostic::OmegaDegree { component: name.clone() });
        }
        if !c.todd.scalar_part().is_one() {
            out.push(Diagnostic::ToddNormalization { component: name.clone() });
        }
        if c.dim_f == 0 && (!c.todd.is_one_elem() || !c.omega.is_zero()) {
            out.push(Diagnostic::PointData { component: name.clone() });
        }
        for (i, b) in c.blocks.iter().enumerate() {
            if b.weight == 0 {
                out.push(Diagnostic::WeightZero {
                    component: name.clone(),
                    block: i,
                });
            }
            if b.chern_roots.is_empty() {
                out.push(Diagnostic::EmptyBlock {
                    component: name.clone(),
                    block: i,
                });
            }
            if b.chern_roots.iter().any(|r| !r.is_pure_degree(2)) {
                out.push(Diagnostic::RootDegree {
                    component: name.clone(),
                    block: i,
                });
            }
            if b.chern_roots.iter().any(|r| !in_ring(r)) {
                out.push(Diagnostic::RingMismatch { component: name.clone() });
            }
        }
    }
    if let Some(qd) = &p.quotient {
        for msg in qd.ring.check() {
            out.push(Diagnostic::Ring {
                owner: "quotient".into(),
                message: msg,
            });
        }
        if !qd.omega0.is_pure_degree(2) {
            out.push(Diagnostic::QuotientOmegaDegree);
        }
    }
    out
}

impl GradedElement<BigRational> {
    fn is_one_elem(&self) -> bool {
        *self == GradedQ::one(self.ring())
    }
}

// ---------------------------------------------------------------------------
// Document format

fn rational_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn ring_to_json(r: &RingSpec) -> Value {
    let gens: Vec<Value> = r
        .generators()
        .iter()
        .map(|g| json!({"name": g.name, "degree": g.degree}))
        .collect();
    let mut ints = Map::new();
    for (m, v) in r.integrals() {
        ints.insert(format_monomial(r, m), Value::String(rational_string(v)));
    }
    json!({"generators": gens, "truncation": r.truncation(), "integrals": ints})
}

fn component_to_json(c: &FixedComponent) -> Value {
    let blocks: Vec<Value> = c
        .blocks
        .iter()
        .map(|b| {
            json!({
                "weight": b.weight,
                "chern_roots": b.chern_roots.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "name": c.name,
        "dim_F": c.dim_f,
        "moment": c.moment,
        "ring": ring_to_json(&c.ring),
        "todd": c.todd.to_string(),
        "omega": c.omega.to_string(),
        "blocks": blocks,
    })
}

/// JSON value of a presentation; keys come out sorted.
pub fn to_json(p: &ManifoldPresentation) -> Value {
    let mut doc = json!({
        "name": p.name,
        "dim_M": p.dim_m,
        "free_on_regular": p.free_on_regular,
        "components": p.components.iter().map(component_to_json).collect::<Vec<_>>(),
    });
    if let Some(qd) = &p.quotient {
        doc["quotient"] = json!({
            "ring": ring_to_json(&qd.ring),
            "omega0": qd.omega0.to_string(),
            "kappa_todd": qd.kappa_todd.to_string(),
        });
    }
    doc
}

/// Canonical text: sorted keys, reduced rationals, graded-lex terms.
pub fn serialize(p: &ManifoldPresentation) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(p)).expect("serializable");
    s.push('\n');
    s
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Invalid(vec![Diagnostic::Schema(msg.into())])
}

fn get<'a>(obj: &'a Value, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(format!("missing key `{}` in {}", key, ctx)))
}

fn get_str<'a>(obj: &'a Value, key: &str, ctx: &str) -> Result<&'a str> {
    get(obj, key, ctx)?
        .as_str()
        .ok_or_else(|| schema(format!("`{}` in {} must be a string", key, ctx)))
}

fn get_int(obj: &Value, key: &str, ctx: &str) -> Result<i64> {
    get(obj, key, ctx)?
        .as_i64()
        .ok_or_else(|| schema(format!("`{}` in {} must be an integer", key, ctx)))
}

fn get_array<'a>(obj: &'a Value, key: &str, ctx: &str) -> Result<&'a Vec<Value>> {
    get(obj, key, ctx)?
        .as_array()
        .ok_or_else(|| schema(format!("`{}` in {} must be an array", key, ctx)))
}

fn value_rational(v: &Value, ctx: &str) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| schema(format!("bad rational `{}` in {}", s, ctx))),
        Value::Number(n) => n
            .as_i64()
            .map(qi)
            .ok_or_else(|| schema(format!("non-integer number in {}", ctx))),
        _ => Err(schema(format!("expected a rational in {}", ctx))),
    }
}

fn ring_from_json(v: &Value, ctx: &str) -> Result<Arc<RingSpec>> {
    let gens = get_array(v, "generators", ctx)?
        .iter()
        .map(|g| {
            let degree = get_int(g, "degree", ctx)?;
            if degree < 0 {
                return Err(schema(format!("negative generator degree in {}", ctx)));
            }
            Ok(Generator {
                name: get_str(g, "name", ctx)?.to_string(),
                degree: degree as u32,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let truncation = get_int(v, "truncation", ctx)?;
    if truncation < 0 {
        return Err(schema(format!("negative truncation in {}", ctx)));
    }
    let probe = RingSpec::new(gens.clone(), truncation as u32, BTreeMap::new())
        .map_err(|e| Error::Invalid(vec![Diagnostic::Ring { owner: ctx.into(), message: e.to_string() }]))?;
    let mut integrals: BTreeMap<Monomial, BigRational> = BTreeMap::new();
    let table = get(v, "integrals", ctx)?
        .as_object()
        .ok_or_else(|| schema(format!("`integrals` in {} must be an object", ctx)))?;
    for (k, val) in table {
        let mono = parse_monomial(&probe, k)?;
        integrals.insert(mono, value_rational(val, ctx)?);
    }
    RingSpec::new(gens, truncation as u32, integrals)
        .map_err(|e| Error::Invalid(vec![Diagnostic::Ring { owner: ctx.into(), message: e.to_string() }]))
}

fn component_from_json(v: &Value, idx: usize) -> Result<FixedComponent> {
    let ctx = format!("component {}", idx);
    let name = get_str(v, "name", &ctx)?.to_string();
    let dim_f = get_int(v, "dim_F", &ctx)?;
    if dim_f < 0 {
        return Err(schema(format!("negative dim_F in {}", ctx)));
    }
    let moment = get_int(v, "moment", &ctx)?;
    let ring = ring_from_json(get(v, "ring", &ctx)?, &ctx)?;
    let todd = GradedQ::parse(&ring, get_str(v, "todd", &ctx)?)?;
    let omega = GradedQ::parse(&ring, get_str(v, "omega", &ctx)?)?;
    let blocks = get_array(v, "blocks", &ctx)?
        .iter()
        .map(|b| {
            let weight = get_int(b, "weight", &ctx)?;
            let roots = get_array(b, "chern_roots", &ctx)?
                .iter()
                .map(|r| {
                    let s = r
                        .as_str()
                        .ok_or_else(|| schema(format!("Chern roots in {} must be strings", ctx)))?;
                    GradedQ::parse(&ring, s)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(NormalBlock {
                weight,
                chern_roots: roots,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FixedComponent {
        name,
        dim_f: dim_f as u32,
        moment,
        ring,
        todd,
        omega,
        blocks,
    })
}

/// Parse and validate a document.
pub fn parse(text: &str) -> Result<ManifoldPresentation> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let ctx = "document";
    let dim_m = get_int(&doc, "dim_M", ctx)?;
    if dim_m < 0 {
        return Err(schema("negative dim_M"));
    }
    let free_on_regular = get(&doc, "free_on_regular", ctx)?
        .as_bool()
        .ok_or_else(|| schema("`free_on_regular` must be a boolean"))?;
    let components = get_array(&doc, "components", ctx)?
        .iter()
        .enumerate()
        .map(|(i, c)| component_from_json(c, i))
        .collect::<Result<Vec<_>>>()?;
    let quotient = match doc.get("quotient") {
        None | Some(Value::Null) => None,
        Some(q) => {
            let ring = ring_from_json(get(q, "ring", "quotient")?, "quotient")?;
            Some(QuotientData {
                omega0: GradedQ::parse(&ring, get_str(q, "omega0", "quotient")?)?,
                kappa_todd: GradedQ::parse(&ring, get_str(q, "kappa_todd", "quotient")?)?,
                ring,
            })
        }
    };
    let p = ManifoldPresentation {
        name: get_str(&doc, "name", ctx)?.to_string(),
        dim_m: dim_m as u32,
        free_on_regular,
        components,
        quotient,
    };
    let diags = validate(&p);
    if diags.is_empty() {
        Ok(p)
    } else {
        Err(Error::Invalid(diags))
    }
}

// ---------------------------------------------------------------------------
// Builders

/// `CP^n` with the linear action of the given weights and `L = O(d)`.
///
/// One component per distinct weight value `w` of multiplicity `r`: a
/// `CP^{r-1}` with moment `d (w - w_min)`. The normal summand towards the
/// coordinates of weight `w'` is `O(1)^{r'}`, whose roots enter the
/// fixed-point factor as `-h`.
pub fn cpn_linear(weights: &[i64], d: i64) -> Result<ManifoldPresentation> {
    if weights.len() < 2 {
        return Err(Error::InvalidArgument("cpn_linear needs at least two weights".into()));
    }
    if d < 1 {
        return Err(Error::InvalidArgument("line bundle degree must be positive".into()));
    }
    let mut values: BTreeMap<i64, u32> = BTreeMap::new();
    for w in weights {
        *values.entry(*w).or_insert(0) += 1;
    }
    let w_min = *values.keys().next().unwrap();
    let n = weights.len() as u32 - 1;
    let mut components = Vec::new();
    for (&w, &r) in &values {
        let ring = RingSpec::projective(r - 1, "h");
        let h = if r > 1 { GradedQ::generator(&ring, 0) } else { GradedQ::zero(&ring) };
        let todd = todd_from_roots(&ring, &vec![h.clone(); r as usize])?;
        let blocks = values
            .iter()
            .filter(|(w2, _)| **w2 != w)
            .map(|(&w2, &r2)| NormalBlock {
                weight: w2 - w,
                chern_roots: vec![h.neg_elem(); r2 as usize],
            })
            .collect();
        components.push(FixedComponent {
            name: format!("w={}", w),
            dim_f: 2 * (r - 1),
            moment: d * (w - w_min),
            ring,
            todd,
            omega: h.scale(&qi(d)),
            blocks,
        });
    }
    Ok(ManifoldPresentation {
        name: format!("cpn{:?}d{}", weights, d),
        dim_m: 2 * n,
        free_on_regular: true,
        components,
        quotient: None,
    })
}

/// `CP^1` rotated with weight `k`, moment normalized to vanish at `[1:0]`.
pub fn cp1_rotation(k: i64) -> Result<ManifoldPresentation> {
    let mut p = cpn_linear(&[0, k], 1)?;
    p = shift_moment(&p, k.min(0));
    p.name = format!("cp1({})", k);
    Ok(p)
}

/// Add `s` to every moment value.
pub fn shift_moment(p: &ManifoldPresentation, s: i64) -> ManifoldPresentation {
    let mut out = p.clone();
    for c in &mut out.components {
        c.moment += s;
    }
    out
}

/// Replace `L` by `L^k`.
pub fn scale_bundle(p: &ManifoldPresentation, k: i64) -> ManifoldPresentation {
    let mut out = p.clone();
    for c in &mut out.components {
        c.moment *= k;
        c.omega = c.omega.scale(&qi(k));
    }
    if let Some(qd) = &mut out.quotient {
        qd.omega0 = qd.omega0.scale(&qi(k));
    }
    out.name = format!("{}^{}", p.name, k);
    out
}

/// Cartesian product with the diagonal action; quotient data is dropped.
pub fn product(p: &ManifoldPresentation, q: &ManifoldPresentation) -> ManifoldPresentation {
    let mut components = Vec::new();
    for f in &p.components {
        for g in &q.components {
            let (ring, offset) = RingSpec::tensor(&f.ring, &g.ring);
            let lift_f = |e: &GradedQ| e.embed(&ring, 0);
            let lift_g = |e: &GradedQ| e.embed(&ring, offset);
            let mut merged: BTreeMap<i64, Vec<GradedQ>> = BTreeMap::new();
            for b in &f.blocks {
                merged.entry(b.weight).or_default().extend(b.chern_roots.iter().map(lift_f));
            }
            for b in &g.blocks {
                merged.entry(b.weight).or_default().extend(b.chern_roots.iter().map(lift_g));
            }
            components.push(FixedComponent {
                name: format!("{}x{}", paren(&f.name), paren(&g.name)),
                dim_f: f.dim_f + g.dim_f,
                moment: f.moment + g.moment,
                todd: &lift_f(&f.todd) * &lift_g(&g.todd),
                omega: &lift_f(&f.omega) + &lift_g(&g.omega),
                ring,
                blocks: merged
                    .into_iter()
                    .map(|(weight, chern_roots)| NormalBlock { weight, chern_roots })
                    .collect(),
            });
        }
    }
    ManifoldPresentation {
        name: format!("{}x{}", paren(&p.name), paren(&q.name)),
        dim_m: p.dim_m + q.dim_m,
        free_on_regular: p.free_on_regular && q.free_on_regular,
        components,
        quotient: None,
    }
}

fn paren(s: &str) -> String {
    if s.contains('x') {
        format!("({})", s)
    } else {
        s.to_string()
    }
}

/// Disjoint union of two presentations of equal dimension.
pub fn disjoint_union(p: &ManifoldPresentation, q: &ManifoldPresentation) -> Result<ManifoldPresentation> {
    if p.dim_m != q.dim_m {
        return Err(Error::InvalidArgument("disjoint union needs equal dimensions".into()));
    }
    let mut components = p.components.clone();
    for c in &q.components {
        let mut c = c.clone();
        c.name = format!("{}'", c.name);
        components.push(c);
    }
    Ok(ManifoldPresentation {
        name: format!("{}+{}", p.name, q.name),
        dim_m: p.dim_m,
        free_on_regular: p.free_on_regular && q.free_on_regular,
        components,
        quotient: None,
    })
}

/// The point manifold is not a valid presentation (dim_M > 0 is required),
/// so products use this zero-dimensional unit only internally in tests.
pub fn point_unit() -> ManifoldPresentation {
    ManifoldPresentation {
        name: "pt".into(),
        dim_m: 0,
        free_on_regular: true,
        components: vec![FixedComponent {
            name: "pt".into(),
            dim_f: 0,
            moment: 0,
            ring: RingSpec::point(),
            todd: GradedQ::one(&RingSpec::point()),
            omega: GradedQ::zero(&RingSpec::point()),
            blocks: vec![],
        }],
        quotient: None,
    }
}
