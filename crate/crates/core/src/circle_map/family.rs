//! Parameter families of degree-one lifts `t ↦ t + ω + P(t)` with `P` one-periodic.
//!
//! A family supplies the periodic part `P` and its derivatives; the translation
//! parameter `ω` lives on [`CircleMapLift`](super::CircleMapLift). New families
//! implement [`LiftFamily`] and can be registered in a [`FamilyRegistry`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::Scalar;

/// The periodic part of a lift family.
pub trait LiftFamily: Send + Sync + fmt::Debug {
    /// Family identifier (for example `arnold`).
    fn id(&self) -> &str;

    /// Fixed parameters as decimal strings, used for reports and serialization.
    fn params(&self) -> BTreeMap<String, String>;

    /// The index `d` with criticality `2d+1`, or `None` for a diffeomorphism.
    fn criticality_index(&self) -> Option<u32>;

    /// Value of the periodic part `P(u)`.
    fn periodic_value(&self, u: &Scalar) -> Scalar;

    /// `[P(u), P'(u), P''(u), P'''(u)]`.
    fn periodic_jet(&self, u: &Scalar) -> [Scalar; 4];
}

/// Periodic part given by a finite sine series `Σ_k b_k sin(2πk u)`.
#[derive(Clone, Debug)]
pub struct SineSeries {
    id: String,
    params: BTreeMap<String, String>,
    criticality: Option<u32>,
    prec: u32,
    two_pi: Scalar,
    /// `b_k (2πk)^j` for `j = 0..=3`, indexed by `k − 1`.
    scaled: Vec<[Scalar; 4]>,
}

impl SineSeries {
    /// Builds a series from its coefficients `b_1, b_2, ...`.
    pub fn new(
        id: &str,
        params: BTreeMap<String, String>,
        criticality: Option<u32>,
        coeffs: Vec<Scalar>,
        prec: u32,
    ) -> Self {
        let two_pi = Scalar::pi(prec) * 2;
        let scaled = coeffs
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let w = &two_pi * (i as i64 + 1);
                let w2 = w.square();
                let w3 = &w2 * &w;
                [b.clone(), b * &w, b * &w2, b * &w3]
            })
            .collect();
        SineSeries { id: id.to_string(), params, criticality, prec, two_pi, scaled }
    }

    fn harmonics(&self, u: &Scalar) -> Vec<(Scalar, Scalar)> {
        let theta = u.with_prec(self.prec.max(u.prec())) * &self.two_pi;
        let (s1, c1) = theta.sin_cos();
        let mut out = Vec::with_capacity(self.scaled.len());
        let (mut s, mut c) = (s1.clone(), c1.clone());
        out.push((s.clone(), c.clone()));
        for _ in 1..self.scaled.len() {
            let sn = &s * &c1 + &c * &s1;
            let cn = &c * &c1 - &s * &s1;
            s = sn;
            c = cn;
            out.push((s.clone(), c.clone()));
        }
        out
    }
}

impl LiftFamily for SineSeries {
    fn id(&self) -> &str {
        &self.id
    }

    fn params(&self) -> BTreeMap<String, String> {
        self.params.clone()
    }

    fn criticality_index(&self) -> Option<u32> {
        self.criticality
    }

    fn periodic_value(&self, u: &Scalar) -> Scalar {
        let prec = self.prec.max(u.prec());
        if self.scaled.is_empty() {
            return Scalar::zero(prec);
        }
        let mut acc = Scalar::zero(prec);
        for (k, (s, _)) in self.harmonics(u).iter().enumerate() {
            acc = acc + &self.scaled[k][0] * s;
        }
        acc
    }

    fn periodic_jet(&self, u: &Scalar) -> [Scalar; 4] {
        let prec = self.prec.max(u.prec());
        let mut p = [Scalar::zero(prec), Scalar::zero(prec), Scalar::zero(prec), Scalar::zero(prec)];
        if self.scaled.is_empty() {
            return p;
        }
        for (k, (s, c)) in self.harmonics(u).iter().enumerate() {
            let b = &self.scaled[k];
            p[0] = &p[0] + &(&b[0] * s);
            p[1] = &p[1] + &(&b[1] * c);
            p[2] = &p[2] - &(&b[2] * s);
            p[3] = &p[3] - &(&b[3] * c);
        }
        p
    }
}

fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// The Arnold family of criticality `2d+1`.
///
/// For `d = 1` this is `t + ω − sin(2πt)/2π`. In general the periodic part is
/// chosen so that `1 + P'(t) = (1 − cos 2πt)^d / mean`, which makes `0` the only
/// critical point, of order `2d+1`.
pub fn arnold(d: u32, prec: u32) -> Result<SineSeries> {
    if d == 0 {
        return Err(LabError::Config("arnold criticality index d must be positive".into()));
    }
    let two_pi = Scalar::pi(prec) * 2;
    let central = binomial(2 * d, d);
    let coeffs = (1..=d)
        .map(|k| {
            let num = binomial(2 * d, d - k) * 2;
            let r = rug::Rational::from((num, central.clone()));
            let mut b = Scalar::from_rational(&r, prec) / (&two_pi * k as i64);
            if k % 2 == 1 {
                b = -b;
            }
            b
        })
        .collect();
    let mut params = BTreeMap::new();
    params.insert("d".to_string(), d.to_string());
    Ok(SineSeries::new("arnold", params, Some(d), coeffs, prec))
}

/// The two-harmonic family `t + ω − ((1+β)/2π) sin 2πt + (β/4π) sin 4πt`.
///
/// Its derivative is `(1 − c)((1−β) − 2βc)` with `c = cos 2πt`, positive away
/// from integers when `β < 1/3`; the critical point at 0 is cubic.
pub fn two_harmonic(beta: &Scalar, beta_text: &str, prec: u32) -> Result<SineSeries> {
    if *beta < 0i64 || beta * 3 >= Scalar::one(prec) {
        return Err(LabError::Config(format!(
            "two_harmonic needs 0 <= beta < 1/3 for a single cubic critical point, got {beta_text}"
        )));
    }
    let pi = Scalar::pi(prec);
    let b1 = -((Scalar::one(prec) + beta) / (&pi * 2));
    let b2 = beta / (&pi * 4);
    let mut params = BTreeMap::new();
    params.insert("beta".to_string(), beta_text.to_string());
    Ok(SineSeries::new("two_harmonic", params, Some(1), vec![b1, b2], prec))
}

/// The rigid rotation `t ↦ t + ω`, used as a non-critical reference.
pub fn rotation(prec: u32) -> SineSeries {
    SineSeries::new("rotation", BTreeMap::new(), None, vec![], prec)
}

/// A family identifier with its fixed parameters, as written in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    /// Family identifier.
    pub id: String,
    /// Fixed parameters (numbers or strings such as `"1/10"`).
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
}

/// A parameter value in a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    /// Integer literal.
    Int(i64),
    /// Floating literal, re-read from its shortest decimal form.
    Float(f64),
    /// Text literal, parsed at full precision.
    Text(String),
}

impl ParamValue {
    /// Textual form of the value.
    pub fn as_text(&self) -> String {
        match self {
            ParamValue::Int(i) => i.to_string(),
            ParamValue::Float(f) => f.to_string(),
            ParamValue::Text(s) => s.clone(),
        }
    }
}

impl FamilySpec {
    /// Spec for an Arnold family with criticality index `d`.
    pub fn arnold(d: u32) -> Self {
        let mut params = BTreeMap::new();
        params.insert("d".into(), ParamValue::Int(d as i64));
        FamilySpec { id: "arnold".into(), params }
    }

    /// Spec for a two-harmonic family; `beta` is a decimal or fraction literal.
    pub fn two_harmonic(beta: &str) -> Self {
        let mut params = BTreeMap::new();
        params.insert("beta".into(), ParamValue::Text(beta.into()));
        FamilySpec { id: "two_harmonic".into(), params }
    }

    /// Spec for the rigid rotation.
    pub fn rotation() -> Self {
        FamilySpec { id: "rotation".into(), params: BTreeMap::new() }
    }

    /// Text form of a parameter, if present.
    pub fn param_text(&self, name: &str) -> Option<String> {
        self.params.get(name).map(|v| v.as_text())
    }

    /// Builds the family with the built-in registry.
    pub fn build(&self, prec: u32) -> Result<Arc<dyn LiftFamily>> {
        FamilyRegistry::with_builtins().build(self, prec)
    }
}

/// Constructor signature stored in a [`FamilyRegistry`].
pub type FamilyConstructor = fn(&FamilySpec, u32) -> Result<Arc<dyn LiftFamily>>;

/// Maps family identifiers to constructors.
#[derive(Clone)]
pub struct FamilyRegistry {
    entries: BTreeMap<String, FamilyConstructor>,
}

fn build_arnold(spec: &FamilySpec, prec: u32) -> Result<Arc<dyn LiftFamily>> {
    let d = match spec.param_text("d") {
        None => 1,
        Some(t) => t
            .parse::<u32>()
            .map_err(|_| LabError::Config(format!("arnold parameter d must be a positive integer, got {t}")))?,
    };
    Ok(Arc::new(arnold(d, prec)?))
}

fn build_two_harmonic(spec: &FamilySpec, prec: u32) -> Result<Arc<dyn LiftFamily>> {
    let text = spec.param_text("beta").unwrap_or_else(|| "1/10".to_string());
    let beta = Scalar::parse(&text, prec)?;
    Ok(Arc::new(two_harmonic(&beta, &text, prec)?))
}

fn build_rotation(_spec: &FamilySpec, prec: u32) -> Result<Arc<dyn LiftFamily>> {
    Ok(Arc::new(rotation(prec)))
}

impl FamilyRegistry {
    /// Registry holding `arnold`, `two_harmonic` and `rotation`.
    pub fn with_builtins() -> Self {
        let mut entries: BTreeMap<String, FamilyConstructor> = BTreeMap::new();
        entries.insert("arnold".into(), build_arnold);
        entries.insert("two_harmonic".into(), build_two_harmonic);
        entries.insert("rotation".into(), build_rotation);
        FamilyRegistry { entries }
    }

    /// Adds or replaces a family constructor.
    pub fn register(&mut self, id: &str, ctor: FamilyConstructor) {
        self.entries.insert(id.to_string(), ctor);
    }

    /// Builds a family from its spec.
    pub fn build(&self, spec: &FamilySpec, prec: u32) -> Result<Arc<dyn LiftFamily>> {
        match self.entries.get(&spec.id) {
            Some(ctor) => ctor(spec, prec),
            None => Err(LabError::Config(format!("unknown family {:?}", spec.id))),
        }
    }
}
