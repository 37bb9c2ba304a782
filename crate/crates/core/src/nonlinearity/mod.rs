//! Nonlinearity `N = D log D`, its integral inverse, the Schwarzian derivative
//! and the affine factor decomposition of long branches.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::commuting_pair::{CommutingPair, CompositionChain, Step};
use crate::error::{LabError, Result};
use crate::numerics::{grid, quad, Jet3, Scalar};

/// A function whose 3-jet can be evaluated at any point of its domain.
pub trait JetFunction: Send + Sync {
    /// Value and first three derivatives at `x`.
    fn jet(&self, x: &Scalar) -> Jet3;
}

impl JetFunction for CompositionChain {
    fn jet(&self, x: &Scalar) -> Jet3 {
        CompositionChain::jet(self, x)
    }
}

/// A real polynomial `Σ c_k x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    /// Coefficients, constant term first.
    pub coeffs: Vec<Scalar>,
}

impl Polynomial {
    /// Polynomial from its coefficients.
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        Polynomial { coeffs }
    }
}

impl JetFunction for Polynomial {
    fn jet(&self, x: &Scalar) -> Jet3 {
        let prec = x.prec();
        let mut out = [Scalar::zero(prec), Scalar::zero(prec), Scalar::zero(prec), Scalar::zero(prec)];
        // Horner on the polynomial and its first three derivatives.
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            out[3] = &out[3] * x + &out[2] * 3;
            out[2] = &out[2] * x + &out[1] * 2;
            out[1] = &out[1] * x + &out[0];
            out[0] = &out[0] * x + c;
            let _ = k;
        }
        let [f, d1, d2, d3] = out;
        Jet3::new(f, d1, d2, d3)
    }
}

/// An orientation-preserving diffeomorphism of an interval.
#[derive(Clone)]
pub struct DiffeoOnInterval {
    /// The map.
    pub f: Arc<dyn JetFunction>,
    /// Left end.
    pub a: Scalar,
    /// Right end.
    pub b: Scalar,
}

impl DiffeoOnInterval {
    /// Wraps a jet function on `[a, b]`.
    pub fn new(f: Arc<dyn JetFunction>, a: Scalar, b: Scalar) -> Self {
        DiffeoOnInterval { f, a, b }
    }

    /// Jet at `x`.
    pub fn jet(&self, x: &Scalar) -> Jet3 {
        self.f.jet(x)
    }
}

/// `D²f/Df` from a jet.
pub fn nonlinearity_of_jet(j: &Jet3) -> Result<Scalar> {
    if j.d1.signum_i() <= 0 {
        return Err(LabError::Domain("nonlinearity needs Df > 0".into()));
    }
    Ok(&j.d2 / &j.d1)
}

/// `D³f/Df − (3/2)(D²f/Df)²` from a jet.
pub fn schwarzian_of_jet(j: &Jet3) -> Result<Scalar> {
    if j.d1.is_zero() {
        return Err(LabError::Domain("Schwarzian undefined at a critical point".into()));
    }
    let n = &j.d2 / &j.d1;
    Ok(&j.d3 / &j.d1 - n.square() * 3 / 2)
}

/// `D(Nf) = D³f/Df − (D²f/Df)²` from a jet.
pub fn nonlinearity_derivative_of_jet(j: &Jet3) -> Result<Scalar> {
    let n = nonlinearity_of_jet(j)?;
    Ok(&j.d3 / &j.d1 - n.square())
}

/// Nonlinearity `Nf(x)`.
pub fn nonlinearity(f: &DiffeoOnInterval, x: &Scalar) -> Result<Scalar> {
    nonlinearity_of_jet(&f.jet(x))
}

/// Schwarzian derivative `Sf(x)`.
pub fn schwarzian(f: &dyn JetFunction, x: &Scalar) -> Result<Scalar> {
    schwarzian_of_jet(&f.jet(x))
}

/// `|D(Nf)(x) − Sf(x) − (Nf(x))²/2|` with `D(Nf)` from a central difference at `h = 2^(−bits/3)`.
pub fn nonlinearity_derivative_identity_check(f: &dyn JetFunction, x: &Scalar) -> Result<Scalar> {
    let prec = x.prec();
    let h = Scalar::pow2(-(prec as i32) / 3, prec);
    let np = nonlinearity_of_jet(&f.jet(&(x + &h)))?;
    let nm = nonlinearity_of_jet(&f.jet(&(x - &h)))?;
    let dn = (np - nm) / (&h * 2);
    let j = f.jet(x);
    let n = nonlinearity_of_jet(&j)?;
    let s = schwarzian_of_jet(&j)?;
    Ok((dn - s - n.square() / 2).abs())
}

/// A continuous function `φ` with a (one-sided) derivative, the input of `N^{−1}`.
pub trait PhiFunction: Send + Sync {
    /// `φ(x)`.
    fn value(&self, x: &Scalar) -> Scalar;
    /// `φ'(x)` (right derivative at kinks).
    fn derivative(&self, x: &Scalar) -> Scalar;
}

/// Piecewise-linear interpolant of uniform samples on `[a, b]`.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    a: Scalar,
    b: Scalar,
    samples: Vec<Scalar>,
}

impl PiecewiseLinear {
    /// Interpolant of `samples[k] = φ(a + k (b − a)/(n − 1))`, `n ≥ 2`.
    pub fn new(a: Scalar, b: Scalar, samples: Vec<Scalar>) -> Result<Self> {
        if samples.len() < 2 || a >= b {
            return Err(LabError::Domain("piecewise-linear needs a < b and at least two samples".into()));
        }
        Ok(PiecewiseLinear { a, b, samples })
    }

    /// Samples `f` at `n` uniform points.
    pub fn sample<F: Fn(&Scalar) -> Scalar>(a: &Scalar, b: &Scalar, n: usize, f: F) -> Result<Self> {
        let pts = grid::closed_points(a, b, n);
        PiecewiseLinear::new(a.clone(), b.clone(), pts.iter().map(f).collect())
    }

    fn locate(&self, x: &Scalar) -> (usize, Scalar) {
        let segs = self.samples.len() - 1;
        let t = (x - &self.a) / (&self.b - &self.a) * segs as i64;
        let fl = t.floor();
        let mut i = fl.to_f64().max(0.0) as usize;
        if i >= segs {
            i = segs - 1;
        }
        let local = t - i as i64;
        (i, local)
    }
}

impl PhiFunction for PiecewiseLinear {
    fn value(&self, x: &Scalar) -> Scalar {
        let (i, t) = self.locate(x);
        &self.samples[i] + &(&(&self.samples[i + 1] - &self.samples[i]) * &t)
    }

    fn derivative(&self, x: &Scalar) -> Scalar {
        let (i, _) = self.locate(x);
        let segs = (self.samples.len() - 1) as i64;
        (&self.samples[i + 1] - &self.samples[i]) * segs / (&self.b - &self.a)
    }
}

/// A closed-form `φ` given by value and derivative closures.
pub struct ClosedFormPhi {
    f: Box<dyn Fn(&Scalar) -> Scalar + Send + Sync>,
    df: Box<dyn Fn(&Scalar) -> Scalar + Send + Sync>,
}

impl ClosedFormPhi {
    /// Wraps `φ` and `φ'`.
    pub fn new(
        f: impl Fn(&Scalar) -> Scalar + Send + Sync + 'static,
        df: impl Fn(&Scalar) -> Scalar + Send + Sync + 'static,
    ) -> Self {
        ClosedFormPhi { f: Box::new(f), df: Box::new(df) }
    }
}

impl PhiFunction for ClosedFormPhi {
    fn value(&self, x: &Scalar) -> Scalar {
        (self.f)(x)
    }
    fn derivative(&self, x: &Scalar) -> Scalar {
        (self.df)(x)
    }
}

/// Default panel count of the nested Simpson quadrature.
pub const DEFAULT_PANELS: usize = 1 << 10;

/// `N^{−1}φ(x) = a + (b − a) ∫_a^x e^{Φ} / ∫_a^b e^{Φ}` with `Φ(s) = ∫_a^s φ`,
/// tabulated by nested composite Simpson quadrature.
pub struct NonlinearityInverse {
    phi: Arc<dyn PhiFunction>,
    a: Scalar,
    b: Scalar,
    nodes: Vec<Scalar>,
    big_phi: Vec<Scalar>,
    big_f: Vec<Scalar>,
    z: Scalar,
}

impl NonlinearityInverse {
    /// Tabulates `N^{−1}φ` on `[a, b]` with `panels` Simpson panels.
    pub fn new(phi: Arc<dyn PhiFunction>, a: Scalar, b: Scalar, panels: usize) -> Result<Self> {
        if a >= b {
            return Err(LabError::Domain("nonlinearity_inverse needs a < b".into()));
        }
        let panels = panels.max(1);
        let nodes = grid::closed_points(&a, &b, panels + 1);
        let prec = a.prec();
        let mut big_phi = vec![Scalar::zero(prec)];
        let mut big_f = vec![Scalar::zero(prec)];
        for i in 0..panels {
            let (x0, x1) = (&nodes[i], &nodes[i + 1]);
            let m = (x0 + x1) / 2;
            let q = (x0 + &m) / 2;
            let (p0, pq, pm, p1) = (phi.value(x0), phi.value(&q), phi.value(&m), phi.value(x1));
            let phi_m = &big_phi[i] + &quad::simpson_panel(x0, &m, &p0, &pq, &pm);
            let phi_1 = &big_phi[i] + &quad::simpson_panel(x0, x1, &p0, &pm, &p1);
            let f1 = &big_f[i] + &quad::simpson_panel(x0, x1, &big_phi[i].exp(), &phi_m.exp(), &phi_1.exp());
            big_phi.push(phi_1);
            big_f.push(f1);
        }
        let z = big_f.last().expect("nonempty").clone();
        Ok(NonlinearityInverse { phi, a, b, nodes, big_phi, big_f, z })
    }

    fn panel_of(&self, x: &Scalar) -> usize {
        let n = self.nodes.len() - 1;
        let t = ((x - &self.a) / (&self.b - &self.a) * n as i64).floor().to_f64();
        (t.max(0.0) as usize).min(n - 1)
    }

    /// `Φ(x) = ∫_a^x φ`.
    pub fn big_phi(&self, x: &Scalar) -> Scalar {
        let i = self.panel_of(x);
        let x0 = &self.nodes[i];
        let m = (x0 + x) / 2;
        &self.big_phi[i] + &quad::simpson_panel(x0, x, &self.phi.value(x0), &self.phi.value(&m), &self.phi.value(x))
    }

    fn big_f(&self, x: &Scalar) -> Scalar {
        let i = self.panel_of(x);
        let x0 = &self.nodes[i];
        let m = (x0 + x) / 2;
        let e0 = self.big_phi[i].exp();
        let em = self.big_phi(&m).exp();
        let e1 = self.big_phi(x).exp();
        &self.big_f[i] + &quad::simpson_panel(x0, x, &e0, &em, &e1)
    }
}

impl JetFunction for NonlinearityInverse {
    fn jet(&self, x: &Scalar) -> Jet3 {
        let scale = (&self.b - &self.a) / &self.z;
        let value = &self.a + &(&scale * &self.big_f(x));
        let d1 = &scale * &self.big_phi(x).exp();
        let phi = self.phi.value(x);
        let d2 = &d1 * &phi;
        let d3 = &d1 * &(self.phi.derivative(x) + phi.square());
        Jet3::new(value, d1, d2, d3)
    }
}

/// `(N^{−1}φ)(x)` with the default panel count.
pub fn nonlinearity_inverse(phi: Arc<dyn PhiFunction>, a: &Scalar, b: &Scalar, x: &Scalar) -> Result<Scalar> {
    Ok(NonlinearityInverse::new(phi, a.clone(), b.clone(), DEFAULT_PANELS)?.jet(x).f)
}

/// `sup |N(N^{−1}φ) − φ|` over `points` interior points, where the outer `N = D log D`
/// is taken by a central difference (step `2^{−40}`) of `log D(N^{−1}φ)`.
pub fn roundtrip_residual(inv: &NonlinearityInverse, points: usize) -> Scalar {
    let prec = inv.a.prec();
    let h = Scalar::pow2(-40, prec);
    let pts = grid::interior_points(&inv.a, &inv.b, points);
    let errs: Vec<Scalar> = pts
        .par_iter()
        .map(|x| {
            let lp = inv.jet(&(x + &h)).d1.ln();
            let lm = inv.jet(&(x - &h)).d1.ln();
            let n = (lp - lm) / (&h * 2);
            (n - inv.phi.value(x)).abs()
        })
        .collect();
    errs.into_iter().fold(Scalar::zero(prec), Scalar::max_of)
}

/// The affine map `x ↦ scale·x + offset`.
#[derive(Clone, Debug, Serialize)]
pub struct AffineFrame {
    /// Slope `|I_i|`.
    pub scale: Scalar,
    /// Offset `x_i`.
    pub offset: Scalar,
}

/// Factors `f_i = A_{i+1}^{−1} ∘ η ∘ A_i` on `[0, 1]` and the frames `A_i`.
pub struct FactorDecomposition {
    /// `f_1 .. f_{a−1}`.
    pub factors: Vec<DiffeoOnInterval>,
    /// `A_1 .. A_a`.
    pub frames: Vec<AffineFrame>,
    /// Case-I pair the decomposition was built from.
    pub pair: CommutingPair,
}

impl FactorDecomposition {
    /// Number of factors.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// True when there are no factors.
    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

fn framed(frame_in: &AffineFrame, chain: &CompositionChain, frame_out: &AffineFrame, prec: u32) -> CompositionChain {
    let mut c = CompositionChain::identity(Scalar::zero(prec), Scalar::one(prec));
    c.push(Step::Affine { alpha: frame_in.scale.clone(), beta: frame_in.offset.clone() });
    for s in chain.steps() {
        c.push(s.clone());
    }
    c.push(Step::AffineInv { alpha: frame_out.scale.clone(), beta: frame_out.offset.clone() });
    c
}

/// Splits `η^{a−1}` on the fundamental domains `I_i = [x_i, x_{i−1}]` into `a − 1` factors.
pub fn decompose_branch(pair: &CommutingPair) -> Result<FactorDecomposition> {
    let p = pair.to_case_one()?;
    let prec = p.prec();
    let a = p.period()?.finite().ok_or(LabError::NotRenormalizable)? as usize;
    let orbit = p.boundary_orbit()?;
    let frames: Vec<AffineFrame> = (1..=a)
        .map(|i| AffineFrame { scale: &orbit[i - 1] - &orbit[i], offset: orbit[i].clone() })
        .collect();
    let factors = if a < 2 {
        Vec::new()
    } else {
        (0..a - 1)
            .map(|i| {
                let chain = framed(&frames[i], p.eta(), &frames[i + 1], prec);
                DiffeoOnInterval::new(Arc::new(chain), Scalar::zero(prec), Scalar::one(prec))
            })
            .collect()
    };
    Ok(FactorDecomposition { factors, frames, pair: p })
}

/// Max over `points` points of `[0, 1]` of `|(f_{a−1} ∘ … ∘ f_1)(x) − (A_a^{−1} ∘ η^{a−1} ∘ A_1)(x)|`.
pub fn recomposition_residual(dec: &FactorDecomposition, points: usize) -> Scalar {
    let prec = dec.pair.prec();
    if dec.factors.is_empty() {
        return Scalar::zero(prec);
    }
    let mut eta_pow = CompositionChain::identity(Scalar::zero(prec), Scalar::zero(prec));
    for _ in 0..dec.factors.len() {
        eta_pow = eta_pow.then(dec.pair.eta());
    }
    let direct = framed(&dec.frames[0], &eta_pow, dec.frames.last().expect("a >= 2"), prec);
    let pts = grid::closed_points(&Scalar::zero(prec), &Scalar::one(prec), points);
    let errs: Vec<Scalar> = pts
        .par_iter()
        .map(|x| {
            let mut y = x.clone();
            for f in &dec.factors {
                y = f.jet(&y).f;
            }
            (y - direct.value(x)).abs()
        })
        .collect();
    errs.into_iter().fold(Scalar::zero(prec), Scalar::max_of)
}

/// Grid points per factor for [`nonlinearity_sums`].
pub const FACTOR_GRID: usize = 33;

/// Summed nonlinearity diagnostics over the factors.
#[derive(Clone, Debug, Serialize)]
pub struct NonlinearitySums {
    /// `Σ sup |N f_i|`.
    pub sum_n: Scalar,
    /// `Σ sup |D(N f_i)|`.
    pub sum_dn: Scalar,
    /// `Σ sup |N f_i − N g_i|` when a second decomposition is given.
    pub sum_diff: Option<Scalar>,
    /// Number of factors.
    pub factors: usize,
}

/// Sums of factor nonlinearities (and differences against `dec2`) on a 33-point grid per factor.
pub fn nonlinearity_sums(dec: &FactorDecomposition, dec2: Option<&FactorDecomposition>) -> Result<NonlinearitySums> {
    let prec = dec.pair.prec();
    if let Some(d2) = dec2 {
        if d2.factors.len() != dec.factors.len() {
            return Err(LabError::Domain("factor count mismatch".into()));
        }
    }
    let pts = grid::closed_points(&Scalar::zero(prec), &Scalar::one(prec), FACTOR_GRID);
    let per: Vec<Result<(Scalar, Scalar, Scalar)>> = (0..dec.factors.len())
        .into_par_iter()
        .map(|i| {
            let mut sn = Scalar::zero(prec);
            let mut sdn = Scalar::zero(prec);
            let mut sd = Scalar::zero(prec);
            for x in &pts {
                let j = dec.factors[i].jet(x);
                let n = nonlinearity_of_jet(&j)?;
                sdn = sdn.max_of(nonlinearity_derivative_of_jet(&j)?.abs());
                if let Some(d2) = dec2 {
                    let m = nonlinearity_of_jet(&d2.factors[i].jet(x))?;
                    sd = sd.max_of((&n - &m).abs());
                }
                sn = sn.max_of(n.abs());
            }
            Ok((sn, sdn, sd))
        })
        .collect();
    let mut sum_n = Scalar::zero(prec);
    let mut sum_dn = Scalar::zero(prec);
    let mut sum_diff = Scalar::zero(prec);
    for r in per {
        let (a, b, c) = r?;
        sum_n = sum_n + a;
        sum_dn = sum_dn + b;
        sum_diff = sum_diff + c;
    }
    Ok(NonlinearitySums {
        sum_n,
        sum_dn,
        sum_diff: dec2.map(|_| sum_diff),
        factors: dec.factors.len(),
    })
}
