//! Exact composition chains of base-map iterates, translations, affine maps and mirrors.
//!
//! A chain is evaluated by threading a [`Jet3`] through its steps. The point is
//! carried as an integer part plus a fraction in [−1/2, 1/2]; the base map only
//! ever sees the fraction and integer translations only touch the integer part.
//! Chains are kept in a canonical form: translations are moved past iterates
//! (a lift commutes with integer translations), adjacent iterates of one map
//! are merged, and adjacent inverse steps cancel. Two chains describing the same
//! word therefore evaluate bit-identically.

use std::sync::Arc;

use crate::circle_map::CircleMapLift;
use crate::numerics::{Jet3, Scalar};

/// One primitive step of a chain, applied left to right.
#[derive(Clone, Debug)]
pub enum Step {
    /// `count` applications of the base map.
    Iterate {
        /// The lift.
        map: Arc<CircleMapLift>,
        /// Number of applications.
        count: u64,
    },
    /// `x ↦ x + m`.
    Translate(i64),
    /// `x ↦ αx + β`.
    Affine {
        /// Slope.
        alpha: Scalar,
        /// Offset.
        beta: Scalar,
    },
    /// `x ↦ (x − β)/α`, the inverse of the matching affine step.
    AffineInv {
        /// Slope of the inverted map.
        alpha: Scalar,
        /// Offset of the inverted map.
        beta: Scalar,
    },
    /// `x ↦ −x`.
    Mirror,
}

fn same_map(a: &Arc<CircleMapLift>, b: &Arc<CircleMapLift>) -> bool {
    Arc::ptr_eq(a, b) || a.same_as(b)
}

/// A monotone branch given as an exact word in primitive steps, with its domain.
#[derive(Clone, Debug)]
pub struct CompositionChain {
    steps: Vec<Step>,
    domain: (Scalar, Scalar),
}

impl CompositionChain {
    /// The identity chain on `[lo, hi]`.
    pub fn identity(lo: Scalar, hi: Scalar) -> Self {
        CompositionChain { steps: Vec::new(), domain: (lo, hi) }
    }

    /// `T^{shift} ∘ f^{count}` on `[lo, hi]`.
    pub fn iterate(map: Arc<CircleMapLift>, count: u64, shift: i64, lo: Scalar, hi: Scalar) -> Self {
        let mut c = CompositionChain::identity(lo, hi);
        c.push(Step::Iterate { map, count });
        c.push(Step::Translate(shift));
        c
    }

    /// Steps in application order.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Domain `[lo, hi]`.
    pub fn domain(&self) -> (&Scalar, &Scalar) {
        (&self.domain.0, &self.domain.1)
    }

    /// Same word on a new domain.
    pub fn with_domain(&self, lo: Scalar, hi: Scalar) -> Self {
        CompositionChain { steps: self.steps.clone(), domain: (lo, hi) }
    }

    /// Total number of base-map applications.
    pub fn base_evaluations(&self) -> u64 {
        self.steps
            .iter()
            .map(|s| if let Step::Iterate { count, .. } = s { *count } else { 0 })
            .sum()
    }

    /// Appends a step, keeping the canonical form.
    pub fn push(&mut self, step: Step) {
        match step {
            Step::Translate(0) => {}
            Step::Translate(m) => {
                if let Some(Step::Translate(k)) = self.steps.last_mut() {
                    *k += m;
                    if *k == 0 {
                        self.steps.pop();
                    }
                } else {
                    self.steps.push(Step::Translate(m));
                }
            }
            Step::Iterate { count: 0, .. } => {}
            Step::Iterate { map, count } => match self.steps.last_mut() {
                Some(Step::Translate(_)) => {
                    let t = self.steps.pop().expect("nonempty");
                    self.push(Step::Iterate { map, count });
                    self.push(t);
                }
                Some(Step::Iterate { map: m2, count: c2 }) if same_map(m2, &map) => {
                    *c2 += count;
                }
                _ => self.steps.push(Step::Iterate { map, count }),
            },
            Step::Mirror => match self.steps.last() {
                Some(Step::Mirror) => {
                    self.steps.pop();
                }
                Some(Step::Translate(m)) => {
                    let m = *m;
                    self.steps.pop();
                    self.push(Step::Mirror);
                    self.push(Step::Translate(-m));
                }
                _ => self.steps.push(Step::Mirror),
            },
            Step::Affine { alpha, beta } => match self.steps.last() {
                Some(Step::AffineInv { alpha: a, beta: b }) if *a == alpha && *b == beta => {
                    self.steps.pop();
                }
                _ => self.steps.push(Step::Affine { alpha, beta }),
            },
            Step::AffineInv { alpha, beta } => match self.steps.last() {
                Some(Step::Affine { alpha: a, beta: b }) if *a == alpha && *b == beta => {
                    self.steps.pop();
                }
                _ => self.steps.push(Step::AffineInv { alpha, beta }),
            },
        }
    }

    /// The composition "first `self`, then `next`" on the domain of `self`.
    pub fn then(&self, next: &CompositionChain) -> CompositionChain {
        let mut c = self.clone();
        for s in &next.steps {
            c.push(s.clone());
        }
        c
    }

    /// Conjugation `M ∘ self ∘ M` with `M(x) = −x`, on the mirrored domain.
    pub fn mirrored(&self) -> CompositionChain {
        let mut c = CompositionChain::identity(-&self.domain.1, -&self.domain.0);
        c.push(Step::Mirror);
        for s in &self.steps {
            c.push(s.clone());
        }
        c.push(Step::Mirror);
        c
    }

    /// Conjugation `H ∘ self ∘ H^{−1}` with `H(x) = x/s`, `s > 0`.
    pub fn rescaled(&self, s: &Scalar) -> CompositionChain {
        let zero = Scalar::zero(s.prec());
        let mut c = CompositionChain::identity(&self.domain.0 / s, &self.domain.1 / s);
        c.push(Step::Affine { alpha: s.clone(), beta: zero.clone() });
        for st in &self.steps {
            c.push(st.clone());
        }
        c.push(Step::AffineInv { alpha: s.clone(), beta: zero });
        c
    }

    /// Value at `x`.
    pub fn value(&self, x: &Scalar) -> Scalar {
        let (mut int, mut frac) = x.split_nearest();
        for s in &self.steps {
            match s {
                Step::Iterate { map, count } => {
                    for _ in 0..*count {
                        let (k, r) = frac.split_nearest();
                        int += k;
                        frac = map.value(&r);
                    }
                }
                Step::Translate(m) => int += *m,
                Step::Affine { alpha, beta } => {
                    let v = (&frac + int) * alpha + beta;
                    let (k, r) = v.split_nearest();
                    int = k;
                    frac = r;
                }
                Step::AffineInv { alpha, beta } => {
                    let v = ((&frac + int) - beta) / alpha;
                    let (k, r) = v.split_nearest();
                    int = k;
                    frac = r;
                }
                Step::Mirror => {
                    int = -int;
                    frac = -frac;
                }
            }
        }
        frac + int
    }

    /// Jet of the chain at the point carried by `seed`, composed with `seed`.
    pub fn eval_jet(&self, seed: &Jet3) -> Jet3 {
        let (mut int, frac) = seed.f.split_nearest();
        let mut jet = Jet3::new(frac, seed.d1.clone(), seed.d2.clone(), seed.d3.clone());
        for s in &self.steps {
            match s {
                Step::Iterate { map, count } => {
                    for _ in 0..*count {
                        let (k, r) = jet.f.split_nearest();
                        int += k;
                        jet.f = r;
                        jet = map.evaluate(&jet.f).compose(&jet);
                    }
                }
                Step::Translate(m) => int += *m,
                Step::Affine { alpha, beta } => {
                    jet.f = &jet.f + int;
                    jet = jet.scale_shift(alpha, beta);
                    let (k, r) = jet.f.split_nearest();
                    int = k;
                    jet.f = r;
                }
                Step::AffineInv { alpha, beta } => {
                    jet.f = &jet.f + int;
                    jet = Jet3::new(
                        (&jet.f - beta) / alpha,
                        &jet.d1 / alpha,
                        &jet.d2 / alpha,
                        &jet.d3 / alpha,
                    );
                    let (k, r) = jet.f.split_nearest();
                    int = k;
                    jet.f = r;
                }
                Step::Mirror => {
                    int = -int;
                    jet = jet.negate();
                }
            }
        }
        jet.f = &jet.f + int;
        jet
    }

    /// Jet at `x` (seeded with the identity).
    pub fn jet(&self, x: &Scalar) -> Jet3 {
        self.eval_jet(&Jet3::identity(x.clone()))
    }
}
