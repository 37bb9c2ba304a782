//! Critical commuting pairs, extraction from circle maps, period and renormalization.
//!
//! Layout convention: `η` is always the branch on `[0, ξ(0)]` (right of the
//! critical point) and `ξ` the branch on `[η(0), 0]`. The pair is in case I
//! when `η(ξ(0)) > 0` and in case II when `η(ξ(0)) < 0`. Operations are written
//! for case I and transported to case II by the mirror swap
//! `(η, ξ) ↦ (MξM, MηM)` with `M(x) = −x`.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use super::chain::CompositionChain;
use crate::circle_map::CircleMapLift;
use crate::error::{LabError, Result};
use crate::numerics::{grid, ContinuedFractionState, Jet3, Scalar};

/// Period of a pair: the number of `η` steps taken by `ξ(0)` before crossing 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Period {
    /// Finite period `a`.
    Finite(u64),
    /// No crossing (fixed point of `η` or budget exhausted).
    Infinite,
}

impl Period {
    /// The finite value, if any.
    pub fn finite(self) -> Option<u64> {
        match self {
            Period::Finite(a) => Some(a),
            Period::Infinite => None,
        }
    }
}

/// Orientation case of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    /// `η(ξ(0)) > 0`.
    One,
    /// `η(ξ(0)) < 0`.
    Two,
}

/// Default budget of `η` applications when computing a period.
pub const DEFAULT_PERIOD_BUDGET: u64 = 1 << 20;

/// Provenance recorded with a pair.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PairMeta {
    /// Extraction level, if extracted from a map.
    pub level: Option<usize>,
    /// Digit prefix of the source map.
    pub digits: Vec<u64>,
}

/// A critical commuting pair `ζ = (η, ξ)`.
#[derive(Clone, Debug)]
pub struct CommutingPair {
    eta: CompositionChain,
    xi: CompositionChain,
    eta0: Scalar,
    xi0: Scalar,
    criticality: Option<u32>,
    meta: PairMeta,
    period_cache: Arc<OnceLock<(Period, Vec<Scalar>)>>,
}

/// Outcome of one validation clause.
#[derive(Clone, Debug, Serialize)]
pub struct ClauseCheck {
    /// Clause name.
    pub clause: &'static str,
    /// Measured residual (or margin).
    pub value: Scalar,
    /// Whether the clause holds.
    pub ok: bool,
}

/// Validation results for all clauses of the pair definition.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    /// Per-clause outcomes.
    pub clauses: Vec<ClauseCheck>,
}

impl ValidationReport {
    /// True when every clause holds.
    pub fn ok(&self) -> bool {
        self.clauses.iter().all(|c| c.ok)
    }
}

/// Tolerance `τ_pair = 2^(32 − bits)`.
pub fn tau_pair(prec: u32) -> Scalar {
    Scalar::pow2(32 - prec as i32, prec)
}

impl CommutingPair {
    /// Builds a pair from its two branches; domains are reset from the values at 0.
    pub fn from_chains(
        eta: CompositionChain,
        xi: CompositionChain,
        criticality: Option<u32>,
        meta: PairMeta,
    ) -> Self {
        let prec = eta.domain().0.prec();
        let zero = Scalar::zero(prec);
        let eta0 = eta.value(&zero);
        let xi0 = xi.value(&zero);
        CommutingPair::assemble(eta, xi, eta0, xi0, criticality, meta)
    }

    fn assemble(
        eta: CompositionChain,
        xi: CompositionChain,
        eta0: Scalar,
        xi0: Scalar,
        criticality: Option<u32>,
        meta: PairMeta,
    ) -> Self {
        let prec = eta0.prec();
        let zero = Scalar::zero(prec);
        let eta = eta.with_domain(zero.clone(), xi0.clone());
        let xi = xi.with_domain(eta0.clone(), zero);
        CommutingPair { eta, xi, eta0, xi0, criticality, meta, period_cache: Arc::new(OnceLock::new()) }
    }

    /// The right branch.
    pub fn eta(&self) -> &CompositionChain {
        &self.eta
    }

    /// The left branch.
    pub fn xi(&self) -> &CompositionChain {
        &self.xi
    }

    /// `η(0)` (negative).
    pub fn eta0(&self) -> &Scalar {
        &self.eta0
    }

    /// `ξ(0)` (positive).
    pub fn xi0(&self) -> &Scalar {
        &self.xi0
    }

    /// Criticality index `d` (criticality `2d+1`).
    pub fn criticality(&self) -> Option<u32> {
        self.criticality
    }

    /// Provenance.
    pub fn meta(&self) -> &PairMeta {
        &self.meta
    }

    /// Working precision.
    pub fn prec(&self) -> u32 {
        self.eta0.prec()
    }

    /// Evaluates the pair as a single map on `[η(0), ξ(0)]`.
    pub fn value(&self, x: &Scalar) -> Scalar {
        if x.signum_i() >= 0 {
            self.eta.value(x)
        } else {
            self.xi.value(x)
        }
    }

    /// Jet of the pair at `x` (`η` for `x ≥ 0`, `ξ` for `x < 0`).
    pub fn jet(&self, x: &Scalar) -> Jet3 {
        if x.signum_i() >= 0 {
            self.eta.jet(x)
        } else {
            self.xi.jet(x)
        }
    }

    /// Cached period, if it has been computed.
    pub fn cached_period(&self) -> Option<Period> {
        self.period_cache.get().map(|(p, _)| *p)
    }

    /// The common value `η(ξ(0))`.
    pub fn composite_value(&self) -> Scalar {
        self.xi.then(&self.eta).value(&Scalar::zero(self.prec()))
    }

    /// Orientation case from the sign of `η(ξ(0))`.
    pub fn case(&self) -> Result<Case> {
        match self.composite_value().signum_i() {
            1 => Ok(Case::One),
            -1 => Ok(Case::Two),
            _ => Err(LabError::Invariant("η(ξ(0)) = 0: degenerate pair".into())),
        }
    }

    /// The mirror swap `(η, ξ) ↦ (MξM, MηM)`, which exchanges cases I and II.
    pub fn mirror_swap(&self) -> CommutingPair {
        let eta = self.xi.mirrored();
        let xi = self.eta.mirrored();
        let out = CommutingPair::assemble(
            eta,
            xi,
            -&self.xi0,
            -&self.eta0,
            self.criticality,
            self.meta.clone(),
        );
        if let Some((p, orbit)) = self.period_cache.get() {
            let _ = out.period_cache.set((*p, orbit.iter().map(|x| -x).collect()));
        }
        out
    }

    /// The same pair in case I (mirror-swapped if necessary).
    pub fn to_case_one(&self) -> Result<CommutingPair> {
        Ok(match self.case()? {
            Case::One => self.clone(),
            Case::Two => self.mirror_swap(),
        })
    }

    /// Period and orbit `x_i = η^i(ξ(0))` (case I) or the mirrored analogue (case II).
    fn period_and_orbit(&self, budget: u64) -> Result<&(Period, Vec<Scalar>)> {
        if let Some(v) = self.period_cache.get() {
            return Ok(v);
        }
        let computed = match self.case()? {
            Case::One => period_case_one(&self.eta, &self.xi0, budget)?,
            Case::Two => {
                let (p, orbit) = period_case_one(&self.xi.mirrored(), &(-&self.eta0), budget)?;
                (p, orbit.into_iter().map(|x| -x).collect())
            }
        };
        let _ = self.period_cache.set(computed);
        Ok(self.period_cache.get().expect("just set"))
    }

    /// The period `χ(ζ)`.
    pub fn period(&self) -> Result<Period> {
        Ok(self.period_and_orbit(DEFAULT_PERIOD_BUDGET)?.0)
    }

    /// The period with an explicit iteration budget.
    pub fn period_with_budget(&self, budget: u64) -> Result<Period> {
        Ok(self.period_and_orbit(budget)?.0)
    }

    /// Boundary orbit `x_0 = ξ(0), x_{i+1} = η(x_i)` up to the first negative point
    /// (case I); in case II the orbit of `η(0)` under `ξ`.
    pub fn boundary_orbit(&self) -> Result<Vec<Scalar>> {
        Ok(self.period_and_orbit(DEFAULT_PERIOD_BUDGET)?.1.clone())
    }

    /// Pre-renormalization `pR(ζ)`.
    pub fn pre_renormalize(&self) -> Result<CommutingPair> {
        match self.case()? {
            Case::One => self.pre_renormalize_case_one(),
            Case::Two => Ok(self.mirror_swap().pre_renormalize_case_one()?.mirror_swap()),
        }
    }

    fn pre_renormalize_case_one(&self) -> Result<CommutingPair> {
        let a = self.period()?.finite().ok_or(LabError::NotRenormalizable)?;
        let mut new_xi = self.xi.clone();
        for _ in 0..a {
            new_xi = new_xi.then(&self.eta);
        }
        let zero = Scalar::zero(self.prec());
        let new_xi0 = new_xi.value(&zero);
        let meta = PairMeta {
            level: self.meta.level.map(|l| l + 1),
            digits: self.meta.digits.clone(),
        };
        Ok(CommutingPair::assemble(
            self.eta.clone(),
            new_xi,
            self.eta0.clone(),
            new_xi0,
            self.criticality,
            meta,
        ))
    }

    /// Conjugation by the homothety `x ↦ x/s`.
    pub fn rescale(&self, s: &Scalar) -> CommutingPair {
        if *s == 1i64 {
            return self.clone();
        }
        let out = CommutingPair::assemble(
            self.eta.rescaled(s),
            self.xi.rescaled(s),
            &self.eta0 / s,
            &self.xi0 / s,
            self.criticality,
            self.meta.clone(),
        );
        if let Some((p, orbit)) = self.period_cache.get() {
            let _ = out.period_cache.set((*p, orbit.iter().map(|x| x / s).collect()));
        }
        out
    }

    /// Conjugation `H_α ∘ ζ ∘ H_α^{−1}` with `H_α(x) = αx`.
    pub fn conjugate_homothety(&self, alpha: &Scalar) -> CommutingPair {
        self.rescale(&alpha.recip())
    }

    /// Normalization: rescale so that `η(0) = −1`.
    pub fn normalize(&self) -> CommutingPair {
        let s = self.eta0.abs();
        self.rescale(&s)
    }

    /// Renormalization `R(ζ) = normalize(pR(ζ))`.
    pub fn renormalize(&self) -> Result<CommutingPair> {
        Ok(self.pre_renormalize()?.normalize())
    }

    /// Checks every clause of the pair definition at tolerance `τ_pair`.
    pub fn validation_report(&self) -> ValidationReport {
        let prec = self.prec();
        let tau = tau_pair(prec);
        let zero = Scalar::zero(prec);
        let scale = self.xi0.clone().max_of(self.eta0.abs()).max_of(Scalar::one(prec));
        let mut clauses = Vec::new();
        let order_ok = self.xi0.signum_i() > 0 && self.eta0.signum_i() < 0;
        clauses.push(ClauseCheck {
            clause: "xi(0) > 0 > eta(0)",
            value: self.xi0.clone().min_of(-&self.eta0),
            ok: order_ok,
        });
        let ex = self.eta.value(&self.xi0);
        let xe = self.xi.value(&self.eta0);
        let comm = (&ex - &xe).abs();
        clauses.push(ClauseCheck {
            clause: "commutation eta(xi(0)) = xi(eta(0)) != 0",
            value: comm.clone(),
            ok: comm <= &tau * &scale && !ex.is_zero(),
        });
        let mut mono_min: Option<Scalar> = None;
        for (chain, lo, hi) in [(&self.eta, &zero, &self.xi0), (&self.xi, &self.eta0, &zero)] {
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            for x in grid::interior_points(lo, hi, 17) {
                let d = chain.jet(&x).d1;
                mono_min = Some(match mono_min {
                    None => d,
                    Some(m) => m.min_of(d),
                });
            }
        }
        let mono_min = mono_min.unwrap_or_else(|| Scalar::one(prec));
        clauses.push(ClauseCheck { clause: "monotone off 0", value: mono_min.clone(), ok: mono_min.signum_i() > 0 });
        let je = self.eta.jet(&zero);
        let jx = self.xi.jet(&zero);
        if let Some(d) = self.criticality {
            let crit = je.d1.abs().max_of(jx.d1.abs());
            clauses.push(ClauseCheck {
                clause: "critical at 0 (first derivatives vanish)",
                value: crit.clone(),
                ok: crit <= &tau * &(je.d3.abs().max_of(jx.d3.abs()).max_of(Scalar::one(prec))),
            });
            if d == 1 {
                let second = je.d2.abs().max_of(jx.d2.abs());
                let third = je.d3.abs().min_of(jx.d3.abs());
                let big = je.d3.abs().max_of(jx.d3.abs()).max_of(Scalar::one(prec));
                clauses.push(ClauseCheck {
                    clause: "cubic critical point (second vanish, third nonzero)",
                    value: second.clone(),
                    ok: second <= &tau * &big && third > &tau * &big,
                });
            }
        }
        let a = self.xi.then(&self.eta).jet(&zero);
        let b = self.eta.then(&self.xi).jet(&zero);
        let mut worst = Scalar::zero(prec);
        let mut ok = true;
        for k in 1..=3 {
            let (u, v) = (a.component(k), b.component(k));
            let diff = (u - v).abs();
            let mag = u.abs().max_of(v.abs()).max_of(Scalar::one(prec));
            if diff > &tau * &mag {
                ok = false;
            }
            worst = worst.max_of(diff);
        }
        clauses.push(ClauseCheck { clause: "derivative matching of compositions at 0", value: worst, ok });
        ValidationReport { clauses }
    }

    /// Runs [`validation_report`](Self::validation_report) and turns failures into an error.
    pub fn validate(&self) -> Result<()> {
        let rep = self.validation_report();
        if rep.ok() {
            return Ok(());
        }
        let failed: Vec<String> = rep
            .clauses
            .iter()
            .filter(|c| !c.ok)
            .map(|c| format!("{} (measured {})", c.clause, c.value.to_sci_string(6)))
            .collect();
        Err(LabError::Invariant(format!("pair validation failed: {}", failed.join("; "))))
    }
}

fn period_case_one(eta: &CompositionChain, xi0: &Scalar, budget: u64) -> Result<(Period, Vec<Scalar>)> {
    let mut orbit = vec![xi0.clone()];
    let mut x = xi0.clone();
    for i in 0..budget {
        let y = eta.value(&x);
        if y.is_zero() {
            return Err(LabError::PeriodicOrbit { level: 0, period: i + 1 });
        }
        if y >= x {
            orbit.push(y);
            return Ok((Period::Infinite, orbit));
        }
        orbit.push(y.clone());
        if y.signum_i() < 0 {
            return Ok((Period::Finite(i), orbit));
        }
        x = y;
    }
    Ok((Period::Infinite, orbit))
}

/// The pair `(T^{−p_{n+1}} f^{q_{n+1}}, T^{−p_n} f^{q_n})` of level `n`, laid out
/// with `η` on the right (the two return maps exchange sides at odd levels).
pub fn extract_pair(map: &CircleMapLift, cf: &ContinuedFractionState, level: usize) -> Result<CommutingPair> {
    if cf.convergents.len() < level + 2 {
        return Err(LabError::Domain(format!(
            "extract_pair level {level} needs {} digits, have {}",
            level + 1,
            cf.digits.len()
        )));
    }
    let prec = map.prec();
    let shared = Arc::new(map.clone());
    let (p_n, q_n) = cf.convergents[level];
    let (p_m, q_m) = cf.convergents[level + 1];
    let zero = Scalar::zero(prec);
    let far = CompositionChain::iterate(shared.clone(), q_m as u64, -p_m, zero.clone(), zero.clone());
    let near = CompositionChain::iterate(shared, q_n as u64, -p_n, zero.clone(), zero);
    let (eta, xi) = if level % 2 == 0 { (far, near) } else { (near, far) };
    let meta = PairMeta { level: Some(level), digits: cf.digits.clone() };
    let pair = CommutingPair::from_chains(eta, xi, map.criticality_index(), meta);
    pair.validate()?;
    Ok(pair)
}

/// Digits `[χ(ζ), χ(Rζ), ...]`; the flag is false when an infinite period cut the list short.
pub fn pair_rotation_digits(pair: &CommutingPair, depth: usize) -> Result<(Vec<u64>, bool)> {
    let mut out = Vec::with_capacity(depth);
    let mut cur = pair.clone();
    for i in 0..depth {
        match cur.period()? {
            Period::Finite(a) => out.push(a),
            Period::Infinite => return Ok((out, false)),
        }
        if i + 1 < depth {
            cur = cur.pre_renormalize()?;
        }
    }
    Ok((out, true))
}
