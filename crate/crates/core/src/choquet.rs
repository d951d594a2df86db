// SPDX-License-Identifier: Apache-2.0

//! Choquet integrals against the dyadic content via the layer-cake formula
//! `∫_Ω f dH = ∫_0^∞ H({x ∈ Ω : f(x) > t}) dt`.
//!
//! For a grid function the distribution is a step function: between two
//! consecutive distinct values `t_{i-1} < t_i` the strict superlevel set
//! `{f > t}` equals `{f ≥ t_i}`, so each plateau is one content evaluation.

use serde::{Deserialize, Serialize};

use crate::content::{content_of_codes, ContentAccumulator};
use crate::error::{check_delta, Error, Result};
use crate::grid::{Grid, GridFunction, GridSet};

/// Slack used by the inequality checks.
pub const CHECK_TOLERANCE: f64 = 1e-9;

/// Right-continuous non-increasing step function: value `plateaus[i]` on
/// `[breakpoints[i], breakpoints[i + 1])` and zero from the last breakpoint on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub breakpoints: Vec<f64>,
    pub plateaus: Vec<f64>,
}

impl StepFunction {
    pub fn zero() -> Self {
        Self {
            breakpoints: vec![0.0],
            plateaus: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.plateaus.is_empty()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.plateaus.first().copied().unwrap_or(0.0);
        }
        // index of the last breakpoint <= t
        let k = self.breakpoints.partition_point(|&b| b <= t);
        if k == 0 || k > self.plateaus.len() {
            0.0
        } else {
            self.plateaus[k - 1]
        }
    }

    /// `Σ (t_i - t_{i-1}) v_i`.
    pub fn integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.plateaus)
            .map(|(w, &v)| (w[1] - w[0]) * v)
            .sum()
    }

    /// Right end of the support.
    pub fn support_end(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// Rows `(t, content)` with the value of each plateau at its left end,
    /// closed by `(t_m, 0)`.
    pub fn csv(&self) -> String {
        let mut out = String::from("t,content\n");
        for (t, v) in self.breakpoints.iter().zip(&self.plateaus) {
            out.push_str(&format!("{t},{v}\n"));
        }
        out.push_str(&format!("{},0\n", self.support_end()));
        out
    }
}

/// Layer cake over explicit `(value, morton code)` entries. Values must be
/// non-negative; zeros are ignored.
pub(crate) fn layer_cake(grid: &Grid, mut entries: Vec<(f64, u64)>, delta: f64) -> StepFunction {
    entries.retain(|e| e.0 > 0.0);
    if entries.is_empty() {
        return StepFunction::zero();
    }
    entries.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut acc = ContentAccumulator::new_unchecked(grid, delta);
    // descending (t_i, content{f >= t_i})
    let mut levels: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < entries.len() {
        let t = entries[i].0;
        while i < entries.len() && entries[i].0 == t {
            acc.insert(entries[i].1);
            i += 1;
        }
        levels.push((t, acc.value()));
    }
    levels.reverse();
    let mut breakpoints = Vec::with_capacity(levels.len() + 1);
    breakpoints.push(0.0);
    breakpoints.extend(levels.iter().map(|l| l.0));
    StepFunction {
        breakpoints,
        plateaus: levels.iter().map(|l| l.1).collect(),
    }
}

fn entries_on(f: &GridFunction, omega: &GridSet) -> Result<Vec<(f64, u64)>> {
    if f.grid() != omega.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    Ok(omega
        .cells()
        .iter()
        .map(|&c| (f.value(c), c))
        .filter(|e| e.0 != 0.0)
        .map(|(v, c)| (v, grid.morton(c)))
        .collect())
}

fn entries_all(f: &GridFunction, g: impl Fn(f64) -> f64) -> Vec<(f64, u64)> {
    let grid = f.grid();
    f.values()
        .iter()
        .enumerate()
        .map(|(c, &v)| (g(v), c as u64))
        .filter(|e| e.0 != 0.0)
        .map(|(v, c)| (v, grid.morton(c)))
        .collect()
}

/// Distribution `t ↦ H^δ({x ∈ Ω : f(x) > t})` of a non-negative function.
pub fn distribution(f: &GridFunction, omega: &GridSet, delta: f64) -> Result<StepFunction> {
    check_delta(delta, f.grid().n())?;
    f.ensure_nonnegative()?;
    Ok(layer_cake(f.grid(), entries_on(f, omega)?, delta))
}

pub fn choquet_integral(f: &GridFunction, omega: &GridSet, delta: f64) -> Result<f64> {
    Ok(distribution(f, omega, delta)?.integral())
}

/// Integral of a non-negative function over the whole root.
pub fn choquet_integral_root(f: &GridFunction, delta: f64) -> Result<f64> {
    check_delta(delta, f.grid().n())?;
    f.ensure_nonnegative()?;
    Ok(layer_cake(f.grid(), entries_all(f, |v| v), delta).integral())
}

/// `‖f‖₁ = ∫ |f| dH^δ` over the root. Accepts signed functions.
pub fn nl1_norm(f: &GridFunction, delta: f64) -> Result<f64> {
    check_delta(delta, f.grid().n())?;
    Ok(layer_cake(f.grid(), entries_all(f, f64::abs), delta).integral())
}

/// Content of the strict superlevel set `{x ∈ Ω : f(x) > t}`.
pub fn superlevel_content(f: &GridFunction, omega: &GridSet, delta: f64, t: f64) -> Result<f64> {
    check_delta(delta, f.grid().n())?;
    let mut codes: Vec<u64> = entries_on(f, omega)?
        .into_iter()
        .filter(|e| e.0 > t)
        .map(|e| e.1)
        .collect();
    codes.sort_unstable();
    Ok(content_of_codes(f.grid(), &codes, delta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublinearityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `∫ Σ f_i` with `Σ ∫ f_i`.
pub fn check_sublinearity(fs: &[GridFunction], omega: &GridSet, delta: f64) -> Result<SublinearityReport> {
    let Some(first) = fs.first() else {
        return Ok(SublinearityReport {
            lhs: 0.0,
            rhs: 0.0,
            holds: true,
        });
    };
    let mut sum = first.clone();
    let mut rhs = choquet_integral(first, omega, delta)?;
    for f in &fs[1..] {
        sum = sum.add(f)?;
        rhs += choquet_integral(f, omega, delta)?;
    }
    let lhs = choquet_integral(&sum, omega, delta)?;
    Ok(SublinearityReport {
        lhs,
        rhs,
        holds: lhs <= rhs + CHECK_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneConvergenceReport {
    pub integrals: Vec<f64>,
    /// Integral of the pointwise limit of the chain.
    pub limit_integral: f64,
    pub nondecreasing: bool,
    pub holds: bool,
}

/// Checks that the integrals of a cellwise increasing chain increase to the
/// integral of its pointwise limit. At fixed resolution the limit is the
/// last element, so equality is exact.
pub fn check_monotone_convergence(
    chain: &[GridFunction],
    omega: &GridSet,
    delta: f64,
) -> Result<MonotoneConvergenceReport> {
    if chain.is_empty() {
        return Err(Error::InvalidArgument("empty chain".into()));
    }
    for (step, w) in chain.windows(2).enumerate() {
        if w[0].grid() != w[1].grid() {
            return Err(Error::GridMismatch);
        }
        if let Some(i) = w[0].values().iter().zip(w[1].values()).position(|(a, b)| a > b) {
            return Err(Error::NotMonotone {
                step: step + 1,
                index: i as u64,
            });
        }
    }
    let integrals = chain
        .iter()
        .map(|f| choquet_integral(f, omega, delta))
        .collect::<Result<Vec<_>>>()?;
    let grid = chain[0].grid().clone();
    let limit_values = (0..grid.cell_count() as usize)
        .map(|i| chain.iter().map(|f| f.values()[i]).fold(0.0, f64::max))
        .collect();
    let limit = GridFunction::new(grid, limit_values)?;
    let limit_integral = choquet_integral(&limit, omega, delta)?;
    let nondecreasing = integrals.windows(2).all(|w| w[0] <= w[1] + CHECK_TOLERANCE);
    let last = *integrals.last().unwrap_or(&0.0);
    Ok(MonotoneConvergenceReport {
        holds: nondecreasing && (last - limit_integral).abs() <= CHECK_TOLERANCE,
        integrals,
        limit_integral,
        nondecreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FatouReport {
    /// `∫ liminf f_i`.
    pub lhs: f64,
    /// `liminf ∫ f_i`.
    pub rhs: f64,
    pub holds: bool,
}

/// Fatou check for an eventually periodic sequence `prefix, period, period, …`.
/// Both lim infs are minima over the period.
pub fn check_fatou(
    prefix: &[GridFunction],
    period: &[GridFunction],
    omega: &GridSet,
    delta: f64,
) -> Result<FatouReport> {
    let Some(first) = period.first() else {
        return Err(Error::InvalidArgument("empty period".into()));
    };
    if prefix.iter().chain(period).any(|f| f.grid() != first.grid()) {
        return Err(Error::GridMismatch);
    }
    let mut liminf = first.clone();
    for f in &period[1..] {
        liminf = liminf.zip_with(f, f64::min)?;
    }
    let lhs = choquet_integral(&liminf, omega, delta)?;
    let rhs = period
        .iter()
        .map(|f| choquet_integral(f, omega, delta))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(FatouReport {
        lhs,
        rhs,
        holds: lhs <= rhs + CHECK_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevReport {
    pub t: f64,
    pub content_superlevel: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `H^δ({f > t}) ≤ ∫ f / t`.
pub fn chebyshev_bound(f: &GridFunction, omega: &GridSet, delta: f64, t: f64) -> Result<ChebyshevReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold {t} must be positive")));
    }
    let content_superlevel = superlevel_content(f, omega, delta, t)?;
    let bound = choquet_integral(f, omega, delta)? / t;
    Ok(ChebyshevReport {
        t,
        content_superlevel,
        bound,
        holds: content_superlevel <= bound + CHECK_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityReport {
    pub choquet: f64,
    pub lebesgue: f64,
    pub ratio: f64,
}

/// At `δ = n` the discrete content is Lebesgue measure, so the Choquet
/// integral of `|f|` equals the cell sum `Σ |f| h^n`.
pub fn lebesgue_comparability(f: &GridFunction, delta: f64) -> Result<ComparabilityReport> {
    let n = f.grid().n();
    if delta != n as f64 {
        return Err(Error::InvalidArgument(format!(
            "comparability needs delta = n = {n}, got {delta}"
        )));
    }
    let choquet = nl1_norm(f, delta)?;
    let volume = f.grid().cell_side().powi(n as i32);
    let lebesgue = f.values().iter().map(|v| v.abs()).sum::<f64>() * volume;
    let ratio = if lebesgue == 0.0 { 1.0 } else { choquet / lebesgue };
    Ok(ComparabilityReport {
        choquet,
        lebesgue,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::dyadic_content;

    fn unit2(finest: i32) -> Grid {
        Grid::unit(2, 0, finest).unwrap()
    }

    #[test]
    fn zero_function() {
        let g = unit2(-2);
        let f = GridFunction::zeros(g.clone()).unwrap();
        let d = distribution(&f, &GridSet::full(g), 1.0).unwrap();
        assert!(d.is_zero());
        assert_eq!(d.integral(), 0.0);
    }

    #[test]
    fn indicator_has_single_plateau() {
        let g = unit2(-3);
        let e = GridSet::from_centers(g.clone(), |x| x[0] < 0.3 && x[1] > 0.4);
        let omega = GridSet::from_centers(g.clone(), |x| x[1] < 0.8);
        let f = GridFunction::indicator(&e).unwrap();
        let d = distribution(&f, &omega, 1.5).unwrap();
        let expected = dyadic_content(&e.intersection(&omega).unwrap(), 1.5).unwrap().value;
        assert_eq!(d.breakpoints, vec![0.0, 1.0]);
        assert_eq!(d.plateaus, vec![expected]);
    }

    #[test]
    fn two_level_staircase() {
        let g = unit2(-1);
        let a = g.index_of(&[0, 0]);
        let b = g.index_of(&[1, 0]);
        let mut v = vec![0.0; 4];
        v[a as usize] = 2.0;
        v[b as usize] = 1.0;
        let f = GridFunction::new(g.clone(), v).unwrap();
        let d = distribution(&f, &GridSet::full(g.clone()), 1.0).unwrap();
        assert_eq!(d.breakpoints, vec![0.0, 1.0, 2.0]);
        assert_eq!(d.plateaus, vec![1.0, 0.5]);
        assert_eq!(d.integral(), 1.5);
        assert_eq!(choquet_integral_root(&f, 1.0).unwrap(), 1.5);
    }

    #[test]
    fn step_eval_is_right_continuous() {
        let s = StepFunction {
            breakpoints: vec![0.0, 1.0, 2.0],
            plateaus: vec![3.0, 1.0],
        };
        assert_eq!(s.eval(0.0), 3.0);
        assert_eq!(s.eval(0.999), 3.0);
        assert_eq!(s.eval(1.0), 1.0);
        assert_eq!(s.eval(2.0), 0.0);
        assert_eq!(s.csv(), "t,content\n0,3\n1,1\n2,0\n");
    }

    #[test]
    fn negative_values_rejected_except_norm() {
        let g = unit2(-1);
        let f = GridFunction::signed(g.clone(), vec![1.0, -2.0, 0.0, 0.5]).unwrap();
        assert!(matches!(
            choquet_integral(&f, &GridSet::full(g.clone()), 1.0),
            Err(Error::NegativeValue { .. })
        ));
        let n = nl1_norm(&f, 1.0).unwrap();
        assert_eq!(n, nl1_norm(&f.abs(), 1.0).unwrap());
    }

    #[test]
    fn norm_of_cell_indicator() {
        let g = unit2(-3);
        let f = GridFunction::indicator(&GridSet::new(g, [19]).unwrap()).unwrap();
        assert!((nl1_norm(&f, 0.7).unwrap() - 0.125f64.powf(0.7)).abs() < 1e-15);
    }

    #[test]
    fn halves_are_strictly_sublinear_below_n() {
        let g = unit2(-1);
        let left = GridSet::from_centers(g.clone(), |x| x[0] < 0.5);
        let right = GridSet::from_centers(g.clone(), |x| x[0] >= 0.5);
        let fs = [
            GridFunction::indicator(&left).unwrap(),
            GridFunction::indicator(&right).unwrap(),
        ];
        let r = check_sublinearity(&fs, &GridSet::full(g), 1.0).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, 1.0);
        assert_eq!(r.rhs, 2.0);
    }

    #[test]
    fn monotone_chain_rejects_decrease() {
        let g = unit2(-1);
        let a = GridFunction::new(g.clone(), vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let b = GridFunction::new(g.clone(), vec![1.0, 0.5, 0.0, 0.0]).unwrap();
        assert!(matches!(
            check_monotone_convergence(&[a, b], &GridSet::full(g), 1.0),
            Err(Error::NotMonotone { step: 1, index: 1 })
        ));
    }

    #[test]
    fn chebyshev_rejects_nonpositive_threshold() {
        let g = unit2(-1);
        let f = GridFunction::constant(g.clone(), 1.0).unwrap();
        assert!(chebyshev_bound(&f, &GridSet::full(g), 1.0, 0.0).is_err());
    }

    #[test]
    fn comparability_needs_full_dimension() {
        let g = unit2(-2);
        let f = GridFunction::constant(g, 1.0).unwrap();
        let r = lebesgue_comparability(&f, 2.0).unwrap();
        assert_eq!((r.choquet, r.lebesgue, r.ratio), (1.0, 1.0, 1.0));
        assert!(lebesgue_comparability(&f, 1.0).is_err());
    }
}
