//! Batch experiments: family scans, violation thresholds, the random-state
//! search for states with minimal CoA above 1/2 that fail to violate, and the
//! numerical bound checks relating τ, minimal CoA, σ and the Mermin value.
//!
//! Every batch item is a pure function of `(seed, index)` and results are
//! gathered in index order, so reports are identical for any worker count.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{coa_from_schmidt, pairwise_measures, MeasureReport};
use crate::mermin::{ghzw_mermin_curve, mermin_expectation, optimize_mermin, preset_settings, OptimizationConfig};
use crate::par::{map_indices, Execution};
use crate::states::{
    from_schmidt, sample_indexed, sample_schmidt, FamilyTemplate, PureState3, SamplingMode, StateSpec,
};
use crate::tol;

const HALF: f64 = 0.5;

/// One grid point of a family scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub parameter: f64,
    pub coa_min: f64,
    pub tau: f64,
    pub sigma: f64,
    /// Signed `<B>` per requested preset.
    pub preset_expectations: BTreeMap<String, f64>,
    /// Present when the scan ran the optimizer.
    pub optimized_value: Option<f64>,
    /// Optimized value (or, without optimization, the largest preset
    /// `|<B>|`) exceeds 2.
    pub violated: bool,
}

/// Evaluates measures and Mermin values along a one-parameter family.
pub fn scan_family(
    template: &FamilyTemplate,
    grid: &[f64],
    presets: &[&str],
    config: Option<&OptimizationConfig>,
) -> Result<Vec<ScanRow>> {
    let states = grid.iter().map(|&x| template.state(x)).collect::<Result<Vec<_>>>()?;
    let settings = presets
        .iter()
        .map(|&name| Ok((name.to_string(), preset_settings(name)?)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(c) = config {
        c.validate()?;
    }
    let exec = config.map(|c| c.execution).unwrap_or_default();

    map_indices(exec, grid.len(), |i| {
        let state = &states[i];
        let m = pairwise_measures(state)?;
        let mut preset_expectations = BTreeMap::new();
        for (name, s) in &settings {
            preset_expectations.insert(name.clone(), mermin_expectation(state, s)?);
        }
        let optimized_value = config.map(|c| optimize_mermin(state, c).map(|r| r.value)).transpose()?;
        let best_preset = preset_expectations.values().fold(0.0f64, |acc, v| acc.max(v.abs()));
        Ok(ScanRow {
            parameter: grid[i],
            coa_min: m.coa_min,
            tau: m.tau,
            sigma: m.sigma,
            preset_expectations,
            optimized_value,
            violated: optimized_value.unwrap_or(best_preset) > tol::MERMIN_CLASSICAL_BOUND,
        })
    })
    .into_iter()
    .collect()
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::invalid("a grid needs at least 2 points"));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(Error::invalid("grid bounds must be finite"));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
        .collect())
}

/// Formats with 12 significant digits, shortest representation.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded:?}")
}

/// Writes scan rows as CSV with header
/// `param,coa_min,tau,sigma,<presets>,optimized,violated`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], presets: &[&str], mut out: W) -> std::io::Result<()> {
    let mut header = vec!["param", "coa_min", "tau", "sigma"];
    header.extend_from_slice(presets);
    header.extend(["optimized", "violated"]);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let mut fields = vec![
            format_sig12(row.parameter),
            format_sig12(row.coa_min),
            format_sig12(row.tau),
            format_sig12(row.sigma),
        ];
        for p in presets {
            fields.push(
                row.preset_expectations
                    .get(*p)
                    .map(|v| format_sig12(*v))
                    .unwrap_or_default(),
            );
        }
        fields.push(row.optimized_value.map(format_sig12).unwrap_or_default());
        fields.push(row.violated.to_string());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// A scalar curve on the free-parameter range of a family.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// Closed-form `M(p)` of the GHZ:W family under the tilted preset.
    GhzwTilt,
    /// `|<B>|` of a preset along a family.
    Preset { template: FamilyTemplate, preset: String },
}

impl Curve {
    pub fn range(&self) -> (f64, f64) {
        match self {
            Curve::GhzwTilt => (0.0, 1.0),
            Curve::Preset { template, .. } => template.range(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Curve::GhzwTilt => ghzw_mermin_curve(x),
            Curve::Preset { template, preset } => {
                Ok(mermin_expectation(&template.state(x)?, &preset_settings(preset)?)?.abs())
            }
        }
    }
}

/// Where a curve exceeds 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationInterval {
    /// Start of the first violating region.
    pub lo: f64,
    /// End of the last violating region.
    pub hi: f64,
    /// False when `lo` is the start of the parameter range rather than a
    /// crossing of 2.
    pub lo_is_crossing: bool,
    pub hi_is_crossing: bool,
    /// All violating regions, in order.
    pub regions: Vec<(f64, f64)>,
}

const INTERVAL_GRID: usize = 1001;

fn bisect(curve: &Curve, mut below: f64, mut above: f64, tolerance: f64) -> Result<f64> {
    // `below` has curve ≤ 2, `above` has curve > 2.
    for _ in 0..200 {
        let mid = 0.5 * (below + above);
        let excess = curve.eval(mid)? - tol::MERMIN_CLASSICAL_BOUND;
        if excess.abs() < tolerance || (above - below).abs() < 1e-15 {
            return Ok(mid);
        }
        if excess > 0.0 {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(0.5 * (below + above))
}

/// Locates the parameter values where `curve` crosses 2: sign changes are
/// bracketed on a 1001-point grid and refined by bisection until
/// `|curve - 2| < tolerance`. Returns `None` if the curve never exceeds 2 on
/// the grid.
pub fn violation_interval(curve: &Curve, tolerance: f64) -> Result<Option<ViolationInterval>> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let (lo, hi) = curve.range();
    let grid = linear_grid(lo, hi, INTERVAL_GRID)?;
    let above = grid
        .iter()
        .map(|&x| Ok(curve.eval(x)? > tol::MERMIN_CLASSICAL_BOUND))
        .collect::<Result<Vec<bool>>>()?;

    let mut regions = Vec::new();
    let mut flags = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if !above[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < grid.len() && above[i + 1] {
            i += 1;
        }
        let end = i;
        let (a, a_cross) = if start == 0 {
            (grid[0], false)
        } else {
            (bisect(curve, grid[start - 1], grid[start], tolerance)?, true)
        };
        let (b, b_cross) = if end + 1 == grid.len() {
            (grid[end], false)
        } else {
            (bisect(curve, grid[end + 1], grid[end], tolerance)?, true)
        };
        regions.push((a, b));
        flags.push((a_cross, b_cross));
        i += 1;
    }
    let (Some(first), Some(last)) = (regions.first().copied(), regions.last().copied()) else {
        return Ok(None);
    };
    Ok(Some(ViolationInterval {
        lo: first.0,
        hi: last.1,
        lo_is_crossing: flags[0].0,
        hi_is_crossing: flags[flags.len() - 1].1,
        regions,
    }))
}

/// A state with minimal CoA above 1/2 whose optimized Mermin value is at
/// most 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    /// `amps:` spec reproducing the state exactly.
    pub state: String,
    pub coa_min: f64,
    pub optimized_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub samples: usize,
    pub qualifying: usize,
    pub violations_among_qualifying: usize,
    pub counterexamples: Vec<Counterexample>,
    /// `None` when no sample qualifies.
    pub min_margin_among_qualifying: Option<f64>,
}

/// Runs the minimal-CoA test on explicit states.
pub fn conjecture_on_states(states: &[PureState3], config: &OptimizationConfig) -> Result<ConjectureReport> {
    conjecture_with(states.len(), config, |i| states[i])
}

/// Draws `n` states and, for each one whose minimal CoA exceeds 1/2, checks
/// that the optimized Mermin value exceeds 2.
pub fn conjecture_search(
    n: usize,
    mode: SamplingMode,
    seed: u64,
    config: &OptimizationConfig,
) -> Result<ConjectureReport> {
    if n == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    conjecture_with(n, config, |i| sample_indexed(mode, seed, i as u64))
}

fn conjecture_with<F>(n: usize, config: &OptimizationConfig, state_at: F) -> Result<ConjectureReport>
where
    F: Fn(usize) -> PureState3 + Sync + Send,
{
    config.validate()?;
    let outcomes = map_indices(config.execution, n, |i| -> Result<Option<(PureState3, f64, f64)>> {
        let state = state_at(i);
        let coa = pairwise_measures(&state)?.coa_min;
        if coa > HALF {
            let value = optimize_mermin(&state, config)?.value;
            Ok(Some((state, coa, value)))
        } else {
            Ok(None)
        }
    });
    let mut report = ConjectureReport {
        samples: n,
        qualifying: 0,
        violations_among_qualifying: 0,
        counterexamples: Vec::new(),
        min_margin_among_qualifying: None,
    };
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let Some((state, coa_min, value)) = outcome? else {
            continue;
        };
        report.qualifying += 1;
        let margin = value - tol::MERMIN_CLASSICAL_BOUND;
        report.min_margin_among_qualifying = Some(report.min_margin_among_qualifying.map_or(margin, |m| m.min(margin)));
        if margin > 0.0 {
            report.violations_among_qualifying += 1;
        } else {
            report.counterexamples.push(Counterexample {
                index: i,
                state: StateSpec::from_state(&state).to_string(),
                coa_min,
                optimized_value: value,
            });
        }
    }
    Ok(report)
}

/// `optimized²/16 - σ` for one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSample {
    pub index: usize,
    pub state: String,
    pub sigma: f64,
    pub optimized_value: f64,
    pub slack: f64,
    /// The slack was negative at the base restart count and the optimizer
    /// was re-run with four times as many restarts.
    pub escalated: bool,
}

/// Slack of `σ ≤ |<B>|²/16` at optimized settings, escalating to 4x restarts
/// when the first pass comes out below `-1e-6`.
pub fn eb_slack(state: &PureState3, config: &OptimizationConfig) -> Result<BoundSample> {
    let sigma = pairwise_measures(state)?.sigma;
    let slack_of = |v: f64| v * v / 16.0 - sigma;
    let mut value = optimize_mermin(state, config)?.value;
    let mut escalated = false;
    if slack_of(value) < -tol::EB_SLACK {
        escalated = true;
        let wider = OptimizationConfig {
            restarts: config.restarts * 4,
            ..*config
        };
        value = value.max(optimize_mermin(state, &wider)?.value);
    }
    Ok(BoundSample {
        index: 0,
        state: StateSpec::from_state(state).to_string(),
        sigma,
        optimized_value: value,
        slack: slack_of(value),
        escalated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub samples: usize,
    pub min_slack: f64,
    pub worst: BoundSample,
    pub escalations: usize,
    /// Set when the worst slack stays below `-1e-6` after escalation.
    pub offending: Option<BoundSample>,
}

/// Checks `σ ≤ |<B>|²/16` on `n` Haar-random states.
pub fn eb_bound_check(n: usize, seed: u64, config: &OptimizationConfig) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    config.validate()?;
    let samples = map_indices(config.execution, n, |i| {
        let state = sample_indexed(SamplingMode::Haar, seed, i as u64);
        eb_slack(&state, config).map(|s| BoundSample { index: i, ..s })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let escalations = samples.iter().filter(|s| s.escalated).count();
    let worst = samples
        .into_iter()
        .reduce(|a, b| if b.slack < a.slack { b } else { a })
        .expect("n ≥ 1");
    Ok(BoundReport {
        samples: n,
        min_slack: worst.slack,
        offending: (worst.slack < -tol::EB_SLACK).then(|| worst.clone()),
        worst,
        escalations,
    })
}

/// Gaps `(τ, C²_min - τ, σ - C²_min, 1 - σ)` of the chain
/// `0 ≤ τ ≤ (C^a_min)² ≤ σ ≤ 1`.
pub fn chain_gaps(m: &MeasureReport) -> [f64; 4] {
    let c2 = m.coa_min * m.coa_min;
    [m.tau, c2 - m.tau, m.sigma - c2, 1.0 - m.sigma]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub samples: usize,
    /// Most negative value of each gap.
    pub min_gaps: [f64; 4],
    /// Sample index attaining each minimum.
    pub worst_index: [usize; 4],
    pub passed: bool,
}

fn chain_over<F>(n: usize, exec: Execution, state_at: F) -> Result<ChainReport>
where
    F: Fn(usize) -> PureState3 + Sync + Send,
{
    let gaps = map_indices(exec, n, |i| pairwise_measures(&state_at(i)).map(|m| chain_gaps(&m)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut min_gaps = [f64::INFINITY; 4];
    let mut worst_index = [0; 4];
    for (i, g) in gaps.iter().enumerate() {
        for k in 0..4 {
            if g[k] < min_gaps[k] {
                min_gaps[k] = g[k];
                worst_index[k] = i;
            }
        }
    }
    Ok(ChainReport {
        samples: n,
        min_gaps,
        worst_index,
        passed: min_gaps.iter().all(|g| *g >= -tol::CHAIN_GAP),
    })
}

/// Relation-chain check on `n` seeded random states.
pub fn relation_chain_check(n: usize, mode: SamplingMode, seed: u64, exec: Execution) -> Result<ChainReport> {
    if n == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    chain_over(n, exec, |i| sample_indexed(mode, seed, i as u64))
}

/// Relation-chain check on explicit states.
pub fn relation_chain_on_states(states: &[PureState3], exec: Execution) -> Result<ChainReport> {
    chain_over(states.len(), exec, |i| states[i])
}

/// One named property check of [`verify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

/// Runs the invariant suite: monogamy residuals, relation chain, closed-form
/// CoA consistency and the σ bound.
pub fn verify(samples: usize, seed: u64, config: &OptimizationConfig) -> Result<VerifyReport> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let exec = config.execution;
    let reports = map_indices(exec, samples, |i| {
        pairwise_measures(&sample_indexed(SamplingMode::Haar, seed, i as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let monogamy = reports
        .iter()
        .flat_map(|r| r.monogamy_residuals)
        .fold(0.0f64, |acc, x| acc.max(x.abs()));

    let chain = relation_chain_check(samples, SamplingMode::Haar, seed, exec)?;
    let chain_worst = chain.min_gaps.iter().copied().fold(f64::INFINITY, f64::min);

    let closed_form = map_indices(exec, samples, |i| -> Result<f64> {
        let s = sample_schmidt(seed, i as u64);
        let closed = coa_from_schmidt(&s)?;
        let direct = pairwise_measures(&from_schmidt(&s))?.coa_pair;
        Ok((0..3).map(|k| (closed[k] - direct[k]).abs()).fold(0.0, f64::max))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?
    .into_iter()
    .fold(0.0f64, f64::max);

    let bound = eb_bound_check(samples, seed, config)?;

    let checks = vec![
        CheckOutcome {
            name: "monogamy".into(),
            passed: monogamy <= 1e-9,
            worst: monogamy,
            threshold: 1e-9,
        },
        CheckOutcome {
            name: "relation_chain".into(),
            passed: chain.passed,
            worst: chain_worst,
            threshold: -tol::CHAIN_GAP,
        },
        CheckOutcome {
            name: "closed_form_coa".into(),
            passed: closed_form <= 1e-9,
            worst: closed_form,
            threshold: 1e-9,
        },
        CheckOutcome {
            name: "eb_bound".into(),
            passed: bound.offending.is_none(),
            worst: bound.min_slack,
            threshold: -tol::EB_SLACK,
        },
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        samples,
        seed,
        checks,
        passed,
    })
}
