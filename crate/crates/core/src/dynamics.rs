//! The updating processes: synchronous weighted averaging on interval
//! spectra, weighted majority voting on discrete ones, plus trajectory
//! recording and limit detection.

use serde::{Deserialize, Serialize};

use crate::graph::{OpinionVector, SignedMultigraph};
use crate::{Error, Result};

/// Tie resolution for the discrete majority rule. The update can have
/// several maximizing labels, so a deterministic policy is required.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Keep the agent's current opinion when it is among the maximizers,
    /// otherwise take the lowest-index maximizer. The default.
    KeepCurrent,
    /// Always take the lowest-index maximizer.
    LowestLabel,
}

impl Default for TieRule {
    fn default() -> Self {
        TieRule::KeepCurrent
    }
}

/// Which updating process to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    Continuous,
    Discrete(TieRule),
}

impl UpdateRule {
    pub fn default_for(g: &SignedMultigraph) -> UpdateRule {
        if g.spectrum().is_continuous() {
            UpdateRule::Continuous
        } else {
            UpdateRule::Discrete(TieRule::default())
        }
    }
}

/// Simulation controls. Defaults: `t_max` 10_000, `tol` 1e-9 with a 10-step
/// confirmation window, cycle search over the last 64 states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub t_max: usize,
    pub tol: f64,
    pub window: usize,
    pub cycle_buffer: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            t_max: 10_000,
            tol: 1e-9,
            window: 10,
            cycle_buffer: 64,
        }
    }
}

/// Time-indexed opinion vectors, `steps[0]` being the initial profile.
/// Replayable: `steps[t+1] = step(g, steps[t])` for the declared rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rule: UpdateRule,
    pub steps: Vec<OpinionVector>,
}

/// Detected limit behavior of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitStatus {
    /// The per-step change stayed below `tol` over the confirmation window
    /// (or hit an exact fixed point); `t_star` is the first stable index.
    Converged { limit: OpinionVector, t_star: usize },
    /// A state was revisited at distance `period >= 2`; `orbit` lists one
    /// full cycle, starting at the revisited state.
    Oscillating {
        period: usize,
        orbit: Vec<OpinionVector>,
    },
    /// Neither detected within `t_max` steps. Reported honestly instead of
    /// being coerced into divergence.
    Undetermined { t_max: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub status: LimitStatus,
    pub tol: f64,
    pub window: usize,
}

impl LimitReport {
    pub fn is_converged(&self) -> bool {
        matches!(self.status, LimitStatus::Converged { .. })
    }

    pub fn is_oscillating(&self) -> bool {
        matches!(self.status, LimitStatus::Oscillating { .. })
    }
}

fn require_continuous(g: &SignedMultigraph) -> Result<()> {
    if g.spectrum().is_continuous() {
        Ok(())
    } else {
        Err(Error::WrongRule(
            "continuous averaging needs an interval spectrum".into(),
        ))
    }
}

fn require_discrete(g: &SignedMultigraph) -> Result<usize> {
    g.spectrum().label_count().ok_or_else(|| {
        Error::WrongRule("weighted majority voting needs a discrete spectrum".into())
    })
}

/// One synchronous averaging step: each agent takes the weighted average of
/// its neighbors' (possibly inverted) opinions.
pub fn step_continuous(g: &SignedMultigraph, b: &[f64]) -> Result<Vec<f64>> {
    require_continuous(g)?;
    let n = g.n();
    if b.len() != n {
        return Err(Error::InvalidInput(format!(
            "opinion vector has length {}, graph has {n} agents",
            b.len()
        )));
    }
    let mut next = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let w = g.weight(i, j);
            if w == 0.0 {
                continue; // relation irrelevant on zero-weight pairs
            }
            acc += w * g.signal_value(i, j, b[j])?;
        }
        // convexity keeps the average inside the spectrum; clamp the ulps
        next[i] = g.spectrum().clamp_value(acc);
    }
    Ok(next)
}

/// One weighted-majority step: each agent adopts the label with the largest
/// total weight among its neighbors' (possibly inverted) opinions.
pub fn step_discrete(g: &SignedMultigraph, b: &[usize], tie: TieRule) -> Result<Vec<usize>> {
    let k = require_discrete(g)?;
    let n = g.n();
    if b.len() != n {
        return Err(Error::InvalidInput(format!(
            "opinion vector has length {}, graph has {n} agents",
            b.len()
        )));
    }
    let mut next = vec![0usize; n];
    let mut scores = vec![0.0f64; k];
    for i in 0..n {
        scores.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            let w = g.weight(i, j);
            if w == 0.0 {
                continue;
            }
            scores[g.signal_label(i, j, b[j])?] += w;
        }
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let chosen = match tie {
            TieRule::KeepCurrent if scores[b[i]] == best => b[i],
            _ => scores
                .iter()
                .position(|&s| s == best)
                .expect("nonempty label set"),
        };
        next[i] = chosen;
    }
    Ok(next)
}

/// Rule-dispatching step.
pub fn step(g: &SignedMultigraph, b: &OpinionVector, rule: UpdateRule) -> Result<OpinionVector> {
    match (rule, b) {
        (UpdateRule::Continuous, OpinionVector::Continuous(v)) => {
            Ok(OpinionVector::Continuous(step_continuous(g, v)?))
        }
        (UpdateRule::Discrete(tie), OpinionVector::Discrete(v)) => {
            Ok(OpinionVector::Discrete(step_discrete(g, v, tie)?))
        }
        _ => Err(Error::WrongRule(
            "opinion vector kind does not match the update rule".into(),
        )),
    }
}

/// Iterate the updating process from `b0` until convergence (sup-norm step
/// below `tol`, confirmed over `window` steps, or an exact fixed point), a
/// detected cycle (state revisited within `tol`; exact repeat for discrete
/// states), or `t_max`. Deterministic given its inputs.
///
/// The full trajectory is recorded; for long runs where only the limit
/// matters use [`simulate_limit`], which keeps a bounded window of states.
pub fn simulate(
    g: &SignedMultigraph,
    b0: &OpinionVector,
    rule: UpdateRule,
    opts: &SimOptions,
) -> Result<(Trajectory, LimitReport)> {
    let (recorded, report) = drive(g, b0, rule, opts, true)?;
    Ok((
        Trajectory {
            rule,
            steps: recorded,
        },
        report,
    ))
}

/// [`simulate`] without trajectory recording: memory stays bounded by the
/// cycle buffer, so very large step budgets are safe.
pub fn simulate_limit(
    g: &SignedMultigraph,
    b0: &OpinionVector,
    rule: UpdateRule,
    opts: &SimOptions,
) -> Result<LimitReport> {
    Ok(drive(g, b0, rule, opts, false)?.1)
}

fn drive(
    g: &SignedMultigraph,
    b0: &OpinionVector,
    rule: UpdateRule,
    opts: &SimOptions,
    record: bool,
) -> Result<(Vec<OpinionVector>, LimitReport)> {
    g.check_vector(b0)?;
    if opts.t_max < 1 {
        return Err(Error::InvalidInput("t_max must be at least 1".into()));
    }
    // most recent states, newest last; enough to look back cycle_buffer steps
    let mut window: std::collections::VecDeque<OpinionVector> =
        std::collections::VecDeque::with_capacity(opts.cycle_buffer + 2);
    window.push_back(b0.clone());
    let mut recorded = if record { vec![b0.clone()] } else { Vec::new() };
    let mut stable_run = 0usize;
    let mut status = None;
    // A decaying alternating mode matches itself two steps ago long before
    // the convergence window fires, so a detected orbit only counts as a
    // sustained cycle when its spread clears sqrt(tol); below that it is
    // transient noise around a limit.
    let cycle_floor = opts.tol.sqrt();

    for t in 1..=opts.t_max {
        let next = step(g, window.back().unwrap(), rule)?;
        let delta = next.sup_distance(window.back().unwrap());
        window.push_back(next.clone());
        if window.len() > opts.cycle_buffer + 2 {
            window.pop_front();
        }
        if record {
            recorded.push(next);
        }
        let latest = window.len() - 1;

        if delta == 0.0 {
            // exact fixed point
            status = Some(LimitStatus::Converged {
                limit: window[latest].clone(),
                t_star: t - 1,
            });
            break;
        }
        if delta < opts.tol {
            stable_run += 1;
            if stable_run >= opts.window {
                status = Some(LimitStatus::Converged {
                    limit: window[latest].clone(),
                    t_star: t - opts.window,
                });
                break;
            }
        } else {
            stable_run = 0;
        }

        // shortest period first; period 1 is the convergence path above
        let max_p = opts.cycle_buffer.min(latest);
        let mut genuine = None;
        for p in 2..=max_p {
            if window[latest].sup_distance(&window[latest - p]) < opts.tol {
                let spread = (latest - p..latest)
                    .map(|idx| window[idx].sup_distance(&window[latest]))
                    .fold(0.0, f64::max);
                if spread >= cycle_floor {
                    genuine = Some(p);
                    break;
                }
            }
        }
        if let Some(p) = genuine {
            let orbit: Vec<OpinionVector> =
                window.range(latest - p..latest).cloned().collect();
            status = Some(LimitStatus::Oscillating { period: p, orbit });
            break;
        }
    }

    let status = status.unwrap_or(LimitStatus::Undetermined { t_max: opts.t_max });
    Ok((
        recorded,
        LimitReport {
            status,
            tol: opts.tol,
            window: opts.window,
        },
    ))
}

/// Quadratic coordination utility of agent `i` at profile `b`:
/// `-sum_j W_ij (b_i - F_ij(b_j))^2`. Zero iff `i` matches every positively
/// weighted (possibly inverted) neighbor signal.
pub fn utility_continuous(g: &SignedMultigraph, b: &[f64], i: usize) -> Result<f64> {
    require_continuous(g)?;
    let mut u = 0.0;
    for j in 0..g.n() {
        let w = g.weight(i, j);
        if w == 0.0 {
            continue;
        }
        let s = g.signal_value(i, j, b[j])?;
        u -= w * (b[i] - s) * (b[i] - s);
    }
    Ok(u)
}

/// Matching utility of agent `i` under the discrete rule:
/// `-sum_j W_ij (1 - 1(F_ij(b_j), b_i))`.
pub fn utility_discrete(g: &SignedMultigraph, b: &[usize], i: usize) -> Result<f64> {
    require_discrete(g)?;
    let mut u = 0.0;
    for j in 0..g.n() {
        let w = g.weight(i, j);
        if w == 0.0 {
            continue;
        }
        if g.signal_label(i, j, b[j])? != b[i] {
            u -= w;
        }
    }
    Ok(u)
}
