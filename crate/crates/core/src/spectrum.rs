//! Opinion spectra and deviation functions.
//!
//! A spectrum is either a closed real interval (the real line as the
//! degenerate case with infinite bounds) or an ordered finite label set.
//! A deviation function is a non-identity self-map of the spectrum that
//! encodes how an agent inverts an opposed neighbor's opinion. Only the
//! parametric kinds below are supported; they are closed under exact
//! fixed-point analysis, which the equilibria machinery relies on.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for equality of continuous opinions in involution and
/// opposing-viewpoint checks. All kinds are closed-form, so only rounding
/// noise is present.
pub const OPINION_EQ_TOL: f64 = 1e-12;

/// Slack accepted on interval membership checks before an input is rejected;
/// iterated averaging can drift a result one ulp past a bound.
const DOMAIN_SLACK: f64 = 1e-9;

/// The set S of possible opinions.
#[derive(Debug, Clone, PartialEq)]
pub enum OpinionSpectrum {
    /// A real interval `[lo, hi]`. The real line is represented with
    /// infinite sentinel bounds and is accepted only by operations that
    /// support it (soft opposition, affine kinds with `b = 0`).
    Interval { lo: f64, hi: f64 },
    /// An ordered finite label set `A_1 < ... < A_K`.
    Discrete { labels: Vec<String> },
}

impl OpinionSpectrum {
    /// A bounded interval spectrum. Both bounds must be finite, `lo < hi`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::InvalidInput(format!(
                "interval spectrum needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(OpinionSpectrum::Interval { lo, hi })
    }

    /// The whole real line.
    pub fn real_line() -> Self {
        OpinionSpectrum::Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    /// An ordered discrete spectrum. Needs at least two distinct labels.
    pub fn discrete<I: IntoIterator<Item = S>, S: Into<String>>(labels: I) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::InvalidInput(
                "discrete spectrum needs at least 2 labels".into(),
            ));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[i + 1..].contains(a) {
                return Err(Error::InvalidInput(format!(
                    "discrete spectrum labels must be distinct, `{a}` repeats"
                )));
            }
        }
        Ok(OpinionSpectrum::Discrete { labels })
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, OpinionSpectrum::Interval { .. })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, OpinionSpectrum::Discrete { .. })
    }

    /// True for the infinite-sentinel interval.
    pub fn is_real_line(&self) -> bool {
        matches!(self, OpinionSpectrum::Interval { lo, hi }
            if lo.is_infinite() && hi.is_infinite())
    }

    /// True for `[-b, b]` (including the real line), the spectra the
    /// symmetric soft-opposition theory is stated on.
    pub fn is_symmetric_interval(&self) -> bool {
        match self {
            OpinionSpectrum::Interval { lo, hi } => {
                self.is_real_line() || (*lo == -*hi && hi.is_finite() && *hi > 0.0)
            }
            OpinionSpectrum::Discrete { .. } => false,
        }
    }

    /// Number of labels of a discrete spectrum.
    pub fn label_count(&self) -> Option<usize> {
        match self {
            OpinionSpectrum::Discrete { labels } => Some(labels.len()),
            _ => None,
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        match self {
            OpinionSpectrum::Discrete { labels } => Some(labels),
            _ => None,
        }
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels()?.iter().position(|l| l == label)
    }

    /// Membership check; intervals allow a small slack for rounding noise.
    pub fn contains(&self, x: &Opinion) -> bool {
        match (self, x) {
            (OpinionSpectrum::Interval { lo, hi }, Opinion::Value(v)) => {
                v.is_finite() && *v >= lo - DOMAIN_SLACK && *v <= hi + DOMAIN_SLACK
                    || (self.is_real_line() && v.is_finite())
            }
            (OpinionSpectrum::Discrete { labels }, Opinion::Label(k)) => *k < labels.len(),
            _ => false,
        }
    }

    /// Clamp a continuous value into the interval (no-op on the real line).
    pub fn clamp_value(&self, v: f64) -> f64 {
        match self {
            OpinionSpectrum::Interval { lo, hi } => v.max(*lo).min(*hi),
            OpinionSpectrum::Discrete { .. } => v,
        }
    }

    fn describe(&self) -> String {
        match self {
            OpinionSpectrum::Interval { lo, hi } => {
                if self.is_real_line() {
                    "R".to_string()
                } else {
                    format!("[{lo}, {hi}]")
                }
            }
            OpinionSpectrum::Discrete { labels } => format!("{{{}}}", labels.join(", ")),
        }
    }
}

impl fmt::Display for OpinionSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

// Serialized form: {"kind":"interval","lo":..,"hi":..} | {"kind":"real_line"}
// | {"kind":"discrete","labels":[..]}.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SpectrumRepr {
    Interval { lo: f64, hi: f64 },
    RealLine,
    Discrete { labels: Vec<String> },
}

impl Serialize for OpinionSpectrum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            OpinionSpectrum::Interval { lo, hi } => {
                if self.is_real_line() {
                    SpectrumRepr::RealLine
                } else {
                    SpectrumRepr::Interval { lo: *lo, hi: *hi }
                }
            }
            OpinionSpectrum::Discrete { labels } => SpectrumRepr::Discrete {
                labels: labels.clone(),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OpinionSpectrum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SpectrumRepr::deserialize(d)?;
        match repr {
            SpectrumRepr::Interval { lo, hi } => {
                OpinionSpectrum::interval(lo, hi).map_err(D::Error::custom)
            }
            SpectrumRepr::RealLine => Ok(OpinionSpectrum::real_line()),
            SpectrumRepr::Discrete { labels } => {
                OpinionSpectrum::discrete(labels).map_err(D::Error::custom)
            }
        }
    }
}

/// A single opinion: a real value for interval spectra, a 0-based label
/// index for discrete ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Opinion {
    Value(f64),
    Label(usize),
}

impl Opinion {
    pub fn as_value(&self) -> Option<f64> {
        match self {
            Opinion::Value(v) => Some(*v),
            Opinion::Label(_) => None,
        }
    }

    pub fn as_label(&self) -> Option<usize> {
        match self {
            Opinion::Label(k) => Some(*k),
            Opinion::Value(_) => None,
        }
    }

    /// Equality up to [`OPINION_EQ_TOL`] for values, exact for labels.
    pub fn approx_eq(&self, other: &Opinion) -> bool {
        match (self, other) {
            (Opinion::Value(a), Opinion::Value(b)) => (a - b).abs() <= OPINION_EQ_TOL,
            (Opinion::Label(a), Opinion::Label(b)) => a == b,
            _ => false,
        }
    }

    fn describe(&self, spectrum: &OpinionSpectrum) -> String {
        match self {
            Opinion::Value(v) => format!("{v}"),
            Opinion::Label(k) => spectrum
                .labels()
                .and_then(|l| l.get(*k))
                .cloned()
                .unwrap_or_else(|| format!("#{k}")),
        }
    }
}

/// Target of a [`DeviationSpec::Constant`]: a number on interval spectra, a
/// label on discrete ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstantTarget {
    Value(f64),
    Label(String),
}

/// Parametric description of a deviation function D, bound to a spectrum at
/// evaluation time.
///
/// `Identity` encodes the follow relation and is *not* a valid deviation
/// function; it exists so scenario files can express the invalid case and
/// be rejected by validation (the testable condition is `Fix(D) != S`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeviationSpec {
    Identity,
    /// `x -> lo + hi - x` on intervals (`-x` on the real line); label
    /// reversal `A_k -> A_{K+1-k}` on discrete spectra.
    Soft,
    /// Maps every opinion to the far endpoint of the opposite half of the
    /// spectrum. The midpoint goes to the upper endpoint by default.
    Hard {
        #[serde(default = "default_true")]
        midpoint_to_upper: bool,
    },
    /// `x -> a*x + b`, continuous spectra only.
    Affine { a: f64, b: f64 },
    /// `x -> target` for every x.
    Constant { target: ConstantTarget },
    /// `x -> sgn(x) * hi * (|x|/hi)^p` on symmetric intervals `[-b, b]`.
    SignedPower { p: f64 },
    /// An explicit total map on labels, discrete spectra only.
    Table { map: BTreeMap<String, String> },
}

fn default_true() -> bool {
    true
}

/// Exact fixed-point set of a deviation spec, resolved analytically per kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum FixedPointSet {
    Empty,
    /// Finitely many continuous fixed points, sorted ascending.
    Values(Vec<f64>),
    /// Fixed labels of a discrete spectrum, sorted ascending.
    Labels(Vec<usize>),
    /// Every opinion is fixed (identity-like specs only).
    WholeSpectrum,
}

impl FixedPointSet {
    pub fn is_empty(&self) -> bool {
        match self {
            FixedPointSet::Empty => true,
            FixedPointSet::Values(v) => v.is_empty(),
            FixedPointSet::Labels(l) => l.is_empty(),
            FixedPointSet::WholeSpectrum => false,
        }
    }

    pub fn contains(&self, x: &Opinion) -> bool {
        match (self, x) {
            (FixedPointSet::Empty, _) => false,
            (FixedPointSet::WholeSpectrum, _) => true,
            (FixedPointSet::Values(vs), Opinion::Value(v)) => {
                vs.iter().any(|w| (w - v).abs() <= OPINION_EQ_TOL)
            }
            (FixedPointSet::Labels(ls), Opinion::Label(k)) => ls.contains(k),
            _ => false,
        }
    }

    /// Set intersection; `WholeSpectrum` is the neutral element.
    pub fn intersect(&self, other: &FixedPointSet) -> FixedPointSet {
        use FixedPointSet::*;
        match (self, other) {
            (WholeSpectrum, x) | (x, WholeSpectrum) => x.clone(),
            (Empty, _) | (_, Empty) => Empty,
            (Values(a), Values(b)) => {
                let common: Vec<f64> = a
                    .iter()
                    .copied()
                    .filter(|v| b.iter().any(|w| (w - v).abs() <= OPINION_EQ_TOL))
                    .collect();
                if common.is_empty() {
                    Empty
                } else {
                    Values(common)
                }
            }
            (Labels(a), Labels(b)) => {
                let common: Vec<usize> = a.iter().copied().filter(|k| b.contains(k)).collect();
                if common.is_empty() {
                    Empty
                } else {
                    Labels(common)
                }
            }
            _ => Empty,
        }
    }
}

impl DeviationSpec {
    /// Evaluate the deviation function at `x`.
    ///
    /// Errors on out-of-spectrum input and on the `Identity` kind, which is
    /// invalid in a deviate role.
    pub fn eval(&self, spectrum: &OpinionSpectrum, x: Opinion) -> Result<Opinion> {
        if matches!(self, DeviationSpec::Identity) {
            return Err(Error::IdentityAsDeviation);
        }
        self.eval_raw(spectrum, x)
    }

    /// Like [`eval`](Self::eval) but treats `Identity` as the identity map;
    /// used where F_ij(x) must be evaluated uniformly over follow and
    /// deviate relations.
    pub fn eval_raw(&self, spectrum: &OpinionSpectrum, x: Opinion) -> Result<Opinion> {
        if !spectrum.contains(&x) {
            return Err(Error::OutOfSpectrum {
                value: x.describe(spectrum),
                spectrum: spectrum.to_string(),
            });
        }
        match (spectrum, x) {
            (OpinionSpectrum::Interval { .. }, Opinion::Value(v)) => {
                let v = spectrum.clamp_value(v);
                self.eval_value(spectrum, v).map(Opinion::Value)
            }
            (OpinionSpectrum::Discrete { labels }, Opinion::Label(k)) => {
                self.eval_label(spectrum, labels, k).map(Opinion::Label)
            }
            _ => unreachable!("contains() filters mismatched opinion kinds"),
        }
    }

    /// Continuous evaluation; the caller guarantees `v` is inside the
    /// interval. The result is clamped back into the interval to absorb
    /// rounding.
    pub(crate) fn eval_value(&self, spectrum: &OpinionSpectrum, v: f64) -> Result<f64> {
        let (lo, hi) = match spectrum {
            OpinionSpectrum::Interval { lo, hi } => (*lo, *hi),
            OpinionSpectrum::Discrete { .. } => {
                return Err(Error::SpectrumMismatch {
                    kind: self.kind_name(),
                    detail: "continuous evaluation on a discrete spectrum".into(),
                })
            }
        };
        let unbounded = spectrum.is_real_line();
        let out = match self {
            DeviationSpec::Identity => v,
            DeviationSpec::Soft => {
                if unbounded {
                    -v
                } else {
                    lo + hi - v
                }
            }
            DeviationSpec::Hard { midpoint_to_upper } => {
                if unbounded {
                    return Err(Error::SpectrumMismatch {
                        kind: "hard",
                        detail: "hard opposition needs finite endpoints".into(),
                    });
                }
                let mid = 0.5 * (lo + hi);
                if v < mid {
                    hi
                } else if v > mid {
                    lo
                } else if *midpoint_to_upper {
                    hi
                } else {
                    lo
                }
            }
            DeviationSpec::Affine { a, b } => a * v + b,
            DeviationSpec::Constant { target } => match target {
                ConstantTarget::Value(c) => *c,
                ConstantTarget::Label(l) => {
                    return Err(Error::SpectrumMismatch {
                        kind: "constant",
                        detail: format!("label target `{l}` on a continuous spectrum"),
                    })
                }
            },
            DeviationSpec::SignedPower { p } => {
                if !spectrum.is_symmetric_interval() || unbounded {
                    return Err(Error::SpectrumMismatch {
                        kind: "signed_power",
                        detail: "signed power needs a bounded symmetric interval [-b, b]".into(),
                    });
                }
                v.signum() * hi * (v.abs() / hi).powf(*p)
            }
            DeviationSpec::Table { .. } => {
                return Err(Error::SpectrumMismatch {
                    kind: "table",
                    detail: "table maps are for discrete spectra".into(),
                })
            }
        };
        Ok(spectrum.clamp_value(out))
    }

    /// Discrete evaluation on label index `k` (0-based).
    pub(crate) fn eval_label(
        &self,
        spectrum: &OpinionSpectrum,
        labels: &[String],
        k: usize,
    ) -> Result<usize> {
        let n = labels.len();
        match self {
            DeviationSpec::Identity => Ok(k),
            DeviationSpec::Soft => Ok(n - 1 - k),
            DeviationSpec::Hard { midpoint_to_upper } => {
                // Lower half inverts to the top label, upper half to the
                // bottom one; an odd middle label follows the flag so the
                // fixed-point set stays empty.
                let mid = (n - 1) as f64 / 2.0;
                let kf = k as f64;
                if kf < mid {
                    Ok(n - 1)
                } else if kf > mid {
                    Ok(0)
                } else if *midpoint_to_upper {
                    Ok(n - 1)
                } else {
                    Ok(0)
                }
            }
            DeviationSpec::Constant { target } => match target {
                ConstantTarget::Label(l) => {
                    spectrum
                        .label_index(l)
                        .ok_or_else(|| Error::SpectrumMismatch {
                            kind: "constant",
                            detail: format!("target label `{l}` is not in the spectrum"),
                        })
                }
                ConstantTarget::Value(v) => Err(Error::SpectrumMismatch {
                    kind: "constant",
                    detail: format!("numeric target {v} on a discrete spectrum"),
                }),
            },
            DeviationSpec::Table { map } => {
                let from = &labels[k];
                let to = map.get(from).ok_or_else(|| Error::SpectrumMismatch {
                    kind: "table",
                    detail: format!("table has no image for label `{from}`"),
                })?;
                spectrum
                    .label_index(to)
                    .ok_or_else(|| Error::SpectrumMismatch {
                        kind: "table",
                        detail: format!("table image `{to}` is not in the spectrum"),
                    })
            }
            DeviationSpec::Affine { .. } | DeviationSpec::SignedPower { .. } => {
                Err(Error::SpectrumMismatch {
                    kind: self.kind_name(),
                    detail: "continuous kind on a discrete spectrum".into(),
                })
            }
        }
    }

    /// Exact fixed-point set, analytically resolved per kind.
    pub fn fixed_points(&self, spectrum: &OpinionSpectrum) -> FixedPointSet {
        match spectrum {
            OpinionSpectrum::Interval { lo, hi } => {
                let unbounded = spectrum.is_real_line();
                match self {
                    DeviationSpec::Identity => FixedPointSet::WholeSpectrum,
                    DeviationSpec::Soft => {
                        let mid = if unbounded { 0.0 } else { 0.5 * (lo + hi) };
                        FixedPointSet::Values(vec![mid])
                    }
                    // Every point maps across the midpoint by construction.
                    DeviationSpec::Hard { .. } => FixedPointSet::Empty,
                    DeviationSpec::Affine { a, b } => {
                        if *a == 1.0 {
                            if *b == 0.0 {
                                FixedPointSet::WholeSpectrum
                            } else {
                                FixedPointSet::Empty
                            }
                        } else {
                            let x = b / (1.0 - a);
                            if unbounded || (x >= *lo && x <= *hi) {
                                FixedPointSet::Values(vec![x])
                            } else {
                                FixedPointSet::Empty
                            }
                        }
                    }
                    DeviationSpec::Constant { target } => match target {
                        ConstantTarget::Value(c) => FixedPointSet::Values(vec![*c]),
                        ConstantTarget::Label(_) => FixedPointSet::Empty,
                    },
                    DeviationSpec::SignedPower { p } => {
                        if *p == 1.0 {
                            FixedPointSet::WholeSpectrum
                        } else if unbounded {
                            FixedPointSet::Values(vec![0.0])
                        } else {
                            FixedPointSet::Values(vec![*lo, 0.0, *hi])
                        }
                    }
                    DeviationSpec::Table { .. } => FixedPointSet::Empty,
                }
            }
            OpinionSpectrum::Discrete { labels } => {
                let n = labels.len();
                let fixed: Vec<usize> = (0..n)
                    .filter(|&k| {
                        self.eval_label(spectrum, labels, k)
                            .map(|img| img == k)
                            .unwrap_or(false)
                    })
                    .collect();
                if matches!(self, DeviationSpec::Identity) {
                    FixedPointSet::WholeSpectrum
                } else if fixed.is_empty() {
                    FixedPointSet::Empty
                } else {
                    FixedPointSet::Labels(fixed)
                }
            }
        }
    }

    /// True iff `D(x) = y` and `D(y) = x` (exact for labels, within
    /// [`OPINION_EQ_TOL`] for values).
    pub fn are_opposing_viewpoints(
        &self,
        spectrum: &OpinionSpectrum,
        x: Opinion,
        y: Opinion,
    ) -> bool {
        match (self.eval_raw(spectrum, x), self.eval_raw(spectrum, y)) {
            (Ok(fx), Ok(fy)) => fx.approx_eq(&y) && fy.approx_eq(&x),
            _ => false,
        }
    }

    /// Problems with binding this spec to `spectrum`; empty iff the binding
    /// is valid as a deviation function.
    pub fn binding_problems(&self, spectrum: &OpinionSpectrum) -> Vec<String> {
        let mut problems = Vec::new();
        let fixes_everything = match self.fixed_points(spectrum) {
            FixedPointSet::WholeSpectrum => true,
            FixedPointSet::Labels(ls) => Some(ls.len()) == spectrum.label_count(),
            _ => false,
        };
        if fixes_everything {
            problems.push(format!(
                "`{}` fixes every opinion and is not a deviation function",
                self.kind_name()
            ));
        }
        match (self, spectrum) {
            (DeviationSpec::Affine { a, b }, OpinionSpectrum::Interval { lo, hi }) => {
                if !spectrum.is_real_line() {
                    if a.abs() > 1.0 {
                        problems.push(format!("affine slope |a| = {} exceeds 1", a.abs()));
                    }
                    let (i0, i1) = (a * lo + b, a * hi + b);
                    let (img_lo, img_hi) = (i0.min(i1), i0.max(i1));
                    if img_lo < lo - OPINION_EQ_TOL || img_hi > hi + OPINION_EQ_TOL {
                        problems.push(format!(
                            "affine image [{img_lo}, {img_hi}] escapes the spectrum [{lo}, {hi}]"
                        ));
                    }
                } else if *b != 0.0 {
                    problems.push("affine on the real line needs b = 0".into());
                }
            }
            (DeviationSpec::Affine { .. }, OpinionSpectrum::Discrete { .. }) => {
                problems.push("affine kind on a discrete spectrum".into());
            }
            (DeviationSpec::SignedPower { p }, _) => {
                if !(*p > 0.0) {
                    problems.push(format!("signed power needs p > 0, got {p}"));
                }
                if !spectrum.is_symmetric_interval() || spectrum.is_real_line() {
                    problems.push("signed power needs a bounded symmetric interval".into());
                }
            }
            (DeviationSpec::Hard { .. }, OpinionSpectrum::Interval { .. }) => {
                if spectrum.is_real_line() {
                    problems.push("hard opposition needs finite endpoints".into());
                }
            }
            (DeviationSpec::Constant { target }, _) => match (target, spectrum) {
                (ConstantTarget::Value(c), OpinionSpectrum::Interval { .. }) => {
                    if !spectrum.contains(&Opinion::Value(*c)) {
                        problems.push(format!("constant target {c} is outside the spectrum"));
                    }
                }
                (ConstantTarget::Label(l), OpinionSpectrum::Discrete { .. }) => {
                    if spectrum.label_index(l).is_none() {
                        problems.push(format!("constant target `{l}` is not a spectrum label"));
                    }
                }
                (ConstantTarget::Value(_), OpinionSpectrum::Discrete { .. }) => {
                    problems.push("numeric constant target on a discrete spectrum".into());
                }
                (ConstantTarget::Label(_), OpinionSpectrum::Interval { .. }) => {
                    problems.push("label constant target on a continuous spectrum".into());
                }
            },
            (DeviationSpec::Table { map }, OpinionSpectrum::Discrete { labels }) => {
                for from in labels {
                    match map.get(from) {
                        None => problems.push(format!("table misses an image for `{from}`")),
                        Some(to) if spectrum.label_index(to).is_none() => {
                            problems.push(format!("table image `{to}` is not a spectrum label"))
                        }
                        _ => {}
                    }
                }
            }
            (DeviationSpec::Table { .. }, OpinionSpectrum::Interval { .. }) => {
                problems.push("table kind on a continuous spectrum".into());
            }
            _ => {}
        }
        problems
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DeviationSpec::Identity => "identity",
            DeviationSpec::Soft => "soft",
            DeviationSpec::Hard { .. } => "hard",
            DeviationSpec::Affine { .. } => "affine",
            DeviationSpec::Constant { .. } => "constant",
            DeviationSpec::SignedPower { .. } => "signed_power",
            DeviationSpec::Table { .. } => "table",
        }
    }

    /// Affine parameters `(a, b)` when this spec acts as `x -> a*x + b`
    /// on the given spectrum: soft is `(-1, lo+hi)`, constants are `(0, c)`.
    pub fn as_affine(&self, spectrum: &OpinionSpectrum) -> Option<(f64, f64)> {
        match (self, spectrum) {
            (DeviationSpec::Affine { a, b }, OpinionSpectrum::Interval { .. }) => Some((*a, *b)),
            (DeviationSpec::Soft, OpinionSpectrum::Interval { lo, hi }) => {
                if spectrum.is_real_line() {
                    Some((-1.0, 0.0))
                } else {
                    Some((-1.0, lo + hi))
                }
            }
            (
                DeviationSpec::Constant {
                    target: ConstantTarget::Value(c),
                },
                OpinionSpectrum::Interval { .. },
            ) => Some((0.0, *c)),
            _ => None,
        }
    }
}
