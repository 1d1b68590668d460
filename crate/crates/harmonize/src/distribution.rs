use crate::error::HarmonizeError;

/// Additive smoothing applied to every bin before renormalizing.
pub const DEFAULT_SMOOTHING: f64 = 1e-10;

/// Probabilities over shared histogram bins.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
    edges: Vec<f64>,
}

fn check_edges(edges: &[f64]) -> Result<(), HarmonizeError> {
    if edges.len() < 2 || edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarmonizeError::NonMonotonicEdges);
    }
    Ok(())
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>, edges: Vec<f64>) -> Result<Self, HarmonizeError> {
        check_edges(&edges)?;
        if probs.len() + 1 != edges.len() {
            return Err(HarmonizeError::InvalidDistribution(format!(
                "{} probabilities for {} edges",
                probs.len(),
                edges.len()
            )));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(HarmonizeError::InvalidDistribution(
                "negative or non-finite probability".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(HarmonizeError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs, edges })
    }

    /// Unit-width bins `0..n`; convenient when only the probabilities matter.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self, HarmonizeError> {
        let edges = (0..=probs.len()).map(|i| i as f64).collect();
        Self::new(probs, edges)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn n_bins(&self) -> usize {
        self.probs.len()
    }

    /// Adds `eps` to every bin and renormalizes.
    pub fn smoothed(&self, eps: f64) -> Self {
        let total = 1.0 + eps * self.probs.len() as f64;
        Self {
            probs: self.probs.iter().map(|p| (p + eps) / total).collect(),
            edges: self.edges.clone(),
        }
    }
}

/// `n_bins + 1` evenly spaced edges spanning the pooled range of both samples.
/// A constant pooled sample gets the unit interval centred on its value.
pub fn pooled_edges(a: &[f64], b: &[f64], n_bins: usize) -> Result<Vec<f64>, HarmonizeError> {
    if n_bins == 0 {
        return Err(HarmonizeError::InvalidDistribution("need at least one bin".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in a.iter().chain(b) {
        if !v.is_finite() {
            return Err(HarmonizeError::NonFinite(v));
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return Err(HarmonizeError::EmptyInput);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let mut edges: Vec<f64> = (0..=n_bins)
        .map(|k| lo + (hi - lo) * (k as f64 / n_bins as f64))
        .collect();
    edges[n_bins] = hi;
    check_edges(&edges)?;
    Ok(edges)
}

/// Normalized counts over `edges`; bins are right-open except the last.
pub fn histogram(values: &[f64], edges: &[f64]) -> Result<DiscreteDistribution, HarmonizeError> {
    if values.is_empty() {
        return Err(HarmonizeError::EmptyInput);
    }
    check_edges(edges)?;
    let n_bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[n_bins]);
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        if !v.is_finite() {
            return Err(HarmonizeError::NonFinite(v));
        }
        if v < lo || v > hi {
            return Err(HarmonizeError::OutsideEdges { value: v, lo, hi });
        }
        let bin = (edges.partition_point(|&e| e <= v) - 1).min(n_bins - 1);
        counts[bin] += 1;
    }
    let n = values.len() as f64;
    let probs = counts.iter().map(|&c| c as f64 / n).collect();
    DiscreteDistribution::new(probs, edges.to_vec())
}

fn same_support(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<(), HarmonizeError> {
    if p.edges != q.edges {
        return Err(HarmonizeError::EdgesMismatch);
    }
    Ok(())
}

/// `sum p_i ln(p_i / q_i)` in nats, with `0 ln(0 / q) = 0`. Infinite when some
/// bin has `p_i > 0 = q_i`; smooth first to avoid that.
pub fn kl_divergence(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64, HarmonizeError> {
    same_support(p, q)?;
    let mut kl = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        if pi > 0.0 {
            if qi == 0.0 {
                return Ok(f64::INFINITY);
            }
            kl += pi * (pi / qi).ln();
        }
    }
    Ok(kl.max(0.0))
}

/// Mean of the two directed KL divergences after smoothing both sides with
/// [`DEFAULT_SMOOTHING`]. This is half the Jeffreys divergence.
pub fn paper_jsd(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64, HarmonizeError> {
    paper_jsd_with(p, q, DEFAULT_SMOOTHING)
}

pub fn paper_jsd_with(p: &DiscreteDistribution, q: &DiscreteDistribution, eps: f64) -> Result<f64, HarmonizeError> {
    same_support(p, q)?;
    let (p, q) = (p.smoothed(eps), q.smoothed(eps));
    Ok((kl_divergence(&p, &q)? + kl_divergence(&q, &p)?) / 2.0)
}

/// Jensen-Shannon divergence against the mixture `(P + Q) / 2`, in nats, after
/// the same smoothing as [`paper_jsd`].
pub fn strict_jsd(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64, HarmonizeError> {
    strict_jsd_with(p, q, DEFAULT_SMOOTHING)
}

pub fn strict_jsd_with(p: &DiscreteDistribution, q: &DiscreteDistribution, eps: f64) -> Result<f64, HarmonizeError> {
    same_support(p, q)?;
    let (p, q) = (p.smoothed(eps), q.smoothed(eps));
    let m = DiscreteDistribution {
        probs: p.probs.iter().zip(&q.probs).map(|(a, b)| (a + b) / 2.0).collect(),
        edges: p.edges.clone(),
    };
    Ok((kl_divergence(&p, &m)? + kl_divergence(&q, &m)?) / 2.0)
}
