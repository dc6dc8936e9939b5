//! Synthetic probe-set collections with known truth.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::numkern::matrix::norm_sq;
use crate::rank2::DataMatrix;
use crate::rng::{derive_seed, stream_id, substream, Role};
use crate::simlab::{gen_matrix, ErrorDist, SimulationSpec};

use super::io::{align_meta, Metadata, ProbeSetRecord};

#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub probesets: usize,
    pub arrays: usize,
    pub probes: usize,
    /// Share of probe sets whose second-dimension mean is nonzero.
    pub alt_fraction: f64,
    /// Share of probe sets generated with a weak second dimension, which the
    /// ratio screen should remove.
    pub weak_fraction: f64,
    pub mu1: f64,
    pub var_theta1: f64,
    pub var_theta2: f64,
    pub weak_var_theta2: f64,
    /// Group-mean amplitude of `μ₂` under the alternative, `±effect`.
    pub effect: f64,
    pub error_dist: ErrorDist,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            probesets: 350,
            arrays: 20,
            probes: 11,
            alt_fraction: 0.2,
            weak_fraction: 0.2,
            mu1: 1000.0,
            var_theta1: 10_000.0,
            var_theta2: 160_000.0,
            weak_var_theta2: 2_500.0,
            effect: 300.0,
            error_dist: ErrorDist::Normal,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub records: Vec<ProbeSetRecord>,
    pub meta: Metadata,
    /// Whether each record was drawn with `μ₂ ≠ 0`.
    pub alternative: Vec<bool>,
}

/// Unit vector orthogonal to the constant vector, from a random draw.
fn random_contrast<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let mean = v.iter().sum::<f64>() / m as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let s = norm_sq(&v).sqrt();
        if s > 1e-3 {
            v.iter_mut().for_each(|x| *x /= s);
            return v;
        }
    }
}

/// Two equal groups `A`, `B` of arrays. Alternatives have `μ₂ = +effect` on
/// group `A` and `−effect` on `B`, orthogonal to the constant `μ₁`. Each
/// probe set has its own random `φ₂`.
pub fn synthetic_corpus(spec: &CorpusSpec, seed: u64) -> Result<SyntheticCorpus> {
    let n = spec.arrays;
    let n_alt = (spec.probesets as f64 * spec.alt_fraction).round() as usize;
    let n_weak = (spec.probesets as f64 * spec.weak_fraction).round() as usize;
    let array_ids: Vec<String> = (1..=n).map(|i| format!("array{i:02}")).collect();
    let labels: Vec<&str> = (0..n).map(|i| if i < n / 2 { "A" } else { "B" }).collect();
    let probe_ids: Vec<String> = (1..=spec.probes).map(|j| format!("p{j}")).collect();

    let mut records = Vec::with_capacity(spec.probesets);
    let mut alternative = Vec::with_capacity(spec.probesets);
    for k in 0..spec.probesets {
        let is_alt = k < n_alt;
        let is_weak = !is_alt && k >= spec.probesets - n_weak;
        let ps_seed = derive_seed(seed, &[k as u64]);
        let mut rng = substream(ps_seed, stream_id(0, Role::Phi));
        let mu2 = if is_alt {
            labels.iter().map(|&g| if g == "A" { spec.effect } else { -spec.effect }).collect()
        } else {
            vec![0.0; n]
        };
        let sim = SimulationSpec {
            n,
            m: spec.probes,
            mu1: vec![spec.mu1; n],
            var_theta1: spec.var_theta1,
            mu2,
            var_theta2: if is_weak { spec.weak_var_theta2 } else { spec.var_theta2 },
            phi1: vec![1.0 / (spec.probes as f64).sqrt(); spec.probes],
            phi2: random_contrast(&mut rng, spec.probes),
            error_dist: spec.error_dist,
            seed: ps_seed,
        };
        let y = gen_matrix(&sim, 0)?;
        let matrix = DataMatrix::new(y, array_ids.clone(), probe_ids.clone())?;
        records.push(ProbeSetRecord::new(format!("ps{:04}", k + 1), matrix));
        alternative.push(is_alt);
    }
    let rows: Vec<(String, String, Option<String>)> =
        array_ids.iter().zip(&labels).map(|(a, g)| (a.clone(), g.to_string(), None)).collect();
    let meta = align_meta(&array_ids, &rows)?;
    Ok(SyntheticCorpus { records, meta, alternative })
}
