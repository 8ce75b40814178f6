//! Built-in point sets and the width families paired with them.

use anyhow::{bail, Context, Result};
use lipwidth_core::spaces::{interval_grid, sigma_set, uniform_nodes, SigmaExampleSet};
use lipwidth_core::takagi::hat_iterate;
use lipwidth_core::widths::{linear_family, polyline_family, takagi_family};
use lipwidth_core::{LipschitzParametrization, Norm, PointCloudSet};
use std::path::Path;

/// `{Σ_{k≤3} c_k H^{∘k} : c_k ∈ {−⅓, 0, ⅓}}` sampled on `nodes` uniform points.
pub fn takagi_corpus(nodes: usize) -> Result<PointCloudSet> {
    let grid = uniform_nodes(nodes);
    let levels = [-1.0 / 3.0, 0.0, 1.0 / 3.0];
    let mut points = Vec::with_capacity(27);
    for a in levels {
        for b in levels {
            for c in levels {
                let f = grid
                    .iter()
                    .map(|&t| a * hat_iterate(1, t) + b * hat_iterate(2, t) + c * hat_iterate(3, t))
                    .collect();
                points.push(f);
            }
        }
    }
    Ok(PointCloudSet::new(points, Norm::sup_grid(vec![grid])?, format!("takagi-corpus ({nodes} nodes)"))?)
}

/// Loads a set from a JSON file, or builds one of `sigma:J`, `interval:N`,
/// `takagi:N`.
pub fn load_set(spec: &str) -> Result<PointCloudSet> {
    if let Some((kind, arg)) = spec.split_once(':') {
        if let Ok(k) = arg.parse::<usize>() {
            return Ok(match kind {
                "sigma" => sigma_set(k)?,
                "interval" => interval_grid(k)?,
                "takagi" => takagi_corpus(k)?,
                _ => bail!("unknown built-in set {kind}; use sigma, interval or takagi"),
            });
        }
    }
    let text = std::fs::read_to_string(Path::new(spec)).with_context(|| format!("cannot read set file {spec}"))?;
    Ok(PointCloudSet::from_json(&text)?)
}

/// `y ↦ Σ_{j≤m} (1+y_j)/2 · σ_j e_j` in `ℓ∞^{J}` (coordinates of the sigma set).
pub fn sigma_family(truncation: usize, m: usize) -> Result<LipschitzParametrization> {
    let dim = truncation;
    let mut offset = vec![0.0; dim];
    let mut columns = Vec::with_capacity(m);
    for j in 1..=m.min(truncation) {
        let s = SigmaExampleSet::sigma(j);
        offset[j - 1] = s / 2.0;
        let mut col = vec![0.0; dim];
        col[j - 1] = s / 2.0;
        columns.push(col);
    }
    Ok(linear_family(offset, columns, Norm::linf(dim)?)?)
}

/// The segment `[0,1]` as a 1-parameter path.
pub fn interval_family() -> Result<LipschitzParametrization> {
    Ok(polyline_family(vec![vec![0.0], vec![1.0]], Norm::linf(1)?)?)
}

/// `y ↦ ½ + ¼(y₁ + y₂)` on `ℝ`.
pub fn interval_family_2d() -> Result<LipschitzParametrization> {
    Ok(linear_family(vec![0.5], vec![vec![0.25], vec![0.25]], Norm::linf(1)?)?)
}

/// Takagi coefficient family on the nodes of a 1-D sup-grid set.
pub fn takagi_family_for(set: &PointCloudSet, m: usize) -> Result<LipschitzParametrization> {
    let nodes = match set.norm() {
        Norm::SupGrid { axes } if axes.len() == 1 => axes[0].clone(),
        _ => bail!("the takagi family needs a set of functions sampled on a 1-D grid"),
    };
    Ok(takagi_family(m, &nodes)?)
}
