//! Measured scalar bandwidths of consistent and hierarchically lumped masses against
//! the formula `sum_{i>k} b_i r_i`.

use super::Out;
use crate::config::Config;
use crate::error::CliResult;
use crate::problem::{single_space, Problem};
use iga_lumping::linalg::hier_bandwidth;
use iga_lumping::lumping::Lumping;

pub fn run(cfg: &Config, out: &Out) -> CliResult<Vec<String>> {
    let d = cfg.geometry.dim();
    let mut rows = Vec::new();
    let mut report = Vec::new();
    for &(p, n) in &cfg.bandwidth {
        let case = Config { degree: p, regularity: p - 1, ..cfg.clone() };
        let subs = vec![n; d];
        let space = single_space(&case, &subs)?;
        let (dims, b) = (space.dims(), space.bandwidths());
        let problem = Problem::build(&case, &subs, None)?;
        let mut all_match = true;
        for k in 0..=d {
            let lumping = if k == 0 { Lumping::Consistent } else { Lumping::Hierarchical(k) };
            let measured = problem.mass(lumping)?.bandwidth();
            // levels up to k are lumped away
            let kept: Vec<usize> = b.iter().enumerate().map(|(i, &bi)| if i < k { 0 } else { bi }).collect();
            let formula = hier_bandwidth(&kept, &dims)?;
            all_match &= measured == formula;
            rows.push(vec![
                p.to_string(),
                n.to_string(),
                lumping.label(),
                measured.to_string(),
                formula.to_string(),
                (measured == formula).to_string(),
            ]);
        }
        report.push(format!("p={p}, N={n}: {}", if all_match { "all bandwidths match" } else { "MISMATCH" }));
    }
    out.csv("bandwidth.csv", &["degree", "subdivisions", "matrix", "measured", "formula", "match"], &rows)?;
    report.push("wrote bandwidth.csv".into());
    Ok(report)
}
