//! Scaling sweeps over a graph family: exact classical quantities and
//! simulator resource counts per size, with log-log slopes.
//!
//! Columns per quantity:
//!
//! * `ht`: `ht` = `max_x HT({x})`, `sqrt_ht`.
//! * `delta`: `delta` = `1 - λ_1`, `relax` = `1/delta`.
//! * `mixing`: `mixing` (steps to `mixing_eps` in total variation),
//!   `mixing_bound`.
//! * `qff_cost`: walk calls of one reflection at `eps`.
//! * `sample_cost`: walk calls and fidelity of a known-`π_g` run on the
//!   vertex of least stationary mass.
//!
//! Slopes are least-squares fits of `ln value` against `ln size`, where the
//! size is the spec's nominal `n`.

use std::fmt;
use std::str::FromStr;

use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::reflect::{CheckMode, Reflection};
use crate::report::{Cell, Table};
use crate::sampler::{amplitude_amplify, SamplerConfig, UMain};
use crate::spectral::{self, classical_mixing_time};
use crate::walkspace::RegisterLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Ht,
    Delta,
    Mixing,
    QffCost,
    SampleCost,
}

impl Quantity {
    pub const ALL: [Quantity; 5] =
        [Quantity::Ht, Quantity::Delta, Quantity::Mixing, Quantity::QffCost, Quantity::SampleCost];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Ht => "ht",
            Quantity::Delta => "delta",
            Quantity::Mixing => "mixing",
            Quantity::QffCost => "qff_cost",
            Quantity::SampleCost => "sample_cost",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Ht => &["ht", "sqrt_ht"],
            Quantity::Delta => &["delta", "relax"],
            Quantity::Mixing => &["mixing", "mixing_bound"],
            Quantity::QffCost => &["qff_cost"],
            Quantity::SampleCost => &["sample_cost", "sample_fidelity"],
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown quantity '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub lazy: bool,
    /// Target of the reflection and sampling costs.
    pub eps: f64,
    /// Total-variation target of the mixing time.
    pub mixing_eps: f64,
    /// Sizes whose sampling state would exceed this many amplitudes are
    /// recorded as failures instead of simulated.
    pub max_dim: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig { lazy: true, eps: 0.1, mixing_eps: 0.25, max_dim: 1 << 22 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub size: usize,
    /// Vertices actually generated; differs from `size` for `gnp`.
    pub n: Option<usize>,
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub family: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<ScalingRow>,
    /// One per column.
    pub slopes: Vec<Option<f64>>,
}

impl ScalingTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|&c| c == name)
    }

    pub fn slope(&self, name: &str) -> Option<f64> {
        self.column(name).and_then(|i| self.slopes[i])
    }

    pub fn values(&self, name: &str) -> Vec<Option<f64>> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| r.values[i]).collect(),
            None => vec![None; self.rows.len()],
        }
    }

    /// Rows as emitted, with a final `slope` row.
    pub fn to_table(&self) -> Table {
        let mut header = vec!["family", "size", "n"];
        header.extend(&self.columns);
        header.push("error");
        let mut t = Table::new("scaling", &header);
        let mut push = |size: Cell, n: Cell, values: &[Option<f64>], err: Cell| {
            let mut row = vec![Cell::Text(self.family.clone()), size, n];
            row.extend(values.iter().map(|&v| Cell::from(v)));
            row.push(err);
            t.rows.push(row);
        };
        for r in &self.rows {
            push(
                r.size.into(),
                r.n.map_or(Cell::Missing, Cell::from),
                &r.values,
                r.error.clone().map_or(Cell::Missing, Cell::Text),
            );
        }
        push("slope".into(), Cell::Missing, &self.slopes, Cell::Missing);
        t
    }
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable points or no spread in `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn measure(c: &MarkovChain, quantities: &[Quantity], config: &ScalingConfig) -> Result<Vec<Option<f64>>> {
    let mut out = Vec::new();
    for &q in quantities {
        match q {
            Quantity::Ht => {
                let ht = spectral::hitting_times_all(c)?.into_iter().fold(0.0, f64::max);
                out.extend([Some(ht), Some(ht.sqrt())]);
            }
            Quantity::Delta => {
                let d = spectral::gap(c)?;
                out.extend([Some(d), Some(1.0 / d)]);
            }
            Quantity::Mixing => {
                let m = classical_mixing_time(c, config.mixing_eps)?;
                out.extend([Some(m.steps as f64), Some(m.bound)]);
            }
            Quantity::QffCost => {
                out.push(Some(Reflection::new(c, config.eps)?.walk_calls() as f64));
            }
            Quantity::SampleCost => {
                let pi = c.pi();
                let g = (0..c.n()).min_by(|&a, &b| pi[a].total_cmp(&pi[b])).unwrap_or(0);
                let u = UMain::new(c, g, pi[g], config.eps)?;
                let refl = Reflection::new(c, config.eps)?;
                let tau = u.plan().tau().max(refl.params().plan().tau());
                let dim = RegisterLayout::new(c.n(), tau, 2)?.dim();
                if dim > config.max_dim {
                    return Err(Error::Domain(format!(
                        "sampling state of {dim} amplitudes exceeds {}",
                        config.max_dim
                    )));
                }
                let cfg = SamplerConfig { eps: config.eps, mode: CheckMode::Exact, ..Default::default() };
                let r = amplitude_amplify(g, pi[g], config.eps, c, &cfg)?;
                out.extend([Some(r.walk_calls as f64), Some(r.fidelity)]);
            }
        }
    }
    Ok(out)
}

fn row_for(
    spec: &FamilySpec,
    size: usize,
    quantities: &[Quantity],
    config: &ScalingConfig,
    width: usize,
) -> ScalingRow {
    let sized = spec.with_n(size);
    let chain = sized.chain(config.lazy);
    let n = chain.as_ref().ok().map(MarkovChain::n);
    match chain.and_then(|c| measure(&c, quantities, config)) {
        Ok(values) => ScalingRow { size, n, values, error: None },
        Err(e) => ScalingRow { size, n, values: vec![None; width], error: Some(e.to_string()) },
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("sizes must be strictly ascending".into()));
    }
    Ok(())
}

fn assemble(spec: &FamilySpec, quantities: &[Quantity], rows: Vec<ScalingRow>) -> ScalingTable {
    let columns: Vec<&'static str> = quantities.iter().flat_map(|q| q.columns().iter().copied()).collect();
    let slopes = (0..columns.len())
        .map(|i| {
            let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.values[i].map(|v| (r.size as f64, v))).collect();
            loglog_slope(&pts)
        })
        .collect();
    ScalingTable { family: spec.family.to_string(), columns, rows, slopes }
}

/// One row per size; failures are recorded in the row and do not abort the
/// sweep. Sizes run on separate threads.
pub fn run_scaling(
    spec: &FamilySpec,
    sizes: &[usize],
    quantities: &[Quantity],
    config: &ScalingConfig,
) -> Result<ScalingTable> {
    check_sizes(sizes)?;
    let width: usize = quantities.iter().map(|q| q.columns().len()).sum();
    let rows = std::thread::scope(|s| {
        let handles: Vec<_> =
            sizes.iter().map(|&size| s.spawn(move || row_for(spec, size, quantities, config, width))).collect();
        handles.into_iter().map(|h| h.join().expect("scaling worker panicked")).collect()
    });
    Ok(assemble(spec, quantities, rows))
}

/// As [`run_scaling`] with every value averaged over `seeds`; meant for
/// `gnp`. A size fails if any seed fails there.
pub fn run_scaling_averaged(
    spec: &FamilySpec,
    sizes: &[usize],
    quantities: &[Quantity],
    config: &ScalingConfig,
    seeds: &[u64],
) -> Result<ScalingTable> {
    if seeds.is_empty() {
        return Err(Error::Domain("no seeds to average over".into()));
    }
    check_sizes(sizes)?;
    let tables = seeds
        .iter()
        .map(|&seed| run_scaling(&spec.with_seed(seed), sizes, quantities, config))
        .collect::<Result<Vec<_>>>()?;
    let k = seeds.len() as f64;
    let rows = (0..sizes.len())
        .map(|i| {
            let per_seed: Vec<&ScalingRow> = tables.iter().map(|t| &t.rows[i]).collect();
            if let Some(err) = per_seed.iter().find_map(|r| r.error.clone()) {
                return ScalingRow {
                    size: sizes[i],
                    n: None,
                    values: vec![None; tables[0].columns.len()],
                    error: Some(err),
                };
            }
            let values = (0..tables[0].columns.len())
                .map(|j| per_seed.iter().map(|r| r.values[j]).sum::<Option<f64>>().map(|s| s / k))
                .collect();
            let mean_n = per_seed.iter().filter_map(|r| r.n).sum::<usize>() as f64 / k;
            ScalingRow { size: sizes[i], n: Some(mean_n.round() as usize), values, error: None }
        })
        .collect();
    Ok(assemble(spec, quantities, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0].iter().map(|&x| (x, 3.0 * x.powf(2.5))).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
        assert_eq!(loglog_slope(&[(2.0, 1.0), (2.0, 3.0)]), None);
        // Non-positive values are skipped.
        assert!((loglog_slope(&[(1.0, 0.0), (2.0, 2.0), (4.0, 4.0)]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_ht_matches_closed_form() {
        // Simple walk on the n-cycle, started from π off x: the mean of
        // k(n - k) over k = 1..n-1, which is n(n + 1)/6.
        let spec = FamilySpec::new(Family::Cycle, 8);
        let cfg = ScalingConfig { lazy: false, ..Default::default() };
        let t = run_scaling(&spec, &[5, 7, 9, 11], &[Quantity::Ht], &cfg).unwrap();
        for (row, n) in t.rows.iter().zip([5.0f64, 7.0, 9.0, 11.0]) {
            let ht = row.values[0].unwrap();
            assert!((ht - n * (n + 1.0) / 6.0).abs() < 1e-9, "n = {n}: {ht}");
        }
        assert!((t.slope("ht").unwrap() - 2.0).abs() < 0.2);
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        // Non-lazy even cycles are periodic: no mixing time.
        let spec = FamilySpec::new(Family::Cycle, 8);
        let cfg = ScalingConfig { lazy: false, ..Default::default() };
        let t = run_scaling(&spec, &[2, 5, 6, 7], &[Quantity::Mixing], &cfg).unwrap();
        assert!(t.rows[0].error.is_some() && t.rows[0].n.is_none());
        assert!(t.rows[1].error.is_none());
        assert!(t.rows[2].error.is_some() && t.rows[2].n == Some(6));
        assert!(t.rows[3].error.is_none());
        assert!(t.slope("mixing").is_some());
        assert!(run_scaling(&spec, &[8, 5], &[Quantity::Ht], &cfg).is_err());
    }

    #[test]
    fn table_layout_and_costs() {
        let spec = FamilySpec::new(Family::Complete, 3);
        let cfg = ScalingConfig::default();
        let t = run_scaling(&spec, &[3, 4], &Quantity::ALL, &cfg).unwrap();
        let table = t.to_table();
        assert_eq!(
            table.columns,
            vec![
                "family",
                "size",
                "n",
                "ht",
                "sqrt_ht",
                "delta",
                "relax",
                "mixing",
                "mixing_bound",
                "qff_cost",
                "sample_cost",
                "sample_fidelity",
                "error"
            ]
        );
        assert_eq!(table.rows.len(), 3);
        assert_eq!(table.rows[2][1], Cell::Text("slope".into()));
        for r in &t.rows {
            assert!(r.error.is_none(), "{:?}", r.error);
            assert!(r.values[8].unwrap() >= 1.0 - cfg.eps);
        }
        let tight = ScalingConfig { max_dim: 8, ..cfg };
        let t = run_scaling(&spec, &[3], &[Quantity::SampleCost], &tight).unwrap();
        assert!(t.rows[0].error.as_deref().unwrap().contains("exceeds"));
    }

    #[test]
    fn averaging_over_seeds() {
        let spec = FamilySpec::new(Family::Gnp, 16);
        let cfg = ScalingConfig::default();
        let seeds = [1, 2, 3];
        let avg = run_scaling_averaged(&spec, &[16, 24], &[Quantity::Ht], &cfg, &seeds).unwrap();
        let mean: f64 = seeds
            .iter()
            .map(|&s| run_scaling(&spec.with_seed(s), &[16], &[Quantity::Ht], &cfg).unwrap().rows[0].values[0].unwrap())
            .sum::<f64>()
            / 3.0;
        assert!((avg.rows[0].values[0].unwrap() - mean).abs() < 1e-9);
        assert!(run_scaling_averaged(&spec, &[16], &[Quantity::Ht], &cfg, &[]).is_err());
    }
}
