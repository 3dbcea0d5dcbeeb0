//! Snapshot comparison and grid-convergence runs.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{
    coarsen_average, coarsen_inject, convergence_order, l2_distance, linf_distance, ConvergenceReport, Reference,
};
use crate::error::{Error, Result};
use crate::fields::Macroscopic;
use crate::harness::config::{with_overrides, RunConfig, SchemeKind};
use crate::harness::output::{locate_snapshot, Snapshot};
use crate::harness::run::simulate;

/// Relative tolerance on the snapshot times of compared runs.
pub const TIME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    L2,
    Linf,
}

impl FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            _ => Err(Error::Config(format!("norm '{s}' (expected l2 or linf)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coarsening {
    #[default]
    Average,
    Inject,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDistance {
    pub field: String,
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub t: f64,
    /// Cell count the finer snapshot was reduced to.
    pub n: usize,
    pub fields: Vec<FieldDistance>,
}

impl Comparison {
    pub fn get(&self, field: &str) -> Option<&FieldDistance> {
        self.fields.iter().find(|f| f.field == field)
    }

    pub fn table(&self, norm: Norm) -> String {
        let mut out = format!(
            "# t = {:.6}, N = {}\nfield,{}\n",
            self.t,
            self.n,
            match norm {
                Norm::L2 => "l2",
                Norm::Linf => "linf",
            }
        );
        for f in &self.fields {
            let v = match norm {
                Norm::L2 => f.l2,
                Norm::Linf => f.linf,
            };
            out.push_str(&format!("{},{v:.6e}\n", f.field));
        }
        out
    }
}

const COMPARED: [&str; 6] = ["rho", "u", "p", "T", "s", "zeta"];

/// Distances between two snapshots taken at the same time, the finer one
/// reduced onto the coarser grid.
pub fn compare_snapshots(a: &Snapshot, ta: f64, b: &Snapshot, tb: f64, mode: Coarsening) -> Result<Comparison> {
    if (ta - tb).abs() > TIME_TOLERANCE * ta.abs().max(tb.abs()).max(1.0) {
        return Err(Error::Incompatible(format!("snapshot times differ: {ta} vs {tb}")));
    }
    let (coarse, fine) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let n = coarse.len();
    let mut fields = Vec::new();
    for name in COMPARED {
        let c = coarse.column(name).expect("known column");
        let f = fine.column(name).expect("known column");
        let f = match mode {
            Coarsening::Average => coarsen_average(f, n)?,
            Coarsening::Inject => coarsen_inject(f, n)?,
        };
        fields.push(FieldDistance {
            field: name.into(),
            l2: l2_distance(c, &f),
            linf: linf_distance(c, &f),
        });
    }
    Ok(Comparison { t: ta, n, fields })
}

/// Compares two run directories (last snapshot) or snapshot files.
pub fn compare_runs(a: &Path, b: &Path, mode: Coarsening) -> Result<Comparison> {
    let (pa, ta) = locate_snapshot(a)?;
    let (pb, tb) = locate_snapshot(b)?;
    compare_snapshots(&Snapshot::read(&pa)?, ta, &Snapshot::read(&pb)?, tb, mode)
}

/// What a convergence study measures against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSpec {
    SelfConvergence,
    Fd(usize),
    Lbm(usize),
}

impl FromStr for ReferenceSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("reference '{s}' (expected self, fd:N or lbm:N)"));
        if s == "self" {
            return Ok(ReferenceSpec::SelfConvergence);
        }
        let (kind, n) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        match kind {
            "fd" => Ok(ReferenceSpec::Fd(n)),
            "lbm" => Ok(ReferenceSpec::Lbm(n)),
            _ => Err(bad()),
        }
    }
}

fn final_fields(base: &RunConfig, scheme: SchemeKind, n: usize, extra: &[String]) -> Result<Macroscopic> {
    let mut o = vec![format!("scheme={}", scheme.as_str()), format!("grid.n={n}")];
    o.extend_from_slice(extra);
    let r = with_overrides(base, &o)?;
    Ok(simulate(&r)?.last().fields.clone())
}

/// Runs `base` on every mesh and estimates L2 orders against `reference`.
pub fn convergence(
    base: &RunConfig,
    meshes: &[usize],
    reference: ReferenceSpec,
    extra: &[String],
) -> Result<ConvergenceReport> {
    let scheme = base.scheme;
    let reference = match reference {
        ReferenceSpec::SelfConvergence => Reference::SelfConvergence,
        ReferenceSpec::Fd(n) => Reference::Fields(final_fields(base, SchemeKind::ReferenceFd, n, extra)?),
        ReferenceSpec::Lbm(n) => Reference::Fields(final_fields(base, scheme, n, extra)?),
    };
    convergence_order(|n| final_fields(base, scheme, n, extra), meshes, &reference)
}
