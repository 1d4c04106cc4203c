//! Randomized verification of the whole duality catalog.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::afm::SystemSpec;
use crate::duality::{verify_relation, DualityCheckReport, FreeParams, Regime, RelationId};
use crate::error::{Error, Result};
use crate::potentials::{Potential, PotentialKind};

pub const SWEEP_KINDS: [PotentialKind; 3] = [PotentialKind::Linear, PotentialKind::Quadratic, PotentialKind::Funnel];

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub seed: u64,
    /// Instances per (relation, potential kind) pair.
    pub count: usize,
    pub tol: f64,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    pub relations: Vec<RelationId>,
    pub kinds: Vec<PotentialKind>,
}

impl SweepConfig {
    pub fn new(seed: u64, count: usize, tol: f64) -> Self {
        SweepConfig {
            seed,
            count,
            tol,
            jobs: None,
            relations: RelationId::ALL.to_vec(),
            kinds: SWEEP_KINDS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepInstance {
    pub relation: RelationId,
    pub spec: SystemSpec,
    #[serde(rename = "Q")]
    pub q: f64,
    pub free: FreeParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    #[serde(flatten)]
    pub instance: SweepInstance,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<DualityCheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_rel_residual: f64,
}

fn random_potential(rng: &mut ChaCha8Rng, kind: PotentialKind) -> Potential {
    match kind {
        PotentialKind::Linear => Potential::Linear { a: rng.gen_range(0.5..2.0) },
        PotentialKind::Quadratic => Potential::Quadratic { k: rng.gen_range(0.5..2.0) },
        // A weak Coulomb tail keeps massless funnel systems bound for Q ≥ 1, N ≤ 8.
        PotentialKind::Funnel => Potential::Funnel { a: rng.gen_range(0.005..0.03), b: rng.gen_range(0.5..2.0) },
        other => unreachable!("{} is not part of the sweep", other.name()),
    }
}

/// Draws one instance of `rel` with a potential of the given kind.
pub fn random_instance(rng: &mut ChaCha8Rng, rel: RelationId, kind: PotentialKind) -> Result<SweepInstance> {
    if !SWEEP_KINDS.contains(&kind) {
        return Err(Error::Unsupported(format!("{} is not a sweep potential", kind.name())));
    }
    let n: usize = rng.gen_range(2..=8);
    let p: usize = rng.gen_range(2..=8);
    let m = rng.gen_range(0.1..10.0);
    let q = rng.gen_range(1.0..20.0);
    let sigma = rng.gen_range(0.2..5.0);
    let mut beta = rng.gen_range(0.2..5.0);
    let c = rng.gen_range(0.1..5.0);
    if rel == RelationId::Nr1bBeta {
        // β p must be the integer N.
        beta = n as f64 / p as f64;
    }
    let needs = rel.needs();
    let free = FreeParams {
        p: needs.p.then_some(p),
        sigma: needs.sigma.then_some(sigma),
        beta: needs.beta.then_some(beta),
        c: needs.c.then_some(c),
    };

    let pot = random_potential(rng, kind);
    let (u, v) = match rel.body() {
        Some(crate::duality::Body::One) => (Some(pot), None),
        Some(crate::duality::Body::Two) => (None, Some(pot)),
        None => (Some(pot), Some(random_potential(rng, kind))),
    };
    let spec = match rel.regime() {
        Regime::General => SystemSpec::semirelativistic(n, m, u, v)?,
        Regime::Ultrarelativistic => SystemSpec::ultrarelativistic(n, u, v)?,
        Regime::Nonrelativistic | Regime::Bridge => SystemSpec::nonrelativistic(n, m, u, v)?,
    };
    Ok(SweepInstance { relation: rel, spec, q, free })
}

/// All instances of a sweep, in a fixed order determined by the seed.
pub fn sweep_instances(cfg: &SweepConfig) -> Result<Vec<SweepInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.relations.len() * cfg.kinds.len() * cfg.count);
    for &rel in &cfg.relations {
        for &kind in &cfg.kinds {
            for _ in 0..cfg.count {
                out.push(random_instance(&mut rng, rel, kind)?);
            }
        }
    }
    Ok(out)
}

pub fn check_instance(inst: SweepInstance, tol: f64) -> SweepRecord {
    match verify_relation(inst.relation, &inst.spec, inst.q, &inst.free, tol) {
        Ok(report) => SweepRecord { instance: inst, passed: report.passed, report: Some(report), error: None },
        Err(e) => SweepRecord { instance: inst, passed: false, report: None, error: Some(e.to_string()) },
    }
}

/// Runs the sweep on a worker pool; records come back in instance order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<(Vec<SweepRecord>, SweepSummary)> {
    let instances = sweep_instances(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let tol = cfg.tol;
    let records: Vec<SweepRecord> =
        pool.install(|| instances.into_par_iter().map(|inst| check_instance(inst, tol)).collect());
    let passed = records.iter().filter(|r| r.passed).count();
    let max_rel_residual = records
        .iter()
        .filter_map(|r| r.report.as_ref().map(|rep| rep.rel_residual))
        .fold(0.0, f64::max);
    let summary = SweepSummary { total: records.len(), passed, failed: records.len() - passed, max_rel_residual };
    Ok((records, summary))
}
