//! Random solvable diagnosis problems with planted conflicts.
//!
//! Each planted conflict is an implication ladder over fresh atoms
//! `c0, c0 -> c1, .., not c_last`; a ladder of size two is `{c0, not c0}`.
//! Ladders may reuse the root fact of an earlier ladder, which makes their
//! conflicts overlap. The remaining axioms are filler over separate atoms
//! and hold when all of those atoms are true. Every step is written in one
//! of several equivalent forms so that axioms differ in their operators.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagnosis::AxiomSet;
use crate::error::{Error, Result};
use crate::logic::{parse_formula, serialize_dpi, Dpi, Formula, SentenceSet};
use crate::prob::{DistributionKind, DistributionSpec, FaultModel};
use crate::seed::{derive_seed, stream};

#[derive(Debug, Clone, PartialEq)]
pub struct DpiParams {
    pub n_axioms: usize,
    /// Atoms available to filler axioms.
    pub n_atoms: usize,
    pub n_conflicts: usize,
    /// Inclusive range of planted conflict sizes.
    pub conflict_size: (usize, usize),
    /// Probability that a ladder of size three or more starts from the root
    /// fact of an earlier ladder.
    pub share: f64,
    pub seed: u64,
}

impl DpiParams {
    pub fn new(n_axioms: usize, n_conflicts: usize, conflict_size: (usize, usize), seed: u64) -> Self {
        DpiParams {
            n_axioms,
            n_atoms: n_axioms,
            n_conflicts,
            conflict_size,
            share: 0.5,
            seed,
        }
    }
}

/// A generated problem together with its planted conflicts (as indices
/// into the shuffled `K`).
#[derive(Debug, Clone)]
pub struct GeneratedDpi {
    pub dpi: Dpi,
    pub planted: Vec<AxiomSet>,
}

fn infeasible(msg: impl Into<String>) -> Error {
    Error::InfeasibleParams(msg.into())
}

fn pick<'a, R: Rng>(rng: &mut R, forms: &'a [String]) -> &'a str {
    forms.choose(rng).expect("nonempty forms")
}

fn root_forms(a: &str) -> Vec<String> {
    vec![
        a.to_string(),
        format!("(not (not {a}))"),
        format!("(and {a} {a})"),
        format!("(or {a} (and {a} {a}))"),
    ]
}

fn step_forms(a: &str, b: &str) -> Vec<String> {
    vec![
        format!("(implies {a} {b})"),
        format!("(or (not {a}) {b})"),
        format!("(not (and {a} (not {b})))"),
        format!("(iff {a} (and {a} {b}))"),
        format!("(implies (and {a} {a}) (or {b} {b}))"),
        format!("(or (not {a}) (and {b} (not (not {b}))))"),
    ]
}

fn denial_forms(a: &str) -> Vec<String> {
    vec![
        format!("(not {a})"),
        format!("(implies {a} (not {a}))"),
        format!("(iff {a} false)"),
        format!("(not (or {a} (and {a} {a})))"),
    ]
}

fn filler_forms(a: &str, b: &str) -> Vec<String> {
    vec![
        a.to_string(),
        format!("(implies {a} {b})"),
        format!("(or {a} (not {b}))"),
        format!("(and {a} {b})"),
        format!("(iff {a} {b})"),
        format!("(or (not {a}) (and {a} {b}))"),
    ]
}

/// Generates a solvable DPI whose planted ladders are minimal conflicts.
pub fn generate(params: &DpiParams) -> Result<GeneratedDpi> {
    let (lo, hi) = params.conflict_size;
    if params.n_conflicts == 0 {
        return Err(infeasible("at least one conflict is required"));
    }
    if lo < 2 || lo > hi {
        return Err(infeasible(format!("conflict size range {lo}..={hi} is empty or below 2")));
    }
    if !(0.0..=1.0).contains(&params.share) {
        return Err(infeasible(format!("share {} is not a probability", params.share)));
    }
    let mut rng = stream(params.seed, "dpi");
    let mut sizes: Vec<usize> = (0..params.n_conflicts).map(|_| rng.gen_range(lo..=hi)).collect();
    let mut shares: Vec<Option<usize>> = vec![None; params.n_conflicts];
    for j in 1..params.n_conflicts {
        if sizes[j] >= 3 && rng.gen_bool(params.share) {
            shares[j] = Some(rng.gen_range(0..j));
        }
    }
    let needed = |sizes: &[usize], shares: &[Option<usize>]| -> usize {
        sizes.iter().zip(shares).map(|(s, sh)| s - usize::from(sh.is_some())).sum()
    };
    // Shrink the largest ladders until everything fits.
    while needed(&sizes, &shares) > params.n_axioms {
        let (j, _) = sizes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > lo)
            .max_by_key(|(j, &s)| (s, std::cmp::Reverse(*j)))
            .ok_or_else(|| infeasible(format!("planted conflicts do not fit into {} axioms", params.n_axioms)))?;
        sizes[j] -= 1;
        if sizes[j] < 3 {
            shares[j] = None;
        }
    }

    // (text, ladder ids containing it)
    let mut axioms: Vec<(String, Vec<usize>)> = Vec::new();
    let mut roots: Vec<(usize, String)> = Vec::new();
    for (j, &size) in sizes.iter().enumerate() {
        let (root_axiom, root_atom) = match shares[j] {
            Some(src) => {
                let (idx, atom) = roots[src].clone();
                axioms[idx].1.push(j);
                (idx, atom)
            }
            None => {
                let atom = format!("c{j}_0");
                axioms.push((pick(&mut rng, &root_forms(&atom)).to_string(), vec![j]));
                (axioms.len() - 1, atom)
            }
        };
        roots.push((root_axiom, root_atom.clone()));
        let mut prev = root_atom;
        for k in 1..size - 1 {
            let next = format!("c{j}_{k}");
            axioms.push((pick(&mut rng, &step_forms(&prev, &next)).to_string(), vec![j]));
            prev = next;
        }
        axioms.push((pick(&mut rng, &denial_forms(&prev)).to_string(), vec![j]));
    }

    let filler_atoms = params.n_atoms.max(1);
    while axioms.len() < params.n_axioms {
        let a = format!("f{}", rng.gen_range(0..filler_atoms));
        let b = format!("f{}", rng.gen_range(0..filler_atoms));
        axioms.push((pick(&mut rng, &filler_forms(&a, &b)).to_string(), Vec::new()));
    }
    axioms.shuffle(&mut rng);

    let mut kb = SentenceSet::new();
    let mut planted = vec![AxiomSet::new(); params.n_conflicts];
    for (i, (text, ladders)) in axioms.iter().enumerate() {
        let f: Formula = parse_formula(text).expect("generated axioms are well-formed");
        kb.push(format!("ax{}", i + 1), f);
        for &j in ladders {
            planted[j].insert(i);
        }
    }
    Ok(GeneratedDpi {
        dpi: Dpi::new(kb),
        planted,
    })
}

/// Convenience wrapper returning only the problem.
pub fn generate_dpi(params: &DpiParams) -> Result<Dpi> {
    generate(params).map(|g| g.dpi)
}

/// `prob_choices` fault models per distribution kind, seeded by
/// `(master_seed, kind, choice)`. Returned in `kinds` order, then by choice.
pub fn instantiate_fault_models(
    dpi: &Dpi,
    kinds: &[DistributionKind],
    prob_choices: usize,
    master_seed: u64,
) -> Vec<(DistributionKind, usize, FaultModel)> {
    let mut out = Vec::with_capacity(kinds.len() * prob_choices);
    for &kind in kinds {
        for choice in 0..prob_choices {
            let seed = derive_seed(&format!("fault-model/{master_seed}/{kind}/{choice}"));
            out.push((kind, choice, FaultModel::generate(dpi, DistributionSpec::new(kind, seed))));
        }
    }
    out
}

pub const MANIFEST_HEADER: [&str; 9] = [
    "name",
    "file",
    "n_axioms",
    "n_atoms",
    "n_conflicts",
    "min_size",
    "max_size",
    "share",
    "seed",
];

/// Generates `count` problems with seeds derived from `params.seed` and
/// writes `dpi_<i>.dpi` files plus `manifest.csv` into `dir`.
pub fn write_dpi_set(dir: &Path, params: &DpiParams, count: usize) -> Result<Vec<(String, Dpi)>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest_path = dir.join("manifest.csv");
    let mut manifest = csv::Writer::from_path(&manifest_path).map_err(|e| Error::csv(&manifest_path, e))?;
    manifest
        .write_record(MANIFEST_HEADER)
        .map_err(|e| Error::csv(&manifest_path, e))?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let p = DpiParams {
            seed: if count == 1 {
                params.seed
            } else {
                derive_seed(&format!("dpi-set/{}/{i}", params.seed))
            },
            ..params.clone()
        };
        let dpi = generate_dpi(&p)?;
        let name = format!("dpi_{i}");
        let file = format!("{name}.dpi");
        let path = dir.join(&file);
        fs::write(&path, serialize_dpi(&dpi)).map_err(|e| Error::io(&path, e))?;
        manifest
            .write_record([
                name.clone(),
                file,
                p.n_axioms.to_string(),
                p.n_atoms.to_string(),
                p.n_conflicts.to_string(),
                p.conflict_size.0.to_string(),
                p.conflict_size.1.to_string(),
                p.share.to_string(),
                p.seed.to_string(),
            ])
            .map_err(|e| Error::csv(&manifest_path, e))?;
        out.push((name, dpi));
    }
    manifest.flush().map_err(|e| Error::io(&manifest_path, e))?;
    Ok(out)
}
