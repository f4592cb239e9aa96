use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use orbidr_core::engine::{
    default_samples, dr_polynomial_class, polynomial_class, validate_dr_problem, working_bound, RPolyTermJson,
};
use orbidr_core::orbifold::BundleRep;
use orbidr_core::taut::TermJson;
use orbidr_core::weights::weight_count;
use orbidr_core::{
    dr_cycle, enumerate_decorations, leading_term_class, normalization, psi_integral, Branch, DRProblem, EngineConfig,
    Error, Rational, Sector, StableGraph, TautClass,
};
use serde::Serialize;

use crate::problem::{BranchChoice, ProblemFile};
use crate::Failure;

#[derive(Serialize)]
struct BranchResult {
    branch: Branch,
    terms: Vec<TermJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rpoly: Option<Vec<RPolyTermJson>>,
}

#[derive(Serialize)]
struct SampleRecord {
    branch: Branch,
    r_samples: Vec<u64>,
}

/// Run metadata, kept apart from the mathematical payload.
#[derive(Serialize)]
struct Provenance {
    version: &'static str,
    formula: &'static str,
    samples: Vec<SampleRecord>,
}

#[derive(Serialize)]
struct DrResult {
    problem: ProblemFile,
    branches: Vec<BranchResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<bool>,
    provenance: Provenance,
}

#[derive(Serialize)]
struct PolyResult {
    problem: ProblemFile,
    branch: Branch,
    degree: u32,
    terms: Vec<RPolyTermJson>,
    provenance: Provenance,
}

fn branches(choice: BranchChoice) -> Vec<Branch> {
    match choice {
        BranchChoice::Zero => vec![Branch::Zero],
        BranchChoice::Infinity => vec![Branch::Infinity],
        BranchChoice::Both => vec![Branch::Zero, Branch::Infinity],
    }
}

fn single_branch(choice: BranchChoice) -> Result<Branch, Failure> {
    match choice {
        BranchChoice::Zero => Ok(Branch::Zero),
        BranchChoice::Infinity => Ok(Branch::Infinity),
        BranchChoice::Both => Err(Failure::input("this command takes a single branch".into())),
    }
}

fn write_json(value: &impl Serialize, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::internal(e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::internal(e.to_string())),
    }
}

/// Attaches a suggested sample range to interpolation failures.
fn with_hint(e: Error, bound: u64) -> Failure {
    let mut f = Failure::from(e);
    if f.code == 3 {
        f.message.push_str(&format!("; use r_samples starting at {bound} or larger, or omit r_samples"));
    }
    f
}

pub fn dr(
    path: &Path,
    branch: Option<BranchChoice>,
    emit_rpoly: bool,
    out: Option<&Path>,
    config: &EngineConfig,
) -> Result<(), Failure> {
    let file = ProblemFile::load(path)?;
    let problem = file.dr_problem()?;
    let report = validate_dr_problem(&problem);
    if !report.all_pass() {
        eprint!("{report}");
        return Err(Failure::input("problem failed validation".into()));
    }
    let choice = branch.or(file.options.branch).unwrap_or(BranchChoice::Zero);
    let samples = file.options.r_samples.as_deref();

    let mut results = Vec::new();
    let mut records = Vec::new();
    let mut constants: Vec<TautClass> = Vec::new();
    for b in branches(choice) {
        let data = problem.top_data(b)?;
        let rp = dr_polynomial_class(&problem, b, config, samples)
            .map_err(|e| with_hint(e, working_bound(&data, config)))?;
        let c = rp.constant_term();
        records.push(SampleRecord { branch: b, r_samples: rp.samples().to_vec() });
        results.push(BranchResult { branch: b, terms: c.to_json(), rpoly: emit_rpoly.then(|| rp.to_json()) });
        constants.push(c);
    }
    let agreement = (constants.len() == 2).then(|| constants[0] == constants[1]);
    if agreement == Some(false) {
        eprintln!("warning: zero and infinity branches disagree");
    }
    let result = DrResult {
        problem: file,
        branches: results,
        agreement,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION"),
            formula: "graph sum at root order r, r^0 coefficient of the interpolant",
            samples: records,
        },
    };
    write_json(&result, out)
}

pub fn poly(
    path: &Path,
    degree: Option<u32>,
    branch: Option<BranchChoice>,
    out: Option<&Path>,
    config: &EngineConfig,
) -> Result<(), Failure> {
    let file = ProblemFile::load(path)?;
    let b = single_branch(branch.or(file.options.branch).unwrap_or(BranchChoice::Zero))?;
    let data = file.top_data(b)?;
    let d = degree.or(file.options.degree).unwrap_or(file.genus);
    if d > data.dim() {
        return Err(Error::DegreeOutOfRange { degree: d, dim: data.dim() }.into());
    }
    let samples = match &file.options.r_samples {
        Some(s) => s.clone(),
        None => default_samples(&data, d, config),
    };
    let rp = polynomial_class(&data, d, &samples).map_err(|e| with_hint(e, working_bound(&data, config)))?;
    let result = PolyResult {
        problem: file,
        branch: b,
        degree: d,
        terms: rp.to_json(),
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION"),
            formula: "graph sum at root order r, interpolated per term",
            samples: vec![SampleRecord { branch: b, r_samples: samples }],
        },
    };
    write_json(&result, out)
}

pub fn graphs(g: u32, n: usize, max_edges: Option<usize>) -> Result<(), Failure> {
    let list = match max_edges {
        Some(k) => orbidr_core::graphs::enumerate_graphs_max_edges(g, n, k)?,
        None => orbidr_core::enumerate_graphs(g, n)?,
    };
    let mut stdout = std::io::stdout().lock();
    for graph in list.iter() {
        writeln!(stdout, "{}\taut={}", graph.encoding(), graph.automorphism_order())
            .map_err(|e| Failure::internal(e.to_string()))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct WeightEntry {
    graph: String,
    chi: Vec<Sector>,
    h1: usize,
    count: u64,
}

#[derive(Serialize)]
struct WeightsResult {
    r: u64,
    entries: Vec<WeightEntry>,
}

pub fn weights(path: &Path, r: u64, branch: Option<BranchChoice>) -> Result<(), Failure> {
    if r == 0 {
        return Err(Failure::input("--r must be positive".into()));
    }
    let file = ProblemFile::load(path)?;
    let b = single_branch(branch.or(file.options.branch).unwrap_or(BranchChoice::Zero))?;
    let data = file.top_data(b)?;
    let mut entries = Vec::new();
    for graph in orbidr_core::enumerate_graphs(data.g, data.n())?.iter() {
        for dec in enumerate_decorations(graph, data.rep, &data.leg_sectors)? {
            entries.push(WeightEntry {
                graph: graph.encoding(),
                chi: dec.chi().to_vec(),
                h1: graph.h1(),
                count: weight_count(&dec, data.rep, &data.lifts, r)?,
            });
        }
    }
    write_json(&WeightsResult { r, entries }, None)
}

fn parse_exponents(args: &[String]) -> Result<Vec<u32>, Failure> {
    args.iter()
        .flat_map(|a| a.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::input(format!("bad exponent {s:?}"))))
        .collect()
}

pub fn psi(g: u32, args: &[String]) -> Result<(), Failure> {
    let exps = parse_exponents(args)?;
    println!("{}", psi_integral(g, &exps)?);
    Ok(())
}

fn q(s: &str) -> Rational {
    s.parse().expect("literal rational")
}

fn check(name: &str, outcome: Result<bool, Error>, failures: &mut usize) {
    let (pass, detail) = match outcome {
        Ok(p) => (p, String::new()),
        Err(e) => (false, format!(" ({e})")),
    };
    if !pass {
        *failures += 1;
    }
    println!("[{}] {name}{detail}", if pass { "pass" } else { "FAIL" });
}

fn contacts(g: u32, rep: BundleRep, mu0: &[(u32, &str)], mu_inf: &[(u32, &str)]) -> DRProblem {
    let conv = |v: &[(u32, &str)]| v.iter().map(|&(s, x)| (Sector(s), q(x))).collect();
    DRProblem { g, rep, absolute: vec![], mu0: conv(mu0), mu_inf: conv(mu_inf) }
}

pub fn selftest() -> Result<(), Failure> {
    let mut failures = 0;
    check("psi <tau_1>_1 = 1/24", psi_integral(1, &[1]).map(|v| v == q("1/24")), &mut failures);
    check("psi <tau_4>_2 = 1/1152", psi_integral(2, &[4]).map(|v| v == q("1/1152")), &mut failures);
    check(
        "branch signs are (+1, -1)",
        normalization().map(|n| (n.zero, n.infinity) == (1, -1)),
        &mut failures,
    );

    let g0 = contacts(0, BundleRep { m: 2, s: 1 }, &[(1, "1/2"), (1, "1/2")], &[(0, "1")]);
    check(
        "genus 0, m = 2: fundamental class",
        dr_cycle(&g0, Branch::Zero).map(|c| c == TautClass::fundamental(c.ambient(), &[Sector(1), Sector(1), Sector(0)])),
        &mut failures,
    );

    let g1 = contacts(1, BundleRep::trivial(), &[(0, "2")], &[(0, "2")]);
    check(
        "genus 1, a = 2: psi coefficient 2 and loop coefficient -1/24",
        dr_cycle(&g1, Branch::Zero).map(|c| {
            let smooth = Arc::new(StableGraph::smooth(1, 2));
            let mut psi = orbidr_core::TermKey::stratum(smooth, vec![Sector(0); 2]);
            psi.psi[0] = 1;
            let lp = StableGraph::new(vec![0], vec![0, 0], vec![(0, 0)]).expect("valid graph");
            let lp = orbidr_core::TermKey::stratum(Arc::new(lp), vec![Sector(0); 4]);
            c.coefficient(&psi) == q("2") && c.coefficient(&lp) == q("-1/24")
        }),
        &mut failures,
    );
    check(
        "genus 1, a = 2: integral against psi_1 is 1/8",
        dr_cycle(&g1, Branch::Zero)
            .and_then(|c| orbidr_core::evaluate_class_integral(&c, &BTreeMap::from([(0, 1)])))
            .map(|v| v == q("1/8")),
        &mut failures,
    );

    let g1m3 = contacts(1, BundleRep { m: 3, s: 1 }, &[(1, "1/3")], &[(2, "1/3")]);
    check(
        "genus 1, m = 3: zero and infinity branches agree",
        dr_cycle(&g1m3, Branch::Zero).and_then(|z| Ok(z == dr_cycle(&g1m3, Branch::Infinity)?)),
        &mut failures,
    );
    check(
        "genus 1, m = 3: direct constant term matches interpolation",
        g1m3.top_data(Branch::Zero).and_then(|data| {
            let z = dr_cycle(&g1m3, Branch::Zero)?;
            Ok(leading_term_class(&data, 1)?.homogeneous_part(1) == z)
        }),
        &mut failures,
    );

    if failures > 0 {
        return Err(Failure::internal(format!("{failures} self-test check(s) failed")));
    }
    Ok(())
}
