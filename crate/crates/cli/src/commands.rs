use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use modcert::absorb::criteria::{self, CriterionReport};
use modcert::graph::formats;
use modcert::oracle;
use modcert::parity::verify_even_partition;
use modcert::reservoir::{self, ReservoirSpec, TraceDistribution};
use modcert::traces::{self, NextBit, OrbitForm, QuotientClass, TraceTableDocument};
use modcert::witness::{is_q_modular, Modularity};
use modcert::{AbsorptionProblem, Certificate, CertificateDocument, Error, Graph, VertexSet};

use crate::budget;
use crate::{Cli, Command, CoreArgs, ProblemArgs};

pub struct CliError {
    pub message: String,
    pub internal: bool,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            internal: false,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            internal: e.is_internal(),
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Rewrites errors that carry vertex ids so they use the input names.
fn named(g: &Graph, e: Error) -> CliError {
    let message = match &e {
        Error::NotModular {
            q,
            u,
            deg_u,
            v,
            deg_v,
        } => format!(
            "set is not {q}-modular: deg({}) = {deg_u} and deg({}) = {deg_v} differ mod {q}",
            g.name(*u),
            g.name(*v)
        ),
        Error::NotSubset { what, vertex } => {
            format!("{what}: vertex {} is not a member", g.name(*vertex))
        }
        Error::Overlap(v) => format!("sets overlap at vertex {}", g.name(*v)),
        _ => return e.into(),
    };
    CliError {
        message,
        internal: e.is_internal(),
    }
}

fn read_source(path: &Path) -> CliResult<String> {
    let result = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(path)
    };
    result.map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load(path: &Path, format: &str) -> CliResult<Graph> {
    Ok(formats::load_graph(&read_source(path)?, format)?)
}

struct Output {
    json: bool,
}

impl Output {
    fn emit<T: Serialize>(&self, value: &T, human: impl FnOnce(&T) -> String) -> CliResult<()> {
        if self.json {
            let text =
                serde_json::to_string_pretty(value).map_err(|e| CliError::from(Error::Json(e)))?;
            println!("{text}");
        } else {
            print!("{}", human(value));
        }
        Ok(())
    }
}

fn join(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

fn witness_set(g: &Graph, witness: &Option<Vec<String>>) -> CliResult<VertexSet> {
    match witness {
        Some(names) => Ok(g.resolve(names)?),
        None => Ok(g.all_vertices()),
    }
}

/// Core and tail (witness minus core) as vertex sets.
fn core_and_tail(g: &Graph, sets: &CoreArgs) -> CliResult<(VertexSet, VertexSet)> {
    let core = g.resolve(&sets.core)?;
    let witness = witness_set(g, &sets.witness)?;
    if let Some(v) = core.first_outside(&witness) {
        return Err(named(
            g,
            Error::NotSubset {
                what: "core must lie in the witness",
                vertex: v,
            },
        ));
    }
    let tail = witness.difference(&core);
    Ok((core, tail))
}

fn problem<'g>(g: &'g Graph, args: &ProblemArgs) -> CliResult<AbsorptionProblem<'g>> {
    let core = g.resolve(&args.sets.core)?;
    let witness = witness_set(g, &args.sets.witness)?;
    AbsorptionProblem::from_parts(g, witness, core, args.q).map_err(|e| named(g, e))
}

/// Core vertices other than the base (first) one on which the class
/// representative with value 0 at the base is 1.
fn class_support(g: &Graph, core: &VertexSet, class: &QuotientClass) -> Vec<String> {
    g.names_of(class.coords().iter_ones().map(|i| core.as_slice()[i + 1]))
}

pub fn run(cli: &Cli) -> CliResult<u8> {
    let out = Output { json: cli.json };
    let fmt = cli.format.as_str();
    match &cli.command {
        Command::Parity(a) => parity(&out, &load(&a.graph, fmt)?),
        Command::CheckModular { graph, q, witness } => {
            let g = load(&graph.graph, fmt)?;
            check_modular(&out, &g, *q, witness)
        }
        Command::Traces { graph, sets } => {
            let g = load(&graph.graph, fmt)?;
            trace_table(&out, &g, sets)
        }
        Command::NextBit { graph, sets, max_m } => {
            let g = load(&graph.graph, fmt)?;
            next_bit(&out, &g, sets, *max_m)
        }
        Command::PairTrace { graph, sets, q } => {
            let g = load(&graph.graph, fmt)?;
            pair_trace(&out, &g, sets, *q)
        }
        Command::Nd(a) => nd(&out, &load(&a.graph, fmt)?),
        Command::OracleF(a) => oracle_f(&out, &load(&a.graph, fmt)?),
        Command::OracleAbsorb { graph, problem: p } => {
            let g = load(&graph.graph, fmt)?;
            oracle_absorb(&out, &problem(&g, p)?)
        }
        Command::Absorb { graph, problem: p } => {
            let g = load(&graph.graph, fmt)?;
            absorb(&problem(&g, p)?)
        }
        Command::Verify { graph, certificate } => {
            let g = load(&graph.graph, fmt)?;
            verify(&out, &g, certificate)
        }
        Command::Criteria {
            graph,
            problem: p,
            only,
        } => {
            let g = load(&graph.graph, fmt)?;
            criteria_report(&out, &problem(&g, p)?, only)
        }
        Command::Reservoir {
            m,
            q,
            samples,
            delta,
            trials,
            seed,
            distribution,
        } => {
            let distribution = match distribution {
                Some(path) => serde_json::from_str(&read_source(path)?).map_err(Error::Json)?,
                None => TraceDistribution::Uniform,
            };
            let samples = match (samples, &distribution) {
                (Some(n), _) => *n,
                (None, TraceDistribution::Uniform) => {
                    if !(*delta > 0.0 && *delta < 1.0) {
                        return Err(CliError::input("--delta must lie in (0, 1)"));
                    }
                    reservoir::uniform_sample_size(*m, *q, *delta)
                }
                (None, _) => {
                    return Err(CliError::input(
                        "--samples is required with an explicit distribution",
                    ))
                }
            };
            let spec = ReservoirSpec {
                m: *m,
                q: *q,
                distribution,
                samples,
                trials: *trials,
                seed: *seed,
            };
            reservoir_report(&out, &spec)
        }
        Command::LadderBudget { c, a, c0, r } => {
            let b = budget::ladder_budget(*c, *a, *c0, *r).map_err(CliError::input)?;
            out.emit(&b, |b| {
                let value = b
                    .vertices
                    .map_or_else(|| "overflows f64".to_string(), |v| format!("{v}"));
                format!("vertices  {value}\nlog2      {}\n", b.log2_vertices)
            })?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct ParityReport {
    zero: Vec<String>,
    one: Vec<String>,
    larger_size: usize,
    verified: bool,
}

fn parity(out: &Output, g: &Graph) -> CliResult<u8> {
    let p = modcert::parity_partition(g)?;
    let verified = verify_even_partition(g, &p.zero, &p.one)?;
    let report = ParityReport {
        zero: g.names_of(p.zero.iter()),
        one: g.names_of(p.one.iter()),
        larger_size: p.larger().len(),
        verified,
    };
    out.emit(&report, |r| {
        format!(
            "part 0    {}\npart 1    {}\nlarger    {}\nverified  {}\n",
            join(&r.zero),
            join(&r.one),
            r.larger_size,
            r.verified
        )
    })?;
    if verified {
        Ok(0)
    } else {
        Err(CliError::from(Error::Internal(
            "parity partition failed verification".into(),
        )))
    }
}

#[derive(Serialize)]
struct Violation {
    u: String,
    degree_u: usize,
    v: String,
    degree_v: usize,
}

#[derive(Serialize)]
struct ModularReport {
    q: u64,
    set: Vec<String>,
    modular: bool,
    residue: Option<u64>,
    violation: Option<Violation>,
}

fn check_modular(out: &Output, g: &Graph, q: u64, witness: &Option<Vec<String>>) -> CliResult<u8> {
    let set = witness_set(g, witness)?;
    let m = is_q_modular(g, &set, q)?;
    let (residue, violation) = match m {
        Modularity::Modular { residue } => (residue, None),
        Modularity::NotModular { u, v } => {
            let deg = g.induced_degrees(&set)?;
            let violation = Violation {
                u: g.name(u).to_string(),
                degree_u: deg[&u],
                v: g.name(v).to_string(),
                degree_v: deg[&v],
            };
            (None, Some(violation))
        }
    };
    let report = ModularReport {
        q,
        set: g.names_of(set.iter()),
        modular: m.is_modular(),
        residue,
        violation,
    };
    out.emit(&report, |r| match &r.violation {
        None => format!(
            "{}-modular, residue {}\n",
            r.q,
            r.residue
                .map_or_else(|| "none (empty set)".into(), |d| d.to_string())
        ),
        Some(v) => format!(
            "not {}-modular: deg({}) = {}, deg({}) = {}\n",
            r.q, v.u, v.degree_u, v.v, v.degree_v
        ),
    })?;
    Ok(if m.is_modular() { 0 } else { 1 })
}

#[derive(Serialize)]
struct OrbitTerm {
    trace: Vec<String>,
    difference: i64,
}

#[derive(Serialize)]
struct TracesReport {
    table: TraceTableDocument,
    rho: Vec<i64>,
    complement_differences: Vec<OrbitTerm>,
    /// Support of the class of the representative mod 2, base vertex excluded.
    difference_class: Vec<String>,
}

fn trace_table(out: &Output, g: &Graph, sets: &CoreArgs) -> CliResult<u8> {
    let (core, tail) = core_and_tail(g, sets)?;
    let table = traces::compute_traces(g, &core, &tail).map_err(|e| named(g, e))?;
    let cd = traces::complement_difference_class(&table)?;
    let report = TracesReport {
        table: table.to_document(Some(g)),
        rho: traces::rho(&table),
        complement_differences: cd
            .terms
            .iter()
            .map(|(b, diff)| OrbitTerm {
                trace: g.names_of(table.members(b)),
                difference: *diff,
            })
            .collect(),
        difference_class: class_support(g, &core, &cd.class),
    };
    out.emit(&report, |r| {
        let mut s = String::new();
        let _ = writeln!(s, "core  {}", join(&r.table.core));
        let _ = writeln!(s, "tail  {}", join(&r.table.tail));
        for e in &r.table.traces {
            let _ = writeln!(
                s,
                "n_{} = {}  {}",
                join(&e.trace),
                e.count,
                join(&e.realizers)
            );
        }
        let rho: Vec<String> = r.rho.iter().map(i64::to_string).collect();
        let _ = writeln!(s, "rho   ({})", rho.join(","));
        for t in &r.complement_differences {
            let _ = writeln!(s, "orbit {}  difference {}", join(&t.trace), t.difference);
        }
        let _ = writeln!(s, "class {}", join(&r.difference_class));
        s
    })?;
    Ok(0)
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
enum ClassStatus {
    Zero,
    Nonzero { support: Vec<String> },
    Undefined,
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
enum OrbitStatus {
    Zero,
    Nonzero { support: Vec<String> },
    DivisibilityFails { trace: Vec<String>, difference: i64 },
}

#[derive(Serialize)]
struct NextBitRow {
    m: u32,
    theta: ClassStatus,
    orbit_form: OrbitStatus,
}

#[derive(Serialize)]
struct NextBitReport {
    core: Vec<String>,
    rho: Vec<i64>,
    levels: Vec<NextBitRow>,
}

fn class_status(g: &Graph, core: &VertexSet, class: &QuotientClass) -> ClassStatus {
    if class.is_zero() {
        ClassStatus::Zero
    } else {
        ClassStatus::Nonzero {
            support: class_support(g, core, class),
        }
    }
}

fn next_bit(out: &Output, g: &Graph, sets: &CoreArgs, max_m: u32) -> CliResult<u8> {
    let (core, tail) = core_and_tail(g, sets)?;
    let table = traces::compute_traces(g, &core, &tail).map_err(|e| named(g, e))?;
    let rho = traces::rho(&table);
    let levels = (0..=max_m)
        .map(|m| {
            let theta = match traces::next_bit_obstruction(&rho, m) {
                NextBit::Class(c) => class_status(g, &core, &c),
                NextBit::NotConstantModulo { .. } => ClassStatus::Undefined,
            };
            let orbit_form = match traces::oriented_orbit_form(&table, m)? {
                OrbitForm::Class(c) => match class_status(g, &core, &c) {
                    ClassStatus::Nonzero { support } => OrbitStatus::Nonzero { support },
                    _ => OrbitStatus::Zero,
                },
                OrbitForm::DivisibilityFails { trace, difference } => {
                    OrbitStatus::DivisibilityFails {
                        trace: g.names_of(table.members(&trace)),
                        difference,
                    }
                }
            };
            Ok(NextBitRow {
                m,
                theta,
                orbit_form,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let report = NextBitReport {
        core: g.names_of(core.iter()),
        rho,
        levels,
    };
    out.emit(&report, |r| {
        let mut s = String::new();
        let _ = writeln!(s, "m  theta            orbit form");
        for row in &r.levels {
            let theta = match &row.theta {
                ClassStatus::Zero => "0".to_string(),
                ClassStatus::Nonzero { support } => join(support),
                ClassStatus::Undefined => "undefined".to_string(),
            };
            let orbit = match &row.orbit_form {
                OrbitStatus::Zero => "0".to_string(),
                OrbitStatus::Nonzero { support } => join(support),
                OrbitStatus::DivisibilityFails { trace, difference } => {
                    format!("not divisible at {} ({difference})", join(trace))
                }
            };
            let _ = writeln!(s, "{:<2} {:<16} {}", row.m, theta, orbit);
        }
        s
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct PairTraceReport {
    q: u64,
    core: Vec<String>,
    edges: Vec<(String, String)>,
    connected: bool,
    odd_heavy_trace: Option<Vec<String>>,
}

fn pair_trace(out: &Output, g: &Graph, sets: &CoreArgs, q: u64) -> CliResult<u8> {
    let (core, tail) = core_and_tail(g, sets)?;
    let table = traces::compute_traces(g, &core, &tail).map_err(|e| named(g, e))?;
    let h = traces::pair_trace_graph(&table, q)?;
    let report = PairTraceReport {
        q,
        core: g.names_of(core.iter()),
        edges: h
            .edges
            .iter()
            .map(|&(u, v)| (g.name(u).to_string(), g.name(v).to_string()))
            .collect(),
        connected: h.connected,
        odd_heavy_trace: h.odd_heavy_trace.map(|b| g.names_of(table.members(&b))),
    };
    out.emit(&report, |r| {
        let edges: Vec<String> = r.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        format!(
            "edges      {}\nconnected  {}\nodd trace  {}\n",
            edges.join(" "),
            r.connected,
            r.odd_heavy_trace
                .as_ref()
                .map_or_else(|| "none".into(), |t| join(t))
        )
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct NdReport {
    value: usize,
    classes: Vec<Vec<String>>,
}

fn nd(out: &Output, g: &Graph) -> CliResult<u8> {
    let d = traces::neighborhood_diversity(g);
    let report = NdReport {
        value: d.value(),
        classes: d
            .classes
            .iter()
            .map(|c| g.names_of(c.iter().copied()))
            .collect(),
    };
    out.emit(&report, |r| {
        let classes: Vec<String> = r.classes.iter().map(|c| join(c)).collect();
        format!("nd       {}\nclasses  {}\n", r.value, classes.join(" "))
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct OracleFReport {
    f: usize,
    witness: Vec<String>,
    degree: Option<usize>,
    alpha: usize,
    omega: usize,
}

fn oracle_f(out: &Output, g: &Graph) -> CliResult<u8> {
    let best = oracle::brute_force_fg(g)?;
    let (alpha, omega) = oracle::brute_force_alpha_omega(g)?;
    let report = OracleFReport {
        f: best.size,
        witness: g.names_of(best.witness.iter()),
        degree: g.is_regular(&best.witness)?.degree(),
        alpha,
        omega,
    };
    out.emit(&report, |r| {
        format!(
            "f        {}\nwitness  {}\ndegree   {}\nalpha    {}\nomega    {}\n",
            r.f,
            join(&r.witness),
            r.degree.map_or_else(|| "-".into(), |d| d.to_string()),
            r.alpha,
            r.omega
        )
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct OracleAbsorbReport {
    exists: bool,
    chosen_traces: Option<Vec<Vec<String>>>,
}

fn oracle_absorb(out: &Output, p: &AbsorptionProblem<'_>) -> CliResult<u8> {
    let g = p.graph();
    let r = oracle::brute_force_absorption(p)?;
    let report = OracleAbsorbReport {
        exists: r.exists,
        chosen_traces: r
            .chosen
            .map(|c| c.iter().map(|b| g.names_of(p.table().members(b))).collect()),
    };
    out.emit(&report, |r| match &r.chosen_traces {
        Some(c) => {
            let traces: Vec<String> = c.iter().map(|t| join(t)).collect();
            format!(
                "absorbable by deleting q-tuples of [{}]\n",
                traces.join(" ")
            )
        }
        None => "not absorbable\n".to_string(),
    })?;
    Ok(if r.exists { 0 } else { 1 })
}

fn absorb(p: &AbsorptionProblem<'_>) -> CliResult<u8> {
    let cert = p.solve_core_correction()?;
    let doc = CertificateDocument::new(p, &cert)?;
    if !doc.verify(p.graph())? {
        return Err(Error::Internal("certificate failed its own verification".into()).into());
    }
    let text = serde_json::to_string_pretty(&doc).map_err(Error::Json)?;
    println!("{text}");
    Ok(match cert {
        Certificate::Deletion(_) => 0,
        Certificate::ParityCut(_) => 1,
    })
}

#[derive(Serialize)]
struct VerifyReport {
    kind: modcert::absorb::document::CertificateKind,
    valid: bool,
}

fn verify(out: &Output, g: &Graph, path: &Path) -> CliResult<u8> {
    let doc: CertificateDocument =
        serde_json::from_str(&read_source(path)?).map_err(Error::Json)?;
    let valid = doc.verify(g).map_err(|e| named(g, e))?;
    let report = VerifyReport {
        kind: doc.kind,
        valid,
    };
    out.emit(&report, |r| {
        format!(
            "{} certificate {}\n",
            match r.kind {
                modcert::absorb::document::CertificateKind::Deletion => "deletion",
                modcert::absorb::document::CertificateKind::ParityCut => "parity-cut",
            },
            if r.valid { "verified" } else { "REJECTED" }
        )
    })?;
    Ok(if valid { 0 } else { 1 })
}

fn criteria_report(out: &Output, p: &AbsorptionProblem<'_>, only: &[String]) -> CliResult<u8> {
    let reports: Vec<CriterionReport> = criteria::evaluate(p, only)?;
    out.emit(&reports, |rs| {
        let mut s = String::new();
        for r in rs {
            let verdict = serde_json::to_value(r.verdict)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            let _ = writeln!(s, "{:<16} {:<15} {}", r.criterion, verdict, r.detail);
        }
        s
    })?;
    Ok(0)
}

fn reservoir_report(out: &Output, spec: &ReservoirSpec) -> CliResult<u8> {
    let report = reservoir::estimate_availability(spec)?;
    out.emit(&report, |r| {
        format!(
            "m = {}, q = {}, N = {}, trials = {}, seed = {}\n\
             p                {}\nNp               {}\nNp >= 2q         {}\n\
             bound            {:.6}\nfailures         {}\nfailure rate     {:.6}\n\
             rank-rich rate   {:.6}\n",
            r.spec.m,
            r.spec.q,
            r.spec.samples,
            r.spec.trials,
            r.spec.seed,
            r.p,
            r.np,
            r.hypothesis_holds,
            r.bound,
            r.failures,
            r.failure_rate,
            r.rank_rich_rate
        )
    })?;
    Ok(0)
}
