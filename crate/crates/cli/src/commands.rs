use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use spanroute::cayley::{build_cayley, build_coset_graph, cayley_words_for, GroupFile};
use spanroute::cpcount::{count_report, CountReport};
use spanroute::cpgraph::{cp_min_schedule_for, grow_tree, CpGraph};
use spanroute::digraph::GraphFile;
use spanroute::factorization::{
    decompose_into_factors, is_hierarchical, search_spanning, usage_metrics, verify_spanning,
    FactorizationFile, UsageMetrics, WordsFile,
};
use spanroute::mms::{lower_bounds, verify_relations, Field, LowerBounds, Mms, RelationStatus};
use spanroute::schedule::{
    diam2_schedule, greedy_schedule, greedy_schedule_shuffled, simulate_exchange, verify_schedule,
    ExchangeReport, ScheduleEntry,
};
use spanroute::{Digraph, Error, Factorization, Schedule, WordList};

use crate::io::{Artifacts, CliError, CliResult};
use crate::{BuildCmd, Cli, Command, CountsCmd, FieldParams, Format, Inputs, Method, Outcome, RelationsCmd, WordsCmd};

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("reports serialize")),
        Format::Text => print!("{}", text()),
    }
}

fn pass(summary: impl Into<String>) -> CliResult<Outcome> {
    Ok(Outcome {
        ok: true,
        summary: summary.into(),
    })
}

fn load_graph(a: &mut Artifacts, path: &Path) -> CliResult<Digraph> {
    let file: GraphFile = a.read_json(path)?;
    Ok(Digraph::try_from(file)?)
}

fn load_factors(a: &mut Artifacts, path: &Path) -> CliResult<Factorization> {
    let file: FactorizationFile = a.read_json(path)?;
    Ok(Factorization::try_from(file)?)
}

fn load_words(a: &mut Artifacts, path: &Path) -> CliResult<WordList> {
    let file: WordsFile = a.read_json(path)?;
    Ok(WordList::try_from(file)?)
}

fn load_schedule(a: &mut Artifacts, path: &Path, wl: &WordList) -> CliResult<Schedule> {
    let entries: Vec<ScheduleEntry> = a.read_json(path)?;
    Ok(Schedule::from_entries(wl, &entries)?)
}

fn field(params: &FieldParams) -> CliResult<Field> {
    let poly = (!params.poly.is_empty()).then_some(params.poly.as_slice());
    Ok(Field::new(params.q, poly)?)
}

fn internal(message: String) -> CliError {
    CliError::Core(Error::InternalInconsistency(message))
}

fn ensure_spanning(f: &Factorization, wl: &WordList) -> CliResult<()> {
    verify_spanning(f, wl).map_err(|e| internal(format!("constructed word list does not span: {e}")))
}

pub fn run(cli: &Cli, a: &mut Artifacts) -> CliResult<Outcome> {
    let fmt = cli.format;
    match &cli.command {
        Command::Build(cmd) => build(cmd, fmt, a),
        Command::Factorize { graph, out } => {
            let g = load_graph(a, graph)?;
            let f = decompose_into_factors(&g)?;
            a.write_json(out, &FactorizationFile::from(&f))?;
            let summary = format!("{} factors on {} vertices", f.d(), f.n());
            emit(fmt, &serde_json::json!({"d": f.d(), "n": f.n()}), || format!("{summary}\n"));
            pass(summary)
        }
        Command::Words(cmd) => words(cmd, fmt, a),
        Command::Schedule {
            words,
            method,
            seed,
            out,
        } => schedule(words, *method, *seed, out, fmt, a),
        Command::Verify { inputs, schedule } => verify(inputs, schedule.as_deref(), fmt, a),
        Command::Simulate {
            inputs,
            schedule,
            out,
        } => simulate(inputs, schedule, out.as_deref(), fmt, a),
        Command::Counts(CountsCmd::Cp { params, k, check }) => {
            let ks: Vec<usize> = match k {
                Some(k) => vec![*k],
                None => (1..=params.diameter).collect(),
            };
            let reports = ks
                .iter()
                .map(|&k| count_report(params.d, params.diameter, k))
                .collect::<Result<Vec<_>, _>>()?;
            let agree = reports.iter().all(|r| r.agree && r.monotone);
            emit(fmt, &reports, || counts_text(&reports, agree));
            let summary = if agree {
                "all formulas agree".to_string()
            } else {
                "formulas disagree with the tree enumeration".to_string()
            };
            Ok(Outcome {
                ok: agree || !check,
                summary,
            })
        }
        Command::Metrics { inputs } => {
            let (g, f, wl) = load_inputs(inputs, a)?;
            let d = g.check_regular()?;
            if wl.d() != d || f.d() != d {
                return Err(CliError::Usage(format!(
                    "degree {d}, factorization has {} factors, words use {}",
                    f.d(),
                    wl.d()
                )));
            }
            let profile = g.distance_profile()?;
            let report = MetricsReport {
                vertices: g.n(),
                degree: d,
                diameter: profile.diameter,
                distance_counts: profile.counts.clone(),
                longest_word: wl.max_len(),
                hierarchical: is_hierarchical(&wl),
                usage: usage_metrics(&wl, &profile, d),
            };
            emit(fmt, &report, || metrics_text(&report));
            pass(format!("theta {}, max usage {}", report.usage.theta, report.usage.max))
        }
        Command::Relations(RelationsCmd::Mms { field: params }) => {
            let mms = Mms::new(field(params)?);
            let report = verify_relations(&mms);
            emit(fmt, &report, || {
                let mut s = format!(
                    "H_{}: g_t sign {:?}, γ = {}, commutator {}\n",
                    report.q,
                    report.g_sign,
                    report.gamma,
                    report.commutator.as_deref().unwrap_or("none")
                );
                for c in &report.checks {
                    let status = match &c.status {
                        RelationStatus::Pass => "pass".to_string(),
                        RelationStatus::Fail { counterexample } => format!("FAIL ({counterexample})"),
                        RelationStatus::Skipped { reason } => format!("skipped ({reason})"),
                    };
                    let _ = writeln!(s, "  {}: {status}", c.relation);
                }
                s
            });
            let failed = report.failures().count();
            Ok(Outcome {
                ok: failed == 0,
                summary: format!("{failed} of {} relations failed", report.checks.len()),
            })
        }
        Command::ExportDot { graph, out } => {
            let g = load_graph(a, graph)?;
            let dot = g.to_dot();
            match out {
                Some(path) => a.write_text(path, &dot)?,
                None => print!("{dot}"),
            }
            pass(format!("{} edges", g.edge_count()))
        }
    }
}

#[derive(Serialize)]
struct BuildReport {
    construction: String,
    vertices: usize,
    degree: usize,
    files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<LowerBounds>,
}

fn write_build(
    a: &mut Artifacts,
    out: &Path,
    g: &Digraph,
    f: Option<&Factorization>,
) -> CliResult<Vec<String>> {
    let graph_path = out.join("graph.json");
    a.write_json(&graph_path, &GraphFile::from(g))?;
    let mut files = vec![graph_path.display().to_string()];
    if let Some(f) = f {
        let path = out.join("factorization.json");
        a.write_json(&path, &FactorizationFile::from(f))?;
        files.push(path.display().to_string());
    }
    Ok(files)
}

fn build(cmd: &BuildCmd, fmt: Format, a: &mut Artifacts) -> CliResult<Outcome> {
    let (construction, g, f, out, bounds) = match cmd {
        BuildCmd::Cp { params, out } => {
            let cp = CpGraph::new(params.d, params.diameter)?;
            let f = cp.factorization()?;
            (format!("G({}, {})", params.d, params.diameter), cp.digraph(), Some(f), out, None)
        }
        BuildCmd::Mms { field: params, out } => {
            let fld = field(params)?;
            let mms = Mms::new(fld.clone());
            let bounds = lower_bounds(&fld)?;
            (format!("H_{}", params.q), mms.digraph(), Some(mms.factorization()?), out, Some(bounds))
        }
        BuildCmd::Cayley { group, out } => {
            let gf: GroupFile = a.read_json(group)?;
            let cay = build_cayley(&gf.cayley_spec()?)?;
            ("Cayley graph".to_string(), cay.graph, Some(cay.factorization), out, None)
        }
        BuildCmd::Coset { spec, out } => {
            let gf: GroupFile = a.read_json(spec)?;
            let coset = build_coset_graph(&gf.coset_spec()?)?;
            ("Cayley coset graph".to_string(), coset.graph, None, out, None)
        }
    };
    let degree = g.check_regular()?;
    let files = write_build(a, out, &g, f.as_ref())?;
    let report = BuildReport {
        construction,
        vertices: g.n(),
        degree,
        files,
        bounds,
    };
    let summary = format!("{}: {} vertices, degree {}", report.construction, report.vertices, degree);
    emit(fmt, &report, || {
        let mut s = format!("{summary}\n");
        if let Some(b) = &report.bounds {
            let _ = writeln!(
                s,
                "lower bound {} (distance sum), {} (closed form), {} (8q/3 estimate); schedule achieves {}",
                b.distance_sum, b.exact, b.approximate, b.achieved
            );
        }
        for file in &report.files {
            let _ = writeln!(s, "wrote {file}");
        }
        s
    });
    pass(summary)
}

fn words(cmd: &WordsCmd, fmt: Format, a: &mut Artifacts) -> CliResult<Outcome> {
    let (wl, out) = match cmd {
        WordsCmd::Cp { params, out } => {
            let cp = CpGraph::new(params.d, params.diameter)?;
            let (_, wl) = grow_tree(params.d, params.diameter)?;
            ensure_spanning(&cp.factorization()?, &wl)?;
            (wl, out)
        }
        WordsCmd::Mms { field: params, out } => {
            let mms = Mms::new(field(params)?);
            let wl = mms.words();
            ensure_spanning(&mms.factorization()?, &wl)?;
            (wl, out)
        }
        WordsCmd::Cayley { group, out } => {
            let gf: GroupFile = a.read_json(group)?;
            let cay = build_cayley(&gf.cayley_spec()?)?;
            let wl = cayley_words_for(&cay);
            ensure_spanning(&cay.factorization, &wl)?;
            (wl, out)
        }
        WordsCmd::Search {
            graph,
            factors,
            budget,
            seed,
            out,
        } => {
            let g = load_graph(a, graph)?;
            let f = load_factors(a, factors)?;
            match search_spanning(&g, &f, *budget, *seed)? {
                Ok(found) => {
                    let summary = format!("spanning word list found on attempt {}", found.attempt);
                    a.write_json(out, &WordsFile::from(&found.words))?;
                    emit(
                        fmt,
                        &serde_json::json!({"found": true, "attempt": found.attempt, "words": found.words.len()}),
                        || format!("{summary}\n"),
                    );
                    return pass(summary);
                }
                Err(fail) => {
                    let summary = format!(
                        "no spanning word list in {} attempts; best attempt failed at {} sources",
                        fail.attempts, fail.best_defects
                    );
                    let witness = fail.witness.as_ref().map(|w| w.to_string());
                    emit(
                        fmt,
                        &serde_json::json!({"found": false, "attempts": fail.attempts,
                            "best_defects": fail.best_defects, "witness": witness}),
                        || format!("{summary}\n"),
                    );
                    return Ok(Outcome { ok: false, summary });
                }
            }
        }
    };
    a.write_json(out, &WordsFile::from(&wl))?;
    let summary = format!("{} words, longest {}", wl.len(), wl.max_len());
    emit(fmt, &serde_json::json!({"words": wl.len(), "longest": wl.max_len()}), || format!("{summary}\n"));
    pass(summary)
}

#[derive(Serialize)]
struct ScheduleReport {
    method: String,
    makespan: u32,
    max_count: u64,
    is_minimum: bool,
    counts: Vec<u64>,
}

fn schedule(
    words: &Path,
    method: Method,
    seed: Option<u64>,
    out: &Path,
    fmt: Format,
    a: &mut Artifacts,
) -> CliResult<Outcome> {
    let wl = load_words(a, words)?;
    let s = match method {
        Method::Greedy => match seed {
            Some(seed) => greedy_schedule_shuffled(&wl, seed),
            None => greedy_schedule(&wl),
        },
        Method::Diam2 => diam2_schedule(&wl)?,
        Method::CpMin => {
            let (d, diameter) = (wl.d(), wl.max_len());
            let (tree, tree_words) = grow_tree(d, diameter)?;
            if tree_words != wl {
                return Err(CliError::Usage(format!(
                    "cp-min needs the shortest-path tree words of G({d}, {diameter})"
                )));
            }
            cp_min_schedule_for(&tree, &wl)?
        }
    };
    let check = verify_schedule(&wl, &s).map_err(|v| internal(format!("scheduler produced an invalid schedule: {v}")))?;
    a.write_json(out, &s.entries())?;
    let report = ScheduleReport {
        method: format!("{method:?}").to_lowercase(),
        makespan: check.makespan,
        max_count: check.max_count,
        is_minimum: check.is_minimum,
        counts: wl.factor_counts(),
    };
    let summary = format!(
        "makespan {} (largest factor usage {}{})",
        report.makespan,
        report.max_count,
        if report.is_minimum { ", minimum" } else { "" }
    );
    emit(fmt, &report, || format!("{summary}\nfactor usage {:?}\n", report.counts));
    pass(summary)
}

fn load_inputs(inputs: &Inputs, a: &mut Artifacts) -> CliResult<(Digraph, Factorization, WordList)> {
    Ok((
        load_graph(a, &inputs.graph)?,
        load_factors(a, &inputs.factors)?,
        load_words(a, &inputs.words)?,
    ))
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn verify(inputs: &Inputs, schedule: Option<&Path>, fmt: Format, a: &mut Artifacts) -> CliResult<Outcome> {
    let (g, f, wl) = load_inputs(inputs, a)?;
    let mut checks = Vec::new();
    let mut record = |name, r: Result<String, String>| {
        let (ok, detail) = match r {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(Check { name, ok, detail });
    };
    record(
        "regular",
        g.check_regular().map(|d| format!("degree {d}")).map_err(|e| e.to_string()),
    );
    record(
        "factorization covers graph",
        f.check_covers(&g).map(|_| format!("{} factors", f.d())).map_err(|e| e.to_string()),
    );
    let spanning = if wl.d() != f.d() {
        Err(format!("words use {} factors, factorization has {}", wl.d(), f.d()))
    } else {
        verify_spanning(&f, &wl)
            .map(|_| format!("{} words", wl.len()))
            .map_err(|e| e.to_string())
    };
    record("words span", spanning);
    if let Some(path) = schedule {
        let s = load_schedule(a, path, &wl)?;
        record(
            "schedule valid",
            verify_schedule(&wl, &s)
                .map(|c| format!("makespan {}, minimum {}", c.makespan, c.is_minimum))
                .map_err(|v| v.to_string()),
        );
    }
    let ok = checks.iter().all(|c| c.ok);
    let failed = checks.iter().filter(|c| !c.ok).count();
    emit(fmt, &serde_json::json!({"ok": ok, "checks": checks}), || {
        let mut s = String::new();
        for c in &checks {
            let _ = writeln!(s, "{} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
        s
    });
    Ok(Outcome {
        ok,
        summary: format!("{failed} of {} checks failed", checks.len()),
    })
}

fn simulate(
    inputs: &Inputs,
    schedule: &Path,
    out: Option<&Path>,
    fmt: Format,
    a: &mut Artifacts,
) -> CliResult<Outcome> {
    let (g, f, wl) = load_inputs(inputs, a)?;
    f.check_covers(&g)?;
    let s = load_schedule(a, schedule, &wl)?;
    let report = simulate_exchange(&f, &wl, &s)?;
    if let Some(path) = out {
        a.write_json(path, &report)?;
    }
    emit(fmt, &report, || exchange_text(&report));
    Ok(Outcome {
        ok: report.conflict_free(),
        summary: format!(
            "{} packets delivered, {} conflicts",
            report.packets_delivered, report.conflict_count
        ),
    })
}

fn exchange_text(r: &ExchangeReport) -> String {
    let mut s = format!(
        "vertices {}\npackets delivered {} of {}\nconflicts {}\nmakespan {}\npeak link load {}\n",
        r.vertices,
        r.packets_delivered,
        r.expected_packets,
        r.conflict_count,
        r.makespan_observed,
        r.per_time_link_load
    );
    if r.duplicate_destination_sources > 0 {
        let _ = writeln!(s, "sources with repeated destinations {}", r.duplicate_destination_sources);
    }
    for c in r.conflicts.iter().take(10) {
        let _ = writeln!(
            s,
            "  F_{} {} -> {} at time {}: packets {}->{} and {}->{}",
            c.factor,
            c.tail,
            c.head,
            c.time,
            c.first.source,
            c.first.destination,
            c.second.source,
            c.second.destination
        );
    }
    s
}

#[derive(Serialize)]
struct MetricsReport {
    vertices: usize,
    degree: usize,
    diameter: usize,
    distance_counts: Vec<u64>,
    longest_word: usize,
    hierarchical: bool,
    usage: UsageMetrics,
}

fn metrics_text(r: &MetricsReport) -> String {
    let u = &r.usage;
    format!(
        "vertices {}, degree {}, diameter {}\n\
         pairs at each distance {:?}\n\
         factor usage {:?}\n\
         theta {}, average ceiling {}, max {}\n\
         balanced {}, short {}, optimal {}, hierarchical {}\n",
        r.vertices,
        r.degree,
        r.diameter,
        r.distance_counts,
        u.counts,
        u.theta,
        u.avg_ceiling,
        u.max,
        u.balanced,
        u.short,
        u.optimal,
        r.hierarchical
    )
}

fn counts_text(reports: &[CountReport], agree: bool) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(s, "d = {}, D = {}, k = {}", r.d, r.diameter, r.k);
        let _ = writeln!(s, "  leaves T(c,t): recursive / closed / enumerated");
        for row in &r.leaves {
            let en = row.enumerated.map_or("-".to_string(), |v| v.to_string());
            let _ = writeln!(s, "    ({}, {}): {} / {} / {}", row.c, row.t, row.recursive, row.closed, en);
        }
        let _ = writeln!(s, "  nodes V(c,t): closed / enumerated");
        for row in &r.nodes {
            let _ = writeln!(s, "    ({}, {}): {} / {}", row.c, row.t, row.closed, row.enumerated);
        }
        let _ = writeln!(s, "  letters S_k(j,t): recursive / closed / enumerated");
        for row in &r.letters {
            let _ = writeln!(s, "    ({}, {}): {} / {} / {}", row.j, row.t, row.recursive, row.closed, row.enumerated);
        }
        let edge_mismatch = r
            .edges
            .iter()
            .filter(|e| e.enumerated.is_some_and(|v| v != e.closed))
            .count();
        let _ = writeln!(s, "  edge counts U(j,c,t): {} rows, {edge_mismatch} mismatches", r.edges.len());
        let _ = writeln!(
            s,
            "  mu {} (enumerated {}), theta {}, monotone {}",
            r.mu, r.mu_enumerated, r.theta, r.monotone
        );
    }
    s.push_str(if agree {
        "all formulas agree\n"
    } else {
        "formulas disagree with the tree enumeration\n"
    });
    s
}
