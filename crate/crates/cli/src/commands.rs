use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};
use vhshift_core::ffield::FieldSpec;
use vhshift_core::graphs::{level_graph, nb_matrix, product_level_graph, LevelSide, UGraph};
use vhshift_core::mealy::Mealy;
use vhshift_core::spectral::{
    self, eig_symmetric, nb_spectrum_direct, ramanujan_check, set_mismatch,
};
use vhshift_core::subshift::{
    build_wang, build_xd, mixing_table_for, non_extendable_example, Direction, MatrixSubshift,
    ENUMERATION_CAP,
};
use vhshift_core::vhdatum::{
    build_quaternionic_datum, datum_to_json, read_datum, validate_datum, verify_relations,
    wang_tiles, VHDatum,
};
use vhshift_core::{IntMatrix, SpectralError, SubshiftError};

use crate::error::CliError;
use crate::output::{emit, RunConfig};
use crate::{
    AutomatonCmd, BassIharaCmd, DatumCmd, DatumSource, Dir, Example, GraphCmd, GraphFormat,
    MixingCmd, ProductGraphCmd, Side, Sides, SubshiftCmd, TextFormat, TilesCmd, VerifyCmd,
};

fn field_and_params(
    p: u32,
    e: u32,
    tau: u32,
    sigma: u32,
) -> Result<(FieldSpec, u32, u32), CliError> {
    let f = FieldSpec::new(p, e)?;
    for (name, code) in [("tau", tau), ("sigma", sigma)] {
        if code == 0 {
            return Err(CliError::Usage(format!("{name} must be nonzero")));
        }
        f.elem(code)?;
    }
    if tau == sigma {
        return Err(CliError::Usage("tau and sigma must be distinct".into()));
    }
    Ok((f, tau, sigma))
}

fn load_datum(src: &DatumSource) -> Result<VHDatum, CliError> {
    if let Some(path) = &src.datum {
        return read_datum(path).map(|(d, _)| d).map_err(|e| match e {
            vhshift_core::DatumError::Io(io) => {
                CliError::Usage(format!("cannot read {}: {io}", path.display()))
            }
            other => other.into(),
        });
    }
    let (f, tau, sigma) = field_and_params(src.p, src.e, src.tau, src.sigma)?;
    Ok(build_quaternionic_datum(&f, f.elem(tau)?, f.elem(sigma)?)?)
}

fn level_side(s: Side) -> LevelSide {
    match s {
        Side::A => LevelSide::A,
        Side::B => LevelSide::B,
    }
}

fn check_level(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("level must be at least 1".into()));
    }
    Ok(())
}

pub fn datum(c: DatumCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("datum", &c, !c.common.no_timestamp);
    let d = load_datum(&c.src)?;
    let validation = validate_datum(&d);
    let relations = verify_relations(&d)?;
    let m = Mealy::from_datum(&d)?;
    let bireversible = m.is_reversible() && m.is_dual_reversible();
    let ok = validation.is_valid() && relations.passed() && bireversible;

    let report = json!({
        "n_v": d.n_v(),
        "n_h": d.n_h(),
        "n_relations": d.relations.len(),
        "valid": validation.is_valid(),
        "violations": validation.messages,
        "squares_checked": relations.squares_checked,
        "inverses_checked": relations.inverses_checked,
        "relation_failures": relations.failures.iter()
            .map(|f| json!({"what": f.what, "lhs": f.lhs, "rhs": f.rhs}))
            .collect::<Vec<_>>(),
        "bireversible": bireversible,
        "all_pass": ok,
    });
    if let Some(path) = &c.report {
        emit(Some(path), &cfg.json(report))?;
    }
    eprintln!(
        "datum: |V| = {}, |H| = {}, {} relations; axioms {}; {} squares and {} inverses certified{}; bireversible: {}",
        d.n_v(),
        d.n_h(),
        d.relations.len(),
        if validation.is_valid() { "hold" } else { "FAIL" },
        relations.squares_checked - relations.failures.len().min(relations.squares_checked),
        relations.inverses_checked,
        if relations.passed() { "" } else { " (with failures)" },
        bireversible
    );
    if !ok {
        for m in &validation.messages {
            eprintln!("  - {m}");
        }
        for f in &relations.failures {
            eprintln!("  - {}: {} vs {}", f.what, f.lhs, f.rhs);
        }
        return Err(CliError::Violation("datum failed validation".into()));
    }
    emit(
        c.common.out.as_deref(),
        &datum_to_json(&d, Some(&cfg.to_value())),
    )
}

pub fn automaton(c: AutomatonCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("automaton", &c, !c.common.no_timestamp);
    let d = load_datum(&c.src)?;
    let mut m = Mealy::from_datum(&d)?;
    if c.dual {
        m = m.dual();
    }
    let text = match c.format {
        TextFormat::Dot => cfg.dot(&m.to_dot()),
        TextFormat::Json => {
            let table = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
                (0..m.n_states())
                    .map(|a| (0..m.n_letters()).map(|x| f(a, x)).collect())
                    .collect()
            };
            cfg.json(json!({
                "states": m.states,
                "alphabet": m.alphabet,
                "inv_states": m.inv_states,
                "inv_alphabet": m.inv_alphabet,
                "delta": table(&|a, x| m.delta(a, x)),
                "lambda": table(&|a, x| m.lambda(a, x)),
                "reversible": m.is_reversible(),
                "dual_reversible": m.is_dual_reversible(),
            }))
        }
    };
    emit(c.common.out.as_deref(), &text)
}

fn dense_guard(dim: usize, limit: usize) -> Result<(), CliError> {
    if dim > limit {
        return Err(SpectralError::TooLarge {
            dim,
            limit,
            hint: "; raise --dense-limit",
        }
        .into());
    }
    Ok(())
}

fn graph_json(g: &UGraph) -> Value {
    let mut v = g.to_json();
    v["structure"] = serde_json::to_value(g.structure()).expect("structure serializes");
    v
}

/// Base-`|Σ|` value of each vertex word, most significant letter first.
/// Vertex `i` of a level graph is the `i`-th reduced word in lexicographic
/// order, so the codes increase with the index.
fn word_codes(d: &VHDatum, side: Side, n: usize) -> Result<Vec<u128>, CliError> {
    let m = Mealy::from_datum(d)?;
    let m = if side == Side::B { m.dual() } else { m };
    let base = m.n_letters() as u128;
    Ok(m.words(n, true)?
        .iter()
        .map(|w| w.iter().fold(0u128, |acc, &x| acc * base + x as u128))
        .collect())
}

pub fn graph(c: GraphCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("graph", &c, !c.common.no_timestamp);
    check_level(c.level)?;
    let d = load_datum(&c.src)?;
    let g = level_graph(&d, level_side(c.side), c.level)?;
    let text = match c.format {
        GraphFormat::Dot => cfg.dot(&g.to_dot()),
        GraphFormat::Json => {
            let mut v = graph_json(&g);
            v["codes"] = json!(word_codes(&d, c.side, c.level)?);
            cfg.json(v)
        }
        GraphFormat::SpectrumCsv => {
            dense_guard(g.n_vertices(), c.dense_limit)?;
            cfg.csv(&ramanujan_check(&g, spectral::DEFAULT_TOL)?.to_csv())
        }
    };
    emit(c.common.out.as_deref(), &text)
}

pub fn product_graph(c: ProductGraphCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("product-graph", &c, !c.common.no_timestamp);
    let f = FieldSpec::new(c.p, c.e)?;
    let elem = |code: u32| f.elem(code).map_err(CliError::from);
    let s0 =
        c.s0.iter()
            .map(|&x| elem(x))
            .collect::<Result<Vec<_>, _>>()?;
    if c.s0.contains(&0) {
        return Err(CliError::Usage("S0 must not contain 0".into()));
    }
    if c.levels.contains(&0) {
        return Err(CliError::Usage("levels must be at least 1".into()));
    }
    let g = product_level_graph(&f, &s0, elem(c.tau)?, &c.levels)?;
    match c.format {
        TextFormat::Dot => {
            if c.check {
                return Err(CliError::Usage("--check needs --format json".into()));
            }
            emit(c.common.out.as_deref(), &cfg.dot(&g.to_dot()))
        }
        TextFormat::Json => {
            let mut body = graph_json(&g);
            let mut passed = true;
            if c.check {
                dense_guard(g.n_vertices(), c.dense_limit)?;
                let r = ramanujan_check(&g, c.tol)?;
                passed = r.ramanujan;
                body["ramanujan"] = r.verdict_json();
            }
            emit(c.common.out.as_deref(), &cfg.json(body))?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Violation(
                    "product graph violates the Ramanujan bound".into(),
                ))
            }
        }
    }
}

/// One graph of a verification campaign.
struct Job {
    name: String,
    side: Option<LevelSide>,
    level: Option<usize>,
}

struct Outcome {
    entry: Value,
    failed: bool,
    skipped: bool,
    spectrum_csv: Option<String>,
}

fn verify_one(
    job: &Job,
    d: Option<&VHDatum>,
    file: Option<&UGraph>,
    c: &VerifyCmd,
) -> Result<Outcome, CliError> {
    let owned;
    let g = match (file, d, job.side, job.level) {
        (Some(g), ..) => g,
        (None, Some(d), Some(side), Some(n)) => {
            owned = level_graph(d, side, n)?;
            &owned
        }
        _ => unreachable!("job without a graph"),
    };
    let mut entry = json!({
        "graph": job.name,
        "side": job.side,
        "level": job.level,
        "n_vertices": g.n_vertices(),
        "n_edges": g.n_edges(),
    });
    if g.n_vertices() > c.dense_limit {
        entry["status"] = "skipped".into();
        entry["reason"] = format!(
            "{} vertices exceed the dense limit {}",
            g.n_vertices(),
            c.dense_limit
        )
        .into();
        return Ok(Outcome {
            entry,
            failed: false,
            skipped: true,
            spectrum_csv: None,
        });
    }
    let s = g.structure();
    entry["connected"] = s.connected.into();
    entry["bipartite"] = s.bipartite.into();
    entry["degree"] = json!(s.regular_degree);
    let mut problems: Vec<String> = Vec::new();
    // Level graphs of a datum must also be (q+1)-regular and non-bipartite.
    if let Some(d) = d.filter(|_| file.is_none()) {
        // A_n is generated by the states V of M_D, B_n by H.
        let expected = if job.side == Some(LevelSide::A) {
            d.n_v()
        } else {
            d.n_h()
        };
        entry["expected_degree"] = expected.into();
        if s.regular_degree != Some(expected) {
            problems.push(format!(
                "degree {:?}, expected {expected}",
                s.regular_degree
            ));
        }
        if s.bipartite {
            problems.push("bipartite".into());
        }
    }
    let mut spectrum_csv = None;
    match ramanujan_check(g, c.tol) {
        Ok(r) => {
            entry["second_modulus"] = r.second_modulus.into();
            entry["bound"] = r.bound.into();
            entry["margin"] = r.margin.into();
            entry["offending"] = json!(r.offending);
            if !r.ramanujan {
                problems.push(format!(
                    "nontrivial eigenvalue {:.9} exceeds the bound {:.9}",
                    r.offending.unwrap_or(r.second_modulus),
                    r.bound
                ));
            }
            spectrum_csv = Some(r.to_csv());
        }
        Err(e @ (SpectralError::Disconnected(_) | SpectralError::Irregular)) => {
            problems.push(e.to_string())
        }
        Err(e) => return Err(e.into()),
    }
    let failed = !problems.is_empty();
    entry["status"] = if failed { "fail" } else { "pass" }.into();
    entry["problems"] = json!(problems);
    Ok(Outcome {
        entry,
        failed,
        skipped: false,
        spectrum_csv,
    })
}

pub fn verify_ramanujan(c: VerifyCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("verify-ramanujan", &c, !c.common.no_timestamp);
    let (datum, file_graph, jobs) = match &c.graph_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let g = UGraph::from_json(&text)?;
            let job = Job {
                name: path.display().to_string(),
                side: None,
                level: None,
            };
            (None, Some(g), vec![job])
        }
        None => {
            let d = load_datum(&c.src)?;
            let sides: &[LevelSide] = match c.side {
                Sides::A => &[LevelSide::A],
                Sides::B => &[LevelSide::B],
                Sides::Both => &[LevelSide::A, LevelSide::B],
            };
            let jobs = c
                .levels
                .clone()
                .flat_map(|n| {
                    sides.iter().map(move |&side| Job {
                        name: format!("{side:?}_{n}"),
                        side: Some(side),
                        level: Some(n),
                    })
                })
                .collect();
            (Some(d), None, jobs)
        }
    };
    // Levels run concurrently; results are collected in job order.
    let outcomes: Vec<Result<Outcome, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| {
                let (d, g, c) = (datum.as_ref(), file_graph.as_ref(), &c);
                scope.spawn(move || verify_one(job, d, g, c))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;

    if let Some(dir) = &c.spectra_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        for (job, o) in jobs.iter().zip(&outcomes) {
            if let Some(csv) = &o.spectrum_csv {
                let stem = if job.level.is_some() {
                    job.name.clone()
                } else {
                    "graph".into()
                };
                emit(Some(&dir.join(format!("{stem}.csv"))), &cfg.csv(csv))?;
            }
        }
    }
    let failed = outcomes.iter().filter(|o| o.failed).count();
    let skipped = outcomes.iter().filter(|o| o.skipped).count();
    let report = json!({
        "levels": outcomes.iter().map(|o| o.entry.clone()).collect::<Vec<_>>(),
        "summary": {
            "checked": outcomes.len() - skipped,
            "passed": outcomes.len() - skipped - failed,
            "failed": failed,
            "skipped": skipped,
            "all_pass": failed == 0,
        },
    });
    let out = c.report.as_deref().or(c.common.out.as_deref());
    emit(out, &cfg.json(report))?;
    for o in outcomes.iter().filter(|o| o.failed) {
        eprintln!("violation: {} {}", o.entry["graph"], o.entry["problems"]);
    }
    if failed > 0 {
        return Err(CliError::Violation(format!(
            "{failed} of {} graphs failed",
            outcomes.len()
        )));
    }
    Ok(())
}

pub fn bass_ihara(c: BassIharaCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("bass-ihara", &c, !c.common.no_timestamp);
    check_level(c.level)?;
    let d = load_datum(&c.src)?;
    let g = level_graph(&d, level_side(c.side), c.level)?;
    let h = nb_matrix(&g)?;
    dense_guard(h.len(), c.dense_limit)?;
    let deg = g.regular_degree().ok_or(SpectralError::Irregular)?;
    let q = (deg - 1) as f64;
    let ev = eig_symmetric(&g.adjacency())?;
    let transferred: Vec<_> = spectral::bass_ihara(&ev, q, g.n_edges() - g.n_vertices())
        .iter()
        .map(|t| t.value)
        .collect();
    let direct = nb_spectrum_direct(&h, c.dense_limit)?;
    let mismatch = set_mismatch(&transferred, &direct);

    // Moduli classes of the directly computed spectrum.
    let (mut trivial, mut unit, mut sqrt_q, mut other) = (0, 0, 0, 0);
    for z in &direct {
        let r = z.norm();
        if (r - q).abs() < 1e-6 {
            trivial += 1;
        } else if (r - 1.0).abs() < 1e-6 {
            unit += 1;
        } else if (r - q.sqrt()).abs() < 1e-6 {
            sqrt_q += 1;
        } else {
            other += 1;
        }
    }
    let agree = mismatch <= c.tol && transferred.len() == direct.len();
    let report = json!({
        "graph": format!("{:?}_{}", level_side(c.side), c.level),
        "n_vertices": g.n_vertices(),
        "n_darts": h.len(),
        "q": q,
        "transferred_count": transferred.len(),
        "direct_count": direct.len(),
        "max_mismatch": mismatch,
        "tol": c.tol,
        "agree": agree,
        "moduli": { "q": trivial, "one": unit, "sqrt_q": sqrt_q, "other": other },
    });
    emit(c.common.out.as_deref(), &cfg.json(report))?;
    if !agree {
        return Err(CliError::Violation(format!(
            "spectra disagree: mismatch {mismatch:e} > {:e}",
            c.tol
        )));
    }
    Ok(())
}

#[derive(Deserialize)]
struct MatricesFile {
    s: usize,
    #[serde(rename = "A")]
    a: Vec<(usize, usize)>,
    #[serde(rename = "B", default)]
    b: Option<Vec<(usize, usize)>>,
}

fn read_matrices(path: &Path) -> Result<MatrixSubshift, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let f: MatricesFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let build = |pairs: &[(usize, usize)]| {
        let triples: Vec<_> = pairs.iter().map(|&(r, c)| (r, c, 1)).collect();
        IntMatrix::from_coo(f.s, f.s, &triples).ok_or_else(|| {
            CliError::Usage(format!("{}: matrix index out of range", path.display()))
        })
    };
    let a = build(&f.a)?;
    let b = f.b.as_deref().map(build).transpose()?;
    Ok(MatrixSubshift::new(a, b)?)
}

pub fn subshift_check(c: SubshiftCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("subshift-check", &c, !c.common.no_timestamp);
    let (source, x) = match (&c.matrices, c.example) {
        (Some(path), _) => (path.display().to_string(), read_matrices(path)?),
        (None, Example::Xd) => ("xd".into(), build_xd(&load_datum(&c.src)?)?),
        (None, Example::Wang) => ("wang".into(), build_wang(&load_datum(&c.src)?)?),
        (None, Example::FourByFour) => ("four-by-four".into(), non_extendable_example()),
        (None, Example::FreeProduct) => (
            "free-product".into(),
            build_xd(&VHDatum::free_product_example())?,
        ),
    };
    let reg = x.regularity_report();
    let d = x.degree();
    let mut counts = Vec::new();
    if x.b().is_some() {
        for m in 1..=c.max_count {
            for n in 1..=c.max_count {
                if m * n > ENUMERATION_CAP {
                    continue;
                }
                let count = x.pattern_count(m, n)?;
                let formula = d.map(|d| x.s() as u64 * (d as u64).pow((m + n - 2) as u32));
                counts.push(json!({"m": m, "n": n, "count": count, "s_d_formula": formula}));
            }
        }
    }
    let mut transition = Vec::new();
    if x.b().is_some() {
        for dir in [Direction::Horizontal, Direction::Vertical] {
            for k in 1..=c.max_k {
                transition.push(match x.transition_graph(dir, k) {
                    Ok(t) => json!({
                        "direction": dir, "k": k, "n_vertices": t.len(),
                        "degree": t.matrix().regular_degree(),
                    }),
                    Err(e @ SubshiftError::NotUniquelyExtendable) => {
                        json!({"direction": dir, "k": k, "error": e.to_string()})
                    }
                    Err(e) => return Err(e.into()),
                });
            }
        }
    }
    let regular = d.is_some() && reg.uniquely_extendable;
    let report = json!({
        "source": source,
        "description": x.to_json(),
        "regularity": reg,
        "three_way_agreement": reg.three_way_agreement(),
        "pattern_counts": counts,
        "transition_graphs": transition,
        "regular": regular,
    });
    emit(c.common.out.as_deref(), &cfg.json(report))?;
    if !regular {
        return Err(CliError::Violation(format!(
            "{source}: not a uniquely extendable regular subshift"
        )));
    }
    Ok(())
}

pub fn mixing(c: MixingCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("mixing", &c, !c.common.no_timestamp);
    if c.k == 0 || c.max_n == 0 {
        return Err(CliError::Usage("--k and --max-n must be at least 1".into()));
    }
    let x = build_xd(&load_datum(&c.src)?)?;
    let dir = match c.direction {
        Dir::Horizontal => Direction::Horizontal,
        Dir::Vertical => Direction::Vertical,
    };
    let t = mixing_table_for(&x, dir, c.k, c.max_n, c.exact_limit)?;
    emit(c.common.out.as_deref(), &cfg.csv(&t.to_csv()))?;
    if let Some(meta) = &c.meta {
        emit(Some(meta), &cfg.json(t.metadata_json()))?;
    }
    if !t.all_ok() {
        let bad: Vec<usize> = t.rows.iter().filter(|r| !r.ok).map(|r| r.n).collect();
        return Err(CliError::Violation(format!(
            "envelope violated at n = {bad:?}"
        )));
    }
    Ok(())
}

pub fn tiles(c: TilesCmd) -> Result<(), CliError> {
    let cfg = RunConfig::new("tiles", &c, !c.common.no_timestamp);
    let d = load_datum(&c.src)?;
    emit(c.common.out.as_deref(), &cfg.svg(&wang_tiles(&d).to_svg()))
}
