//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p vhshift-core --test acceptance`.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use vhshift_core::ffield::FieldSpec;
use vhshift_core::graphs::{
    covering_check, level_graph, nb_matrix, product_level_graph, LevelSide, Projection,
};
use vhshift_core::mealy::Mealy;
use vhshift_core::spectral::{
    bass_ihara, eig_symmetric, nb_spectrum_direct, ramanujan_check, second_modulus_directed,
    set_mismatch,
};
use vhshift_core::subshift::{
    build_wang, build_xd, mixing_table, non_extendable_example, CylinderSpec, Direction,
    MatrixSubshift,
};
use vhshift_core::vhdatum::{
    build_quaternionic_datum, square_holds, validate_datum, verify_relations, VHDatum,
};
use vhshift_core::IntMatrix;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn datum(p: u32, e: u32, tau: i64, sigma: i64) -> VHDatum {
    let f = FieldSpec::new(p, e).unwrap();
    build_quaternionic_datum(&f, f.from_int(tau), f.from_int(sigma)).unwrap()
}

fn xd(p: u32) -> MatrixSubshift {
    build_xd(&datum(p, 1, 1, 2)).unwrap()
}

fn c1_quaternionic_data() -> Outcome {
    for (q, tau, sigma) in [(3, 1, 2), (5, 1, 2), (5, 2, 3), (7, 1, 2), (9, 1, 2)] {
        let (p, e) = if q == 9 { (3, 2) } else { (q, 1) };
        let d = datum(p, e, tau, sigma);
        let v = validate_datum(&d);
        ensure!(v.is_valid(), "q={q}: axioms fail:\n{v}");
        let r = verify_relations(&d).map_err(|e| e.to_string())?;
        ensure!(r.passed(), "q={q}: {} relation failures", r.failures.len());
        let n = (q as usize + 1).pow(2);
        ensure!(
            r.squares_checked == n,
            "q={q}: checked {} squares, expected {n}",
            r.squares_checked
        );
    }
    Ok("5 parameter sets, all squares proportional and inverses scalar".into())
}

fn c2_printed_row() -> Outcome {
    let f = FieldSpec::new(3, 1).unwrap();
    let x = f.ext();
    let printed = [
        x.one(),
        x.from_ints(1, 1),
        x.from_ints(2, 2),
        x.from_ints(2, 0),
    ];
    let formula = [
        x.one(),
        x.from_ints(1, 1),
        x.from_ints(2, 2),
        x.from_ints(0, 2),
    ];
    ensure!(
        !square_holds(&f, printed).unwrap(),
        "(1, 1+Z, 2+2Z, 2) unexpectedly passes"
    );
    ensure!(
        square_holds(&f, formula).unwrap(),
        "(1, 1+Z, 2+2Z, 2Z) fails"
    );
    let d = datum(3, 1, 1, 2);
    let built = d.format_tuple(d.find_ab(0, 0).unwrap());
    ensure!(built == "(1, 1+Z, 2+2Z, 2Z)", "builder produced {built}");
    Ok("printed row rejected, formula row accepted".into())
}

fn c3_level_families() -> Outcome {
    let mut worst = f64::INFINITY;
    for (p, top) in [(3u32, 6usize), (5, 4)] {
        let d = datum(p, 1, 1, 2);
        for side in [LevelSide::A, LevelSide::B] {
            for n in 1..=top {
                let g = level_graph(&d, side, n).map_err(|e| e.to_string())?;
                let s = g.structure();
                ensure!(s.connected, "q={p} {side:?}_{n} disconnected");
                ensure!(!s.bipartite, "q={p} {side:?}_{n} bipartite");
                ensure!(
                    s.regular_degree == Some(p as usize + 1),
                    "q={p} {side:?}_{n} not regular"
                );
                let r = ramanujan_check(&g, 1e-8).map_err(|e| e.to_string())?;
                ensure!(
                    r.ramanujan,
                    "q={p} {side:?}_{n}: |λ| = {} > {}",
                    r.second_modulus,
                    r.bound
                );
                worst = worst.min(r.margin);
            }
        }
    }
    Ok(format!("q=3 n≤6, q=5 n≤4; smallest margin {worst:.6}"))
}

fn c4_product_levels() -> Outcome {
    let f = FieldSpec::new(5, 1).unwrap();
    let s0 = [f.from_int(1), f.from_int(2), f.from_int(3)];
    for levels in [[1, 1], [2, 1], [1, 2]] {
        let g = product_level_graph(&f, &s0, f.from_int(1), &levels).map_err(|e| e.to_string())?;
        let s = g.structure();
        ensure!(
            s.connected && !s.bipartite,
            "{levels:?}: connected={} bipartite={}",
            s.connected,
            s.bipartite
        );
        ensure!(
            s.regular_degree == Some(6),
            "{levels:?}: degree {:?}",
            s.regular_degree
        );
        let r = ramanujan_check(&g, 1e-8).map_err(|e| e.to_string())?;
        ensure!(r.ramanujan, "{levels:?}: |λ| = {}", r.second_modulus);
    }
    Ok("levels (1,1), (2,1), (1,2)".into())
}

fn c5_bass_ihara() -> Outcome {
    let d = datum(3, 1, 1, 2);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for side in [LevelSide::A, LevelSide::B] {
        for n in 1..=3 {
            let g = level_graph(&d, side, n).map_err(|e| e.to_string())?;
            if g.darts.len() > 2000 {
                continue;
            }
            let ev = eig_symmetric(&g.adjacency()).map_err(|e| e.to_string())?;
            let t: Vec<Complex64> = bass_ihara(&ev, 3.0, g.n_edges() - g.n_vertices())
                .iter()
                .map(|v| v.value)
                .collect();
            let direct =
                nb_spectrum_direct(&nb_matrix(&g).unwrap(), 2000).map_err(|e| e.to_string())?;
            let mis = set_mismatch(&t, &direct);
            ensure!(mis < 1e-6, "{side:?}_{n}: mismatch {mis:e}");
            worst = worst.max(mis);
            for z in direct.iter().filter(|z| (z.norm() - 3.0).abs() > 1e-6) {
                let r = z.norm();
                ensure!(
                    (r - 1.0).abs() < 1e-6 || (r - 3f64.sqrt()).abs() < 1e-6,
                    "{side:?}_{n}: |μ| = {r}"
                );
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} graphs, worst set mismatch {worst:.2e}"))
}

fn c6_coverings() -> Outcome {
    let m = Mealy::from_datum(&datum(3, 1, 1, 2)).map_err(|e| e.to_string())?;
    for reduced in [false, true] {
        for n in 2..=5 {
            let big = m.action_graph(n, reduced).map_err(|e| e.to_string())?;
            let small = m.action_graph(n - 1, reduced).map_err(|e| e.to_string())?;
            for proj in [Projection::DropLast, Projection::DropFirst] {
                ensure!(
                    covering_check(&big, &small, proj).map_err(|e| e.to_string())?,
                    "{proj:?} fails at n={n} reduced={reduced}"
                );
            }
        }
    }
    let lift = m.lift_system().map_err(|e| e.to_string())?;
    let mut g = m.action_graph(1, true).map_err(|e| e.to_string())?;
    for n in 2..=4 {
        let next = lift.apply(&g, true).map_err(|e| e.to_string())?;
        ensure!(
            next.vertices.len() == 3 * g.vertices.len(),
            "lift to level {n} is not 3-fold"
        );
        ensure!(
            next == m.action_graph(n, true).unwrap(),
            "lift to level {n} differs from A_{n}"
        );
        g = next;
    }
    Ok("π_r, π_ℓ coverings for n≤5 (full and reduced); lifts reproduce A_2..A_4".into())
}

fn c7_subshift_algebra() -> Outcome {
    let x = xd(3);
    let (a, b) = (x.a(), x.b().unwrap());
    let bt = b.transpose();
    let binary = |m: &IntMatrix| m.entries().iter().all(|&e| e == 0 || e == 1);
    ensure!(x.s() == 16, "alphabet size {}", x.s());
    ensure!(
        a.regular_degree() == Some(3) && b.regular_degree() == Some(3),
        "X_D is not 3-regular"
    );
    ensure!(
        binary(&a.mul(b)) && binary(&a.mul(&bt)),
        "AB or ABᵀ leaves {{0,1}}"
    );
    ensure!(
        a.mul(b) == b.mul(a) && a.mul(&bt) == bt.mul(a),
        "products do not commute"
    );
    let r = x.regularity_report();
    ensure!(
        r.consistent && r.uniquely_extendable && r.three_way_agreement(),
        "X_D report {r:?}"
    );

    let e = non_extendable_example();
    let (a, b) = (e.a(), e.b().unwrap());
    ensure!(
        a.mul(b).entries().iter().all(|&v| v == 0 || v == 2),
        "4×4: AB entries not in {{0,2}}"
    );
    ensure!(b.mul(a) == IntMatrix::ones(4), "4×4: BA is not all-ones");
    let r = e.regularity_report();
    ensure!(
        r.d_regular == Some(2) && !r.consistent && !r.uniquely_extendable,
        "4×4 report {r:?}"
    );

    let fp = VHDatum::free_product_example();
    let w = build_wang(&fp)
        .map_err(|e| e.to_string())?
        .regularity_report();
    ensure!(
        w.d_regular == Some(4) && w.uniquely_extendable,
        "F₂×F₂ full shift {w:?}"
    );
    let x0 = build_xd(&fp)
        .map_err(|e| e.to_string())?
        .regularity_report();
    ensure!(
        x0.d_regular == Some(3) && x0.uniquely_extendable,
        "F₂×F₂ X₀ {x0:?}"
    );
    Ok("X_D 3-regular, uniquely extendable; 4×4 flagged; F₂×F₂: 4-regular X, 3-regular X₀".into())
}

fn c8_counts_and_measures() -> Outcome {
    let x = xd(3);
    for (m, n) in [(1usize, 1usize), (2, 2), (2, 3), (3, 2)] {
        let count = x.pattern_count(m, n).map_err(|e| e.to_string())?;
        let expect = 16 * 3u64.pow(m as u32 - 1) * 3u64.pow(n as u32 - 1);
        ensure!(
            count == expect,
            "({m},{n}): {count} patterns, expected {expect}"
        );
        let total: BigRational = x
            .patterns(m, n)
            .unwrap()
            .into_iter()
            .map(|p| {
                x.cylinder_measure(&CylinderSpec::at_origin(p))
                    .unwrap()
                    .value
            })
            .sum();
        ensure!(total.is_one(), "({m},{n}): measures sum to {total}");
    }
    Ok("counts 16, 144, 432, 432; each shape sums to 1".into())
}

fn c9_mixing() -> Outcome {
    let mut notes = Vec::new();
    for (p, k, n_max) in [(3u32, 1usize, 20usize), (3, 2, 20), (5, 1, 15)] {
        let t = mixing_table(&datum(p, 1, 1, 2), k, n_max, 500).map_err(|e| e.to_string())?;
        ensure!(t.rows.len() == n_max, "q={p} k={k}: {} rows", t.rows.len());
        if let Some(bad) = t.rows.iter().find(|r| !r.ok) {
            return Err(format!(
                "q={p} k={k}: n={} deviation {:e} > envelope {:e}",
                bad.n, bad.deviation_float, bad.envelope
            ));
        }
        let lam = second_modulus_directed(&x_transition(p, k), 2000).map_err(|e| e.to_string())?;
        ensure!(
            (lam - (p as f64).sqrt()).abs() < 1e-6,
            "q={p} k={k}: λ(H_k) = {lam}"
        );
        notes.push(format!("q={p} k={k} C={:.4}", t.c));
    }
    Ok(notes.join("; "))
}

fn x_transition(p: u32, k: usize) -> IntMatrix {
    xd(p)
        .transition_graph(Direction::Horizontal, k)
        .unwrap()
        .matrix()
}

fn c10_reconstruction() -> Outcome {
    let x = xd(3);
    let mut total = 0;
    for m in 1..=3 {
        for n in 1..=3 {
            let rows = x.patterns(m, 1).unwrap();
            let cols = x.patterns(1, n).unwrap();
            let mut filled = HashSet::new();
            for h in &rows {
                for v in cols.iter().filter(|v| v.cells[0] == h.cells[0]) {
                    let p = x
                        .fill_rectangle(&h.cells, &v.cells)
                        .map_err(|e| format!("({m},{n}): {e}"))?;
                    ensure!(
                        x.is_admissible(&p).unwrap(),
                        "({m},{n}): filled pattern inadmissible"
                    );
                    ensure!(
                        filled.insert(p),
                        "({m},{n}): two trace pairs give one pattern"
                    );
                }
            }
            let all: HashSet<_> = x.patterns(m, n).unwrap().into_iter().collect();
            ensure!(
                all == filled,
                "({m},{n}): {} patterns but {} reconstructions",
                all.len(),
                filled.len()
            );
            total += filled.len();
        }
    }
    Ok(format!(
        "{total} rectangles up to 3×3, each the unique completion of its traces"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("quaternionic datum correctness", c1_quaternionic_data),
        ("known-discrepancy regression", c2_printed_row),
        ("Ramanujan graph families", c3_level_families),
        ("multi-dimensional levels", c4_product_levels),
        ("Bass-Ihara transfer", c5_bass_ihara),
        ("covering/lift structure", c6_coverings),
        ("subshift algebra", c7_subshift_algebra),
        ("pattern counting and measure", c8_counts_and_measures),
        ("mixing envelope", c9_mixing),
        ("unique reconstruction", c10_reconstruction),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
