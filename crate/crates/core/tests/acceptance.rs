//! One PASS/FAIL line per acceptance criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use charbiset::biset::explicit::{decompose_by_marks, graph_universe, ExplicitBiset, DEFAULT_LIMIT};
use charbiset::biset::stability::{is_left_stable, is_right_stable};
use charbiset::biset::FormalBiset;
use charbiset::idempotent::{idempotent_report, omega_closed_form, omega_solve, source_sums};
use charbiset::oracle;
use charbiset::realization::check_transitivity;
use charbiset::solver::{expected_table, minimal_biset, ClassTable, SolverResult};
use charbiset::{FusionSystem, Heisenberg};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct System {
    key: String,
    fs: Arc<FusionSystem>,
    table: ClassTable,
    result: SolverResult,
}

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn solve_all() -> Result<Vec<System>, String> {
    expected_table()
        .par_iter()
        .map(|row| {
            let fs = Arc::new(FusionSystem::builtin(&row.key).map_err(|e| e.to_string())?);
            let table = ClassTable::new(fs.clone()).map_err(|e| e.to_string())?;
            let result = minimal_biset(&table).map_err(|e| e.to_string())?;
            Ok(System { key: row.key.clone(), fs, table, result })
        })
        .collect()
}

fn table_reproduction(systems: &[System]) -> Check {
    for (s, row) in systems.iter().zip(expected_table()) {
        let r = &s.result;
        ensure((r.f, r.d0, r.d1, r.d2, r.e) == (row.f, row.d0, row.d1, row.d2, row.e), || {
            format!("{}: got {:?}", s.key, (r.f, r.d0, r.d1, r.d2, r.e))
        })?;
    }
    Ok(format!("{} rows exact", systems.len()))
}

fn exoticity_bounds(systems: &[System]) -> Check {
    let got: Vec<u64> = systems.iter().filter(|s| s.result.exotic == Some(true)).filter_map(|s| s.result.bound).collect();
    ensure(got == [425744, 638620, 851496], || format!("bounds {got:?}"))?;
    Ok(format!("{got:?}"))
}

fn closed_form_identity(systems: &[System]) -> Check {
    for s in systems {
        let p = s.fs.p() as i64;
        let expect = (p.pow(5) - 1) / (p - 1) * s.fs.out_order() as i64;
        ensure(s.result.e == expect, || format!("{}: e = {} but formula gives {expect}", s.key, s.result.e))?;
    }
    Ok("e = (p^5-1)/(p-1)|Out| for all six".into())
}

fn stability(systems: &[System]) -> Check {
    let mut checked = 0;
    for s in systems {
        let x = s.result.biset();
        let l = is_left_stable(&s.fs, x).map_err(|e| e.to_string())?;
        let r = is_right_stable(&s.fs, x).map_err(|e| e.to_string())?;
        ensure(l.stable && r.stable, || format!("{}: {:?} {:?}", s.key, l.witness, r.witness))?;
        checked += l.checked + r.checked;
    }
    Ok(format!("{checked} morphism classes, zero violations"))
}

fn uniqueness(systems: &[System]) -> Check {
    for s in systems {
        let r = &s.result;
        ensure(r.unique && r.certified(), || format!("{}: not certified", s.key))?;
        for c in &r.certificates {
            ensure(c.candidates == 1 && c.feasible == 1, || {
                format!("{} {:?}: {} candidates, {} feasible", s.key, c.side, c.candidates, c.feasible)
            })?;
        }
    }
    Ok("one feasible biset at e_min on both sides for all six".into())
}

fn oracle_equivalence(systems: &[System]) -> Check {
    let mut parts = Vec::new();
    for s in systems.iter().filter(|s| s.fs.p() == 3) {
        let r = oracle::exhaustive(&s.fs);
        ensure(r.passed(), || format!("{}: {:?}", s.key, r.mismatches))?;
        parts.push(format!("{} {} exhaustive", s.key, r.pairs));
    }
    for (key, seed) in [("th4s4", 5), ("rv48", 7), ("rv96", 8)] {
        let fs = FusionSystem::builtin(key).map_err(|e| e.to_string())?;
        let r = oracle::sampled(&fs, 250, seed).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("{key}: {:?}", r.mismatches))?;
        parts.push(format!("{key} {} sampled", r.pairs));
    }
    Ok(parts.join(", "))
}

fn idempotent(systems: &[System]) -> Check {
    for s in systems {
        let closed = omega_closed_form(&s.table);
        let solved = omega_solve(&s.table).map_err(|e| e.to_string())?;
        ensure(closed == solved, || format!("{}: closed form differs from the solve", s.key))?;
        for sum in source_sums(&s.table, &closed) {
            let want = if sum.layer == 0 { "1" } else { "0" };
            ensure(sum.sum == want, || format!("{}: sum over {} = {}", s.key, sum.source, sum.sum))?;
        }
        let rep = idempotent_report(&s.table).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("{}: report failed", s.key))?;
        if s.key == "d8" {
            ensure(rep.c0 == "1/8" && rep.c2_z == "3/26", || format!("d8: c0 {} c2 {}", rep.c0, rep.c2_z))?;
        }
    }
    Ok("closed forms = linear solve, sums 1/0 for all six".into())
}

fn realization(systems: &[System]) -> Check {
    let mut parts = Vec::new();
    let mut small = 0;
    for s in systems {
        let start = Instant::now();
        let rep = check_transitivity(&s.fs, s.result.biset()).map_err(|e| format!("{}: {e}", s.key))?;
        ensure(rep.passed(), || format!("{}: {rep:?}", s.key))?;
        let secs = start.elapsed().as_secs_f64();
        if s.fs.p() < 7 {
            small += start.elapsed().as_millis();
        }
        ensure(secs < 15.0 * 60.0, || format!("{}: {secs:.0}s", s.key))?;
        parts.push(format!("{} {}", s.key, rep.j));
    }
    ensure(small < 120_000, || format!("p <= 5 took {small} ms"))?;
    Ok(format!("one orbit, J0 regular: {}", parts.join(", ")))
}

fn burnside_injectivity() -> Check {
    let g = Heisenberg::shared(3).map_err(|e| e.to_string())?;
    let u = graph_universe(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 0..100 {
        let mut b = FormalBiset::<i64>::new(g.clone());
        for _ in 0..rng.gen_range(1..5) {
            b.add(&u[rng.gen_range(0..u.len())].rep.morphism, rng.gen_range(1..4));
        }
        let x = ExplicitBiset::from_formal(&b, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        let back = decompose_by_marks(&x).map_err(|e| e.to_string())?;
        ensure(back == b, || format!("case {n} not recovered"))?;
    }
    Ok("100 random bisets recovered".into())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let systems = solve_all();
    let solve_secs = start.elapsed().as_secs_f64();
    let mut failed = 0;
    let mut line = |n: usize, name: &str, f: &dyn Fn() -> Check| {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {n} PASS {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {why} ({secs:.1}s)");
            }
        }
    };
    let with = |f: fn(&[System]) -> Check| {
        let s = systems.as_ref();
        move || s.map_err(|e| e.clone()).and_then(|s| f(s))
    };
    line(1, "table reproduction", &|| with(table_reproduction)().map(|d| format!("{d}, solved in {solve_secs:.1}s")));
    line(2, "exoticity bounds", &with(exoticity_bounds));
    line(3, "closed-form identity", &with(closed_form_identity));
    line(4, "stability certification", &with(stability));
    line(5, "uniqueness certification", &with(uniqueness));
    line(6, "oracle equivalence", &with(oracle_equivalence));
    line(7, "idempotent coefficients", &with(idempotent));
    line(8, "realization", &with(realization));
    line(9, "Burnside injectivity", &burnside_injectivity);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
