//! Acceptance criteria, one PASS/FAIL line each. Criteria run sequentially so the
//! reported runtimes are meaningful.

use std::time::{Duration, Instant};

use spherule::contiguity::{gamma_raw, is_adjacent_support};
use spherule::indices::{admissible_sets, basis, dimension};
use spherule::random::{random_arrangement, random_lambda, random_lambda_between, rng};
use spherule::suites::{
    beta_round_trip, closed_form_connection, connection_by_differences, connection_lambda, coordinate_tangents,
    determinant_identities, eta_identities, lowering_routes, quadrature_identities, structure,
};
use spherule::verify::chambers_1d;
use spherule::{Error, Result};

struct Outcome {
    passed: bool,
    summary: String,
    elapsed: Duration,
}

fn run(limit: Duration, body: impl FnOnce() -> Result<String>) -> Outcome {
    let start = Instant::now();
    let r = body();
    let elapsed = start.elapsed();
    match r {
        Ok(s) if elapsed <= limit => Outcome { passed: true, summary: s, elapsed },
        Ok(s) => Outcome { passed: false, summary: format!("{s}; over the {limit:?} budget"), elapsed },
        Err(e) => Outcome { passed: false, summary: e.to_string(), elapsed },
    }
}

fn need(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::IdentityFailed(what()))
    }
}

fn exact_determinants() -> Result<String> {
    let mut total = 0;
    let mut arrangements = 0;
    for seed in 0..60u64 {
        let n = 1 + (seed % 4) as usize;
        let m = 1 + ((seed / 4) % 6) as usize;
        let a = random_arrangement(10_000 + seed, n, m, false)?;
        total += determinant_identities(&a)?;
        arrangements += 1;
    }
    Ok(format!("{arrangements} arrangements, {total} identities with zero residual"))
}

fn eta() -> Result<String> {
    let mut total = 0;
    let mut arrangements = 0;
    for seed in 0..24u64 {
        let n = 1 + (seed % 4) as usize;
        let m = n + 1 + (seed / 4 % 2) as usize;
        total += eta_identities(&random_arrangement(20_000 + seed, n, m, false)?)?;
        arrangements += 1;
    }
    Ok(format!("{arrangements} arrangements, {total} sets with η = 1"))
}

fn beta() -> Result<String> {
    let mut total = 0;
    for n in 1..=3 {
        for m in 1..=5 {
            total += beta_round_trip(&random_arrangement(30_000 + 10 * n as u64 + m as u64, n, m, false)?)?;
        }
    }
    Ok(format!("{total} comparisons over n ≤ 3, m ≤ 5"))
}

fn lowering() -> Result<String> {
    let mut total = 0;
    for n in 1..=3 {
        for m in 1..=n + 2 {
            let a = random_arrangement(40_000 + 10 * n as u64 + m as u64, n, m, false)?;
            let mut r = rng(41_000 + 10 * n as u64 + m as u64);
            let lams: Vec<_> = (0..6).map(|_| random_lambda(&mut r, m)).collect();
            for w in lams.windows(2).take(5) {
                total += lowering_routes(&a, &w[0], &w[1])?;
            }
        }
    }
    Ok(format!("{total} (j, J, λ) cases: three routes equal, support adjacent, affine in λ"))
}

fn quadrature() -> Result<String> {
    let (mut raising, mut diff, mut low, mut std, mut rel) = (0, 0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    for m in 2..=4 {
        for rep in 0..2u64 {
            let a = random_arrangement(50_000 + 10 * m as u64 + rep, 1, m, true)?;
            let lam = random_lambda_between(&mut rng(51_000 + 10 * m as u64 + rep), m, 21, 38);
            for c in quadrature_identities(&a, &lam, 1e-6)? {
                worst = worst.max(c.worst);
                match c.name.split(' ').next() {
                    Some("raising") => raising += 1,
                    Some("difference") => diff += 1,
                    Some("lowering") => low += 1,
                    Some("standard") => std += 1,
                    _ => rel += 1,
                }
            }
        }
    }
    need(raising >= 10 && diff >= 5 && low >= 10 && std >= 3 && rel >= 1, || {
        format!("too few cases: {raising} raising, {diff} difference, {low} lowering, {std} standard, {rel} relation")
    })?;
    Ok(format!(
        "{std} standard-form, {raising} raising, {diff} difference, {low} lowering, {rel} second-kind cases; \
         worst residual {worst:.1e}"
    ))
}

fn gauss_manin() -> Result<String> {
    let mut tangents = 0;
    let mut worst: f64 = 0.0;
    for m in 2..=3 {
        let a = random_arrangement(60_000 + m as u64, 1, m, true)?;
        let lam = connection_lambda(&a, 61_000 + m as u64, 4, 36)?;
        let ts = coordinate_tangents(m);
        for c in connection_by_differences(&a, &lam, &ts, 1e-5)? {
            worst = worst.max(c.worst);
            tangents += 1;
        }
    }
    Ok(format!("{tangents} tangents over m ∈ {{2, 3}}, worst relative residual {worst:.1e}"))
}

fn closed_forms() -> Result<String> {
    let mut points = [0usize; 4];
    let shapes = [(1, 2), (2, 2), (3, 2), (1, 3)];
    for (slot, &(n, m)) in shapes.iter().enumerate() {
        let mut seed = 0u64;
        while points[slot] < 20 {
            seed += 1;
            need(seed < 200, || format!("too many resonant draws at n={n}, m={m}"))?;
            let a = random_arrangement(70_000 + 1000 * slot as u64 + seed, n, m, false)?;
            let lam = random_lambda(&mut rng(71_000 + 1000 * slot as u64 + seed), m);
            match closed_form_connection(&a, &lam) {
                Ok(_) => points[slot] += 1,
                Err(Error::ResonantDenominator(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(format!(
        "two spheres (n = 1, 2, 3): {}/{}/{} points; three spheres on a line: {} points; ζ and Wronskian exact",
        points[0], points[1], points[2], points[3]
    ))
}

fn structure_checks() -> Result<String> {
    let mut sizes = 0;
    for n in 1..=5 {
        for m in 1..=n + 4 {
            let b = basis(m, n);
            need(b.len() == dimension(m, n), || format!("basis size at n={n}, m={m}"))?;
            sizes += 1;
        }
    }
    let mut chambers = 0;
    for seed in 0..20u64 {
        let m = 1 + (seed % 5) as usize;
        let a = random_arrangement(80_000 + seed, 1, m, true)?;
        need(chambers_1d(&a)?.len() == 2 * m - 1, || format!("chamber count at m={m}"))?;
        chambers += 1;
    }
    let mut reductions = 0;
    let mut adjacency = 0;
    for (n, m) in [(1, 3), (1, 4), (2, 4), (2, 5), (3, 5)] {
        let a = random_arrangement(81_000 + 10 * n as u64 + m as u64, n, m, false)?;
        reductions += structure(&a)?;
        let lam = random_lambda(&mut rng(82_000 + m as u64), m);
        for jset in admissible_sets(m, n).into_iter().filter(|s| !s.is_empty()) {
            for j in 1..=m {
                need(is_adjacent_support(jset, &gamma_raw(&a, &lam, j, jset)?), || {
                    format!("support of the lowering at j={j}, J={jset}")
                })?;
                adjacency += 1;
            }
        }
    }
    Ok(format!(
        "{sizes} (n, m) basis sizes, {chambers} chamber counts, {reductions} idempotent reductions, \
         {adjacency} adjacent supports"
    ))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Duration, fn() -> Result<String>)> = vec![
        ("exact determinant layer", Duration::from_secs(30), exact_determinants),
        ("η identity", Duration::from_secs(60), eta),
        ("β round trip", Duration::from_secs(120), beta),
        ("lowering routes and λ-linearity", Duration::from_secs(300), lowering),
        ("quadrature identities", Duration::from_secs(300), quadrature),
        ("connection by finite differences", Duration::from_secs(600), gauss_manin),
        ("closed-form connection cross-checks", Duration::from_secs(300), closed_forms),
        ("structure", Duration::from_secs(120), structure_checks),
    ];
    let mut all = true;
    println!();
    for (i, (name, limit, body)) in criteria.into_iter().enumerate() {
        let o = run(limit, body);
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {} ({:.1}s)", i + 1, o.summary, o.elapsed.as_secs_f64());
        all &= o.passed;
    }
    assert!(all, "at least one acceptance criterion failed");
}
