//! One pass/fail line per acceptance criterion. Expected values come from
//! independent computations in this file, not from the library.

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use comp_fkg::averaging::{
    chebyshev_weighted, enumerate_filters, strata_averages, verify_alpha_identities, verify_fkg_exhaustive,
    verify_strata_exhaustive, UpSet,
};
use comp_fkg::geometry::{
    campaign_rng, mixed_volumes, polarization_mixed_volume, random_body, random_newton, verify_af, verify_teissier,
    AbstractTable, MixedVolumeTable, NewtonPolyhedron, RationalPolytope,
};
use comp_fkg::lattice::{compositions, lattice_size, stratum_size};
use comp_fkg::suite::{
    corollary1_campaign, exponent_campaign, product_campaign, symmetrized_monotone_campaign, verify_corollary_part1,
    verify_durfee_inequality, verify_durfee_table, verify_exponent_example, MixFunctionSpec,
};
use comp_fkg::{CompositionLattice, Composition, Rational};

type Check = Result<String, String>;

fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn criterion_1() -> Check {
    let mut cases = 0;
    for r in 1..=6usize {
        for n in 0..=12u32 {
            let comps = compositions(n, r);
            let expect = binom(n as i64 + r as i64 - 1, n as i64);
            ensure(BigInt::from(comps.len()) == expect && lattice_size(n, r) == expect, || {
                format!("|K({n},{r})| = {} but binom gives {expect}", comps.len())
            })?;
            let max_s = if n == 0 { r } else { r - 1 };
            for s in 0..=max_s {
                let counted = comps.iter().filter(|c| c.zero_count() == s).count();
                let expect = if n == 0 {
                    BigInt::from((s == r) as u8)
                } else {
                    binom(r as i64, s as i64) * binom(n as i64 - 1, r as i64 - s as i64 - 1)
                };
                ensure(BigInt::from(counted) == expect && stratum_size(n, r, s) == expect, || {
                    format!("|K^{s}({n},{r})| = {counted} but the formula gives {expect}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} stratum counts exact"))
}

fn criterion_2() -> Check {
    let q63 = CompositionLattice::new(6, 3).map_err(e)?.quotient();
    let a = q63.class_index(&[4, 1, 1]).map_err(e)?;
    let b = q63.class_index(&[3, 3, 0]).map_err(e)?;
    ensure(!q63.leq(a, b) && !q63.leq(b, a), || "(4,1,1) and (3,3,0) are comparable".into())?;
    for n in 0..=12 {
        let q = CompositionLattice::new(n, 2).map_err(e)?.quotient();
        let all_comparable = (0..q.len()).all(|x| (0..q.len()).all(|y| q.leq(x, y) || q.leq(y, x)));
        ensure(all_comparable, || format!("K({n},2)/Ξ2 is not a chain"))?;
    }
    let mut pairs = 0u64;
    for r in 1..=4 {
        for n in 0..=8 {
            let lat = CompositionLattice::new(n, r).map_err(e)?;
            for orbit in lat.orbits() {
                for &i in orbit {
                    for &j in orbit {
                        if i != j {
                            pairs += 1;
                            ensure(!lat.leq_idx(i, j), || {
                                format!("{} ⪯ {} inside one orbit", lat.element(i), lat.element(j))
                            })?;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("incomparable pair confirmed, chains for n <= 12, {pairs} orbit pairs incomparable"))
}

/// Partial-sum dominance of partitions padded to a common length.
fn dominates(a: &[u32], b: &[u32]) -> bool {
    let (mut sa, mut sb) = (0u32, 0u32);
    for i in 0..a.len().max(b.len()) {
        sa += a.get(i).copied().unwrap_or(0);
        sb += b.get(i).copied().unwrap_or(0);
        if sa < sb {
            return false;
        }
    }
    true
}

fn criterion_3() -> Check {
    let mut pairs = 0;
    for n in 1..=8u32 {
        let q = CompositionLattice::new(n, n as usize).map_err(e)?.quotient();
        for x in 0..q.len() {
            for y in 0..q.len() {
                pairs += 1;
                let expect = dominates(q.class(y).parts(), q.class(x).parts());
                ensure(q.leq(x, y) == expect, || {
                    format!("order of {} vs {} differs from dominance", q.class(x), q.class(y))
                })?;
            }
        }
    }
    Ok(format!("{pairs} ordered class pairs match partial-sum dominance"))
}

fn criterion_4() -> Check {
    let q = CompositionLattice::new(7, 5).map_err(e)?.quotient();
    let members = [&[4, 2, 1][..], &[4, 1, 1, 1], &[3, 3, 1], &[3, 2, 2], &[3, 2, 1, 1]]
        .iter()
        .map(|p| q.class_index(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    ensure(q.is_sublattice(&members).map_err(e)?, || "the five classes are not a sublattice".into())?;
    let w = q
        .distributivity_witness(&members)
        .map_err(e)?
        .ok_or("no distributivity failure among the five classes")?;
    Ok(format!("x={} y={} z={}: x∧(y∨z)={} but (x∧y)∨(x∧z)={}", w.x, w.y, w.z, w.lhs, w.rhs))
}

const FILTER_LIMIT: usize = 100_000;

/// Brute-force invariant up-sets of a small lattice as element bitmasks.
fn brute_filters(lat: &CompositionLattice) -> Vec<u64> {
    let m = lat.len();
    let orbit_mask: Vec<u64> = lat.orbits().iter().map(|o| o.iter().map(|&i| 1u64 << i).sum()).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << m {
        let invariant = orbit_mask.iter().all(|&o| mask & o == 0 || mask & o == o);
        let upward = (0..m).all(|i| mask >> i & 1 == 0 || (0..m).all(|j| !lat.leq_idx(i, j) || mask >> j & 1 == 1));
        if invariant && upward {
            out.push(mask);
        }
    }
    out
}

fn criterion_5() -> Check {
    let mut lattices = 0;
    let mut pairs = 0u64;
    let mut skipped = Vec::new();
    let mut brute = 0;
    for r in 1..=4usize {
        for n in 0..=16u32 {
            let lat = CompositionLattice::new(n, r).map_err(e)?;
            match enumerate_filters(&lat.quotient(), FILTER_LIMIT) {
                Ok(_) => {}
                Err(_) => {
                    skipped.push(format!("({n},{r})"));
                    continue;
                }
            }
            let rep = verify_fkg_exhaustive(&lat, FILTER_LIMIT).map_err(e)?;
            ensure(rep.passed(), || format!("K({n},{r}): {} violations, {} mismatches", rep.violations, rep.equality_mismatches))?;
            lattices += 1;
            pairs += rep.pairs;
            if lat.len() <= 14 {
                let masks = brute_filters(&lat);
                ensure(masks.len() == rep.filters, || format!("K({n},{r}): brute force finds {} filters", masks.len()))?;
                let total = lat.len() as u64;
                for &x in &masks {
                    for &y in &masks {
                        let (sx, sy, sxy) = (x.count_ones() as u64, y.count_ones() as u64, (x & y).count_ones() as u64);
                        let trivial = |s: u64| s == 0 || s == total;
                        ensure(sx * sy <= total * sxy, || format!("K({n},{r}): brute-force violation"))?;
                        ensure((sx * sy == total * sxy) == (trivial(sx) || trivial(sy)), || {
                            format!("K({n},{r}): brute-force equality on nontrivial filters")
                        })?;
                    }
                }
                brute += 1;
            }
        }
    }
    Ok(format!(
        "{lattices} lattices, {pairs} ordered filter pairs, 0 violations; {brute} cross-checked by brute force; beyond the filter limit: {}",
        if skipped.is_empty() { "none".to_string() } else { skipped.join(" ") }
    ))
}

fn criterion_6() -> Check {
    let mut nontrivial = 0;
    let mut independent = 0;
    for r in 1..=4usize {
        for n in 0..=16u32 {
            let lat = Arc::new(CompositionLattice::new(n, r).map_err(e)?);
            let Ok(filters) = enumerate_filters(&lat.quotient(), FILTER_LIMIT) else {
                continue;
            };
            let rep = verify_strata_exhaustive(lat.clone(), FILTER_LIMIT).map_err(e)?;
            ensure(rep.passed(), || format!("K({n},{r}): {rep:?}"))?;
            nontrivial += rep.nontrivial;
            // Independent recount of the stratum averages.
            for f in filters.iter().take(200) {
                let x = UpSet::from_filter(lat.clone(), f).map_err(e)?;
                let prof = strata_averages(&x).map_err(e)?;
                let mut avgs = Vec::new();
                for s in 0..=r {
                    let members: Vec<usize> = (0..lat.len()).filter(|&i| lat.element(i).zero_count() == s).collect();
                    if !members.is_empty() {
                        let inside = members.iter().filter(|&&i| x.contains(i)).count();
                        avgs.push(q(inside as i64, members.len() as i64));
                    }
                }
                ensure(avgs == prof.beta, || format!("K({n},{r}): stratum averages differ"))?;
                let chain = avgs.windows(2).all(|w| w[0] <= w[1]);
                let equal = avgs.windows(2).all(|w| w[0] == w[1]);
                ensure(chain, || format!("K({n},{r}): stratum chain fails"))?;
                ensure(avgs.len() < 2 || equal == x.is_trivial(), || format!("K({n},{r}): equality on a nontrivial set"))?;
                independent += 1;
            }
        }
    }
    Ok(format!("{nontrivial} nontrivial invariant up-sets, 0 violations; {independent} recounted independently"))
}

fn criterion_7() -> Check {
    let mut checked = 0;
    let mut zero_tails = Vec::new();
    for n in 2..=20u32 {
        for r in 2..=n as usize {
            let rep = verify_alpha_identities(n, r).map_err(e)?;
            ensure(rep.passed(), || format!("({n},{r}): {rep:?}"))?;
            // Defining expression and closed form, recomputed here.
            let (ni, ri) = (n as i64, r as i64);
            let stratum = |m: i64, s: i64| binom(ri, s) * binom(m - 1, ri - s - 1);
            let k1 = Rational::from_integer(stratum(ni, 1));
            let k0 = Rational::from_integer(stratum(ni, 0));
            let alpha: Vec<Rational> = (0..ri)
                .map(|s| {
                    let sub = Rational::from_integer(stratum(ni - ri + 1, s));
                    (Rational::from_integer(s.into()) / &k1 - q(ri - s, ri) / &k0) * sub
                })
                .collect();
            ensure(alpha == rep.alpha, || format!("({n},{r}): alpha differs from the defining expression"))?;
            let den = binom(ni - 2, ri - 2) * BigInt::from(ni - 1);
            for k in 0..ri {
                let tail: Rational = alpha[k as usize..].iter().sum();
                let closed = Rational::new(binom(ni - ri, ri - k) * binom(ri - 1, k) * BigInt::from(k), den.clone());
                ensure(tail == closed, || format!("({n},{r},k={k}): tail {tail} vs closed form {closed}"))?;
                ensure(!tail.is_negative() && (k > 0 || tail.is_zero()), || format!("({n},{r},k={k}): wrong sign"))?;
                if k > 0 && tail.is_zero() {
                    zero_tails.push(format!("({n},{r},{k})"));
                }
            }
            ensure(rep.strictly_positive == zero_tails.iter().all(|t| !t.starts_with(&format!("({n},{r},"))), || {
                format!("({n},{r}): strict positivity flag disagrees")
            })?;
            checked += 1;
        }
    }
    let detail = format!("{checked} pairs (n, r): identities exact, zero total, tails non-negative");
    if zero_tails.is_empty() {
        Ok(detail)
    } else {
        Err(format!(
            "{detail}; strict positivity for k >= 1 fails on {} triples (n, r, k) with n - r < r - k, e.g. {}",
            zero_tails.len(),
            zero_tails[..3.min(zero_tails.len())].join(" ")
        ))
    }
}

fn criterion_8() -> Check {
    let mut rng = campaign_rng(8, 0);
    for i in 0..1000 {
        let len = rng.gen_range(1..=7);
        let mut sorted = |lo: i64, hi: i64| {
            let mut v: Vec<Rational> = (0..len).map(|_| q(rng.gen_range(lo..=hi), rng.gen_range(1..=5))).collect();
            v.sort();
            v
        };
        let alpha = sorted(-20, 20);
        let beta = sorted(-20, 20);
        let gamma: Vec<Rational> = sorted(1, 30);
        let rep = chebyshev_weighted(&alpha, &beta, &gamma).map_err(e)?;
        let sum = |f: &dyn Fn(usize) -> Rational| (0..len).map(f).sum::<Rational>();
        let gap = sum(&|s| gamma[s].clone()) * sum(&|s| &gamma[s] * &alpha[s] * &beta[s])
            - sum(&|s| &gamma[s] * &alpha[s]) * sum(&|s| &gamma[s] * &beta[s]);
        let mut double = Rational::zero();
        for s in 0..len {
            for t in 0..len {
                double += &gamma[s] * &gamma[t] * (&alpha[s] - &alpha[t]) * (&beta[s] - &beta[t]);
            }
        }
        double /= q(2, 1);
        ensure(rep.gap == gap && rep.double_sum == double && gap == double && rep.holds, || {
            format!("instance {i}: gap {} vs double sum {}", rep.gap, rep.double_sum)
        })?;
    }
    Ok("1000 instances: gap equals the double sum exactly".into())
}

fn repeated(bodies: &[RationalPolytope], k: &Composition) -> Vec<RationalPolytope> {
    k.parts().iter().zip(bodies).flat_map(|(&c, b)| std::iter::repeat_n(b.clone(), c as usize)).collect()
}

fn square_pts(dim: usize, pts: &[&[i64]]) -> RationalPolytope {
    RationalPolytope::from_integers(dim, &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn criterion_9() -> Check {
    let mut entries = 0;
    for i in 0..100 {
        let mut rng = campaign_rng(9, i);
        let bodies = (0..3).map(|_| random_body(&mut rng, 3)).collect::<Result<Vec<_>, _>>().map_err(e)?;
        let table = mixed_volumes(&bodies).map_err(e)?;
        for (k, v) in table.entries() {
            let pol = polarization_mixed_volume(&repeated(&bodies, k)).map_err(e)?;
            ensure(*v == pol, || format!("triple {i}, V{k}: interpolation {v} vs polarization {pol}"))?;
            entries += 1;
        }
    }
    let square = square_pts(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
    let v = mixed_volumes(&[square.clone(), square]).map_err(e)?;
    ensure(*v.get(&[1, 1]).map_err(e)? == q(1, 1), || "V(square, square) != 1".into())?;
    let segs = [square_pts(2, &[&[0, 0], &[1, 0]]), square_pts(2, &[&[0, 0], &[0, 1]])];
    let v = mixed_volumes(&segs).map_err(e)?;
    ensure(*v.get(&[1, 1]).map_err(e)? == q(1, 2), || "V(segment, segment) != 1/2".into())?;
    for dim in 1..=3usize {
        let fact: i64 = (1..=dim as i64).product();
        for m in 1..=6i64 {
            let gens = (0..dim).map(|i| (0..dim).map(|j| if i == j { m } else { 0 }).collect()).collect();
            let p = NewtonPolyhedron::new(dim, gens).map_err(e)?;
            ensure(p.covolume().map_err(e)? == q(m.pow(dim as u32), fact), || {
                format!("simplex covolume wrong for N={dim}, m={m}")
            })?;
        }
    }
    for i in 0..50 {
        let p = random_newton(&mut campaign_rng(90, i), 3).map_err(e)?;
        let m = p.max_coordinate();
        let base = p.covolume_with_bound(m).map_err(e)?;
        for bound in [m + 1, 2 * m + 3, 7 * m] {
            ensure(p.covolume_with_bound(bound).map_err(e)? == base, || format!("polyhedron {i}: bound {bound} changes the covolume"))?;
        }
    }
    Ok(format!("{entries} interpolated entries equal polarization; unit cases, simplices, box independence exact"))
}

fn criterion_10() -> Check {
    let af = comp_fkg::suite::af_campaign(10, 200, 3).map_err(e)?;
    let te = comp_fkg::suite::teissier_campaign(10, 200, 3).map_err(e)?;
    ensure(af.passed() && te.passed(), || format!("AF {} / Teissier {} violations", af.violations, te.violations))?;
    for i in 0..5 {
        let mut rng = campaign_rng(100, i);
        let a = random_body(&mut rng, 3).map_err(e)?;
        let scaled: Vec<_> = [1, 2, 4].iter().map(|&d| a.scale(&q(d, 1)).unwrap()).collect();
        for bodies in [vec![a.clone(); 3], scaled] {
            let rep = verify_af(&bodies).map_err(e)?;
            ensure(rep.holds && rep.equality, || format!("AF equality missed on family {i}"))?;
        }
        let g = random_newton(&mut rng, 3).map_err(e)?;
        let scaled: Vec<_> = [1, 3, 2].iter().map(|&d| g.scale(d).unwrap()).collect();
        for polys in [vec![g.clone(); 3], scaled] {
            let rep = verify_teissier(&polys).map_err(e)?;
            ensure(rep.holds && rep.equality, || format!("Teissier equality missed on family {i}"))?;
        }
    }
    Ok(format!(
        "AF 200/200, Teissier 200/200 ({} random equalities); equal and scaled families give equality",
        te.equalities
    ))
}

fn criterion_11() -> Check {
    let sym = symmetrized_monotone_campaign(11, 100).map_err(e)?;
    ensure(sym.passed(), || format!("symmetrization: {:?}", sym.first_violation))?;

    let c1 = corollary1_campaign(11, 100).map_err(e)?;
    ensure(c1.passed(), || format!("part 1: {:?}", c1.first_violation))?;
    let mut rng = campaign_rng(110, 0);
    let polys = (0..3).map(|_| random_newton(&mut rng, 3)).collect::<Result<Vec<_>, _>>().map_err(e)?;
    let lat = Arc::new(CompositionLattice::new(3, 3).map_err(e)?);
    let constant = comp_fkg::averaging::LatticeFunction::constant(lat.clone(), q(2, 1)).map_err(e)?;
    let squares = comp_fkg::suite::sum_of_squares_function(lat).map_err(e)?;
    let rep = verify_corollary_part1(&MixFunctionSpec::polyhedra(3, polys.clone()).map_err(e)?, &constant).map_err(e)?;
    ensure(rep.passed() && rep.correlation.equality, || "constant C does not give equality".into())?;
    let same = MixFunctionSpec::polyhedra(3, vec![polys[0].clone(); 3]).map_err(e)?;
    let rep = verify_corollary_part1(&same, &squares).map_err(e)?;
    ensure(rep.passed() && rep.correlation.equality, || "equal polyhedra do not give equality".into())?;

    let ex = exponent_campaign(11, 50).map_err(e)?;
    ensure(ex.passed(), || format!("exponent example: {:?}", ex.first_violation))?;
    let a = random_body(&mut campaign_rng(111, 0), 3).map_err(e)?;
    let scaled: Vec<_> = [2, 1, 3].iter().map(|&d| a.scale(&q(d, 1)).unwrap()).collect();
    let rep = verify_exponent_example(&scaled, 6, 4, 1).map_err(e)?;
    ensure(rep.passed() && rep.equality, || "scaled bodies do not give equality".into())?;

    let pr = product_campaign(11, 200).map_err(e)?;
    ensure(pr.passed(), || format!("product: {:?}", pr.first_violation))?;

    let g = random_newton(&mut campaign_rng(112, 0), 3).map_err(e)?;
    let rep = verify_durfee_inequality(&[g.clone(), g]).map_err(e)?;
    ensure(rep.passed() && rep.equality, || "equal polyhedra do not give equality".into())?;
    // coVol(Γ_1^{k_1}, …) = ∏ d_i^{k_i} for Γ_i = d_i·Γ with coVol(Γ) = 1.
    let d = [1i64, 2, 3];
    let covol: BTreeMap<String, String> = compositions(6, 3)
        .iter()
        .map(|k| {
            let key = k.parts().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
            let v: i64 = k.parts().iter().zip(&d).map(|(&e, &x)| x.pow(e)).product();
            (key, v.to_string())
        })
        .collect();
    let table = MixedVolumeTable::from_abstract(&AbstractTable { n: 6, r: 3, covol }).map_err(e)?;
    let rep = verify_durfee_table(&table).map_err(e)?;
    ensure(rep.passed() && !rep.equality && rep.lhs > rep.rhs, || "scaled family is not strict".into())?;

    Ok(format!(
        "symmetrization 100/100, part 1 100/100 ({} equalities), exponent 50/50, product 200/200, weighted covolumes equal/strict as expected",
        c1.equalities
    ))
}

fn criterion_12() -> Check {
    let bin = env!("CARGO_BIN_EXE_comp-fkg");
    let runs: [&[&str]; 3] = [
        &["verify-geometry", "--check", "teissier", "--seed", "5", "--budget", "20"],
        &["verify-fkg", "5", "3", "--mode", "random", "--seed", "3", "--budget", "300"],
        &["--format", "markdown", "verify-geometry", "--check", "corollary2", "--seed", "2", "--budget", "6"],
    ];
    for args in runs {
        let once = || Command::new(bin).args(args).env_remove("COMP_FKG_CAP").output();
        let (a, b) = (once().map_err(e)?, once().map_err(e)?);
        ensure(a.status.success() && b.status.success(), || format!("{args:?} failed"))?;
        ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || format!("{args:?}: reports differ"))?;
    }
    Ok("3 configurations byte-identical across runs".into())
}

/// Criteria whose statement is false as written. They still print FAIL,
/// but do not fail the test run; see the README.
const KNOWN_FALSE: &[u32] = &[7];

fn main() {
    let criteria: [(u32, &str, Option<u64>, fn() -> Check); 12] = [
        (1, "cardinalities", Some(5), criterion_1),
        (2, "order facts", Some(10), criterion_2),
        (3, "Young lattice", None, criterion_3),
        (4, "non-distributivity", None, criterion_4),
        (5, "exhaustive filter pairs", Some(300), criterion_5),
        (6, "strata monotonicity", None, criterion_6),
        (7, "alpha identities", Some(1), criterion_7),
        (8, "Chebyshev gap", None, criterion_8),
        (9, "geometry kernel", Some(120), criterion_9),
        (10, "AF/Teissier campaigns", None, criterion_10),
        (11, "mixed volume suite", None, criterion_11),
        (12, "reproducibility", None, criterion_12),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let over = limit.is_some_and(|s| elapsed > Duration::from_secs(s));
        let (ok, detail) = match result {
            Ok(d) if over => (false, format!("{d}; over the {}s limit", limit.unwrap())),
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let known = KNOWN_FALSE.contains(&id);
        failed += (!ok && !known) as u32;
        println!(
            "criterion {id:>2} [{name}]: {} ({:.2}s) {detail}",
            match (ok, known) {
                (true, _) => "PASS",
                (false, true) => "FAIL (known, statement false as written)",
                (false, false) => "FAIL",
            },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed unexpectedly");
        std::process::exit(1);
    }
}
