//! Acceptance gate: nine criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout.
//! Exits nonzero if any criterion fails or overruns its time limit.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nicetop::alexandroff::{chain_sobriety, closure_set, generic_point, specialization_order, topology_from_order, AlexTopology};
use nicetop::ladders::{finite_collapse_facts, search_reversals, sweep_families};
use nicetop::order::{enumerate_nice_families, enumerate_posets};
use nicetop::pattern::{
    corner_ring, descending_corner_family, pinned_corner_family, union_directed, AscendingColumnChain, PatternSpace,
};
use nicetop::spectra::{fixture_models, ChainRule, LazyChainModel};
use nicetop::valuation::grid::{disagreements, GridConfig};
use nicetop::{Cut, ElemSet, Pattern, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::q;

type Outcome = Result<String, String>;
type Criterion = (usize, &'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn round_trip() -> Outcome {
    let mut posets = 0;
    for n in 1..=6 {
        for p in enumerate_posets(n).map_err(|e| e.to_string())? {
            let back = specialization_order(&topology_from_order(&p)).map_err(|e| e.to_string())?;
            ensure(back == p, || format!("order round trip failed for {p:?}"))?;
            posets += 1;
        }
    }
    ensure(posets == 1 + 2 + 5 + 16 + 63 + 318, || format!("{posets} posets enumerated"))?;
    let mut topologies = 0;
    for n in 1..=4 {
        for opens in common::all_topologies(n).into_iter().filter(|o| common::is_t0(n, o)) {
            let t = AlexTopology::from_opens(n, &opens).map_err(|e| e.to_string())?;
            let back = topology_from_order(&specialization_order(&t).map_err(|e| e.to_string())?);
            ensure(back.opens() == opens, || format!("topology round trip failed for {opens:?}"))?;
            topologies += 1;
        }
    }
    ensure(topologies == 1 + 3 + 19 + 219, || format!("{topologies} T0 topologies"))?;
    Ok(format!("{posets} posets, {topologies} T0 topologies"))
}

fn all_families() -> Result<Vec<nicetop::NiceFamily>, String> {
    let mut fams = Vec::new();
    for ground in 0..=4 {
        fams.extend(enumerate_nice_families(ground, 6).map_err(|e| e.to_string())?);
    }
    Ok(fams)
}

fn ladder_soundness() -> Outcome {
    let fams = all_families()?;
    let rep = sweep_families("ground<=4, members<=6", &fams).map_err(|e| e.to_string())?;
    ensure(rep.violations.is_empty(), || format!("{} violations, first: {}", rep.violations.len(), rep.violations[0]))?;
    Ok(format!("{} families, {} checks, 0 violations", fams.len(), rep.checked))
}

fn finite_collapse() -> Outcome {
    let fams = all_families()?;
    let facts = finite_collapse_facts(&fams).map_err(|e| e.to_string())?;
    ensure(facts.e_without_d == 0 && facts.f_without_a == 0 && facts.c_without_b == 0 && facts.not_all_equal == 0, || {
        format!("{facts:?}")
    })?;
    let certs = search_reversals::<Rational>().map_err(|e| e.to_string())?;
    ensure(certs.len() == 3 && certs.iter().all(|c| c.verified), || format!("{certs:?}"))?;
    Ok(format!(
        "{} opens in {} families, no finite reversal; 3 symbolic certificates verified",
        facts.nonempty_opens, facts.models
    ))
}

fn descending_corner_certificate() -> Outcome {
    let r0s = [q(1, 1), q(1, 2), q(3, 4), q(2, 1), q(5, 3)];
    let j1s = [Cut::closed(q(2, 1)), Cut::open(q(0, 1)), Cut::closed(q(0, 1)), Cut::open(q(3, 2)), Cut::closed(q(7, 5))];
    let mut n = 0;
    for r0 in r0s {
        for j1 in &j1s {
            let u = descending_corner_family(r0, j1.clone()).map_err(|e| e.to_string())?;
            let ev = u.evaluate().map_err(|e| e.to_string())?;
            let expected = corner_ring(Cut::closed(r0), j1.clone());
            ensure(ev.infimum == expected, || format!("infimum {} != {expected}", ev.infimum))?;
            ensure(!u.member_of(&expected).map_err(|e| e.to_string())?, || format!("R_r0 accepted for r0={r0}"))?;
            ensure(ev.ladder.e && !ev.ladder.d, || format!("flags {:?} for r0={r0}, J1={j1}", ev.ladder))?;
            ensure(u.pieces()[0].check_all_members().all_ok(), || "some R_r is not nice".into())?;
            n += 1;
        }
    }
    Ok(format!("{n} parameter choices"))
}

fn pinned_corner_certificate() -> Outcome {
    let cases = [
        (q(1, 1), Cut::closed(q(3, 1)), Cut::closed(q(2, 1))),
        (q(1, 1), Cut::closed(q(3, 1)), Cut::open(q(2, 1))),
        (q(1, 2), Cut::open(q(1, 1)), Cut::closed(q(1, 1))),
        (q(2, 1), Cut::closed(q(1, 1)), Cut::closed(q(0, 1))),
    ];
    let count = cases.len();
    for (r0, j1, j2) in cases {
        let u = pinned_corner_family(r0, j1.clone(), j2.clone()).map_err(|e| e.to_string())?;
        let ev = u.evaluate().map_err(|e| e.to_string())?;
        ensure(ev.minimal_generators == vec![0], || format!("minimal {:?}", ev.minimal_generators))?;
        let g = &u.generators()[0];
        ensure(*g == corner_ring(Cut::closed(r0), j2.clone()), || "pinned generator mismatch".into())?;
        let verdict = u.intersection_membership(g, &u.pieces()[0]).map_err(|e| e.to_string())?;
        ensure(verdict == nicetop::pattern::IntervalMembership::Nowhere, || format!("{verdict:?}"))?;
        ensure(ev.ladder.f && !ev.ladder.e, || format!("{:?}", ev.ladder))?;
    }
    Ok(format!("{count} parameter choices, escape proven for the whole interval"))
}

fn column_chain_certificate() -> Outcome {
    let depth = 50;
    for n in [2usize, 3] {
        let chain = AscendingColumnChain::<Rational>::new(n).map_err(|e| e.to_string())?;
        let rings = chain.truncation(depth).map_err(|e| e.to_string())?;
        ensure(rings.iter().all(|r| r.is_nice()), || "a ring fails the pattern check".into())?;
        for i in 0..depth {
            for j in i + 1..depth {
                ensure(rings[j].strictly_contains(&rings[i]), || format!("R_{} not inside R_{}", i + 1, j + 1))?;
            }
        }
        let space = PatternSpace::new(rings.clone()).map_err(|e| e.to_string())?;
        for k in 1..=depth {
            let first: ElemSet = (0..k).collect();
            let c = closure_set(&space, first);
            let g = generic_point(&space, c).map_err(|e| e.to_string())?;
            ensure(g == Some(k - 1), || format!("generic point {g:?} for K'={k}"))?;
        }
        let cert = chain_sobriety(&chain);
        ensure(cert.refutes_sobriety() && cert.bounding_member.is_none(), || format!("{cert:?}"))?;
        let limit = chain.limit_ring();
        ensure(limit.is_nice() && rings.iter().all(|r| limit.strictly_contains(r)), || "limit ring".into())?;
        ensure(!rings.contains(&limit), || "limit is a member".into())?;
    }
    Ok(format!("n=2,3 with {depth} rings each"))
}

fn random_corner<R: Rng>(rng: &mut R) -> Pattern {
    loop {
        let a = common::random_grid_cut(rng, 4, 3, 0.0);
        let b = common::random_grid_cut(rng, 4, 3, 0.0);
        let p = corner_ring(a, b);
        if p.is_nice() {
            return p;
        }
    }
}

fn irreducible_unions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut shapes = [0usize; 2];
    while shapes[0] + shapes[1] < 1000 {
        let rings: Vec<Pattern> = if rng.gen_bool(0.5) {
            let n = rng.gen_range(2..=4);
            let chain =
                AscendingColumnChain::with_scale(n, q(rng.gen_range(1..8), rng.gen_range(1..5))).map_err(|e| e.to_string())?;
            let mut ks: Vec<usize> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(1..40)).collect();
            ks.sort_unstable();
            ks.dedup();
            shapes[0] += 1;
            ks.into_iter().map(|k| chain.ring(k)).collect()
        } else {
            let a = random_corner(&mut rng);
            let b = random_corner(&mut rng);
            let top = a.sum(&b).map_err(|e| e.to_string())?;
            if !top.is_nice() {
                continue;
            }
            shapes[1] += 1;
            vec![a, b, top]
        };
        let union = union_directed(&rings).map_err(|e| e.to_string())?;
        ensure(union.is_nice(), || format!("union {union} not nice"))?;
        ensure(rings.contains(&union), || format!("sup {union} is not the top of a finite directed set"))?;
        ensure(rings.iter().all(|r| union.contains(r)), || "union misses a member".into())?;
    }
    let mut directed = 0;
    for fam in all_families()? {
        let order = fam.order();
        for s in order.all().subsets().filter(|s| order.is_directed(*s)) {
            let union = fam.union_of(s);
            let idx = fam.index_of(union);
            ensure(idx.is_some() && idx == order.sup(s), || format!("{fam:?} subset {s}"))?;
            directed += 1;
        }
    }
    Ok(format!("{} chain and {} pair-with-top samples, {directed} finite directed subsets", shapes[0], shapes[1]))
}

fn cut_oracle() -> Outcome {
    let cfg = GridConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let half = cfg.bound / 2;
    for i in 0..10_000 {
        let a = common::random_grid_cut(&mut rng, cfg.q, half, 0.05);
        let b = common::random_grid_cut(&mut rng, cfg.q, half, 0.05);
        let bad = disagreements(cfg, &a, &b);
        ensure(bad.is_empty(), || format!("pair {i}: {a} vs {b} disagree on {bad:?}"))?;
    }
    Ok(format!("10000 pairs, q={}, B={}", cfg.q, cfg.bound))
}

fn spectra() -> Outcome {
    let models = fixture_models(0x5eed_0009, 3, 8, 6, 3).map_err(|e| e.to_string())?;
    let (mut runs, mut closed, mut without) = (0, 0, 0);
    for m in &models {
        if m.lo_members().is_empty() {
            without += 1;
            for c in m.family().order().lower_sets().into_iter().filter(|c| !c.is_empty()) {
                ensure(m.closed_set_lo(c).map_err(|e| e.to_string())?.is_none(), || "LO member from nowhere".into())?;
            }
            continue;
        }
        for r in 0..m.family().len() {
            let k = m.all_primes().difference(m.cover(r).map_err(|e| e.to_string())?).len();
            if k > 4 {
                continue;
            }
            let run = m.lo_from_cofinite(r).map_err(|e| e.to_string())?;
            ensure(run.steps <= k && m.satisfies_lo(run.member).unwrap(), || format!("{m:?} from {r}: {run:?}"))?;
            runs += 1;
        }
        for c in m.family().order().lower_sets().into_iter().filter(|c| !c.is_empty()) {
            let r = m.closed_set_lo(c).map_err(|e| e.to_string())?;
            ensure(r.is_some_and(|r| c.contains(r) && m.satisfies_lo(r).unwrap()), || format!("{m:?} closed {c}"))?;
            closed += 1;
        }
    }
    let lazy = LazyChainModel::new(ChainRule::FirstPrimes).map_err(|e| e.to_string())?.verify(100).map_err(|e| e.to_string())?;
    ensure(lazy.holds(), || format!("{lazy:?}"))?;
    Ok(format!("{} fixtures ({without} without LO), {runs} cofinite runs, {closed} closed sets, lazy depth 100", models.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "order/topology round trip", 10, round_trip),
        (2, "ladder soundness", 60, ladder_soundness),
        (3, "finite collapse", 60, finite_collapse),
        (4, "descending corner family", 1, descending_corner_certificate),
        (5, "pinned corner family", 1, pinned_corner_certificate),
        (6, "ascending column chain", 2, column_chain_certificate),
        (7, "directed unions are suprema", 10, irreducible_unions),
        (8, "cut arithmetic vs grid oracle", 5, cut_oracle),
        (9, "prime covers and lying over", 5, spectra),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let line = match (&outcome, in_time) {
            (Ok(detail), true) => format!("PASS criterion {id} ({name}): {detail} [{elapsed:.2?} / {limit}s]"),
            (Ok(detail), false) => format!("FAIL criterion {id} ({name}): over time limit, {detail} [{elapsed:.2?} / {limit}s]"),
            (Err(msg), _) => format!("FAIL criterion {id} ({name}): {msg} [{elapsed:.2?} / {limit}s]"),
        };
        if !(outcome.is_ok() && in_time) {
            failed += 1;
        }
        println!("{line}");
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
