use std::sync::Arc;

use nicetop::alexandroff::{chain_sobriety, closure_set, generic_point};
use nicetop::ladders::{finite_collapse_facts, search_reversals, sweep_families, sweep_posets, LadderReport};
use nicetop::order::{enumerate_nice_families, enumerate_posets_capped, HARD_POSET_CAP};
use nicetop::pattern::{
    corner_ring, descending_corner_family, pinned_corner_family, AscendingColumnChain, IntervalMembership, PatternSpace,
};
use nicetop::spectra::{fixture_models, ChainRule, GreedyOracle, IntersectionOracle, LazyChainModel, RefinementOracle};
use nicetop::valuation::grid::{disagreements, GridConfig};
use nicetop::{Cut, ElemSet, NiceFamily, Rational};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{
    cap, parse_cut, parse_rational, ConfigError, ExampleArgs, OracleKind, SearchCommand, SpectraCommand, VerifyArgs, Which,
    MAX_CHAIN_DEPTH, MAX_CHAIN_N,
};
use crate::report::Report;

/// Either bad input (exit 1) or a check that could not run (exit 2).
pub enum Failure {
    Config(ConfigError),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn run_err(e: impl std::fmt::Display) -> Failure {
    Failure::Run(e.to_string())
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(ConfigError(e.to_string()))
}

fn record(report: &mut Report, name: String, summary: String, ladder: LadderReport) {
    report.check(name, ladder.checked, ladder.violations.len(), summary);
    for v in ladder.violations {
        report.violation(v);
    }
}

fn families_up_to(ground: usize, max_members: usize) -> Result<Vec<(usize, Vec<NiceFamily>)>, Failure> {
    (0..=ground).map(|g| Ok((g, enumerate_nice_families(g, max_members).map_err(config_err)?))).collect()
}

pub fn verify(args: &VerifyArgs) -> Result<Report, Failure> {
    args.validate()?;
    let mut report = Report::new("verify", serde_json::to_value(args).expect("config serializes"));
    for n in 1..=args.max_n {
        let posets = enumerate_posets_capped(n, HARD_POSET_CAP).map_err(config_err)?;
        let label = format!("posets n={n}");
        let ladder = sweep_posets(&label, &posets).map_err(run_err)?;
        record(&mut report, label, format!("{} isomorphism classes", posets.len()), ladder);
    }
    if args.families {
        let mut all = Vec::new();
        for (g, fams) in families_up_to(args.ground, args.max_members)? {
            let label = format!("families ground={g} members<={}", args.max_members);
            let ladder = sweep_families(&label, &fams).map_err(run_err)?;
            record(&mut report, label, format!("{} families", fams.len()), ladder);
            all.extend(fams);
        }
        let facts = finite_collapse_facts(&all).map_err(run_err)?;
        let reversals = facts.e_without_d + facts.f_without_a + facts.c_without_b + facts.not_all_equal;
        report.check(
            "finite collapse",
            facts.nonempty_opens,
            reversals,
            format!("{} opens in {} families, {reversals} finite reversals", facts.nonempty_opens, facts.models),
        );
    }
    grid_oracle(&mut report, GridConfig { q: args.grid_q, bound: args.grid_b });
    Ok(report)
}

/// Every pair of cuts whose thresholds sit on an evenly spaced subgrid of
/// `(1/q)·ℤ ∩ [-B/2, B/2]`, compared against the setwise model.
fn grid_oracle(report: &mut Report, cfg: GridConfig) {
    let reach = cfg.q * (cfg.bound / 2);
    let stride = (2 * reach / 32).max(1);
    let mut cuts = vec![Cut::Zero];
    for k in (-reach..=reach).step_by(stride as usize) {
        let g = Rational::new(k, cfg.q);
        cuts.push(Cut::closed(g));
        cuts.push(Cut::open(g));
    }
    let found: Vec<Vec<(usize, Vec<&str>)>> = cuts
        .par_iter()
        .map(|a| cuts.iter().map(|b| disagreements(cfg, a, b)).enumerate().filter(|(_, ops)| !ops.is_empty()).collect())
        .collect();
    let mut bad = 0;
    for (i, row) in found.into_iter().enumerate() {
        for (j, ops) in row {
            bad += 1;
            report.violation(json!({"check": "cut oracle", "a": cuts[i], "b": cuts[j], "operations": ops}));
        }
    }
    let pairs = cuts.len() * cuts.len();
    report.check("cut oracle", pairs, bad, format!("{pairs} pairs on q={}, B={}", cfg.q, cfg.bound));
}

pub fn example(args: &ExampleArgs) -> Result<Report, Failure> {
    match args.which {
        Which::Descending => descending(args),
        Which::Pinned => pinned(args),
        Which::Column => column(args),
    }
}

fn corner_config(args: &ExampleArgs, default_j1: &str) -> Result<(Rational, Cut), Failure> {
    let r0 = parse_rational("r0", &args.r0)?;
    let j1 = parse_cut("j1", args.j1.as_deref().unwrap_or(default_j1))?;
    Ok((r0, j1))
}

fn descending(args: &ExampleArgs) -> Result<Report, Failure> {
    let (r0, j1) = corner_config(args, "2")?;
    let mut report = Report::new("example 2.7", json!({"which": args.which, "r0": r0.to_string(), "j1": j1}));
    let u = descending_corner_family(r0, j1.clone()).map_err(config_err)?;
    let ev = u.evaluate().map_err(run_err)?;
    let expected = corner_ring(Cut::closed(r0), j1);
    let members_nice = u.pieces()[0].check_all_members();
    let inf_member = u.member_of(&ev.infimum).map_err(run_err)?;
    let verified = ev.infimum == expected && !inf_member && members_nice.all_ok() && ev.ladder.e && !ev.ladder.d;
    report.check("every R_r nice", 1, usize::from(!members_nice.all_ok()), "whole interval, exact");
    report.certificate(
        "(e) without (d)",
        verified,
        format!(
            "infimum {} equals R_r0: {}, member: {inf_member}, ladder {}",
            ev.infimum,
            ev.infimum == expected,
            flags(&ev.ladder)
        ),
        json!({"family": u, "evaluation": ev, "expected_infimum": expected, "infimum_is_member": inf_member}),
    );
    Ok(report)
}

fn pinned(args: &ExampleArgs) -> Result<Report, Failure> {
    let (r0, j1) = corner_config(args, "3")?;
    let j2 = parse_cut("j2", &args.j2)?;
    let config = json!({"which": args.which, "r0": r0.to_string(), "j1": j1, "j2": j2});
    let mut report = Report::new("example 2.7p", config);
    let u = pinned_corner_family(r0, j1, j2.clone()).map_err(config_err)?;
    let ev = u.evaluate().map_err(run_err)?;
    let pinned = &u.generators()[0];
    let verdict = u.intersection_membership(pinned, &u.pieces()[0]).map_err(run_err)?;
    let unique_minimal = ev.minimal_generators == vec![0];
    let verified = unique_minimal && verdict == IntervalMembership::Nowhere && ev.ladder.f && !ev.ladder.e;
    report.certificate(
        "(f) without (e)",
        verified,
        format!("unique minimal member {pinned}, intersection with R_r in family: {verdict:?}, ladder {}", flags(&ev.ladder)),
        json!({"family": u, "evaluation": ev, "minimal_member": pinned, "intersection_membership": verdict}),
    );
    Ok(report)
}

fn column(args: &ExampleArgs) -> Result<Report, Failure> {
    cap("n", args.n, 2, MAX_CHAIN_N)?;
    cap("depth", args.depth, 1, MAX_CHAIN_DEPTH)?;
    let depth = args.depth;
    let mut report = Report::new("example 2.13", json!({"which": args.which, "n": args.n, "depth": depth}));
    let chain = AscendingColumnChain::<Rational>::new(args.n).map_err(config_err)?;
    let rings = chain.truncation(depth).map_err(run_err)?;

    let not_nice = rings.iter().filter(|r| !r.is_nice()).count();
    report.check("members nice", depth, not_nice, format!("R_1..R_{depth} pass the pattern check"));

    let strict = (1..=depth).filter(|&k| chain.ring(k + 1).strictly_contains(&chain.ring(k))).count();
    report.check("strict inclusions", depth, depth - strict, format!("{strict} of {depth} steps R_k < R_(k+1) strict"));

    let space = PatternSpace::new(rings.clone()).map_err(run_err)?;
    let mut generic_ok = 0;
    for k in 1..=depth {
        let c = closure_set(&space, (0..k).collect::<ElemSet>());
        if generic_point(&space, c).map_err(run_err)? == Some(k - 1) {
            generic_ok += 1;
        }
    }
    report.check(
        "truncated generic points",
        depth,
        depth - generic_ok,
        format!("closure of R_1..R_K' has generic point R_K' for all K' <= {depth}"),
    );

    let cert = chain_sobriety(&chain);
    let limit = chain.limit_ring();
    let limit_outside = limit.is_nice() && rings.iter().all(|r| limit.strictly_contains(r)) && !rings.contains(&limit);
    let verified = cert.refutes_sobriety() && cert.bounding_member.is_none() && limit_outside;
    report.certificate(
        "closed irreducible without generic point",
        verified,
        format!(
            "closed: {}, irreducible: {}, generic point: {}, bounding member: none, limit {limit} lies above every member",
            cert.closed, cert.irreducible, cert.has_generic_point
        ),
        json!({"sobriety": cert, "column_limit": chain.column_limit(), "limit_ring": limit, "first": rings[0], "last": rings[depth - 1]}),
    );
    Ok(report)
}

fn flags(l: &nicetop::OpenLadder) -> String {
    [('a', l.a), ('b', l.b), ('c', l.c), ('d', l.d), ('e', l.e), ('f', l.f)]
        .iter()
        .map(|(c, v)| format!("({c}){}", if *v { '+' } else { '-' }))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn search(cmd: &SearchCommand) -> Result<Report, Failure> {
    let SearchCommand::Reversals { ground, max_members } = *cmd;
    cap("ground", ground, 0, nicetop::order::MAX_FAMILY_GROUND)?;
    cap("max-members", max_members, 1, nicetop::order::MAX_FAMILY_MEMBERS)?;
    let mut report = Report::new("search reversals", json!({"ground": ground, "max_members": max_members}));
    let all: Vec<NiceFamily> = families_up_to(ground, max_members)?.into_iter().flat_map(|(_, f)| f).collect();
    let facts = finite_collapse_facts(&all).map_err(run_err)?;
    let reversals = facts.e_without_d + facts.f_without_a + facts.c_without_b + facts.not_all_equal;
    report.check(
        "finite collapse",
        facts.nonempty_opens,
        reversals,
        format!("{} opens in {} families, no finite model separates the ladder", facts.nonempty_opens, facts.models),
    );
    for cert in search_reversals::<Rational>().map_err(run_err)? {
        let summary = format!("does not reverse on {}: {}", cert.family, cert.witness);
        report.certificate(cert.fails.clone(), cert.verified, summary, &cert);
    }
    Ok(report)
}

pub fn spectra(cmd: &SpectraCommand) -> Result<Report, Failure> {
    cmd.validate()?;
    match *cmd {
        SpectraCommand::Demo { primes, ground, max_members, per_family, seed, oracle } => {
            let config = json!({
                "what": "demo", "primes": primes, "ground": ground, "max_members": max_members,
                "per_family": per_family, "seed": seed, "oracle": oracle,
            });
            let mut report = Report::new("spectra demo", config);
            let oracle: Arc<dyn RefinementOracle> = match oracle {
                OracleKind::Intersection => Arc::new(IntersectionOracle),
                OracleKind::Greedy => Arc::new(GreedyOracle),
            };
            let models = fixture_models(seed, ground, max_members, primes, per_family).map_err(run_err)?;
            let (mut runs, mut run_bad, mut closed, mut closed_bad, mut without, mut max_steps) = (0, 0, 0, 0, 0, 0);
            for (ix, m) in models.into_iter().enumerate() {
                let m = m.with_oracle(oracle.clone());
                let has_lo = !m.lo_members().is_empty();
                without += usize::from(!has_lo);
                if has_lo {
                    for r in 0..m.family().len() {
                        let missing = m.all_primes().difference(m.cover(r).map_err(run_err)?).len();
                        let run = m.lo_from_cofinite(r).map_err(run_err)?;
                        runs += 1;
                        max_steps = max_steps.max(run.steps);
                        if run.steps > missing || !m.satisfies_lo(run.member).map_err(run_err)? {
                            run_bad += 1;
                            report.violation(json!({"check": "lo from cofinite", "fixture": ix, "run": run}));
                        }
                    }
                }
                for c in m.family().order().lower_sets().into_iter().filter(|c| !c.is_empty()) {
                    let found = m.closed_set_lo(c).map_err(run_err)?;
                    closed += 1;
                    let ok = match found {
                        Some(r) => has_lo && c.contains(r) && m.satisfies_lo(r).map_err(run_err)?,
                        None => !has_lo,
                    };
                    if !ok {
                        closed_bad += 1;
                        report.violation(json!({"check": "closed set lo", "fixture": ix, "closed": c, "found": found}));
                    }
                }
            }
            report.check(
                "lo from cofinite",
                runs,
                run_bad,
                format!("steps never exceed missing primes; longest run {max_steps}"),
            );
            report.check("closed set lo", closed, closed_bad, format!("{without} fixtures without an LO member"));
            Ok(report)
        }
        SpectraCommand::Lazy { depth, stride } => {
            let rule = if stride == 1 { ChainRule::FirstPrimes } else { ChainRule::Stride { step: stride } };
            let mut report = Report::new("spectra lazy", json!({"what": "lazy", "depth": depth, "rule": rule}));
            let rep = LazyChainModel::new(rule).map_err(config_err)?.verify(depth).map_err(run_err)?;
            report.check(
                "strict growth",
                rep.pairs_checked,
                usize::from(!rep.holds()),
                format!("depth {depth}, covers grow strictly, largest prime {}", rep.largest_prime),
            );
            report.certificate("no member covers every prime", rep.holds(), format!("verified to depth {depth}"), &rep);
            Ok(report)
        }
    }
}
