use serde_json::{json, Value};

use orbitforge::catalog::{self, so4_r4};
use orbitforge::coadjoint::{
    self, generic_orbit_dim, orbit_connect, orbit_dim, sample_orbit, stabilizer_dim, WalkParams,
};
use orbitforge::convexity::{
    hull_equality_test, hull_membership, lemma_recovery_experiment, lifted_separation_test,
    EpsPolicy, HullModel, HullTestOptions, SeparationParams,
};
use orbitforge::invariants::{find_invariants, span_contains, verify_invariant};
use orbitforge::lie::ModuleAction;
use orbitforge::linalg::Matrix;
use orbitforge::overgroup::{
    build_custom_lift, build_invariant_overgroup, build_sym2_overgroup, check_equivariance,
    check_orbit_dims, find_special_ideal, is_special_ideal, so4_overgroup_polynomials,
    so4_wedge_lift, QuadraticLift,
};
use orbitforge::polynomial::Polynomial;
use orbitforge::scalar::{int, parse_rational, Rational};
use orbitforge::{seed, Error, LieAlgebra, Result, Subspace};

use crate::report::{fmt_vec, Report};
use crate::{
    AlgebraArgs, CatalogCmd, Check, CheckArgs, Cli, Command, ConvexityCmd, EpsArgs, Expect,
    LiftChoice, Loaded, OrbitCmd, OvergroupCmd, Preset,
};

pub fn run(cli: &Cli) -> Result<Report> {
    let s = cli.seed;
    match &cli.command {
        Command::Validate(a) => validate(&a.load()?),
        Command::Catalog(CatalogCmd::List) => Ok(catalog_list()),
        Command::Catalog(CatalogCmd::Export(a)) => catalog_export(&a.load()?),
        Command::Orbit(cmd) => orbit(cmd, s),
        Command::Invariants(a) => invariants(&a.alg.load()?, a.max_degree),
        Command::Special(a) => special(&a.alg.load()?, a.trials, s),
        Command::Overgroup(cmd) => overgroup(cmd, s),
        Command::Convexity(cmd) => convexity(cmd, s),
    }
}

fn validate(l: &Loaded) -> Result<Report> {
    let r = match &l.entry {
        Some(e) => catalog::validate_entry(e)?,
        None => l.algebra.validate()?,
    };
    let ok = r.is_valid();
    let mut lines = vec![
        format!("algebra: {}", l.algebra.name()),
        format!("jacobi: {}", if ok { "ok" } else { "failed" }),
    ];
    for v in &r.violations {
        lines.push(format!(
            "  violation at {:?}: ({})",
            v.triple,
            v.residual.join(", ")
        ));
    }
    let json = json!({
        "command": "validate",
        "algebra": l.algebra.name(),
        "dim": l.algebra.dim(),
        "jacobi": if ok { "ok" } else { "failed" },
        "violations": r.violations,
    });
    Ok(Report::new(json, lines, ok))
}

fn catalog_list() -> Report {
    let items = catalog::list();
    let lines = items
        .iter()
        .map(|i| {
            let p = if i.params.is_empty() {
                String::new()
            } else {
                format!("({})", i.params.join(", "))
            };
            format!(
                "{:<14} dim {:<3} {:?}",
                format!("{}{p}", i.name),
                i.dim,
                i.family
            )
        })
        .collect();
    Report::new(
        json!({"command": "catalog list", "entries": items}),
        lines,
        true,
    )
}

fn catalog_export(l: &Loaded) -> Result<Report> {
    let mut v = json!({"command": "catalog export", "algebra": l.algebra.to_json()});
    if let Some(e) = &l.entry {
        let names = catalog::coordinate_names(&e.algebra);
        v["family"] = json!(e.family);
        v["special_ideal"] = json!(e.special_ideal.as_ref().map(|a| a.describe(&e.algebra)));
        v["known_invariants"] = json!(e
            .known_invariants
            .iter()
            .map(|p| p.display_with(&names))
            .collect::<Vec<_>>());
        v["generic_condition"] = json!(e.generic_condition.text());
        v["provenance"] = json!(e.provenance);
    }
    let lines = vec![serde_json::to_string_pretty(&v).expect("serializable")];
    Ok(Report::new(v, lines, true))
}

fn orbit(cmd: &OrbitCmd, s: u64) -> Result<Report> {
    match cmd {
        OrbitCmd::Dim { alg, point, trials } => {
            let l = alg.load()?;
            let g = generic_orbit_dim(&l.algebra, *trials, s);
            let mut json = json!({"command": "orbit dim", "algebra": l.algebra.name(), "generic_dim": g.dim, "trials": g.trials, "witness": g.witness});
            let mut lines = vec![
                format!("algebra: {}", l.algebra.name()),
                format!("generic orbit dim: {} ({} trials)", g.dim, g.trials),
            ];
            if let Some(p) = point {
                let d = orbit_dim(&l.algebra, p)?;
                let st = stabilizer_dim(&l.algebra, p)?;
                json["point"] = json!(p);
                json["orbit_dim"] = json!(d);
                json["stabilizer_dim"] = json!(st);
                json["generic"] = json!(d == g.dim);
                lines.push(format!(
                    "orbit dim at {}: {d} (stabilizer {st})",
                    fmt_vec(p)
                ));
            }
            Ok(Report::new(json, lines, true))
        }
        OrbitCmd::Sample {
            alg,
            point,
            walk,
            csv,
        } => {
            let l = alg.load()?;
            let smp = sample_orbit(&l.algebra, point, walk.count, walk.params(), s)?;
            let mut lines = vec![
                format!("algebra: {}", l.algebra.name()),
                format!("points: {}", smp.len()),
                format!("diameter (sup norm): {:.6}", smp.diameter()),
            ];
            let mut json = json!({"command": "orbit sample", "algebra": l.algebra.name()});
            match csv {
                Some(path) => {
                    std::fs::write(path, smp.to_csv())?;
                    lines.push(format!("csv: {}", path.display()));
                    json["csv"] = json!(path.display().to_string());
                    json["count"] = json!(smp.len());
                    json["diameter"] = json!(smp.diameter());
                }
                None => json["sample"] = smp.to_json(),
            }
            Ok(Report::new(json, lines, true))
        }
        OrbitCmd::Flow {
            alg,
            point,
            direction,
            time,
        } => {
            let l = alg.load()?;
            let out = coadjoint::flow(&l.algebra, point, direction, *time)?;
            let mut json = json!({"command": "orbit flow", "algebra": l.algebra.name(), "point": point, "direction": direction, "time": time, "result": out});
            let mut lines = vec![format!("flow: {}", fmt_vec(&out))];
            if let Some(e) = &l.entry {
                let names = catalog::coordinate_names(&e.algebra);
                let mut drift = Vec::new();
                for p in &e.known_invariants {
                    let (a, b) = (p.eval_f64(point)?, p.eval_f64(&out)?);
                    lines.push(format!("{}: {a:.9} -> {b:.9}", p.display_with(&names)));
                    drift.push(
                        json!({"polynomial": p.display_with(&names), "before": a, "after": b}),
                    );
                }
                json["invariants"] = json!(drift);
            }
            Ok(Report::new(json, lines, true))
        }
        OrbitCmd::Connect {
            alg,
            from,
            to,
            starts,
            tol,
        } => {
            let l = alg.load()?;
            let r = orbit_connect(&l.algebra, from, to, *starts, s)?;
            let joined = r.residual < *tol;
            let lines = vec![
                format!("residual: {:.3e}", r.residual),
                format!(
                    "same orbit: {}",
                    if joined {
                        "yes (group element found)"
                    } else {
                        "not established"
                    }
                ),
            ];
            let json = json!({"command": "orbit connect", "algebra": l.algebra.name(), "from": from, "to": to, "tol": tol, "same_orbit": joined, "report": r});
            Ok(Report::new(json, lines, true))
        }
    }
}

fn invariants(l: &Loaded, max_degree: u32) -> Result<Report> {
    let names = catalog::coordinate_names(&l.algebra);
    let found = find_invariants(&l.algebra, max_degree)?;
    let mut lines = vec![
        format!("algebra: {}", l.algebra.name()),
        format!("invariants up to degree {max_degree}: {}", found.len()),
    ];
    let list: Vec<Value> = found
        .iter()
        .map(|p| {
            lines.push(format!("  [{}] {}", p.degree(), p.display_with(&names)));
            json!({"degree": p.degree(), "polynomial": p.display_with(&names), "terms": p.to_json()["terms"]})
        })
        .collect();
    let mut ok = true;
    let mut known = Vec::new();
    if let Some(e) = &l.entry {
        for p in e
            .known_invariants
            .iter()
            .filter(|p| p.degree() <= max_degree)
        {
            let inside = span_contains(&found, p);
            ok &= inside;
            lines.push(format!(
                "listed {}: {}",
                p.display_with(&names),
                if inside { "in kernel" } else { "MISSING" }
            ));
            known.push(json!({"polynomial": p.display_with(&names), "in_kernel": inside}));
        }
    }
    let json = json!({"command": "invariants", "algebra": l.algebra.name(), "max_degree": max_degree, "invariants": list, "listed": known});
    Ok(Report::new(json, lines, ok))
}

fn special(l: &Loaded, trials: usize, s: u64) -> Result<Report> {
    let alg = &l.algebra;
    let listed = l.entry.as_ref().and_then(|e| e.special_ideal.clone());
    let search = find_special_ideal(alg, listed.as_slice(), trials, s)?;
    let mut lines = vec![
        format!("algebra: {}", alg.name()),
        format!("generic orbit dim: {}", search.generic_dim),
    ];
    lines.push(match &search.canonical {
        Some(a) => format!("special: {}", a.describe(alg)),
        None => "special: none".into(),
    });
    if search.all.len() > 1 {
        lines.push(format!(
            "unique: no ({} candidates: {})",
            search.all.len(),
            search
                .all
                .iter()
                .map(|a| a.describe(alg))
                .collect::<Vec<_>>()
                .join("; ")
        ));
    }
    let mut ok = true;
    let mut listed_json = Value::Null;
    if let Some(a) = &listed {
        let confirmed = is_special_ideal(alg, a, search.generic_dim)?;
        ok = confirmed;
        lines.push(format!(
            "listed: {} {}",
            a.describe(alg),
            if confirmed {
                "confirmed"
            } else {
                "NOT special"
            }
        ));
        listed_json = json!({"ideal": a.describe(alg), "confirmed": confirmed});
    }
    let json = json!({
        "command": "special",
        "algebra": alg.name(),
        "generic_dim": search.generic_dim,
        "solvable": search.solvable,
        "special": search.canonical.as_ref().map(|a| a.describe(alg)),
        "all": search.all.iter().map(|a| a.describe(alg)).collect::<Vec<_>>(),
        "listed": listed_json,
    });
    Ok(Report::new(json, lines, ok))
}

fn parse_ideal(alg: &LieAlgebra, spec: &str) -> Result<Subspace> {
    let idx = spec
        .split(',')
        .map(|t| {
            alg.label_index(t.trim())
                .ok_or_else(|| Error::Parse(format!("unknown basis label `{}`", t.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    Subspace::coordinate(alg.dim(), &idx)
}

fn default_ideal(l: &Loaded, ideal: Option<&str>, s: u64) -> Result<Subspace> {
    if let Some(spec) = ideal {
        return parse_ideal(&l.algebra, spec);
    }
    if let Some(a) = l.entry.as_ref().and_then(|e| e.special_ideal.clone()) {
        return Ok(a);
    }
    find_special_ideal(&l.algebra, &[], 50, s)?
        .canonical
        .ok_or_else(|| Error::Parse("no special ideal found; pass --ideal".into()))
}

struct LiftOutcome {
    json: Value,
    lines: Vec<String>,
    equivariant: bool,
    dims: Option<(usize, usize)>,
}

fn check_lift(
    lift: &QuadraticLift,
    c: &CheckArgs,
    default_point: Option<Vec<f64>>,
    s: u64,
) -> Result<LiftOutcome> {
    let names = catalog::coordinate_names(&lift.base);
    let comps: Vec<String> = lift
        .components
        .iter()
        .map(|p| p.display_with(&names))
        .collect();
    let mut lines = vec![
        format!("algebra: {}", lift.base.name()),
        format!(
            "dimensions: {} -> {}",
            lift.base_dim(),
            lift.extension.dim()
        ),
        format!("components: {}", comps.join(", ")),
    ];
    let mut json = json!({
        "algebra": lift.base.name(),
        "kind": lift.kind,
        "base_dim": lift.base_dim(),
        "extension_dim": lift.extension.dim(),
        "extension_labels": lift.extension.labels(),
        "components": comps,
    });
    let mut equivariant = true;
    if matches!(c.check, Check::All | Check::Equivariance) {
        let r = check_equivariance(lift, c.trials, s, None);
        lines.push(format!(
            "equivariance: {} (max residual {:.3e} over {} trials, {} non-generic origins)",
            if r.passed { "ok" } else { "FAILED" },
            r.max_residual,
            r.trials,
            r.non_generic_origins
        ));
        equivariant = r.passed;
        json["equivariance"] = json!(r);
    }
    let mut dims = None;
    if matches!(c.check, Check::All | Check::Dims) {
        let p = match (&c.point, default_point) {
            (Some(p), _) => p.to_vec(),
            (None, Some(p)) => p,
            (None, None) => generic_orbit_dim(&lift.base, 50, s).witness,
        };
        let d = check_orbit_dims(lift, &p)?;
        lines.push(format!("orbit dims at {}: {} -> {}", fmt_vec(&p), d.0, d.1));
        json["orbit_dims"] = json!({"point": p, "base": d.0, "lifted": d.1, "equal": d.0 == d.1});
        dims = Some(d);
    }
    Ok(LiftOutcome {
        json,
        lines,
        equivariant,
        dims,
    })
}

fn finish(mut o: LiftOutcome, command: &str, passed: bool) -> Report {
    o.lines.push(format!("passed: {passed}"));
    o.json["command"] = json!(command);
    o.json["passed"] = json!(passed);
    Report::new(o.json, o.lines, passed)
}

fn so4_base_point(alg: &LieAlgebra) -> Option<Vec<f64>> {
    let (t4, r12) = (alg.label_index("T4")?, alg.label_index("R12")?);
    let mut l0 = vec![0.0; alg.dim()];
    l0[t4] = 1.5;
    l0[r12] = 2.0;
    Some(l0)
}

fn overgroup(cmd: &OvergroupCmd, s: u64) -> Result<Report> {
    match cmd {
        OvergroupCmd::Sym2 { alg, ideal, check } => {
            let l = alg.load()?;
            let a = default_ideal(&l, ideal.as_deref(), s)?;
            let lift = build_sym2_overgroup(&l.algebra, &a)?;
            let mut o = check_lift(&lift, check, None, s)?;
            o.lines
                .insert(1, format!("ideal: {}", a.describe(&l.algebra)));
            o.json["ideal"] = json!(a.describe(&l.algebra));
            let passed = o.equivariant && o.dims.is_none_or(|(x, y)| x == y);
            Ok(finish(o, "overgroup sym2", passed))
        }
        OvergroupCmd::Product { alg, check } => {
            let l = alg.load()?;
            let invs: Vec<Polynomial> = match l.entry.as_ref().map(|e| &e.known_invariants) {
                Some(k) if k.iter().any(|p| p.degree() <= 2) => {
                    k.iter().filter(|p| p.degree() <= 2).cloned().collect()
                }
                _ => find_invariants(&l.algebra, 2)?,
            };
            if invs.is_empty() {
                let lines = vec![
                    format!("algebra: {}", l.algebra.name()),
                    "product: no invariants of degree at most 2".into(),
                ];
                return Ok(Report::new(
                    json!({"command": "overgroup product", "algebra": l.algebra.name(), "passed": false}),
                    lines,
                    false,
                ));
            }
            let lift = build_invariant_overgroup(&l.algebra, &invs)?;
            let o = check_lift(&lift, check, None, s)?;
            let passed = o.equivariant;
            Ok(finish(o, "overgroup product", passed))
        }
        OvergroupCmd::Custom {
            alg,
            module,
            preset,
            check,
        } => {
            let base = if alg.algebra.is_none() && alg.algebra_json.is_none() {
                if *preset != Some(Preset::So4Wedge) {
                    return Err(Error::Parse("an algebra is required".into()));
                }
                so4_r4()?
            } else {
                alg.load()?.algebra
            };
            if *preset == Some(Preset::So4Wedge) {
                let lift = so4_wedge_lift(&base)?;
                let mut o = check_lift(&lift, check, so4_base_point(&base), s)?;
                let ext_names = catalog::coordinate_names(&lift.extension);
                let mut all = true;
                let mut list = Vec::new();
                for (name, p) in so4_overgroup_polynomials(&lift)? {
                    let inv = verify_invariant(&lift.extension, &p)?;
                    all &= inv;
                    o.lines.push(format!(
                        "invariant {name} (degree {}): {}",
                        p.degree(),
                        if inv { "exact" } else { "FAILED" }
                    ));
                    list.push(json!({"name": name, "degree": p.degree(), "polynomial": p.display_with(&ext_names), "invariant": inv}));
                }
                o.json["overgroup_invariants"] = json!(list);
                let passed = o.equivariant && all;
                return Ok(finish(o, "overgroup custom", passed));
            }
            let path = module
                .as_ref()
                .ok_or_else(|| Error::Parse("--module or --preset is required".into()))?;
            let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let (act, comps) = parse_module(&base, &v)?;
            let lift = build_custom_lift(&base, &act, comps)?;
            let o = check_lift(&lift, check, None, s)?;
            let passed = o.equivariant;
            Ok(finish(o, "overgroup custom", passed))
        }
    }
}

fn rational_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(int)
            .ok_or_else(|| Error::Parse("module entries must be integers or \"p/q\"".into())),
        _ => Err(Error::Parse(
            "module entries must be numbers or strings".into(),
        )),
    }
}

fn parse_module(alg: &LieAlgebra, v: &Value) -> Result<(ModuleAction, Vec<Polynomial>)> {
    let bad = |m: &str| Error::Parse(format!("module JSON: {m}"));
    let labels: Vec<String> = v
        .get("labels")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing labels"))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(str::to_owned)
                .ok_or_else(|| bad("labels must be strings"))
        })
        .collect::<Result<_>>()?;
    let mut action = Vec::new();
    for m in v
        .get("action")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing action"))?
    {
        let rows = m
            .as_array()
            .ok_or_else(|| bad("action entries are matrices"))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| bad("matrix rows are arrays"))?
                    .iter()
                    .map(rational_json)
                    .collect()
            })
            .collect::<Result<Vec<Vec<Rational>>>>()?;
        action.push(if rows.is_empty() {
            Matrix::zeros(labels.len(), labels.len())
        } else {
            Matrix::from_rows(&rows)
        });
    }
    let names = catalog::coordinate_names(alg);
    let comps = v
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing components"))?
        .iter()
        .map(|c| {
            Polynomial::parse(
                c.as_str().ok_or_else(|| bad("components are strings"))?,
                &names,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ModuleAction::new(alg.dim(), labels, action)?, comps))
}

fn eps_policy(e: &EpsArgs) -> EpsPolicy {
    e.eps
        .map_or(EpsPolicy::Relative(e.eps_frac), EpsPolicy::Absolute)
}

fn convexity(cmd: &ConvexityCmd, s: u64) -> Result<Report> {
    match cmd {
        ConvexityCmd::Member {
            alg,
            point,
            probe,
            walk,
            eps,
        } => {
            let l = alg.load()?;
            let smp = sample_orbit(&l.algebra, point, walk.count, walk.params(), s)?;
            let e = match eps_policy(eps) {
                EpsPolicy::Relative(f) => f * smp.diameter(),
                EpsPolicy::Absolute(a) => a,
            };
            let m = hull_membership(probe, &HullModel::new(&smp, Some(e))?)?;
            let side = if m.member {
                "sample-relative"
            } else {
                "certified by the LP optimum"
            };
            let lines = vec![
                format!("member: {} ({side})", m.member),
                format!("slack: {:.6e}  epsilon: {:.6e}", m.slack, m.epsilon),
                format!("certificate: {} points", m.weights.len()),
            ];
            let json = json!({"command": "convexity member", "algebra": l.algebra.name(), "origin": point, "probe": probe, "sample_size": smp.len(), "verdict_side": side, "membership": m});
            Ok(Report::new(json, lines, true))
        }
        ConvexityCmd::LemmaDemo {
            dim,
            points,
            trials,
            spread,
        } => {
            if *dim == 0 || *points == 0 {
                return Err(Error::Parse("--dim and --points must be positive".into()));
            }
            let mut rng = seed::rng(seed::derive(s, 0x5e7), 0);
            let a: Vec<Vec<f64>> = (0..*points)
                .map(|_| {
                    coadjoint::uniform_covector(*dim, &mut rng)
                        .into_iter()
                        .map(|x| spread * x)
                        .collect()
                })
                .collect();
            let r = lemma_recovery_experiment(&a, *trials, s)?;
            let ok = r.violations == 0;
            let lines = vec![
                format!("trials: {}  dim: {}  points: {}", r.trials, r.dim, r.points),
                format!("max ratio |X - X_j0| / (2 eps'): {:.6}", r.max_ratio),
                format!(
                    "violations: {}  near violations: {}",
                    r.violations,
                    r.near_violations.len()
                ),
            ];
            Ok(Report::new(
                json!({"command": "convexity lemma-demo", "report": r}),
                lines,
                ok,
            ))
        }
        ConvexityCmd::HullEq {
            alg,
            l1,
            l2,
            walk,
            eps,
            probes,
            min_rate,
        } => {
            let l = alg.load()?;
            let s1 = sample_orbit(
                &l.algebra,
                l1,
                walk.count,
                walk.params(),
                seed::derive_from_point(s, l1),
            )?;
            let s2 = sample_orbit(
                &l.algebra,
                l2,
                walk.count,
                walk.params(),
                seed::derive_from_point(s, l2),
            )?;
            let opts = HullTestOptions {
                epsilon: eps_policy(eps),
                max_probes: probes.max_probes,
                probe_radius: probes.probe_radius,
                probe_norm_dims: None,
            };
            let r = hull_equality_test(&s1, &s2, &opts)?;
            let ok = r.rate_12.rate >= *min_rate && r.rate_21.rate >= *min_rate;
            let lines = vec![
                format!(
                    "S2 in Hull(S1): {:.4} ({} probes, eps {:.4})",
                    r.rate_12.rate, r.rate_12.probes, r.rate_12.epsilon
                ),
                format!(
                    "S1 in Hull(S2): {:.4} ({} probes, eps {:.4})",
                    r.rate_21.rate, r.rate_21.probes, r.rate_21.epsilon
                ),
                format!("equal hulls at rate {min_rate}: {ok}"),
            ];
            Ok(Report::new(
                json!({"command": "convexity hull-eq", "algebra": l.algebra.name(), "l1": l1, "l2": l2, "min_rate": min_rate, "report": r}),
                lines,
                ok,
            ))
        }
        ConvexityCmd::Separate {
            alg,
            lift,
            ideal,
            l1,
            l2,
            count,
            steps,
            tau,
            radius,
            eps,
            max_probes,
            probe_radius,
            expect,
        } => {
            let loaded = if *lift == LiftChoice::So4Wedge
                && alg.algebra.is_none()
                && alg.algebra_json.is_none()
            {
                Loaded {
                    algebra: so4_r4()?,
                    entry: None,
                }
            } else {
                AlgebraArgs::load(alg)?
            };
            let q = match lift {
                LiftChoice::Sym2 => build_sym2_overgroup(
                    &loaded.algebra,
                    &default_ideal(&loaded, ideal.as_deref(), s)?,
                )?,
                LiftChoice::So4Wedge => so4_wedge_lift(&loaded.algebra)?,
            };
            let d = SeparationParams::default();
            let p = SeparationParams {
                count: *count,
                walk: WalkParams {
                    steps: *steps,
                    tau: *tau,
                    radius: Some(*radius),
                    ..d.walk
                },
                options: HullTestOptions {
                    epsilon: eps_policy(eps),
                    max_probes: Some(*max_probes),
                    probe_radius: Some(*probe_radius),
                    ..d.options
                },
                ..d
            };
            let r = lifted_separation_test(&loaded.algebra, &q, l1, l2, &p, s)?;
            let ok = r.separated == (*expect == Expect::Separated);
            let mut lines = vec![
                format!(
                    "base rates: {:.4} / {:.4} (indistinguishable: {})",
                    r.base.rate_12.rate, r.base.rate_21.rate, r.base_indistinguishable
                ),
                format!(
                    "lifted rates: {:.4} / {:.4}",
                    r.lifted.rate_12.rate, r.lifted.rate_21.rate
                ),
                format!("separated: {}", r.separated),
            ];
            if let Some(w) = &r.witness {
                lines.push(format!(
                    "witness on lifted orbit {}: slack {:.4} > eps {:.4}",
                    w.orbit, w.slack, w.epsilon
                ));
            }
            Ok(Report::new(
                json!({"command": "convexity separate", "algebra": loaded.algebra.name(), "l1": l1, "l2": l2, "report": r}),
                lines,
                ok,
            ))
        }
    }
}
