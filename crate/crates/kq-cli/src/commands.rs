use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use kq_core::degen::{degeneracy_detecting, dq_certificate, factor_degen, first_degenerate_image};
use kq_core::ex::{
    classify_and_pstructure, ex_horn_filler, ex_tower, sd, sd_semisimplicial_comparison, tower, verify_moss_at, Adjunction,
    ExObject, ExUnitStructure, MossReport, Psi,
};
use kq_core::lifting::{fibration_certificate, problem_record, trivial_fibration_certificate, CertificateOutcome};
use kq_core::pstructure::{corner_pstructure, AnodynePresentation, PStructure, PStructureFile};
use kq_core::sset::{
    generator, hom_set, horn, inclusion_by_name, GeneratorKind, MapFile, SemiSimplicialSet, SetDefect, SetFile, SimplicialMap,
    SimplicialSet,
};

use crate::report::{Failure, Outcome, Status};
use crate::{Cli, Command, FactorCommand, FillHornArgs, Kind, PairArgs, PstructureCommand, SsetCommand, VerifyCommand};

type Result<T> = std::result::Result<T, Failure>;

pub(crate) fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Sset(SsetCommand::Validate { file }) => sset_validate(file),
        Command::Sset(SsetCommand::Generate { kind, n, k, .. }) => sset_generate(*kind, *n, *k),
        Command::Sd { file, trunc, .. } => subdivide(file, *trunc),
        Command::Ex { file, iters, trunc, .. } => iterate_ex(file, *iters, *trunc),
        Command::Verify(v) => match v {
            VerifyCommand::Moss { max_n } => moss(*max_n),
            VerifyCommand::Corner { n, m, k } => corner(*n, *m, *k),
            VerifyCommand::ExUnit(pair) => ex_unit(pair),
            VerifyCommand::Tower { pair, steps } => ex_tower_stages(pair, *steps),
            VerifyCommand::SdSemisimplicial { file } => semisimplicial(file),
            VerifyCommand::Adjunction { a, b, trunc } => adjunction(a, b, *trunc),
            VerifyCommand::Fibration { map, max_dim, trivial } => fibration(map, *max_dim, *trivial),
        },
        Command::FillHorn(args) => fill_horn(args),
        Command::Factor(FactorCommand::Degen { map }) => factor(map),
        Command::Pstructure(PstructureCommand::Compile { map, ps, .. }) => compile(map, ps),
        Command::Pstructure(PstructureCommand::Replay { presentation }) => replay(presentation),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn load_set(path: &Path) -> Result<Arc<SimplicialSet>> {
    let x = SetFile::from_json(&read(path)?)?.to_set()?;
    x.validate().map_err(|d| Failure::Input(format!("{}: {d}", path.display())))?;
    Ok(Arc::new(x))
}

fn load_map(path: &Path) -> Result<SimplicialMap> {
    Ok(MapFile::from_json(&read(path)?)?.to_map(&base_dir(path))?)
}

fn load_map_between(path: &Path, source: &Arc<SimplicialSet>, target: &Arc<SimplicialSet>) -> Result<SimplicialMap> {
    Ok(MapFile::from_json(&read(path)?)?.to_map_between(source.clone(), target.clone())?)
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn counts(x: &SimplicialSet) -> String {
    format!("{:?}", x.nondeg_counts())
}

fn sset_validate(file: &Path) -> Result<Outcome> {
    let x = SetFile::from_json(&read(file)?)?.to_set()?;
    let summary = vec![format!("non-degenerate counts {}", counts(&x))];
    let details = json!({ "counts": x.nondeg_counts(), "dim_bound": x.dim_bound(), "complete": x.is_complete() });
    Ok(match x.validate() {
        Ok(()) => Outcome::new(true, summary, details),
        Err(defect) => {
            let witness = match &defect {
                SetDefect::BadFace { cell, i } => json!({ "cell": cell, "i": i }),
                SetDefect::Identity(v) => json!({ "cell": v.cell, "i": v.i, "j": v.j }),
            };
            let mut o = Outcome::new(false, vec![defect.to_string()], details).witness("defect", witness);
            o.status = Status::Error;
            o
        }
    })
}

fn sset_generate(kind: Kind, n: usize, k: Option<usize>) -> Result<Outcome> {
    let kind = match kind {
        Kind::Simplex => GeneratorKind::Simplex,
        Kind::Boundary => GeneratorKind::Boundary,
        Kind::Horn => GeneratorKind::Horn,
    };
    if kind == GeneratorKind::Horn && k.is_none() {
        return Err(Failure::Input("a horn needs --k".into()));
    }
    let (x, _) = generator(kind, n, k)?;
    Ok(Outcome::new(true, vec![format!("non-degenerate counts {}", counts(&x))], json!({ "counts": x.nondeg_counts() }))
        .artifact(SetFile::from_set(&x).to_json()))
}

fn subdivide(file: &Path, trunc: Option<usize>) -> Result<Outcome> {
    let x = load_set(file)?;
    let s = sd(&x)?;
    let mut last = s.last_vertex();
    if let Some(d) = trunc {
        if d < s.set.dim_bound() {
            let set = Arc::new(s.set.with_dim_bound(d)?);
            last = SimplicialMap::new(set, x.clone(), last.assignment[..=d].to_vec())?;
        }
    }
    let set = last.source.clone();
    Ok(Outcome::new(true, vec![format!("Sd counts {}", counts(&set))], json!({ "source_counts": x.nondeg_counts(), "counts": set.nondeg_counts() }))
        .artifact(SetFile::from_set(&set).to_json())
        .certificate(MapFile::inline(&last).to_json()))
}

fn iterate_ex(file: &Path, iters: usize, trunc: usize) -> Result<Outcome> {
    if iters == 0 {
        return Err(Failure::Input("--iters must be at least 1".into()));
    }
    let x = load_set(file)?;
    let levels = ex_tower(&x, iters, trunc)?;
    let mut unit = levels[0].unit()?;
    for level in &levels[1..] {
        unit = level.unit()?.after(&unit)?;
    }
    let top = &levels[iters - 1].set;
    let summary = levels.iter().enumerate().map(|(i, l)| format!("Ex^{} counts {}", i + 1, counts(&l.set))).collect();
    let details = json!({ "trunc": trunc, "levels": levels.iter().map(|l| l.set.nondeg_counts()).collect::<Vec<_>>() });
    Ok(Outcome::new(true, summary, details).artifact(SetFile::from_set(top).to_json()).certificate(MapFile::inline(&unit).to_json()))
}

fn moss(max_n: usize) -> Result<Outcome> {
    let parts: Vec<MossReport> = (0..=max_n).into_par_iter().map(verify_moss_at).collect();
    let report = MossReport::merge(parts);
    let mut summary = Vec::new();
    let mut o = Outcome::new(report.passed(), Vec::new(), Value::Null);
    for eq in &report.equations {
        summary.push(format!("({}) {}: {} instances, {} evaluations, {} mismatches", eq.equation, eq.formula, eq.instances, eq.evaluations, eq.mismatches.len()));
        for m in eq.mismatches.iter().take(5) {
            o = o.witness("mismatch", json!({ "equation": eq.equation, "case": m }));
        }
    }
    o.summary = summary;
    o.details = json!({ "max_n": max_n, "equations": report.equations.iter().map(|e| json!({
        "equation": e.equation, "instances": e.instances, "evaluations": e.evaluations, "mismatches": e.mismatches.len()
    })).collect::<Vec<_>>() });
    Ok(o.certificate(serde_json::to_string_pretty(&report).expect("reports serialize")))
}

/// Compiles a validated structure and replays the presentation.
fn compile_and_replay(ps: &PStructure) -> Result<(AnodynePresentation, std::result::Result<(), kq_core::pstructure::ReplayFailure>)> {
    let pres = ps.compile()?;
    let replay = pres.try_replay()?.map(|_| ());
    Ok((pres, replay))
}

fn corner(n: Option<usize>, m: Option<usize>, k: Option<usize>) -> Result<Outcome> {
    let tuples: Vec<(usize, usize, usize)> = match (n, m, k) {
        (Some(n), Some(m), Some(k)) => vec![(n, m, k)],
        (None, None, None) => (0..=2).flat_map(|n| (1..=3).flat_map(move |m| (0..=m).map(move |k| (n, m, k)))).collect(),
        _ => return Err(Failure::Input("give all of --n, --m, --k or none".into())),
    };
    let results: Vec<Result<(Value, Option<Value>, AnodynePresentation)>> = tuples
        .par_iter()
        .map(|&(n, m, k)| {
            let c = corner_pstructure(n, k, m)?;
            let v = c.structure.validate()?;
            if !v.passed {
                let pres = AnodynePresentation { cofibration: MapFile::inline(&c.structure.cofibration), stages: Vec::new() };
                return Ok((json!({ "n": n, "m": m, "k": k, "validated": false }), Some(to_value(&v.violation)), pres));
            }
            let (pres, replay) = compile_and_replay(&c.structure)?;
            let row = json!({
                "n": n, "m": m, "k": k, "validated": true,
                "type_one": v.type_one, "type_two": v.type_two, "height": v.max_height,
                "attachments": pres.attachment_count(), "replayed": replay.is_ok()
            });
            Ok((row, replay.err().map(to_value), pres))
        })
        .collect();
    let mut rows = Vec::new();
    let mut presentations = Vec::new();
    let mut o = Outcome::new(true, Vec::new(), Value::Null);
    for (i, r) in results.into_iter().enumerate() {
        let (row, failure, pres) = r?;
        let (n, m, k) = tuples[i];
        if let Some(f) = failure {
            o.status = Status::Counterexample;
            o = o.witness("corner", json!({ "n": n, "m": m, "k": k, "failure": f }));
        }
        o.summary.push(format!(
            "n={n} m={m} k={k}: {} pairs, {} attachments, replay {}",
            row["type_two"], row["attachments"], if row["replayed"] == true { "ok" } else { "FAILED" }
        ));
        rows.push(row);
        presentations.push(pres);
    }
    o.details = json!({ "tuples": rows });
    let cert = if presentations.len() == 1 {
        presentations[0].to_json()
    } else {
        serde_json::to_string_pretty(&presentations).expect("presentations serialize")
    };
    Ok(o.certificate(cert))
}

fn resolve_pair(pair: &PairArgs) -> Result<SimplicialMap> {
    let x = load_set(&pair.x)?;
    let y = load_set(&pair.y)?;
    if let Some(path) = &pair.map {
        return load_map_between(path, &x, &y);
    }
    let mut maps = hom_set(&x, &y)?;
    if maps.len() == 1 {
        return Ok(maps.pop().expect("one map"));
    }
    inclusion_by_name(&x, &y).map_err(|_| Failure::Input(format!("{} maps X → Y and no inclusion by names; pass --map", maps.len())))
}

/// Summary, details and witnesses for one unit structure, plus its presentation.
fn unit_structure_outcome(s: &ExUnitStructure, label: &str, o: &mut Outcome) -> Result<Option<AnodynePresentation>> {
    let classes: Vec<Value> = s.counts.iter().map(to_value).collect();
    o.summary.push(format!(
        "{label}: Ex_Y X counts {}, ceiling {}, {} pairs, validation {}",
        counts(&s.rel.set),
        s.ceiling,
        s.structure.pairing.len(),
        if s.validation.passed { "ok" } else { "FAILED" }
    ));
    let mut ok = s.validation.passed;
    if let Some(v) = &s.validation.violation {
        *o = o.clone().witness("violation", v);
    }
    for p in &s.properties.points {
        if !p.failures.is_empty() {
            ok = false;
            *o = o.clone().witness("property", json!({ "point": p.point, "statement": p.statement, "failures": p.failures.iter().take(5).collect::<Vec<_>>() }));
        }
    }
    let points: Vec<Value> = s.properties.points.iter().map(|p| json!({ "point": p.point, "instances": p.instances, "failures": p.failures.len() })).collect();
    let mut presentation = None;
    let mut replayed = false;
    if s.validation.passed {
        let (pres, replay) = compile_and_replay(&s.structure)?;
        replayed = replay.is_ok();
        if let Err(f) = replay {
            ok = false;
            *o = o.clone().witness("replay", f);
        }
        presentation = Some(pres);
    }
    o.summary.push(format!(
        "{label}: {} property points checked on {} instances, replay {}",
        points.len(),
        s.properties.points.iter().map(|p| p.instances).sum::<usize>(),
        if replayed { "ok" } else { "FAILED" }
    ));
    if !ok {
        o.status = Status::Counterexample;
    }
    let entry = json!({
        "label": label, "counts": s.rel.set.nondeg_counts(), "bounded_counts": s.bounded.nondeg_counts(),
        "ceiling": s.ceiling, "classes": classes, "validation": to_value(&s.validation), "points": points, "replayed": replayed
    });
    if let Value::Array(a) = &mut o.details {
        a.push(entry);
    } else {
        o.details = Value::Array(vec![entry]);
    }
    Ok(presentation)
}

fn ex_unit(pair: &PairArgs) -> Result<Outcome> {
    let f = resolve_pair(pair)?;
    let s = classify_and_pstructure(&f, pair.trunc)?;
    let mut o = Outcome::new(true, Vec::new(), Value::Array(Vec::new()));
    let pres = unit_structure_outcome(&s, "unit", &mut o)?;
    if let Some(p) = pres {
        o = o.certificate(p.to_json());
    }
    Ok(o)
}

fn ex_tower_stages(pair: &PairArgs, steps: usize) -> Result<Outcome> {
    let f = resolve_pair(pair)?;
    let t = tower(&f, steps, pair.trunc, true)?;
    let mut o = Outcome::new(true, Vec::new(), Value::Array(Vec::new()));
    let mut presentations = Vec::new();
    let mut identifications = Vec::new();
    for st in &t.stages {
        if let Some(p) = unit_structure_outcome(&st.structure, &format!("stage {}", st.stage), &mut o)? {
            presentations.push(p);
        }
        if let Some(id) = &st.identification {
            o.summary.push(format!(
                "stage {}: iterated {:?}, direct {:?}, isomorphic {}",
                id.stage, id.iterated_counts, id.direct_counts, id.isomorphic
            ));
            if !id.isomorphic {
                o.status = Status::Counterexample;
                o = o.witness("stage", id);
            }
            identifications.push(to_value(id));
        }
    }
    o.details = json!({ "stages": o.details, "identifications": identifications });
    Ok(o.certificate(serde_json::to_string_pretty(&presentations).expect("presentations serialize")))
}

fn semisimplicial(file: &Path) -> Result<Outcome> {
    let x = load_set(file)?;
    let semi = SemiSimplicialSet::from_nondegenerate(&x)?;
    let (report, map) = sd_semisimplicial_comparison(&semi)?;
    let mut o = Outcome::new(
        report.isomorphic,
        vec![format!("N(Δ₊/X) counts {:?}, Sd counts {:?}, isomorphic {}", report.nerve_counts, report.sd_counts, report.isomorphic)],
        to_value(&report),
    );
    if let Some(f) = &report.failure {
        o = o.witness("comparison", f);
    }
    if let Some(m) = map {
        o = o.certificate(MapFile::inline(&m).to_json());
    }
    Ok(o)
}

fn adjunction(a: &Path, b: &Path, trunc: usize) -> Result<Outcome> {
    let a = load_set(a)?;
    let b = load_set(b)?;
    let adj = Adjunction::new(&a, &b, trunc)?;
    let r = adj.report()?;
    let mut o = Outcome::new(
        r.passed(),
        vec![format!("|Hom(Sd A, B)| = {}, |Hom(A, Ex B)| = {}, mutually inverse {}", r.hom_sd, r.hom_ex, r.inverse)],
        to_value(&r),
    );
    if !r.passed() {
        o = o.witness("adjunction", &r);
    }
    Ok(o)
}

fn fibration(map: &Path, max_dim: usize, trivial: bool) -> Result<Outcome> {
    let p = load_map(map)?;
    let outcome = if trivial { trivial_fibration_certificate(&p, max_dim)? } else { fibration_certificate(&p, max_dim)? };
    let kind = if trivial { "trivial fibration" } else { "fibration" };
    Ok(match outcome {
        CertificateOutcome::Certified(c) => {
            let record = c.to_record(&p);
            Outcome::new(true, vec![format!("{kind} up to dimension {max_dim}: {} problems solved", c.entries.len())], json!({ "problems": c.entries.len() }))
                .certificate(serde_json::to_string_pretty(&record).expect("certificates serialize"))
        }
        CertificateOutcome::Failed(cx) => {
            let dims: Vec<usize> = cx.first_per_dim.iter().map(|g| g.n).collect();
            let mut o = Outcome::new(
                false,
                vec![format!("{kind} fails; minimal problem in dimension {}, failing dimensions {dims:?}", cx.minimal.n)],
                json!({ "minimal_dim": cx.minimal.n, "failing_dims": dims }),
            )
            .witness("minimal", problem_record(&p, &cx.minimal, None));
            for g in &cx.first_per_dim {
                o = o.witness("first_in_dim", problem_record(&p, g, None));
            }
            o
        }
    })
}

fn fill_horn(args: &FillHornArgs) -> Result<Outcome> {
    if args.level == 0 {
        return Err(Failure::Input("--level must be at least 1".into()));
    }
    let trunc = args.trunc.unwrap_or(args.n.max(1));
    let x = load_set(&args.x)?;
    let levels = ex_tower(&x, args.level, trunc)?;
    let ex: &ExObject = &levels[args.level - 1];
    let source = Arc::new(horn(args.n, args.k)?);
    let horns = match &args.map {
        Some(path) => vec![load_map_between(path, &source, &ex.set)?],
        None => hom_set(&source, &ex.set)?.into_iter().take(args.limit).collect(),
    };
    let psi = Psi::get(args.n, args.k)?;
    let mut o = Outcome::new(true, Vec::new(), Value::Null);
    let mut fillers = Vec::new();
    let mut degenerate = 0;
    for h in &horns {
        let f = ex_horn_filler(ex, h, args.n, args.k)?;
        if !f.report.passed() {
            o.status = Status::Counterexample;
            o = o.witness("horn", json!({ "horn": MapFile::inline(h).assignment, "mismatches": f.report.mismatches }));
        }
        degenerate += usize::from(f.report.filler_degenerate);
        let assignment: BTreeMap<String, String> = h.source.nondeg_cells().map(|(d, i)| (h.source.name(d, i).to_string(), ex.set.describe(&h.at(d, i)))).collect();
        fillers.push(json!({
            "horn": assignment,
            "filler": f.datum.iter().map(|c| ex.set.describe(c)).collect::<Vec<_>>(),
            "restriction_matches_unit": f.report.passed(),
        }));
    }
    o.summary.push(format!(
        "Λ^{}[{}] in Ex^{} X: {} horns filled, {} restrict to the unit image, {} degenerate fillers",
        args.k,
        args.n,
        args.level,
        horns.len(),
        fillers.iter().filter(|f| f["restriction_matches_unit"] == true).count(),
        degenerate
    ));
    o.summary.push(format!("extension map: {} ({} search nodes)", to_value(psi.origin).as_str().unwrap_or("?"), psi.nodes));
    o.details = json!({
        "n": args.n, "k": args.k, "level": args.level, "trunc": trunc, "horns": horns.len(),
        "psi": { "origin": to_value(psi.origin) }
    });
    Ok(o.certificate(serde_json::to_string_pretty(&json!({ "n": args.n, "k": args.k, "fillers": fillers })).expect("json")))
}

fn factor(map: &Path) -> Result<Outcome> {
    let f = load_map(map)?;
    let fac = factor_degen(&f)?;
    let cert = dq_certificate(&fac.quotient)?;
    let detecting = degeneracy_detecting(&fac.detecting);
    let mut o = Outcome::new(
        cert.holds && detecting,
        vec![
            format!("middle object counts {}", counts(&fac.quotient.target)),
            format!("quotient certified {}, right factor degeneracy-detecting {detecting}", cert.holds),
        ],
        json!({ "middle_counts": fac.quotient.target.nondeg_counts(), "quotient": to_value(&cert), "detecting": detecting }),
    );
    if let Some(fail) = &cert.failure {
        o = o.witness("quotient", fail);
    }
    if let Some((d, i)) = first_degenerate_image(&fac.detecting) {
        o = o.witness("degenerate_image", fac.detecting.source.name(d, i));
    }
    let cert = json!({ "quotient": MapFile::inline(&fac.quotient), "detecting": MapFile::inline(&fac.detecting) });
    Ok(o.certificate(serde_json::to_string_pretty(&cert).expect("json")))
}

fn compile(map: &Path, ps: &Path) -> Result<Outcome> {
    let f = load_map(map)?;
    let structure = PStructureFile::from_json(&read(ps)?)?.to_structure(f)?;
    let v = structure.validate()?;
    if !v.passed {
        let line = match &v.violation {
            Some(x) => format!("validation fails: {} at {} ({})", to_value(x.condition).as_str().unwrap_or("?"), x.witness, x.detail),
            None => "validation fails".to_string(),
        };
        let mut o = Outcome::new(false, vec![line], to_value(&v));
        if let Some(x) = &v.violation {
            o = o.witness("violation", x);
        }
        return Ok(o);
    }
    let (pres, replay) = compile_and_replay(&structure)?;
    let mut o = Outcome::new(
        replay.is_ok(),
        vec![format!("{} pairs in {} stages, replay {}", pres.attachment_count(), pres.stages.len(), if replay.is_ok() { "ok" } else { "FAILED" })],
        json!({ "validation": to_value(&v), "stages": pres.stages.len(), "attachments": pres.attachment_count() }),
    );
    if let Err(f) = replay {
        o = o.witness("replay", f);
    }
    let text = pres.to_json();
    Ok(o.certificate(text.clone()).artifact(text))
}

fn replay(path: &Path) -> Result<Outcome> {
    let pres = AnodynePresentation::from_json(&read(path)?)?;
    Ok(match pres.try_replay()? {
        Ok(r) => Outcome::new(
            true,
            vec![format!("{} attachments rebuild the target {} up to isomorphism", pres.attachment_count(), counts(&r.comparison.target))],
            json!({ "attachments": pres.attachment_count(), "stages": r.stages.iter().map(|s| s.nondeg_counts()).collect::<Vec<_>>() }),
        ),
        Err(f) => Outcome::new(false, vec![format!("replay fails at stage {}: {} ({})", f.stage, f.witness, f.detail)], to_value(&f))
            .witness("missing", &f.witness),
    })
}
