use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use tractor_symm::canon_symm::{
    c_matrix, classify, gjms_factorization, leading_checks, reduction_chain, sample_symmetry, verify_symmetry,
    CanonicalSymmetry, SymmetryReport,
};
use tractor_symm::ckt_solve::{extract, solve, weyl_dim, CartanSpace, CktLabel};
use tractor_symm::exact_tensor::{Scalar, SymTensor};
use tractor_symm::symm_algebra::{
    brute_dim_oracle, decompose, graded_dim, graded_table, ideal_relation_check, lemma_extra_check, verify_dec2can,
    AdjointSpace,
};
use tractor_symm::tractor_calc::{TractorField, TractorFrame};

use crate::args::{AlgebraAction, CktAction, CmatrixAction, Command, Pair, Pick, SymmetryAction};
use crate::config::{check_index, RunConfig};
use crate::outcome::{verdict, Failure, Outcome};

type Run = Result<Outcome, Failure>;

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ckt { action: CktAction::Dim } => "ckt dim",
        Command::Ckt { action: CktAction::Basis } => "ckt basis",
        Command::Split(_) => "split",
        Command::Symmetry { action: SymmetryAction::Build(_) } => "symmetry build",
        Command::Symmetry { action: SymmetryAction::Verify(_) } => "symmetry verify",
        Command::Symmetry { action: SymmetryAction::Sweep { .. } } => "symmetry sweep",
        Command::Compose(_) => "compose",
        Command::Decompose(_) => "decompose",
        Command::Cmatrix { action: CmatrixAction::Det { .. } } => "cmatrix det",
        Command::Cmatrix { action: CmatrixAction::Chain { .. } } => "cmatrix chain",
        Command::Classify { .. } => "classify",
        Command::Algebra { action: AlgebraAction::Dec2can { .. } } => "algebra dec2can",
        Command::Algebra { action: AlgebraAction::Ideal(_) } => "algebra ideal",
        Command::Algebra { action: AlgebraAction::Extra { .. } } => "algebra extra",
        Command::Algebra { action: AlgebraAction::Graded { .. } } => "algebra graded",
        Command::Report => "report",
    }
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig, all_basis: bool) -> Run {
    match cmd {
        Command::Ckt { action: CktAction::Dim } => ckt_dim(cfg),
        Command::Ckt { action: CktAction::Basis } => ckt_basis(cfg),
        Command::Split(pick) => split(cfg, *pick, all_basis),
        Command::Symmetry { action: SymmetryAction::Build(pick) } => symmetry_build(cfg, *pick),
        Command::Symmetry { action: SymmetryAction::Verify(pick) } => symmetry_verify(cfg, *pick, all_basis),
        Command::Symmetry { action: SymmetryAction::Sweep { order } } => symmetry_sweep(cfg, *order),
        Command::Compose(pair) => compose(cfg, *pair),
        Command::Decompose(pair) => decompose_pair(cfg, *pair),
        Command::Cmatrix { action: CmatrixAction::Det { d } } => cmatrix_det(cfg, *d),
        Command::Cmatrix { action: CmatrixAction::Chain { d } } => cmatrix_chain(cfg, *d),
        Command::Classify { count } => classify_samples(cfg, *count),
        Command::Algebra { action: AlgebraAction::Dec2can { pair, w } } => dec2can(cfg, *pair, w.clone(), all_basis),
        Command::Algebra { action: AlgebraAction::Ideal(pair) } => ideal(cfg, *pair, all_basis),
        Command::Algebra { action: AlgebraAction::Extra { limit } } => extra(cfg, *limit),
        Command::Algebra { action: AlgebraAction::Graded { t, oracle } } => graded(cfg, *t, *oracle),
        Command::Report => report(cfg),
    }
}

fn tensor_text(t: &SymTensor) -> String {
    let parts: Vec<String> = t.components().map(|(m, v)| format!("[{m}] {v}")).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("; ")
    }
}

fn tractor_json(t: &TractorField) -> Value {
    t.pattern_dump().lines().map(|l| Value::String(l.to_string())).collect()
}

fn space(cfg: &RunConfig, label: CktLabel) -> CartanSpace {
    CartanSpace::new(TractorFrame::new(cfg.metric), label)
}

fn indices(pick: Pick, dim: usize, all_basis: bool) -> Result<Vec<usize>, Failure> {
    if all_basis {
        return Ok((0..dim).collect());
    }
    check_index("--index", pick.index, dim)?;
    Ok(vec![pick.index])
}

fn pairs(pair: Pair, dim: usize, all_basis: bool) -> Result<Vec<(usize, usize)>, Failure> {
    if all_basis {
        return Ok((0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).collect());
    }
    check_index("--index", pair.index, dim)?;
    check_index("--other", pair.other, dim)?;
    Ok(vec![(pair.index, pair.other)])
}

fn ckt_dim(cfg: &RunConfig) -> Run {
    let label = cfg.label();
    let dim = solve(label, &cfg.metric)?.dimension();
    let expected = weyl_dim(cfg.n, label);
    let result = json!({ "label": {"p": label.p, "r": label.r}, "dimension": dim, "weyl_dim": expected });
    Ok(Outcome::new(format!("{dim}\n"), result, dim as u64 == expected))
}

fn ckt_basis(cfg: &RunConfig) -> Run {
    let basis = solve(cfg.label(), &cfg.metric)?;
    let mut text = format!("label {} dimension {}\n", basis.label, basis.dimension());
    for (i, s) in basis.solutions.iter().enumerate() {
        text += &format!("#{i}: {}\n", tensor_text(s));
    }
    Ok(Outcome::new(text, basis.to_json(), true))
}

fn split(cfg: &RunConfig, pick: Pick, all_basis: bool) -> Run {
    let label = cfg.label();
    let sp = space(cfg, label);
    let chosen = indices(pick, sp.dimension(), all_basis)?;
    let rows: Vec<(usize, TractorField, bool)> = chosen
        .par_iter()
        .map(|&i| {
            let phi = &sp.solutions()[i];
            let tractor = sp.split(phi)?;
            let back = extract(&tractor, label)?;
            Ok((i, tractor, back == *phi))
        })
        .collect::<Result<_, tractor_symm::ckt_solve::CktError>>()?;
    let mut text = String::new();
    for (i, t, ok) in &rows {
        text += &format!("#{i} round trip {}\n{}", verdict(*ok), t.pattern_dump());
    }
    let result: Vec<Value> =
        rows.iter().map(|(i, t, ok)| json!({ "index": i, "tractor": tractor_json(t), "round_trip": ok })).collect();
    let passed = rows.iter().all(|r| r.2);
    Ok(Outcome::new(text, json!(result), passed))
}

fn symmetry_build(cfg: &RunConfig, pick: Pick) -> Run {
    let label = cfg.symmetry_label()?;
    let sp = space(cfg, label);
    check_index("--index", pick.index, sp.dimension())?;
    let phi = &sp.solutions()[pick.index];
    let w = cfg.critical_weight();
    let s = CanonicalSymmetry::build(sp.parallel(pick.index), label, w.clone())?;
    let w_out = &w - &Scalar::int(2 * cfg.k as i64);
    let op = s.to_stdop()?;
    let op_out = s.at_weight(w_out).to_stdop()?;
    let leading = leading_checks(&[&op, &op_out], phi, label);
    let text = format!(
        "symmetry of label {label} from solution #{} on weight {w}\n{}leading term checks: {}\n",
        pick.index,
        op.type_table(),
        verdict(leading.all())
    );
    let result = json!({ "index": pick.index, "operator": op.to_json(), "leading": leading });
    Ok(Outcome::new(text, result, leading.all()))
}

fn report_json(index: usize, rep: &SymmetryReport) -> Value {
    let mut v = rep.to_json();
    // Timings would break byte-identical output.
    v.as_object_mut().expect("object").remove("elapsed");
    v["index"] = json!(index);
    v
}

fn report_line(index: usize, rep: &SymmetryReport) -> String {
    let mut line = format!(
        "#{index} {} {} order {} on {} monomials\n",
        rep.label,
        verdict(rep.verdict.passed()),
        rep.operator_order,
        rep.dim_checked
    );
    if !rep.verdict.passed() {
        line += &format!("residual:\n{}\n", rep.residual);
    }
    line
}

fn verify_all(cfg: &RunConfig, sp: &CartanSpace, chosen: &[usize]) -> Result<Vec<SymmetryReport>, Failure> {
    let reports = chosen
        .par_iter()
        .map(|&i| verify_symmetry(&sp.solutions()[i], sp.label(), cfg.k, &cfg.metric))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(reports)
}

fn symmetry_verify(cfg: &RunConfig, pick: Pick, all_basis: bool) -> Run {
    let label = cfg.symmetry_label()?;
    let sp = space(cfg, label);
    let chosen = indices(pick, sp.dimension(), all_basis)?;
    let reports = verify_all(cfg, &sp, &chosen)?;
    let passed = reports.iter().all(|r| r.verdict.passed());
    let mut text: String = chosen.iter().zip(&reports).map(|(&i, r)| report_line(i, r)).collect();
    text += &format!("{}: {} of {} basis solutions\n", verdict(passed), reports.iter().filter(|r| r.verdict.passed()).count(), reports.len());
    let result: Vec<Value> = chosen.iter().zip(&reports).map(|(&i, r)| report_json(i, r)).collect();
    Ok(Outcome::new(text, json!(result), passed))
}

fn symmetry_sweep(cfg: &RunConfig, order: usize) -> Run {
    let labels: Vec<CktLabel> = CktLabel::up_to(order).into_iter().filter(|l| l.r < cfg.k).collect();
    let mut text = String::from("label\tdim\tpassed\n");
    let mut rows = Vec::new();
    let mut passed = true;
    for label in labels {
        let sp = space(cfg, label);
        let chosen: Vec<usize> = (0..sp.dimension()).collect();
        let reports = verify_all(cfg, &sp, &chosen)?;
        let ok = reports.iter().filter(|r| r.verdict.passed()).count();
        passed &= ok == reports.len();
        text += &format!("{label}\t{}\t{ok}\n", reports.len());
        for (i, r) in reports.iter().enumerate().filter(|(_, r)| !r.verdict.passed()) {
            text += &report_line(i, r);
        }
        let failures: Vec<Value> =
            reports.iter().enumerate().filter(|(_, r)| !r.verdict.passed()).map(|(i, r)| report_json(i, r)).collect();
        rows.push(json!({ "label": {"p": label.p, "r": label.r}, "dimension": reports.len(), "passed": ok, "failures": failures }));
    }
    Ok(Outcome::new(text, json!(rows), passed))
}

fn compose(cfg: &RunConfig, pair: Pair) -> Run {
    let label = cfg.symmetry_label()?;
    let sp = space(cfg, label);
    let (i, j) = pairs(pair, sp.dimension(), false)?[0];
    let w = cfg.critical_weight();
    let s1 = CanonicalSymmetry::build(sp.parallel(i), label, w.clone())?.to_stdop()?;
    let s2 = CanonicalSymmetry::build(sp.parallel(j), label, w.clone())?.to_stdop()?;
    let product = s1.compose(&s2).map_err(|e| Failure::Verification(e.to_string()))?;
    let c = classify(&product, cfg.k)?;
    let passed = c.remainder.is_zero();
    let mut text = format!("S#{i} S#{j} of label {label} on weight {w}\n{}", product.type_table());
    for (l, phi) in &c.components {
        text += &format!("canonical part {l}: {}\n", tensor_text(phi));
    }
    text += &format!("trivial part:\n{}", if c.trivial.is_zero() { "0\n".into() } else { c.trivial.type_table() });
    if !passed {
        text += &format!("remainder:\n{}\n", c.remainder);
    }
    text += &format!("{}\n", verdict(passed));
    let result = json!({
        "pair": [i, j],
        "operator": product.to_json(),
        "components": c.components.iter().map(|(l, phi)| json!({"label": {"p": l.p, "r": l.r}, "solution": phi})).collect::<Vec<_>>(),
        "trivial": c.trivial.to_json(),
        "remainder": c.remainder.to_json(),
    });
    Ok(Outcome::new(text, result, passed))
}

fn decompose_pair(cfg: &RunConfig, pair: Pair) -> Run {
    let sp = AdjointSpace::new(cfg.metric);
    let (i, j) = pairs(pair, sp.dimension(), false)?[0];
    let basis = sp.basis();
    let d = decompose(&basis[i], &basis[j]);
    let boxtimes = extract(&d.boxtimes, CktLabel::new(2, 0))?;
    let bullet = extract(&d.bullet, CktLabel::new(0, 1))?;
    let bracket = d.bracket.field();
    let ok = d.reconstructs();
    let text = format!(
        "killing: {}\nbracket: {}\nbullet: {}\nboxtimes: {}\nreconstructs: {}\n",
        d.killing,
        tensor_text(&bracket),
        tensor_text(&bullet),
        tensor_text(&boxtimes),
        verdict(ok)
    );
    let result = json!({
        "pair": [i, j],
        "killing": d.killing,
        "bracket": bracket,
        "bullet": bullet,
        "boxtimes": boxtimes,
        "reconstructs": ok,
    });
    Ok(Outcome::new(text, result, ok))
}

fn cmatrix_det(cfg: &RunConfig, d: usize) -> Run {
    let c = c_matrix(cfg.k, d)?;
    let det = c.det();
    let ok = !det.is_zero();
    Ok(Outcome::new(format!("{det}\n"), json!({ "k": cfg.k, "d": d, "det": det, "toeplitz": c.is_toeplitz() }), ok))
}

fn cmatrix_chain(cfg: &RunConfig, d: usize) -> Run {
    let ch = reduction_chain(cfg.k, d)?;
    let flags = json!({
        "det_ratio_is_power_of_two": ch.det_ratio_is_power_of_two,
        "d1_closed_form": ch.d1_closed_form,
        "d2_closed_form": ch.d2_closed_form,
        "d3_closed_form": ch.d3_closed_form,
        "d4_unit_upper": ch.d4_unit_upper,
    });
    let stages = [("tilde", &ch.tilde), ("d1", &ch.d1), ("d2", &ch.d2), ("d3", &ch.d3), ("d4", &ch.d4)];
    let mut text = String::new();
    for (name, m) in stages {
        text += &format!("{name}:\n{m}\n");
    }
    for (k, v) in flags.as_object().expect("object") {
        text += &format!("{k}: {v}\n");
    }
    let matrices: serde_json::Map<String, Value> =
        stages.iter().map(|(name, m)| (name.to_string(), Value::String(m.to_string()))).collect();
    let result = json!({ "k": ch.k, "d": ch.d, "checks": flags, "matrices": matrices });
    Ok(Outcome::new(text, result, ch.holds()))
}

fn classify_samples(cfg: &RunConfig, count: usize) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut passed = true;
    for s in 0..count {
        let sample = sample_symmetry(cfg.k, &cfg.metric, &mut rng)?;
        let c = classify(&sample.operator, cfg.k)?;
        let ok = c.remainder.is_zero() && c.trivial == sample.trivial && c.components == sample.generators;
        passed &= ok;
        text += &format!("sample {s}: {} canonical parts, round trip {}\n", c.components.len(), verdict(ok));
        for (l, phi) in &c.components {
            text += &format!("  {l}: {}\n", tensor_text(phi));
        }
        rows.push(json!({
            "sample": s,
            "round_trip": ok,
            "components": c.components.iter().map(|(l, phi)| json!({"label": {"p": l.p, "r": l.r}, "solution": phi})).collect::<Vec<_>>(),
            "remainder": c.remainder.to_json(),
        }));
    }
    Ok(Outcome::new(text, json!(rows), passed))
}

fn summarize<T: serde::Serialize>(rows: &[((usize, usize), T)], ok: impl Fn(&T) -> bool) -> (String, Value, bool) {
    let good = rows.iter().filter(|(_, r)| ok(r)).count();
    let passed = good == rows.len();
    let mut text = String::new();
    for ((i, j), r) in rows.iter().filter(|(_, r)| !ok(r)) {
        text += &format!("({i},{j}) fail: {}\n", serde_json::to_string(r).expect("serializable"));
    }
    text += &format!("{}: {good} of {} pairs\n", verdict(passed), rows.len());
    let result: Vec<Value> = rows.iter().map(|((i, j), r)| json!({ "pair": [i, j], "report": r })).collect();
    (text, json!(result), passed)
}

fn dec2can(cfg: &RunConfig, pair: Pair, w: Option<Scalar>, all_basis: bool) -> Run {
    let sp = AdjointSpace::new(cfg.metric);
    let w = w.unwrap_or_else(|| cfg.critical_weight());
    let chosen = pairs(pair, sp.dimension(), all_basis)?;
    let f = sp.fields();
    let rows = chosen
        .par_iter()
        .map(|&(i, j)| verify_dec2can(&sp, &f[i], &f[j], &w).map(|r| ((i, j), r)))
        .collect::<Result<Vec<_>, _>>()?;
    let (text, result, passed) = summarize(&rows, |r| r.verdict.passed());
    Ok(Outcome::new(format!("weight {w}\n{text}"), result, passed))
}

fn ideal(cfg: &RunConfig, pair: Pair, all_basis: bool) -> Run {
    let sp = AdjointSpace::new(cfg.metric);
    let chosen = pairs(pair, sp.dimension(), all_basis)?;
    let basis = sp.basis();
    let rows = chosen
        .par_iter()
        .map(|&(i, j)| ideal_relation_check(&basis[i], &basis[j], cfg.k).map(|r| ((i, j), r)))
        .collect::<Result<Vec<_>, _>>()?;
    let (text, result, passed) = summarize(&rows, |r| r.verdict.passed());
    let coefficient = rows.first().map(|(_, r)| r.coefficient.to_string()).unwrap_or_default();
    Ok(Outcome::new(format!("coefficient {coefficient}\n{text}"), result, passed))
}

fn extra(cfg: &RunConfig, limit: Option<usize>) -> Run {
    let rep = lemma_extra_check(cfg.k, &cfg.metric, limit)?;
    let passed = rep.verdict.passed();
    let mut text = format!("{}: {} solutions on {} monomials\n", verdict(passed), rep.checked, rep.dim_checked);
    if let Some(f) = &rep.first_failure {
        text += &format!("first failure: {f}\n");
    }
    Ok(Outcome::new(text, json!(rep), passed))
}

fn graded(cfg: &RunConfig, t: usize, oracle: bool) -> Run {
    let table = graded_table(cfg.n, t, cfg.k);
    let mut result = json!({
        "rows": (1..=t).map(|tt| (1..=cfg.k).map(|kk| graded_dim(kk, tt, cfg.n)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    let mut text = table;
    let mut passed = true;
    if oracle {
        let brute = brute_dim_oracle(cfg.k, t, cfg.n)?;
        let formula = graded_dim(cfg.k, t, cfg.n);
        passed = brute == formula;
        text += &format!("oracle at k={}, t={t}: {brute} against {formula}, {}\n", cfg.k, verdict(passed));
        result["oracle"] = json!({ "k": cfg.k, "t": t, "brute": brute, "formula": formula });
    }
    Ok(Outcome::new(text, result, passed))
}

/// One cheap instance of each check family.
fn report(cfg: &RunConfig) -> Run {
    let g = cfg.metric;
    let mut checks: Vec<(String, bool)> = Vec::new();
    for label in [CktLabel::new(0, 0), CktLabel::new(1, 0), CktLabel::new(0, 1)] {
        let dim = solve(label, &g)?.dimension() as u64;
        checks.push((format!("solution space {label} has dimension {dim}"), dim == weyl_dim(cfg.n, label)));
    }
    let killing = space(cfg, CktLabel::new(1, 0));
    let reports = verify_all(cfg, &killing, &(0..killing.dimension()).collect::<Vec<_>>())?;
    checks.push((
        format!("first-order symmetries of the Laplacian power {}", cfg.k),
        reports.iter().all(|r| r.verdict.passed()),
    ));
    for k in 1..=2 {
        let rep = gjms_factorization(k, &g, cfg.max_degree);
        checks.push((format!("factorization of the Laplacian power {k}"), rep.verdict.passed()));
    }
    let regular = (1..=12).all(|k| (0..k).all(|d| c_matrix(k, d).is_ok_and(|c| !c.det().is_zero())));
    checks.push(("binomial matrices are regular up to k = 12".into(), regular));
    let adj = AdjointSpace::new(g);
    let f = adj.fields();
    let last = f.len() - 1;
    let rep = verify_dec2can(&adj, &f[0], &f[last], &cfg.critical_weight())?;
    checks.push((format!("product decomposition of fields 0 and {last}"), rep.verdict.passed()));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sample = sample_symmetry(cfg.k, &g, &mut rng)?;
    let c = classify(&sample.operator, cfg.k)?;
    checks.push(("classification of a seeded sample".into(), c.remainder.is_zero() && c.components == sample.generators));
    let passed = checks.iter().all(|c| c.1);
    let text: String = checks.iter().map(|(name, ok)| format!("{}\t{name}\n", verdict(*ok))).collect();
    let result: Vec<Value> = checks.iter().map(|(name, ok)| json!({ "check": name, "verdict": verdict(*ok) })).collect();
    Ok(Outcome::new(text, json!(result), passed))
}
