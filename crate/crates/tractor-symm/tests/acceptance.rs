//! End-to-end acceptance checks, one PASS/FAIL line each. Exits nonzero if
//! any check fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tractor_symm::canon_symm::{
    c_matrix, classify, extract_constraint_matrix, gjms_factorization, reduction_chain, sample_symmetry,
    verify_symmetry, CanonicalSymmetry, Family,
};
use tractor_symm::ckt_solve::{extract, lie_derivative, solve, weyl_dim, CartanSpace, CktLabel, LieSection};
use tractor_symm::exact_tensor::{ExactMatrix, Metric, Monomial, Poly, Scalar, SymTensor};
use tractor_symm::symm_algebra::{decompose, ideal_relation_check, lemma_extra_check, verify_dec2can, AdjointSpace};
use tractor_symm::tractor_calc::{SlotKind, TractorField, TractorFrame};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn euclid(n: usize) -> Metric {
    Metric::euclidean(n)
}

fn monomials(n: usize, degree: u32) -> Vec<Poly> {
    Monomial::all_up_to_degree(n, degree).into_iter().map(|m| Poly::term(n, m, Scalar::one())).collect()
}

fn weights() -> Vec<Scalar> {
    vec![Scalar::zero(), Scalar::one(), Scalar::ratio(-1, 2), Scalar::int(2), Scalar::ratio(-3, 2)]
}

fn dimension_table() -> Check {
    let labels = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)].map(|(p, r)| CktLabel::new(p, r));
    for n in [3, 4] {
        for label in labels {
            let dim = solve(label, &euclid(n)).map_err(|e| e.to_string())?.dimension() as u64;
            ensure(dim == weyl_dim(n, label), || format!("n={n} {label}: solver {dim}, Weyl {}", weyl_dim(n, label)))?;
        }
    }
    let at3: Vec<u64> = labels.iter().map(|&l| weyl_dim(3, l)).collect();
    ensure(at3 == [1, 10, 35, 14, 81], || format!("n=3 dimensions {at3:?}"))?;
    Ok("10 label/dimension pairs; n=3 gives 1, 10, 35, 14, 81".into())
}

fn canonical_identity() -> Check {
    let g = euclid(3);
    let mut count = 0;
    for k in 1..=3 {
        let mut labels = vec![CktLabel::new(1, 0)];
        if k >= 2 {
            labels.push(CktLabel::new(0, 1));
        }
        for label in labels {
            let basis = solve(label, &g).map_err(|e| e.to_string())?;
            let reports: Vec<_> = basis
                .solutions
                .par_iter()
                .map(|phi| verify_symmetry(phi, label, k, &g))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            for (i, r) in reports.iter().enumerate() {
                ensure(r.verdict.passed() && r.residual.is_zero(), || format!("k={k} {label} #{i}: {}", r.residual))?;
            }
            count += reports.len();
        }
    }
    Ok(format!("{count} symmetries with zero residual"))
}

fn gjms() -> Check {
    for n in [3, 4] {
        for k in [1, 2] {
            let rep = gjms_factorization(k, &euclid(n), 4);
            ensure(rep.verdict.passed(), || format!("n={n} k={k}: {:?}", rep.first_failure))?;
        }
    }
    Ok("k in {1,2}, n in {3,4}, degree <= 4".into())
}

fn product_decomposition() -> Check {
    let sp = AdjointSpace::new(euclid(3));
    let f = sp.fields();
    let pairs: Vec<(usize, usize)> = (0..f.len()).flat_map(|i| (0..f.len()).map(move |j| (i, j))).collect();
    for w in [Scalar::ratio(-1, 2), Scalar::int(2), Scalar::zero()] {
        let failures: Vec<String> = pairs
            .par_iter()
            .filter_map(|&(i, j)| match verify_dec2can(&sp, &f[i], &f[j], &w) {
                Ok(r) if r.verdict.passed() => None,
                Ok(r) => Some(format!("({i},{j}) w={w}: {r:?}")),
                Err(e) => Some(format!("({i},{j}) w={w}: {e}")),
            })
            .collect();
        ensure(failures.is_empty(), || failures.join("; "))?;
    }
    // Each summand is itself a symmetry at its own label.
    let g = *sp.metric();
    let basis = sp.basis();
    let summand_failures: Vec<String> = pairs
        .par_iter()
        .filter(|(i, j)| i <= j)
        .flat_map_iter(|&(i, j)| {
            let d = decompose(&basis[i], &basis[j]);
            let sections = vec![
                (CktLabel::new(2, 0), extract(&d.boxtimes, CktLabel::new(2, 0)).expect("two form slots")),
                (CktLabel::new(0, 1), extract(&d.bullet, CktLabel::new(0, 1)).expect("two standard slots")),
                (CktLabel::new(1, 0), d.bracket.field()),
                (CktLabel::new(0, 0), SymTensor::scalar(Poly::constant(3, d.killing.clone()))),
            ];
            sections.into_iter().filter(|(_, phi)| !phi.is_zero()).filter_map(move |(label, phi)| {
                match verify_symmetry(&phi, label, 2, &g) {
                    Ok(r) if r.verdict.passed() => None,
                    other => Some(format!("({i},{j}) {label}: {other:?}")),
                }
            })
        })
        .collect();
    ensure(summand_failures.is_empty(), || summand_failures.join("; "))?;
    Ok("100 ordered pairs at w in {-1/2, 2, 0}; all nonzero summands are symmetries".into())
}

fn ideal_relation() -> Check {
    let basis = AdjointSpace::new(euclid(3)).basis();
    let mut coefficients = Vec::new();
    for k in [1, 2] {
        let reports: Vec<_> = basis
            .par_iter()
            .flat_map_iter(|a| basis.iter().map(move |b| (a, b)))
            .map(|(a, b)| ideal_relation_check(a, b, k))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for r in &reports {
            ensure(r.verdict.passed(), || format!("k={k}: {r:?}"))?;
        }
        coefficients.push(reports[0].coefficient.clone());
    }
    // (n−2k)(n+2k)/(4n(n+1)(n+2)) at n = 3, computed by hand.
    let expected = [Scalar::ratio(5, 240), Scalar::ratio(-7, 240)];
    ensure(coefficients == expected, || format!("coefficients {coefficients:?}"))?;
    Ok(format!("100 pairs each at k=1,2; coefficients {} and {}", coefficients[0], coefficients[1]))
}

fn laplacian_multiples() -> Check {
    let g = euclid(3);
    let mut checked = Vec::new();
    for k in [1, 2] {
        let rep = lemma_extra_check(k, &g, None).map_err(|e| e.to_string())?;
        ensure(rep.verdict.passed(), || format!("k={k}: {:?}", rep.first_failure))?;
        let dim = weyl_dim(3, CktLabel::new(0, k)) as usize;
        ensure(rep.checked == dim, || format!("k={k}: checked {} of {dim}", rep.checked))?;
        checked.push(rep.checked);
    }
    Ok(format!("{} and {} basis solutions, both derivative families", checked[0], checked[1]))
}

fn regularity() -> Check {
    let mut dets = 0;
    for k in 1..=12 {
        for d in 0..k {
            let det = c_matrix(k, d).map_err(|e| e.to_string())?.det();
            ensure(!det.is_zero(), || format!("det C({k},{d}) = 0"))?;
            dets += 1;
        }
    }
    ensure(dets == 78, || format!("{dets} determinants"))?;
    for k in 1..=6 {
        for d in 0..k {
            let ch = reduction_chain(k, d).map_err(|e| e.to_string())?;
            ensure(ch.holds(), || format!("chain k={k} d={d}: {ch:?}"))?;
        }
    }
    Ok("78 nonzero determinants; reduction chain for k <= 6".into())
}

fn constraint_matrices() -> Check {
    let g = euclid(3);
    let mut cases = 0;
    for k in 1..=4 {
        for r in 0..k {
            for p in 0..=2 {
                let m = extract_constraint_matrix(k, p, r, &g).map_err(|e| e.to_string())?;
                let c = c_matrix(k, k - r - 1).map_err(|e| e.to_string())?;
                ensure(m == c.matrix, || format!("k={k} p={p} r={r}: {m}"))?;
                cases += 1;
            }
        }
    }
    // 2^s binom(4, s) for s = 4, 3, 2, 1.
    let table = ExactMatrix::from_i64(&[&[16, 32, 24, 8], &[0, 16, 32, 24], &[0, 0, 16, 32], &[0, 0, 0, 16]])
        .expect("square");
    let worked = extract_constraint_matrix(4, 0, 3, &g).map_err(|e| e.to_string())?;
    ensure(worked == table, || format!("k=4 table: {worked}"))?;
    Ok(format!("{cases} (k,p,r) cases; k=4 worked table reproduced"))
}

fn classification_round_trip() -> Check {
    let g = euclid(3);
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    for trial in 0..20 {
        let k = 1 + trial % 2;
        let s = sample_symmetry(k, &g, &mut rng).map_err(|e| e.to_string())?;
        let c = classify(&s.operator, k).map_err(|e| e.to_string())?;
        ensure(c.remainder.is_zero(), || format!("trial {trial}: remainder {}", c.remainder))?;
        ensure(c.components == s.generators, || format!("trial {trial}: recovered {:?}", c.components))?;
        ensure(c.trivial == s.trivial, || format!("trial {trial}: trivial part differs"))?;
    }
    Ok("20 seeded samples at k=1,2".into())
}

fn operator_invariants() -> Check {
    let test_set = monomials(3, 4);
    for n in [3, 4] {
        let frame = TractorFrame::new(euclid(n));
        let nn = Scalar::int(n as i64);
        for w in weights() {
            for f in monomials(n, 4) {
                let dens = TractorField::density(frame, w.clone(), f.clone());
                // 𝔻^𝐀 𝔻_𝐀 = −2w(n+w).
                let dd = dens.double_d().double_d().unpack_forms();
                let square = dd.trace(0, 2).and_then(|t| t.trace(0, 1)).map_err(|e| e.to_string())?;
                let expected = f.scale(&(Scalar::int(-2) * &w * (&nn + &w)));
                ensure(square.as_density() == Some(&expected), || format!("n={n} w={w} f={f}: square"))?;
                // D_A X_B − X_B D_A = −2𝔻_{AB} + (n+2w) h_{AB}.
                let dx = dens.times_x().tractor_d();
                let xd = dens.tractor_d().times_x().permute(&[1, 0]);
                let lhs = dx.sub(&xd.with_weight(dx.weight().clone()));
                let rhs = dens
                    .double_d()
                    .unpack_forms()
                    .scale(&Scalar::int(-2))
                    .add(&dens.times_h().scale(&(&nn + &(Scalar::int(2) * &w))))
                    .with_weight(lhs.weight().clone());
                ensure(lhs == rhs, || format!("n={n} w={w} f={f}: [D, X]"))?;
            }
        }
    }
    let g = euclid(3);
    let frame = TractorFrame::new(g);
    for w in weights() {
        for f in &test_set {
            // [𝒟, 𝔻] = 0 on densities and on the standard tractors D f.
            let dens = TractorField::density(frame, w.clone(), f.clone());
            ensure(dens.double_d().fund_d() == dens.fund_d().double_d().permute(&[1, 0]), || {
                format!("w={w} f={f}: [fund, double] on a density")
            })?;
            let v = dens.tractor_d();
            ensure(v.double_d().fund_d() == v.fund_d().double_d().permute(&[1, 0, 2]), || {
                format!("w={w} f={f}: [fund, double] on a tractor")
            })?;
        }
    }
    // I_φ 𝔻 is the Lie derivative along every conformal Killing field.
    let killing = CktLabel::new(1, 0);
    let space = CartanSpace::new(frame, killing);
    let fields = &solve(killing, &g).map_err(|e| e.to_string())?.solutions;
    ensure(fields.len() == 10, || format!("{} conformal Killing fields", fields.len()))?;
    let lie_failures: Vec<String> = fields
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, phi)| {
            let tractor = space.split(phi).expect("solution");
            let test_set = &test_set;
            weights().into_iter().flat_map(move |w| {
                let tractor = tractor.clone();
                test_set.iter().flat_map(move |f| {
                    let mut bad = Vec::new();
                    let dens = TractorField::density(frame, w.clone(), f.clone());
                    let lhs = TractorField::contract_leading(&tractor, &dens.double_d()).expect("one form slot");
                    let rhs = lie_derivative(phi, &w, &LieSection::Density(f.clone()), &g);
                    if LieSection::Density(lhs.as_density().expect("density").clone()) != rhs {
                        bad.push(format!("field {i} w={w} density {f}"));
                    }
                    for slot in 0..3 {
                        let mut cov = vec![Poly::zero(3); 3];
                        cov[slot] = f.clone();
                        let field = TractorField::from_data(frame, w.clone(), vec![SlotKind::Tensor], cov.clone())
                            .expect("covector");
                        let lhs = TractorField::contract_leading(&tractor, &field.double_d()).expect("one form slot");
                        let rhs = lie_derivative(phi, &w, &LieSection::Covector(cov), &g);
                        if LieSection::Covector(lhs.data().to_vec()) != rhs {
                            bad.push(format!("field {i} w={w} covector slot {slot} {f}"));
                        }
                    }
                    bad
                })
            })
        })
        .collect();
    ensure(lie_failures.is_empty(), || lie_failures.join("; "))?;
    // Both derivative families give the same symmetry.
    let mut symmetries = 0;
    for label in [CktLabel::new(1, 0), CktLabel::new(0, 1), CktLabel::new(2, 0)] {
        let sp = CartanSpace::new(frame, label);
        let failures: Vec<String> = (0..sp.dimension())
            .into_par_iter()
            .flat_map_iter(|i| {
                let test_set = &test_set;
                let sp = &sp;
                weights().into_iter().filter_map(move |w| {
                    let s = CanonicalSymmetry::build(sp.parallel(i), label, w.clone()).expect("parallel");
                    test_set
                        .iter()
                        .any(|f| s.apply_with(Family::Fundamental, f) != s.apply_with(Family::Double, f))
                        .then(|| format!("{label} #{i} w={w}"))
                })
            })
            .collect();
        ensure(failures.is_empty(), || failures.join("; "))?;
        symmetries += sp.dimension();
    }
    Ok(format!("degree <= 4; Lie derivative for 10 fields; families agree on {symmetries} symmetries"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("solution dimensions", dimension_table),
        ("symmetries of Laplacian powers", canonical_identity),
        ("GJMS factorization", gjms),
        ("product of first-order symmetries", product_decomposition),
        ("ideal relation", ideal_relation),
        ("(0,k) symmetries are Laplacian multiples", laplacian_multiples),
        ("binomial matrix regularity", regularity),
        ("top-level constraint matrices", constraint_matrices),
        ("classification round trip", classification_round_trip),
        ("operator calculus invariants", operator_invariants),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
