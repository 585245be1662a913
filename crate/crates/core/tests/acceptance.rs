//! Acceptance criteria: one PASS/FAIL line per criterion, nonzero exit on
//! any FAIL. Each line carries the evidence behind the verdict.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sopq_flags::components::{classify_point, count_components};
use sopq_flags::flag::ThetaSet;
use sopq_flags::involution::{component_involution, involution_coords, pfaffian_parity, Action};
use sopq_flags::linalg::{int, rat, Matrix, Rational};
use sopq_flags::oracle::{estimate_components, label_conflicts, OracleConfig};
use sopq_flags::quadratic::{gram_matrix, Signature};
use sopq_flags::sign_matrix::{
    class_labels, positive_count, theta_positive_reference, SignMatrix, Symbol,
};
use sopq_flags::transversality::{
    check_identities, det_i, minor_b, minor_q, s_matrix, staged_change_of_vars,
};
use sopq_flags::unipotent::{psi, psi_chart, psi_inverse, Chart, UnipotentCoords};

struct Verdict {
    pass: bool,
    detail: String,
}

fn theta(p: usize, q: usize, t: &str) -> ThetaSet {
    ThetaSet::parse(Signature::new(p, q).expect("signature"), t).expect("root set")
}

fn count(p: usize, q: usize, t: &str) -> usize {
    count_components(&theta(p, q, t)).expect("count").count
}

fn sign_tuples(n: usize) -> Vec<Vec<i8>> {
    (0..1u32 << n).map(|b| (0..n).map(|j| if b >> j & 1 == 0 { 1 } else { -1 }).collect()).collect()
}

fn criterion_1() -> Verdict {
    let pow = |e: usize| 1usize << e;
    let cases: Vec<(usize, usize, &str, usize)> = vec![
        // p > q+1, last root omitted.
        (5, 3, "1", pow(1)),
        (5, 3, "2", pow(1)),
        (6, 4, "1,2", pow(2)),
        (6, 4, "1,3", pow(2)),
        (7, 5, "1,2,4", pow(3)),
        // p > q+1, last root present.
        (5, 3, "3", pow(0)),
        (5, 3, "1,3", pow(1)),
        (6, 4, "2,4", pow(1)),
        (6, 4, "1,2,4", pow(2)),
        // Submaximal and full flags.
        (5, 3, "1,2", 11),
        (5, 3, "1,2,3", 11),
        (6, 3, "1,2", 11),
        (4, 2, "1", 3),
        (4, 2, "1,2", 3),
        (5, 2, "1", 3),
        (6, 4, "1,2,3", 3 * pow(3)),
        (7, 5, "1,2,3,4", 3 * pow(4)),
        // p = q+1.
        (3, 2, "1,2", 8),
        (4, 3, "1,2,3", 30),
        (5, 4, "1,2,3,4", 9 * pow(3)),
        (6, 5, "1,2,3,4,5", 10 * pow(4)),
        // p = q.
        (2, 2, "2", 2),
        (4, 4, "4", 2),
        (2, 2, "2,qp", 4),
        (4, 4, "4,qp", 4),
        (3, 3, "1", pow(1)),
        (4, 4, "1,2", pow(2)),
        (4, 4, "1,4", pow(2)),
        (5, 5, "1,2,3", pow(3)),
    ];
    let bad: Vec<String> = cases
        .iter()
        .filter_map(|&(p, q, t, want)| {
            let got = count(p, q, t);
            (got != want).then(|| format!("({p},{q},{{{t}}}) {got} != {want}"))
        })
        .collect();
    Verdict { pass: bad.is_empty(), detail: format!("{} instances; mismatches: {bad:?}", cases.len()) }
}

fn criterion_2() -> Verdict {
    let mut problems = Vec::new();
    for q in 2..=6 {
        let scanned = positive_count(q);
        let labelled = class_labels(q).iter().filter(|l| l.is_positive()).count();
        if scanned != 1 << (q - 1) || labelled != 1 << (q - 1) {
            problems.push(format!("q={q}: {scanned} positive matrices, {labelled} positive classes"));
        }
        let refs: Vec<SignMatrix> = sign_tuples(q - 1).iter().map(|s| theta_positive_reference(s)).collect();
        let mut keys: Vec<u64> = refs.iter().map(SignMatrix::key).collect();
        keys.sort_unstable();
        keys.dedup();
        if keys.len() != refs.len() {
            problems.push(format!("q={q}: references not distinct"));
        }
        if refs.iter().any(|r| !r.is_theta_positive() || !r.alterations().is_empty()) {
            problems.push(format!("q={q}: a reference is alterable"));
        }
        if q >= 3 {
            let rows = (1..q)
                .map(|i| (0..q - i).map(|j| if j == 0 { Symbol::Star } else { Symbol::Plus }).collect())
                .collect();
            let all_plus = SignMatrix::new(q, rows).expect("shape");
            if all_plus.is_theta_positive() {
                problems.push(format!("q={q}: all-plus red-striped matrix accepted"));
            }
        }
    }
    Verdict { pass: problems.is_empty(), detail: format!("q=2..6; problems: {problems:?}") }
}

fn pm(e: usize) -> Rational {
    if e.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

fn pow2(e: usize) -> Rational {
    Rational::from_integer(num_bigint::BigInt::one() << e)
}

/// `S` as literally defined: the anti-transpose of the upper-right block.
fn anti_transposed_block(u: &Matrix, k: usize) -> Matrix {
    let n = u.rows();
    let mut s = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            // Block entry (r, c) = u[r][n-k+c]; anti-transpose sends it to (k-1-c, k-1-r).
            s[(i, j)] = u[(k - 1 - j, n - 1 - i)].clone();
        }
    }
    s
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut corrected_failures = 0;
    let mut corrected_checked = 0;
    let mut literal_minor = (0usize, 0usize);
    let mut literal_det = (0usize, 0usize);
    let mut samples = 0;
    for (p, q, k) in [(4, 2, 1), (4, 3, 2), (5, 3, 2), (5, 4, 3)] {
        let sig = Signature::new(p, q).expect("signature");
        let chart = Chart::new(&ThetaSet::first(sig, k).expect("root set"));
        for _ in 0..1000 {
            let c = UnipotentCoords::random(&chart, &mut rng, 6);
            samples += 1;
            let report = check_identities(&c);
            corrected_checked += report.checked;
            corrected_failures += report.failed.len();

            let u = psi_chart(&c);
            let dk = det_i(&u, k).expect("minor");
            literal_det.0 += 1;
            if anti_transposed_block(&u, k).det().expect("square") * pm(k) != dk {
                literal_det.1 += 1;
            }
            let st = staged_change_of_vars(&c);
            for j in 1..=k {
                for i in 0..=k - j {
                    let m = k - i;
                    let qs: Option<Vec<Rational>> = (1..=j).map(|l| st.q(l, i, l - 1)).collect();
                    if let Some(qs) = qs {
                        let lhs = qs.iter().fold(pm(j) / pow2(j), |acc, x| acc * x);
                        literal_minor.0 += 1;
                        if lhs != minor_q(&u, j, m) {
                            literal_minor.1 += 1;
                        }
                    }
                    if i >= 1 {
                        let qs: Option<Vec<Rational>> = (1..j).map(|l| st.q(l, i, l - 1)).collect();
                        if let (Some(qs), Some(b)) = (qs, st.b(j, i, j - 1)) {
                            let lhs = qs.iter().fold(pm(j - 1) / pow2(j - 1) * b, |acc, x| acc * x);
                            literal_minor.0 += 1;
                            if lhs != minor_b(&u, j, m) {
                                literal_minor.1 += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let pass = corrected_failures == 0 && literal_minor.1 == 0 && literal_det.1 == 0;
    Verdict {
        pass,
        detail: format!(
            "{samples} samples; stated constants: minor identities fail {}/{}, det(S)=(-1)^k det_k fails {}/{}; \
             corrected constants: {corrected_failures} failures in {corrected_checked} checks",
            literal_minor.1, literal_minor.0, literal_det.1, literal_det.0
        ),
    }
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut problems = Vec::new();
    let mut samples = 0;
    let charts = [theta(5, 3, "1,2,3"), theta(5, 3, "1,3"), theta(4, 3, "1,2,3"), theta(6, 4, "1,2,3"), theta(4, 4, "1,4,qp")];
    for th in &charts {
        let chart = Chart::new(th);
        let n = chart.n();
        for _ in 0..200 {
            let c = UnipotentCoords::random(&chart, &mut rng, 5);
            let ic = involution_coords(&c);
            samples += 1;
            if &psi(&ic) * &psi(&c) != Matrix::identity(n) {
                problems.push(format!("{th}: product is not the identity"));
            }
            if s_matrix(&ic) != s_matrix(&c).transpose() {
                problems.push(format!("{th}: S is not transposed"));
            }
        }
    }
    // (p, q, theta, components, stated stable count)
    let rows = [
        (5, 3, "1,2", 11, 6),
        (6, 4, "1,2,3", 24, 8),
        (3, 2, "2", 2, 0),
        (4, 3, "3", 2, 2),
        (5, 4, "4", 2, 2),
        (6, 5, "5", 2, 0),
        (7, 6, "6", 2, 0),
        (2, 2, "2", 2, 0),
        (4, 4, "4", 2, 2),
        (6, 6, "6", 2, 0),
    ];
    let mut table = Vec::new();
    for (p, q, t, total, stable) in rows {
        let map = component_involution(&theta(p, q, t)).expect("involution");
        let ok = map.rows.len() == total && map.fixed() == stable && map.is_involution();
        table.push(format!("({p},{q},{{{t}}}) {}/{} stable{}", map.fixed(), map.rows.len(), if ok { "" } else { " (stated " }));
        if !ok {
            let last = table.last_mut().expect("pushed");
            last.push_str(&format!("{stable}/{total})"));
            problems.push(format!("({p},{q},{{{t}}})"));
        }
    }
    for q in [2, 4, 6, 8] {
        let want = if q % 4 == 0 { Action::Stable } else { Action::Swapped };
        if pfaffian_parity(q).ok() != Some(want) {
            problems.push(format!("Pfaffian parity q={q}"));
        }
    }
    Verdict {
        pass: problems.is_empty(),
        detail: format!("{samples} coordinate samples; components: {}; failing: {problems:?}", table.join(", ")),
    }
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut found = Vec::new();
    for (p, q, t) in [(3, 2, "1"), (3, 2, "1,2"), (4, 3, "1,2"), (4, 4, "4,qp")] {
        let th = theta(p, q, t);
        let est = estimate_components(&th, &OracleConfig::default()).expect("oracle");
        let exact = count(p, q, t);
        let conflicts = label_conflicts(&est).expect("labels");
        found.push(format!("({p},{q},{{{t}}}) {}/{exact}", est.count));
        if est.count != exact {
            problems.push(format!("({p},{q},{{{t}}}) estimate {} != {exact}", est.count));
        }
        if !conflicts.is_empty() {
            problems.push(format!("({p},{q},{{{t}}}) {} classes join distinct labels", conflicts.len()));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        problems.push(format!("took {elapsed:.1?}"));
    }
    Verdict {
        pass: problems.is_empty(),
        detail: format!("{} in {elapsed:.1?}; problems: {problems:?}", found.join(", ")),
    }
}

fn perturb(c: &UnipotentCoords, rng: &mut ChaCha8Rng, scale: &Rational) -> UnipotentCoords {
    let xs: Vec<Rational> = c.flatten().into_iter().map(|x| x + scale * rat(rng.gen_range(-8..=8), 8)).collect();
    UnipotentCoords::unflatten(&c.chart, &xs).expect("same chart")
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut problems = Vec::new();
    let mut points = 0;
    let charts = [theta(5, 3, "1,2,3"), theta(5, 3, "2"), theta(4, 3, "1,2,3"), theta(4, 4, "4,qp"), theta(6, 4, "1,3")];
    for th in &charts {
        let chart = Chart::new(th);
        let m = gram_matrix(th.sig());
        for _ in 0..100 {
            let c = UnipotentCoords::random(&chart, &mut rng, 9);
            points += 1;
            let u = psi(&c);
            if &(&u.transpose() * &m) * &u != m {
                problems.push(format!("{th}: U^T M U != M"));
            }
            if psi_inverse(&chart, &u).ok().as_ref() != Some(&c) {
                problems.push(format!("{th}: roundtrip"));
            }
            let report = check_identities(&c);
            if report.failed.iter().any(|f| f.starts_with("Q recursion")) {
                problems.push(format!("{th}: Q recursion"));
            }
        }
    }
    let mut edges = 0;
    for q in 2..=4 {
        for a in SignMatrix::all(q) {
            for b in a.alterations() {
                edges += 1;
                if !b.alterations().contains(&a) {
                    problems.push(format!("alteration {a} -> {b} not reversible"));
                }
            }
        }
    }
    let mut classified = 0;
    let tiny = Rational::new(1.into(), num_bigint::BigInt::one() << 24);
    for th in [theta(5, 3, "1,2"), theta(4, 3, "1,2,3"), theta(3, 2, "1,2"), theta(4, 4, "4,qp")] {
        let chart = Chart::new(&th);
        for _ in 0..20 {
            let c = UnipotentCoords::random(&chart, &mut rng, 9);
            let Ok(label) = classify_point(&c) else { continue };
            classified += 1;
            let once = perturb(&c, &mut rng, &tiny);
            let twice = perturb(&once, &mut rng, &tiny);
            if classify_point(&once).ok() != Some(label.clone()) || classify_point(&twice).ok() != Some(label) {
                problems.push(format!("{th}: label moved under perturbation"));
            }
        }
    }
    if classified == 0 {
        problems.push("no point classified".into());
    }
    Verdict {
        pass: problems.is_empty(),
        detail: format!(
            "{points} chart points, {edges} alteration edges, {classified} perturbed classifications; problems: {problems:?}"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 6] = [
        ("component counts", criterion_1),
        ("positivity", criterion_2),
        ("minor identities", criterion_3),
        ("involution", criterion_4),
        ("oracle concordance", criterion_5),
        ("property suite", criterion_6),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}) [{:.1?}]: {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed(),
            v.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
