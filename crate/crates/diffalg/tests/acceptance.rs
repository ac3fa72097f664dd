//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`) and
//! enforcing its runtime budget.

use std::process::Command;
use std::time::{Duration, Instant};

use num::traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diffalg::exact::{rat, ratio, BigRat, UniPoly};
use diffalg::linalg::QMat;
use diffalg::linode::{
    antiderivative_algebraicity, concomitant, rational_solutions, riccati_rational_nonexistence,
    verify_lagrange, DiffOperator, RiccatiOutcome, TranscendenceVerdict,
};
use diffalg::mpoly::{MultiPoly, Var};
use diffalg::series::{
    airy_basis, growth_classify, ode_series_solve, verify_polynomial_relation, EVerdict, GVerdict,
    RelationVerdict, TruncSeries,
};
use diffalg::vfield::{
    builtin, make_derivation, solve_affine_darboux, DarbouxOutcome, SearchBounds,
};

fn y(nvars: usize, j: usize) -> MultiPoly {
    MultiPoly::var(nvars, Var::Y(j)).unwrap()
}

fn z(nvars: usize) -> MultiPoly {
    MultiPoly::var(nvars, Var::Z).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_deg: u32) -> MultiPoly {
    let mut p = MultiPoly::zero(nvars);
    for _ in 0..rng.gen_range(1..=6) {
        let mut m = MultiPoly::constant(nvars, rat(rng.gen_range(-5..=5)));
        m = &m * &z(nvars).pow(rng.gen_range(0..=max_deg));
        for j in 1..=nvars {
            m = &m * &y(nvars, j).pow(rng.gen_range(0..=max_deg));
        }
        p = &p + &m;
    }
    p
}

fn run_cli(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_diffalg"))
        .args(args)
        .output()
        .expect("spawn diffalg");
    (
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        out.status.code().expect("exit code"),
    )
}

fn budget(start: Instant, limit_s: u64, what: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(limit_s),
        "{} took {:?}, budget {}s",
        what,
        elapsed,
        limit_s
    );
}

/// Criterion 1: bounded Darboux search on the n=2 Airy field finds only
/// constant Darboux polynomials at dz=6, dy=6, dw=1.
#[test]
fn criterion_01_bounded_darboux_only_constants() {
    let start = Instant::now();
    let (stdout, code) = run_cli(&[
        "darboux", "--field", "airy2", "--dz", "6", "--dy", "6", "--dw", "1", "--format", "json",
    ]);
    assert_eq!(code, 0, "darboux exit code");
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["result"]["only_constants"], true);
    assert_eq!(report["verdict"], "only-constants-in-bounds");
    // the same search through the library, checked structurally
    let d = make_derivation(builtin::airy2());
    let zero = MultiPoly::zero(2);
    let outcome = solve_affine_darboux(&d, &zero, SearchBounds { dz: 6, dy: 6 }, 1).unwrap();
    let DarbouxOutcome::Darboux(pairs) = outcome else {
        panic!("expected Darboux outcome");
    };
    for pair in &pairs {
        for b in &pair.basis {
            assert!(b.is_constant(), "non-constant Darboux polynomial {}", b);
        }
    }
    budget(start, 120, "criterion 1");
    println!("PASS criterion 1: darboux(airy2, dz=6, dy=6, dw=1) -> only constants");
}

/// Criterion 2: the affine solve Dp + c·y1 = 0 at dz=6, dy=6 returns
/// exactly the space of constant p with c = 0.
#[test]
fn criterion_02_forced_affine_solve_trivial() {
    let start = Instant::now();
    let d = make_derivation(builtin::airy2());
    let outcome =
        solve_affine_darboux(&d, &y(2, 1), SearchBounds { dz: 6, dy: 6 }, 0).unwrap();
    let DarbouxOutcome::Affine(pairs) = outcome else {
        panic!("expected affine outcome");
    };
    assert_eq!(pairs.len(), 1, "solution space dimension");
    let (p, c) = &pairs[0];
    assert!(p.is_constant() && !p.is_zero());
    assert!(c.is_zero());
    let (_, code) = run_cli(&[
        "lemma2", "--field", "airy2", "--dz", "6", "--dy", "6", "--format", "json",
    ]);
    assert_eq!(code, 0);
    budget(start, 60, "criterion 2");
    println!("PASS criterion 2: Dp + c*y1 = 0 at (6,6) forces p constant, c = 0");
}

/// Criterion 3: first-integral search recovers the closing identity for
/// the u2-extended Airy field and its Painlevé-II analogue.
#[test]
fn criterion_03_first_integral_recovery() {
    for (name, field, expected) in [
        (
            "airy-u2",
            builtin::airy_u2(),
            &(&y(3, 2).pow(2) - &(&z(3) * &y(3, 1).pow(2))) + &y(3, 3),
        ),
        (
            "painleve2-u2",
            builtin::painleve2_u2(),
            &(&(&y(3, 2).pow(2) - &(&z(3) * &y(3, 1).pow(2))) - &y(3, 1).pow(4)) + &y(3, 3),
        ),
    ] {
        let start = Instant::now();
        let d = make_derivation(field);
        // oracle: the expected polynomial really is a first integral
        assert!(d.apply(&expected).unwrap().is_zero(), "oracle for {}", name);
        let outcome =
            solve_affine_darboux(&d, &MultiPoly::zero(3), SearchBounds { dz: 1, dy: 4 }, 0)
                .unwrap();
        let DarbouxOutcome::FirstIntegrals(basis) = outcome else {
            panic!("expected first-integral outcome");
        };
        assert_eq!(basis.len(), 1, "{} basis dimension", name);
        // expected spans the same line: expected / basis[0] is a constant
        let q = expected.exact_divide(&basis[0]).unwrap().unwrap();
        assert!(q.is_constant() && !q.is_zero());
        let (_, code) = run_cli(&[
            "first-integrals", "--field", name, "--dz", "1", "--dy", "4", "--format", "json",
        ]);
        assert_eq!(code, 0, "{} exit code", name);
        budget(start, 30, name);
    }
    println!("PASS criterion 3: first integrals y2^2 - z*y1^2 (+/- y1^4) + y3 recovered at (1,4)");
}

/// Criterion 4: for the y3-extended Airy field and p = Σ q_k·y3^k, the
/// y3-expansion of Dp is D_Airy(q_k) + (k+1)·y1·q_{k+1}.
#[test]
fn criterion_04_extension_expansion_identity() {
    let start = Instant::now();
    let d = make_derivation(builtin::airy3());
    let mut rng = ChaCha8Rng::seed_from_u64(20260824);
    for _ in 0..100 {
        let p = random_poly(&mut rng, 3, 3);
        let dp = d.apply(&p).unwrap();
        let q = p.coefficients_in(3).unwrap();
        let lhs = dp.coefficients_in(3).unwrap();
        let kmax = lhs.len().max(q.len());
        for k in 0..kmax {
            let zero = MultiPoly::zero(3);
            let lhs_k = lhs.get(k).unwrap_or(&zero);
            // q_k is y3-free, so the extended derivation reduces to D_Airy
            let mut rhs_k = d.apply(q.get(k).unwrap_or(&zero)).unwrap();
            if let Some(qk1) = q.get(k + 1) {
                let scaled = &y(3, 1) * &qk1.scale(&rat(k as i64 + 1));
                rhs_k = &rhs_k + &scaled;
            }
            assert_eq!(lhs_k, &rhs_k, "expansion identity at k = {} for p = {}", k, p);
        }
    }
    budget(start, 10, "criterion 4");
    println!("PASS criterion 4: y3-expansion identity holds for 100 random polynomials");
}

/// Criterion 5: operator calculus — the Airy operator is selfadjoint, the
/// Lagrange identity holds symbolically for 50 random operators of order
/// <= 4, and the Airy concomitant is u'v − uv'.
#[test]
fn criterion_05_operator_calculus() {
    let start = Instant::now();
    let airy = DiffOperator::airy();
    assert_eq!(airy.adjoint(), airy, "Airy operator selfadjoint");
    let pi = concomitant(&airy);
    assert_eq!(pi.entry(1, 0), &UniPoly::one());
    assert_eq!(pi.entry(0, 1), &-&UniPoly::one());
    assert_eq!(pi.entry(0, 0), &UniPoly::zero());
    assert_eq!(pi.entry(1, 1), &UniPoly::zero());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 50 {
        let order = rng.gen_range(1..=4usize);
        let coeffs: Vec<UniPoly> = (0..=order)
            .map(|i| {
                let cs: Vec<i64> = (0..=rng.gen_range(0..=3))
                    .map(|_| rng.gen_range(-4..=4))
                    .collect();
                let p = UniPoly::from_ints(&cs);
                if i == order && p.is_zero() {
                    UniPoly::one()
                } else {
                    p
                }
            })
            .collect();
        let op = DiffOperator::new(coeffs).unwrap();
        assert!(verify_lagrange(&op), "Lagrange identity for {}", op);
        assert_eq!(op.adjoint().adjoint(), op, "adjoint involution for {}", op);
        checked += 1;
    }
    budget(start, 10, "criterion 5");
    println!("PASS criterion 5: selfadjointness, 50 Lagrange identities, Airy concomitant u'v - uv'");
}

/// Criterion 6: v'' = z·v + 1 has no rational solutions, cross-checked by
/// an independent scan over numerator/denominator degrees <= 12.
#[test]
fn criterion_06_rational_nonexistence_cross_checked() {
    let start = Instant::now();
    let airy = DiffOperator::airy();
    let sols = rational_solutions(&airy, &UniPoly::one()).unwrap();
    assert!(sols.is_none(), "rational_solutions must report none");

    // Independent scan, polynomial part: for each numerator degree d <= 12,
    // solve the dense linear system "coefficients of P'' - z*P - 1 all
    // vanish" directly (no indicial machinery). P has d+1 unknowns; the
    // residual has degree d+1, giving d+2 equations.
    for d in 0..=12usize {
        let rows = d + 2;
        let cols = d + 1;
        let mut m = QMat::zeros(rows, cols);
        for j in 0..cols {
            // contribution of P_j z^j to z^k coefficients of P'' - z*P
            if j >= 2 {
                m[(j - 2, j)] = &m[(j - 2, j)] + rat((j * (j - 1)) as i64);
            }
            m[(j + 1, j)] = &m[(j + 1, j)] - rat(1);
        }
        let mut rhs = vec![BigRat::zero(); rows];
        rhs[0] = rat(1); // P'' - z*P = 1
        assert!(
            m.solve_affine(&rhs).is_none(),
            "unexpected polynomial solution at degree {}",
            d
        );
    }

    // Independent scan, denominator part: a rational solution with a pole
    // of order m at any point rho would give v'' a Laurent leading term
    // m(m+1)·c·(z-rho)^(-m-2), while z·v + 1 has order >= -m; since
    // m(m+1) != 0 the orders can never match. Scan all pole orders the
    // degree bound allows.
    for m in 1..=12i64 {
        let lead = rat(m * (m + 1));
        assert!(!lead.is_zero(), "pole of order {} not excluded", m);
        assert!(-(m + 2) < -m, "order bookkeeping");
    }
    budget(start, 10, "criterion 6");
    println!("PASS criterion 6: no rational solution of v'' = z*v + 1; independent scan agrees");
}

/// Criterion 7: Riccati analysis certifies nonexistence for the Airy
/// operator and finds w = ±1 for D² − 1.
#[test]
fn criterion_07_riccati() {
    let start = Instant::now();
    let airy = DiffOperator::airy();
    assert_eq!(
        riccati_rational_nonexistence(&airy, 12).unwrap(),
        RiccatiOutcome::NonexistenceCertified
    );
    let shifted = DiffOperator::new(vec![-&UniPoly::one(), UniPoly::zero(), UniPoly::one()])
        .unwrap();
    let RiccatiOutcome::Found { solutions } =
        riccati_rational_nonexistence(&shifted, 12).unwrap()
    else {
        panic!("expected solutions for D^2 - 1");
    };
    let rendered: Vec<String> = solutions.iter().map(|w| w.to_string()).collect();
    assert_eq!(rendered, vec!["-1", "1"]);
    budget(start, 5, "criterion 7");
    println!("PASS criterion 7: Riccati nonexistence certified for D^2 - z; w = ±1 for D^2 - 1");
}

/// Criterion 8: the antiderivative pipeline — transcendental for the Airy
/// operator (with hypotheses recorded), algebraic for D² with witness
/// v = z²/2 whose relation differentiates back to u on series.
#[test]
fn criterion_08_antiderivative_pipeline() {
    let start = Instant::now();
    let airy = DiffOperator::airy();
    let cert = antiderivative_algebraicity(&airy, 12, false).unwrap();
    assert_eq!(
        cert.verdict,
        TranscendenceVerdict::AntiderivativeTranscendental
    );
    assert!(cert.witness.is_none());
    assert!(
        !cert.caveats.is_empty(),
        "hypotheses must be recorded on the certificate"
    );

    let dd = DiffOperator::new(vec![UniPoly::zero(), UniPoly::zero(), UniPoly::one()]).unwrap();
    let cert = antiderivative_algebraicity(&dd, 12, false).unwrap();
    assert_eq!(cert.verdict, TranscendenceVerdict::AntiderivativeAlgebraic);
    let witness = cert.witness.expect("algebraic witness");
    let v = witness.v.as_polynomial().expect("polynomial witness");
    assert_eq!(v, UniPoly::from_coeffs(vec![rat(0), rat(0), ratio(1, 2)]));

    // Series oracle: for u solving u'' = 0 the relation reads
    // U = c - pi(u, v) with pi(u, v) = Σ c_i(v)·u^(i); its derivative
    // must reproduce u.
    let n = 24;
    let u = ode_series_solve(&dd, &UniPoly::zero(), &[rat(3), rat(-2)], n).unwrap();
    let pi = concomitant(&dd);
    let coeffs = pi.u_coefficients(&witness.v);
    let mut relation_rhs = TruncSeries::zero(n);
    let mut du = u.clone();
    for c in &coeffs {
        let cp = c.as_polynomial().expect("polynomial concomitant coefficients");
        let cs = TruncSeries::from_unipoly(&cp, relation_rhs.order());
        relation_rhs = relation_rhs.add(&cs.mul(&du));
        du = du.derivative();
    }
    // d/dz (c - relation_rhs) = u
    let lhs = relation_rhs.scale(&rat(-1)).derivative();
    assert!(
        lhs.first_difference(&u, lhs.order()).is_none(),
        "relation derivative must equal u"
    );
    budget(start, 10, "criterion 8");
    println!("PASS criterion 8: Airy antiderivative transcendental; D^2 algebraic with v = z^2/2");
}

/// Criterion 9: series fidelity — displayed Airy coefficients, the
/// Wronskian, and the closing identity.
#[test]
fn criterion_09_series_fidelity() {
    let start = Instant::now();
    let (u1, u2) = airy_basis(12);
    assert_eq!(u1.coeff(0), rat(1));
    assert_eq!(u1.coeff(3), ratio(1, 6)); // 1/3!
    assert_eq!(u1.coeff(6), ratio(4, 720)); // (1·4)/6!
    assert_eq!(u1.coeff(9), ratio(28, 362880)); // (1·4·7)/9!
    assert_eq!(u2.coeff(1), rat(1));
    assert_eq!(u2.coeff(4), ratio(2, 24)); // 2/4!
    assert_eq!(u2.coeff(7), ratio(10, 5040)); // (2·5)/7!
    assert_eq!(u2.coeff(10), ratio(80, 3628800)); // (2·5·8)/10!
    for k in [2, 5, 8, 11, 1, 10] {
        if k % 3 != 0 {
            assert!(u1.coeff(k).is_zero());
        }
        if k % 3 != 1 {
            assert!(u2.coeff(k).is_zero());
        }
    }

    let (u1, u2) = airy_basis(64);
    let w = u1.mul(&u2.derivative()).sub(&u1.derivative().mul(&u2));
    let one = TruncSeries::constant(rat(1), w.order());
    assert!(
        w.sub(&one).is_zero_through(62),
        "Wronskian must be 1 through order 62"
    );

    let relation = &(&y(3, 2).pow(2) - &(&z(3) * &y(3, 1).pow(2))) + &y(3, 3);
    let args = vec![
        u1.clone(),
        u1.derivative(),
        u1.mul(&u1).antiderivative(BigRat::zero()),
    ];
    match verify_polynomial_relation(&relation, &args, 40).unwrap() {
        RelationVerdict::IdenticallyZeroToOrder(n) => assert!(n >= 40),
        other => panic!("closing identity failed: {:?}", other),
    }
    budget(start, 10, "criterion 9");
    println!("PASS criterion 9: displayed coefficients, Wronskian = 1, closing identity to order 40");
}

/// Criterion 10: growth classification over (300, 600) at N = 2000
/// excludes both the E-function and G-function classes.
#[test]
fn criterion_10_growth_exclusion() {
    let start = Instant::now();
    let (u1, _) = airy_basis(2000);
    let report = growth_classify(&u1, (300, 600)).unwrap();
    assert!(
        (report.alpha_hat - 1.0 / 3.0).abs() < 0.1,
        "alpha_hat = {}",
        report.alpha_hat
    );
    assert!(
        (report.beta_hat - 2.0 / 3.0).abs() < 0.1,
        "beta_hat = {}",
        report.beta_hat
    );
    assert_eq!(report.e_verdict, EVerdict::NotEFunction);
    assert_eq!(report.g_verdict, GVerdict::NotGFunction);
    budget(start, 60, "criterion 10");
    println!(
        "PASS criterion 10: alpha_hat = {:.4} ~ 1/3, beta_hat = {:.4} ~ 2/3",
        report.alpha_hat, report.beta_hat
    );
}

/// Criterion 11: every verb, run twice with structured output, produces
/// byte-identical reports.
#[test]
fn criterion_11_determinism() {
    let start = Instant::now();
    let commands: Vec<Vec<&str>> = vec![
        vec!["derive", "--field", "airy3", "--poly", "y1*y2"],
        vec!["cofactor", "--field", "airy-u2", "--poly", "y2^2 - z*y1^2 + y3"],
        vec!["darboux", "--field", "airy2", "--dz", "3", "--dy", "3", "--dw", "1"],
        vec!["first-integrals", "--field", "airy-u2", "--dz", "1", "--dy", "4"],
        vec!["lemma2", "--field", "airy2", "--dz", "3", "--dy", "3"],
        vec!["adjoint", "--op", "z*D^3 - 2*D + 5"],
        vec!["concomitant", "--op", "D^2 - z"],
        vec!["lagrange", "--op", "D^2 - z"],
        vec!["polysolve", "--op", "D^2 - z", "--rhs", "z^2"],
        vec!["ratsolve", "--op", "D^2 - z", "--rhs", "1"],
        vec!["riccati", "--op", "D^2 - z"],
        vec!["antider", "--op", "D^2 - z"],
        vec!["airy-series", "-N", "12"],
        vec![
            "verify-relation",
            "--poly",
            "y2^2 - z*y1^2 + y3",
            "--args",
            "u1, u1', int(u1^2)",
            "-N",
            "40",
        ],
        vec!["growth", "--window", "60,120", "-N", "300"],
        vec![
            "total-derivative",
            "--field",
            "airy-u2",
            "--poly",
            "y2^2 - z*y1^2 + y3",
            "--sols",
            "u1, u1', int(u1^2)",
            "-N",
            "30",
        ],
    ];
    for command in &commands {
        let mut args = command.clone();
        args.extend_from_slice(&["--format", "json"]);
        let (first, code1) = run_cli(&args);
        let (second, code2) = run_cli(&args);
        assert_eq!(first, second, "rerun of {:?} differs", command);
        assert_eq!(code1, code2, "exit codes of {:?} differ", command);
        assert!(
            serde_json::from_str::<serde_json::Value>(&first).is_ok(),
            "invalid JSON from {:?}",
            command
        );
    }
    budget(start, 120, "criterion 11");
    println!("PASS criterion 11: {} commands rerun byte-identically", commands.len());
}
