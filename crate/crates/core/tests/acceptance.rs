//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use residue_forge::boundary::{boundary_density, specialize_traces, BoundaryDensity, Theorem};
use residue_forge::clifford::{metric_pair, psi_instantiate, CliffordElement, PsiSpec};
use residue_forge::collar::{build_jets, c_xi, c_xi_prime, h1, xi};
use residue_forge::interior::{assemble_interior, f_trace_with, trace_e};
use residue_forge::oracle::gamma::{gamma_trace, to_matrix};
use residue_forge::oracle::quad::{mc_sphere, quad_line};
use residue_forge::oracle::{end_to_end, interior_oracle, OracleReport, CASE_BINDINGS, CASE_TOLERANCE};
use residue_forge::reference::{boundary_ledger, reduce_unit_sphere, LedgerStatus};
use residue_forge::report::{
    density_terms, parse_density, run, Format, Mode, PsiChoice, Report, RunConfig, TheoremChoice, DEFAULT_SEED,
};
use residue_forge::scalar::{names, GaussRat, Scalar, Sym};
use residue_forge::sphere::{integrate_sphere, monomial_moment};
use residue_forge::symbols::{compose, OperatorTag, SymbolContext, SymbolTerm};
use residue_forge::xin_rational::BoundaryRational;

const TRACE_SAMPLES: usize = 200;
const TRACE_TOLERANCE: f64 = 1e-10;
const TRACE_RUNTIME: Duration = Duration::from_secs(5);

const PI_PLUS_SAMPLES: usize = 100;
const LINE_SAMPLES: usize = 50;
const LINE_TOLERANCE: f64 = 1e-8;
const CONTOUR_RUNTIME: Duration = Duration::from_secs(30);

const MC_MONOMIALS: usize = 30;
const MC_SAMPLES: usize = 1_000_000;
const MC_SIGMAS: f64 = 3.0;

const END_TO_END_RUNTIME: Duration = Duration::from_secs(600);

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn rational(rng: &mut ChaCha8Rng) -> GaussRat {
    let re = GaussRat::frac(rng.gen_range(-9..=9), rng.gen_range(1..=6));
    let im = GaussRat::frac(rng.gen_range(-9..=9), rng.gen_range(1..=6));
    &re + &(&im * &GaussRat::i())
}

fn random_element(rng: &mut ChaCha8Rng) -> CliffordElement {
    let mut out = CliffordElement::zero(4);
    for mask in 0..16u32 {
        if rng.gen_bool(0.6) {
            out.add_blade(mask, &Scalar::constant(rational(rng)));
        }
    }
    out
}

fn denominator_lcm(a: &CliffordElement) -> i64 {
    use num_integer::Integer;
    a.terms()
        .map(|(_, c)| c.as_constant().expect("constant coefficients").denom_lcm())
        .fold(1i64, |acc, d| acc.lcm(&i64::try_from(d).expect("small denominators")))
}

fn complex_of(s: &Scalar) -> Complex64 {
    s.as_constant().map(|c| c.to_complex()).unwrap_or_else(|| panic!("not a constant: {s}"))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if b.norm() < 1e-9 {
        d
    } else {
        d / b.norm()
    }
}

/// 1. Symbolic spinor trace against the gamma-matrix model.
fn clifford_trace_suite() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let empty = HashMap::new();
    let mut worst: f64 = 0.0;
    for k in 0..TRACE_SAMPLES {
        let (a, b) = (random_element(&mut rng), random_element(&mut rng));
        let ab = &a * &b;
        let symbolic = complex_of(&ab.spinor_trace());
        let numeric = (e(to_matrix(&a, &empty))? * e(to_matrix(&b, &empty))?).trace();
        worst = worst.max(rel(symbolic, numeric));
        worst = worst.max(rel(complex_of(&a.spinor_trace()), e(gamma_trace(&a, &empty))?));
        ensure(ab.spinor_trace() == (&b * &a).spinor_trace(), || format!("trace not cyclic at sample {k}"))?;
        // Gaussian-integer coefficients after clearing denominators: both traces are exact integers.
        let la = GaussRat::from_ints(denominator_lcm(&a), 0);
        let lb = GaussRat::from_ints(denominator_lcm(&b), 0);
        let (ia, ib) = (a.scale_rat(&la), b.scale_rat(&lb));
        let exact = complex_of(&(&ia * &ib).spinor_trace());
        let float = (e(to_matrix(&ia, &empty))? * e(to_matrix(&ib, &empty))?).trace();
        ensure(exact == float, || format!("cleared traces differ at sample {k}: {exact} vs {float}"))?;
    }
    let elapsed = start.elapsed();
    ensure(worst <= TRACE_TOLERANCE, || format!("max rel. error {worst:e} > {TRACE_TOLERANCE:e}"))?;
    ensure(elapsed < TRACE_RUNTIME, || format!("runtime {elapsed:?} exceeds {TRACE_RUNTIME:?}"))?;
    Ok(format!("{TRACE_SAMPLES} products, max rel. error {worst:.1e}, cleared-denominator traces exact, {elapsed:.2?}"))
}

/// 2. The pair of normal-direction trace identities.
fn trace_identities() -> Result<String, String> {
    let jets = e(build_jets(4))?;
    let cp = c_xi_prime(4);
    let cn = CliffordElement::basis(4, 4);
    let dcp = &jets.d_xn_c_xi_prime;
    let first = (&(&(&cp * &cp) * &cn) * dcp).spinor_trace();
    let second = reduce_unit_sphere(&(&(&(&cn * &cp) * &cn) * dcp).spinor_trace());
    ensure(first.is_zero(), || format!("trace[c(xi')c(xi')c(dx_n)d_xn c(xi')] = {first}"))?;
    let want = h1().scale(&GaussRat::from_ints(-2, 0));
    ensure(second == want, || format!("trace[c(dx_n)c(xi')c(dx_n)d_xn c(xi')] = {second}, want {want}"))?;
    Ok("0 and -2 h1 on |xi'| = 1, exact".into())
}

fn random_rational(rng: &mut ChaCha8Rng, integrable: bool) -> BoundaryRational {
    let a = rng.gen_range(0..=3u32);
    let b = rng.gen_range(0..=3u32);
    let (a, b) = if integrable { (a.max(1), b.max(1)) } else { (a, b) };
    let max_deg = if integrable { a + b - 2 } else { a + b + 1 };
    let deg = rng.gen_range(0..=max_deg);
    let num = (0..=deg).map(|_| CliffordElement::scalar(4, Scalar::constant(rational(rng)))).collect();
    BoundaryRational::new(4, num, a, b)
}

/// 3. π⁺ projection, line and contour integrals.
fn contour_suite() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for k in 0..PI_PLUS_SAMPLES {
        let f = random_rational(&mut rng, false);
        let g = random_rational(&mut rng, false);
        let lambda = Scalar::constant(rational(&mut rng));
        let p = f.pi_plus();
        ensure(p.pi_plus().sub(&p).is_zero(), || format!("pi+ not idempotent at sample {k}"))?;
        let lin = f.add(&g.scale(&lambda)).pi_plus().sub(&p.add(&g.pi_plus().scale(&lambda)));
        ensure(lin.is_zero(), || format!("pi+ not linear at sample {k}"))?;
        let rebuilt = p.add(&f.pi_minus_poles()).add(&f.polynomial_part());
        ensure(rebuilt.sub(&f).is_zero(), || format!("partial fractions do not reconstruct sample {k}"))?;
    }
    let mut bindings = HashMap::new();
    bindings.insert(Sym::new(names::PI), Complex64::new(std::f64::consts::PI, 0.0));
    let mut worst: f64 = 0.0;
    for _ in 0..LINE_SAMPLES {
        let f = random_rational(&mut rng, true);
        let exact = e(e(f.line_integral())?.grade0().eval(&bindings))?;
        let numeric = e(quad_line(&f, &bindings))?;
        worst = worst.max(rel(exact, numeric));
    }
    ensure(worst <= LINE_TOLERANCE, || format!("line integral max rel. error {worst:e}"))?;
    let unit = CliffordElement::identity(4);
    let contour = BoundaryRational::new(4, vec![unit], 5, 2).contour_integral_upper().grade0();
    let want = Scalar::var(names::PI).scale(&(&GaussRat::frac(-5, 32) * &GaussRat::i()));
    ensure(contour == want, || format!("contour integral {contour}, want -5 pi i/32"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < CONTOUR_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "{PI_PLUS_SAMPLES} projections exact, {LINE_SAMPLES} line integrals max rel. error {worst:.1e}, contour -5*pi*i/32 exact, {elapsed:.2?}"
    ))
}

/// 4. Sphere moments, exact and against Monte-Carlo.
fn sphere_suite() -> Result<String, String> {
    let xi_s = |j: usize| Scalar::var(&names::xi(j));
    for j in 1..4 {
        for l in 1..4 {
            let got = e(integrate_sphere(&(xi_s(j) * xi_s(l)), 4))?.value(4);
            let want = if j == l { Scalar::var(names::OMEGA3).scale(&GaussRat::frac(1, 3)) } else { Scalar::zero() };
            ensure(got == want, || format!("int xi{j} xi{l} = {got}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut worst_sigma: f64 = 0.0;
    for _ in 0..MC_MONOMIALS {
        let exps: Vec<u32> = loop {
            let v: Vec<u32> = (0..3).map(|_| 2 * rng.gen_range(0..=2u32)).collect();
            if v.iter().sum::<u32>() > 0 {
                break v;
            }
        };
        let p = exps.iter().enumerate().fold(Scalar::one(), |acc, (j, &k)| acc * xi_s(j + 1).pow(k));
        let exact = monomial_moment(&exps, 4).ok_or("odd exponent")?.to_complex().re * 4.0 * std::f64::consts::PI;
        let symbolic = e(integrate_sphere(&p, 4))?.coefficient;
        ensure(complex_of(&symbolic).re * 4.0 * std::f64::consts::PI == exact, || "moment table disagrees".into())?;
        let est = e(mc_sphere(&p, MC_SAMPLES, &mut rng))?;
        let sigmas = (est.value - exact).abs() / est.std_error;
        worst_sigma = worst_sigma.max(sigmas);
        ensure(sigmas <= MC_SIGMAS, || {
            format!("exponents {exps:?}: {:.6} vs {exact:.6} ({sigmas:.2} sigma)", est.value)
        })?;
    }
    Ok(format!(
        "quadratic moments exact, {MC_MONOMIALS} even monomials within {worst_sigma:.2} sigma at {MC_SAMPLES} samples"
    ))
}

fn is_identity(t: &SymbolTerm) -> bool {
    t.same_value(&SymbolTerm::new(t.order, CliffordElement::identity(4), 0))
}

/// 5. Composition identities and the order-0 / order-(-1) product formulas.
fn composition_suite() -> Result<String, String> {
    let ctx = e(SymbolContext::new(PsiSpec::Generic))?;
    let d = e(ctx.preset(OperatorTag::D))?;
    for (name, q) in [("preset", e(ctx.preset(OperatorTag::DInv))?), ("parametrix", e(ctx.derived(OperatorTag::DInv))?)]
    {
        let p = e(compose(&d, &q, -1))?;
        ensure(is_identity(e(p.term(0))?) && e(p.term(-1))?.is_zero(), || format!("D o D^-1 ({name}) is not 1"))?;
    }
    let d3 = e(ctx.preset(OperatorTag::D3))?;
    let q3 = e(ctx.derived(OperatorTag::DInv3))?;
    let p = e(compose(&d3, &q3, q3.lowest_order() + d3.leading_order()))?;
    for t in p.terms() {
        let ok = if t.order == 0 { is_identity(t) } else { t.is_zero() };
        ensure(ok, || format!("D^3 o D^-3 has a wrong order-{} term", t.order))?;
    }

    let nn = e(ctx.preset(OperatorTag::NablaNabla))?;
    let inv2 = e(ctx.derived(OperatorTag::DInv2))?;
    let product = e(ctx.derived(OperatorTag::NablaNablaDInv2))?;
    let (s2, s1) = (e(nn.term(2))?, e(nn.term(1))?);
    let (q2, q3) = (e(inv2.term(-2))?, e(inv2.term(-3))?);
    // σ₀ = σ₂(∇∇)σ₋₂(D⁻²) = −Σ X_jY_l ξ_jξ_l / |ξ|².
    let dot = |v: &[Scalar]| v.iter().enumerate().fold(Scalar::zero(), |a, (j, c)| a + c * &xi(j + 1));
    let closed = SymbolTerm::new(0, CliffordElement::scalar(4, -(dot(&ctx.x) * dot(&ctx.y))), 1);
    ensure(e(product.term(0))?.same_value(&s2.mul(q2)), || "sigma_0 differs from sigma_2 sigma_-2".into())?;
    ensure(e(product.term(0))?.same_value(&closed), || "sigma_0 differs from its closed form".into())?;
    // σ₋₁ = σ₂σ₋₃ + σ₁σ₋₂ + Σ_j ∂_{ξ_j}σ₂ D_{x_j}σ₋₂; only j = n carries a jet at x₀.
    let d_xn_q2 = q2.jet.as_ref().ok_or("sigma_-2(D^-2) has no jet")?.scale(&-Scalar::i());
    let term_by_term = s2.mul(q3).add(&s1.mul(q2)).add(&s2.xi_derivative(4).without_jet().mul(&d_xn_q2));
    ensure(e(product.term(-1))?.same_value(&term_by_term), || "sigma_-1 differs from the three-term formula".into())?;
    for tag in [OperatorTag::DInv, OperatorTag::DInv2, OperatorTag::DInv3, OperatorTag::NablaNablaDInv2] {
        let (a, b) = (e(ctx.preset(tag))?, e(ctx.derived(tag))?);
        ensure(a.same_value(&b), || {
            format!("{}: closed form and parametrix differ at orders {:?}", tag.name(), a.differing_orders(&b))
        })?;
    }
    // σ₁(∇∇D⁻¹) = −i Σ X_jY_l ξ_jξ_l c(ξ) / |ξ|².
    let nn_inv = e(ctx.derived(OperatorTag::NablaNablaDInv))?;
    let closed1 = SymbolTerm::new(1, c_xi(4).scale(&(-(dot(&ctx.x) * dot(&ctx.y)) * Scalar::i())), 1);
    ensure(e(nn_inv.term(1))?.same_value(&closed1), || {
        "sigma_1(nabla nabla D^-1) differs from its closed form".into()
    })?;
    Ok("D o D^-1 = 1 to order -1, D^3 o D^-3 = 1 to stored depth, sigma_0 and sigma_-1 of nabla nabla D^-2 term-for-term, closed forms = parametrix".into())
}

fn generic_density(theorem: Theorem) -> &'static BoundaryDensity {
    static ONE: OnceLock<BoundaryDensity> = OnceLock::new();
    static TWO: OnceLock<BoundaryDensity> = OnceLock::new();
    let cell = if theorem == Theorem::One { &ONE } else { &TWO };
    cell.get_or_init(|| boundary_density(theorem, PsiSpec::Generic).expect("generic boundary density"))
}

fn generic_oracle(theorem: Theorem) -> &'static (Vec<OracleReport>, Duration) {
    static ONE: OnceLock<(Vec<OracleReport>, Duration)> = OnceLock::new();
    static TWO: OnceLock<(Vec<OracleReport>, Duration)> = OnceLock::new();
    let cell = if theorem == Theorem::One { &ONE } else { &TWO };
    cell.get_or_init(|| {
        let start = Instant::now();
        let r = end_to_end(theorem, PsiSpec::Generic, DEFAULT_SEED, CASE_BINDINGS).expect("end-to-end oracle");
        (r, start.elapsed())
    })
}

/// 6. The tangential-derivative cases vanish.
fn case_zeros() -> Result<String, String> {
    for t in [Theorem::One, Theorem::Two] {
        let c = &generic_density(t).cases[0];
        ensure(c.spec.alpha_len() == 1, || format!("first case of {t:?} is not the |alpha| = 1 case"))?;
        ensure(c.density.is_zero(), || format!("{t:?} case {} = {}", c.spec.label, c.density))?;
    }
    Ok("case (a)(I) = 0 and case (1) = 0 exactly".into())
}

/// 7. Closed-form structure of cases (a)(II) and (a)(III), with ledgered coefficients.
fn coefficient_reproduction() -> Result<String, String> {
    let d = generic_density(Theorem::One);
    let ledger = e(boundary_ledger(d))?;
    let (oracle, _) = generic_oracle(Theorem::One);
    let mut detail = Vec::new();
    for (idx, label) in [(1usize, "(a)(II)"), (2, "(a)(III)")] {
        let id = format!("thm1.case{label}");
        let entry = ledger.iter().find(|l| l.id == id).ok_or_else(|| format!("no ledger entry {id}"))?;
        ensure(matches!(entry.status, LedgerStatus::Match | LedgerStatus::StructureMatch), || {
            format!("{id}: monomial support differs (published {}, engine {})", entry.published, entry.engine)
        })?;
        ensure(!entry.published.is_empty() && !entry.engine.is_empty() && !entry.delta.is_empty(), || {
            format!("{id}: ledger entry lacks values")
        })?;
        let check = oracle
            .iter()
            .find(|r| r.id.contains(&format!("case {label} ")))
            .ok_or_else(|| format!("{id}: no oracle row"))?;
        ensure(check.pass, || format!("{id}: oracle rejects the engine value ({:e})", check.error))?;
        detail.push(format!("{label} {} [engine {}]", entry.status, d.cases[idx].density));
    }
    Ok(format!("{}; coefficient deltas ledgered, engine values oracle-confirmed", detail.join("; ")))
}

/// 8. End-to-end quadrature of every case of both theorems.
fn end_to_end_oracle() -> Result<String, String> {
    let mut parts = Vec::new();
    let mut total = Duration::ZERO;
    for t in [Theorem::One, Theorem::Two] {
        let (reports, elapsed) = generic_oracle(t);
        total += *elapsed;
        ensure(reports.len() == 5, || format!("{t:?}: {} cases", reports.len()))?;
        for r in reports {
            ensure(r.samples == CASE_BINDINGS && r.tolerance == CASE_TOLERANCE, || format!("{}: wrong sweep", r.id))?;
            ensure(r.pass, || format!("{}: rel. error {:e} > {:e}", r.id, r.error, r.tolerance))?;
        }
        let worst = reports.iter().map(|r| r.error).fold(0.0, f64::max);
        parts.push(format!("{t:?} max error {worst:.1e}"));
    }
    ensure(total < END_TO_END_RUNTIME, || format!("runtime {total:?}"))?;
    Ok(format!("10 cases x {CASE_BINDINGS} bindings, {}, {total:.1?}", parts.join(", ")))
}

/// 9. Interior traces and the Einstein coefficient.
fn interior_suite() -> Result<String, String> {
    let want = Scalar::var(names::SCAL) - Scalar::int(12) * Scalar::var("f").pow(2);
    let got = e(trace_e(PsiSpec::Scalar, 4))?;
    ensure(got == want, || format!("trace(E) = {got}"))?;
    for psi in [PsiSpec::Scalar, PsiSpec::OneField, PsiSpec::TwoField, PsiSpec::ThreeField] {
        let a = e(f_trace_with(psi, 4, "X", "Y"))?;
        let b = e(f_trace_with(psi, 4, "Y", "X"))?;
        ensure(a == -b, || format!("F not antisymmetric for {psi:?}"))?;
        for r in e(interior_oracle(psi, DEFAULT_SEED, 20))? {
            ensure(r.pass, || format!("{}: {:e}", r.id, r.error))?;
        }
    }
    let eg = e(assemble_interior(PsiSpec::Scalar, 4))?.eg_coefficient;
    ensure(eg == Scalar::var(names::PI).pow(2).scale(&GaussRat::frac(4, 3)), || format!("EG coefficient {eg}"))?;
    Ok("trace(E) = s - 12 f^2, F antisymmetric for all grades, EG coefficient 4 pi^2/3, gamma-model traces agree"
        .into())
}

fn field_symbols(s: &Scalar) -> BTreeSet<String> {
    s.symbols().into_iter().map(|x| x.name()).filter(|n| n.starts_with(['U', 'V', 'W', 'T'])).collect()
}

/// 10. Normal trace pairings for concrete perturbations and the specialized totals.
fn corollary_switches() -> Result<String, String> {
    let cn = CliffordElement::basis(4, 4);
    let tn = |psi| -> Result<Scalar, String> { Ok((&cn * &e(psi_instantiate(psi, 4))?).spinor_trace()) };
    ensure(e(tn(PsiSpec::Scalar))?.is_zero(), || "scalar Tn".into())?;
    ensure(e(tn(PsiSpec::TwoField))?.is_zero(), || "two-field Tn".into())?;
    ensure(tn(PsiSpec::OneField)? == Scalar::int(-4) * Scalar::var("U4"), || "one-field Tn".into())?;
    let three = (Scalar::var("U4") * metric_pair(4, "V", "W") - Scalar::var("V4") * metric_pair(4, "U", "W")
        + Scalar::var("W4") * metric_pair(4, "U", "V"))
    .scale(&GaussRat::from_ints(4, 0));
    ensure(tn(PsiSpec::ThreeField)? == three, || "three-field Tn".into())?;
    let mut tn_notes = Vec::new();
    for t in [Theorem::One, Theorem::Two] {
        let generic = &generic_density(t).total;
        for psi in [PsiSpec::Scalar, PsiSpec::OneField, PsiSpec::TwoField, PsiSpec::ThreeField] {
            let concrete = e(boundary_density(t, psi))?.total;
            let specialized = e(specialize_traces(generic, psi, 4))?;
            ensure(concrete == specialized, || {
                format!("{t:?} {psi:?}: concrete total differs from specialized generic total")
            })?;
            if matches!(psi, PsiSpec::Scalar | PsiSpec::TwoField) {
                let f = field_symbols(&concrete);
                ensure(f.is_empty(), || format!("{t:?} {psi:?}: perturbation survives in {f:?}"))?;
            }
        }
        let tn_coeff = generic.coefficients_in(Sym::new("T4")).into_iter().skip(1).fold(Scalar::zero(), |a, c| a + c);
        tn_notes.push(format!("{t:?} generic Tn coefficient {tn_coeff}"));
    }
    Ok(format!("Tn = 0 (f, bivector), -4 U4 (vector), 4[U4 g(V,W) - V4 g(U,W) + W4 g(U,V)] (trivector); concrete totals = specialized generic totals; {}", tn_notes.join(", ")))
}

fn check_terms(v: &Value, path: &str) -> Result<(), String> {
    let arr = v.as_array().ok_or_else(|| format!("{path}: not an array"))?;
    for t in arr {
        let m = t.get("monomial").and_then(Value::as_object).ok_or_else(|| format!("{path}: monomial"))?;
        ensure(m.values().all(|x| x.as_u64().is_some_and(|k| k > 0)), || format!("{path}: exponents"))?;
        for part in ["re", "im"] {
            let s = t.get(part).and_then(Value::as_str).ok_or_else(|| format!("{path}: {part}"))?;
            e(residue_forge::scalar::parse_rational(s))?;
        }
    }
    Ok(())
}

fn validate_schema(json: &str) -> Result<Value, String> {
    let v: Value = e(serde_json::from_str(json))?;
    for key in ["theorem", "psi", "mode", "seed", "density", "cases", "interior", "tn", "ledger", "oracle", "timing"] {
        ensure(v.get(key).is_some(), || format!("missing key {key}"))?;
    }
    check_terms(&v["density"], "density")?;
    check_terms(&v["tn"], "tn")?;
    for c in v["cases"].as_array().ok_or("cases")? {
        check_terms(&c["density"], "cases.density")?;
    }
    if !v["interior"].is_null() {
        for k in ["eg_coefficient", "f_term", "trace_e", "trace_e_term"] {
            check_terms(&v["interior"][k], k)?;
        }
    }
    for l in v["ledger"].as_array().ok_or("ledger")? {
        for k in ["id", "published", "engine", "delta", "status", "note"] {
            ensure(l.get(k).is_some_and(Value::is_string), || format!("ledger.{k}"))?;
        }
    }
    for r in v["oracle"].as_array().ok_or("oracle")? {
        for k in ["id", "symbolic", "numeric", "error", "tolerance", "pass", "seed", "samples"] {
            ensure(r.get(k).is_some(), || format!("oracle.{k}"))?;
        }
    }
    Ok(v)
}

fn first_difference(a: &Report, b: &Report) -> String {
    let (x, y) = (serde_json::to_value(a).unwrap_or_default(), serde_json::to_value(b).unwrap_or_default());
    let (Value::Object(x), Value::Object(y)) = (x, y) else { return "not objects".into() };
    x.iter()
        .find(|(k, v)| y.get(*k) != Some(*v))
        .map(|(k, _)| k.clone())
        .unwrap_or_else(|| format!("{:?} vs {:?}", a.oracle, b.oracle))
}

fn without_timing(json: &str) -> Result<Value, String> {
    let mut v: Value = e(serde_json::from_str(json))?;
    v.as_object_mut().ok_or("not an object")?.remove("timing");
    Ok(v)
}

/// 11. Every flag combination, round trip and determinism.
fn cli_contract() -> Result<String, String> {
    let theorems = [TheoremChoice::One, TheoremChoice::Two, TheoremChoice::Interior];
    let psis = [PsiChoice::Generic, PsiChoice::F, PsiChoice::Vector, PsiChoice::Bivector, PsiChoice::Trivector];
    let modes = [Mode::Symbolic, Mode::Verify, Mode::Both];
    let (mut ok, mut usage) = (0, 0);
    for &theorem in &theorems {
        for &psi in &psis {
            for &mode in &modes {
                let cfg = RunConfig { theorem, psi, mode, seed: DEFAULT_SEED, format: Format::Both, out: None };
                let out = match run(&cfg) {
                    Err(residue_forge::error::Error::Usage(_))
                        if theorem == TheoremChoice::Interior && psi == PsiChoice::Generic =>
                    {
                        usage += 1;
                        continue;
                    }
                    other => e(other)?,
                };
                let tag = format!("{theorem:?}/{psi:?}/{mode:?}");
                let json = out.json.as_deref().ok_or("no json")?;
                let v = validate_schema(json).map_err(|m| format!("{tag}: {m}"))?;
                ensure(mode != Mode::Verify || v["ledger"].as_array().is_some_and(Vec::is_empty), || {
                    format!("{tag}: ledger in verify mode")
                })?;
                ensure(mode == Mode::Symbolic || !out.report.oracle.is_empty(), || format!("{tag}: no oracle rows"))?;
                ensure(out.all_pass, || format!("{tag}: oracle failure"))?;
                let back = e(Report::from_json(json))?;
                ensure(back == out.report, || {
                    format!("{tag}: JSON round trip differs: {}", first_difference(&back, &out.report))
                })?;
                let density = e(parse_density(&back.density))?;
                ensure(density_terms(&density) == out.report.density, || format!("{tag}: density not canonical"))?;
                if psi == PsiChoice::Bivector && theorem != TheoremChoice::Interior {
                    ensure(back.tn.is_empty(), || format!("{tag}: Tn not recorded as 0"))?;
                }
                ok += 1;
            }
        }
    }
    // In-memory density equals the engine's density after the round trip.
    let one = run(&RunConfig { mode: Mode::Symbolic, ..RunConfig::default() }).map_err(|x| x.to_string())?;
    let parsed = e(Report::from_json(one.json.as_deref().ok_or("json")?))?;
    ensure(e(parsed.density_scalar())? == generic_density(Theorem::One).total, || {
        "theorem 1 density round trip".into()
    })?;
    // Determinism in-process.
    for cfg in [
        RunConfig { mode: Mode::Symbolic, format: Format::Both, ..RunConfig::default() },
        RunConfig {
            theorem: TheoremChoice::Interior,
            psi: PsiChoice::Vector,
            format: Format::Both,
            ..RunConfig::default()
        },
    ] {
        let (a, b) = (e(run(&cfg))?, e(run(&cfg))?);
        ensure(without_timing(a.json.as_deref().unwrap())? == without_timing(b.json.as_deref().unwrap())?, || {
            "json differs across runs".into()
        })?;
        ensure(a.latex == b.latex, || "latex differs across runs".into())?;
    }
    let cli = cli_binary()?;
    Ok(format!("{ok} combinations schema-valid and round-trip exact, {usage} interior/generic usage errors; {cli}"))
}

fn cli_binary() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_residue-forge");
    let dir = e(tempfile::tempdir())?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let stem = dir.path().join(format!("run{k}"));
        let status = e(Command::new(bin)
            .args(["--theorem", "interior", "--psi", "f", "--mode", "both", "--seed", "7", "--format", "both", "--out"])
            .arg(&stem)
            .env_remove("RESIDUE_FORGE_SEED")
            .status())?;
        ensure(status.code() == Some(0), || format!("exit {:?}", status.code()))?;
        let json = e(std::fs::read_to_string(stem.with_extension("json")))?;
        let tex = e(std::fs::read_to_string(stem.with_extension("tex")))?;
        validate_schema(&json)?;
        outputs.push((without_timing(&json)?, tex));
    }
    ensure(outputs[0] == outputs[1], || "CLI output differs across runs".into())?;
    for format in ["json", "latex"] {
        let o = e(Command::new(bin)
            .args(["--theorem", "interior", "--psi", "vector", "--mode", "symbolic", "--format", format])
            .output())?;
        ensure(o.status.code() == Some(0), || format!("--format {format}: exit {:?}", o.status.code()))?;
        let text = String::from_utf8_lossy(&o.stdout);
        let looks_right =
            if format == "json" { validate_schema(&text).is_ok() } else { text.contains("\\begin{align*}") };
        ensure(looks_right, || format!("--format {format} stdout"))?;
    }
    let o = e(Command::new(bin)
        .args(["--theorem", "interior", "--psi", "f", "--mode", "symbolic"])
        .env("RESIDUE_FORGE_SEED", "99")
        .output())?;
    let v = validate_schema(&String::from_utf8_lossy(&o.stdout))?;
    ensure(v["seed"] == 99, || "RESIDUE_FORGE_SEED did not override".into())?;
    let usage = e(Command::new(bin).args(["--theorem", "interior", "--psi", "generic"]).output())?;
    ensure(usage.status.code() == Some(2), || format!("interior/generic exit {:?}", usage.status.code()))?;
    let bad = e(Command::new(bin).args(["--psi", "spinor"]).output())?;
    ensure(bad.status.code() == Some(2), || format!("bad flag exit {:?}", bad.status.code()))?;
    Ok("binary: --out files deterministic, json/latex stdout, env override, exit 2 on usage".into())
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let checks: [(u8, &str, Check); 11] = [
        (1, "clifford trace", clifford_trace_suite),
        (2, "trace identities", trace_identities),
        (3, "pi+ and contour", contour_suite),
        (4, "sphere moments", sphere_suite),
        (5, "composition", composition_suite),
        (6, "case zeros", case_zeros),
        (7, "closed-form cases", coefficient_reproduction),
        (8, "end-to-end oracle", end_to_end_oracle),
        (9, "interior", interior_suite),
        (10, "corollary switches", corollary_switches),
        (11, "cli contract", cli_contract),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {id:>2} ({name}): {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({name}): {msg} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
