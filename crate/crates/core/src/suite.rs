//! Seeded identity suites over the monomial basis and random elements.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::exterior::{Exterior, Form};
use crate::fock::{lift_by_average, lift_by_transpositions, pi_sigma, symmetrize, BraidOperator, Permutation, TensorState};
use crate::ncalgebra::{NCPoly, NormalFormEngine, Word};
use crate::operators::{check_box_commutes, check_dirac_square, check_raised_exchange, verify_gammas, GammaSet, SpinorPoly};
use crate::report::{Check, Report};
use crate::scalar::Scalar;
use crate::structures::StructureData;

pub const DEFAULT_SEED: u64 = 42;

/// Random samples per randomized check.
const SAMPLES: usize = 6;

/// Small Gaussian rational, nonzero.
pub fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let re = (rng.gen_range(-4..=4), rng.gen_range(1..=3));
        let im = if rng.gen_bool(0.5) { (rng.gen_range(-3..=3), rng.gen_range(1..=2)) } else { (0, 1) };
        let s = Scalar::from_parts(re, im);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Random normal-form polynomial with up to `terms` monomials of degree `≤ max_degree`.
pub fn random_poly(engine: &NormalFormEngine, max_degree: usize, terms: usize, rng: &mut ChaCha8Rng) -> NCPoly {
    let top = max_degree.min(engine.cutoff());
    let mut p = NCPoly::zero();
    for _ in 0..terms {
        let d = rng.gen_range(0..=top);
        let words = engine.complement_words(d);
        if words.is_empty() {
            continue;
        }
        let w = words[rng.gen_range(0..words.len())].clone();
        p.add_term(w, &random_scalar(rng));
    }
    p
}

fn random_form(ext: &Exterior, degree: usize, poly_degree: usize, rng: &mut ChaCha8Rng) -> Result<Form> {
    let engine = ext.calculus().engine();
    let mut f = ext.zero(degree)?;
    for c in f.coeffs.iter_mut() {
        if rng.gen_bool(0.6) {
            *c = random_poly(engine, poly_degree, 2, rng);
        }
    }
    Ok(f)
}

/// Every normal word of degree `≤ degree`, as polynomials.
pub fn monomial_basis(engine: &NormalFormEngine, degree: usize) -> Vec<NCPoly> {
    (0..=degree.min(engine.cutoff())).flat_map(|d| engine.complement_words(d)).map(NCPoly::word).collect()
}

/// First failure over `inputs`, or success.
fn over<T>(inputs: &[T], mut f: impl FnMut(&T) -> core::result::Result<(), String>) -> core::result::Result<(), String> {
    inputs.iter().try_for_each(&mut f)
}

fn lift<T>(r: Result<T>) -> core::result::Result<T, String> {
    r.map_err(|e| format!("{e}"))
}

/// The calculus and exterior identities on the monomial basis up to `degree` plus seeded
/// random polynomials and forms.
pub fn calculus_suite(calc: &Calculus, degree: usize, seed: u64) -> Result<Report> {
    let engine = calc.engine();
    let cutoff = engine.cutoff();
    if degree + 1 > cutoff {
        return Err(Error::CutoffExceeded { degree: degree + 1, cutoff });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = monomial_basis(engine, degree);
    for _ in 0..SAMPLES {
        inputs.push(random_poly(engine, degree, 4, &mut rng));
    }
    let mut report = Report::new();
    report.push(Check::from_result(
        "∂_i(x^k a) = δ^k_i a + (R^{kl}_{in} x^n + Z^{kl}_i) ∂_l a",
        over(&inputs, |a| calc.check_leibniz_generator(a)),
    ));
    let pairs: Vec<(NCPoly, NCPoly)> = (0..SAMPLES)
        .map(|_| {
            let da = rng.gen_range(0..=degree / 2);
            (random_poly(engine, da, 3, &mut rng), random_poly(engine, degree - da, 3, &mut rng))
        })
        .collect();
    report.push(Check::from_result("d(ab) = a db + (da) b", over(&pairs, |(a, b)| calc.check_leibniz(a, b))));
    report.push(Check::from_result("∂_l ∂_k a = R^{ij}_{kl} ∂_j ∂_i a", over(&inputs, |a| calc.check_derivative_braid(a))));
    report.push(Check::from_result("□ ∂_k = ∂_k □ and □ ∂^k = ∂^k □", over(&inputs, |a| check_box_commutes(calc, a))));
    report.push(Check::from_result(
        "∂^j x^k = g^{jk} + R^{jk}_{ab} x^a ∂^b - (RZ)^{jk}_b ∂^b",
        over(&inputs, |a| check_raised_exchange(calc, a)),
    ));
    report.push(Check::from_result(
        "∂_c ρ_a^t(f) = R^{bd}_{ac} ρ_d^t(∂_b f)",
        over(&inputs, |a| calc.check_twist_exchange(a)),
    ));
    report.extend(exterior_suite(calc, degree, &mut rng)?);
    Ok(report)
}

fn exterior_suite(calc: &Calculus, degree: usize, rng: &mut ChaCha8Rng) -> Result<Report> {
    let ext = Exterior::new(calc, 4)?;
    let engine = calc.engine();
    let mut report = Report::new();

    let mut forms: Vec<Form> = monomial_basis(engine, degree).iter().map(|a| ext.function(a)).collect::<Result<_>>()?;
    for k in 1..=2 {
        for _ in 0..SAMPLES {
            forms.push(random_form(&ext, k, 2, rng)?);
        }
    }
    report.push(Check::from_result("dd = 0", over(&forms, |w| ext.check_dd(w))));

    let mut pairs = Vec::new();
    for (k, l) in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)] {
        for _ in 0..SAMPLES / 2 {
            pairs.push((random_form(&ext, k, 1, rng)?, random_form(&ext, l, 1, rng)?));
        }
    }
    report.push(Check::from_result(
        "d(ω∧θ) = dω∧θ + (-1)^{|ω|} ω∧dθ",
        over(&pairs, |(w, t)| ext.check_graded_leibniz(w, t)),
    ));
    report.extend(ext.verify());

    if calc.structure().star() && calc.star_status().is_ok() {
        let mut forms = Vec::new();
        for k in 0..=2 {
            for _ in 0..SAMPLES / 2 {
                forms.push(random_form(&ext, k, 1, rng)?);
            }
        }
        report.push(Check::from_result(
            "star is an involution on forms",
            over(&forms, |w| {
                let back = lift(ext.star_form(&lift(ext.star_form(w))?))?;
                if back == *w { Ok(()) } else { Err(format!("degree {} form", w.degree)) }
            }),
        ));
        report.push(Check::from_result(
            "d(θ*) = (dθ)*",
            over(&forms, |w| {
                let a = lift(ext.d(&lift(ext.star_form(w))?))?;
                let b = lift(ext.star_form(&lift(ext.d(w))?))?;
                if a == b { Ok(()) } else { Err(format!("degree {} form", w.degree)) }
            }),
        ));
        let pairs: Vec<(Form, Form)> = forms.iter().zip(forms.iter().rev()).filter(|(a, b)| a.degree + b.degree <= 3).map(|(a, b)| (a.clone(), b.clone())).collect();
        report.push(Check::from_result(
            "(θ∧θ′)* = (-1)^{kl} θ′*∧θ*",
            over(&pairs, |(a, b)| {
                let lhs = lift(ext.star_form(&lift(ext.wedge(a, b))?))?;
                let sign = if (a.degree * b.degree) % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
                let rhs = lift(ext.wedge(&lift(ext.star_form(b))?, &lift(ext.star_form(a))?))?.scale(&sign);
                if lhs == rhs { Ok(()) } else { Err(format!("degrees ({}, {})", a.degree, b.degree)) }
            }),
        ));
    }
    Ok(report)
}

/// Clifford relations and `∂̸² = □·1` on seeded random spinors of degree `≤ degree`.
pub fn dirac_suite(calc: &Calculus, gs: &GammaSet, degree: usize, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = verify_gammas(calc.structure(), gs);
    let spinors: Vec<SpinorPoly> = (0..SAMPLES)
        .map(|_| SpinorPoly((0..gs.dim()).map(|_| random_poly(calc.engine(), degree, 3, &mut rng)).collect()))
        .collect();
    report.push(Check::from_result("∂̸² = □·1", over(&spinors, |phi| check_dirac_square(calc, gs, phi))));
    Ok(report)
}

fn random_state(engine: &NormalFormEngine, slots: usize, rng: &mut ChaCha8Rng) -> TensorState {
    let mut out = TensorState::zero(slots);
    for _ in 0..3 {
        let ws: Vec<Word> = (0..slots)
            .map(|_| {
                let d = rng.gen_range(0..=1usize.min(engine.cutoff()));
                let words = engine.complement_words(d);
                words[rng.gen_range(0..words.len())].clone()
            })
            .collect();
        out.add_term(ws, &random_scalar(rng));
    }
    out
}

/// Braid axioms, the representation property of `π` and agreement of the two lift formulas
/// for `n ≤ n_max`.
pub fn fock_suite(calc: &Calculus, k: &BraidOperator, n_max: usize, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let engine = calc.engine();
    let mut report = k.report().clone();
    if !report.all_passed() {
        return Ok(report);
    }
    let mut rep = Ok(());
    let mut lifts = Ok(());
    let mut boson = Ok(());
    for n in 1..=n_max {
        let perms = Permutation::all(n);
        for _ in 0..SAMPLES {
            let s = &perms[rng.gen_range(0..perms.len())];
            let t = &perms[rng.gen_range(0..perms.len())];
            let psi = random_state(engine, n, &mut rng);
            let lhs = pi_sigma(k, s, &pi_sigma(k, t, &psi)?)?;
            if rep.is_ok() && lhs != pi_sigma(k, &s.compose(t), &psi)? {
                rep = Err(format!("n={n} σ={:?} σ′={:?}", s.images(), t.images()));
            }
        }
        for _ in 0..2 {
            let j = rng.gen_range(0..calc.n());
            let psi = symmetrize(k, &random_state(engine, n, &mut rng))?;
            let mut w = |a: &NCPoly| calc.partial(j, a);
            let a = lift_by_transpositions(k, &mut w, &psi)?;
            let b = lift_by_average(k, &mut w, &psi)?;
            if lifts.is_ok() && a != b {
                lifts = Err(format!("n={n} W=∂_{j}"));
            }
            if boson.is_ok() && symmetrize(k, &a)? != a {
                boson = Err(format!("n={n} W=∂_{j}"));
            }
        }
    }
    report.push(Check::from_result(format!("π_σ π_σ′ = π_{{σσ′}} for n ≤ {n_max}"), rep));
    report.push(Check::from_result(
        format!("Σ_m π_(1,m) W π_(1,m) = (1/(n-1)!) Σ_σ π_σ W π_σ⁻¹ on symmetric states, n ≤ {n_max}"),
        lifts,
    ));
    report.push(Check::from_result("lifted operators preserve the boson subspace", boson));
    Ok(report)
}

/// The two well-definedness gates: `ℒ` annihilates the relation generators, and the star
/// maps the ideal into itself.
pub fn gate_report(sd: &StructureData) -> Report {
    let mut report = Report::new();
    let name = "ℒ(q_β) = 0 for every relation generator";
    match NormalFormEngine::build(sd) {
        Err(e) => {
            report.push(Check::fail(name, format!("{e}")));
            report.push(Check::fail("star maps the ideal into itself", format!("{e}")));
        }
        Ok(engine) => {
            let star = engine.star_status().map_err(String::from);
            match Calculus::with_engine(sd, engine) {
                Ok(_) => report.push(Check::pass(name)),
                Err(e) => report.push(Check::fail(name, format!("{e}"))),
            }
            report.push(Check::from_result("star maps the ideal into itself", star));
        }
    }
    report
}
