//! Acceptance suite. Runs each criterion in sequence, prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Rational64;
use osculate::elliptic::Lattice;
use osculate::invariants::{
    check_kdv, construct_types, enumerate_types, family_params, CoverInvariants, Family, FamilySpec,
};
use osculate::kdv::{kdv_residual, monodromy_defect, Grid, TimeDerivative, TravelingWave};
use osculate::picard::{
    cover_class, exceptional_class, parity_exceptional_index, tilde_genus, TauInvariantClass,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEGENDRE_TOL: f64 = 1e-9;
const LEGENDRE_BUDGET: Duration = Duration::from_secs(5);
const QUASI_PERIOD_TOL: f64 = 1e-9;
const MONODROMY_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-6;
const WRONG_SPEED_FLOOR: f64 = 1e-2;
const ENUMERATION_BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// A random lattice: `ω₁` of modulus in [0.3, 2] and any argument, and
/// `ω₂ = τω₁` with `Re τ ∈ [−1, 1]`, `Im τ ∈ [0.25, 3]`.
fn random_lattice(rng: &mut ChaCha8Rng) -> Lattice {
    let w1 = Complex64::from_polar(rng.gen_range(0.3..2.0), rng.gen_range(-PI..PI));
    let tau = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.25..3.0));
    Lattice::new(w1, tau * w1).expect("random lattice is non-degenerate")
}

/// A random point of the fundamental cell at least a tenth of the shortest
/// period away from the lattice.
fn random_point(rng: &mut ChaCha8Rng, l: &Lattice) -> Complex64 {
    loop {
        let z =
            rng.gen_range(0.0..1.0) * 2.0 * l.omega1() + rng.gen_range(0.0..1.0) * 2.0 * l.omega2();
        if l.distance_to_lattice(z) > 0.1 * l.min_period() {
            return z;
        }
    }
}

fn legendre_relation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let lattices: Vec<Lattice> = (0..100).map(|_| random_lattice(&mut rng)).collect();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for l in &lattices {
        worst = worst.max(l.legendre_defect().map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed();
    let msg = format!("max defect {worst:.3e}, {:.2} s", elapsed.as_secs_f64());
    if worst < LEGENDRE_TOL && elapsed < LEGENDRE_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn quasi_periodicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let l = random_lattice(&mut rng);
        let q = l.quasi_periods().map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let z = random_point(&mut rng, &l);
            let z0 = l.zeta(z).map_err(|e| e.to_string())?;
            for (w, eta) in [(l.omega1(), q.eta1), (l.omega2(), q.eta2)] {
                let z1 = l.zeta(z + 2.0 * w).map_err(|e| e.to_string())?;
                worst = worst.max((z1 - z0 - eta).norm());
            }
        }
    }
    let msg = format!("max defect {worst:.3e} over 100 lattices x 20 points");
    if worst < QUASI_PERIOD_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn monodromy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let l = random_lattice(&mut rng);
        for _ in 0..20 {
            let z = random_point(&mut rng, &l);
            for j in 1..=2 {
                for k in 1..=2 {
                    worst = worst.max(monodromy_defect(&l, j, k, z).map_err(|e| e.to_string())?);
                }
            }
        }
    }
    let msg = format!("max defect {worst:.3e} over 50 lattices x 20 points");
    if worst < MONODROMY_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn kdv_residuals() -> Outcome {
    let lattices = [
        Lattice::square(),
        Lattice::new(Complex64::new(0.6, 0.1), Complex64::new(0.25, 0.8)).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    let mut wrong = f64::INFINITY;
    for l in &lattices {
        for level in [0.0, 1.0, -0.7] {
            let w = TravelingWave::new(l.clone(), Complex64::new(level, 0.0));
            let g = Grid::for_wave(&w, 200, 20);
            for time in [TimeDerivative::FiniteDifference, TimeDerivative::ChainRule] {
                worst = worst.max(kdv_residual(&w, &g, time).map_err(|e| e.to_string())?);
            }
            let off = w.clone().with_speed(w.speed + 0.5);
            let g = Grid::for_wave(&off, 200, 20);
            let r = kdv_residual(&off, &g, TimeDerivative::FiniteDifference)
                .map_err(|e| e.to_string())?;
            wrong = wrong.min(r);
        }
    }
    let msg = format!("max residual {worst:.3e}, min wrong-speed residual {wrong:.3e}");
    if worst < RESIDUAL_TOL && wrong > WRONG_SPEED_FLOOR {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn rational_target(n: i64, d: i64) -> i64 {
    (2 * d - 1) * (2 * n - 2) + 3
}

fn genus_equivalence() -> Outcome {
    let mut checked = 0u64;
    let mut adjunction = 0u64;
    for n in 1..=10i64 {
        for d in 1..=4i64 {
            let target = rational_target(n, d);
            let side = (target as f64).sqrt() as i64;
            for rho in (1..2 * d).step_by(2) {
                for a in ((n + 1) % 2..=side).step_by(2) {
                    for b in (n % 2..=side).step_by(2) {
                        for c in (n % 2..=side).step_by(2) {
                            for e in (n % 2..=side).step_by(2) {
                                let gamma = [a, b, c, e];
                                let g2 = a * a + b * b + c * c + e * e;
                                let cl =
                                    cover_class(n, d, rho, gamma).map_err(|e| e.to_string())?;
                                let got = tilde_genus(&cl).map_err(|e| e.to_string())?;
                                let closed = Rational64::new(
                                    (2 * d - 1) * (2 * n - 2) + 4 - rho * rho - g2,
                                    4,
                                );
                                if got != closed {
                                    return Err(format!(
                                        "n={n} d={d} ρ={rho} γ={gamma:?}: {got} != {closed}"
                                    ));
                                }
                                checked += 1;
                                if rho == 1 && g2 == target {
                                    let g1 = a + b + c + e;
                                    if cl.adjunction_genus() != Rational64::new(g1 - 1, 2) {
                                        return Err(format!("adjunction genus at γ={gamma:?}"));
                                    }
                                    adjunction += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checked} classes, {adjunction} adjunction checks"))
}

fn exceptional_curves() -> Outcome {
    let mut checked = 0;
    for a in 0..=10i64 {
        for b in 0..=10i64 {
            for c in 0..=10i64 {
                for e in 0..=10i64 {
                    let alpha = [a, b, c, e];
                    let a2 = a * a + b * b + c * c + e * e;
                    if a2 > 101 || a2 % 2 == 0 || parity_exceptional_index(&alpha).is_none() {
                        continue;
                    }
                    let cl = exceptional_class(alpha).map_err(|e| e.to_string())?;
                    let t = TauInvariantClass::new(cl).map_err(|e| e.to_string())?;
                    if t.lambda_square() != -1 || t.lambda_dot_canonical() != -1 {
                        return Err(format!(
                            "α={alpha:?}: Λ² = {}, Λ·K = {}",
                            t.lambda_square(),
                            t.lambda_dot_canonical()
                        ));
                    }
                    checked += 1;
                }
            }
        }
    }
    if checked == 0 {
        return Err("no α checked".into());
    }
    Ok(format!("{checked} vectors"))
}

fn random_mu(rng: &mut ChaCha8Rng) -> [i64; 4] {
    let m0: i64 = rng.gen_range(0..7);
    let mut mu = [m0, 0, 0, 0];
    for m in mu.iter_mut().skip(1) {
        *m = 2 * rng.gen_range(0..4) + (m0 + 1) % 2;
    }
    mu
}

fn generator_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut outputs = 0;
    let mut closed = 0;
    for d in 2..=5i64 {
        let q = 2 * d - 1;
        for k in 0..=3usize {
            for _ in 0..50 {
                let mu = random_mu(&mut rng);
                let out = construct_types(d, k, mu).map_err(|e| e.to_string())?;
                for t in &out {
                    let c = &t.cover;
                    let fresh = check_kdv(&CoverInvariants {
                        n: c.n,
                        d,
                        g: c.g,
                        rho: 1,
                        m: 1,
                        gamma: c.gamma,
                    });
                    if !fresh.admissible() || !c.report.admissible() {
                        return Err(format!("d={d} k={k} μ={mu:?}: γ={} rejected", c.gamma));
                    }
                    outputs += 1;
                }
                let mut eps = [2 * d - 2; 4];
                eps[k] = 0;
                let gamma: Vec<i64> = (0..4).map(|i| q * mu[i] + eps[i]).collect();
                let Some(t) = out
                    .iter()
                    .find(|t| t.cover.gamma.components().as_slice() == gamma)
                else {
                    continue;
                };
                let mu1: i64 = mu.iter().sum();
                let mu2: i64 = mu.iter().map(|x| x * x).sum();
                let others: i64 = (0..4).filter(|&i| i != k).map(|i| mu[i]).sum();
                let g_ok = 2 * t.cover.g + 1 == q * mu1 + 6 * (d - 1);
                let n_ok = 2 * t.cover.n == q * mu2 + 4 * (d - 1) * others + 6 * d - 7;
                if !(g_ok && n_ok) {
                    return Err(format!("closed forms fail at d={d} k={k} μ={mu:?}"));
                }
                closed += 1;
            }
        }
    }
    if closed == 0 {
        return Err("closed-form pattern never produced".into());
    }
    Ok(format!(
        "{outputs} generated types, {closed} closed-form matches"
    ))
}

/// A random α admissible for `family`.
fn random_spec(rng: &mut ChaCha8Rng, family: Family) -> FamilySpec {
    loop {
        let alpha: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..8));
        let a1: i64 = alpha.iter().sum();
        let mut spec = FamilySpec {
            family,
            alpha,
            at_half_period: false,
            j0: None,
        };
        let ok = match family {
            Family::NlsOdd => {
                spec.at_half_period = rng.gen_bool(0.5);
                true
            }
            Family::NlsEven => {
                spec.at_half_period = a1 % 2 == 1;
                alpha != [0; 4]
            }
            Family::SineGordonEvenDistinct => (alpha[2] + alpha[3]) % 2 == 1,
            Family::SineGordonOddDistinct => (alpha[0] + alpha[1]) % 2 == 0,
            Family::SineGordonEvenSame => {
                let j0 = rng.gen_range(1..=3);
                spec.j0 = Some(j0);
                (0..4).all(|i| i == j0 || (alpha[j0] + 1 - alpha[i]) % 2 == 0)
            }
            Family::SineGordonOddSame => true,
        };
        if ok {
            return spec;
        }
    }
}

/// The genus restriction for the case a family lands in, computed from
/// `(g, n)` alone.
fn restriction_holds(family: Family, spec: &FamilySpec, g: i64, n: i64) -> bool {
    let same = match family {
        Family::NlsOdd | Family::NlsEven => spec.at_half_period,
        Family::SineGordonEvenSame | Family::SineGordonOddSame => true,
        _ => false,
    };
    let bound = match (same, n % 2 == 0) {
        (false, _) => 4 * n,
        (true, true) => 4 * n - 4,
        (true, false) => 4 * n - 8,
    };
    match family {
        Family::NlsOdd | Family::NlsEven => (g + 1) * (g + 1) <= bound,
        _ => g * g <= bound,
    }
}

fn family_maps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for family in Family::ALL {
        for _ in 0..200 {
            let spec = random_spec(&mut rng, family);
            let out = family_params(&spec).map_err(|e| format!("{family} {spec:?}: {e}"))?;
            if !out.report.admissible() || !restriction_holds(family, &spec, out.g, out.n) {
                return Err(format!(
                    "{family} α={:?}: (g, n) = ({}, {})",
                    spec.alpha, out.g, out.n
                ));
            }
        }
    }
    let zero = FamilySpec {
        family: Family::SineGordonOddSame,
        alpha: [0; 4],
        at_half_period: false,
        j0: None,
    };
    let out = family_params(&zero).map_err(|e| e.to_string())?;
    if (out.g, out.n) != (2, 3) || out.g * out.g != 4 * out.n - 8 {
        return Err(format!(
            "sg-odd-same at α = 0 gives (g, n) = ({}, {})",
            out.g, out.n
        ));
    }
    Ok("6 families x 200 specs, equality at α = 0".into())
}

fn brute_force_types(n: i64, d: i64) -> Vec<([i64; 4], i64)> {
    let target = rational_target(n, d);
    let side = (target as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for a in 0..=side {
        for b in 0..=side {
            for c in 0..=side {
                for e in 0..=side {
                    let gamma = [a, b, c, e];
                    let parity = (a - n - 1) % 2 == 0 && [b, c, e].iter().all(|x| (x - n) % 2 == 0);
                    if parity && a * a + b * b + c * c + e * e == target {
                        out.push((gamma, (a + b + c + e - 1) / 2));
                    }
                }
            }
        }
    }
    out
}

fn enumeration_oracle() -> Outcome {
    let mut elapsed = Duration::ZERO;
    let mut total = 0;
    for n in 1..=10 {
        for d in 1..=4 {
            let start = Instant::now();
            let got = enumerate_types(n, d).map_err(|e| e.to_string())?;
            elapsed += start.elapsed();
            let got: Vec<([i64; 4], i64)> =
                got.iter().map(|t| (t.gamma.components(), t.g)).collect();
            if got != brute_force_types(n, d) {
                return Err(format!("mismatch at n={n} d={d}"));
            }
            total += got.len();
        }
    }
    let msg = format!("{total} types, enumeration {:.3} s", elapsed.as_secs_f64());
    if elapsed < ENUMERATION_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cli_determinism() -> Outcome {
    let commands: &[&[&str]] = &[
        &["legendre", "--omega1", "0.5", "--omega2", "0.5i"],
        &[
            "legendre",
            "--omega1",
            "0.7+0.2i",
            "--omega2",
            "-0.3+1.1i",
            "--backend",
            "q-series",
        ],
        &["enumerate-types", "--n", "7", "--d", "2"],
        &[
            "check-cover",
            "--n",
            "3",
            "--d",
            "1",
            "--g",
            "2",
            "--rho",
            "1",
            "--m",
            "1",
            "--gamma",
            "2,1,1,1",
        ],
        &[
            "check-cover",
            "--case",
            "sg",
            "--placement",
            "same",
            "--n",
            "5",
            "--g",
            "2",
            "--gamma",
            "1,1,1,3",
        ],
        &["construct-68", "--d", "3", "--k", "1", "--mu", "1,0,2,0"],
        &["family", "--theorem", "6.18", "--alpha", "1,0,2,3"],
        &[
            "family",
            "--theorem",
            "6.17",
            "--alpha",
            "1,1,2,1",
            "--j0",
            "2",
        ],
        &["picard-genus", "--class", "3,1,-1,0,0,0,-2,-1,-1,-1"],
        &[
            "verify-kdv",
            "--omega1",
            "0.5",
            "--omega2",
            "0.5i",
            "--lambda",
            "1",
            "--grid",
            "40x4",
        ],
    ];
    let exe = env!("CARGO_BIN_EXE_osculate");
    let mut runs = 0;
    for args in commands {
        for format in ["json", "csv"] {
            let mut outputs = Vec::new();
            for _ in 0..2 {
                let out = Command::new(exe)
                    .args(*args)
                    .args(["--format", format])
                    .output()
                    .map_err(|e| e.to_string())?;
                if out.status.code() == Some(2) || out.stdout.is_empty() {
                    return Err(format!(
                        "{args:?}: {}",
                        String::from_utf8_lossy(&out.stderr)
                    ));
                }
                outputs.push(out.stdout);
            }
            if outputs[0] != outputs[1] {
                return Err(format!("{args:?} --format {format} differs between runs"));
            }
            runs += 2;
        }
    }
    Ok(format!("{runs} runs byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("legendre relation", legendre_relation),
        ("quasi-periodicity", quasi_periodicity),
        ("monodromy single-valuedness", monodromy),
        ("kdv residual", kdv_residuals),
        ("genus formula equivalence", genus_equivalence),
        ("exceptional curves", exceptional_curves),
        ("type generator soundness", generator_soundness),
        ("family maps", family_maps),
        ("enumeration oracle", enumeration_oracle),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
