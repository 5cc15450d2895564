//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Set `ACCEPTANCE_ONLY=1,4,9` to run a subset.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::time::Instant;

use blockade::dynamics::{
    build_liouvillian, steady_state_direct, steady_state_evolve, vectorize, EvolveOptions,
};
use blockade::model::excitation_number;
use blockade::observables::{g2_from_distribution, photon_distribution, Blockade, ObservableSet};
use blockade::spectra::{
    first_manifold, hermitian_eigenvalues, second_manifold, subspace_h1, subspace_h2, tpb_detunings,
};
use blockade::{build_hamiltonian, ModelParams, Mode, Param, Truncation};
use blockade_sweep::config::SolverProfile;
use blockade_sweep::presets::{preset_info, resonance_links, PRESET_NAMES};
use blockade_sweep::table::write_csv_to;
use blockade_sweep::{run_sweep, solve_point, Axis, SweepConfig};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

const GAMMAS: [f64; 2] = [1.0, 0.5];

fn main() {
    let only: Option<BTreeSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let checks: [(u32, &str, fn() -> Verdict); 9] = [
        (1, "closed-form spectra match numeric diagonalization", closed_form_spectra),
        (2, "two-photon resonance detunings", tpb_checkpoints),
        (3, "direct and time-evolved steady states agree on every preset", solver_agreement),
        (4, "coherent and thermal analytic oracles", analytic_oracles),
        (5, "conventional blockade dip of the g=11, J=2 sweep", cpb_dip),
        (6, "dip location and depth trend with J at g=3", cpb_trend),
        (7, "two-photon blockade bands in detuning and in g", tpb_bands),
        (8, "blockade regions versus drive, J and g", regions_fig5),
        (9, "structural invariants", structural_invariants),
    ];
    let mut failed = Vec::new();
    for (n, label, check) in checks {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {n}. {label} ({:.1} s): {}", start.elapsed().as_secs_f64(), v.detail);
        if !v.pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// helpers

fn solve(p: &ModelParams, n: usize) -> ObservableSet {
    let profile = SolverProfile { truncation: Truncation::uniform(n), ..Default::default() };
    solve_point(p, &profile).unwrap_or_else(|e| panic!("solve failed at {p:?}: {e}")).observables
}

/// Caches solves by their exact coordinate, so coarse scans and edge
/// bisection never repeat a point.
fn memo<'a>(f: impl Fn(f64) -> ObservableSet + 'a) -> impl Fn(f64) -> ObservableSet + 'a {
    let cache: RefCell<HashMap<u64, ObservableSet>> = RefCell::new(HashMap::new());
    move |x: f64| {
        if let Some(o) = cache.borrow().get(&x.to_bits()) {
            return o.clone();
        }
        let o = f(x);
        cache.borrow_mut().insert(x.to_bits(), o.clone());
        o
    }
}

fn is_2pb(o: &ObservableSet) -> bool {
    o.tag == Some(Blockade::TwoPhoton)
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| if k == n { hi } else { lo + step * k as f64 }).collect()
}

/// Coarse scan followed by golden-section refinement of the smallest value.
fn locate_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let xs = grid(lo, hi, step);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let k = (0..xs.len()).min_by(|&i, &j| ys[i].total_cmp(&ys[j])).unwrap();
    let (mut a, mut b) = ((xs[k] - step).max(lo), (xs[k] + step).min(hi));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 0.01 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let (x, y) = if fc < fd { (c, fc) } else { (d, fd) };
    if ys[k] < y {
        (xs[k], ys[k])
    } else {
        (x, y)
    }
}

/// Intervals of `[lo, hi]` where `inside` holds, edges bisected to 0.005 of
/// the scan step.
fn bands(inside: &dyn Fn(f64) -> bool, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let xs = grid(lo, hi, step);
    let flags: Vec<bool> = xs.iter().map(|&x| inside(x)).collect();
    let edge = |mut a: f64, mut b: f64, a_in: bool| {
        while b - a > 0.005 * step {
            let m = 0.5 * (a + b);
            if inside(m) == a_in {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let mut out = Vec::new();
    let mut start = if flags[0] { Some(xs[0]) } else { None };
    for k in 1..xs.len() {
        match (flags[k - 1], flags[k]) {
            (false, true) => start = Some(edge(xs[k - 1], xs[k], false)),
            (true, false) => out.push((start.take().unwrap(), edge(xs[k - 1], xs[k], true))),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    out
}

fn fmt_bands(b: &[(f64, f64)]) -> String {
    let parts: Vec<String> = b.iter().map(|(l, h)| format!("[{l:.3}, {h:.3}]")).collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(" ")
    }
}

/// The band overlapping `[lo, hi]` the most.
fn best_band(b: &[(f64, f64)], lo: f64, hi: f64) -> Option<(f64, f64)> {
    b.iter()
        .copied()
        .map(|(l, h)| ((h.min(hi) - l.max(lo)), (l, h)))
        .filter(|(o, _)| *o > 0.0)
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, band)| band)
}

fn resonant_point(g: f64, j: f64, f: (f64, f64, f64), gamma: f64, delta_a: f64) -> ModelParams {
    let mut cfg = SweepConfig::new(
        ModelParams { g, j, f_a: f.0, f_b: f.1, f_c: f.2, gamma, ..Default::default() },
        Axis::new(Param::DeltaA, 0.0, 1.0, 2),
    );
    cfg.links = resonance_links();
    cfg.point(&[delta_a])
}

/// Tries every permitted atomic decay rate and keeps the first that passes,
/// otherwise reports all attempts.
fn calibrated(check: &dyn Fn(f64) -> (bool, String)) -> Verdict {
    let mut notes = Vec::new();
    for gamma in GAMMAS {
        let (pass, detail) = check(gamma);
        notes.push(format!("gamma={gamma}: {detail}"));
        if pass {
            return Verdict::new(true, notes.join("; "));
        }
    }
    Verdict::new(false, notes.join("; "))
}

// ---------------------------------------------------------------------------
// criteria

fn closed_form_spectra() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let p = ModelParams { g: rng.random_range(-20.0..=20.0), j: rng.random_range(-20.0..=20.0), ..Default::default() }
            .resonant(rng.random_range(-30.0..=30.0));
        let h1 = subspace_h1(&p);
        let h2 = subspace_h2(&p);
        let n1 = hermitian_eigenvalues(&DMatrix::from_column_slice(3, 3, h1.as_slice())).unwrap();
        let n2 = hermitian_eigenvalues(&DMatrix::from_column_slice(5, 5, h2.as_slice())).unwrap();
        for (closed, numeric) in [(first_manifold(&p).sorted_ascending(), n1), (second_manifold(&p).sorted_ascending(), n2)] {
            for (x, y) in closed.iter().zip(&numeric) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Verdict::new(worst < 1e-9, format!("10000 random resonant sets, max |closed - numeric| = {worst:.2e} (tol 1e-9)"))
}

fn tpb_checkpoints() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (j, expect) in [(2.0, 9.94), (4.0, 10.3), (6.0, 10.94)] {
        let got = tpb_detunings(8.0, j).delta_a1;
        pass &= (got - expect).abs() <= 0.05;
        parts.push(format!("J={j}: {got:.4} vs {expect}"));
    }
    Verdict::new(pass, format!("{} (tol 0.05)", parts.join(", ")))
}

fn solver_agreement() -> Verdict {
    let mut worst = (0.0f64, "");
    let mut failures = Vec::new();
    for name in PRESET_NAMES {
        let mut p = preset_info(name).unwrap().feature_params();
        p.truncation = Truncation::uniform(4);
        let space = p.truncation.space().unwrap();
        let h = build_hamiltonian(&space, &p).unwrap();
        let l = build_liouvillian(&space, &h, &p).unwrap();
        let direct = steady_state_direct(&l);
        let evolved = steady_state_evolve(&space, &h, &p, &EvolveOptions::default());
        match (direct, evolved) {
            (Ok(d), Ok(e)) => {
                let diff = d.rho.max_abs_diff(&e.rho);
                if diff > worst.0 {
                    worst = (diff, name);
                }
                if !(diff < 1e-6) {
                    failures.push(format!("{name}: {diff:.2e}"));
                }
            }
            (d, e) => failures.push(format!("{name}: direct {:?} / evolve {:?}", d.err(), e.err())),
        }
    }
    let mut detail = format!("12 presets at (4,4,4), worst max-entry difference {:.2e} ({}) (tol 1e-6)", worst.0, worst.1);
    if !failures.is_empty() {
        let _ = write!(detail, "; failing: {}", failures.join(", "));
    }
    Verdict::new(failures.is_empty(), detail)
}

fn analytic_oracles() -> Verdict {
    let coherent = ModelParams { f_a: 0.1, ..Default::default() };
    let o = solve(&coherent, 5);
    let g2 = o.g2_a.unwrap_or(f64::NAN);
    let ok_coherent = (g2 - 1.0).abs() <= 1e-3 && (o.n_a - 0.04).abs() <= 1e-4;

    let thermal = ModelParams { nbar_a: 0.5, truncation: Truncation { a: 12, b: 2, c: 2 }, ..Default::default() };
    let space = thermal.truncation.space().unwrap();
    let h = build_hamiltonian(&space, &thermal).unwrap();
    let rho = steady_state_direct(&build_liouvillian(&space, &h, &thermal).unwrap()).unwrap().rho;
    let t = ObservableSet::compute(&rho, &space).unwrap();
    let tg2 = t.g2_a.unwrap_or(f64::NAN);
    let ok_thermal = (tg2 - 2.0).abs() <= 1e-2;
    Verdict::new(
        ok_coherent && ok_thermal,
        format!(
            "coherent g2={g2:.6} (1 +- 1e-3), N_a={:.6} (0.04 +- 1e-4); thermal nbar=0.5 at 12 levels g2={tg2:.5} (2 +- 1e-2)",
            o.n_a
        ),
    )
}

fn cpb_dip() -> Verdict {
    let target = 11.18;
    calibrated(&|gamma| {
        let at = memo(|x| solve(&resonant_point(11.0, 2.0, (0.1, 0.05, 0.05), gamma, x), 5));
        let (x, y) = locate_min(&|x| at(x).g2_a.unwrap_or(f64::INFINITY), 0.0, 20.0, 0.25);
        let dip = at(x);
        let (left, right) = (at(x - 1.0), at(x + 1.0));
        let location = (x - target).abs() <= 0.3 && y < 1.0;
        // reported for diagnosis only; the criterion is about the global minimum
        let (lx, ly) = locate_min(&|x| at(x).g2_a.unwrap_or(f64::INFINITY), target - 1.0, target + 1.0, 0.25);
        let others = dip.g2_b.is_some_and(|v| v < 1.0) && dip.g2_c.is_some_and(|v| v < 1.0);
        let elevated = [Mode::A, Mode::B, Mode::C]
            .iter()
            .all(|&m| dip.mean(m) > left.mean(m) && dip.mean(m) > right.mean(m));
        (
            location && others && elevated,
            format!(
                "min g2_a={y:.4} at delta_a={x:.3} (want {target} +- 0.3, < 1); g2_b={:.3}, g2_c={:.3} there; \
                 N elevated vs +-1: {elevated}; nearest local dip {ly:.4} at {lx:.3}",
                dip.g2_b.unwrap_or(f64::NAN),
                dip.g2_c.unwrap_or(f64::NAN)
            ),
        )
    })
}

fn cpb_trend() -> Verdict {
    calibrated(&|gamma| {
        let mut dips = Vec::new();
        for j in [2.0, 4.0, 8.0] {
            let f = |x: f64| solve(&resonant_point(3.0, j, (0.02, 0.01, 0.01), gamma, x), 5).g2_a.unwrap_or(f64::INFINITY);
            let (x, y) = locate_min(&f, 0.0, 12.0, 0.25);
            dips.push((j, x, y, (9.0 + j * j).sqrt()));
        }
        let located = dips.iter().all(|(_, x, _, want)| (x - want).abs() <= 0.3);
        let rising = dips.windows(2).all(|w| w[1].1 > w[0].1);
        let deepening = dips.windows(2).all(|w| w[1].2 < w[0].2);
        let text: Vec<String> = dips
            .iter()
            .map(|(j, x, y, want)| format!("J={j}: dip {y:.4} at {x:.3} (want {want:.3} +- 0.3)"))
            .collect();
        (
            located && rising && deepening,
            format!("{}; location increasing {rising}, minimum decreasing {deepening}", text.join(", ")),
        )
    })
}

fn tpb_bands() -> Verdict {
    calibrated(&|gamma| {
        let mut pass = true;
        let mut text = Vec::new();
        for (j, lo, hi) in [(2.0, 9.5, 10.5), (4.0, 10.0, 10.9), (6.0, 10.8, 11.6)] {
            let point = memo(|x| solve(&resonant_point(8.0, j, (0.1, 0.0, 0.0), gamma, x), 5));
            let inside = |x: f64| is_2pb(&point(x));
            let found = bands(&inside, 8.0, 13.0, 0.25);
            let band = best_band(&found, lo, hi);
            let ok = band.is_some_and(|(l, h)| (l - lo).abs() <= 0.3 && (h - hi).abs() <= 0.3);
            pass &= ok;
            text.push(format!("delta_a band J={j}: {} (want [{lo}, {hi}] +- 0.3)", fmt_bands(&found)));
        }
        let mut centers = Vec::new();
        for (j, lo, hi) in [(1.0, 5.2, 5.81), (2.0, 5.08, 5.68), (3.0, 4.84, 5.4)] {
            let point = memo(|g| solve(&resonant_point(g, j, (0.1, 0.0, 0.0), gamma, 7.0), 5));
            let found = bands(&|g| is_2pb(&point(g)), 4.0, 7.0, 0.25);
            let band = best_band(&found, lo, hi);
            let ok = band.is_some_and(|(l, h)| (l - lo).abs() <= 0.3 && (h - hi).abs() <= 0.3);
            pass &= ok;
            let g3 = band.and_then(|(l, h)| point(0.5 * (l + h)).g3_a).unwrap_or(f64::NAN);
            centers.push(g3);
            text.push(format!("g band J={j}: {} (want [{lo}, {hi}] +- 0.3), g3 at center {g3:.4}", fmt_bands(&found)));
        }
        let decreasing = centers.windows(2).all(|w| w[1] < w[0]);
        pass &= decreasing;
        text.push(format!("g3 decreasing with J: {decreasing}"));
        (pass, text.join("; "))
    })
}

fn regions_fig5() -> Verdict {
    calibrated(&|gamma| {
        let mut pass = true;
        let mut text = Vec::new();
        let with = |name: &str, param: Param, x: f64| {
            let mut p = preset_info(name).unwrap().config.base;
            p.gamma = gamma;
            p.set(param, x);
            solve(&p, 5)
        };

        // 2PB at weak drive, lost above F_a ~ 0.4
        let drive = memo(|f| with("fig5a", Param::FA, f));
        let found = bands(&|f| is_2pb(&drive(f)), 0.01, 1.0, 0.05);
        let ok = found.first().is_some_and(|&(l, h)| l == 0.01 && (h - 0.4).abs() <= 0.1);
        pass &= ok;
        text.push(format!("F_a bands {} (want from 0.01 up to 0.4 +- 0.1)", fmt_bands(&found)));

        // 2PB for |J| <= 3, CPB outside
        let atom = memo(|j| with("fig5b", Param::J, j));
        let found = bands(&|j| is_2pb(&atom(j)), -6.0, 6.0, 0.25);
        let central = found.iter().copied().find(|&(l, h)| l <= 0.0 && h >= 0.0);
        let ok_band = found.len() == 1 && central.is_some_and(|(l, h)| (l + 3.0).abs() <= 0.3 && (h - 3.0).abs() <= 0.3);
        let outside_cpb = central.is_some_and(|(l, h)| {
            grid(-6.0, 6.0, 0.25).into_iter().filter(|&x| x < l || x > h).all(|x| atom(x).tag == Some(Blockade::Cpb))
        });
        pass &= ok_band && outside_cpb;
        text.push(format!("J bands {} (want [-3, 3] +- 0.3), CPB outside {outside_cpb}", fmt_bands(&found)));

        // 2PB bands in g at +-[5.1, 5.9]
        let mixing = memo(|g| with("fig5c", Param::G, g));
        let found = bands(&|g| is_2pb(&mixing(g)), -8.0, 8.0, 0.25);
        let positive = best_band(&found, 5.1, 5.9);
        let negative = best_band(&found, -5.9, -5.1);
        let ok_g = [(positive, 5.1, 5.9), (negative, -5.9, -5.1)]
            .iter()
            .all(|(b, lo, hi)| b.is_some_and(|(l, h)| (l - lo).abs() <= 0.3 && (h - hi).abs() <= 0.3));
        pass &= ok_g;
        text.push(format!("g bands {} (want +-[5.1, 5.9] +- 0.3)", fmt_bands(&found)));

        // brighter wherever CPB or 2PB holds beyond the 2PB band edges than
        // anywhere without blockade
        let elevated = match (positive, negative) {
            (Some((lo, _)), Some((_, hi))) => {
                let pts: Vec<(f64, ObservableSet)> = grid(-8.0, 8.0, 0.25).into_iter().map(|g| (g, mixing(g))).collect();
                let quiet = pts.iter().filter(|(_, o)| o.tag == Some(Blockade::None)).map(|(_, o)| o.n_a).fold(0.0, f64::max);
                let bright = pts
                    .iter()
                    .filter(|(g, o)| (*g >= lo || *g <= hi) && matches!(o.tag, Some(Blockade::Cpb | Blockade::TwoPhoton)))
                    .map(|(_, o)| o.n_a)
                    .fold(f64::INFINITY, f64::min);
                text.push(format!("N_a: min {bright:.3e} in blockade regions |g| >= band edge, max {quiet:.3e} without blockade"));
                bright > quiet
            }
            _ => false,
        };
        pass &= elevated;
        (pass, text.join("; "))
    })
}

fn structural_invariants() -> Verdict {
    let mut problems = Vec::new();
    let p = ModelParams {
        delta_a: 1.3,
        delta_b: 0.4,
        delta_c: 0.9,
        delta_sigma: -0.7,
        g: 2.1,
        j: 1.4,
        f_a: 0.3,
        f_b: 0.2,
        f_c: 0.1,
        nbar_a: 0.1,
        nbar_sigma: 0.05,
        truncation: Truncation { a: 4, b: 3, c: 3 },
        ..Default::default()
    };
    let space = p.truncation.space().unwrap();
    let h = build_hamiltonian(&space, &p).unwrap();
    if h.hermitian_defect() > 1e-12 {
        problems.push(format!("H not Hermitian ({:.1e})", h.hermitian_defect()));
    }

    let undriven = ModelParams { f_a: 0.0, f_b: 0.0, f_c: 0.0, ..p };
    let h0 = build_hamiltonian(&space, &undriven).unwrap();
    if h0.iter().any(|(r, c, _)| excitation_number(&space, r) != excitation_number(&space, c)) {
        problems.push("undriven H mixes excitation numbers".into());
    }

    let l = build_liouvillian(&space, &h, &p).unwrap();
    let id = vectorize(&DMatrix::identity(space.dim(), space.dim()));
    // vec(I)† L must vanish column by column
    let mut row = vec![C64::new(0.0, 0.0); l.dim()];
    for (r, c, v) in l.matrix().iter() {
        row[c] += id[r].conj() * v;
    }
    let leak = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if leak > 1e-12 {
        problems.push(format!("trace not preserved ({leak:.1e})"));
    }

    let mut min_eig = f64::INFINITY;
    let mut dual = 0.0f64;
    for name in PRESET_NAMES {
        let mut q = preset_info(name).unwrap().feature_params();
        q.truncation = Truncation::uniform(4);
        let sp = q.truncation.space().unwrap();
        let hq = build_hamiltonian(&sp, &q).unwrap();
        let rho = steady_state_direct(&build_liouvillian(&sp, &hq, &q).unwrap()).unwrap().rho;
        min_eig = min_eig.min(rho.min_eigenvalue());
        let obs = ObservableSet::compute(&rho, &sp).unwrap();
        for mode in [Mode::A, Mode::B, Mode::C] {
            let dist = photon_distribution(&rho, &sp, mode).unwrap();
            if let (Some(x), Some(y)) = (obs.g2(mode), g2_from_distribution(&dist)) {
                dual = dual.max((x - y).abs() / x.abs().max(1e-300));
            }
        }
    }
    if min_eig < -1e-8 {
        problems.push(format!("negative steady-state eigenvalue {min_eig:.2e}"));
    }
    if dual > 1e-10 {
        problems.push(format!("g2 paths disagree ({dual:.1e})"));
    }

    let mut cfg = SweepConfig::new(
        ModelParams { g: 2.0, j: 1.0, f_a: 0.1, ..Default::default() },
        Axis::new(Param::DeltaA, 0.0, 4.0, 6),
    );
    cfg.solver.truncation = Truncation::uniform(3);
    let bytes = |threads: usize| {
        let mut c = cfg.clone();
        c.solver.threads = Some(threads);
        let mut out = Vec::new();
        write_csv_to(&run_sweep(&c).unwrap(), &mut out).unwrap();
        out
    };
    let deterministic = bytes(1) == bytes(3) && bytes(1) == bytes(1);
    if !deterministic {
        problems.push("CSV bytes depend on the run".into());
    }

    let detail = format!(
        "H Hermitian, excitation conserved at zero drive, trace leak {leak:.1e}, min eigenvalue over presets {min_eig:.2e}, \
         g2 path difference {dual:.1e}, CSV deterministic {deterministic}"
    );
    if problems.is_empty() {
        Verdict::new(true, detail)
    } else {
        Verdict::new(false, format!("{detail}; problems: {}", problems.join(", ")))
    }
}
