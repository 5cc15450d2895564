//! Scenario parameters and the driven rotating-frame Hamiltonian.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::space::{CompositeSpace, Mode, OperatorMatrix};

/// Fock levels kept per cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Truncation {
    pub const fn uniform(n: usize) -> Self {
        Truncation { a: n, b: n, c: n }
    }

    pub fn space(&self) -> Result<CompositeSpace> {
        CompositeSpace::new(self.a, self.b, self.c)
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::uniform(5)
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// Every rate, detuning and drive of one scenario, in units of κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    pub delta_sigma: f64,
    /// atom–cavity coupling
    pub j: f64,
    /// three-wave-mixing coefficient
    pub g: f64,
    pub f_a: f64,
    pub f_b: f64,
    pub f_c: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub kappa_c: f64,
    pub gamma: f64,
    pub nbar_a: f64,
    pub nbar_b: f64,
    pub nbar_c: f64,
    pub nbar_sigma: f64,
    pub truncation: Truncation,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            delta_a: 0.0,
            delta_b: 0.0,
            delta_c: 0.0,
            delta_sigma: 0.0,
            j: 0.0,
            g: 0.0,
            f_a: 0.0,
            f_b: 0.0,
            f_c: 0.0,
            kappa_a: 1.0,
            kappa_b: 1.0,
            kappa_c: 1.0,
            gamma: 1.0,
            nbar_a: 0.0,
            nbar_b: 0.0,
            nbar_c: 0.0,
            nbar_sigma: 0.0,
            truncation: Truncation::default(),
        }
    }
}

/// Names of the scalar fields of [`ModelParams`], as used in config files
/// and sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    DeltaA,
    DeltaB,
    DeltaC,
    DeltaSigma,
    J,
    G,
    FA,
    FB,
    FC,
    KappaA,
    KappaB,
    KappaC,
    Gamma,
    NbarA,
    NbarB,
    NbarC,
    NbarSigma,
}

impl Param {
    pub const ALL: [Param; 17] = [
        Param::DeltaA,
        Param::DeltaB,
        Param::DeltaC,
        Param::DeltaSigma,
        Param::J,
        Param::G,
        Param::FA,
        Param::FB,
        Param::FC,
        Param::KappaA,
        Param::KappaB,
        Param::KappaC,
        Param::Gamma,
        Param::NbarA,
        Param::NbarB,
        Param::NbarC,
        Param::NbarSigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::DeltaA => "delta_a",
            Param::DeltaB => "delta_b",
            Param::DeltaC => "delta_c",
            Param::DeltaSigma => "delta_sigma",
            Param::J => "J",
            Param::G => "g",
            Param::FA => "F_a",
            Param::FB => "F_b",
            Param::FC => "F_c",
            Param::KappaA => "kappa_a",
            Param::KappaB => "kappa_b",
            Param::KappaC => "kappa_c",
            Param::Gamma => "gamma",
            Param::NbarA => "nbar_a",
            Param::NbarB => "nbar_b",
            Param::NbarC => "nbar_c",
            Param::NbarSigma => "nbar_sigma",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param(s, "not a model parameter"))
    }
}

impl ModelParams {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::DeltaA => self.delta_a,
            Param::DeltaB => self.delta_b,
            Param::DeltaC => self.delta_c,
            Param::DeltaSigma => self.delta_sigma,
            Param::J => self.j,
            Param::G => self.g,
            Param::FA => self.f_a,
            Param::FB => self.f_b,
            Param::FC => self.f_c,
            Param::KappaA => self.kappa_a,
            Param::KappaB => self.kappa_b,
            Param::KappaC => self.kappa_c,
            Param::Gamma => self.gamma,
            Param::NbarA => self.nbar_a,
            Param::NbarB => self.nbar_b,
            Param::NbarC => self.nbar_c,
            Param::NbarSigma => self.nbar_sigma,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        let slot = match p {
            Param::DeltaA => &mut self.delta_a,
            Param::DeltaB => &mut self.delta_b,
            Param::DeltaC => &mut self.delta_c,
            Param::DeltaSigma => &mut self.delta_sigma,
            Param::J => &mut self.j,
            Param::G => &mut self.g,
            Param::FA => &mut self.f_a,
            Param::FB => &mut self.f_b,
            Param::FC => &mut self.f_c,
            Param::KappaA => &mut self.kappa_a,
            Param::KappaB => &mut self.kappa_b,
            Param::KappaC => &mut self.kappa_c,
            Param::Gamma => &mut self.gamma,
            Param::NbarA => &mut self.nbar_a,
            Param::NbarB => &mut self.nbar_b,
            Param::NbarC => &mut self.nbar_c,
            Param::NbarSigma => &mut self.nbar_sigma,
        };
        *slot = value;
    }

    pub fn with(mut self, p: Param, value: f64) -> Self {
        self.set(p, value);
        self
    }

    /// Applies the matching conditions `Δ_σ = Δ_a` and `Δ_b + Δ_c = Δ_a`,
    /// splitting the pump detuning 2:1 between b and c.
    pub fn resonant(mut self, delta_a: f64) -> Self {
        self.delta_a = delta_a;
        self.delta_sigma = delta_a;
        self.delta_b = 2.0 * delta_a / 3.0;
        self.delta_c = delta_a / 3.0;
        self
    }

    pub fn kappa(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.kappa_a,
            Mode::B => self.kappa_b,
            Mode::C => self.kappa_c,
        }
    }

    pub fn nbar(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.nbar_a,
            Mode::B => self.nbar_b,
            Mode::C => self.nbar_c,
        }
    }

    pub fn drive(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.f_a,
            Mode::B => self.f_b,
            Mode::C => self.f_c,
        }
    }

    pub fn detuning(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.delta_a,
            Mode::B => self.delta_b,
            Mode::C => self.delta_c,
        }
    }

    /// Full validation: finite values, strictly positive decay rates,
    /// non-negative thermal occupations, at least two levels per mode.
    pub fn validate(&self) -> Result<()> {
        for p in Param::ALL {
            if !self.get(p).is_finite() {
                return Err(Error::param(p.name(), "must be finite"));
            }
        }
        for p in [Param::KappaA, Param::KappaB, Param::KappaC, Param::Gamma] {
            if self.get(p) <= 0.0 {
                return Err(Error::param(p.name(), "decay rate must be > 0"));
            }
        }
        self.validate_baths()?;
        self.truncation.space().map(|_| ())
    }

    /// Weaker check used by the generator itself: rates may be zero.
    pub(crate) fn validate_baths(&self) -> Result<()> {
        for p in [Param::KappaA, Param::KappaB, Param::KappaC, Param::Gamma] {
            if self.get(p) < 0.0 {
                return Err(Error::param(p.name(), "decay rate must be >= 0"));
            }
        }
        for p in [Param::NbarA, Param::NbarB, Param::NbarC, Param::NbarSigma] {
            if self.get(p) < 0.0 || !self.get(p).is_finite() {
                return Err(Error::param(p.name(), "thermal occupation must be >= 0"));
            }
        }
        Ok(())
    }

    /// Largest frequency scale in the problem, used for step-size heuristics.
    pub fn frequency_scale(&self) -> f64 {
        [
            self.delta_a,
            self.delta_b,
            self.delta_c,
            self.delta_sigma,
            self.g,
            self.j,
            self.f_a,
            self.f_b,
            self.f_c,
            self.kappa_a * (1.0 + self.nbar_a),
            self.kappa_b * (1.0 + self.nbar_b),
            self.kappa_c * (1.0 + self.nbar_c),
            self.gamma * (1.0 + self.nbar_sigma),
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }
}

pub(crate) fn check_space(space: &CompositeSpace, params: &ModelParams) -> Result<()> {
    let t = params.truncation;
    if space.truncation() != (t.a, t.b, t.c) {
        let expected = space.dim();
        let found = 2 * t.a * t.b * t.c;
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Rotating-frame Hamiltonian
///
/// ```text
/// H = Δ_a a†a + Δ_σ σ†σ + Δ_b b†b + Δ_c c†c + J(a†σ + σ†a)
///   + g(a†bc + b†c†a) + F_a(a† + a) + F_b(b† + b) + F_c(c† + c)
/// ```
pub fn build_hamiltonian(space: &CompositeSpace, params: &ModelParams) -> Result<OperatorMatrix> {
    check_space(space, params)?;
    let re = |x: f64| C64::new(x, 0.0);
    let a = space.annihilator(Mode::A);
    let b = space.annihilator(Mode::B);
    let c = space.annihilator(Mode::C);
    let sigma = space.atom_sigma();
    let ad = a.adjoint();

    let mut terms: Vec<OperatorMatrix> = Vec::new();
    for mode in Mode::ALL {
        terms.push(space.number_operator(mode).scale(re(params.detuning(mode))));
    }
    terms.push((&sigma.adjoint() * &sigma).scale(re(params.delta_sigma)));

    let jc = &ad * &sigma;
    terms.push((&jc + &jc.adjoint()).scale(re(params.j)));

    let twm = &(&ad * &b) * &c;
    terms.push((&twm + &twm.adjoint()).scale(re(params.g)));

    for (mode, op) in [(Mode::A, &a), (Mode::B, &b), (Mode::C, &c)] {
        terms.push((op + &op.adjoint()).scale(re(params.drive(mode))));
    }

    Ok(sum_operators(space.dim(), terms))
}

pub(crate) fn sum_operators(dim: usize, terms: Vec<OperatorMatrix>) -> OperatorMatrix {
    OperatorMatrix::from_triplets(dim, terms.iter().flat_map(|t| t.iter()).collect::<Vec<_>>())
}

/// Diagonal of `a†a + σ†σ + (b†b + c†c)/2`, the quantity conserved by the
/// undriven Hamiltonian.
pub fn excitation_number(space: &CompositeSpace, index: usize) -> f64 {
    let s = space.state(index);
    let atom = match s.atom {
        crate::space::Atom::Ground => 0.0,
        crate::space::Atom::Excited => 1.0,
    };
    s.a as f64 + atom + 0.5 * (s.b + s.c) as f64
}
