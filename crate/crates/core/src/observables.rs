//! Photon numbers, zero-delay correlations and blockade classification.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::space::{CompositeSpace, Mode, OperatorMatrix};

/// Below this mean photon number correlations are reported as undefined.
pub const UNDERFLOW_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Blockade {
    /// Conventional blockade: `g² < 1`.
    Cpb,
    /// Two-photon blockade: `g² ≥ 1` and `g³ < 1`.
    TwoPhoton,
    None,
}

impl Blockade {
    pub fn label(self) -> &'static str {
        match self {
            Blockade::Cpb => "CPB",
            Blockade::TwoPhoton => "2PB",
            Blockade::None => "none",
        }
    }
}

impl fmt::Display for Blockade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Blockade {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "CPB" => Ok(Blockade::Cpb),
            "2PB" => Ok(Blockade::TwoPhoton),
            "none" => Ok(Blockade::None),
            other => Err(Error::param("tag", format!("unknown blockade tag {other:?}"))),
        }
    }
}

/// `g² = 1` exactly counts as bunched, so it is 2PB iff `g³ < 1`.
pub fn classify_blockade(g2: f64, g3: f64) -> Blockade {
    if g2 < 1.0 {
        Blockade::Cpb
    } else if g3 < 1.0 {
        Blockade::TwoPhoton
    } else {
        Blockade::None
    }
}

/// Classification with undefined inputs propagated as `None` (unclassified).
pub fn classify_optional(g2: Option<f64>, g3: Option<f64>) -> Option<Blockade> {
    Some(classify_blockade(g2?, g3?))
}

fn check_dim(rho: &DensityMatrix, space: &CompositeSpace) -> Result<()> {
    if rho.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: rho.dim() });
    }
    Ok(())
}

/// `Tr(ρ A)` for a sparse `A`, summed without forming the product.
pub fn expectation(rho: &DensityMatrix, op: &OperatorMatrix) -> num_complex::Complex64 {
    let m = rho.matrix();
    op.iter().map(|(r, c, v)| v * m[(c, r)]).sum()
}

/// `Tr(ρ a†a)` for `mode`.
pub fn mean_photon_number(rho: &DensityMatrix, space: &CompositeSpace, mode: Mode) -> Result<f64> {
    check_dim(rho, space)?;
    // a†a is diagonal, so only populations contribute
    let m = rho.matrix();
    Ok(space
        .states()
        .enumerate()
        .map(|(i, s)| s.occupation(mode) as f64 * m[(i, i)].re)
        .sum())
}

/// `⟨a†ⁿaⁿ⟩`, the n-th factorial moment, from the populations.
pub fn factorial_moment(rho: &DensityMatrix, space: &CompositeSpace, mode: Mode, n: u32) -> Result<f64> {
    check_dim(rho, space)?;
    let m = rho.matrix();
    Ok(space
        .states()
        .enumerate()
        .map(|(i, s)| falling(s.occupation(mode), n) * m[(i, i)].re)
        .sum())
}

fn falling(m: usize, n: u32) -> f64 {
    (0..n as usize).map(|k| m as f64 - k as f64).product::<f64>().max(0.0)
}

/// `⟨a†ⁿaⁿ⟩ / ⟨a†a⟩ⁿ`; `Ok(None)` when `⟨a†a⟩` is below [`UNDERFLOW_FLOOR`].
pub fn correlation_g_n(rho: &DensityMatrix, space: &CompositeSpace, mode: Mode, n: u32) -> Result<Option<f64>> {
    if !(2..=3).contains(&n) {
        return Err(Error::param("n", format!("correlation order must be 2 or 3, got {n}")));
    }
    let levels = space.levels(mode);
    if n == 3 && levels < 4 {
        return Err(Error::TruncationTooSmall { quantity: "g3", required: 4, levels });
    }
    let mean = mean_photon_number(rho, space, mode)?;
    if !(mean >= UNDERFLOW_FLOOR) {
        return Ok(None);
    }
    let num = factorial_moment(rho, space, mode, n)?;
    Ok(Some((num / mean.powi(n as i32)).max(0.0)))
}

/// Reduced occupation distribution `P(m) = Tr(ρ Π_m)` for `mode`.
pub fn photon_distribution(rho: &DensityMatrix, space: &CompositeSpace, mode: Mode) -> Result<Vec<f64>> {
    check_dim(rho, space)?;
    let m = rho.matrix();
    let mut p = vec![0.0; space.levels(mode)];
    for (i, s) in space.states().enumerate() {
        p[s.occupation(mode)] += m[(i, i)].re;
    }
    Ok(p)
}

/// `Σ m(m−1)P(m) / (Σ m P(m))²`, the second path to `g²`.
pub fn g2_from_distribution(p: &[f64]) -> Option<f64> {
    let mean: f64 = p.iter().enumerate().map(|(m, x)| m as f64 * x).sum();
    if !(mean >= UNDERFLOW_FLOOR) {
        return None;
    }
    let second: f64 = p.iter().enumerate().map(|(m, x)| falling(m, 2) * x).sum();
    Some(second / (mean * mean))
}

/// Photon statistics of one steady state.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
    pub g2_a: Option<f64>,
    pub g2_b: Option<f64>,
    pub g2_c: Option<f64>,
    /// `None` also when mode `a` has fewer than four levels.
    pub g3_a: Option<f64>,
    /// Blockade character of mode `a`; `None` when unclassifiable.
    pub tag: Option<Blockade>,
}

impl ObservableSet {
    pub fn compute(rho: &DensityMatrix, space: &CompositeSpace) -> Result<Self> {
        let n = |m| mean_photon_number(rho, space, m);
        let g2 = |m| correlation_g_n(rho, space, m, 2);
        let g3_a = match correlation_g_n(rho, space, Mode::A, 3) {
            Ok(v) => v,
            Err(Error::TruncationTooSmall { .. }) => None,
            Err(e) => return Err(e),
        };
        let g2_a = g2(Mode::A)?;
        Ok(ObservableSet {
            n_a: n(Mode::A)?.max(0.0),
            n_b: n(Mode::B)?.max(0.0),
            n_c: n(Mode::C)?.max(0.0),
            g2_a,
            g2_b: g2(Mode::B)?,
            g2_c: g2(Mode::C)?,
            g3_a,
            tag: classify_optional(g2_a, g3_a),
        })
    }

    pub fn mean(&self, mode: Mode) -> f64 {
        match mode {
            Mode::A => self.n_a,
            Mode::B => self.n_b,
            Mode::C => self.n_c,
        }
    }

    pub fn g2(&self, mode: Mode) -> Option<f64> {
        match mode {
            Mode::A => self.g2_a,
            Mode::B => self.g2_b,
            Mode::C => self.g2_c,
        }
    }
}

impl fmt::Display for ObservableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.6e}"));
        writeln!(f, "N_a   {:.6e}", self.n_a)?;
        writeln!(f, "N_b   {:.6e}", self.n_b)?;
        writeln!(f, "N_c   {:.6e}", self.n_c)?;
        writeln!(f, "g2_a  {}", opt(self.g2_a))?;
        writeln!(f, "g2_b  {}", opt(self.g2_b))?;
        writeln!(f, "g2_c  {}", opt(self.g2_c))?;
        writeln!(f, "g3_a  {}", opt(self.g3_a))?;
        write!(f, "tag   {}", self.tag.map_or("unclassified", Blockade::label))
    }
}
