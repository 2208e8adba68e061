//! Rate splitting through the max construction: one sender's input
//! distribution is written as the law of `max(U, V)` for independent `U`, `V`.

use serde::{Deserialize, Serialize};

use crate::channel::{ControlState, LabelRegister};
use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// Probability distribution over an ordered list of symbols.
///
/// The listed order is the total order used by [`recombine`]; symbols are
/// never re-sorted and zero-probability symbols are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDist {
    alphabet: Vec<String>,
    probs: Vec<f64>,
}

impl FiniteDist {
    pub fn new(alphabet: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Distribution("alphabet is empty".into()));
        }
        if alphabet.len() != probs.len() {
            return Err(Error::Distribution(format!(
                "{} symbols but {} probabilities",
                alphabet.len(),
                probs.len()
            )));
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(Error::Distribution(format!("duplicate symbol {a:?}")));
            }
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Distribution(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Distribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { alphabet, probs })
    }

    pub fn uniform(alphabet: Vec<String>) -> Result<Self> {
        let n = alphabet.len().max(1) as f64;
        let probs = vec![1.0 / n; alphabet.len()];
        Self::new(alphabet, probs)
    }

    /// All mass on the symbol at `index`.
    pub fn point_mass(alphabet: Vec<String>, index: usize) -> Result<Self> {
        let mut probs = vec![0.0; alphabet.len()];
        *probs
            .get_mut(index)
            .ok_or_else(|| Error::Distribution(format!("index {index} outside alphabet")))? = 1.0;
        Self::new(alphabet, probs)
    }

    /// Clamps tiny negative entries and renormalizes.
    fn from_rounded(alphabet: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|&&p| p < -NORMALIZATION_TOL) {
            return Err(Error::Numeric(format!("negative probability {p} after differencing")));
        }
        let clamped: Vec<f64> = probs.into_iter().map(|p| p.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        Self::new(alphabet, clamped.into_iter().map(|p| p / total).collect())
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|a| a == symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn prob(&self, symbol: &str) -> Result<f64> {
        Ok(self.probs[self.index_of(symbol)?])
    }

    /// Cumulative distribution at each position of the alphabet.
    pub fn cdf(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// Joint law of two independent variables; symbols are joined with `,`.
    pub fn product(&self, other: &FiniteDist) -> FiniteDist {
        let mut alphabet = Vec::with_capacity(self.len() * other.len());
        let mut probs = Vec::with_capacity(self.len() * other.len());
        for (a, pa) in self.alphabet.iter().zip(&self.probs) {
            for (b, pb) in other.alphabet.iter().zip(&other.probs) {
                alphabet.push(format!("{a},{b}"));
                probs.push(pa * pb);
            }
        }
        FiniteDist { alphabet, probs }
    }
}

/// Output of the max construction at one value of `θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitTriple {
    pub theta: f64,
    pub p_u: FiniteDist,
    pub p_v: FiniteDist,
}

impl SplitTriple {
    /// Law of `max(U, V)`.
    pub fn pushforward(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.p_u.len()];
        for (i, pu) in self.p_u.probs.iter().enumerate() {
            for (j, pv) in self.p_v.probs.iter().enumerate() {
                out[i.max(j)] += pu * pv;
            }
        }
        out
    }
}

/// Splits `p_x` into independent `U`, `V` with `max(U, V) ∼ p_x`, using
/// `F_U = θF_X + 1 − θ` and `F_V = F_X / F_U`.
pub fn split_distribution(p_x: &FiniteDist, theta: f64) -> Result<SplitTriple> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::invalid(format!("theta {theta} outside [0, 1]")));
    }
    // the endpoints reproduce p_x exactly rather than through cdf differences
    if theta == 0.0 || theta == 1.0 {
        let point = FiniteDist::point_mass(p_x.alphabet.clone(), 0)?;
        let (p_u, p_v) = if theta == 1.0 { (p_x.clone(), point) } else { (point, p_x.clone()) };
        return Ok(SplitTriple { theta, p_u, p_v });
    }
    let f_x = p_x.cdf();
    let f_u: Vec<f64> = f_x.iter().map(|&f| theta * f + 1.0 - theta).collect();
    let f_v: Vec<f64> = f_x
        .iter()
        .zip(&f_u)
        .map(|(&fx, &fu)| if fx == 0.0 { 0.0 } else { fx / fu })
        .collect();
    let diff = |f: &[f64]| -> Vec<f64> {
        f.iter()
            .enumerate()
            .map(|(i, &v)| if i == 0 { v } else { v - f[i - 1] })
            .collect()
    };
    let alphabet = p_x.alphabet.clone();
    Ok(SplitTriple {
        theta,
        p_u: FiniteDist::from_rounded(alphabet.clone(), diff(&f_u))?,
        p_v: FiniteDist::from_rounded(alphabet, diff(&f_v))?,
    })
}

/// The later of `u` and `v` in the alphabet order.
pub fn recombine<'a>(alphabet: &'a [String], u: &str, v: &str) -> Result<&'a str> {
    let pos = |s: &str| {
        alphabet
            .iter()
            .position(|a| a == s)
            .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    };
    Ok(&alphabet[pos(u)?.max(pos(v)?)])
}

/// Replaces the `X` label of a `(X, Y)` control state by the split pair
/// `(U, V)`, with quantum parts `ρ_{u,v,y} = ρ_{max(u,v),y}`.
pub fn split_control_state(cs: &ControlState, theta: f64) -> Result<ControlState> {
    let labels = cs.labels();
    if labels.len() != 2 {
        return Err(Error::invalid(format!(
            "splitting needs a control state with labels (X, Y), got {} label registers",
            labels.len()
        )));
    }
    let triple = split_distribution(&labels[0].dist, theta)?;
    let new_labels = vec![
        LabelRegister::new("U", triple.p_u),
        LabelRegister::new("V", triple.p_v),
        labels[1].clone(),
    ];
    ControlState::from_product(new_labels, cs.quantum_dims(), |t| {
        cs.conditional_state(&[t[0].max(t[1]), t[2]]).clone()
    })
}
