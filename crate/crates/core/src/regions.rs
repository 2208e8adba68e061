//! Rate regions: the three-sender decoding polytope of the split state, its
//! projection onto (Alice, Bob) rates, secrecy thresholds, the private
//! region and its asymptotic counterpart.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ControlState, Output};
use crate::error::{Error, Result};
use crate::oneshot::{self, OneShotConfig};
use crate::split::split_control_state;

const FEASIBILITY_TOL: f64 = 1e-9;

/// Smoothing and slack parameters shared by the region computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Decoding smoothing `ε`.
    pub eps: f64,
    /// Secrecy target `δ`.
    pub delta: f64,
    /// `ε′`, with `0 < ε′ < δ`.
    pub eps_prime: f64,
    /// Chain-rule slack `γ`.
    pub gamma: f64,
    /// Additive constant standing in for unspecified `O(1)` terms.
    pub c0: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eps: 0.05,
            delta: 0.1,
            eps_prime: 0.02,
            gamma: 0.01,
            c0: 0.0,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(self.eps) {
            return Err(Error::invalid(format!("eps = {} must lie in (0, 1)", self.eps)));
        }
        if !in_unit(self.delta) {
            return Err(Error::invalid(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        if !(self.eps_prime > 0.0 && self.eps_prime < self.delta) {
            return Err(Error::invalid(format!(
                "eps_prime = {} must lie in (0, delta = {})",
                self.eps_prime, self.delta
            )));
        }
        if !in_unit(self.gamma) {
            return Err(Error::invalid(format!("gamma = {} must lie in (0, 1)", self.gamma)));
        }
        if !self.c0.is_finite() {
            return Err(Error::invalid("c0 must be finite"));
        }
        Ok(())
    }

    /// `δ′ = δ − ε′`.
    pub fn delta_prime(&self) -> f64 {
        self.delta - self.eps_prime
    }

    /// `log₂(3/ε′³) − ¼ log₂ δ`, the additive part of every block-size threshold.
    pub fn covering_constant(&self) -> f64 {
        (3.0 / self.eps_prime.powi(3)).log2() - 0.25 * self.delta.log2()
    }

    /// `log₂(1/ε) + log₂(1/ε′³) − ¼ log₂ δ + c0`, reported as metadata.
    pub fn c_constant(&self) -> f64 {
        (1.0 / self.eps).log2() + (1.0 / self.eps_prime.powi(3)).log2() - 0.25 * self.delta.log2() + self.c0
    }

    /// `log₂ ε − 1`.
    pub fn decode_offset(&self) -> f64 {
        self.eps.log2() - 1.0
    }
}

/// `a₁R₁ + a₂R₂ ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace2 {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

impl Halfspace2 {
    pub fn new(a1: f64, a2: f64, b: f64) -> Self {
        Self { a1, a2, b }
    }

    pub fn slack(&self, p: [f64; 2]) -> f64 {
        self.b - self.a1 * p[0] - self.a2 * p[1]
    }
}

/// Convex polygon in the nonnegative quadrant given by halfspaces, with its
/// vertices in counter-clockwise order starting nearest the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegion2D {
    pub halfspaces: Vec<Halfspace2>,
    pub vertices: Vec<[f64; 2]>,
}

impl RateRegion2D {
    pub fn new(halfspaces: Vec<Halfspace2>) -> Self {
        let vertices = enumerate_vertices_2d(&halfspaces);
        Self { halfspaces, vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        p[0] >= -tol && p[1] >= -tol && self.halfspaces.iter().all(|h| h.slack(p) >= -tol)
    }

    /// `{R ≥ 0 : R + t ∈ self}`.
    pub fn shifted(&self, t: [f64; 2]) -> RateRegion2D {
        RateRegion2D::new(
            self.halfspaces
                .iter()
                .map(|h| Halfspace2::new(h.a1, h.a2, h.b - h.a1 * t[0] - h.a2 * t[1]))
                .collect(),
        )
    }
}

fn enumerate_vertices_2d(hs: &[Halfspace2]) -> Vec<[f64; 2]> {
    let mut all: Vec<Halfspace2> = hs.to_vec();
    all.push(Halfspace2::new(-1.0, 0.0, 0.0));
    all.push(Halfspace2::new(0.0, -1.0, 0.0));
    let scale = all.iter().map(|h| h.b.abs()).fold(1.0, f64::max);
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let (h, g) = (all[i], all[j]);
            let det = h.a1 * g.a2 - h.a2 * g.a1;
            if det.abs() < 1e-12 {
                continue;
            }
            let p = [(h.b * g.a2 - h.a2 * g.b) / det, (h.a1 * g.b - h.b * g.a1) / det];
            let p = [clean(p[0]), clean(p[1])];
            if all.iter().all(|k| k.slack(p) >= -FEASIBILITY_TOL * scale)
                && !pts
                    .iter()
                    .any(|q| (q[0] - p[0]).abs() <= 1e-9 * scale && (q[1] - p[1]).abs() <= 1e-9 * scale)
            {
                pts.push(p);
            }
        }
    }
    order_ccw(pts)
}

/// Turns `-0.0` and sub-ulp noise around zero into `0.0`.
fn clean(v: f64) -> f64 {
    if v.abs() < 1e-13 {
        0.0
    } else {
        v
    }
}

fn order_ccw(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    if pts.len() < 3 {
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
        return pts;
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    // start at the vertex nearest the origin, angles measured around the centroid
    let start = pts
        .iter()
        .enumerate()
        .min_by(|a, b| {
            let da = a.1[0] + a.1[1];
            let db = b.1[0] + b.1[1];
            da.partial_cmp(&db).expect("finite").then(a.1[0].partial_cmp(&b.1[0]).expect("finite"))
        })
        .map(|(i, _)| i)
        .expect("nonempty");
    let a0 = (pts[start][1] - cy).atan2(pts[start][0] - cx);
    let angle = |p: &[f64; 2]| {
        let mut a = (p[1] - cy).atan2(p[0] - cx) - a0;
        while a < 0.0 {
            a += std::f64::consts::TAU;
        }
        a
    };
    pts.sort_by(|p, q| angle(p).partial_cmp(&angle(q)).expect("finite"));
    pts
}

/// `a · (R₁₀, R₂, R₁₁) ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace3 {
    pub a: [f64; 3],
    pub b: f64,
}

/// One-shot decoding terms of a split state, in bits, before the
/// `log₂ε − 1` offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeTerms {
    pub i_u_cvy: f64,
    pub i_y_cuv: f64,
    pub i_v_cuy: f64,
    pub i_uv_cy: f64,
    pub i_uy_cv: f64,
    pub i_yv_cu: f64,
    pub i_uyv_c: f64,
}

/// Decoding polytope over `(R₁₀, R₂, R₁₁)` with implicit nonnegativity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegion3D {
    pub terms: DecodeTerms,
    pub offset: f64,
    pub halfspaces: Vec<Halfspace3>,
}

impl RateRegion3D {
    /// Right-hand side `max(I + log₂ε − 1, 0)`. A negative bound pins the
    /// corresponding rate sum to zero.
    fn rhs(&self, term: f64) -> f64 {
        (term + self.offset).max(0.0)
    }

    fn from_terms(terms: DecodeTerms, offset: f64) -> Self {
        let mut r = Self {
            terms,
            offset,
            halfspaces: Vec::new(),
        };
        let t = terms;
        r.halfspaces = vec![
            Halfspace3 { a: [1.0, 0.0, 0.0], b: r.rhs(t.i_u_cvy) },
            Halfspace3 { a: [0.0, 1.0, 0.0], b: r.rhs(t.i_y_cuv) },
            Halfspace3 { a: [0.0, 0.0, 1.0], b: r.rhs(t.i_v_cuy) },
            Halfspace3 { a: [1.0, 0.0, 1.0], b: r.rhs(t.i_uv_cy) },
            Halfspace3 { a: [1.0, 1.0, 0.0], b: r.rhs(t.i_uy_cv) },
            Halfspace3 { a: [0.0, 1.0, 1.0], b: r.rhs(t.i_yv_cu) },
            Halfspace3 { a: [1.0, 1.0, 1.0], b: r.rhs(t.i_uyv_c) },
        ];
        r
    }

    pub fn contains(&self, p: [f64; 3], tol: f64) -> bool {
        p.iter().all(|&v| v >= -tol)
            && self
                .halfspaces
                .iter()
                .all(|h| h.a[0] * p[0] + h.a[1] * p[1] + h.a[2] * p[2] <= h.b + tol)
    }

    /// Vertices by triple-plane intersection with feasibility filtering.
    pub fn vertices(&self) -> Vec<[f64; 3]> {
        let mut planes: Vec<Halfspace3> = self.halfspaces.clone();
        for k in 0..3 {
            let mut a = [0.0; 3];
            a[k] = -1.0;
            planes.push(Halfspace3 { a, b: 0.0 });
        }
        let mut out: Vec<[f64; 3]> = Vec::new();
        let n = planes.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let m = nalgebra::Matrix3::new(
                        planes[i].a[0], planes[i].a[1], planes[i].a[2],
                        planes[j].a[0], planes[j].a[1], planes[j].a[2],
                        planes[k].a[0], planes[k].a[1], planes[k].a[2],
                    );
                    let Some(inv) = m.try_inverse() else { continue };
                    let p = inv * nalgebra::Vector3::new(planes[i].b, planes[j].b, planes[k].b);
                    let p = [clean(p[0]), clean(p[1]), clean(p[2])];
                    if self.contains(p, FEASIBILITY_TOL)
                        && !out.iter().any(|q| (0..3).all(|c| (q[c] - p[c]).abs() <= 1e-9))
                    {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

/// Computes the seven decoding terms on a `(U, V, Y)` split state.
pub fn decode_terms(split_cs: &ControlState, eps: f64) -> Result<DecodeTerms> {
    check_split_labels(split_cs)?;
    let (u, v, y) = (0usize, 1usize, 2usize);
    let ih = |left: &[usize], right: &[usize]| -> Result<f64> {
        let (rho, split) = split_cs.info_state(left, right, &[Output::C])?;
        finite(oneshot::i_hypo(&rho, &split, eps)?, "hypothesis-testing information")
    };
    Ok(DecodeTerms {
        i_u_cvy: ih(&[u], &[v, y])?,
        i_y_cuv: ih(&[y], &[u, v])?,
        i_v_cuy: ih(&[v], &[u, y])?,
        i_uv_cy: ih(&[u, v], &[y])?,
        i_uy_cv: ih(&[u, y], &[v])?,
        i_yv_cu: ih(&[y, v], &[u])?,
        i_uyv_c: ih(&[u, y, v], &[])?,
    })
}

fn finite(b: oneshot::Bits, what: &str) -> Result<f64> {
    b.finite()
        .ok_or_else(|| Error::Numeric(format!("{what} is unbounded")))
}

fn check_split_labels(cs: &ControlState) -> Result<()> {
    if cs.labels().len() != 3 {
        return Err(Error::invalid(format!(
            "expected a split state with labels (U, V, Y), got {} label registers",
            cs.labels().len()
        )));
    }
    Ok(())
}

/// The seven-halfspace decoding region over `(R₁₀, R₂, R₁₁)`.
pub fn decode_region_3(split_cs: &ControlState, eps: f64) -> Result<RateRegion3D> {
    let terms = decode_terms(split_cs, eps)?;
    Ok(RateRegion3D::from_terms(terms, eps.log2() - 1.0))
}

/// Eliminates `R₁₀` with `R₁ = R₁₀ + R₁₁`, giving nine halfspaces in `(R₁, R₂)`.
pub fn project_to_2d(r3: &RateRegion3D) -> RateRegion2D {
    let t = r3.terms;
    let a = r3.rhs(t.i_u_cvy);
    let b = r3.rhs(t.i_y_cuv);
    let c = r3.rhs(t.i_v_cuy);
    let d = r3.rhs(t.i_uv_cy);
    let e = r3.rhs(t.i_uy_cv);
    let f = r3.rhs(t.i_yv_cu);
    let g = r3.rhs(t.i_uyv_c);
    RateRegion2D::new(vec![
        Halfspace2::new(1.0, 0.0, d),
        Halfspace2::new(1.0, 0.0, c + a),
        Halfspace2::new(0.0, 1.0, b),
        Halfspace2::new(0.0, 1.0, f),
        Halfspace2::new(0.0, 1.0, e),
        Halfspace2::new(1.0, 1.0, c + e),
        Halfspace2::new(1.0, 1.0, f + a),
        Halfspace2::new(1.0, 2.0, e + f),
        Halfspace2::new(1.0, 1.0, g),
    ])
}

/// Block-size exponents of the successive-cancellation covering code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecrecyThresholds {
    pub i_max_u_e: f64,
    pub i_max_y_ue: f64,
    pub i_max_v_uye: f64,
    /// `log₂(3/ε′³) − ¼ log₂ δ`.
    pub constant: f64,
    pub c0: f64,
    pub log_k1: f64,
    pub log_k2: f64,
    pub log_k3: f64,
}

impl SecrecyThresholds {
    fn from_terms(i_u: f64, i_y: f64, i_v: f64, tol: &ToleranceConfig) -> Self {
        let constant = tol.covering_constant();
        Self {
            i_max_u_e: i_u,
            i_max_y_ue: i_y,
            i_max_v_uye: i_v,
            constant,
            c0: tol.c0,
            log_k1: (i_u + constant).max(0.0),
            log_k2: (i_y + constant + tol.c0).max(0.0),
            log_k3: (i_v + constant + tol.c0).max(0.0),
        }
    }

    /// `log K₁ + log K₃`.
    pub fn alice(&self) -> f64 {
        self.log_k1 + self.log_k3
    }

    /// `log K₂`.
    pub fn bob(&self) -> f64 {
        self.log_k2
    }
}

/// Thresholds from smooth max-information at `δ′ = δ − ε′` on the split state.
pub fn secrecy_thresholds(split_cs: &ControlState, tol: &ToleranceConfig) -> Result<SecrecyThresholds> {
    tol.validate()?;
    check_split_labels(split_cs)?;
    let (u, v, y) = (0usize, 1usize, 2usize);
    let dp = tol.delta_prime();
    let imax = |left: &[usize], right: &[usize]| -> Result<f64> {
        let (rho, split) = split_cs.info_state(left, right, &[Output::E])?;
        let r = oneshot::i_max_smooth_detailed(&rho, &split, dp)?;
        finite(r.value, "smooth max-information")
    };
    Ok(SecrecyThresholds::from_terms(
        imax(&[u], &[])?,
        imax(&[y], &[u])?,
        imax(&[v], &[u, y])?,
        tol,
    ))
}

/// `(S_θ − T_θ)⁺`: rate pairs `R ≥ 0` with `R + (alice, bob) ∈ S_θ`.
pub fn private_region_theta(s: &RateRegion2D, t: &SecrecyThresholds) -> RateRegion2D {
    s.shifted([t.alice(), t.bob()])
}

/// Everything computed at one value of `θ`.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaRegion {
    pub theta: f64,
    pub decode: RateRegion3D,
    pub projected: RateRegion2D,
    pub thresholds: SecrecyThresholds,
    pub private: RateRegion2D,
}

pub fn theta_region(cs: &ControlState, tol: &ToleranceConfig, theta: f64) -> Result<ThetaRegion> {
    tol.validate()?;
    let split = split_control_state(cs, theta)?;
    let decode = decode_region_3(&split, tol.eps)?;
    let projected = project_to_2d(&decode);
    let thresholds = secrecy_thresholds(&split, tol)?;
    let private = private_region_theta(&projected, &thresholds);
    Ok(ThetaRegion {
        theta,
        decode,
        projected,
        thresholds,
        private,
    })
}

/// `n` evenly spaced points on `[0, 1]`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Private regions on a `θ` grid, computed in parallel and returned in grid order.
pub fn private_region_union(cs: &ControlState, tol: &ToleranceConfig, thetas: &[f64]) -> Result<Vec<ThetaRegion>> {
    tol.validate()?;
    if let Some(t) = thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::invalid(format!("theta {t} outside [0, 1]")));
    }
    thetas.par_iter().map(|&t| theta_region(cs, tol, t)).collect()
}

/// Whether some `θ` region contains `p`.
pub fn union_contains(regions: &[ThetaRegion], p: [f64; 2], tol: f64) -> bool {
    regions.iter().any(|r| !r.private.is_empty() && r.private.contains(p, tol))
}

/// Shannon-limit quantities of a `(X, Y)` control state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticTerms {
    pub i_x_yc: f64,
    pub i_y_xc: f64,
    pub i_xy_c: f64,
    pub i_x_e: f64,
    pub i_y_e: f64,
    pub i_xy_e: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRegion {
    pub terms: AsymptoticTerms,
    /// MAC pentagon from the `C` informations.
    pub decode: RateRegion2D,
    /// Lower-left corner values of the secrecy cost region `(I(X:E), I(Y:E), I(XY:E))`.
    pub secrecy: [f64; 3],
    pub private: RateRegion2D,
}

pub fn asymptotic_region(cs: &ControlState) -> Result<AsymptoticRegion> {
    if cs.labels().len() != 2 {
        return Err(Error::invalid("asymptotic region needs labels (X, Y)"));
    }
    let mi = |left: &[usize], right: &[usize], out: Output| -> Result<f64> {
        let (rho, split) = cs.info_state(left, right, &[out])?;
        oneshot::mutual_information(&rho, &split)
    };
    let terms = AsymptoticTerms {
        i_x_yc: mi(&[0], &[1], Output::C)?,
        i_y_xc: mi(&[1], &[0], Output::C)?,
        i_xy_c: mi(&[0, 1], &[], Output::C)?,
        i_x_e: mi(&[0], &[], Output::E)?,
        i_y_e: mi(&[1], &[], Output::E)?,
        i_xy_e: mi(&[0, 1], &[], Output::E)?,
    };
    let t = terms;
    let decode = RateRegion2D::new(vec![
        Halfspace2::new(1.0, 0.0, t.i_x_yc),
        Halfspace2::new(0.0, 1.0, t.i_y_xc),
        Halfspace2::new(1.0, 1.0, t.i_xy_c),
    ]);
    let private = RateRegion2D::new(vec![
        Halfspace2::new(1.0, 0.0, t.i_x_yc - t.i_x_e),
        Halfspace2::new(0.0, 1.0, t.i_y_xc - t.i_y_e),
        Halfspace2::new(1.0, 1.0, t.i_xy_c - t.i_xy_e),
    ]);
    Ok(AsymptoticRegion {
        terms,
        decode,
        secrecy: [t.i_x_e, t.i_y_e, t.i_xy_e],
        private,
    })
}

/// One-shot sum-rate term `I_H^ε(XY:C)` of a `(X, Y)` control state (or of
/// its tensor power), in bits.
pub fn sum_rate_term(cs: &ControlState, eps: f64) -> Result<f64> {
    let labels: Vec<usize> = (0..cs.labels().len()).collect();
    let (rho, split) = cs.info_state(&labels, &[], &[Output::C])?;
    finite(oneshot::i_hypo(&rho, &split, eps)?, "hypothesis-testing information")
}

/// `I_max^{ε}(labels : E)` of a control state.
pub fn secrecy_term(cs: &ControlState, labels: &[usize], eps: f64, cfg: &OneShotConfig) -> Result<f64> {
    let (rho, split) = cs.info_state(labels, &[], &[Output::E])?;
    let sigma = oneshot::product_of_marginals(&rho, &split)?;
    let r = oneshot::d_max_smooth_with(&rho, &sigma, eps, cfg)?;
    finite(r.value, "smooth max-information")
}

pub const CSV_SCHEMA: &str = "# cqmac-regions schema 1";

/// Vertex table: a schema line, the header `theta,R1,R2`, then one row per
/// private-region vertex per `θ` and finally the asymptotic vertices
/// tagged `asym`.
pub fn regions_csv(regions: &[ThetaRegion], asym: Option<&AsymptoticRegion>) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA);
    out.push('\n');
    out.push_str("theta,R1,R2\n");
    for r in regions {
        for v in &r.private.vertices {
            out.push_str(&format!("{},{},{}\n", r.theta, v[0], v[1]));
        }
    }
    if let Some(a) = asym {
        for v in &a.private.vertices {
            out.push_str(&format!("asym,{},{}\n", v[0], v[1]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_control_state, CqMacChannel};
    use crate::qla::{CMatrix, DensityMatrix};
    use crate::split::FiniteDist;
    use approx::assert_abs_diff_eq;

    fn bits() -> Vec<String> {
        vec!["0".into(), "1".into()]
    }

    fn basis(i: usize) -> CMatrix {
        DensityMatrix::basis(vec![2], i).unwrap().into_entries()
    }

    fn classical_cs(f_c: impl Fn(usize, usize) -> usize, f_e: impl Fn(usize, usize) -> usize) -> ControlState {
        let outs = (0..4)
            .map(|k| {
                let (x, y) = (k / 2, k % 2);
                basis(f_c(x, y)).kronecker(&basis(f_e(x, y)))
            })
            .collect();
        let ch = CqMacChannel::new(bits(), bits(), 2, 2, outs).unwrap();
        let p = FiniteDist::uniform(bits()).unwrap();
        build_control_state(&ch, &p, &p).unwrap()
    }

    #[test]
    fn polygon_vertices() {
        let r = RateRegion2D::new(vec![
            Halfspace2::new(1.0, 0.0, 1.0),
            Halfspace2::new(0.0, 1.0, 1.0),
            Halfspace2::new(1.0, 1.0, 1.5),
        ]);
        assert_eq!(
            r.vertices,
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 1.0]]
        );
        for v in &r.vertices {
            assert!(r.halfspaces.iter().all(|h| h.slack(*v) >= -1e-9));
        }
        let empty = RateRegion2D::new(vec![Halfspace2::new(1.0, 1.0, -0.1)]);
        assert!(empty.is_empty());
        let point = RateRegion2D::new(vec![Halfspace2::new(1.0, 1.0, 0.0)]);
        assert_eq!(point.vertices, vec![[0.0, 0.0]]);
    }

    #[test]
    fn input_independent_channel() {
        let cs = classical_cs(|_, _| 0, |_, _| 0);
        let eps = 0.1;
        let split = split_control_state(&cs, 0.5).unwrap();
        let r3 = decode_region_3(&split, eps).unwrap();
        let expect = -(1.0 - eps).log2();
        for t in [
            r3.terms.i_u_cvy,
            r3.terms.i_y_cuv,
            r3.terms.i_v_cuy,
            r3.terms.i_uv_cy,
            r3.terms.i_uy_cv,
            r3.terms.i_yv_cu,
            r3.terms.i_uyv_c,
        ] {
            assert_abs_diff_eq!(t, expect, epsilon = 1e-9);
        }
        // every bound is negative before clamping, so only the origin survives
        let s = project_to_2d(&r3);
        assert_eq!(s.vertices, vec![[0.0, 0.0]]);
        assert!(s.vertices.iter().all(|v| v[0] <= 1.5 && v[1] <= 1.5));
    }

    #[test]
    fn noiseless_sum_rate() {
        // C = x XOR y is a deterministic function of both inputs
        let cs = classical_cs(|x, y| x ^ y, |_, _| 0);
        let eps = 0.05;
        let split = split_control_state(&cs, 0.0).unwrap();
        let r3 = decode_region_3(&split, eps).unwrap();
        // ρ^{XYC} vs ρ^{XY}⊗ρ^C: accepted outcomes have ratio 2, σ-mass (1−ε)/2
        assert_abs_diff_eq!(r3.terms.i_uyv_c, 1.0 - (1.0 - eps).log2(), epsilon = 1e-9);
        let unsplit = sum_rate_term(&cs, eps).unwrap();
        assert_abs_diff_eq!(r3.terms.i_uyv_c, unsplit, epsilon = 1e-9);
    }

    #[test]
    fn theta_zero_is_the_pentagon() {
        let cs = classical_cs(|x, y| x ^ y, |x, y| x & y);
        let eps = 0.2;
        let split = split_control_state(&cs, 0.0).unwrap();
        let s = project_to_2d(&decode_region_3(&split, eps).unwrap());
        let off = eps.log2() - 1.0;
        let ih = |l: &[usize], r: &[usize]| {
            let (rho, sp) = cs.info_state(l, r, &[Output::C]).unwrap();
            (oneshot::i_hypo(&rho, &sp, eps).unwrap().finite().unwrap() + off).max(0.0)
        };
        let pent = RateRegion2D::new(vec![
            Halfspace2::new(1.0, 0.0, ih(&[0], &[1])),
            Halfspace2::new(0.0, 1.0, ih(&[1], &[0])),
            Halfspace2::new(1.0, 1.0, ih(&[0, 1], &[])),
        ]);
        assert_eq!(s.vertices.len(), pent.vertices.len());
        for (a, b) in s.vertices.iter().zip(&pent.vertices) {
            assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-6);
            assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-6);
        }
    }

    #[test]
    fn thresholds_for_blind_eavesdropper() {
        let cs = classical_cs(|x, y| x ^ y, |_, _| 0);
        let tol = ToleranceConfig {
            c0: 0.5,
            ..Default::default()
        };
        let t = secrecy_thresholds(&split_control_state(&cs, 0.5).unwrap(), &tol).unwrap();
        assert_eq!([t.i_max_u_e, t.i_max_y_ue, t.i_max_v_uye], [0.0, 0.0, 0.0]);
        let k = (3.0 / tol.eps_prime.powi(3)).log2() - 0.25 * tol.delta.log2();
        assert_abs_diff_eq!(t.log_k1, k, epsilon = 1e-12);
        assert_abs_diff_eq!(t.log_k2, k + 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(t.log_k3, k + 0.5, epsilon = 1e-12);
    }

    #[test]
    fn thresholds_collapse_at_degenerate_theta() {
        let cs = classical_cs(|x, y| x ^ y, |x, y| x & y);
        let tol = ToleranceConfig::default();
        let t0 = secrecy_thresholds(&split_control_state(&cs, 0.0).unwrap(), &tol).unwrap();
        assert_eq!(t0.i_max_u_e, 0.0);
        let t1 = secrecy_thresholds(&split_control_state(&cs, 1.0).unwrap(), &tol).unwrap();
        assert_eq!(t1.i_max_v_uye, 0.0);
    }

    #[test]
    fn private_region_is_an_exact_shift() {
        let s = RateRegion2D::new(vec![
            Halfspace2::new(1.0, 0.0, 5.0),
            Halfspace2::new(0.0, 1.0, 4.0),
            Halfspace2::new(1.0, 1.0, 7.0),
        ]);
        let t = SecrecyThresholds {
            i_max_u_e: 0.0,
            i_max_y_ue: 0.0,
            i_max_v_uye: 0.0,
            constant: 0.0,
            c0: 0.0,
            log_k1: 1.0,
            log_k2: 2.0,
            log_k3: 0.5,
        };
        let p = private_region_theta(&s, &t);
        assert_eq!(p.vertices, vec![[0.0, 0.0], [3.5, 0.0], [1.5, 2.0], [0.0, 2.0]]);
        for v in &p.vertices {
            assert!(s.contains([v[0] + 1.5, v[1] + 2.0], 1e-12));
        }
        let big = SecrecyThresholds { log_k1: 10.0, ..t };
        assert!(private_region_theta(&s, &big).is_empty());
    }

    #[test]
    fn asymptotic_xor_and() {
        let cs = classical_cs(|x, y| x ^ y, |x, y| x & y);
        let a = asymptotic_region(&cs).unwrap();
        let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert_abs_diff_eq!(a.terms.i_x_yc, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.terms.i_y_xc, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.terms.i_xy_c, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.terms.i_x_e, h(0.25) - 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(a.terms.i_xy_e, h(0.25), epsilon = 1e-9);
        assert!(!a.private.is_empty());
    }

    #[test]
    fn csv_layout() {
        let cs = classical_cs(|x, y| x ^ y, |_, _| 0);
        let a = asymptotic_region(&cs).unwrap();
        let csv = regions_csv(&[], Some(&a));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_SCHEMA));
        assert_eq!(lines.next(), Some("theta,R1,R2"));
        assert!(lines.all(|l| l.starts_with("asym,")));
    }
}
