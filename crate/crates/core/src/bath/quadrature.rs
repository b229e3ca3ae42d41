//! Composite Gauss–Legendre rules and principal-value integrals.

use alloc::vec::Vec;

use crate::error::{QmeError, Result};

const PI: f64 = core::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature settings for every integral over bath spectra.
///
/// Each subinterval between breakpoints is mapped through
/// `x = a + (b − a)(1 − cos πu)/2`, which absorbs square-root endpoint behaviour,
/// and integrated with panels of a fixed Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct PvQuadrature {
    points: usize,
    rel_tol: f64,
    self_check: bool,
    rule: GaussLegendre,
}

impl Default for PvQuadrature {
    fn default() -> Self {
        PvQuadrature::new(2000, 1e-8).expect("default quadrature")
    }
}

const ORDER: usize = 16;

impl PvQuadrature {
    pub fn new(points: usize, rel_tol: f64) -> Result<Self> {
        if points < ORDER {
            return Err(QmeError::InvalidArgument(alloc::format!("need at least {ORDER} points")));
        }
        if !(rel_tol > 0.0) {
            return Err(QmeError::InvalidArgument("rel_tol must be positive".into()));
        }
        Ok(PvQuadrature { points, rel_tol, self_check: true, rule: GaussLegendre::new(ORDER) })
    }

    pub fn without_self_check(mut self) -> Self {
        self.self_check = false;
        self
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn self_check(&self) -> bool {
        self.self_check
    }

    fn pass<const K: usize>(
        &self,
        f: &dyn Fn(f64) -> Result<[f64; K]>,
        cuts: &[f64],
        points: usize,
    ) -> Result<([f64; K], [f64; K])> {
        let nsub = cuts.len() - 1;
        let panels = (points / (ORDER * nsub)).max(1);
        let mut sum = [0.0; K];
        let mut l1 = [0.0; K];
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = b - a;
            for p in 0..panels {
                let u0 = p as f64 / panels as f64;
                let hu = 1.0 / panels as f64;
                for (t, wt) in self.rule.nodes.iter().zip(&self.rule.weights) {
                    let u = u0 + 0.5 * hu * (t + 1.0);
                    let x = a + 0.5 * len * (1.0 - libm::cos(PI * u));
                    let jac = 0.5 * len * PI * libm::sin(PI * u) * 0.5 * hu * wt;
                    let v = f(x)?;
                    for k in 0..K {
                        sum[k] += jac * v[k];
                        l1[k] += (jac * v[k]).abs();
                    }
                }
            }
        }
        Ok((sum, l1))
    }

    /// ∫_a^b f with the given interior breakpoints, self-checked by doubling.
    pub fn integrate<const K: usize>(
        &self,
        f: &dyn Fn(f64) -> Result<[f64; K]>,
        a: f64,
        b: f64,
        breakpoints: &[f64],
    ) -> Result<[f64; K]> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(QmeError::NonFinite("integration limits"));
        }
        if !(b > a) {
            return Ok([0.0; K]);
        }
        let mut cuts = alloc::vec![a];
        let mut inner: Vec<f64> =
            breakpoints.iter().copied().filter(|&x| x > a && x < b && x.is_finite()).collect();
        inner.sort_by(f64::total_cmp);
        let gap = 1e-12 * (b - a);
        for x in inner {
            if x - cuts[cuts.len() - 1] > gap && b - x > gap {
                cuts.push(x);
            }
        }
        cuts.push(b);

        let (coarse, _) = self.pass(f, &cuts, self.points)?;
        if !self.self_check {
            return Ok(coarse);
        }
        let (fine, l1) = self.pass(f, &cuts, 2 * self.points)?;
        for k in 0..K {
            let scale = l1[k].max(fine[k].abs());
            if (fine[k] - coarse[k]).abs() > self.rel_tol * scale {
                return Err(QmeError::QuadratureDiverged { coarse: coarse[k], fine: fine[k] });
            }
            if !fine[k].is_finite() {
                return Err(QmeError::NonFinite("quadrature result"));
            }
        }
        Ok(fine)
    }
}

/// 𝒫∫₀^Λ f(ω)/(ω − E) dω.
///
/// For E > 0 the pole is removed by subtracting f(E) and adding f(E)·ln((Λ − E)/E).
pub fn pv_halfline(
    f: &dyn Fn(f64) -> Result<f64>,
    e: f64,
    upper: f64,
    quad: &PvQuadrature,
) -> Result<f64> {
    if !e.is_finite() {
        return Err(QmeError::NonFinite("pole position"));
    }
    if !(upper > 0.0) || !upper.is_finite() {
        return Err(QmeError::InvalidArgument(alloc::format!("upper limit {upper}")));
    }
    if e <= 0.0 {
        let g = |w: f64| -> Result<[f64; 1]> { Ok([f(w)? / (w - e)]) };
        return Ok(quad.integrate(&g, 0.0, upper, &[-e])?[0]);
    }
    if e >= upper {
        return Err(QmeError::InvalidArgument(alloc::format!("pole {e} beyond upper limit {upper}")));
    }
    let fe = f(e)?;
    let g = |w: f64| -> Result<[f64; 1]> { Ok([(f(w)? - fe) / (w - e)]) };
    let regular = quad.integrate(&g, 0.0, upper, &[e])?[0];
    Ok(regular + fe * libm::log((upper - e) / e))
}

/// 𝒫∫_{−Λ}^{Λ} h(ω)/ω dω, folded onto (0, Λ) as ∫ (h(ω) − h(−ω))/ω.
pub fn pv_fullline<const K: usize>(
    h: &dyn Fn(f64) -> Result<[f64; K]>,
    upper: f64,
    breakpoints: &[f64],
    quad: &PvQuadrature,
) -> Result<[f64; K]> {
    let g = |w: f64| -> Result<[f64; K]> {
        let a = h(w)?;
        let b = h(-w)?;
        let mut out = [0.0; K];
        for k in 0..K {
            out[k] = (a[k] - b[k]) / w;
        }
        Ok(out)
    };
    quad.integrate(&g, 0.0, upper, breakpoints)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let r = GaussLegendre::new(16);
        let s: f64 = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        let total: f64 = r.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_integral_oracle() {
        let q = PvQuadrature::default();
        let v = pv_halfline(&|w| Ok(libm::exp(-w)), -1.0, 60.0, &q).unwrap();
        assert!((v - 0.596_347_362_323_194).abs() < 1e-12, "{v}");
    }

    #[test]
    fn vanishing_subtraction_term() {
        // f(E) = 0 at E = 1
        let q = PvQuadrature::default();
        let f = |w: f64| Ok((w - 1.0) * libm::exp(-w));
        let v = pv_halfline(&f, 1.0, 60.0, &q).unwrap();
        let direct = q.integrate(&|w: f64| Ok([libm::exp(-w)]), 0.0, 60.0, &[]).unwrap()[0];
        assert!((v - direct).abs() < 1e-13);
    }

    #[test]
    fn sqrt_endpoint() {
        let q = PvQuadrature::default();
        let v = q.integrate(&|w: f64| Ok([libm::sqrt(w)]), 0.0, 1.0, &[]).unwrap()[0];
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
    }
}
