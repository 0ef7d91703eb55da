use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{config, Result};
use crate::real::{lit, Real};

pub const MIN_RULE_ORDER: usize = 2;
pub const MAX_RULE_ORDER: usize = 512;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Weight `e^{-u²}` on the real line.
    Hermite,
    /// Weight 1 on `[-1, 1]`.
    Legendre,
}

/// Gauss nodes and weights, nodes sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    kind: RuleKind,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn pairs(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ wᵢ f(xᵢ)`: the weighted integral over the rule's native domain.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.pairs().fold(T::zero(), |acc, (x, w)| acc + w * f(x))
    }

    /// Legendre rule mapped affinely onto `[a, b]`.
    pub fn integrate_interval<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        debug_assert_eq!(self.kind, RuleKind::Legendre);
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        half * self.integrate(|x| f(mid + half * x))
    }

    fn cast<U: Real>(&self) -> QuadratureRule<U> {
        QuadratureRule {
            kind: self.kind,
            nodes: self.nodes.iter().map(|&x| lit(x.to_f64().unwrap())).collect(),
            weights: self.weights.iter().map(|&w| lit(w.to_f64().unwrap())).collect(),
        }
    }
}

/// Gauss–Hermite or Gauss–Legendre rule of the given order, `2 ≤ order ≤ 512`.
///
/// Nodes are refined by Newton iteration from asymptotic seeds in double
/// precision and then converted to `T`.
pub fn quadrature_nodes<T: Real>(kind: RuleKind, order: usize) -> Result<QuadratureRule<T>> {
    Ok(cached_rule(kind, order)?.cast())
}

/// Shared double-precision rule; computed on first use.
pub fn cached_rule(kind: RuleKind, order: usize) -> Result<Arc<QuadratureRule<f64>>> {
    type Cache = RwLock<HashMap<(RuleKind, usize), Arc<QuadratureRule<f64>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    if !(MIN_RULE_ORDER..=MAX_RULE_ORDER).contains(&order) {
        return Err(config(format!(
            "quadrature order {order} outside [{MIN_RULE_ORDER}, {MAX_RULE_ORDER}]"
        )));
    }
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.read().unwrap().get(&(kind, order)) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(match kind {
        RuleKind::Legendre => legendre(order)?,
        RuleKind::Hermite => hermite(order)?,
    });
    let mut map = cache.write().unwrap();
    Ok(Arc::clone(map.entry((kind, order)).or_insert(rule)))
}

fn not_converged(kind: &str, n: usize, i: usize) -> crate::Error {
    config(format!("{kind} node {i} of order {n} did not converge"))
}

fn legendre(n: usize) -> Result<QuadratureRule<f64>> {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p1, p2) = legendre_pair(n, z);
            let pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / pp;
            z -= step;
            if step.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(not_converged("Legendre", n, i));
        }
        let (p1, p2) = legendre_pair(n, z);
        let pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { kind: RuleKind::Legendre, nodes, weights })
}

/// `(P_n(z), P_{n-1}(z))` by the three-term recurrence.
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

fn hermite(n: usize) -> Result<QuadratureRule<f64>> {
    // Orthonormal Hermite recurrence; p_0 = π^{-1/4}. Positive zeros are
    // bracketed by a sign-change scan finer than the smallest zero spacing,
    // then polished by Newton steps kept inside the bracket.
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let positive = n / 2;
    let step = 0.1 * PI / (2.0 * nf + 1.0).sqrt();
    let z_max = (2.0 * nf + 1.0).sqrt() + 1.0;
    let mut roots = Vec::with_capacity(positive);
    let mut lo = if n % 2 == 1 { 0.5 * step } else { 0.0 };
    let mut p_lo = hermite_pair(n, lo, pim4).0;
    while roots.len() < positive && lo < z_max {
        let hi = lo + step;
        let p_hi = hermite_pair(n, hi, pim4).0;
        if p_lo.signum() != p_hi.signum() {
            roots.push(polish_hermite(n, lo, hi, p_lo, pim4).ok_or_else(|| not_converged("Hermite", n, roots.len()))?);
        }
        lo = hi;
        p_lo = p_hi;
    }
    if roots.len() != positive {
        return Err(not_converged("Hermite", n, roots.len()));
    }
    let weight = |z: f64| {
        let (_, p2) = hermite_pair(n, z, pim4);
        let pp = (2.0 * nf).sqrt() * p2;
        2.0 / (pp * pp)
    };
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let off = n.div_ceil(2);
    for (k, &r) in roots.iter().enumerate() {
        let w = weight(r);
        nodes[off + k] = r;
        weights[off + k] = w;
        nodes[positive - 1 - k] = -r;
        weights[positive - 1 - k] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        weights[n / 2] = weight(0.0);
    }
    Ok(QuadratureRule { kind: RuleKind::Hermite, nodes, weights })
}

fn polish_hermite(n: usize, mut lo: f64, mut hi: f64, p_lo: f64, pim4: f64) -> Option<f64> {
    let sign_lo = p_lo.signum();
    let mut z = 0.5 * (lo + hi);
    for _ in 0..NEWTON_MAX_ITER {
        let (p1, p2) = hermite_pair(n, z, pim4);
        if p1 == 0.0 {
            return Some(z);
        }
        if p1.signum() == sign_lo {
            lo = z;
        } else {
            hi = z;
        }
        let pp = (2.0 * n as f64).sqrt() * p2;
        let mut next = z - p1 / pp;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let moved = (next - z).abs();
        z = next;
        if moved <= NEWTON_TOL * z.abs().max(1.0) {
            return Some(z);
        }
    }
    None
}

fn hermite_pair(n: usize, z: f64, p0: f64) -> (f64, f64) {
    let mut p1 = p0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}
