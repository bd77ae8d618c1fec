//! Residual minimisation over connections.
//!
//! The objective is `R(A) = ‖residual(curvature(A))‖²`, a real function of the
//! real coordinates of every slot `A_k^i` in the basis returned by
//! [`AlgebraKind::coordinate_basis`]. Descent runs in those coordinates, so
//! su(2) iterates stay in su(2) without projection.

use serde::Serialize;

use crate::algebra::{AlgebraElement, AlgebraKind};
use crate::cochain::{delta, Cochain, ConnectionField, CurvatureField};
use crate::curvature::curvature;
use crate::duality::{residual, DualityProblem};
use crate::error::{Error, Result};
use crate::hodge::star_adjoint;
use crate::lattice::{Axis, LatticeIndex, Plane};

/// Steps shorter than this end the search.
pub const MIN_STEP: f64 = 1e-16;

/// Sufficient-decrease constant of the Armijo test.
const ARMIJO_C1: f64 = 1e-4;

pub fn objective(a: &ConnectionField, problem: DualityProblem) -> f64 {
    residual(&curvature(a), problem).norm_sqr()
}

/// Real coordinates of one slot in `kind`'s (orthogonal) basis.
pub fn slot_coordinates(kind: AlgebraKind, x: &AlgebraElement) -> Vec<f64> {
    kind.coordinate_basis().iter().map(|e| e.inner(x).re / e.norm_sqr()).collect()
}

/// All coordinates of a connection in storage order.
pub fn coordinates(a: &ConnectionField) -> Vec<f64> {
    let basis = a.algebra().coordinate_basis();
    a.values().iter().flat_map(|x| basis.iter().map(move |e| e.inner(x).re / e.norm_sqr())).collect()
}

/// Rebuilds a connection from [`coordinates`] output.
pub fn from_coordinates(template: &ConnectionField, coords: &[f64]) -> ConnectionField {
    let basis = template.algebra().coordinate_basis();
    assert_eq!(coords.len(), template.values().len() * basis.len());
    let values = coords.chunks(basis.len()).map(|c| combine(&basis, c)).collect();
    ConnectionField::with_values(template.window(), template.algebra(), values)
}

fn combine(basis: &[AlgebraElement], coeffs: &[f64]) -> AlgebraElement {
    basis.iter().zip(coeffs).map(|(e, &c)| e.scale(c)).sum()
}

/// `∂R/∂c` for every real coordinate, in [`coordinates`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub components: Vec<f64>,
}

impl Gradient {
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|g| g * g).sum()
    }

    pub fn dot(&self, coords: &[f64]) -> f64 {
        self.components.iter().zip(coords).map(|(g, c)| g * c).sum()
    }

    /// The gradient as a connection-shaped tangent `Σ_c (∂R/∂c) E_c` per slot.
    pub fn tangent(&self, like: &ConnectionField) -> ConnectionField {
        from_coordinates(like, &self.components)
    }
}

/// `L†(w)` for the residual operator `L(F) = a·F + b·∗F`.
fn residual_adjoint(w: &CurvatureField, problem: DualityProblem) -> CurvatureField {
    let (ca, cb) = problem.coefficients();
    let pulled = star_adjoint(w, problem.metric);
    w.zip_with(&pulled, |x, y| x.scale_c(ca.conj()) + y.scale_c(cb.conj())).expect("same window")
}

/// Pulls a curvature cotangent `Q` back through the linearised curvature map:
/// returns `∂/∂c Re Σ tr(Q† dF)` for every coordinate `c` of `A`.
///
/// `tr(Q† X dA Y) = tr((X† Q Y†)† dA)`, applied to each of the eight terms of
/// `dF^{ij}_k`.
fn pullback(a: &ConnectionField, q: &CurvatureField) -> Vec<f64> {
    let window = a.window();
    let mut cot = vec![AlgebraElement::zero(); window.num_sites() * 4];
    let mut add = |k: LatticeIndex, axis: Axis, v: AlgebraElement| {
        if let Some(o) = window.site_offset(k) {
            cot[o * 4 + axis.offset()] += v;
        }
    };
    for k in window.sites() {
        for plane in Plane::ALL {
            let qk = q.get(k, plane);
            let (i, j) = plane.axes();
            let (ki, kj) = (k.shift_up(i), k.shift_up(j));
            // Δ_{k_i}A^j - Δ_{k_j}A^i
            add(ki, j, qk);
            add(k, j, -qk);
            add(kj, i, -qk);
            add(k, i, qk);
            // A^i_k A^j_{τ_i k}
            add(k, i, qk * a.get(ki, j).adjoint());
            add(ki, j, a.get(k, i).adjoint() * qk);
            // -A^j_k A^i_{τ_j k}
            add(k, j, -(qk * a.get(kj, i).adjoint()));
            add(kj, i, -(a.get(k, j).adjoint() * qk));
        }
    }
    let basis = a.algebra().coordinate_basis();
    cot.iter().flat_map(|g| basis.iter().map(move |e| e.inner(g).re)).collect()
}

/// Analytic gradient of [`objective`].
///
/// `dR = 2 Re⟨r, L dF⟩ = Re⟨2 L†r, dF⟩`, pulled back to the coordinates of `A`.
pub fn gradient(a: &ConnectionField, problem: DualityProblem) -> Gradient {
    let r = residual(&curvature(a), problem);
    let components = pullback(a, &residual_adjoint(&r, problem)).into_iter().map(|x| 2.0 * x).collect();
    Gradient { components }
}

/// Derivative of [`curvature`] at `a` in the direction `da`.
pub fn curvature_tangent(a: &ConnectionField, da: &ConnectionField) -> CurvatureField {
    CurvatureField::from_fn(a.window(), AlgebraKind::Gl2, |k, plane| {
        let (i, j) = plane.axes();
        let (ki, kj) = (k.shift_up(i), k.shift_up(j));
        delta(da, i, j, k) - delta(da, j, i, k) + da.get(k, i) * a.get(ki, j) + a.get(k, i) * da.get(ki, j)
            - da.get(k, j) * a.get(kj, i)
            - a.get(k, j) * da.get(kj, i)
    })
}

fn vec_dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(u, v)| u * v).sum()
}

/// Solves `(JᵀJ + μI) x = b` by conjugate gradients, `J` the residual Jacobian.
fn damped_normal_solve(a: &ConnectionField, problem: DualityProblem, mu: f64, b: &[f64], max_iter: usize) -> Vec<f64> {
    let apply = |v: &[f64]| -> Vec<f64> {
        let jv = residual(&curvature_tangent(a, &from_coordinates(a, v)), problem);
        let jtjv = pullback(a, &residual_adjoint(&jv, problem));
        jtjv.iter().zip(v).map(|(x, vi)| x + mu * vi).collect()
    };
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut d = r.clone();
    let mut rr = vec_dot(&r, &r);
    let stop = rr * 1e-20;
    for _ in 0..max_iter {
        if rr <= stop {
            break;
        }
        let ad = apply(&d);
        let curv = vec_dot(&d, &ad);
        if !(curv > 0.0) {
            break;
        }
        let alpha = rr / curv;
        for n in 0..x.len() {
            x[n] += alpha * d[n];
            r[n] -= alpha * ad[n];
        }
        let rr_new = vec_dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for n in 0..d.len() {
            d[n] = r[n] + beta * d[n];
        }
    }
    x
}

/// Search direction used by [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Steepest descent; first trial step from the Barzilai-Borwein estimate.
    GradientDescent,
    /// Levenberg-Marquardt direction `-(JᵀJ + R·I)⁻¹ Jᵀr`, solved by CG.
    GaussNewton,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gd" => Ok(Method::GradientDescent),
            "gn" => Ok(Method::GaussNewton),
            other => Err(format!("unknown method '{other}' (expected gd or gn)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub problem: DualityProblem,
    pub max_iter: usize,
    /// Target scalar residual `‖residual‖` (the square root of `R`).
    pub tol: f64,
    /// First trial step of every line search (gradient descent: of the first one).
    pub step0: f64,
    pub backtrack: f64,
    /// Recorded for provenance; the descent itself is deterministic.
    pub seed: u64,
    /// Record every n-th accepted step in the trace (the last one always).
    pub trace_every: usize,
    pub method: Method,
    /// Conjugate-gradient iterations per Gauss-Newton direction.
    pub inner_iter: usize,
}

impl SolveConfig {
    pub fn new(problem: DualityProblem) -> Self {
        Self {
            problem,
            max_iter: 10_000,
            tol: 1e-8,
            step0: 1.0,
            backtrack: 0.5,
            seed: 0,
            trace_every: 1,
            method: Method::GaussNewton,
            inner_iter: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.max_iter < 1 {
            return bad("max_iter must be at least 1");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.step0 > 0.0) {
            return bad("step0 must be positive");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack must lie in (0, 1)");
        }
        if self.trace_every < 1 {
            return bad("trace_every must be at least 1");
        }
        if self.inner_iter < 1 {
            return bad("inner_iter must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    StepUnderflow,
    Stationary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub residual_trace: Vec<TracePoint>,
    pub converged: bool,
    pub stop: StopReason,
}

/// Minimises [`objective`] by a line search in the real coordinates of `A`.
///
/// Every line search backtracks by `cfg.backtrack` until the Armijo condition
/// holds and `R` strictly decreases, so the trace is strictly decreasing.
/// Stops at `cfg.tol`, `cfg.max_iter` accepted steps, or a step below
/// [`MIN_STEP`].
pub fn solve(a0: &ConnectionField, cfg: &SolveConfig) -> Result<(ConnectionField, SolveReport)> {
    cfg.validate()?;
    let p = cfg.problem;
    let mut a = a0.clone();
    let mut r = objective(&a, p);
    let mut trace = vec![TracePoint { iteration: 0, residual: r.sqrt(), step: 0.0 }];
    let mut step = cfg.step0;
    let mut iterations = 0;
    let mut last_recorded = 0;
    let mut previous: Option<(Gradient, f64)> = None;

    let stop = loop {
        if r.sqrt() <= cfg.tol {
            break StopReason::Converged;
        }
        if iterations >= cfg.max_iter {
            break StopReason::MaxIterations;
        }
        let g = gradient(&a, p);
        if g.norm_sqr() == 0.0 {
            break StopReason::Stationary;
        }
        let mut direction: Vec<f64> = g.components.iter().map(|x| -x).collect();
        match cfg.method {
            Method::GaussNewton => {
                // Jᵀr = g/2
                let rhs: Vec<f64> = direction.iter().map(|x| 0.5 * x).collect();
                let gn = damped_normal_solve(&a, p, r, &rhs, cfg.inner_iter);
                if vec_dot(&gn, &g.components) < 0.0 {
                    direction = gn;
                }
                step = cfg.step0;
            }
            Method::GradientDescent => {
                if let Some((g_prev, t_prev)) = &previous {
                    // s = -t_prev·g_prev, y = g - g_prev
                    let (mut ss, mut sy) = (0.0, 0.0);
                    for (gc, gp) in g.components.iter().zip(&g_prev.components) {
                        let sc = -t_prev * gp;
                        ss += sc * sc;
                        sy += sc * (gc - gp);
                    }
                    if sy > 0.0 && (ss / sy).is_finite() {
                        step = ss / sy;
                    }
                }
            }
        }
        let slope = vec_dot(&direction, &g.components);
        let tangent = from_coordinates(&a, &direction);
        let accepted = loop {
            let trial = a.zip_with(&tangent, |x, d| *x + d.scale(step)).expect("same window");
            let rt = objective(&trial, p);
            if rt < r && rt <= r + ARMIJO_C1 * step * slope {
                break Some((trial, rt));
            }
            step *= cfg.backtrack;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((trial, rt)) = accepted else {
            break StopReason::StepUnderflow;
        };
        a = trial;
        r = rt;
        iterations += 1;
        if iterations % cfg.trace_every == 0 {
            trace.push(TracePoint { iteration: iterations, residual: r.sqrt(), step });
            last_recorded = iterations;
        }
        previous = Some((g, step));
        step /= cfg.backtrack;
    };

    if last_recorded != iterations {
        trace.push(TracePoint { iteration: iterations, residual: r.sqrt(), step });
    }
    let report = SolveReport {
        iterations,
        final_residual: r.sqrt(),
        residual_trace: trace,
        converged: stop == StopReason::Converged,
        stop,
    };
    Ok((a, report))
}
