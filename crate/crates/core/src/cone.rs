//! Dense primal-dual interior-point solver for small second-order cone
//! programs
//!
//! ```text
//! minimize    cᵀx
//! subject to  h - Gx = s,  s ∈ K
//! ```
//!
//! with `K` a product of second-order cones `{(t, u) : t ≥ ‖u‖}`. A cone of
//! dimension one is the half-line `t ≥ 0`, so linear programs are covered as
//! well. The dual is `maximize -hᵀz  s.t.  Gᵀz + c = 0, z ∈ K`.
//!
//! The iteration is an infeasible-start path-following method with
//! Nesterov–Todd scaling and a Mehrotra predictor–corrector step. Each
//! iteration solves the reduced normal equations `Gᵀ W⁻² G Δx = ·` with a
//! dense Cholesky factorization, which is adequate for the few hundred
//! variables a Dantzig-selector instance produces.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{lit, Real};

#[derive(Debug, Clone)]
pub struct ConeProgram<T: Real> {
    pub c: DVector<T>,
    pub g: DMatrix<T>,
    pub h: DVector<T>,
    /// Dimensions of the cones, in row order of `G` and `h`.
    pub cones: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct ConeSettings<T> {
    pub max_iter: usize,
    /// Relative primal/dual residual tolerance.
    pub feas_tol: T,
    /// Absolute duality-gap tolerance.
    pub abs_tol: T,
    /// Relative duality-gap tolerance.
    pub rel_tol: T,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: T,
}

impl<T: Real> Default for ConeSettings<T> {
    fn default() -> Self {
        Self {
            max_iter: 200,
            feas_tol: lit(1e-9),
            abs_tol: lit(1e-10),
            rel_tol: lit(1e-9),
            step_fraction: lit(0.99),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeStatus {
    Optimal,
    MaxIterations,
    /// The normal equations could not be factored or the step collapsed.
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct ConeSolution<T: Real> {
    pub status: ConeStatus,
    pub x: DVector<T>,
    pub s: DVector<T>,
    pub z: DVector<T>,
    pub primal_objective: T,
    pub dual_objective: T,
    pub gap: T,
    pub primal_residual: T,
    pub dual_residual: T,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
struct Layout {
    offsets: Vec<usize>,
    dims: Vec<usize>,
}

impl Layout {
    fn new(dims: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in dims {
            offsets.push(acc);
            acc += d;
        }
        Self {
            offsets,
            dims: dims.to_vec(),
        }
    }

    fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.offsets.iter().copied().zip(self.dims.iter().copied())
    }
}

fn det<T: Real>(x: &[T]) -> T {
    let tail: T = x[1..].iter().fold(T::zero(), |a, &v| a + v * v);
    x[0] * x[0] - tail
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `x ∘ y` for one cone block (Jordan product).
fn jordan<T: Real>(x: &[T], y: &[T], out: &mut [T]) {
    out[0] = dot(x, y);
    for i in 1..x.len() {
        out[i] = x[0] * y[i] + y[0] * x[i];
    }
}

/// Solves `λ ∘ d = r` for one cone block.
fn jordan_solve<T: Real>(lambda: &[T], r: &[T], out: &mut [T]) {
    let l0 = lambda[0];
    let d0 = (l0 * r[0] - dot(&lambda[1..], &r[1..])) / det(lambda);
    out[0] = d0;
    for i in 1..lambda.len() {
        out[i] = (r[i] - d0 * lambda[i]) / l0;
    }
}

/// Largest `α ≥ 0` keeping `x + α d` inside the cone (`None` if unbounded).
/// `x` must be strictly interior.
fn max_step<T: Real>(x: &[T], d: &[T]) -> Option<T> {
    if x.len() == 1 {
        return if d[0] < T::zero() { Some(-x[0] / d[0]) } else { None };
    }
    let a = det(d);
    let b = x[0] * d[0] - dot(&x[1..], &d[1..]);
    let c = det(x).max(T::zero());
    let disc = b * b - a * c;
    let mut best: Option<T> = None;
    if a < T::zero() || (b < T::zero() && disc >= T::zero()) {
        let root = c / (-b + disc.max(T::zero()).sqrt());
        best = Some(root);
    }
    if d[0] < T::zero() {
        let hit = -x[0] / d[0];
        best = Some(best.map_or(hit, |v| v.min(hit)));
    }
    best
}

/// Smallest `α` such that `x + α e` lies in the closed cone.
fn boundary_shift<T: Real>(x: &[T]) -> T {
    let tail: T = x[1..].iter().fold(T::zero(), |a, &v| a + v * v).sqrt();
    tail - x[0]
}

/// Nesterov–Todd scaling for one cone block: symmetric `W` with
/// `W z = W⁻¹ s`.
struct NtBlock<T: Real> {
    w: DMatrix<T>,
    w_inv: DMatrix<T>,
}

fn nt_block<T: Real>(s: &[T], z: &[T]) -> NtBlock<T> {
    let p = s.len();
    if p == 1 {
        let w = (s[0] / z[0]).sqrt();
        return NtBlock {
            w: DMatrix::from_element(1, 1, w),
            w_inv: DMatrix::from_element(1, 1, T::one() / w),
        };
    }
    let ds = det(s).sqrt();
    let dz = det(z).sqrt();
    let sb: Vec<T> = s.iter().map(|&v| v / ds).collect();
    let zb: Vec<T> = z.iter().map(|&v| v / dz).collect();
    let gamma = ((T::one() + dot(&sb, &zb)) / lit(2.0)).sqrt();
    let two_gamma = gamma * lit(2.0);
    let mut wbar = vec![T::zero(); p];
    wbar[0] = (sb[0] + zb[0]) / two_gamma;
    for i in 1..p {
        wbar[i] = (sb[i] - zb[i]) / two_gamma;
    }
    let norm = (lit::<T>(2.0) * (wbar[0] + T::one())).sqrt();
    let mut v = DVector::<T>::from_vec(wbar);
    v[0] += T::one();
    v /= norm;
    let beta = (ds / dz).sqrt();
    let mut j = DMatrix::<T>::identity(p, p) * -T::one();
    j[(0, 0)] = T::one();
    let vvt = &v * v.transpose();
    let w = (&vvt * lit::<T>(2.0) - &j) * beta;
    let jv = &j * &v;
    let w_inv = (&jv * jv.transpose() * lit::<T>(2.0) - &j) / beta;
    NtBlock { w, w_inv }
}

struct Scaling<T: Real> {
    blocks: Vec<NtBlock<T>>,
}

impl<T: Real> Scaling<T> {
    fn new(layout: &Layout, s: &DVector<T>, z: &DVector<T>) -> Self {
        let blocks = layout
            .iter()
            .map(|(o, d)| nt_block(&s.as_slice()[o..o + d], &z.as_slice()[o..o + d]))
            .collect();
        Self { blocks }
    }

    fn apply(&self, layout: &Layout, x: &DVector<T>, inverse: bool) -> DVector<T> {
        let mut out = DVector::zeros(x.len());
        for ((o, d), b) in layout.iter().zip(&self.blocks) {
            let m = if inverse { &b.w_inv } else { &b.w };
            let seg = m * x.rows(o, d);
            out.rows_mut(o, d).copy_from(&seg);
        }
        out
    }

    fn apply_rows(&self, layout: &Layout, g: &DMatrix<T>, inverse: bool) -> DMatrix<T> {
        let mut out = DMatrix::zeros(g.nrows(), g.ncols());
        for ((o, d), b) in layout.iter().zip(&self.blocks) {
            let m = if inverse { &b.w_inv } else { &b.w };
            let seg = m * g.rows(o, d);
            out.rows_mut(o, d).copy_from(&seg);
        }
        out
    }
}

fn blockwise<T: Real>(layout: &Layout, a: &DVector<T>, b: &DVector<T>, f: fn(&[T], &[T], &mut [T])) -> DVector<T> {
    let mut out = DVector::zeros(a.len());
    for (o, d) in layout.iter() {
        f(
            &a.as_slice()[o..o + d],
            &b.as_slice()[o..o + d],
            &mut out.as_mut_slice()[o..o + d],
        );
    }
    out
}

fn step_length<T: Real>(layout: &Layout, x: &DVector<T>, dx: &DVector<T>) -> T {
    let mut alpha: Option<T> = None;
    for (o, d) in layout.iter() {
        if let Some(a) = max_step(&x.as_slice()[o..o + d], &dx.as_slice()[o..o + d]) {
            alpha = Some(alpha.map_or(a, |v: T| v.min(a)));
        }
    }
    alpha.unwrap_or_else(|| lit(1e30))
}

fn identity_shift<T: Real>(layout: &Layout, x: &mut DVector<T>) {
    let alpha = layout
        .iter()
        .map(|(o, d)| boundary_shift(&x.as_slice()[o..o + d]))
        .fold(lit::<T>(-1e300), |a, b| a.max(b));
    if alpha >= T::zero() {
        for (o, _) in layout.iter() {
            x[o] += T::one() + alpha;
        }
    }
}

impl<T: Real> ConeProgram<T> {
    fn check(&self) {
        let m: usize = self.cones.iter().sum();
        assert_eq!(m, self.g.nrows(), "cone dimensions must cover every row of G");
        assert_eq!(m, self.h.len());
        assert_eq!(self.c.len(), self.g.ncols());
        assert!(self.cones.iter().all(|&d| d >= 1));
    }

    /// Runs the interior-point iteration. The returned solution is the final
    /// iterate on success, otherwise the best iterate seen (smallest combined
    /// residual and gap) together with a non-optimal status.
    pub fn solve(&self, settings: &ConeSettings<T>) -> ConeSolution<T> {
        self.check();
        let layout = Layout::new(&self.cones);
        let degree = lit::<T>(self.cones.len() as f64);
        let g = &self.g;
        let h = &self.h;
        let c = &self.c;
        let n = g.ncols();

        let mut e = DVector::<T>::zeros(h.len());
        for (o, _) in layout.iter() {
            e[o] = T::one();
        }

        // Least-squares starting point shifted into the cone interior.
        let gtg = g.tr_mul(g);
        let chol0 = match gtg.clone().cholesky() {
            Some(ch) => ch,
            None => {
                let reg: DMatrix<T> = DMatrix::identity(n, n) * lit::<T>(1e-12);
                match (gtg + reg).cholesky() {
                    Some(ch) => ch,
                    None => return self.failed(n, &e, 0),
                }
            }
        };
        let mut x = chol0.solve(&g.tr_mul(h));
        let mut s = h - g * &x;
        let mut z = -(g * chol0.solve(c));
        identity_shift(&layout, &mut s);
        identity_shift(&layout, &mut z);

        let h_scale = h.norm().max(T::one());
        let c_scale = c.norm().max(T::one());
        let mut best: Option<(T, ConeSolution<T>)> = None;

        for iter in 0..=settings.max_iter {
            let rx = g.tr_mul(&z) + c;
            let rz = g * &x + &s - h;
            let pcost = c.dot(&x);
            let dcost = -h.dot(&z);
            let gap = s.dot(&z);
            let pres = rz.norm() / h_scale;
            let dres = rx.norm() / c_scale;
            let relgap = if pcost < T::zero() {
                Some(gap / -pcost)
            } else if dcost > T::zero() {
                Some(gap / dcost)
            } else {
                None
            };

            let sol = ConeSolution {
                status: ConeStatus::MaxIterations,
                x: x.clone(),
                s: s.clone(),
                z: z.clone(),
                primal_objective: pcost,
                dual_objective: dcost,
                gap,
                primal_residual: pres,
                dual_residual: dres,
                iterations: iter,
            };
            let merit = pres.max(dres).max(gap / (T::one() + pcost.abs()));
            if best.as_ref().is_none_or(|(m, _)| merit < *m) {
                best = Some((merit, sol.clone()));
            }

            let converged = pres <= settings.feas_tol
                && dres <= settings.feas_tol
                && (gap <= settings.abs_tol || relgap.is_some_and(|r| r <= settings.rel_tol));
            if converged {
                return ConeSolution {
                    status: ConeStatus::Optimal,
                    ..sol
                };
            }
            if iter == settings.max_iter {
                break;
            }

            let scaling = Scaling::new(&layout, &s, &z);
            let lambda = scaling.apply(&layout, &z, false);
            let gs = scaling.apply_rows(&layout, g, true);
            let kkt = match gs.tr_mul(&gs).cholesky() {
                Some(ch) => ch,
                None => break,
            };
            let winv_rz = scaling.apply(&layout, &rz, true);

            // Solves the Newton system for a complementarity right-hand side
            // `d` (in the scaled space); returns (Δx, Δs, Δz, WΔz).
            let newton = |d: &DVector<T>| {
                let rhs = -(&rx + gs.tr_mul(&(&winv_rz + d)));
                let dx = kkt.solve(&rhs);
                let u = &gs * &dx + &winv_rz + d;
                let dz = scaling.apply(&layout, &u, true);
                let ds = scaling.apply(&layout, &(d - &u), false);
                (dx, ds, dz, u)
            };

            let mu = gap / degree;

            // Predictor.
            let d_aff = -&lambda;
            let (_, ds_a, dz_a, wdz_a) = newton(&d_aff);
            let alpha_aff = step_length(&layout, &s, &ds_a)
                .min(step_length(&layout, &z, &dz_a))
                .min(T::one());
            let gap_aff = (&s + &ds_a * alpha_aff).dot(&(&z + &dz_a * alpha_aff));
            let sigma = (gap_aff / gap).max(T::zero()).min(T::one()).powi(3);

            // Corrector.
            let winv_ds_a = &d_aff - &wdz_a;
            let ll = blockwise(&layout, &lambda, &lambda, jordan);
            let cross = blockwise(&layout, &winv_ds_a, &wdz_a, jordan);
            let rhs_c = -ll - cross + &e * (sigma * mu);
            let d = blockwise(&layout, &lambda, &rhs_c, jordan_solve);
            let (dx, ds, dz, _) = newton(&d);

            let alpha = (step_length(&layout, &s, &ds).min(step_length(&layout, &z, &dz)) * settings.step_fraction)
                .min(T::one());
            if !(alpha > lit(1e-14)) {
                break;
            }
            x += &dx * alpha;
            s += &ds * alpha;
            z += &dz * alpha;
        }

        let (_, mut sol) = best.expect("at least one iterate is recorded");
        sol.status = if sol.iterations >= settings.max_iter {
            ConeStatus::MaxIterations
        } else {
            ConeStatus::NumericalFailure
        };
        sol
    }

    fn failed(&self, n: usize, e: &DVector<T>, iterations: usize) -> ConeSolution<T> {
        ConeSolution {
            status: ConeStatus::NumericalFailure,
            x: DVector::zeros(n),
            s: e.clone(),
            z: e.clone(),
            primal_objective: T::zero(),
            dual_objective: T::zero(),
            gap: lit(f64::INFINITY),
            primal_residual: lit(f64::INFINITY),
            dual_residual: lit(f64::INFINITY),
            iterations,
        }
    }
}
