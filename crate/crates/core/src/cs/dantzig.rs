//! Dantzig selector over complex data:
//!
//! ```text
//! minimize  Σₙ |sₙ|   subject to   ‖Θᴴ(r − Θs)‖_∞ ≤ μ
//! ```
//!
//! with `|·|` the complex modulus and `‖·‖_∞` the largest modulus. Writing
//! `G = ΘᴴΘ`, `c = Θᴴr` and `s = a + jb`, every modulus bound becomes a
//! three-dimensional second-order cone, and the problem is handed to the
//! interior-point solver in [`crate::cone`]:
//!
//! ```text
//! variables (u, a, b) ∈ ℝᴺ × ℝᴺ × ℝᴺ,  minimize Σ uₙ
//!   (uₙ, aₙ, bₙ)                         ∈ SOC₃   for every n
//!   (μ, Re(c − Gs)ₙ, Im(c − Gs)ₙ)        ∈ SOC₃   for every n
//! ```
//!
//! The dual of this program is `maximize Re(wᴴc) − μ‖w‖₁ s.t. ‖Gw‖_∞ ≤ 1`,
//! which gives the lower bound reported with every solution.
//!
//! [`Formulation::SplitReal`] instead bounds real and imaginary parts
//! separately (an LP); it changes the geometry of both the objective and the
//! constraint and is kept only as a fallback.

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::cone::{ConeProgram, ConeSettings, ConeStatus};
use crate::error::{Result, SolverError};
use crate::linalg::{inf_norm, l1_norm, CMatrix, CVector};
use crate::scalar::{cplx, czero, lit, modulus, to_f64, Real};

use super::sensing::SensingOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Complex-modulus norms (second-order cones).
    #[default]
    Complex,
    /// Real and imaginary parts bounded separately (linear program).
    SplitReal,
}

#[derive(Debug, Clone, Copy)]
pub struct DantzigOptions<T> {
    pub max_iter: usize,
    /// Feasibility tolerance relative to `1 + ‖Θᴴr‖_∞`.
    pub feas_tol: T,
    /// Relative objective gap certified by the dual bound.
    pub gap_tol: T,
    pub formulation: Formulation,
    /// Normalize the columns of Θ before solving (the recovered amplitudes
    /// are mapped back to the original scaling).
    pub equilibrate: bool,
    /// Entries smaller than this fraction of the largest modulus are set to
    /// exactly zero, provided the point stays feasible.
    pub prune_tol: T,
}

impl<T: Real> Default for DantzigOptions<T> {
    fn default() -> Self {
        Self {
            max_iter: 200,
            feas_tol: lit(1e-6),
            gap_tol: lit(1e-4),
            formulation: Formulation::Complex,
            equilibrate: false,
            prune_tol: lit(1e-7),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DantzigSolution<T: Real> {
    /// Recovered sparse spectrum ŝ.
    pub spectrum: Vec<Complex<T>>,
    /// Dual certificate `w` (scaled so that it is exactly dual feasible).
    pub dual: Vec<Complex<T>>,
    /// `Σ|ŝₙ|` (or `Σ|Re|+|Im|` for the split formulation).
    pub objective: T,
    /// Lower bound on the optimal objective from `dual`.
    pub lower_bound: T,
    /// `max(0, ‖Θᴴ(r − Θŝ)‖_∞ − μ)`.
    pub violation: T,
    pub feas_tol: T,
    pub iterations: usize,
}

impl<T: Real> DantzigSolution<T> {
    pub fn magnitudes(&self) -> Vec<T> {
        self.spectrum.iter().map(|z| modulus(*z)).collect()
    }
}

fn split_abs<T: Real>(z: Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

fn split_max<T: Real>(z: Complex<T>) -> T {
    z.re.abs().max(z.im.abs())
}

fn objective<T: Real>(s: &[Complex<T>], f: Formulation) -> T {
    match f {
        Formulation::Complex => s.iter().fold(T::zero(), |a, z| a + modulus(*z)),
        Formulation::SplitReal => s.iter().fold(T::zero(), |a, z| a + split_abs(*z)),
    }
}

fn residual_norm<T: Real>(gram: &CMatrix<T>, corr: &CVector<T>, s: &[Complex<T>], f: Formulation) -> T {
    let sv = CVector::from_column_slice(s);
    let res = corr - gram * sv;
    match f {
        Formulation::Complex => inf_norm(&res),
        Formulation::SplitReal => res.iter().fold(T::zero(), |a, z| a.max(split_max(*z))),
    }
}

/// Lower bound `Re(wᴴc) − μ‖w‖₁` after shrinking `w` until `‖Gw‖_∞ ≤ 1`.
/// Returns the bound and the rescaled `w`.
pub fn dantzig_dual_bound<T: Real>(
    gram: &CMatrix<T>,
    corr: &CVector<T>,
    mu: T,
    w: &[Complex<T>],
    formulation: Formulation,
) -> (T, Vec<Complex<T>>) {
    let wv = CVector::from_column_slice(w);
    let gw = gram * &wv;
    let (norm_gw, norm_w) = match formulation {
        Formulation::Complex => (inf_norm(&gw), l1_norm(&wv)),
        Formulation::SplitReal => (
            gw.iter().fold(T::zero(), |a, z| a.max(split_max(*z))),
            wv.iter().fold(T::zero(), |a, z| a + split_abs(*z)),
        ),
    };
    let scale = norm_gw.max(T::one());
    let value = ((wv.dotc(corr)).re - mu * norm_w) / scale;
    (value, w.iter().map(|z| *z / scale).collect())
}

/// Solves the Dantzig selector for a stacked sensing operator.
pub fn solve_dantzig<T: Real>(
    op: &SensingOperator<T>,
    r: &CVector<T>,
    mu: T,
    opts: &DantzigOptions<T>,
) -> Result<DantzigSolution<T>> {
    solve_dantzig_matrix(&op.theta, r, mu, opts)
}

pub fn solve_dantzig_matrix<T: Real>(
    theta: &CMatrix<T>,
    r: &CVector<T>,
    mu: T,
    opts: &DantzigOptions<T>,
) -> Result<DantzigSolution<T>> {
    if !(mu >= T::zero()) {
        return Err(crate::error::Error::arg("mu", "must be non-negative"));
    }
    if theta.nrows() != r.len() {
        return Err(crate::error::Error::Dimension(format!(
            "Θ has {} rows but r has {} entries",
            theta.nrows(),
            r.len()
        )));
    }
    let n = theta.ncols();

    let col_scale: Vec<T> = if opts.equilibrate {
        theta
            .column_iter()
            .map(|c| {
                let norm = c.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
                if norm > T::zero() {
                    norm
                } else {
                    T::one()
                }
            })
            .collect()
    } else {
        vec![T::one(); n]
    };
    let mut theta_eq = theta.clone();
    for (j, &d) in col_scale.iter().enumerate() {
        theta_eq.column_mut(j).unscale_mut(d);
    }

    let gram = theta_eq.adjoint() * &theta_eq;
    let corr = theta_eq.adjoint() * r;
    let feas_tol = opts.feas_tol * (T::one() + inf_norm(&corr));

    // ŝ = 0 is feasible, hence optimal, whenever the correlation already
    // meets the bound (this covers r = 0).
    if residual_norm(&gram, &corr, &vec![czero(); n], opts.formulation) <= mu {
        return Ok(DantzigSolution {
            spectrum: vec![czero(); n],
            dual: vec![czero(); n],
            objective: T::zero(),
            lower_bound: T::zero(),
            violation: T::zero(),
            feas_tol,
            iterations: 0,
        });
    }

    // Rescale so the Gram diagonal is O(1); the feasible set in s is unchanged.
    let kappa = (0..n).fold(T::zero(), |a, i| a.max(modulus(gram[(i, i)]))).max(lit(1e-300));
    let g_scaled = gram.map(|z| z / kappa);
    let c_scaled = corr.map(|z| z / kappa);
    let mu_scaled = mu / kappa;

    let (program, layout) = match opts.formulation {
        Formulation::Complex => complex_program(&g_scaled, &c_scaled, mu_scaled),
        Formulation::SplitReal => split_program(&g_scaled, &c_scaled, mu_scaled),
    };
    let settings = ConeSettings {
        max_iter: opts.max_iter,
        ..ConeSettings::default()
    };
    let sol = program.solve(&settings);

    let mut spectrum: Vec<Complex<T>> = (0..n)
        .map(|i| cplx(sol.x[layout.re + i], sol.x[layout.im + i]))
        .collect();
    let w_raw: Vec<Complex<T>> = (0..n).map(|i| layout.dual(&sol.z, i)).collect();

    let f = opts.formulation;
    let mut violation = (residual_norm(&gram, &corr, &spectrum, f) - mu).max(T::zero());
    prune(&mut spectrum, &mut violation, opts, &gram, &corr, mu, feas_tol);
    // The dual of the κ-scaled program certifies the original one after
    // undoing the scaling of w.
    let w_unscaled: Vec<Complex<T>> = w_raw.iter().map(|z| *z / kappa).collect();
    let (lower_bound, dual) = dantzig_dual_bound(&gram, &corr, mu, &w_unscaled, f);
    let obj = objective(&spectrum, f);

    let gap_ok = obj - lower_bound <= opts.gap_tol * obj.max(lit(1e-12)) || obj - lower_bound <= lit(1e-10);
    let certified = violation <= feas_tol && gap_ok;
    if sol.status != ConeStatus::Optimal && !certified {
        return Err(SolverError {
            iterations: sol.iterations,
            primal_residual: to_f64(sol.primal_residual),
            dual_residual: to_f64(sol.dual_residual),
            gap: to_f64(obj - lower_bound),
            constraint_violation: to_f64(violation),
            best: unscale(&spectrum, &col_scale)
                .iter()
                .map(|z| Complex64::new(to_f64(z.re), to_f64(z.im)))
                .collect(),
        }
        .into());
    }
    if sol.status != ConeStatus::Optimal {
        log::debug!(
            "interior point stopped with {:?} but the iterate meets the tolerance contract",
            sol.status
        );
    }

    Ok(DantzigSolution {
        spectrum: unscale(&spectrum, &col_scale),
        dual,
        objective: obj,
        lower_bound,
        violation,
        feas_tol,
        iterations: sol.iterations,
    })
}

fn unscale<T: Real>(s: &[Complex<T>], col_scale: &[T]) -> Vec<Complex<T>> {
    s.iter().zip(col_scale).map(|(z, &d)| *z / d).collect()
}

fn prune<T: Real>(
    spectrum: &mut [Complex<T>],
    violation: &mut T,
    opts: &DantzigOptions<T>,
    gram: &CMatrix<T>,
    corr: &CVector<T>,
    mu: T,
    feas_tol: T,
) {
    let peak = spectrum.iter().fold(T::zero(), |a, z| a.max(modulus(*z)));
    if !(peak > T::zero()) || !(opts.prune_tol > T::zero()) {
        return;
    }
    let cut = peak * opts.prune_tol;
    let pruned: Vec<Complex<T>> = spectrum
        .iter()
        .map(|z| if modulus(*z) <= cut { czero() } else { *z })
        .collect();
    let v = (residual_norm(gram, corr, &pruned, opts.formulation) - mu).max(T::zero());
    if v <= feas_tol.max(*violation) {
        spectrum.copy_from_slice(&pruned);
        *violation = v;
    }
}

/// Where the real/imaginary parts of `s` and the dual multipliers of the
/// Dantzig rows live inside the lifted program.
struct Layout {
    re: usize,
    im: usize,
    formulation: Formulation,
    n: usize,
}

impl Layout {
    fn dual<T: Real>(&self, z: &DVector<T>, i: usize) -> Complex<T> {
        match self.formulation {
            Formulation::Complex => {
                // Dantzig cone i starts after the N magnitude cones.
                let o = 3 * self.n + 3 * i;
                -cplx(z[o + 1], z[o + 2])
            }
            Formulation::SplitReal => {
                let o = 4 * self.n + 4 * i;
                cplx(z[o] - z[o + 1], z[o + 2] - z[o + 3])
            }
        }
    }
}

/// Real lifting of `s ↦ G s`: rows give (Re, Im) of `(Gs)ₙ` as linear forms
/// in `(a, b)`.
fn lifted_row<T: Real>(gram: &CMatrix<T>, row: usize, n: usize) -> (Vec<T>, Vec<T>) {
    let mut re = vec![T::zero(); 2 * n];
    let mut im = vec![T::zero(); 2 * n];
    for m in 0..n {
        let g = gram[(row, m)];
        re[m] = g.re;
        re[n + m] = -g.im;
        im[m] = g.im;
        im[n + m] = g.re;
    }
    (re, im)
}

fn complex_program<T: Real>(gram: &CMatrix<T>, corr: &CVector<T>, mu: T) -> (ConeProgram<T>, Layout) {
    let n = gram.nrows();
    let vars = 3 * n;
    let rows = 6 * n;
    let mut g = DMatrix::<T>::zeros(rows, vars);
    let mut h = DVector::<T>::zeros(rows);
    let mut c = DVector::<T>::zeros(vars);
    for i in 0..n {
        c[i] = T::one();
        let o = 3 * i;
        g[(o, i)] = -T::one();
        g[(o + 1, n + i)] = -T::one();
        g[(o + 2, 2 * n + i)] = -T::one();
    }
    for i in 0..n {
        let o = 3 * n + 3 * i;
        h[o] = mu;
        h[o + 1] = corr[i].re;
        h[o + 2] = corr[i].im;
        let (re, im) = lifted_row(gram, i, n);
        for k in 0..2 * n {
            g[(o + 1, n + k)] = re[k];
            g[(o + 2, n + k)] = im[k];
        }
    }
    (
        ConeProgram {
            c,
            g,
            h,
            cones: vec![3; 2 * n],
        },
        Layout {
            re: n,
            im: 2 * n,
            formulation: Formulation::Complex,
            n,
        },
    )
}

fn split_program<T: Real>(gram: &CMatrix<T>, corr: &CVector<T>, mu: T) -> (ConeProgram<T>, Layout) {
    let n = gram.nrows();
    // x = (u_re, u_im, a, b)
    let vars = 4 * n;
    let rows = 8 * n;
    let mut g = DMatrix::<T>::zeros(rows, vars);
    let mut h = DVector::<T>::zeros(rows);
    let mut c = DVector::<T>::zeros(vars);
    for i in 0..2 * n {
        c[i] = T::one();
    }
    for i in 0..n {
        let o = 4 * i;
        // u_re ± a ≥ 0, u_im ± b ≥ 0
        g[(o, i)] = -T::one();
        g[(o, 2 * n + i)] = T::one();
        g[(o + 1, i)] = -T::one();
        g[(o + 1, 2 * n + i)] = -T::one();
        g[(o + 2, n + i)] = -T::one();
        g[(o + 2, 3 * n + i)] = T::one();
        g[(o + 3, n + i)] = -T::one();
        g[(o + 3, 3 * n + i)] = -T::one();
    }
    for i in 0..n {
        let o = 4 * n + 4 * i;
        let (re, im) = lifted_row(gram, i, n);
        // μ − Re(c − Gs) ≥ 0, μ + Re(c − Gs) ≥ 0, same for Im.
        h[o] = mu - corr[i].re;
        h[o + 1] = mu + corr[i].re;
        h[o + 2] = mu - corr[i].im;
        h[o + 3] = mu + corr[i].im;
        for k in 0..2 * n {
            g[(o, 2 * n + k)] = -re[k];
            g[(o + 1, 2 * n + k)] = re[k];
            g[(o + 2, 2 * n + k)] = -im[k];
            g[(o + 3, 2 * n + k)] = im[k];
        }
    }
    (
        ConeProgram {
            c,
            g,
            h,
            cones: vec![1; rows],
        },
        Layout {
            re: 2 * n,
            im: 3 * n,
            formulation: Formulation::SplitReal,
            n,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, derive_stream, Purpose, StreamKey};

    fn random_theta(seed: u64, m: usize, n: usize) -> CMatrix<f64> {
        let mut rng = derive_stream(seed, StreamKey::new(0, Purpose::Measurement));
        CMatrix::from_fn(m, n, |_, _| complex_gaussian(&mut rng, 1.0))
    }

    #[test]
    fn zero_observation_gives_zero() {
        let theta = random_theta(1, 6, 8);
        let r = CVector::zeros(6);
        for mu in [0.0, 0.5, 3.0] {
            let sol = solve_dantzig_matrix(&theta, &r, mu, &DantzigOptions::default()).unwrap();
            assert!(sol.spectrum.iter().all(|z| *z == Complex::new(0.0, 0.0)));
        }
    }

    #[test]
    fn planted_one_sparse_is_recovered() {
        let theta = random_theta(2, 6, 8);
        let mut s = CVector::<f64>::zeros(8);
        s[3] = Complex::new(1.0, 0.0);
        let r = &theta * &s;
        let sol = solve_dantzig_matrix(&theta, &r, 1e-8, &DantzigOptions::default()).unwrap();
        assert!((sol.spectrum[3] - Complex::new(1.0, 0.0)).norm() < 1e-4);
        for (i, z) in sol.spectrum.iter().enumerate() {
            if i != 3 {
                assert!(z.norm() < 1e-6, "index {i}: {z}");
            }
        }
        assert!(sol.objective <= 1.0 + 1e-6);
        assert!(sol.violation <= sol.feas_tol);
    }

    #[test]
    fn dual_bound_certifies_gap() {
        let theta = random_theta(3, 10, 14);
        let mut rng = derive_stream(3, StreamKey::new(1, Purpose::Noise));
        let r = CVector::<f64>::from_fn(10, |_, _| complex_gaussian(&mut rng, 1.0));
        let sol = solve_dantzig_matrix(&theta, &r, 0.7, &DantzigOptions::default()).unwrap();
        assert!(sol.lower_bound <= sol.objective + 1e-9);
        assert!(sol.objective - sol.lower_bound <= 1e-4 * sol.objective);
    }

    #[test]
    fn split_formulation_solves_its_own_problem() {
        let theta = random_theta(4, 8, 10);
        let mut rng = derive_stream(4, StreamKey::new(1, Purpose::Noise));
        let r = CVector::<f64>::from_fn(8, |_, _| complex_gaussian(&mut rng, 1.0));
        let opts = DantzigOptions {
            formulation: Formulation::SplitReal,
            ..DantzigOptions::default()
        };
        let sol = solve_dantzig_matrix(&theta, &r, 0.5, &opts).unwrap();
        let gram = theta.adjoint() * &theta;
        let corr = theta.adjoint() * &r;
        let res = residual_norm(&gram, &corr, &sol.spectrum, Formulation::SplitReal);
        assert!(res <= 0.5 + sol.feas_tol);
        assert!(sol.objective - sol.lower_bound <= 1e-4 * sol.objective);
    }

    #[test]
    fn equilibrated_noiseless_recovery() {
        let mut theta = random_theta(5, 8, 12);
        for j in 0..12 {
            let f = 0.5 + j as f64 * 0.3;
            theta.column_mut(j).scale_mut(f);
        }
        let mut s = CVector::<f64>::zeros(12);
        s[7] = Complex::new(0.0, 2.0);
        let r = &theta * &s;
        let opts = DantzigOptions {
            equilibrate: true,
            ..DantzigOptions::default()
        };
        let sol = solve_dantzig_matrix(&theta, &r, 1e-9, &opts).unwrap();
        assert!((sol.spectrum[7] - s[7]).norm() < 1e-4);
    }

    #[test]
    fn rejects_negative_mu() {
        let theta = random_theta(6, 4, 5);
        assert!(solve_dantzig_matrix(&theta, &CVector::zeros(4), -1.0, &DantzigOptions::default()).is_err());
    }
}
