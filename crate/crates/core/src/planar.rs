//! Planar rotor under CSL angular-momentum diffusion, in the Wigner
//! representation `w(α, m)` on a uniform angle grid times an integer
//! angular-momentum ladder.
//!
//! Both propagators work mode by mode in the angular Fourier index `k`,
//! where free shearing is a phase and the diffusion term couples only
//! `m ± 2`. [`evolve_exact`] applies the Bessel kernel in closed form,
//! [`evolve_ode`] integrates the equation of motion step by step and serves
//! as an independent check.

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::num::{compensated_sum, from_i64, from_usize, lit, to_f64, Real};
use crate::params::PhysicalConstants;
use crate::specfun::{bessel_i_scaled, bessel_i_scaled_seq, sinc};

/// Rotor parameters: `d_rot` in (J·s)²/s, moment of inertia in kg·m², and
/// the evolution times in s.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarParams<T> {
    d_rot: T,
    inertia: T,
    pub times: Vec<T>,
}

impl<T: Real> PlanarParams<T> {
    pub fn new(d_rot: T, inertia: T, times: Vec<T>) -> Result<Self> {
        if !(d_rot >= T::zero()) || !d_rot.is_finite() {
            return Err(invalid("d_rot", "must be finite and non-negative"));
        }
        if !(inertia > T::zero()) || !inertia.is_finite() {
            return Err(invalid("inertia", "must be finite and positive"));
        }
        if times.iter().any(|t| !(*t >= T::zero()) || !t.is_finite()) {
            return Err(invalid("times", "must be finite and non-negative"));
        }
        Ok(PlanarParams { d_rot, inertia, times })
    }

    /// Parameters from rotor units: `d_rot` in ℏ³/I and times in I/ℏ.
    pub fn from_rotor_units(d_rot: T, inertia: T, times: &[T]) -> Result<Self> {
        let hbar = PhysicalConstants::<T>::codata().hbar();
        let t_unit = inertia / hbar;
        Self::new(
            d_rot * hbar * hbar * hbar / inertia,
            inertia,
            times.iter().map(|t| *t * t_unit).collect(),
        )
    }

    pub fn d_rot(&self) -> T {
        self.d_rot
    }

    pub fn inertia(&self) -> T {
        self.inertia
    }

    /// Rotor time unit `I/ℏ` in s.
    pub fn time_unit(&self) -> T {
        self.inertia / PhysicalConstants::<T>::codata().hbar()
    }

    /// `d_rot` in units of ℏ³/I.
    pub fn d_rot_rotor_units(&self) -> T {
        let hbar = PhysicalConstants::<T>::codata().hbar();
        self.d_rot * self.inertia / (hbar * hbar * hbar)
    }

    /// `(s, z)` with the shear per unit `m`, `s = ℏt/I`, and the diffusion
    /// exponent `z = D_rot t / 2ℏ²`.
    pub fn dimensionless(&self, t: T) -> (T, T) {
        let hbar = PhysicalConstants::<T>::codata().hbar();
        let s = hbar * t / self.inertia;
        // D t / 2ℏ² computed as (D/ℏ)(t/ℏ)/2 to stay in range
        let z = (self.d_rot / hbar) * (t / hbar) / lit(2.0);
        (s, z)
    }
}

/// Wigner function on `N_α` angles `α_j = −π + 2πj/N_α` and momenta
/// `m = −m_max..=m_max`. Values are stored row by row in `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarWignerState<T> {
    n_alpha: usize,
    m_max: usize,
    values: Vec<T>,
    inertia: T,
}

impl<T: Real> PlanarWignerState<T> {
    pub fn from_fn(n_alpha: usize, m_max: usize, inertia: T, f: impl Fn(T, i64) -> T) -> Result<Self> {
        if n_alpha < 4 || n_alpha % 2 != 0 {
            return Err(invalid("n_alpha", "must be even and at least 4"));
        }
        if !(inertia > T::zero()) {
            return Err(invalid("inertia", "must be positive"));
        }
        let rows = 2 * m_max + 1;
        let mut values = Vec::with_capacity(rows * n_alpha);
        for r in 0..rows {
            let m = r as i64 - m_max as i64;
            for j in 0..n_alpha {
                values.push(f(grid_angle(n_alpha, j), m));
            }
        }
        Ok(PlanarWignerState {
            n_alpha,
            m_max,
            values,
            inertia,
        })
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn inertia(&self) -> T {
        self.inertia
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn alpha(&self, j: usize) -> T {
        grid_angle(self.n_alpha, j)
    }

    pub fn d_alpha(&self) -> T {
        lit::<T>(2.0) * T::PI() / from_usize(self.n_alpha)
    }

    /// `w(α_j, m)`.
    pub fn get(&self, j: usize, m: i64) -> T {
        self.values[self.row(m) * self.n_alpha + j]
    }

    fn row(&self, m: i64) -> usize {
        (m + self.m_max as i64) as usize
    }

    fn rows(&self) -> usize {
        2 * self.m_max + 1
    }

    fn m_of(&self, r: usize) -> i64 {
        r as i64 - self.m_max as i64
    }

    /// `Σ_m ∫dα w`.
    pub fn norm(&self) -> T {
        compensated_sum(self.values.iter().copied()) * self.d_alpha()
    }

    /// `p(α_j) = Σ_m w(α_j, m)` and `p(m) = ∫dα w(α, m)`.
    pub fn marginals(&self) -> (Vec<T>, Vec<T>) {
        let n = self.n_alpha;
        let p_alpha = (0..n)
            .map(|j| compensated_sum((0..self.rows()).map(|r| self.values[r * n + j])))
            .collect();
        let p_m = (0..self.rows())
            .map(|r| compensated_sum(self.values[r * n..(r + 1) * n].iter().copied()) * self.d_alpha())
            .collect();
        (p_alpha, p_m)
    }

    /// `⟨e^{iα}⟩`.
    pub fn mean_unit_vector(&self) -> Complex<T> {
        let (p_alpha, _) = self.marginals();
        let c = compensated_sum(p_alpha.iter().enumerate().map(|(j, p)| *p * self.alpha(j).cos()));
        let s = compensated_sum(p_alpha.iter().enumerate().map(|(j, p)| *p * self.alpha(j).sin()));
        Complex::new(c, s) * self.d_alpha()
    }

    /// Circular variance `1 − ⟨cos α⟩² − ⟨sin α⟩²`.
    pub fn variance(&self) -> T {
        T::one() - self.mean_unit_vector().norm_sqr()
    }

    /// `⟨m²⟩`.
    pub fn mean_m2(&self) -> T {
        let (_, p_m) = self.marginals();
        compensated_sum(p_m.iter().enumerate().map(|(r, p)| {
            let m: T = from_i64(self.m_of(r));
            *p * m * m
        }))
    }

    /// Kinetic energy `⟨p_α²/2I⟩ = ℏ²⟨m²⟩/2I` in J.
    pub fn energy(&self) -> T {
        let hbar = PhysicalConstants::<T>::codata().hbar();
        hbar * hbar * self.mean_m2() / (lit::<T>(2.0) * self.inertia)
    }

    /// Probability carried by the two outermost rows at each end.
    pub fn boundary_mass(&self) -> T {
        let (_, p_m) = self.marginals();
        let n = p_m.len();
        let edge = 2.min(n);
        let lo = p_m[..edge].iter().fold(T::zero(), |a, p| a + p.abs());
        let hi = p_m[n - edge..].iter().fold(T::zero(), |a, p| a + p.abs());
        lo + hi
    }

    /// Largest pointwise difference to another state on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    /// Rows `(α, m, w)` for tabular output.
    pub fn snapshot_rows(&self) -> Vec<(T, i64, T)> {
        let mut out = Vec::with_capacity(self.values.len());
        for r in 0..self.rows() {
            for j in 0..self.n_alpha {
                out.push((self.alpha(j), self.m_of(r), self.values[r * self.n_alpha + j]));
            }
        }
        out
    }

    /// `⟨e^{i(α + ℏmt/I)}⟩`, the mean unit vector after free evolution.
    pub fn free_mean_unit_vector(&self, s: T) -> Complex<T> {
        let mut re = Vec::with_capacity(self.values.len());
        let mut im = Vec::with_capacity(self.values.len());
        for r in 0..self.rows() {
            let shift = from_i64::<T>(self.m_of(r)) * s;
            for j in 0..self.n_alpha {
                let w = self.values[r * self.n_alpha + j];
                let (sn, cs) = (self.alpha(j) + shift).sin_cos();
                re.push(w * cs);
                im.push(w * sn);
            }
        }
        Complex::new(compensated_sum(re), compensated_sum(im)) * self.d_alpha()
    }

    fn spectra(&self) -> Vec<Vec<Complex<T>>> {
        let n = self.n_alpha;
        let fft = FftPlanner::<T>::new().plan_fft_forward(n);
        (0..self.rows())
            .map(|r| {
                let mut row: Vec<Complex<T>> = self.values[r * n..(r + 1) * n]
                    .iter()
                    .map(|v| Complex::new(*v, T::zero()))
                    .collect();
                fft.process(&mut row);
                row
            })
            .collect()
    }

    /// Rebuilds a state from per-`k` columns of row spectra.
    fn from_columns(&self, columns: Vec<Vec<Complex<T>>>) -> Self {
        let n = self.n_alpha;
        let ifft = FftPlanner::<T>::new().plan_fft_inverse(n);
        let inv_n = T::one() / from_usize::<T>(n);
        let mut values = vec![T::zero(); self.values.len()];
        for r in 0..self.rows() {
            let mut row: Vec<Complex<T>> = columns.iter().map(|c| c[r]).collect();
            ifft.process(&mut row);
            for (j, v) in row.iter().enumerate() {
                values[r * n + j] = v.re * inv_n;
            }
        }
        PlanarWignerState {
            n_alpha: n,
            m_max: self.m_max,
            values,
            inertia: self.inertia,
        }
    }

    fn columns(&self) -> Vec<Vec<Complex<T>>> {
        let spectra = self.spectra();
        (0..self.n_alpha)
            .map(|k| spectra.iter().map(|row| row[k]).collect())
            .collect()
    }
}

fn grid_angle<T: Real>(n: usize, j: usize) -> T {
    -T::PI() + lit::<T>(2.0) * T::PI() * from_usize::<T>(j) / from_usize::<T>(n)
}

/// Signed wavenumber of FFT bin `k`.
fn wavenumber(n: usize, k: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Momentum cutoff that keeps the initial tail below `1e-12` and leaves
/// room for `8` diffusion spreads `√(2 D_rot t_max / ℏ²)`.
pub fn suggested_m_max<T: Real>(initial_p_m: &[T], params: &PlanarParams<T>) -> usize {
    let total = initial_p_m.iter().fold(T::zero(), |a, p| a + p.abs());
    let center = initial_p_m.len() / 2;
    let mut m99 = 0;
    for radius in 0..=center {
        let inside = (center - radius..=center + radius).fold(T::zero(), |a, i| a + initial_p_m[i].abs());
        if total - inside <= lit::<T>(1e-12) * total {
            m99 = radius;
            break;
        }
        m99 = radius;
    }
    let t_max = params.times.iter().copied().fold(T::zero(), T::max);
    let (_, z) = params.dimensionless(t_max);
    // 2 D t / ℏ² = 4 z
    let spread = (lit::<T>(4.0) * z).sqrt();
    m99 + to_f64(lit::<T>(8.0) * spread).ceil() as usize
}

/// Initial state `w₀(α, m) = (−1)^m I_m[cos(2α)/4σ²] / (2π I₀(1/4σ²))`,
/// the Wigner function of `ψ₀(α) ∝ exp[−cos²α/4σ²]`.
pub fn initial_cos_squeezed<T: Real>(
    sigma_alpha: T,
    n_alpha: usize,
    m_max: usize,
    inertia: T,
) -> Result<PlanarWignerState<T>> {
    if !(sigma_alpha > T::zero()) || !sigma_alpha.is_finite() {
        return Err(invalid("sigma_alpha", "must be finite and positive"));
    }
    let big_z = T::one() / (lit::<T>(4.0) * sigma_alpha * sigma_alpha);
    let i0_big = bessel_i_scaled(0, big_z);
    let two_pi = lit::<T>(2.0) * T::PI();
    let columns: Vec<Vec<T>> = (0..n_alpha)
        .into_par_iter()
        .map(|j| {
            let z = (lit::<T>(2.0) * grid_angle::<T>(n_alpha, j)).cos() * big_z;
            let seq = bessel_i_scaled_seq(m_max, z);
            let scale = (z.abs() - big_z).exp() / (two_pi * i0_big);
            seq.into_iter().map(|v| v * scale).collect()
        })
        .collect();
    let state = PlanarWignerState::from_fn(n_alpha, m_max, inertia, |_, _| T::zero())?;
    let mut values = state.values.clone();
    let rows = 2 * m_max + 1;
    for r in 0..rows {
        let m = r as i64 - m_max as i64;
        let sign = if m.rem_euclid(2) == 1 { -T::one() } else { T::one() };
        for (j, col) in columns.iter().enumerate() {
            values[r * n_alpha + j] = sign * col[m.unsigned_abs() as usize];
        }
    }
    let state = PlanarWignerState { values, ..state };
    let lost = (T::one() - state.norm()).abs();
    if lost > lit(1e-10) {
        return Err(Error::MomentumRange { mass: to_f64(lost) });
    }
    Ok(state)
}

/// Kernel `T_t(α′, ℓ)` on the angle grid for `ℓ = −ℓ_max..=ℓ_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable<T> {
    pub n_alpha: usize,
    pub ell_max: usize,
    /// Row `ℓ + ℓ_max`, column `j` for `α′_j = −π + 2πj/N_α`, in 1/rad.
    pub values: Vec<T>,
    /// Largest imaginary part found before discarding it.
    pub imag_residue: T,
    /// Kernel mass outside the `ℓ` range, `1 − Σ_ℓ ∫dα′ T`.
    pub tail_bound: T,
}

impl<T: Real> KernelTable<T> {
    pub fn get(&self, j: usize, ell: i64) -> T {
        self.values[(ell + self.ell_max as i64) as usize * self.n_alpha + j]
    }

    /// `Σ_ℓ ∫dα′ T_t(α′, ℓ)`.
    pub fn total(&self) -> T {
        let d = lit::<T>(2.0) * T::PI() / from_usize(self.n_alpha);
        compensated_sum(self.values.iter().copied()) * d
    }
}

/// Fourier weights `τ_k(ℓ) = e^{−z} e^{ikℓs} I_ℓ(z sinc(ks))` for one `k`,
/// `ℓ = −ℓ_max..=ℓ_max`.
fn kernel_weights<T: Real>(k: i64, s: T, z: T, ell_max: usize) -> Vec<Complex<T>> {
    let kk: T = from_i64(k);
    let arg = z * sinc(kk * s);
    let seq = bessel_i_scaled_seq(ell_max, arg);
    let scale = (arg.abs() - z).exp();
    (-(ell_max as i64)..=ell_max as i64)
        .map(|ell| {
            let mag = seq[ell.unsigned_abs() as usize] * scale;
            let phase = kk * from_i64::<T>(ell) * s;
            Complex::from_polar(mag, phase)
        })
        .collect()
}

/// Smallest `ℓ_max ≤ cap` with `1 − Σ_{|ℓ|≤ℓ_max} e^{−z}I_ℓ(z) ≤ tol`.
fn ell_range<T: Real>(z: T, cap: usize, tol: T) -> Result<(usize, T)> {
    let seq = bessel_i_scaled_seq(cap, z);
    let mut inside = seq[0];
    let mut tail = T::one() - inside;
    for (ell, v) in seq.iter().enumerate().skip(1) {
        if tail <= tol {
            return Ok((ell - 1, tail.max(T::zero())));
        }
        inside += lit::<T>(2.0) * *v;
        tail = T::one() - inside;
    }
    if tail <= tol {
        return Ok((cap, tail.max(T::zero())));
    }
    Err(Error::Truncation {
        what: "kernel angular-momentum sum",
        bound: to_f64(tail),
    })
}

/// Evaluates the propagation kernel at time `t` (s). The `k` sum runs over
/// the grid's Fourier modes up to the Nyquist index.
pub fn kernel<T: Real>(t: T, params: &PlanarParams<T>, n_alpha: usize, ell_max: usize) -> Result<KernelTable<T>> {
    if !(t >= T::zero()) {
        return Err(invalid("t", "must be non-negative"));
    }
    if n_alpha < 4 || n_alpha % 2 != 0 {
        return Err(invalid("n_alpha", "must be even and at least 4"));
    }
    let (s, z) = params.dimensionless(t);
    let seq0 = bessel_i_scaled_seq(ell_max, z);
    let tail = (T::one() - seq0.iter().enumerate().fold(T::zero(), |a, (l, v)| {
        a + if l == 0 { *v } else { lit::<T>(2.0) * *v }
    }))
    .max(T::zero());
    if tail > lit(1e-10) {
        return Err(Error::Truncation {
            what: "kernel angular-momentum range",
            bound: to_f64(tail),
        });
    }
    let ifft = FftPlanner::<T>::new().plan_fft_inverse(n_alpha);
    let weights: Vec<Vec<Complex<T>>> = (0..n_alpha)
        .map(|k| kernel_weights(wavenumber(n_alpha, k), s, z, ell_max))
        .collect();
    let rows = 2 * ell_max + 1;
    let mut values = vec![T::zero(); rows * n_alpha];
    let mut imag = T::zero();
    let mut peak = T::zero();
    let inv_two_pi = T::one() / (lit::<T>(2.0) * T::PI());
    for r in 0..rows {
        // α′_j = −π + 2πj/N  ⇒  e^{ikα′_j} = (−1)^k e^{2πijk/N}
        let mut row: Vec<Complex<T>> = (0..n_alpha)
            .map(|k| {
                let kk = wavenumber(n_alpha, k);
                let mut c = weights[k][r];
                if kk == (n_alpha / 2) as i64 {
                    c = Complex::new(c.re, T::zero());
                }
                if kk.rem_euclid(2) == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        ifft.process(&mut row);
        for (j, v) in row.iter().enumerate() {
            let v = *v * inv_two_pi;
            values[r * n_alpha + j] = v.re;
            imag = imag.max(v.im.abs());
            peak = peak.max(v.re.abs());
        }
    }
    if imag > lit::<T>(1e-12) * peak.max(T::one()) {
        return Err(Error::Truncation {
            what: "kernel imaginary residue",
            bound: to_f64(imag),
        });
    }
    Ok(KernelTable {
        n_alpha,
        ell_max,
        values,
        imag_residue: imag,
        tail_bound: tail,
    })
}

fn check_same_rotor<T: Real>(w0: &PlanarWignerState<T>, params: &PlanarParams<T>) -> Result<()> {
    let (a, b) = (w0.inertia, params.inertia());
    if (a - b).abs() > lit::<T>(1e-12) * b {
        return Err(invalid("inertia", "state and parameters describe different rotors"));
    }
    Ok(())
}

fn check_boundary<T: Real>(w: &PlanarWignerState<T>) -> Result<()> {
    let edge = w.boundary_mass();
    if edge > lit(1e-8) {
        return Err(Error::MomentumRange { mass: to_f64(edge) });
    }
    Ok(())
}

/// Exact evolution to time `t` (s) with the Bessel kernel, applied per
/// angular Fourier mode.
pub fn evolve_exact<T: Real>(w0: &PlanarWignerState<T>, t: T, params: &PlanarParams<T>) -> Result<PlanarWignerState<T>> {
    check_same_rotor(w0, params)?;
    if !(t >= T::zero()) {
        return Err(invalid("t", "must be non-negative"));
    }
    if t == T::zero() {
        return Ok(w0.clone());
    }
    let (s, z) = params.dimensionless(t);
    let (ell_max, _) = ell_range(z, w0.m_max, lit(1e-15))?;
    let n = w0.n_alpha;
    let rows = w0.rows();
    let m_max = w0.m_max as i64;
    let columns = w0.columns();
    let evolved: Vec<Vec<Complex<T>>> = columns
        .par_iter()
        .enumerate()
        .map(|(k, col)| {
            let kk = wavenumber(n, k);
            let tau = kernel_weights(kk, s, z, ell_max);
            let kf: T = from_i64(kk);
            (0..rows)
                .map(|r| {
                    let m = r as i64 - m_max;
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (li, w) in tau.iter().enumerate() {
                        let ell = li as i64 - ell_max as i64;
                        let src = m - 2 * ell;
                        if src.abs() <= m_max {
                            acc = acc + *w * col[(src + m_max) as usize];
                        }
                    }
                    acc * Complex::from_polar(T::one(), -kf * from_i64::<T>(m) * s)
                })
                .collect()
        })
        .collect();
    let w = w0.from_columns(evolved);
    check_boundary(&w)?;
    Ok(w)
}

/// Step-by-step reference integrator for
/// `∂t w + (ℏm/I) ∂α w = D_rot [w(m−2) − 2w(m) + w(m+2)] / 4ℏ²`.
///
/// The shearing term is applied exactly as a phase per Fourier mode, and the
/// `m`-Laplacian is advanced with classical fourth-order Runge–Kutta stages
/// between those phase rotations (integrating-factor RK4). `dt` (s) is
/// reduced so that a whole number of steps reaches `t`.
pub fn evolve_ode<T: Real>(
    w0: &PlanarWignerState<T>,
    t: T,
    params: &PlanarParams<T>,
    dt: T,
) -> Result<PlanarWignerState<T>> {
    check_same_rotor(w0, params)?;
    if !(t >= T::zero()) {
        return Err(invalid("t", "must be non-negative"));
    }
    if !(dt > T::zero()) {
        return Err(invalid("dt", "must be positive"));
    }
    if t == T::zero() {
        return Ok(w0.clone());
    }
    let steps = to_f64(t / dt).ceil().max(1.0) as usize;
    let h = t / from_usize(steps);
    let (s_h, z_h) = params.dimensionless(h);
    // c·h with c = D/4ℏ²: z_h = D h / 2ℏ²
    let ch = z_h / lit(2.0);
    if ch * lit(4.0) > lit(2.78) {
        return Err(Error::Unstable {
            drift: to_f64(ch * lit(4.0)),
        });
    }
    let n = w0.n_alpha;
    let rows = w0.rows();
    let m_max = w0.m_max as i64;
    let norm0 = w0.norm();
    let columns = w0.columns();
    let evolved: Vec<Vec<Complex<T>>> = columns
        .par_iter()
        .enumerate()
        .map(|(k, col)| {
            let kf: T = from_i64(wavenumber(n, k));
            // phases e^{−ikm s} for a full and a half step
            let full: Vec<Complex<T>> = (0..rows)
                .map(|r| Complex::from_polar(T::one(), -kf * from_i64::<T>(r as i64 - m_max) * s_h))
                .collect();
            let half: Vec<Complex<T>> = (0..rows)
                .map(|r| Complex::from_polar(T::one(), -kf * from_i64::<T>(r as i64 - m_max) * s_h / lit(2.0)))
                .collect();
            let lap = |u: &[Complex<T>]| -> Vec<Complex<T>> {
                (0..rows)
                    .map(|r| {
                        let up = if r + 2 < rows { u[r + 2] } else { Complex::new(T::zero(), T::zero()) };
                        let dn = if r >= 2 { u[r - 2] } else { Complex::new(T::zero(), T::zero()) };
                        (up + dn - u[r] * lit::<T>(2.0)) * ch
                    })
                    .collect()
            };
            let mul = |p: &[Complex<T>], u: &[Complex<T>]| -> Vec<Complex<T>> {
                p.iter().zip(u).map(|(a, b)| *a * *b).collect()
            };
            let mut u = col.clone();
            for _ in 0..steps {
                let k1 = lap(&u);
                let a: Vec<Complex<T>> = u.iter().zip(&k1).map(|(x, y)| *x + *y * lit::<T>(0.5)).collect();
                let k2 = lap(&mul(&half, &a));
                let eu_half = mul(&half, &u);
                let b: Vec<Complex<T>> = eu_half.iter().zip(&k2).map(|(x, y)| *x + *y * lit::<T>(0.5)).collect();
                let k3 = lap(&b);
                let eu_full = mul(&full, &u);
                let ek3 = mul(&half, &k3);
                let c: Vec<Complex<T>> = eu_full.iter().zip(&ek3).map(|(x, y)| *x + *y).collect();
                let k4 = lap(&c);
                let ek1 = mul(&full, &k1);
                let sixth = T::one() / lit(6.0);
                u = (0..rows)
                    .map(|r| {
                        eu_full[r]
                            + (ek1[r] + (k2[r] + k3[r]) * half[r] * lit::<T>(2.0) + k4[r]) * sixth
                    })
                    .collect();
            }
            u
        })
        .collect();
    let w = w0.from_columns(evolved);
    let drift = (w.norm() - norm0).abs();
    if drift > lit(1e-6) || !drift.is_finite() {
        return Err(Error::Unstable { drift: to_f64(drift) });
    }
    check_boundary(&w)?;
    Ok(w)
}

/// Step (s) for [`evolve_ode`] at which the stiffest diffusion mode moves
/// by `0.1` per step, well inside the RK4 stability region.
pub fn suggested_ode_step<T: Real>(params: &PlanarParams<T>) -> T {
    let (_, z) = params.dimensionless(params.time_unit());
    // 4c·t_unit = D t_unit/ℏ² = 2z
    if z > T::zero() {
        lit::<T>(0.05) / z * params.time_unit()
    } else {
        params.time_unit()
    }
}

/// Suppression factor of the mean orientation vector,
/// `κ(t) = exp{−(D_rot t/2ℏ²)[1 − sinc(2ℏt/I)]}`.
pub fn coherence_factor<T: Real>(t: T, params: &PlanarParams<T>) -> T {
    let (s, z) = params.dimensionless(t);
    (-z * (T::one() - sinc(lit::<T>(2.0) * s))).exp()
}

/// Free-rotor circular variance `σ₀²(t) = 1 − |⟨e^{i(α + ℏmt/I)}⟩₀|²`.
pub fn variance_free<T: Real>(w0: &PlanarWignerState<T>, t: T, params: &PlanarParams<T>) -> T {
    let (s, _) = params.dimensionless(t);
    T::one() - w0.free_mean_unit_vector(s).norm_sqr()
}

/// Circular variance under CSL, `σ_C² = 1 − (1 − σ₀²) κ²`.
///
/// The mean unit vector is damped by `κ`, so the variance complement picks
/// up `κ²`.
pub fn variance_csl<T: Real>(w0: &PlanarWignerState<T>, t: T, params: &PlanarParams<T>) -> T {
    let k = coherence_factor(t, params);
    let free = variance_free(w0, t, params);
    T::one() - (T::one() - free) * k * k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotor() -> PlanarParams<f64> {
        PlanarParams::from_rotor_units(1e3, 1e-30, &[0.0]).unwrap()
    }

    #[test]
    fn initial_state_normalized_and_symmetric() {
        let p = rotor();
        let w = initial_cos_squeezed(0.1, 128, 64, p.inertia()).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-10);
        for j in 0..128 {
            assert!((w.get(j, 3) - w.get(j, -3)).abs() < 1e-15);
            assert!((w.get(j, 5) - w.get((j + 64) % 128, 5)).abs() < 1e-13);
        }
    }

    #[test]
    fn truncated_ladder_is_rejected() {
        let p = rotor();
        assert!(matches!(
            initial_cos_squeezed(0.1, 128, 4, p.inertia()),
            Err(Error::MomentumRange { .. })
        ));
    }

    #[test]
    fn kernel_at_zero_time_is_a_delta() {
        let p = rotor();
        let k = kernel(0.0, &p, 64, 4).unwrap();
        let d = 2.0 * std::f64::consts::PI / 64.0;
        for j in 0..64 {
            for ell in -4..=4 {
                let want = if j == 32 && ell == 0 { 1.0 / d } else { 0.0 };
                assert!((k.get(j, ell) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn no_diffusion_gives_integer_revival() {
        let inertia = 1e-30;
        let p = PlanarParams::from_rotor_units(0.0, inertia, &[]).unwrap();
        let w0 = PlanarWignerState::from_fn(64, 16, inertia, |a: f64, m| {
            (2.0 * a.cos()).exp() * (-(m * m) as f64 / 8.0).exp() / 100.0
        })
        .unwrap();
        let t = 2.0 * std::f64::consts::PI * p.time_unit();
        let w = evolve_exact(&w0, t, &p).unwrap();
        assert!(w.max_abs_diff(&w0) < 1e-12);
    }
}
