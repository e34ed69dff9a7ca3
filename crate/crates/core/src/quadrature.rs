//! Adaptive integration over `k`-space with the Gaussian weight
//! `e^{-r_C² k²}` absorbed through the substitution `u = r_C k`.
//!
//! Integrands are vector valued (`[T; N]`) so that all components of a
//! tensor share one set of nodes. Every component has its own tolerance.
//! Summation is sequential and compensated, which makes results bit-stable
//! for a fixed [`QuadratureSpec`].

use std::cell::{Cell, RefCell};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::num::{compensated_sum, lit, to_f64, Real};

// 21-point Kronrod nodes on [0, 1]; odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Integration strategy for three-dimensional integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Iterated adaptive 21-point Gauss–Kronrod in each coordinate.
    GaussKronrod1D,
    /// Same iterated rule in spherical `(u, θ, φ)` with `u` innermost.
    TensorSpherical3D,
    /// Globally adaptive Genz–Malik degree-7 cubature on boxes in `(u, θ, φ)`.
    AdaptiveCubature,
}

/// Tolerances and budget shared by all integration routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_evals: usize,
    pub scheme: Scheme,
    /// Radial cutoff in `u = r_C k`; the Gaussian weight is `e^{-u_max²}` there.
    pub u_max: T,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_evals: usize, scheme: Scheme) -> Result<Self> {
        if !(rel_tol > T::zero() && rel_tol <= lit(1e-2)) {
            return Err(invalid("rel_tol", "must lie in (0, 1e-2]"));
        }
        if !(abs_tol >= T::zero()) {
            return Err(invalid("abs_tol", "must be non-negative"));
        }
        if max_evals < 1000 {
            return Err(invalid("max_evals", "must be at least 1000"));
        }
        Ok(QuadratureSpec {
            rel_tol,
            abs_tol,
            max_evals,
            scheme,
            u_max: lit(9.0),
        })
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Result<Self> {
        self.rel_tol = rel_tol;
        Self::new(self.rel_tol, self.abs_tol, self.max_evals, self.scheme).map(|s| Self {
            u_max: self.u_max,
            ..s
        })
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals.max(1000);
        self
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: lit(1e-8),
            abs_tol: T::zero(),
            max_evals: 200_000_000,
            scheme: Scheme::TensorSpherical3D,
            u_max: lit(9.0),
        }
    }
}

/// Integral value with a per-component error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T, const N: usize> {
    pub value: [T; N],
    pub error: [T; N],
    pub evals: usize,
}

/// Per-component convergence target: `err_i ≤ max(abs_i, rel·|value_i|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T, const N: usize> {
    pub rel: T,
    pub abs: [T; N],
}

impl<T: Real, const N: usize> Tolerance<T, N> {
    pub fn relative(rel: T) -> Self {
        Tolerance {
            rel,
            abs: [T::zero(); N],
        }
    }

    fn target(&self, value: &[T; N]) -> [T; N] {
        std::array::from_fn(|i| self.abs[i].max(self.rel * value[i].abs()))
    }
}

struct Panel<T, const N: usize> {
    a: T,
    b: T,
    value: [T; N],
    error: [T; N],
}

fn gk21<T: Real, const N: usize>(f: &mut impl FnMut(T) -> [T; N], a: T, b: T) -> Panel<T, N> {
    let center = (a + b) * lit(0.5);
    let half = (b - a) * lit(0.5);
    let fc = f(center);
    let mut kron: [T; N] = std::array::from_fn(|i| fc[i] * lit(WGK[10]));
    let mut gauss = [T::zero(); N];
    let mut vals = [[T::zero(); N]; 21];
    vals[10] = fc;
    for j in 0..10 {
        let dx = half * lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        vals[j] = f1;
        vals[20 - j] = f2;
        for i in 0..N {
            kron[i] += lit::<T>(WGK[j]) * (f1[i] + f2[i]);
            if j % 2 == 1 {
                gauss[i] += lit::<T>(WG[j / 2]) * (f1[i] + f2[i]);
            }
        }
    }
    let mut error = [T::zero(); N];
    for i in 0..N {
        let mean = kron[i] * lit(0.5);
        let mut resabs = T::zero();
        let mut resasc = T::zero();
        for (j, v) in vals.iter().enumerate() {
            let w: T = lit(WGK[if j <= 10 { j } else { 20 - j }]);
            resabs += w * v[i].abs();
            resasc += w * (v[i] - mean).abs();
        }
        let h = half.abs();
        let (resabs, resasc) = (resabs * h, resasc * h);
        let mut err = ((kron[i] - gauss[i]) * half).abs();
        if resasc != T::zero() && err != T::zero() {
            let scale = (lit::<T>(200.0) * err / resasc).powf(lit(1.5));
            err = resasc * scale.min(T::one());
        }
        let floor = lit::<T>(50.0) * T::epsilon() * resabs;
        error[i] = err.max(floor);
    }
    Panel {
        a,
        b,
        value: std::array::from_fn(|i| kron[i] * half),
        error,
    }
}

fn no_convergence<T: Real, const N: usize>(evals: usize, value: &[T; N], error: &[T; N]) -> Error {
    // report the component furthest from its target
    let mut worst = 0;
    let mut worst_rel = 0.0;
    for i in 0..N {
        let r = to_f64(error[i]) / to_f64(value[i].abs()).max(f64::MIN_POSITIVE);
        if r > worst_rel || i == 0 {
            worst_rel = r;
            worst = i;
        }
    }
    Error::NoConvergence {
        evals,
        estimate: to_f64(value[worst]),
        error: to_f64(error[worst]),
        achieved_rel: worst_rel,
    }
}

/// Globally adaptive Gauss–Kronrod integration of a vector-valued `f` on
/// `[a, b]`.
pub fn integrate_1d<T: Real, const N: usize>(
    mut f: impl FnMut(T) -> [T; N],
    a: T,
    b: T,
    tol: &Tolerance<T, N>,
    max_evals: usize,
) -> Result<Estimate<T, N>> {
    let mut panels = vec![gk21(&mut f, a, b)];
    let mut evals = 21;
    loop {
        let value: [T; N] = std::array::from_fn(|i| compensated_sum(panels.iter().map(|p| p.value[i])));
        let error: [T; N] = std::array::from_fn(|i| compensated_sum(panels.iter().map(|p| p.error[i])));
        let target = tol.target(&value);
        if (0..N).all(|i| error[i] <= target[i]) {
            return Ok(Estimate { value, error, evals });
        }
        if evals + 42 > max_evals {
            return Err(no_convergence(evals, &value, &error));
        }
        // split the panel contributing most to the worst-off components
        let mut pick = None;
        let mut best = T::zero();
        for (idx, p) in panels.iter().enumerate() {
            let width_ok = (p.b - p.a).abs() > lit::<T>(100.0) * T::epsilon() * p.a.abs().max(p.b.abs());
            if !width_ok {
                continue;
            }
            let score = (0..N).fold(T::zero(), |s, i| {
                let t = target[i].max(T::min_positive_value());
                s.max(p.error[i] / t)
            });
            if pick.is_none() || score > best {
                best = score;
                pick = Some(idx);
            }
        }
        let Some(idx) = pick else {
            return Err(no_convergence(evals, &value, &error));
        };
        let p = panels.remove(idx);
        let mid = (p.a + p.b) * lit(0.5);
        let left = gk21(&mut f, p.a, mid);
        let right = gk21(&mut f, mid, p.b);
        evals += 42;
        panels.insert(idx, right);
        panels.insert(idx, left);
    }
}

/// Iterated integral `∫_{a0}^{b0} dx ∫_{a1(x)}^{b1(x)} dy f(x, y)`.
///
/// The inner integrals get a tenth of the outer relative tolerance and an
/// absolute tolerance scaled by the outer interval length.
pub fn integrate_2d<T: Real, const N: usize>(
    mut f: impl FnMut(T, T) -> [T; N],
    (a0, b0): (T, T),
    (a1, b1): (T, T),
    tol: &Tolerance<T, N>,
    max_evals: usize,
) -> Result<Estimate<T, N>> {
    let evals = Cell::new(0usize);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let width = (b0 - a0).abs();
    let inner_tol = Tolerance {
        rel: tol.rel * lit(0.1),
        abs: std::array::from_fn(|i| tol.abs[i] * lit(0.1) / width),
    };
    let outer = integrate_1d(
        |x| {
            if failure.borrow().is_some() {
                return [T::zero(); N];
            }
            let budget = max_evals.saturating_sub(evals.get()).max(1000);
            match integrate_1d(|y| f(x, y), a1, b1, &inner_tol, budget) {
                Ok(est) => {
                    evals.set(evals.get() + est.evals);
                    est.value
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    [T::zero(); N]
                }
            }
        },
        a0,
        b0,
        tol,
        max_evals,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    outer.map(|est| Estimate {
        evals: evals.get(),
        ..est
    })
}

/// Iterated 3D integral over a box, `x` outermost and `z` innermost.
pub fn integrate_3d_iterated<T: Real, const N: usize>(
    mut f: impl FnMut(T, T, T) -> [T; N],
    (a0, b0): (T, T),
    (a1, b1): (T, T),
    (a2, b2): (T, T),
    tol: &Tolerance<T, N>,
    max_evals: usize,
) -> Result<Estimate<T, N>> {
    let evals = Cell::new(0usize);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let width = (b0 - a0).abs();
    let mid_tol = Tolerance {
        rel: tol.rel * lit(0.1),
        abs: std::array::from_fn(|i| tol.abs[i] * lit(0.1) / width),
    };
    let outer = integrate_1d(
        |x| {
            if failure.borrow().is_some() {
                return [T::zero(); N];
            }
            let budget = max_evals.saturating_sub(evals.get()).max(1000);
            match integrate_2d(|y, z| f(x, y, z), (a1, b1), (a2, b2), &mid_tol, budget) {
                Ok(est) => {
                    evals.set(evals.get() + est.evals);
                    est.value
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    [T::zero(); N]
                }
            }
        },
        a0,
        b0,
        tol,
        max_evals,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    outer.map(|est| Estimate {
        evals: evals.get(),
        ..est
    })
}

struct GmBox<T, const N: usize> {
    lo: [T; 3],
    hi: [T; 3],
    value: [T; N],
    error: [T; N],
    split: usize,
}

fn genz_malik<T: Real, const N: usize>(
    f: &mut impl FnMut(T, T, T) -> [T; N],
    lo: [T; 3],
    hi: [T; 3],
) -> GmBox<T, N> {
    let n = 3.0;
    let l2: T = lit((9.0f64 / 70.0).sqrt());
    let l4: T = lit((9.0f64 / 10.0).sqrt());
    let l5: T = lit((9.0f64 / 19.0).sqrt());
    let w1: T = lit((12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0);
    let w2: T = lit(980.0 / 6561.0);
    let w3: T = lit((1820.0 - 400.0 * n) / 19683.0);
    let w4: T = lit(200.0 / 19683.0);
    let w5: T = lit(6859.0 / 19683.0 / 8.0);
    let v1: T = lit((729.0 - 950.0 * n + 50.0 * n * n) / 729.0);
    let v2: T = lit(245.0 / 486.0);
    let v3: T = lit((265.0 - 100.0 * n) / 1458.0);
    let v4: T = lit(25.0 / 729.0);

    let c: [T; 3] = std::array::from_fn(|d| (lo[d] + hi[d]) * lit(0.5));
    let h: [T; 3] = std::array::from_fn(|d| (hi[d] - lo[d]) * lit(0.5));
    let vol = h[0] * h[1] * h[2] * lit(8.0);
    let mut at = |o: [T; 3]| f(c[0] + h[0] * o[0], c[1] + h[1] * o[1], c[2] + h[2] * o[2]);

    let f0 = at([T::zero(); 3]);
    let mut s2 = [T::zero(); N];
    let mut s3 = [T::zero(); N];
    let mut s4 = [T::zero(); N];
    let mut s5 = [T::zero(); N];
    let mut fourth = [T::zero(); 3];
    let ratio = l2 * l2 / (l4 * l4);
    for d in 0..3 {
        let mut e = [T::zero(); 3];
        e[d] = l2;
        let p2 = at(e);
        e[d] = -l2;
        let m2 = at(e);
        e[d] = l4;
        let p3 = at(e);
        e[d] = -l4;
        let m3 = at(e);
        let mut diff = T::zero();
        for i in 0..N {
            s2[i] += p2[i] + m2[i];
            s3[i] += p3[i] + m3[i];
            let two_f0 = lit::<T>(2.0) * f0[i];
            diff += ((p2[i] + m2[i] - two_f0) - ratio * (p3[i] + m3[i] - two_f0)).abs();
        }
        fourth[d] = diff;
    }
    for d in 0..3 {
        for e in (d + 1)..3 {
            for sd in [-T::one(), T::one()] {
                for se in [-T::one(), T::one()] {
                    let mut o = [T::zero(); 3];
                    o[d] = sd * l4;
                    o[e] = se * l4;
                    let v = at(o);
                    for i in 0..N {
                        s4[i] += v[i];
                    }
                }
            }
        }
    }
    for sx in [-T::one(), T::one()] {
        for sy in [-T::one(), T::one()] {
            for sz in [-T::one(), T::one()] {
                let v = at([sx * l5, sy * l5, sz * l5]);
                for i in 0..N {
                    s5[i] += v[i];
                }
            }
        }
    }
    let mut value = [T::zero(); N];
    let mut error = [T::zero(); N];
    for i in 0..N {
        let r7 = w1 * f0[i] + w2 * s2[i] + w3 * s3[i] + w4 * s4[i] + w5 * s5[i];
        let r5 = v1 * f0[i] + v2 * s2[i] + v3 * s3[i] + v4 * s4[i];
        value[i] = vol * r7;
        error[i] = (vol * (r7 - r5)).abs();
    }
    let mut split = 0;
    for d in 1..3 {
        // prefer the widest box side when the differences tie
        if fourth[d] > fourth[split] || (fourth[d] == fourth[split] && h[d] > h[split]) {
            split = d;
        }
    }
    GmBox {
        lo,
        hi,
        value,
        error,
        split,
    }
}

/// Globally adaptive Genz–Malik cubature over a 3D box.
pub fn integrate_3d_cubature<T: Real, const N: usize>(
    mut f: impl FnMut(T, T, T) -> [T; N],
    lo: [T; 3],
    hi: [T; 3],
    tol: &Tolerance<T, N>,
    max_evals: usize,
) -> Result<Estimate<T, N>> {
    const PTS: usize = 33;
    // start from a coarse grid so narrow features are not missed entirely
    let mut boxes = Vec::new();
    let parts = 4;
    for i in 0..parts {
        for j in 0..parts {
            for k in 0..parts {
                let idx = [i, j, k];
                let l: [T; 3] = std::array::from_fn(|d| {
                    lo[d] + (hi[d] - lo[d]) * crate::num::from_usize::<T>(idx[d]) / crate::num::from_usize(parts)
                });
                let u: [T; 3] = std::array::from_fn(|d| {
                    lo[d] + (hi[d] - lo[d]) * crate::num::from_usize::<T>(idx[d] + 1) / crate::num::from_usize(parts)
                });
                boxes.push(genz_malik(&mut f, l, u));
            }
        }
    }
    let mut evals = PTS * boxes.len();
    loop {
        let value: [T; N] = std::array::from_fn(|i| compensated_sum(boxes.iter().map(|b| b.value[i])));
        let error: [T; N] = std::array::from_fn(|i| compensated_sum(boxes.iter().map(|b| b.error[i])));
        let target = tol.target(&value);
        if (0..N).all(|i| error[i] <= target[i]) {
            return Ok(Estimate { value, error, evals });
        }
        if evals + 2 * PTS > max_evals {
            return Err(no_convergence(evals, &value, &error));
        }
        let mut pick = 0;
        let mut best = -T::one();
        for (idx, b) in boxes.iter().enumerate() {
            let score = (0..N).fold(T::zero(), |s, i| {
                let t = target[i].max(T::min_positive_value());
                s.max(b.error[i] / t)
            });
            if score > best {
                best = score;
                pick = idx;
            }
        }
        let b = boxes.remove(pick);
        let d = b.split;
        let mid = (b.lo[d] + b.hi[d]) * lit(0.5);
        let mut hi1 = b.hi;
        hi1[d] = mid;
        let mut lo2 = b.lo;
        lo2[d] = mid;
        let first = genz_malik(&mut f, b.lo, hi1);
        let second = genz_malik(&mut f, lo2, b.hi);
        boxes.insert(pick, second);
        boxes.insert(pick, first);
        evals += 2 * PTS;
    }
}

/// Part of the `k`-sphere to integrate over; the result is multiplied by the
/// number of symmetric copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphericalDomain {
    /// All directions.
    Full,
    /// `φ ∈ [0, π]`, for integrands even under `k_y → −k_y`.
    MirrorY,
    /// `θ ∈ [0, π/2]`, for integrands even under `k → −k`.
    UpperHalf,
    /// `θ ∈ [0, π/2]`, `φ ∈ [0, π/2]`, for integrands even under each
    /// coordinate reflection.
    Octant,
}

fn relative_floor<T: Real, const N: usize>(pilot: &[T; N], spec: &QuadratureSpec<T>) -> [T; N] {
    std::array::from_fn(|i| spec.abs_tol.max(lit::<T>(1e-3) * spec.rel_tol * pilot[i].abs()))
}

/// `∫d³k e^{−r_C²k²} f(k, θ, φ)` in spherical coordinates (`k` in 1/m).
pub fn integrate_radial_angular<T: Real, const N: usize>(
    f: impl Fn(T, T, T) -> [T; N],
    r_c: T,
    domain: SphericalDomain,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T, N>> {
    integrate_radial_angular_grouped(f, r_c, domain, spec, &[0; N])
}

/// As [`integrate_radial_angular`], with components sharing a nonzero group
/// label converged against the size of their group: component `i` only
/// needs an error below `rel · max_j ∫|f_j|` over its group `j`. Label `0`
/// leaves a component on its own. Suited to tensor
/// entries, where elements that vanish by symmetry need no relative
/// accuracy of their own.
pub fn integrate_radial_angular_grouped<T: Real, const N: usize>(
    f: impl Fn(T, T, T) -> [T; N],
    r_c: T,
    domain: SphericalDomain,
    spec: &QuadratureSpec<T>,
    groups: &[usize; N],
) -> Result<Estimate<T, N>> {
    let pi = T::PI();
    let (theta_hi, phi_hi, copies) = match domain {
        SphericalDomain::Full => (pi, pi + pi, T::one()),
        SphericalDomain::MirrorY => (pi, pi, lit(2.0)),
        SphericalDomain::UpperHalf => (pi / lit(2.0), pi + pi, lit(2.0)),
        SphericalDomain::Octant => (pi / lit(2.0), pi / lit(2.0), lit(8.0)),
    };
    let inv_r = T::one() / r_c;
    let g = |theta: T, phi: T, u: T| -> [T; N] {
        let w = (-u * u).exp() * u * u * theta.sin();
        let v = f(u * inv_r, theta, phi);
        std::array::from_fn(|i| w * v[i])
    };
    let pilot = pilot_abs_3d(&g, [T::zero(); 3], [theta_hi, phi_hi, spec.u_max]);
    let mut abs = relative_floor(&pilot, spec);
    for i in 0..N {
        if groups[i] != 0 {
            let size = (0..N)
                .filter(|j| groups[*j] == groups[i])
                .fold(T::zero(), |m, j| m.max(pilot[j].abs()));
            abs[i] = abs[i].max(lit::<T>(0.1) * spec.rel_tol * size);
        }
    }
    let tol = Tolerance { rel: spec.rel_tol, abs };
    let est = match spec.scheme {
        Scheme::GaussKronrod1D | Scheme::TensorSpherical3D => integrate_3d_iterated(
            g,
            (T::zero(), theta_hi),
            (T::zero(), phi_hi),
            (T::zero(), spec.u_max),
            &tol,
            spec.max_evals,
        )?,
        Scheme::AdaptiveCubature => integrate_3d_cubature(
            |u, theta, phi| g(theta, phi, u),
            [T::zero(); 3],
            [spec.u_max, theta_hi, phi_hi],
            &tol,
            spec.max_evals,
        )?,
    };
    let scale = copies * inv_r * inv_r * inv_r;
    Ok(Estimate {
        value: est.value.map(|v| v * scale),
        error: est.error.map(|v| v * scale),
        evals: est.evals,
    })
}

/// `2π ∫∫ e^{−r_C²k²} f(k, θ) k² sinθ dk dθ` for integrands that do not
/// depend on the azimuth. With `hemisphere` set, only `θ ≤ π/2` is
/// integrated and the result doubled (integrand even under `θ → π − θ`).
pub fn integrate_axisymmetric<T: Real, const N: usize>(
    f: impl Fn(T, T) -> [T; N],
    r_c: T,
    hemisphere: bool,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T, N>> {
    let pi = T::PI();
    let (theta_hi, copies) = if hemisphere {
        (pi / lit(2.0), lit::<T>(2.0))
    } else {
        (pi, T::one())
    };
    let inv_r = T::one() / r_c;
    let g = |theta: T, u: T| -> [T; N] {
        let w = (-u * u).exp() * u * u * theta.sin();
        let v = f(u * inv_r, theta);
        std::array::from_fn(|i| w * v[i])
    };
    let pilot = pilot_abs_2d(&g, [T::zero(); 2], [theta_hi, spec.u_max]);
    let tol = Tolerance {
        rel: spec.rel_tol,
        abs: relative_floor(&pilot, spec),
    };
    let est = integrate_2d(
        g,
        (T::zero(), theta_hi),
        (T::zero(), spec.u_max),
        &tol,
        spec.max_evals,
    )?;
    let scale = copies * lit::<T>(2.0) * pi * inv_r * inv_r * inv_r;
    Ok(Estimate {
        value: est.value.map(|v| v * scale),
        error: est.error.map(|v| v * scale),
        evals: est.evals,
    })
}

/// Kronrod nodes and weights mapped to `[lo, hi]`.
fn kronrod_nodes<T: Real>(lo: T, hi: T) -> [(T, T); 21] {
    let c = (lo + hi) * lit(0.5);
    let h = (hi - lo) * lit(0.5);
    std::array::from_fn(|j| {
        let (x, w) = if j <= 10 {
            (-XGK[j], WGK[j])
        } else {
            (XGK[20 - j], WGK[20 - j])
        };
        (c + h * lit(x), h * lit(w))
    })
}

/// Rough `∫|f|` on a single tensor Kronrod grid, used to scale absolute
/// tolerances.
fn pilot_abs_2d<T: Real, const N: usize>(g: &impl Fn(T, T) -> [T; N], lo: [T; 2], hi: [T; 2]) -> [T; N] {
    let mut acc = [T::zero(); N];
    for (x, wx) in kronrod_nodes(lo[0], hi[0]) {
        for (y, wy) in kronrod_nodes(lo[1], hi[1]) {
            let v = g(x, y);
            for i in 0..N {
                acc[i] += wx * wy * v[i].abs();
            }
        }
    }
    acc
}

fn pilot_abs_3d<T: Real, const N: usize>(
    g: &impl Fn(T, T, T) -> [T; N],
    lo: [T; 3],
    hi: [T; 3],
) -> [T; N] {
    let mut acc = [T::zero(); N];
    for (x, wx) in kronrod_nodes(lo[0], hi[0]) {
        for (y, wy) in kronrod_nodes(lo[1], hi[1]) {
            for (z, wz) in kronrod_nodes(lo[2], hi[2]) {
                let v = g(x, y, z);
                for i in 0..N {
                    acc[i] += wx * wy * wz * v[i].abs();
                }
            }
        }
    }
    acc
}
