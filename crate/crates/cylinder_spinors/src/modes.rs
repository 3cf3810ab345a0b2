use crate::bessel::bessel_i;
use crate::geometry::{log_derivative, CylinderGeometry};
use crate::CylinderError;
use fourier_core::{c64, Series, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProfileClass {
    #[serde(rename = "L2")]
    L2Kernel,
    #[serde(rename = "L21")]
    L21Kernel,
}

/// Whether circle frequencies are integers or are shifted by one half.
///
/// With `HalfIntegerL` the stored index `n` stands for frequency `n + 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SpinOffset {
    #[default]
    IntegerL,
    HalfIntegerL,
}

impl SpinOffset {
    pub fn frequency(self, l: i64) -> f64 {
        match self {
            SpinOffset::IntegerL => l as f64,
            SpinOffset::HalfIntegerL => l as f64 + 0.5,
        }
    }
}

/// `lam^{-p} I_p(lam r)` for a real frequency `lam > 0`.
fn frak(p: f64, lam: f64, r: f64) -> f64 {
    lam.powf(-p) * bessel_i(p, lam * r).expect("profile argument in range")
}

/// Solution attached to `u+_{k,l}`: `(frak_{k-1/2}, -l frak_{k+1/2})`, or `(r^{k-1/2}, 0)` at `l = 0`.
pub fn plus_family(k: i64, l: f64, r: f64) -> (f64, f64) {
    let kf = k as f64;
    if l == 0.0 {
        return (r.powf(kf - 0.5), 0.0);
    }
    let lam = l.abs();
    (frak(kf - 0.5, lam, r), -l * frak(kf + 0.5, lam, r))
}

/// Solution attached to `u-_{k,l}`: `(-l frak_{-k+1/2}, frak_{-k-1/2})`, or `(0, r^{-k-1/2})` at `l = 0`.
pub fn minus_family(k: i64, l: f64, r: f64) -> (f64, f64) {
    let kf = k as f64;
    if l == 0.0 {
        return (0.0, r.powf(-kf - 0.5));
    }
    let lam = l.abs();
    (-l * frak(-kf + 0.5, lam, r), frak(-kf - 0.5, lam, r))
}

/// One harmonic mode; fields are private so every term comes from [`build_harmonic_mode`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeTerm {
    u_plus: C64,
    u_minus: C64,
    class: ProfileClass,
}

impl ModeTerm {
    pub fn u_plus(&self) -> C64 {
        self.u_plus
    }
    pub fn u_minus(&self) -> C64 {
        self.u_minus
    }
    pub fn class(&self) -> ProfileClass {
        self.class
    }
}

/// Checks the sign constraints on `k` and returns the mode.
pub fn build_harmonic_mode(
    k: i64,
    l: i64,
    u_plus: C64,
    u_minus: C64,
    class: ProfileClass,
) -> Result<ModeTerm, CylinderError> {
    let (plus_forbidden, minus_forbidden) = match class {
        ProfileClass::L2Kernel => (k <= -1, k >= 1),
        ProfileClass::L21Kernel => (k <= 0, k >= 0),
    };
    if plus_forbidden && u_plus != c64(0.0, 0.0) {
        return Err(CylinderError::Constraint { k, l, class, which: "u+" });
    }
    if minus_forbidden && u_minus != c64(0.0, 0.0) {
        return Err(CylinderError::Constraint { k, l, class, which: "u-" });
    }
    Ok(ModeTerm {
        u_plus,
        u_minus,
        class,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinorModeExpansion {
    geometry: CylinderGeometry,
    terms: BTreeMap<(i64, i64), ModeTerm>,
    spin_offset: SpinOffset,
}

impl SpinorModeExpansion {
    pub fn new(geometry: CylinderGeometry) -> Self {
        Self {
            geometry,
            terms: BTreeMap::new(),
            spin_offset: SpinOffset::IntegerL,
        }
    }

    pub fn with_offset(mut self, spin_offset: SpinOffset) -> Self {
        self.spin_offset = spin_offset;
        self
    }

    pub fn geometry(&self) -> &CylinderGeometry {
        &self.geometry
    }

    pub fn spin_offset(&self) -> SpinOffset {
        self.spin_offset
    }

    pub fn terms(&self) -> &BTreeMap<(i64, i64), ModeTerm> {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms
            .values()
            .all(|t| t.u_plus == c64(0.0, 0.0) && t.u_minus == c64(0.0, 0.0))
    }

    /// Build and insert a mode, replacing any previous term at `(k, l)`.
    pub fn insert(
        &mut self,
        k: i64,
        l: i64,
        u_plus: C64,
        u_minus: C64,
        class: ProfileClass,
    ) -> Result<(), CylinderError> {
        if k.unsigned_abs() as usize > self.geometry.k_max()
            || l.unsigned_abs() as usize > self.geometry.l_max()
        {
            return Err(CylinderError::Band { k, l });
        }
        let term = build_harmonic_mode(k, l, u_plus, u_minus, class)?;
        self.terms.insert((k, l), term);
        Ok(())
    }

    /// `(U+, U-)` of the mode `(k, l)` at radius `r` (zero if absent).
    pub fn radial_value(&self, k: i64, l: i64, r: f64) -> (C64, C64) {
        match self.terms.get(&(k, l)) {
            Some(t) => term_value(k, self.spin_offset.frequency(l), t, r),
            None => (c64(0.0, 0.0), c64(0.0, 0.0)),
        }
    }

    /// Samples of `(U+, U-)` on a set of radii.
    pub fn radial_samples(&self, k: i64, l: i64, radii: &[f64]) -> (Vec<C64>, Vec<C64>) {
        radii.iter().map(|&r| self.radial_value(k, l, r)).unzip()
    }

    pub fn class(&self) -> Option<ProfileClass> {
        let mut it = self.terms.values().map(|t| t.class);
        let first = it.next()?;
        if it.all(|c| c == first) {
            Some(first)
        } else {
            None
        }
    }
}

pub(crate) fn term_value(k: i64, l: f64, t: &ModeTerm, r: f64) -> (C64, C64) {
    let mut up = c64(0.0, 0.0);
    let mut um = c64(0.0, 0.0);
    if t.u_plus != c64(0.0, 0.0) {
        let (a, b) = plus_family(k, l, r);
        up += t.u_plus * a;
        um += t.u_plus * b;
    }
    if t.u_minus != c64(0.0, 0.0) {
        let (a, b) = minus_family(k, l, r);
        up += t.u_minus * a;
        um += t.u_minus * b;
    }
    (up, um)
}

/// Residual of the mode equation on the grid.
///
/// Returns `(l U+ + U-' + (k+1/2) U-/r, -l U- - U+' + (k-1/2) U+/r)`, which vanishes
/// exactly on harmonic modes. Derivatives use five-point stencils in `ln r`.
pub fn dirac_apply_mode(
    k: i64,
    l: f64,
    u_plus: &[C64],
    u_minus: &[C64],
    geometry: &CylinderGeometry,
) -> Result<(Vec<C64>, Vec<C64>), CylinderError> {
    dirac_apply_on(k, l, u_plus, u_minus, geometry.grid())
}

/// [`dirac_apply_mode`] on an explicit grid.
pub fn dirac_apply_on(
    k: i64,
    l: f64,
    u_plus: &[C64],
    u_minus: &[C64],
    grid: &[f64],
) -> Result<(Vec<C64>, Vec<C64>), CylinderError> {
    let n = grid.len();
    if n < 5 {
        return Err(CylinderError::Geometry(format!("grid too small: {n} points")));
    }
    if u_plus.len() != n || u_minus.len() != n {
        return Err(CylinderError::Geometry("sample count does not match grid".into()));
    }
    let dp = log_derivative(grid, u_plus);
    let dm = log_derivative(grid, u_minus);
    let kf = k as f64;
    let mut fp = Vec::with_capacity(n);
    let mut fm = Vec::with_capacity(n);
    for i in 0..n {
        let r = grid[i];
        fp.push(u_plus[i] * l + dm[i] + u_minus[i] * ((kf + 0.5) / r));
        fm.push(-u_minus[i] * l - dp[i] + u_plus[i] * ((kf - 0.5) / r));
    }
    Ok((fp, fm))
}

/// `max |F| / max (|l| |U| + (|k|+1) |U| / r)` over the interior nodes.
///
/// The two nodes at each end use one-sided stencils and are left out of both maxima.
pub fn relative_residual(
    k: i64,
    l: f64,
    u_plus: &[C64],
    u_minus: &[C64],
    grid: &[f64],
) -> Result<f64, CylinderError> {
    let (fp, fm) = dirac_apply_on(k, l, u_plus, u_minus, grid)?;
    let n = grid.len();
    let inner = 2..n - 2;
    let num = fp[inner.clone()]
        .iter()
        .zip(&fm[inner.clone()])
        .map(|(a, b)| a.norm().max(b.norm()))
        .fold(0.0, f64::max);
    let scale = grid[inner.clone()]
        .iter()
        .zip(u_plus[inner.clone()].iter().zip(&u_minus[inner]))
        .map(|(r, (a, b))| {
            let m = a.norm() + b.norm();
            l.abs() * m + (k.abs() as f64 + 1.0) * m / r
        })
        .fold(0.0, f64::max);
    Ok(if scale == 0.0 { num } else { num / scale })
}

/// Boundary data `(d+, d-)` of an L^2_1 section, with `tau = min_t sqrt(|d+|^2 + |d-|^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingData {
    pub d_plus: Series,
    pub d_minus: Series,
    pub tau: f64,
}

pub const TAU_SAMPLES: usize = 1024;

impl LeadingData {
    pub fn new(d_plus: Series, d_minus: Series) -> Self {
        let tau = min_modulus(&d_plus, &d_minus, TAU_SAMPLES);
        Self { d_plus, d_minus, tau }
    }

    pub fn is_valid(&self) -> bool {
        self.tau > 0.0
    }
}

/// `min_t sqrt(|a(t)|^2 + |b(t)|^2)` over `n` uniform samples.
pub fn min_modulus(a: &Series, b: &Series, n: usize) -> f64 {
    a.sample(n)
        .iter()
        .zip(b.sample(n))
        .map(|(x, y)| (x.norm_sqr() + y.norm_sqr()).sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// Leading data of an L^2 section: the `u-hat` basis change and the `K_R`-leading coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct KrLeading {
    pub hat_plus: Series,
    pub hat_minus: Series,
    pub u_plus: Series,
    pub u_minus: Series,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Leading {
    L21(LeadingData),
    L2(KrLeading),
}

fn sgn(l: i64) -> f64 {
    l.signum() as f64
}

/// Whether frequency `l` lies in the low band `|l| <= 1/(2R)` of the `K_R` definition.
pub fn low_frequency(l: f64, r_outer: f64) -> bool {
    l.abs() <= 1.0 / (2.0 * r_outer)
}

/// Leading coefficients of a harmonic expansion.
///
/// For L^2 terms `u-hat+ = u+_{0,l} - sign(l) u-_{0,l}` and `u-hat- = u+_{0,l} + sign(l) u-_{0,l}`;
/// the `K_R`-leading pair is `(u-hat+, -sign(l) u-hat+)` above `1/(2R)` and
/// `(2 u+_{0,l}, 2 u-_{0,l})` at or below it (including `l = 0`).
/// For L^2_1 terms `d+_l = v+_{1,l}` and `d-_l = v-_{-1,l}`.
pub fn extract_leading(expansion: &SpinorModeExpansion) -> Result<Leading, CylinderError> {
    let band = expansion.geometry.l_max();
    let class = if expansion.terms.is_empty() {
        ProfileClass::L21Kernel
    } else {
        expansion.class().ok_or(CylinderError::MixedClasses)?
    };
    let get = |k: i64, l: i64| {
        expansion
            .terms
            .get(&(k, l))
            .map(|t| (t.u_plus, t.u_minus))
            .unwrap_or((c64(0.0, 0.0), c64(0.0, 0.0)))
    };
    match class {
        ProfileClass::L21Kernel => {
            let d_plus = Series::from_fn(band, |l| get(1, l).0);
            let d_minus = Series::from_fn(band, |l| get(-1, l).1);
            Ok(Leading::L21(LeadingData::new(d_plus, d_minus)))
        }
        ProfileClass::L2Kernel => {
            let r_outer = expansion.geometry.r_outer();
            let off = expansion.spin_offset;
            let hat_plus = Series::from_fn(band, |l| {
                let (p, m) = get(0, l);
                p - m * sgn(l)
            });
            let hat_minus = Series::from_fn(band, |l| {
                let (p, m) = get(0, l);
                p + m * sgn(l)
            });
            let pairs: Vec<(C64, C64)> = (-(band as i64)..=band as i64)
                .map(|l| {
                    let (p, m) = get(0, l);
                    if low_frequency(off.frequency(l), r_outer) {
                        (p * 2.0, m * 2.0)
                    } else {
                        let h = p - m * sgn(l);
                        (h, -h * sgn(l))
                    }
                })
                .collect();
            let u_plus = Series::from_fn(band, |l| pairs[(l + band as i64) as usize].0);
            let u_minus = Series::from_fn(band, |l| pairs[(l + band as i64) as usize].1);
            Ok(Leading::L2(KrLeading {
                hat_plus,
                hat_minus,
                u_plus,
                u_minus,
            }))
        }
    }
}

/// Inverse of [`extract_leading`] for L^2_1 data: modes `k = 1` and `k = -1` only.
pub fn expansion_from_boundary(
    geometry: CylinderGeometry,
    data: &LeadingData,
) -> Result<SpinorModeExpansion, CylinderError> {
    let mut e = SpinorModeExpansion::new(geometry);
    for (l, c) in data.d_plus.modes() {
        if c != c64(0.0, 0.0) {
            e.insert(1, l, c, c64(0.0, 0.0), ProfileClass::L21Kernel)?;
        }
    }
    for (l, c) in data.d_minus.modes() {
        if c != c64(0.0, 0.0) {
            e.insert(-1, l, c64(0.0, 0.0), c, ProfileClass::L21Kernel)?;
        }
    }
    Ok(e)
}

/// Inverse of [`extract_leading`] on `K_R`: `k = 0` modes with `u-hat- = 0` above `1/(2R)`.
pub fn expansion_from_kr(
    geometry: CylinderGeometry,
    u_plus: &Series,
    u_minus: &Series,
) -> Result<SpinorModeExpansion, CylinderError> {
    let r_outer = geometry.r_outer();
    let band = u_plus.band_limit().max(u_minus.band_limit()) as i64;
    let mut e = SpinorModeExpansion::new(geometry);
    for l in -band..=band {
        let (a, b) = (u_plus.coeff(l), u_minus.coeff(l));
        if a == c64(0.0, 0.0) && b == c64(0.0, 0.0) {
            continue;
        }
        let (p, m) = if low_frequency(l as f64, r_outer) {
            (a * 0.5, b * 0.5)
        } else {
            // u-hat+ = a, u-hat- = 0
            (a * 0.5, -a * (0.5 * sgn(l)))
        };
        e.insert(0, l, p, m, ProfileClass::L2Kernel)?;
    }
    Ok(e)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    k: i64,
    l: i64,
    u_plus: [f64; 2],
    u_minus: [f64; 2],
    class: ProfileClass,
}

#[derive(Serialize, Deserialize)]
struct ExpansionJson {
    #[serde(rename = "R")]
    r: f64,
    terms: Vec<TermJson>,
}

impl SpinorModeExpansion {
    pub fn to_json_value(&self) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|(&(k, l), t)| TermJson {
                k,
                l,
                u_plus: [t.u_plus.re, t.u_plus.im],
                u_minus: [t.u_minus.re, t.u_minus.im],
                class: t.class,
            })
            .collect();
        serde_json::to_value(ExpansionJson {
            r: self.geometry.r_outer(),
            terms,
        })
        .expect("expansion serializes")
    }

    /// Parse the JSON form onto a graded grid with `n` radial points.
    pub fn from_json_value(v: &serde_json::Value, n: usize) -> Result<Self, CylinderError> {
        let raw: ExpansionJson =
            serde_json::from_value(v.clone()).map_err(|e| CylinderError::Json(e.to_string()))?;
        let k_max = raw.terms.iter().map(|t| t.k.unsigned_abs()).max().unwrap_or(0) as usize;
        let l_max = raw.terms.iter().map(|t| t.l.unsigned_abs()).max().unwrap_or(0) as usize;
        let geometry = CylinderGeometry::graded(raw.r, k_max, l_max, n)?;
        let mut e = SpinorModeExpansion::new(geometry);
        for t in raw.terms {
            e.insert(
                t.k,
                t.l,
                c64(t.u_plus[0], t.u_plus[1]),
                c64(t.u_minus[0], t.u_minus[1]),
                t.class,
            )?;
        }
        Ok(e)
    }
}
