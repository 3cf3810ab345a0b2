use crate::operator::build_matrix;
use crate::squeeze::{squeeze, Side, Squeezed};
use crate::symbol::{apply_T, SymbolPair, SAMPLES};
use crate::FredholmError;
use fourier_core::{c64, IndexedPairs, Pair, Series, Tuple, C64};
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct HighModeSolution {
    /// Supported on `2M < |j| <= L`.
    pub c: Series,
    /// `||T c - f|| / ||f||`.
    pub residual: f64,
    pub squeezed: Squeezed,
    /// True when forward substitution lost accuracy and the stacked least-squares solve of
    /// the same frontier equations was used.
    pub stacked: bool,
}

/// Relative residual above which the recursion result is replaced by the stacked solve.
const STACK_TRIGGER: f64 = 1e-12;

/// Pair tuple `(alpha_M, .., alpha_{-M})` with `alpha_l = (conj d-_{-l}, d+_l)`.
///
/// For `n > M` and `c` vanishing on `[-2M, 2M]`, with `v_j = (p_j, conj p_{-j})`:
/// `bracket(A, V, n-M-1) = T(c)_n` and `bracket(A-hat, V, n-M-1) = -conj T(c)_{-n}`.
pub fn symbol_tuple(sym: &SymbolPair) -> Tuple {
    let m = sym.band() as i64;
    let entries = (-m..=m)
        .rev()
        .map(|l| Pair::new(sym.d_minus().coeff(-l).conj(), sym.d_plus().coeff(l)))
        .collect();
    Tuple::new(entries).expect("2M+1 >= 1 entries")
}

fn frontier_solve(sym: &SymbolPair, sq: &Squeezed, band: usize, f: &Series) -> Series {
    let m = sym.band() as i64;
    let p = sq.b.len() as i64;
    let x = |side: Side, k: i64| {
        let n = k + m + 1;
        match side {
            Side::A => f.coeff(n),
            Side::Hat => -f.coeff(-n).conj(),
        }
    };
    let (bp, bsp) = (sq.b.last(), sq.b_star.last());
    let det = bp.det(&bsp);
    let mut v: IndexedPairs<f64> = IndexedPairs::new();
    let mut k = 0i64;
    while k + p <= band as i64 {
        let mut r1 = sq.rhs_b.eval(k, x);
        let mut r2 = sq.rhs_b_star.eval(k, x);
        for i in 1..p {
            if let Some(vj) = v.get(&(k + i)) {
                let (b, bs) = (sq.b.get(i as usize), sq.b_star.get(i as usize));
                r1 -= b.first * vj.first + b.second * vj.second;
                r2 -= bs.first * vj.first + bs.second * vj.second;
            }
        }
        let first = (r1 * bsp.second - bp.second * r2) / det;
        let second = (bp.first * r2 - bsp.first * r1) / det;
        v.insert(k + p, Pair::new(first, second));
        k += 1;
    }
    Series::from_fn(band, |j| match v.get(&j.abs()) {
        Some(pair) if j > 0 => pair.first,
        Some(pair) => pair.second.conj(),
        None => c64(0.0, 0.0),
    })
}

/// The frontier equations of every row `k < band`, including the top rows the recursion
/// never reaches, solved together by least squares.
///
/// Forward substitution amplifies rounding by the growth of the recurrence (about 1e8 over
/// 24 steps for some band-3 symbols) while the stacked system stays as well conditioned
/// as `T` on the high modes.
fn stacked_solve(sym: &SymbolPair, sq: &Squeezed, band: usize, f: &Series) -> Series {
    let m = sym.band() as i64;
    let p = sq.b.len() as i64;
    let top = band as i64;
    if top < p {
        return Series::zeros(band);
    }
    let x = |side: Side, k: i64| {
        let n = k + m + 1;
        match side {
            Side::A => f.coeff(n),
            Side::Hat => -f.coeff(-n).conj(),
        }
    };
    let unknowns = (top - p + 1) as usize;
    let rows = 4 * top as usize;
    let mut a = DMatrix::<f64>::zeros(rows, 4 * unknowns);
    let mut rhs = DVector::<f64>::zeros(rows);
    for k in 0..top {
        for (t, (tuple, form)) in [(&sq.b, &sq.rhs_b), (&sq.b_star, &sq.rhs_b_star)].into_iter().enumerate() {
            let row = 4 * k as usize + 2 * t;
            let r = form.eval(k, x);
            rhs[row] = r.re;
            rhs[row + 1] = r.im;
            for i in 1..=p {
                let j = k + i;
                if j < p || j > top {
                    continue;
                }
                let e = tuple.get(i as usize);
                for (comp, coef) in [(0, e.first), (1, e.second)] {
                    let col = 4 * (j - p) as usize + 2 * comp;
                    a[(row, col)] += coef.re;
                    a[(row, col + 1)] -= coef.im;
                    a[(row + 1, col)] += coef.im;
                    a[(row + 1, col + 1)] += coef.re;
                }
            }
        }
    }
    let sol = a.svd(true, true).solve(&rhs, 1e-13).expect("U and V were requested");
    let pair = |j: i64| {
        let o = 4 * (j - p) as usize;
        Pair::new(c64(sol[o], sol[o + 1]), c64(sol[o + 2], sol[o + 3]))
    };
    Series::from_fn(band, |j| {
        let a = j.abs();
        if a < p {
            return c64(0.0, 0.0);
        }
        let v = pair(a);
        if j > 0 {
            v.first
        } else {
            v.second.conj()
        }
    })
}

fn rel_err(a: &Series, b: &Series) -> f64 {
    let n = a.band_limit().max(b.band_limit());
    let d = (&a.with_band(n) - &b.with_band(n)).norm_sqr_coeffs().sqrt();
    let s = b.norm_sqr_coeffs().sqrt();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

/// Solve `T(c) = f` for `c` supported on `2M < |j| <= L` by the frontier recursion.
///
/// `f` must vanish on `[-M, M]`. Each step is a 2x2 solve for `(p_j, conj p_{-j})` with
/// the rows of the squeezed tuple; two refinement passes reuse the same recursion. If the
/// residual is still above `1e-12` the same frontier equations are solved jointly.
pub fn high_mode_injectivity(
    sym: &SymbolPair,
    band: usize,
    f: &Series,
) -> Result<HighModeSolution, FredholmError> {
    let m = sym.band();
    let total = f.norm_sqr_coeffs();
    let low = f.project_band(m).norm_sqr_coeffs();
    if low > 1e-24 * total {
        return Err(FredholmError::LowModes((low / total).sqrt()));
    }
    let sq = squeeze(&symbol_tuple(sym)).map_err(|e| match e {
        FredholmError::Exhausted | FredholmError::ZeroTuple => FredholmError::Frontier(0.0),
        e => e,
    })?;
    if sq.det.norm() < 1e-12 * sq.scale {
        return Err(FredholmError::Frontier(sq.det.norm()));
    }
    if total == 0.0 {
        return Ok(HighModeSolution {
            c: Series::zeros(band),
            residual: 0.0,
            squeezed: sq,
            stacked: false,
        });
    }
    let mut c = frontier_solve(sym, &sq, band, f);
    let mut residual = rel_err(&apply_T(sym, &c), f);
    for _ in 0..2 {
        let tc = apply_T(sym, &c);
        let n = tc.band_limit().max(f.band_limit());
        let r = &f.with_band(n) - &tc.with_band(n);
        let next = &c + &frontier_solve(sym, &sq, band, &r);
        let res = rel_err(&apply_T(sym, &next), f);
        if res >= residual {
            break;
        }
        c = next;
        residual = res;
    }
    let mut stacked = false;
    if residual > STACK_TRIGGER {
        let alt = stacked_solve(sym, &sq, band, f);
        let res = rel_err(&apply_T(sym, &alt), f);
        if res < residual {
            c = alt;
            residual = res;
            stacked = true;
        }
    }
    Ok(HighModeSolution {
        c,
        residual,
        squeezed: sq,
        stacked,
    })
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
}

/// Smallest `N` with `||(I - P_N) g|| < ||g|| / 8`.
fn tail_band(samples: &[C64]) -> usize {
    let g = Series::from_samples(samples, SAMPLES / 2 - 1);
    let total = g.norm_sqr_coeffs();
    if total == 0.0 {
        return 0;
    }
    let mut kept = g.coeff(0).norm_sqr();
    let mut n = 0;
    while total - kept >= total / 64.0 && n < g.band_limit() {
        n += 1;
        kept += g.coeff(n as i64).norm_sqr() + g.coeff(-(n as i64)).norm_sqr();
    }
    n
}

/// Commutator threshold `2 N1 + 2 N2`.
///
/// `N1` resolves `Q = d+ d- / (|d-|^2 + delta^2)` (the regularized `d+ / conj d-`),
/// `N2` the cutoff `chi` that switches on where `|d-| >= tau / 2`; `delta = tau / 4`.
pub fn commutator_threshold(sym: &SymbolPair) -> usize {
    let n = SAMPLES;
    let dp = sym.d_plus().sample(n);
    let dm = sym.d_minus().sample(n);
    let delta = sym.tau() / 4.0;
    let q: Vec<C64> = (0..n)
        .map(|j| dp[j] * dm[j] / (dm[j].norm_sqr() + delta * delta))
        .collect();
    let chi: Vec<C64> = dm
        .iter()
        .map(|z| c64(smoothstep((z.norm() - delta) / delta), 0.0))
        .collect();
    2 * tail_band(&q) + 2 * tail_band(&chi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerBound {
    pub cut: usize,
    pub band: usize,
    pub sigma_band: f64,
    pub sigma_double: f64,
    /// Smaller of the two.
    pub value: f64,
    /// Largest `sigma ||c|| / ||T c||` over the probe series (must be `<= 1`).
    pub probe_ratio: f64,
}

impl LowerBound {
    /// `|sigma_L - sigma_2L| / sigma_2L`.
    pub fn drift(&self) -> f64 {
        (self.sigma_band - self.sigma_double).abs() / self.sigma_double
    }
}

fn restricted_sigma(sym: &SymbolPair, cut: usize, band: usize) -> f64 {
    let op = build_matrix(band, band + sym.band(), |c| apply_T(sym, c));
    let keep: Vec<usize> = (0..op.matrix().ncols())
        .filter(|j| ((j / 2) as i64 - band as i64).unsigned_abs() as usize > cut)
        .collect();
    let m = DMatrix::from_fn(op.matrix().nrows(), keep.len(), |i, j| op.matrix()[(i, keep[j])]);
    m.svd(false, false).singular_values.min()
}

/// Smallest singular value of `T` on series with `P_{cut} c = 0`, at bands `L` and `2L`.
pub fn high_mode_lower_bound(
    sym: &SymbolPair,
    cut: usize,
    trials: usize,
) -> Result<LowerBound, FredholmError> {
    if sym.tau() < 1e-6 {
        return Err(FredholmError::Degenerate(sym.tau()));
    }
    let threshold = commutator_threshold(sym);
    if cut < threshold {
        return Err(FredholmError::BelowThreshold { cut, threshold });
    }
    let band = 2 * cut.max(2 * sym.band() + 1) + 8;
    let sigma_band = restricted_sigma(sym, cut, band);
    let sigma_double = restricted_sigma(sym, cut, 2 * band);
    let value = sigma_band.min(sigma_double);
    let mut probe_ratio: f64 = 0.0;
    for t in 0..trials {
        let w = 0.37 + 0.61 * t as f64;
        let c = Series::from_fn(2 * band, |l| {
            if l.unsigned_abs() as usize <= cut {
                c64(0.0, 0.0)
            } else {
                C64::from_polar(1.0 / (1.0 + (l as f64 - w).abs()), w * l as f64)
            }
        });
        let tc = apply_T(sym, &c);
        probe_ratio = probe_ratio.max(value * c.l2_norm() / tc.l2_norm());
    }
    Ok(LowerBound {
        cut,
        band,
        sigma_band,
        sigma_double,
        value,
        probe_ratio,
    })
}
