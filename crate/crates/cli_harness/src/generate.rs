//! Random inputs for the suites.

use cylinder_spinors::{CylinderGeometry, ProfileClass, SpinorModeExpansion};
use fourier_core::{c64, IndexedPairs, Pair, Series, Tuple, C64};
use fredholm_t::SymbolPair;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn complex(rng: &mut ChaCha8Rng) -> C64 {
    c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn series(rng: &mut ChaCha8Rng, band: usize) -> Series {
    Series::from_fn(band, |_| complex(rng))
}

/// Series supported on `lo < |l| <= hi`.
pub fn high_series(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Series {
    Series::from_fn(hi, |l| {
        if l.unsigned_abs() as usize > lo {
            complex(rng)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// Band-`m` symbol pair with `tau >= tau_min`, by rejection.
pub fn symbol(rng: &mut ChaCha8Rng, m: usize, tau_min: f64) -> SymbolPair {
    loop {
        if let Ok(s) = SymbolPair::new(series(rng, m), series(rng, m)) {
            if s.tau() >= tau_min {
                return s;
            }
        }
    }
}

pub fn rel(a: &Series, b: &Series) -> f64 {
    let n = a.band_limit().max(b.band_limit());
    (&a.with_band(n) - &b.with_band(n)).l2_norm() / b.l2_norm().max(1e-300)
}

/// Up to six random admissible terms plus one leading term, on `N_radius`.
pub fn expansion(rng: &mut ChaCha8Rng, class: ProfileClass, radius: f64, points: usize) -> SpinorModeExpansion {
    let g = CylinderGeometry::graded(radius, 4, 5, points).expect("valid geometry");
    let mut e = SpinorModeExpansion::new(g);
    let zero = c64(0.0, 0.0);
    for _ in 0..rng.random_range(1..=6) {
        let k: i64 = rng.random_range(-4..=4);
        let l: i64 = rng.random_range(-5..=5);
        let (up, um) = match class {
            ProfileClass::L2Kernel => (
                if k >= 0 { complex(rng) } else { zero },
                if k <= 0 { complex(rng) } else { zero },
            ),
            ProfileClass::L21Kernel => {
                if k == 0 {
                    continue;
                }
                (
                    if k >= 1 { complex(rng) } else { zero },
                    if k <= -1 { complex(rng) } else { zero },
                )
            }
        };
        e.insert(k, l, up, um, class).expect("admissible term");
    }
    let lead = rng.random_range(-5..=5);
    match class {
        ProfileClass::L2Kernel => e.insert(0, lead, c64(1.0, 0.2), c64(-0.4, 0.3), class),
        ProfileClass::L21Kernel => e.insert(1, lead, c64(0.8, -0.1), zero, class),
    }
    .expect("admissible leading term");
    e
}

/// Random tuple of length `p`; `degenerate` forces `alpha a_p = spouse(a_1)`.
pub fn tuple(rng: &mut ChaCha8Rng, p: usize, degenerate: bool) -> Tuple {
    let mut e: Vec<Pair> = (0..p).map(|_| Pair::new(complex(rng), complex(rng))).collect();
    if degenerate {
        let alpha = complex(rng);
        e[p - 1] = e[0].spouse().scale(c64(1.0, 0.0) / alpha);
    }
    Tuple::new(e).expect("nonempty tuple")
}

/// Random nonzero `V` on `1..=top` with `bracket(A, V, m) = bracket(A-hat, V, m) = 0` for
/// `0 < m <= top - p`, from the null space of the realified system.
pub fn annihilated(a: &Tuple, top: i64, rng: &mut ChaCha8Rng) -> Option<IndexedPairs<f64>> {
    let p = a.len() as i64;
    let hat = a.spouse();
    let n = top as usize;
    let eqs = (top - p) as usize;
    let mut m = DMatrix::<f64>::zeros(4 * n, 4 * n);
    for (block, t) in [a, &hat].into_iter().enumerate() {
        for mm in 1..=eqs {
            let row = 2 * (block * eqs + mm - 1);
            for (i, e) in t.entries().iter().enumerate() {
                let j = mm + i;
                for (comp, coef) in [(0, e.first), (1, e.second)] {
                    let col = 4 * j + 2 * comp;
                    m[(row, col)] += coef.re;
                    m[(row, col + 1)] -= coef.im;
                    m[(row + 1, col)] += coef.im;
                    m[(row + 1, col + 1)] += coef.re;
                }
            }
        }
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t?;
    let s = &svd.singular_values;
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let null = idx.iter().take_while(|&&i| s[i] < 1e-12 * s.max()).count();
    if null == 0 {
        return None;
    }
    let mut x = vec![0.0; 4 * n];
    for &i in &idx[..null] {
        let w = rng.random_range(-1.0..1.0);
        for (k, v) in vt.row(i).iter().enumerate() {
            x[k] += w * v;
        }
    }
    Some(
        (0..n)
            .map(|j| {
                (
                    j as i64 + 1,
                    Pair::new(c64(x[4 * j], x[4 * j + 1]), c64(x[4 * j + 2], x[4 * j + 3])),
                )
            })
            .collect(),
    )
}
