mod common;

use common::*;
use fourier_core::{c64, IndexedPairs, Pair, Tuple, C64};
use fredholm_t::*;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn pair(a: f64, b: f64) -> Pair {
    Pair::new(c64(a, 0.0), c64(b, 0.0))
}

fn rand_c(r: &mut ChaCha8Rng) -> C64 {
    c64(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

#[test]
fn nondegenerate_is_unchanged() {
    let a = Tuple::new(vec![pair(1.0, 0.0)]).unwrap();
    let s = squeeze(&a).unwrap();
    assert_eq!(s.b, a);
    assert!(s.steps.is_empty());
    assert_eq!(s.det, c64(-1.0, 0.0));
    assert!(squeeze(&Tuple::new(vec![Pair::zero(); 3]).unwrap()).is_err());
}

#[test]
fn one_elimination_step() {
    let a = Tuple::new(vec![pair(1.0, 0.0), pair(0.0, -1.0)]).unwrap();
    let s = squeeze(&a).unwrap();
    assert_eq!(s.steps, vec![SqueezeStep::Eliminate(c64(1.0, 0.0))]);
    assert!(s.det.norm() >= 1e-10 * s.scale);
    assert_eq!(s.q, 1);
}

/// Random nonzero `V` with `bracket(A, V, m) = bracket(A-hat, V, m) = 0` for `0 < m <= top - p`,
/// supported on `1..=top` (null vector of the realified system).
fn annihilated(a: &Tuple, top: i64, r: &mut ChaCha8Rng) -> IndexedPairs<f64> {
    let p = a.len() as i64;
    let hat = a.spouse();
    let n = top as usize;
    let eqs = (top - p) as usize;
    // complex unknowns: v_j = (x_j, y_j), j = 1..top; realified columns
    let mut m = DMatrix::<f64>::zeros(4 * n, 4 * n);
    for (row_block, t) in [a, &hat].into_iter().enumerate() {
        for mm in 1..=eqs {
            let row = 2 * (row_block * eqs + mm - 1);
            for (i, e) in t.entries().iter().enumerate() {
                let j = mm + i; // v_{m+i+1}, 0-based j
                for (comp, coef) in [(0, e.first), (1, e.second)] {
                    let col = 4 * j + 2 * comp;
                    // coef * (x + i y)
                    m[(row, col)] += coef.re;
                    m[(row, col + 1)] -= coef.im;
                    m[(row + 1, col)] += coef.im;
                    m[(row + 1, col + 1)] += coef.re;
                }
            }
        }
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t.unwrap();
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
    let null = idx.iter().take_while(|&&i| svd.singular_values[i] < 1e-12 * svd.singular_values.max()).count();
    assert!(null > 0);
    let mut x = vec![0.0; 4 * n];
    for &i in &idx[..null] {
        let w = r.random_range(-1.0..1.0);
        for (k, v) in vt.row(i).iter().enumerate() {
            x[k] += w * v;
        }
    }
    (0..n)
        .map(|j| {
            (
                j as i64 + 1,
                Pair::new(c64(x[4 * j], x[4 * j + 1]), c64(x[4 * j + 2], x[4 * j + 3])),
            )
        })
        .collect()
}

fn random_tuple(r: &mut ChaCha8Rng, p: usize, degenerate: bool) -> Tuple {
    let mut e: Vec<Pair> = (0..p).map(|_| Pair::new(rand_c(r), rand_c(r))).collect();
    if degenerate {
        // force alpha a_p = spouse(a_1)
        let alpha = rand_c(r);
        e[p - 1] = e[0].spouse().scale(c64(1.0, 0.0) / alpha);
    }
    Tuple::new(e).unwrap()
}

#[test]
fn randomized_tuples_preserve_annihilation() {
    let mut r = rng(21);
    let mut degenerate_seen = 0;
    for trial in 0..20 {
        let p = r.random_range(2..=5);
        let forced = trial % 3 == 0;
        let a = random_tuple(&mut r, p, forced);
        let s = squeeze(&a).unwrap();
        if !s.steps.is_empty() {
            degenerate_seen += 1;
        }
        assert!(s.det.norm() >= 1e-10 * s.scale, "trial {trial}");
        assert_eq!(s.b.last().det(&s.b_star.last()), s.det);

        let top = 24;
        let v = annihilated(&a, top, &mut r);
        let vn: f64 = v.values().map(|x| x.norm().powi(2)).sum::<f64>().sqrt();
        let hat = a.spouse();
        let worst_a = (1..=top - p as i64)
            .map(|m| bracket(&a, &v, m).norm().max(bracket(&hat, &v, m).norm()))
            .fold(0.0, f64::max);
        assert!(worst_a < 1e-12 * vn);
        let reach = s.rhs_b.max_shift().max(s.rhs_b_star.max_shift()) as i64;
        for m in 1..=top - p as i64 - reach {
            let b = bracket(&s.b, &v, m).norm();
            let bs = bracket(&s.b_star, &v, m).norm();
            assert!(b <= 1e-10 * vn && bs <= 1e-10 * vn, "trial {trial} m {m}: {b:e} {bs:e}");
        }

        // span relation on arbitrary data
        let w: IndexedPairs<f64> = (1..=top).map(|j| (j, Pair::new(rand_c(&mut r), rand_c(&mut r)))).collect();
        let x = |side: Side, m: i64| match side {
            Side::A => bracket(&a, &w, m),
            Side::Hat => bracket(&hat, &w, m),
        };
        for m in 1..=top - p as i64 - reach {
            assert!((bracket(&s.b, &w, m) - s.rhs_b.eval(m, x)).norm() < 1e-10);
            assert!((bracket(&s.b_star, &w, m) - s.rhs_b_star.eval(m, x)).norm() < 1e-10);
        }
    }
    assert!(degenerate_seen >= 5, "{degenerate_seen}");
}
