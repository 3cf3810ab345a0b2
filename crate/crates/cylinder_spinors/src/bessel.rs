use crate::CylinderError;

fn is_half_integer(p: f64) -> bool {
    let two_p = 2.0 * p;
    (two_p - two_p.round()).abs() < 1e-12
}

/// Gamma at integers and half-integers, by recurrence from 1 and sqrt(pi).
pub fn gamma_half(x: f64) -> f64 {
    let two_x = (2.0 * x).round() as i64;
    if two_x % 2 == 0 {
        let n = two_x / 2;
        if n <= 0 {
            return f64::INFINITY;
        }
        (1..n).fold(1.0, |acc, j| acc * j as f64)
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut y = 0.5;
        while y < x - 0.25 {
            g *= y;
            y += 1.0;
        }
        while y > x + 0.25 {
            y -= 1.0;
            g /= y;
        }
        g
    }
}

/// Modified Bessel function of the first kind for integer or half-integer order.
///
/// Power series `sum (x/2)^{2m+p} / (m! Gamma(m+p+1))`, stopped once a term drops
/// below 1e-16 of the partial sum.
pub fn bessel_i(p: f64, x: f64) -> Result<f64, CylinderError> {
    if !is_half_integer(p) {
        return Err(CylinderError::Order(p));
    }
    if !(x >= 0.0) {
        return Err(CylinderError::Argument(x));
    }
    if x > 700.0 {
        return Err(CylinderError::Overflow(x));
    }
    let p = if p < 0.0 && (p - p.round()).abs() < 1e-12 { -p } else { p };
    if x == 0.0 {
        return Ok(if p == 0.0 {
            1.0
        } else if p > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half.powf(p) / gamma_half(p + 1.0);
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + p));
        sum += term;
        if m > half && term.abs() < 1e-16 * sum.abs() {
            break;
        }
        if m > 2000.0 {
            break;
        }
    }
    Ok(sum)
}

/// `|l|^{-p} I_p(|l| r)`; behaves like `r^p / (2^p Gamma(p+1))` as r -> 0.
pub fn frak_i(p: f64, l: i64, r: f64) -> Result<f64, CylinderError> {
    if l == 0 {
        return Err(CylinderError::ZeroFrequency);
    }
    if !(r > 0.0) {
        return Err(CylinderError::Argument(r));
    }
    let lam = l.unsigned_abs() as f64;
    Ok(lam.powf(-p) * bessel_i(p, lam * r)?)
}
