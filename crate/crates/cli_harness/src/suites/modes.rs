use crate::config::ModesConfig;
use crate::report::{Check, SuiteOutput, Table};
use crate::row;
use cylinder_spinors::{relative_residual, CylinderGeometry, CylinderError, ProfileClass, SpinorModeExpansion};
use fourier_core::c64;

/// Residual of one L^2 mode with both admissible amplitudes set.
fn residual(g: &CylinderGeometry, k: i64, l: i64, amp: f64) -> Result<Option<f64>, CylinderError> {
    let up = if k >= 0 { c64(amp, 0.3 * amp) } else { c64(0.0, 0.0) };
    let um = if k <= 0 { c64(amp, -0.2 * amp) } else { c64(0.0, 0.0) };
    let mut e = SpinorModeExpansion::new(g.clone());
    e.insert(k, l, up, um, ProfileClass::L2Kernel)?;
    if e.is_empty() {
        return Ok(None);
    }
    let (a, b) = e.radial_samples(k, l, g.grid());
    relative_residual(k, l as f64, &a, &b, g.grid()).map(Some)
}

/// Dirac residuals of the Bessel/power modes for `|k| <= k_max`, `|l| <= l_max`, on the
/// configured grid and on the grid with half the spacing.
pub fn run(cfg: &ModesConfig) -> SuiteOutput {
    let mut out = SuiteOutput::default();
    let mut table = Table::new("modes.csv", &["k", "l", "residual", "residual_refined"]);
    let grids = CylinderGeometry::graded(cfg.radius, cfg.k_max, cfg.l_max, cfg.points)
        .and_then(|g| g.refined().map(|f| (g, f)));
    let (g, fine) = match grids {
        Ok(x) => x,
        Err(e) => {
            out.checks.push(Check::failed("harmonic_residual", e.to_string()));
            return out;
        }
    };
    let (km, lm) = (cfg.k_max as i64, cfg.l_max as i64);
    let (mut coarse, mut refined): (f64, f64) = (0.0, 0.0);
    let mut empty = true;
    for k in -km..=km {
        for l in -lm..=lm {
            match (residual(&g, k, l, cfg.amplitude), residual(&fine, k, l, cfg.amplitude)) {
                (Ok(Some(a)), Ok(Some(b))) => {
                    empty = false;
                    coarse = coarse.max(a);
                    refined = refined.max(b);
                    table.rows.push(row![k, l, a, b]);
                }
                (Ok(None), Ok(None)) => {}
                (Err(e), _) | (_, Err(e)) => {
                    out.checks.push(Check::failed("harmonic_residual", format!("mode ({k}, {l}): {e}")));
                    return out;
                }
                _ => unreachable!("emptiness does not depend on the grid"),
            }
        }
    }
    if empty {
        out.checks.push(Check::at_most("harmonic_residual", 0.0, 1e-8, "empty expansion: no norms"));
        out.tables.push(table);
        return out;
    }
    out.checks.push(Check::at_most(
        "harmonic_residual",
        coarse,
        1e-8,
        format!("worst relative residual on {} points", cfg.points),
    ));
    out.checks.push(Check::at_least(
        "residual_refinement",
        coarse / refined,
        8.0,
        format!("worst residual ratio, {} vs {} points", cfg.points, fine.grid().len()),
    ));
    out.tables.push(table);
    out
}
