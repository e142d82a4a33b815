//! The subcommands. Each builds a [`Table`] from a validated [`RunConfig`].

use crate::filters::{verify_filter_conditions, ConditionConfig};
use crate::fock::WignerMap;
use crate::nfp::{nfp_grid, sweep_grid, GridSpec};
use crate::point::ComplexPoint;
use crate::witness::{first_order_char_test, mandel_q, min_quadrature_variance, polar_grid, scan_width};
use crate::{Error, Result};

use super::config::RunConfig;
use super::output::{Cell, Table};

const PHASES: usize = 180;

pub fn state_info(cfg: &RunConfig) -> Result<Table> {
    let rho = cfg.state.build(&cfg.space()?)?;
    let stats = rho.photon_statistics()?;
    let mut t = Table::new(&["quantity", "value"]);
    let mut row = |k: &str, v: Cell| t.push(vec![Cell::from(k), v]);
    row("state", Cell::Text(cfg.state.to_string()));
    row("dim", Cell::from(cfg.dim));
    row("tail_mass", Cell::from(stats.tail_mass));
    row("mean_photon_number", Cell::from(stats.mean()));
    match mandel_q(&rho) {
        Ok(q) => row("mandel_q", Cell::from(q)),
        Err(Error::Undefined(_)) => row("mandel_q", Cell::from("undefined")),
        Err(e) => return Err(e),
    }
    let (var, phase) = min_quadrature_variance(&rho, PHASES)?;
    row("quadrature_variance_min", Cell::from(var));
    row("quadrature_variance_phase", Cell::from(phase));
    let first = first_order_char_test(&rho, &polar_grid(3.0, 30, 32))?;
    row("char_max_modulus", Cell::from(first.max_modulus));
    row("first_order_witnessed", Cell::from(first.witnessed));
    let map = WignerMap::new(&rho, &cfg.quad)?;
    let grid = GridSpec::square(cfg.grid_extent, cfg.grid)?;
    let (_, min, argmin, _) = sweep_grid(&grid, |a| Ok((map.eval(a)?, 0.0, 0.0, 0)))?;
    row("wigner_min", Cell::from(min));
    row("wigner_argmin_re", Cell::from(argmin.re));
    row("wigner_argmin_im", Cell::from(argmin.im));
    let last = stats.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0);
    for (n, p) in stats.probs.iter().enumerate().take(last + 1) {
        row(&format!("p_{n}"), Cell::from(*p));
    }
    Ok(t)
}

pub fn witness_scan(cfg: &RunConfig) -> Result<Table> {
    let rho = cfg.state.build(&cfg.space()?)?;
    let scan = scan_width(&rho, cfg.alpha(), &cfg.w_grid(), cfg.w_tol)?;
    let mut t = Table::new(&["w", "value", "truncation_bound", "certified"]);
    for (w, r) in &scan.points {
        t.push(vec![
            Cell::from(*w),
            Cell::from(r.value),
            Cell::from(r.truncation_bound),
            Cell::from(r.certified),
        ]);
    }
    t.note("detected", scan.detected());
    t.note("w_star", scan.w_star());
    if let Some(d) = scan.detection {
        t.note("first_negative_w", d.first_negative);
    }
    if let Some((w, v)) = scan.min() {
        t.note("min_w", w);
        t.note("min_value", v);
    }
    Ok(t)
}

pub fn fig2(cfg: &RunConfig) -> Result<Table> {
    let space = cfg.space()?;
    let grid = cfg.w_grid();
    let labels: Vec<String> = cfg.nbars.iter().map(|n| format!("nbar_{n}")).collect();
    let mut columns = vec!["w"];
    columns.extend(labels.iter().map(String::as_str));
    let mut t = Table::new(&columns);
    let scans = cfg
        .nbars
        .iter()
        .map(|&nbar| scan_width(&space.spats(nbar, cfg.eta)?, ComplexPoint::ZERO, &grid, cfg.w_tol))
        .collect::<Result<Vec<_>>>()?;
    for (i, &w) in grid.iter().enumerate() {
        let mut row = vec![Cell::from(w)];
        row.extend(scans.iter().map(|s| Cell::from(s.points[i].1.value)));
        t.push(row);
    }
    t.note("eta", cfg.eta);
    for (label, scan) in labels.iter().zip(&scans) {
        t.note(&format!("{label}_detected"), scan.detected());
        t.note(&format!("{label}_w_star"), scan.w_star());
        if let Some((w, v)) = scan.min() {
            t.note(&format!("{label}_min_w"), w);
            t.note(&format!("{label}_min_value"), v);
        }
    }
    Ok(t)
}

pub fn nfp_grid_cmd(cfg: &RunConfig) -> Result<Table> {
    let rho = cfg.state.build(&cfg.space()?)?;
    let grid = GridSpec::square(cfg.grid_extent, cfg.grid)?;
    let out = nfp_grid(&rho, &cfg.filter.family(), cfg.w, &grid, &cfg.quad)?;
    let mut t = Table::new(&["re_alpha", "im_alpha", "value"]);
    for (i, &im) in out.im_axis.iter().enumerate() {
        for (j, &re) in out.re_axis.iter().enumerate() {
            t.push(vec![Cell::from(re), Cell::from(im), Cell::from(out.values[i][j])]);
        }
    }
    t.note("w", out.w);
    t.note("min", out.min);
    t.note("argmin_re", out.argmin.re);
    t.note("argmin_im", out.argmin.im);
    t.note("radius", out.quad.radius);
    t.note("max_delta", out.quad.max_delta);
    t.note("max_imag_residue", out.quad.max_imag_residue);
    Ok(t)
}

pub fn verify_filter(cfg: &RunConfig) -> Result<Table> {
    let family = cfg.filter.family();
    let report = verify_filter_conditions(&family, &cfg.widths, &ConditionConfig::default())?;
    let mut t = Table::new(&[
        "w",
        "c1_pass",
        "c1_finite_support",
        "c1_decay_slope",
        "c1_tail_ratio",
        "c2_pass",
        "c2_min",
        "c3_pass",
        "c3_origin",
        "c3_limit",
        "c3_monotone",
    ]);
    for r in &report.widths {
        t.push(vec![
            Cell::from(r.w),
            Cell::from(r.c1.pass),
            Cell::from(r.c1.finite_support),
            Cell::from(r.c1.decay_slope),
            Cell::from(r.c1.tail_ratio),
            Cell::from(r.c2.pass),
            Cell::from(r.c2.min_value),
            Cell::from(r.c3.pass),
            Cell::from(r.c3.value_at_origin),
            Cell::from(r.c3.limit),
            Cell::from(r.c3.monotone),
        ]);
    }
    t.note("filter", family.label());
    t.note("normalized", report.normalized);
    t.note("all_pass", report.all_pass());
    Ok(t)
}
