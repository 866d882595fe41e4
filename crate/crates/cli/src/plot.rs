//! SVG figures: tiling diagram, `|Phi|` heatmap, spectrum and rigidity curve.

use std::path::{Path, PathBuf};

use flowembed_core::phi::PhiFunction;
use flowembed_core::signals::{default_step, periodogram};
use flowembed_core::tiling::IntervalTiling;
use flowembed_core::Complex64;
use plotters::prelude::*;

use crate::error::CliError;

const SIZE: (u32, u32) = (960, 400);

fn plot_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Cells of the valid range within `[lo, hi]` as alternating bars with site ticks.
pub fn tiling_diagram(tiling: &IntervalTiling, span: (f64, f64), path: &Path) -> Result<(), CliError> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_error(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption("interval tiling", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(30)
        .build_cartesian_2d(span.0..span.1, 0.0..1.0)
        .map_err(|e| plot_error(path, e))?;
    chart.configure_mesh().disable_y_mesh().disable_y_axis().draw().map_err(|e| plot_error(path, e))?;
    let cells: Vec<_> = tiling
        .valid_cells()
        .into_iter()
        .filter(|(_, c)| c.r > span.0 && c.l < span.1)
        .collect();
    chart
        .draw_series(cells.iter().enumerate().map(|(i, (_, c))| {
            let color = if i % 2 == 0 { BLUE.mix(0.35) } else { GREEN.mix(0.35) };
            Rectangle::new([(c.l, 0.3), (c.r, 0.7)], color.filled())
        }))
        .map_err(|e| plot_error(path, e))?;
    chart
        .draw_series(cells.iter().map(|(n, _)| PathElement::new(vec![(*n as f64, 0.2), (*n as f64, 0.8)], BLACK)))
        .map_err(|e| plot_error(path, e))?;
    root.present().map_err(|e| plot_error(path, e))
}

/// `log10 |Phi|` on `[lo, hi] x [-1, 1]`.
pub fn phi_heatmap(phi: &PhiFunction, span: (f64, f64), path: &Path) -> Result<(), CliError> {
    let (nx, ny) = (480usize, 80usize);
    let dx = (span.1 - span.0) / nx as f64;
    let dy = 2.0 / ny as f64;
    let points: Vec<Complex64> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| Complex64::new(span.0 + (i as f64 + 0.5) * dx, -1.0 + (j as f64 + 0.5) * dy)))
        .collect();
    let values: Vec<f64> = phi.eval_many(&points)?.iter().map(|v| v.norm().max(1e-12).log10()).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_error(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption("log10 |Phi|", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(30)
        .y_label_area_size(40)
        .build_cartesian_2d(span.0..span.1, -1.0..1.0)
        .map_err(|e| plot_error(path, e))?;
    chart.configure_mesh().disable_mesh().draw().map_err(|e| plot_error(path, e))?;
    chart
        .draw_series(points.iter().zip(&values).map(|(z, v)| {
            let u = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
            let color = ViridisRGB::get_color(u);
            Rectangle::new([(z.re - dx / 2.0, z.im - dy / 2.0), (z.re + dx / 2.0, z.im + dy / 2.0)], color.filled())
        }))
        .map_err(|e| plot_error(path, e))?;
    root.present().map_err(|e| plot_error(path, e))
}

/// Periodogram of `Phi` sampled on `[-T, T]`, with the claimed band shaded.
pub fn spectrum(phi: &PhiFunction, window: f64, path: &Path) -> Result<(), CliError> {
    let band = phi.band();
    let f = phi.sample(window, default_step(band))?;
    let power = periodogram(&f);
    let peak = power.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-300);
    let data: Vec<(f64, f64)> = power.iter().map(|(xi, p)| (*xi, (p / peak).max(1e-16).log10())).collect();
    let xmax = 1.0 / (2.0 * f.sample_step());

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_error(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption("normalised periodogram (log10)", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(30)
        .y_label_area_size(40)
        .build_cartesian_2d(-xmax..xmax, -16.0..0.5)
        .map_err(|e| plot_error(path, e))?;
    chart.configure_mesh().draw().map_err(|e| plot_error(path, e))?;
    chart
        .draw_series(std::iter::once(Rectangle::new([(band.lo, -16.0), (band.hi, 0.5)], RED.mix(0.15).filled())))
        .map_err(|e| plot_error(path, e))?;
    chart.draw_series(LineSeries::new(data, &BLUE)).map_err(|e| plot_error(path, e))?;
    root.present().map_err(|e| plot_error(path, e))
}

/// `r -> sup |Phi_y(. + r) - Phi_x|` over the window.
pub fn rigidity_curve(curve: &[(f64, f64)], excluded: f64, path: &Path) -> Result<(), CliError> {
    let top = curve.iter().map(|p| p.1).fold(0.0, f64::max) * 1.05;
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_error(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption("shift distance", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(30)
        .y_label_area_size(50)
        .build_cartesian_2d(-0.5..0.5, 0.0..top.max(1e-12))
        .map_err(|e| plot_error(path, e))?;
    chart.configure_mesh().draw().map_err(|e| plot_error(path, e))?;
    chart
        .draw_series(std::iter::once(Rectangle::new([(-excluded, 0.0), (excluded, top)], BLACK.mix(0.1).filled())))
        .map_err(|e| plot_error(path, e))?;
    chart.draw_series(LineSeries::new(curve.iter().copied(), &BLUE)).map_err(|e| plot_error(path, e))?;
    root.present().map_err(|e| plot_error(path, e))
}

/// Sup distance on the window grid for each shift.
pub fn shift_distances(
    x: &PhiFunction,
    y: &PhiFunction,
    window: (f64, f64),
    shifts: &[f64],
) -> Result<Vec<(f64, f64)>, CliError> {
    let step = flowembed_core::phi::RIGIDITY_SAMPLE_STEP;
    let n = ((window.1 - window.0) / step).round() as usize;
    let grid: Vec<Complex64> = (0..=n).map(|i| Complex64::new(window.0 + i as f64 * step, 0.0)).collect();
    let base = x.eval_many(&grid)?;
    shifts
        .iter()
        .map(|r| {
            let moved: Vec<Complex64> = grid.iter().map(|z| z + r).collect();
            let vals = y.eval_many(&moved)?;
            Ok((*r, vals.iter().zip(&base).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)))
        })
        .collect()
}

pub fn figure_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.svg"))
}
