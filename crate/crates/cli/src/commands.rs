use std::path::{Path, PathBuf};

use holonomy::evolve::{self, RowStatus};
use holonomy::phase::{curvature, dynamical_phase, gauge_perturb, running_phase, CurvatureMethod};
use holonomy::tracking::{lift_closed, monodromy_group, monodromy_of};
use holonomy::{geometric_phase, track, CurveSpec, Error, MatrixFamily, SpectralPath, C64};
use log::{info, warn};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, Format, JobConfig, MethodsConfig};
use crate::report::{write_csv, write_json, CsvRecord, CurvatureRecord, ReportRow, SweepRecord};
use crate::svg::{heatmap, line_plot, Series};
use crate::{CliError, Options};

/// Relative gap below which a loop is reported as passing close to a degeneracy.
pub const EP_WARN_GAP: f64 = 1e-3;

struct Job {
    cfg: JobConfig,
    family: Box<dyn MatrixFamily>,
    curves: Vec<CurveSpec>,
    samples: usize,
    out: PathBuf,
    format: Format,
    plot: bool,
}

impl Job {
    fn new(opts: &Options) -> Result<Self, CliError> {
        let mut cfg = JobConfig::load(&opts.config)?;
        if let Some(n) = opts.samples {
            if n < crate::config::MIN_SAMPLES {
                return Err(CliError::Config(format!("samples must be at least {}, got {n}", crate::config::MIN_SAMPLES)));
            }
            cfg.samples = n;
        }
        if !cfg.allows(opts.command) {
            return Err(CliError::Config(format!("command {:?} is not enabled in the config", opts.command)));
        }
        let family = cfg.build_family()?;
        let curves = cfg.build_curves()?;
        let out = opts.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&out)?;
        Ok(Self {
            samples: cfg.samples,
            format: opts.format.or(cfg.output.format).unwrap_or_default(),
            plot: opts.plot || cfg.output.plot,
            cfg,
            family,
            curves,
            out,
        })
    }

    fn need_curves(&self) -> Result<(), CliError> {
        if self.curves.is_empty() {
            return Err(CliError::Config("at least one [[curve]] is required".into()));
        }
        Ok(())
    }

    fn write<R: CsvRecord + Serialize>(&self, stem: &str, rows: &[R]) -> Result<PathBuf, CliError> {
        let path = match self.format {
            Format::Csv => self.out.join(format!("{stem}.csv")),
            Format::Json => self.out.join(format!("{stem}.json")),
        };
        match self.format {
            Format::Csv => write_csv(&path, rows)?,
            Format::Json => write_json(&path, rows)?,
        }
        info!("wrote {}", path.display());
        Ok(path)
    }

    fn write_svg(&self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        std::fs::write(&path, body)?;
        info!("wrote {}", path.display());
        Ok(())
    }
}

pub fn run(opts: &Options) -> Result<(), CliError> {
    let job = Job::new(opts)?;
    match opts.command {
        Command::Analyze => analyze(&job),
        Command::Phase => phase(&job),
        Command::Curvature => curvature_grid(&job),
        Command::Sweep => sweep(&job),
    }
}

fn warn_if_close(curve: usize, path: &SpectralPath) {
    let gap = path.min_relative_gap();
    if gap < EP_WARN_GAP {
        warn!("curve {curve} passes close to a degeneracy (min relative gap {gap:.3e})");
        println!("warning: curve {curve} passes close to a degeneracy (min relative gap {gap:.3e})");
    }
}

fn analyze(job: &Job) -> Result<(), CliError> {
    job.need_curves()?;
    let f = &*job.family;
    let paths: Vec<SpectralPath> =
        job.curves.par_iter().map(|c| track(f, c, job.samples)).collect::<Result<_, _>>()?;
    let labels = job.cfg.labels.resolve(f.dim())?;
    let mut rows = Vec::new();
    let mut sigmas = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        warn_if_close(i, path);
        let m = monodromy_of(path)?;
        sigmas.push(m.sigma.to_string());
        for &l in &labels {
            rows.push(ReportRow {
                command: "analyze".into(),
                curve: i,
                label: l,
                monodromy: m.sigma.to_string(),
                traversals: m.periods[l],
                delta_re: None,
                delta_im: None,
                gamma_raw: None,
                gamma_mod_2pi: None,
                gamma_im: None,
                holonomy_abs: None,
                refinement_depth: path.refinement_depth(),
                min_gap: path.min_relative_gap(),
                gauge_deviation: None,
            });
        }
    }
    let order = match monodromy_group(f, &job.curves, job.samples) {
        Ok(g) => Some(g.order()),
        Err(Error::NoSharedBasePoint) => None,
        Err(e) => return Err(e.into()),
    };
    let order = order.map_or("n/a (loops do not share a base point)".to_string(), |n| n.to_string());
    if let [only] = sigmas.as_slice() {
        println!("sigma = {only}, |H| = {order}");
    } else {
        for (i, s) in sigmas.iter().enumerate() {
            println!("curve {i}: sigma = {s}");
        }
        println!("|H| = {order}");
    }
    for r in &rows {
        println!("  curve {} label {}: period {}", r.curve, r.label, r.traversals);
    }
    job.write("report", &rows)?;
    Ok(())
}

/// Per-label stream so the self-test does not depend on scheduling.
fn gauge_rng(seed: u64, curve: usize, label: usize) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ ((curve as u64) << 32) ^ label as u64)
}

fn gauge_deviation(path: &SpectralPath, label: usize, rng: &mut impl Rng) -> Result<f64, CliError> {
    let h0 = geometric_phase(path, label)?.holonomy_factor;
    let ks: Vec<Vec<C64>> = (0..path.len())
        .map(|_| (0..path.dim()).map(|_| C64::from_polar(rng.gen_range(-2.0f64..2.0).exp(), rng.gen_range(-3.0..3.0))).collect())
        .collect();
    let h1 = geometric_phase(&gauge_perturb(path, &ks)?, label)?.holonomy_factor;
    Ok((h1 - h0).norm() / h0.norm())
}

struct LabelPhase {
    row: ReportRow,
    running: Vec<(f64, C64)>,
}

fn phase(job: &Job) -> Result<(), CliError> {
    job.need_curves()?;
    let f = &*job.family;
    let labels = job.cfg.labels.resolve(f.dim())?;
    let mut rows = Vec::new();
    let mut eigen_series = Vec::new();
    let mut running_series = Vec::new();
    for (i, curve) in job.curves.iter().enumerate() {
        let base = track(f, curve, job.samples)?;
        warn_if_close(i, &base);
        let m = monodromy_of(&base)?;
        let results: Vec<LabelPhase> = labels
            .par_iter()
            .map(|&l| -> Result<LabelPhase, CliError> {
                let lifted = lift_closed(curve, l, &m)?;
                let k = lifted.traversals();
                let path = if k == 1 { base.clone() } else { track(f, &lifted, job.samples * k)? };
                let g = geometric_phase(&path, l)?;
                let delta = dynamical_phase(&path, l);
                let gauge = match job.cfg.seed {
                    Some(seed) => Some(gauge_deviation(&path, l, &mut gauge_rng(seed, i, l))?),
                    None => None,
                };
                Ok(LabelPhase {
                    row: ReportRow {
                        command: "phase".into(),
                        curve: i,
                        label: l,
                        monodromy: m.sigma.to_string(),
                        traversals: k,
                        delta_re: Some(delta.re),
                        delta_im: Some(delta.im),
                        gamma_raw: Some(g.raw()),
                        gamma_mod_2pi: Some(g.wrapped()),
                        gamma_im: Some(g.imag()),
                        holonomy_abs: Some(g.holonomy_factor.norm()),
                        refinement_depth: path.refinement_depth(),
                        min_gap: path.min_relative_gap(),
                        gauge_deviation: gauge,
                    },
                    running: if job.plot { running_phase(&path, l) } else { vec![] },
                })
            })
            .collect::<Result<_, _>>()?;
        for r in results {
            println!(
                "curve {} label {}: sigma = {}, k = {}, gamma = {:.10} (mod 2pi {:.10}), Im gamma = {:.3e}, |e^(i gamma)| = {:.10}",
                i,
                r.row.label,
                r.row.monodromy,
                r.row.traversals,
                r.row.gamma_raw.unwrap_or_default(),
                r.row.gamma_mod_2pi.unwrap_or_default(),
                r.row.gamma_im.unwrap_or_default(),
                r.row.holonomy_abs.unwrap_or_default()
            );
            if job.plot {
                running_series.push(Series {
                    name: format!("curve {i}, label {}", r.row.label),
                    points: r.running.iter().map(|&(t, g)| (t, g.re)).collect(),
                });
            }
            rows.push(r.row);
        }
        if job.plot {
            for l in 0..f.dim() {
                eigen_series.push(Series {
                    name: format!("curve {i}, label {l}"),
                    points: base.branch_energies(l).iter().map(|e| (e.re, e.im)).collect(),
                });
            }
        }
    }
    job.write("report", &rows)?;
    if job.plot {
        job.write_svg("eigencurves.svg", &line_plot("Eigenvalue trajectories", "Re E", "Im E", &eigen_series))?;
        job.write_svg("phase_running.svg", &line_plot("Running geometric phase", "t", "Re gamma(t)", &running_series))?;
    }
    Ok(())
}

fn linspace((a, b, n): (f64, f64, usize)) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn curvature_grid(job: &Job) -> Result<(), CliError> {
    let g = job
        .cfg
        .curvature
        .as_ref()
        .ok_or_else(|| CliError::Config("curvature needs a [curvature] grid".into()))?;
    let f = &*job.family;
    let labels = job.cfg.labels.resolve(f.dim())?;
    let (xs, ys) = (linspace(g.x), linspace(g.y));
    let base = g.base.clone().unwrap_or_else(|| vec![0.0; f.param_dim()]);
    let [ax, ay] = g.axes;
    let mut cells: Vec<(usize, f64, f64)> = Vec::with_capacity(labels.len() * xs.len() * ys.len());
    for &l in &labels {
        for &y in &ys {
            cells.extend(xs.iter().map(|&x| (l, x, y)));
        }
    }
    let records: Vec<CurvatureRecord> = cells
        .par_iter()
        .map(|&(l, x, y)| {
            let mut p = base.clone();
            p[ax] = x;
            p[ay] = y;
            let eval = |m: CurvatureMethod| curvature(f, &p, l, None, m).map(|s| s.components[ax][ay]);
            let (main, ed) = match g.methods {
                MethodsConfig::Sos => (eval(CurvatureMethod::SumOverStates), None),
                MethodsConfig::Ed => (eval(CurvatureMethod::ExteriorDerivative), None),
                MethodsConfig::Both => {
                    (eval(CurvatureMethod::SumOverStates), Some(eval(CurvatureMethod::ExteriorDerivative)))
                }
            };
            let masked = CurvatureRecord {
                label: l,
                x,
                y,
                masked: true,
                f_re: None,
                f_im: None,
                f_ed_re: None,
                f_ed_im: None,
                disagreement: None,
            };
            match (main, ed) {
                (Ok(v), None) => CurvatureRecord { masked: false, f_re: Some(v.re), f_im: Some(v.im), ..masked },
                (Ok(v), Some(Ok(w))) => CurvatureRecord {
                    masked: false,
                    f_re: Some(v.re),
                    f_im: Some(v.im),
                    f_ed_re: Some(w.re),
                    f_ed_im: Some(w.im),
                    disagreement: Some((v - w).norm()),
                    ..masked
                },
                (Err(e), _) | (_, Some(Err(e))) => {
                    log::debug!("masked ({x}, {y}) label {l}: {e}");
                    masked
                }
            }
        })
        .collect();
    let n_masked = records.iter().filter(|r| r.masked).count();
    println!("{} grid values, {n_masked} masked", records.len());
    if n_masked > 0 {
        warn!("{n_masked} curvature grid points masked near degeneracies");
    }
    if n_masked == records.len() && !records.is_empty() {
        return Err(CliError::AllMasked);
    }
    job.write("curvature", &records)?;
    if job.plot {
        if let Some(&l) = labels.first() {
            let vals: Vec<Option<f64>> = records.iter().filter(|r| r.label == l).map(|r| r.f_re).collect();
            job.write_svg("curvature.svg", &heatmap(&format!("Re F (label {l})"), &xs, &ys, &vals))?;
        }
    }
    Ok(())
}

fn sweep(job: &Job) -> Result<(), CliError> {
    let s = job.cfg.sweep.as_ref().ok_or_else(|| CliError::Config("sweep needs a [sweep] section".into()))?;
    job.need_curves()?;
    let f = &*job.family;
    let labels = job.cfg.labels.resolve(f.dim())?;
    if labels.is_empty() {
        warn!("no labels selected; nothing to sweep");
        println!("warning: no labels selected; nothing to sweep");
        return Ok(());
    }
    let mut records = Vec::new();
    for (i, curve) in job.curves.iter().enumerate() {
        let m = monodromy_of(&track(f, curve, job.samples)?)?;
        for &l in &labels {
            let lifted = lift_closed(curve, l, &m)?;
            let n = job.samples * lifted.traversals();
            for row in evolve::sweep(f, &lifted, l, &s.durations, s.rel_tol, n)? {
                let status = match &row.status {
                    RowStatus::Ok => "ok".to_string(),
                    RowStatus::NonAdiabatic => "non-adiabatic".to_string(),
                    RowStatus::Failed(e) => format!("failed: {e}"),
                };
                println!(
                    "curve {i} label {l} T = {:e}: error {}, fidelity {}, {status}",
                    row.duration,
                    row.error.map_or("-".into(), |e| format!("{e:.3e}")),
                    row.fidelity.map_or("-".into(), |x| format!("{x:.4}"))
                );
                records.push(SweepRecord {
                    curve: i,
                    label: l,
                    duration: row.duration,
                    gamma_exact_re: row.gamma_exact.map(|g| g.re),
                    gamma_exact_im: row.gamma_exact.map(|g| g.im),
                    gamma_discrete_re: row.gamma_discrete.re,
                    gamma_discrete_im: row.gamma_discrete.im,
                    error: row.error,
                    fidelity: row.fidelity,
                    status,
                });
            }
        }
    }
    job.write("report", &records)?;
    Ok(())
}

/// Output path of the main report for `format` under `dir`.
pub fn report_path(dir: &Path, format: Format) -> PathBuf {
    dir.join(match format {
        Format::Csv => "report.csv",
        Format::Json => "report.json",
    })
}
