//! Experiment configuration and runners behind the command-line front end.
//!
//! Every runner is a pure function of an [`ExperimentConfig`]: the same config
//! produces byte-identical output files.  Runners return a [`RunOutcome`]
//! separating "the computation ran" from "the checked thresholds held", which
//! the binary maps onto exit codes (0 pass, 1 invalid config, 2 check failed).

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fourier::{fourier, fourier_direct, inverse_fourier};
use crate::local_field::{CosetGrid, FieldParams, PAdicRational, Point};
use crate::radon::{radon_forward, radon_inverse, radon_vanishing_check};
use crate::schwartz::TestFunction;
use crate::vladimirov::{eigen_residual, radial_nullspace_check};
use crate::waves::{
    cauchy_convolution, cauchy_direct, cauchy_radon, cauchy_spectral, huygens_check,
    initial_condition_residual, modified_initial_condition_residual, norm_report,
    plane_wave_eval, symbol_degeneracy, wave_residual, CauchyVariant, PlaneWaveSpec,
    SpaceTimeField,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

fn default_p() -> u64 {
    2
}
fn default_n() -> usize {
    1
}
fn default_alpha() -> f64 {
    1.0
}
fn default_big_n() -> i64 {
    1
}
fn default_l() -> i64 {
    1
}
fn default_routes() -> Vec<String> {
    vec![
        "radon".into(),
        "direct".into(),
        "spectral".into(),
        "convolution".into(),
    ]
}
fn default_out() -> PathBuf {
    PathBuf::from(".")
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

/// Everything a runner needs; fully determines the outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_p")]
    pub p: u64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(rename = "N", default = "default_big_n")]
    pub big_n: i64,
    #[serde(default = "default_l")]
    pub l: i64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_routes")]
    pub routes: Vec<String>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            p: default_p(),
            n: default_n(),
            alpha: default_alpha(),
            big_n: default_big_n(),
            l: default_l(),
            seed: 0,
            routes: default_routes(),
            out: default_out(),
            format: default_format(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn params(&self) -> Result<FieldParams> {
        FieldParams::new(self.p)
    }

    fn validate(&self) -> Result<FieldParams> {
        let params = self.params()?;
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.alpha <= 0.0 {
            return Err(Error::NonPositiveAlpha(self.alpha));
        }
        if self.big_n + self.l < 1 {
            return Err(Error::InvalidGrid(self.big_n + self.l));
        }
        for r in &self.routes {
            match r.as_str() {
                "radon" | "direct" | "spectral" | "convolution" => {}
                other => return Err(Error::Config(format!("unknown route '{other}'"))),
            }
        }
        Ok(params)
    }
}

/// What a runner produced: a machine-readable report plus a pass/fail verdict
/// on the thresholds it asserts (if any).
#[derive(Debug)]
pub struct RunOutcome {
    pub passed: bool,
    pub report: serde_json::Value,
    pub files: Vec<PathBuf>,
}

/// Tracks files written during a run and removes them if the run errors, so a
/// failed invocation never leaves partial outputs behind.
struct OutputSet {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl OutputSet {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path.clone());
        Ok(path)
    }

    fn write_json(&mut self, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn cleanup(&self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
    }

    fn into_files(self) -> Vec<PathBuf> {
        let mut s = self;
        std::mem::take(&mut s.files)
    }
}

fn run_guarded(
    dir: &Path,
    body: impl FnOnce(&mut OutputSet) -> Result<(bool, serde_json::Value)>,
) -> Result<RunOutcome> {
    let mut out = OutputSet::new(dir)?;
    match body(&mut out) {
        Ok((passed, report)) => Ok(RunOutcome {
            passed,
            report,
            files: out.into_files(),
        }),
        Err(e) => {
            out.cleanup();
            Err(e)
        }
    }
}

fn csv_bytes(f: impl Fn(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn write_table(out: &mut OutputSet, stem: &str, f: &TestFunction, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let bytes = csv_bytes(|b| f.write_csv(&mut *b))?;
            out.write(&format!("{stem}.csv"), &bytes)?;
        }
        OutputFormat::Json => {
            out.write_json(&format!("{stem}.json"), &serde_json::to_value(f.to_json())?)?;
        }
    }
    Ok(())
}

fn gnuplot_script(out: &mut OutputSet, stem: &str, title: &str, ylabel: &str) -> Result<()> {
    let plt = format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{stem}.png'\n\
         set title '{title}'\n\
         set xlabel 'sample index'\n\
         set ylabel '{ylabel}'\n\
         plot '{stem}.dat' using 1:2 with linespoints title 're', \\\n\
              '{stem}.dat' using 1:3 with linespoints title 'im'\n"
    );
    out.write(&format!("{stem}.plt"), plt.as_bytes())?;
    Ok(())
}

fn gnuplot_data(out: &mut OutputSet, stem: &str, values: &[Complex64]) -> Result<()> {
    let mut dat = String::new();
    for (i, v) in values.iter().enumerate() {
        dat.push_str(&format!("{},{:e},{:e}\n", i, v.re, v.im));
    }
    out.write(&format!("{stem}.dat"), dat.as_bytes())?;
    Ok(())
}

fn spacetime_csv(out: &mut OutputSet, stem: &str, field: &SpaceTimeField) -> Result<()> {
    let bytes = csv_bytes(|b| field.write_csv(&mut *b))?;
    out.write(&format!("{stem}.csv"), &bytes)?;
    Ok(())
}

/// Deterministic target set inside and just outside B_N, seeded by config.
fn standard_targets(params: FieldParams, n: usize, big_n: i64) -> Vec<Point> {
    let mut targets = vec![Point::zero(params, n)];
    for e in [-1i64, 0, big_n, big_n + 1] {
        let mut coords = vec![PAdicRational::from_parts(params, 1.into(), -e)];
        coords.resize(n, PAdicRational::from_integer(params, 1));
        targets.push(Point::new(coords));
    }
    targets
}

// ---------------------------------------------------------------------------
// runners
// ---------------------------------------------------------------------------

pub fn cmd_eigen(config: &ExperimentConfig) -> Result<RunOutcome> {
    let params = config.validate()?;
    let level = config.big_n;
    let alpha = config.alpha;
    run_guarded(&config.out, |out| {
        let window: Vec<i64> = (level - 3..=level + 3).collect();
        let residual = eigen_residual(params, level, alpha, &window)?;
        let window_m = (1 - level + 2).max(3);
        let window_l = level.max(3);
        let nullspace = radial_nullspace_check(params, alpha, level, window_m, window_l)?;
        let passed = residual <= 1e-11 && nullspace.dimension == 1;
        let report = json!({
            "residual_max": residual,
            "level": level,
            "alpha": alpha,
            "p": config.p,
            "nullspace": nullspace,
            "passed": passed,
        });
        out.write_json("eigen_report.json", &report)?;
        Ok((passed, report))
    })
}

pub fn cmd_planewave(config: &ExperimentConfig) -> Result<RunOutcome> {
    let params = config.validate()?;
    run_guarded(&config.out, |out| {
        let profile =
            TestFunction::random(params, config.seed, 1, config.big_n, config.l, false, false)?;
        let mut coords = vec![PAdicRational::one(params)];
        for j in 1..config.n {
            coords.push(PAdicRational::from_integer(params, j as i64));
        }
        let omega = Point::new(coords);
        let spec = PlaneWaveSpec::new(profile, omega)?;
        let points = seeded_spacetime_points(params, config.n, 20, config.seed ^ 0x9e3779b9);
        let residual = wave_residual(&spec, config.alpha, &points)?;
        let samples = plane_wave_eval(&spec, &points);
        match config.format {
            OutputFormat::Csv => {
                let bytes = csv_bytes(|b| samples.write_csv(&mut *b))?;
                out.write("planewave_samples.csv", &bytes)?;
            }
            OutputFormat::Json => {
                let rows: Vec<_> = samples
                    .points
                    .iter()
                    .zip(&samples.values)
                    .map(|(pt, v)| json!({"point": pt.repr(), "re": v.re, "im": v.im}))
                    .collect();
                out.write_json("planewave_samples.json", &json!(rows))?;
            }
        }
        gnuplot_data(out, "planewave", &samples.values)?;
        gnuplot_script(out, "planewave", "plane wave samples", "F(t,x)")?;
        let passed = residual <= 1e-9;
        let report = json!({
            "residual_max": residual,
            "alpha": config.alpha,
            "p": config.p,
            "n": config.n,
            "passed": passed,
        });
        out.write_json("planewave_report.json", &report)?;
        Ok((passed, report))
    })
}

pub fn cmd_radon(config: &ExperimentConfig) -> Result<RunOutcome> {
    let params = config.validate()?;
    run_guarded(&config.out, |out| {
        let phi =
            TestFunction::random(params, config.seed, config.n, config.big_n, config.l, false, false)?;
        write_table(out, "radon_source", &phi, config.format)?;
        let targets = standard_targets(params, config.n, config.big_n);
        let e_max = targets
            .iter()
            .filter_map(|x| x.sup_norm_exponent())
            .max()
            .unwrap_or(config.big_n);
        let m = (config.big_n + config.l).max(config.l + e_max);
        let table = radon_forward(&phi, m)?;
        let bytes = csv_bytes(|b| table.write_csv(&mut *b))?;
        out.write("radon_table.csv", &bytes)?;
        out.write_json("radon_table_header.json", &table.header_json())?;
        let recon = radon_inverse(&table, &targets)?;
        let roundtrip = targets
            .iter()
            .zip(&recon.values)
            .map(|(x, v)| (phi.evaluate(x) - v).norm())
            .fold(0.0, f64::max);
        let vanishing = radon_vanishing_check(&phi, &table);
        let passed = roundtrip <= 1e-9 && vanishing <= 1e-12;
        let report = json!({
            "residual_max": roundtrip,
            "vanishing_leak": vanishing,
            "sphere_resolution": m,
            "p": config.p,
            "n": config.n,
            "passed": passed,
        });
        out.write_json("radon_report.json", &report)?;
        Ok((passed, report))
    })
}

pub fn cmd_cauchy(config: &ExperimentConfig) -> Result<RunOutcome> {
    let params = config.validate()?;
    run_guarded(&config.out, |out| {
        // zero-mean source so every route is admissible
        let phi =
            TestFunction::random(params, config.seed, config.n, config.big_n, config.l, true, false)?;
        write_table(out, "cauchy_source", &phi, config.format)?;
        let t_grid = CosetGrid::new(params, 1, config.big_n + 2, config.l)?;
        let targets = standard_targets(params, config.n, config.big_n);
        let mut fields: Vec<SpaceTimeField> = Vec::new();
        for route in &config.routes {
            let field = match route.as_str() {
                "radon" => cauchy_radon(&phi, CauchyVariant::F2, &t_grid, &targets)?,
                "direct" => cauchy_direct(&phi, &t_grid, &targets)?,
                "spectral" => cauchy_spectral(&phi, &t_grid, &targets)?,
                "convolution" => {
                    if config.n < 2 {
                        continue; // the factorized kernel needs n >= 2
                    }
                    cauchy_convolution(&phi, &t_grid, &targets)?
                }
                _ => unreachable!("validated"),
            };
            spacetime_csv(out, &format!("cauchy_{}", field.route()), &field)?;
            fields.push(field);
        }
        if fields.is_empty() {
            return Err(Error::Config("no applicable routes".into()));
        }
        let mut route_deltas = serde_json::Map::new();
        let mut delta_max = 0.0f64;
        for i in 0..fields.len() {
            for j in (i + 1)..fields.len() {
                let d = fields[i].max_diff(&fields[j])?;
                delta_max = delta_max.max(d);
                route_deltas.insert(
                    format!("{}:{}", fields[i].route(), fields[j].route()),
                    json!(d),
                );
            }
        }
        let f1 = cauchy_radon(&phi, CauchyVariant::F1, &t_grid, &targets)?;
        spacetime_csv(out, "cauchy_radon_f1", &f1)?;
        let ic_f1 = initial_condition_residual(&f1, &phi);
        let ic_f2 = modified_initial_condition_residual(&fields[0], &phi)?;
        let huygens = huygens_check(&phi, &fields[0]);
        // gnuplot: |F2| per t-cell at the first target
        let profile = fields[0].t_profile(0);
        gnuplot_data(out, "cauchy", profile.values())?;
        gnuplot_script(out, "cauchy", "F2 t-section at the first target", "F2(t, x0)")?;
        let passed = delta_max <= 1e-8
            && ic_f1 <= 1e-9
            && ic_f2 <= 1e-9
            && huygens.edge_max <= 1e-10;
        let report = json!({
            "residual_max": ic_f1.max(ic_f2),
            "route_deltas": route_deltas,
            "huygens": {
                "edge_max": huygens.edge_max,
                "constancy_radius": huygens.constancy_radius_exp,
            },
            "initial_condition_f1": ic_f1,
            "modified_initial_condition_f2": ic_f2,
            "p": config.p,
            "n": config.n,
            "passed": passed,
        });
        out.write_json("cauchy_report.json", &report)?;
        Ok((passed, report))
    })
}

pub fn cmd_degeneracy(config: &ExperimentConfig) -> Result<RunOutcome> {
    let params = config.validate()?;
    run_guarded(&config.out, |out| {
        let report = symbol_degeneracy(params, config.n, config.big_n, config.l)?;
        let passed = report.exact_match;
        let value = json!({
            "degeneracy_fraction": report.fraction,
            "degeneracy_fraction_f64": report.fraction_f64,
            "closed_form": report.closed_form,
            "exact_match": report.exact_match,
            "p": config.p,
            "n": config.n,
            "passed": passed,
        });
        out.write_json("degeneracy_report.json", &value)?;
        Ok((passed, value))
    })
}

pub fn cmd_norms(config: &ExperimentConfig) -> Result<RunOutcome> {
    let params = config.validate()?;
    run_guarded(&config.out, |out| {
        let phi =
            TestFunction::random(params, config.seed, config.n, config.big_n, config.l, true, false)?;
        let t_grid = CosetGrid::new(params, 1, config.big_n + 1, config.l)?;
        let kappas: Vec<f64> = if config.n >= 2 {
            let upper = config.n as f64 / (config.n as f64 - 1.0);
            vec![1.0 + 0.25 * (upper - 1.0), 1.0 + 0.5 * (upper - 1.0)]
        } else {
            vec![1.5, 2.0]
        };
        let report = norm_report(&phi, &t_grid, &kappas)?;
        let value = json!({
            "norm_table": report.rows,
            "p": config.p,
            "n": config.n,
        });
        out.write_json("norms_report.json", &value)?;
        // no asserted threshold: the estimates carry no explicit constants
        Ok((true, value))
    })
}

pub fn cmd_fourier_selftest(config: &ExperimentConfig) -> Result<RunOutcome> {
    let params = config.validate()?;
    run_guarded(&config.out, |out| {
        let mut roundtrip_max = 0.0f64;
        let mut plancherel_max = 0.0f64;
        let mut fast_vs_direct = 0.0f64;
        for s in 0..10u64 {
            let f = TestFunction::random(
                params,
                config.seed.wrapping_add(s),
                config.n,
                config.big_n,
                config.l,
                false,
                false,
            )?;
            let g = fourier(&f);
            roundtrip_max = roundtrip_max.max(inverse_fourier(&g).max_diff(&f));
            plancherel_max = plancherel_max
                .max((f.lkappa_norm(2.0)? - g.lkappa_norm(2.0)?).abs());
            fast_vs_direct = fast_vs_direct.max(g.max_diff(&fourier_direct(&f)));
        }
        let passed = roundtrip_max <= 1e-12 && plancherel_max <= 1e-12 && fast_vs_direct <= 1e-11;
        let report = json!({
            "residual_max": roundtrip_max.max(plancherel_max),
            "roundtrip_max": roundtrip_max,
            "plancherel_max": plancherel_max,
            "fast_vs_direct": fast_vs_direct,
            "p": config.p,
            "n": config.n,
            "passed": passed,
        });
        out.write_json("fourier_selftest_report.json", &report)?;
        Ok((passed, report))
    })
}

/// Deterministic (t, x) sample points used by the plane-wave runner.
pub fn seeded_spacetime_points(
    params: FieldParams,
    n: usize,
    count: usize,
    seed: u64,
) -> Vec<(PAdicRational, Point)> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t = PAdicRational::from_parts(
                params,
                num_bigint::BigInt::from(rng.gen_range(-9i64..=9)),
                rng.gen_range(-2i64..=2),
            );
            let x = Point::new(
                (0..n)
                    .map(|_| {
                        PAdicRational::from_parts(
                            params,
                            num_bigint::BigInt::from(rng.gen_range(-9i64..=9)),
                            rng.gen_range(-2i64..=2),
                        )
                    })
                    .collect(),
            );
            (t, x)
        })
        .collect()
}
