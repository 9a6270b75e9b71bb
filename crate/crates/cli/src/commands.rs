use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use svddcap::datagen::ShapeConfig;
use svddcap::{
    capability_with_model, generate as generate_window, median_distance_bandwidth, score_batch,
    train_detailed, CapabilityReport, HyperParams, InlierGrid, ModelFile, MonteCarloConfig,
    ProcessWindow, ShapeKind, ShapeSpec, SolverOptions, SpecLimits, Standardizer, SvddError,
};

use crate::error::CliError;
use crate::{CapabilityArgs, GenerateArgs, Hyper, PlotArgs, ScoreArgs, TrainArgs};

const DEFAULT_GENERATE_N: usize = 500;

type CliResult<T> = Result<T, CliError>;

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => match std::io::stdout().lock().write_all(bytes) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            other => other?,
        },
    }
    Ok(())
}

/// Fits the optional z-score transform and trains.
fn fit(
    window: &ProcessWindow,
    hyper: &Hyper,
    announce: impl Fn(String),
) -> CliResult<TrainOutcome> {
    let standardizer = hyper.standardize.then(|| Standardizer::fit(window));
    let train_window = match &standardizer {
        Some(t) => t.apply_window(window)?,
        None => window.clone(),
    };
    let bandwidth = match hyper.bandwidth {
        Some(s) => s,
        None => {
            let s = median_distance_bandwidth(train_window.observations());
            announce(format!("bandwidth s = {s} (heuristic)"));
            s
        }
    };
    let hp = HyperParams::new(bandwidth, hyper.outlier_fraction)?;
    let (model, report) = train_detailed(&train_window, hp, &SolverOptions::default())?;
    Ok(TrainOutcome {
        file: ModelFile {
            model,
            standardizer,
        },
        iterations: report.iterations,
        kkt_violation: report.kkt_violation,
    })
}

struct TrainOutcome {
    file: ModelFile,
    iterations: usize,
    kkt_violation: f64,
}

/// Reorders limits by column name when the names match, otherwise pairs
/// them up by position.
fn align_spec(spec: SpecLimits, columns: &[String]) -> CliResult<SpecLimits> {
    if spec.q() != columns.len() {
        return Err(SvddError::DimensionMismatch {
            expected: columns.len(),
            found: spec.q(),
        }
        .into());
    }
    if columns.iter().all(|c| spec.names().contains(c)) {
        Ok(spec.aligned_to(columns)?)
    } else {
        Ok(spec)
    }
}

pub fn train(a: TrainArgs) -> CliResult<()> {
    let window = ProcessWindow::read_csv_path(&a.data)?;
    if a.hyper.bandwidth.is_none() {
        HyperParams::new(1.0, a.hyper.outlier_fraction)?;
    }
    let out = fit(&window, &a.hyper, |m| println!("{m}"))?;
    out.file.save(&a.output)?;
    let m = &out.file.model;
    let boundary = m.boundary_mask().iter().filter(|&&b| b).count();
    println!("n = {}", m.n_train());
    println!("q = {}", m.q());
    println!("bandwidth s = {}", m.hyperparams().bandwidth());
    println!(
        "outlier fraction f = {}",
        m.hyperparams().outlier_fraction()
    );
    println!("penalty C = {}", m.penalty());
    println!(
        "support vectors = {} ({boundary} on the boundary)",
        m.n_support()
    );
    println!("R2 = {}", m.threshold_r2());
    println!("sum alpha = {}", m.alphas().iter().sum::<f64>());
    println!(
        "converged = yes ({} iterations, kkt violation {:e})",
        out.iterations, out.kkt_violation
    );
    println!(
        "standardized = {}",
        if out.file.standardizer.is_some() {
            "yes"
        } else {
            "no"
        }
    );
    println!("model = {}", a.output.display());
    Ok(())
}

/// Picks the model's columns out of `window` by name, or all columns by
/// position when the names differ.
fn model_columns(window: &ProcessWindow, names: &[String]) -> CliResult<Array2<f64>> {
    let header = window.column_names();
    let picked: Option<Vec<usize>> = names
        .iter()
        .map(|n| header.iter().position(|h| h == n))
        .collect();
    match picked {
        Some(idx) => Ok(window.observations().select(ndarray::Axis(1), &idx)),
        None if header.len() == names.len() => Ok(window.observations().to_owned()),
        None => Err(SvddError::DimensionMismatch {
            expected: names.len(),
            found: header.len(),
        }
        .into()),
    }
}

pub fn score(a: ScoreArgs) -> CliResult<()> {
    let file = ModelFile::load(&a.model)?;
    let text = fs::read_to_string(&a.data)?;
    let window = ProcessWindow::read_csv(text.as_bytes())?;
    let mut data = model_columns(&window, file.model.column_names())?;
    if let Some(t) = &file.standardizer {
        data = t.apply_matrix(data.view())?;
    }
    let results = score_batch(&file.model, data.view())?;

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = reader.headers()?.clone();
    header.push_field("dist2");
    header.push_field("outlier");
    writer.write_record(&header)?;
    let mut rows = 0;
    for (record, r) in reader.records().zip(&results) {
        let mut record = record?;
        record.push_field(&r.dist2.to_string());
        record.push_field(if r.is_outlier { "1" } else { "0" });
        writer.write_record(&record)?;
        rows += 1;
    }
    if rows != results.len() {
        return Err(CliError::usage(format!(
            "{}: parsed {} rows but scored {}",
            a.data.display(),
            rows,
            results.len()
        )));
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::usage(format!("csv: {e}")))?;
    write_output(a.output.as_deref(), &bytes)
}

pub fn capability(a: CapabilityArgs) -> CliResult<()> {
    let window = ProcessWindow::read_csv_path(&a.data)?;
    let spec = align_spec(SpecLimits::read_path(&a.spec)?, window.column_names())?;
    let file = match &a.model {
        Some(path) => ModelFile::load(path)?,
        None => fit(&window, &a.hyper, |m| eprintln!("{m}"))?.file,
    };
    let (window, spec) = match &file.standardizer {
        Some(t) => (t.apply_window(&window)?, t.apply_spec(&spec)?),
        None => (window, spec),
    };
    let partitions = a.partitions.unwrap_or_else(rayon::current_num_threads);
    let mc = MonteCarloConfig::with_partitions(a.n_es, a.seed, partitions)?;
    let vector = capability_with_model(&window, &file.model, &spec, &mc)?;
    let report = CapabilityReport::with_fingerprint(&vector, file.fingerprint(), &mc);
    write_output(a.output.as_deref(), report.render().as_bytes())
}

pub fn generate(a: GenerateArgs) -> CliResult<()> {
    let kind: ShapeKind = a.shape.parse()?;
    let base = match &a.config {
        Some(path) => ShapeConfig::from_toml(&fs::read_to_string(path)?)?,
        None => ShapeConfig::default(),
    };
    if let Some(named) = &base.shape {
        if named != kind.name() {
            return Err(CliError::usage(format!(
                "config describes shape '{named}' but '{}' was requested",
                kind.name()
            )));
        }
    }
    let config = base.merged(ShapeConfig {
        shape: None,
        n: a.n,
        seed: a.seed,
        center: a.center,
        second_center: a.second_center,
        radius: a.radius,
        inner_radius: a.inner_radius,
        outer_radius: a.outer_radius,
        extent: a.extent,
        orientation: a.orientation,
        half_widths: a.half_widths,
    });
    let shape = config.to_shape(kind)?;
    let spec = ShapeSpec::new(
        shape,
        config.n.unwrap_or(DEFAULT_GENERATE_N),
        config.seed.unwrap_or(0),
    );
    let window = generate_window(&spec)?;
    let mut bytes = Vec::new();
    window.write_csv(&mut bytes)?;
    write_output(a.output.as_deref(), &bytes)
}

pub fn plot(a: PlotArgs) -> CliResult<()> {
    let file = ModelFile::load(&a.model)?;
    let q = file.model.q();
    if q != 2 {
        return Err(CliError::PlotDimension(format!(
            "plots need exactly two variables, model has q = {q}"
        )));
    }
    let spec = SpecLimits::read_path(&a.spec)?;
    if spec.q() != 2 {
        return Err(CliError::PlotDimension(format!(
            "plots need exactly two variables, spec has q = {}",
            spec.q()
        )));
    }
    let spec = align_spec(spec, file.model.column_names())?;
    let grid = InlierGrid::score(
        &file.model,
        &spec,
        a.grid_resolution,
        file.standardizer.as_ref(),
    )?;
    let points = match &a.data {
        Some(path) => Some(model_columns(
            &ProcessWindow::read_csv_path(path)?,
            file.model.column_names(),
        )?),
        None => None,
    };
    let svg = grid.to_svg(points.as_ref().map(|p| p.view()))?;
    write_output(a.output.as_deref(), svg.as_bytes())?;
    if let Some(path) = &a.output {
        println!(
            "inlier cells = {} of {} ({}), components = {}",
            grid.inlier_cells(),
            a.grid_resolution * a.grid_resolution,
            grid.inlier_fraction(),
            grid.component_count()
        );
        println!("plot = {}", path.display());
    }
    Ok(())
}
