use svddcap::SvddError;

/// Error reported on a single `error[kind]: message` line.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(SvddError),
    /// Plots need exactly two variables.
    PlotDimension(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::PlotDimension(_) => "plot-dimension",
            CliError::Core(e) => match e.root() {
                SvddError::NotConverged { .. } => "not-converged",
                SvddError::DegenerateModel => "degenerate-model",
                SvddError::EmptyIntersection { .. } => "empty-intersection",
                SvddError::Io(_) => "io",
                SvddError::Parse { .. } => "parse",
                SvddError::DimensionMismatch { .. } => "dimension",
                _ => "input",
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::PlotDimension(_) => 6,
            CliError::Core(e) => match e.root() {
                SvddError::NotConverged { .. } => 3,
                SvddError::DegenerateModel => 4,
                SvddError::EmptyIntersection { .. } => 5,
                _ => 2,
            },
        }
    }

    pub fn message(&self) -> String {
        let text = match self {
            CliError::Usage(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
            CliError::PlotDimension(m) => m.clone(),
        };
        text.replace(['\n', '\r'], " ")
    }
}

impl From<SvddError> for CliError {
    fn from(e: SvddError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(SvddError::Io(e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::usage(format!("csv: {e}"))
    }
}
