use serde::Serialize;

/// Error reported on stderr as one JSON line, with the process exit code.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub error: &'static str,
    pub code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_HURWITZ: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl Failure {
    pub fn new(error: &'static str, code: i32, message: impl Into<String>) -> Self {
        Self {
            error,
            code,
            message: message.into(),
            path: None,
            line: None,
            column: None,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", EXIT_INPUT, message)
    }

    pub fn io(path: &str, err: &std::io::Error) -> Self {
        Self::new("io", EXIT_INPUT, err.to_string()).at(path)
    }

    pub fn at(mut self, path: &str) -> Self {
        self.path = Some(path.to_string());
        self
    }

    pub fn malformed(path: &str, err: &serde_json::Error) -> Self {
        let mut f = Self::new("malformed_input", EXIT_INPUT, err.to_string()).at(path);
        if err.line() > 0 {
            f.line = Some(err.line());
            f.column = Some(err.column());
        }
        f
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| format!("{{\"error\":\"{}\",\"code\":{}}}", self.error, self.code))
    }
}

impl From<dwellcut::Error> for Failure {
    fn from(e: dwellcut::Error) -> Self {
        use dwellcut::Error as E;
        let (kind, code) = match &e {
            E::NotHurwitz { .. } => ("not_hurwitz", EXIT_NOT_HURWITZ),
            E::InvalidMatrix(_) => ("invalid_matrix", EXIT_INPUT),
            E::InvalidArgument(_) => ("invalid_argument", EXIT_INPUT),
            E::Unsupported(_) => ("unsupported", EXIT_INPUT),
            E::InvalidSystem(_) => ("invalid_system", EXIT_INPUT),
            E::InvalidLaw { .. } => ("invalid_law", EXIT_INPUT),
            E::EigenFailure => ("eigen_failure", EXIT_NUMERICAL),
            E::DegenerateBasis { .. } => ("degenerate_basis", EXIT_NUMERICAL),
            E::NoUpperBracket { .. } => ("no_upper_bracket", EXIT_NUMERICAL),
            E::Lp(_) => ("lp_failure", EXIT_NUMERICAL),
        };
        Self::new(kind, code, e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;
