use std::fmt;

/// Process exit status. The numeric values are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Input = 2,
    Data = 3,
    Schema = 4,
    Internal = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Input,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Data,
            message: message.into(),
        }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Schema,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Internal,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<dbp_core::features::FeatureError> for CliError {
    fn from(e: dbp_core::features::FeatureError) -> Self {
        use dbp_core::features::FeatureError as E;
        match e {
            E::Schema(_) => CliError::schema(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<dbp_core::svm::SvmError> for CliError {
    fn from(e: dbp_core::svm::SvmError) -> Self {
        use dbp_core::svm::SvmError as E;
        match e {
            E::Schema(_) | E::Dimension { .. } => CliError::schema(e.to_string()),
            E::InvalidConfig(_) | E::ModelFile(_) => CliError::input(e.to_string()),
            E::SingleClass | E::MissingLabel(_) => CliError::data(e.to_string()),
        }
    }
}

impl From<dbp_core::ccnn::CcnnError> for CliError {
    fn from(e: dbp_core::ccnn::CcnnError) -> Self {
        use dbp_core::ccnn::CcnnError as E;
        match e {
            E::Schema(_) | E::Dimension { .. } => CliError::schema(e.to_string()),
            E::InvalidConfig(_) | E::ModelFile(_) => CliError::input(e.to_string()),
            E::SingleClass | E::MissingLabel(_) => CliError::data(e.to_string()),
        }
    }
}

impl From<dbp_core::evaluation::EvaluationError> for CliError {
    fn from(e: dbp_core::evaluation::EvaluationError) -> Self {
        use dbp_core::evaluation::EvaluationError as E;
        match e {
            E::InvalidConfig(_) => CliError::input(e.to_string()),
            E::Feature(f) => f.into(),
            _ => CliError::data(e.to_string()),
        }
    }
}
