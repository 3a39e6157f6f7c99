use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coding has no entries")]
    EmptyCoding,

    #[error("eventual alphabet has a single letter `{0}`; the generated word is periodic")]
    AllLettersEqual(String),

    #[error("period {period} at index {index} is below 2")]
    InvalidPeriod { index: usize, period: u64 },

    #[error("alphabet exceeds {max} letters")]
    AlphabetTooLarge { max: usize },

    #[error("coding spec: {0}")]
    Parse(String),

    #[error("unknown generator or preset `{0}`")]
    UnknownRule(String),

    #[error("index {index} lies beyond the generator horizon {horizon}")]
    HorizonExceeded { index: usize, horizon: usize },

    #[error("materializing {requested} symbols exceeds the budget of {budget}")]
    BudgetExceeded { requested: String, budget: usize },

    #[error("shift r_{index} = {value} is outside [0, {period})")]
    InvalidShift {
        index: usize,
        value: u64,
        period: u64,
    },

    #[error("word is not a factor of the subshift")]
    WordNotInLanguage,

    #[error("length {len} is below the first length {min} covered by the closed form")]
    OutOfTheoremRange { len: String, min: String },

    #[error("level {level} is below the first admissible level {min}")]
    LevelOutOfRange { level: usize, min: usize },

    #[error("prefix of length {prefix} is too short: {reason}")]
    PrefixTooShort { prefix: usize, reason: String },

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Budget and horizon failures are resource limits rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::HorizonExceeded { .. } | Error::BudgetExceeded { .. } | Error::Overflow(_)
        )
    }
}
