use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (zero, odd ambient, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A subgroup parameter outside its admissible range.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// The closure of a parameter tuple disagrees with the product order formula.
    #[error("order mismatch for {params}: formula gives {formula}, closure has {closure} elements")]
    OrderMismatch {
        params: String,
        formula: u64,
        closure: u64,
    },

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    Size {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("{sub} is not contained in {sup}")]
    Containment { sub: String, sup: String },

    /// An even-order element set containing none of A, B, C.
    #[error("impossible class structure: {0}")]
    Impossible(String),

    #[error("grid error: {0}")]
    Grid(String),

    /// A point where `x·b + d` vanishes; the sign factor is undefined there.
    #[error("boundary point: {0}")]
    Boundary(String),

    #[error("class error: expected {expected}, found {found}")]
    Class { expected: String, found: String },

    #[error("subgroup has no stored direct-product decomposition")]
    Decomposition,

    #[error("character table error: {0}")]
    Table(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("label {label} out of range for {range}")]
    Label { label: String, range: String },

    #[error("unsupported domain: {0}")]
    Unsupported(String),
}
