use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Expression text could not be parsed; `offset` is a byte offset.
    Parse { offset: usize, expected: String },
    NotAUnit(String),
    ZeroElement,
    NotDivisible { dividend: String, divisor: String },
    TranscendentalSubstitution { symbol: String, weight: String },
    MissingCoordinate(String),

    EvenDimension(usize),
    ArityMismatch { what: &'static str, expected: usize, found: usize },
    NonUnitFrameScale { index: usize, scale: String },
    BadFrame(String),
    BadMetric(String),
    XiNotUnit(String),
    BadPhiShape(String),
    BadStructure(String),
    UnknownSymbol(String),
    StructureOnlyFrame,

    NotKenmotsu,
    NonConstantK(String),
    NonConstantParameter { name: &'static str, value: String },
    ZeroK,
    UnknownLambda,
    NonConstantScalarCurvature(String),
    NotNowhereVanishing,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { offset, expected } => {
                write!(f, "parse error at offset {offset}: expected {expected}")
            }
            Error::NotAUnit(e) => write!(f, "`{e}` is not a unit of the coefficient algebra"),
            Error::ZeroElement => f.write_str("division by the zero element"),
            Error::NotDivisible { dividend, divisor } => {
                write!(f, "`{dividend}` is not divisible by `{divisor}` in the coefficient algebra")
            }
            Error::TranscendentalSubstitution { symbol, weight } => write!(
                f,
                "cannot substitute a nonzero value for `{symbol}` inside exp({weight}*{symbol})"
            ),
            Error::MissingCoordinate(s) => write!(f, "no value supplied for `{s}`"),
            Error::EvenDimension(d) => write!(f, "dimension {d} is even; expected 2n+1"),
            Error::ArityMismatch {
                what,
                expected,
                found,
            } => write!(f, "expected {expected} {what}, found {found}"),
            Error::NonUnitFrameScale { index, scale } => {
                write!(f, "frame scale `{scale}` of field {index} is not invertible")
            }
            Error::BadFrame(m) => write!(f, "invalid frame: {m}"),
            Error::BadMetric(m) => write!(f, "invalid metric: {m}"),
            Error::XiNotUnit(v) => write!(f, "eta(xi) = {v}, expected 1"),
            Error::BadPhiShape(m) => write!(f, "invalid phi: {m}"),
            Error::BadStructure(m) => write!(f, "invalid structure functions: {m}"),
            Error::UnknownSymbol(s) => write!(f, "symbol `{s}` is not a coordinate"),
            Error::StructureOnlyFrame => f.write_str(
                "frame given by structure functions only; cannot differentiate non-constant coefficients",
            ),
            Error::NotKenmotsu => f.write_str("manifold did not pass the Kenmotsu verification"),
            Error::NonConstantK(k) => {
                write!(f, "k = `{k}` must be constant on the manifold for this mode")
            }
            Error::NonConstantParameter { name, value } => {
                write!(f, "{name} = `{value}` must be constant on the manifold")
            }
            Error::ZeroK => f.write_str("k must be nonzero"),
            Error::UnknownLambda => f.write_str("exact mode requires a value for lambda"),
            Error::NonConstantScalarCurvature(r) => {
                write!(f, "scalar curvature `{r}` is not constant")
            }
            Error::NotNowhereVanishing => f.write_str(
                "vector field has no unit or nonzero constant component; cannot certify it is nowhere vanishing",
            ),
        }
    }
}

impl core::error::Error for Error {}
