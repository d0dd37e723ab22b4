use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate doc_id `{0}`")]
    DuplicateDocId(String),
    #[error("document `{0}` has an empty author_id")]
    EmptyAuthor(String),
    #[error("self-pair edge on author `{0}`")]
    SelfPair(String),
    #[error("edge endpoint `{0}` is not a corpus author")]
    UnknownAuthor(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
    #[error("row {0} has zero degree")]
    ZeroDegree(usize),
    #[error("{0} mask selects no nodes")]
    EmptyMask(&'static str),
    #[error("invalid label mask: {0}")]
    InvalidMask(String),
    #[error("class {} has {count} members, too few to stratify", class_name(*.class))]
    ClassTooSmall { class: usize, count: usize },
    #[error("training labels contain fewer than two classes")]
    SingleClass,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("node {0} has no neighbors")]
    IsolatedNode(usize),
    #[error("unknown author `{0}`")]
    NoSuchAuthor(String),
    #[error("missing artifact: {0}")]
    MissingArtifact(&'static str),
}

fn class_name(i: usize) -> &'static str {
    crate::corpus::Class::from_index(i).map_or("?", crate::corpus::Class::as_str)
}

impl Error {
    /// True for failures of the numeric pipeline itself rather than of its
    /// inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonFinite(_) | Error::ZeroDegree(_))
    }
}
