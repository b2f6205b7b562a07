//! Text formats for instances and solutions.
//!
//! All indices are 1-based in files and 0-based in memory. Whitespace of any
//! kind separates tokens, so line breaks may fall anywhere.
//!
//! * Row-wise covering (`scp-row`): `m n`, then `n` costs, then for every row
//!   a count followed by the covering columns.
//! * Column-wise (`scp-col`, `spp`): `m n`, then for every column its cost, a
//!   count and the covered rows.
//! * Native (`bip`): `m n`, then `m` pairs `SENSE b` with `SENSE` one of
//!   `L`, `G`, `E`, then the columns as in the column-wise format.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use fourflip_core::{Instance, InstanceError, Sense};

/// Position of a token, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEof(&'static str),
    #[error("expected {expected}, found {token:?}")]
    BadToken { expected: &'static str, token: String },
    #[error("{what} index {index} outside 1..={max}")]
    IndexOutOfRange { what: &'static str, index: u64, max: usize },
    #[error("{what} {index} listed twice in the same list")]
    Duplicate { what: &'static str, index: usize },
    #[error("row {0} has no covering column")]
    EmptyRow(usize),
    #[error("column {0} covers no row")]
    EmptyColumn(usize),
    #[error("unknown sense tag {0:?}, expected L, G or E")]
    UnknownSense(String),
    #[error("right-hand side must be a nonnegative integer, found {0}")]
    NegativeRhs(i64),
    #[error("right-hand side {0} is too large")]
    RhsTooLarge(i64),
    #[error("header declares an empty instance ({m} rows, {n} columns)")]
    EmptyShape { m: usize, n: usize },
    #[error("unexpected trailing token {0:?}")]
    Trailing(String),
    #[error(transparent)]
    Instance(InstanceError),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{loc}: {kind}")]
pub struct ParseError {
    pub loc: Location,
    pub kind: ParseErrorKind,
}

/// Whitespace tokenizer that remembers where each token started.
struct Tokens<'a> {
    text: &'a [u8],
    pos: usize,
    line: usize,
    line_start: usize,
    last: Location,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a [u8]) -> Self {
        Tokens {
            text,
            pos: 0,
            line: 1,
            line_start: 0,
            last: Location { line: 1, column: 1 },
        }
    }

    fn here(&self) -> Location {
        Location {
            line: self.line,
            column: self.pos - self.line_start + 1,
        }
    }

    fn next(&mut self) -> Option<&'a [u8]> {
        while let Some(&b) = self.text.get(self.pos) {
            if !b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
            if b == b'\n' {
                self.line += 1;
                self.line_start = self.pos;
            }
        }
        if self.pos >= self.text.len() {
            self.last = self.here();
            return None;
        }
        self.last = self.here();
        let start = self.pos;
        while self.text.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        Some(&self.text[start..self.pos])
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { loc: self.last, kind }
    }

    fn word(&mut self, expected: &'static str) -> Result<&'a str, ParseError> {
        let tok = self.next().ok_or_else(|| self.err(ParseErrorKind::UnexpectedEof(expected)))?;
        std::str::from_utf8(tok).map_err(|_| {
            self.err(ParseErrorKind::BadToken {
                expected,
                token: String::from_utf8_lossy(tok).into_owned(),
            })
        })
    }

    fn parsed<T: FromStr>(&mut self, expected: &'static str) -> Result<T, ParseError> {
        let w = self.word(expected)?;
        w.parse().map_err(|_| {
            self.err(ParseErrorKind::BadToken {
                expected,
                token: w.to_owned(),
            })
        })
    }

    fn count(&mut self, expected: &'static str) -> Result<usize, ParseError> {
        self.parsed(expected)
    }

    fn cost(&mut self) -> Result<f64, ParseError> {
        let w = self.word("a cost")?;
        match w.parse::<f64>() {
            Ok(c) if c.is_finite() => Ok(c),
            _ => Err(self.err(ParseErrorKind::BadToken {
                expected: "a finite cost",
                token: w.to_owned(),
            })),
        }
    }

    /// Reads a 1-based index in `1..=max` and returns it 0-based.
    fn index(&mut self, what: &'static str, max: usize) -> Result<usize, ParseError> {
        let v: u64 = self.parsed(what)?;
        if v == 0 || v > max as u64 {
            return Err(self.err(ParseErrorKind::IndexOutOfRange { what, index: v, max }));
        }
        Ok(v as usize - 1)
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.next() {
            None => Ok(()),
            Some(tok) => Err(self.err(ParseErrorKind::Trailing(String::from_utf8_lossy(tok).into_owned()))),
        }
    }
}

fn header(tok: &mut Tokens<'_>) -> Result<(usize, usize, Location), ParseError> {
    let m = tok.count("the row count")?;
    let loc = tok.last;
    let n = tok.count("the column count")?;
    if m == 0 || n == 0 {
        return Err(ParseError {
            loc,
            kind: ParseErrorKind::EmptyShape { m, n },
        });
    }
    Ok((m, n, loc))
}

/// Reads `n` columns in the `cost count rows...` layout. Every column is
/// returned sorted; a repeated row is an error.
fn read_columns(tok: &mut Tokens<'_>, m: usize, n: usize) -> Result<(Vec<f64>, Vec<Vec<usize>>), ParseError> {
    let mut costs = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    let mut mark = vec![usize::MAX; m];
    for j in 0..n {
        costs.push(tok.cost()?);
        let len = tok.count("a column length")?;
        if len == 0 {
            return Err(tok.err(ParseErrorKind::EmptyColumn(j + 1)));
        }
        let mut rows = Vec::with_capacity(len.min(m));
        for _ in 0..len {
            let i = tok.index("row", m)?;
            if mark[i] == j {
                return Err(tok.err(ParseErrorKind::Duplicate { what: "row", index: i + 1 }));
            }
            mark[i] = j;
            rows.push(i);
        }
        rows.sort_unstable();
        columns.push(rows);
    }
    Ok((costs, columns))
}

fn build(
    senses: Vec<Sense>,
    rhs: Vec<u32>,
    costs: Vec<f64>,
    columns: Vec<Vec<usize>>,
    header_loc: Location,
) -> Result<Instance, ParseError> {
    Instance::from_columns(senses, rhs, costs, columns).map_err(|e| {
        let kind = match e {
            InstanceError::EmptyRow { row, .. } => ParseErrorKind::EmptyRow(row + 1),
            InstanceError::EmptyColumn { col } => ParseErrorKind::EmptyColumn(col + 1),
            other => ParseErrorKind::Instance(other),
        };
        ParseError { loc: header_loc, kind }
    })
}

/// Row-wise set covering: every row is `>= 1`.
pub fn parse_rowwise_scp(text: &[u8]) -> Result<Instance, ParseError> {
    let mut tok = Tokens::new(text);
    let (m, n, hloc) = header(&mut tok)?;
    let costs = (0..n).map(|_| tok.cost()).collect::<Result<Vec<_>, _>>()?;
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut mark = vec![usize::MAX; n];
    for i in 0..m {
        let len = tok.count("a row length")?;
        if len == 0 {
            return Err(tok.err(ParseErrorKind::EmptyRow(i + 1)));
        }
        for _ in 0..len {
            let j = tok.index("column", n)?;
            if mark[j] == i {
                return Err(tok.err(ParseErrorKind::Duplicate {
                    what: "column",
                    index: j + 1,
                }));
            }
            mark[j] = i;
            columns[j].push(i);
        }
    }
    tok.finish()?;
    build(vec![Sense::Ge; m], vec![1; m], costs, columns, hloc)
}

/// Column-wise covering or partitioning, depending on `kind`.
pub fn parse_columnwise(text: &[u8], kind: ProblemKind) -> Result<Instance, ParseError> {
    let mut tok = Tokens::new(text);
    let (m, n, hloc) = header(&mut tok)?;
    let (costs, columns) = read_columns(&mut tok, m, n)?;
    tok.finish()?;
    let sense = match kind {
        ProblemKind::Cover => Sense::Ge,
        ProblemKind::Partition => Sense::Eq,
    };
    build(vec![sense; m], vec![1; m], costs, columns, hloc)
}

/// Native format with per-row senses and right-hand sides.
pub fn parse_native_bip(text: &[u8]) -> Result<Instance, ParseError> {
    let mut tok = Tokens::new(text);
    let (m, n, hloc) = header(&mut tok)?;
    let mut senses = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for _ in 0..m {
        let tag = tok.word("a sense tag")?;
        senses.push(match tag {
            "L" => Sense::Le,
            "G" => Sense::Ge,
            "E" => Sense::Eq,
            other => return Err(tok.err(ParseErrorKind::UnknownSense(other.to_owned()))),
        });
        let b: i64 = tok.parsed("an integer right-hand side")?;
        if b < 0 {
            return Err(tok.err(ParseErrorKind::NegativeRhs(b)));
        }
        rhs.push(u32::try_from(b).map_err(|_| tok.err(ParseErrorKind::RhsTooLarge(b)))?);
    }
    let (costs, columns) = read_columns(&mut tok, m, n)?;
    tok.finish()?;
    build(senses, rhs, costs, columns, hloc)
}

/// Problem class forced by a column-wise file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Cover,
    Partition,
}

/// Instance file layouts accepted by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Row-wise set covering.
    ScpRow,
    /// Column-wise set covering.
    ScpCol,
    /// Column-wise set partitioning.
    Spp,
    /// Native format with mixed senses.
    Bip,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::ScpRow => "scp-row",
            Format::ScpCol => "scp-col",
            Format::Spp => "spp",
            Format::Bip => "bip",
        }
    }

    pub fn parse(self, text: &[u8]) -> Result<Instance, ParseError> {
        match self {
            Format::ScpRow => parse_rowwise_scp(text),
            Format::ScpCol => parse_columnwise(text, ProblemKind::Cover),
            Format::Spp => parse_columnwise(text, ProblemKind::Partition),
            Format::Bip => parse_native_bip(text),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown format {0:?}, expected scp-row, scp-col, spp or bip")]
pub struct UnknownFormat(pub String);

impl FromStr for Format {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scp-row" => Ok(Format::ScpRow),
            "scp-col" => Ok(Format::ScpCol),
            "spp" => Ok(Format::Spp),
            "bip" => Ok(Format::Bip),
            _ => Err(UnknownFormat(s.to_owned())),
        }
    }
}

/// Writes `inst` in the native format. Costs use the shortest decimal that
/// reads back to the same value.
pub fn write_native_bip(inst: &Instance) -> String {
    let mut out = String::with_capacity(16 * (inst.num_rows() + inst.num_cols()) + 8 * inst.nnz());
    let _ = writeln!(out, "{} {}", inst.num_rows(), inst.num_cols());
    for i in 0..inst.num_rows() {
        let _ = writeln!(out, "{} {}", inst.sense(i), inst.rhs(i));
    }
    for j in 0..inst.num_cols() {
        let col = inst.col(j);
        let _ = write!(out, "{} {}", inst.cost(j), col.len());
        for &i in col {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}

/// Solution file: the objective on the first line, then the sorted 1-based
/// members on the second.
pub fn write_solution(objective: f64, members: &[usize]) -> String {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    let mut out = format!("{objective}\n");
    let body: Vec<String> = sorted.iter().map(|j| (j + 1).to_string()).collect();
    out.push_str(&body.join(" "));
    out.push('\n');
    out
}

/// Reads a solution file back into the objective and 0-based members.
pub fn parse_solution(text: &[u8], n: usize) -> Result<(f64, Vec<usize>), ParseError> {
    let mut tok = Tokens::new(text);
    let w = tok.word("an objective")?;
    let objective = w.parse::<f64>().map_err(|_| {
        tok.err(ParseErrorKind::BadToken {
            expected: "an objective",
            token: w.to_owned(),
        })
    })?;
    let mut members = Vec::new();
    let mut mark = vec![false; n];
    while let Some(raw) = tok.next() {
        let word = std::str::from_utf8(raw).unwrap_or("");
        let v: u64 = word.parse().map_err(|_| {
            tok.err(ParseErrorKind::BadToken {
                expected: "a column index",
                token: String::from_utf8_lossy(raw).into_owned(),
            })
        })?;
        if v == 0 || v > n as u64 {
            return Err(tok.err(ParseErrorKind::IndexOutOfRange {
                what: "column",
                index: v,
                max: n,
            }));
        }
        let j = v as usize - 1;
        if mark[j] {
            return Err(tok.err(ParseErrorKind::Duplicate { what: "column", index: v as usize }));
        }
        mark[j] = true;
        members.push(j);
    }
    Ok((objective, members))
}
