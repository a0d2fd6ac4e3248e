//! Tab-separated artifact files.
//!
//! Every file starts with one `#key=value key=value ...` header line and is
//! followed by rows in canonical order. Λ is written as `^`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bits::{BitString, SimpleSet};
use crate::chaitin::{KappaBudget, RestrictedComputerTable, WComputer, WRow};
use crate::kengine::{ComplexityTable, HaltingIndex, IndexParams, KEntry};
use crate::theorem::{DefectSurvey, TheoremReport};
use crate::vm::{MachineSpec, ProgramBits};

pub const INDEX_FILE: &str = "index.tsv";
pub const KTABLE_FILE: &str = "ktable.tsv";
pub const KAPPA_FILE: &str = "kappa.tsv";
pub const WTABLE_FILE: &str = "wtable.tsv";
pub const THEOREM_FILE: &str = "theorem.tsv";
pub const SURVEY_FILE: &str = "delta_survey.tsv";

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}: missing artifact (run the earlier pipeline steps first)")]
    Missing(PathBuf),
    #[error("{path}: header mismatch on `{key}`: expected {expected:?}, found {found:?}")]
    HeaderMismatch {
        path: PathBuf,
        key: String,
        expected: String,
        found: Option<String>,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Ordered `key=value` pairs of a header line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Header {
    fields: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    /// Header identifying the machine and build budgets.
    pub fn for_build(machine: &MachineSpec, params: &IndexParams) -> Self {
        Header::new()
            .with("machine_id", &params.machine_id)
            .with("opcode_width", machine.opcode_width)
            .with("L_max", params.max_len)
            .with("T", params.steps)
            .with("delta", params.delta)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse(line: &str) -> Option<Header> {
        let body = line.strip_prefix('#')?;
        let mut fields = Vec::new();
        for tok in body.split_whitespace() {
            let (k, v) = tok.split_once('=')?;
            fields.push((k.to_string(), v.to_string()));
        }
        Some(Header { fields })
    }

    /// Every field of `expected` must be present here with the same value.
    pub fn check(&self, expected: &Header, path: &Path) -> Result<(), ArtifactError> {
        for (k, v) in &expected.fields {
            let found = self.get(k);
            if found != Some(v.as_str()) {
                return Err(ArtifactError::HeaderMismatch {
                    path: path.to_path_buf(),
                    key: k.clone(),
                    expected: v.clone(),
                    found: found.map(str::to_string),
                });
            }
        }
        Ok(())
    }

    pub fn parse_field<T: FromStr>(&self, key: &str, path: &Path) -> Result<T, ArtifactError> {
        self.get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| ArtifactError::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: format!("header field `{key}` missing or malformed"),
            })
    }
}

impl std::fmt::Display for Header {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_char('#')?;
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

struct Writer {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Writer {
    fn create(path: &Path, header: &Header) -> Result<Writer, ArtifactError> {
        let file = File::create(path).map_err(io_err(path))?;
        let mut w = Writer {
            path: path.to_path_buf(),
            out: BufWriter::with_capacity(1 << 20, file),
        };
        w.line(format_args!("{header}"))?;
        Ok(w)
    }

    fn line(&mut self, args: std::fmt::Arguments<'_>) -> Result<(), ArtifactError> {
        self.out
            .write_fmt(args)
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(io_err(&self.path))
    }

    fn finish(mut self) -> Result<(), ArtifactError> {
        self.out.flush().map_err(io_err(&self.path))
    }
}

struct Reader {
    path: PathBuf,
    lines: io::Lines<BufReader<File>>,
    line_no: usize,
    header: Header,
}

impl Reader {
    fn open(path: &Path) -> Result<Reader, ArtifactError> {
        let file = File::open(path).map_err(|e| {
            if e.kind() == io::ErrorKind::NotFound {
                ArtifactError::Missing(path.to_path_buf())
            } else {
                io_err(path)(e)
            }
        })?;
        let mut lines = BufReader::with_capacity(1 << 20, file).lines();
        let first = lines
            .next()
            .transpose()
            .map_err(io_err(path))?
            .unwrap_or_default();
        let header = Header::parse(&first).ok_or_else(|| ArtifactError::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "missing `#` header line".into(),
        })?;
        Ok(Reader {
            path: path.to_path_buf(),
            lines,
            line_no: 1,
            header,
        })
    }

    fn err(&self, msg: impl Into<String>) -> ArtifactError {
        ArtifactError::Parse {
            path: self.path.clone(),
            line: self.line_no,
            msg: msg.into(),
        }
    }

    /// Next data row, skipping further `#` lines.
    fn next_row(&mut self) -> Result<Option<String>, ArtifactError> {
        loop {
            let Some(line) = self.lines.next() else {
                return Ok(None);
            };
            let line = line.map_err(io_err(&self.path))?;
            self.line_no += 1;
            if line.starts_with('#') || line.is_empty() {
                continue;
            }
            return Ok(Some(line));
        }
    }

    fn fields<'a>(&self, line: &'a str, n: usize) -> Result<Vec<&'a str>, ArtifactError> {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != n {
            return Err(self.err(format!("expected {n} fields, found {}", f.len())));
        }
        Ok(f)
    }

    fn bits(&self, tok: &str) -> Result<BitString, ArtifactError> {
        tok.parse().map_err(|e| self.err(format!("{e}")))
    }

    fn program(&self, tok: &str) -> Result<ProgramBits, ArtifactError> {
        ProgramBits::new(self.bits(tok)?).map_err(|e| self.err(format!("{tok}: {e}")))
    }

    fn num<T: FromStr>(&self, tok: &str) -> Result<T, ArtifactError> {
        tok.parse()
            .map_err(|_| self.err(format!("malformed number {tok:?}")))
    }
}

fn token_len(tok: &str) -> usize {
    if tok == crate::bits::EMPTY_TOKEN {
        0
    } else {
        tok.len()
    }
}

pub fn write_index(path: &Path, header: &Header, index: &HaltingIndex) -> Result<(), ArtifactError> {
    let mut w = Writer::create(path, header)?;
    for rec in index.records() {
        let (r, s) = rec.halves();
        w.line(format_args!(
            "{}\t{}\t{}\t{}\t{}",
            rec.program, rec.data, rec.output, r, s
        ))?;
    }
    w.finish()
}

/// Reads the halting index, keeping only rows whose data is a member of
/// `simple` and whose output is at most `max_output_len` bits; these are
/// the rows requirement lists are built from.
pub fn read_index_filtered(
    path: &Path,
    expected: &Header,
    simple: &SimpleSet,
    max_output_len: usize,
) -> Result<HaltingIndex, ArtifactError> {
    let mut rd = Reader::open(path)?;
    rd.header.check(expected, path)?;
    let params = index_params(&rd.header, path)?;
    let mut rows = Vec::new();
    while let Some(line) = rd.next_row()? {
        let f = rd.fields(&line, 5)?;
        if token_len(f[2]) > max_output_len {
            continue;
        }
        let d = rd.bits(f[1])?;
        if !simple.contains(&d) {
            continue;
        }
        let z = rd.bits(f[2])?;
        let (r, s) = crate::bits::unpair(&z);
        if rd.bits(f[3])? != r || rd.bits(f[4])? != s {
            return Err(rd.err("stored halves disagree with the output"));
        }
        rows.push((rd.program(f[0])?, d, z));
    }
    Ok(HaltingIndex::from_rows(params, rows))
}

fn index_params(h: &Header, path: &Path) -> Result<IndexParams, ArtifactError> {
    Ok(IndexParams {
        machine_id: h.parse_field("machine_id", path)?,
        max_len: h.parse_field("L_max", path)?,
        steps: h.parse_field("T", path)?,
        delta: h.parse_field("delta", path)?,
    })
}

pub fn write_ktable(path: &Path, header: &Header, table: &ComplexityTable) -> Result<(), ArtifactError> {
    let mut w = Writer::create(path, header)?;
    for ((x, d), e) in table.entries() {
        w.line(format_args!("{x}\t{d}\t{}\t{}", e.k, e.witness))?;
    }
    w.finish()
}

pub fn read_ktable(path: &Path, expected: &Header) -> Result<ComplexityTable, ArtifactError> {
    let mut rd = Reader::open(path)?;
    rd.header.check(expected, path)?;
    let params = index_params(&rd.header, path)?;
    let mut entries = BTreeMap::new();
    while let Some(line) = rd.next_row()? {
        let f = rd.fields(&line, 4)?;
        let key = (rd.bits(f[0])?, rd.bits(f[1])?);
        let entry = KEntry {
            k: rd.num(f[2])?,
            witness: rd.program(f[3])?,
        };
        if entry.k as usize != entry.witness.len() {
            return Err(rd.err("k differs from the witness length"));
        }
        if entries.insert(key, entry).is_some() {
            return Err(rd.err("duplicate (x, d) entry"));
        }
    }
    Ok(ComplexityTable::from_entries(params, entries))
}

pub fn write_kappa(path: &Path, header: &Header, budget: &KappaBudget) -> Result<(), ArtifactError> {
    let header = header.clone().with("kappa", budget.kappa);
    let mut w = Writer::create(path, &header)?;
    for ((s, d), k) in &budget.per_pair {
        w.line(format_args!("{s}\t{d}\t{k}"))?;
    }
    w.finish()
}

pub fn read_kappa(path: &Path, expected: &Header) -> Result<KappaBudget, ArtifactError> {
    let mut rd = Reader::open(path)?;
    rd.header.check(expected, path)?;
    let kappa = rd.header.parse_field("kappa", path)?;
    let mut per_pair = BTreeMap::new();
    while let Some(line) = rd.next_row()? {
        let f = rd.fields(&line, 3)?;
        per_pair.insert((rd.bits(f[0])?, rd.bits(f[1])?), rd.num(f[2])?);
    }
    if per_pair.values().copied().max().is_some_and(|m: u32| m != kappa) {
        return Err(rd.err("kappa in header is not the maximum of the per-pair values"));
    }
    Ok(KappaBudget { kappa, per_pair })
}

/// Writes the family W_s, s ≠ Λ, one row per codeword.
pub fn write_wtable(path: &Path, header: &Header, w: &WComputer) -> Result<(), ArtifactError> {
    let header = header.clone().with("kappa", w.kappa());
    let mut out = Writer::create(path, &header)?;
    for (s, ws) in w.family() {
        for (d, code, row) in ws.rows() {
            out.line(format_args!(
                "{s}\t{d}\t{code}\t{}\t{}",
                row.result, row.source_program
            ))?;
        }
    }
    out.finish()
}

/// Reads the W family; `expected` should already carry the κ in force.
pub fn read_wtable(
    path: &Path,
    expected: &Header,
) -> Result<BTreeMap<BitString, RestrictedComputerTable>, ArtifactError> {
    let mut rd = Reader::open(path)?;
    rd.header.check(expected, path)?;
    let mut family: BTreeMap<BitString, RestrictedComputerTable> = BTreeMap::new();
    while let Some(line) = rd.next_row()? {
        let f = rd.fields(&line, 5)?;
        let s = rd.bits(f[0])?;
        let d = rd.bits(f[1])?;
        let code = rd.bits(f[2])?;
        let row = WRow {
            result: rd.bits(f[3])?,
            source_program: rd.program(f[4])?,
        };
        let table = family
            .entry(s.clone())
            .or_insert_with(|| RestrictedComputerTable::new(s));
        if table.insert(d, code, row).is_some() {
            return Err(rd.err("duplicate codeword"));
        }
    }
    Ok(family)
}

pub fn write_theorem(path: &Path, header: &Header, report: &TheoremReport) -> Result<(), ArtifactError> {
    let header = header
        .clone()
        .with("kappa", report.params.kappa)
        .with("triples", report.rows.len())
        .with("all_exact", report.all_exact);
    let mut w = Writer::create(path, &header)?;
    for r in &report.rows {
        w.line(format_args!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.alpha, r.gamma, r.d, r.lhs, r.rhs, r.residual
        ))?;
    }
    w.finish()
}

pub fn write_survey(path: &Path, header: &Header, survey: &DefectSurvey) -> Result<(), ArtifactError> {
    let header = header
        .clone()
        .with("finite", survey.finite)
        .with("infinite", survey.infinite);
    let mut w = Writer::create(path, &header)?;
    if let Some((lo, hi)) = &survey.extremes {
        w.line(format_args!(
            "#min={} triple={},{},{} max={} triple={},{},{}",
            lo.delta_value, lo.alpha, lo.gamma, lo.beta, hi.delta_value, hi.alpha, hi.gamma, hi.beta
        ))?;
    }
    for (delta, count) in &survey.histogram {
        w.line(format_args!("{delta}\t{count}"))?;
    }
    w.finish()
}

/// Histogram rows of a survey file.
pub fn read_survey(path: &Path) -> Result<BTreeMap<i64, u64>, ArtifactError> {
    let mut rd = Reader::open(path)?;
    let mut hist = BTreeMap::new();
    while let Some(line) = rd.next_row()? {
        let f = rd.fields(&line, 2)?;
        hist.insert(rd.num(f[0])?, rd.num(f[1])?);
    }
    Ok(hist)
}

/// Header line of an artifact file.
pub fn read_header(path: &Path) -> Result<Header, ArtifactError> {
    Ok(Reader::open(path)?.header)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_roundtrip_and_check() {
        let h = Header::new().with("machine_id", "slp3-v1").with("delta", 8);
        assert_eq!(h.to_string(), "#machine_id=slp3-v1 delta=8");
        let back = Header::parse(&h.to_string()).unwrap();
        assert_eq!(back, h);
        let extended = back.clone().with("kappa", 3);
        assert!(extended.check(&h, Path::new("x")).is_ok());
        let other = Header::new().with("delta", 9);
        assert!(matches!(
            extended.check(&other, Path::new("x")),
            Err(ArtifactError::HeaderMismatch { .. })
        ));
        assert!(Header::parse("no hash").is_none());
    }

    #[test]
    fn missing_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let err = read_ktable(&dir.path().join(KTABLE_FILE), &Header::new()).unwrap_err();
        assert!(matches!(err, ArtifactError::Missing(_)));
    }
}
