//! Stream files: delimited text and the attribute-relation (ARFF) header format.
//!
//! Rows are parsed one at a time. Delimited labels come from an explicit class list or
//! must be non-negative integers. In ARFF files the class is the last attribute; nominal
//! values map to indices in declaration order, for the class and for any other nominal
//! attribute.

use std::fs::File;
use std::io::{BufRead, BufReader, Lines};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::types::LabeledInstance;

#[derive(Debug, Clone, PartialEq)]
pub struct DelimitedOptions {
    pub delimiter: u8,
    /// Zero-based label column; `None` means the last one.
    pub label_column: Option<usize>,
    pub has_header: bool,
    /// Class tokens in index order. Without it labels must be integers.
    pub classes: Option<Vec<String>>,
}

impl Default for DelimitedOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            label_column: None,
            has_header: false,
            classes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FileFormat {
    Delimited(DelimitedOptions),
    Arff,
}

impl FileFormat {
    /// `.arff` files use the header format, anything else comma-separated text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("arff") => FileFormat::Arff,
            _ => FileFormat::Delimited(DelimitedOptions::default()),
        }
    }
}

enum Source {
    Delimited {
        rows: csv::StringRecordsIntoIter<File>,
        options: DelimitedOptions,
    },
    Arff {
        lines: Lines<BufReader<File>>,
        line: usize,
        /// Per attribute: nominal values, or `None` for numeric.
        attributes: Vec<Option<Vec<String>>>,
    },
}

pub struct StreamFileReader {
    source: Source,
    dim: Option<usize>,
    classes: Option<usize>,
    t: u64,
    done: bool,
}

impl std::fmt::Debug for StreamFileReader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StreamFileReader")
            .field("dim", &self.dim)
            .field("classes", &self.classes)
            .field("position", &self.t)
            .finish_non_exhaustive()
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from(path),
        source,
    }
}

impl StreamFileReader {
    pub fn open(path: impl AsRef<Path>, format: FileFormat) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| io_error(path, e))?;
        match format {
            FileFormat::Delimited(options) => {
                let rows = csv::ReaderBuilder::new()
                    .delimiter(options.delimiter)
                    .has_headers(options.has_header)
                    .comment(Some(b'#'))
                    .flexible(true)
                    .trim(csv::Trim::All)
                    .from_reader(file)
                    .into_records();
                let classes = options.classes.as_ref().map(Vec::len);
                Ok(Self {
                    source: Source::Delimited { rows, options },
                    dim: None,
                    classes,
                    t: 0,
                    done: false,
                })
            }
            FileFormat::Arff => {
                let mut lines = BufReader::new(file).lines();
                let mut line = 0;
                let mut attributes = Vec::new();
                loop {
                    let Some(text) = lines.next() else {
                        return Err(Error::Parse {
                            line,
                            message: "missing @data section".into(),
                        });
                    };
                    line += 1;
                    let text = text.map_err(|e| io_error(path, e))?;
                    let trimmed = text.trim();
                    if trimmed.is_empty() || trimmed.starts_with('%') {
                        continue;
                    }
                    let lower = trimmed.to_ascii_lowercase();
                    if lower.starts_with("@relation") {
                        continue;
                    }
                    if lower.starts_with("@data") {
                        break;
                    }
                    if lower.starts_with("@attribute") {
                        attributes.push(parse_attribute(&trimmed["@attribute".len()..], line)?);
                        continue;
                    }
                    return Err(Error::Parse {
                        line,
                        message: format!("unexpected header line `{trimmed}`"),
                    });
                }
                let Some(Some(class_values)) = attributes.last() else {
                    return Err(Error::Parse {
                        line,
                        message: "the last attribute must be a nominal class".into(),
                    });
                };
                let classes = class_values.len();
                Ok(Self {
                    dim: Some(attributes.len() - 1),
                    classes: Some(classes),
                    source: Source::Arff {
                        lines,
                        line,
                        attributes,
                    },
                    t: 0,
                    done: false,
                })
            }
        }
    }

    /// Known from the header, or after the first delimited row.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    /// Known from the header or the class list.
    pub fn classes(&self) -> Option<usize> {
        self.classes
    }

    fn next_delimited(&mut self) -> Option<Result<LabeledInstance>> {
        let Source::Delimited { rows, options } = &mut self.source else {
            unreachable!()
        };
        let record = match rows.next()? {
            Ok(r) => r,
            Err(e) => return Some(Err(e.into())),
        };
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<&str> = record.iter().collect();
        if fields.len() == 1 && fields[0].is_empty() {
            return self.next_delimited();
        }
        let expected = self.dim.map(|d| d + 1);
        if let Some(n) = expected {
            if fields.len() != n {
                return Some(Err(Error::Parse {
                    line,
                    message: format!("expected {n} fields, found {}", fields.len()),
                }));
            }
        } else if fields.len() < 2 {
            return Some(Err(Error::Parse {
                line,
                message: "a row needs at least one feature and a label".into(),
            }));
        }
        let label_at = match options.label_column {
            Some(c) if c < fields.len() => c,
            Some(c) => {
                return Some(Err(Error::Parse {
                    line,
                    message: format!("label column {c} beyond {} fields", fields.len()),
                }))
            }
            None => fields.len() - 1,
        };
        let token = fields[label_at];
        let label = match &options.classes {
            Some(classes) => match classes.iter().position(|c| c == token) {
                Some(i) => i,
                None => {
                    return Some(Err(Error::UnknownClass {
                        line,
                        token: token.to_string(),
                    }))
                }
            },
            None => match token.parse::<usize>() {
                Ok(v) => v,
                Err(_) => {
                    return Some(Err(Error::UnknownClass {
                        line,
                        token: token.to_string(),
                    }))
                }
            },
        };
        let mut features = Vec::with_capacity(fields.len() - 1);
        for (i, f) in fields.iter().enumerate() {
            if i == label_at {
                continue;
            }
            match parse_number(f, line) {
                Ok(v) => features.push(v),
                Err(e) => return Some(Err(e)),
            }
        }
        self.dim.get_or_insert(features.len());
        let t = self.t;
        self.t += 1;
        Some(Ok(LabeledInstance::new(features, t, label)))
    }

    fn next_arff(&mut self) -> Option<Result<LabeledInstance>> {
        let Source::Arff {
            lines,
            line,
            attributes,
        } = &mut self.source
        else {
            unreachable!()
        };
        let text = loop {
            let text = match lines.next()? {
                Ok(t) => t,
                Err(e) => {
                    return Some(Err(Error::Parse {
                        line: *line + 1,
                        message: e.to_string(),
                    }))
                }
            };
            *line += 1;
            let trimmed = text.trim();
            if !(trimmed.is_empty() || trimmed.starts_with('%')) {
                break trimmed.to_string();
            }
        };
        let line = *line;
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != attributes.len() {
            return Some(Err(Error::Parse {
                line,
                message: format!(
                    "expected {} fields, found {}",
                    attributes.len(),
                    fields.len()
                ),
            }));
        }
        let last = attributes.len() - 1;
        let mut features = Vec::with_capacity(last);
        let mut label = 0;
        for (i, (field, attr)) in fields.iter().zip(attributes.iter()).enumerate() {
            let field = field.trim_matches(|c| c == '\'' || c == '"');
            let value = match attr {
                Some(values) => match values.iter().position(|v| v == field) {
                    Some(k) => k,
                    None if i == last => {
                        return Some(Err(Error::UnknownClass {
                            line,
                            token: field.to_string(),
                        }))
                    }
                    None => {
                        return Some(Err(Error::Parse {
                            line,
                            message: format!(
                                "`{field}` is not a declared value of attribute {}",
                                i + 1
                            ),
                        }))
                    }
                },
                None => match parse_number(field, line) {
                    Ok(v) => {
                        features.push(v);
                        continue;
                    }
                    Err(e) => return Some(Err(e)),
                },
            };
            if i == last {
                label = value;
            } else {
                features.push(value as f64);
            }
        }
        let t = self.t;
        self.t += 1;
        Some(Ok(LabeledInstance::new(features, t, label)))
    }
}

impl Iterator for StreamFileReader {
    type Item = Result<LabeledInstance>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = match self.source {
            Source::Delimited { .. } => self.next_delimited(),
            Source::Arff { .. } => self.next_arff(),
        };
        if matches!(item, None | Some(Err(_))) {
            self.done = true;
        }
        item
    }
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("`{field}` is not a finite number"),
        }),
    }
}

fn parse_attribute(rest: &str, line: usize) -> Result<Option<Vec<String>>> {
    let rest = rest.trim();
    let bad = |message: String| Error::Parse { line, message };
    // Skip the (possibly quoted) name.
    let after_name = if let Some(q) = rest.strip_prefix('\'') {
        q.split_once('\'')
            .map(|(_, r)| r)
            .ok_or_else(|| bad("unterminated attribute name".into()))?
    } else {
        rest.split_once(char::is_whitespace)
            .map(|(_, r)| r)
            .ok_or_else(|| bad("attribute without a type".into()))?
    };
    let spec = after_name.trim();
    if let Some(body) = spec.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| bad("unterminated nominal declaration".into()))?;
        let values: Vec<String> = body
            .split(',')
            .map(|v| v.trim().trim_matches(|c| c == '\'' || c == '"').to_string())
            .collect();
        if values.iter().any(String::is_empty) {
            return Err(bad("empty nominal value".into()));
        }
        return Ok(Some(values));
    }
    match spec.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(None),
        other => Err(bad(format!("unsupported attribute type `{other}`"))),
    }
}

/// Feature count and class count of a stream file, read in one pass.
pub fn scan_shape(path: impl AsRef<Path>, format: FileFormat) -> Result<(usize, usize)> {
    let mut reader = StreamFileReader::open(path, format)?;
    let mut max_label = None;
    for inst in reader.by_ref() {
        let inst = inst?;
        max_label = Some(max_label.map_or(inst.label.0, |m: usize| m.max(inst.label.0)));
    }
    let dim = reader.dim().ok_or_else(|| Error::Parse {
        line: 0,
        message: "stream file contains no instances".into(),
    })?;
    let classes = reader
        .classes()
        .unwrap_or_else(|| max_label.map_or(0, |m| m + 1))
        .max(2);
    Ok((dim, classes))
}
