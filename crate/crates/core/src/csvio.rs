//! CSV ingestion and export.
//!
//! Files are UTF-8, comma-separated, with a header row. Lines starting with
//! `#` are metadata comments and are skipped on read. Reals are written with
//! 17 significant digits so a write/read cycle is lossless.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::data::{default_names, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsvOptions {
    /// Header name of the label column. Without a header this is a 0-based
    /// column index, or anything non-numeric for the last column.
    pub label_column: String,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            label_column: "y".to_string(),
            has_header: true,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset> {
    load_csv_with(
        path,
        &CsvOptions {
            label_column: label_column.to_string(),
            has_header: true,
        },
    )
}

pub fn load_csv_with(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };

    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r.map_err(csv_err)?,
        None => {
            return Err(Error::Csv {
                path: path.to_path_buf(),
                message: "file is empty".into(),
            })
        }
    };
    let width = first.len();

    let (header, mut pending): (Vec<String>, Option<csv::StringRecord>) = if opts.has_header {
        (first.iter().map(str::to_string).collect(), None)
    } else {
        ((0..width).map(|j| j.to_string()).collect(), Some(first))
    };

    let label_idx = if opts.has_header {
        let hits: Vec<usize> = header
            .iter()
            .enumerate()
            .filter(|(_, h)| *h == &opts.label_column)
            .map(|(j, _)| j)
            .collect();
        match hits.as_slice() {
            [j] => *j,
            [] => {
                return Err(Error::Csv {
                    path: path.to_path_buf(),
                    message: format!("label column '{}' not found in header", opts.label_column),
                })
            }
            _ => {
                return Err(Error::Csv {
                    path: path.to_path_buf(),
                    message: format!("label column '{}' appears more than once", opts.label_column),
                })
            }
        }
    } else {
        match opts.label_column.parse::<usize>() {
            Ok(j) if j < width => j,
            Ok(j) => {
                return Err(Error::Csv {
                    path: path.to_path_buf(),
                    message: format!("label column index {j} out of range ({width} columns)"),
                })
            }
            Err(_) => width - 1,
        }
    };
    if width < 2 {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: "need a label column and at least one feature column".into(),
        });
    }

    let names: Vec<String> = if opts.has_header {
        header
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != label_idx)
            .map(|(_, h)| h.clone())
            .collect()
    } else {
        default_names(width - 1)
    };

    let mut x = Vec::new();
    let mut y = Vec::new();
    let first_data_row = if opts.has_header { 2 } else { 1 };
    let mut row_no = first_data_row;
    loop {
        let record = match pending.take() {
            Some(r) => r,
            None => match records.next() {
                Some(r) => r.map_err(csv_err)?,
                None => break,
            },
        };
        if record.len() != width {
            return Err(Error::Cell {
                path: path.to_path_buf(),
                row: row_no,
                column: String::new(),
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let cell_err = |message: String| Error::Cell {
                path: path.to_path_buf(),
                row: row_no,
                column: header[j].clone(),
                message,
            };
            let value: f64 = cell
                .parse()
                .map_err(|_| cell_err(format!("'{cell}' is not a number")))?;
            if !value.is_finite() {
                return Err(cell_err(format!("'{cell}' is not finite")));
            }
            if j == label_idx {
                if value == 0.0 {
                    y.push(0);
                } else if value == 1.0 {
                    y.push(1);
                } else {
                    return Err(cell_err(format!("label value '{cell}' is not 0 or 1")));
                }
            } else {
                x.push(value);
            }
        }
        row_no += 1;
    }
    if y.is_empty() {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: "file has no data rows".into(),
        });
    }
    Dataset::new(x, y, names)
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Opens `path` for writing, emits each `meta` line as a `# ` comment and
/// returns a CSV writer positioned after them.
pub fn create_with_meta(path: impl AsRef<Path>, meta: &[String]) -> Result<csv::Writer<BufWriter<File>>> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    for line in meta {
        writeln!(out, "# {line}").map_err(io_err)?;
    }
    Ok(csv::WriterBuilder::new().from_writer(out))
}

pub(crate) fn csv_write_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes `data` with the label as the last column.
pub fn write_csv(path: impl AsRef<Path>, data: &Dataset, label_column: &str, meta: &[String]) -> Result<()> {
    let path = path.as_ref();
    let err = csv_write_err(path);
    let mut w = create_with_meta(path, meta)?;
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.push(label_column);
    w.write_record(&header).map_err(&err)?;
    let mut fields = Vec::with_capacity(data.p() + 1);
    for i in 0..data.n() {
        fields.clear();
        fields.extend(data.row(i).iter().map(|&v| fmt_real(v)));
        fields.push(data.y()[i].to_string());
        w.write_record(&fields).map_err(&err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
