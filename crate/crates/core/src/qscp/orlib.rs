//! OR-Library set covering format.
//!
//! ```text
//! m n
//! c_1 … c_n                 (may span several lines)
//! for each row: k  j_1 … j_k  (1-based column indices, may span lines)
//! ```

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{CoverSystem, LinearCost};

struct Tokens<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |t| (i + 1, t)));
        Self {
            inner: Box::new(inner),
            last_line: 1,
        }
    }

    fn next_int(&mut self, what: &str) -> Result<(usize, i64)> {
        match self.inner.next() {
            Some((line, tok)) => {
                self.last_line = line;
                tok.parse::<i64>()
                    .map(|v| (line, v))
                    .map_err(|_| Error::Parse {
                        line,
                        msg: format!("expected integer {what}, found '{tok}'"),
                    })
            }
            None => Err(Error::Parse {
                line: self.last_line,
                msg: format!("unexpected end of input while reading {what}"),
            }),
        }
    }

    fn next_count(&mut self, what: &str) -> Result<(usize, usize)> {
        let (line, v) = self.next_int(what)?;
        usize::try_from(v)
            .map(|v| (line, v))
            .map_err(|_| Error::Parse {
                line,
                msg: format!("{what} must be nonnegative, found {v}"),
            })
    }
}

/// Parses an OR-Library `scp` file into its cover system and column costs.
pub fn load_orlib(text: &str) -> Result<(CoverSystem, LinearCost)> {
    let mut t = Tokens::new(text);
    let (_, m) = t.next_count("row count")?;
    let (_, n) = t.next_count("column count")?;
    let mut costs = Vec::with_capacity(n);
    for _ in 0..n {
        costs.push(t.next_int("column cost")?.1 as f64);
    }
    let mut lists = Vec::with_capacity(m);
    for i in 0..m {
        let (_, k) = t.next_count(&format!("cover count of row {}", i + 1))?;
        let mut list = Vec::with_capacity(k);
        for _ in 0..k {
            let (line, j) = t.next_int("column index")?;
            if j < 1 || j as usize > n {
                return Err(Error::Parse {
                    line,
                    msg: format!("column index {j} outside 1..={n}"),
                });
            }
            list.push(j as usize - 1);
        }
        lists.push(list);
    }
    if let Some((line, tok)) = t.inner.next() {
        return Err(Error::Parse {
            line,
            msg: format!("trailing token '{tok}' after {m} rows"),
        });
    }
    Ok((
        CoverSystem::from_row_lists(n, &lists)?,
        LinearCost::new(costs)?,
    ))
}

fn wrap(out: &mut String, items: &[String]) {
    for chunk in items.chunks(12) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
}

/// Writes OR-Library `scp` text, twelve numbers per line.
pub fn write_orlib(sys: &CoverSystem, c: &LinearCost) -> String {
    let mut out = String::new();
    let _ = writeln!(out, " {} {}", sys.m(), sys.n());
    let costs: Vec<String> = c.as_slice().iter().map(|v| format!("{v}")).collect();
    wrap(&mut out, &costs);
    for i in 0..sys.m() {
        let row = sys.row_support(i);
        let _ = writeln!(out, " {}", row.len());
        let cols: Vec<String> = row.iter().map(|j| (j + 1).to_string()).collect();
        wrap(&mut out, &cols);
    }
    out
}
