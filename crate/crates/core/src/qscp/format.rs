//! Native instance text format.
//!
//! ```text
//! QSCP m n
//! # repr ORG
//! c_1 … c_n
//! m rows of D, n tokens each (0 or 1)
//! n rows of Q, n numbers each
//! ```
//!
//! Everything after `#` on a line is a comment. A comment of the form
//! `# repr TAG` records the representation tag; without it the tag is
//! `ORG`. Numbers are written with the shortest representation that parses
//! back to the same `f64`, so files round-trip exactly, and `-0` is written
//! as `0`.

use std::fmt::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{CoverSystem, LinearCost, QMatrix, QscpInstance, Representation, Tag};

pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn join(values: impl Iterator<Item = String>) -> String {
    values.collect::<Vec<_>>().join(" ")
}

pub fn write_instance(inst: &QscpInstance) -> String {
    let (m, n) = (inst.m(), inst.n());
    let mut out = String::new();
    let _ = writeln!(out, "QSCP {m} {n}");
    let _ = writeln!(out, "# repr {}", inst.rep.tag());
    let _ = writeln!(
        out,
        "{}",
        join(inst.rep.c().as_slice().iter().map(|&v| format_number(v)))
    );
    for i in 0..m {
        let _ = writeln!(
            out,
            "{}",
            join((0..n).map(|j| inst.system.get(i, j).to_string()))
        );
    }
    for i in 0..n {
        let _ = writeln!(
            out,
            "{}",
            join(inst.rep.q().row(i).iter().map(|&v| format_number(v)))
        );
    }
    out
}

pub fn read_instance(text: &str) -> Result<QscpInstance> {
    let mut tag = Tag::Org;
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(comment) = comment {
            let mut words = comment.split_whitespace();
            if words.next() == Some("repr") {
                if let Some(t) = words.next() {
                    tag = Tag::parse(t);
                }
            }
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if !tokens.is_empty() {
            lines.push((idx + 1, tokens));
        }
    }
    let mut it = lines.into_iter();
    let (line, header) = it.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing 'QSCP m n' header".into(),
    })?;
    if header.len() != 3 || header[0] != "QSCP" {
        return Err(Error::Parse {
            line,
            msg: "header must be 'QSCP m n'".into(),
        });
    }
    let dim = |tok: &str| {
        tok.parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid dimension '{tok}'"),
        })
    };
    let (m, n) = (dim(header[1])?, dim(header[2])?);
    let mut last = line;

    let mut numbers = |what: &str| -> Result<Vec<f64>> {
        let (line, tokens) = it.next().ok_or_else(|| Error::Parse {
            line: last,
            msg: format!("unexpected end of input while reading {what}"),
        })?;
        last = line;
        if tokens.len() != n {
            return Err(Error::Parse {
                line,
                msg: format!("{what}: expected {n} values, found {}", tokens.len()),
            });
        }
        tokens
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("{what}: invalid number '{t}'"),
                    })
            })
            .collect()
    };

    let c = numbers("linear cost")?;
    let mut d = Vec::with_capacity(m * n);
    for i in 0..m {
        let row = numbers(&format!("row {} of D", i + 1))?;
        for v in row {
            if v != 0.0 && v != 1.0 {
                return Err(Error::Parse {
                    line: last,
                    msg: format!("row {} of D: entries must be 0 or 1, found {v}", i + 1),
                });
            }
            d.push(v as u8);
        }
    }
    let mut q = Vec::with_capacity(n * n);
    for i in 0..n {
        q.extend(numbers(&format!("row {} of Q", i + 1))?);
    }
    if let Some((line, _)) = it.next() {
        return Err(Error::Parse {
            line,
            msg: "unexpected data after Q".into(),
        });
    }
    let system = CoverSystem::new(m, n, d)?;
    let rep = Representation::new(QMatrix::new(n, q)?, LinearCost::new(c)?, tag)?;
    QscpInstance::new(system, rep)
}

pub fn load_instance(path: &Path) -> Result<QscpInstance> {
    read_instance(&std::fs::read_to_string(path)?)
}

pub fn save_instance(inst: &QscpInstance, path: &Path) -> Result<()> {
    std::fs::write(path, write_instance(inst))?;
    Ok(())
}
