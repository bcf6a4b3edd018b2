//! CPLEX LP format export.
//!
//! The objective `c·x + xᵀQx` is written as linear terms followed by a
//! `[ … ]/2` block holding `2·q_ij x_i * x_j` terms. For symmetric `Q` each
//! unordered pair `i < j` appears once with coefficient `2(q_ij + q_ji)` and
//! the diagonal as `2·q_ii x_i ^ 2`; otherwise every ordered pair is listed
//! row-major. Zero coefficients are omitted. Variables are `x1 … xn`.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::model::QscpInstance;
use crate::qscp::format_number;

const TERMS_PER_LINE: usize = 8;

fn push_terms(out: &mut String, terms: &[(f64, String)]) {
    for (k, (coef, var)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if *coef < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {var}", format_number(coef.abs()));
    }
}

pub fn lp_file_string(inst: &QscpInstance) -> String {
    let n = inst.n();
    let q = inst.rep.q();
    let c = inst.rep.c().as_slice();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ QSCP m={} n={} repr={}",
        inst.m(),
        n,
        inst.rep.tag()
    );
    out.push_str("Minimize\n obj:");

    let linear: Vec<(f64, String)> = (0..n)
        .filter(|&j| c[j] != 0.0)
        .map(|j| (c[j], format!("x{}", j + 1)))
        .collect();
    let mut quad: Vec<(f64, String)> = Vec::new();
    if q.is_symmetric() {
        for i in 0..n {
            for j in i..n {
                if i == j {
                    if q.get(i, i) != 0.0 {
                        quad.push((2.0 * q.get(i, i), format!("x{} ^ 2", i + 1)));
                    }
                } else {
                    let v = 2.0 * (q.get(i, j) + q.get(j, i));
                    if v != 0.0 {
                        quad.push((v, format!("x{} * x{}", i + 1, j + 1)));
                    }
                }
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                let v = q.get(i, j);
                if v == 0.0 {
                    continue;
                }
                let var = if i == j {
                    format!("x{} ^ 2", i + 1)
                } else {
                    format!("x{} * x{}", i + 1, j + 1)
                };
                quad.push((2.0 * v, var));
            }
        }
    }

    if linear.is_empty() && quad.is_empty() && n > 0 {
        out.push_str(" 0 x1");
    }
    push_terms(&mut out, &linear);
    if !quad.is_empty() {
        out.push_str(" + [");
        push_terms(&mut out, &quad);
        out.push_str(" ]/2");
    }
    out.push_str("\nSubject To\n");
    for i in 0..inst.m() {
        let _ = write!(out, " c{}:", i + 1);
        let row = inst.system.row_support(i);
        if row.is_empty() {
            out.push_str(" 0 x1");
        }
        let terms: Vec<(f64, String)> = row.iter().map(|&j| (1.0, format!("x{}", j + 1))).collect();
        push_terms(&mut out, &terms);
        out.push_str(" >= 1\n");
    }
    out.push_str("Binary\n");
    for chunk in (1..=n).collect::<Vec<_>>().chunks(16) {
        let names: Vec<String> = chunk.iter().map(|j| format!("x{j}")).collect();
        let _ = writeln!(out, " {}", names.join(" "));
    }
    out.push_str("End\n");
    out
}

pub fn export_lp_file(inst: &QscpInstance, out: &mut dyn Write) -> Result<()> {
    out.write_all(lp_file_string(inst).as_bytes())?;
    out.flush()?;
    Ok(())
}
