use std::io::Write;

use menger_core::projection::BlockDecomposition;
use menger_core::Dyadic;
use serde_json::{json, Value};

use crate::Failure;

pub struct Out<W: Write> {
    w: W,
    pub json: bool,
}

impl<W: Write> Out<W> {
    pub fn new(w: W, json: bool) -> Self {
        Out { w, json }
    }

    pub fn line(&mut self, s: impl AsRef<str>) -> Result<(), Failure> {
        writeln!(self.w, "{}", s.as_ref()).map_err(io_failure)
    }

    pub fn raw(&mut self, s: &str) -> Result<(), Failure> {
        self.w.write_all(s.as_bytes()).and_then(|_| self.w.flush()).map_err(io_failure)
    }

    pub fn json_value(&mut self, v: &Value) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(v).expect("values always serialize");
        self.line(text)
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Usage(format!("writing output: {e}"))
}

/// `{"exact": "p/2^q", "decimal": "0.…"}`.
pub fn exact(d: &Dyadic) -> Value {
    json!({ "exact": d.to_fraction(), "decimal": d.to_decimal(12) })
}

pub fn both(d: &Dyadic) -> String {
    format!("{} ({})", d.to_fraction(), d.to_decimal(12))
}

/// The block table as aligned text columns.
pub fn table(d: &BlockDecomposition) -> String {
    let mut rows = vec![["i", "block", "d", "psi", "color", "eps", "b"].map(String::from).to_vec()];
    for i in 0..d.blocks.len() {
        rows.push(vec![
            (i + 1).to_string(),
            d.blocks[i].to_string(),
            d.disks[i].to_string(),
            d.psi[i].to_string(),
            if d.colors[i] == 0 { "A" } else { "B" }.to_string(),
            format!("{:+}", d.eps[i]),
            d.output.letters().get(i).map(|l| l.to_string()).unwrap_or_default(),
        ]);
    }
    let widths: Vec<usize> = (0..7)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out.push_str(&format!("output {}\n", d.output));
    out
}
