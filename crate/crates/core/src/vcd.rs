//! Value Change Dump output for simulation traces.
//!
//! Identifier codes are assigned in signal-declaration order starting at
//! `'!'`, and a change record is emitted only when a value differs from the
//! previous timestamp, so traces are deterministic and golden-file stable.

use std::io::{self, Write};

use crate::rtl::RtlDesign;

#[derive(Debug, Clone)]
struct VcdVar {
    signal_index: usize,
    name: String,
    width: u32,
    code: String,
}

/// An in-memory trace: one timestamp per clock cycle, timescale 1 ns.
#[derive(Debug, Clone)]
pub struct VcdTrace {
    design_name: String,
    vars: Vec<VcdVar>,
    last: Vec<Option<u64>>,
    changes: Vec<(u64, Vec<(usize, u64)>)>,
}

/// Printable-ASCII identifier code for variable `index`, starting at `!`.
fn id_code(mut index: usize) -> String {
    const BASE: usize = 94; // '!' ..= '~'
    let mut out = Vec::new();
    loop {
        out.push(b'!' + (index % BASE) as u8);
        index /= BASE;
        if index == 0 {
            break;
        }
        index -= 1;
    }
    String::from_utf8(out).unwrap()
}

impl VcdTrace {
    /// Traces every signal of `design`.
    pub fn all_signals(design: &RtlDesign) -> Self {
        let vars: Vec<VcdVar> = design
            .signals()
            .iter()
            .enumerate()
            .map(|(i, s)| VcdVar {
                signal_index: s.id.index(),
                name: s.name.clone(),
                width: s.width,
                code: id_code(i),
            })
            .collect();
        VcdTrace {
            design_name: design.name.clone(),
            last: vec![None; vars.len()],
            vars,
            changes: Vec::new(),
        }
    }

    /// Records the settled values for one timestamp. Called by the
    /// simulator once per cycle.
    pub fn record(&mut self, timestamp: u64, values: &[u64]) {
        let mut delta = Vec::new();
        for (i, var) in self.vars.iter().enumerate() {
            let v = values[var.signal_index];
            if self.last[i] != Some(v) {
                self.last[i] = Some(v);
                delta.push((i, v));
            }
        }
        if !delta.is_empty() || self.changes.is_empty() {
            self.changes.push((timestamp, delta));
        }
    }

    /// Number of recorded value changes for the named signal.
    pub fn change_count(&self, name: &str) -> usize {
        match self.vars.iter().position(|v| v.name == name) {
            Some(idx) => self
                .changes
                .iter()
                .flat_map(|(_, d)| d.iter())
                .filter(|(i, _)| *i == idx)
                .count(),
            None => 0,
        }
    }

    fn write_value(var: &VcdVar, value: u64, out: &mut dyn Write) -> io::Result<()> {
        if var.width == 1 {
            writeln!(out, "{}{}", value, var.code)
        } else {
            writeln!(out, "b{:b} {}", value, var.code)
        }
    }

    /// Serializes the trace as a VCD document. `date` fills the `$date`
    /// header; pass an empty string for reproducible output.
    pub fn write(&self, out: &mut dyn Write, date: &str) -> io::Result<()> {
        writeln!(out, "$date\n  {}\n$end", date)?;
        writeln!(out, "$version\n  rngforge {}\n$end", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "$timescale 1ns $end")?;
        writeln!(out, "$scope module {} $end", self.design_name)?;
        for var in &self.vars {
            writeln!(out, "$var wire {} {} {} $end", var.width, var.code, var.name)?;
        }
        writeln!(out, "$upscope $end")?;
        writeln!(out, "$enddefinitions $end")?;

        let mut first = true;
        for (ts, delta) in &self.changes {
            writeln!(out, "#{}", ts)?;
            if first {
                writeln!(out, "$dumpvars")?;
                for (i, v) in delta {
                    Self::write_value(&self.vars[*i], *v, out)?;
                }
                writeln!(out, "$end")?;
                first = false;
            } else {
                for (i, v) in delta {
                    Self::write_value(&self.vars[*i], *v, out)?;
                }
            }
        }
        if first {
            // No cycles were recorded: still emit an initial dump section.
            writeln!(out, "#0\n$dumpvars\n$end")?;
        }
        Ok(())
    }

    /// Convenience: serialize to a `String`.
    pub fn to_vcd_string(&self, date: &str) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, date).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("VCD output is ASCII")
    }
}
