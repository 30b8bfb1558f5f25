//! Verilog-2001 emission for validated designs.
//!
//! One clocked block, synchronous active-high reset, fixed 2-space
//! indentation and `\n` line endings so output is byte-stable for
//! golden-file comparison. Slice and rotate operands are hoisted to
//! intermediate wires because Verilog cannot part-select an arbitrary
//! expression.

use std::collections::HashSet;

use crate::rtl::{BinOpKind, Direction, Expr, RtlDesign, RtlError};

/// Verilog-2001 reserved words.
const KEYWORDS: &[&str] = &[
    "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1", "case", "casex",
    "casez", "cell", "cmos", "config", "deassign", "default", "defparam", "design", "disable",
    "edge", "else", "end", "endcase", "endconfig", "endfunction", "endgenerate", "endmodule",
    "endprimitive", "endspecify", "endtable", "endtask", "event", "for", "force", "forever",
    "fork", "function", "generate", "genvar", "highz0", "highz1", "if", "ifnone", "incdir",
    "include", "initial", "inout", "input", "instance", "integer", "join", "large", "liblist",
    "library", "localparam", "macromodule", "medium", "module", "nand", "negedge", "nmos", "nor",
    "noshowcancelled", "not", "notif0", "notif1", "or", "output", "parameter", "pmos", "posedge",
    "primitive", "pull0", "pull1", "pulldown", "pullup", "pulsestyle_ondetect",
    "pulsestyle_onevent", "rcmos", "real", "realtime", "reg", "release", "repeat", "rnmos",
    "rpmos", "rtran", "rtranif0", "rtranif1", "scalared", "showcancelled", "signed", "small",
    "specify", "specparam", "strong0", "strong1", "supply0", "supply1", "table", "task", "time",
    "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand", "trior", "trireg", "unsigned",
    "use", "uwire", "vectored", "wait", "wand", "weak0", "weak1", "while", "wire", "wor", "xnor",
    "xor",
];

/// Turns an arbitrary nonempty name into a legal Verilog identifier.
/// Keywords receive a `_sig` suffix; illegal characters become `_`; a
/// leading digit gets a `_` prefix.
pub fn legalize_name(name: &str) -> String {
    assert!(!name.is_empty(), "signal names are nonempty by construction");
    let mut out = String::with_capacity(name.len() + 1);
    for (i, ch) in name.chars().enumerate() {
        let ok = ch.is_ascii_alphanumeric() || ch == '_' || ch == '$';
        if i == 0 && (ch.is_ascii_digit() || ch == '$') {
            out.push('_');
        }
        out.push(if ok { ch } else { '_' });
    }
    if KEYWORDS.contains(&out.as_str()) {
        out.push_str("_sig");
    }
    out
}

/// Name interner: legalizes and resolves collisions with numeric suffixes.
struct NameTable {
    used: HashSet<String>,
}

impl NameTable {
    fn new() -> Self {
        NameTable { used: HashSet::new() }
    }

    fn intern(&mut self, name: &str) -> String {
        let base = legalize_name(name);
        let mut candidate = base.clone();
        let mut n = 1u32;
        while !self.used.insert(candidate.clone()) {
            candidate = format!("{base}_{n}");
            n += 1;
        }
        candidate
    }
}

struct Emitter<'d> {
    design: &'d RtlDesign,
    names: Vec<String>,
    temps: Vec<String>,
    temp_count: usize,
    table: NameTable,
}

impl<'d> Emitter<'d> {
    fn hex_const(value: u64, width: u32) -> String {
        format!("{}'h{:X}", width, value)
    }

    fn fresh_temp(&mut self, width: u32, body: String) -> String {
        let name = loop {
            let candidate = format!("_t{}", self.temp_count);
            self.temp_count += 1;
            if self.table.used.insert(candidate.clone()) {
                break candidate;
            }
        };
        let range = if width == 1 { String::new() } else { format!("[{}:0] ", width - 1) };
        self.temps.push(format!("  wire {range}{name} = {body};"));
        name
    }

    /// Emits `expr` as Verilog text, hoisting slice/rotate operands into
    /// intermediate wires where Verilog syntax requires a simple name.
    fn expr(&mut self, expr: &Expr) -> String {
        match expr {
            Expr::Const { value, width } => Self::hex_const(*value, *width),
            Expr::Ref(id) => self.names[id.index()].clone(),
            Expr::BinOp { kind, lhs, rhs } => {
                let w = self.design.expr_width(lhs).expect("validated");
                match kind {
                    BinOpKind::Add | BinOpKind::Sub | BinOpKind::Mul | BinOpKind::And
                    | BinOpKind::Or | BinOpKind::Xor => {
                        let op = match kind {
                            BinOpKind::Add => "+",
                            BinOpKind::Sub => "-",
                            BinOpKind::Mul => "*",
                            BinOpKind::And => "&",
                            BinOpKind::Or => "|",
                            BinOpKind::Xor => "^",
                            _ => unreachable!(),
                        };
                        format!("({} {} {})", self.expr(lhs), op, self.expr(rhs))
                    }
                    BinOpKind::Shl | BinOpKind::ShrLogical => {
                        let op = if *kind == BinOpKind::Shl { "<<" } else { ">>" };
                        let l = self.expr(lhs);
                        match rhs.as_ref() {
                            Expr::Const { value, .. } => {
                                format!("({} {} {})", l, op, value % w as u64)
                            }
                            _ => {
                                let r = self.expr(rhs);
                                format!("({} {} ({} % {}))", l, op, r, w)
                            }
                        }
                    }
                    BinOpKind::RotR => {
                        let l = self.operand_name(lhs);
                        match rhs.as_ref() {
                            Expr::Const { value, .. } => {
                                let k = (*value % w as u64) as u32;
                                if k == 0 {
                                    l
                                } else {
                                    format!("(({l} >> {k}) | ({l} << {}))", w - k)
                                }
                            }
                            _ => {
                                let r = self.operand_name(rhs);
                                format!(
                                    "(({l} >> ({r} % {w})) | ({l} << (({w} - ({r} % {w})) % {w})))"
                                )
                            }
                        }
                    }
                }
            }
            Expr::Not(e) => format!("(~{})", self.expr(e)),
            Expr::Slice { operand, low, len } => {
                let name = self.operand_name(operand);
                if *len == 1 {
                    format!("{}[{}]", name, low)
                } else {
                    format!("{}[{}:{}]", name, low + len - 1, low)
                }
            }
            Expr::Concat(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| self.expr(p)).collect();
                format!("{{{}}}", inner.join(", "))
            }
            Expr::Mux { select, when_one, when_zero } => format!(
                "({} ? {} : {})",
                self.expr(select),
                self.expr(when_one),
                self.expr(when_zero)
            ),
            Expr::Eq { lhs, rhs } => format!("({} == {})", self.expr(lhs), self.expr(rhs)),
        }
    }

    /// A simple identifier for `expr`: the signal name if it is a plain
    /// reference, otherwise a hoisted intermediate wire.
    fn operand_name(&mut self, expr: &Expr) -> String {
        match expr {
            Expr::Ref(id) => self.names[id.index()].clone(),
            _ => {
                let w = self.design.expr_width(expr).expect("validated");
                let body = self.expr(expr);
                self.fresh_temp(w, body)
            }
        }
    }
}

fn range_decl(width: u32) -> String {
    if width == 1 {
        String::new()
    } else {
        format!("[{}:0] ", width - 1)
    }
}

/// Emits the design as a synthesizable Verilog-2001 module.
///
/// `clock` names the clock port; it is added as an input unless the design
/// already declares an input of that name. `reset` likewise names the reset
/// port when the design does not declare its own reset signal. All
/// registers live in one `always @(posedge clock)` block with a
/// synchronous active-high reset.
pub fn emit_verilog(design: &RtlDesign, clock: &str, reset: &str) -> Result<String, RtlError> {
    design.validated()?;

    let mut table = NameTable::new();
    let clock_name = legalize_name(clock);
    table.used.insert(clock_name.clone());

    // Intern signal names in declaration order.
    let mut names = Vec::with_capacity(design.signals().len());
    for s in design.signals() {
        if s.name == clock {
            names.push(clock_name.clone());
        } else {
            names.push(table.intern(&s.name));
        }
    }

    let design_has_clock_port = design
        .ports()
        .iter()
        .any(|&(id, d)| d == Direction::In && design.signal(id).name == clock);
    let reset_name = match design.reset_signal() {
        Some(id) => names[id.index()].clone(),
        None => {
            let n = table.intern(reset);
            n
        }
    };

    let reg_targets: HashSet<usize> =
        design.registers().iter().map(|r| r.target.index()).collect();
    let port_ids: HashSet<usize> = design.ports().iter().map(|&(id, _)| id.index()).collect();

    // Port list: clock, synthesized reset (when absent), then design ports.
    let mut port_decls = Vec::new();
    if !design_has_clock_port {
        port_decls.push(format!("input wire {clock_name}"));
    }
    if design.reset_signal().is_none() {
        port_decls.push(format!("input wire {reset_name}"));
    }
    for &(id, dir) in design.ports() {
        let sig = design.signal(id);
        let name = &names[id.index()];
        let range = range_decl(sig.width);
        let decl = match dir {
            Direction::In => format!("input wire {range}{name}"),
            Direction::Out if reg_targets.contains(&id.index()) => {
                format!("output reg {range}{name}")
            }
            Direction::Out => format!("output wire {range}{name}"),
        };
        port_decls.push(decl);
    }

    let mut emitter = Emitter { design, names, temps: Vec::new(), temp_count: 0, table };

    // Body statements are rendered before declarations so hoisted temp
    // wires are known, then stitched together in declaration order.
    let mut assigns = Vec::new();
    for (target, expr) in design.comb_assigns() {
        let body = emitter.expr(expr);
        assigns.push(format!("  assign {} = {};", emitter.names[target.index()], body));
    }

    let mut reset_stmts = Vec::new();
    let mut next_stmts = Vec::new();
    for r in design.registers() {
        let name = emitter.names[r.target.index()].clone();
        let w = design.width(r.target);
        reset_stmts.push(format!("      {} <= {};", name, Emitter::hex_const(r.reset_value, w)));
        let body = emitter.expr(&r.next);
        next_stmts.push(format!("      {} <= {};", name, body));
    }

    let mut lines = Vec::new();
    if port_decls.is_empty() {
        lines.push(format!("module {}();", design.name));
    } else {
        lines.push(format!("module {}(", design.name));
        for (i, p) in port_decls.iter().enumerate() {
            let comma = if i + 1 < port_decls.len() { "," } else { "" };
            lines.push(format!("  {p}{comma}"));
        }
        lines.push(");".to_string());
    }

    // Internal declarations.
    for s in design.signals() {
        if port_ids.contains(&s.id.index()) {
            continue;
        }
        let kind = if reg_targets.contains(&s.id.index()) { "reg" } else { "wire" };
        lines.push(format!("  {} {}{};", kind, range_decl(s.width), emitter.names[s.id.index()]));
    }
    lines.extend(emitter.temps.iter().cloned());
    lines.extend(assigns);

    if !design.registers().is_empty() {
        lines.push(format!("  always @(posedge {clock_name}) begin"));
        lines.push(format!("    if ({reset_name}) begin"));
        lines.extend(reset_stmts);
        lines.push("    end else begin".to_string());
        lines.extend(next_stmts);
        lines.push("    end".to_string());
        lines.push("  end".to_string());
    }

    lines.push("endmodule".to_string());
    lines.push(String::new());
    Ok(lines.join("\n"))
}
