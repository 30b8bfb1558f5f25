//! A minimal hardware-construction IR: width-checked signals, combinational
//! expressions, clocked registers, and whole-design validation.
//!
//! Designs are built imperatively (`add_signal`, `assign_comb`,
//! `add_register`), validated once with [`RtlDesign::check`], and from then
//! on treated as immutable. Signal widths are limited to 64 bits so every
//! value fits in a `u64`; arithmetic wraps modulo `2^width`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Maximum signal width in bits.
pub const MAX_WIDTH: u32 = 64;

/// Handle to a signal inside one [`RtlDesign`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignalId(pub(crate) u32);

impl SignalId {
    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

/// Port direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

/// A named, fixed-width signal.
#[derive(Debug, Clone)]
pub struct Signal {
    pub id: SignalId,
    pub name: String,
    pub width: u32,
}

/// Binary operator kinds. Shift and rotate amounts are read modulo the
/// left operand's width; all other operators require equal operand widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOpKind {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Xor,
    Shl,
    ShrLogical,
    RotR,
}

impl BinOpKind {
    fn requires_equal_widths(self) -> bool {
        !matches!(self, BinOpKind::Shl | BinOpKind::ShrLogical | BinOpKind::RotR)
    }
}

/// A combinational expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const { value: u64, width: u32 },
    Ref(SignalId),
    BinOp { kind: BinOpKind, lhs: Box<Expr>, rhs: Box<Expr> },
    Not(Box<Expr>),
    Slice { operand: Box<Expr>, low: u32, len: u32 },
    /// Parts are most-significant first, matching Verilog `{}`.
    Concat(Vec<Expr>),
    Mux { select: Box<Expr>, when_one: Box<Expr>, when_zero: Box<Expr> },
    Eq { lhs: Box<Expr>, rhs: Box<Expr> },
}

impl From<SignalId> for Expr {
    fn from(id: SignalId) -> Self {
        Expr::Ref(id)
    }
}

/// `width`-bit constant.
pub fn con(value: u64, width: u32) -> Expr {
    Expr::Const { value, width }
}

impl Expr {
    fn bin(kind: BinOpKind, lhs: Expr, rhs: Expr) -> Expr {
        Expr::BinOp { kind, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn add(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::Add, self, rhs.into())
    }
    pub fn sub(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::Sub, self, rhs.into())
    }
    pub fn mul(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::Mul, self, rhs.into())
    }
    pub fn and(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::And, self, rhs.into())
    }
    pub fn or(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::Or, self, rhs.into())
    }
    pub fn xor(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::Xor, self, rhs.into())
    }
    pub fn shl(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::Shl, self, rhs.into())
    }
    pub fn shr(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::ShrLogical, self, rhs.into())
    }
    pub fn rotr(self, rhs: impl Into<Expr>) -> Expr {
        Expr::bin(BinOpKind::RotR, self, rhs.into())
    }
    pub fn not(self) -> Expr {
        Expr::Not(Box::new(self))
    }
    pub fn slice(self, low: u32, len: u32) -> Expr {
        Expr::Slice { operand: Box::new(self), low, len }
    }
    pub fn eq(self, rhs: impl Into<Expr>) -> Expr {
        Expr::Eq { lhs: Box::new(self), rhs: Box::new(rhs.into()) }
    }
    /// `self ? when_one : when_zero`; `self` must be 1 bit wide.
    pub fn mux(self, when_one: impl Into<Expr>, when_zero: impl Into<Expr>) -> Expr {
        Expr::Mux {
            select: Box::new(self),
            when_one: Box::new(when_one.into()),
            when_zero: Box::new(when_zero.into()),
        }
    }
    pub fn concat(parts: Vec<Expr>) -> Expr {
        Expr::Concat(parts)
    }
}

/// A clocked register: `target` takes the value of `next` at every clock
/// edge, or `reset_value` while reset is asserted.
#[derive(Debug, Clone)]
pub struct Register {
    pub target: SignalId,
    pub next: Expr,
    pub reset_value: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RtlError {
    #[error("signal name {0:?} already in use")]
    DuplicateName(String),
    #[error("signal {name:?} has width {width}, allowed range is 1..={MAX_WIDTH}")]
    BadWidth { name: String, width: u32 },
    #[error("signal name must be nonempty")]
    EmptyName,
    #[error("signal {0:?} already has a driver")]
    MultipleDrivers(String),
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: u32, found: u32 },
    #[error("reset value {value:#x} does not fit in {width} bits")]
    BadResetValue { value: u64, width: u32 },
    #[error("constant {value:#x} does not fit in {width} bits")]
    ConstTooWide { value: u64, width: u32 },
    #[error("slice [{low} +: {len}] out of bounds for width {width}")]
    SliceOutOfBounds { low: u32, len: u32, width: u32 },
    #[error("concatenation width {0} exceeds {MAX_WIDTH} bits")]
    ConcatTooWide(u32),
    #[error("empty concatenation")]
    EmptyConcat,
    #[error("mux select must be 1 bit, found width {0}")]
    BadMuxSelect(u32),
    #[error("signal id {0:?} does not belong to this design")]
    ForeignSignal(SignalId),
    #[error("signal {0:?} has no value bound in the environment")]
    UnboundSignal(String),
    #[error("only input ports may be driven externally: {0:?}")]
    NotAnInput(String),
    #[error("design failed validation: {0}")]
    Invalid(ValidationReport),
}

/// One validation finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Signals forming a combinational cycle, in cycle order.
    CombinationalLoop(Vec<String>),
    Undriven(String),
    MultipleDrivers(String),
    WidthError { signal: String, detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CombinationalLoop(names) => {
                write!(f, "combinational loop: {}", names.join(" -> "))
            }
            Violation::Undriven(n) => write!(f, "undriven signal {n:?}"),
            Violation::MultipleDrivers(n) => write!(f, "multiple drivers on {n:?}"),
            Violation::WidthError { signal, detail } => {
                write!(f, "width error on {signal:?}: {detail}")
            }
        }
    }
}

/// Result of [`RtlDesign::check`]: empty means the design is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

pub(crate) fn width_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// A netlist under construction or validated for use.
#[derive(Debug, Clone)]
pub struct RtlDesign {
    pub name: String,
    signals: Vec<Signal>,
    names: HashMap<String, SignalId>,
    ports: Vec<(SignalId, Direction)>,
    comb_assigns: Vec<(SignalId, Expr)>,
    registers: Vec<Register>,
    reset: Option<SignalId>,
}

impl RtlDesign {
    pub fn new(name: impl Into<String>) -> Self {
        RtlDesign {
            name: name.into(),
            signals: Vec::new(),
            names: HashMap::new(),
            ports: Vec::new(),
            comb_assigns: Vec::new(),
            registers: Vec::new(),
            reset: None,
        }
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn signal(&self, id: SignalId) -> &Signal {
        &self.signals[id.index()]
    }

    pub fn width(&self, id: SignalId) -> u32 {
        self.signals[id.index()].width
    }

    pub fn ports(&self) -> &[(SignalId, Direction)] {
        &self.ports
    }

    pub fn comb_assigns(&self) -> &[(SignalId, Expr)] {
        &self.comb_assigns
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    /// The distinguished synchronous active-high reset input, if any.
    pub fn reset_signal(&self) -> Option<SignalId> {
        self.reset
    }

    pub fn find_signal(&self, name: &str) -> Option<SignalId> {
        self.names.get(name).copied()
    }

    pub fn is_input(&self, id: SignalId) -> bool {
        self.ports.iter().any(|&(p, d)| p == id && d == Direction::In)
    }

    pub fn add_signal(&mut self, name: &str, width: u32) -> Result<SignalId, RtlError> {
        if name.is_empty() {
            return Err(RtlError::EmptyName);
        }
        if width == 0 || width > MAX_WIDTH {
            return Err(RtlError::BadWidth { name: name.to_string(), width });
        }
        if self.names.contains_key(name) {
            return Err(RtlError::DuplicateName(name.to_string()));
        }
        let id = SignalId(self.signals.len() as u32);
        self.signals.push(Signal { id, name: name.to_string(), width });
        self.names.insert(name.to_string(), id);
        Ok(id)
    }

    /// Adds a signal and declares it as a port in one step.
    pub fn add_port(&mut self, name: &str, width: u32, dir: Direction) -> Result<SignalId, RtlError> {
        let id = self.add_signal(name, width)?;
        self.ports.push((id, dir));
        Ok(id)
    }

    /// Declares an existing signal as a port.
    pub fn mark_port(&mut self, id: SignalId, dir: Direction) -> Result<(), RtlError> {
        self.check_owned(id)?;
        self.ports.push((id, dir));
        Ok(())
    }

    /// Declares `id` as the synchronous reset; must be a 1-bit input port.
    pub fn set_reset(&mut self, id: SignalId) -> Result<(), RtlError> {
        self.check_owned(id)?;
        if !self.is_input(id) {
            return Err(RtlError::NotAnInput(self.signal(id).name.clone()));
        }
        if self.width(id) != 1 {
            return Err(RtlError::WidthMismatch { expected: 1, found: self.width(id) });
        }
        self.reset = Some(id);
        Ok(())
    }

    fn check_owned(&self, id: SignalId) -> Result<(), RtlError> {
        if id.index() >= self.signals.len() {
            return Err(RtlError::ForeignSignal(id));
        }
        Ok(())
    }

    fn has_driver(&self, id: SignalId) -> bool {
        self.is_input(id)
            || self.comb_assigns.iter().any(|&(t, _)| t == id)
            || self.registers.iter().any(|r| r.target == id)
    }

    pub fn assign_comb(&mut self, target: SignalId, expr: Expr) -> Result<(), RtlError> {
        self.check_owned(target)?;
        if self.has_driver(target) {
            return Err(RtlError::MultipleDrivers(self.signal(target).name.clone()));
        }
        let w = self.expr_width(&expr)?;
        let tw = self.width(target);
        if w != tw {
            return Err(RtlError::WidthMismatch { expected: tw, found: w });
        }
        self.comb_assigns.push((target, expr));
        Ok(())
    }

    pub fn add_register(&mut self, target: SignalId, next: Expr, reset_value: u64) -> Result<(), RtlError> {
        self.check_owned(target)?;
        if self.has_driver(target) {
            return Err(RtlError::MultipleDrivers(self.signal(target).name.clone()));
        }
        let tw = self.width(target);
        let w = self.expr_width(&next)?;
        if w != tw {
            return Err(RtlError::WidthMismatch { expected: tw, found: w });
        }
        if reset_value & !width_mask(tw) != 0 {
            return Err(RtlError::BadResetValue { value: reset_value, width: tw });
        }
        self.registers.push(Register { target, next, reset_value });
        Ok(())
    }

    /// Derives and checks an expression's width.
    pub fn expr_width(&self, expr: &Expr) -> Result<u32, RtlError> {
        match expr {
            Expr::Const { value, width } => {
                if *width == 0 || *width > MAX_WIDTH {
                    return Err(RtlError::BadWidth { name: "<const>".into(), width: *width });
                }
                if *value & !width_mask(*width) != 0 {
                    return Err(RtlError::ConstTooWide { value: *value, width: *width });
                }
                Ok(*width)
            }
            Expr::Ref(id) => {
                self.check_owned(*id)?;
                Ok(self.width(*id))
            }
            Expr::BinOp { kind, lhs, rhs } => {
                let lw = self.expr_width(lhs)?;
                let rw = self.expr_width(rhs)?;
                if kind.requires_equal_widths() && lw != rw {
                    return Err(RtlError::WidthMismatch { expected: lw, found: rw });
                }
                Ok(lw)
            }
            Expr::Not(e) => self.expr_width(e),
            Expr::Slice { operand, low, len } => {
                let w = self.expr_width(operand)?;
                if *len == 0 || low.checked_add(*len).map_or(true, |end| end > w) {
                    return Err(RtlError::SliceOutOfBounds { low: *low, len: *len, width: w });
                }
                Ok(*len)
            }
            Expr::Concat(parts) => {
                if parts.is_empty() {
                    return Err(RtlError::EmptyConcat);
                }
                let mut total = 0u32;
                for p in parts {
                    total += self.expr_width(p)?;
                    if total > MAX_WIDTH {
                        return Err(RtlError::ConcatTooWide(total));
                    }
                }
                Ok(total)
            }
            Expr::Mux { select, when_one, when_zero } => {
                let sw = self.expr_width(select)?;
                if sw != 1 {
                    return Err(RtlError::BadMuxSelect(sw));
                }
                let a = self.expr_width(when_one)?;
                let b = self.expr_width(when_zero)?;
                if a != b {
                    return Err(RtlError::WidthMismatch { expected: a, found: b });
                }
                Ok(a)
            }
            Expr::Eq { lhs, rhs } => {
                let lw = self.expr_width(lhs)?;
                let rw = self.expr_width(rhs)?;
                if lw != rw {
                    return Err(RtlError::WidthMismatch { expected: lw, found: rw });
                }
                Ok(1)
            }
        }
    }

    /// Evaluates `expr` with signal values supplied by `env`.
    ///
    /// Wrapping arithmetic modulo `2^width`; shift and rotate amounts are
    /// read modulo the left operand's width.
    pub fn eval_expr(
        &self,
        expr: &Expr,
        env: &dyn Fn(SignalId) -> Option<u64>,
    ) -> Result<u64, RtlError> {
        let w = self.expr_width(expr)?;
        let _ = w;
        self.eval_inner(expr, env)
    }

    fn eval_inner(&self, expr: &Expr, env: &dyn Fn(SignalId) -> Option<u64>) -> Result<u64, RtlError> {
        match expr {
            Expr::Const { value, .. } => Ok(*value),
            Expr::Ref(id) => {
                env(*id).ok_or_else(|| RtlError::UnboundSignal(self.signal(*id).name.clone()))
            }
            Expr::BinOp { kind, lhs, rhs } => {
                let w = self.expr_width(lhs).expect("checked");
                let a = self.eval_inner(lhs, env)?;
                let b = self.eval_inner(rhs, env)?;
                Ok(eval_binop(*kind, a, b, w))
            }
            Expr::Not(e) => {
                let w = self.expr_width(e).expect("checked");
                Ok(!self.eval_inner(e, env)? & width_mask(w))
            }
            Expr::Slice { operand, low, len } => {
                let v = self.eval_inner(operand, env)?;
                Ok((v >> low) & width_mask(*len))
            }
            Expr::Concat(parts) => {
                let mut acc = 0u64;
                for p in parts {
                    let w = self.expr_width(p).expect("checked");
                    let v = self.eval_inner(p, env)?;
                    acc = if w >= 64 { v } else { (acc << w) | v };
                }
                Ok(acc)
            }
            Expr::Mux { select, when_one, when_zero } => {
                if self.eval_inner(select, env)? == 1 {
                    self.eval_inner(when_one, env)
                } else {
                    self.eval_inner(when_zero, env)
                }
            }
            Expr::Eq { lhs, rhs } => {
                Ok((self.eval_inner(lhs, env)? == self.eval_inner(rhs, env)?) as u64)
            }
        }
    }

    /// Validates the whole design: single drivers everywhere, no
    /// combinational loops, all expression widths consistent.
    pub fn check(&self) -> ValidationReport {
        let mut violations = Vec::new();

        // Driver census.
        let mut drivers = vec![0u32; self.signals.len()];
        for &(id, dir) in &self.ports {
            if dir == Direction::In {
                drivers[id.index()] += 1;
            }
        }
        for &(t, _) in &self.comb_assigns {
            drivers[t.index()] += 1;
        }
        for r in &self.registers {
            drivers[r.target.index()] += 1;
        }
        for sig in &self.signals {
            match drivers[sig.id.index()] {
                0 => violations.push(Violation::Undriven(sig.name.clone())),
                1 => {}
                _ => violations.push(Violation::MultipleDrivers(sig.name.clone())),
            }
        }

        // Width checks.
        for &(t, ref e) in &self.comb_assigns {
            match self.expr_width(e) {
                Ok(w) if w == self.width(t) => {}
                Ok(w) => violations.push(Violation::WidthError {
                    signal: self.signal(t).name.clone(),
                    detail: format!("driver width {w}, signal width {}", self.width(t)),
                }),
                Err(e) => violations.push(Violation::WidthError {
                    signal: self.signal(t).name.clone(),
                    detail: e.to_string(),
                }),
            }
        }
        for r in &self.registers {
            match self.expr_width(&r.next) {
                Ok(w) if w == self.width(r.target) => {}
                Ok(w) => violations.push(Violation::WidthError {
                    signal: self.signal(r.target).name.clone(),
                    detail: format!("next width {w}, register width {}", self.width(r.target)),
                }),
                Err(e) => violations.push(Violation::WidthError {
                    signal: self.signal(r.target).name.clone(),
                    detail: e.to_string(),
                }),
            }
        }

        // Combinational loops: registers and inputs break cycles.
        if let Err(cycle) = self.comb_topo_order() {
            violations.push(Violation::CombinationalLoop(
                cycle.into_iter().map(|id| self.signal(id).name.clone()).collect(),
            ));
        }

        ValidationReport { violations }
    }

    /// Topologically orders the combinational assignments, or returns a
    /// signal cycle if one exists.
    pub(crate) fn comb_topo_order(&self) -> Result<Vec<usize>, Vec<SignalId>> {
        // assign index per target
        let mut assign_of: HashMap<SignalId, usize> = HashMap::new();
        for (i, &(t, _)) in self.comb_assigns.iter().enumerate() {
            assign_of.insert(t, i);
        }
        let n = self.comb_assigns.len();
        let mut state = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();

        fn deps(expr: &Expr, out: &mut Vec<SignalId>) {
            match expr {
                Expr::Const { .. } => {}
                Expr::Ref(id) => out.push(*id),
                Expr::BinOp { lhs, rhs, .. } | Expr::Eq { lhs, rhs } => {
                    deps(lhs, out);
                    deps(rhs, out);
                }
                Expr::Not(e) => deps(e, out),
                Expr::Slice { operand, .. } => deps(operand, out),
                Expr::Concat(parts) => parts.iter().for_each(|p| deps(p, out)),
                Expr::Mux { select, when_one, when_zero } => {
                    deps(select, out);
                    deps(when_one, out);
                    deps(when_zero, out);
                }
            }
        }

        let dep_lists: Vec<Vec<usize>> = self
            .comb_assigns
            .iter()
            .map(|(_, e)| {
                let mut ids = Vec::new();
                deps(e, &mut ids);
                ids.into_iter().filter_map(|id| assign_of.get(&id).copied()).collect()
            })
            .collect();

        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            stack.push((start, 0));
            state[start] = 1;
            while let Some((node, mut edge)) = stack.pop() {
                if edge < dep_lists[node].len() {
                    let next = dep_lists[node][edge];
                    edge += 1;
                    stack.push((node, edge));
                    match state[next] {
                        0 => {
                            state[next] = 1;
                            stack.push((next, 0));
                        }
                        1 => {
                            // Cycle: walk the explicit stack to extract it.
                            let mut cycle: Vec<SignalId> =
                                stack.iter().map(|&(i, _)| self.comb_assigns[i].0).collect();
                            if let Some(pos) =
                                cycle.iter().position(|&s| s == self.comb_assigns[next].0)
                            {
                                cycle.drain(..pos);
                            }
                            return Err(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                    order.push(node);
                }
            }
        }
        Ok(order)
    }

    /// `check` + error conversion, for call sites that need a valid design.
    pub fn validated(&self) -> Result<(), RtlError> {
        let report = self.check();
        if report.is_ok() {
            Ok(())
        } else {
            Err(RtlError::Invalid(report))
        }
    }
}

pub(crate) fn eval_binop(kind: BinOpKind, a: u64, b: u64, width: u32) -> u64 {
    let mask = width_mask(width);
    match kind {
        BinOpKind::Add => a.wrapping_add(b) & mask,
        BinOpKind::Sub => a.wrapping_sub(b) & mask,
        BinOpKind::Mul => a.wrapping_mul(b) & mask,
        BinOpKind::And => a & b,
        BinOpKind::Or => a | b,
        BinOpKind::Xor => a ^ b,
        BinOpKind::Shl => {
            let k = (b % width as u64) as u32;
            (a << k) & mask
        }
        BinOpKind::ShrLogical => {
            let k = (b % width as u64) as u32;
            a >> k
        }
        BinOpKind::RotR => {
            let k = (b % width as u64) as u32;
            if k == 0 {
                a
            } else {
                ((a >> k) | (a << (width - k))) & mask
            }
        }
    }
}
