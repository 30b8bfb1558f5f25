//! Cycle-accurate two-phase simulator.
//!
//! Per cycle: testbench processes drive input ports, combinational signals
//! settle in topological order, the optional VCD trace records changes, and
//! finally all registers commit simultaneously from the settled values.
//! Register values therefore only ever change at the clock step, and a
//! process at cycle `k` observes the state as committed at the end of cycle
//! `k - 1`.

use thiserror::Error;

use crate::rtl::{eval_binop, width_mask, BinOpKind, Expr, RtlDesign, RtlError, SignalId};
use crate::vcd::VcdTrace;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Rtl(#[from] RtlError),
    #[error("cycle {cycle}: {fault}")]
    ProcessFault { cycle: u64, fault: String },
}

/// Expression compiled against a fixed design: widths resolved, signal
/// references lowered to dense indices.
#[derive(Debug, Clone)]
pub(crate) enum CompiledExpr {
    Const(u64),
    Ref(usize),
    Bin { kind: BinOpKind, width: u32, lhs: Box<CompiledExpr>, rhs: Box<CompiledExpr> },
    Not { mask: u64, operand: Box<CompiledExpr> },
    Slice { low: u32, mask: u64, operand: Box<CompiledExpr> },
    Concat(Vec<(u32, CompiledExpr)>),
    Mux { select: Box<CompiledExpr>, when_one: Box<CompiledExpr>, when_zero: Box<CompiledExpr> },
    Eq { lhs: Box<CompiledExpr>, rhs: Box<CompiledExpr> },
}

pub(crate) fn compile(design: &RtlDesign, expr: &Expr) -> CompiledExpr {
    match expr {
        Expr::Const { value, .. } => CompiledExpr::Const(*value),
        Expr::Ref(id) => CompiledExpr::Ref(id.index()),
        Expr::BinOp { kind, lhs, rhs } => CompiledExpr::Bin {
            kind: *kind,
            width: design.expr_width(lhs).expect("validated"),
            lhs: Box::new(compile(design, lhs)),
            rhs: Box::new(compile(design, rhs)),
        },
        Expr::Not(e) => CompiledExpr::Not {
            mask: width_mask(design.expr_width(e).expect("validated")),
            operand: Box::new(compile(design, e)),
        },
        Expr::Slice { operand, low, len } => CompiledExpr::Slice {
            low: *low,
            mask: width_mask(*len),
            operand: Box::new(compile(design, operand)),
        },
        Expr::Concat(parts) => CompiledExpr::Concat(
            parts
                .iter()
                .map(|p| (design.expr_width(p).expect("validated"), compile(design, p)))
                .collect(),
        ),
        Expr::Mux { select, when_one, when_zero } => CompiledExpr::Mux {
            select: Box::new(compile(design, select)),
            when_one: Box::new(compile(design, when_one)),
            when_zero: Box::new(compile(design, when_zero)),
        },
        Expr::Eq { lhs, rhs } => CompiledExpr::Eq {
            lhs: Box::new(compile(design, lhs)),
            rhs: Box::new(compile(design, rhs)),
        },
    }
}

pub(crate) fn eval_compiled(expr: &CompiledExpr, values: &[u64]) -> u64 {
    match expr {
        CompiledExpr::Const(v) => *v,
        CompiledExpr::Ref(i) => values[*i],
        CompiledExpr::Bin { kind, width, lhs, rhs } => {
            eval_binop(*kind, eval_compiled(lhs, values), eval_compiled(rhs, values), *width)
        }
        CompiledExpr::Not { mask, operand } => !eval_compiled(operand, values) & mask,
        CompiledExpr::Slice { low, mask, operand } => (eval_compiled(operand, values) >> low) & mask,
        CompiledExpr::Concat(parts) => {
            let mut acc = 0u64;
            for (w, p) in parts {
                let v = eval_compiled(p, values);
                acc = if *w >= 64 { v } else { (acc << w) | v };
            }
            acc
        }
        CompiledExpr::Mux { select, when_one, when_zero } => {
            if eval_compiled(select, values) == 1 {
                eval_compiled(when_one, values)
            } else {
                eval_compiled(when_zero, values)
            }
        }
        CompiledExpr::Eq { lhs, rhs } => {
            (eval_compiled(lhs, values) == eval_compiled(rhs, values)) as u64
        }
    }
}

/// View of the simulation exposed to testbench processes.
pub struct ProcCtx<'a> {
    design: &'a RtlDesign,
    values: &'a mut [u64],
    cycle: u64,
}

impl ProcCtx<'_> {
    /// Value of `id` as of the previous cycle (registers: as committed at
    /// the most recent clock step).
    pub fn read(&self, id: SignalId) -> u64 {
        self.values[id.index()]
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// Drives an input port for the current cycle.
    pub fn drive(&mut self, id: SignalId, value: u64) -> Result<(), RtlError> {
        if !self.design.is_input(id) {
            return Err(RtlError::NotAnInput(self.design.signal(id).name.clone()));
        }
        self.values[id.index()] = value & width_mask(self.design.width(id));
        Ok(())
    }
}

/// A per-cycle callback driving input ports.
pub trait TestbenchProcess {
    fn step(&mut self, ctx: &mut ProcCtx<'_>) -> Result<(), String>;
}

impl<F> TestbenchProcess for F
where
    F: FnMut(&mut ProcCtx<'_>) -> Result<(), String>,
{
    fn step(&mut self, ctx: &mut ProcCtx<'_>) -> Result<(), String> {
        self(ctx)
    }
}

/// A running simulation of one validated design.
pub struct Simulation<'d> {
    design: &'d RtlDesign,
    comb: Vec<(usize, CompiledExpr)>,
    regs: Vec<(usize, CompiledExpr, u64)>,
    reset_idx: Option<usize>,
    next_buf: Vec<u64>,
    values: Vec<u64>,
    cycle: u64,
}

impl<'d> Simulation<'d> {
    /// Validates the design and prepares an execution plan. All registers
    /// start at their reset values; combinational signals are settled.
    pub fn new(design: &'d RtlDesign) -> Result<Self, SimError> {
        design.validated()?;
        let order = design.comb_topo_order().expect("validated");
        let comb: Vec<(usize, CompiledExpr)> = order
            .into_iter()
            .map(|i| {
                let (target, expr) = &design.comb_assigns()[i];
                (target.index(), compile(design, expr))
            })
            .collect();
        let regs: Vec<(usize, CompiledExpr, u64)> = design
            .registers()
            .iter()
            .map(|r| (r.target.index(), compile(design, &r.next), r.reset_value))
            .collect();
        let mut values = vec![0u64; design.signals().len()];
        for &(idx, _, reset) in &regs {
            values[idx] = reset;
        }
        let mut sim = Simulation {
            design,
            next_buf: vec![0; regs.len()],
            comb,
            regs,
            reset_idx: design.reset_signal().map(SignalId::index),
            values,
            cycle: 0,
        };
        sim.settle();
        Ok(sim)
    }

    pub fn design(&self) -> &'d RtlDesign {
        self.design
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn value(&self, id: SignalId) -> u64 {
        self.values[id.index()]
    }

    /// Drives an input port directly (outside of any process).
    pub fn set_input(&mut self, id: SignalId, value: u64) -> Result<(), RtlError> {
        if !self.design.is_input(id) {
            return Err(RtlError::NotAnInput(self.design.signal(id).name.clone()));
        }
        self.values[id.index()] = value & width_mask(self.design.width(id));
        Ok(())
    }

    /// Recomputes every combinational signal in topological order.
    pub fn settle(&mut self) {
        for (idx, expr) in &self.comb {
            self.values[*idx] = eval_compiled(expr, &self.values);
        }
    }

    /// Commits all register next-values simultaneously from the settled
    /// state, then advances the cycle counter. While the reset input is
    /// asserted, registers load their reset values instead.
    pub fn step_clock(&mut self) {
        let in_reset = self.reset_idx.map_or(false, |i| self.values[i] == 1);
        if in_reset {
            for (k, &(_, _, reset)) in self.regs.iter().enumerate() {
                self.next_buf[k] = reset;
            }
        } else {
            for (k, (_, next, _)) in self.regs.iter().enumerate() {
                self.next_buf[k] = eval_compiled(next, &self.values);
            }
        }
        for (k, &(idx, _, _)) in self.regs.iter().enumerate() {
            self.values[idx] = self.next_buf[k];
        }
        self.cycle += 1;
    }

    /// Runs `cycles` full cycles: processes, settle, trace, clock step.
    pub fn run(
        &mut self,
        cycles: u64,
        processes: &mut [&mut dyn TestbenchProcess],
        trace: Option<&mut VcdTrace>,
    ) -> Result<(), SimError> {
        self.run_observed(cycles, processes, trace, |_| {})
    }

    /// [`run`](Self::run) with an observer called on the settled state of
    /// every cycle, before the clock step. Used by per-cycle invariant
    /// checks in tests.
    pub fn run_observed(
        &mut self,
        cycles: u64,
        processes: &mut [&mut dyn TestbenchProcess],
        mut trace: Option<&mut VcdTrace>,
        mut observe: impl FnMut(&Simulation<'_>),
    ) -> Result<(), SimError> {
        for _ in 0..cycles {
            let cycle = self.cycle;
            for p in processes.iter_mut() {
                let mut ctx = ProcCtx { design: self.design, values: &mut self.values, cycle };
                p.step(&mut ctx)
                    .map_err(|fault| SimError::ProcessFault { cycle, fault })?;
            }
            self.settle();
            if let Some(t) = trace.as_deref_mut() {
                t.record(cycle, &self.values);
            }
            observe(self);
            self.step_clock();
        }
        Ok(())
    }
}
