//! Wishbone B4 classic-cycle slave wrapping the generator datapath, plus a
//! bus-master testbench driver.
//!
//! The slave registers its ack: one ack cycle per transaction, asserted one
//! cycle after `cyc & stb` is observed. Reads return the register selected
//! by the low 8 address bits; writes commit on the ack cycle. `wbs_sel_i`
//! is accepted but ignored (full-word accesses only).

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::pcg::{xsh_rr_expr, PcgConfig};
use crate::rtl::{con, Direction, Expr, RtlDesign, RtlError, SignalId};
use crate::sim::{ProcCtx, SimError, Simulation, TestbenchProcess};
use crate::vcd::VcdTrace;

/// Byte offsets of the slave's register map.
pub mod regmap {
    /// Current 32-bit generator output (read-only).
    pub const OUTPUT: u32 = 0x00;
    pub const SEED_LO: u32 = 0x04;
    pub const SEED_HI: u32 = 0x08;
    pub const MULT_LO: u32 = 0x0C;
    pub const MULT_HI: u32 = 0x10;
    pub const INC_LO: u32 = 0x14;
    pub const INC_HI: u32 = 0x18;
    /// Control register: bit 0 LOAD (self-clearing, state <= seed),
    /// bit 1 ENABLE (free-run, resets to 1), bit 2 STEP (self-clearing,
    /// advance exactly once).
    pub const CTRL: u32 = 0x1C;

    pub const CTRL_LOAD: u32 = 1 << 0;
    pub const CTRL_ENABLE: u32 = 1 << 1;
    pub const CTRL_STEP: u32 = 1 << 2;

    /// Offsets that hold written values and read them back.
    pub const WRITABLE: [u32; 6] = [SEED_LO, SEED_HI, MULT_LO, MULT_HI, INC_LO, INC_HI];
}

/// The ten Caravel-facing port names, in declaration order.
pub const PORT_NAMES: [&str; 10] = [
    "wb_clk_i", "wb_rst_i", "wbs_cyc_i", "wbs_stb_i", "wbs_we_i", "wbs_sel_i", "wbs_dat_i",
    "wbs_adr_i", "wbs_ack_o", "wbs_dat_o",
];

/// Signal handles on the RNG design.
#[derive(Debug, Clone, Copy)]
pub struct WbHandles {
    pub clk: SignalId,
    pub rst: SignalId,
    pub cyc: SignalId,
    pub stb: SignalId,
    pub we: SignalId,
    pub sel: SignalId,
    pub dat_i: SignalId,
    pub adr: SignalId,
    pub ack: SignalId,
    pub dat_o: SignalId,
    pub state: SignalId,
    pub output: SignalId,
    pub enable: SignalId,
}

/// 64-bit register with 32-bit LO/HI write ports decoded from `off`.
fn half_writable_reg(
    d: &mut RtlDesign,
    target: SignalId,
    write_en: SignalId,
    off: SignalId,
    dat: SignalId,
    lo_offset: u32,
    reset_value: u64,
) -> Result<(), RtlError> {
    let wr_lo = Expr::from(write_en).and(Expr::from(off).eq(con(lo_offset as u64, 8)));
    let wr_hi = Expr::from(write_en).and(Expr::from(off).eq(con(lo_offset as u64 + 4, 8)));
    let hi_part = Expr::from(target).slice(32, 32);
    let lo_part = Expr::from(target).slice(0, 32);
    let next = wr_lo.mux(
        Expr::concat(vec![hi_part, Expr::from(dat)]),
        wr_hi.mux(Expr::concat(vec![Expr::from(dat), lo_part]), Expr::from(target)),
    );
    d.add_register(target, next, reset_value)
}

/// Builds the validated `RNG` design: the generator datapath behind a
/// Wishbone classic-cycle slave with the Caravel port roster.
pub fn build_rng_with_wishbone(config: &PcgConfig) -> Result<(RtlDesign, WbHandles), RtlError> {
    let mut d = RtlDesign::new("RNG");

    let clk = d.add_port("wb_clk_i", 1, Direction::In)?;
    let rst = d.add_port("wb_rst_i", 1, Direction::In)?;
    let cyc = d.add_port("wbs_cyc_i", 1, Direction::In)?;
    let stb = d.add_port("wbs_stb_i", 1, Direction::In)?;
    let we = d.add_port("wbs_we_i", 1, Direction::In)?;
    let sel = d.add_port("wbs_sel_i", 4, Direction::In)?;
    let dat_i = d.add_port("wbs_dat_i", 32, Direction::In)?;
    let adr = d.add_port("wbs_adr_i", 32, Direction::In)?;
    let ack = d.add_port("wbs_ack_o", 1, Direction::Out)?;
    let dat_o = d.add_port("wbs_dat_o", 32, Direction::Out)?;
    d.set_reset(rst)?;

    let seed = d.add_signal("seed", 64)?;
    let multiplier = d.add_signal("multiplier", 64)?;
    let increment = d.add_signal("increment", 64)?;
    let state = d.add_signal("state", 64)?;
    let enable = d.add_signal("enable", 1)?;

    let req = d.add_signal("req", 1)?;
    d.assign_comb(req, Expr::from(cyc).and(stb))?;
    let off = d.add_signal("reg_off", 8)?;
    d.assign_comb(off, Expr::from(adr).slice(0, 8))?;
    let output = d.add_signal("output", 32)?;
    d.assign_comb(output, xsh_rr_expr(state.into()))?;

    // Registered ack: exactly one high cycle per held request.
    d.add_register(ack, Expr::from(req).and(Expr::from(ack).not()), 0)?;

    let write_en = d.add_signal("write_en", 1)?;
    d.assign_comb(write_en, Expr::from(req).and(we).and(ack))?;
    let ctrl_wr = d.add_signal("ctrl_wr", 1)?;
    d.assign_comb(
        ctrl_wr,
        Expr::from(write_en).and(Expr::from(off).eq(con(regmap::CTRL as u64, 8))),
    )?;
    let load = d.add_signal("load_pulse", 1)?;
    d.assign_comb(load, Expr::from(ctrl_wr).and(Expr::from(dat_i).slice(0, 1)))?;
    let step = d.add_signal("step_pulse", 1)?;
    d.assign_comb(step, Expr::from(ctrl_wr).and(Expr::from(dat_i).slice(2, 1)))?;

    d.add_register(enable, Expr::from(ctrl_wr).mux(Expr::from(dat_i).slice(1, 1), enable), 1)?;

    half_writable_reg(&mut d, seed, write_en, off, dat_i, regmap::SEED_LO, config.seed)?;
    half_writable_reg(&mut d, multiplier, write_en, off, dat_i, regmap::MULT_LO, config.multiplier)?;
    half_writable_reg(&mut d, increment, write_en, off, dat_i, regmap::INC_LO, config.increment)?;

    // LOAD wins over a simultaneous advance.
    let advance = Expr::from(enable).or(step);
    let lcg = Expr::from(state).mul(multiplier).add(increment);
    d.add_register(
        state,
        Expr::from(load).mux(seed, advance.mux(lcg, state)),
        config.seed,
    )?;

    // Read decode, captured the cycle before ack so it is stable on the
    // ack cycle. Unmapped offsets read as zero.
    let ctrl_read = Expr::concat(vec![con(0, 30), Expr::from(enable), con(0, 1)]);
    let sel_read = |offset: u32, value: Expr, otherwise: Expr| {
        Expr::from(off).eq(con(offset as u64, 8)).mux(value, otherwise)
    };
    let read_data = sel_read(
        regmap::OUTPUT,
        output.into(),
        sel_read(
            regmap::SEED_LO,
            Expr::from(seed).slice(0, 32),
            sel_read(
                regmap::SEED_HI,
                Expr::from(seed).slice(32, 32),
                sel_read(
                    regmap::MULT_LO,
                    Expr::from(multiplier).slice(0, 32),
                    sel_read(
                        regmap::MULT_HI,
                        Expr::from(multiplier).slice(32, 32),
                        sel_read(
                            regmap::INC_LO,
                            Expr::from(increment).slice(0, 32),
                            sel_read(
                                regmap::INC_HI,
                                Expr::from(increment).slice(32, 32),
                                sel_read(regmap::CTRL, ctrl_read, con(0, 32)),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    );
    d.add_register(
        dat_o,
        Expr::from(req).and(Expr::from(we).not()).mux(read_data, dat_o),
        0,
    )?;

    d.validated()?;
    let handles = WbHandles {
        clk,
        rst,
        cyc,
        stb,
        we,
        sel,
        dat_i,
        adr,
        ack,
        dat_o,
        state,
        output,
        enable,
    };
    Ok((d, handles))
}

#[derive(Debug, Error)]
pub enum WbError {
    #[error("no ack within {limit} cycles for {kind} at offset {offset:#04x}")]
    Timeout { kind: &'static str, offset: u32, limit: u64 },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Rtl(#[from] RtlError),
}

/// One bus transaction for a scripted scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WbTransaction {
    Read { offset: u32 },
    Write { offset: u32, value: u32 },
}

/// A completed transaction: read value or echoed write value, plus the
/// cycle on which the slave acked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub offset: u32,
    pub is_write: bool,
    pub value: u32,
    pub ack_cycle: u64,
}

/// Renders transcript lines: `R 0x00 -> 0x1234ABCD` / `W 0x04 <= 0x0000002A`.
pub fn format_transcript(entries: &[TranscriptEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        if e.is_write {
            writeln!(out, "W {:#04x} <= {:#010x}", e.offset, e.value).unwrap();
        } else {
            writeln!(out, "R {:#04x} -> {:#010x}", e.offset, e.value).unwrap();
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum MasterState {
    Idle,
    Waiting { txn: WbTransaction, waited: u64 },
    Turnaround,
}

/// Classic-cycle bus master: holds `cyc & stb` until ack, keeps them
/// asserted through the ack cycle, then idles for one cycle before the
/// next transaction.
pub struct WbMaster {
    handles: WbHandles,
    script: VecDeque<WbTransaction>,
    transcript: Vec<TranscriptEntry>,
    state: MasterState,
    timeout: u64,
    fault: Option<WbError>,
}

impl WbMaster {
    pub fn new(handles: WbHandles) -> Self {
        WbMaster {
            handles,
            script: VecDeque::new(),
            transcript: Vec::new(),
            state: MasterState::Idle,
            timeout: 16,
            fault: None,
        }
    }

    pub fn enqueue(&mut self, txn: WbTransaction) {
        self.script.push_back(txn);
    }

    pub fn idle(&self) -> bool {
        matches!(self.state, MasterState::Idle) && self.script.is_empty()
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn into_transcript(self) -> Vec<TranscriptEntry> {
        self.transcript
    }

    fn drive_txn(&self, ctx: &mut ProcCtx<'_>, txn: &WbTransaction) -> Result<(), String> {
        let h = &self.handles;
        let (offset, we, value) = match *txn {
            WbTransaction::Read { offset } => (offset, 0, 0),
            WbTransaction::Write { offset, value } => (offset, 1, value as u64),
        };
        ctx.drive(h.cyc, 1).map_err(|e| e.to_string())?;
        ctx.drive(h.stb, 1).map_err(|e| e.to_string())?;
        ctx.drive(h.we, we).map_err(|e| e.to_string())?;
        ctx.drive(h.sel, 0xF).map_err(|e| e.to_string())?;
        ctx.drive(h.adr, offset as u64).map_err(|e| e.to_string())?;
        ctx.drive(h.dat_i, value).map_err(|e| e.to_string())?;
        Ok(())
    }

    fn drive_idle(&self, ctx: &mut ProcCtx<'_>) -> Result<(), String> {
        ctx.drive(self.handles.cyc, 0).map_err(|e| e.to_string())?;
        ctx.drive(self.handles.stb, 0).map_err(|e| e.to_string())?;
        Ok(())
    }

    /// Runs the simulation until the whole script has completed.
    pub fn run_to_completion(
        &mut self,
        sim: &mut Simulation<'_>,
        mut trace: Option<&mut VcdTrace>,
    ) -> Result<(), WbError> {
        while !self.idle() {
            let this: &mut dyn TestbenchProcess = self;
            if let Err(e) = sim.run(1, &mut [this], trace.as_deref_mut()) {
                return Err(self.fault.take().unwrap_or(WbError::Sim(e)));
            }
        }
        Ok(())
    }

    /// Classic write cycle; returns the cycle on which the slave acked.
    pub fn write(
        &mut self,
        sim: &mut Simulation<'_>,
        offset: u32,
        value: u32,
    ) -> Result<u64, WbError> {
        self.enqueue(WbTransaction::Write { offset, value });
        self.run_to_completion(sim, None)?;
        Ok(self.transcript.last().expect("transaction completed").ack_cycle)
    }

    /// Classic read cycle; returns `wbs_dat_o` sampled on the ack cycle.
    pub fn read(&mut self, sim: &mut Simulation<'_>, offset: u32) -> Result<u32, WbError> {
        self.enqueue(WbTransaction::Read { offset });
        self.run_to_completion(sim, None)?;
        Ok(self.transcript.last().expect("transaction completed").value)
    }
}

impl TestbenchProcess for WbMaster {
    fn step(&mut self, ctx: &mut ProcCtx<'_>) -> Result<(), String> {
        match self.state {
            MasterState::Idle => match self.script.pop_front() {
                None => self.drive_idle(ctx),
                Some(txn) => {
                    self.drive_txn(ctx, &txn)?;
                    self.state = MasterState::Waiting { txn, waited: 0 };
                    Ok(())
                }
            },
            MasterState::Waiting { txn, waited } => {
                let acked = ctx.read(self.handles.ack) == 1;
                if acked {
                    let entry = match txn {
                        WbTransaction::Read { offset } => TranscriptEntry {
                            offset,
                            is_write: false,
                            value: ctx.read(self.handles.dat_o) as u32,
                            ack_cycle: ctx.cycle(),
                        },
                        WbTransaction::Write { offset, value } => TranscriptEntry {
                            offset,
                            is_write: true,
                            value,
                            ack_cycle: ctx.cycle(),
                        },
                    };
                    self.transcript.push(entry);
                    // Hold the request through the ack cycle.
                    self.drive_txn(ctx, &txn)?;
                    self.state = MasterState::Turnaround;
                    Ok(())
                } else if waited >= self.timeout {
                    let (kind, offset) = match txn {
                        WbTransaction::Read { offset } => ("read", offset),
                        WbTransaction::Write { offset, .. } => ("write", offset),
                    };
                    self.fault = Some(WbError::Timeout { kind, offset, limit: self.timeout });
                    Err(format!("no ack within {} cycles", self.timeout))
                } else {
                    self.drive_txn(ctx, &txn)?;
                    self.state = MasterState::Waiting { txn, waited: waited + 1 };
                    Ok(())
                }
            }
            MasterState::Turnaround => {
                self.drive_idle(ctx)?;
                self.state = MasterState::Idle;
                Ok(())
            }
        }
    }
}

/// Executes a transaction script on a fresh simulation of the design.
/// Returns the transcript and, when requested, the waveform trace.
pub fn run_wb_scenario(
    config: &PcgConfig,
    script: &[WbTransaction],
    want_trace: bool,
) -> Result<(Vec<TranscriptEntry>, Option<VcdTrace>), WbError> {
    let (design, handles) = build_rng_with_wishbone(config)?;
    let mut sim = Simulation::new(&design)?;
    let mut trace = want_trace.then(|| VcdTrace::all_signals(&design));
    let mut master = WbMaster::new(handles);
    for txn in script {
        master.enqueue(*txn);
    }
    master.run_to_completion(&mut sim, trace.as_mut())?;
    Ok((master.into_transcript(), trace))
}
