//! Core library: RTL intermediate representation, cycle-accurate
//! simulator, VCD tracing, Verilog-2001 emission, the PCG generator
//! (golden model + datapath), the Wishbone peripheral, and the
//! statistical battery.

pub mod battery;
pub mod pcg;
pub mod rtl;
pub mod sim;
pub mod vcd;
pub mod verilog;
pub mod wishbone;

pub use battery::{
    assess, format_report, run_battery, Assessment, AssessmentPolicy, BatteryError,
    BatteryReport, BatterySizes, TestResult, TestSelection, WordSource,
};
pub use pcg::{
    build_pcg_rtl, golden_next, golden_stream, randu_stream, validate_config, PcgConfig,
    PcgGolden, Randu, DEFAULT_INCREMENT, DEFAULT_MULTIPLIER,
};
pub use rtl::{con, Direction, Expr, RtlDesign, RtlError, SignalId};
pub use sim::{ProcCtx, SimError, Simulation, TestbenchProcess};
pub use vcd::VcdTrace;
pub use verilog::emit_verilog;
pub use wishbone::{
    build_rng_with_wishbone, format_transcript, regmap, run_wb_scenario, TranscriptEntry,
    WbError, WbHandles, WbMaster, WbTransaction, PORT_NAMES,
};
