//! Golden-file checks: hand-audited emitter and trace outputs, pinned
//! byte-for-byte. Set `BLESS=1` to regenerate after an intentional
//! format change, then re-audit the diff.

use rngforge_core::rtl::{con, Direction, Expr, RtlDesign};
use rngforge_core::sim::Simulation;
use rngforge_core::vcd::VcdTrace;
use rngforge_core::verilog::emit_verilog;

/// An 8-bit wrapping counter with an enable input and a carry-out flag.
fn counter_design() -> RtlDesign {
    let mut d = RtlDesign::new("counter");
    let en = d.add_port("en", 1, Direction::In).unwrap();
    let count = d.add_port("count", 8, Direction::Out).unwrap();
    d.add_register(count, Expr::from(en).mux(Expr::from(count).add(con(1, 8)), count), 0)
        .unwrap();
    let wrap = d.add_port("wrap", 1, Direction::Out).unwrap();
    d.assign_comb(wrap, Expr::from(count).eq(con(0xFF, 8))).unwrap();
    d
}

fn check_golden(path: &str, actual: &str) {
    let full = format!("{}/tests/golden/{}", env!("CARGO_MANIFEST_DIR"), path);
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&full, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&full)
        .unwrap_or_else(|e| panic!("missing golden file {full}: {e}"));
    assert_eq!(actual, expected, "{path} drifted from the committed golden");
}

#[test]
fn counter_verilog_matches_golden() {
    let d = counter_design();
    let text = emit_verilog(&d, "clk", "rst").unwrap();
    check_golden("counter.v", &text);
}

#[test]
fn counter_vcd_matches_golden() {
    let d = counter_design();
    let mut sim = Simulation::new(&d).unwrap();
    let mut trace = VcdTrace::all_signals(&d);
    let en = d.find_signal("en").unwrap();
    sim.set_input(en, 1).unwrap();
    sim.run(5, &mut [], Some(&mut trace)).unwrap();
    sim.set_input(en, 0).unwrap();
    sim.run(3, &mut [], Some(&mut trace)).unwrap();
    check_golden("counter.vcd", &trace.to_vcd_string("golden"));
}
