use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rngforge_core::battery::{
    format_machine, format_report, run_battery, Assessment, AssessmentPolicy, BatterySizes,
    ReaderWordSource, TestSelection,
};
use rngforge_core::pcg::{golden_stream, randu_stream, validate_config, PcgConfig};
use rngforge_core::sim::Simulation;
use rngforge_core::vcd::VcdTrace;
use rngforge_core::verilog::emit_verilog;
use rngforge_core::wishbone::{
    build_rng_with_wishbone, format_transcript, regmap, WbMaster, PORT_NAMES,
};

#[derive(Parser)]
#[command(name = "rngforge", version, about = "RNG hardware workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Accepts decimal or 0x-prefixed hex.
fn parse_u64(s: &str) -> Result<u64, String> {
    let r = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    r.map_err(|e| format!("{s:?}: {e}"))
}

#[derive(Args, Clone, Copy)]
struct GenParams {
    /// Initial generator state
    #[arg(long, default_value = "0", value_parser = parse_u64)]
    seed: u64,
    /// LCG multiplier
    #[arg(long, default_value = "0x5851F42D4C957F2D", value_parser = parse_u64)]
    mult: u64,
    /// LCG increment
    #[arg(long, default_value = "0x14057B7EF767814F", value_parser = parse_u64)]
    inc: u64,
}

impl GenParams {
    fn config(&self) -> PcgConfig {
        PcgConfig { seed: self.seed, multiplier: self.mult, increment: self.inc }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    /// Software golden model
    Golden,
    /// Cycle-accurate RTL simulation of the datapath
    Rtl,
    /// RANDU negative control (ignores --mult/--inc)
    Randu,
}

#[derive(Subcommand)]
enum Command {
    /// Write 32-bit words to stdout as big-endian bytes
    Generate {
        #[arg(long, default_value_t = 1024)]
        count: usize,
        #[command(flatten)]
        params: GenParams,
        #[arg(long, value_enum, default_value_t = Source::Golden)]
        source: Source,
    },
    /// Run the peripheral with a program-and-sample testbench
    Simulate {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        cycles: u64,
        #[command(flatten)]
        params: GenParams,
        /// Write a VCD trace of every signal to this path
        #[arg(long)]
        vcd: Option<PathBuf>,
        /// Stamp the VCD with a fixed date for byte-identical reruns
        #[arg(long)]
        reproducible: bool,
    },
    /// Emit the Wishbone peripheral as synthesizable Verilog-2001
    EmitVerilog {
        /// Output path, `-` for stdout
        #[arg(long, default_value = "-")]
        out: String,
        #[command(flatten)]
        params: GenParams,
    },
    /// Run the statistical battery over a word stream
    Battery {
        /// Input file of big-endian 32-bit words, `-` for stdin
        #[arg(long, default_value = "-")]
        input: String,
        /// Comma-separated subset: monobit,runs,serial,birthdays,rank32
        #[arg(long, value_delimiter = ',')]
        tests: Option<Vec<String>>,
        /// Bits per sample for the bit-stream tests
        #[arg(long, default_value_t = 100_000)]
        tsamples: usize,
        /// Samples combined per reported p-value
        #[arg(long, default_value_t = 20)]
        psamples: u32,
        /// Tab-separated rows instead of the table
        #[arg(long)]
        machine: bool,
    },
    /// Scripted bus session: program, load, sample; prints the transcript
    WbDemo {
        #[command(flatten)]
        params: GenParams,
        /// Number of sampled words
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Write a VCD trace of the session to this path
        #[arg(long)]
        vcd: Option<PathBuf>,
        /// Stamp the VCD with a fixed date for byte-identical reruns
        #[arg(long)]
        reproducible: bool,
    },
}

fn warn_config(config: &PcgConfig) {
    for w in validate_config(config) {
        eprintln!("warning: {w:?}: generator period will be degenerate");
    }
}

fn vcd_date(reproducible: bool) -> String {
    if reproducible {
        String::new()
    } else {
        // Wall-clock seconds are enough; VCD dates are informational.
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("unix {secs}")
    }
}

fn write_vcd(trace: &VcdTrace, path: &PathBuf, reproducible: bool) -> Result<()> {
    let mut out = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    trace.write(&mut out, &vcd_date(reproducible))?;
    out.flush()?;
    Ok(())
}

fn cmd_generate(count: usize, params: &GenParams, source: Source) -> Result<()> {
    let config = params.config();
    if source != Source::Randu {
        warn_config(&config);
    }
    let words = match source {
        Source::Golden => golden_stream(&config, count),
        Source::Randu => randu_stream(config.seed as u32, count),
        Source::Rtl => {
            // The peripheral free-runs out of reset (ENABLE resets to 1);
            // sample its output permutation every cycle.
            let (design, handles) = build_rng_with_wishbone(&config)?;
            let mut sim = Simulation::new(&design)?;
            let mut words = Vec::with_capacity(count);
            for _ in 0..count {
                sim.settle();
                words.push(sim.value(handles.output) as u32);
                sim.step_clock();
            }
            words
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let written: io::Result<()> = (|| {
        for w in words {
            out.write_all(&w.to_be_bytes())?;
        }
        out.flush()
    })();
    match written {
        // Downstream reader closed the pipe early; not our error.
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn cmd_simulate(
    cycles: u64,
    params: &GenParams,
    vcd: Option<&PathBuf>,
    reproducible: bool,
) -> Result<()> {
    let config = params.config();
    warn_config(&config);
    let (design, handles) = build_rng_with_wishbone(&config)?;
    let mut sim = Simulation::new(&design)?;
    let mut trace = vcd.map(|_| VcdTrace::all_signals(&design));
    let mut master = WbMaster::new(handles);
    // Each transaction occupies at least three cycles, so this many
    // sample pairs always outlasts the budget.
    for txn in program_and_sample_script(&config, cycles as usize / 3 + 1) {
        master.enqueue(txn);
    }
    // Fixed cycle budget: the script simply stops partway if it is longer
    // than the run.
    let this: &mut dyn rngforge_core::sim::TestbenchProcess = &mut master;
    sim.run(cycles, &mut [this], trace.as_mut())?;
    if let (Some(trace), Some(path)) = (&trace, vcd) {
        write_vcd(trace, path, reproducible)?;
    }
    sim.settle();
    println!(
        "simulated {} cycles: state={:#018x} output={:#010x} transactions={}",
        cycles,
        sim.value(handles.state),
        sim.value(handles.output) as u32,
        master.transcript().len(),
    );
    Ok(())
}

/// The canonical bus session: pause, program seed/mult/inc, read the seed
/// back, LOAD, then sample outputs via STEP.
fn program_and_sample_script(
    config: &PcgConfig,
    samples: usize,
) -> Vec<rngforge_core::wishbone::WbTransaction> {
    use rngforge_core::wishbone::WbTransaction::{Read, Write};
    let lo = |v: u64| (v & 0xFFFF_FFFF) as u32;
    let hi = |v: u64| (v >> 32) as u32;
    let mut script = vec![
        Write { offset: regmap::CTRL, value: 0 }, // pause free-running
        Write { offset: regmap::SEED_LO, value: lo(config.seed) },
        Write { offset: regmap::SEED_HI, value: hi(config.seed) },
        Write { offset: regmap::MULT_LO, value: lo(config.multiplier) },
        Write { offset: regmap::MULT_HI, value: hi(config.multiplier) },
        Write { offset: regmap::INC_LO, value: lo(config.increment) },
        Write { offset: regmap::INC_HI, value: hi(config.increment) },
        Read { offset: regmap::SEED_LO },
        Read { offset: regmap::SEED_HI },
        Write { offset: regmap::CTRL, value: regmap::CTRL_LOAD },
    ];
    for _ in 0..samples {
        script.push(Read { offset: regmap::OUTPUT });
        script.push(Write { offset: regmap::CTRL, value: regmap::CTRL_STEP });
    }
    script
}

fn cmd_emit_verilog(out_path: &str, params: &GenParams) -> Result<()> {
    let config = params.config();
    let (design, _) = build_rng_with_wishbone(&config)?;
    let text = emit_verilog(&design, "wb_clk_i", "wb_rst_i")?;
    if out_path == "-" {
        io::stdout().write_all(text.as_bytes())?;
    } else {
        std::fs::write(out_path, &text).with_context(|| format!("writing {out_path}"))?;
        eprintln!("wrote module RNG to {out_path}");
    }
    eprintln!("ports: {}", PORT_NAMES.join(", "));
    Ok(())
}

fn parse_selections(names: Option<&[String]>) -> Result<Vec<TestSelection>> {
    let all = [
        ("monobit", TestSelection::Monobit),
        ("runs", TestSelection::Runs),
        ("serial", TestSelection::Serial(4)),
        ("birthdays", TestSelection::Birthday),
        ("rank32", TestSelection::Rank32),
    ];
    let Some(names) = names else {
        return Ok(all.iter().map(|&(_, s)| s).collect());
    };
    let mut picked = Vec::new();
    for name in names {
        match all.iter().find(|(n, _)| n == name) {
            Some(&(_, s)) => picked.push(s),
            None => bail!(
                "unknown test {name:?}; available: {}",
                all.map(|(n, _)| n).join(", ")
            ),
        }
    }
    Ok(picked)
}

fn cmd_battery(
    input: &str,
    tests: Option<&[String]>,
    tsamples: usize,
    psamples: u32,
    machine: bool,
) -> Result<ExitCode> {
    let selections = parse_selections(tests)?;
    let sizes = BatterySizes { tsamples_bits: tsamples, psamples, ..Default::default() };
    let reader: Box<dyn Read> = if input == "-" {
        Box::new(io::stdin().lock())
    } else {
        Box::new(File::open(input).with_context(|| format!("opening {input}"))?)
    };
    let mut source = ReaderWordSource::new(io::BufReader::new(reader));
    let report = run_battery(&mut source, &selections, &sizes, &AssessmentPolicy::default());
    if source.truncated {
        eprintln!("warning: trailing fragment of fewer than 4 bytes was ignored");
    }
    if machine {
        print!("{}", format_machine(&report.results));
    } else {
        print!("{}", format_report(&report.results));
    }
    for skip in &report.skipped {
        eprintln!("skipped {}: {}", skip.test_name, skip.reason);
    }
    let failed = report.results.iter().any(|r| r.assessment == Assessment::Failed);
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_wb_demo(
    params: &GenParams,
    samples: usize,
    vcd: Option<&PathBuf>,
    reproducible: bool,
) -> Result<()> {
    let config = params.config();
    warn_config(&config);
    let (design, handles) = build_rng_with_wishbone(&config)?;
    let mut sim = Simulation::new(&design)?;
    let mut trace = vcd.map(|_| VcdTrace::all_signals(&design));
    let mut master = WbMaster::new(handles);

    for txn in program_and_sample_script(&config, samples) {
        master.enqueue(txn);
    }
    master.run_to_completion(&mut sim, trace.as_mut())?;
    print!("{}", format_transcript(master.transcript()));
    if let (Some(trace), Some(path)) = (&trace, vcd) {
        write_vcd(trace, path, reproducible)?;
    }
    let expected = golden_stream(&config, samples);
    let got: Vec<u32> = master
        .transcript()
        .iter()
        .filter(|e| !e.is_write && e.offset == regmap::OUTPUT)
        .map(|e| e.value)
        .collect();
    if got == expected {
        println!("# {} samples match the golden model", samples);
    } else {
        bail!("sampled words diverge from the golden model");
    }
    Ok(())
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate { count, params, source } => {
            cmd_generate(count, &params, source)?;
        }
        Command::Simulate { cycles, params, vcd, reproducible } => {
            cmd_simulate(cycles, &params, vcd.as_ref(), reproducible)?;
        }
        Command::EmitVerilog { out, params } => {
            cmd_emit_verilog(&out, &params)?;
        }
        Command::Battery { input, tests, tsamples, psamples, machine } => {
            return cmd_battery(&input, tests.as_deref(), tsamples, psamples, machine);
        }
        Command::WbDemo { params, samples, vcd, reproducible } => {
            cmd_wb_demo(&params, samples, vcd.as_ref(), reproducible)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
