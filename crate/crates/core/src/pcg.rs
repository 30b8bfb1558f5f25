//! The permuted congruential generator: pure-software golden model, RTL
//! datapath builder, and the RANDU negative control.
//!
//! The golden model is PCG32 XSH-RR: 64-bit LCG state, 32-bit output
//! computed from the pre-update state by a xorshift-high followed by a
//! data-dependent right rotation. Seeding loads the state directly.

use crate::rtl::{con, Direction, Expr, RtlDesign, RtlError, SignalId};

/// Reference multiplier for the 64-bit LCG update.
pub const DEFAULT_MULTIPLIER: u64 = 0x5851_F42D_4C95_7F2D;
/// Reference increment for the 64-bit LCG update.
pub const DEFAULT_INCREMENT: u64 = 0x1405_7B7E_F767_814F;

/// Generator parameters. `seed` is the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcgConfig {
    pub seed: u64,
    pub multiplier: u64,
    pub increment: u64,
}

impl Default for PcgConfig {
    fn default() -> Self {
        PcgConfig { seed: 0, multiplier: DEFAULT_MULTIPLIER, increment: DEFAULT_INCREMENT }
    }
}

impl PcgConfig {
    pub fn with_seed(seed: u64) -> Self {
        PcgConfig { seed, ..Default::default() }
    }
}

/// Degenerate-parameter warnings from [`validate_config`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigWarning {
    EvenIncrement,
    EvenMultiplier,
    ZeroMultiplier,
}

/// Flags parameter choices that collapse the generator's period. Warnings
/// only; values are never altered, so bus readback stays truthful.
pub fn validate_config(config: &PcgConfig) -> Vec<ConfigWarning> {
    let mut warnings = Vec::new();
    if config.multiplier == 0 {
        warnings.push(ConfigWarning::ZeroMultiplier);
    }
    if config.multiplier % 2 == 0 {
        warnings.push(ConfigWarning::EvenMultiplier);
    }
    if config.increment % 2 == 0 {
        warnings.push(ConfigWarning::EvenIncrement);
    }
    warnings
}

/// One generator step. The output is a permutation of the PRE-update
/// state; the new state is `state * multiplier + increment mod 2^64`.
#[inline]
pub fn golden_next(state: u64, multiplier: u64, increment: u64) -> (u64, u32) {
    let new_state = state.wrapping_mul(multiplier).wrapping_add(increment);
    let xorshifted = (((state ^ (state >> 18)) >> 27) & 0xFFFF_FFFF) as u32;
    let rot = (state >> 59) as u32;
    (new_state, xorshifted.rotate_right(rot))
}

/// Software reference generator, the oracle for all RTL equivalence tests.
#[derive(Debug, Clone)]
pub struct PcgGolden {
    pub state: u64,
    pub config: PcgConfig,
}

impl PcgGolden {
    pub fn new(config: PcgConfig) -> Self {
        PcgGolden { state: config.seed, config }
    }

    pub fn next_word(&mut self) -> u32 {
        let (state, out) = golden_next(self.state, self.config.multiplier, self.config.increment);
        self.state = state;
        out
    }
}

impl Iterator for PcgGolden {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        Some(self.next_word())
    }
}

/// The first `n` outputs from state = seed.
pub fn golden_stream(config: &PcgConfig, n: usize) -> Vec<u32> {
    PcgGolden::new(*config).take(n).collect()
}

/// RANDU: `x' = 65539 * x mod 2^31`, zero-extended to 32 bits. A
/// classically bad generator used as the battery's negative control.
#[derive(Debug, Clone)]
pub struct Randu {
    pub state: u32,
}

impl Iterator for Randu {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        self.state = self.state.wrapping_mul(65539) & 0x7FFF_FFFF;
        Some(self.state)
    }
}

pub fn randu_stream(seed: u32, n: usize) -> Vec<u32> {
    Randu { state: seed & 0x7FFF_FFFF }.take(n).collect()
}

/// The XSH-RR output permutation as a combinational expression over a
/// 64-bit state expression. Result is 32 bits wide.
pub(crate) fn xsh_rr_expr(state: Expr) -> Expr {
    let xorshifted =
        state.clone().xor(state.clone().shr(con(18, 64))).shr(con(27, 64)).slice(0, 32);
    let rot = state.shr(con(59, 64)).slice(0, 5);
    xorshifted.rotr(rot)
}

/// Signal handles of interest on a generator datapath design.
#[derive(Debug, Clone, Copy)]
pub struct PcgRtlHandles {
    pub seed: SignalId,
    pub state: SignalId,
    pub multiplier: SignalId,
    pub increment: SignalId,
    pub output: SignalId,
}

/// Builds the free-running generator datapath: a 64-bit `state` register
/// (reset value = seed), constant `seed`/`multiplier`/`increment` signals,
/// and a combinational 32-bit `output`.
pub fn build_pcg_rtl(config: &PcgConfig) -> Result<(RtlDesign, PcgRtlHandles), RtlError> {
    let mut d = RtlDesign::new("pcg");
    let seed = d.add_signal("seed", 64)?;
    d.assign_comb(seed, con(config.seed, 64))?;
    let multiplier = d.add_signal("multiplier", 64)?;
    d.assign_comb(multiplier, con(config.multiplier, 64))?;
    let increment = d.add_signal("increment", 64)?;
    d.assign_comb(increment, con(config.increment, 64))?;
    let state = d.add_signal("state", 64)?;
    d.add_register(state, Expr::from(state).mul(multiplier).add(increment), config.seed)?;
    let output = d.add_port("output", 32, Direction::Out)?;
    d.assign_comb(output, xsh_rr_expr(state.into()))?;
    d.validated()?;
    Ok((d, PcgRtlHandles { seed, state, multiplier, increment, output }))
}
