//! Ports, channels and physical parameters of the router.
//!
//! Each waveguide carries a right- and a left-moving channel. Circulators
//! separate every channel into one input and one output port:
//!
//! | channel      | input port | output port |
//! |--------------|-----------:|------------:|
//! | wg 1, right  | 1          | 2           |
//! | wg 1, left   | 2          | 1           |
//! | wg 2, right  | 3          | 4           |
//! | wg 2, left   | 4          | 3           |

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Result, RouterError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Waveguide {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Right,
    Left,
}

/// One propagating mode: a direction in a waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel {
    pub waveguide: Waveguide,
    pub direction: Direction,
}

impl Channel {
    pub const R1: Channel = Channel::new(Waveguide::One, Direction::Right);
    pub const L1: Channel = Channel::new(Waveguide::One, Direction::Left);
    pub const R2: Channel = Channel::new(Waveguide::Two, Direction::Right);
    pub const L2: Channel = Channel::new(Waveguide::Two, Direction::Left);

    /// Canonical ordering used for reports and CSV columns: `N_r1, N_l1, N_r2, N_l2`.
    pub const ALL: [Channel; 4] = [Channel::R1, Channel::L1, Channel::R2, Channel::L2];

    pub const fn new(waveguide: Waveguide, direction: Direction) -> Self {
        Channel { waveguide, direction }
    }

    fn index(self) -> usize {
        match (self.waveguide, self.direction) {
            (Waveguide::One, Direction::Right) => 0,
            (Waveguide::One, Direction::Left) => 1,
            (Waveguide::Two, Direction::Right) => 2,
            (Waveguide::Two, Direction::Left) => 3,
        }
    }

    /// Short label, e.g. `r1`.
    pub fn label(self) -> &'static str {
        ["r1", "l1", "r2", "l2"][self.index()]
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Output port fed by a channel after scattering.
pub fn port_of_output_channel(channel: Channel) -> u8 {
    match (channel.waveguide, channel.direction) {
        (Waveguide::One, Direction::Right) => 2,
        (Waveguide::One, Direction::Left) => 1,
        (Waveguide::Two, Direction::Right) => 4,
        (Waveguide::Two, Direction::Left) => 3,
    }
}

/// Channel driven by an input port.
pub fn channel_of_input_port(port: u8) -> Result<Channel> {
    match port {
        1 => Ok(Channel::R1),
        2 => Ok(Channel::L1),
        3 => Ok(Channel::R2),
        4 => Ok(Channel::L2),
        other => Err(RouterError::InvalidPort(other)),
    }
}

/// A fixed-size map from the four channels to values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerChannel<T>([T; 4]);

impl<T> PerChannel<T> {
    /// Build from values ordered as [`Channel::ALL`].
    pub const fn from_array(values: [T; 4]) -> Self {
        PerChannel(values)
    }

    pub fn from_fn(mut f: impl FnMut(Channel) -> T) -> Self {
        PerChannel(Channel::ALL.map(&mut f))
    }

    pub fn as_array(&self) -> &[T; 4] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Channel, &T)> {
        Channel::ALL.into_iter().zip(self.0.iter())
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerChannel<U> {
        PerChannel([f(&self.0[0]), f(&self.0[1]), f(&self.0[2]), f(&self.0[3])])
    }
}

impl<T> Index<Channel> for PerChannel<T> {
    type Output = T;

    fn index(&self, channel: Channel) -> &T {
        &self.0[channel.index()]
    }
}

impl<T> IndexMut<Channel> for PerChannel<T> {
    fn index_mut(&mut self, channel: Channel) -> &mut T {
        &mut self.0[channel.index()]
    }
}

/// Steady-state coherent amplitudes on all four channels at one frequency.
pub type ChannelAmplitudes = PerChannel<Complex64>;

impl ChannelAmplitudes {
    pub fn zeros() -> Self {
        PerChannel([Complex64::new(0.0, 0.0); 4])
    }

    /// Amplitudes from a set of drives sharing one detuning.
    ///
    /// Returns the amplitudes together with the common detuning (zero when
    /// `drives` is empty). Drives on the same channel add.
    pub fn from_drives(drives: &[CoherentDrive]) -> Result<(Self, f64)> {
        let mut amps = Self::zeros();
        let mut delta = None;
        for drive in drives {
            match delta {
                None => delta = Some(drive.delta),
                Some(d) if d != drive.delta => return Err(RouterError::MixedFrequencies(d, drive.delta)),
                Some(_) => {}
            }
            amps[drive.channel] += drive.amplitude;
        }
        Ok((amps, delta.unwrap_or(0.0)))
    }

    /// Total photon flux `sum |amp|^2`.
    pub fn flux(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// Physical configuration of the cavity and its couplings.
///
/// `gamma1` and `gamma2` are the cavity decay rates into waveguides 1 and 2,
/// `gamma_c` the decay into all other modes, `omega_c` the cavity resonance.
/// Values are stored as given; the usual convention is `gamma1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouterParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_c: f64,
    pub omega_c: f64,
}

impl Default for RouterParams {
    fn default() -> Self {
        RouterParams {
            gamma1: 1.0,
            gamma2: 1.0,
            gamma_c: 0.0,
            omega_c: 0.0,
        }
    }
}

impl RouterParams {
    pub fn new(gamma1: f64, gamma2: f64, gamma_c: f64, omega_c: f64) -> Self {
        RouterParams {
            gamma1,
            gamma2,
            gamma_c,
            omega_c,
        }
    }

    /// Lossless symmetric router with `gamma1 = gamma2 = 1`.
    pub fn symmetric() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma_c", self.gamma_c),
            ("omega_c", self.omega_c),
        ] {
            if !value.is_finite() {
                return Err(RouterError::NonFinite { name, value });
            }
        }
        if self.gamma1 <= 0.0 {
            return Err(RouterError::NonPositiveGamma1(self.gamma1));
        }
        for (name, value) in [("gamma2", self.gamma2), ("gamma_c", self.gamma_c)] {
            if value < 0.0 {
                return Err(RouterError::NegativeRate { name, value });
            }
        }
        Ok(())
    }

    pub fn gamma(&self, waveguide: Waveguide) -> f64 {
        match waveguide {
            Waveguide::One => self.gamma1,
            Waveguide::Two => self.gamma2,
        }
    }

    /// Coupling amplitude `sqrt(gamma_j)` of a channel to the cavity.
    pub fn coupling(&self, channel: Channel) -> f64 {
        self.gamma(channel.waveguide).sqrt()
    }

    /// Total cavity energy-amplitude decay rate `gamma1 + gamma2 + gamma_c`.
    pub fn total_decay(&self) -> f64 {
        self.gamma1 + self.gamma2 + self.gamma_c
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma_c == 0.0
    }
}

/// Monochromatic coherent input on one channel.
///
/// `delta` is the detuning `omega_c - omega` of the drive frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentDrive {
    pub channel: Channel,
    pub amplitude: Complex64,
    pub delta: f64,
}

impl CoherentDrive {
    pub fn new(channel: Channel, mean_n: f64, phase: f64, delta: f64) -> Self {
        CoherentDrive {
            channel,
            amplitude: Complex64::from_polar(mean_n.sqrt(), phase),
            delta,
        }
    }

    pub fn mean_n(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

/// Gaussian coherent wave packet injected on one channel.
///
/// The spectrum is `alpha_w = alpha (2 pi Omega^2)^(-1/4) exp(-(w - w0)^2 / (4 Omega^2))`
/// with `|alpha|^2 = mean_n` and full bandwidth `2 Omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacket {
    pub channel: Channel,
    pub mean_n: f64,
    pub omega0: f64,
    /// Half-bandwidth `Omega`.
    pub bandwidth: f64,
    pub phase: f64,
}

impl WavePacket {
    pub fn new(channel: Channel, mean_n: f64, omega0: f64, bandwidth: f64, phase: f64) -> Self {
        WavePacket {
            channel,
            mean_n,
            omega0,
            bandwidth,
            phase,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_n.is_finite() && self.mean_n >= 0.0) {
            return Err(RouterError::InvalidMeanNumber(self.mean_n));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(RouterError::InvalidPacket(format!(
                "bandwidth must be positive and finite, got {}",
                self.bandwidth
            )));
        }
        if !self.omega0.is_finite() || !self.phase.is_finite() {
            return Err(RouterError::InvalidPacket(
                "non-finite center frequency or phase".into(),
            ));
        }
        Ok(())
    }

    /// Complex amplitude `alpha = sqrt(mean_n) e^{i phase}`.
    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.mean_n.sqrt(), self.phase)
    }
}

/// Mean output photon numbers per channel, with totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputReport {
    /// Mean output numbers `N_r1, N_l1, N_r2, N_l2`.
    pub n_out: PerChannel<f64>,
    /// `N^(out)`, the sum over all four output ports.
    pub n_total: f64,
    /// Total injected mean photon number.
    pub n_in: f64,
    /// `n_in - n_total`; photons lost to non-waveguide modes.
    pub loss: f64,
}

impl OutputReport {
    pub fn new(n_out: PerChannel<f64>, n_in: f64) -> Self {
        let n_total = n_out.as_array().iter().sum();
        OutputReport {
            n_out,
            n_total,
            n_in,
            loss: n_in - n_total,
        }
    }

    /// Mean number leaving through an output port (1..=4).
    pub fn at_output_port(&self, port: u8) -> Option<f64> {
        Channel::ALL
            .into_iter()
            .find(|&ch| port_of_output_channel(ch) == port)
            .map(|ch| self.n_out[ch])
    }

    pub fn n_r1(&self) -> f64 {
        self.n_out[Channel::R1]
    }

    pub fn n_l1(&self) -> f64 {
        self.n_out[Channel::L1]
    }

    pub fn n_r2(&self) -> f64 {
        self.n_out[Channel::R2]
    }

    pub fn n_l2(&self) -> f64 {
        self.n_out[Channel::L2]
    }
}

/// Deviation of `got` from `want` relative to `want`.
///
/// A reference below `1e-12 * scale` counts as a dark channel and the
/// deviation is measured against `scale` instead; `scale` is normally the
/// injected mean photon number.
pub fn relative_deviation(got: f64, want: f64, scale: f64) -> f64 {
    let scale = scale.abs();
    let denom = if want.abs() >= 1e-12 * scale { want.abs() } else { scale };
    if denom > 0.0 {
        (got - want).abs() / denom
    } else {
        (got - want).abs()
    }
}

impl OutputReport {
    /// Largest channel-wise [`relative_deviation`] from `reference`, with the
    /// channel where it occurs.
    pub fn max_relative_deviation(&self, reference: &OutputReport) -> (Channel, f64) {
        let scale = self.n_in.max(reference.n_in);
        Channel::ALL
            .into_iter()
            .map(|ch| (ch, relative_deviation(self.n_out[ch], reference.n_out[ch], scale)))
            .fold((Channel::R1, 0.0), |acc, it| if it.1 > acc.1 { it } else { acc })
    }
}
