//! Simulator for a four-input / four-output photon router: a single-mode
//! cavity side-coupled to two waveguides, with optical circulators splitting
//! each waveguide direction into a separate input and output port.
//!
//! Coherent-state inputs reduce to classical complex amplitudes, so every
//! mean photon number here is obtained from linear input–output relations:
//!
//! ```text
//! o_out(t) = o_in(t) - i sqrt(gamma_j) c(t)
//! dc/dt    = (-i omega_c - gamma_1 - gamma_2 - gamma_c) c - i sum_{j,o} sqrt(gamma_j) o_in(t)
//! ```
//!
//! All rates and frequencies are expressed in units of `gamma1`.
//!
//! - [`router`]: ports, channels, parameters and the output report.
//! - [`scattering`]: monochromatic scattering and closed-form mean numbers.
//! - [`wavepacket`]: Gaussian wave packets integrated in frequency.
//! - [`oracle`]: independent RK4 time-domain integration.
//! - [`suites`]: invariant suites used by `route verify`.

pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod router;
pub mod scattering;
pub mod suites;
pub mod wavepacket;

pub use error::{Result, RouterError};
pub use router::{
    channel_of_input_port, port_of_output_channel, relative_deviation, Channel, ChannelAmplitudes, CoherentDrive,
    Direction, OutputReport, PerChannel, RouterParams, WavePacket, Waveguide,
};
