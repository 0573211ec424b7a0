//! Gaussian coherent wave packets, integrated over frequency.
//!
//! Each spectral component scatters independently, so the mean output number
//! on a channel is `N_ch = int dw |out_ch(w)|^2` where `out_ch(w)` is the
//! monochromatic output for the packets' spectra at `w`. Cavity loss enters
//! through the `gamma_c` term of the response denominator; the flux it
//! removes shows up as [`OutputReport::loss`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, RouterError};
use crate::quadrature::{integrate_uniform, Rule};
use crate::router::{Channel, ChannelAmplitudes, OutputReport, PerChannel, RouterParams, WavePacket};
use crate::scattering::scatter;

/// Relative change allowed between a quadrature and its step-halved refinement.
pub const REFINEMENT_TOLERANCE: f64 = 1e-6;
/// Number of step halvings tried before giving up.
pub const MAX_REFINEMENTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Half-width of the frequency window in units of the packet `Omega`.
    pub window_halfwidth: f64,
    /// Number of nodes; odd.
    pub points: usize,
    pub rule: Rule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            window_halfwidth: 8.0,
            points: 4001,
            rule: Rule::Simpson,
        }
    }
}

impl QuadratureSpec {
    pub fn with_points(points: usize) -> Self {
        QuadratureSpec {
            points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2001 || self.points.is_multiple_of(2) {
            return Err(RouterError::InvalidQuadrature(format!(
                "points must be odd and at least 2001, got {}",
                self.points
            )));
        }
        // Gaussian tail mass beyond 6 Omega is below 1e-15 of the packet
        if !(self.window_halfwidth >= 6.0 && self.window_halfwidth.is_finite()) {
            return Err(RouterError::InvalidQuadrature(format!(
                "window half-width must be at least 6 Omega, got {}",
                self.window_halfwidth
            )));
        }
        Ok(())
    }

    /// Same window with the step halved.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            points: 2 * (self.points - 1) + 1,
            ..*self
        }
    }
}

/// Spectral amplitude `alpha_w` of a packet, including its phase.
pub fn gaussian_spectrum(packet: &WavePacket, omega: f64) -> Complex64 {
    let width = packet.bandwidth;
    let norm = (2.0 * PI * width * width).powf(-0.25);
    let x = omega - packet.omega0;
    packet.alpha() * (norm * (-x * x / (4.0 * width * width)).exp())
}

/// Packets on the given channels sharing a center and bandwidth.
///
/// `center_detuning` is `omega_c - omega0`; `phases` pairs each channel with
/// its phase.
pub fn packets_on(
    params: &RouterParams,
    mean_n: f64,
    center_detuning: f64,
    bandwidth: f64,
    phases: &[(Channel, f64)],
) -> Vec<WavePacket> {
    let omega0 = params.omega_c - center_detuning;
    phases
        .iter()
        .map(|&(ch, phase)| WavePacket::new(ch, mean_n, omega0, bandwidth, phase))
        .collect()
}

/// Two-input packets on ports 1 and 2 with relative phase `phi`.
pub fn two_input_packets(
    params: &RouterParams,
    mean_n: f64,
    center_detuning: f64,
    bandwidth: f64,
    phi: f64,
) -> Vec<WavePacket> {
    packets_on(
        params,
        mean_n,
        center_detuning,
        bandwidth,
        &[(Channel::R1, 0.0), (Channel::L1, phi)],
    )
}

fn check_packets(packets: &[WavePacket]) -> Result<()> {
    for p in packets {
        p.validate()?;
    }
    if let Some(first) = packets.first() {
        for p in &packets[1..] {
            if p.omega0 != first.omega0 || p.bandwidth != first.bandwidth {
                return Err(RouterError::InvalidPacket(
                    "packets on different ports must share center frequency and bandwidth".into(),
                ));
            }
        }
    }
    Ok(())
}

/// One fixed-grid evaluation, no refinement check.
pub fn packet_output_numbers_fixed(
    params: &RouterParams,
    packets: &[WavePacket],
    quad: &QuadratureSpec,
) -> Result<OutputReport> {
    params.validate()?;
    quad.validate()?;
    check_packets(packets)?;
    let n_in: f64 = packets.iter().map(|p| p.mean_n).sum();
    let Some(first) = packets.first() else {
        return Ok(OutputReport::new(PerChannel::default(), 0.0));
    };

    let half = quad.window_halfwidth * first.bandwidth;
    let lo = first.omega0 - half;
    let h = 2.0 * half / (quad.points - 1) as f64;

    let mut integrands: PerChannel<Vec<f64>> = PerChannel::from_fn(|_| Vec::with_capacity(quad.points));
    for k in 0..quad.points {
        let omega = lo + k as f64 * h;
        let mut amps = ChannelAmplitudes::zeros();
        for p in packets {
            amps[p.channel] += gaussian_spectrum(p, omega);
        }
        let out = scatter(params, &amps, params.omega_c - omega);
        for ch in Channel::ALL {
            integrands[ch].push(out[ch].norm_sqr());
        }
    }
    let n_out = integrands.map(|v| integrate_uniform(v, h, quad.rule));
    Ok(OutputReport::new(n_out, n_in))
}

/// Mean output numbers for a set of packets sharing `(omega0, Omega)`.
///
/// The fixed grid described by `quad` is compared with a step-halved grid;
/// up to [`MAX_REFINEMENTS`] halvings are tried until consecutive results
/// agree to [`REFINEMENT_TOLERANCE`]. The finer result of the agreeing pair
/// is returned.
pub fn packet_output_numbers(
    params: &RouterParams,
    packets: &[WavePacket],
    quad: &QuadratureSpec,
) -> Result<OutputReport> {
    let mut spec = *quad;
    let mut coarse = packet_output_numbers_fixed(params, packets, &spec)?;
    let mut worst = (Channel::R1, 0.0);
    for _ in 0..MAX_REFINEMENTS {
        spec = spec.refined();
        let fine = packet_output_numbers_fixed(params, packets, &spec)?;
        worst = coarse.max_relative_deviation(&fine);
        if worst.1 <= REFINEMENT_TOLERANCE {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(RouterError::QuadratureUnderResolved {
        channel: worst.0.label(),
        relative_change: worst.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::mean_output_two;

    fn packet(mean_n: f64, bandwidth: f64) -> WavePacket {
        WavePacket::new(Channel::R1, mean_n, 0.0, bandwidth, 0.7)
    }

    #[test]
    fn spectrum_peak_and_ratio() {
        let p = packet(2.0, 0.3);
        let peak = gaussian_spectrum(&p, 0.0).norm_sqr();
        assert!((peak - 2.0 / (2.0 * PI * 0.09).sqrt()).abs() < 1e-14);
        for w in [0.6, -0.6] {
            let ratio = gaussian_spectrum(&p, w).norm_sqr() / peak;
            assert!((ratio - (-2.0f64).exp()).abs() < 1e-14);
        }
        let arg = gaussian_spectrum(&p, 0.1).arg();
        assert!((arg - 0.7).abs() < 1e-14);
    }

    #[test]
    fn spectrum_normalization_by_quadrature() {
        let p = packet(1.0, 0.3);
        let spec = QuadratureSpec::default();
        let half = spec.window_halfwidth * p.bandwidth;
        let h = 2.0 * half / (spec.points - 1) as f64;
        let v: Vec<f64> = (0..spec.points)
            .map(|k| gaussian_spectrum(&p, -half + k as f64 * h).norm_sqr())
            .collect();
        assert!((integrate_uniform(&v, h, Rule::Simpson) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadrature_spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        assert!(QuadratureSpec::with_points(4000).validate().is_err());
        assert!(QuadratureSpec::with_points(1001).validate().is_err());
        let narrow = QuadratureSpec {
            window_halfwidth: 5.0,
            ..Default::default()
        };
        assert!(narrow.validate().is_err());
        assert_eq!(QuadratureSpec::default().refined().points, 8001);
    }

    #[test]
    fn rejects_mismatched_packets() {
        let p = RouterParams::symmetric();
        let a = WavePacket::new(Channel::R1, 1.0, 0.0, 0.3, 0.0);
        let b = WavePacket::new(Channel::L1, 1.0, 0.1, 0.3, 0.0);
        assert!(matches!(
            packet_output_numbers(&p, &[a, b], &QuadratureSpec::default()),
            Err(RouterError::InvalidPacket(_))
        ));
        let c = WavePacket::new(Channel::L1, 1.0, 0.0, 0.0, 0.0);
        assert!(packet_output_numbers(&p, &[c], &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn empty_packet_set() {
        let r = packet_output_numbers(&RouterParams::symmetric(), &[], &QuadratureSpec::default()).unwrap();
        assert_eq!(r.n_total, 0.0);
        assert_eq!(r.loss, 0.0);
    }

    #[test]
    fn destructive_pair_is_immune_to_loss() {
        let p = RouterParams::new(1.0, 1.0, 0.1, 0.0);
        let packets = two_input_packets(&p, 1.0, 0.0, 0.3, PI);
        let r = packet_output_numbers(&p, &packets, &QuadratureSpec::default()).unwrap();
        assert!((r.n_total - 2.0).abs() < 1e-6);
        let packets = two_input_packets(&p, 1.0, 0.0, 0.3, 2.0 * PI);
        let r = packet_output_numbers(&p, &packets, &QuadratureSpec::default()).unwrap();
        assert!(r.n_total < 2.0 - 0.05);
    }

    #[test]
    fn narrow_band_limit_matches_closed_form() {
        let p = RouterParams::new(1.0, 0.6, 0.0, 0.0);
        for phi in [0.0, 1.0, 2.5, 4.0] {
            let packets = two_input_packets(&p, 1.0, 0.5, 1e-3, phi);
            let r = packet_output_numbers(&p, &packets, &QuadratureSpec::default()).unwrap();
            let mono = mean_output_two(&p, 1.0, 0.5, phi).unwrap();
            let (_, dev) = r.max_relative_deviation(&mono);
            assert!(dev < 1e-4, "phi = {phi}: {dev}");
        }
    }

    #[test]
    fn under_resolved_when_cavity_line_is_much_narrower_than_grid() {
        // gamma total 1e-6 against a 2 Omega = 20 wide packet sampled every 0.04
        let p = RouterParams::new(5e-7, 5e-7, 0.0, 0.013);
        let packets = two_input_packets(&p, 1.0, 0.013, 10.0, 0.0);
        let err = packet_output_numbers(&p, &packets, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, RouterError::QuadratureUnderResolved { .. }), "{err:?}");
    }
}
