//! Monochromatic scattering off the side-coupled cavity.
//!
//! For inputs `a_ch e^{-i w t}` the steady-state cavity amplitude is
//!
//! ```text
//! c = -i sum_ch sqrt(gamma_ch) a_ch / (i delta + gamma1 + gamma2 + gamma_c),   delta = omega_c - w
//! ```
//!
//! and every channel leaves as `a_ch - i sqrt(gamma_ch) c`. Both directions of
//! waveguide `j` couple with `sqrt(gamma_j)`.
//!
//! The `mean_output_*` functions are the lossless closed forms for one, two
//! and three equal-intensity inputs; [`scatter`] handles everything else.

use num_complex::Complex64;

use crate::error::{Result, RouterError};
use crate::router::{Channel, ChannelAmplitudes, OutputReport, PerChannel, RouterParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cavity response denominator `i delta + gamma1 + gamma2 + gamma_c`.
fn response_denominator(params: &RouterParams, delta: f64) -> Complex64 {
    Complex64::new(params.total_decay(), delta)
}

/// Steady-state cavity amplitude driven by `inputs` at detuning `delta`.
pub fn cavity_amplitude(params: &RouterParams, inputs: &ChannelAmplitudes, delta: f64) -> Complex64 {
    let drive: Complex64 = inputs.iter().map(|(ch, &a)| params.coupling(ch) * a).sum();
    -I * drive / response_denominator(params, delta)
}

/// Output amplitudes on all four channels.
pub fn scatter(params: &RouterParams, inputs: &ChannelAmplitudes, delta: f64) -> ChannelAmplitudes {
    let c = cavity_amplitude(params, inputs, delta);
    PerChannel::from_fn(|ch| inputs[ch] - I * params.coupling(ch) * c)
}

/// Mean numbers `|scatter|^2` for arbitrary inputs, lossy or not.
pub fn scatter_report(params: &RouterParams, inputs: &ChannelAmplitudes, delta: f64) -> OutputReport {
    let out = scatter(params, inputs, delta);
    OutputReport::new(out.map(|a| a.norm_sqr()), inputs.flux())
}

/// Inputs for the two-input case: `alpha` on port 1, `alpha e^{i phi}` on port 2.
pub fn two_input_amplitudes(mean_n: f64, phi: f64) -> ChannelAmplitudes {
    let a = mean_n.sqrt();
    let mut amps = ChannelAmplitudes::zeros();
    amps[Channel::R1] = Complex64::new(a, 0.0);
    amps[Channel::L1] = Complex64::from_polar(a, phi);
    amps
}

/// Inputs for the three-input case: `alpha` on port 1, `alpha e^{i theta}` on
/// port 3 and `alpha e^{i theta'}` on port 4.
pub fn three_input_amplitudes(mean_n: f64, theta: f64, theta_prime: f64) -> ChannelAmplitudes {
    let a = mean_n.sqrt();
    let mut amps = ChannelAmplitudes::zeros();
    amps[Channel::R1] = Complex64::new(a, 0.0);
    amps[Channel::R2] = Complex64::from_polar(a, theta);
    amps[Channel::L2] = Complex64::from_polar(a, theta_prime);
    amps
}

/// Input on port 1 only.
pub fn single_input_amplitudes(mean_n: f64) -> ChannelAmplitudes {
    let mut amps = ChannelAmplitudes::zeros();
    amps[Channel::R1] = Complex64::new(mean_n.sqrt(), 0.0);
    amps
}

fn check_closed_form(params: &RouterParams, mean_n: f64) -> Result<()> {
    params.validate()?;
    if !params.is_lossless() {
        return Err(RouterError::LossyNotSupported(params.gamma_c));
    }
    check_mean_n(mean_n)
}

fn check_mean_n(mean_n: f64) -> Result<()> {
    if mean_n.is_finite() && mean_n >= 0.0 {
        Ok(())
    } else {
        Err(RouterError::InvalidMeanNumber(mean_n))
    }
}

fn lorentz_denominator(params: &RouterParams, delta: f64) -> f64 {
    let g = params.gamma1 + params.gamma2;
    delta * delta + g * g
}

/// Single coherent input on port 1.
pub fn mean_output_single(params: &RouterParams, mean_n: f64, delta: f64) -> Result<OutputReport> {
    check_closed_form(params, mean_n)?;
    let (g1, g2) = (params.gamma1, params.gamma2);
    let d = lorentz_denominator(params, delta);
    let cross = g1 * g2 / d * mean_n;
    let n_out = PerChannel::from_array([
        (delta * delta + g2 * g2) / d * mean_n,
        g1 * g1 / d * mean_n,
        cross,
        cross,
    ]);
    Ok(OutputReport::new(n_out, mean_n))
}

/// Equal-intensity inputs on ports 1 and 2 with phase difference `phi`.
pub fn mean_output_two(params: &RouterParams, mean_n: f64, delta: f64, phi: f64) -> Result<OutputReport> {
    check_closed_form(params, mean_n)?;
    let (g1, g2) = (params.gamma1, params.gamma2);
    let d = lorentz_denominator(params, delta);
    let (sin, cos) = phi.sin_cos();
    let symmetric = (1.0 + cos) * g1 * g2;
    let skew = g1 * delta * sin;
    let cross = 2.0 * symmetric / d * mean_n;
    let n_out = PerChannel::from_array([
        (1.0 - 2.0 * (symmetric + skew) / d) * mean_n,
        (1.0 - 2.0 * (symmetric - skew) / d) * mean_n,
        cross,
        cross,
    ]);
    Ok(OutputReport::new(n_out, 2.0 * mean_n))
}

/// Two-input router with waveguide 2 decoupled: returns `(N_r1, N_l1)`.
pub fn two_port_reduction(gamma1: f64, mean_n: f64, delta: f64, phi: f64) -> Result<(f64, f64)> {
    check_mean_n(mean_n)?;
    RouterParams::new(gamma1, 0.0, 0.0, 0.0).validate()?;
    let d = delta * delta + gamma1 * gamma1;
    let skew = 2.0 * gamma1 * phi.sin() * delta;
    Ok(((d - skew) / d * mean_n, (d + skew) / d * mean_n))
}

/// Equal-intensity inputs on ports 1, 3 and 4; `theta` (`theta_prime`) is the
/// phase of port 3 (4) relative to port 1.
pub fn mean_output_three(
    params: &RouterParams,
    mean_n: f64,
    delta: f64,
    theta: f64,
    theta_prime: f64,
) -> Result<OutputReport> {
    check_closed_form(params, mean_n)?;
    let (g1, g2) = (params.gamma1, params.gamma2);
    let s = (g1 * g2).sqrt();
    let d = lorentz_denominator(params, delta);
    let (sin_t, cos_t) = theta.sin_cos();
    let (sin_tp, cos_tp) = theta_prime.sin_cos();
    let cos_diff = (theta - theta_prime).cos();
    let sin_diff = (theta - theta_prime).sin();
    let g_sum = g1 + g2;

    let r1 =
        delta * delta + g2 * g2 + 2.0 * g1 * g2 - 2.0 * delta * s * (sin_t + sin_tp) - 2.0 * s * g2 * (cos_t + cos_tp)
            + 2.0 * cos_diff * g1 * g2;
    let l1 = g1 * g1 + 2.0 * (1.0 + cos_diff) * g1 * g2 + 2.0 * (cos_t + cos_tp) * g1 * s;
    let r2 = delta * delta + g_sum * g_sum - g2 * g1 + 2.0 * sin_t * s * delta + 2.0 * sin_diff * g2 * delta
        - 2.0 * cos_t * g1 * s
        + 2.0 * cos_tp * g2 * s
        - 2.0 * cos_diff * g1 * g2;
    let l2 = delta * delta + g_sum * g_sum - g2 * g1 + 2.0 * delta * (sin_tp * s - sin_diff * g2)
        - 2.0 * cos_diff * g2 * g1
        - 2.0 * cos_tp * g1 * s
        + 2.0 * cos_t * g2 * s;

    let n_out = PerChannel::from_array([r1, l1, r2, l2]).map(|x| x / d * mean_n);
    Ok(OutputReport::new(n_out, 3.0 * mean_n))
}
