//! Composite rules on uniformly spaced samples. Sums run in index order so
//! results are bitwise reproducible.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    #[default]
    Simpson,
    Trapezoid,
}

/// Integrate samples `values[k] = f(a + k h)`.
///
/// Simpson needs an odd number of samples (even number of intervals); with
/// an even count the last interval falls back to the trapezoid rule.
pub fn integrate_uniform(values: &[f64], h: f64, rule: Rule) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    match rule {
        Rule::Trapezoid => {
            let interior: f64 = values[1..n - 1].iter().sum();
            h * (0.5 * (values[0] + values[n - 1]) + interior)
        }
        Rule::Simpson => {
            let m = if n % 2 == 1 { n } else { n - 1 };
            let mut acc = 0.0;
            if m >= 3 {
                acc = values[0] + values[m - 1];
                for (k, v) in values[1..m - 1].iter().enumerate() {
                    acc += if k % 2 == 0 { 4.0 * v } else { 2.0 * v };
                }
                acc *= h / 3.0;
            }
            if m != n {
                acc += 0.5 * h * (values[n - 2] + values[n - 1]);
            }
            acc
        }
    }
}
