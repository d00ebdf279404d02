//! Report rendering: pretty scalars (mixed fractions in exact mode) and the
//! plain-text report body.

use endnet_core::{Rational, Scalar};
use num_traits::{Signed, Zero};

/// Scalars that know how to print themselves in reports.
pub trait ReportScalar: Scalar {
    fn pretty(&self) -> String;
}

impl ReportScalar for f64 {
    fn pretty(&self) -> String {
        let rounded = (self * 1e9).round() / 1e9;
        format!("{rounded}")
    }
}

impl ReportScalar for Rational {
    /// Mixed-number form: `35/6` prints as `5 5/6`.
    fn pretty(&self) -> String {
        let whole = self.trunc();
        let frac = self.fract();
        if frac.is_zero() {
            format!("{}", whole.numer())
        } else if whole.is_zero() {
            format!("{}/{}", frac.numer(), frac.denom())
        } else {
            format!(
                "{} {}/{}",
                whole.numer(),
                frac.abs().numer(),
                frac.abs().denom()
            )
        }
    }
}

pub fn value_tuple<T: ReportScalar>(values: &[T]) -> String {
    let parts: Vec<String> = values.iter().map(ReportScalar::pretty).collect();
    format!("({})", parts.join(", "))
}

pub fn pretty_all<T: ReportScalar>(values: &[T]) -> Vec<String> {
    values.iter().map(ReportScalar::pretty).collect()
}

/// FNV-1a of the raw config text, quoted in reports for provenance.
pub fn config_hash(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Accumulates the report text.
#[derive(Default)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn blank(&mut self) {
        self.lines.push(String::new());
    }

    pub fn text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_numbers_match_reference_style() {
        assert_eq!(Rational::from_ratio(11, 2).pretty(), "5 1/2");
        assert_eq!(Rational::from_ratio(35, 6).pretty(), "5 5/6");
        assert_eq!(Rational::from_ratio(19, 3).pretty(), "6 1/3");
        assert_eq!(Rational::from_ratio(6, 1).pretty(), "6");
        assert_eq!(Rational::from_ratio(1, 3).pretty(), "1/3");
        assert_eq!(Rational::from_ratio(-9, 2).pretty(), "-4 1/2");
    }

    #[test]
    fn float_pretty_trims_noise() {
        assert_eq!(5.5f64.pretty(), "5.5");
        assert_eq!((0.1f64 + 0.2).pretty(), "0.3");
    }
}
