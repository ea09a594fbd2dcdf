use std::fmt;
use std::time::Duration;

use crate::symexpr::Expr;

/// Outcome of an exact involution check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Zero,
    Residual(Expr),
}

impl Certificate {
    pub fn is_zero(&self) -> bool {
        matches!(self, Certificate::Zero)
    }

    pub fn residual(&self) -> Option<&Expr> {
        match self {
            Certificate::Zero => None,
            Certificate::Residual(r) => Some(r),
        }
    }
}

/// A certificate plus the context needed to read it later.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub model: String,
    pub mode: String,
    pub pair: String,
    pub certificate: Certificate,
    pub wall_time: Duration,
}

impl CertificateReport {
    /// Text form. Timing is optional so report files stay byte-identical
    /// across runs.
    pub fn render(&self, with_timing: bool) -> String {
        let mut out = String::new();
        out.push_str(&format!("model: {}\n", self.model));
        out.push_str(&format!("mode: {}\n", self.mode));
        out.push_str(&format!("pair: {}\n", self.pair));
        match &self.certificate {
            Certificate::Zero => out.push_str("residual: \n"),
            Certificate::Residual(r) => out.push_str(&format!("residual: {r}\n")),
        }
        if with_timing {
            out.push_str(&format!("wall_time_ms: {:.3}\n", self.wall_time.as_secs_f64() * 1e3));
        }
        out.push_str(&format!(
            "{} {} {} {}\n",
            if self.certificate.is_zero() { "PASS" } else { "FAIL" },
            self.model,
            self.mode,
            self.pair
        ));
        out
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true))
    }
}
