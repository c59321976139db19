//! Encoders for the four output formats.
//!
//! Portable pixmap layout for domain scans: binary `P6`, header
//! `"P6\n{width} {height}\n255\n"`, then `width * height` RGB triples row by
//! row. Width is the x-axis cell count, the first row is the largest y, and
//! real-spectrum cells are `(32, 96, 192)` while the rest are `(255, 255, 255)`.

use qhlat_core::{CMatrix, Complex64, DomainScan};

use crate::args::Format;
use crate::{CliError, Report, RunRecord};

pub const REAL_RGB: [u8; 3] = [32, 96, 192];
pub const COMPLEX_RGB: [u8; 3] = [255, 255, 255];

pub fn encode(report: &Report, record: &RunRecord, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(record)
                .map_err(|e| CliError::io(format!("cannot encode JSON: {e}")))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Text => Ok(report.text.clone().into_bytes()),
        Format::Csv => report
            .csv
            .clone()
            .map(String::into_bytes)
            .ok_or_else(|| CliError::input(format!("csv output not available for {}", record.command))),
        Format::Ppm => report
            .ppm
            .clone()
            .ok_or_else(|| CliError::input(format!("ppm output only available for domain, not {}", record.command))),
    }
}

pub fn domain_ppm(scan: &DomainScan) -> Vec<u8> {
    let (nx, ny) = (scan.grid.x.steps, scan.grid.y.steps);
    let mut out = format!("P6\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(3 * nx * ny);
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            let rgb = if scan.verdict(ix, iy) { REAL_RGB } else { COMPLEX_RGB };
            out.extend_from_slice(&rgb);
        }
    }
    out
}

/// `#` for real cells, `.` otherwise; first line is the largest y.
pub fn domain_text(scan: &DomainScan) -> String {
    let (nx, ny) = (scan.grid.x.steps, scan.grid.y.steps);
    let mut s = String::with_capacity((nx + 1) * ny);
    for iy in (0..ny).rev() {
        for ix in 0..nx {
            s.push(if scan.verdict(ix, iy) { '#' } else { '.' });
        }
        s.push('\n');
    }
    s
}

pub fn domain_csv(scan: &DomainScan) -> String {
    let (nx, ny) = (scan.grid.x.steps, scan.grid.y.steps);
    let mut s = String::from("p_i,p_j,is_real,max_imag\n");
    for iy in 0..ny {
        for ix in 0..nx {
            s.push_str(&format!(
                "{},{},{},{:e}\n",
                scan.grid.x.center(ix),
                scan.grid.y.center(iy),
                scan.verdict(ix, iy),
                scan.max_imag_at(ix, iy)
            ));
        }
    }
    s
}

pub fn complex_text(z: Complex64) -> String {
    // Avoid printing "-0.000000".
    let clean = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{:>10.6}{:+.6}i", clean(z.re), clean(z.im))
}

pub fn matrix_text(m: &CMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| complex_text(m[(i, j)])).collect();
        s.push_str(&row.join("  "));
        s.push('\n');
    }
    s
}

/// Table cell with four decimals.
pub fn table_value(x: f64) -> String {
    format!("{x:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use qhlat_core::{scan_domain_2d, GridSpec, LatticeParams};

    #[test]
    fn ppm_header_and_size() {
        let scan = scan_domain_2d(
            0,
            1,
            &LatticeParams::zeros(3).unwrap(),
            &GridSpec::square(-1.2, 1.2, 4).unwrap(),
            1e-8,
        )
        .unwrap();
        let ppm = domain_ppm(&scan);
        assert!(ppm.starts_with(b"P6\n4 4\n255\n"));
        assert_eq!(ppm.len(), b"P6\n4 4\n255\n".len() + 48);
        assert_eq!(domain_text(&scan).lines().count(), 4);
        assert_eq!(domain_csv(&scan).lines().count(), 17);
    }

    #[test]
    fn complex_format_is_aligned() {
        assert_eq!(complex_text(Complex64::new(-1e-9, 0.5)), "  0.000000+0.500000i");
        assert_eq!(table_value(0.71294), "0.7129");
    }
}
