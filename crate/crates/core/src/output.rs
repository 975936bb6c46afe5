//! CSV series output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::SweepRow;

pub const TRAJECTORY_HEADER: &str = "t,x1,x2,z1,z2";
pub const SWEEP_HEADER: &str = "s,z1_star,z2_star,p1_star,p2_star,feasible";

const SIGNIFICANT: i32 = 12;

/// Shortest decimal rendering of `x` rounded to 12 significant digits.
///
/// Plain notation for exponents in `[-5, 12)`, scientific otherwise.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..SIGNIFICANT).contains(&exp) {
        let decimals = (SIGNIFICANT - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Something that renders as one CSV table.
pub trait CsvTable {
    fn header(&self) -> &'static str;
    fn row_count(&self) -> usize;
    fn write_rows(&self, out: &mut dyn Write) -> std::io::Result<()>;
}

impl CsvTable for Trajectory {
    fn header(&self) -> &'static str {
        TRAJECTORY_HEADER
    }

    fn row_count(&self) -> usize {
        self.len()
    }

    fn write_rows(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (t, s) in self.times.iter().zip(&self.states) {
            writeln!(
                out,
                "{},{},{},{},{}",
                format_sig(*t),
                format_sig(s.x1),
                format_sig(s.x2),
                format_sig(s.z1),
                format_sig(s.z2)
            )?;
        }
        Ok(())
    }
}

impl CsvTable for [SweepRow] {
    fn header(&self) -> &'static str {
        SWEEP_HEADER
    }

    fn row_count(&self) -> usize {
        self.len()
    }

    fn write_rows(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for r in self {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                format_sig(r.s_value),
                format_sig(r.z1_star),
                format_sig(r.z2_star),
                format_sig(r.p1_star),
                format_sig(r.p2_star),
                r.feasible
            )?;
        }
        Ok(())
    }
}

pub fn write_csv_to<T: CsvTable + ?Sized>(table: &T, out: &mut dyn Write) -> Result<()> {
    if table.row_count() == 0 {
        return Err(Error::Io("refusing to write an empty table".into()));
    }
    writeln!(out, "{}", table.header())?;
    table.write_rows(out)?;
    Ok(())
}

pub fn write_csv<T: CsvTable + ?Sized>(table: &T, path: &Path) -> Result<()> {
    let file = File::create(path)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    write_csv_to(table, &mut out)?;
    out.flush()?;
    Ok(())
}
