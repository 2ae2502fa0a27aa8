use std::fs::File;
use std::path::Path;

use crate::wigner::WignerGrid;
use crate::Result;

/// Rectangular CSV with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// First row holds the x axis, first column the p axis.
pub fn write_wigner(path: &Path, grid: &WignerGrid) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    let mut header = vec!["p_wig\\x_wig".to_string()];
    header.extend(grid.x_axis().iter().map(|x| x.to_string()));
    w.write_record(&header)?;
    for (i, p) in grid.p_axis().iter().enumerate() {
        let mut row = vec![p.to_string()];
        row.extend(grid.values().row(i).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn cell(v: f64) -> String {
    v.to_string()
}

pub fn opt_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}
