//! Field files: grayscale PFM, 8-bit heatmap PNG, and a one-row profile CSV.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::FidelityField;
use crate::error::{Error, Result};

/// Writes a grayscale little-endian PFM, rows stored bottom-to-top.
pub fn write_pfm(field: &FidelityField, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "Pf\n{} {}\n-1.0\n", field.width(), field.height())?;
    for y in (0..field.height()).rev() {
        for &w in field.row(y) {
            out.write_all(&w.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a grayscale PFM of either byte order.
pub fn read_pfm(path: &Path) -> Result<FidelityField> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut line = String::new();
    let mut next_line = |reader: &mut BufReader<File>| -> Result<String> {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Err(Error::Pfm("unexpected end of header".into()));
        }
        Ok(line.trim().to_string())
    };

    match next_line(&mut reader)?.as_str() {
        "Pf" => {}
        "PF" => return Err(Error::Pfm("color PFM is not a fidelity field".into())),
        other => return Err(Error::Pfm(format!("bad magic '{other}'"))),
    }
    let dims = next_line(&mut reader)?;
    let mut parts = dims.split_whitespace().map(str::parse::<u32>);
    let (width, height) = match (parts.next(), parts.next(), parts.next()) {
        (Some(Ok(w)), Some(Ok(h)), None) if w > 0 && h > 0 => (w, h),
        _ => return Err(Error::Pfm(format!("bad dimensions '{dims}'"))),
    };
    let scale: f32 = next_line(&mut reader)?
        .parse()
        .map_err(|_| Error::Pfm("bad scale".into()))?;
    let little_endian = scale < 0.0;

    let n = width as usize * height as usize;
    let mut bytes = vec![0u8; n * 4];
    reader
        .read_exact(&mut bytes)
        .map_err(|_| Error::Pfm("truncated sample data".into()))?;
    let mut weights = vec![0.0f32; n];
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (file_row, x) = (i / width as usize, i % width as usize);
        let y = height as usize - 1 - file_row;
        weights[y * width as usize + x] = v;
    }
    FidelityField::new(width, height, weights)
}

/// 8-bit grayscale PNG with `sample = round(255 * w)`.
pub fn write_heatmap_png(field: &FidelityField, path: &Path) -> Result<()> {
    let samples: Vec<u8> = field
        .weights()
        .iter()
        .map(|&w| (255.0 * w).round().clamp(0.0, 255.0) as u8)
        .collect();
    image::save_buffer_with_format(
        path,
        &samples,
        field.width(),
        field.height(),
        image::ExtendedColorType::L8,
        image::ImageFormat::Png,
    )
    .map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Cross-section of one row as `x,weight` CSV.
pub fn write_profile_csv(field: &FidelityField, row: u32, path: &Path) -> Result<()> {
    if row >= field.height() {
        return Err(Error::config(format!(
            "profile row {row} outside field of height {}",
            field.height()
        )));
    }
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["x", "weight"])?;
    for (x, w) in field.row(row).iter().enumerate() {
        writer.write_record([x.to_string(), w.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
