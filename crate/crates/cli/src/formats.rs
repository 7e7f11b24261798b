//! CSV tables and binary PGM/PPM rasters.
//!
//! CSV numbers carry 17 significant digits, lines end in `\n`, and a header
//! row is always written.

use std::io::Write;

use lottery_ricker::basin::{BasinGrid, CellClass};
use lottery_ricker::geometry::Curve;
use lottery_ricker::State;

use crate::error::CliResult;

/// Full-precision form used in CSV cells.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_trajectory<W: Write>(w: W, states: &[State]) -> CliResult<()> {
    let mut out = csv_writer(w);
    out.write_record(["n", "x", "y"])?;
    for (n, s) in states.iter().enumerate() {
        out.write_record([n.to_string(), num(s.x), num(s.y)])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `rank, curve_id, point_index, x, y`; `curve_id` counts within a rank.
pub fn write_curves<W: Write>(w: W, curves: &[Curve]) -> CliResult<()> {
    let mut out = csv_writer(w);
    out.write_record(["rank", "curve_id", "point_index", "x", "y"])?;
    let mut last_rank = None;
    let mut id = 0usize;
    for c in curves {
        let rank = c.source.rank();
        if last_rank == Some(rank) {
            id += 1;
        } else {
            id = 0;
            last_rank = Some(rank);
        }
        for (k, p) in c.points.iter().enumerate() {
            out.write_record([rank.to_string(), id.to_string(), k.to_string(), num(p.x), num(p.y)])?;
        }
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `i, j, x, y, class, iters` for every cell, row-major from `y_min`.
pub fn write_basin_csv<W: Write>(w: W, g: &BasinGrid) -> CliResult<()> {
    let mut out = csv_writer(w);
    out.write_record(["i", "j", "x", "y", "class", "iters"])?;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let c = g.cell_center(i, j);
            let idx = j * g.nx + i;
            out.write_record([
                i.to_string(),
                j.to_string(),
                num(c.x),
                num(c.y),
                g.cells[idx].name().to_string(),
                g.iters[idx].to_string(),
            ])?;
        }
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn palette(c: CellClass) -> [u8; 3] {
    match c {
        CellClass::PhaseA => [255, 0, 0],
        CellClass::PhaseB => [0, 0, 255],
        CellClass::XExtinct => [255, 255, 255],
        CellClass::YExtinct => [0, 0, 0],
        CellClass::Undecided => [128, 128, 128],
        CellClass::Invalid => [255, 255, 0],
    }
}

fn palette_comment() -> String {
    let entries: Vec<String> = CellClass::ALL
        .iter()
        .map(|&c| {
            let [r, g, b] = palette(c);
            format!("{}={r},{g},{b}", c.name())
        })
        .collect();
    format!("palette {}", entries.join(" "))
}

fn class_comment() -> String {
    let entries: Vec<String> = CellClass::ALL.iter().map(|&c| format!("{}={}", c.name(), c.code())).collect();
    format!("codes {}", entries.join(" "))
}

/// Rows from the top of the window (`y_max`) down, as images are stored.
fn image_rows(g: &BasinGrid) -> impl Iterator<Item = &[CellClass]> {
    (0..g.ny).rev().map(move |j| &g.cells[j * g.nx..(j + 1) * g.nx])
}

fn header<W: Write>(w: &mut W, magic: &str, comments: &[String], g: &BasinGrid) -> std::io::Result<()> {
    writeln!(w, "{magic}")?;
    for c in comments {
        for line in c.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    writeln!(w, "{} {}", g.nx, g.ny)?;
    writeln!(w, "255")
}

/// Class-index raster: one byte per cell holding the class code.
pub fn write_pgm<W: Write>(mut w: W, g: &BasinGrid, params: &str) -> std::io::Result<()> {
    header(&mut w, "P5", &[params.to_string(), class_comment()], g)?;
    let mut bytes = Vec::with_capacity(g.nx * g.ny);
    for row in image_rows(g) {
        bytes.extend(row.iter().map(|c| c.code()));
    }
    w.write_all(&bytes)?;
    w.flush()
}

/// Colored raster using [`palette`].
pub fn write_ppm<W: Write>(mut w: W, g: &BasinGrid, params: &str) -> std::io::Result<()> {
    header(&mut w, "P6", &[params.to_string(), palette_comment()], g)?;
    let mut bytes = Vec::with_capacity(3 * g.nx * g.ny);
    for row in image_rows(g) {
        for &c in row {
            bytes.extend_from_slice(&palette(c));
        }
    }
    w.write_all(&bytes)?;
    w.flush()
}

/// A parsed binary PNM image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pnm {
    pub magic: String,
    pub comments: Vec<String>,
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub data: Vec<u8>,
}

/// Reads a P5/P6 file whose comments sit between the magic number and the
/// dimensions, as written above.
pub fn read_pnm(bytes: &[u8]) -> Option<Pnm> {
    let mut pos = 0;
    let mut next_line = || {
        let start = pos;
        let end = start + bytes[start..].iter().position(|&b| b == b'\n')?;
        pos = end + 1;
        std::str::from_utf8(&bytes[start..end]).ok().map(str::to_string)
    };
    let magic = next_line()?;
    let mut comments = Vec::new();
    let dims = loop {
        let line = next_line()?;
        match line.strip_prefix('#') {
            Some(c) => comments.push(c.trim_start().to_string()),
            None => break line,
        }
    };
    let maxval: u32 = next_line()?.trim().parse().ok()?;
    let mut it = dims.split_whitespace();
    let width: usize = it.next()?.parse().ok()?;
    let height: usize = it.next()?.parse().ok()?;
    let channels = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        _ => return None,
    };
    let data = bytes[pos..].to_vec();
    (data.len() == channels * width * height).then_some(Pnm { magic, comments, width, height, maxval, data })
}
