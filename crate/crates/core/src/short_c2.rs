//! Sampling of sub-level sets Ω_c = {G⁺ < c} on real 2-planes of ℂ² and
//! export to CSV, 16-bit PGM and JSON.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::MapSpec;
use crate::error::{Error, Result};
use crate::henon::{estimate_filtration_radius, FiltrationRadius, HenonMap, Point};
use crate::potential::{green_plus, GreenOptions};

/// The plane origin + u·spanU + v·spanV for real u ∈ [−extentU, extentU],
/// v ∈ [−extentV, extentV].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SliceSpec {
    pub origin: Point,
    pub span_u: Point,
    pub span_v: Point,
    pub grid_w: usize,
    pub grid_h: usize,
    pub extent_u: f64,
    pub extent_v: f64,
}

impl SliceSpec {
    /// The line {x = x0} drawn in the y-plane.
    pub fn y_plane(x0: Complex64, extent: f64, size: usize) -> Self {
        let (zero, one, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
        SliceSpec {
            origin: (x0, zero),
            span_u: (zero, one),
            span_v: (zero, i),
            grid_w: size,
            grid_h: size,
            extent_u: extent,
            extent_v: extent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_w < 2 || self.grid_h < 2 {
            return Err(Error::InvalidSlice(format!("grid {}×{} is smaller than 2×2", self.grid_w, self.grid_h)));
        }
        if !(self.extent_u > 0.0 && self.extent_v > 0.0 && self.extent_u.is_finite() && self.extent_v.is_finite()) {
            return Err(Error::InvalidSlice("extents must be positive and finite".into()));
        }
        // Real Gram determinant of the spans viewed as vectors in ℝ⁴.
        let dot = |p: Point, q: Point| (p.0.conj() * q.0 + p.1.conj() * q.1).re;
        let (uu, vv, uv) = (dot(self.span_u, self.span_u), dot(self.span_v, self.span_v), dot(self.span_u, self.span_v));
        if uu * vv - uv * uv <= 1e-12 * uu * vv || uu == 0.0 {
            return Err(Error::InvalidSlice("spanU and spanV are linearly dependent".into()));
        }
        Ok(())
    }

    /// Pixel coordinates; row 0 is the top edge v = +extentV.
    pub fn uv(&self, col: usize, row: usize) -> (f64, f64) {
        let u = -self.extent_u + 2.0 * self.extent_u * col as f64 / (self.grid_w - 1) as f64;
        let v = self.extent_v - 2.0 * self.extent_v * row as f64 / (self.grid_h - 1) as f64;
        (u, v)
    }

    pub fn point(&self, col: usize, row: usize) -> Point {
        let (u, v) = self.uv(col, row);
        (
            self.origin.0 + self.span_u.0 * u + self.span_v.0 * v,
            self.origin.1 + self.span_u.1 * u + self.span_v.1 * v,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PixelStatus {
    /// No escape within the budget.
    #[serde(rename = "in-K-plus-candidate")]
    InKPlusCandidate,
    /// 0 < G⁺ < c.
    #[serde(rename = "in-omega-prime")]
    InOmegaPrime,
    #[serde(rename = "outside")]
    Outside,
    /// |G⁺ − c| within the reported error bound.
    #[serde(rename = "boundary-uncertain")]
    BoundaryUncertain,
}

impl PixelStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PixelStatus::InKPlusCandidate => "in-K-plus-candidate",
            PixelStatus::InOmegaPrime => "in-omega-prime",
            PixelStatus::Outside => "outside",
            PixelStatus::BoundaryUncertain => "boundary-uncertain",
        }
    }

    /// Whether the pixel lies in Ω_c (uncertain pixels count as undecided).
    pub fn in_omega(self) -> Option<bool> {
        match self {
            PixelStatus::InKPlusCandidate | PixelStatus::InOmegaPrime => Some(true),
            PixelStatus::Outside => Some(false),
            PixelStatus::BoundaryUncertain => None,
        }
    }
}

impl fmt::Display for PixelStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Pixel {
    pub green_plus: f64,
    pub status: PixelStatus,
    pub annulus_radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub map: MapSpec,
    pub c: f64,
    pub budget: u32,
    #[serde(rename = "R")]
    pub r: f64,
    pub slice: SliceSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub metadata: GridMetadata,
    /// Row-major, top row first.
    pub pixels: Vec<Pixel>,
}

impl GridResult {
    pub fn width(&self) -> usize {
        self.metadata.slice.grid_w
    }

    pub fn height(&self) -> usize {
        self.metadata.slice.grid_h
    }

    pub fn pixel(&self, col: usize, row: usize) -> &Pixel {
        &self.pixels[row * self.width() + col]
    }
}

/// e^{G⁺}, the radius in the annulus 1 < |ζ| < e^c, when 0 < G⁺ < c.
pub fn annulus_radius(green_plus: f64, c: f64) -> Option<f64> {
    (green_plus > 0.0 && green_plus < c).then(|| green_plus.exp())
}

pub fn sample_slice(map: &HenonMap, slice: &SliceSpec, c: f64, budget: u32) -> Result<GridResult> {
    sample_slice_with_radius(map, &estimate_filtration_radius(map), slice, c, budget)
}

pub fn sample_slice_with_radius(
    map: &HenonMap,
    radius: &FiltrationRadius,
    slice: &SliceSpec,
    c: f64,
    budget: u32,
) -> Result<GridResult> {
    slice.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("level c = {c} must be positive")));
    }
    let opts = GreenOptions {
        budget,
        ..GreenOptions::default()
    };
    let w = slice.grid_w;
    let pixels = (0..w * slice.grid_h)
        .into_par_iter()
        .map(|idx| {
            let g = green_plus(map, radius, slice.point(idx % w, idx / w), &opts)?;
            let status = if !g.escapes() {
                PixelStatus::InKPlusCandidate
            } else if (g.value - c).abs() <= g.error_bound {
                PixelStatus::BoundaryUncertain
            } else if g.value < c {
                PixelStatus::InOmegaPrime
            } else {
                PixelStatus::Outside
            };
            Ok(Pixel {
                green_plus: g.value,
                status,
                annulus_radius: annulus_radius(g.value, c),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridResult {
        metadata: GridMetadata {
            map: MapSpec::from_map(map),
            c,
            budget,
            r: radius.r,
            slice: slice.clone(),
        },
        pixels,
    })
}

/// Counts (contained, total) over in-omega-prime pixels z of the test
/// G⁺(H z) < d·c.
pub fn omega_prime_containment(map: &HenonMap, radius: &FiltrationRadius, grid: &GridResult) -> Result<(usize, usize)> {
    let slice = &grid.metadata.slice;
    let dc = map.d() as f64 * grid.metadata.c;
    let opts = GreenOptions {
        budget: grid.metadata.budget,
        ..GreenOptions::default()
    };
    let w = slice.grid_w;
    let hits = grid
        .pixels
        .par_iter()
        .enumerate()
        .filter(|(_, p)| p.status == PixelStatus::InOmegaPrime)
        .map(|(idx, _)| {
            let hz = map.forward(slice.point(idx % w, idx / w));
            Ok(green_plus(map, radius, hz, &opts)?.value < dc)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok((hits.iter().filter(|&&b| b).count(), hits.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Pgm,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "pgm" => Ok(ExportFormat::Pgm),
            "json" => Ok(ExportFormat::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

/// PGM gray level round(min(G⁺, c)/c · 65535).
pub fn gray_level(green_plus: f64, c: f64) -> u16 {
    (green_plus.clamp(0.0, c) / c * 65535.0).round() as u16
}

pub fn encode_grid(grid: &GridResult, format: ExportFormat) -> Result<Vec<u8>> {
    match format {
        ExportFormat::Csv => encode_csv(grid),
        ExportFormat::Pgm => Ok(encode_pgm(grid)),
        ExportFormat::Json => {
            let mut out = serde_json::to_vec(grid).map_err(|e| Error::Inconsistent(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn encode_csv(grid: &GridResult) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Inconsistent(e.to_string());
    w.write_record(["u", "v", "greenPlus", "status", "annulusRadius"]).map_err(to_err)?;
    let slice = &grid.metadata.slice;
    for (idx, p) in grid.pixels.iter().enumerate() {
        let (u, v) = slice.uv(idx % slice.grid_w, idx / slice.grid_w);
        w.write_record([
            u.to_string(),
            v.to_string(),
            p.green_plus.to_string(),
            p.status.to_string(),
            p.annulus_radius.map(|r| r.to_string()).unwrap_or_default(),
        ])
        .map_err(to_err)?;
    }
    w.into_inner().map_err(|e| Error::Inconsistent(e.to_string()))
}

fn encode_pgm(grid: &GridResult) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", grid.width(), grid.height()).into_bytes();
    out.reserve(2 * grid.pixels.len());
    for p in &grid.pixels {
        out.extend_from_slice(&gray_level(p.green_plus, grid.metadata.c).to_be_bytes());
    }
    out
}

pub fn export_grid(grid: &GridResult, format: ExportFormat, path: &Path) -> Result<()> {
    let bytes = encode_grid(grid, format)?;
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(&bytes).map_err(io)?;
    f.flush().map_err(io)
}
