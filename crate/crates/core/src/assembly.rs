//! The ordered 5158-dimensional quality vector and its binary container.
//!
//! File layout (little-endian): magic `IMGQ`, `u32` schema version, `u32`
//! record count, `u32` dimension, then per record a `u64` listing id
//! followed by `dimension` `f64` values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::blur::{self, BlurConfig};
use crate::composition::{self, MserParams};
use crate::simplicity;
use crate::texture_dof::{self, DetailMode};
use crate::{Error, RasterImage, Result};

pub const QUALITY_DIM: usize = 5158;
pub const SCHEMA_VERSION: u32 = 1;
pub const MAGIC: &[u8; 4] = b"IMGQ";
/// Smallest image every extractor accepts.
pub const MIN_EXTENT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemaEntry {
    pub name: &'static str,
    pub offset: usize,
    pub length: usize,
    /// Closed range every value of the block lies in.
    pub range: (f64, f64),
}

const fn entry(name: &'static str, offset: usize, length: usize, lo: f64, hi: f64) -> SchemaEntry {
    SchemaEntry {
        name,
        offset,
        length,
        range: (lo, hi),
    }
}

const SCHEMA: [SchemaEntry; 15] = [
    entry("Ke06-qa", 0, 1, 0.0, 1.0),
    entry("Ke06-qh", 1, 1, 0.0, 20.0),
    entry("Ke06-qf", 2, 1, 0.0, 1.0),
    entry("Ke06-tong", 3, 1, 0.0, 1.0),
    entry("Ke06-qct", 4, 1, 0.0, 1.0),
    entry("Ke06-qb", 5, 1, 0.0, 100.0),
    entry("mser-count", 6, 1, 0.0, f64::INFINITY),
    entry("Mai11-thirds map", 7, 25, 0.0, 1.0),
    entry("Wang15-f1", 32, 1, 0.0, 100.0),
    entry("Wang15-f14", 33, 1, 0.0, f64::INFINITY),
    entry("Wang15-f18", 34, 1, 0.0, f64::INFINITY),
    entry("Wang15-f21", 35, 1, 0.0, 1.0),
    entry("Wang15-f22", 36, 1, 0.0, 1.0),
    entry("Wang15-f26", 37, 1, 0.0, f64::INFINITY),
    entry("Khosla14-texture", 38, 5120, 0.0, 1.0),
];

/// Feature blocks in vector order.
pub fn schema() -> &'static [SchemaEntry] {
    &SCHEMA
}

pub fn schema_entry(name: &str) -> Option<&'static SchemaEntry> {
    SCHEMA.iter().find(|e| e.name == name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityVector {
    values: Vec<f64>,
    schema_version: u32,
}

impl QualityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != QUALITY_DIM {
            return Err(Error::DimensionMismatch {
                expected: QUALITY_DIM,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("quality value {i} is not finite")));
        }
        Ok(QualityVector {
            values,
            schema_version: SCHEMA_VERSION,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    /// Values of the named schema block.
    pub fn block(&self, name: &str) -> Option<&[f64]> {
        schema_entry(name).map(|e| &self.values[e.offset..e.offset + e.length])
    }

    /// The single-valued blocks, in schema order.
    pub fn scalars(&self) -> Vec<(&'static str, f64)> {
        SCHEMA
            .iter()
            .filter(|e| e.length == 1)
            .map(|e| (e.name, self.values[e.offset]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractConfig {
    pub blur: BlurConfig,
    pub hue_alpha: f64,
    pub mser: MserParams,
    pub detail_mode: DetailMode,
    /// Fail on edgeless images instead of scoring their edge distribution as 0.
    pub strict: bool,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            blur: BlurConfig::default(),
            hue_alpha: simplicity::DEFAULT_HUE_ALPHA,
            mser: MserParams::default(),
            detail_mode: DetailMode::Squared,
            strict: false,
        }
    }
}

/// Writes blocks strictly in schema order, so that a gap, an overlap or a
/// length mismatch is caught at extraction time.
struct VectorBuilder {
    values: Vec<f64>,
    next: usize,
}

impl VectorBuilder {
    fn new() -> Self {
        VectorBuilder {
            values: Vec::with_capacity(QUALITY_DIM),
            next: 0,
        }
    }

    fn put(&mut self, name: &str, block: &[f64]) {
        let e = &SCHEMA[self.next];
        assert_eq!(e.name, name, "feature written out of schema order");
        assert_eq!(e.offset, self.values.len(), "gap or overlap before {name}");
        assert_eq!(e.length, block.len(), "wrong length for {name}");
        self.values.extend_from_slice(block);
        self.next += 1;
    }

    fn finish(self) -> Result<QualityVector> {
        assert_eq!(self.next, SCHEMA.len(), "missing schema blocks");
        QualityVector::new(self.values)
    }
}

pub fn extract_quality(img: &RasterImage) -> Result<QualityVector> {
    extract_quality_with(img, &ExtractConfig::default())
}

/// Runs every extractor and concatenates the results in schema order.
pub fn extract_quality_with(img: &RasterImage, config: &ExtractConfig) -> Result<QualityVector> {
    img.require_rgb()?;
    img.ensure_min_size(MIN_EXTENT)?;

    let mut v = VectorBuilder::new();
    let qa = if config.strict {
        simplicity::spatial_edge_distribution_strict(img)?
    } else {
        simplicity::spatial_edge_distribution(img)?
    };
    v.put("Ke06-qa", &[qa]);
    v.put("Ke06-qh", &[simplicity::hue_count(img, config.hue_alpha)?]);
    v.put(
        "Ke06-qf",
        &[blur::blur_frequency_relative(img, config.blur.theta_multiplier)?],
    );
    v.put(
        "Ke06-tong",
        &[blur::blur_edge_structure(img, config.blur.edge_threshold)?],
    );
    v.put("Ke06-qct", &[simplicity::contrast(img)?]);
    let brightness = simplicity::brightness(img)?;
    v.put("Ke06-qb", &[brightness]);
    v.put("mser-count", &[composition::mser_count(img, &config.mser)? as f64]);
    let saliency = composition::spectral_residual_saliency(img)?;
    v.put("Mai11-thirds map", composition::thirds_map(&saliency).values());
    v.put("Wang15-f1", &[brightness]);
    v.put("Wang15-f14", &[texture_dof::wavelet_smoothness(img)?]);
    v.put(
        "Wang15-f18",
        &[texture_dof::laplacian_smoothness(img, config.detail_mode)?],
    );
    v.put("Wang15-f21", &[texture_dof::dof_wavelet(img)?]);
    v.put("Wang15-f22", &[texture_dof::dof_laplacian(img, config.detail_mode)?]);
    v.put(
        "Wang15-f26",
        &[texture_dof::dof_spatial_spread(img, config.detail_mode)?],
    );
    v.put("Khosla14-texture", texture_dof::lbp_pyramid(img)?.values());
    v.finish()
}

pub fn write_vectors_to<W: Write>(mut out: W, records: &[(u64, QualityVector)]) -> Result<()> {
    let mut seen = std::collections::HashSet::with_capacity(records.len());
    for (id, _) in records {
        if !seen.insert(*id) {
            return Err(Error::DuplicateId(*id));
        }
    }
    let count = u32::try_from(records.len())
        .map_err(|_| Error::InvalidParameter("too many records for one feature file".into()))?;
    out.write_all(MAGIC)?;
    out.write_all(&SCHEMA_VERSION.to_le_bytes())?;
    out.write_all(&count.to_le_bytes())?;
    out.write_all(&(QUALITY_DIM as u32).to_le_bytes())?;
    for (id, vector) in records {
        out.write_all(&id.to_le_bytes())?;
        for v in vector.values() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn read_vectors_from<R: Read>(mut input: R) -> Result<Vec<(u64, QualityVector)>> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::SchemaMismatch(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut input)?;
    if version != SCHEMA_VERSION {
        return Err(Error::SchemaMismatch(format!(
            "schema version {version}, expected {SCHEMA_VERSION}"
        )));
    }
    let count = read_u32(&mut input)? as usize;
    let dim = read_u32(&mut input)? as usize;
    if dim != QUALITY_DIM {
        return Err(Error::SchemaMismatch(format!("dimension {dim}, expected {QUALITY_DIM}")));
    }
    let mut records = Vec::with_capacity(count.min(1 << 16));
    let mut buf = vec![0u8; 8 * (dim + 1)];
    for _ in 0..count {
        input.read_exact(&mut buf)?;
        let mut words = buf.chunks_exact(8).map(|c| c.try_into().expect("8-byte chunk"));
        let id = u64::from_le_bytes(words.next().expect("id word"));
        let values = words.map(f64::from_le_bytes).collect();
        records.push((id, QualityVector::new(values)?));
    }
    Ok(records)
}

pub fn write_vectors(records: &[(u64, QualityVector)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::at_path(path, e))?;
    write_vectors_to(BufWriter::new(file), records)
}

pub fn read_vectors(path: impl AsRef<Path>) -> Result<Vec<(u64, QualityVector)>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::at_path(path, e))?;
    read_vectors_from(BufReader::new(file))
}

/// Debug export: one row per record, one column per dimension.
pub fn write_csv(records: &[(u64, QualityVector)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::at_path(path, e))?);
    write!(out, "listing_id")?;
    for e in schema() {
        if e.length == 1 {
            write!(out, ",{}", e.name)?;
        } else {
            for i in 0..e.length {
                write!(out, ",{}[{i}]", e.name)?;
            }
        }
    }
    writeln!(out)?;
    for (id, vector) in records {
        write!(out, "{id}")?;
        for v in vector.values() {
            write!(out, ",{v:?}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_vector(seed: f64) -> QualityVector {
        QualityVector::new((0..QUALITY_DIM).map(|i| (i as f64 * seed).sin()).collect()).unwrap()
    }

    #[test]
    fn schema_is_contiguous() {
        let mut offset = 0;
        for e in schema() {
            assert_eq!(e.offset, offset, "{}", e.name);
            offset += e.length;
        }
        assert_eq!(offset, QUALITY_DIM);
        assert_eq!(schema().len(), 15);
        assert_eq!(schema_entry("Mai11-thirds map").unwrap().length, 25);
        assert_eq!(schema_entry("Khosla14-texture").unwrap().length, 5120);
        assert_eq!(schema().iter().map(|e| e.length).sum::<usize>(), 5158);
    }

    #[test]
    fn round_trip_is_exact() {
        let records = vec![(7, sample_vector(0.1)), (3, sample_vector(0.7)), (99, sample_vector(1.3))];
        let mut buf = Vec::new();
        write_vectors_to(&mut buf, &records).unwrap();
        assert_eq!(buf.len(), 16 + 3 * 8 * (QUALITY_DIM + 1));
        let back = read_vectors_from(&buf[..]).unwrap();
        assert_eq!(back.len(), 3);
        for ((ia, va), (ib, vb)) in records.iter().zip(&back) {
            assert_eq!(ia, ib);
            let bits_a: Vec<u64> = va.values().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u64> = vb.values().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
    }

    #[test]
    fn empty_file_is_valid() {
        let mut buf = Vec::new();
        write_vectors_to(&mut buf, &[]).unwrap();
        assert_eq!(buf.len(), 16);
        assert!(read_vectors_from(&buf[..]).unwrap().is_empty());
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let mut buf = Vec::new();
        write_vectors_to(&mut buf, &[(1, sample_vector(0.2))]).unwrap();
        buf[12..16].copy_from_slice(&5157u32.to_le_bytes());
        assert!(matches!(read_vectors_from(&buf[..]), Err(Error::SchemaMismatch(_))));
        buf[12..16].copy_from_slice(&5158u32.to_le_bytes());
        buf[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(read_vectors_from(&buf[..]), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let v = sample_vector(0.3);
        let mut buf = Vec::new();
        assert!(matches!(
            write_vectors_to(&mut buf, &[(5, v.clone()), (5, v)]),
            Err(Error::DuplicateId(5))
        ));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let mut values = vec![0.0; QUALITY_DIM];
        values[10] = f64::NAN;
        assert!(QualityVector::new(values).is_err());
        assert!(QualityVector::new(vec![0.0; 5157]).is_err());
    }

    #[test]
    fn too_small_image() {
        let img = RasterImage::solid_rgb(31, 64, [0.5; 3]);
        assert!(matches!(extract_quality(&img), Err(Error::TooSmall { .. })));
    }
}
