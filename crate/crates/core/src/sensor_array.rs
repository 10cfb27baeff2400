//! Sensor-array geometry, simulated triaxial magnetometer readings, and
//! assembly of the 6x4x4 network input tensor.

use crate::dipole::{field_at_point, DipoleError, MagnetPose, MagnetSpec, Vec3};
use crate::seeding::{derive_rng, domain};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Flux channels are stored in the input tensor in units of 100 uT
/// (tesla * 1e4), keeping typical magnitudes in roughly [-16, 16].
pub const FIELD_SCALE: f64 = 1e4;

/// Coordinate channels are stored in units of 100 mm (meters * 10).
pub const COORD_SCALE: f64 = 10.0;

/// Number of input channels: (Bx, By, Bz, X, Y, Z).
pub const INPUT_CHANNELS: usize = 6;

#[derive(Debug, Error)]
pub enum SensorError {
    #[error("sensor {index}: {source}")]
    SingularSensor {
        index: usize,
        source: DipoleError,
    },
    #[error("reading has {got} sensors, geometry has {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// Positions and range of the magnetometer grid. Sensors are stored row-major:
/// index = row * cols + col, rows running along +y and columns along +x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GeometryWire", try_from = "GeometryWire")]
pub struct SensorArrayGeometry {
    pub positions: Vec<Vec3>,
    pub rows: usize,
    pub cols: usize,
    /// Per-axis saturation bound in tesla.
    pub range_limit: f64,
}

impl SensorArrayGeometry {
    pub fn new(positions: Vec<Vec3>, rows: usize, cols: usize, range_limit: f64) -> Self {
        assert_eq!(positions.len(), rows * cols, "N must equal rows * cols");
        assert!(range_limit > 0.0, "range limit must be positive");
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                assert!(
                    (positions[i] - positions[j]).norm() > 0.0,
                    "sensor positions must be pairwise distinct"
                );
            }
        }
        Self {
            positions,
            rows,
            cols,
            range_limit,
        }
    }

    /// The 4x4 PCB array: x, y on a 100/3 mm pitch spanning +-50 mm, z = 0,
    /// +-1600 uT measurement range per axis.
    pub fn pcb_4x4() -> Self {
        let ticks = [-0.05, -0.05 / 3.0, 0.05 / 3.0, 0.05];
        let mut positions = Vec::with_capacity(16);
        for &y in &ticks {
            for &x in &ticks {
                positions.push(Vec3::new(x, y, 0.0));
            }
        }
        Self::new(positions, 4, 4, 1600e-6)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

impl Default for SensorArrayGeometry {
    fn default() -> Self {
        Self::pcb_4x4()
    }
}

/// Wire form of the geometry: millimeters and microtesla, as embedded in
/// dataset and checkpoint headers.
#[derive(Serialize, Deserialize)]
struct GeometryWire {
    rows: usize,
    cols: usize,
    positions_mm: Vec<[f64; 3]>,
    #[serde(rename = "range_limit_uT")]
    range_limit_ut: f64,
}

impl From<SensorArrayGeometry> for GeometryWire {
    fn from(g: SensorArrayGeometry) -> Self {
        GeometryWire {
            rows: g.rows,
            cols: g.cols,
            positions_mm: g
                .positions
                .iter()
                .map(|p| [p.x * 1e3, p.y * 1e3, p.z * 1e3])
                .collect(),
            range_limit_ut: g.range_limit * 1e6,
        }
    }
}

impl TryFrom<GeometryWire> for SensorArrayGeometry {
    type Error = String;

    fn try_from(w: GeometryWire) -> Result<Self, String> {
        if w.positions_mm.len() != w.rows * w.cols {
            return Err(format!(
                "geometry has {} positions for {}x{} grid",
                w.positions_mm.len(),
                w.rows,
                w.cols
            ));
        }
        Ok(SensorArrayGeometry::new(
            w.positions_mm
                .iter()
                .map(|p| Vec3::new(p[0] * 1e-3, p[1] * 1e-3, p[2] * 1e-3))
                .collect(),
            w.rows,
            w.cols,
            w.range_limit_ut * 1e-6,
        ))
    }
}

/// One array snapshot: per-sensor (Bx, By, Bz) in tesla.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayReading {
    pub flux: Vec<Vec3>,
}

impl ArrayReading {
    pub fn len(&self) -> usize {
        self.flux.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flux.is_empty()
    }
}

/// Evaluates the dipole field at every sensor. With `saturate` set, each axis
/// is clamped to +-range_limit, emulating magnetometer saturation.
pub fn simulate_reading(
    pose: &MagnetPose,
    spec: &MagnetSpec,
    geom: &SensorArrayGeometry,
    saturate: bool,
) -> Result<ArrayReading, SensorError> {
    let mut flux = Vec::with_capacity(geom.len());
    for (index, &p) in geom.positions.iter().enumerate() {
        let mut b = field_at_point(pose, spec, p)
            .map_err(|source| SensorError::SingularSensor { index, source })?;
        if saturate {
            let limit = geom.range_limit;
            b = b.map(|v| v.clamp(-limit, limit));
        }
        flux.push(b);
    }
    Ok(ArrayReading { flux })
}

/// Adds i.i.d. Gaussian noise N(0, sigma^2) to every flux component.
/// Deterministic for a given seed.
pub fn add_noise(reading: &ArrayReading, sigma: f64, rng_seed: u64) -> ArrayReading {
    assert!(sigma >= 0.0, "sigma must be non-negative");
    if sigma == 0.0 {
        return reading.clone();
    }
    let mut rng = derive_rng(rng_seed, domain::NOISE, 0);
    let normal = Normal::new(0.0, sigma).expect("valid normal");
    let flux = reading
        .flux
        .iter()
        .map(|b| {
            Vec3::new(
                b.x + normal.sample(&mut rng),
                b.y + normal.sample(&mut rng),
                b.z + normal.sample(&mut rng),
            )
        })
        .collect();
    ArrayReading { flux }
}

/// The 6x4x4 network input: channels (Bx, By, Bz, X, Y, Z), spatial cell
/// (i, j) holding the sensor at row i, column j. Field channels are scaled by
/// [`FIELD_SCALE`], coordinate channels by [`COORD_SCALE`].
#[derive(Debug, Clone, PartialEq)]
pub struct InputTensor {
    pub rows: usize,
    pub cols: usize,
    /// Channel-major data: data[ch * rows * cols + i * cols + j].
    pub data: Vec<f32>,
}

impl InputTensor {
    pub fn at(&self, ch: usize, i: usize, j: usize) -> f32 {
        self.data[ch * self.rows * self.cols + i * self.cols + j]
    }

    /// Inverts the field-channel scaling, recovering the reading in tesla.
    pub fn unscale_flux(&self) -> ArrayReading {
        let mut flux = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                flux.push(Vec3::new(
                    self.at(0, i, j) as f64 / FIELD_SCALE,
                    self.at(1, i, j) as f64 / FIELD_SCALE,
                    self.at(2, i, j) as f64 / FIELD_SCALE,
                ));
            }
        }
        ArrayReading { flux }
    }
}

/// Lays a reading out over the sensor grid and appends the coordinate
/// channels. With `include_coords` false the coordinate channels are zero
/// (input-design ablation).
pub fn assemble_input(
    reading: &ArrayReading,
    geom: &SensorArrayGeometry,
    include_coords: bool,
) -> Result<InputTensor, SensorError> {
    if reading.len() != geom.len() {
        return Err(SensorError::DimensionMismatch {
            got: reading.len(),
            expected: geom.len(),
        });
    }
    let (rows, cols) = (geom.rows, geom.cols);
    let plane = rows * cols;
    let mut data = vec![0.0f32; INPUT_CHANNELS * plane];
    for i in 0..rows {
        for j in 0..cols {
            let sensor = i * cols + j;
            let cell = i * cols + j;
            let b = reading.flux[sensor];
            data[cell] = (b.x * FIELD_SCALE) as f32;
            data[plane + cell] = (b.y * FIELD_SCALE) as f32;
            data[2 * plane + cell] = (b.z * FIELD_SCALE) as f32;
            if include_coords {
                let p = geom.positions[sensor];
                data[3 * plane + cell] = (p.x * COORD_SCALE) as f32;
                data[4 * plane + cell] = (p.y * COORD_SCALE) as f32;
                data[5 * plane + cell] = (p.z * COORD_SCALE) as f32;
            }
        }
    }
    Ok(InputTensor { rows, cols, data })
}
