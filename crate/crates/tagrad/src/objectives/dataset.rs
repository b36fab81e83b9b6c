//! The regression dataset for the function-approximation experiment:
//! n points sampled uniformly from the unit square with targets
//! y = sin(x1^2) + sin(x2^2), plus per-feature input standardization.
//!
//! The CSV export stores the raw (pre-standardization) inputs so the file
//! is self-contained; import re-derives the standardization, which is a
//! deterministic function of the raw inputs, making emit -> import -> emit
//! byte-identical.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_DATA_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset io failed for {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("expected header 'x1,x2,y', got {0:?}")]
    BadHeader(String),
    #[error("line {line}: expected three comma-separated numbers")]
    BadRow { line: usize },
}

/// The target surface.
pub fn target(x1: f64, x2: f64) -> f64 {
    (x1 * x1).sin() + (x2 * x2).sin()
}

/// Immutable after creation. `inputs` are the standardized features fed to
/// the model; `raw` are the original samples the targets were computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    raw: Vec<[f64; 2]>,
    inputs: Vec<[f64; 2]>,
    targets: Vec<f64>,
    shift: [f64; 2],
    scale: [f64; 2],
}

impl Dataset {
    /// Builds from raw samples: computes targets from the raw inputs, then
    /// standardizes each feature to mean 0 and unit population variance.
    pub fn from_raw(raw: Vec<[f64; 2]>) -> Self {
        let targets = raw.iter().map(|x| target(x[0], x[1])).collect();
        Self::from_raw_with_targets(raw, targets)
    }

    fn from_raw_with_targets(raw: Vec<[f64; 2]>, targets: Vec<f64>) -> Self {
        assert!(!raw.is_empty(), "dataset needs at least one sample");
        assert_eq!(raw.len(), targets.len());
        let n = raw.len() as f64;
        let mut shift = [0.0; 2];
        let mut scale = [0.0; 2];
        for f in 0..2 {
            let mean = raw.iter().map(|x| x[f]).sum::<f64>() / n;
            let var = raw.iter().map(|x| (x[f] - mean) * (x[f] - mean)).sum::<f64>() / n;
            shift[f] = mean;
            // Degenerate feature (n = 1 or constant column): leave it as is.
            scale[f] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        let inputs = raw
            .iter()
            .map(|x| [(x[0] - shift[0]) / scale[0], (x[1] - shift[1]) / scale[1]])
            .collect();
        Dataset {
            raw,
            inputs,
            targets,
            shift,
            scale,
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn input(&self, i: usize) -> [f64; 2] {
        self.inputs[i]
    }

    pub fn raw_input(&self, i: usize) -> [f64; 2] {
        self.raw[i]
    }

    pub fn target_value(&self, i: usize) -> f64 {
        self.targets[i]
    }

    /// Mean squared target, the loss of the all-zero predictor.
    pub fn mean_sq_target(&self) -> f64 {
        self.targets.iter().map(|y| y * y).sum::<f64>() / self.len() as f64
    }

    /// Maps a standardized input back to raw coordinates.
    pub fn denormalize(&self, x: [f64; 2]) -> [f64; 2] {
        [
            x[0] * self.scale[0] + self.shift[0],
            x[1] * self.scale[1] + self.shift[1],
        ]
    }

    /// CSV with raw inputs and targets at full round-trip precision.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("x1,x2,y\n");
        for (x, y) in self.raw.iter().zip(self.targets.iter()) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", x[0], x[1], y));
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self, DatasetError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "x1,x2,y")) => {}
            other => {
                return Err(DatasetError::BadHeader(
                    other.map(|(_, l)| l.to_string()).unwrap_or_default(),
                ))
            }
        }
        let mut raw = Vec::new();
        let mut targets = Vec::new();
        for (idx, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut cells = line.split(',').map(str::parse::<f64>);
            let (Some(Ok(x1)), Some(Ok(x2)), Some(Ok(y)), None) =
                (cells.next(), cells.next(), cells.next(), cells.next())
            else {
                return Err(DatasetError::BadRow { line: idx + 1 });
            };
            raw.push([x1, x2]);
            targets.push(y);
        }
        if raw.is_empty() {
            return Err(DatasetError::BadRow { line: 2 });
        }
        Ok(Self::from_raw_with_targets(raw, targets))
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<(), DatasetError> {
        let io_err = |source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut f = std::fs::File::create(path).map_err(io_err)?;
        f.write_all(self.to_csv_string().as_bytes()).map_err(io_err)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self, DatasetError> {
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_str(&text)
    }
}

/// Samples n raw points uniformly from [0, 1)^2 and builds the dataset.
/// Deterministic in the seed.
pub fn gen_dataset(n: usize, seed: u64) -> Dataset {
    assert!(n >= 1, "dataset needs at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = (0..n)
        .map(|_| {
            let x1 = rng.random::<f64>();
            let x2 = rng.random::<f64>();
            [x1, x2]
        })
        .collect();
    Dataset::from_raw(raw)
}
