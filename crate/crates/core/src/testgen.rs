//! Synthetic layered-aquifer systems with badly scaled stream rows.
//!
//! Unknowns are ordered aquifer nodes first (layer by layer, row-major in
//! each layer), then stream nodes. Every row is strictly diagonally dominant:
//! its diagonal is the sum of its off-diagonal magnitudes plus a positive
//! storage term.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Default mean storage term.
pub const STORAGE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub layers: usize,
    pub stream_nodes: usize,
    /// Multiplier on every entry of a stream row.
    pub stream_scale: f64,
    /// One-sided convection: x-direction couplings become `k(1 ± asymmetry)`.
    pub asymmetry: f64,
    /// Mean storage term added to each diagonal; per-node values are drawn
    /// from `[0.5, 1.5]·storage`.
    pub storage: f64,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(name: &str, nx: usize, ny: usize, layers: usize) -> Self {
        Self {
            name: name.to_string(),
            grid_nx: nx,
            grid_ny: ny,
            layers,
            stream_nodes: 0,
            stream_scale: 1.0,
            asymmetry: 0.0,
            storage: STORAGE,
            seed: 7,
        }
    }

    pub fn dimension(&self) -> usize {
        self.grid_nx * self.grid_ny * self.layers + self.stream_nodes
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("problem {}: {m}", self.name)));
        if self.grid_nx == 0 || self.grid_ny == 0 || self.layers == 0 {
            return bad("grid and layer counts must be positive");
        }
        if !(self.stream_scale > 0.0 && self.stream_scale.is_finite()) {
            return bad("stream_scale must be positive");
        }
        if !(self.storage > 0.0 && self.storage.is_finite()) {
            return bad("storage must be positive");
        }
        if !(0.0..=1.0).contains(&self.asymmetry) {
            return bad("asymmetry must lie in [0, 1]");
        }
        Ok(())
    }
}

/// A generated system with its known solution.
#[derive(Debug, Clone)]
pub struct Problem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub x_true: Vec<f64>,
}

struct Builder {
    off: Vec<Vec<(usize, f64)>>,
}

impl Builder {
    fn couple(&mut self, i: usize, j: usize, aij: f64, aji: f64) {
        self.off[i].push((j, -aij));
        self.off[j].push((i, -aji));
    }
}

/// Builds `A`, draws `x_true ∈ [−1, 1]ⁿ` and sets `b = A·x_true`.
pub fn generate(spec: &ProblemSpec) -> Result<Problem> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (nx, ny, nl) = (spec.grid_nx, spec.grid_ny, spec.layers);
    let naq = nx * ny * nl;
    let n = spec.dimension();
    let node = |x: usize, y: usize, l: usize| l * nx * ny + y * nx + x;
    let mut b = Builder {
        off: vec![Vec::new(); n],
    };
    let mut scale = vec![1.0; n];

    for l in 0..nl {
        for y in 0..ny {
            for x in 0..nx {
                let i = node(x, y, l);
                if x + 1 < nx {
                    let k = rng.gen_range(1.0..10.0);
                    let a = spec.asymmetry;
                    b.couple(i, node(x + 1, y, l), k * (1.0 + a), k * (1.0 - a));
                }
                if y + 1 < ny {
                    let k = rng.gen_range(1.0..10.0);
                    b.couple(i, node(x, y + 1, l), k, k);
                }
                if l + 1 < nl {
                    let k = rng.gen_range(1.0..10.0);
                    b.couple(i, node(x, y, l + 1), k, k);
                }
            }
        }
    }

    // Streams run along the top layer; each links to its neighbour and to
    // one aquifer node. Only the stream side of a link is scaled.
    for s in 0..spec.stream_nodes {
        let i = naq + s;
        scale[i] = spec.stream_scale;
        if s + 1 < spec.stream_nodes {
            let k = rng.gen_range(1.0..10.0);
            b.off[i].push((i + 1, -k));
            b.off[i + 1].push((i, -k));
        }
        let aq = rng.gen_range(0..nx * ny);
        let k = rng.gen_range(1.0..10.0);
        b.couple(i, aq, k, k);
    }

    let mut triplets = Vec::new();
    for (i, row) in b.off.iter().enumerate() {
        let offsum: f64 = row.iter().map(|(_, v)| v.abs()).sum();
        let storage = spec.storage * rng.gen_range(0.5..1.5);
        let diag = offsum + storage;
        triplets.push((i, i, scale[i] * diag));
        triplets.extend(row.iter().map(|&(j, v)| (i, j, scale[i] * v)));
    }
    let matrix = CsrMatrix::from_triplets(n, &triplets)?;
    let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let rhs = matrix.spmv(&x_true)?;
    Ok(Problem {
        matrix,
        rhs,
        x_true,
    })
}

/// The fixed four-member suite: WELL, SKEW, ILL6, ILL9.
pub fn spec_suite() -> Vec<ProblemSpec> {
    let well = ProblemSpec::new("WELL", 12, 12, 3);
    let skew = ProblemSpec {
        asymmetry: 0.4,
        ..ProblemSpec::new("SKEW", 12, 12, 3)
    };
    let ill = |name: &str, scale: f64| ProblemSpec {
        stream_nodes: 40,
        stream_scale: scale,
        asymmetry: 0.1,
        ..ProblemSpec::new(name, 12, 12, 3)
    };
    vec![well, skew, ill("ILL6", 1e6), ill("ILL9", 1e9)]
}

/// Looks a suite member up by (case-insensitive) name.
pub fn suite_member(name: &str) -> Result<ProblemSpec> {
    spec_suite()
        .into_iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::InvalidConfig(format!("unknown suite member {name:?}")))
}
