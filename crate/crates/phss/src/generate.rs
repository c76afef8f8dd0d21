//! Mesh families beyond the structured square.

use phss_core::TriangularMesh;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, Result};

/// Largest accepted jitter amplitude, as a fraction of the grid spacing.
pub const MAX_JITTER: f64 = 0.3;

/// Structured `n × n` mesh with every interior node moved by an independent
/// uniform offset in `[−amplitude·h, amplitude·h]²`, `h = 1/n`.
///
/// The topology is that of [`TriangularMesh::structured_unit_square`], but the
/// element shapes vary, so the matrices lose their Toeplitz structure. Fails if
/// the offsets would flip or nearly flatten an element (area below a tenth of
/// the original).
pub fn jittered_unit_square(n: usize, amplitude: f64, seed: u64) -> Result<TriangularMesh> {
    if !(0.0..=MAX_JITTER).contains(&amplitude) {
        return Err(HarnessError::Config(format!("jitter amplitude must lie in [0, {MAX_JITTER}], got {amplitude}")));
    }
    let base = TriangularMesh::structured_unit_square(n)?;
    let h = 1.0 / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = base.nodes().to_vec();
    for (p, &b) in nodes.iter_mut().zip(base.boundary_flags()) {
        if !b {
            p[0] += amplitude * h * rng.gen_range(-1.0..=1.0);
            p[1] += amplitude * h * rng.gen_range(-1.0..=1.0);
        }
    }
    let min_area = 0.1 * 0.5 * h * h;
    for (t, tri) in base.triangles().iter().enumerate() {
        let [a, b, c] = tri.map(|v| nodes[v]);
        let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
        if area < min_area {
            return Err(HarnessError::Config(format!(
                "jitter {amplitude} (seed {seed}) degenerates triangle {t}; use a smaller amplitude"
            )));
        }
    }
    Ok(TriangularMesh::new(nodes, base.triangles().to_vec(), base.boundary_flags().to_vec())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jitter_keeps_topology_and_area() {
        let m = jittered_unit_square(12, 0.2, 7).unwrap();
        let s = TriangularMesh::structured_unit_square(12).unwrap();
        assert_eq!(m.triangles(), s.triangles());
        assert_eq!(m.boundary_flags(), s.boundary_flags());
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        assert_ne!(m.nodes(), s.nodes());
    }

    #[test]
    fn seeded_and_validated() {
        assert_eq!(jittered_unit_square(6, 0.1, 3).unwrap(), jittered_unit_square(6, 0.1, 3).unwrap());
        assert!(jittered_unit_square(6, 0.5, 3).is_err());
        assert_eq!(jittered_unit_square(6, 0.0, 3).unwrap(), TriangularMesh::structured_unit_square(6).unwrap());
    }
}
