use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstellationKind {
    Qam,
    Hex,
}

/// Integer-lattice signal set. Points stay unscaled; `unit_energy_scale`
/// is the factor that would bring the average energy to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    pub kind: ConstellationKind,
    pub points: Vec<C64>,
    pub unit_energy_scale: f64,
}

impl Constellation {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    pub fn bits_per_symbol(&self) -> f64 {
        (self.points.len() as f64).log2()
    }

    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }
}

/// `M_squared`-point QAM on the odd-integer grid, or the `M_squared`
/// hexagonal-lattice points nearest a centroid, re-centred.
pub fn make_constellation(kind: ConstellationKind, m_squared: usize) -> Result<Constellation> {
    let points = match kind {
        ConstellationKind::Qam => {
            let m = (m_squared as f64).sqrt().round() as usize;
            if m_squared < 4 || m * m != m_squared {
                return Err(Error::InvalidParameter(format!(
                    "QAM size {m_squared} is not a perfect square >= 4"
                )));
            }
            let axis: Vec<f64> = (0..m).map(|k| 2.0 * k as f64 - (m as f64 - 1.0)).collect();
            axis.iter()
                .flat_map(|&re| axis.iter().map(move |&im| C64::new(re, im)))
                .collect()
        }
        ConstellationKind::Hex => {
            if m_squared < 2 {
                return Err(Error::InvalidParameter(format!(
                    "HEX size {m_squared} must be at least 2"
                )));
            }
            hex_points(m_squared)
        }
    };
    let energy = points.iter().map(|z| z.norm_sqr()).sum::<f64>() / points.len() as f64;
    Ok(Constellation {
        kind,
        points,
        unit_energy_scale: 1.0 / energy.sqrt(),
    })
}

fn hex_points(count: usize) -> Vec<C64> {
    let w = C64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    // Offset breaks the symmetric ties of the lattice around the origin so
    // the selection is deterministic.
    let offset = C64::new(0.25, 0.1);
    let radius = (count as f64).sqrt() as i64 + 2;
    let mut lattice: Vec<C64> = Vec::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            lattice.push(2.0 * (a as f64 + b as f64 * w));
        }
    }
    lattice.sort_by(|x, y| {
        let dx = (x - offset).norm_sqr();
        let dy = (y - offset).norm_sqr();
        dx.partial_cmp(&dy)
            .unwrap()
            .then(x.re.partial_cmp(&y.re).unwrap())
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    lattice.truncate(count);
    let centroid = lattice.iter().sum::<C64>() / count as f64;
    lattice.into_iter().map(|z| z - centroid).collect()
}
