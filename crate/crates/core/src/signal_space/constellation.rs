use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gray;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstellationKind {
    Psk,
    Qam,
}

/// Unit-average-power APM constellation with Gray labels.
///
/// Points are stored in label order: `points[b]` carries the label `b`.
#[derive(Clone, Debug)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<C64>,
    bits: u32,
}

impl Constellation {
    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Bits per symbol, `log2 |S|`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn point(&self, label: usize) -> C64 {
        self.points[label]
    }

    /// Labels, one per point, in the same order as [`Constellation::points`].
    pub fn labels(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.points.len() as u32
    }
}

/// Build a PSK or square QAM constellation with Gray labelling.
///
/// PSK with `order >= 4` is rotated by `pi/order`, so QPSK sits on the
/// diagonals; BPSK is `{+1, -1}`.
pub fn build_constellation(kind: ConstellationKind, order: usize) -> Result<Constellation> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::config(format!(
            "constellation order must be a power of two >= 2, got {order}"
        )));
    }
    let bits = order.trailing_zeros();
    let points = match kind {
        ConstellationKind::Psk => psk_points(order),
        ConstellationKind::Qam => {
            if !matches!(order, 4 | 16 | 64) {
                return Err(Error::config(format!(
                    "square QAM supports orders 4, 16 and 64, got {order}"
                )));
            }
            qam_points(order)
        }
    };
    Ok(Constellation { kind, points, bits })
}

fn psk_points(order: usize) -> Vec<C64> {
    let offset = if order == 2 { 0.0 } else { PI / order as f64 };
    let mut points = vec![C64::new(0.0, 0.0); order];
    for p in 0..order {
        let phase = 2.0 * PI * p as f64 / order as f64 + offset;
        points[gray(p as u32) as usize] = C64::from_polar(1.0, phase);
    }
    points
}

fn qam_points(order: usize) -> Vec<C64> {
    let side = (order as f64).sqrt().round() as usize;
    let half_bits = side.trailing_zeros();
    let scale = (2.0 * (order as f64 - 1.0) / 3.0).sqrt().recip();
    let level = |p: usize| (2.0 * p as f64 - (side as f64 - 1.0)) * scale;
    let mut points = vec![C64::new(0.0, 0.0); order];
    for pi in 0..side {
        for pq in 0..side {
            let label = (gray(pi as u32) << half_bits) | gray(pq as u32);
            points[label as usize] = C64::new(level(pi), level(pq));
        }
    }
    points
}
