use crate::error::{Error, Result};
use crate::frame::Label;

/// Finite index group `Z_L^d x Z_D` with the wrapped max-metric.
///
/// Elements are addressed by a flat index: free coordinates first (most
/// significant), torsion coordinate last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexGroup {
    rank: usize,
    modulus: usize,
    torsion: usize,
}

impl IndexGroup {
    pub fn new(rank: usize, modulus: usize, torsion: usize) -> Result<Self> {
        if modulus < 4 {
            return Err(Error::InvalidParameter(format!(
                "cyclic modulus must be at least 4, got {modulus}"
            )));
        }
        if torsion < 1 {
            return Err(Error::InvalidParameter(
                "torsion modulus must be at least 1".into(),
            ));
        }
        let size = modulus
            .checked_pow(rank as u32)
            .and_then(|s| s.checked_mul(torsion));
        if size.is_none() {
            return Err(Error::InvalidParameter("group too large".into()));
        }
        Ok(Self {
            rank,
            modulus,
            torsion,
        })
    }

    /// `Z_L`.
    pub fn cyclic(modulus: usize) -> Result<Self> {
        Self::new(1, modulus, 1)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn torsion(&self) -> usize {
        self.torsion
    }

    pub fn size(&self) -> usize {
        self.modulus.pow(self.rank as u32) * self.torsion
    }

    /// Largest norm of any element.
    pub fn diameter(&self) -> usize {
        let free = if self.rank > 0 { self.modulus / 2 } else { 0 };
        free.max(self.torsion / 2)
    }

    /// Coordinates `(x_1, ..., x_d, t)` of a flat index.
    pub fn coords(&self, mut g: usize) -> Vec<usize> {
        let mut out = vec![0; self.rank + 1];
        out[self.rank] = g % self.torsion;
        g /= self.torsion;
        for j in (0..self.rank).rev() {
            out[j] = g % self.modulus;
            g /= self.modulus;
        }
        out
    }

    /// Flat index of coordinates, reduced modulo the group.
    pub fn index(&self, coords: &[i64]) -> usize {
        assert_eq!(coords.len(), self.rank + 1, "wrong number of coordinates");
        let mut g = 0usize;
        for &x in &coords[..self.rank] {
            g = g * self.modulus + x.rem_euclid(self.modulus as i64) as usize;
        }
        g * self.torsion + coords[self.rank].rem_euclid(self.torsion as i64) as usize
    }

    /// Coordinates as a label; the torsion coordinate is omitted when `D = 1`.
    pub fn label(&self, g: usize) -> Label {
        let mut c: Vec<i64> = self.coords(g).into_iter().map(|x| x as i64).collect();
        if self.torsion == 1 {
            c.pop();
        }
        Label(c)
    }

    pub fn index_of_label(&self, label: &Label) -> Option<usize> {
        let mut c = label.coords().to_vec();
        if self.torsion == 1 && c.len() == self.rank {
            c.push(0);
        }
        if c.len() != self.rank + 1 {
            return None;
        }
        let fits = c[..self.rank]
            .iter()
            .all(|&x| x >= 0 && (x as usize) < self.modulus)
            && c[self.rank] >= 0
            && (c[self.rank] as usize) < self.torsion;
        fits.then(|| self.index(&c))
    }

    fn combine(&self, a: usize, b: usize, sign: i64) -> usize {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let c: Vec<i64> = ca
            .iter()
            .zip(&cb)
            .map(|(&x, &y)| x as i64 + sign * y as i64)
            .collect();
        self.index(&c)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, 1)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, -1)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.combine(0, a, -1)
    }

    /// `|g|`: maximum over coordinates of the wrapped absolute value.
    pub fn norm(&self, g: usize) -> usize {
        let c = self.coords(g);
        let mut n = 0;
        for &x in &c[..self.rank] {
            n = n.max(x.min(self.modulus - x));
        }
        n.max(c[self.rank].min(self.torsion - c[self.rank]))
    }

    pub fn dist(&self, a: usize, b: usize) -> usize {
        self.norm(self.sub(a, b))
    }

    /// `B_N(k)` in ascending flat order.
    pub fn ball(&self, center: usize, radius: usize) -> Vec<usize> {
        (0..self.size())
            .filter(|&g| self.dist(g, center) <= radius)
            .collect()
    }

    pub fn ball_size(&self, radius: usize) -> usize {
        let free = if 2 * radius + 1 >= self.modulus {
            self.modulus
        } else {
            2 * radius + 1
        };
        let tors = if 2 * radius + 1 >= self.torsion {
            self.torsion
        } else {
            2 * radius + 1
        };
        free.pow(self.rank as u32) * tors
    }

    /// Half-open cell `center + ([-N, N)^d x Z_D)`. For `2N | L` the cells
    /// centred on `(2N Z_L)^d` partition the group.
    pub fn cell(&self, center: usize, half_width: usize) -> Vec<usize> {
        let c = self.coords(center);
        let n = half_width as i64;
        (0..self.size())
            .filter(|&g| {
                let x = self.coords(g);
                (0..self.rank).all(|j| {
                    let off = (x[j] as i64 - c[j] as i64 + n).rem_euclid(self.modulus as i64);
                    off < 2 * n
                })
            })
            .collect()
    }

    /// Cell centres `(2N Z_L)^d x {0}`; requires `2N | L`.
    pub fn lattice_centers(&self, half_width: usize) -> Result<Vec<usize>> {
        let step = 2 * half_width;
        if step == 0 || !self.modulus.is_multiple_of(step) {
            return Err(Error::InvalidParameter(format!(
                "2N = {step} does not divide the modulus {}",
                self.modulus
            )));
        }
        let per_axis = self.modulus / step;
        let count = per_axis.pow(self.rank as u32);
        Ok((0..count)
            .map(|mut m| {
                let mut c = vec![0i64; self.rank + 1];
                for j in (0..self.rank).rev() {
                    c[j] = ((m % per_axis) * step) as i64;
                    m /= per_axis;
                }
                self.index(&c)
            })
            .collect())
    }
}
