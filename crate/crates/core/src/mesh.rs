//! Triangle meshes of parametrised surfaces, with OBJ and JSON export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::diffgeom::Signature;
use crate::error::{Error, Result};

/// Parameter lattice behind a mesh built from a (u, v) grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Structure {
    pub nu: usize,
    pub nv: usize,
    pub du: f64,
    pub dv: f64,
    /// v is periodic (closed surfaces of revolution).
    pub wrap_v: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub normals: Vec<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(skip)]
    pub structure: Option<Structure>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

impl SurfaceMesh {
    /// Mesh over an `nu × nv` lattice, vertex (i, j) at `i * nv + j`. Each
    /// quad is split into two triangles; zero-area triangles (collapsed rows
    /// on an axis) are dropped.
    pub fn from_lattice(vertices: Vec<[f64; 3]>, nu: usize, nv: usize, du: f64, dv: f64, wrap_v: bool) -> Result<Self> {
        if nu < 2 || nv < 2 || vertices.len() != nu * nv {
            return Err(Error::InvalidParameter(format!("lattice {nu}x{nv} does not match {} vertices", vertices.len())));
        }
        let idx = |i: usize, j: usize| i * nv + (j % nv);
        let jmax = if wrap_v { nv } else { nv - 1 };
        let area_floor = {
            let scale = vertices.iter().map(|v| norm(*v)).fold(0.0, f64::max).max(1.0);
            1e-28 * scale * scale
        };
        let mut triangles = Vec::with_capacity(2 * (nu - 1) * jmax);
        for i in 0..nu - 1 {
            for j in 0..jmax {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                for t in [[a, b, c], [a, c, d]] {
                    let n = cross(sub(vertices[t[1]], vertices[t[0]]), sub(vertices[t[2]], vertices[t[0]]));
                    if norm(n) > area_floor {
                        triangles.push(t);
                    }
                }
            }
        }
        let mut mesh = Self {
            normals: Vec::new(),
            vertices,
            triangles,
            k: None,
            h: None,
            structure: Some(Structure { nu, nv, du, dv, wrap_v }),
        };
        mesh.normals = mesh.vertex_normals();
        Ok(mesh)
    }

    /// Rotate the planar curve (radius, height) about the vertical axis.
    pub fn revolve(radius: &[f64], height: &[f64], n_t: usize) -> Result<Self> {
        if n_t < 8 {
            return Err(Error::InvalidParameter(format!("need at least 8 angular samples, got {n_t}")));
        }
        if radius.len() != height.len() || radius.len() < 2 {
            return Err(Error::InvalidParameter("curve needs at least two samples".into()));
        }
        let dt = std::f64::consts::TAU / n_t as f64;
        let mut v = Vec::with_capacity(radius.len() * n_t);
        for (r, z) in radius.iter().zip(height) {
            for j in 0..n_t {
                let (s, c) = (j as f64 * dt).sin_cos();
                v.push([r * c, r * s, *z]);
            }
        }
        let du = if radius.len() > 1 { (radius[1] - radius[0]).abs() } else { 0.0 };
        Self::from_lattice(v, radius.len(), n_t, du, dt, true)
    }

    /// Area-weighted vertex normals (Euclidean).
    pub fn vertex_normals(&self) -> Vec<[f64; 3]> {
        let mut acc = vec![[0.0; 3]; self.vertices.len()];
        for t in &self.triangles {
            let n = cross(sub(self.vertices[t[1]], self.vertices[t[0]]), sub(self.vertices[t[2]], self.vertices[t[0]]));
            for &k in t {
                for c in 0..3 {
                    acc[k][c] += n[c];
                }
            }
        }
        acc.into_iter()
            .map(|n| {
                let l = norm(n);
                if l > 0.0 { [n[0] / l, n[1] / l, n[2] / l] } else { [0.0, 0.0, 0.0] }
            })
            .collect()
    }

    pub fn face_normal(&self, t: usize) -> [f64; 3] {
        let t = self.triangles[t];
        let n = cross(sub(self.vertices[t[1]], self.vertices[t[0]]), sub(self.vertices[t[2]], self.vertices[t[0]]));
        let l = norm(n);
        [n[0] / l, n[1] / l, n[2] / l]
    }

    /// Indices in range and every triangle of positive area.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (ti, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&k| k >= n) {
                return Err(Error::InvalidParameter(format!("triangle {ti} indexes past {n} vertices")));
            }
            let a = cross(sub(self.vertices[t[1]], self.vertices[t[0]]), sub(self.vertices[t[2]], self.vertices[t[0]]));
            if !(norm(a) > 0.0) {
                return Err(Error::InvalidParameter(format!("triangle {ti} is degenerate")));
            }
        }
        Ok(())
    }

    /// Gauss curvature at every lattice vertex from second-order finite
    /// differences in the parameters. In L³ the normal is the Lorentz normal
    /// and K = −(LN − M²)/(EG − F²) (intrinsic curvature of a spacelike surface).
    pub fn fd_gauss_curvature(&self, ambient: Signature) -> Result<Vec<f64>> {
        let st = self.structure.ok_or_else(|| Error::InvalidParameter("mesh has no parameter lattice".into()))?;
        if st.nu < 3 || st.nv < 3 {
            return Err(Error::InvalidParameter("lattice too small for finite differences".into()));
        }
        let p = |i: usize, j: usize| self.vertices[i * st.nv + j];
        let comb = |terms: &[(f64, [f64; 3])], scale: f64| -> [f64; 3] {
            let mut o = [0.0; 3];
            for (w, v) in terms {
                for c in 0..3 {
                    o[c] += w * v[c];
                }
            }
            [o[0] / scale, o[1] / scale, o[2] / scale]
        };
        // first and second derivative stencils along one lattice direction
        let along = |n: usize, i: usize, wrap: bool, get: &dyn Fn(usize) -> [f64; 3], h: f64| -> ([f64; 3], [f64; 3]) {
            if wrap || (i > 0 && i < n - 1) {
                let (m, q) = ((i + n - 1) % n, (i + 1) % n);
                let (a, b, c) = (get(m), get(i), get(q));
                (comb(&[(-1.0, a), (1.0, c)], 2.0 * h), comb(&[(1.0, a), (-2.0, b), (1.0, c)], h * h))
            } else {
                let s: isize = if i == 0 { 1 } else { -1 };
                let at = |m: isize| get((i as isize + s * m) as usize);
                let d1 = comb(&[(-3.0, at(0)), (4.0, at(1)), (-1.0, at(2))], 2.0 * h * s as f64);
                let d2 = if n >= 4 {
                    comb(&[(2.0, at(0)), (-5.0, at(1)), (4.0, at(2)), (-1.0, at(3))], h * h)
                } else {
                    comb(&[(1.0, at(0)), (-2.0, at(1)), (1.0, at(2))], h * h)
                };
                (d1, d2)
            }
        };
        let sgn3 = match ambient {
            Signature::Euclidean => 1.0,
            Signature::Lorentzian => -1.0,
        };
        let ip = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + sgn3 * a[2] * b[2];
        let n = st.nu * st.nv;
        let mut pu = vec![[0.0; 3]; n];
        let mut puu = vec![[0.0; 3]; n];
        let mut pv = vec![[0.0; 3]; n];
        let mut pvv = vec![[0.0; 3]; n];
        for i in 0..st.nu {
            for j in 0..st.nv {
                let k = i * st.nv + j;
                (pu[k], puu[k]) = along(st.nu, i, false, &|m| p(m, j), st.du);
                (pv[k], pvv[k]) = along(st.nv, j, st.wrap_v, &|m| p(i, m), st.dv);
            }
        }
        let mut out = vec![f64::NAN; n];
        for i in 0..st.nu {
            for j in 0..st.nv {
                let k = i * st.nv + j;
                let (puv, _) = along(st.nu, i, false, &|m| pv[m * st.nv + j], st.du);
                let (a, b) = (pu[k], pv[k]);
                let raw = cross(a, b);
                let nrm = [raw[0], raw[1], sgn3 * raw[2]];
                let nn = ip(nrm, nrm).abs().sqrt();
                if !(nn > 0.0) {
                    continue;
                }
                let nrm = [nrm[0] / nn, nrm[1] / nn, nrm[2] / nn];
                let (e, f, g) = (ip(a, a), ip(a, b), ip(b, b));
                let (l, m, nn2) = (ip(puu[k], nrm), ip(puv, nrm), ip(pvv[k], nrm));
                out[k] = sgn3 * (l * nn2 - m * m) / (e * g - f * f);
            }
        }
        Ok(out)
    }

    /// ASCII OBJ with 17 significant digits; attributes as comment lines.
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} vertices, {} triangles", self.vertices.len(), self.triangles.len());
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
        }
        for n in &self.normals {
            let _ = writeln!(s, "vn {:.16e} {:.16e} {:.16e}", n[0], n[1], n[2]);
        }
        for (name, attr) in [("K", &self.k), ("H", &self.h)] {
            if let Some(vals) = attr {
                let _ = writeln!(s, "# attribute {name}");
                for v in vals {
                    let _ = writeln!(s, "# {name} {v:.16e}");
                }
            }
        }
        for t in &self.triangles {
            let (a, b, c) = (t[0] + 1, t[1] + 1, t[2] + 1);
            let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
        }
        s
    }
}
