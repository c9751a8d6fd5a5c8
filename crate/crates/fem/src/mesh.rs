//! Triangle meshes with region and boundary tags, plus the plain-text format.

use std::io::{BufRead, Write};

use crate::error::{FemError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Matrix = 0,
    Inclusion1 = 1,
    Inclusion2 = 2,
}

impl Region {
    pub fn from_tag(t: u32) -> Result<Self> {
        match t {
            0 => Ok(Region::Matrix),
            1 => Ok(Region::Inclusion1),
            2 => Ok(Region::Inclusion2),
            _ => Err(FemError::Parse(format!("unknown region tag {t}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Inclusion1 = 1,
    Inclusion2 = 2,
    Outer = 3,
    CellSide = 4,
    CellTop = 5,
    CellBottom = 6,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 6] = [
        BoundaryTag::Inclusion1,
        BoundaryTag::Inclusion2,
        BoundaryTag::Outer,
        BoundaryTag::CellSide,
        BoundaryTag::CellTop,
        BoundaryTag::CellBottom,
    ];

    pub fn from_tag(t: u32) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| *b as u32 == t)
            .ok_or_else(|| FemError::Parse(format!("unknown boundary tag {t}")))
    }

    pub fn bit(self) -> u8 {
        1 << (self as u8)
    }

    /// Lowest tag present in a bit set.
    pub fn from_bits(bits: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|b| bits & b.bit() != 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
    pub edges: Vec<BoundaryEdge>,
    /// Element layers across the gap inside the structured block.
    pub n_layers: usize,
    pub h_target: f64,
    /// Half-width of the structured gap block (0 when there is none).
    pub block_half_width: f64,
}

pub fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Smallest interior angle of a triangle, in degrees.
pub fn min_angle_deg(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let pts = [a, b, c];
    let mut best = f64::INFINITY;
    for i in 0..3 {
        let p = pts[i];
        let q = pts[(i + 1) % 3];
        let r = pts[(i + 2) % 3];
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
        best = best.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
    }
    best
}

impl Mesh {
    pub fn triangle(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle(t);
        signed_area(a, b, c)
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangle(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn matrix_triangles(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.triangles.len()).filter(|&t| self.regions[t] == Region::Matrix)
    }

    pub fn min_signed_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest angle over matrix triangles whose centroid satisfies `keep`.
    pub fn min_angle_where(&self, keep: impl Fn([f64; 2]) -> bool) -> f64 {
        self.matrix_triangles()
            .filter(|&t| keep(self.centroid(t)))
            .map(|t| {
                let [a, b, c] = self.triangle(t);
                min_angle_deg(a, b, c)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn count(&self, region: Region) -> usize {
        self.regions.iter().filter(|r| **r == region).count()
    }

    pub fn edges_with(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> + '_ {
        self.edges.iter().filter(move |e| e.tag == tag)
    }

    /// Checks indices, orientation and that every tagged edge borders a
    /// matrix triangle.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.regions.len() != self.triangles.len() {
            return Err(FemError::Mesh("region count differs from triangle count".into()));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(FemError::Mesh(format!("triangle {t} references a missing node")));
            }
            if !(self.area(t) > 0.0) {
                return Err(FemError::Mesh(format!("triangle {t} has non-positive area {}", self.area(t))));
            }
        }
        let mut matrix_edges = std::collections::HashSet::new();
        for t in self.matrix_triangles() {
            let [a, b, c] = self.triangles[t];
            for (p, q) in [(a, b), (b, c), (c, a)] {
                matrix_edges.insert((p.min(q), p.max(q)));
            }
        }
        for e in &self.edges {
            let [p, q] = e.nodes;
            if !matrix_edges.contains(&(p.min(q), p.max(q))) {
                return Err(FemError::Mesh(format!("boundary edge {p}-{q} does not border the matrix")));
            }
        }
        Ok(())
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "NODES {}", self.nodes.len())?;
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(w, "{i} {:.16e} {:.16e}", p[0], p[1])?;
        }
        writeln!(w, "TRIS {} REGION", self.triangles.len())?;
        for (i, (t, r)) in self.triangles.iter().zip(&self.regions).enumerate() {
            writeln!(w, "{i} {} {} {} {}", t[0], t[1], t[2], *r as u32)?;
        }
        writeln!(w, "EDGES {} BOUNDARY", self.edges.len())?;
        for (i, e) in self.edges.iter().enumerate() {
            writeln!(w, "{i} {} {} {}", e.nodes[0], e.nodes[1], e.tag as u32)?;
        }
        Ok(())
    }

    /// Reads the text format; layer count, target size and block width are
    /// not part of it and come back as zero.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<Vec<String>> {
            loop {
                match lines.next() {
                    Some(l) => {
                        let l = l?;
                        let t = l.trim();
                        if !t.is_empty() {
                            return Ok(t.split_whitespace().map(str::to_owned).collect());
                        }
                    }
                    None => return Err(FemError::Parse(format!("unexpected end of input, expected {what}"))),
                }
            }
        };
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| FemError::Parse(format!("bad number '{s}'")))
        }
        fn header(tok: &[String], name: &str, extra: Option<&str>) -> Result<usize> {
            let ok = tok.first().map(String::as_str) == Some(name)
                && tok.len() == if extra.is_some() { 3 } else { 2 }
                && extra.is_none_or(|x| tok[2] == x);
            if !ok {
                return Err(FemError::Parse(format!("expected '{name}' header, got {tok:?}")));
            }
            num(&tok[1])
        }
        let n = header(&next("NODES")?, "NODES", None)?;
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let t = next("node")?;
            if t.len() != 3 || num::<usize>(&t[0])? != i {
                return Err(FemError::Parse(format!("bad node line {t:?}")));
            }
            nodes.push([num(&t[1])?, num(&t[2])?]);
        }
        let k = header(&next("TRIS")?, "TRIS", Some("REGION"))?;
        let mut triangles = Vec::with_capacity(k);
        let mut regions = Vec::with_capacity(k);
        for i in 0..k {
            let t = next("triangle")?;
            if t.len() != 5 || num::<usize>(&t[0])? != i {
                return Err(FemError::Parse(format!("bad triangle line {t:?}")));
            }
            triangles.push([num(&t[1])?, num(&t[2])?, num(&t[3])?]);
            regions.push(Region::from_tag(num(&t[4])?)?);
        }
        let e = header(&next("EDGES")?, "EDGES", Some("BOUNDARY"))?;
        let mut edges = Vec::with_capacity(e);
        for i in 0..e {
            let t = next("edge")?;
            if t.len() != 4 || num::<usize>(&t[0])? != i {
                return Err(FemError::Parse(format!("bad edge line {t:?}")));
            }
            edges.push(BoundaryEdge { nodes: [num(&t[1])?, num(&t[2])?], tag: BoundaryTag::from_tag(num(&t[3])?)? });
        }
        let mesh = Mesh { nodes, triangles, regions, edges, n_layers: 0, h_target: 0.0, block_half_width: 0.0 };
        mesh.validate()?;
        Ok(mesh)
    }
}
