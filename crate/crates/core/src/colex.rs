//! Colored cell complexes.
//!
//! The 3D complex is the bitruncated cubic honeycomb: one truncated-octahedron
//! volume per site of a body-centered cubic lattice. We work in integer
//! coordinates with 4 units per cubic cell, so
//!
//! - volumes sit at `(0,0,0)` and `(2,2,2) mod 4`,
//! - vertices sit at volume center + a permutation of `(0,±1,±2)`,
//! - square faces sit between same-sublattice volumes (centers with one
//!   coordinate `≡2`, two `≡0 mod 4`, or one `≡0`, two `≡2`),
//! - hexagon faces sit between opposite-sublattice volumes (all-odd centers).
//!
//! The 4-coloring assigns `r/g` to the two parities of one cubic sublattice
//! and `b/y` to the parities of the other. The time axis used for slicing is
//! the cubic `(1,1,1)` diagonal: along it, volumes stack into columns
//! separated by "time-perpendicular" hexagons whose six vertices share one
//! time coordinate, which is the structure just-in-time decoding relies on.
//!
//! Two topologies are supported: a 3-torus (periodic in all cubic axes) and a
//! time interval (periodic transverse to the time axis, cut along it with the
//! two cut surfaces left as open state boundaries).

use crate::gf2::BitMatrix;
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;

/// One of the four volume colors.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Color {
    R = 0,
    G = 1,
    B = 2,
    Y = 3,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::R, Color::G, Color::B, Color::Y];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Color {
        Color::ALL[i]
    }

    pub fn letter(self) -> char {
        match self {
            Color::R => 'r',
            Color::G => 'g',
            Color::B => 'b',
            Color::Y => 'y',
        }
    }
}

/// Subset of `{r,g,b,y}` as a 4-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ColorSet(pub u8);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);
    pub const FULL: ColorSet = ColorSet(0b1111);

    pub fn single(c: Color) -> ColorSet {
        ColorSet(1 << c.index())
    }

    pub fn pair(a: Color, b: Color) -> ColorSet {
        assert_ne!(a, b);
        ColorSet((1 << a.index()) | (1 << b.index()))
    }

    pub fn contains(self, c: Color) -> bool {
        self.0 >> c.index() & 1 == 1
    }

    pub fn complement(self) -> ColorSet {
        ColorSet(!self.0 & 0b1111)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        Color::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    /// The six two-element subsets, in a fixed order.
    pub fn all_pairs() -> [ColorSet; 6] {
        [
            ColorSet::pair(Color::R, Color::G),
            ColorSet::pair(Color::R, Color::B),
            ColorSet::pair(Color::R, Color::Y),
            ColorSet::pair(Color::G, Color::B),
            ColorSet::pair(Color::G, Color::Y),
            ColorSet::pair(Color::B, Color::Y),
        ]
    }
}

impl std::fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in self.iter() {
            write!(f, "{}", c.letter())?;
        }
        Ok(())
    }
}

pub type VertId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;
pub type VolId = usize;

pub type Coord = [i64; 3];

fn add(a: Coord, b: Coord) -> Coord {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: Coord, b: Coord) -> Coord {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn time_of(c: Coord) -> i64 {
    c[0] + c[1] + c[2]
}

/// Topology of a 3-colex.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Topology {
    /// Periodic in all three cubic axes; `dims` counts cubic cells per axis.
    Torus3 { dims: [usize; 3] },
    /// Periodic transverse to the `(1,1,1)` time axis, open along it.
    /// `spatial` counts the two transverse periods, `slices` the number of
    /// vertex time slices.
    TimeInterval { spatial: [usize; 2], slices: usize },
}

/// The 24 vertex offsets of a truncated octahedron: permutations of (0,±1,±2).
fn vertex_offsets() -> &'static [Coord] {
    use std::sync::OnceLock;
    static OFFS: OnceLock<Vec<Coord>> = OnceLock::new();
    OFFS.get_or_init(|| {
        let mut out = Vec::with_capacity(24);
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for perm in perms {
            for s1 in [1i64, -1] {
                for s2 in [1i64, -1] {
                    let vals = [0i64, s1, 2 * s2];
                    let mut c = [0i64; 3];
                    for (axis, &which) in perm.iter().enumerate() {
                        c[axis] = vals[which];
                    }
                    out.push(c);
                }
            }
        }
        out.sort();
        out.dedup();
        assert_eq!(out.len(), 24);
        out
    })
}

/// Face centers of a truncated octahedron, relative to its center.
/// Squares: centers ±2 along an axis. Hexagons: centers (±1,±1,±1).
fn face_offsets() -> Vec<Coord> {
    let mut out = Vec::new();
    for axis in 0..3 {
        for s in [2i64, -2] {
            let mut c = [0i64; 3];
            c[axis] = s;
            out.push(c);
        }
    }
    for sx in [1i64, -1] {
        for sy in [1i64, -1] {
            for sz in [1i64, -1] {
                out.push([sx, sy, sz]);
            }
        }
    }
    out
}

/// Base cyclic vertex order of the hexagon with A-to-B direction (1,1,1),
/// as offsets from the hexagon center. Consecutive offsets differ by an edge.
const HEX_CYCLE: [Coord; 6] =
    [[-1, 0, 1], [0, -1, 1], [1, -1, 0], [1, 0, -1], [0, 1, -1], [-1, 1, 0]];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FaceKind {
    Square,
    Hexagon,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    /// Representative coordinate (canonical for torus, first-seen raw for interval).
    pub coord: Coord,
    pub sign: i8,
    /// Volumes at this vertex by color index; `None` where the adjacent
    /// volume is a phantom beyond a state boundary.
    pub volumes: [Option<VolId>; 4],
    pub edges: Vec<EdgeId>,
    pub faces: Vec<FaceId>,
    /// The unique time-perpendicular hexagon through this vertex, if that
    /// face is part of the complex.
    pub perp_hexagon: Option<FaceId>,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub verts: [VertId; 2],
    /// Colors of the three volumes sharing this edge.
    pub color: ColorSet,
    pub volumes: Vec<VolId>,
    pub faces: Vec<FaceId>,
    /// True if some adjacent volume is a phantom (edge lies on a state boundary).
    pub on_boundary: bool,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub coord: Coord,
    pub kind: FaceKind,
    /// Colors of the two volumes sharing this face.
    pub color: ColorSet,
    /// Vertices in cyclic order around the face.
    pub verts: Vec<VertId>,
    /// Edges in cyclic order; `edges[i]` joins `verts[i]` and `verts[i+1]`.
    pub edges: Vec<EdgeId>,
    pub volumes: Vec<VolId>,
    pub on_boundary: bool,
    /// Largest vertex time coordinate.
    pub time: i64,
    /// True for hexagons whose six vertices share one time coordinate.
    pub time_perp: bool,
}

#[derive(Clone, Debug)]
pub struct Volume {
    pub coord: Coord,
    pub color: Color,
    pub verts: Vec<VertId>,
    pub edges: Vec<EdgeId>,
    pub faces: Vec<FaceId>,
    pub on_boundary: bool,
}

/// A volume cut off by a state boundary: adjacent to the complex but not part
/// of it.
#[derive(Clone, Debug)]
pub struct PhantomVolume {
    pub coord: Coord,
    pub color: Color,
    /// Which state boundary cut it: -1 for the early-time side, +1 for late.
    pub side: i8,
    /// Its vertices that are part of the complex.
    pub verts: Vec<VertId>,
    /// Its faces that are part of the complex.
    pub faces: Vec<FaceId>,
    /// Its faces that are themselves phantom (indices into `phantom_faces`).
    pub phantom_faces: Vec<usize>,
    /// Its edges that are part of the complex.
    pub edges: Vec<EdgeId>,
}

/// A face cut off by a state boundary, sharing at least one full edge with
/// the complex.
#[derive(Clone, Debug)]
pub struct PhantomFace {
    pub coord: Coord,
    pub color: ColorSet,
    pub side: i8,
    pub verts: Vec<VertId>,
    pub edges: Vec<EdgeId>,
}

/// A 4-colored 3-dimensional cell complex.
#[derive(Clone)]
pub struct Colex3 {
    pub topology: Topology,
    pub verts: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    pub vols: Vec<Volume>,
    pub phantom_vols: Vec<PhantomVolume>,
    pub phantom_faces: Vec<PhantomFace>,
}

/// Coordinate canonicalization for the two topologies.
#[derive(Clone, Debug)]
struct Canonicalizer {
    topology: Topology,
    /// Hermite form of the transverse quotient lattice in (u,v) = (x-z, y-z)
    /// coordinates: generated by (d1, e1) and (0, d2).
    hnf: (i64, i64, i64),
}

/// Canonical cell key: injective image of the coordinate modulo the topology's
/// translation group.
type Key = (i64, i64, i64);

impl Canonicalizer {
    fn new(topology: Topology) -> Canonicalizer {
        let hnf = match topology {
            Topology::Torus3 { .. } => (0, 0, 0),
            Topology::TimeInterval { spatial: [l1, l2], .. } => {
                // Quotient lattice in (u,v): spanned by 4*l1*(1,-1) and 4*l2*(1,2).
                let (a, b) = (l1 as i64, l2 as i64);
                let g = gcd(a, b);
                let (x, y) = bezout(a, b); // x*a + y*b = g
                let d1 = 4 * g;
                let e1 = -4 * x * a + 8 * y * b;
                let d2 = 12 * a * b / g;
                (d1, e1, d2)
            }
        };
        Canonicalizer { topology, hnf }
    }

    fn key(&self, c: Coord) -> Key {
        match self.topology {
            Topology::Torus3 { dims } => {
                let mut k = [0i64; 3];
                for i in 0..3 {
                    let m = 4 * dims[i] as i64;
                    k[i] = c[i].rem_euclid(m);
                }
                (k[0], k[1], k[2])
            }
            Topology::TimeInterval { .. } => {
                let t = time_of(c);
                let (u, v) = (c[0] - c[2], c[1] - c[2]);
                let (d1, e1, d2) = self.hnf;
                let q = u.div_euclid(d1);
                let u = u.rem_euclid(d1);
                let v = (v - q * e1).rem_euclid(d2);
                (t, u, v)
            }
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Returns (x, y) with x*a + y*b = gcd(a, b).
fn bezout(a: i64, b: i64) -> (i64, i64) {
    if b == 0 {
        (a.signum(), 0)
    } else {
        let (x, y) = bezout(b, a % b);
        (y, x - (a / b) * y)
    }
}

fn is_volume_center(c: Coord) -> bool {
    let m = c.map(|x| x.rem_euclid(4));
    m.iter().all(|&x| x == 0) || m.iter().all(|&x| x == 2)
}

/// Color of the volume centered at `c` (A sublattice: r/g, B sublattice: b/y).
fn volume_color(c: Coord) -> Color {
    let a_sublattice = c[0].rem_euclid(4) == 0;
    let cell_parity =
        (c[0].div_euclid(4) + c[1].div_euclid(4) + c[2].div_euclid(4)).rem_euclid(2);
    match (a_sublattice, cell_parity) {
        (true, 0) => Color::R,
        (true, _) => Color::G,
        (false, 0) => Color::B,
        (false, _) => Color::Y,
    }
}

/// The four volume centers adjacent to the vertex at `p`.
fn vertex_volume_centers(p: Coord) -> Vec<Coord> {
    let mut out = Vec::with_capacity(4);
    for o in vertex_offsets() {
        let c = sub(p, *o);
        if is_volume_center(c) {
            out.push(c);
        }
    }
    assert_eq!(out.len(), 4, "vertex {p:?} must touch exactly 4 volumes");
    out
}

/// The two volume centers adjacent to the face centered at `c`.
fn face_volume_centers(c: Coord) -> (Coord, Coord, FaceKind) {
    let odd = c.map(|x| x.rem_euclid(2));
    if odd.iter().all(|&x| x == 1) {
        // Hexagon. The A-side neighbor offsets -1 where the center is ≡1 mod 4.
        let delta: Coord = std::array::from_fn(|i| if c[i].rem_euclid(4) == 1 { -1 } else { 1 });
        (add(c, delta), sub(c, delta), FaceKind::Hexagon)
    } else {
        // Square: one coordinate differs mod 4 from the other two (2 vs 0 for
        // A-sublattice squares, 0 vs 2 for B); that is the normal axis.
        let m4 = c.map(|x| x.rem_euclid(4));
        let axis = (0..3)
            .find(|&i| (0..3).filter(|&j| m4[j] == m4[i]).count() == 1)
            .expect("square center must have a distinguished axis");
        let mut d = [0i64; 3];
        d[axis] = 2;
        (add(c, d), sub(c, d), FaceKind::Square)
    }
}

/// Cyclic vertex coordinates of the face centered at `c`.
fn face_vertex_cycle(c: Coord) -> Vec<Coord> {
    let (va, vb, kind) = face_volume_centers(c);
    match kind {
        FaceKind::Hexagon => {
            // Orient via the A-to-B direction and sign-flip the base cycle.
            let (a, b) = if va[0].rem_euclid(4) == 0 { (va, vb) } else { (vb, va) };
            let m = sub(b, a); // (±2,±2,±2)
            HEX_CYCLE
                .iter()
                .map(|w| {
                    let flipped: Coord = std::array::from_fn(|i| w[i] * m[i].signum());
                    add(c, flipped)
                })
                .collect()
        }
        FaceKind::Square => {
            let axis = (0..3).find(|&i| va[i] != c[i]).unwrap();
            let (a1, a2) = match axis {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let mut out = Vec::with_capacity(4);
            for d in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
                let mut v = c;
                v[a1] += d.0;
                v[a2] += d.1;
                out.push(v);
            }
            out
        }
    }
}

fn is_vertex(p: Coord) -> bool {
    vertex_offsets().iter().any(|o| is_volume_center(sub(p, *o)))
}

/// The four lattice neighbors of a vertex.
fn vertex_neighbors(p: Coord) -> Vec<Coord> {
    let mut out = Vec::with_capacity(4);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for (si, sj) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            let mut q = p;
            q[i] += si;
            q[j] += sj;
            if is_vertex(q) {
                out.push(q);
            }
        }
    }
    assert_eq!(out.len(), 4, "vertex {p:?} must have exactly 4 neighbors");
    out
}

/// Vertex sign: orientation of the r, g, b volumes around the rgb-colored
/// edge at the vertex, looking along the edge away from the vertex. A global
/// chirality flip would exchange all signs with no observable effect on any
/// identity checked in this crate.
fn vertex_sign(p: Coord) -> i8 {
    let vols = vertex_volume_centers(p);
    let mut by_color: [Coord; 4] = [[0; 3]; 4];
    for &vc in &vols {
        by_color[volume_color(vc).index()] = vc;
    }
    // The rgb edge is the one not contained in the y volume.
    let y = by_color[Color::Y.index()];
    let mut edge_dir = None;
    for q in vertex_neighbors(p) {
        let shared: Vec<Coord> =
            vertex_volume_centers(q).into_iter().filter(|vc| vols.contains(vc)).collect();
        if !shared.contains(&y) {
            edge_dir = Some(sub(q, p));
        }
    }
    let d = edge_dir.expect("every vertex has exactly one rgb edge");
    let r = by_color[Color::R.index()];
    let g = by_color[Color::G.index()];
    let b = by_color[Color::B.index()];
    let u = sub(g, r);
    let v = sub(b, r);
    let det = d[0] * (u[1] * v[2] - u[2] * v[1]) - d[1] * (u[0] * v[2] - u[2] * v[0])
        + d[2] * (u[0] * v[1] - u[1] * v[0]);
    assert_ne!(det, 0);
    if det > 0 {
        1
    } else {
        -1
    }
}

impl Colex3 {
    /// Builds a bitruncated-cubic 3-colex on a 3-torus. Dimensions count cubic
    /// cells per axis and must be even (the 4-coloring has period 2) and at
    /// least 2 (so no cell pair is doubly incident).
    pub fn torus3(dims: [usize; 3]) -> Result<Colex3> {
        for &d in &dims {
            if d < 2 || d % 2 != 0 {
                return Err(Error::Construction(format!(
                    "torus dimensions must be even and >= 2, got {dims:?}"
                )));
            }
        }
        let mut centers = Vec::new();
        for i in 0..dims[0] as i64 {
            for j in 0..dims[1] as i64 {
                for k in 0..dims[2] as i64 {
                    centers.push([4 * i, 4 * j, 4 * k]);
                    centers.push([4 * i + 2, 4 * j + 2, 4 * k + 2]);
                }
            }
        }
        Self::build(Topology::Torus3 { dims }, centers, None)
    }

    /// Builds a 3-colex periodic transverse to the time axis and cut along it:
    /// vertices occupy time slices `1, 3, .., 2*slices - 1`, and the two cut
    /// surfaces are open state boundaries. `spatial` are the transverse
    /// periods (>= 2), `slices` the number of vertex time slices (>= 4).
    pub fn time_interval(spatial: [usize; 2], slices: usize) -> Result<Colex3> {
        if spatial[0] < 2 || spatial[1] < 2 {
            return Err(Error::Construction(format!(
                "transverse periods must be >= 2, got {spatial:?}"
            )));
        }
        if slices < 4 {
            return Err(Error::Construction(format!("need at least 4 time slices, got {slices}")));
        }
        let (tmin, tmax) = (1i64, 2 * slices as i64 - 1);
        // Transversal of the quotient: i in [0,l1), j in [0,l2), k ranging so
        // that the volume could own an in-range vertex.
        let mut centers = Vec::new();
        for i in 0..spatial[0] as i64 {
            for j in 0..spatial[1] as i64 {
                for base in [[0i64, 0, 0], [2, 2, 2]] {
                    let off = base[0] * 3; // center time contribution of the base
                    let lo = (tmin - 3 - off - 4 * (i + j) + 3).div_euclid(4) - 1;
                    let hi = (tmax + 3 - off - 4 * (i + j)).div_euclid(4) + 1;
                    for k in lo..=hi {
                        centers.push([4 * i + base[0], 4 * j + base[1], 4 * k + base[2]]);
                    }
                }
            }
        }
        Self::build(Topology::TimeInterval { spatial, slices }, centers, Some((tmin, tmax)))
    }

    fn build(
        topology: Topology,
        vol_centers: Vec<Coord>,
        trange: Option<(i64, i64)>,
    ) -> Result<Colex3> {
        let canon = Canonicalizer::new(topology);
        let in_range = |t: i64| trange.map_or(true, |(lo, hi)| t >= lo && t <= hi);
        let voffs = vertex_offsets();

        // Pass 1: collect vertices (deduped, sorted by canonical key).
        let mut seen: HashMap<Key, Coord> = HashMap::new();
        for &vc in &vol_centers {
            for o in voffs {
                let p = add(vc, *o);
                if !in_range(time_of(p)) {
                    continue;
                }
                seen.entry(canon.key(p)).or_insert(p);
            }
        }
        let mut vert_keys: Vec<(Key, Coord)> = seen.into_iter().collect();
        vert_keys.sort();
        let vert_index: HashMap<Key, VertId> =
            vert_keys.iter().enumerate().map(|(i, &(k, _))| (k, i)).collect();
        let lookup_vert = |p: Coord| -> Option<VertId> { vert_index.get(&canon.key(p)).copied() };

        // Pass 2: classify volumes as real (all 24 vertices present) or phantom.
        let mut real_vol_coords: Vec<(Key, Coord)> = Vec::new();
        let mut phantom_vol_coords: Vec<(Key, Coord)> = Vec::new();
        let mut seen_vols: HashMap<Key, ()> = HashMap::new();
        for &vc in &vol_centers {
            let k = canon.key(vc);
            if seen_vols.insert(k, ()).is_some() {
                continue;
            }
            let present = voffs.iter().filter(|o| lookup_vert(add(vc, **o)).is_some()).count();
            if present == 24 {
                real_vol_coords.push((k, vc));
            } else if present > 0 {
                phantom_vol_coords.push((k, vc));
            }
        }
        real_vol_coords.sort();
        phantom_vol_coords.sort();
        let vol_index: HashMap<Key, VolId> =
            real_vol_coords.iter().enumerate().map(|(i, &(k, _))| (k, i)).collect();

        // Pass 3: faces. Real if all vertices present; phantom if some full
        // edge (consecutive vertex pair) is present.
        let foffs = face_offsets();
        let mut real_face_coords: Vec<(Key, Coord)> = Vec::new();
        let mut phantom_face_coords: Vec<(Key, Coord)> = Vec::new();
        let mut seen_faces: HashMap<Key, ()> = HashMap::new();
        for &(_, vc) in real_vol_coords.iter().chain(phantom_vol_coords.iter()) {
            for fo in &foffs {
                let fc = add(vc, *fo);
                let k = canon.key(fc);
                if seen_faces.insert(k, ()).is_some() {
                    continue;
                }
                let cycle = face_vertex_cycle(fc);
                let n = cycle.len();
                let present = cycle.iter().filter(|p| lookup_vert(**p).is_some()).count();
                if present == n {
                    real_face_coords.push((k, fc));
                } else {
                    let has_edge = (0..n).any(|i| {
                        lookup_vert(cycle[i]).is_some() && lookup_vert(cycle[(i + 1) % n]).is_some()
                    });
                    if has_edge {
                        phantom_face_coords.push((k, fc));
                    }
                }
            }
        }
        real_face_coords.sort();
        phantom_face_coords.sort();
        let face_index: HashMap<Key, FaceId> =
            real_face_coords.iter().enumerate().map(|(i, &(k, _))| (k, i)).collect();

        // Pass 4: edges from face cycles (real and phantom); an edge exists
        // iff both endpoints do. The coordinates passed in come from one face
        // cycle, i.e. a consistent local frame, which matters on small tori
        // where stored vertex representatives may sit in different frames.
        let mut edge_map: HashMap<(VertId, VertId), EdgeId> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut add_edge =
            |a: VertId, b: VertId, pa: Coord, pb: Coord, edges: &mut Vec<Edge>| -> EdgeId {
                let key = if a < b { (a, b) } else { (b, a) };
                *edge_map.entry(key).or_insert_with(|| {
                    let vols_b = vertex_volume_centers(pb);
                    let shared: Vec<Coord> = vertex_volume_centers(pa)
                        .into_iter()
                        .filter(|c| vols_b.contains(c))
                        .collect();
                    assert_eq!(shared.len(), 3, "edge must touch exactly 3 volumes");
                    let mut color = ColorSet::EMPTY;
                    let mut volumes: Vec<VolId> = Vec::new();
                    for &c in &shared {
                        color.0 |= ColorSet::single(volume_color(c)).0;
                        if let Some(&vi) = vol_index.get(&canon.key(c)) {
                            volumes.push(vi);
                        }
                    }
                    volumes.sort_unstable();
                    let on_boundary = volumes.len() < 3;
                    edges.push(Edge {
                        verts: [key.0, key.1],
                        color,
                        volumes,
                        faces: Vec::new(),
                        on_boundary,
                    });
                    edges.len() - 1
                })
            };

        // Build real faces.
        let mut faces: Vec<Face> = Vec::with_capacity(real_face_coords.len());
        for &(_, fc) in &real_face_coords {
            let cycle = face_vertex_cycle(fc);
            let verts: Vec<VertId> = cycle.iter().map(|p| lookup_vert(*p).unwrap()).collect();
            let n = verts.len();
            let mut face_edges = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (verts[i], verts[(i + 1) % n]);
                face_edges.push(add_edge(a, b, cycle[i], cycle[(i + 1) % n], &mut edges));
            }
            let (va, vb, kind) = face_volume_centers(fc);
            let color = ColorSet::pair(volume_color(va), volume_color(vb));
            let times: Vec<i64> = cycle.iter().map(|p| time_of(*p)).collect();
            let tmax = *times.iter().max().unwrap();
            let time_perp = times.iter().all(|&t| t == tmax);
            faces.push(Face {
                coord: fc,
                kind,
                color,
                verts,
                edges: face_edges,
                volumes: Vec::new(),
                on_boundary: false,
                time: tmax,
                time_perp,
            });
        }

        // Phantom faces (state boundaries only).
        let mut phantom_faces: Vec<PhantomFace> = Vec::new();
        for &(_, fc) in &phantom_face_coords {
            let cycle = face_vertex_cycle(fc);
            let n = cycle.len();
            let mut pf_verts = Vec::new();
            let mut pf_edges = Vec::new();
            for i in 0..n {
                if let Some(v) = lookup_vert(cycle[i]) {
                    pf_verts.push(v);
                    if let Some(w) = lookup_vert(cycle[(i + 1) % n]) {
                        pf_edges.push(add_edge(v, w, cycle[i], cycle[(i + 1) % n], &mut edges));
                    }
                }
            }
            let (va, vb, _) = face_volume_centers(fc);
            let color = ColorSet::pair(volume_color(va), volume_color(vb));
            let side = if cycle.iter().any(|p| trange.is_some_and(|(lo, _)| time_of(*p) < lo)) {
                -1
            } else {
                1
            };
            phantom_faces.push(PhantomFace {
                coord: fc,
                color,
                side,
                verts: pf_verts,
                edges: pf_edges,
            });
        }

        // Volumes.
        let mut vols: Vec<Volume> = Vec::with_capacity(real_vol_coords.len());
        for &(_, vc) in &real_vol_coords {
            let verts: Vec<VertId> =
                voffs.iter().map(|o| lookup_vert(add(vc, *o)).unwrap()).collect();
            let mut vfaces: Vec<FaceId> = foffs
                .iter()
                .map(|fo| {
                    *face_index
                        .get(&canon.key(add(vc, *fo)))
                        .expect("real volume must have all 14 faces real")
                })
                .collect();
            vfaces.sort_unstable();
            vols.push(Volume {
                coord: vc,
                color: volume_color(vc),
                verts,
                edges: Vec::new(),
                faces: vfaces,
                on_boundary: false,
            });
        }

        // Phantom volumes.
        let phantom_face_index: HashMap<Key, usize> =
            phantom_face_coords.iter().enumerate().map(|(i, &(k, _))| (k, i)).collect();
        let mut phantom_vols: Vec<PhantomVolume> = Vec::new();
        for &(_, vc) in &phantom_vol_coords {
            let verts: Vec<VertId> = voffs.iter().filter_map(|o| lookup_vert(add(vc, *o))).collect();
            let mut faces_in = Vec::new();
            let mut pfaces = Vec::new();
            let mut pedges: Vec<EdgeId> = Vec::new();
            for fo in &foffs {
                let fc = add(vc, *fo);
                let k = canon.key(fc);
                if let Some(&f) = face_index.get(&k) {
                    faces_in.push(f);
                    pedges.extend(faces[f].edges.iter().copied());
                } else if let Some(&pf) = phantom_face_index.get(&k) {
                    pfaces.push(pf);
                    pedges.extend(phantom_faces[pf].edges.iter().copied());
                }
            }
            pedges.sort_unstable();
            pedges.dedup();
            let side = if voffs
                .iter()
                .any(|o| trange.is_some_and(|(lo, _)| time_of(add(vc, *o)) < lo))
            {
                -1
            } else {
                1
            };
            phantom_vols.push(PhantomVolume {
                coord: vc,
                color: volume_color(vc),
                side,
                verts,
                faces: faces_in,
                phantom_faces: pfaces,
                edges: pedges,
            });
        }

        // Cross-links: face -> volumes, edge -> faces/volumes, vertex data.
        for (vi, vol) in vols.iter().enumerate() {
            for &f in &vol.faces {
                faces[f].volumes.push(vi);
            }
        }
        for (fi, face) in faces.iter().enumerate() {
            for &e in &face.edges {
                edges[e].faces.push(fi);
            }
        }
        let mut verts: Vec<Vertex> = vert_keys
            .iter()
            .map(|&(_, p)| Vertex {
                coord: p,
                sign: vertex_sign(p),
                volumes: [None; 4],
                edges: Vec::new(),
                faces: Vec::new(),
                perp_hexagon: None,
            })
            .collect();
        for (vi, vol) in vols.iter_mut().enumerate() {
            for &p in &vol.verts {
                verts[p].volumes[vol.color.index()] = Some(vi);
            }
            let mut vedges: Vec<EdgeId> = Vec::new();
            for &f in &vol.faces {
                vedges.extend(faces[f].edges.iter().copied());
            }
            vedges.sort_unstable();
            vedges.dedup();
            vol.edges = vedges;
        }
        for (ei, edge) in edges.iter_mut().enumerate() {
            edge.faces.sort_unstable();
            edge.faces.dedup();
            for &p in &edge.verts {
                verts[p].edges.push(ei);
            }
        }
        for (fi, face) in faces.iter_mut().enumerate() {
            face.volumes.sort_unstable();
            face.on_boundary = face.volumes.len() < 2;
            for &p in &face.verts {
                verts[p].faces.push(fi);
            }
            if face.time_perp {
                for &p in &face.verts {
                    assert!(verts[p].perp_hexagon.is_none(), "vertex in two time-perp hexagons");
                    verts[p].perp_hexagon = Some(fi);
                }
            }
        }
        for vol in &mut vols {
            vol.on_boundary = vol.faces.iter().any(|&f| faces[f].on_boundary)
                || vol.edges.iter().any(|&e| edges[e].on_boundary);
        }
        for v in &mut verts {
            v.edges.sort_unstable();
            v.faces.sort_unstable();
        }

        let colex =
            Colex3 { topology, verts, edges, faces, vols, phantom_vols, phantom_faces };
        colex.check_invariants()?;
        Ok(colex)
    }

    /// Structural invariants every colex must satisfy; cheap enough to run at
    /// construction time.
    fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Construction(msg));
        for (ei, e) in self.edges.iter().enumerate() {
            let s0 = self.verts[e.verts[0]].sign;
            let s1 = self.verts[e.verts[1]].sign;
            if s0 * s1 != -1 {
                return fail(format!("edge {ei}: endpoint signs do not alternate"));
            }
        }
        for (fi, f) in self.faces.iter().enumerate() {
            if f.verts.len() % 2 != 0 {
                return fail(format!("face {fi}: odd vertex count"));
            }
            if f.color.len() != 2 {
                return fail(format!("face {fi}: bad color"));
            }
        }
        for (pi, p) in self.verts.iter().enumerate() {
            // Bulk valences; vertices at a state boundary may have cells cut away.
            let interior = p.volumes.iter().all(|v| v.is_some());
            if interior && (p.edges.len() != 4 || p.faces.len() != 6) {
                return fail(format!(
                    "interior vertex {pi}: expected 4 edges and 6 faces, got {} and {}",
                    p.edges.len(),
                    p.faces.len()
                ));
            }
            if self.is_torus() && !interior {
                return fail(format!("vertex {pi}: missing adjacent volume on a torus"));
            }
        }
        for (vi, v) in self.vols.iter().enumerate() {
            if v.verts.len() != 24 || v.faces.len() != 14 || v.edges.len() != 36 {
                return fail(format!("volume {vi}: wrong cell counts"));
            }
            let balance: i64 = v.verts.iter().map(|&p| self.verts[p].sign as i64).sum();
            if balance != 0 {
                return fail(format!("volume {vi}: vertex signs do not balance"));
            }
        }
        Ok(())
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.topology, Topology::Torus3 { .. })
    }

    /// The unique y-colored volume at a vertex (always present on a torus;
    /// may be missing near a state boundary where it is a phantom).
    pub fn y_volume_of(&self, p: VertId) -> Option<VolId> {
        self.verts[p].volumes[Color::Y.index()]
    }

    /// Vertex time coordinate along the lattice time axis.
    pub fn vert_time(&self, p: VertId) -> i64 {
        time_of(self.verts[p].coord)
    }

    /// `(i,j)`-adjacency matrix: entry `(x,y)` is 1 iff one cell contains the
    /// other (for `i == j` this is the identity).
    pub fn adjacency(&self, i: usize, j: usize) -> BitMatrix {
        assert!(i <= 3 && j <= 3, "cell dimensions must be in 0..=3");
        if i > j {
            return self.adjacency(j, i).transpose();
        }
        let counts = [self.verts.len(), self.edges.len(), self.faces.len(), self.vols.len()];
        let mut m = BitMatrix::zeros(counts[j], counts[i]);
        match (i, j) {
            (0, 0) | (1, 1) | (2, 2) | (3, 3) => return BitMatrix::identity(counts[i]),
            (0, 1) => {
                for (e, edge) in self.edges.iter().enumerate() {
                    for &p in &edge.verts {
                        m.flip(e, p);
                    }
                }
            }
            (0, 2) => {
                for (f, face) in self.faces.iter().enumerate() {
                    for &p in &face.verts {
                        m.flip(f, p);
                    }
                }
            }
            (0, 3) => {
                for (v, vol) in self.vols.iter().enumerate() {
                    for &p in &vol.verts {
                        m.flip(v, p);
                    }
                }
            }
            (1, 2) => {
                for (f, face) in self.faces.iter().enumerate() {
                    for &e in &face.edges {
                        m.flip(f, e);
                    }
                }
            }
            (1, 3) => {
                for (v, vol) in self.vols.iter().enumerate() {
                    for &e in &vol.edges {
                        m.flip(v, e);
                    }
                }
            }
            (2, 3) => {
                for (v, vol) in self.vols.iter().enumerate() {
                    for &f in &vol.faces {
                        m.flip(v, f);
                    }
                }
            }
            _ => unreachable!(),
        }
        m.transpose()
    }

    /// Time slices for just-in-time decoding. Only the lattice's native
    /// `(1,1,1)` time axis is supported, and only on time-interval lattices
    /// (a torus has no globally consistent time coordinate).
    pub fn time_slices(&self, direction: [i64; 3]) -> Result<TimeSlicing> {
        if direction != [1, 1, 1] {
            return Err(Error::Unsupported(format!(
                "time axis {direction:?}; the lattice's time axis is [1,1,1]"
            )));
        }
        let Topology::TimeInterval { slices, .. } = self.topology else {
            return Err(Error::Unsupported("time slicing requires a time-interval lattice".into()));
        };
        let mut vert_slices = vec![Vec::new(); slices];
        for (p, v) in self.verts.iter().enumerate() {
            let t = time_of(v.coord);
            assert!(t % 2 == 1);
            vert_slices[((t - 1) / 2) as usize].push(p);
        }
        let mut face_slices = vec![Vec::new(); slices];
        let mut face_slice_of = vec![0usize; self.faces.len()];
        for (f, face) in self.faces.iter().enumerate() {
            let s = ((face.time - 1) / 2) as usize;
            face_slices[s].push(f);
            face_slice_of[f] = s;
        }
        Ok(TimeSlicing { verts: vert_slices, faces: face_slices, face_slice: face_slice_of })
    }

    /// Line-oriented text dump of all cells with colors, signs, coordinates
    /// and incidences.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "colex3 {:?}", self.topology);
        let _ = writeln!(
            out,
            "counts verts={} edges={} faces={} vols={} phantom_vols={} phantom_faces={}",
            self.verts.len(),
            self.edges.len(),
            self.faces.len(),
            self.vols.len(),
            self.phantom_vols.len(),
            self.phantom_faces.len()
        );
        for (i, v) in self.verts.iter().enumerate() {
            let _ =
                writeln!(out, "vert {} coord={:?} sign={} edges={:?}", i, v.coord, v.sign, v.edges);
        }
        for (i, e) in self.edges.iter().enumerate() {
            let _ = writeln!(
                out,
                "edge {} verts={:?} color={:?} vols={:?}",
                i, e.verts, e.color, e.volumes
            );
        }
        for (i, f) in self.faces.iter().enumerate() {
            let _ = writeln!(
                out,
                "face {} coord={:?} kind={:?} color={:?} verts={:?} vols={:?}",
                i, f.coord, f.kind, f.color, f.verts, f.volumes
            );
        }
        for (i, v) in self.vols.iter().enumerate() {
            let _ =
                writeln!(out, "vol {} coord={:?} color={:?} faces={:?}", i, v.coord, v.color, v.faces);
        }
        out
    }
}

/// Partition of vertices and faces by time coordinate.
///
/// `faces[t]` holds the faces whose latest vertices lie in slice `t`, so each
/// face appears in exactly one slice and `faces[..=t]` is exactly the set of
/// faces whose measurement outcomes are known after executing slice `t`.
#[derive(Clone, Debug)]
pub struct TimeSlicing {
    pub verts: Vec<Vec<VertId>>,
    pub faces: Vec<Vec<FaceId>>,
    pub face_slice: Vec<usize>,
}

impl TimeSlicing {
    pub fn num_slices(&self) -> usize {
        self.verts.len()
    }
}

// ---------------------------------------------------------------------------
// 2-colexes
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Vertex2 {
    pub sign: i8,
    pub edges: Vec<EdgeId>,
    pub faces: Vec<FaceId>,
}

#[derive(Clone, Debug)]
pub struct Edge2 {
    pub verts: [VertId; 2],
    /// Colors of the two adjacent faces.
    pub color: ColorSet,
    pub faces: [FaceId; 2],
}

#[derive(Clone, Debug)]
pub struct Face2 {
    pub color: Color,
    /// Vertices in cyclic order.
    pub verts: Vec<VertId>,
    /// `edges[i]` joins `verts[i]` and `verts[i+1]`.
    pub edges: Vec<EdgeId>,
}

/// A 3-colored 2-dimensional cell complex (torus or 2-sphere).
#[derive(Clone)]
pub struct Colex2 {
    /// The three colors in use (2-colexes inside a 3-colex inherit the three
    /// colors other than the surrounding volume's).
    pub palette: [Color; 3],
    pub verts: Vec<Vertex2>,
    pub edges: Vec<Edge2>,
    pub faces: Vec<Face2>,
}

impl Colex2 {
    /// Periodic hexagonal 2-colex with `lx * ly` faces. Both dimensions must
    /// be multiples of 3 (the face 3-coloring has period 3).
    pub fn hex_torus(lx: usize, ly: usize) -> Result<Colex2> {
        if lx < 3 || ly < 3 || lx % 3 != 0 || ly % 3 != 0 {
            return Err(Error::Construction(format!(
                "hexagonal dimensions must be multiples of 3 and >= 3, got ({lx},{ly})"
            )));
        }
        let (lxi, lyi) = (lx as i64, ly as i64);
        let fidx =
            |i: i64, j: i64| -> FaceId { (i.rem_euclid(lxi) * lyi + j.rem_euclid(lyi)) as usize };
        // Vertices are the triangles of the dual triangular lattice:
        // up-triangles U(i,j) = faces {f(i,j), f(i+1,j), f(i,j+1)} and
        // down-triangles D(i,j) = {f(i+1,j), f(i,j+1), f(i+1,j+1)}.
        let n_faces = lx * ly;
        let upv = |i: i64, j: i64| -> VertId { 2 * fidx(i, j) };
        let dnv = |i: i64, j: i64| -> VertId { 2 * fidx(i, j) + 1 };
        let mut verts: Vec<Vertex2> = (0..2 * n_faces)
            .map(|k| Vertex2 {
                // Up-triangles cycle r-g-b counterclockwise, down-triangles
                // clockwise; clockwise r-g-b is the +1 convention.
                sign: if k % 2 == 0 { -1 } else { 1 },
                edges: Vec::new(),
                faces: Vec::new(),
            })
            .collect();
        let mut faces: Vec<Face2> = (0..n_faces)
            .map(|k| {
                let i = (k / ly) as i64;
                let j = (k % ly) as i64;
                Face2 {
                    color: Color::from_index((i - j).rem_euclid(3) as usize),
                    verts: Vec::new(),
                    edges: Vec::new(),
                }
            })
            .collect();
        let mut edges: Vec<Edge2> = Vec::new();
        let mut edge_map: HashMap<(VertId, VertId), EdgeId> = HashMap::new();
        for i in 0..lxi {
            for j in 0..lyi {
                let f = fidx(i, j);
                // Cyclic vertex order around face (i,j); consecutive vertices
                // share the listed neighbor face.
                let cycle: [(VertId, FaceId); 6] = [
                    (upv(i, j), fidx(i + 1, j)),
                    (dnv(i, j - 1), fidx(i + 1, j - 1)),
                    (upv(i, j - 1), fidx(i, j - 1)),
                    (dnv(i - 1, j - 1), fidx(i - 1, j)),
                    (upv(i - 1, j), fidx(i - 1, j + 1)),
                    (dnv(i - 1, j), fidx(i, j + 1)),
                ];
                for (k, &(v, neighbor)) in cycle.iter().enumerate() {
                    faces[f].verts.push(v);
                    let w = cycle[(k + 1) % 6].0;
                    let key = if v < w { (v, w) } else { (w, v) };
                    let color = ColorSet::pair(faces[f].color, faces[neighbor].color);
                    let e = *edge_map.entry(key).or_insert_with(|| {
                        edges.push(Edge2 { verts: [key.0, key.1], color, faces: [f, neighbor] });
                        edges.len() - 1
                    });
                    faces[f].edges.push(e);
                }
            }
        }
        for (fi, face) in faces.iter().enumerate() {
            for &v in &face.verts {
                verts[v].faces.push(fi);
            }
        }
        for (ei, edge) in edges.iter().enumerate() {
            for &v in &edge.verts {
                verts[v].edges.push(ei);
            }
        }
        for v in &mut verts {
            v.edges.sort_unstable();
            v.faces.sort_unstable();
        }
        let colex = Colex2 { palette: [Color::R, Color::G, Color::B], verts, edges, faces };
        colex.check_invariants()?;
        Ok(colex)
    }

    /// The boundary 2-sphere of a 3-colex volume, with cells reindexed
    /// locally. Returned vectors translate local vertex/edge/face ids back to
    /// the parent complex.
    pub fn sphere_of_volume(
        colex: &Colex3,
        v: VolId,
    ) -> (Colex2, Vec<VertId>, Vec<EdgeId>, Vec<FaceId>) {
        let vol = &colex.vols[v];
        let vol_color = vol.color;
        let vert_ids = vol.verts.clone();
        let edge_ids = vol.edges.clone();
        let face_ids = vol.faces.clone();
        let vmap: HashMap<VertId, usize> =
            vert_ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let emap: HashMap<EdgeId, usize> =
            edge_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let fmap: HashMap<FaceId, usize> =
            face_ids.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let verts: Vec<Vertex2> = vert_ids
            .iter()
            .map(|&p| {
                let pv = &colex.verts[p];
                Vertex2 {
                    sign: pv.sign,
                    edges: pv.edges.iter().filter_map(|e| emap.get(e).copied()).collect(),
                    faces: pv.faces.iter().filter_map(|f| fmap.get(f).copied()).collect(),
                }
            })
            .collect();
        let edges: Vec<Edge2> = edge_ids
            .iter()
            .map(|&e| {
                let ev = &colex.edges[e];
                let fs: Vec<usize> = ev.faces.iter().filter_map(|f| fmap.get(f).copied()).collect();
                assert_eq!(fs.len(), 2, "volume edge must lie on exactly 2 volume faces");
                Edge2 {
                    verts: [vmap[&ev.verts[0]], vmap[&ev.verts[1]]],
                    // Drop the surrounding volume's color from the edge color.
                    color: ColorSet(ev.color.0 & !ColorSet::single(vol_color).0),
                    faces: [fs[0], fs[1]],
                }
            })
            .collect();
        let faces: Vec<Face2> = face_ids
            .iter()
            .map(|&f| {
                let fv = &colex.faces[f];
                let color = fv
                    .color
                    .iter()
                    .find(|&c| c != vol_color)
                    .expect("volume face color must contain the volume color");
                Face2 {
                    color,
                    verts: fv.verts.iter().map(|p| vmap[p]).collect(),
                    edges: fv.edges.iter().map(|e| emap[e]).collect(),
                }
            })
            .collect();
        let palette: Vec<Color> = Color::ALL.into_iter().filter(|&c| c != vol_color).collect();
        let colex2 = Colex2 { palette: [palette[0], palette[1], palette[2]], verts, edges, faces };
        (colex2, vert_ids, edge_ids, face_ids)
    }

    fn check_invariants(&self) -> Result<()> {
        for (ei, e) in self.edges.iter().enumerate() {
            if self.faces[e.faces[0]].color == self.faces[e.faces[1]].color {
                return Err(Error::Construction(format!("edge {ei}: adjacent faces share a color")));
            }
            let s0 = self.verts[e.verts[0]].sign;
            let s1 = self.verts[e.verts[1]].sign;
            if s0 * s1 != -1 {
                return Err(Error::Construction(format!("edge {ei}: signs do not alternate")));
            }
        }
        for (fi, f) in self.faces.iter().enumerate() {
            if f.verts.len() % 2 != 0 {
                return Err(Error::Construction(format!("face {fi}: odd vertex count")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn torus_cell_counts() {
        // Per cubic cell (one site of each sublattice): 2 volumes, 14 faces,
        // 24 edges, 12 vertices, by direct enumeration of the honeycomb.
        let c = Colex3::torus3([2, 2, 2]).unwrap();
        let n = 8;
        assert_eq!(c.vols.len(), 2 * n);
        assert_eq!(c.faces.len(), 14 * n);
        assert_eq!(c.edges.len(), 24 * n);
        assert_eq!(c.verts.len(), 12 * n);
        // 3-torus Euler characteristic.
        assert_eq!(
            c.verts.len() as i64 - c.edges.len() as i64 + c.faces.len() as i64
                - c.vols.len() as i64,
            0
        );
        assert!(c.phantom_vols.is_empty());
    }

    #[test]
    fn torus_coloring_and_valences() {
        let c = Colex3::torus3([2, 2, 2]).unwrap();
        for p in &c.verts {
            let colors: Vec<_> = p.volumes.iter().flatten().collect();
            assert_eq!(colors.len(), 4);
            assert_eq!(p.edges.len(), 4);
            assert_eq!(p.faces.len(), 6);
            assert!(p.perp_hexagon.is_some());
        }
        for f in &c.faces {
            assert_eq!(f.volumes.len(), 2);
            let c0 = c.vols[f.volumes[0]].color;
            let c1 = c.vols[f.volumes[1]].color;
            assert_ne!(c0, c1);
            assert_eq!(f.color, ColorSet::pair(c0, c1));
            match f.kind {
                FaceKind::Square => assert_eq!(f.verts.len(), 4),
                FaceKind::Hexagon => assert_eq!(f.verts.len(), 6),
            }
        }
        for e in &c.edges {
            assert_eq!(e.volumes.len(), 3);
            assert_eq!(e.color.len(), 3);
            assert_eq!(e.faces.len(), 3);
        }
        for color in Color::ALL {
            assert_eq!(c.vols.iter().filter(|v| v.color == color).count(), 4);
        }
    }

    #[test]
    fn torus_rejects_bad_dims() {
        assert!(Colex3::torus3([3, 2, 2]).is_err());
        assert!(Colex3::torus3([0, 2, 2]).is_err());
    }

    #[test]
    fn translation_invariance_of_cell_counts() {
        // Identical census for every primitive cell: bucket vertices by their
        // coordinate mod 4 and check all classes are equally populated.
        let c = Colex3::torus3([2, 2, 4]).unwrap();
        let mut census: HashMap<[i64; 3], usize> = HashMap::new();
        for v in &c.verts {
            *census.entry(v.coord.map(|x| x.rem_euclid(4))).or_default() += 1;
        }
        let counts: HashSet<usize> = census.values().copied().collect();
        assert_eq!(census.len(), 12, "12 vertex classes per cubic cell");
        assert_eq!(counts.len(), 1, "every vertex class equally populated");
    }

    #[test]
    fn adjacency_composition_vanishes() {
        // Successive boundary maps compose to zero in the cellular complex.
        let c = Colex3::torus3([2, 2, 2]).unwrap();
        for i in 0..2 {
            let a = c.adjacency(i + 1, i);
            let b = c.adjacency(i + 2, i + 1);
            assert!(b.mul(&a).is_zero(), "d d != 0 between dims {} and {}", i, i + 2);
        }
        assert_eq!(c.adjacency(0, 0), BitMatrix::identity(c.verts.len()));
        // A volume row of the (3,0) adjacency has one entry per vertex.
        let m = c.adjacency(3, 0);
        for v in 0..c.vols.len() {
            assert_eq!(m.row_weight(v), 24);
        }
    }

    #[test]
    fn interval_slicing_partitions() {
        let c = Colex3::time_interval([2, 2], 8).unwrap();
        let slicing = c.time_slices([1, 1, 1]).unwrap();
        assert_eq!(slicing.num_slices(), 8);
        let total: usize = slicing.verts.iter().map(|s| s.len()).sum();
        assert_eq!(total, c.verts.len());
        let total_f: usize = slicing.faces.iter().map(|s| s.len()).sum();
        assert_eq!(total_f, c.faces.len());
        // Time-perpendicular hexagons have all six vertices in one slice.
        for face in &c.faces {
            if face.time_perp {
                let ts: HashSet<i64> =
                    face.verts.iter().map(|&p| time_of(c.verts[p].coord)).collect();
                assert_eq!(ts.len(), 1);
            }
        }
        // Interior slices have constant face counts.
        let sizes: HashSet<usize> = slicing.faces[3..6].iter().map(|s| s.len()).collect();
        assert_eq!(sizes.len(), 1, "interior face slices differ in size: {sizes:?}");
    }

    #[test]
    fn interval_has_state_boundaries() {
        let c = Colex3::time_interval([2, 2], 6).unwrap();
        assert!(c.phantom_vols.iter().any(|v| v.side == -1));
        assert!(c.phantom_vols.iter().any(|v| v.side == 1));
        for pv in &c.phantom_vols {
            assert!(!pv.verts.is_empty());
        }
        // Unsupported slicing directions and topologies are rejected.
        assert!(c.time_slices([1, 0, 0]).is_err());
        let t = Colex3::torus3([2, 2, 2]).unwrap();
        assert!(t.time_slices([1, 1, 1]).is_err());
    }

    #[test]
    fn hex_torus_counts_and_rejection() {
        let c = Colex2::hex_torus(3, 3).unwrap();
        assert_eq!(c.verts.len(), 18);
        assert_eq!(c.edges.len(), 27);
        assert_eq!(c.faces.len(), 9);
        // Torus Euler characteristic.
        assert_eq!(c.verts.len() + c.faces.len(), c.edges.len());
        assert!(Colex2::hex_torus(2, 3).is_err());
        assert!(Colex2::hex_torus(4, 3).is_err());
    }

    #[test]
    fn sphere_of_volume_is_valid_2colex() {
        let c = Colex3::torus3([2, 2, 2]).unwrap();
        for v in 0..4 {
            let (s, _, _, _) = Colex2::sphere_of_volume(&c, v);
            assert_eq!(s.verts.len(), 24);
            assert_eq!(s.edges.len(), 36);
            assert_eq!(s.faces.len(), 14);
            // Sphere Euler characteristic.
            assert_eq!(s.verts.len() + s.faces.len(), s.edges.len() + 2);
            s.check_invariants().unwrap();
            assert!(!s.palette.contains(&c.vols[v].color));
        }
    }
}
