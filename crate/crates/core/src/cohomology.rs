//! Chain complexes on colexes: cellular and color cohomology, boundary
//! variants, and the chain maps relating them.
//!
//! Degree conventions for the 3D color complex (bulk):
//!
//! ```text
//! deg -1      0       1       2       3          4
//!     C_2 -> vols -> verts -> faces -> (vol,c) -> C_1
//! ```
//!
//! The middle maps d_0, d_1, d_2 are the locally exact part that decoders
//! consume; the end maps and the auxiliary m-homomorphisms are global
//! conservation laws. Boundary variants (on time-interval lattices) only
//! carry degrees 0..3.

use crate::colex::{Colex2, Colex3, Color, ColorSet, EdgeId, FaceId, VertId, VolId};
use crate::gf2::{BitMatrix, BitVec};
use crate::{Error, Result};
use std::collections::HashMap;

/// A generator of some chain group, tagged by its origin cell and qualifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Generator {
    /// The unique generator of a one-element set.
    Zero,
    /// A single color c ∈ C_1.
    ColorGen(Color),
    /// A color pair κ ∈ C_2.
    PairGen(ColorSet),
    Vert(VertId),
    Edge(EdgeId),
    Face(FaceId),
    Vol(VolId),
    /// Degree-3 generator (v, c) with c different from the volume color.
    VolColor(VolId, Color),
    PhantomVol(usize),
    PhantomVolColor(usize, Color),
    PhantomFace(usize),
    /// A boundary face promoted to degree 3 (double-color boundaries).
    FaceGen3(FaceId),
}

/// Ordered generator sets plus GF(2) coboundary matrices `d[i]` mapping
/// degree `min_degree + i` to the next degree, with `d d = 0` throughout.
#[derive(Clone)]
pub struct ChainComplex {
    pub min_degree: i32,
    pub gens: Vec<Vec<Generator>>,
    pub d: Vec<BitMatrix>,
    index: Vec<HashMap<Generator, usize>>,
}

/// One violated composition entry: degree of the first map, generator index
/// in degree `deg + 2` (row) and in degree `deg` (column).
pub type Violation = (i32, usize, usize);

impl ChainComplex {
    pub fn new(min_degree: i32, gens: Vec<Vec<Generator>>, d: Vec<BitMatrix>) -> ChainComplex {
        assert_eq!(d.len() + 1, gens.len(), "need one map fewer than degrees");
        for (i, m) in d.iter().enumerate() {
            assert_eq!(m.cols(), gens[i].len(), "d[{i}] column count");
            assert_eq!(m.rows(), gens[i + 1].len(), "d[{i}] row count");
        }
        let index = gens
            .iter()
            .map(|g| g.iter().enumerate().map(|(i, &x)| (x, i)).collect())
            .collect();
        ChainComplex { min_degree, gens, d, index }
    }

    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.gens.len() as i32 - 1
    }

    pub fn dim_at(&self, deg: i32) -> usize {
        self.gens_at(deg).len()
    }

    pub fn gens_at(&self, deg: i32) -> &[Generator] {
        let i = (deg - self.min_degree) as usize;
        &self.gens[i]
    }

    /// The coboundary map from `deg` to `deg + 1`, if both degrees exist.
    pub fn d_at(&self, deg: i32) -> Option<&BitMatrix> {
        let i = deg - self.min_degree;
        if i < 0 || i as usize >= self.d.len() {
            None
        } else {
            Some(&self.d[i as usize])
        }
    }

    pub fn index_of(&self, deg: i32, g: Generator) -> Option<usize> {
        self.index[(deg - self.min_degree) as usize].get(&g).copied()
    }

    /// Checks `d d = 0` for every consecutive pair; returns all violations.
    pub fn verify(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for i in 0..self.d.len().saturating_sub(1) {
            let comp = self.d[i + 1].mul(&self.d[i]);
            for r in 0..comp.rows() {
                for c in comp.row(r) {
                    out.push((self.min_degree + i as i32, r, c));
                }
            }
        }
        out
    }

    /// Rank of the degree-`deg` (co)homology group. The homology and
    /// cohomology ranks agree (a matrix and its transpose have equal rank),
    /// so one number serves both sides.
    pub fn homology_rank(&self, deg: i32) -> usize {
        let dim = self.dim_at(deg);
        let r_out = self.d_at(deg).map_or(0, |m| m.rank());
        let r_in = self.d_at(deg - 1).map_or(0, |m| m.rank());
        dim - r_out - r_in
    }

    /// Basis representatives of degree-`deg` cohomology classes together with
    /// dual homology-side probes: `pairing[i].dot(rep[j]) = δ_ij`, and every
    /// probe annihilates coboundaries, so the probe values of a cocycle are
    /// its class coordinates.
    pub fn cohomology_basis(&self, deg: i32) -> CohomologyBasis {
        let dim = self.dim_at(deg);
        let zero_out = BitMatrix::zeros(0, dim);
        let d_out = self.d_at(deg).unwrap_or(&zero_out);
        // Kernel of d_out contains all cocycles; quotient by image of d_in.
        let kernel = d_out.kernel_basis();
        let d_in = self.d_at(deg - 1);
        // Stack image basis rows, then extend by kernel vectors that enlarge
        // the span; those extenders represent cohomology classes.
        let mut rows: Vec<BitVec> = Vec::new();
        if let Some(din) = d_in {
            for c in 0..din.cols() {
                let col = din.mat_vec(&BitVec::singleton(din.cols(), c));
                rows.push(col);
            }
        }
        let mut elim = Eliminator::new(dim);
        for r in &rows {
            elim.add(r.clone());
        }
        let mut reps = Vec::new();
        for v in kernel {
            if elim.add(v.clone()) {
                reps.push(v);
            }
        }
        // Dual probes: vectors z with z·rep_j = δ_ij and z·(im d_in) = 0,
        // i.e. rows of a right inverse on the quotient. Solve for them by
        // elimination over the transpose system.
        let probes = dual_probes(&reps, d_in, dim);
        CohomologyBasis { reps, probes }
    }
}

/// Representatives and dual probes for a (co)homology group.
#[derive(Clone)]
pub struct CohomologyBasis {
    /// Cocycle representatives of a basis of the cohomology group.
    pub reps: Vec<BitVec>,
    /// Cycle probes: `probes[i].dot(reps[j]) == (i == j)` and every probe
    /// annihilates every coboundary.
    pub probes: Vec<BitVec>,
}

impl CohomologyBasis {
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    /// Class coordinates of a cocycle.
    pub fn coordinates(&self, v: &BitVec) -> BitVec {
        BitVec::from_indices(
            self.probes.len(),
            self.probes.iter().enumerate().filter(|(_, z)| z.dot(v)).map(|(i, _)| i),
        )
    }
}

/// Incremental GF(2) span tracker.
struct Eliminator {
    dim: usize,
    /// Reduced vectors by pivot position.
    pivots: HashMap<usize, BitVec>,
}

impl Eliminator {
    fn new(dim: usize) -> Eliminator {
        Eliminator { dim, pivots: HashMap::new() }
    }

    /// Adds a vector to the span; returns true if it enlarged it.
    fn add(&mut self, v: BitVec) -> bool {
        assert_eq!(v.len(), self.dim);
        let v = self.reduce(v);
        match v.leading() {
            Some(lead) => {
                self.pivots.insert(lead, v);
                true
            }
            None => false,
        }
    }

    /// Reduces `v` against the span; returns the remainder.
    fn reduce(&self, mut v: BitVec) -> BitVec {
        loop {
            let Some(lead) = v.leading() else { return v };
            match self.pivots.get(&lead) {
                Some(p) => v = v.xor(p),
                None => return v,
            }
        }
    }

    #[allow(dead_code)]
    fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

/// Probes dual to `reps` modulo the image of `d_in`: solve z·rep_j = δ_ij
/// with z orthogonal to all columns of `d_in`.
fn dual_probes(reps: &[BitVec], d_in: Option<&BitMatrix>, dim: usize) -> Vec<BitVec> {
    if reps.is_empty() {
        return Vec::new();
    }
    // Build the constraint matrix: rows are the rep vectors (conditions
    // z·rep_j = δ_ij) followed by the image basis (conditions z·b = 0).
    let mut rows: Vec<BitVec> = reps.to_vec();
    if let Some(din) = d_in {
        let mut elim = Eliminator::new(dim);
        for c in 0..din.cols() {
            let col = din.mat_vec(&BitVec::singleton(din.cols(), c));
            if !col.is_zero() && elim.add(col.clone()) {
                rows.push(col);
            }
        }
    }
    let m = BitMatrix::from_entries(
        rows.len(),
        dim,
        rows.iter().enumerate().flat_map(|(r, v)| v.iter().map(move |c| (r, c)).collect::<Vec<_>>()),
    );
    let mut probes = Vec::new();
    for j in 0..reps.len() {
        let rhs = BitVec::singleton(m.rows(), j);
        let z = m.solve(&rhs).expect("dual probe system must be solvable");
        probes.push(z);
    }
    probes
}

// ---------------------------------------------------------------------------
// Cellular complexes
// ---------------------------------------------------------------------------

/// Cellular cohomology of a 3-colex, extended by the global end maps:
/// degrees -1..4 with `{0} -> verts -> edges -> faces -> vols -> {0}`.
pub fn cellular_complex_3d(colex: &Colex3) -> ChainComplex {
    let gens = vec![
        vec![Generator::Zero],
        (0..colex.verts.len()).map(Generator::Vert).collect(),
        (0..colex.edges.len()).map(Generator::Edge).collect(),
        (0..colex.faces.len()).map(Generator::Face).collect(),
        (0..colex.vols.len()).map(Generator::Vol).collect(),
        vec![Generator::Zero],
    ];
    let d_m1 = BitMatrix::from_entries(colex.verts.len(), 1, (0..colex.verts.len()).map(|p| (p, 0)));
    let d0 = colex.adjacency(1, 0);
    let d1 = colex.adjacency(2, 1);
    let d2 = colex.adjacency(3, 2);
    let d3 = BitMatrix::from_entries(1, colex.vols.len(), (0..colex.vols.len()).map(|v| (0, v)));
    ChainComplex::new(-1, gens, vec![d_m1, d0, d1, d2, d3])
}

/// Cellular cohomology of a 2-colex, extended: degrees -1..3.
pub fn cellular_complex_2d(colex: &Colex2) -> ChainComplex {
    let gens = vec![
        vec![Generator::Zero],
        (0..colex.verts.len()).map(Generator::Vert).collect(),
        (0..colex.edges.len()).map(Generator::Edge).collect(),
        (0..colex.faces.len()).map(Generator::Face).collect(),
        vec![Generator::Zero],
    ];
    let d_m1 = BitMatrix::from_entries(colex.verts.len(), 1, (0..colex.verts.len()).map(|p| (p, 0)));
    let d0 = BitMatrix::from_entries(
        colex.edges.len(),
        colex.verts.len(),
        colex.edges.iter().enumerate().flat_map(|(e, ed)| ed.verts.iter().map(move |&p| (e, p))),
    );
    let d1 = BitMatrix::from_entries(
        colex.faces.len(),
        colex.edges.len(),
        colex.faces.iter().enumerate().flat_map(|(f, fc)| {
            fc.edges.iter().map(move |&e| (f, e)).collect::<Vec<_>>()
        }),
    );
    let d2 = BitMatrix::from_entries(1, colex.faces.len(), (0..colex.faces.len()).map(|f| (0, f)));
    ChainComplex::new(-1, gens, vec![d_m1, d0, d1, d2])
}

// ---------------------------------------------------------------------------
// 2D color cohomology
// ---------------------------------------------------------------------------

/// Auxiliary homomorphisms of the 2D color diagram.
pub struct MMaps2 {
    /// {0} -> C_2 (all three pairs).
    pub m_m1p: BitMatrix,
    /// C_2 -> {0} (all-ones).
    pub m3: BitMatrix,
}

/// Pairs of 2-colex palette colors, in a fixed order.
fn palette_pairs(colex: &Colex2) -> Vec<ColorSet> {
    let p = colex.palette;
    vec![ColorSet::pair(p[0], p[1]), ColorSet::pair(p[0], p[2]), ColorSet::pair(p[1], p[2])]
}

/// 2D color cohomology: degrees -1..3 with
/// `C_2 -> faces -> verts -> faces -> C_2`.
pub fn color_complex_2d(colex: &Colex2) -> (ChainComplex, MMaps2) {
    let pairs = palette_pairs(colex);
    let nf = colex.faces.len();
    let np = colex.verts.len();
    let gens = vec![
        pairs.iter().map(|&k| Generator::PairGen(k)).collect(),
        (0..nf).map(Generator::Face).collect(),
        (0..np).map(Generator::Vert).collect(),
        (0..nf).map(Generator::Face).collect(),
        pairs.iter().map(|&k| Generator::PairGen(k)).collect(),
    ];
    let d_m1 = BitMatrix::from_entries(
        nf,
        3,
        colex.faces.iter().enumerate().flat_map(|(f, fc)| {
            pairs
                .iter()
                .enumerate()
                .filter(|(_, k)| k.contains(fc.color))
                .map(move |(ki, _)| (f, ki))
                .collect::<Vec<_>>()
        }),
    );
    let d0 = BitMatrix::from_entries(
        np,
        nf,
        colex.faces.iter().enumerate().flat_map(|(f, fc)| {
            fc.verts.iter().map(move |&p| (p, f)).collect::<Vec<_>>()
        }),
    );
    let d1 = d0.transpose();
    let d2 = d_m1.transpose();
    let m_m1p = BitMatrix::from_entries(3, 1, (0..3).map(|k| (k, 0)));
    let m3 = BitMatrix::from_entries(1, 3, (0..3).map(|k| (0, k)));
    (ChainComplex::new(-1, gens, vec![d_m1, d0, d1, d2]), MMaps2 { m_m1p, m3 })
}

// ---------------------------------------------------------------------------
// 3D color cohomology, bulk and boundary variants
// ---------------------------------------------------------------------------

/// Boundary condition applied at one state-boundary region of a
/// time-interval lattice.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundaryKind {
    /// Plain restriction of the bulk complex (not locally exact).
    State,
    /// Add one degree-0 generator per cut volume.
    AllSmooth,
    /// Add cut faces to degree 2 and cut volume generators to degree 3.
    AllRough,
    /// Color boundary for one color.
    Color(Color),
    /// Double-color boundary for one pair.
    DoubleColor(ColorSet),
}

/// Boundary conditions for the two state-boundary regions (early and late
/// time side) of a time-interval lattice.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BoundarySpec {
    pub early: BoundaryKind,
    pub late: BoundaryKind,
}

impl BoundarySpec {
    pub fn state() -> BoundarySpec {
        BoundarySpec { early: BoundaryKind::State, late: BoundaryKind::State }
    }

    pub fn both(kind: BoundaryKind) -> BoundarySpec {
        BoundarySpec { early: kind, late: kind }
    }

    fn at(&self, side: i8) -> BoundaryKind {
        if side < 0 {
            self.early
        } else {
            self.late
        }
    }
}

/// Auxiliary homomorphisms of the 3D color diagram (bulk only).
pub struct MMaps3 {
    /// {0} -> C_1 (all four colors).
    pub m_m1pp: BitMatrix,
    /// C_1 -> C_2: a color maps to the three pairs not containing it.
    pub m_m1p: BitMatrix,
    /// X_3 -> vols: (v, c) -> v.
    pub m3: BitMatrix,
    /// vols -> {0} (all-ones).
    pub d3p: BitMatrix,
    /// C_1 -> {0} (all-ones).
    pub m4: BitMatrix,
}

impl MMaps3 {
    /// Verifies the relations among the auxiliary maps and the complex:
    /// m'₋₁ m''₋₁ = 0, d₋₁ m'₋₁ = 0, m₃ d₂ = 0, m₄ d₃ = d₃' m₃.
    pub fn verify(&self, cc: &ChainComplex) -> Vec<String> {
        let mut bad = Vec::new();
        if !self.m_m1p.mul(&self.m_m1pp).is_zero() {
            bad.push("m'_{-1} m''_{-1} != 0".into());
        }
        let d_m1 = cc.d_at(-1).expect("bulk complex has degree -1");
        if !d_m1.mul(&self.m_m1p).is_zero() {
            bad.push("d_{-1} m'_{-1} != 0".into());
        }
        let d2 = cc.d_at(2).unwrap();
        if !self.m3.mul(d2).is_zero() {
            bad.push("m_3 d_2 != 0".into());
        }
        let d3 = cc.d_at(3).unwrap();
        if self.m4.mul(d3) != self.d3p.mul(&self.m3) {
            bad.push("m_4 d_3 != d_3' m_3".into());
        }
        bad
    }
}

/// X_3 generators of a volume: (v, c) for the three colors c other than the
/// volume color, in color order.
fn vol_color_gens(color: Color) -> impl Iterator<Item = Color> {
    Color::ALL.into_iter().filter(move |&c| c != color)
}

/// The bulk 3D color complex of a closed 3-colex: degrees -1..4 with
/// `C_2 -> vols -> verts -> faces -> (vol,c) -> C_1`, plus auxiliary maps.
pub fn color_complex_3d_bulk(colex: &Colex3) -> (ChainComplex, MMaps3) {
    assert!(colex.is_torus(), "bulk complex requires a closed lattice");
    let pairs = ColorSet::all_pairs();
    let nv = colex.vols.len();
    let np = colex.verts.len();
    let nf = colex.faces.len();
    let x3: Vec<Generator> = (0..nv)
        .flat_map(|v| {
            vol_color_gens(colex.vols[v].color).map(move |c| Generator::VolColor(v, c))
        })
        .collect();
    let x3_index: HashMap<Generator, usize> =
        x3.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let gens = vec![
        pairs.iter().map(|&k| Generator::PairGen(k)).collect(),
        (0..nv).map(Generator::Vol).collect(),
        (0..np).map(Generator::Vert).collect(),
        (0..nf).map(Generator::Face).collect(),
        x3.clone(),
        Color::ALL.iter().map(|&c| Generator::ColorGen(c)).collect(),
    ];
    let d_m1 = BitMatrix::from_entries(
        nv,
        6,
        colex.vols.iter().enumerate().flat_map(|(v, vol)| {
            pairs
                .iter()
                .enumerate()
                .filter(|(_, k)| k.contains(vol.color))
                .map(move |(ki, _)| (v, ki))
                .collect::<Vec<_>>()
        }),
    );
    let d0 = colex.adjacency(0, 3); // vols -> verts
    let d1 = colex.adjacency(2, 0); // verts -> faces
    let d2 = color_d2(colex, &x3_index);
    let d3 = BitMatrix::from_entries(
        4,
        x3.len(),
        x3.iter().enumerate().map(|(i, g)| {
            let Generator::VolColor(_, c) = g else { unreachable!() };
            (c.index(), i)
        }),
    );
    let cc = ChainComplex::new(-1, gens, vec![d_m1, d0, d1, d2, d3]);

    let m_m1pp = BitMatrix::from_entries(4, 1, (0..4).map(|c| (c, 0)));
    let m_m1p = BitMatrix::from_entries(
        6,
        4,
        pairs.iter().enumerate().flat_map(|(ki, k)| {
            Color::ALL
                .into_iter()
                .filter(|c| !k.contains(*c))
                .map(move |c| (ki, c.index()))
                .collect::<Vec<_>>()
        }),
    );
    let m3 = BitMatrix::from_entries(
        nv,
        x3.len(),
        x3.iter().enumerate().map(|(i, g)| {
            let Generator::VolColor(v, _) = g else { unreachable!() };
            (*v, i)
        }),
    );
    let d3p = BitMatrix::from_entries(1, nv, (0..nv).map(|v| (0, v)));
    let m4 = BitMatrix::from_entries(1, 4, (0..4).map(|c| (0, c)));
    (cc, MMaps3 { m_m1pp, m_m1p, m3, d3p, m4 })
}

/// The bulk d_2: a face maps to (v, c) for each adjacent volume v and each
/// color c outside the face color.
fn color_d2(colex: &Colex3, x3_index: &HashMap<Generator, usize>) -> BitMatrix {
    let mut entries = Vec::new();
    for (f, face) in colex.faces.iter().enumerate() {
        for &v in &face.volumes {
            for c in vol_color_gens(colex.vols[v].color) {
                if !face.color.contains(c) {
                    let row = x3_index[&Generator::VolColor(v, c)];
                    entries.push((row, f));
                }
            }
        }
    }
    BitMatrix::from_entries(x3_index.len(), colex.faces.len(), entries)
}

/// Per-side boundary cell sets of a time-interval lattice.
struct BoundaryCells {
    /// Real volumes adjacent to a phantom volume through a face.
    bdin_vols: Vec<VolId>,
    /// Phantom volume indices on this side.
    bdout_vols: Vec<usize>,
    /// Real faces adjacent to a phantom volume on this side.
    bd_faces: Vec<FaceId>,
    /// Real edges adjacent to a phantom volume on this side.
    bd_edges: Vec<EdgeId>,
    /// Phantom face indices on this side.
    bdout_faces: Vec<usize>,
}

fn boundary_cells(colex: &Colex3, side: i8) -> BoundaryCells {
    let mut bdin = Vec::new();
    let mut bdout = Vec::new();
    let mut bd_faces = Vec::new();
    let mut bd_edges = Vec::new();
    let mut bdout_faces = Vec::new();
    for (pi, pv) in colex.phantom_vols.iter().enumerate() {
        if pv.side != side {
            continue;
        }
        bdout.push(pi);
        for &f in &pv.faces {
            bd_faces.push(f);
            for &v in &colex.faces[f].volumes {
                bdin.push(v);
            }
        }
        bd_edges.extend(pv.edges.iter().copied());
        bdout_faces.extend(pv.phantom_faces.iter().copied());
    }
    for list in [&mut bdin, &mut bd_faces, &mut bd_edges, &mut bdout_faces] {
        list.sort_unstable();
        list.dedup();
    }
    bdout.sort_unstable();
    bdout.dedup();
    BoundaryCells { bdin_vols: bdin, bdout_vols: bdout, bd_faces, bd_edges, bdout_faces }
}

/// 3D color complex with the requested boundary conditions.
///
/// On a torus, only `None` (bulk) is accepted and degrees -1..4 are built.
/// On a time-interval lattice a spec must be given (state boundaries at
/// minimum) and only the locally relevant degrees 0..3 are built.
pub fn color_complex_3d(colex: &Colex3, spec: Option<&BoundarySpec>) -> Result<ChainComplex> {
    match (colex.is_torus(), spec) {
        (true, None) => Ok(color_complex_3d_bulk(colex).0),
        (true, Some(_)) => {
            Err(Error::InvalidInput("boundary conditions are meaningless on a torus".into()))
        }
        (false, None) => color_complex_3d_boundary(colex, &BoundarySpec::state()),
        (false, Some(s)) => color_complex_3d_boundary(colex, s),
    }
}

fn color_complex_3d_boundary(colex: &Colex3, spec: &BoundarySpec) -> Result<ChainComplex> {
    let sides = [boundary_cells(colex, -1), boundary_cells(colex, 1)];
    let kinds = [spec.at(-1), spec.at(1)];

    // Degree-0 generators: real volumes, minus color-boundary removals, plus
    // smooth/color additions of phantom volumes.
    let mut x0: Vec<Generator> = (0..colex.vols.len()).map(Generator::Vol).collect();
    let mut x0_removed: Vec<VolId> = Vec::new();
    for (cells, kind) in sides.iter().zip(kinds) {
        match kind {
            BoundaryKind::State | BoundaryKind::AllRough => {}
            BoundaryKind::AllSmooth => {
                x0.extend(cells.bdout_vols.iter().map(|&i| Generator::PhantomVol(i)));
            }
            BoundaryKind::Color(c) => {
                x0_removed.extend(
                    cells.bdin_vols.iter().copied().filter(|&v| colex.vols[v].color == c),
                );
                x0.extend(
                    cells
                        .bdout_vols
                        .iter()
                        .copied()
                        .filter(|&i| colex.phantom_vols[i].color != c)
                        .map(Generator::PhantomVol),
                );
            }
            BoundaryKind::DoubleColor(kappa) => {
                x0_removed.extend(
                    cells.bdin_vols.iter().copied().filter(|&v| kappa.contains(colex.vols[v].color)),
                );
                x0.extend(
                    cells
                        .bdout_vols
                        .iter()
                        .copied()
                        .filter(|&i| !kappa.contains(colex.phantom_vols[i].color))
                        .map(Generator::PhantomVol),
                );
            }
        }
    }
    x0_removed.sort_unstable();
    x0_removed.dedup();
    x0.retain(|g| match g {
        Generator::Vol(v) => !x0_removed.contains(v),
        _ => true,
    });

    // Degree-2 generators: real faces minus removals, plus boundary edges and
    // phantom faces.
    let mut x2_removed: Vec<FaceId> = Vec::new();
    let mut x2_added: Vec<Generator> = Vec::new();
    // Funnel: for each added boundary edge, the removed faces it inherits.
    let mut edge_funnel: HashMap<EdgeId, Vec<FaceId>> = HashMap::new();
    // Double-color: boundary faces promoted to degree 3.
    let mut x3_added_faces: Vec<FaceId> = Vec::new();
    for (cells, kind) in sides.iter().zip(kinds) {
        match kind {
            BoundaryKind::State | BoundaryKind::AllSmooth => {}
            BoundaryKind::AllRough => {
                x2_added.extend(cells.bdout_faces.iter().map(|&i| Generator::PhantomFace(i)));
            }
            BoundaryKind::Color(c) => {
                let removed: Vec<FaceId> = cells
                    .bd_faces
                    .iter()
                    .copied()
                    .filter(|&f| !colex.faces[f].color.contains(c))
                    .collect();
                let opp = ColorSet::single(c).complement();
                for &e in &cells.bd_edges {
                    if colex.edges[e].color == opp {
                        x2_added.push(Generator::Edge(e));
                        let funnel: Vec<FaceId> = colex.edges[e]
                            .faces
                            .iter()
                            .copied()
                            .filter(|f| removed.contains(f))
                            .collect();
                        edge_funnel.entry(e).or_default().extend(funnel);
                    }
                }
                x2_removed.extend(removed);
            }
            BoundaryKind::DoubleColor(kappa) => {
                let keep = kappa; // κ-colored boundary faces stay in X_2
                let promoted: Vec<FaceId> = cells
                    .bd_faces
                    .iter()
                    .copied()
                    .filter(|&f| colex.faces[f].color == kappa.complement())
                    .collect();
                let removed: Vec<FaceId> = cells
                    .bd_faces
                    .iter()
                    .copied()
                    .filter(|&f| colex.faces[f].color != keep)
                    .collect();
                // Each promoted κ̄ face carries one added edge of either
                // color class at every vertex, so exactly one class may
                // funnel its bulk action: the first color's edges take it.
                for (i, c) in kappa.iter().enumerate() {
                    let opp = ColorSet::single(c).complement();
                    let funnel_promoted = i == 0;
                    for &e in &cells.bd_edges {
                        if colex.edges[e].color == opp {
                            x2_added.push(Generator::Edge(e));
                            let funnel: Vec<FaceId> = colex.edges[e]
                                .faces
                                .iter()
                                .copied()
                                .filter(|f| {
                                    removed.contains(f)
                                        && (funnel_promoted || !promoted.contains(f))
                                })
                                .collect();
                            edge_funnel.entry(e).or_default().extend(funnel);
                        }
                    }
                }
                x2_removed.extend(removed);
                x3_added_faces.extend(promoted);
            }
        }
    }
    x2_removed.sort_unstable();
    x2_removed.dedup();
    x2_added.sort_unstable();
    x2_added.dedup();
    x3_added_faces.sort_unstable();
    x3_added_faces.dedup();
    let mut x2: Vec<Generator> = (0..colex.faces.len())
        .filter(|f| !x2_removed.contains(f))
        .map(Generator::Face)
        .collect();
    x2.extend(x2_added.iter().copied());

    // Degree-3 generators: (v,c) for real volumes, plus all-rough phantom
    // volume generators, plus double-color promoted faces.
    let mut x3: Vec<Generator> = (0..colex.vols.len())
        .flat_map(|v| vol_color_gens(colex.vols[v].color).map(move |c| Generator::VolColor(v, c)))
        .collect();
    for (cells, kind) in sides.iter().zip(kinds) {
        if let BoundaryKind::AllRough = kind {
            x3.extend(cells.bdout_vols.iter().flat_map(|&i| {
                vol_color_gens(colex.phantom_vols[i].color)
                    .map(move |c| Generator::PhantomVolColor(i, c))
            }));
        }
    }
    x3.extend(x3_added_faces.iter().map(|&f| Generator::FaceGen3(f)));

    let x1: Vec<Generator> = (0..colex.verts.len()).map(Generator::Vert).collect();

    let _x0_index: HashMap<Generator, usize> =
        x0.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let _x2_index: HashMap<Generator, usize> =
        x2.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let x3_index: HashMap<Generator, usize> =
        x3.iter().enumerate().map(|(i, &g)| (g, i)).collect();

    // d_0: degree-0 generator -> its vertices.
    let mut d0_entries = Vec::new();
    for (col, g) in x0.iter().enumerate() {
        match g {
            Generator::Vol(v) => {
                for &p in &colex.vols[*v].verts {
                    d0_entries.push((p, col));
                }
            }
            Generator::PhantomVol(i) => {
                for &p in &colex.phantom_vols[*i].verts {
                    d0_entries.push((p, col));
                }
            }
            _ => unreachable!(),
        }
    }
    let d0 = BitMatrix::from_entries(colex.verts.len(), x0.len(), d0_entries);

    // d_1: vertex -> adjacent degree-2 generators (faces and boundary edges).
    let mut d1_entries = Vec::new();
    for (row, g) in x2.iter().enumerate() {
        match g {
            Generator::Face(f) => {
                for &p in &colex.faces[*f].verts {
                    d1_entries.push((row, p));
                }
            }
            Generator::Edge(e) => {
                for &p in &colex.edges[*e].verts {
                    d1_entries.push((row, p));
                }
            }
            Generator::PhantomFace(i) => {
                for &p in &colex.phantom_faces[*i].verts {
                    d1_entries.push((row, p));
                }
            }
            _ => unreachable!(),
        }
    }
    let d1 = BitMatrix::from_entries(x2.len(), colex.verts.len(), d1_entries);

    // d_2: degree-2 generator -> degree-3 generators.
    let mut d2_entries = Vec::new();
    let bulk_face_action = |f: FaceId, out: &mut Vec<usize>, x3_index: &HashMap<Generator, usize>| {
        let face = &colex.faces[f];
        for &v in &face.volumes {
            for c in vol_color_gens(colex.vols[v].color) {
                if !face.color.contains(c) {
                    if let Some(&row) = x3_index.get(&Generator::VolColor(v, c)) {
                        out.push(row);
                    }
                }
            }
        }
    };
    for (col, g) in x2.iter().enumerate() {
        let mut rows: Vec<usize> = Vec::new();
        match g {
            Generator::Face(f) => {
                bulk_face_action(*f, &mut rows, &x3_index);
                // Phantom volumes with all-rough generators also see the face.
                for (pi, pv) in colex.phantom_vols.iter().enumerate() {
                    if pv.faces.contains(f) {
                        for c in vol_color_gens(pv.color) {
                            if !colex.faces[*f].color.contains(c) {
                                if let Some(&row) =
                                    x3_index.get(&Generator::PhantomVolColor(pi, c))
                                {
                                    rows.push(row);
                                }
                            }
                        }
                    }
                }
                // Promoted faces never appear here (they were removed from X_2).
            }
            Generator::Edge(e) => {
                // Inherit the bulk action of the removed faces this edge
                // funnels, and attach to promoted faces containing it.
                if let Some(funnel) = edge_funnel.get(e) {
                    for &f in funnel {
                        bulk_face_action(f, &mut rows, &x3_index);
                    }
                }
                for &f in &x3_added_faces {
                    if colex.faces[f].edges.contains(e) {
                        rows.push(x3_index[&Generator::FaceGen3(f)]);
                    }
                }
            }
            Generator::PhantomFace(i) => {
                let pf = &colex.phantom_faces[*i];
                // Real volumes adjacent to the phantom face.
                for (v, vol) in colex.vols.iter().enumerate() {
                    let _ = vol;
                    // A real volume never touches a phantom face (all faces of
                    // a real volume are real), so nothing to do here; keep the
                    // loop shape for clarity.
                    let _ = v;
                    break;
                }
                // Phantom volumes adjacent to it.
                for (pi, pv) in colex.phantom_vols.iter().enumerate() {
                    if pv.phantom_faces.contains(i) {
                        for c in vol_color_gens(pv.color) {
                            if !pf.color.contains(c) {
                                if let Some(&row) =
                                    x3_index.get(&Generator::PhantomVolColor(pi, c))
                                {
                                    rows.push(row);
                                }
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        // XOR semantics: duplicated rows cancel.
        for r in rows {
            d2_entries.push((r, col));
        }
    }
    let d2 = BitMatrix::from_entries(x3.len(), x2.len(), d2_entries);

    let cc = ChainComplex::new(0, vec![x0, x1, x2, x3], vec![d0, d1, d2]);
    let violations = cc.verify();
    if !violations.is_empty() {
        let (deg, r, c) = violations[0];
        return Err(Error::Construction(format!(
            "boundary complex violates d d = 0 at {} generator pairs (first: deg {} {:?} <- {:?})",
            violations.len(),
            deg,
            cc.gens_at(deg + 2)[r],
            cc.gens_at(deg)[c],
        )));
    }
    Ok(cc)
}

// ---------------------------------------------------------------------------
// Chain maps
// ---------------------------------------------------------------------------

/// A chain map between two complexes over a common degree range.
#[derive(Clone)]
pub struct ChainMap {
    pub min_degree: i32,
    /// `maps[i]`: source degree `min_degree + i` to the same target degree.
    pub maps: Vec<BitMatrix>,
}

impl ChainMap {
    pub fn at(&self, deg: i32) -> &BitMatrix {
        &self.maps[(deg - self.min_degree) as usize]
    }

    /// Checks the commuting squares `d^target M_i = M_{i+1} d^source` over
    /// the shared degree range; returns a description of each failure.
    pub fn verify(&self, source: &ChainComplex, target: &ChainComplex) -> Vec<String> {
        let mut bad = Vec::new();
        for i in 0..self.maps.len() - 1 {
            let deg = self.min_degree + i as i32;
            let (Some(ds), Some(dt)) = (source.d_at(deg), target.d_at(deg)) else {
                continue;
            };
            let lhs = dt.mul(&self.maps[i]);
            let rhs = self.maps[i + 1].mul(ds);
            if lhs != rhs {
                bad.push(format!("square at degree {deg} does not commute"));
            }
        }
        bad
    }

    /// The induced map on cohomology at `deg`, as a matrix from source class
    /// coordinates to target class coordinates.
    pub fn induced_on_cohomology(
        &self,
        deg: i32,
        source_basis: &CohomologyBasis,
        target_basis: &CohomologyBasis,
    ) -> BitMatrix {
        let mut m = BitMatrix::zeros(target_basis.rank(), source_basis.rank());
        for (j, rep) in source_basis.reps.iter().enumerate() {
            let image = self.at(deg).mat_vec(rep);
            for i in target_basis.coordinates(&image).iter() {
                m.flip(i, j);
            }
        }
        m
    }
}

/// Chain map M^c from 3D color cohomology (bulk) to the lattice's cellular
/// cohomology, for one color c.
pub fn chain_map_color_to_cell(colex: &Colex3, color: Color) -> ChainMap {
    let pairs = ColorSet::all_pairs();
    let nv = colex.vols.len();
    let np = colex.verts.len();
    let ne = colex.edges.len();
    let nf = colex.faces.len();
    // Degree -1: C_2 -> {0}.
    let m_m1 = BitMatrix::from_entries(
        1,
        6,
        pairs.iter().enumerate().filter(|(_, k)| k.contains(color)).map(|(ki, _)| (0, ki)),
    );
    // Degree 0: vols -> verts, only volumes of this color.
    let m0 = BitMatrix::from_entries(
        np,
        nv,
        colex.vols.iter().enumerate().filter(|(_, vol)| vol.color == color).flat_map(
            |(v, vol)| vol.verts.iter().map(move |&p| (p, v)).collect::<Vec<_>>(),
        ),
    );
    // Degree 1: verts -> edges, each vertex to its single edge avoiding the color.
    let opp = ColorSet::single(color).complement();
    let m1 = BitMatrix::from_entries(
        ne,
        np,
        colex.verts.iter().enumerate().map(|(p, pv)| {
            let mut hits = pv.edges.iter().filter(|&&e| colex.edges[e].color == opp);
            let e = *hits.next().expect("vertex must have exactly one such edge");
            assert!(hits.next().is_none());
            (e, p)
        }),
    );
    // Degree 2: faces -> faces, diagonal on faces avoiding the color.
    let m2 = BitMatrix::from_entries(
        nf,
        nf,
        colex
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.color.contains(color))
            .map(|(f, _)| (f, f)),
    );
    // Degree 3: (v, c') -> v when c' is this color.
    let x3: Vec<(VolId, Color)> = (0..nv)
        .flat_map(|v| vol_color_gens(colex.vols[v].color).map(move |c| (v, c)))
        .collect();
    let m3 = BitMatrix::from_entries(
        nv,
        x3.len(),
        x3.iter().enumerate().filter(|(_, (_, c))| *c == color).map(|(i, (v, _))| (*v, i)),
    );
    // Degree 4: C_1 -> {0}.
    let m4 = BitMatrix::from_entries(1, 4, [(0, color.index())]);
    ChainMap { min_degree: -1, maps: vec![m_m1, m0, m1, m2, m3, m4] }
}

/// The lattice cellulation derived from a color pair κ: its vertices are the
/// κ-colored volumes, edges the κ-colored faces, faces the κ̄-colored faces,
/// volumes the other volumes. Returned alongside are the id maps from
/// cellulation cells back to colex cells.
pub struct DerivedCellulation {
    pub kappa: ColorSet,
    /// Cellulation vertex -> colex volume.
    pub verts: Vec<VolId>,
    /// Cellulation edge -> colex face (κ-colored).
    pub edges: Vec<FaceId>,
    /// Cellulation face -> colex face (κ̄-colored).
    pub faces: Vec<FaceId>,
    /// Cellulation volume -> colex volume (non-κ).
    pub vols: Vec<VolId>,
    pub complex: ChainComplex,
    vert_of_vol: HashMap<VolId, usize>,
    edge_of_face: HashMap<FaceId, usize>,
}

impl DerivedCellulation {
    pub fn vert_of(&self, v: VolId) -> Option<usize> {
        self.vert_of_vol.get(&v).copied()
    }

    pub fn edge_of(&self, f: FaceId) -> Option<usize> {
        self.edge_of_face.get(&f).copied()
    }
}

pub fn derived_cellulation(colex: &Colex3, kappa: ColorSet) -> DerivedCellulation {
    assert_eq!(kappa.len(), 2, "derived cellulation needs a color pair");
    let verts: Vec<VolId> =
        (0..colex.vols.len()).filter(|&v| kappa.contains(colex.vols[v].color)).collect();
    let edges: Vec<FaceId> =
        (0..colex.faces.len()).filter(|&f| colex.faces[f].color == kappa).collect();
    let faces: Vec<FaceId> = (0..colex.faces.len())
        .filter(|&f| colex.faces[f].color == kappa.complement())
        .collect();
    let vols: Vec<VolId> =
        (0..colex.vols.len()).filter(|&v| !kappa.contains(colex.vols[v].color)).collect();
    let vert_of_vol: HashMap<VolId, usize> =
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edge_of_face: HashMap<FaceId, usize> =
        edges.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let face_index: HashMap<FaceId, usize> =
        faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let vol_index: HashMap<VolId, usize> = vols.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // d_0: cellulation vertex -> its edges (κ-faces of the volume).
    let d0 = BitMatrix::from_entries(
        edges.len(),
        verts.len(),
        verts.iter().enumerate().flat_map(|(pi, &v)| {
            colex.vols[v]
                .faces
                .iter()
                .filter_map(|f| edge_of_face.get(f).map(|&e| (e, pi)))
                .collect::<Vec<_>>()
        }),
    );
    // d_1: cellulation edge -> faces sharing an odd number of colex vertices.
    let mut d1_entries = Vec::new();
    for (ei, &ef) in edges.iter().enumerate() {
        // Count shared vertices with each κ̄ face via the edge-face's verts.
        let mut count: HashMap<usize, usize> = HashMap::new();
        for &p in &colex.faces[ef].verts {
            for &f in &colex.verts[p].faces {
                if let Some(&fi) = face_index.get(&f) {
                    *count.entry(fi).or_default() += 1;
                }
            }
        }
        for (fi, n) in count {
            if n % 2 == 1 {
                d1_entries.push((fi, ei));
            }
        }
    }
    let d1 = BitMatrix::from_entries(faces.len(), edges.len(), d1_entries);
    // d_2: cellulation face -> its two volumes.
    let d2 = BitMatrix::from_entries(
        vols.len(),
        faces.len(),
        faces.iter().enumerate().flat_map(|(fi, &f)| {
            colex.faces[f]
                .volumes
                .iter()
                .filter_map(|v| vol_index.get(v).map(|&vi| (vi, fi)))
                .collect::<Vec<_>>()
        }),
    );
    let d_m1 =
        BitMatrix::from_entries(verts.len(), 1, (0..verts.len()).map(|p| (p, 0)));
    let d3 = BitMatrix::from_entries(1, vols.len(), (0..vols.len()).map(|v| (0, v)));
    let gens = vec![
        vec![Generator::Zero],
        verts.iter().map(|&v| Generator::Vol(v)).collect(),
        edges.iter().map(|&f| Generator::Face(f)).collect(),
        faces.iter().map(|&f| Generator::Face(f)).collect(),
        vols.iter().map(|&v| Generator::Vol(v)).collect(),
        vec![Generator::Zero],
    ];
    let complex = ChainComplex::new(-1, gens, vec![d_m1, d0, d1, d2, d3]);
    DerivedCellulation { kappa, verts, edges, faces, vols, complex, vert_of_vol, edge_of_face }
}

/// Reverse chain map M̄^κ from the κ-derived cellulation's cellular
/// cohomology to 3D color cohomology (bulk).
pub fn chain_map_cell_to_color(colex: &Colex3, cellulation: &DerivedCellulation) -> ChainMap {
    let kappa = cellulation.kappa;
    let pairs = ColorSet::all_pairs();
    let nv = colex.vols.len();
    let np = colex.verts.len();
    let nf = colex.faces.len();
    // Degree -1: {0} -> C_2, hitting κ.
    let ki = pairs.iter().position(|&k| k == kappa).unwrap();
    let m_m1 = BitMatrix::from_entries(6, 1, [(ki, 0)]);
    // Degree 0: cellulation vertex -> its colex volume.
    let m0 = BitMatrix::from_entries(
        nv,
        cellulation.verts.len(),
        cellulation.verts.iter().enumerate().map(|(i, &v)| (v, i)),
    );
    // Degree 1: cellulation edge -> the colex vertices of its κ-face.
    let m1 = BitMatrix::from_entries(
        np,
        cellulation.edges.len(),
        cellulation.edges.iter().enumerate().flat_map(|(i, &f)| {
            colex.faces[f].verts.iter().map(move |&p| (p, i)).collect::<Vec<_>>()
        }),
    );
    // Degree 2: cellulation face -> its κ̄-colored colex face.
    let m2 = BitMatrix::from_entries(
        nf,
        cellulation.faces.len(),
        cellulation.faces.iter().enumerate().map(|(i, &f)| (f, i)),
    );
    // Degree 3: cellulation volume -> (v, c) for both colors of κ.
    let x3: Vec<(VolId, Color)> = (0..nv)
        .flat_map(|v| vol_color_gens(colex.vols[v].color).map(move |c| (v, c)))
        .collect();
    let x3_index: HashMap<(VolId, Color), usize> =
        x3.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let m3 = BitMatrix::from_entries(
        x3.len(),
        cellulation.vols.len(),
        cellulation.vols.iter().enumerate().flat_map(|(i, &v)| {
            kappa.iter().map(|c| (x3_index[&(v, c)], i)).collect::<Vec<_>>()
        }),
    );
    // Degree 4: {0} -> C_1, hitting both colors of κ.
    let m4 =
        BitMatrix::from_entries(4, 1, kappa.iter().map(|c| (c.index(), 0)).collect::<Vec<_>>());
    ChainMap { min_degree: -1, maps: vec![m_m1, m0, m1, m2, m3, m4] }
}

/// 2D analogue of M^c: from 2D color cohomology to the 2-colex's cellular
/// cohomology.
pub fn chain_map_color_to_cell_2d(colex: &Colex2, color: Color) -> ChainMap {
    assert!(colex.palette.contains(&color));
    let pairs = palette_pairs(colex);
    let nf = colex.faces.len();
    let np = colex.verts.len();
    let ne = colex.edges.len();
    let m_m1 = BitMatrix::from_entries(
        1,
        3,
        pairs.iter().enumerate().filter(|(_, k)| k.contains(color)).map(|(ki, _)| (0, ki)),
    );
    let m0 = BitMatrix::from_entries(
        np,
        nf,
        colex.faces.iter().enumerate().filter(|(_, f)| f.color == color).flat_map(|(f, fc)| {
            fc.verts.iter().map(move |&p| (p, f)).collect::<Vec<_>>()
        }),
    );
    // Each vertex has exactly one edge whose色 pair avoids the color.
    let opp: ColorSet = {
        let others: Vec<Color> =
            colex.palette.iter().copied().filter(|&c| c != color).collect();
        ColorSet::pair(others[0], others[1])
    };
    let m1 = BitMatrix::from_entries(
        ne,
        np,
        colex.verts.iter().enumerate().map(|(p, pv)| {
            let mut hits = pv.edges.iter().filter(|&&e| colex.edges[e].color == opp);
            let e = *hits.next().expect("vertex must have exactly one opposite-colored edge");
            assert!(hits.next().is_none());
            (e, p)
        }),
    );
    let m2 = BitMatrix::from_entries(
        nf,
        nf,
        colex
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.color != color)
            .map(|(f, _)| (f, f)),
    );
    let m3 = BitMatrix::from_entries(
        1,
        3,
        pairs.iter().enumerate().filter(|(_, k)| k.contains(color)).map(|(ki, _)| (0, ki)),
    );
    ChainMap { min_degree: -1, maps: vec![m_m1, m0, m1, m2, m3] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colex::{Colex2, Colex3};

    #[test]
    fn cellular_3d_verifies_and_has_torus_ranks() {
        let colex = Colex3::torus3([2, 2, 2]).unwrap();
        let cc = cellular_complex_3d(&colex);
        assert!(cc.verify().is_empty());
        // First Betti number of the 3-torus.
        assert_eq!(cc.homology_rank(1), 3);
        assert_eq!(cc.homology_rank(2), 3);
    }

    #[test]
    fn cellular_2d_verifies_and_torus_rank() {
        let colex = Colex2::hex_torus(3, 3).unwrap();
        let cc = cellular_complex_2d(&colex);
        assert!(cc.verify().is_empty());
        assert_eq!(cc.homology_rank(1), 2);
    }

    #[test]
    fn color_2d_verifies_and_rank() {
        let colex = Colex2::hex_torus(3, 3).unwrap();
        let (cc, _) = color_complex_2d(&colex);
        assert!(cc.verify().is_empty());
        // Four logical qubits on the 2D color-code torus.
        assert_eq!(cc.homology_rank(1), 4);
    }

    #[test]
    fn color_3d_bulk_verifies_and_rank() {
        let colex = Colex3::torus3([2, 2, 2]).unwrap();
        let (cc, mmaps) = color_complex_3d_bulk(&colex);
        assert!(cc.verify().is_empty());
        assert!(mmaps.verify(&cc).is_empty());
        assert_eq!(cc.homology_rank(1), 9);
    }

    #[test]
    fn corrupted_complex_reports_incident_violations() {
        let colex = Colex3::torus3([2, 2, 2]).unwrap();
        let (mut cc, _) = color_complex_3d_bulk(&colex);
        // Flip one entry of d_0: volume 0 at its first vertex.
        let p = colex.vols[0].verts[0];
        let idx = (0 - cc.min_degree) as usize; // d_0 lives at this slot
        cc.d[idx].flip(p, 0);
        let violations = cc.verify();
        // Exactly the faces at p not containing volume 0 with a matching
        // color condition are hit; predict by recomputing d1 * column.
        let d1 = cc.d_at(1).unwrap();
        let col = BitVec::singleton(colex.verts.len(), p);
        let expected = d1.mat_vec(&col).weight();
        let deg0: Vec<_> = violations.iter().filter(|v| v.0 == 0 && v.2 == 0).collect();
        assert_eq!(deg0.len(), expected);
        assert!(expected > 0);
    }

    #[test]
    fn trivial_complex_verifies() {
        let gens = vec![
            (0..3).map(Generator::Vert).collect::<Vec<_>>(),
            (0..2).map(Generator::Edge).collect(),
            (0..4).map(Generator::Face).collect(),
        ];
        let d = vec![BitMatrix::zeros(2, 3), BitMatrix::zeros(4, 2)];
        let cc = ChainComplex::new(0, gens, d);
        assert!(cc.verify().is_empty());
    }

    #[test]
    fn chain_maps_commute_and_are_redundant() {
        let colex = Colex3::torus3([2, 2, 2]).unwrap();
        let (color, _) = color_complex_3d_bulk(&colex);
        let cell = cellular_complex_3d(&colex);
        let mut sum_m1: Option<BitMatrix> = None;
        for c in Color::ALL {
            let m = chain_map_color_to_cell(&colex, c);
            assert!(m.verify(&color, &cell).is_empty(), "M^{:?} squares fail", c);
            // Each vertex maps to exactly one opposite-colored edge.
            for p in 0..colex.verts.len() {
                assert_eq!(
                    m.at(1).mat_vec(&BitVec::singleton(colex.verts.len(), p)).weight(),
                    1
                );
            }
            sum_m1 = Some(match sum_m1 {
                None => m.at(1).clone(),
                Some(s) => {
                    let mut acc = BitMatrix::zeros(s.rows(), s.cols());
                    for r in 0..s.rows() {
                        for c0 in s.row(r) {
                            acc.flip(r, c0);
                        }
                        for c0 in m.at(1).row(r) {
                            acc.flip(r, c0);
                        }
                    }
                    acc
                }
            });
        }
        // The four maps sum to the cellular coboundary at degree 1, which
        // kills cohomology classes: the fourth map is redundant on cohomology.
        assert_eq!(sum_m1.unwrap(), *cell.d_at(0).unwrap());
    }

    #[test]
    fn derived_cellulation_and_reverse_map() {
        let colex = Colex3::torus3([2, 2, 2]).unwrap();
        let (color, _) = color_complex_3d_bulk(&colex);
        for kappa in [
            ColorSet::pair(Color::R, Color::G),
            ColorSet::pair(Color::R, Color::Y),
            ColorSet::pair(Color::B, Color::Y),
        ] {
            let cellu = derived_cellulation(&colex, kappa);
            assert!(cellu.complex.verify().is_empty(), "derived {kappa:?} dd != 0");
            let m = chain_map_cell_to_color(&colex, &cellu);
            assert!(m.verify(&cellu.complex, &color).is_empty(), "reverse map squares fail");
            // Each cellulation face maps to exactly one colex face.
            for f in 0..cellu.faces.len() {
                assert_eq!(
                    m.at(2).mat_vec(&BitVec::singleton(cellu.faces.len(), f)).weight(),
                    1
                );
            }
        }
    }

    #[test]
    fn induced_cohomology_maps() {
        let colex = Colex3::torus3([2, 2, 2]).unwrap();
        let (color, _) = color_complex_3d_bulk(&colex);
        let cell = cellular_complex_3d(&colex);
        let color_h1 = color.cohomology_basis(1);
        let cell_h1 = cell.cohomology_basis(1);
        assert_eq!(color_h1.rank(), 9);
        assert_eq!(cell_h1.rank(), 3);
        // Sanity: probes are dual to reps.
        for (i, z) in color_h1.probes.iter().enumerate() {
            for (j, r) in color_h1.reps.iter().enumerate() {
                assert_eq!(z.dot(r), i == j);
            }
        }
        // Each M^c is surjective on H^1, and r, g, b jointly injective.
        let mut stacked = BitMatrix::zeros(9, 9);
        let mut row0 = 0;
        for c in [Color::R, Color::G, Color::B] {
            let m = chain_map_color_to_cell(&colex, c);
            let induced = m.induced_on_cohomology(1, &color_h1, &cell_h1);
            assert_eq!(induced.rank(), 3, "M^{c:?} not surjective on H^1");
            for r in 0..3 {
                for col in induced.row(r) {
                    stacked.flip(row0 + r, col);
                }
            }
            row0 += 3;
        }
        assert_eq!(stacked.rank(), 9, "(M^r, M^g, M^b) not jointly injective on H^1");

        // Composite with the reverse map acts as the identity on cohomology
        // classes at degree 1 for suitable pairings: going through the
        // κ-derived cellulation and back must fix the class coordinates
        // of the image subspace. Check rank preservation of the composite.
        let kappa = ColorSet::pair(Color::R, Color::G);
        let cellu = derived_cellulation(&colex, kappa);
        let mbar = chain_map_cell_to_color(&colex, &cellu);
        let cellu_h1 = cellu.complex.cohomology_basis(1);
        assert_eq!(cellu_h1.rank(), 3);
        let fwd = mbar.induced_on_cohomology(1, &cellu_h1, &color_h1);
        assert_eq!(fwd.rank(), 3, "reverse map not injective on H^1");
    }

    #[test]
    fn chain_maps_2d() {
        let colex = Colex2::hex_torus(3, 3).unwrap();
        let (color, _) = color_complex_2d(&colex);
        let cell = cellular_complex_2d(&colex);
        let color_h1 = color.cohomology_basis(1);
        let cell_h1 = cell.cohomology_basis(1);
        assert_eq!(color_h1.rank(), 4);
        assert_eq!(cell_h1.rank(), 2);
        let mut stacked = BitMatrix::zeros(4, 4);
        let mut row0 = 0;
        for c in [Color::R, Color::G] {
            let m = chain_map_color_to_cell_2d(&colex, c);
            assert!(m.verify(&color, &cell).is_empty());
            let induced = m.induced_on_cohomology(1, &color_h1, &cell_h1);
            assert_eq!(induced.rank(), 2);
            for r in 0..2 {
                for col in induced.row(r) {
                    stacked.flip(row0 + r, col);
                }
            }
            row0 += 2;
        }
        // Two of the three maps reproduce the 2x2 copies structure.
        assert_eq!(stacked.rank(), 4);
    }

    #[test]
    fn state_boundary_breaks_local_exactness() {
        let colex = Colex3::time_interval([2, 2], 6).unwrap();
        let state = color_complex_3d(&colex, None).unwrap();
        assert!(state.verify().is_empty());
        // A phantom volume's vertex set is a locally supported 1-cocycle of
        // the restricted complex that is not a coboundary.
        let pv = &colex.phantom_vols[0];
        let cocycle = BitVec::from_indices(colex.verts.len(), pv.verts.iter().copied());
        let d1 = state.d_at(1).unwrap();
        assert!(d1.mat_vec(&cocycle).is_zero(), "phantom volume boundary is not a cocycle");
        let d0 = state.d_at(0).unwrap();
        assert!(d0.solve(&cocycle).is_none(), "state boundary should not trivialize it");

        // All-smooth regains exactness for exactly these cocycles.
        let smooth =
            color_complex_3d(&colex, Some(&BoundarySpec::both(BoundaryKind::AllSmooth))).unwrap();
        assert!(smooth.verify().is_empty());
        let d0s = smooth.d_at(0).unwrap();
        assert!(d0s.solve(&cocycle).is_some(), "all-smooth must trivialize phantom cocycles");
    }

    #[test]
    fn boundary_complexes_verify() {
        let colex = Colex3::time_interval([2, 2], 6).unwrap();
        for kind in [
            BoundaryKind::AllSmooth,
            BoundaryKind::AllRough,
            BoundaryKind::Color(Color::R),
            BoundaryKind::Color(Color::G),
            BoundaryKind::Color(Color::B),
            BoundaryKind::Color(Color::Y),
            BoundaryKind::DoubleColor(ColorSet::pair(Color::R, Color::G)),
            BoundaryKind::DoubleColor(ColorSet::pair(Color::B, Color::Y)),
        ] {
            let cc = color_complex_3d(&colex, Some(&BoundarySpec::both(kind)));
            assert!(cc.is_ok(), "{kind:?} failed: {:?}", cc.err());
        }
        // Boundary specs are rejected on a torus.
        let torus = Colex3::torus3([2, 2, 2]).unwrap();
        assert!(
            color_complex_3d(&torus, Some(&BoundarySpec::both(BoundaryKind::AllSmooth))).is_err()
        );
    }

    #[test]
    fn local_exactness_spot_check() {
        // On the bulk torus, a 1-cocycle supported within one primitive cell
        // is a coboundary.
        let colex = Colex3::torus3([2, 2, 2]).unwrap();
        let (cc, _) = color_complex_3d_bulk(&colex);
        // The vertex set of a single volume is such a cocycle.
        let a = BitVec::from_indices(colex.verts.len(), colex.vols[0].verts.iter().copied());
        let d1 = cc.d_at(1).unwrap();
        assert!(d1.mat_vec(&a).is_zero());
        let d0 = cc.d_at(0).unwrap();
        let sol = d0.solve(&a).expect("locally supported cocycle must be a coboundary");
        assert_eq!(d0.mat_vec(&sol), a);
    }
}
