use colorcircuit::colex::*;

fn main() {
    let colex = Colex3::time_interval([2, 2], 6).unwrap();
    // Violation at VolColor(4, R) <- Vert(24): inspect volume 4 around vertex 24.
    let v = 4usize;
    let p = 24usize;
    let vol = &colex.vols[v];
    println!("vol 4: color {:?} on_boundary {} coord {:?}", vol.color, vol.on_boundary, vol.coord);
    println!("vert 24: coord {:?} volumes {:?}", colex.verts[p].coord, colex.verts[p].volumes);
    // Faces of v at p, with their colors and boundary status.
    for &f in &vol.faces {
        if colex.faces[f].verts.contains(&p) {
            let fc = &colex.faces[f];
            println!("  face {f} color {:?} on_bd {} vols {:?}", fc.color, fc.on_boundary, fc.volumes);
            for &e in &fc.edges {
                let ed = &colex.edges[e];
                if ed.verts.contains(&p) {
                    println!("    edge {e} color {:?} on_bd {} verts {:?}", ed.color, ed.on_boundary, ed.verts);
                }
            }
        }
    }
    // Which phantom volumes touch p?
    for (pi, pv) in colex.phantom_vols.iter().enumerate() {
        if pv.verts.contains(&p) {
            println!("phantom {pi} color {:?} side {} verts_in {} faces {:?} edges {:?}", pv.color, pv.side, pv.verts.len(), pv.faces, pv.edges.len());
        }
    }
}
