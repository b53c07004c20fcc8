use cgamotion::cga::Vec3;
use cgamotion::fixtures::{bar, bar_slab, cube, BAR_DIMS};

#[test]
fn stretched_bar_splits_in_two() {
    let mut body = bar();
    let last = BAR_DIMS[0] - 1;
    for (slab, dir, k) in [(0, -1.0, 5.0), (last, 1.0, 20.0)] {
        for i in bar_slab(slab) {
            let p = body.particles()[i].position;
            body.grab_particle(i, p + Vec3::new(dir, 0.0, 0.0), k).unwrap();
        }
    }
    for _ in 0..240 {
        body.step(1.0 / 60.0, Vec3::zeros()).unwrap();
        body.tear(1.5).unwrap();
    }
    let pieces = body.pieces();
    assert_eq!(pieces.len(), 2, "{pieces:?}");
    // The split runs through one slab cross-section: each piece is a set of
    // whole slabs.
    for piece in &pieces {
        assert_eq!(piece.len() % (BAR_DIMS[1] * BAR_DIMS[2]), 0, "{piece:?}");
    }
}

#[test]
fn rest_body_does_not_tear() {
    let mut body = bar();
    let report = body.tear(1.5).unwrap();
    assert!(report.is_empty());
    assert_eq!(body.pieces().len(), 1);
}

#[test]
fn far_displaced_particle_detaches() {
    let mut body = cube(0.5, 0.1);
    let c = body.centroid();
    let p = body.particles()[0].position;
    body.set_position(0, c + (p - c) * 10.0).unwrap();
    let report = body.tear(2.0).unwrap();
    assert_eq!(report.detached, vec![0]);
    assert!(body.pieces().iter().any(|piece| piece == &vec![0]));
}
