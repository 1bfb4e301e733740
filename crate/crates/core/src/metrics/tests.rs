use super::*;
use crate::netstruct::skeletonize;
use crate::phantom;

fn mask(width: usize, data: &[u8]) -> BinaryMask {
    let height = data.len() / width;
    BinaryMask::new(width, height, data.iter().map(|&b| b != 0).collect()).unwrap()
}

fn close(a: f64, b: f64) {
    assert!((a - b).abs() <= 1e-9, "expected {b}, got {a}");
}

// a long line plus four separate square rings: the workhorse mask for
// network-structure cases (b1 = 4, largest skeleton component = the line)
fn line_and_rings() -> BinaryMask {
    BinaryMask::from_fn(120, 120, |r, c| {
        let line = r == 60 && (10..=110).contains(&c);
        let ring = |r0: usize, c0: usize| {
            let (dr, dc) = (r.wrapping_sub(r0), c.wrapping_sub(c0));
            dr < 10 && dc < 10 && (dr == 0 || dr == 9 || dc == 0 || dc == 9)
        };
        line || ring(10, 10) || ring(10, 100) || ring(100, 10) || ring(100, 100)
    })
}

#[test]
fn confusion_identity_and_complement() {
    let gt = phantom::random_mask(16, 16, 0.4, 1);
    let same = confusion(&gt, &gt).unwrap();
    assert_eq!(same.false_positive, 0);
    assert_eq!(same.false_negative, 0);

    let inverted = BinaryMask::from_fn(16, 16, |r, c| !gt.get(r, c));
    let opposite = confusion(&inverted, &gt).unwrap();
    assert_eq!(opposite.true_positive, 0);
    assert_eq!(opposite.true_negative, 0);
}

#[test]
fn confusion_hand_case() {
    let seg = mask(4, &[1, 1, 0, 0]);
    let gt = mask(4, &[1, 0, 1, 0]);
    let c = confusion(&seg, &gt).unwrap();
    assert_eq!(
        (c.true_positive, c.false_positive, c.true_negative, c.false_negative),
        (1, 1, 1, 1)
    );
}

#[test]
fn confusion_rejects_dimension_mismatch() {
    let a = BinaryMask::filled(4, 4, true);
    let b = BinaryMask::filled(5, 4, true);
    assert!(matches!(
        confusion(&a, &b),
        Err(MetricError::DimensionMismatch(..))
    ));
}

#[test]
fn pixel_metrics_identity() {
    let gt = phantom::random_mask(16, 16, 0.4, 2);
    let m = pixel_metrics(&confusion(&gt, &gt).unwrap());
    assert_eq!(m.dice, 1.0);
    assert_eq!(m.accuracy, 1.0);
    assert_eq!(m.precision, Some(1.0));
    assert_eq!(m.recall, Some(1.0));
}

#[test]
fn dice_four_sevenths() {
    // tp = 2, |seg| = 3, |gt| = 4 -> dice = 4/7
    let seg = mask(8, &[1, 1, 1, 0, 0, 0, 0, 0]);
    let gt = mask(8, &[1, 1, 0, 1, 1, 0, 0, 0]);
    let m = pixel_metrics(&confusion(&seg, &gt).unwrap());
    close(m.dice, 4.0 / 7.0);
}

#[test]
fn dice_disjoint_and_empty_conventions() {
    let seg = mask(4, &[1, 1, 0, 0]);
    let gt = mask(4, &[0, 0, 1, 1]);
    assert_eq!(pixel_metrics(&confusion(&seg, &gt).unwrap()).dice, 0.0);

    let empty = BinaryMask::filled(4, 4, false);
    let m = pixel_metrics(&confusion(&empty, &empty).unwrap());
    assert_eq!(m.dice, 1.0);
    assert_eq!(m.precision, None);
    assert_eq!(m.recall, None);
}

#[test]
fn dice_is_symmetric() {
    for seed in 0..50 {
        let a = phantom::random_mask(16, 16, 0.3, seed);
        let b = phantom::random_mask(16, 16, 0.5, seed + 1000);
        let d_ab = pixel_metrics(&confusion(&a, &b).unwrap()).dice;
        let d_ba = pixel_metrics(&confusion(&b, &a).unwrap()).dice;
        assert_eq!(d_ab, d_ba);
    }
}

#[test]
fn single_pixel_toggle_bounds_dice_shift() {
    let mut rng = phantom::Rng::new(99);
    for seed in 0..30 {
        let a = phantom::random_mask(16, 16, 0.4, seed + 500);
        let gt = phantom::random_mask(16, 16, 0.4, seed + 600);
        let i = rng.next_below(256);
        let toggled = BinaryMask::from_fn(16, 16, |r, c| {
            let v = a.get(r, c);
            if r * 16 + c == i {
                !v
            } else {
                v
            }
        });
        let d0 = pixel_metrics(&confusion(&a, &gt).unwrap()).dice;
        let d1 = pixel_metrics(&confusion(&toggled, &gt).unwrap()).dice;
        let bound = 2.0 / (a.count_foreground() + gt.count_foreground()) as f64;
        assert!((d0 - d1).abs() <= bound + 1e-12, "seed {seed}");
    }
}

#[test]
fn kappa_identity_is_one() {
    let gt = phantom::random_mask(16, 16, 0.4, 3);
    assert_eq!(cohens_kappa(&gt, &gt).unwrap(), Some(1.0));
}

#[test]
fn kappa_hand_case() {
    // Pr(a) = 0.75, Pr(e) = 0.5 -> kappa = 0.5
    let a = mask(4, &[1, 1, 0, 0]);
    let b = mask(4, &[1, 0, 0, 0]);
    close(cohens_kappa(&a, &b).unwrap().unwrap(), 0.5);
}

#[test]
fn kappa_perfect_disagreement() {
    // complement of a 50/50 mask: Pr(a) = 0, Pr(e) = 0.5 -> kappa = -1
    let a = mask(4, &[1, 1, 0, 0]);
    let b = mask(4, &[0, 0, 1, 1]);
    close(cohens_kappa(&a, &b).unwrap().unwrap(), -1.0);
}

#[test]
fn kappa_degenerate_identical_sentinel() {
    let a = BinaryMask::filled(4, 4, true);
    assert_eq!(cohens_kappa(&a, &a).unwrap(), Some(1.0));
    let z = BinaryMask::filled(4, 4, false);
    assert_eq!(cohens_kappa(&z, &z).unwrap(), Some(1.0));
}

#[test]
fn kappa_is_symmetric_and_bounded() {
    for seed in 0..50 {
        let a = phantom::random_mask(12, 12, 0.4, seed);
        let b = phantom::random_mask(12, 12, 0.6, seed + 77);
        let k_ab = cohens_kappa(&a, &b).unwrap().unwrap();
        let k_ba = cohens_kappa(&b, &a).unwrap().unwrap();
        assert_eq!(k_ab, k_ba);
        assert!(k_ab <= 1.0);
        if k_ab == 1.0 {
            assert_eq!(a, b);
        }
    }
}

#[test]
fn cal_identity() {
    let gt = line_and_rings();
    let cal = cal_metric(&gt, &gt, 1.0, 1.0).unwrap();
    assert_eq!(cal.connectivity, 1.0);
    assert_eq!(cal.area, 1.0);
    assert_eq!(cal.length, 1.0);
    assert_eq!(cal.cal, 1.0);
}

#[test]
fn connectivity_hand_case() {
    // gt: 2 components, 200 vessel px; seg: 12 components
    // C = 1 - |2 - 12| / 200 = 0.95
    let gt = BinaryMask::from_fn(120, 50, |r, c| (r == 10 || r == 30) && c < 100);
    assert_eq!(gt.count_foreground(), 200);
    let seg = BinaryMask::from_fn(120, 50, |r, c| r == 20 && c < 120 && c % 10 < 5);
    assert_eq!(component_count(&seg, Connectivity::Eight), 12);
    let cal = cal_metric(&seg, &gt, 1.0, 1.0).unwrap();
    close(cal.connectivity, 0.95);
}

#[test]
fn area_zero_when_beyond_dilation_reach() {
    let gt = BinaryMask::from_fn(40, 40, |r, _| r == 5);
    let seg = BinaryMask::from_fn(40, 40, |r, _| r == 30);
    let cal = cal_metric(&seg, &gt, 1.0, 1.0).unwrap();
    assert_eq!(cal.area, 0.0);
    assert_eq!(cal.cal, 0.0);
}

#[test]
fn cal_requires_nonempty_gt() {
    let seg = BinaryMask::filled(8, 8, true);
    let gt = BinaryMask::filled(8, 8, false);
    assert!(matches!(
        cal_metric(&seg, &gt, 1.0, 1.0),
        Err(MetricError::EmptyGroundTruth)
    ));
}

#[test]
fn cal_is_product_of_components() {
    for seed in 0..20 {
        let seg = phantom::random_blobs(32, 32, seed);
        let gt = phantom::random_blobs(32, 32, seed + 40);
        if gt.count_foreground() == 0 {
            continue;
        }
        let cal = cal_metric(&seg, &gt, 1.0, 1.0).unwrap();
        assert_eq!(cal.cal, cal.connectivity * cal.area * cal.length);
        for v in [cal.connectivity, cal.area, cal.length, cal.cal] {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn lcc_identity_and_hand_cases() {
    let gt = line_and_rings();
    assert_eq!(lcc_ratio(&gt, &gt).unwrap(), 1.0);

    // straight 1-px lines are their own skeletons: lengths 80 vs 100 -> 0.8
    let gt = BinaryMask::from_fn(110, 9, |r, c| r == 4 && c < 100);
    let seg = BinaryMask::from_fn(110, 9, |r, c| r == 4 && c < 80);
    close(lcc_ratio(&seg, &gt).unwrap(), 0.8);

    // 250 vs 100 clamps to zero
    let gt = BinaryMask::from_fn(260, 9, |r, c| r == 4 && c < 100);
    let seg = BinaryMask::from_fn(260, 9, |r, c| r == 4 && c < 250);
    close(lcc_ratio(&seg, &gt).unwrap(), 0.0);
}

#[test]
fn lcc_requires_nonempty_gt_skeleton() {
    let seg = BinaryMask::filled(8, 8, true);
    let gt = BinaryMask::filled(8, 8, false);
    assert!(matches!(
        lcc_ratio(&seg, &gt),
        Err(MetricError::EmptyGroundTruth)
    ));
}

fn rings(count: usize) -> BinaryMask {
    // up to 3x3 grid of 8x8 square rings, 12 px apart
    BinaryMask::from_fn(40, 40, |r, c| {
        let mut n = 0;
        for i in 0..3 {
            for j in 0..3 {
                if n >= count {
                    break;
                }
                let (r0, c0) = (2 + 12 * i, 2 + 12 * j);
                let (dr, dc) = (r.wrapping_sub(r0), c.wrapping_sub(c0));
                if dr < 8 && dc < 8 && (dr == 0 || dr == 7 || dc == 0 || dc == 7) {
                    return true;
                }
                n += 1;
            }
        }
        false
    })
}

#[test]
fn tops_hand_cases() {
    let gt = rings(4);
    assert_eq!(crate::netstruct::betti_numbers(&gt).b1, 4);
    assert_eq!(tops(&gt, &gt).unwrap(), 1.0);

    let seg = rings(2);
    close(tops(&seg, &gt).unwrap(), 0.5);

    let seg9 = rings(9);
    assert_eq!(crate::netstruct::betti_numbers(&seg9).b1, 9);
    close(tops(&seg9, &gt).unwrap(), 0.0);
}

#[test]
fn tops_requires_gt_holes() {
    let line = BinaryMask::from_fn(10, 10, |r, _| r == 5);
    assert!(matches!(
        tops(&line, &line),
        Err(MetricError::NoGroundTruthHoles)
    ));
}

#[test]
fn vessel_density_cases() {
    assert_eq!(vessel_density(&BinaryMask::filled(7, 3, true)), 1.0);
    let five = BinaryMask::from_fn(5, 5, |r, c| r == 0 && c != 0);
    assert_eq!(five.count_foreground(), 4);
    let five = BinaryMask::from_fn(5, 5, |r, _| r == 2);
    assert_eq!(vessel_density(&five), 0.2);
    for seed in 0..20 {
        let m = phantom::random_mask(16, 16, 0.5, seed);
        let popcount = m.data().iter().filter(|&&v| v).count();
        assert_eq!(vessel_density(&m), popcount as f64 / 256.0);
    }
}

#[test]
fn vessel_density_of_disjoint_union_adds() {
    let a = BinaryMask::from_fn(16, 16, |r, _| r < 4);
    let b = BinaryMask::from_fn(16, 16, |r, _| r >= 12);
    close(
        vessel_density(&a.union(&b)),
        vessel_density(&a) + vessel_density(&b),
    );
}

#[test]
fn acircularity_analytic_square() {
    // continuous square of side a: perimeter ratio = 2 / sqrt(pi)
    let a = 10.0;
    let region = FazRegion {
        area: (a * a) as usize,
        perimeter: 4.0 * a,
        boundary: Vec::new(),
        face_id: 1,
    };
    close(
        acircularity(&region).unwrap(),
        2.0 / std::f64::consts::PI.sqrt(),
    );
}

#[test]
fn acircularity_discrete_square_face() {
    // ring around a 10x10 interior: contour walk visits 36 boundary pixels
    let ring = phantom::square_ring(14, 1, 1);
    let faz = detect_faz(&skeletonize(&ring)).unwrap();
    assert_eq!(faz.area, 100);
    let expected = 36.0 / (2.0 * (std::f64::consts::PI * 100.0).sqrt());
    close(acircularity(&faz).unwrap(), expected);
}

#[test]
fn acircularity_rejects_zero_area() {
    let region = FazRegion {
        area: 0,
        perimeter: 10.0,
        boundary: Vec::new(),
        face_id: 1,
    };
    assert!(matches!(acircularity(&region), Err(MetricError::ZeroArea)));
}

#[test]
fn relative_error_cases() {
    assert_eq!(relative_error(1.0, 1.0).unwrap(), 0.0);
    close(relative_error(0.75, 1.0).unwrap(), 0.25);
    assert!(matches!(
        relative_error(1.0, 0.0),
        Err(MetricError::ZeroTruth)
    ));
    for seed in 0..10 {
        let a = phantom::random_mask(8, 8, 0.5, seed);
        let b = phantom::random_mask(8, 8, 0.5, seed + 30);
        if b.count_foreground() == 0 {
            continue;
        }
        let (va, vb) = (vessel_density(&a), vessel_density(&b));
        close(relative_error(va, vb).unwrap(), (va - vb).abs() / vb);
    }
}

#[test]
fn evaluate_identity_is_all_ones() {
    let gt = line_and_rings();
    let report = evaluate(&gt, &gt).unwrap();
    assert_eq!(report.dice, 1.0);
    assert_eq!(report.accuracy, 1.0);
    assert_eq!(report.precision, Some(1.0));
    assert_eq!(report.recall, 1.0);
    assert_eq!(report.kappa, Some(1.0));
    assert_eq!(report.cal, 1.0);
    assert_eq!(report.lcc, 1.0);
    assert_eq!(report.tops, Some(1.0));
    assert_eq!(report.vd_rel_error, 0.0);
    assert_eq!(report.faz_area_rel_error, Some(0.0));
    assert_eq!(report.acircularity_rel_error, Some(0.0));
}

#[test]
fn evaluate_matches_individual_operations() {
    let seg = phantom::random_blobs(64, 64, 21);
    let gt = phantom::random_blobs(64, 64, 22);
    let report = evaluate(&seg, &gt).unwrap();

    let pixels = pixel_metrics(&confusion(&seg, &gt).unwrap());
    assert_eq!(report.dice, pixels.dice);
    assert_eq!(report.accuracy, pixels.accuracy);
    assert_eq!(report.precision, pixels.precision);
    assert_eq!(Some(report.recall), pixels.recall);
    assert_eq!(report.kappa, cohens_kappa(&seg, &gt).unwrap());

    let cal = cal_metric(&seg, &gt, 1.0, 1.0).unwrap();
    assert_eq!(report.connectivity, cal.connectivity);
    assert_eq!(report.area, cal.area);
    assert_eq!(report.length, cal.length);
    assert_eq!(report.cal, cal.cal);
    assert_eq!(report.lcc, lcc_ratio(&seg, &gt).unwrap());
    assert_eq!(report.tops, tops(&seg, &gt).ok());
    assert_eq!(report.vessel_density_seg, vessel_density(&seg));
    assert_eq!(report.vessel_density_gt, vessel_density(&gt));
}

#[test]
fn evaluate_flags_missing_loops() {
    let gt = line_and_rings();
    // segmentation loses every ring: no loops anywhere
    let seg = BinaryMask::from_fn(120, 120, |r, c| r == 60 && (10..=110).contains(&c));
    let report = evaluate(&seg, &gt).unwrap();
    assert_eq!(report.tops, Some(0.0));
    assert_eq!(report.faz_area_rel_error, None);
    assert_eq!(report.acircularity_rel_error, None);
}

#[test]
fn network_metrics_react_to_tiny_edits_that_dice_ignores() {
    let gt = line_and_rings();
    // three-pixel edit: cut the line at two places and open one ring
    let seg = BinaryMask::from_fn(120, 120, |r, c| {
        if (r, c) == (60, 43) || (r, c) == (60, 77) || (r, c) == (10, 14) {
            false
        } else {
            gt.get(r, c)
        }
    });
    let before = evaluate(&gt, &gt).unwrap();
    let after = evaluate(&seg, &gt).unwrap();

    let dice_shift = (before.dice - after.dice).abs();
    let lcc_shift = (before.lcc - after.lcc).abs();
    let tops_shift = (before.tops.unwrap() - after.tops.unwrap()).abs();
    assert!(dice_shift < 0.01, "dice moved {dice_shift}");
    assert!(lcc_shift > 0.5, "lcc only moved {lcc_shift}");
    assert!(tops_shift >= 0.25, "tops only moved {tops_shift}");
}

#[test]
fn network_scores_stay_in_range_under_fuzz() {
    for seed in 0..1000 {
        let seg = phantom::random_blobs(24, 24, seed);
        let gt = phantom::random_blobs(24, 24, seed + 1234);
        if gt.count_foreground() == 0 {
            continue;
        }
        let report = evaluate(&seg, &gt).unwrap();
        for v in [
            report.dice,
            report.accuracy,
            report.recall,
            report.connectivity,
            report.area,
            report.length,
            report.cal,
            report.lcc,
        ] {
            assert!((0.0..=1.0).contains(&v), "seed {seed}: {v}");
        }
        if let Some(t) = report.tops {
            assert!((0.0..=1.0).contains(&t));
        }
        if let Some(p) = report.precision {
            assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn csv_fields_line_up_with_columns() {
    let gt = line_and_rings();
    let report = evaluate(&gt, &gt).unwrap();
    let fields = report.csv_fields();
    assert_eq!(
        fields.len(),
        EvalReport::CSV_COLUMNS.split(',').count()
    );
    assert_eq!(fields[0], "1.000000");
    // JSON serialisation carries every field name
    let json = serde_json::to_value(&report).unwrap();
    assert!(json.get("dice").is_some());
    assert!(json.get("faz_area_rel_error").is_some());
}

use crate::netstruct::{component_count, Connectivity};
