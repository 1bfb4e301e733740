//! Cross-module integration: the full library pipeline on synthetic data,
//! plus the serialised external interfaces.

use octaseg::binarise::{clean_small_structures, two_step_binarise, TrainingSet};
use octaseg::enhance::{oof, OofParams};
use octaseg::imgio::{load_gray, load_mask, save_gray, save_mask};
use octaseg::metrics::evaluate;
use octaseg::netstruct::{betti_numbers, detect_faz, skeleton_to_graph, skeletonize};
use octaseg::phantom;
use octaseg::{BinaryMask, GrayImage, RoiSpec};

fn workdir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("octaseg-core-it").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn enhance_binarise_evaluate_on_a_tube_phantom() {
    // radius 2.5 puts the mask boundary between pixel centres, so the
    // analytic mask and the anti-aliased image agree on every pixel
    let p = phantom::tube(96, 96, 48.0, 2.5, 0.9, 0.05);
    let params = OofParams::default();
    let enhanced = oof(&p.image, &params).unwrap();
    let mask = two_step_binarise(&enhanced, &params, 25, 0.1).unwrap();
    let mask = clean_small_structures(&mask, 10);
    let report = evaluate(&mask, &p.mask).unwrap();
    assert!(report.dice > 0.9, "tube dice {}", report.dice);
    assert_eq!(report.lcc, 1.0, "a clean tube keeps its full skeleton");
}

#[test]
fn skeleton_graph_and_faz_compose() {
    // grid of vessels: every interior cell is a face, the graph has cycles
    let grid = phantom::grid(64, 64, 12, 1, 4);
    let skeleton = skeletonize(&grid);
    let graph = skeleton_to_graph(&skeleton);
    let betti = betti_numbers(skeleton.as_mask());
    assert_eq!(graph.cycle_rank(), betti.b1);
    assert!(betti.b1 >= 9, "grid should enclose at least 3x3 cells");

    let faz = detect_faz(&skeleton).unwrap();
    assert!(faz.area >= 100, "largest cell area {}", faz.area);

    // external interfaces round-trip through JSON
    let graph_json: serde_json::Value = serde_json::from_str(&graph.to_json()).unwrap();
    assert_eq!(
        graph_json["edges"].as_array().unwrap().len(),
        graph.edges.len()
    );
    let faz_json: serde_json::Value = serde_json::from_str(&faz.to_json()).unwrap();
    assert_eq!(faz_json["area"].as_u64().unwrap() as usize, faz.area);
    assert!(faz_json["boundary"].as_array().unwrap().len() > 4);
}

#[test]
fn raster_files_round_trip_through_the_codecs() {
    let dir = workdir("codec");
    let p = phantom::tube(40, 30, 20.0, 2.5, 0.8, 0.1);

    for name in ["t.png", "t.pgm"] {
        let path = dir.join(name);
        save_gray(&p.image, &path).unwrap();
        let back = load_gray(&path).unwrap();
        assert_eq!(back.width(), 40);
        assert_eq!(back.height(), 30);
        // 8-bit quantization round trip: a second save/load is lossless
        let path2 = dir.join(format!("again_{name}"));
        save_gray(&back, &path2).unwrap();
        assert_eq!(load_gray(&path2).unwrap(), back);
    }

    let mask_path = dir.join("m.png");
    save_mask(&p.mask, &mask_path).unwrap();
    assert_eq!(load_mask(&mask_path).unwrap(), p.mask);
}

#[test]
fn roi_extraction_feeds_the_pipeline() {
    let mut rng = phantom::Rng::new(31);
    let scan = GrayImage::from_fn(304, 304, |_, _| rng.next_f64());
    let spec = RoiSpec::centered(304, 304);
    let rois = octaseg::imgio::extract_rois(&scan, &spec).unwrap();
    assert_eq!(rois.len(), 5);
    for (label, crop) in rois {
        assert_eq!(crop.width(), 76, "{label}");
        assert_eq!(crop.height(), 76, "{label}");
        // every crop is a valid pipeline input
        let enhanced = oof(&crop, &OofParams::default()).unwrap();
        assert_eq!(enhanced.width(), 76);
    }
}

#[test]
fn training_set_csv_interface_supports_knn() {
    let dir = workdir("training");
    let p = phantom::tube(24, 24, 12.0, 2.0, 0.9, 0.1);
    let train = TrainingSet::from_labelled_image(&p.image, &p.mask).unwrap();
    let csv = dir.join("train.csv");
    train.write_csv(&csv).unwrap();
    let restored = TrainingSet::read_csv(&csv).unwrap();
    assert_eq!(restored.len(), train.len());

    let mask = octaseg::binarise::knn_binarise(&restored, &p.image, 3).unwrap();
    let report = evaluate(&mask, &p.mask).unwrap();
    assert!(report.dice > 0.95, "knn dice on its own training image: {}", report.dice);
}

#[test]
fn whole_phantom_battery_stays_consistent() {
    // a loop-free mask has absent tops, a looped one defines it
    let tree = phantom::tree(128, 6, 3.0, 0.9, 0.05);
    let mask = BinaryMask::from_fn(128, 128, |r, c| tree.mask.get(r, c));
    let betti = betti_numbers(&mask);
    let report = evaluate(&mask, &mask).unwrap();
    if betti.b1 == 0 {
        assert!(report.tops.is_none());
    } else {
        assert_eq!(report.tops, Some(1.0));
    }
    assert_eq!(report.dice, 1.0);
}
