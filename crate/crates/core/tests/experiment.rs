use std::fs::File;

use twowell::experiment::*;

fn synthetic(f: impl Fn(f64) -> f64, n: usize) -> Vec<(f64, f64)> {
    geometric(1e-6, 1e-2, n)
        .into_iter()
        .map(|e| (e, f(e)))
        .collect()
}

#[test]
fn fits_pure_power_laws() {
    let fit = fit_slope(&synthetic(|e| e.powf(2.0 / 3.0), 12), Some(1)).unwrap();
    assert!((fit.slope - 2.0 / 3.0).abs() < 1e-12);
    assert!(fit.intercept.abs() < 1e-10);
    assert!((fit.r2 - 1.0).abs() < 1e-12);
    assert!(!fit.curvature);
    assert_eq!(fit.theoretical(), Some(2.0 / 3.0));

    let fit = fit_slope(&synthetic(|e| 3.0 * e.powf(0.8), 10), Some(2)).unwrap();
    assert!((fit.slope - 0.8).abs() < 1e-12);
    assert!((fit.intercept - 3f64.log10()).abs() < 1e-10);
    assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
}

#[test]
fn flags_curvature() {
    // ε^{2/3} + ε bends towards slope 1 at the large-ε end.
    let fit = fit_slope(&synthetic(|e| e.powf(2.0 / 3.0) + e, 16), None).unwrap();
    assert!(fit.curvature, "spread {}", fit.spread());
    assert_eq!(fit.windowed.len(), 16 - fit::WINDOW + 1);
}

#[test]
fn fit_input_errors() {
    assert!(fit_slope(&synthetic(|e| e, 5), None).is_err());
    let mut pts = synthetic(|e| e, 8);
    pts[3].1 = 0.0;
    assert!(fit_slope(&pts, None).is_err());
}

#[test]
fn exponent_labels() {
    assert_eq!(exponent_label(1), "2/3");
    assert_eq!(exponent_label(3), "6/7");
    assert!((theoretical_exponent(2) - 0.8).abs() < 1e-15);
}

#[test]
fn candidate_n() {
    // ε^{−1/3} = 10 at ε = 1e-3
    let (ns, flag) = n_candidates(1e-3, 1);
    assert!(!flag);
    assert_eq!(ns, vec![5, 8, 10, 16, 20]);
    let (ns, flag) = n_candidates(0.5, 1);
    assert!(flag);
    assert_eq!(ns, vec![4]);
    let (ns, _) = n_candidates(1e-6, 2);
    assert!(ns.iter().all(|&n| n >= 4));
}

fn rows() -> Vec<SweepRow> {
    geometric(1e-5, 1e-2, 7)
        .into_iter()
        .enumerate()
        .map(|(i, e)| SweepRow {
            epsilon: e,
            n: 4 + i,
            e_el: 0.1 * e.sqrt(),
            e_surf: 1.0 / 3.0,
            e_total: 0.1 * e.sqrt() + e / 3.0,
            flag: i == 0,
        })
        .collect()
}

#[test]
fn csv_round_trip_and_determinism() {
    let r = rows();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_rows(&r, &mut a).unwrap();
    write_rows(&r, &mut b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a.clone()).unwrap();
    assert!(text.starts_with("epsilon,N,E_el,E_surf,E_total,flag\n"));
    assert_eq!(read_rows(&a[..]).unwrap(), r);
    assert!(read_rows(&b"x,y\n1,2\n"[..]).is_err());
}

#[test]
fn fit_skips_flagged_rows() {
    let mut r = rows();
    r.push(SweepRow {
        epsilon: 0.1,
        n: 4,
        e_el: 1e3,
        e_surf: 0.0,
        e_total: 1e3,
        flag: true,
    });
    let fit = fit_rows(&r, None).unwrap();
    assert_eq!(fit.residuals.len(), 6);
}

#[test]
fn polyline_round_trip() {
    let curves = vec![vec![(0.0, 0.5), (0.25, 0.75)], vec![(1.0, 1.0)]];
    let mut buf = Vec::new();
    write_polylines(&curves, &mut buf).unwrap();
    let back = read_polylines(&buf[..]).unwrap();
    assert_eq!(back, curves);
    assert!(read_polylines(&b"1 2 3\n"[..]).is_err());
}

#[test]
fn config_parsing_and_env() {
    let c = SweepConfig::parse("operator = curl\nl = 2,0\nlambda = 0.3\neps = 1e-4, 1e-3, 1e-2\nlower_grid = 128\nthreads = 2\nout_dir = results\n").unwrap();
    assert_eq!((c.m, c.l, c.order()), (2, (2, 0), 2));
    assert_eq!(c.eps, vec![1e-4, 1e-3, 1e-2]);
    assert_eq!((c.lower_grid, c.threads), (128, Some(2)));
    assert!(SweepConfig::parse("d = 3").is_err());
    assert!(SweepConfig::parse("lambda = 1.5").is_err());
    assert!(SweepConfig::parse("eps = 1e-3, 1e-4").is_err());
    let mut c = SweepConfig::for_well(1, 1);
    std::env::set_var("TWOWELL_THREADS", "3");
    std::env::set_var("TWOWELL_OUT_DIR", "/tmp/elsewhere");
    c.apply_env().unwrap();
    std::env::remove_var("TWOWELL_THREADS");
    std::env::remove_var("TWOWELL_OUT_DIR");
    assert_eq!(c.threads, Some(3));
    assert_eq!(c.out_dir, std::path::PathBuf::from("/tmp/elsewhere"));
}

#[test]
fn plots() {
    let dir = tempfile::tempdir().unwrap();
    let r = rows();
    let fit = fit_rows(&r, Some(1)).unwrap();
    let svg = dir.path().join("a.svg");
    emit_plot(&r, &fit, &svg).unwrap();
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("reference slope 2/3"));

    let png_path = dir.path().join("a.png");
    emit_plot(&r, &fit, &png_path).unwrap();
    let reader = png::Decoder::new(std::io::BufReader::new(File::open(&png_path).unwrap()))
        .read_info()
        .unwrap();
    let info = reader.info();
    assert!(info.width > 100 && info.height > 100);
    assert!(info
        .uncompressed_latin1_text
        .iter()
        .any(|t| t.text.contains("fitted slope")));

    assert!(emit_plot(&[], &fit, &svg).is_err());
    assert!(emit_plot(&r, &fit, &dir.path().join("a.gif")).is_err());

    let geo = dir.path().join("g.svg");
    emit_geometry_plot(&[vec![(0.0, 0.0), (1.0, 1.0)]], &geo).unwrap();
    assert!(std::fs::read_to_string(&geo)
        .unwrap()
        .contains("1 interface curves"));
    assert!(emit_geometry_plot(&[vec![]], &geo).is_err());
}

#[test]
fn small_upper_sweep() {
    let mut c = SweepConfig::for_well(1, 0);
    c.eps = geometric(1e-4, 1e-2, 6);
    c.resolution = 16;
    let rows = sweep_upper(&c).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!((r.e_total - (r.e_el + r.epsilon * r.e_surf)).abs() < 1e-15 * r.e_total);
        assert!(n_candidates(r.epsilon, 1).0.contains(&r.n));
    }
    // E_ε increases with ε
    assert!(rows.windows(2).all(|w| w[1].e_total > w[0].e_total));
    // same input, same output
    assert_eq!(sweep_upper(&c).unwrap(), rows);
}

#[test]
fn small_lower_sweep() {
    let mut c = SweepConfig::for_well(1, 0);
    c.eps = geometric(1e-4, 1e-2, 6);
    c.lower_grid = 64;
    let s = sweep_lower(&c).unwrap();
    assert_eq!(s.order, 1);
    assert_eq!(s.rows.len(), 6);
    assert!(!s.skipped.is_empty());
    assert!(s.candidates.iter().any(|c| c.label.starts_with("laminate")));
    for r in &s.rows {
        // each row is the minimum over the family
        let best = s
            .candidates
            .iter()
            .map(|k| k.e_el + r.epsilon * k.e_surf)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(r.e_total, best);
    }
}
