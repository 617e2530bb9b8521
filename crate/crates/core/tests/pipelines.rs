use netboundary::figures::{reproduce, Figure, FigureOptions};
use netboundary::generators::{generate_er, NetworkModel};

fn small() -> FigureOptions {
    FigureOptions {
        n: 3000,
        origins: Some(60),
        pair_samples: 2000,
        seed: 4,
        ..FigureOptions::default()
    }
}

#[test]
fn every_generated_figure_produces_curves_and_checks() {
    for tag in ["2a", "2b", "3a", "3b", "3c", "3d", "4a", "4c"] {
        let figure: Figure = tag.parse().unwrap();
        let out = reproduce(figure, None, &small()).unwrap();
        assert!(!out.curves.is_empty(), "{tag}");
        assert!(out.curves.iter().all(|c| !c.name.is_empty()), "{tag}");
        assert!(!out.report.checks.is_empty(), "{tag}");
        assert_eq!(
            out.report.passed,
            Some(out.report.checks.iter().all(|c| c.passed)),
            "{tag}"
        );
        let json = serde_json::to_string(&out.report).unwrap();
        assert!(json.contains(&format!("\"figure\":\"{tag}\"")));
    }
}

#[test]
fn reports_are_deterministic() {
    let a = reproduce(Figure::F4c, None, &small()).unwrap();
    let b = reproduce(Figure::F4c, None, &small()).unwrap();
    assert_eq!(
        serde_json::to_string(&a.report).unwrap(),
        serde_json::to_string(&b.report).unwrap()
    );
    assert_eq!(a.curves, b.curves);
}

#[test]
fn user_graph_runs_without_thresholds() {
    for figure in [Figure::F2c, Figure::F3b, Figure::F3c, Figure::F3d, Figure::F4b, Figure::F4d] {
        let g = generate_er(2000, 5.0, 2).unwrap();
        let out = reproduce(figure, Some(("data.edges", g)), &small()).unwrap();
        assert!(out.report.checks.is_empty(), "{figure}");
        assert_eq!(out.report.passed, None);
        assert_eq!(out.report.networks[0].label, "data.edges");
        assert!(!out.curves.is_empty());
    }
}

#[test]
fn cut_sweep_adds_cuts() {
    let opts = FigureOptions {
        sweep: true,
        ..small()
    };
    let out = reproduce(Figure::F4a, None, &opts).unwrap();
    let cuts = &out.report.metrics["sf.cuts"];
    assert_eq!(cuts.as_array().unwrap().len(), 3);
    assert!(out.curves.iter().any(|c| c.name.contains("_cut")));
}

#[test]
fn realizations_are_pooled() {
    let opts = FigureOptions {
        realizations: 2,
        model: Some(NetworkModel::Er {
            n: 2000,
            mean_degree: 4.0,
        }),
        ..small()
    };
    let out = reproduce(Figure::F2a, None, &opts).unwrap();
    assert_eq!(out.report.networks.len(), 2);
    assert_eq!(out.report.metrics["er.origins"], 120);
}

#[test]
fn regular_model_checks_the_negative_control() {
    let opts = FigureOptions {
        model: Some(NetworkModel::Regular { n: 3000, degree: 3 }),
        ..small()
    };
    let out = reproduce(Figure::F2a, None, &opts).unwrap();
    assert!(out
        .report
        .checks
        .iter()
        .any(|c| c.name.contains("delta infinite") && c.passed));
}
