use cachestp::figures::{reproduce, FigureId, FigureOptions};

fn analytic() -> FigureOptions {
    FigureOptions {
        simulate: false,
        ..FigureOptions::default()
    }
}

#[test]
fn every_figure_has_rectangular_finite_data() {
    for id in FigureId::ALL {
        let t = reproduce(id, &analytic()).unwrap();
        assert!(!t.rows.is_empty(), "{id}");
        for row in &t.rows {
            assert_eq!(row.len(), t.columns.len(), "{id}");
            assert!(row.iter().all(|v| v.is_finite()), "{id}");
        }
    }
}

#[test]
fn fig2a_trends() {
    let t = reproduce(FigureId::Fig2a, &analytic()).unwrap();
    let low = t.column("exact_lb5e-5").unwrap();
    let high = t.column("exact_lb2e-4").unwrap();
    assert!(low.windows(2).all(|w| w[1] > w[0]));
    assert!(high.windows(2).all(|w| w[1] > w[0]));
    let up = t.column("upper_lb1e-4").unwrap();
    let ex = t.column("exact_lb1e-4").unwrap();
    assert!(up.iter().zip(&ex).all(|(u, e)| u >= e));
}

#[test]
fn fig2b_decreases_in_threshold() {
    let t = reproduce(FigureId::Fig2b, &analytic()).unwrap();
    for n in [1, 2, 4, 8] {
        let c = t.column(&format!("exact_N{n}")).unwrap();
        assert!(c.windows(2).all(|w| w[1] < w[0]), "N = {n}");
    }
}

#[test]
fn fig6b_more_backhaul_helps() {
    let t = reproduce(FigureId::Fig6b, &analytic()).unwrap();
    let a = t.column("asym_opt").unwrap();
    assert!(a.windows(2).all(|w| w[1] >= w[0] - 1e-9));
}

#[test]
fn simulated_columns_are_thread_invariant() {
    let opts = |threads| FigureOptions {
        threads,
        ..FigureOptions::default()
    };
    let a = reproduce(FigureId::Fig2b, &opts(1)).unwrap();
    let b = reproduce(FigureId::Fig2b, &opts(4)).unwrap();
    assert!(a.columns.iter().any(|c| c.starts_with("mc_stderr_")));
    assert_eq!(a.rows, b.rows);
}
