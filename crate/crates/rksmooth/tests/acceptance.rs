//! Acceptance suite: one test per benchmark criterion, each printing a
//! single PASS/FAIL line (visible with `--nocapture`; failing criteria dump
//! their full diagnostics).
//!
//! Criteria 1 and 2 reproduce the published benchmark tables. Their
//! tolerance clauses pass; the strict-ordering clauses are asserted exactly
//! as stated and two of them fail by sub-2% margins. That outcome is
//! analyzed in the repository notes: the published projection rows are
//! reproduced to four significant digits (which pins the protocol), while
//! the published comparator rows carry Monte-Carlo inflation that the exact
//! computation here does not share, so the published orderings are not all
//! properties of the exact risks. The assertions are left strict on purpose.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rksmooth::covariance::CovarianceModel;
use rksmooth::designs::{midpoint_design, regular_uniform_design};
use rksmooth::estimators::{
    build_smoother, projection_ou_closed, projection_weights, projection_wiener_closed,
    representer, EdgeCorrection, Method,
};
use rksmooth::kernels::{quartic_kernel, BoundaryMode, ScaledKernel};
use rksmooth::risk::{
    asymptotic_constants, asymptotic_imse, optimal_bandwidth_closed, optimal_bandwidth_exact,
    residual_norm2, risk_report, sigma2_xh, variance_gap_limit, HoptVariant, ImseFlavor,
    WeightDensity,
};
use rksmooth::simulation::{
    monte_carlo_mise, normality_diagnostic, BandwidthChoice, DesignKind, GrowthCurve, Scenario,
};

const EDGE: EdgeCorrection = EdgeCorrection::NormalizeWeightSum;
const GRID: usize = 201;
const RECORDED_SEED: u64 = 20240811;

struct PaperRow {
    m: usize,
    ibias2: f64,
    ivar: f64,
    imse: f64,
    h: f64,
}

const TABLE1_GM: [PaperRow; 3] = [
    PaperRow { m: 10, ibias2: 1.508e-3, ivar: 4.507e-2, imse: 4.658e-2, h: 0.335 },
    PaperRow { m: 50, ibias2: 2.662e-4, ivar: 9.494e-3, imse: 9.760e-3, h: 0.198 },
    PaperRow { m: 100, ibias2: 1.505e-4, ivar: 4.826e-3, imse: 4.977e-3, h: 0.154 },
];
const TABLE1_PRO: [PaperRow; 3] = [
    PaperRow { m: 10, ibias2: 1.304e-3, ivar: 4.399e-2, imse: 4.530e-2, h: 0.321 },
    PaperRow { m: 50, ibias2: 1.981e-4, ivar: 9.228e-3, imse: 9.426e-3, h: 0.187 },
    PaperRow { m: 100, ibias2: 0.897e-4, ivar: 4.689e-3, imse: 4.778e-3, h: 0.142 },
];
const TABLE2_GM: [PaperRow; 3] = [
    PaperRow { m: 10, ibias2: 2.596e-3, ivar: 8.821e-2, imse: 9.080e-2, h: 0.387 },
    PaperRow { m: 50, ibias2: 4.481e-4, ivar: 1.848e-2, imse: 1.893e-2, h: 0.236 },
    PaperRow { m: 100, ibias2: 2.299e-4, ivar: 9.390e-3, imse: 9.620e-3, h: 0.186 },
];
const TABLE2_PRO: [PaperRow; 3] = [
    PaperRow { m: 10, ibias2: 2.494e-3, ivar: 8.703e-2, imse: 8.952e-2, h: 0.386 },
    PaperRow { m: 50, ibias2: 4.097e-4, ivar: 1.822e-2, imse: 1.863e-2, h: 0.237 },
    PaperRow { m: 100, ibias2: 1.885e-4, ivar: 9.265e-3, imse: 9.453e-3, h: 0.187 },
];

struct ComputedRow {
    m: usize,
    ibias2: f64,
    ivar: f64,
    imse: f64,
    h: f64,
}

fn bench_row(method: Method, model: &CovarianceModel, m: usize) -> ComputedRow {
    let design = midpoint_design(10).unwrap();
    let kernel = quartic_kernel();
    let w = WeightDensity::uniform();
    // The default search interval [1.5/n, 0.6] clips the m = 100 projection
    // optimum (h ~ 0.142 < 0.15), so the table runs widen it explicitly.
    let (h, _) = optimal_bandwidth_exact(
        method,
        model,
        &GrowthCurve::M1,
        &kernel,
        &design,
        m,
        &w,
        GRID,
        EDGE,
        Some((0.08, 0.6)),
    )
    .unwrap();
    let r = risk_report(
        method,
        model,
        &GrowthCurve::M1,
        &kernel,
        &design,
        h,
        m,
        &w,
        GRID,
        EDGE,
    )
    .unwrap();
    ComputedRow { m, ibias2: r.ibias2, ivar: r.ivar, imse: r.imse, h }
}

struct TableCheck {
    lines: Vec<String>,
    tolerances_ok: bool,
    imse_order_ok: bool,
    bias_order_ok: bool,
}

fn check_table(model: &CovarianceModel, gm_rows: &[PaperRow; 3], pro_rows: &[PaperRow; 3]) -> TableCheck {
    let mut lines = Vec::new();
    let mut tolerances_ok = true;
    let mut imse_order_ok = true;
    let mut bias_order_ok = true;
    for (gm_paper, pro_paper) in gm_rows.iter().zip(pro_rows) {
        let gm = bench_row(Method::GasserMuller, model, gm_paper.m);
        let pro = bench_row(Method::ProjectionExact, model, pro_paper.m);
        let gm_imse_rel = (gm.imse - gm_paper.imse).abs() / gm_paper.imse;
        let pro_imse_rel = (pro.imse - pro_paper.imse).abs() / pro_paper.imse;
        let gm_h_ok = (gm.h - gm_paper.h).abs() <= 0.03;
        let pro_h_ok = (pro.h - pro_paper.h).abs() <= 0.03;
        let row_tol = gm_imse_rel <= 0.10 && pro_imse_rel <= 0.10 && gm_h_ok && pro_h_ok;
        let row_imse_order = pro.imse < gm.imse;
        let row_bias_order = pro.ibias2 < gm.ibias2;
        tolerances_ok &= row_tol;
        imse_order_ok &= row_imse_order;
        bias_order_ok &= row_bias_order;
        lines.push(format!(
            "  m={:>3}: GM(h={:.3} Ib2={:.4e} Iv={:.4e} I={:.4e}; published Ib2={:.3e} Iv={:.3e}) PRO(h={:.3} Ib2={:.4e} Iv={:.4e} I={:.4e}; published Ib2={:.3e} Iv={:.3e}) | IMSE rel err GM {:.2}% PRO {:.2}% | order IMSE {} bias {}",
            gm.m, gm.h, gm.ibias2, gm.ivar, gm.imse, gm_paper.ibias2, gm_paper.ivar,
            pro.h, pro.ibias2, pro.ivar, pro.imse, pro_paper.ibias2, pro_paper.ivar,
            100.0 * gm_imse_rel, 100.0 * pro_imse_rel,
            if row_imse_order { "ok" } else { "VIOLATED" },
            if row_bias_order { "ok" } else { "VIOLATED" },
        ));
    }
    TableCheck { lines, tolerances_ok, imse_order_ok, bias_order_ok }
}

#[test]
fn criterion_01_table1_wiener() {
    let start = Instant::now();
    let model = CovarianceModel::wiener(1.0);
    let check = check_table(&model, &TABLE1_GM, &TABLE1_PRO);
    let elapsed = start.elapsed().as_secs_f64();
    let all = check.tolerances_ok && check.imse_order_ok && check.bias_order_ok && elapsed < 60.0;
    println!(
        "criterion 1 (Table 1, Wiener): {} [tolerances {}, IMSE ordering {}, bias ordering {}, {:.1}s]",
        if all { "PASS" } else { "FAIL" },
        check.tolerances_ok,
        check.imse_order_ok,
        check.bias_order_ok,
        elapsed
    );
    for l in &check.lines {
        println!("{l}");
    }
    assert!(elapsed < 60.0, "runtime {elapsed:.1}s exceeds 1 minute");
    assert!(check.tolerances_ok, "IMSE/h tolerances violated:\n{}", check.lines.join("\n"));
    assert!(
        check.imse_order_ok && check.bias_order_ok,
        "strict table orderings do not all hold for the exact risks \
         (known limitation, see notes in the test header):\n{}",
        check.lines.join("\n")
    );
}

#[test]
fn criterion_02_table2_ornstein_uhlenbeck() {
    let start = Instant::now();
    let model = CovarianceModel::OrnsteinUhlenbeck { lambda: 1.0, sigma2: 1.0 };
    let check = check_table(&model, &TABLE2_GM, &TABLE2_PRO);
    let elapsed = start.elapsed().as_secs_f64();
    let all = check.tolerances_ok && check.imse_order_ok && check.bias_order_ok && elapsed < 60.0;
    println!(
        "criterion 2 (Table 2, Ornstein-Uhlenbeck): {} [tolerances {}, IMSE ordering {}, bias ordering {}, {:.1}s]",
        if all { "PASS" } else { "FAIL" },
        check.tolerances_ok,
        check.imse_order_ok,
        check.bias_order_ok,
        elapsed
    );
    for l in &check.lines {
        println!("{l}");
    }
    assert!(elapsed < 60.0, "runtime {elapsed:.1}s exceeds 1 minute");
    assert!(check.tolerances_ok, "IMSE/h tolerances violated:\n{}", check.lines.join("\n"));
    assert!(
        check.imse_order_ok && check.bias_order_ok,
        "strict table orderings do not all hold for the exact risks \
         (known limitation, see notes in the test header):\n{}",
        check.lines.join("\n")
    );
}

#[test]
fn criterion_03_closed_form_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(314159);
    let kernel = quartic_kernel();
    let mut worst_w = 0.0f64;
    let mut worst_ou = 0.0f64;
    for case in 0..100 {
        let n = rng.gen_range(5..=200);
        let d = midpoint_design(n).unwrap();
        let x = rng.gen_range(0.02..0.98);
        let h = rng.gen_range(0.05..0.45);
        let sk = ScaledKernel::new(kernel.clone(), x, h, BoundaryMode::None).unwrap();
        let ybar: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();

        let beta = [0.0, 1.0, 2.0][case % 3];
        let model = CovarianceModel::GeneralizedWiener { beta, sigma2: 1.0 };
        let dense = projection_weights(&model, &sk, &d, false)
            .unwrap()
            .estimate(&ybar)
            .unwrap();
        let closed = projection_wiener_closed(beta, &sk, &d, &ybar).unwrap();
        worst_w = worst_w.max((dense - closed).abs());

        let lambda = [0.5, 1.0, 2.0][case % 3];
        let model = CovarianceModel::OrnsteinUhlenbeck { lambda, sigma2: 1.0 };
        let dense = projection_weights(&model, &sk, &d, false)
            .unwrap()
            .estimate(&ybar)
            .unwrap();
        let closed = projection_ou_closed(lambda, &sk, &d, &ybar).unwrap();
        worst_ou = worst_ou.max((dense - closed).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_w < 1e-8 && worst_ou < 1e-8 && elapsed < 30.0;
    println!(
        "criterion 3 (closed-form oracle equivalence): {} [max |diff| Wiener {:.2e}, OU {:.2e}, {:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        worst_w,
        worst_ou,
        elapsed
    );
    assert!(worst_w < 1e-8, "Wiener closed form diverges: {worst_w:.3e}");
    assert!(worst_ou < 1e-8, "OU closed form diverges: {worst_ou:.3e}");
    assert!(elapsed < 30.0, "runtime {elapsed:.1}s exceeds 30 s");
}

#[test]
fn criterion_04_projection_optimality() {
    let kernel = quartic_kernel();
    let models = [
        CovarianceModel::wiener(1.0),
        CovarianceModel::GeneralizedWiener { beta: 1.0, sigma2: 1.0 },
        CovarianceModel::OrnsteinUhlenbeck { lambda: 1.0, sigma2: 1.0 },
    ];
    let mut worst_slack = f64::NEG_INFINITY;
    for model in &models {
        for n in [10usize, 50] {
            let design = midpoint_design(n).unwrap();
            let gram = model.gram(&design);
            for h in [0.1, 0.3] {
                for x in [0.2, 0.5, 0.8] {
                    let sk =
                        ScaledKernel::new(kernel.clone(), x, h, BoundaryMode::CutAndRenormalize)
                            .unwrap();
                    let sigma2 = sigma2_xh(model, &sk).unwrap();
                    let f = representer(model, &sk, &design).unwrap();
                    let residual = |w: &[f64]| {
                        let fw: f64 = f.values.iter().zip(w).map(|(a, b)| a * b).sum();
                        sigma2 - 2.0 * fw + gram.bilinear(w, w).unwrap()
                    };
                    let pro = projection_weights(model, &sk, &design, true).unwrap();
                    let pro_res = residual(&pro.weights);
                    for method in [
                        Method::GasserMuller,
                        Method::PriestleyChao,
                        Method::ChengLin,
                        Method::ProjectionAsymptotic,
                    ] {
                        let sm = build_smoother(
                            method,
                            model,
                            &kernel,
                            &design,
                            x,
                            h,
                            EdgeCorrection::RenormalizeKernel,
                        )
                        .unwrap();
                        let slack = pro_res - residual(&sm.weights);
                        worst_slack = worst_slack.max(slack);
                    }
                }
            }
        }
    }
    let pass = worst_slack <= 1e-10;
    println!(
        "criterion 4 (projection optimality): {} [worst residual excess {:.2e}]",
        if pass { "PASS" } else { "FAIL" },
        worst_slack
    );
    assert!(pass, "a competitor beat the projection residual by {worst_slack:.3e}");
}

#[test]
fn criterion_05_residual_variance_law() {
    let kernel = quartic_kernel();
    // Nonnegativity battery.
    let mut min_resid = f64::INFINITY;
    for model in [
        CovarianceModel::wiener(1.0),
        CovarianceModel::GeneralizedWiener { beta: 1.0, sigma2: 1.0 },
        CovarianceModel::OrnsteinUhlenbeck { lambda: 1.0, sigma2: 1.0 },
    ] {
        for n in [10usize, 20] {
            let d = midpoint_design(n).unwrap();
            for h in [0.1, 0.3] {
                for x in [0.2, 0.5, 0.8] {
                    let sk = ScaledKernel::new(kernel.clone(), x, h, BoundaryMode::None).unwrap();
                    let r = residual_norm2(&model, &sk, &d).unwrap();
                    min_resid = min_resid.min(r);
                }
            }
        }
    }
    // Rate in n at fixed h = 0.3, x = 0.5, Wiener.
    let model = CovarianceModel::wiener(1.0);
    let sk = ScaledKernel::new(kernel.clone(), 0.5, 0.3, BoundaryMode::None).unwrap();
    let ns = [10usize, 20, 40, 80, 160];
    let mut logs = Vec::new();
    for &n in &ns {
        let d = midpoint_design(n).unwrap();
        let r = residual_norm2(&model, &sk, &d).unwrap();
        logs.push(((n as f64).ln(), r.ln()));
    }
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / logs.len() as f64;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / logs.len() as f64;
    let slope = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum::<f64>()
        / logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum::<f64>();
    let pass = min_resid >= -1e-12 && (slope + 2.0).abs() <= 0.3;
    println!(
        "criterion 5 (residual-variance law): {} [min residual {:.2e}, log-log slope {:.3}]",
        if pass { "PASS" } else { "FAIL" },
        min_resid,
        slope
    );
    assert!(min_resid >= -1e-12, "residual variance negative: {min_resid:.3e}");
    assert!((slope + 2.0).abs() <= 0.3, "slope {slope:.3} outside -2 +/- 0.3");
}

#[test]
fn criterion_06_variance_gap_constant() {
    let kernel = quartic_kernel();
    let model = CovarianceModel::wiener(1.0);
    let target = variance_gap_limit(&model, &kernel, 1.0, 0.5).unwrap();
    assert!((target - 5.0 / 84.0).abs() < 1e-12);
    let mut lines = Vec::new();
    let mut final_ratio = f64::NAN;
    for &n in &[20usize, 40, 80, 160] {
        let d = regular_uniform_design(n).unwrap();
        let gram = model.gram(&d);
        let h = (n as f64).powf(-1.0 / 3.0);
        let pro = build_smoother(Method::ProjectionExact, &model, &kernel, &d, 0.5, h, EdgeCorrection::None)
            .unwrap();
        let gm = build_smoother(Method::GasserMuller, &model, &kernel, &d, 0.5, h, EdgeCorrection::None)
            .unwrap();
        let var_pro = gram.bilinear(&pro.weights, &pro.weights).unwrap();
        let var_gm = gram.bilinear(&gm.weights, &gm.weights).unwrap();
        let scaled = (n as f64) * (n as f64) * h * (var_gm - var_pro);
        final_ratio = scaled / target;
        lines.push(format!("  n={n}: n^2 h (VarGM - VarPro) = {scaled:.5} (ratio {final_ratio:.3})"));
    }
    let pass = (final_ratio - 1.0).abs() <= 0.25;
    println!(
        "criterion 6 (variance-gap constant 5/84): {} [ratio at n=160: {:.3}]",
        if pass { "PASS" } else { "FAIL" },
        final_ratio
    );
    for l in lines {
        println!("{l}");
    }
    assert!(pass, "scaled gap at n=160 is {final_ratio:.3}x the limit");
}

#[test]
fn criterion_07_bandwidth_consistency() {
    let consts = asymptotic_constants(
        &CovarianceModel::wiener(1.0),
        &GrowthCurve::M1,
        &quartic_kernel(),
        &WeightDensity::uniform(),
        Some(&|_| 1.0),
    )
    .unwrap();
    // Independent golden-section minimizer of the leading-term objective.
    let golden = |m: usize| {
        let f = |h: f64| asymptotic_imse(&consts, h, m, ImseFlavor::General);
        let (mut a, mut b) = (1e-4, 0.9);
        let gr = (5f64.sqrt() - 1.0) / 2.0;
        let (mut c, mut d) = (b - gr * (b - a), a + gr * (b - a));
        let (mut fc, mut fd) = (f(c), f(d));
        while (b - a).abs() > 1e-10 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = f(d);
            }
        }
        0.5 * (a + b)
    };
    let mut worst_rel = 0.0f64;
    for m in [10usize, 100] {
        let closed = optimal_bandwidth_closed(&consts, m, HoptVariant::Derived).unwrap();
        let numeric = golden(m);
        worst_rel = worst_rel.max((closed - numeric).abs() / numeric);
    }
    let h1 = optimal_bandwidth_closed(&consts, 5, HoptVariant::Derived).unwrap();
    let h8 = optimal_bandwidth_closed(&consts, 40, HoptVariant::Derived).unwrap();
    let scaling_err = (h8 - h1 / 2.0).abs();
    let pass = worst_rel <= 0.01 && scaling_err < 1e-12;
    println!(
        "criterion 7 (bandwidth consistency): {} [closed vs numeric rel err {:.2e}, scaling err {:.1e}]",
        if pass { "PASS" } else { "FAIL" },
        worst_rel,
        scaling_err
    );
    assert!(worst_rel <= 0.01);
    assert!(scaling_err < 1e-12, "h*(8m) != h*(m)/2: err {scaling_err:.3e}");
}

#[test]
fn criterion_08_kernel_constants() {
    let k = quartic_kernel();
    let m = k.moments();
    let b_err = (m.b - 1.0 / 7.0).abs();
    let a_err = (m.a - 5.0 / 7.0).abs();
    // Independent 2-D trapezoid oracle for C_K on a 4096^2 grid.
    let n = 4096usize;
    let step = 2.0 / n as f64;
    let kv: Vec<f64> = (0..=n)
        .map(|i| {
            let u = -1.0 + i as f64 * step;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * k.eval(u) * step
        })
        .collect();
    let mut ck_oracle = 0.0;
    for i in 0..=n {
        let u = -1.0 + i as f64 * step;
        let mut inner = 0.0;
        for (j, kvj) in kv.iter().enumerate() {
            let v = -1.0 + j as f64 * step;
            inner += (u - v).abs() * kvj;
        }
        ck_oracle += kv[i] * inner;
    }
    let ck_err = (m.c_k - ck_oracle).abs();
    let pass = b_err < 1e-10 && a_err < 1e-10 && ck_err < 1e-6;
    println!(
        "criterion 8 (kernel constants): {} [B err {:.1e}, A err {:.1e}, C_K vs trapezoid {:.1e}]",
        if pass { "PASS" } else { "FAIL" },
        b_err,
        a_err,
        ck_err
    );
    assert!(b_err < 1e-10, "B = {}", m.b);
    assert!(a_err < 1e-10, "A = {}", m.a);
    assert!(ck_err < 1e-6, "C_K = {} vs oracle {}", m.c_k, ck_oracle);
}

#[test]
fn criterion_09_monte_carlo_coherence() {
    // (a) Empirical MISE vs exact IMSE at the Table-1 m=10 projection row.
    let model = CovarianceModel::wiener(1.0);
    let kernel = quartic_kernel();
    let design = midpoint_design(10).unwrap();
    let (h, exact_imse) = optimal_bandwidth_exact(
        Method::ProjectionExact,
        &model,
        &GrowthCurve::M1,
        &kernel,
        &design,
        10,
        &WeightDensity::uniform(),
        GRID,
        EDGE,
        None,
    )
    .unwrap();
    let scenario = Scenario {
        curve: GrowthCurve::M1,
        model: model.clone(),
        n: 10,
        m: 10,
        design: DesignKind::Midpoint,
        kernel: kernel.clone(),
        bandwidth: BandwidthChoice::Fixed(h),
        replications: 500,
        seed: RECORDED_SEED,
    };
    let run = monte_carlo_mise(&scenario, Method::ProjectionExact, h, EDGE, GRID).unwrap();
    let se = run.standard_error();
    let gap = (run.empirical_mise - exact_imse).abs();
    let mise_ok = gap <= 3.0 * se;

    // (b) Normality diagnostic at m = n = 200, 1000 replications.
    let nscenario = Scenario {
        curve: GrowthCurve::M1,
        model,
        n: 200,
        m: 200,
        design: DesignKind::Midpoint,
        kernel,
        bandwidth: BandwidthChoice::OptimalExact, // resolves to m^{-1/3}
        replications: 1000,
        seed: RECORDED_SEED,
    };
    let report = normality_diagnostic(&nscenario, 0.5, EDGE).unwrap();
    let pass = mise_ok && report.pass;
    println!(
        "criterion 9 (Monte Carlo coherence): {} [emp MISE {:.4e} vs exact {:.4e}, gap {:.2e} <= 3se {:.2e}; KS {:.4} < {:.4} seed {}]",
        if pass { "PASS" } else { "FAIL" },
        run.empirical_mise,
        exact_imse,
        gap,
        3.0 * se,
        report.statistic,
        report.threshold,
        RECORDED_SEED
    );
    assert!(mise_ok, "empirical MISE {:.4e} deviates from exact {exact_imse:.4e} by more than 3 se", run.empirical_mise);
    assert!(report.pass, "KS statistic {:.4} >= {:.4}", report.statistic, report.threshold);
}

#[test]
fn criterion_10_determinism() {
    use rksmooth::cli::{cmd_bench, cmd_estimate, cmd_figure, Options};
    use std::io::Write;

    let opts = Options::default();
    let mut bench_cfg = tempfile::NamedTempFile::new().unwrap();
    write!(
        bench_cfg,
        r#"{{"blocks": [{{"name": "wiener", "model": {{"kind": "wiener", "params": {{"sigma2": 1.0}}}},
            "curve": "M1", "n": 10, "m_list": [10], "methods": ["gm", "pro"]}}]}}"#
    )
    .unwrap();
    let out1 = tempfile::NamedTempFile::new().unwrap();
    let out2 = tempfile::NamedTempFile::new().unwrap();
    cmd_bench(bench_cfg.path(), out1.path(), &opts).unwrap();
    cmd_bench(bench_cfg.path(), out2.path(), &opts).unwrap();
    let bench_same = std::fs::read(out1.path()).unwrap() == std::fs::read(out2.path()).unwrap();

    let mut scen_cfg = tempfile::NamedTempFile::new().unwrap();
    write!(
        scen_cfg,
        r#"{{"curve": "M1", "model": {{"kind": "wiener", "params": {{"sigma2": 0.5}}}},
            "n": 50, "m": 5, "h": 0.2, "replications": 10, "seed": 99}}"#
    )
    .unwrap();
    let e1 = tempfile::NamedTempFile::new().unwrap();
    let e2 = tempfile::NamedTempFile::new().unwrap();
    cmd_estimate(scen_cfg.path(), "pro", None, e1.path(), &opts).unwrap();
    cmd_estimate(scen_cfg.path(), "pro", None, e2.path(), &opts).unwrap();
    let estimate_same = std::fs::read(e1.path()).unwrap() == std::fs::read(e2.path()).unwrap();

    let mut fig_cfg = tempfile::NamedTempFile::new().unwrap();
    write!(
        fig_cfg,
        r#"{{"curve": "M1", "model": {{"kind": "wiener", "params": {{"sigma2": 0.5}}}},
            "n": 50, "m": 5, "h": 0.2, "replications": 10, "seed": 99, "m_list": [5, 20]}}"#
    )
    .unwrap();
    let f1 = tempfile::NamedTempFile::new().unwrap();
    let f2 = tempfile::NamedTempFile::new().unwrap();
    cmd_figure(fig_cfg.path(), f1.path(), &opts).unwrap();
    cmd_figure(fig_cfg.path(), f2.path(), &opts).unwrap();
    let figure_same = std::fs::read(f1.path()).unwrap() == std::fs::read(f2.path()).unwrap();

    let pass = bench_same && estimate_same && figure_same;
    println!(
        "criterion 10 (determinism): {} [bench {}, estimate {}, figure {}]",
        if pass { "PASS" } else { "FAIL" },
        bench_same,
        estimate_same,
        figure_same
    );
    assert!(bench_same, "bench output differs between runs");
    assert!(estimate_same, "estimate output differs between runs");
    assert!(figure_same, "figure output differs between runs");
}
