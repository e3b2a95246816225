//! Acceptance checks, one PASS/FAIL line each. Runs as a plain binary so the
//! lines always show in `cargo test` output.

use std::time::Instant;

use chrono::{Days, NaiveDate};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clickbait_its::detector::{loss_and_gradient, train_logistic, TrainParams};
use clickbait_its::diagnostics::{acf, adf_test, kpss_test, pacf, AdfRegression, Bandwidth, KpssNull, LagOrder};
use clickbait_its::its::{
    ar_profile_loglik, bonferroni_alpha, build_design, fit_gls_ar, flag_p_value, ols_fit,
    pacf_to_ar, EventSpec, GlsOptions, Significance, TimeIndex,
};
use clickbait_its::report::{
    cmd_aggregate, cmd_ingest, cmd_report, fit_report_csv, format_thousands, PipelineConfig,
};
use clickbait_its::text::normalize_whitespace;
use clickbait_its::sim::{ar_process, random_walk, segmented_response, white_noise, SegmentedTruth};
use clickbait_its::{DailySeries, Detector, ModelWeights, ScoreStore, SegmentedDesign};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn series_from(values: Vec<f64>) -> DailySeries {
    let start = NaiveDate::from_ymd_opt(2016, 9, 2).unwrap();
    let n = values.len();
    let dates = (0..n as u64).map(|i| start + Days::new(i)).collect();
    DailySeries::new(dates, values, vec![1; n]).unwrap()
}

fn design_for(values: Vec<f64>, event_index: usize) -> SegmentedDesign {
    let series = series_from(values);
    let event = EventSpec::new("event", series.dates[event_index]);
    build_design(&series, &event, TimeIndex::Observation).unwrap()
}

// Reference event fits: (p-value, Sig?) for T, D, P of each event.
const REFERENCE_FLAGS: [(f64, &str); 15] = [
    (0.9441, "N"), (0.9863, "N"), (0.9592, "N"),
    (0.0098, "Y"), (0.5141, "N"), (0.0040, "Y"),
    (0.0026, "Y"), (0.8616, "N"), (0.0042, "Y"),
    (0.0050, "Y"), (0.5285, "N"), (0.0026, "Y"),
    (0.2349, "N"), (0.9007, "N"), (0.4835, "N"),
];

fn reference_layout() -> Outcome {
    // Reference figures pushed through the formatters.
    let n = format_thousands(451_033_388);
    let alpha = bonferroni_alpha(0.05, 5).unwrap();
    let fit = clickbait_its::GlsFit {
        event: EventSpec::new("COVID-19 WHO PHEIC Declaration", NaiveDate::from_ymd_opt(2020, 1, 30).unwrap()),
        terms: ["(Intercept)", "T", "D", "P"].iter().map(|s| s.to_string()).collect(),
        coefficients: vec![0.3, -0.000017, -0.003721, 0.000030],
        std_errors: vec![0.01, 0.000006, 0.005701, 0.000010],
        t_values: vec![30.0, -2.5897, -0.6527, 2.8847],
        p_values: vec![0.0, 0.0098, 0.5141, 0.0040],
        significance: [0.0, 0.0098, 0.5141, 0.0040].iter().map(|&p| flag_p_value(p, alpha)).collect(),
        alpha,
        ar: clickbait_its::ArCoefficients { phi: vec![0.0; 16], sigma2: 1.0 },
        log_likelihood: 0.0,
        aic: -4267.353,
        nobs: 708,
        df: 704,
        converged: true,
        iterations: 0,
        gradient_norm: 0.0,
    };
    let csv = fit_report_csv(&fit);
    let expected = [
        "# COVID-19 WHO PHEIC Declaration, Jan. 30, 2020 AIC = -4267.353, ARMA(p=16, q= 0)",
        "term,value,std_error,t_value,p_value,sig",
        "T,-0.000017,0.000006,-2.5897,0.0098,Y",
        "D,-0.003721,0.005701,-0.6527,0.5141,N",
        "P,0.000030,0.000010,2.8847,0.0040,Y",
    ];
    let lines: Vec<&str> = csv.lines().collect();
    let pass = n == "451,033,388" && lines == expected;
    outcome(
        pass,
        "full crawl not available; summary and fit table layouts reproduced from reference values",
    )
}

fn bonferroni() -> Outcome {
    let alpha = bonferroni_alpha(0.05, 5).unwrap();
    let flags: Vec<Significance> = REFERENCE_FLAGS.iter().map(|(p, _)| flag_p_value(*p, alpha)).collect();
    let matches = flags.iter().zip(&REFERENCE_FLAGS).all(|(f, (_, s))| f.to_string() == *s);
    let yes = flags.iter().filter(|f| f.is_significant()).count();
    outcome(
        alpha == 0.01 && matches && yes == 6,
        format!("alpha = {alpha}; {} N / {yes} Y; column matches: {matches}", 15 - yes),
    )
}

fn gls_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let n = rng.random_range(20..=200);
        let k = rng.random_range(4..n - 4);
        let truth = SegmentedTruth {
            intercept: rng.random_range(-1.0..1.0),
            trend: rng.random_range(-0.01..0.01),
            step: rng.random_range(-1.0..1.0),
            slope_change: rng.random_range(-0.01..0.01),
        };
        let sd = rng.random_range(0.01..2.0);
        let d = design_for(segmented_response(truth, k, &white_noise(n, sd, seed)), k);
        let ols = ols_fit(&d).unwrap();
        let gls = fit_gls_ar(&d, 0, &GlsOptions::default()).unwrap();
        for (a, b) in ols.coefficients.iter().zip(&gls.coefficients) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    outcome(worst < 1e-10, format!("100 designs; max coefficient difference {worst:.2e}"))
}

fn ar_autocov(phi: &[f64], n: usize) -> Vec<f64> {
    let p = phi.len();
    let mut a = DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut b = DVector::<f64>::zeros(p + 1);
    b[0] = 1.0;
    for k in 0..=p {
        a[(k, k)] += 1.0;
        for j in 1..=p {
            a[(k, k.abs_diff(j))] -= phi[j - 1];
        }
    }
    let mut gamma: Vec<f64> = a.lu().solve(&b).unwrap().iter().copied().collect();
    for k in p + 1..n {
        gamma.push((1..=p).map(|j| phi[j - 1] * gamma[k - j]).sum());
    }
    gamma
}

fn dense_loglik(d: &SegmentedDesign, phi: &[f64]) -> f64 {
    let n = d.len();
    let gamma = ar_autocov(phi, n);
    let r = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
    let l = r.cholesky().unwrap().l();
    let cols = d.columns();
    let x = DMatrix::from_fn(n, 4, |i, j| cols[j][i]);
    let y = DVector::from_vec(d.response.clone());
    let xt = l.solve_lower_triangular(&x).unwrap();
    let yt = l.solve_lower_triangular(&y).unwrap();
    let beta = (xt.transpose() * &xt).lu().solve(&(xt.transpose() * &yt)).unwrap();
    let e = &yt - &xt * beta;
    let rss = e.dot(&e);
    let log_det = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let nf = n as f64;
    -0.5 * nf * ((2.0 * std::f64::consts::PI).ln() + (rss / nf).ln() + 1.0) - 0.5 * log_det
}

fn likelihood_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for draw in 0..50u64 {
        let p = 1 + (draw % 2) as usize;
        let n = rng.random_range(15..=50);
        let k = rng.random_range(4..n - 4);
        let d = design_for(white_noise(n, 0.5, 1000 + draw), k);
        let kappa: Vec<f64> = (0..p).map(|_| rng.random_range(-0.95..0.95)).collect();
        let phi = pacf_to_ar(&kappa);
        let ours = ar_profile_loglik(&d, &phi).unwrap().log_likelihood;
        worst = worst.max((ours - dense_loglik(&d, &phi)).abs());
    }
    outcome(worst < 1e-8, format!("50 draws, p in {{1,2}}; max |difference| {worst:.2e}"))
}

fn recovery() -> Outcome {
    let truth = SegmentedTruth { intercept: 1.0, trend: 0.01, step: 0.5, slope_change: 0.0 };
    let beta = truth.as_array();
    let (mut covered, mut phi_ok) = (0, 0);
    for seed in 0..100u64 {
        let errors = ar_process(&[0.7], 0.1, 700, 5000 + seed);
        let d = design_for(segmented_response(truth, 350, &errors), 350);
        let fit = fit_gls_ar(&d, 1, &GlsOptions::default()).unwrap();
        if (0..4).all(|i| (fit.coefficients[i] - beta[i]).abs() <= 3.0 * fit.std_errors[i]) {
            covered += 1;
        }
        if (0.6..=0.8).contains(&fit.ar.phi[0]) {
            phi_ok += 1;
        }
    }
    outcome(
        covered >= 90 && phi_ok >= 90,
        format!("true beta within 3 SE in {covered}/100; phi in [0.6, 0.8] in {phi_ok}/100"),
    )
}

fn aic_ordering() -> Outcome {
    let n = 300;
    let k = 150;
    let truth = SegmentedTruth { intercept: 0.3, trend: 0.0001, step: 0.02, slope_change: 0.0 };
    let kappa = [0.5, -0.3, 0.25, -0.2, 0.2, -0.15, 0.15, -0.1, 0.1, -0.1, 0.1, -0.1, 0.1, -0.1, 0.15, 0.4];
    let phi16 = pacf_to_ar(&kappa);
    let (mut white_ok, mut ar_ok) = (0, 0);
    let options = GlsOptions::default();
    for seed in 0..100u64 {
        let d = design_for(segmented_response(truth, k, &white_noise(n, 0.02, 7000 + seed)), k);
        let a0 = fit_gls_ar(&d, 0, &options).unwrap().aic;
        let a16 = fit_gls_ar(&d, 16, &options).map_or_else(|e| best_aic(e), |f| f.aic);
        if a0 < a16 {
            white_ok += 1;
        }
        let d = design_for(segmented_response(truth, k, &ar_process(&phi16, 0.02, n, 8000 + seed)), k);
        let a0 = fit_gls_ar(&d, 0, &options).unwrap().aic;
        let a16 = fit_gls_ar(&d, 16, &options).map_or_else(|e| best_aic(e), |f| f.aic);
        if a16 < a0 {
            ar_ok += 1;
        }
    }
    outcome(
        white_ok >= 90 && ar_ok >= 90,
        format!("white noise prefers p=0 in {white_ok}/100; AR(16) prefers p=16 in {ar_ok}/100"),
    )
}

fn best_aic(e: clickbait_its::Error) -> f64 {
    match e {
        clickbait_its::Error::NotConverged { best, .. } => best.aic,
        other => panic!("fit failed: {other}"),
    }
}

fn toeplitz_pacf(r: &[f64], lag: usize) -> f64 {
    let m = DMatrix::from_fn(lag, lag, |i, j| r[i.abs_diff(j)]);
    let rhs = DVector::from_fn(lag, |i, _| r[i + 1]);
    m.lu().solve(&rhs).unwrap()[lag - 1]
}

fn durbin_levinson_vs_toeplitz() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let series = match seed % 3 {
            0 => white_noise(200, 1.0, seed),
            1 => ar_process(&[0.6, -0.2], 1.0, 200, seed),
            _ => ar_process(&[0.9], 1.0, 200, seed),
        };
        let r = acf(&series, 20).unwrap().coefficients;
        let dl = pacf(&series, 20).unwrap();
        for (i, lag) in dl.lags.iter().enumerate() {
            worst = worst.max((dl.coefficients[i] - toeplitz_pacf(&r, *lag)).abs());
        }
    }
    outcome(worst < 1e-10, format!("100 series, lags 1..20; max |difference| {worst:.2e}"))
}

fn stationarity_direction() -> Outcome {
    let n = 500;
    let (mut adf_wn, mut adf_rw, mut kpss_wn, mut kpss_rw) = (0, 0, 0, 0);
    for seed in 0..200u64 {
        let wn = white_noise(n, 1.0, 9000 + seed);
        let rw = random_walk(n, 1.0, 9500 + seed);
        if adf_test(&wn, AdfRegression::Constant, LagOrder::Auto).unwrap().reject_null {
            adf_wn += 1;
        }
        if !adf_test(&rw, AdfRegression::Constant, LagOrder::Auto).unwrap().reject_null {
            adf_rw += 1;
        }
        if !kpss_test(&wn, KpssNull::Level, Bandwidth::Auto).unwrap().reject_null {
            kpss_wn += 1;
        }
        if kpss_test(&rw, KpssNull::Level, Bandwidth::Auto).unwrap().reject_null {
            kpss_rw += 1;
        }
    }
    // Stationary AR(1) errors around a segmented mean: mean-reverting, yet not
    // level-stationary, so the two tests disagree.
    let truth = SegmentedTruth { intercept: 0.33, trend: -0.000025, step: 0.0, slope_change: 0.00005 };
    let fixture = segmented_response(truth, 300, &ar_process(&[0.3], 0.02, 708, 77));
    let adf = adf_test(&fixture, AdfRegression::Constant, LagOrder::Auto).unwrap();
    let kpss = kpss_test(&fixture, KpssNull::Level, Bandwidth::Auto).unwrap();
    let opposition = adf.reject_null && kpss.reject_null;
    // Plain AR(1) around a constant: both tests agree on stationarity.
    let calm: Vec<f64> = ar_process(&[0.3], 0.02, 708, 78).iter().map(|e| 0.33 + e).collect();
    let agree = adf_test(&calm, AdfRegression::Constant, LagOrder::Auto).unwrap().reject_null
        && !kpss_test(&calm, KpssNull::Level, Bandwidth::Auto).unwrap().reject_null;
    // KPSS mirrors ADF: 95% on the alternative side, 90% on its own null.
    outcome(
        adf_wn >= 190 && adf_rw >= 180 && kpss_rw >= 190 && kpss_wn >= 180 && opposition && agree,
        format!(
            "ADF rejects on white noise {adf_wn}/200, keeps on random walks {adf_rw}/200; \
             KPSS rejects on random walks {kpss_rw}/200, keeps on white noise {kpss_wn}/200; \
             fixture ADF {:.3} KPSS {:.3}, opposition: {opposition}; stationary agreement: {agree}",
            adf.statistic, kpss.statistic
        ),
    )
}

const WORDS: [&str; 24] = [
    "you", "won't", "believe", "what", "happened", "next", "senate", "passes", "the", "bill",
    "10", "things", "WHY", "is", "this", "café", "über", "新闻", "!!!", "???", "top", "5", "ways", "–",
];

/// Random whitespace-normalized headline of at least one word, the scoring
/// precondition.
fn fuzz_headline(rng: &mut ChaCha8Rng) -> String {
    loop {
        let words = rng.random_range(1..20);
        let mut out = String::new();
        for _ in 0..words {
            if rng.random_bool(0.2) {
                let len = rng.random_range(1..8);
                for _ in 0..len {
                    let c = char::from_u32(rng.random_range(0x21..0x3000)).unwrap_or('x');
                    out.push(c);
                }
            } else {
                out.push_str(WORDS[rng.random_range(0..WORDS.len())]);
            }
            out.push(if rng.random_bool(0.9) { ' ' } else { '\t' });
        }
        let normalized = normalize_whitespace(&out);
        if !normalized.is_empty() {
            return normalized;
        }
    }
}

fn detector_contract() -> Outcome {
    let detector = Detector::default();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut bad = 0;
    for _ in 0..100_000 {
        let text = fuzz_headline(&mut rng);
        let Ok((_, s)) = detector.score_text(&text) else {
            bad += 1;
            continue;
        };
        if !(0.0..=1.0).contains(&s.score_1) || (s.score_1 + s.score_2 - 1.0).abs() > 1e-12 {
            bad += 1;
        }
    }

    // Analytic gradient against central differences at a random point.
    let features: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..12).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let labels: Vec<bool> = (0..40).map(|_| rng.random_bool(0.5)).collect();
    let mut model = ModelWeights::zeros("lexical-12-v1", 12);
    model.bias = 0.3;
    for w in &mut model.weights {
        *w = rng.random_range(-1.0..1.0);
    }
    let l2 = 0.01;
    let (_, gb, g) = loss_and_gradient(&model, &features, &labels, l2);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for i in 0..=12 {
        let (mut up, mut down) = (model.clone(), model.clone());
        if i == 12 {
            up.bias += h;
            down.bias -= h;
        } else {
            up.weights[i] += h;
            down.weights[i] -= h;
        }
        let fd = (loss_and_gradient(&up, &features, &labels, l2).0
            - loss_and_gradient(&down, &features, &labels, l2).0)
            / (2.0 * h);
        let analytic = if i == 12 { gb } else { g[i] };
        worst = worst.max((fd - analytic).abs());
    }

    // Separable toy corpus.
    let corpus: Vec<(String, bool)> = [
        ("You Won't Believe These 10 Things!", true),
        ("What Happened Next Will Shock You", true),
        ("This Is Why You Need To Try It", true),
        ("Top 5 Ways You Can Save Money!", true),
        ("You Need To See These 7 Photos", true),
        ("Here's Why Your Phone Is Slow", true),
        ("Senate approves annual budget", false),
        ("Central bank holds rates steady", false),
        ("Flooding closes highway near Dayton", false),
        ("Court rules on zoning dispute", false),
        ("Exports decline in third quarter", false),
        ("Council names new transit director", false),
    ]
    .iter()
    .map(|(t, l)| (t.to_string(), *l))
    .collect();
    let params = TrainParams { learning_rate: 0.1, iterations: 5000, l2: 1e-3 };
    let trained = train_logistic(&detector.extractor, &corpus, params).unwrap();
    let toy = Detector::new(detector.extractor.clone(), trained.weights).unwrap();
    let correct = corpus
        .iter()
        .filter(|(t, l)| (toy.score_text(t).unwrap().1.score_1 >= 0.5) == *l)
        .count();
    outcome(
        bad == 0 && worst < 1e-6 && correct == corpus.len(),
        format!(
            "{bad} contract violations in 100000 fuzzed headlines; gradient error {worst:.2e}; \
             toy accuracy {correct}/{}",
            corpus.len()
        ),
    )
}

fn fixture_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/crawl.warc")
}

fn run_fixture(dir: &std::path::Path) -> (usize, DailySeries, Vec<(String, Vec<u8>)>) {
    let config = PipelineConfig { store_path: dir.join("scores.sqlite"), ..PipelineConfig::default() };
    let detector = Detector::default();
    let report = cmd_ingest(&[fixture_path()], &config, &detector).unwrap();
    let out = dir.join("reports");
    let series = cmd_aggregate(&config, &out).unwrap();
    cmd_report(&config, &out).unwrap();
    ScoreStore::open(&config.store_path).unwrap().export_csv(&out.join("rows.csv")).unwrap();
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    (report.rows_stored, series, files)
}

fn end_to_end() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (rows, series, files_a) = run_fixture(a.path());
    let (_, _, files_b) = run_fixture(b.path());

    // Hand count: 8 qualifying texts on Tuesday 2020-01-28, 6 on Friday 2020-01-31.
    let detector = Detector::default();
    let mean = |texts: &[&str]| {
        texts.iter().map(|t| detector.score_text(t).unwrap().1.score_1).sum::<f64>() / texts.len() as f64
    };
    let tuesday = [
        "Senate Passes the Budget Bill",
        "You Won't Believe What Happened Next",
        "Ten Things You Need to Know",
        "Storm hits the coast tonight",
        "Café owners rally in the city",
        "Why the market fell on Friday",
        "Top 10 tips for the summer",
        "Top 10 tips for the summer",
    ];
    let friday = [
        "This video will change your mind",
        "Election results are in",
        "New Rules for the Road",
        "What is the best diet?",
        "How to save money on groceries",
        "Police arrest a suspect in the robbery",
    ];
    let dates_ok = series.dates
        == [NaiveDate::from_ymd_opt(2020, 1, 28).unwrap(), NaiveDate::from_ymd_opt(2020, 1, 31).unwrap()];
    let counts_ok = series.counts == [8, 6];
    let means_ok = dates_ok
        && (series.means[0] - mean(&tuesday)).abs() < 1e-12
        && (series.means[1] - mean(&friday)).abs() < 1e-12;
    let identical = files_a == files_b && !files_a.is_empty();
    outcome(
        rows == 14 && counts_ok && means_ok && identical,
        format!(
            "{rows} rows stored; daily counts {:?}; means match hand oracle: {means_ok}; \
             {} report files byte-identical across runs: {identical}",
            series.counts,
            files_a.len()
        ),
    )
}

fn throughput() -> Outcome {
    let detector = Detector::default();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let pool = [
        "You Won't Believe What Happened Next",
        "Senate passes the annual budget bill after long debate",
        "10 Things Nobody Tells You About Moving Abroad",
        "Storm leaves thousands without power in the region",
        "This Is Why Your Phone Battery Dies So Fast",
        "Central bank holds interest rates steady for a third month",
    ];
    let headlines: Vec<String> = (0..200_000)
        .map(|i| format!("{} {}", pool[rng.random_range(0..pool.len())], i % 97))
        .collect();
    let start = Instant::now();
    let mut checksum = 0.0;
    for h in &headlines {
        checksum += detector.score_text(h).unwrap().1.score_1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    let rate = headlines.len() as f64 / elapsed;
    outcome(
        rate >= 20_000.0 && checksum.is_finite(),
        format!("{:.0} headlines/s on one thread", rate),
    )
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("full-scale results (layout only)", reference_layout),
        ("Bonferroni logic and reference flags", bonferroni),
        ("GLS reduction to OLS", gls_reduction),
        ("likelihood oracle", likelihood_oracle),
        ("recovery Monte Carlo", recovery),
        ("AIC ordering", aic_ordering),
        ("Durbin-Levinson vs Toeplitz PACF", durbin_levinson_vs_toeplitz),
        ("stationarity test direction", stationarity_direction),
        ("detector contract", detector_contract),
        ("end-to-end WARC fixture", end_to_end),
        ("throughput", throughput),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let result = check();
        let status = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failures += 1;
        }
        println!(
            "[{status}] {name}: {} ({:.1}s)",
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance check(s) failed");
        std::process::exit(1);
    }
    println!("all acceptance checks passed");
}
