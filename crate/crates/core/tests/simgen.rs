use rankscope_core::simgen::generate_random;
use rankscope_core::SimSpec;

/// Mean and variance of `logistic(X)`, `X ~ N(1.5, 1)`, by the trapezoid rule.
fn logistic_normal_moments() -> (f64, f64) {
    let (mu, steps, half_width) = (1.5, 20_000, 10.0);
    let h = 2.0 * half_width / steps as f64;
    let (mut m1, mut m2) = (0.0, 0.0);
    for i in 0..=steps {
        let z = -half_width + i as f64 * h;
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 } * h * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let v = 1.0 / (1.0 + (-(mu + z)).exp());
        m1 += w * v;
        m2 += w * v * v;
    }
    (m1, m2 - m1 * m1)
}

fn pooled_columns(tasks: usize) -> Vec<Vec<f64>> {
    let d = generate_random(&SimSpec { tasks, ..SimSpec::random(31) }).unwrap();
    let mut cols = vec![Vec::new(); 5];
    for t in &d.tasks {
        for (a, col) in cols.iter_mut().enumerate() {
            col.extend(t.column(a).into_iter().flatten());
        }
    }
    cols
}

#[test]
fn random_values_match_logistic_normal_moments() {
    let (mean, var) = logistic_normal_moments();
    let all: Vec<f64> = pooled_columns(200).concat();
    let n = all.len() as f64;
    let m = all.iter().sum::<f64>() / n;
    let v = all.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    // 50,000 draws: standard error of the mean is about 7e-4
    assert!((m - mean).abs() < 0.004, "mean {m} vs {mean}");
    assert!((v - var).abs() < 0.002, "variance {v} vs {var}");
}

fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn random_algorithms_are_exchangeable() {
    let cols = pooled_columns(40);
    let n = cols[0].len() as f64;
    // two-sample KS critical value at alpha = 0.001
    let critical = 1.95 * (2.0 / n).sqrt();
    for a in 0..5 {
        for b in a + 1..5 {
            let d = ks_statistic(&cols[a], &cols[b]);
            assert!(d < critical, "A{} vs A{}: D = {d}", a + 1, b + 1);
        }
    }
}
