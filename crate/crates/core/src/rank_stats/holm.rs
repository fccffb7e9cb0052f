use crate::error::{Error, Result};

/// Holm's step-down adjustment. Output is in input order.
pub fn holm_adjust(p: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::OutOfRange(bad));
    }
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        running = running.max((m - rank) as f64 * p[i]);
        adjusted[i] = running.min(1.0);
    }
    Ok(adjusted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(holm_adjust(&[0.04]).unwrap(), vec![0.04]);
        let adj = holm_adjust(&[0.01, 0.04, 0.03]).unwrap();
        let expected = [0.03, 0.06, 0.06];
        for (a, e) in adj.iter().zip(expected) {
            assert!((a - e).abs() < 1e-15, "{adj:?}");
        }
        assert_eq!(holm_adjust(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        assert!(holm_adjust(&[]).unwrap().is_empty());
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(holm_adjust(&[0.5, 1.5]), Err(Error::OutOfRange(v)) if v == 1.5));
        assert!(holm_adjust(&[f64::NAN]).is_err());
    }
}
