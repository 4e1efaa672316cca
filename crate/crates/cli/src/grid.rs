//! Grid syntax shared by the sweep flags: either an explicit comma list
//! (`1.05,1.2,1.5`) or a range `start:stop:count:kind` with kind one of
//! `lin`, `log`, `log1p`. `log1p` spaces `x - 1` logarithmically, which
//! is the natural scale for epsilon grids that crowd toward 1.

use anyhow::{bail, ensure, Context, Result};

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    ensure!(!spec.is_empty(), "empty grid specification");
    if spec.contains(':') {
        parse_range(spec)
    } else {
        spec.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad grid value {tok:?}"))
            })
            .collect()
    }
}

fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    ensure!(
        parts.len() == 4,
        "range grids are start:stop:count:kind, got {spec:?}"
    );
    let start: f64 = parts[0].trim().parse().context("bad range start")?;
    let stop: f64 = parts[1].trim().parse().context("bad range stop")?;
    let count: usize = parts[2].trim().parse().context("bad range count")?;
    ensure!(count >= 2, "range grids need at least 2 points");
    ensure!(start.is_finite() && stop.is_finite() && start < stop,
        "range bounds must be finite with start < stop");
    let kind = parts[3].trim();
    let n = (count - 1) as f64;
    let grid = match kind {
        "lin" => (0..count)
            .map(|i| start + (stop - start) * i as f64 / n)
            .collect(),
        "log" => {
            ensure!(start > 0.0, "log grids need start > 0");
            let (a, b) = (start.ln(), stop.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / n).exp())
                .collect()
        }
        "log1p" => {
            ensure!(start > 1.0, "log1p grids need start > 1");
            let (a, b) = ((start - 1.0).ln(), (stop - 1.0).ln());
            (0..count)
                .map(|i| 1.0 + (a + (b - a) * i as f64 / n).exp())
                .collect()
        }
        other => bail!("unknown grid kind {other:?} (expected lin, log, or log1p)"),
    };
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn explicit_list() {
        assert_eq!(parse_grid("1.05, 1.2,1.5").unwrap(), vec![1.05, 1.2, 1.5]);
        assert_eq!(parse_grid("0.25").unwrap(), vec![0.25]);
    }

    #[test]
    fn linear_range() {
        let g = parse_grid("0:1:5:lin").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn log_range_endpoints() {
        let g = parse_grid("0.01:10:50:log").unwrap();
        assert_eq!(g.len(), 50);
        assert_relative_eq!(g[0], 0.01, max_relative = 1e-12);
        assert_relative_eq!(g[49], 10.0, max_relative = 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn log1p_range_crowds_toward_one() {
        let g = parse_grid("1.001:2:60:log1p").unwrap();
        assert_eq!(g.len(), 60);
        assert_relative_eq!(g[0], 1.001, max_relative = 1e-12);
        assert_relative_eq!(g[59], 2.0, max_relative = 1e-12);
        // log spacing in (eps - 1): constant ratio between successive offsets
        let r0 = (g[1] - 1.0) / (g[0] - 1.0);
        let r1 = (g[31] - 1.0) / (g[30] - 1.0);
        assert_relative_eq!(r0, r1, max_relative = 1e-9);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:2:1:lin").is_err());
        assert!(parse_grid("2:1:5:lin").is_err());
        assert!(parse_grid("1:2:5:cubic").is_err());
        assert!(parse_grid("0:2:5:log").is_err());
        assert!(parse_grid("1:2:5:log1p").is_err());
        assert!(parse_grid("a,b").is_err());
    }
}
