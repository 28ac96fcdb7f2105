//! Timing of single dynamic updates against full solves.

use std::time::Instant;

use serde::Serialize;

use crate::dynamic::Engine;
use crate::generate::{random_instance, random_op, rng, GenParams};
use crate::solver::solve;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BenchPoint {
    pub n: usize,
    pub m: usize,
    pub r: u32,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub r: u32,
    pub update_us: f64,
    pub solve_us: f64,
}

impl BenchRow {
    pub fn ratio(&self) -> f64 {
        self.update_us / self.solve_us
    }

    pub fn csv(&self) -> String {
        format!("{},{},{},{:.1},{:.1}", self.n, self.m, self.r, self.update_us, self.solve_us)
    }
}

pub const CSV_HEADER: &str = "n,m,r,update_us,solve_us";

/// Parses `N,M,R` points separated by `;`.
pub fn parse_grid(spec: &str) -> Result<Vec<BenchPoint>, String> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|point| {
            let f: Vec<&str> = point.split(',').map(str::trim).collect();
            let [n, m, r] = f.as_slice() else {
                return Err(format!("grid point `{point}` is not N,M,R"));
            };
            let num = |s: &str| s.parse::<usize>().map_err(|_| format!("`{s}` is not a number"));
            let r = num(r)?;
            if r == 0 {
                return Err("rank bound must be at least 1".into());
            }
            Ok(BenchPoint { n: num(n)?, m: num(m)?, r: r as u32 })
        })
        .collect()
}

/// Mean wall time of `reps` full solves and of `reps` random updates
/// applied in sequence to one engine.
pub fn run_point(point: BenchPoint, seed: u64, reps: usize) -> BenchRow {
    let mut rng = rng(seed);
    let inst = random_instance(GenParams { n: point.n, m: point.m, r: point.r, consecutive: false }, &mut rng);
    let reps = reps.max(1);

    let t = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(solve(&inst));
    }
    let solve_us = t.elapsed().as_secs_f64() * 1e6 / reps as f64;

    let mut engine = Engine::new(inst);
    let mut next = 0;
    let mut total = 0.0;
    for _ in 0..reps {
        let op = random_op(engine.instance(), point.r, usize::MAX, &mut next, &mut rng);
        let t = Instant::now();
        std::hint::black_box(engine.apply(&op).expect("generated ops are valid"));
        total += t.elapsed().as_secs_f64() * 1e6;
    }
    BenchRow { n: point.n, m: point.m, r: point.r, update_us: total / reps as f64, solve_us }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(
            parse_grid("10,20,2; 30,40,4").unwrap(),
            vec![BenchPoint { n: 10, m: 20, r: 2 }, BenchPoint { n: 30, m: 40, r: 4 }]
        );
        assert!(parse_grid("10,20").is_err());
        assert!(parse_grid("10,20,0").is_err());
        assert!(parse_grid("a,20,1").is_err());
    }

    #[test]
    fn small_point_runs() {
        let row = run_point(BenchPoint { n: 20, m: 40, r: 2 }, 3, 3);
        assert!(row.update_us >= 0.0 && row.solve_us > 0.0);
        assert_eq!(row.csv().split(',').count(), 5);
    }
}
