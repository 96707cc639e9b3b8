//! Rank candidate separations for a vehicle link limited to 1.8 m arrays.

use losmimo::design::{rank_candidates, DesignSpec, Objective};

fn main() -> losmimo::Result<()> {
    env_logger::init();
    let spec = DesignSpec {
        grid_step: 1.0,
        objective: Objective::MaxMinCapacity,
        ..DesignSpec::v2v_default()
    };
    let report = rank_candidates(&spec)?;
    println!("{} candidates, bound {:.3} bps/Hz", report.candidates.len(), report.max_capacity);
    let mut ranked: Vec<_> = report.candidates.iter().collect();
    ranked.sort_by(|a, b| b.min_capacity.total_cmp(&a.min_capacity));
    for c in ranked.iter().take(5) {
        println!(
            "d = {:.4} m (p = {}, anchor {:.1} m): min {:.3}, mean {:.3}, {} optimal distances",
            c.separation_m,
            c.source.p,
            c.source.anchor_distance_m,
            c.min_capacity,
            c.mean_capacity,
            c.optimal_distances.len()
        );
    }
    if let Some(best) = report.winner() {
        println!("selected d = {:.4} m", best.separation_m);
    }
    Ok(())
}
