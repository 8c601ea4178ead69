use super::ExecutiveError;

/// True when a leg overran its expected time by more than `tolerance`.
/// Faster-than-expected legs never trigger.
pub fn replan_trigger(expected: f64, realized: f64, tolerance: f64) -> bool {
    realized > (1.0 + tolerance) * expected
}

/// `phi1 * |leg_total - threshold| + phi2 / total_weight + compute_total`.
pub fn mission_cost(
    leg_total: f64,
    threshold: f64,
    total_weight: f64,
    compute_total: f64,
    phi1: f64,
    phi2: f64,
) -> Result<f64, ExecutiveError> {
    if !(total_weight > 0.0) {
        return Err(ExecutiveError::ZeroWeight);
    }
    Ok(phi1 * (leg_total - threshold).abs() + phi2 / total_weight + compute_total)
}
