use super::DomainError;

/// Period-based learning factor `t^a` for the 1-based period number `t`.
///
/// A unit that takes `p` time in the first period takes `p * t^a` in period
/// `t`. The index `a` is non-positive, so the factor lies in `(0, 1]`.
pub fn learning_multiplier(period: usize, index: f64) -> Result<f64, DomainError> {
    if period < 1 {
        return Err(DomainError::InvalidPeriod(period));
    }
    if !index.is_finite() || index > 0.0 {
        return Err(DomainError::InvalidLearningIndex(index));
    }
    Ok((period as f64).powf(index))
}

/// Time needed to process `qty` items at nominal rate `rate` in the
/// 1-based `period` with learning index `index`.
pub fn actual_processing_time(
    qty: f64,
    rate: f64,
    index: f64,
    period: usize,
) -> Result<f64, DomainError> {
    let factor = learning_multiplier(period, index)?;
    Ok(qty * rate * factor)
}
