//! Number formatting shared by every text output.

/// Scientific notation with 15 significant digits, e.g. `5.78318596294678e0`.
pub fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}
