//! Float helpers that work without `std`.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub(crate) fn cis(theta: f64) -> crate::C64 {
    crate::C64::new(libm::cos(theta), libm::sin(theta))
}

#[cfg(test)]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[cfg(test)]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}
