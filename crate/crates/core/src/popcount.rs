//! Popcount kernels over packed words, dispatched at runtime to the hardware
//! instruction when the CPU has it (the default x86-64 target does not
//! assume it, and the portable fallback is several times slower).

#[inline]
fn xor_portable(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as u64).sum()
}

#[inline]
fn and_portable(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

#[inline]
fn ones_portable(a: &[u64]) -> u64 {
    a.iter().map(|x| x.count_ones() as u64).sum()
}

#[cfg(target_arch = "x86_64")]
mod hw {
    #[target_feature(enable = "popcnt")]
    pub unsafe fn xor(a: &[u64], b: &[u64]) -> u64 {
        super::xor_portable(a, b)
    }

    #[target_feature(enable = "popcnt")]
    pub unsafe fn and(a: &[u64], b: &[u64]) -> u64 {
        super::and_portable(a, b)
    }

    #[target_feature(enable = "popcnt")]
    pub unsafe fn ones(a: &[u64]) -> u64 {
        super::ones_portable(a)
    }
}

/// Number of differing bits.
pub(crate) fn xor_count(a: &[u64], b: &[u64]) -> u64 {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports popcnt, checked just above.
        return unsafe { hw::xor(a, b) };
    }
    xor_portable(a, b)
}

/// Number of bits set in both.
pub(crate) fn and_count(a: &[u64], b: &[u64]) -> u64 {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports popcnt, checked just above.
        return unsafe { hw::and(a, b) };
    }
    and_portable(a, b)
}

pub(crate) fn ones(a: &[u64]) -> u64 {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports popcnt, checked just above.
        return unsafe { hw::ones(a) };
    }
    ones_portable(a)
}
