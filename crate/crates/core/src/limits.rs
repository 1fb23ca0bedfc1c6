//! Process-wide caps for exhaustive operations.
//!
//! Every operation that enumerates `2^m` inputs or `2^k` combinations checks
//! against these caps before allocating. The command-line front end may raise
//! them; library callers normally leave the defaults alone.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: u32 = 28;
pub const DEFAULT_COMBO_CAP: u32 = 20;

/// Hard ceiling for the enumeration cap: a truth table of `2^34` bits is 2 GiB.
pub const MAX_ENUMERATION_CAP: u32 = 34;

static ENUMERATION_CAP: AtomicU32 = AtomicU32::new(DEFAULT_ENUMERATION_CAP);
static COMBO_CAP: AtomicU32 = AtomicU32::new(DEFAULT_COMBO_CAP);

pub fn enumeration_cap() -> u32 {
    ENUMERATION_CAP.load(Ordering::Relaxed)
}

pub fn combo_cap() -> u32 {
    COMBO_CAP.load(Ordering::Relaxed)
}

pub fn set_enumeration_cap(cap: u32) -> Result<()> {
    if cap == 0 || cap > MAX_ENUMERATION_CAP {
        return Err(Error::invalid(format!(
            "enumeration cap must be in 1..={MAX_ENUMERATION_CAP}"
        )));
    }
    ENUMERATION_CAP.store(cap, Ordering::Relaxed);
    Ok(())
}

pub fn set_combo_cap(cap: u32) -> Result<()> {
    if cap == 0 || cap > 30 {
        return Err(Error::invalid("combination cap must be in 1..=30"));
    }
    COMBO_CAP.store(cap, Ordering::Relaxed);
    Ok(())
}

pub(crate) fn check_vars(m: u32) -> Result<()> {
    let cap = enumeration_cap();
    if m > cap {
        return Err(Error::CapExceeded {
            what: "variable count m",
            value: m as u64,
            cap: cap as u64,
        });
    }
    Ok(())
}

pub(crate) fn check_combos(k: usize) -> Result<()> {
    let cap = combo_cap();
    if k > cap as usize {
        return Err(Error::CapExceeded {
            what: "combination length k",
            value: k as u64,
            cap: cap as u64,
        });
    }
    Ok(())
}
