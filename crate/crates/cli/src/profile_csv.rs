//! CSV sidecars for turnpike profiles: header `t,distance,in_window`, one
//! row per step, distances in shortest round-trip decimal form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use turnpike_core::TurnpikeProfile;

use crate::error::Error;

pub fn render(profile: &TurnpikeProfile) -> String {
    let mut out = String::from("t,distance,in_window\n");
    for (t, d) in profile.per_step_distance.iter().enumerate() {
        writeln!(out, "{t},{d:?},{}", profile.in_window(t)).expect("string write");
    }
    out
}

/// `report.json` → `report.profile.csv`.
pub fn sidecar_path(report: &Path) -> PathBuf {
    report.with_extension("profile.csv")
}

pub fn write(profile: &TurnpikeProfile, path: &Path) -> Result<(), Error> {
    fs::write(path, render(profile)).map_err(|e| Error::io(path, e))
}
