//! Flag values: constants, domains, inner domains, test functions, regions.
//!
//! Numbers and complex constants go through the expression parser, so
//! `1/512`, `-0.3+0.4i` and `exp(-1)` are all accepted.

use std::fs;
use std::path::Path;

use blaschke_core::conditions::TestKind;
use blaschke_core::expr::{parse_function, FunctionKind};
use blaschke_core::zeros::SearchRegion;
use blaschke_core::{Complex, DomainSpec, FunctionSpec, Moebius};

use crate::LabError;

pub fn read_file(path: &str) -> Result<String, LabError> {
    fs::read_to_string(path).map_err(|source| LabError::Io { path: path.into(), source })
}

pub fn function(text: &str) -> Result<FunctionSpec, LabError> {
    Ok(parse_function(text)?)
}

/// A constant expression.
pub fn complex(text: &str) -> Result<Complex, LabError> {
    let spec = parse_function(text)?;
    let constant = match &spec.kind {
        FunctionKind::Polynomial(p) => p.len() == 1,
        _ => !spec.to_expr().contains_z(),
    };
    if !constant {
        return Err(LabError::Input(format!("`{text}` must be a constant")));
    }
    Ok(spec.value(Complex::new(0.0, 0.0))?)
}

pub fn real(text: &str) -> Result<f64, LabError> {
    let c = complex(text)?;
    if c.im != 0.0 {
        return Err(LabError::Input(format!("`{text}` must be real")));
    }
    Ok(c.re)
}

/// A comma-separated list of reals.
pub fn reals(text: &str) -> Result<Vec<f64>, LabError> {
    text.split(',').map(real).collect()
}

fn args<'a>(text: &'a str, prefix: &str, n: usize) -> Result<Option<Vec<&'a str>>, LabError> {
    let Some(rest) = text.strip_prefix(prefix) else {
        return Ok(None);
    };
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(LabError::Input(format!("`{text}`: `{prefix}` takes {n} comma-separated values")));
    }
    Ok(Some(parts))
}

/// `unitdisk | disk:c,r | moebius:a,b,c,d`; the Möbius form is `T(𝔻)` for
/// `T(w) = (a w + b)/(c w + d)`.
pub fn domain(text: &str) -> Result<DomainSpec, LabError> {
    let text = text.trim();
    if text == "unitdisk" {
        return Ok(DomainSpec::unit_disk());
    }
    if let Some(p) = args(text, "disk:", 2)? {
        return Ok(DomainSpec::disk(complex(p[0])?, real(p[1])?)?);
    }
    if let Some(p) = args(text, "moebius:", 4)? {
        let map = Moebius::new(complex(p[0])?, complex(p[1])?, complex(p[2])?, complex(p[3])?)?;
        return Ok(DomainSpec::moebius_image(map)?);
    }
    Err(LabError::Input(format!("unknown domain `{text}`")))
}

/// `D` with inner domain from `--d0`: a number `s ∈ (0, 1)` gives the
/// concentric subdomain `T(D(0, s))`, anything else is read as a domain.
pub fn with_inner(outer: DomainSpec, d0: &str) -> Result<DomainSpec, LabError> {
    let inner = match real(d0) {
        Ok(s) => outer.concentric_subdomain(s)?,
        Err(_) => domain(d0)?,
    };
    Ok(outer.with_inner(inner)?)
}

/// `disk:c,r | rect:ll,ur`.
pub fn region(text: &str) -> Result<SearchRegion, LabError> {
    let text = text.trim();
    if let Some(p) = args(text, "disk:", 2)? {
        return Ok(SearchRegion::Disk { center: complex(p[0])?, radius: real(p[1])? });
    }
    if let Some(p) = args(text, "rect:", 2)? {
        return Ok(SearchRegion::Rect { lower_left: complex(p[0])?, upper_right: complex(p[1])? });
    }
    Err(LabError::Input(format!("unknown region `{text}`")))
}

/// `loginv | greenpole:z0 | power:q | custom:file`. Any other value names a
/// JSON file `{"v": "<one of these>"}`.
pub fn test_kind(text: &str) -> Result<TestKind, LabError> {
    test_kind_at(text, 0)
}

fn test_kind_at(text: &str, depth: usize) -> Result<TestKind, LabError> {
    let text = text.trim();
    if text == "loginv" {
        return Ok(TestKind::LogInverse);
    }
    if let Some(z0) = text.strip_prefix("greenpole:") {
        return Ok(TestKind::GreenPole(complex(z0)?));
    }
    if let Some(q) = text.strip_prefix("power:") {
        return Ok(TestKind::BoundaryPower(real(q)?));
    }
    if let Some(path) = text.strip_prefix("custom:") {
        return Ok(TestKind::Custom(function(read_file(path)?.trim())?));
    }
    if depth > 0 || !Path::new(text).extension().is_some_and(|e| e == "json") {
        return Err(LabError::Input(format!("unknown test function `{text}`")));
    }
    let doc: serde_json::Value =
        serde_json::from_str(&read_file(text)?).map_err(|e| LabError::Input(format!("{text}: {e}")))?;
    match doc.get("v").and_then(|v| v.as_str()) {
        Some(inner) => test_kind_at(inner, depth + 1),
        None => Err(LabError::Input(format!("{text}: expected an object with a string field `v`"))),
    }
}
