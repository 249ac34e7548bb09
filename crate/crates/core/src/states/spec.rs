//! Text grammar for states and one-parameter family templates.
//!
//! ```text
//! ghz | w | gghz:phi=<f> | wclass:l0=<f>,l1=<f>,l2=<f>,l3=<f>
//! ghz-s:phi=<f>,p=<f> | w-s:p=<f> | ghz-w:p=<f>
//! amps:<re0>,<im0>,...,<re7>,<im7> | schmidt:<l0>,<l1>,<l2>,<l3>,<l4>,<theta>
//! ```
//!
//! A template is a family spec with exactly one parameter left out, e.g.
//! `ghz-w`, `gghz` or `ghz-s:phi=0.6` (free `p`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{check_p, check_phi, family_state, from_schmidt, FamilySpec, PureState3, SchmidtParams};
use crate::error::{Error, Result};
use crate::qmath::C64;

/// A parsed state description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Family(FamilySpec),
    Amplitudes([C64; 8]),
    Schmidt(SchmidtParams),
}

impl StateSpec {
    pub fn state(&self) -> Result<PureState3> {
        match self {
            StateSpec::Family(f) => family_state(f),
            StateSpec::Amplitudes(a) => Ok(PureState3::from_amplitudes(*a)?.state),
            StateSpec::Schmidt(s) => Ok(from_schmidt(s)),
        }
    }

    /// Exact `amps:` spec of a state.
    pub fn from_state(state: &PureState3) -> Self {
        StateSpec::Amplitudes(*state.amplitudes())
    }
}

fn parse_float(key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("`{raw}` is not a number (for {key})")))?;
    if !v.is_finite() {
        return Err(Error::invalid(format!("{key} must be finite")));
    }
    Ok(v)
}

fn parse_keyed(body: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    if body.trim().is_empty() {
        return Ok(out);
    }
    for item in body.split(',') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected key=value, got `{item}`")))?;
        let k = k.trim().to_string();
        let v = parse_float(&k, v)?;
        if out.insert(k.clone(), v).is_some() {
            return Err(Error::invalid(format!("parameter `{k}` given twice")));
        }
    }
    Ok(out)
}

fn parse_list(body: &str, expected: usize, what: &str) -> Result<Vec<f64>> {
    let vals: Vec<f64> = body.split(',').map(|v| parse_float(what, v)).collect::<Result<_>>()?;
    if vals.len() != expected {
        return Err(Error::invalid(format!(
            "{what} needs {expected} comma-separated numbers, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn take_exact(mut params: BTreeMap<String, f64>, keys: &[&str], family: &str) -> Result<Vec<f64>> {
    let vals = keys
        .iter()
        .map(|k| {
            params
                .remove(*k)
                .ok_or_else(|| Error::invalid(format!("`{family}` needs parameter `{k}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(extra) = params.keys().next() {
        return Err(Error::invalid(format!("`{family}` has no parameter `{extra}`")));
    }
    Ok(vals)
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let spec = match name {
            "ghz" | "w" => {
                if !body.is_empty() {
                    return Err(Error::invalid(format!("`{name}` takes no parameters")));
                }
                StateSpec::Family(if name == "ghz" { FamilySpec::Ghz } else { FamilySpec::W })
            }
            "amps" => {
                let v = parse_list(body, 16, "amps")?;
                StateSpec::Amplitudes(std::array::from_fn(|i| C64::new(v[2 * i], v[2 * i + 1])))
            }
            "schmidt" => {
                let v = parse_list(body, 6, "schmidt")?;
                StateSpec::Schmidt(SchmidtParams::new([v[0], v[1], v[2], v[3], v[4]], v[5])?)
            }
            _ => {
                let params = parse_keyed(body)?;
                let family = match name {
                    "gghz" => {
                        let v = take_exact(params, &["phi"], name)?;
                        FamilySpec::GeneralizedGhz { phi: v[0] }
                    }
                    "wclass" => {
                        let v = take_exact(params, &["l0", "l1", "l2", "l3"], name)?;
                        let s = SchmidtParams::w_class([v[0], v[1], v[2], v[3]])?;
                        FamilySpec::WClass {
                            lambda: [s.lambda[0], s.lambda[1], s.lambda[2], s.lambda[3]],
                        }
                    }
                    "ghz-s" => {
                        let v = take_exact(params, &["phi", "p"], name)?;
                        FamilySpec::GhzS { phi: v[0], p: v[1] }
                    }
                    "w-s" => FamilySpec::WS {
                        p: take_exact(params, &["p"], name)?[0],
                    },
                    "ghz-w" => FamilySpec::GhzW {
                        p: take_exact(params, &["p"], name)?[0],
                    },
                    other => return Err(Error::invalid(format!("unknown state family `{other}`"))),
                };
                family.validate()?;
                StateSpec::Family(family)
            }
        };
        if let StateSpec::Amplitudes(a) = &spec {
            PureState3::from_amplitudes(*a)?;
        }
        Ok(spec)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Family(fam) => match fam {
                FamilySpec::Ghz => write!(f, "ghz"),
                FamilySpec::W => write!(f, "w"),
                FamilySpec::GeneralizedGhz { phi } => write!(f, "gghz:phi={phi}"),
                FamilySpec::WClass { lambda: l } => {
                    write!(f, "wclass:l0={},l1={},l2={},l3={}", l[0], l[1], l[2], l[3])
                }
                FamilySpec::GhzS { phi, p } => write!(f, "ghz-s:phi={phi},p={p}"),
                FamilySpec::WS { p } => write!(f, "w-s:p={p}"),
                FamilySpec::GhzW { p } => write!(f, "ghz-w:p={p}"),
            },
            StateSpec::Amplitudes(a) => {
                write!(f, "amps:")?;
                for (i, z) in a.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{},{}", z.re, z.im)?;
                }
                Ok(())
            }
            StateSpec::Schmidt(s) => {
                let l = s.lambda;
                write!(f, "schmidt:{},{},{},{},{},{}", l[0], l[1], l[2], l[3], l[4], s.theta)
            }
        }
    }
}

/// A family with one free parameter, used for scans and threshold searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyTemplate {
    /// `gghz`, free φ.
    GeneralizedGhz,
    /// `ghz-s:phi=..`, free p.
    GhzSFixedPhi { phi: f64 },
    /// `ghz-s:p=..`, free φ.
    GhzSFixedP { p: f64 },
    /// `w-s`, free p.
    WS,
    /// `ghz-w`, free p.
    GhzW,
}

impl FamilyTemplate {
    pub fn free_parameter(&self) -> &'static str {
        match self {
            FamilyTemplate::GeneralizedGhz | FamilyTemplate::GhzSFixedP { .. } => "phi",
            _ => "p",
        }
    }

    /// Closed range of the free parameter.
    pub fn range(&self) -> (f64, f64) {
        match self.free_parameter() {
            "phi" => (0.0, std::f64::consts::FRAC_PI_2),
            _ => (0.0, 1.0),
        }
    }

    pub fn instantiate(&self, x: f64) -> Result<FamilySpec> {
        let check = |x: f64| -> Result<()> {
            match self.free_parameter() {
                "phi" => check_phi(x),
                _ => check_p(x),
            }
            .map_err(|e| Error::invalid(format!("grid point {x}: {e}")))
        };
        check(x)?;
        let spec = match *self {
            FamilyTemplate::GeneralizedGhz => FamilySpec::GeneralizedGhz { phi: x },
            FamilyTemplate::GhzSFixedPhi { phi } => FamilySpec::GhzS { phi, p: x },
            FamilyTemplate::GhzSFixedP { p } => FamilySpec::GhzS { phi: x, p },
            FamilyTemplate::WS => FamilySpec::WS { p: x },
            FamilyTemplate::GhzW => FamilySpec::GhzW { p: x },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn state(&self, x: f64) -> Result<PureState3> {
        family_state(&self.instantiate(x)?)
    }
}

impl FromStr for FamilyTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let mut params = parse_keyed(body)?;
        let no_params = |params: &BTreeMap<String, f64>| -> Result<()> {
            match params.keys().next() {
                Some(k) => Err(Error::invalid(format!(
                    "template `{name}` has no fixed parameter `{k}`"
                ))),
                None => Ok(()),
            }
        };
        let t = match name {
            "gghz" => {
                no_params(&params)?;
                FamilyTemplate::GeneralizedGhz
            }
            "w-s" => {
                no_params(&params)?;
                FamilyTemplate::WS
            }
            "ghz-w" => {
                no_params(&params)?;
                FamilyTemplate::GhzW
            }
            "ghz-s" => {
                let phi = params.remove("phi");
                let p = params.remove("p");
                no_params(&params)?;
                match (phi, p) {
                    (Some(phi), None) => {
                        check_phi(phi)?;
                        FamilyTemplate::GhzSFixedPhi { phi }
                    }
                    (None, Some(p)) => {
                        check_p(p)?;
                        FamilyTemplate::GhzSFixedP { p }
                    }
                    _ => {
                        return Err(Error::invalid(
                            "template `ghz-s` needs exactly one of phi=.. or p=.. fixed",
                        ))
                    }
                }
            }
            "ghz" | "w" | "wclass" | "amps" | "schmidt" => {
                return Err(Error::invalid(format!("`{name}` has no single free parameter to scan")))
            }
            other => return Err(Error::invalid(format!("unknown family template `{other}`"))),
        };
        Ok(t)
    }
}

impl fmt::Display for FamilyTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTemplate::GeneralizedGhz => write!(f, "gghz"),
            FamilyTemplate::GhzSFixedPhi { phi } => write!(f, "ghz-s:phi={phi}"),
            FamilyTemplate::GhzSFixedP { p } => write!(f, "ghz-s:p={p}"),
            FamilyTemplate::WS => write!(f, "w-s"),
            FamilyTemplate::GhzW => write!(f, "ghz-w"),
        }
    }
}
