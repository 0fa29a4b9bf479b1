//! CSV and JSON writers.
//!
//! CSV reals use 17 significant digits (`{:.16e}`), which round-trips every
//! finite `f64`; non-finite values are written as `inf`, `-inf`, `NaN`.
//! JSON reals are written by serde_json (shortest round-trip form) except
//! non-finite values, which become the same strings via [`real`].

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::HarnessError;

pub const SPEC_VERSION: &str = "1";

pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}

/// Serde adapter for `f64` fields that may be non-finite.
pub mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&super::fmt_real(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => super::parse_real(&t).ok_or_else(|| serde::de::Error::custom(format!("not a real: {t}"))),
        }
    }

    /// The same adapter for `Vec<f64>`.
    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            struct Wrap(f64);
            impl serde::Serialize for Wrap {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    super::serialize(&self.0, s)
                }
            }
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&Wrap(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] f64);
            Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
        }
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| HarnessError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), HarnessError> {
    let runtime = |e: csv::Error| HarnessError::Runtime(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(runtime)?;
    w.write_record(header).map_err(runtime)?;
    for r in rows {
        w.write_record(r).map_err(runtime)?;
    }
    w.flush().map_err(|e| HarnessError::Runtime(e.to_string()))
}

/// Reads a CSV written by [`write_csv`]: the header and the raw records.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), HarnessError> {
    let runtime = |e: csv::Error| HarnessError::Runtime(format!("cannot read {}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(runtime)?;
    let header = r.headers().map_err(runtime)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(runtime)?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[test]
    fn reals_round_trip_through_text() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE, f64::INFINITY, f64::NEG_INFINITY] {
            assert_eq!(parse_real(&fmt_real(x)), Some(x));
        }
        assert!(parse_real(&fmt_real(f64::NAN)).unwrap().is_nan());
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn json_adapter_handles_non_finite() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct T {
            #[serde(with = "real")]
            x: f64,
            #[serde(with = "real::vec")]
            v: Vec<f64>,
        }
        let t = T { x: f64::INFINITY, v: vec![1.5, f64::NEG_INFINITY] };
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"x":"inf","v":[1.5,"-inf"]}"#);
        assert_eq!(serde_json::from_str::<T>(&s).unwrap(), t);
    }
}
