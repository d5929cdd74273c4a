//! Textual certificate blocks, emitted by the transform/decompose
//! commands and re-validated by `check-certificate`.

use crate::error::{Error, Result};
use crate::search::{CoverCertificate, PackingCertificate};
use crate::setfn::{CompactSource, SearchParams, SetFunction};
use crate::space::Model;

pub enum Certificate {
    Cover(CoverCertificate),
    Packing(PackingCertificate),
}

pub fn cover_to_text(model: &Model, instance: &str, cert: &CoverCertificate) -> String {
    let mut out = String::from("certificate cover v1\n");
    out.push_str(&format!("model {}\n", model.describe()));
    out.push_str(&format!("instance {instance}\n"));
    out.push_str(&format!("target {}\n", model.format_mask(&cert.target)));
    for p in &cert.pieces {
        out.push_str(&format!("piece {}\n", model.format_mask(p)));
    }
    out.push_str(&format!("total {}\n", cert.total));
    out.push_str(&format!("optimal {}\n", cert.optimal));
    out
}

pub fn packing_to_text(model: &Model, instance: &str, cert: &PackingCertificate) -> String {
    let mut out = String::from("certificate packing v1\n");
    out.push_str(&format!("model {}\n", model.describe()));
    out.push_str(&format!("instance {instance}\n"));
    out.push_str(&format!("host {}\n", model.format_mask(&cert.host)));
    for p in &cert.pieces {
        out.push_str(&format!("piece {}\n", model.format_mask(p)));
    }
    out.push_str(&format!("total {}\n", cert.total));
    out.push_str(&format!("optimal {}\n", cert.optimal));
    out
}

/// Parse a certificate block; returns the certificate and the instance
/// name recorded inside it.
pub fn parse_certificate(model: &Model, text: &str) -> Result<(Certificate, String)> {
    let mut kind = None;
    let mut instance = None;
    let mut target = None;
    let mut pieces = Vec::new();
    let mut total = None;
    let mut optimal = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("certificate ") {
            kind = Some(
                rest.split_whitespace()
                    .next()
                    .ok_or_else(|| Error::Parse("missing certificate kind".into()))?
                    .to_string(),
            );
        } else if let Some(rest) = line.strip_prefix("instance ") {
            instance = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("model ") {
            let stated = rest.trim();
            let actual = model.describe();
            if stated != actual {
                return Err(Error::Parse(format!(
                    "certificate is for model `{stated}`, not `{actual}`"
                )));
            }
        } else if let Some(rest) = line.strip_prefix("target ") {
            target = Some(model.parse_mask(rest.trim())?);
        } else if let Some(rest) = line.strip_prefix("host ") {
            target = Some(model.parse_mask(rest.trim())?);
        } else if let Some(rest) = line.strip_prefix("piece ") {
            pieces.push(model.parse_mask(rest.trim())?);
        } else if let Some(rest) = line.strip_prefix("total ") {
            total = Some(crate::value::ExtValue::parse(rest.trim())?);
        } else if let Some(rest) = line.strip_prefix("optimal ") {
            optimal = rest.trim() == "true";
        } else {
            return Err(Error::Parse(format!("unrecognized certificate line `{line}`")));
        }
    }
    let kind = kind.ok_or_else(|| Error::Parse("missing `certificate` line".into()))?;
    let instance = instance.ok_or_else(|| Error::Parse("missing `instance` line".into()))?;
    let target = target.ok_or_else(|| Error::Parse("missing target/host line".into()))?;
    let total = total.ok_or_else(|| Error::Parse("missing `total` line".into()))?;
    let cert = match kind.as_str() {
        "cover" => Certificate::Cover(CoverCertificate {
            target,
            pieces,
            total,
            optimal,
        }),
        "packing" => Certificate::Packing(PackingCertificate {
            host: target,
            pieces,
            total,
            optimal,
        }),
        other => return Err(Error::Parse(format!("unknown certificate kind `{other}`"))),
    };
    Ok((cert, instance))
}

/// Re-validate a certificate against its instance: structural checks,
/// recomputed totals, and (for optimal certificates within the exact
/// regime) a fresh search confirming nothing better exists.
pub fn revalidate(
    cert: &Certificate,
    f: &SetFunction,
    params: SearchParams,
) -> Result<Vec<String>> {
    let mut log = Vec::new();
    match cert {
        Certificate::Cover(c) => {
            c.validate(f)?;
            log.push(format!(
                "cover of {} by {} pieces, total {}: structure and totals verified",
                f.model().format_mask(&c.target),
                c.pieces.len(),
                c.total
            ));
            if c.optimal {
                let out = crate::search::tilde_search(f, &c.target, params)?;
                match out.exact_value() {
                    Some(v) if v == c.total => {
                        log.push("optimality confirmed by fresh search".into())
                    }
                    Some(v) => {
                        return Err(Error::Config(format!(
                            "claimed optimal total {} but fresh search finds {v}",
                            c.total
                        )))
                    }
                    None => log.push(format!(
                        "fresh search stayed within bounds [{}, {}]; optimality not refuted",
                        out.lo, out.hi
                    )),
                }
            }
        }
        Certificate::Packing(p) => {
            let src = CompactSource::Restrict(f.clone());
            p.validate(&src, f.model())?;
            log.push(format!(
                "packing in {} with {} pieces, total {}: structure and totals verified",
                f.model().format_mask(&p.host),
                p.pieces.len(),
                p.total
            ));
            if p.optimal {
                let out = crate::search::packing_search(&src, &p.host, params)?;
                match out.exact_value() {
                    Some(v) if v == p.total => {
                        log.push("optimality confirmed by fresh search".into())
                    }
                    Some(v) => {
                        return Err(Error::Config(format!(
                            "claimed optimal total {} but fresh search finds {v}",
                            p.total
                        )))
                    }
                    None => log.push("fresh search returned bounds only".into()),
                }
            }
        }
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{DyadicGrid, Model};
    use crate::value::{rat, ExtValue};

    #[test]
    fn cover_certificate_roundtrip() {
        let model = Model::grid(DyadicGrid::new(2).unwrap());
        let f = SetFunction::cell_weights(&model, "u", vec![rat(1, 16); 16]).unwrap();
        let out = crate::search::tilde_search(&f, &model.x_mask(), SearchParams::default()).unwrap();
        let cert = CoverCertificate {
            target: model.x_mask(),
            pieces: out.pieces,
            total: ExtValue::one(),
            optimal: true,
        };
        let text = cover_to_text(&model, "lebesgue", &cert);
        let (parsed, inst) = parse_certificate(&model, &text).unwrap();
        assert_eq!(inst, "lebesgue");
        let log = revalidate(&parsed, &f, SearchParams::default()).unwrap();
        assert!(log.iter().any(|l| l.contains("optimality confirmed")));
    }

    #[test]
    fn tampered_total_is_rejected() {
        let model = Model::grid(DyadicGrid::new(2).unwrap());
        let f = SetFunction::cell_weights(&model, "u", vec![rat(1, 16); 16]).unwrap();
        let text = format!(
            "certificate cover v1\nmodel {}\ninstance u\ntarget {}\npiece {}\ntotal 1/2\noptimal true\n",
            model.describe(),
            model.format_mask(&model.x_mask()),
            model.format_mask(&model.x_mask()),
        );
        let (parsed, _) = parse_certificate(&model, &text).unwrap();
        assert!(revalidate(&parsed, &f, SearchParams::default()).is_err());
    }
}
