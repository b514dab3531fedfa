use std::collections::HashMap;
use std::str::FromStr;

use coopdiv::analysis::{dmg_curve, r_coop, snr_coop, CurveFamily, DmgCurve, Q};

/// Parses `name[:key=value,...]`, e.g. `optimal:n=3`, `pep-random:n=2,k=1/2`
/// or `two-product:n=2,drop=1/2` for a rate-dropped curve.
pub fn parse_family(text: &str) -> Result<CurveFamily, String> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut params: HashMap<&str, Q> = HashMap::new();
    for kv in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad parameter `{kv}` in `{text}`"))?;
        let v = Q::from_str(v.trim()).map_err(|_| format!("`{v}` is not a rational in `{text}`"))?;
        params.insert(k.trim(), v);
    }
    let get = |key: &str, default: Option<i64>| -> Result<Q, String> {
        params
            .get(key)
            .copied()
            .or(default.map(Q::from_integer))
            .ok_or_else(|| format!("family `{name}` needs `{key}=`"))
    };
    let int = |key: &str, default: Option<i64>| -> Result<i64, String> {
        let v = get(key, default)?;
        if v.is_integer() {
            Ok(v.to_integer())
        } else {
            Err(format!("`{key}` must be an integer, got {v}"))
        }
    };
    let base = match name.to_ascii_lowercase().replace('_', "-").as_str() {
        "optimal" => CurveFamily::Optimal { n: int("n", Some(2))? },
        "two-product" => CurveFamily::TwoProduct { n: int("n", Some(2))? },
        "pep-random" => CurveFamily::PepRandom { n: int("n", Some(2))?, k: get("k", None)? },
        "pep-universal" => CurveFamily::PepUniversal { n: int("n", Some(2))? },
        "full-perfect" => CurveFamily::FullPerfect { n: int("n", Some(2))? },
        "alamouti" => CurveFamily::Alamouti,
        "ortho-approx" => CurveFamily::OrthoApprox { n: int("n", Some(2))? },
        "alpha-scaled" => CurveFamily::AlphaScaled { n: int("n", Some(2))?, alpha: get("alpha", None)? },
        "multi-antenna" => CurveFamily::MultiAntenna { n: int("n", Some(2))?, m: int("m", None)? },
        "rayleigh" | "p2p" => CurveFamily::RayleighPointToPoint { n: int("n", Some(1))?, n_r: int("nr", Some(1))? },
        "siso" => CurveFamily::RayleighPointToPoint { n: 1, n_r: 1 },
        other => return Err(format!("unknown curve family `{other}`")),
    };
    Ok(match params.get("drop") {
        Some(&m) => CurveFamily::RateDrop { base: Box::new(base), m },
        None => base,
    })
}

pub fn curve(text: &str) -> Result<DmgCurve, String> {
    dmg_curve(&parse_family(text)?).map_err(|e| e.to_string())
}

/// Breakpoint CSV of `text`, then of `compare` with the crossing report
/// as comment lines.
pub fn render(text: &str, compare: Option<&str>, rate: Option<f64>) -> Result<String, String> {
    let a = curve(text)?;
    let mut s = format!("# curve {}\n{}", a.label, a.to_csv());
    if let Some(other) = compare {
        let b = curve(other)?;
        s.push_str(&format!("# curve {}\n{}", b.label, b.to_csv()));
        match r_coop(&a, &b) {
            Some(r) => {
                s.push_str(&format!("# r_coop = {r}\n"));
                if let Some(rate) = rate {
                    let snr = snr_coop(rate, r).map_err(|e| e.to_string())?;
                    s.push_str(&format!(
                        "# snr_coop = 2^(R/r_coop) = {snr:.6} ({:.3} dB) at R = {rate}\n",
                        10.0 * snr.log10()
                    ));
                }
            }
            None => s.push_str("# r_coop = none (curves do not cross)\n"),
        }
    }
    Ok(s)
}
