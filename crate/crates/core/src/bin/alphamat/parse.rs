use anyhow::{anyhow, bail, Context, Result};

use alphamat::distribution::TestFunction;
use alphamat::{MultiIndex, C64};

/// `re`, `re+imi`, `re-imi` or `imi`.
pub fn complex_token(tok: &str) -> Result<C64> {
    let t = tok.trim();
    let bad = || anyhow!("bad coefficient `{tok}` (expected `re` or `re+imi`)");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.trim_start_matches('+').parse::<f64>().map_err(|_| bad())?,
    };
    Ok(C64::new(re, im))
}

pub fn coeff_list(list: &str) -> Result<Vec<C64>> {
    let v: Vec<C64> = list.split(',').map(complex_token).collect::<Result<_>>()?;
    if v.is_empty() {
        bail!("empty coefficient list");
    }
    Ok(v)
}

/// Comma-separated sizes; each is a number or an `x`-joined multi-size such as `2x3x4`.
/// A bare number `m` stands for `(m, ..., m)` with `d` levels.
pub fn size_list(list: &str, d: usize) -> Result<Vec<MultiIndex>> {
    list.split(',')
        .map(|item| {
            let parts: Vec<usize> = item
                .split('x')
                .map(|p| p.trim().parse::<usize>().with_context(|| format!("bad size `{item}`")))
                .collect::<Result<_>>()?;
            let sizes = if parts.len() == 1 { vec![parts[0]; d] } else { parts };
            Ok(MultiIndex::from_sizes(&sizes))
        })
        .collect()
}

pub fn function_list(list: &str) -> Result<Vec<TestFunction>> {
    list.split(',').map(|f| f.trim().parse::<TestFunction>().map_err(|e| anyhow!("{e}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        assert_eq!(complex_token("1").unwrap(), C64::new(1.0, 0.0));
        assert_eq!(complex_token("-0.5").unwrap(), C64::new(-0.5, 0.0));
        assert_eq!(complex_token("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(complex_token("1.5-0.25i").unwrap(), C64::new(1.5, -0.25));
        assert_eq!(complex_token("1e-3+2e+1i").unwrap(), C64::new(1e-3, 20.0));
        assert_eq!(complex_token("-2i").unwrap(), C64::new(0.0, -2.0));
        assert_eq!(complex_token("3-i").unwrap(), C64::new(3.0, -1.0));
        assert!(complex_token("x").is_err());
        assert!(complex_token("1+2j").is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(size_list("16,32", 1).unwrap(), vec![MultiIndex::from_sizes(&[16]), MultiIndex::from_sizes(&[32])]);
        assert_eq!(size_list("4", 2).unwrap(), vec![MultiIndex::from_sizes(&[4, 4])]);
        assert_eq!(size_list("2x3x4", 3).unwrap(), vec![MultiIndex::from_sizes(&[2, 3, 4])]);
        assert!(size_list("2x,3", 1).is_err());
    }
}
