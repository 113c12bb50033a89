//! Test functions named on the command line.
//!
//! * `one`: the constant 1
//! * `indicator:LO,HI`
//! * `hat:LO,PEAK,HI[,HEIGHT]`
//! * `bump:LO,HI[,HEIGHT]`: quartic bump
//! * `pwl:X:Y;X:Y;...`: piecewise linear, zero outside the knots
//! * `xexp`: `x e^{-x}`

use anyhow::{anyhow, bail, Context};
use assocnorm::HalfLineFunction;

fn numbers(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad number {v:?}")))
        .collect()
}

pub fn parse_function(spec: &str) -> anyhow::Result<HalfLineFunction> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let f = match kind {
        "one" => HalfLineFunction::new("one", |_| 1.0),
        "xexp" => HalfLineFunction::new("x e^-x", |x: f64| x * (-x).exp()),
        "indicator" => match numbers(args)?[..] {
            [lo, hi] if 0.0 < lo && lo < hi => HalfLineFunction::indicator(lo, hi),
            _ => bail!("indicator needs LO,HI with 0 < LO < HI"),
        },
        "hat" => match numbers(args)?[..] {
            [lo, peak, hi] => HalfLineFunction::hat(lo, peak, hi, 1.0)?,
            [lo, peak, hi, h] => HalfLineFunction::hat(lo, peak, hi, h)?,
            _ => bail!("hat needs LO,PEAK,HI[,HEIGHT]"),
        },
        "bump" => match numbers(args)?[..] {
            [lo, hi] => HalfLineFunction::quartic_bump(lo, hi, 1.0)?,
            [lo, hi, h] => HalfLineFunction::quartic_bump(lo, hi, h)?,
            _ => bail!("bump needs LO,HI[,HEIGHT]"),
        },
        "pwl" => {
            let knots = args
                .split(';')
                .map(|k| {
                    let (x, y) = k.split_once(':').ok_or_else(|| anyhow!("knot {k:?} is not X:Y"))?;
                    Ok((x.trim().parse::<f64>()?, y.trim().parse::<f64>()?))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            HalfLineFunction::piecewise_linear(format!("pwl[{args}]"), knots)?
        }
        _ => bail!("unknown function {kind:?}"),
    };
    if f.support().is_some_and(|(lo, _)| lo < 0.0) {
        bail!("{spec}: support must lie in (0, inf)");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        assert_eq!(parse_function("one").unwrap().evaluate(3.0), 1.0);
        assert_eq!(parse_function("indicator:1,2").unwrap().evaluate(1.5), 1.0);
        assert_eq!(parse_function("hat:1,2,3").unwrap().evaluate(2.0), 1.0);
        assert_eq!(parse_function("hat:1,2,3,4").unwrap().evaluate(2.0), 4.0);
        assert!(parse_function("bump:1,3").unwrap().evaluate(2.0) > 0.0);
        let p = parse_function("pwl:1:0;2:1;3:0").unwrap();
        assert_eq!(p.evaluate(2.5), 0.5);
        assert!((parse_function("xexp").unwrap().evaluate(1.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "hat:1,2", "indicator:2,1", "indicator:a,b", "pwl:1;2", "sine", "hat:-1,0,1"] {
            assert!(parse_function(s).is_err(), "{s}");
        }
    }
}
