//! Momentum grids and concurrent dispersion sampling.

use std::fmt::Write as _;

use qspace_core::waves::DispersionModel;
use qspace_core::Error;
use rayon::prelude::*;

/// One grid axis: `steps` evenly spaced points from `lo` to `hi` inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn point(&self, k: usize) -> f64 {
        if self.steps == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * k as f64 / (self.steps - 1) as f64
        }
    }
}

/// Parses `lo:hi:steps` or a single fixed value per axis, comma separated.
pub fn parse_grid(text: &str) -> Result<Vec<Axis>, String> {
    text.split(',')
        .map(|part| {
            let fields: Vec<&str> = part.trim().split(':').collect();
            let num = |s: &str| -> Result<f64, String> {
                let v: f64 = s.trim().parse().map_err(|_| format!("bad grid value `{s}`"))?;
                v.is_finite().then_some(v).ok_or_else(|| format!("grid value `{s}` is not finite"))
            };
            match fields.as_slice() {
                [v] => {
                    let v = num(v)?;
                    Ok(Axis { lo: v, hi: v, steps: 1 })
                }
                [lo, hi, steps] => {
                    let steps: usize = steps.trim().parse().map_err(|_| format!("bad step count `{steps}`"))?;
                    if steps == 0 {
                        return Err(format!("axis `{part}` has zero steps"));
                    }
                    Ok(Axis { lo: num(lo)?, hi: num(hi)?, steps })
                }
                _ => Err(format!("axis `{part}` is neither `lo:hi:steps` nor a value")),
            }
        })
        .collect()
}

/// Grid points in row-major order, the first axis varying slowest.
pub fn points(axes: &[Axis]) -> Vec<Vec<f64>> {
    let total: usize = axes.iter().map(|a| a.steps).product();
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; axes.len()];
            for (d, axis) in axes.iter().enumerate().rev() {
                p[d] = axis.point(idx % axis.steps);
                idx /= axis.steps;
            }
            p
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub p: Vec<f64>,
    pub m2: f64,
    /// `None` on the mass shell.
    pub propagator: Option<(f64, f64)>,
}

/// Evaluates `m²` and the propagator at every point concurrently; the output keeps input order.
pub fn sample(model: &DispersionModel, points: &[Vec<f64>]) -> Result<Vec<Sample>, Error> {
    points
        .par_iter()
        .map(|p| {
            let m2 = model.mass_squared(p)?;
            let propagator = match model.propagator(p) {
                Ok(z) => Some((z.re, z.im)),
                Err(Error::OnShellPole { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(Sample { p: p.clone(), m2, propagator })
        })
        .collect()
}

fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".into()
    }
}

/// CSV with columns `p0..p{N-1},m2,re_prop,im_prop`; poles print `nan` propagators.
pub fn to_csv(n: usize, samples: &[Sample]) -> String {
    let mut out = String::new();
    for a in 0..n {
        let _ = write!(out, "p{a},");
    }
    out.push_str("m2,re_prop,im_prop\n");
    for s in samples {
        for x in &s.p {
            out.push_str(&float(*x));
            out.push(',');
        }
        let (re, im) = s.propagator.unwrap_or((f64::NAN, f64::NAN));
        let _ = writeln!(out, "{},{},{}", float(s.m2), float(re), float(im));
    }
    out
}

/// Gnuplot script plotting `m²` over the varying axes of the grid.
pub fn gnuplot_script(csv_name: &str, axes: &[Axis]) -> String {
    let varying: Vec<usize> = (0..axes.len()).filter(|&d| axes[d].steps > 1).collect();
    let m2 = axes.len() + 1;
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str("set key autotitle columnhead\n");
    out.push_str("set zlabel 'm^2'\n");
    match varying.as_slice() {
        [] => {
            let _ = writeln!(out, "plot '{csv_name}' using 0:{m2} with points");
        }
        [a] => {
            let _ = writeln!(out, "set xlabel 'p{a}'");
            let _ = writeln!(out, "plot '{csv_name}' using {}:{m2} with linespoints", a + 1);
        }
        [a, b, ..] => {
            let _ = writeln!(out, "set xlabel 'p{a}'\nset ylabel 'p{b}'");
            let _ = writeln!(out, "splot '{csv_name}' using {}:{}:{m2} with points", a + 1, b + 1);
        }
    }
    out.push_str("pause mouse close\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qspace_core::structures::presets;
    use qspace_core::Scalar;

    #[test]
    fn grid_syntax() {
        let axes = parse_grid("0:2:5,0:2:5,0,0").unwrap();
        assert_eq!(axes.len(), 4);
        assert_eq!(axes[1], Axis { lo: 0.0, hi: 2.0, steps: 5 });
        assert_eq!(axes[2].steps, 1);
        assert_eq!(points(&axes).len(), 25);
        assert_eq!(points(&axes)[6], vec![0.5, 0.5, 0.0, 0.0]);
        for bad in ["", "0:1", "0:1:0", "a", "0:1:x", "0:inf:2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sampling_is_ordered_and_flags_poles() {
        let model = DispersionModel::new(&presets::classical_minkowski(2), 1.0).unwrap();
        let pts = points(&parse_grid("0:2:3,0,0,0:1:2").unwrap());
        let samples = sample(&model, &pts).unwrap();
        let m2: Vec<f64> = samples.iter().map(|s| s.m2).collect();
        assert_eq!(m2, vec![0.0, -1.0, 1.0, 0.0, 4.0, 3.0]);
        assert!(samples[2].propagator.is_none());
        let csv = to_csv(4, &samples);
        assert!(csv.starts_with("p0,p1,p2,p3,m2,re_prop,im_prop\n"));
        assert!(csv.lines().nth(3).unwrap().ends_with(",nan,nan"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn gnuplot_uses_varying_axes() {
        let axes = parse_grid("0:2:5,1,0:1:3,0").unwrap();
        let script = gnuplot_script("o.csv", &axes);
        assert!(script.contains("splot 'o.csv' using 1:3:5"), "{script}");
        let model = DispersionModel::new(&presets::lattice(Scalar::one(), 2), 0.0).unwrap();
        let samples = sample(&model, &points(&parse_grid("0:1:4").unwrap())).unwrap();
        assert!(to_csv(1, &samples).starts_with("p0,m2,"));
    }
}
