//! CSV and JSON renderings of results. Everything renders to a `String`
//! first so callers can hash exactly what they write.

use serde::Serialize;

use crate::decay::EnergySeries;
use crate::dynamics::TrajectorySample;
use crate::error::{Error, Result};
use crate::pressure::PressureEstimate;
use crate::spectral::Spectrum;

fn render(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `index,re_tau,im_tau,neg_im,cond_flag`
pub fn spectrum_csv(s: &Spectrum) -> Result<String> {
    let flags = s.cond_flags();
    render(
        &["index", "re_tau", "im_tau", "neg_im", "cond_flag"],
        s.eigenvalues.iter().enumerate().map(|(i, t)| {
            vec![
                i.to_string(),
                t.re.to_string(),
                t.im.to_string(),
                (-t.im).to_string(),
                u8::from(flags[i]).to_string(),
            ]
        }),
    )
}

/// `method,eps,T,value,error_bar`: the table rows followed by the estimate.
pub fn pressure_csv(e: &PressureEstimate) -> Result<String> {
    let mut rows: Vec<Vec<String>> = e
        .table
        .iter()
        .map(|r| {
            vec![
                r.method.as_str().to_string(),
                r.eps.to_string(),
                r.horizon.to_string(),
                r.value.to_string(),
                String::new(),
            ]
        })
        .collect();
    rows.push(vec![
        e.method.as_str().to_string(),
        opt(e.eps),
        e.horizon.map(|t| t.to_string()).unwrap_or_default(),
        e.value.to_string(),
        e.error_bar.to_string(),
    ]);
    render(&["method", "eps", "T", "value", "error_bar"], rows)
}

/// `t,energy,method`
pub fn energy_csv(s: &EnergySeries) -> Result<String> {
    render(
        &["t", "energy", "method"],
        s.times
            .iter()
            .zip(&s.energies)
            .map(|(t, e)| vec![t.to_string(), e.to_string(), s.method.as_str().to_string()]),
    )
}

/// `sample_id,t,x...,xi...,birkhoff_sum`, one row per unit time.
pub fn trajectories_csv(samples: &[TrajectorySample]) -> Result<String> {
    let Some(first) = samples.first() else {
        return render(&["sample_id", "t", "birkhoff_sum"], Vec::<Vec<String>>::new());
    };
    let (x, xi) = first.start.coordinates();
    let mut header = vec!["sample_id".to_string(), "t".to_string()];
    header.extend((0..x.len()).map(|k| format!("x{k}")));
    header.extend((0..xi.len()).map(|k| format!("xi{k}")));
    header.push("birkhoff_sum".into());
    let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let rows = samples.iter().enumerate().flat_map(|(id, s)| {
        s.path.iter().enumerate().map(move |(t, (p, sum))| {
            let (x, xi) = p.coordinates();
            let mut r = vec![id.to_string(), t.to_string()];
            r.extend(x.iter().chain(&xi).map(|v| v.to_string()));
            r.push(sum.to_string());
            r
        })
    });
    render(&header, rows)
}

/// One row of the plot-ready long format.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPoint {
    pub series: String,
    pub key: String,
    pub x: f64,
    pub y: f64,
}

/// `series,key,x,y`
pub fn series_csv(points: &[SeriesPoint]) -> Result<String> {
    render(
        &["series", "key", "x", "y"],
        points
            .iter()
            .map(|p| vec![p.series.clone(), p.key.clone(), p.x.to_string(), p.y.to_string()]),
    )
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
