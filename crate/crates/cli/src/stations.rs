//! Station list CSV: header `name,lat_deg,lon_deg`, decimal degrees.

use std::path::Path;

use satqkd::geodesy::GroundStation;

use crate::error::CliError;

pub const STATIONS_HEADER: [&str; 3] = ["name", "lat_deg", "lon_deg"];

pub fn read_stations_csv(path: &Path) -> Result<Vec<GroundStation>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_stations(file, &path.display().to_string())
}

pub fn parse_stations<R: std::io::Read>(reader: R, source: &str) -> Result<Vec<GroundStation>, CliError> {
    let csv_err = |line: u64, message: String| CliError::Csv {
        path: source.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(satqkd::Error::EmptyInput("station file").into());
    }
    if headers.iter().ne(STATIONS_HEADER) {
        return Err(csv_err(
            1,
            format!("expected header 'name,lat_deg,lon_deg', found '{}'", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }

    let mut stations = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let number = |idx: usize| -> Result<f64, CliError> {
            record[idx]
                .parse::<f64>()
                .map_err(|_| csv_err(line, format!("{} '{}' is not a number", STATIONS_HEADER[idx], &record[idx])))
        };
        let station = GroundStation::new(&record[0], number(1)?, number(2)?)
            .map_err(|e| csv_err(line, e.to_string()))?;
        stations.push(station);
    }
    if stations.is_empty() {
        return Err(satqkd::Error::EmptyInput("station file").into());
    }
    Ok(stations)
}
