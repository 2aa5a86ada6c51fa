//! Writes a radial function and its transform to CSV and reads them back.

use std::sync::Arc;

use heisenberg_spherical::fan::FanGrid;
use heisenberg_spherical::io::{read_fan_csv, read_radial_csv, write_fan_csv, write_radial_csv};
use heisenberg_spherical::radial::RadialGrid;
use heisenberg_spherical::testfns::RadialSpec;
use heisenberg_spherical::transform::{spherical_transform, TransformPlan};

fn main() -> heisenberg_spherical::error::Result<()> {
    let radial = Arc::new(RadialGrid::gauss_legendre(1, 2.0, 40, 1.0, 30)?);
    let fan = Arc::new(FanGrid::lattice(1, 4, 0.25, 20)?);
    let plan = TransformPlan::new(radial.clone(), fan)?;
    let f = RadialSpec::Ball { radius: 1.0, power: 2 }.sample(radial)?;
    let big_f = spherical_transform(&f, &plan)?;

    let mut radial_csv = Vec::new();
    write_radial_csv(&f, &mut radial_csv)?;
    let mut fan_csv = Vec::new();
    write_fan_csv(&big_f, &mut fan_csv)?;
    println!("{}", String::from_utf8_lossy(&fan_csv).lines().take(4).collect::<Vec<_>>().join("\n"));

    let f2 = read_radial_csv(&radial_csv[..])?;
    let big_f2 = read_fan_csv(&fan_csv[..])?;
    println!("radial: {} bytes, identical {}", radial_csv.len(), f2.values() == f.values());
    println!("fan: {} bytes, identical {}", fan_csv.len(), big_f2.values() == big_f.values());
    Ok(())
}
