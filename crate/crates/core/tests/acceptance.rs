//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use foliamap::delisle::{
    apex_latitude, build_conic, geodesic_flatness, longitude_for_plane_angle, max_deviation,
    midpoint_standard_parallels, optimize_standard_parallels, ConicParams,
};
use foliamap::distortion::{distortion_grid, local_metric_with, perfect_defect, Differencing};
use foliamap::fit::{concentric_residual, fit_line, line_distance};
use foliamap::projections::{CylindricalProfile, PlanePoint, Pole, ProjectionSpec};
use foliamap::sphere::{
    destination, great_circle_distance, sample_geodesic, sample_meridian, sample_parallel, triangle_angles,
    triangle_midline, GeoPoint, Region, SphericalTriangle,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rad(d: f64) -> f64 {
    d.to_radians()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn empire() -> ConicParams<f64> {
    build_conic(rad(47.5), rad(62.5)).unwrap()
}

fn window() -> Region<f64> {
    Region::from_degrees(40.0, 70.0, -30.0, 30.0).unwrap()
}

fn c1_midpoint_rule() -> Outcome {
    let (a, b) = midpoint_standard_parallels(rad(40.0), rad(70.0)).map_err(|e| e.to_string())?;
    let (a, b) = (a.to_degrees(), b.to_degrees());
    check((a - 47.5).abs() <= 1e-12 && (b - 62.5).abs() <= 1e-12, || format!("got {a}, {b}"))?;
    Ok(format!("phi1 = {a}, phi2 = {b}"))
}

fn c2_standard_parallels() -> Outcome {
    let p = empire();
    let k1 = p.parallel_scale(p.phi1()).unwrap();
    let k2 = p.parallel_scale(p.phi2()).unwrap();
    check((k1 - 1.0).abs() <= 1e-10 && (k2 - 1.0).abs() <= 1e-10, || format!("k = {k1}, {k2}"))?;
    let grid = distortion_grid(&p.spec(), &window(), (31, 13)).map_err(|e| e.to_string())?;
    let worst = grid.samples.iter().map(|m| (m.h - 1.0).abs()).fold(0.0, f64::max);
    check(worst <= 1e-8, || format!("max |h - 1| = {worst:e}"))?;
    Ok(format!("|k1 - 1| = {:.1e}, |k2 - 1| = {:.1e}, max |h - 1| = {worst:.1e}", (k1 - 1.0).abs(), (k2 - 1.0).abs()))
}

fn c3_deviation_profile() -> Outcome {
    let p = empire();
    let d = max_deviation(&p, rad(40.0), rad(70.0)).map_err(|e| e.to_string())?;
    let at = d.argmax_phi.to_degrees();
    let mid = p.parallel_scale(rad(55.0)).unwrap() - 1.0;
    check((d.value - 0.0376).abs() <= 0.0005, || format!("max deviation {}", d.value))?;
    check((at - 70.0).abs() < 1e-9, || format!("attained at {at}"))?;
    check((mid + 0.0086).abs() <= 0.0005, || format!("k(55) - 1 = {mid}"))?;
    Ok(format!("max |k - 1| = {:.6} at {at} deg, k(55) - 1 = {mid:.6}", d.value))
}

fn c4_optimizer() -> Outcome {
    let r = optimize_standard_parallels(rad(40.0), rad(70.0)).map_err(|e| e.to_string())?;
    check(r.minimax_deviation <= r.midpoint_deviation, || {
        format!("minimax {} > midpoint {}", r.minimax_deviation, r.midpoint_deviation)
    })?;
    Ok(format!(
        "optimum ({:.4}, {:.4}) deg, minimax {:.6} vs midpoint {:.6}, improvement ratio {:.4}",
        r.phi1_opt.to_degrees(),
        r.phi2_opt.to_degrees(),
        r.minimax_deviation,
        r.midpoint_deviation,
        r.improvement_ratio
    ))
}

fn c5_apex() -> Outcome {
    let apex = apex_latitude(&empire()).to_degrees();
    check(apex > 90.0 && (apex - 94.9).abs() <= 0.1, || format!("apex {apex}"))?;
    Ok(format!("apex latitude {apex:.4} deg ({:.4} beyond the pole)", apex - 90.0))
}

fn c6_span() -> Outcome {
    let span = longitude_for_plane_angle(&empire(), PI).to_degrees();
    check(span > 180.0 && (span - 220.4).abs() <= 0.1, || format!("span {span}"))?;
    Ok(format!("half-turn about the apex covers {span:.4} deg of longitude"))
}

fn c7_stereographic_factor() -> Outcome {
    let tangent = GeoPoint::from_degrees(60.0, 100.0).unwrap();
    let spec = ProjectionSpec::ObliqueStereographic { tangent };
    let far = destination(tangent, rad(40.0), rad(120.0)).map_err(|e| e.to_string())?;
    let d = great_circle_distance(tangent, far);
    let metric = |p| local_metric_with(&spec, p, 1e-3, Differencing::Richardson).map_err(|e| e.to_string());
    let (m0, m1) = (metric(tangent)?, metric(far)?);
    let ratio = m1.k / m0.k;
    let expected = 1.0 / (d / 2.0).cos().powi(2);
    check((ratio - 4.0).abs() <= 1e-9, || format!("ratio {ratio}"))?;
    check((ratio - expected).abs() <= 1e-9, || format!("ratio {ratio} vs sec^2(d/2) {expected}"))?;
    Ok(format!("d = {:.6} deg, ratio {ratio:.12}, |ratio - 4| = {:.1e}", d.to_degrees(), (ratio - 4.0).abs()))
}

fn builtins() -> Vec<(&'static str, ProjectionSpec<f64>)> {
    let cyl = |p| ProjectionSpec::cylindrical(p, 0.0).unwrap();
    vec![
        ("stereographic north", ProjectionSpec::Stereographic { from: Pole::North }),
        ("stereographic south", ProjectionSpec::Stereographic { from: Pole::South }),
        (
            "stereographic oblique",
            ProjectionSpec::ObliqueStereographic { tangent: GeoPoint::from_degrees(55.0, 0.0).unwrap() },
        ),
        ("gnomonic", ProjectionSpec::Gnomonic { tangent: GeoPoint::from_degrees(55.0, 0.0).unwrap() }),
        ("plate carree", cyl(CylindricalProfile::Equirectangular)),
        ("mercator", cyl(CylindricalProfile::Conformal)),
        ("equal-area cylindrical", cyl(CylindricalProfile::EqualArea)),
        ("equidistant conic", empire().spec()),
    ]
}

fn c8_defect() -> Outcome {
    let mut worst: Option<(f64, &str)> = None;
    for (name, spec) in builtins() {
        let d = perfect_defect(&spec, &window(), (61, 61)).map_err(|e| format!("{name}: {e}"))?;
        check(d.defect > 1e-3, || format!("{name}: defect {}", d.defect))?;
        if worst.is_none_or(|(v, _)| d.defect < v) {
            worst = Some((d.defect, name));
        }
    }
    let pc = ProjectionSpec::<f64>::cylindrical(CylindricalProfile::Equirectangular, 0.0).unwrap();
    let band = Region::from_degrees(-10.0, 10.0, -30.0, 30.0).unwrap();
    let d = perfect_defect(&pc, &band, (21, 13)).map_err(|e| e.to_string())?;
    check((d.defect - 0.01543).abs() <= 1e-5, || format!("plate carree band defect {}", d.defect))?;

    // dyadic bounds in radians on a 1/64 lattice: every sample of an inner
    // grid is bit-identical to a sample of the outer one
    let nested = [
        ((0.6875, 1.25, -0.5, 0.5), (37, 65)),
        ((0.75, 1.125, -0.375, 0.375), (25, 49)),
        ((0.875, 1.0, -0.125, 0.125), (9, 17)),
        ((0.9375, 0.96875, -0.03125, 0.03125), (3, 5)),
    ];
    for (name, spec) in builtins() {
        let mut prev = f64::INFINITY;
        for ((a, b, c, e), res) in nested {
            let r = Region::new(a, b, c, e).unwrap();
            let v = perfect_defect(&spec, &r, res).map_err(|e| format!("{name}: {e}"))?.defect;
            check(v <= prev, || format!("{name}: defect rises from {prev} to {v} on a smaller region"))?;
            prev = v;
        }
    }
    let (least, name) = worst.unwrap();
    Ok(format!("smallest built-in defect {least:.4} ({name}), plate carree band {:.8}, nesting monotone", d.defect))
}

fn project(spec: &ProjectionSpec<f64>, pts: &[GeoPoint<f64>]) -> Vec<PlanePoint<f64>> {
    pts.iter().map(|p| spec.forward(*p).unwrap()).collect()
}

fn c9_foliation_images() -> Outcome {
    const N: usize = 256;
    let mut worst = 0.0f64;
    let mut note = |what: &str, r: f64| -> Result<(), String> {
        worst = worst.max(r);
        check(r < 1e-9, || format!("{what}: residual {r:e}"))
    };
    let origin = PlanePoint::new(0.0, 0.0);

    let st = ProjectionSpec::Stereographic { from: Pole::North };
    for lat in [-80.0, -45.0, 0.0, 30.0, 60.0] {
        let img = project(&st, &sample_parallel(rad(lat), (-PI, PI), N).unwrap());
        note("stereographic parallel", concentric_residual(&img, origin).1)?;
    }
    for lon in [-150.0, -60.0, 0.0, 45.0, 170.0] {
        let img = project(&st, &sample_meridian(rad(lon), (rad(-89.0), rad(80.0)), N).unwrap());
        let f = fit_line(&img).unwrap();
        note("stereographic meridian", f.max_residual)?;
        note("stereographic meridian through origin", line_distance(origin, f.centroid, f.direction))?;
    }

    let gn = ProjectionSpec::Gnomonic { tangent: GeoPoint::from_degrees(55.0, 0.0).unwrap() };
    let arcs = [((40.0, -30.0), (70.0, 30.0)), ((50.0, 30.0), (50.0, -30.0)), ((35.0, 10.0), (75.0, 15.0))];
    for ((a, b), (c, d)) in arcs {
        let pts = sample_geodesic(GeoPoint::from_degrees(a, b).unwrap(), GeoPoint::from_degrees(c, d).unwrap(), N)
            .unwrap();
        note("gnomonic great circle", fit_line(&project(&gn, &pts)).unwrap().max_residual)?;
    }

    let p = empire();
    let conic = p.spec();
    let apex = PlanePoint::new(0.0, p.rho1());
    for lon in [-30.0, -10.0, 0.0, 20.0, 30.0] {
        let img = project(&conic, &sample_meridian(rad(lon), (rad(40.0), rad(70.0)), N).unwrap());
        let f = fit_line(&img).unwrap();
        note("conic meridian", f.max_residual)?;
        note("conic meridian through apex", line_distance(apex, f.centroid, f.direction))?;
    }
    for lat in [40.0, 55.0, 70.0] {
        let img = project(&conic, &sample_parallel(rad(lat), (rad(-30.0), rad(30.0)), N).unwrap());
        note("conic parallel about apex", concentric_residual(&img, apex).1)?;
    }
    Ok(format!("largest residual over all curves {worst:.1e}"))
}

fn random_point(rng: &mut ChaCha8Rng) -> GeoPoint<f64> {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let lon: f64 = rng.gen_range(-PI..PI);
    GeoPoint::new(z.asin(), lon).unwrap()
}

fn c10_triangles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d65_6e65);
    let (mut done, mut violations, mut min_gap) = (0, 0, f64::INFINITY);
    while done < 1000 {
        let Ok(t) = SphericalTriangle::new(random_point(&mut rng), random_point(&mut rng), random_point(&mut rng))
        else {
            continue;
        };
        let (a, b, c) = triangle_angles(&t).map_err(|e| e.to_string())?;
        let (de, half_ac) = triangle_midline(&t).map_err(|e| e.to_string())?;
        if !(a + b + c > PI && de > half_ac) {
            violations += 1;
        }
        min_gap = min_gap.min(de - half_ac);
        done += 1;
    }
    check(violations == 0, || format!("{violations} violations"))?;

    let oct = SphericalTriangle::new(
        GeoPoint::from_degrees(0.0, 0.0).unwrap(),
        GeoPoint::from_degrees(0.0, 90.0).unwrap(),
        GeoPoint::<f64>::north_pole(),
    )
    .unwrap();
    let (a, b, c) = triangle_angles(&oct).unwrap();
    let (de, half_ac) = triangle_midline(&oct).unwrap();
    check((a + b + c - 1.5 * PI).abs() <= 1e-10, || format!("octant angle sum {}", a + b + c))?;
    check((de - PI / 3.0).abs() <= 1e-10 && (half_ac - PI / 4.0).abs() <= 1e-10, || {
        format!("octant DE = {de}, AC/2 = {half_ac}")
    })?;
    Ok(format!(
        "1000 triangles, 0 violations, smallest DE - AC/2 = {min_gap:.2e}; octant sum {:.12} pi, DE {:.10} deg",
        (a + b + c) / PI,
        de.to_degrees()
    ))
}

fn c11_geodesic_flatness() -> Outcome {
    let a = GeoPoint::from_degrees(50.0, 30.0).unwrap();
    let b = GeoPoint::from_degrees(50.0, -30.0).unwrap();
    let fit = geodesic_flatness(&empire(), a, b, 1000).map_err(|e| e.to_string())?;
    let ratio = fit.max_line_residual / fit.chord;
    check(ratio < 0.02, || format!("sagitta/chord {ratio}"))?;
    let c = fit.circle.ok_or("no circle fitted")?;
    check(c.rms_residual <= fit.max_line_residual, || format!("circle rms {} > sagitta", c.rms_residual))?;
    check(c.radius > 5.0 * fit.chord, || format!("radius {} vs chord {}", c.radius, fit.chord))?;
    Ok(format!(
        "chord {:.6}, sagitta/chord {ratio:.3e}, radius {:.3} = {:.1} chords, circle rms {:.2e}",
        fit.chord,
        c.radius,
        c.radius / fit.chord,
        c.rms_residual
    ))
}

fn run_twice(dir: &Path, name: &str, args: &[&str], outputs: &[&str]) -> Result<(), String> {
    let mut runs = Vec::new();
    for round in 0..2 {
        let mut argv = vec!["foliamap".to_string()];
        argv.extend(args.iter().map(|a| a.replace("{dir}", dir.to_str().unwrap())));
        let code = foliamap::cli::run(argv);
        check(code == 0, || format!("{name}: exit code {code} on run {round}"))?;
        let bytes: Vec<Vec<u8>> = outputs
            .iter()
            .map(|o| std::fs::read(dir.join(o)).map_err(|e| format!("{name}: {o}: {e}")))
            .collect::<Result<_, _>>()?;
        for o in outputs {
            std::fs::remove_file(dir.join(o)).unwrap();
        }
        runs.push(bytes);
    }
    check(runs[0] == runs[1], || format!("{name}: outputs differ between runs"))
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    std::fs::write(d.join("conic.json"), r#"{"type":"delisle","phi1":47.5,"phi2":62.5}"#).unwrap();
    std::fs::write(d.join("stereo.json"), r#"{"type":"stereographic","pole":"north"}"#).unwrap();
    let cases: [(&str, Vec<&str>, Vec<&str>); 6] = [
        (
            "project",
            vec!["project", "--spec", "{dir}/conic.json", "--point", "55,10", "--point", "-89,0", "--csv", "{dir}/p.csv"],
            vec!["p.csv"],
        ),
        (
            "graticule",
            vec![
                "graticule", "--spec", "{dir}/stereo.json", "--region", "-80,30,-180,180", "--step", "15",
                "--outline", "--labels", "--svg", "{dir}/g.svg", "--csv", "{dir}/g.csv",
            ],
            vec!["g.svg", "g.csv"],
        ),
        (
            "distortion",
            vec![
                "distortion", "--spec", "{dir}/conic.json", "--region", "40,70,-30,30", "--res", "31x31", "--csv",
                "{dir}/d.csv", "--json", "{dir}/d.json",
            ],
            vec!["d.csv", "d.json"],
        ),
        (
            "defect",
            vec!["defect", "--spec", "{dir}/conic.json", "--region", "40,70,-30,30", "--res", "31x31", "--json", "{dir}/f.json"],
            vec!["f.json"],
        ),
        ("optimize", vec!["optimize", "--south", "40", "--north", "70", "--json", "{dir}/o.json"], vec!["o.json"]),
        (
            "geodesic",
            vec![
                "geodesic", "--spec", "{dir}/conic.json", "--from", "50,30", "--to", "50,-30", "--json", "{dir}/e.json",
                "--svg", "{dir}/e.svg", "--csv", "{dir}/e.csv",
            ],
            vec!["e.json", "e.svg", "e.csv"],
        ),
    ];
    for (name, args, outs) in &cases {
        run_twice(d, name, args, outs)?;
    }
    Ok(format!("{} subcommands byte-identical across two runs", cases.len()))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("1 midpoint rule", Duration::from_millis(1), c1_midpoint_rule),
        ("2 standard parallels", Duration::from_secs(1), c2_standard_parallels),
        ("3 deviation profile", Duration::from_secs(1), c3_deviation_profile),
        ("4 optimizer dominance", Duration::from_secs(10), c4_optimizer),
        ("5 apex beyond the pole", Duration::from_millis(1), c5_apex),
        ("6 parallel span", Duration::from_millis(1), c6_span),
        ("7 stereographic factor four", Duration::from_secs(1), c7_stereographic_factor),
        ("8 perfect-map defect", Duration::from_secs(5), c8_defect),
        ("9 foliation images", Duration::from_secs(5), c9_foliation_images),
        ("10 spherical triangles", Duration::from_secs(2), c10_triangles),
        ("11 geodesic flatness", Duration::from_secs(1), c11_geodesic_flatness),
        ("12 CLI determinism", Duration::from_secs(30), c12_determinism),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let t0 = Instant::now();
        let outcome = f();
        let took = t0.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; over the {budget:?} budget")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<28} {took:>10.3?}  {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<28} {took:>10.3?}  {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
