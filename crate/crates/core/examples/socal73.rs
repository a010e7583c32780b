//! Writes the synthetic 73-bus Southern California fixture.
//!
//! The network is a jittered 73-bus mesh over a 180 km x 138 km rectangle
//! with mixed wind/thermal/nuclear generation and a
//! WFPI field that rises toward the mountains in the north-east. The
//! ignition scale is calibrated by bisection so that the default simulator
//! settings disrupt about 95% of scenarios.
//!
//! Usage: `cargo run --release -p psps-core --example socal73 -- data/socal73.toml`

use std::collections::BTreeSet;

use psps_core::case::{Bus, Costs, DemandProfile, Environment, FuelKind, Generator, Line, Load, Network};
use psps_core::fire::{EnvLayers, Purpose, RngStream, Simulator};
use psps_core::geo::build_grid;
use psps_core::{save_case, PowerCase};

const SEED: u64 = 73;
const N_BUSES: usize = 73;
const LAT0: f64 = 33.42;
const LON0: f64 = -118.92;
const LAT_SPAN: f64 = 1.236;
const LON_SPAN: f64 = 1.940;
const HORIZON: usize = 24;
const TARGET: f64 = 0.95;
const CALIBRATION_N: usize = 4000;

struct Draw {
    rng: RngStream,
    k: u64,
}

impl Draw {
    fn new(purpose: Purpose) -> Self {
        Draw { rng: RngStream::new(SEED, 0, purpose, 0), k: 0 }
    }

    fn next(&mut self) -> f64 {
        self.k += 1;
        self.rng.uniform(self.k, 0)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

fn km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dy = (a.0 - b.0) * 110.9;
    let dx = (a.1 - b.1) * 92.4;
    (dx * dx + dy * dy).sqrt()
}

fn round(x: f64, digits: i32) -> f64 {
    let m = 10f64.powi(digits);
    (x * m).round() / m
}

fn build(ignition_scale: f64) -> PowerCase {
    let mut draw = Draw::new(Purpose::ExogenousIgnition);
    // Bus positions: a 9 x 8 jittered lattice plus one bus on the coast.
    let mut pos: Vec<(f64, f64)> = Vec::with_capacity(N_BUSES);
    for r in 0..8 {
        for c in 0..9 {
            let lat = LAT0 + LAT_SPAN * (r as f64 + 0.5 + draw.range(-0.3, 0.3)) / 8.0;
            let lon = LON0 + LON_SPAN * (c as f64 + 0.5 + draw.range(-0.3, 0.3)) / 9.0;
            pos.push((round(lat, 5), round(lon, 5)));
        }
    }
    pos.push((LAT0, LON0));
    // Corner buses pin the bounding rectangle.
    pos[8] = (LAT0, LON0 + LON_SPAN);
    pos[71] = (LAT0 + LAT_SPAN, LON0 + LON_SPAN);
    let buses: Vec<Bus> = pos
        .iter()
        .enumerate()
        .map(|(i, &(latitude, longitude))| Bus { id: format!("b{}", 101 + i), latitude, longitude, damage_cost: None })
        .collect();

    // Lines: Prim's minimum spanning tree, then the shortest extra links
    // until every bus has degree two and the line count reaches 108.
    let n = N_BUSES;
    let mut in_tree = vec![false; n];
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    in_tree[0] = true;
    for _ in 1..n {
        let mut best = (f64::INFINITY, 0, 0);
        for i in (0..n).filter(|&i| in_tree[i]) {
            for j in (0..n).filter(|&j| !in_tree[j]) {
                let d = km(pos[i], pos[j]);
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        in_tree[best.2] = true;
        edges.insert((best.1.min(best.2), best.1.max(best.2)));
    }
    let mut candidates: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|e| !edges.contains(e))
        .map(|(i, j)| (km(pos[i], pos[j]), i, j))
        .filter(|(d, _, _)| *d < 40.0)
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let degree = |edges: &BTreeSet<(usize, usize)>, i: usize| edges.iter().filter(|(a, b)| *a == i || *b == i).count();
    for &(_, i, j) in &candidates {
        if degree(&edges, i) < 2 || degree(&edges, j) < 2 {
            edges.insert((i, j));
        }
    }
    for &(_, i, j) in &candidates {
        if edges.len() >= 108 {
            break;
        }
        edges.insert((i, j));
    }
    let lines: Vec<Line> = edges
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let length = km(pos[i], pos[j]).max(1.0);
            let x_pu = 0.0006 * length;
            let mid = ((pos[i].0 + pos[j].0) / 2.0, (pos[i].1 + pos[j].1) / 2.0);
            let north = (mid.0 - LAT0) / LAT_SPAN;
            let east = (mid.1 - LON0) / LON_SPAN;
            let wfpi = 20.0 + 160.0 * (0.6 * north + 0.4 * east) + draw.range(0.0, 40.0);
            Line {
                id: format!("l{}", k + 1),
                from: buses[i].id.clone(),
                to: buses[j].id.clone(),
                susceptance: round(100.0 / x_pu, 2),
                thermal_limit: [175.0, 350.0, 500.0][(draw.next() * 3.0) as usize],
                length_km: round(length, 2),
                wfpi: round(wfpi, 1),
                damage_cost: None,
                fault_rate: None,
            }
        })
        .collect();

    // Loads on 51 buses; priorities scale with the bus load share.
    let mut loads = Vec::new();
    for i in 0..n {
        if i % 10 == 3 || i % 10 == 7 || i % 7 == 5 {
            continue;
        }
        if loads.len() == 51 {
            break;
        }
        loads.push((i, round(draw.range(20.0, 150.0), 1)));
    }
    let (dmin, dmax) = loads
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, d)| (a.min(d), b.max(d)));
    let loads: Vec<Load> = loads
        .iter()
        .enumerate()
        .map(|(k, &(i, d))| Load {
            id: format!("d{}", k + 1),
            bus: buses[i].id.clone(),
            base_demand: d,
            priority: round(50.0 + 950.0 * (d - dmin) / (dmax - dmin), 1),
        })
        .collect();
    let total_load: f64 = loads.iter().map(|l| l.base_demand).sum::<f64>() * 1.2;

    // Generation: one nuclear unit, ten wind farms in the east, thermal
    // units sized to cover 1.3x the peak load in total.
    let mut generators = Vec::new();
    generators.push(Generator {
        id: "g1".into(),
        bus: buses[9].id.clone(),
        p_min: 0.0,
        p_max: 400.0,
        fuel: FuelKind::Nuclear,
        damage_cost: None,
    });
    for k in 0..10 {
        let i = 6 + 9 * (k % 8) + k / 8;
        generators.push(Generator {
            id: format!("g{}", generators.len() + 1),
            bus: buses[i].id.clone(),
            p_min: 0.0,
            p_max: round(draw.range(50.0, 150.0), 1),
            fuel: FuelKind::Wind,
            damage_cost: None,
        });
    }
    let installed: f64 = generators.iter().map(|g| g.p_max).sum();
    let thermal_total = 1.3 * total_load - installed;
    let thermal_buses = [0, 2, 4, 11, 13, 19, 21, 23, 27, 29, 31, 37, 39, 41, 45, 47, 49, 55, 57, 59, 63, 65, 67, 69, 72];
    for &i in &thermal_buses {
        generators.push(Generator {
            id: format!("g{}", generators.len() + 1),
            bus: buses[i].id.clone(),
            p_min: 0.0,
            p_max: round(thermal_total / thermal_buses.len() as f64, 1),
            fuel: FuelKind::Thermal,
            damage_cost: None,
        });
    }

    let network = Network { buses, generators, lines, loads };
    let n_lines = network.lines.len() as f64;
    PowerCase::new(
        "socal73",
        network,
        Costs::default(),
        Environment {
            // Faults alone leave exp(-1) of scenarios undisturbed.
            default_fault_rate: round(1.0 / (HORIZON as f64 * n_lines), 8),
            ignition_scale,
            spread_reference: 0.2,
            ..Environment::default()
        },
        DemandProfile { horizon: HORIZON, peak_periods: (9..=12).chain(17..=20).collect(), peak_factor: 1.2 },
    )
    .expect("generated case is valid")
}

fn disruption_rate(case: &PowerCase) -> f64 {
    let (geom, maps) = build_grid(case, 1000.0).expect("grid");
    let env = EnvLayers::uniform(case, &geom);
    let sim = Simulator::new(case, &geom, &maps, &env).expect("simulator");
    let scens = sim.generate(CALIBRATION_N, SEED).expect("scenarios");
    scens.iter().filter(|s| s.is_disruptive()).count() as f64 / CALIBRATION_N as f64
}

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "data/socal73.toml".into());
    let (mut lo, mut hi) = (1e-6f64, 1.0f64);
    for _ in 0..20 {
        let mid = (lo * hi).sqrt();
        if disruption_rate(&build(mid)) < TARGET {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let scale = (lo * hi).sqrt();
    let case = build(round(scale, 4 - scale.log10().floor() as i32));
    println!(
        "{} buses, {} generators, {} lines, {} loads; ignition scale {}; disruption rate {:.4}",
        case.n_buses(),
        case.n_generators(),
        case.n_lines(),
        case.n_loads(),
        case.environment.ignition_scale,
        disruption_rate(&case)
    );
    save_case(&case, &out).expect("write case");
}
