//! Minimal SVG rendering for network snapshots, SAA intervals, scenario
//! scatters and bar comparisons.

use std::fmt::Write;

use psps_core::case::ComponentKind;
use psps_core::evaluation::{EvaluationReport, SaaSummary};
use psps_core::milp::ShutoffPlan;
use psps_core::{ComponentId, PowerCase};

const W: f64 = 720.0;
const H: f64 = 540.0;
const PAD: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(body, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(body, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(title));
        Svg { body }
    }

    fn raw(&mut self, s: &str) {
        self.body.push_str(s);
        self.body.push('\n');
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(self.body, r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{}</text>"#, escape(s));
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Linear map from `[lo, hi]` onto `[a, b]`; a degenerate range maps to the midpoint.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi - lo <= f64::EPSILON {
        (a + b) / 2.0
    } else {
        a + (v - lo) / (hi - lo) * (b - a)
    }
}

/// Green for fully served, red for fully shed.
fn shed_color(f: f64) -> String {
    let f = f.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(44.0, 222.0), lerp(162.0, 45.0), lerp(95.0, 38.0))
}

fn axes(svg: &mut Svg, x_label: &str, y_label: &str, y_lo: f64, y_hi: f64) {
    svg.raw(&format!(
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    ));
    for k in 0..=4 {
        let v = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let y = scale(v, y_lo, y_hi, H - PAD, PAD);
        svg.raw(&format!(r##"<line x1="{PAD}" x2="{}" y1="{y:.1}" y2="{y:.1}" stroke="#ddd"/>"##, W - PAD));
        svg.text(PAD - 6.0, y + 4.0, "end", &format!("{v:.4}"));
    }
    svg.text(W / 2.0, H - 14.0, "middle", x_label);
    svg.raw(&format!(
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    ));
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-9 * hi.abs().max(1.0));
    (lo - pad, hi + pad)
}

/// Network state at period `t`: de-energized lines dashed, bus fill by
/// the shed fraction of the loads at that bus.
pub fn network_snapshot(case: &PowerCase, plan: &ShutoffPlan, t: usize) -> String {
    let buses = &case.network.buses;
    let (lat_lo, lat_hi) = padded_range(buses.iter().map(|b| b.latitude));
    let (lon_lo, lon_hi) = padded_range(buses.iter().map(|b| b.longitude));
    let mid = ((lat_lo + lat_hi) / 2.0).to_radians().cos();
    let span = ((lon_hi - lon_lo) * mid).max(lat_hi - lat_lo);
    let unit = (W - 2.0 * PAD).min(H - 2.0 * PAD) / span;
    let x0 = W / 2.0 - (lon_hi - lon_lo) * mid * unit / 2.0;
    let y0 = H / 2.0 + (lat_hi - lat_lo) * unit / 2.0;
    let pos = |i: usize| {
        let b = &buses[i];
        (x0 + (b.longitude - lon_lo) * mid * unit, y0 - (b.latitude - lat_lo) * unit)
    };
    let flat = |id: ComponentId| case.flat_index(id);

    let mut svg = Svg::new(&format!("{} at period {t}", case.name));
    for l in 0..case.n_lines() {
        let (i, j) = case.line_ends(l);
        let ((x1, y1), (x2, y2)) = (pos(i), pos(j));
        let on = plan.energized(flat(ComponentId::line(l)), t);
        let style = if on { r##"stroke="#444""## } else { r##"stroke="#b00" stroke-dasharray="6 4""## };
        svg.raw(&format!(
            r#"<line class="line {}" data-id="{}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke-width="1.5" {style}/>"#,
            if on { "on" } else { "off" },
            escape(&case.network.lines[l].id)
        ));
    }
    let mut demand = vec![0.0; buses.len()];
    let mut served = vec![0.0; buses.len()];
    for d in 0..case.n_loads() {
        let b = case.load_bus(d);
        demand[b] += case.demand(d, t).unwrap_or(0.0);
        served[b] += plan.served[d][t - 1] * case.demand(d, t).unwrap_or(0.0);
    }
    for g in 0..case.n_generators() {
        let (x, y) = pos(case.gen_bus(g));
        let on = plan.energized(flat(ComponentId::generator(g)), t);
        svg.raw(&format!(
            r##"<rect class="gen {}" x="{:.1}" y="{:.1}" width="8" height="8" fill="{}" stroke="#333"/>"##,
            if on { "on" } else { "off" },
            x + 4.0,
            y - 12.0,
            if on { "#333" } else { "white" }
        ));
    }
    for (i, b) in buses.iter().enumerate() {
        let (x, y) = pos(i);
        let on = plan.energized(flat(ComponentId::bus(i)), t);
        let fill = if demand[i] > 0.0 { shed_color(1.0 - served[i] / demand[i]) } else { "#999".into() };
        let dash = if on { "" } else { r#" stroke-dasharray="2 2""# };
        svg.raw(&format!(
            r#"<circle class="bus {}" data-id="{}" cx="{x:.1}" cy="{y:.1}" r="5" fill="{fill}" stroke="black"{dash}/>"#,
            if on { "on" } else { "off" },
            escape(&b.id)
        ));
    }
    let off_lines = plan.off_components(case, t, ComponentKind::Line).len();
    svg.text(PAD, H - 14.0, "start", &format!("{off_lines} lines de-energized; fill shows shed fraction"));
    svg.finish()
}

/// Lower and upper bound means with 95% intervals per sample size.
pub fn ci_bars(summary: &[SaaSummary]) -> String {
    let mut svg = Svg::new("SAA bounds by sample size");
    let ends = |m: f64, h: f64| {
        let h = if h.is_finite() { h } else { 0.0 };
        [m - h, m + h]
    };
    let (lo, hi) = padded_range(
        summary
            .iter()
            .flat_map(|s| ends(s.lower_mean, s.lower_half_width).into_iter().chain(ends(s.upper_mean, s.upper_half_width))),
    );
    axes(&mut svg, "sample size", "objective", lo, hi);
    let n = summary.len().max(1) as f64;
    for (k, s) in summary.iter().enumerate() {
        let xc = scale(k as f64 + 0.5, 0.0, n, PAD, W - PAD);
        svg.text(xc, H - PAD + 16.0, "middle", &s.size.to_string());
        for (series, mean, hw, dx, color) in [
            ("lb", s.lower_mean, s.lower_half_width, -8.0, PALETTE[0]),
            ("ub", s.upper_mean, s.upper_half_width, 8.0, PALETTE[1]),
        ] {
            let [a, b] = ends(mean, hw);
            let x = xc + dx;
            let (ya, yb, ym) = (scale(a, lo, hi, H - PAD, PAD), scale(b, lo, hi, H - PAD, PAD), scale(mean, lo, hi, H - PAD, PAD));
            svg.raw(&format!(
                r#"<g class="ci {series}" data-size="{}"><line x1="{x:.1}" x2="{x:.1}" y1="{ya:.1}" y2="{yb:.1}" stroke="{color}" stroke-width="2"/><circle cx="{x:.1}" cy="{ym:.1}" r="4" fill="{color}"/></g>"#,
                s.size
            ));
        }
    }
    svg.text(W - PAD, PAD - 8.0, "end", "blue: lower bound, red: upper bound");
    svg.finish()
}

/// Per-scenario total cost. With one report the x axis is the scenario
/// index; with more, every report is plotted against the first.
pub fn scenario_scatter(reports: &[EvaluationReport]) -> String {
    let first = &reports[0];
    let paired = reports.len() > 1;
    let title = if paired {
        format!("Scenario costs against {}", first.tag)
    } else {
        format!("Scenario costs of {}", first.tag)
    };
    let mut svg = Svg::new(&title);
    let (y_lo, y_hi) = padded_range(reports.iter().flat_map(|r| r.costs.iter().map(|c| c.total())));
    let (x_lo, x_hi) = if paired {
        (y_lo, y_hi)
    } else {
        (0.0, first.costs.len().saturating_sub(1).max(1) as f64)
    };
    axes(&mut svg, if paired { &first.tag } else { "scenario" }, "total cost", y_lo, y_hi);
    if paired {
        let (a, b) = (scale(x_lo, x_lo, x_hi, PAD, W - PAD), scale(x_hi, x_lo, x_hi, PAD, W - PAD));
        let (ya, yb) = (scale(x_lo, y_lo, y_hi, H - PAD, PAD), scale(x_hi, y_lo, y_hi, H - PAD, PAD));
        svg.raw(&format!(r##"<line x1="{a:.1}" y1="{ya:.1}" x2="{b:.1}" y2="{yb:.1}" stroke="#999" stroke-dasharray="4 4"/>"##));
    }
    let series: Vec<&EvaluationReport> = if paired { reports[1..].iter().collect() } else { vec![first] };
    for (k, r) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for (i, c) in r.costs.iter().enumerate() {
            let xv = if paired { first.costs.get(i).map_or(f64::NAN, |f| f.total()) } else { i as f64 };
            if !xv.is_finite() {
                continue;
            }
            let x = scale(xv, x_lo, x_hi, PAD, W - PAD);
            let y = scale(c.total(), y_lo, y_hi, H - PAD, PAD);
            svg.raw(&format!(r#"<circle class="pt" cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}" fill-opacity="0.7"/>"#));
        }
        svg.text(W - PAD, PAD + 14.0 * k as f64, "end", &r.tag);
    }
    svg.finish()
}

/// One bar per labelled value.
pub fn bars(title: &str, y_label: &str, items: &[(String, f64)]) -> String {
    let mut svg = Svg::new(title);
    let (_, hi) = padded_range(items.iter().map(|(_, v)| *v).chain([0.0]));
    let lo = items.iter().map(|(_, v)| *v).fold(0.0, f64::min);
    axes(&mut svg, "plan", y_label, lo, hi);
    let n = items.len().max(1) as f64;
    let width = (W - 2.0 * PAD) / n * 0.7;
    for (k, (label, v)) in items.iter().enumerate() {
        let xc = scale(k as f64 + 0.5, 0.0, n, PAD, W - PAD);
        let (y0, y1) = (scale(0.0, lo, hi, H - PAD, PAD), scale(*v, lo, hi, H - PAD, PAD));
        svg.raw(&format!(
            r#"<rect class="bar" x="{:.1}" y="{:.1}" width="{width:.1}" height="{:.1}" fill="{}"/>"#,
            xc - width / 2.0,
            y0.min(y1),
            (y0 - y1).abs(),
            PALETTE[0]
        ));
        svg.text(xc, H - PAD + 16.0, "middle", label);
    }
    svg.finish()
}
