//! Run configuration, verification suites and report files.
//!
//! Each command produces a list of [`Check`] rows. A row passes when its value meets the
//! expected value under its comparison rule; the report is trusted when no quadrature in
//! the suite flagged a large tail.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::concmaps::{b_map, bt_identity_residual, ConcentrationFrame, TDelta};
use crate::error::{Result, SrlError};
use crate::extension::stein_tomas_quotient;
use crate::geometry::{make_sphere_grid, Exponent, Lattice, ProfileFunction, SphereFunction};
use crate::numerics::{smooth_ramp, C64};
use crate::refinednorm::{
    bilinear_ratio, cap_profile_identity_residual, dyadic_sum_ratio, q_star, random_band_limited, refined_norm,
    refined_norm_bound, BilinearConfig, CapAtlas, CapIdentityConfig, DyadicCube, RefinedNormConfig,
};
use crate::search::{gap_report, random_smooth, SearchConfig};
use crate::strichartz::{gaussian_strichartz_constant, propagate, strichartz_quotient, Dispersion};
use crate::trial::{antipodal_sweep, g_eps, l2_sweep, single_bump_sweep, Cutoff, ExpansionFit};
use crate::twoprofile::{
    c_constant, phi_of_t, phi_q_functional, tilde_strichartz_quotient, two_profile_inequality_residual, TwoProfileInput,
};

pub const COMMANDS: [&str; 7] = ["constants", "strichartz", "expansion", "optimize", "refined", "concmaps", "verify"];

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNTRUSTED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: usize,
    /// Sphere grid for the ascent; `None` keeps the per-dimension default.
    pub sphere_resolution: Option<usize>,
    /// Radial nodes of the space grid used by the ascent.
    pub space_radial_nodes: Option<usize>,
    pub profile_spacing: f64,
    pub profile_half: usize,
    pub eps_list: Vec<f64>,
    /// Per-row tolerance overrides keyed by row name.
    pub tolerances: BTreeMap<String, f64>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub starts: usize,
    pub quick: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            sphere_resolution: None,
            space_radial_nodes: None,
            profile_spacing: 0.25,
            profile_half: 32,
            eps_list: vec![0.3, 0.06f64.sqrt(), 0.2, 0.02f64.sqrt()],
            tolerances: BTreeMap::new(),
            out_dir: PathBuf::from("srl-out"),
            seed: 1,
            starts: 8,
            quick: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SrlError::Config(m));
        if self.n != 2 && self.n != 3 {
            return bad(format!("N must be 2 or 3 (got {})", self.n));
        }
        if self.eps_list.len() < 4 {
            return bad("eps_list needs at least 4 values".into());
        }
        for &e in &self.eps_list {
            if !(e > 0.0 && e <= 0.35) {
                return bad(format!("eps values must lie in (0, 0.35] (got {e})"));
            }
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps_list must be strictly decreasing".into());
        }
        for (k, &t) in &self.tolerances {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("tolerance {k} must be positive (got {t})"));
            }
        }
        if !(self.profile_spacing > 0.0 && self.profile_spacing <= 1.0) {
            return bad(format!("profile_spacing must lie in (0, 1] (got {})", self.profile_spacing));
        }
        if (self.profile_half as f64) * self.profile_spacing < 6.0 {
            return bad("profile box half-width below 6".into());
        }
        if let Some(r) = self.sphere_resolution {
            let min = if self.n == 3 { 16 } else { 64 };
            if r < min {
                return Err(SrlError::ResolutionTooSmall(r, min));
            }
        }
        if let Some(r) = self.space_radial_nodes {
            if r < 120 {
                return Err(SrlError::ResolutionTooSmall(r, 120));
            }
        }
        if self.starts == 0 {
            return bad("starts must be positive".into());
        }
        Ok(())
    }

    /// Stable digest of the canonical JSON form. The output directory does not take part.
    pub fn hash(&self, command: &str) -> String {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        let body = serde_json::json!({ "command": command, "config": c });
        hex::encode(Sha256::digest(body.to_string().as_bytes()))
    }

    fn search(&self, n: usize) -> Result<SearchConfig> {
        let mut s = SearchConfig::for_dimension(n)?;
        if n == self.n {
            if let Some(r) = self.sphere_resolution {
                s.sphere_resolution = r;
            }
            if let Some(r) = self.space_radial_nodes {
                s.radial_nodes = r;
            }
        }
        s.starts = self.starts;
        s.seed = self.seed;
        Ok(if self.quick { s.quick() } else { s })
    }

    fn gaussian(&self, d: usize) -> ProfileFunction {
        ProfileFunction::gaussian(d, self.profile_spacing, self.profile_half)
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| SrlError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    Derived,
    Trivial,
}

/// How `value` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Compare {
    /// |value - expected| <= tolerance
    Abs,
    /// |value / expected - 1| <= tolerance
    Rel,
    /// value >= expected - tolerance
    AtLeast,
    /// value <= expected + tolerance
    AtMost,
    /// value > expected strictly; tolerance unused
    Exceeds,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub compare: Compare,
    pub provenance: Provenance,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, expected: f64, tolerance: f64, compare: Compare, provenance: Provenance) -> Self {
        let mut c = Check { name: name.into(), value, expected, tolerance, compare, provenance, pass: false };
        c.evaluate();
        c
    }

    fn evaluate(&mut self) {
        let (v, e, t) = (self.value, self.expected, self.tolerance);
        self.pass = v.is_finite()
            && match self.compare {
                Compare::Abs => (v - e).abs() <= t,
                Compare::Rel => (v / e - 1.0).abs() <= t,
                Compare::AtLeast => v >= e - t,
                Compare::AtMost => v <= e + t,
                Compare::Exceeds => v > e,
            };
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub results: Vec<Check>,
    pub trusted: bool,
    #[serde(skip)]
    pub csv: Vec<(String, String)>,
    #[serde(skip)]
    pub extra: Vec<(String, serde_json::Value)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if !self.passed() {
            EXIT_FAIL
        } else if !self.trusted {
            EXIT_UNTRUSTED
        } else {
            EXIT_OK
        }
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.results.iter().find(|c| c.name == name)
    }
}

struct Suite<'a> {
    cfg: &'a RunConfig,
    rows: Vec<Check>,
    trusted: bool,
    csv: Vec<(String, String)>,
    extra: Vec<(String, serde_json::Value)>,
}

impl<'a> Suite<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        Suite { cfg, rows: Vec::new(), trusted: true, csv: Vec::new(), extra: Vec::new() }
    }

    fn push(&mut self, name: &str, value: f64, expected: f64, tol: f64, cmp: Compare, prov: Provenance) {
        let tol = self.cfg.tolerances.get(name).copied().unwrap_or(tol);
        self.rows.push(Check::new(name, value, expected, tol, cmp, prov));
    }

    fn constants(&mut self) -> Result<()> {
        use Compare::*;
        use Provenance::*;
        self.push("c(4)", phi_of_t(1.0, 4.0)?, 1.5, 1e-10, Abs, Derived);
        self.push("c(6)", phi_of_t(1.0, 6.0)?, 2.5, 1e-10, Abs, Derived);
        self.push("S_2^G", gaussian_strichartz_constant(2), 1.0 / (8.0 * PI * PI), 1e-12, Rel, Derived);
        self.push("S_1^G", gaussian_strichartz_constant(1), (2.0 * PI).powi(-3) / 3f64.sqrt(), 1e-12, Rel, Derived);
        Ok(())
    }

    fn c2(&mut self) {
        self.push("c(2)", c_constant(2.0), 1.0, 1e-12, Compare::Abs, Provenance::Derived);
    }

    fn strichartz(&mut self) -> Result<()> {
        use Compare::*;
        use Provenance::*;
        for d in [1, 2] {
            let g = self.cfg.gaussian(d);
            let r = strichartz_quotient(&g, d, &Dispersion::Parabolic)?;
            self.trusted &= r.trusted;
            self.push(&format!("gaussian_quotient_d{d}"), r.quotient, gaussian_strichartz_constant(d), 1e-4, Rel, Derived);
        }
        // constant function on S^2 against its closed form 1/(4 pi^2)
        let sc = SearchConfig::for_dimension(3)?;
        let f = SphereFunction::constant(&sc.sphere()?, 1.0);
        let r = stein_tomas_quotient(&f, &sc.space()?)?;
        self.trusted &= r.trusted;
        self.push("stein_tomas_constant_S2", r.quotient, 1.0 / (4.0 * PI * PI), 1e-3, Rel, Derived);
        Ok(())
    }

    fn two_profile(&mut self) -> Result<()> {
        use Compare::*;
        use Provenance::*;
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut worst = f64::INFINITY;
        let mut equality = 0.0f64;
        for _ in 0..100 {
            let m = rng.gen_range(4..40);
            let q = rng.gen_range(2.0..8.0);
            let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..2.0)).collect();
            let mut z = || C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let f: Vec<C64> = (0..m).map(|_| z()).collect();
            let g: Vec<C64> = (0..m).map(|_| z()).collect();
            let input = TwoProfileInput::new(w.clone(), f.clone(), g, q)?;
            let scale = phi_q_functional(&input).max(1e-300);
            worst = worst.min(two_profile_inequality_residual(&input) / scale);
            // |g| = |f| with arbitrary phases
            let g: Vec<C64> = f.iter().map(|v| v * C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))).collect();
            let input = TwoProfileInput::new(w, f, g, q)?;
            let scale = phi_q_functional(&input).max(1e-300);
            equality = equality.max(two_profile_inequality_residual(&input).abs() / scale);
        }
        self.push("two_profile_min_residual", worst, 0.0, 1e-8, AtLeast, Paper);
        self.push("two_profile_equality_residual", equality, 0.0, 1e-8, AtMost, Paper);
        for d in [1, 2] {
            let g = self.cfg.gaussian(d);
            let q = Exponent::strichartz(d).value();
            let t = tilde_strichartz_quotient(&g, &g, d)?;
            self.push(
                &format!("gaussian_pair_tilde_d{d}"),
                t,
                c_constant(q) * gaussian_strichartz_constant(d),
                1e-4,
                Rel,
                Paper,
            );
        }
        Ok(())
    }

    fn expansion(&mut self, n: usize) -> Result<()> {
        use Compare::*;
        use Provenance::*;
        let d = n - 1;
        let q = Exponent::strichartz(d).value();
        let slope_tol = if n == 3 { 0.03 } else { 0.07 };
        let eps = &self.cfg.eps_list;
        let single = single_bump_sweep(eps, n)?;
        let anti = antipodal_sweep(eps, n)?;
        let l2 = l2_sweep(eps, n)?;
        self.trusted &= single.trusted && anti.trusted;
        let s = gaussian_strichartz_constant(d);
        self.push(&format!("single_slope_N{n}"), single.slope, 0.25, slope_tol, Abs, Paper);
        self.push(&format!("single_intercept_N{n}"), single.intercept, s.ln(), 2e-3, Abs, Paper);
        self.push(&format!("antipodal_slope_N{n}"), anti.slope, 0.25, slope_tol, Abs, Paper);
        self.push(&format!("antipodal_intercept_N{n}"), anti.intercept, (c_constant(q) * s).ln(), 2e-3, Abs, Paper);
        let l2_expected = (d * (2 - d)) as f64 / 16.0;
        if d == 2 {
            self.push("l2_coefficient_N3", l2.slope, 0.0, 3e-3, Abs, Paper);
        } else {
            self.push("l2_coefficient_N2", l2.slope / l2.intercept, l2_expected, 0.15, Rel, Paper);
        }
        self.csv.push((format!("expansion_N{n}.csv"), sweep_csv(&single, &anti, &l2)));
        Ok(())
    }

    fn optimize(&mut self, n: usize) -> Result<()> {
        use Compare::*;
        use Provenance::*;
        let sc = self.cfg.search(n)?;
        let (gap, traces) = gap_report(&sc)?;
        self.trusted &= gap.trusted;
        let el = traces.iter().map(|t| t.el_residual).fold(0.0, f64::max);
        let trips: usize = traces.iter().map(|t| t.guard_trips).sum();
        self.push(&format!("el_residual_max_N{n}"), el, 0.0, 1e-5, AtMost, Derived);
        self.push(&format!("guard_trips_N{n}"), trips as f64, 0.0, 0.5, AtMost, Trivial);
        if n == 3 {
            self.push("gap_ratio_N3", gap.ratio, 4.0 / 3.0, 2e-3, AtLeast, Derived);
            let worst = traces.iter().map(|t| t.final_quotient()).fold(f64::INFINITY, f64::min);
            self.push("multistart_worst_over_benchmark_N3", worst * 4.0 * PI * PI, 0.999, 1e-12, AtLeast, Derived);
        } else {
            self.push("gap_margin_N2", gap.margin, 0.0, 0.0, Exceeds, Derived);
        }
        self.extra.push((format!("gap_N{n}"), serde_json::to_value(&gap)?));
        let tr: Vec<serde_json::Value> = traces.iter().map(|t| t.to_json()).collect();
        self.extra.push((format!("traces_N{n}"), serde_json::Value::Array(tr)));
        Ok(())
    }

    fn refined(&mut self, n: usize) -> Result<()> {
        use Compare::*;
        use Provenance::*;
        let res = if n == 3 { 24 } else { 128 };
        let grid = make_sphere_grid(n, res)?;
        let atlas = CapAtlas::new(&grid, 0.3)?;
        let rcfg = RefinedNormConfig::for_atlas(&atlas);
        let bound = refined_norm_bound(&atlas, &rcfg);
        self.push(&format!("partition_defect_N{n}"), atlas.partition_defect(), 0.0, 1e-12, AtMost, Trivial);

        let mut family = vec![SphereFunction::constant(&grid, 1.0), random_smooth(&grid, self.cfg.seed, 3.0)];
        family.push(g_eps(0.3, &grid, &Cutoff::default())?);
        let mut chain = f64::NEG_INFINITY;
        for f in &family {
            let r = refined_norm(f, &atlas, &rcfg)?;
            chain = chain.max(r.value / (bound * f.norm()));
        }
        self.push(&format!("refined_chain_N{n}"), chain, 1.0, 0.0, AtMost, Paper);

        // modulation by a lattice vector of the x window leaves the value unchanged
        let f = &family[1];
        let step = rcfg.x_step;
        let a: Vec<f64> = (0..n).map(|i| step * (i as f64 + 1.0)).collect();
        let v0 = refined_norm(f, &atlas, &rcfg)?.value;
        let v1 = refined_norm(&f.modulated(&a), &atlas, &rcfg)?.value;
        self.push(&format!("refined_modulation_N{n}"), v1, v0, 1e-9, Rel, Paper);

        self.cap_identity(n)?;
        Ok(())
    }

    fn appendix(&mut self) -> Result<()> {
        use Compare::*;
        use Provenance::*;
        // bilinear ratios at three dyadic scales, both dispersions
        let psi = random_band_limited(1, 0.9, 6, self.cfg.seed)?;
        let mut vals = Vec::new();
        for disp in [Dispersion::Parabolic, Dispersion::Perturbed { support: 0.9 }] {
            let bc = BilinearConfig::new(0.9, disp);
            for j in [-2, -3, -4] {
                vals.push(bilinear_ratio(&psi, &DyadicCube::new(j, vec![0]), &DyadicCube::new(j, vec![2]), 2.5, &bc)?);
            }
        }
        self.push("bilinear_band", band(&vals), 10.0, 0.0, AtMost, Paper);

        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ 0x5eed);
        let lat = Lattice::centered(1, 0.125, 256);
        let mut vals = Vec::new();
        for _ in 0..20 {
            let k = rng.gen_range(1..5);
            let bumps: Vec<(f64, f64, f64)> =
                (0..k).map(|_| (rng.gen_range(-8.0..8.0), rng.gen_range(0.3..2.0), rng.gen_range(0.2..1.0))).collect();
            let f = ProfileFunction::from_fn(lat.clone(), |x| {
                let v: f64 = bumps.iter().map(|(c, w, a)| a * (-((x[0] - c) / w).powi(2)).exp()).sum();
                C64::new(v, 0.0)
            });
            vals.push(dyadic_sum_ratio(&f, 4.0 / 3.0, 2.0, -1, 4)?);
        }
        self.push("dyadic_sum_band", band(&vals), 10.0, 0.0, AtMost, Paper);

        self.push("q_star(4)", q_star(4.0)?, 2.0, 0.0, Abs, Trivial);
        self.push("q_star(6)", q_star(6.0)?, 1.5, 0.0, Abs, Trivial);
        self.push("q_star(10/3)", q_star(10.0 / 3.0)?, 5.0 / 3.0, 1e-15, Abs, Trivial);
        Ok(())
    }

    fn concmaps(&mut self) -> Result<()> {
        use Compare::*;
        use Provenance::*;
        let mut bt = 0.0f64;
        for d in [1, 2] {
            let g = self.cfg.gaussian(d);
            let h = g.scaled(C64::new(0.0, 0.5));
            bt = bt.max(bt_identity_residual(&g, &h, 0.5)?);
        }
        self.push("bt_identity", bt, 0.0, 1e-6, AtMost, Paper);

        let g = self.cfg.gaussian(2);
        let g = g.scaled(C64::new(1.0 / g.norm(), 0.0));
        let grid = make_sphere_grid(3, 64)?;
        let frame = ConcentrationFrame::identity(3, 0.5)?;
        let b = b_map(&g, &g.conj(), &frame, &grid)?;
        self.push("b_map_norm", b.norm().powi(2), 2.0, 1e-6, Abs, Paper);

        let td = TDelta::new(&g, 0.0)?;
        let mut worst = 0.0f64;
        for t in [0.0, 0.3, 1.1] {
            let u = propagate(&g, t, &Dispersion::Parabolic)?;
            for idx in [0usize, 137, 1500, 2112, 2900] {
                let p = u.lattice.point(idx);
                worst = worst.max((td.eval(&[p[0], p[1], t]) - u.values[idx]).norm());
            }
        }
        self.push("t_delta_zero_vs_propagator", worst, 0.0, 1e-10, AtMost, Paper);
        Ok(())
    }

    fn finish(self, command: &str) -> Report {
        Report {
            command: command.into(),
            config_hash: self.cfg.hash(command),
            results: self.rows,
            trusted: self.trusted,
            csv: self.csv,
            extra: self.extra,
        }
    }
}

fn band(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

fn sweep_csv(single: &ExpansionFit, anti: &ExpansionFit, l2: &ExpansionFit) -> String {
    let mut s = String::from("eps2,log_quotient,log_antipodal_quotient,scaled_l2\n");
    for i in 0..single.eps2_values.len() {
        s.push_str(&format!("{},{},{},{}\n", single.eps2_values[i], single.observable[i], anti.observable[i], l2.observable[i]));
    }
    s
}

/// Run one command. Numerical errors inside a suite surface as `Err`.
pub fn run(command: &str, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut s = Suite::new(cfg);
    match command {
        "constants" => s.constants()?,
        "strichartz" => {
            s.strichartz()?;
            s.two_profile()?;
        }
        "expansion" => s.expansion(cfg.n)?,
        "optimize" => s.optimize(cfg.n)?,
        "refined" => {
            s.refined(cfg.n)?;
            s.appendix()?;
        }
        "concmaps" => {
            s.concmaps()?;
            s.cap_identity(cfg.n)?;
        }
        "verify" => {
            s.constants()?;
            s.c2();
            s.strichartz()?;
            s.two_profile()?;
            s.concmaps()?;
            for n in [3, 2] {
                s.expansion(n)?;
                s.optimize(n)?;
                s.refined(n)?;
            }
            s.appendix()?;
        }
        other => return Err(SrlError::Config(format!("unknown command {other:?}; expected one of {COMMANDS:?}"))),
    }
    Ok(s.finish(command))
}

impl Suite<'_> {
    fn cap_identity(&mut self, n: usize) -> Result<()> {
        let mut ic = CapIdentityConfig::new(n);
        let mut tol = 1e-6;
        if self.cfg.quick && n == 3 {
            ic.sphere_resolution = 240;
            tol = 1e-5;
        }
        let resid = cap_profile_identity_residual(&test_bump, &ic)?;
        self.push(&format!("cap_identity_N{n}"), resid, 0.0, tol, Compare::AtMost, Provenance::Paper);
        Ok(())
    }
}

/// Smooth bump supported in the upper cap of angular radius about 0.5, given in local coordinates.
fn test_bump(w: &[f64]) -> C64 {
    let m = w.len();
    if w[m - 1] <= 0.0 {
        return C64::new(0.0, 0.0);
    }
    let r = w[..m - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
    C64::new(1.0 + w[0], 0.3 * w[0]) * smooth_ramp((0.29 - r) / 0.2)
}

/// Write `<command>.json`, any CSV tables and auxiliary JSON into `dir`.
pub fn emit_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let main = dir.join(format!("{}.json", report.command));
    std::fs::write(&main, serde_json::to_string_pretty(report)? + "\n")?;
    written.push(main);
    for (name, body) in &report.csv {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
    }
    for (name, value) in &report.extra {
        let p = dir.join(format!("{}_{name}.json", report.command));
        std::fs::write(&p, serde_json::to_string_pretty(value)? + "\n")?;
        written.push(p);
    }
    Ok(written)
}

/// Full pipeline used by the binary: run, write, map to an exit status.
pub fn execute(command: &str, cfg: &RunConfig) -> i32 {
    let report = match run(command, cfg) {
        Ok(r) => r,
        Err(e @ (SrlError::Config(_) | SrlError::UnsupportedDimension(_) | SrlError::ResolutionTooSmall(..))) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    for c in &report.results {
        println!(
            "{:<4} {:<40} value={:<24e} expected={:e} tol={:e}",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.value,
            c.expected,
            c.tolerance
        );
    }
    if let Err(e) = emit_report(&report, &cfg.out_dir) {
        eprintln!("cannot write report: {e}");
        return EXIT_FAIL;
    }
    report.exit_code()
}
