use std::f64::consts::TAU;

use kee_core::cohomology::{canonical_class, class_volume, intersect, is_kahler, kee_class, proportionality_check, ExactClass};
use kee_core::geometry::{
    chart_grid, cone_angle_probe_at_offset, einstein_residual, fiber_volume, fiber_volume_quadrature, full_fiber_length,
    total_volume,
};
use kee_core::limits::{beta2_remainder, collapse_report, fiber_length_asymptote};
use kee_core::{make_profile, EinsteinProfile, End, GaugeChoice, QuadratureConfig, SurfaceIndex, TauSMap};

use crate::args::{Command, RunConfig};
use crate::report::{sort_records, Record};

pub const EINSTEIN_THRESHOLD: f64 = 1e-5;
pub const ODE_THRESHOLD: f64 = 1e-12;
pub const BOUNDARY_THRESHOLD: f64 = 1e-10;
pub const CONE_THRESHOLD: f64 = 1e-3 * TAU;
pub const CONE_PROBE_OFFSET: f64 = 1e-6;
pub const PROPORTIONALITY_THRESHOLD: f64 = 1e-12;
pub const VOLUME_THRESHOLD: f64 = 1e-9;

/// Columns every row starts with.
pub const ECHO_KEYS: [&str; 8] = ["kind", "command", "n", "beta1", "grid", "fd_step", "quad_tol", "s_hull"];

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub meta: Record,
    pub rows: Vec<Record>,
    /// A threshold failed or a module reported an error.
    pub failed: bool,
}

fn echo(cfg: &RunConfig, kind: &str, beta1: f64) -> Record {
    let mut r = Record::new();
    r.push("kind", kind)
        .push("command", cfg.command.name())
        .push("n", cfg.n)
        .push("beta1", beta1)
        .push("grid", cfg.grid)
        .push("fd_step", cfg.fd_step)
        .push("quad_tol", cfg.quad_tol)
        .push("s_hull", cfg.s_hull);
    r
}

type RowResult = Result<(Vec<Record>, bool), kee_core::Error>;

struct Ctx<'a> {
    cfg: &'a RunConfig,
    n: SurfaceIndex,
    quad: QuadratureConfig,
}

impl Ctx<'_> {
    fn profile(&self, beta1: f64) -> Result<EinsteinProfile, kee_core::Error> {
        make_profile(self.n, beta1)
    }

    fn map(&self, p: &EinsteinProfile) -> Result<TauSMap, kee_core::Error> {
        TauSMap::build_with_hull(p, GaugeChoice::midpoint(), self.quad, self.cfg.s_hull)
    }

    fn solve(&self, beta1: f64) -> RowResult {
        let p = self.profile(beta1)?;
        let mut r = echo(self.cfg, "solution", beta1);
        let c = kee_class(self.n, beta1, p.beta2())?;
        r.push("beta2", p.beta2())
            .push("lambda", p.lambda())
            .push("T", p.alpha2())
            .push("alpha1", p.alpha1())
            .push("phi_prime_lower", p.eval_phi_prime(1.0)?)
            .push("phi_prime_upper", p.eval_phi_prime(p.alpha2())?)
            .push("fiber_length", full_fiber_length(&p, &self.quad)?)
            .push("fiber_volume", fiber_volume(&p))
            .push("total_volume", total_volume(&p, &self.quad)?)
            .push("kee_a", c.a)
            .push("kee_b", c.b);
        let mut rows = vec![r];
        let k = self.cfg.emit_profile;
        for i in 0..k {
            let t = if k == 1 { 0.5 } else { i as f64 / (k - 1) as f64 };
            let tau = (1.0 + p.alpha2_minus_one() * t).min(p.alpha2());
            let mut s = echo(self.cfg, "profile_sample", beta1);
            s.push("index", i)
                .push("tau", tau)
                .push("phi", p.eval_phi(tau)?)
                .push("phi_prime", p.eval_phi_prime(tau)?);
            rows.push(s);
        }
        Ok((rows, false))
    }

    fn scan(&self, beta1: f64) -> RowResult {
        let p = self.profile(beta1)?;
        let length = full_fiber_length(&p, &self.quad)?;
        let mut r = echo(self.cfg, "scan", beta1);
        r.push("beta2", p.beta2())
            .push("lambda", p.lambda())
            .push("T", p.alpha2())
            .push("fiber_length", length)
            .push("rescaled_length", length / beta1)
            .push("fiber_volume", fiber_volume(&p))
            .push("beta2_series_dev", beta2_remainder(self.n, beta1, 2)?);
        Ok((vec![r], false))
    }

    fn cone_probes(&self, p: &EinsteinProfile) -> Result<(f64, f64), kee_core::Error> {
        Ok((
            cone_angle_probe_at_offset(p, End::Lower, CONE_PROBE_OFFSET, &self.quad)?,
            cone_angle_probe_at_offset(p, End::Upper, CONE_PROBE_OFFSET, &self.quad)?,
        ))
    }

    fn verify(&self, beta1: f64) -> RowResult {
        let p = self.profile(beta1)?;
        let m = self.map(&p)?;
        let g = self.cfg.grid;
        let grid = chart_grid(self.n.get(), g, g, &[-2.0, 0.0, 2.0])?;
        let residual = einstein_residual(&p, &m, &grid, self.cfg.fd_step)?;
        let mut ode: f64 = 0.0;
        for k in 0..1000 {
            let tau = (1.0 + p.alpha2_minus_one() * k as f64 / 999.0).min(p.alpha2());
            ode = ode.max(p.ode_residual(tau)?.abs());
        }
        let boundary = (p.eval_phi_prime(1.0)? - beta1)
            .abs()
            .max((p.eval_phi_prime(p.alpha2())? + p.beta2()).abs());
        let (lo, hi) = self.cone_probes(&p)?;
        let cone_err = (lo - TAU * beta1).abs().max((hi - TAU * p.beta2()).abs());
        let passed = residual <= EINSTEIN_THRESHOLD
            && ode <= ODE_THRESHOLD
            && boundary <= BOUNDARY_THRESHOLD
            && cone_err <= CONE_THRESHOLD;
        let mut r = echo(self.cfg, "verification", beta1);
        r.push("beta2", p.beta2())
            .push("lambda", p.lambda())
            .push("T", p.alpha2())
            .push("grid_points", grid.len())
            .push("max_residual", residual)
            .push("einstein_threshold", EINSTEIN_THRESHOLD)
            .push("ode_residual_max", ode)
            .push("ode_threshold", ODE_THRESHOLD)
            .push("boundary_slope_err", boundary)
            .push("boundary_threshold", BOUNDARY_THRESHOLD)
            .push("cone_probe_lower", lo)
            .push("cone_probe_upper", hi)
            .push("cone_err", cone_err)
            .push("cone_threshold", CONE_THRESHOLD)
            .push("passed", passed);
        Ok((vec![r], !passed))
    }

    fn fiber(&self, beta1: f64) -> RowResult {
        let p = self.profile(beta1)?;
        let length = full_fiber_length(&p, &self.quad)?;
        let area = fiber_volume(&p);
        let area_q = fiber_volume_quadrature(&p, &self.quad)?;
        let (lo, hi) = self.cone_probes(&p)?;
        let mut r = echo(self.cfg, "fiber", beta1);
        r.push("beta2", p.beta2())
            .push("T", p.alpha2())
            .push("fiber_length", length)
            .push("fiber_length_asymptote", fiber_length_asymptote(self.n))
            .push("rescaled_length", length / beta1)
            .push("fiber_volume", area)
            .push("fiber_volume_quadrature", area_q)
            .push("fiber_volume_diff", (area_q - area).abs())
            .push("cone_probe_offset", CONE_PROBE_OFFSET)
            .push("cone_probe_lower", lo)
            .push("cone_target_lower", TAU * beta1)
            .push("cone_probe_upper", hi)
            .push("cone_target_upper", TAU * p.beta2());
        Ok((vec![r], false))
    }

    fn classes(&self, beta1: f64) -> RowResult {
        let n = self.n;
        let p = self.profile(beta1)?;
        let c = kee_class(n, beta1, p.beta2())?;
        let (sp, sq) = c.to_sections(n);
        let vol_class = class_volume(n, &c);
        let vol = total_volume(&p, &self.quad)?;
        let vol_diff = (vol / (TAU * TAU * vol_class) - 1.0).abs();
        let prop = proportionality_check(n, beta1, p.beta2())?;
        let nf = n.as_f64();
        let t_diff = (p.alpha2() - (2.0 + nf * p.beta2()) / (2.0 - nf * beta1)).abs();
        let k = canonical_class(n);
        let z = ExactClass::zero_section();
        let zi = ExactClass::infinity_section(n);
        let adj_zero = intersect(n, &(k + z), &z);
        let adj_inf = intersect(n, &(k + zi), &zi);
        let kahler = is_kahler(n, &c);
        let passed = prop <= PROPORTIONALITY_THRESHOLD
            && vol_diff <= VOLUME_THRESHOLD
            && kahler
            && *adj_zero.numer() == -2
            && *adj_inf.numer() == -2
            && adj_zero.is_integer()
            && adj_inf.is_integer();
        let mut r = echo(self.cfg, "classes", beta1);
        r.push("beta2", p.beta2())
            .push("T", p.alpha2())
            .push("kee_a", c.a)
            .push("kee_b", c.b)
            .push("kee_x", -sp)
            .push("kee_y", sq)
            .push("is_kahler", kahler)
            .push("class_volume", vol_class)
            .push("total_volume", vol)
            .push("volume_rel_diff", vol_diff)
            .push("volume_threshold", VOLUME_THRESHOLD)
            .push("proportionality_diff", prop)
            .push("proportionality_threshold", PROPORTIONALITY_THRESHOLD)
            .push("T_identity_diff", t_diff)
            .push("canonical_a", *k.a.numer())
            .push("canonical_b", *k.b.numer())
            .push("adjunction_zero", *adj_zero.numer())
            .push("adjunction_infinity", *adj_inf.numer())
            .push("passed", passed);
        Ok((vec![r], !passed))
    }
}

fn error_row(cfg: &RunConfig, beta1: f64, e: &kee_core::Error) -> Record {
    let mut r = echo(cfg, "error", beta1);
    r.push("error", e.to_string());
    r
}

/// Runs the configured pipeline. Rows are sorted by `(n, beta1)`.
pub fn run(cfg: &RunConfig) -> Outcome {
    let mut meta = Record::new();
    meta.push("tool", "kee")
        .push("version", env!("CARGO_PKG_VERSION"))
        .push("command", cfg.command.name())
        .push("format", cfg.format.name())
        .push("n", cfg.n)
        .push("beta1_count", cfg.beta1.len())
        .push("grid", cfg.grid)
        .push("fd_step", cfg.fd_step)
        .push("quad_tol", cfg.quad_tol)
        .push("s_hull", cfg.s_hull)
        .push("emit_profile", cfg.emit_profile);

    let n = SurfaceIndex::new(cfg.n).expect("validated at parse time");
    let quad = QuadratureConfig::with_tolerance(cfg.quad_tol).expect("validated at parse time");
    let ctx = Ctx { cfg, n, quad };

    let (mut rows, failed) = if cfg.command == Command::Limit {
        limit_rows(&ctx)
    } else {
        let results = kee_core::parallel::map_collect(&cfg.beta1, |_, &b| {
            let r = match cfg.command {
                Command::Solve => ctx.solve(b),
                Command::Scan => ctx.scan(b),
                Command::Verify => ctx.verify(b),
                Command::Fiber => ctx.fiber(b),
                Command::Classes => ctx.classes(b),
                Command::Limit => unreachable!(),
            };
            r.unwrap_or_else(|e| (vec![error_row(cfg, b, &e)], true))
        });
        let failed = results.iter().any(|(_, f)| *f);
        (results.into_iter().flat_map(|(r, _)| r).collect::<Vec<_>>(), failed)
    };
    sort_records(&mut rows);
    meta.push("row_count", rows.len())
        .push("status", if failed { "failed" } else { "ok" });
    Outcome { meta, rows, failed }
}

fn limit_rows(ctx: &Ctx<'_>) -> (Vec<Record>, bool) {
    let cfg = ctx.cfg;
    match collapse_report(ctx.n, &cfg.beta1, &ctx.quad) {
        Ok(report) => {
            let asymptote = fiber_length_asymptote(ctx.n);
            let rows = report
                .entries
                .iter()
                .map(|e| {
                    let mut r = echo(cfg, "limit", e.beta1);
                    r.push("beta2", e.beta2)
                        .push("T", e.alpha2)
                        .push("fiber_length", e.fiber_length)
                        .push("fiber_length_asymptote", asymptote)
                        .push("rescaled_length", e.rescaled_length)
                        .push("coeff_y", e.rescaled_coeff_y)
                        .push("coeff_theta", e.rescaled_coeff_theta)
                        .push("tensor_deviation", e.tensor_deviation_at_probe)
                        .push("probe_z", report.probe.z.re)
                        .push("probe_w", report.probe.w.re)
                        .push("beta2_series_dev", e.beta2_series_dev)
                        .push("alpha1_series_dev", e.alpha1_series_dev)
                        .push("alpha2_series_dev", e.alpha2_series_dev);
                    r
                })
                .collect();
            (rows, false)
        }
        Err(e) => (vec![error_row(cfg, cfg.beta1[0], &e)], true),
    }
}
