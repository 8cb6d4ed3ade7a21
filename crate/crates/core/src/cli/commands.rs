use std::sync::Arc;

use clap::{Args, Subcommand};
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::config::SurfaceConfig;
use super::report::{sha256_hex, Report, Table};
use super::{selftest, CharacterArgs, Cli, Command, ConfigArg, Output, PointArgs, EXIT_INVARIANT, EXIT_OK};
use crate::bgengine::{
    check_bg, kodaira_vanishing_bound, polarization_segment, polarization_wall, WallOutcome, SEMISTABILITY_NOTE,
};
use crate::chern::{delta, slope, twist_b, ChernCharacter};
use crate::error::{Error, Result};
use crate::exactform::{Definiteness, RationalVector};
use crate::hyperquad::{
    kernel_negativity_check, q_discriminant, q_discriminant_via_delta_bar, q_signature, q_y, HypersurfaceModel,
    LambdaVector, ReducedBlowupCharacter,
};
use crate::nsgeom::{
    c_constant, c_constant_canonical_bound, d_constant, hypersurface_constant, DivisorClass, Kodaira, NSLattice,
    SurfaceModel,
};
use crate::rational::{parse_rational, parse_rational_list, render, Rational};
use crate::stabkit::{
    boundary_positivity_check, central_charge, classify_torsion_pair, estimate_c_h_for, stability_function_check,
    support_property_check, BoundaryVerdict, MockObject, StabilityPoint, TorsionClass,
};

#[derive(Args, Debug)]
pub struct HyperArgs {
    #[command(subcommand)]
    pub op: HyperOp,
}

#[derive(Args, Debug, Clone)]
pub struct HyperDims {
    /// Dimension of the hypersurface.
    #[arg(long)]
    pub n: u32,
    /// Degree.
    #[arg(long, allow_hyphen_values = true)]
    pub d: i64,
    /// Number of exceptional divisors.
    #[arg(long, default_value_t = 0)]
    pub l: usize,
}

#[derive(Subcommand, Debug)]
pub enum HyperOp {
    /// Signature of q_Y.
    Qsig(HyperDims),
    /// q_Y(b, a).
    Qeval {
        #[command(flatten)]
        dims: HyperDims,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        a: String,
    },
    /// The discriminant Q_Y of a reduced character.
    #[command(name = "Q")]
    Q {
        #[command(flatten)]
        dims: HyperDims,
        #[arg(long, allow_hyphen_values = true)]
        ch0: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        h_ch2: String,
    },
    /// Definiteness of Q_Y on ker Z_t.
    Kernel {
        #[command(flatten)]
        dims: HyperDims,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Pairings of the fiber class with the E_i; defaults to zero.
        #[arg(long, allow_hyphen_values = true)]
        fiber: Option<String>,
    },
}

fn flag_error(flag: &str, e: Error) -> Error {
    Error::Parse(format!("--{flag}: {e}"))
}

fn rat(flag: &str, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| flag_error(flag, e))
}

fn list(flag: &str, text: &str) -> Result<Vec<Rational>> {
    parse_rational_list(text).map_err(|e| flag_error(flag, e))
}

fn class(flag: &str, text: &str, lattice: &Arc<NSLattice>) -> Result<DivisorClass> {
    DivisorClass::new(lattice, RationalVector::new(list(flag, text)?)).map_err(|e| flag_error(flag, e))
}

fn character(args: &CharacterArgs, lattice: &Arc<NSLattice>) -> Result<ChernCharacter> {
    Ok(ChernCharacter::new(args.ch0, class("ch1", &args.ch1, lattice)?, rat("ch2", &args.ch2)?))
}

struct Loaded {
    bytes: Vec<u8>,
    config: SurfaceConfig,
    model: SurfaceModel,
}

fn load(arg: &ConfigArg) -> Result<Loaded> {
    let bytes =
        std::fs::read(&arg.config).map_err(|e| Error::Parse(format!("cannot read {}: {e}", arg.config.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse(format!("config is not UTF-8: {e}")))?;
    let config = SurfaceConfig::parse(text)?;
    let model = config.to_model()?;
    Ok(Loaded { bytes, config, model })
}

fn new_report(echo: String, bytes: &[u8]) -> Report {
    let digest = sha256_hex(&[bytes, echo.as_bytes()]);
    Report::new(echo, digest)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub(crate) fn dispatch(cli: &Cli, echo: String) -> Result<Output> {
    match &cli.command {
        Command::Constant(cfg) => constant(cfg, echo),
        Command::Check { config, ch, b } => check(config, ch, b.as_deref(), echo),
        Command::Wall { config, e_ch0, e_ch1, f_ch0, f_ch1, l, m, steps } => {
            wall(config, (*e_ch0, e_ch1), (*f_ch0, f_ch1), l, m, *steps, echo)
        }
        Command::Charge { config, ch, point } => charge(config, ch, point, echo),
        Command::Heart { config, ch, point } => heart(config, ch, point, echo),
        Command::Support { config, point, grid_scales, grid_shifts, jobs } => {
            support(config, point, grid_scales.as_deref(), grid_shifts.as_deref(), *jobs, echo)
        }
        Command::Hyper(args) => hyper(&args.op, echo),
        Command::Kvbound { config, l } => kvbound(config, l, echo),
        Command::Normalize(cfg) => Ok(Output::Raw(load(cfg)?.config.to_text())),
        Command::Selftest { cases } => selftest::run(*cases, echo),
    }
}

fn constant(cfg: &ConfigArg, echo: String) -> Result<Output> {
    let Loaded { bytes, config, model } = load(cfg)?;
    let mut r = new_report(echo, &bytes);
    r.result("name", &config.name).result("kodaira", model.kodaira).result("chi_O_min", model.chi_o_min);
    let c = c_constant(&model)?;
    r.result("C_S", render(&c));
    if model.kodaira == Kodaira::Two {
        let d = d_constant(&model)?;
        r.result("d_S", render(&d.value)).result("d_fallback", yes_no(d.fallback));
        if d.fallback {
            r.note("no supplied candidate H has H^2 >= K.H; d_S is the 5K^2 bound from H = 5K");
        }
    }
    r.result("canonical_bound", render(&c_constant_canonical_bound(&model)?));
    if model.quasi_elliptic {
        r.note("quasi-elliptic fibration: C_S = 2 - chi(O)");
    }
    if c.is_negative() {
        r.note("C_S is negative and is reported without clamping");
    }
    match &config.hypersurface {
        Some(tag) if tag.n == 2 && tag.d >= 5 => {
            let closed = hypersurface_constant(tag.d)?;
            r.result("closed_form", render(&closed));
            r.verdict("closed-form cross-check", if closed == c { "match" } else { "mismatch" });
        }
        Some(tag) if tag.n == 2 => {
            r.note(format!("closed form needs degree >= 5, got {}", tag.d));
        }
        Some(_) => {
            r.note("closed-form cross-check is only defined for surfaces (n = 2)");
        }
        None => {}
    }
    Ok(Output::Report(r, EXIT_OK))
}

fn check(cfg: &ConfigArg, ch: &CharacterArgs, b: Option<&str>, echo: String) -> Result<Output> {
    let Loaded { bytes, model, .. } = load(cfg)?;
    let ch = character(ch, &model.lattice)?;
    let bg = check_bg(&ch, &model)?;
    let mut r = new_report(echo, &bytes);
    r.result("ch", &ch).result("C_S", render(&bg.constant));
    r.result("delta", render(&delta(&ch))).result("delta_tilde", render(&bg.value));
    if let Some(b) = b {
        let b = class("B", b, &model.lattice)?;
        let tw = twist_b(&ch, &b)?;
        r.result("ch_B", &tw).result("delta_B", render(&delta(&tw)));
    }
    r.verdict("corrected_bogomolov", if bg.holds { "holds" } else { "fails" });
    if !bg.holds {
        r.note("class cannot be mu-semistable");
    }
    r.note(SEMISTABILITY_NOTE);
    Ok(Output::Report(r, EXIT_OK))
}

fn wall(
    cfg: &ConfigArg,
    e: (i64, &str),
    f: (i64, &str),
    l: &str,
    m: &str,
    steps: Option<usize>,
    echo: String,
) -> Result<Output> {
    let Loaded { bytes, model, .. } = load(cfg)?;
    let lat = &model.lattice;
    let che = ChernCharacter::new(e.0, class("e-ch1", e.1, lat)?, Rational::zero());
    let chf = ChernCharacter::new(f.0, class("f-ch1", f.1, lat)?, Rational::zero());
    let (l, m) = (class("L", l, lat)?, class("M", m, lat)?);
    let w = polarization_wall(&che, &chf, &l, &m)?;
    let mut r = new_report(echo, &bytes);
    r.result("L.delta", render(&w.l_delta)).result("M.delta", render(&w.m_delta));
    match &w.outcome {
        WallOutcome::Wall(t) => {
            r.result("t", render(t)).result("M_t", polarization_segment(&l, &m, t)?);
            r.verdict("wall", "found");
        }
        WallOutcome::NoWall => {
            r.verdict("wall", "none");
        }
        WallOutcome::Degenerate => {
            r.verdict("wall", "degenerate");
            r.note("L.delta = M.delta = 0: the slopes agree along the whole segment");
        }
    }
    if let Some(k) = steps {
        if k < 2 {
            return Err(Error::Parse("--steps: need at least 2 points".into()));
        }
        let mut table = Table::new(&["t", "mu_t(E)", "mu_t(F)"]);
        for i in 0..k {
            let t = Rational::new(i.into(), (k - 1).into());
            let mt = polarization_segment(&l, &m, &t)?;
            let row = vec![render(&t), slope(&che, &mt)?.to_string(), slope(&chf, &mt)?.to_string()];
            table.rows.push(row);
        }
        r.table = Some(table);
    }
    Ok(Output::Report(r, EXIT_OK))
}

struct Point {
    pt: StabilityPoint,
    c_h_verified: Option<bool>,
}

fn point(model: &SurfaceModel, args: &PointArgs) -> Result<Point> {
    let lat = &model.lattice;
    let h = match &args.h {
        Some(h) => class("H", h, lat)?,
        None => model.ample_h.clone(),
    };
    if !h.square().is_positive() {
        return Err(Error::Parse(format!("--H: H^2 = {} is not positive", render(&h.square()))));
    }
    let b = match &args.b {
        Some(b) => class("B", b, lat)?,
        None => DivisorClass::zero(lat),
    };
    let (c_h, c_h_verified) = match &args.c_h {
        Some(c) => (rat("C_H", c)?, None),
        None => {
            let est = estimate_c_h_for(model, &h)?;
            (est.value, Some(est.verified))
        }
    };
    Ok(Point { pt: StabilityPoint::new(model, h, b, c_h)?, c_h_verified })
}

fn point_results(r: &mut Report, p: &Point) {
    r.result("H", &p.pt.h).result("B", &p.pt.b).result("C_S", render(&p.pt.c_s)).result("C_H", render(&p.pt.c_h));
    match p.c_h_verified {
        Some(true) => {
            r.note("C_H estimated from the supplied effective generators; unverified beyond their span");
        }
        Some(false) => {
            r.note("no effective generators supplied; C_H = 0 certifies nothing");
        }
        None => {}
    }
}

fn charge(cfg: &ConfigArg, ch: &CharacterArgs, args: &PointArgs, echo: String) -> Result<Output> {
    let Loaded { bytes, model, .. } = load(cfg)?;
    let p = point(&model, args)?;
    let ch = character(ch, &model.lattice)?;
    let z = central_charge(&p.pt, &ch)?;
    let mut r = new_report(echo, &bytes);
    point_results(&mut r, &p);
    r.result("ch", &ch).result("Re Z", render(&z.re)).result("Im Z", render(&z.im));
    let phase = if z.im.is_zero() { "undefined".to_string() } else { render(&(-&z.re / &z.im)) };
    r.result("mu_Z", phase);
    Ok(Output::Report(r, EXIT_OK))
}

fn heart(cfg: &ConfigArg, ch: &CharacterArgs, args: &PointArgs, echo: String) -> Result<Output> {
    let Loaded { bytes, model, .. } = load(cfg)?;
    let p = point(&model, args)?;
    let ch = character(ch, &model.lattice)?;
    let mut r = new_report(echo, &bytes);
    point_results(&mut r, &p);
    r.result("ch", &ch);
    if ch.ch0 < 0 {
        return Err(Error::Parse("--ch0: a semistable sheaf has ch0 >= 0".into()));
    }
    let side = classify_torsion_pair(&ch, &p.pt)?;
    r.result("torsion_pair", side).result("H.B", render(&p.pt.threshold()));
    let obj = match side {
        TorsionClass::T => MockObject::new(&p.pt, vec![], vec![ch.clone()]),
        TorsionClass::F | TorsionClass::BoundaryF => MockObject::new(&p.pt, vec![ch.clone()], vec![]),
    };
    let obj = match obj {
        Ok(o) => o,
        Err(Error::Precondition(msg)) => {
            r.verdict("heart_object", "rejected");
            r.note(msg);
            return Ok(Output::Report(r, EXIT_OK));
        }
        Err(e) => return Err(e),
    };
    let placed = if side == TorsionClass::T { "E" } else { "E[1]" };
    r.result("object", placed);
    let s = stability_function_check(&obj, &p.pt)?;
    r.result("Re Z", render(&s.z.re)).result("Im Z", render(&s.z.im));
    r.verdict("allowed_region", yes_no(s.in_allowed_region));
    let mut code = if s.in_allowed_region { EXIT_OK } else { EXIT_INVARIANT };
    if !s.in_allowed_region {
        r.note("charge leaves the upper half-plane and the negative real axis: stability function contract broken");
    }
    if side == TorsionClass::BoundaryF {
        let trace = boundary_positivity_check(&ch, &p.pt)?;
        r.result("delta", render(&trace.delta))
            .result("delta_tilde", render(&trace.delta_tilde))
            .result("delta_bar_HB", render(&trace.delta_bar_hb));
        for link in trace.links.iter().chain(std::iter::once(&trace.scaled_hodge_link)) {
            r.result(
                format!("link {}", link.name),
                format!("{} {} {}: {}", render(&link.lhs), link.relation, render(&link.rhs), yes_no(link.holds)),
            );
        }
        match &trace.verdict {
            BoundaryVerdict::Certified => {
                r.verdict("boundary_chain", "certified");
            }
            BoundaryVerdict::NotApplicable(why) => {
                r.verdict("boundary_chain", "not applicable");
                r.note(why.clone());
            }
            BoundaryVerdict::Violation => {
                r.verdict("boundary_chain", "violation");
                code = EXIT_INVARIANT;
            }
        }
    }
    Ok(Output::Report(r, code))
}

fn support(
    cfg: &ConfigArg,
    args: &PointArgs,
    scales: Option<&str>,
    shifts: Option<&str>,
    jobs: usize,
    echo: String,
) -> Result<Output> {
    let Loaded { bytes, model, .. } = load(cfg)?;
    let base = point(&model, args)?;
    let mut r = new_report(echo, &bytes);
    point_results(&mut r, &base);

    if scales.is_none() && shifts.is_none() {
        let cert = support_property_check(&base.pt)?;
        r.result("re_row", &cert.re_row).result("im_row", &cert.im_row);
        for (i, row) in cert.quadratic_form.gram().iter().enumerate() {
            r.result(format!("Q[{i}]"), RationalVector::new(row.clone()));
        }
        r.result("kernel_dim", cert.kernel_basis.len());
        for (i, v) in cert.kernel_basis.iter().enumerate() {
            r.result(format!("kernel[{i}]"), v);
        }
        r.result("restricted_signature", cert.restricted_signature);
        r.verdict("support", cert.verdict);
        r.verdict("semidefinite", yes_no(cert.verdict.is_semidefinite()));
        r.verdict("definite", yes_no(cert.verdict.is_definite()));
        let code = if cert.verdict == Definiteness::NegDefinite { EXIT_OK } else { EXIT_INVARIANT };
        return Ok(Output::Report(r, code));
    }

    if jobs == 0 {
        return Err(Error::Parse("--jobs: need at least one worker".into()));
    }
    let scales = list("grid-scales", scales.unwrap_or("1"))?;
    let shifts = list("grid-shifts", shifts.unwrap_or("0"))?;
    if let Some(s) = scales.iter().find(|s| !s.is_positive()) {
        return Err(Error::Parse(format!("--grid-scales: scale {} is not positive", render(s))));
    }
    let cells: Vec<(Rational, Rational)> =
        scales.iter().flat_map(|s| shifts.iter().map(move |k| (s.clone(), k.clone()))).collect();
    let eval = |(s, k): &(Rational, Rational)| -> Result<(Vec<String>, bool)> {
        let h = base.pt.h.scale(s);
        let b = base.pt.b.add(&base.pt.h.scale(k))?;
        let c_h = match &args.c_h {
            Some(_) => base.pt.c_h.clone(),
            None => estimate_c_h_for(&model, &h)?.value,
        };
        let pt = StabilityPoint::with_constant(&model, h, b, base.pt.c_s.clone(), c_h)?;
        let cert = support_property_check(&pt)?;
        let ok = cert.verdict == Definiteness::NegDefinite;
        let row = vec![
            render(s),
            render(k),
            render(&pt.c_h),
            cert.kernel_basis.len().to_string(),
            cert.restricted_signature.to_string(),
            cert.verdict.to_string(),
        ];
        Ok((row, ok))
    };
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::Parse(format!("--jobs: {e}")))?;
    // Indexed parallel collect keeps grid order, so output does not depend on --jobs.
    let rows: Vec<Result<(Vec<String>, bool)>> = pool.install(|| cells.par_iter().map(eval).collect());
    let mut table = Table::new(&["scale", "shift", "C_H", "kernel_dim", "restricted_signature", "verdict"]);
    let mut all_ok = true;
    for row in rows {
        let (row, ok) = row?;
        all_ok &= ok;
        table.rows.push(row);
    }
    r.result("grid_cells", table.rows.len());
    r.verdict("support_grid", if all_ok { "NegDefinite everywhere" } else { "failure" });
    r.table = Some(table);
    Ok(Output::Report(r, if all_ok { EXIT_OK } else { EXIT_INVARIANT }))
}

fn kvbound(cfg: &ConfigArg, l: &str, echo: String) -> Result<Output> {
    let Loaded { bytes, model, .. } = load(cfg)?;
    let l = class("L", l, &model.lattice)?;
    let kb = kodaira_vanishing_bound(&l, &model)?;
    let mut r = new_report(echo, &bytes);
    r.result("L", &l).result("L^2", render(&kb.l_squared)).result("bound", render(&kb.bound));
    r.verdict("nonvanishing", if kb.consistent { "consistent" } else { "inconsistent" });
    if !kb.consistent {
        r.note("L^2 exceeds the bound: H^1(L^-1) = 0 for every ample L with this self-intersection");
    }
    Ok(Output::Report(r, EXIT_OK))
}

fn hyper_model(dims: &HyperDims) -> Result<HypersurfaceModel> {
    HypersurfaceModel::new(dims.n, dims.d, dims.l)
}

fn lambda(b: &str, a: &str) -> Result<LambdaVector> {
    Ok(LambdaVector::new(rat("b", b)?, list("a", a)?))
}

fn hyper(op: &HyperOp, echo: String) -> Result<Output> {
    let mut r = new_report(echo, &[]);
    let describe = |r: &mut Report, model: &HypersurfaceModel| {
        r.result("n", model.n).result("d", model.d).result("l", model.l()).result("H^n", render(&model.hn()));
    };
    match op {
        HyperOp::Qsig(dims) => {
            let model = hyper_model(dims)?;
            describe(&mut r, &model);
            r.result("q_signature", q_signature(&model));
        }
        HyperOp::Qeval { dims, b, a } => {
            let model = hyper_model(dims)?;
            describe(&mut r, &model);
            r.result("q_Y", render(&q_y(&model, &lambda(b, a)?)?));
        }
        HyperOp::Q { dims, ch0, b, a, h_ch2 } => {
            let model = hyper_model(dims)?;
            describe(&mut r, &model);
            let rc = ReducedBlowupCharacter { ch0: *ch0, lambda1: lambda(b, a)?, h_ch2: rat("h-ch2", h_ch2)? };
            let q = q_discriminant(&model, &rc)?;
            r.result("Q_Y", render(&q));
            if model.l() == 0 {
                let via = q_discriminant_via_delta_bar(&model, &rc)?;
                r.result("delta_bar", render(&via));
                r.verdict("delta_bar agreement", yes_no(via == q));
                if via != q {
                    return Ok(Output::Report(r, EXIT_INVARIANT));
                }
            }
        }
        HyperOp::Kernel { dims, t, fiber } => {
            let model = hyper_model(dims)?;
            describe(&mut r, &model);
            let t = rat("t", t)?;
            let fiber = match fiber {
                Some(f) => RationalVector::new(list("fiber", f)?),
                None => RationalVector::zeros(model.l()),
            };
            let k = kernel_negativity_check(&model, &t, &fiber)?;
            r.result("t", render(&t)).result("fiber", &fiber).result("q_signature", k.q_signature);
            r.result("kernel_dim", k.kernel_basis.len());
            for (i, v) in k.kernel_basis.iter().enumerate() {
                r.result(format!("kernel[{i}]"), v);
            }
            r.result("restricted_signature", k.restricted_signature);
            r.result("dual_class", k.dual_class.to_vector()).result("q(dual_class)", render(&k.q_dual_class));
            r.verdict("kernel", k.verdict);
            r.verdict("semidefinite", yes_no(k.semidefinite));
            r.verdict("definite", yes_no(k.definite));
            if t.is_zero() {
                r.note("at t = 0 only semi-definiteness is expected");
            }
        }
    }
    Ok(Output::Report(r, EXIT_OK))
}
