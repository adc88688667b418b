use dmax_core::directions::{DirectionKind, DirectionSet};
use dmax_core::dyadic::{
    conditional_expectation, cww_profile, domination_check, e0_smallness_check, martingale_maximal,
    random_dyadic_martingale, square_function, MartingaleDecomposition,
};
use dmax_core::maximal::{directional_sup, hardy_littlewood, kakeya_single_scale, strong_maximal};
use dmax_core::norm_lab::{
    exact_diagonal_norm, growth_curve, lemma3_split, lower_bound_row, middle_energy,
    power_iteration_norm, FamilySpec, LowerBoundConfig, MaximalOperator,
};
use dmax_core::sectors::{
    annulus_projection, cluster_decompose, covering_constant, direction_stability_check,
    kappa_classes, make_circle_grids, make_sectors, sector_projection, selection_check,
    split_by_grid, verify_nesting, verify_pairwise, COVERING_BOUND, TURN,
};
use dmax_core::spectral::grid::{forward_spectrum, inverse_spectrum};
use dmax_core::spectral::io::{read_grid, write_grid};
use dmax_core::spectral::multiplier::{
    apply_directional_multiplier, kernel_decay_check, KernelGrid,
};
use dmax_core::spectral::{make_lp_family, scale_projection, verify_hm_symbol, SampleSpec};
use dmax_core::{Complex64, GridFunction, Result, SmoothWindow, Symbol1D};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<(bool, String)>;

fn rel(a: &GridFunction, b: &GridFunction) -> f64 {
    a.sub(b).norm_l2() / b.norm_l2().max(f64::MIN_POSITIVE)
}

fn unit_at(turns: f64) -> [f64; 2] {
    let a = std::f64::consts::TAU * turns;
    [a.cos(), a.sin()]
}

fn spectral_checks(level: u32, seed: u64) -> Vec<(&'static str, Box<dyn Fn() -> Outcome>)> {
    vec![
        (
            "fft round trip",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let e = rel(&inverse_spectrum(&forward_spectrum(&f)), &f);
                Ok((e <= 1e-10, format!("relative error {e:.2e}")))
            }),
        ),
        (
            "parseval",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let s = forward_spectrum(&f);
                let e = (s.norm_l2() - f.norm_l2()).abs() / f.norm_l2();
                Ok((e <= 1e-10, format!("relative error {e:.2e}")))
            }),
        ),
        (
            "sgn maps cos to i sin",
            Box::new(move || {
                let tau = std::f64::consts::TAU;
                let f =
                    GridFunction::from_fn(level, 1.0, |x, _| Complex64::new((tau * x).cos(), 0.0))?;
                let g =
                    GridFunction::from_fn(level, 1.0, |x, _| Complex64::new(0.0, (tau * x).sin()))?;
                let out = apply_directional_multiplier(&f, &Symbol1D::sgn(), [1.0, 0.0])?;
                let e = out.sub(&g).max_abs();
                Ok((e <= 1e-10, format!("max error {e:.2e}")))
            }),
        ),
        (
            "diagonal norm equals power iteration",
            Box::new(move || {
                let m = Symbol1D::piecewise_random(seed, 3, 0.75);
                let v = unit_at(0.1);
                let exact = exact_diagonal_norm(&m, v, level, 1.0)?.value;
                let power = power_iteration_norm(&m, v, level, 1.0, seed)?;
                let e = (exact - power.value).abs();
                Ok((
                    power.converged && e <= 1e-6,
                    format!("exact {exact:.8}, power {:.8}", power.value),
                ))
            }),
        ),
        (
            "LP projections bounded by sup φ",
            Box::new(move || {
                let lp = make_lp_family()?;
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let worst = (-1..level as i32)
                    .map(|k| scale_projection(&f, k, &lp).norm_l2() / f.norm_l2())
                    .fold(0.0, f64::max);
                Ok((
                    worst <= 1.0 + 1e-12,
                    format!("largest ‖S_k f‖/‖f‖ {worst:.4}"),
                ))
            }),
        ),
        (
            "sgn is Hörmander–Mikhlin",
            Box::new(|| {
                let r = verify_hm_symbol(&Symbol1D::sgn(), 2, &SampleSpec::default())?;
                Ok((
                    r.is_hormander_mikhlin(),
                    format!("C0 = {:?}", r.constant(0)),
                ))
            }),
        ),
        (
            "kernel decays faster than |x|^-2.7",
            Box::new(move || {
                let lp = make_lp_family()?;
                let k = kernel_decay_check(
                    unit_at(0.37),
                    &lp,
                    &SmoothWindow::default(),
                    KernelGrid::default(),
                )?;
                Ok((
                    k.constant.is_finite() && k.tail_exponent <= -2.7,
                    format!("tail exponent {:.2}", k.tail_exponent),
                ))
            }),
        ),
        (
            "DMAX round trip",
            Box::new(move || {
                let f = GridFunction::random_real(level, 2.5, seed)?;
                let mut buf = Vec::new();
                write_grid(&mut buf, &f)?;
                let back = read_grid(&mut &buf[..])?;
                Ok((back == f, format!("{} bytes", buf.len())))
            }),
        ),
    ]
}

fn direction_checks(seed: u64) -> Vec<(&'static str, Box<dyn Fn() -> Outcome>)> {
    vec![
        (
            "seeded sets are reproducible",
            Box::new(move || {
                let a = DirectionSet::make(DirectionKind::Random, 16, seed)?;
                let b = DirectionSet::make(DirectionKind::Random, 16, seed)?;
                Ok((a == b, "random N = 16".into()))
            }),
        ),
        (
            "JSON round trip",
            Box::new(move || {
                let a = DirectionSet::make(DirectionKind::Random, 33, seed)?;
                let b = DirectionSet::from_json(&a.to_json()?)?;
                Ok((a == b, "random N = 33".into()))
            }),
        ),
        (
            "unit vectors",
            Box::new(|| {
                let ok = [DirectionKind::Equispaced, DirectionKind::Lacunary]
                    .iter()
                    .all(|&k| {
                        DirectionSet::make(k, 64, 0)
                            .map(|s| s.validate().is_ok())
                            .unwrap_or(false)
                    });
                Ok((ok, "equispaced and lacunary N = 64".into()))
            }),
        ),
    ]
}

fn maximal_checks(level: u32, seed: u64) -> Vec<(&'static str, Box<dyn Fn() -> Outcome>)> {
    vec![
        (
            "monotone under set growth",
            Box::new(move || {
                let f = GridFunction::random_real(level, 4.0, seed)?;
                let small = DirectionSet::make(DirectionKind::Equispaced, 4, 0)?;
                let large = DirectionSet::make(DirectionKind::Equispaced, 8, 0)?;
                let a = kakeya_single_scale(&f, &small)?;
                let b = kakeya_single_scale(&f, &large)?;
                let ok = a
                    .values()
                    .iter()
                    .zip(b.values())
                    .all(|(x, y)| x <= &(y + 1e-12));
                Ok((ok, "M⁰ over Σ_4 ⊂ Σ_8".into()))
            }),
        ),
        (
            "directional sup dominates members",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let set = DirectionSet::make(DirectionKind::Random, 6, seed)?;
                let m = Symbol1D::sgn();
                let sup = directional_sup(&f, &set, &m);
                let mut ok = true;
                for &v in set.vectors() {
                    let t = apply_directional_multiplier(&f, &m, v)?;
                    ok &= t
                        .values()
                        .iter()
                        .zip(sup.values())
                        .all(|(z, s)| z.norm() <= s + 1e-12);
                }
                Ok((ok, "sgn, random N = 6".into()))
            }),
        ),
        (
            "maximal functions dominate |f|",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let hl = hardy_littlewood(&f);
                let st = strong_maximal(&f);
                let ok = f
                    .values()
                    .iter()
                    .zip(hl.values().iter().zip(st.values()))
                    .all(|(z, (a, b))| z.norm() <= a.re + 1e-12 && z.norm() <= b.re + 1e-12);
                Ok((ok, "dyadic and strong maximal".into()))
            }),
        ),
    ]
}

fn dyadic_checks(level: u32, seed: u64) -> Vec<(&'static str, Box<dyn Fn() -> Outcome>)> {
    vec![
        (
            "E_j E_k = E_min(j,k)",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let mut worst = 0.0f64;
                for j in 0..=level {
                    for k in 0..=level {
                        let a = conditional_expectation(&conditional_expectation(&f, k)?, j)?;
                        let b = conditional_expectation(&f, j.min(k))?;
                        worst = worst.max(a.sub(&b).max_abs());
                    }
                }
                Ok((worst <= 1e-10, format!("max error {worst:.2e}")))
            }),
        ),
        (
            "martingale orthogonality and reconstruction",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let d = MartingaleDecomposition::new(&f);
                let rec = rel(&d.reconstruct(), &f);
                let energy = d.base.norm_l2().powi(2)
                    + d.differences
                        .iter()
                        .map(|g| g.norm_l2().powi(2))
                        .sum::<f64>();
                let e = (energy - f.norm_l2().powi(2)).abs() / f.norm_l2().powi(2);
                let mut cross = 0.0f64;
                for (a, x) in d.differences.iter().enumerate() {
                    for y in &d.differences[a + 1..] {
                        cross = cross.max(x.inner(y).norm());
                    }
                }
                let scale = f.norm_l2().powi(2);
                Ok((
                    rec <= 1e-10 && e <= 1e-10 && cross <= 1e-10 * scale,
                    format!(
                        "reconstruction {rec:.1e}, energy {e:.1e}, cross {:.1e}",
                        cross / scale
                    ),
                ))
            }),
        ),
        (
            "square function energy",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let s = square_function(&f).norm_l2();
                let e0 = conditional_expectation(&f, 0)?.norm_l2();
                let expect = (f.norm_l2().powi(2) - e0 * e0).sqrt();
                let e = (s - expect).abs() / expect;
                Ok((e <= 1e-10, format!("relative error {e:.2e}")))
            }),
        ),
        (
            "martingale maximal below dyadic maximal",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let a = martingale_maximal(&f);
                let b = hardy_littlewood(&f);
                let ok = a
                    .values()
                    .iter()
                    .zip(b.values())
                    .all(|(x, y)| x.re <= y.re + 1e-12);
                Ok((ok, "pointwise".into()))
            }),
        ),
        (
            "CWW has no violations",
            Box::new(move || {
                let lambdas: Vec<f64> = (1..=12).map(|k| 0.5 * k as f64).collect();
                let eps: Vec<f64> = (1..=9).map(|k| 0.1 * k as f64).collect();
                let mut c1 = f64::INFINITY;
                for s in 0..4 {
                    let p = cww_profile(
                        &random_dyadic_martingale(level, 1.0, seed + s),
                        &lambdas,
                        &eps,
                    )?;
                    if p.violations > 0 || !p.holds() {
                        return Ok((
                            false,
                            format!("seed {}: {} violations", seed + s, p.violations),
                        ));
                    }
                    c1 = c1.min(p.fitted_c1);
                }
                Ok((c1 > 0.0, format!("smallest fitted c1 {c1:.2}")))
            }),
        ),
        (
            "domination constant finite",
            Box::new(move || {
                let lp = make_lp_family()?;
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let r = domination_check(&f, &Symbol1D::sgn(), [1.0, 0.0], &lp)?;
                Ok((
                    r.max_ratio.is_finite() && r.max_ratio > 0.0,
                    format!("c3 {:.3}", r.max_ratio),
                ))
            }),
        ),
        (
            "E0 of high-pass output is finite",
            Box::new(move || {
                let lp = make_lp_family()?;
                let f = GridFunction::random_real(level, 2.0, seed)?;
                let r = e0_smallness_check(&f, &Symbol1D::sgn(), 1, [1.0, 0.0], &lp)?;
                Ok((
                    r.max_ratio.is_finite(),
                    format!("ratio {:.3e}", r.max_ratio),
                ))
            }),
        ),
    ]
}

fn sector_checks(level: u32, seed: u64) -> Vec<(&'static str, Box<dyn Fn() -> Outcome>)> {
    let n = (level - 1).min(8);
    vec![
        (
            "grid nesting and pairwise property",
            Box::new(|| {
                let grids = make_circle_grids()?;
                let mut pairs = 0;
                for g in &grids {
                    verify_nesting(g, 12)?;
                    pairs += verify_pairwise(g, 8)?;
                }
                Ok((true, format!("{pairs} pairs")))
            }),
        ),
        (
            "three-grid covering",
            Box::new(|| {
                let c = covering_constant(&make_circle_grids()?, 10);
                Ok((
                    c.constant <= COVERING_BOUND,
                    format!("constant {} over {} arcs", c.constant, c.arcs),
                ))
            }),
        ),
        (
            "sectors tile the annulus",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let sectors = make_sectors(n)?;
                let mut sum = GridFunction::zeros(level, 1.0)?;
                for s in &sectors {
                    sum = sum.add(&sector_projection(&f, s)?);
                }
                let e = rel(&sum, &annulus_projection(&f, n));
                Ok((e <= 1e-10, format!("n = {n}, relative error {e:.2e}")))
            }),
        ),
        (
            "clusters are orthogonal",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let sectors = make_sectors(n)?;
                let set = DirectionSet::make(DirectionKind::Equispaced, 16, 0)?;
                let mut fields = Vec::new();
                let mut disjoint = true;
                for (&k, members) in &kappa_classes(&sectors, &set) {
                    for part in split_by_grid(&sectors, members) {
                        if part.is_empty() {
                            continue;
                        }
                        let cs = cluster_decompose(&sectors, &part, k)?;
                        disjoint &= cs.across_disjoint(&sectors);
                        for c in &cs.clusters {
                            let mut g = GridFunction::zeros(level, 1.0)?;
                            for &m in &c.members {
                                g = g.add(&sector_projection(&f, &sectors[m])?);
                            }
                            fields.push(g);
                        }
                    }
                }
                let mut worst = 0.0f64;
                for (a, x) in fields.iter().enumerate() {
                    for y in &fields[a + 1..] {
                        worst = worst.max(x.inner(y).norm());
                    }
                }
                let scale = f.norm_l2().powi(2);
                Ok((
                    disjoint && worst <= 1e-10 * scale,
                    format!(
                        "{} clusters, max inner product {:.1e}",
                        fields.len(),
                        worst / scale
                    ),
                ))
            }),
        ),
        (
            "selection property",
            Box::new(move || {
                // Below n = 7 every direction lies in B(ω) ∪ (B(ω) + 1/2).
                let set = DirectionSet::make(DirectionKind::Equispaced, 64, 0)?;
                let sectors = make_sectors(7)?;
                let r = selection_check(
                    level.max(9),
                    1.0,
                    &sectors,
                    &set,
                    &SmoothWindow::default(),
                    true,
                )?;
                Ok((
                    r.holds(),
                    format!("{} pairs, {} violations", r.pairs_checked, r.violations),
                ))
            }),
        ),
        (
            "stability vanishes for v = v′",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let s = &make_sectors(n)?[1];
                let v = unit_at(s.rotated_tenfold().center() as f64 / TURN as f64);
                let r = direction_stability_check(&f, s, v, v, &SmoothWindow::default())?;
                Ok((
                    r.sup_difference == 0.0,
                    format!("sup difference {}", r.sup_difference),
                ))
            }),
        ),
    ]
}

fn norm_lab_checks(level: u32, seed: u64) -> Vec<(&'static str, Box<dyn Fn() -> Outcome>)> {
    vec![
        (
            "three-way split is exact",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?
                    .map(|z| z * z.re.abs().powi(3) * 20.0);
                let s = lemma3_split(&f, 0.5, 4.0, 4.0)?;
                Ok((
                    s.verify(&f),
                    format!("bands ({:.3e}, {}]", s.lower(), s.upper()),
                ))
            }),
        ),
        (
            "middle band energy",
            Box::new(move || {
                let f = GridFunction::random_real(level, 1.0, seed)?;
                let s = lemma3_split(&f, 0.4, 2.0, 4.0)?;
                let (lhs, rhs) = middle_energy(&f, &s, 2000)?;
                let e = (lhs - rhs).abs() / lhs;
                Ok((e <= 1e-2, format!("relative error {e:.2e}")))
            }),
        ),
        (
            "growth curve nondecreasing",
            Box::new(move || {
                let family = FamilySpec {
                    greedy_rounds: 1,
                    ..FamilySpec::new(level, 4.0)
                };
                let (curve, _) =
                    growth_curve(&MaximalOperator::Kakeya0, &[2, 4, 8], &family, seed)?;
                Ok((
                    curve.nondecreasing(),
                    format!(
                        "{:?}",
                        curve.rows.iter().map(|r| r.estimate).collect::<Vec<_>>()
                    ),
                ))
            }),
        ),
        (
            "extremal pointwise bound",
            Box::new(|| {
                let cfg = LowerBoundConfig {
                    radii_per_octave: 8,
                    angles: 64,
                    ..LowerBoundConfig::default()
                };
                let row = lower_bound_row(64, &cfg)?;
                let ok = row.ratio > 0.0
                    && (row.pointwise_violations as f64) <= 0.01 * row.valid_radii as f64;
                Ok((
                    ok,
                    format!(
                        "ratio {:.3}, {} of {} radii violate",
                        row.ratio, row.pointwise_violations, row.valid_radii
                    ),
                ))
            }),
        ),
    ]
}

/// Every check of the suite at the given level and seed, in a fixed order.
pub fn run_suite(level: u32, seed: u64) -> Vec<CheckResult> {
    let groups: [(&'static str, Vec<(&'static str, Box<dyn Fn() -> Outcome>)>); 6] = [
        ("spectral", spectral_checks(level, seed)),
        ("directions", direction_checks(seed)),
        ("maximal", maximal_checks(level, seed)),
        ("dyadic", dyadic_checks(level, seed)),
        ("sectors", sector_checks(level, seed)),
        ("norm_lab", norm_lab_checks(level, seed)),
    ];
    let mut out = Vec::new();
    for (module, checks) in groups {
        for (name, check) in checks {
            let (passed, detail) = match check() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            out.push(CheckResult {
                module,
                name,
                passed,
                detail,
            });
        }
    }
    out
}

pub fn format_table(results: &[CheckResult]) -> String {
    let width = results
        .iter()
        .map(|r| r.module.len() + r.name.chars().count() + 2)
        .max()
        .unwrap_or(0);
    let mut s = String::new();
    for r in results {
        let label = format!("{}: {}", r.module, r.name);
        let pad = width.saturating_sub(label.chars().count());
        s.push_str(&format!(
            "{} {}{}  {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            label,
            " ".repeat(pad),
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    s.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    s
}
